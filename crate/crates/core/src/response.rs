//! Complex, causal medium responses built from absorption spectra.
//!
//! Field propagation obeys `∂_z Ω̃ = -χ̃(ω)·Ω̃` once the vacuum phase `iωL/c`
//! is factored out, with the susceptibility-like response
//!
//! ```text
//! χ̃(ω) = -(i/2π) ∫ α(Δ) / (ω + Δ - iγ) dΔ
//!       = ½·(α_0 + 2 Σ_{n>0} α_n e^{-inωT} e^{-nγT})     (periodic α)
//! ```
//!
//! `Re χ̃` is half the absorption and `Im χ̃` carries the dispersion. The
//! second line is the Fourier route ([`analytic_transfer_function`]); the
//! first is evaluated directly on the sampled spectrum by
//! [`complex_susceptibility`]. The two are independent and are cross-checked
//! in the tests.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, positive, Error, Result};
use crate::fft;
use crate::grid::UniformGrid;
use crate::spectra::{CombSpectrum, FourierSeries};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferKind {
    AnalyticFourier,
    SampledSusceptibility,
}

/// Complex amplitude response `H(ω)` of a slab, vacuum transit excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
    length: f64,
    kind: TransferKind,
}

impl TransferFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>, length: f64, kind: TransferKind) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: values.len(),
            });
        }
        positive("length", length)?;
        Ok(Self {
            grid,
            values,
            length,
            kind,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kind(&self) -> TransferKind {
        self.kind
    }

    /// The `L/c` transit that is kept out of `H`.
    pub fn vacuum_delay(&self) -> f64 {
        self.length / SPEED_OF_LIGHT
    }
}

/// How strictly [`analytic_transfer_function`] checks the Fourier truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Require `|α_{n_max}|·e^{-n_max γT}·L` below the tolerance.
    Checked { tolerance: f64 },
    /// Use the series as given.
    Forced,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Checked { tolerance: 1e-6 }
    }
}

/// Size of the last retained term, `|α_{n_max}|·e^{-n_max γT}·L`.
/// Zero for a series with no harmonics.
pub fn truncation_tail(series: &FourierSeries, gamma: f64, length: f64) -> f64 {
    let n = series.n_max();
    if n == 0 {
        return 0.0;
    }
    series.coefficient(n as i64).norm() * libm::exp(-(n as f64) * gamma * series.period_time()) * length
}

/// Smallest order whose retained tail term falls below `tolerance`, if any
/// order up to the series' own truncation does.
pub fn required_order(series: &FourierSeries, gamma: f64, length: f64, tolerance: f64) -> Option<usize> {
    (1..=series.n_max()).find(|&n| truncation_tail(&series.truncated(n), gamma, length) < tolerance)
}

/// `χ̃(ω)` from the Fourier coefficients.
pub fn fourier_susceptibility(series: &FourierSeries, gamma: f64, omega: f64) -> Complex64 {
    let t = series.period_time();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, c) in series.nonnegative().iter().enumerate().skip(1) {
        let n = k as f64;
        let damp = libm::exp(-n * gamma * t);
        if damp == 0.0 {
            break;
        }
        let phase = -n * omega * t;
        sum += c * Complex64::new(libm::cos(phase), libm::sin(phase)) * damp;
    }
    (Complex64::new(series.alpha0(), 0.0) + sum * 2.0) * 0.5
}

/// `H(ω) = exp(-(L/2)[α_0 + 2Σ_{n>0} α_n e^{-inωT} e^{-nγT}])` on `grid`.
pub fn analytic_transfer_function(
    series: &FourierSeries,
    gamma: f64,
    length: f64,
    grid: &UniformGrid,
    truncation: Truncation,
) -> Result<TransferFunction> {
    positive("length", length)?;
    if !(gamma.is_finite() && gamma >= 0.0) && gamma != f64::INFINITY {
        return Err(invalid("gamma", "must be non-negative"));
    }
    if let Truncation::Checked { tolerance } = truncation {
        let tail = truncation_tail(series, gamma, length);
        if tail >= tolerance {
            return Err(Error::TruncationTooShort {
                n_max: series.n_max(),
                tail,
                tolerance,
            });
        }
    }
    let values = grid
        .points()
        .map(|w| (-fourier_susceptibility(series, gamma, w) * length).exp())
        .collect();
    TransferFunction::new(*grid, values, length, TransferKind::AnalyticFourier)
}

/// `∫ dΔ/(ω + Δ - iγ)` over the two half-lines outside `[first, last]`.
///
/// For `γ = 0` the pole lies inside the band (or on its edge), so only the
/// principal value survives; a pole on the edge is cut off at `h/(2e^{γ_E})`,
/// where the one-sided odd-neighbour sum effectively starts.
fn outer_integral(omega: f64, first: f64, last: f64, gamma: f64, h: f64) -> Complex64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let (a, b) = (omega + first, omega + last);
    if gamma == 0.0 {
        let cut = 0.5 * h * libm::exp(-EULER_GAMMA);
        return Complex64::new(libm::log(a.abs().max(cut)) - libm::log(b.abs().max(cut)), 0.0);
    }
    let log = |x: f64| Complex64::new(0.5 * libm::log(x * x + gamma * gamma), libm::atan2(-gamma, x));
    Complex64::new(0.0, PI) + log(a) - log(b)
}

/// `χ̃(ω) = -(i/2π)∫ α(Δ)/(ω + Δ - iγ) dΔ` by direct summation over the
/// sampled spectrum.
///
/// Beyond the grid, α is continued by its grid average and that part is
/// integrated in closed form. With `γ > 0` the kernel must be resolved
/// (`γ ≥` grid step). With `γ = 0` every `-ω` must be a grid node: the pole
/// term gives `α(-ω)/2` and the principal value uses the odd-neighbour
/// (Maclaurin) rule.
pub fn complex_susceptibility(comb: &CombSpectrum, omega_grid: &UniformGrid) -> Result<Vec<Complex64>> {
    let grid = comb.grid();
    let alpha = comb.alpha();
    let gamma = comb.gamma();
    let h = grid.step();
    if gamma > 0.0 && gamma < h {
        return Err(Error::UnresolvedLinewidth { gamma, step: h });
    }
    let mean = comb.edge_mean();
    let first = grid.start();
    let last = grid.end();
    let n = alpha.len();
    let prefactor = Complex64::new(0.0, -1.0 / TAU);

    omega_grid
        .points()
        .map(|omega| {
            let tail = if mean == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                outer_integral(omega, first, last, gamma, h)
            };
            let tail = prefactor * tail * mean;
            if gamma == 0.0 {
                let k0 = grid
                    .node_index(-omega, 1e-6)
                    .ok_or(Error::OffGridPole { omega })?;
                let mut pv = 0.0;
                let mut j = if k0 % 2 == 0 { 1 } else { 0 };
                while j < n {
                    pv += alpha[j] / (omega + grid.point(j));
                    j += 2;
                }
                pv *= 2.0 * h;
                Ok(Complex64::new(0.5 * alpha[k0], -pv / TAU) + tail)
            } else {
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, &a) in alpha.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
                    let x = omega + grid.point(j);
                    // a / (x - iγ) = a (x + iγ) / (x² + γ²)
                    let d = w * a / (x * x + gamma * gamma);
                    sum += Complex64::new(d * x, d * gamma);
                }
                Ok(prefactor * sum + tail)
            }
        })
        .collect()
}

/// `H(ω) = exp(-L·χ̃(ω))` from [`complex_susceptibility`].
pub fn sampled_transfer_function(comb: &CombSpectrum, grid: &UniformGrid) -> Result<TransferFunction> {
    let chi = complex_susceptibility(comb, grid)?;
    let length = comb.length();
    let values = chi.into_iter().map(|c| (-c * length).exp()).collect();
    TransferFunction::new(*grid, values, length, TransferKind::SampledSusceptibility)
}

/// Impulse response of `H` sampled on a DFT frequency grid
/// ([`UniformGrid::dft`]), in FFT order: index `i < N/2` is `t = i·dt`, the
/// upper half holds negative times. Returns the samples and `dt`.
pub fn impulse_response(tf: &TransferFunction) -> Result<(Vec<Complex64>, f64)> {
    let grid = tf.grid();
    let n = grid.len();
    let half = n / 2;
    if (grid.start() + half as f64 * grid.step()).abs() > 1e-9 * grid.step() {
        return Err(Error::NotCommensurate(format!(
            "transfer-function grid starting at {} is not a DFT layout",
            grid.start()
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in tf.values().iter().enumerate() {
        buf[(k + n - half) % n] = *v;
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    Ok((buf, TAU / (n as f64 * grid.step())))
}

/// Fraction of impulse-response energy at negative times.
pub fn pre_signal_energy_fraction(tf: &TransferFunction) -> Result<f64> {
    let (h, _) = impulse_response(tf)?;
    let half = h.len() / 2;
    let total: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::ZeroEnergy("impulse response"));
    }
    let pre: f64 = h[half..].iter().map(|v| v.norm_sqr()).sum();
    Ok(pre / total)
}

/// Real refractive index over baseband frequency, stored as an excursion
/// from the background so that tiny changes keep their precision.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexProfile {
    grid: UniformGrid,
    excursion: Vec<f64>,
    n_background: f64,
    carrier_frequency: f64,
}

impl IndexProfile {
    pub fn new(grid: UniformGrid, excursion: Vec<f64>, n_background: f64, carrier_frequency: f64) -> Result<Self> {
        if grid.len() != excursion.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: excursion.len(),
            });
        }
        positive("n_background", n_background)?;
        positive("carrier_frequency", carrier_frequency)?;
        Ok(Self {
            grid,
            excursion,
            n_background,
            carrier_frequency,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// `n(ω) - n_background`.
    pub fn excursion(&self) -> &[f64] {
        &self.excursion
    }

    pub fn n_background(&self) -> f64 {
        self.n_background
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn index(&self, i: usize) -> f64 {
        self.n_background + self.excursion[i]
    }

    pub fn with_background(mut self, n_background: f64) -> Result<Self> {
        self.n_background = positive("n_background", n_background)?;
        Ok(self)
    }
}

/// `n(ω) = n_background + (c/ω_abs)·Im χ̃(ω)` with `ω_abs = carrier + ω`,
/// on the mirror of the comb grid (so `γ = 0` combs work too). The background
/// index is 1.
pub fn refractive_index_profile(comb: &CombSpectrum, carrier_frequency: f64) -> Result<IndexProfile> {
    positive("carrier_frequency", carrier_frequency)?;
    let grid = comb.grid().mirrored();
    if carrier_frequency + grid.start() <= 0.0 {
        return Err(invalid(
            "carrier_frequency",
            "absolute frequency must stay positive over the comb band",
        ));
    }
    let chi = complex_susceptibility(comb, &grid)?;
    let excursion = grid
        .points()
        .zip(&chi)
        .map(|(w, c)| SPEED_OF_LIGHT / (carrier_frequency + w) * c.im)
        .collect();
    IndexProfile::new(grid, excursion, 1.0, carrier_frequency)
}

/// Pointwise group velocity; `None` marks samples where `n + ω·dn/dω`
/// vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupVelocityProfile {
    pub grid: UniformGrid,
    pub values: Vec<Option<f64>>,
}

/// Derivative by 4th-order central differences, dropping to 2nd order near
/// the edges.
pub(crate) fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if n < 3 {
                if n == 2 {
                    (values[1] - values[0]) / h
                } else {
                    0.0
                }
            } else if i >= 2 && i + 2 < n {
                (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h)
            } else if i >= 1 && i + 1 < n {
                (values[i + 1] - values[i - 1]) / (2.0 * h)
            } else if i == 0 {
                (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
            } else {
                (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
            }
        })
        .collect()
}

/// `V_g = c / (n + ω·dn/dω)` with `ω` the absolute optical frequency.
/// Negative values (anomalous dispersion) are returned as they are.
pub fn group_velocity_from_index(profile: &IndexProfile, carrier_frequency: f64) -> Result<GroupVelocityProfile> {
    positive("carrier_frequency", carrier_frequency)?;
    let grid = *profile.grid();
    let slope = derivative(profile.excursion(), grid.step());
    let values = grid
        .points()
        .enumerate()
        .map(|(i, w)| {
            let denom = profile.index(i) + (carrier_frequency + w) * slope[i];
            (denom.abs() >= 1e-12).then(|| SPEED_OF_LIGHT / denom)
        })
        .collect();
    Ok(GroupVelocityProfile { grid, values })
}

/// Group velocity at the carrier from the Fourier coefficients,
/// `1/V_g = 1/c - T·Σ_{n>0} n·Re(α_n)·e^{-nγT}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierGroupVelocity {
    /// `1/V_g` (s/m).
    pub inverse_velocity: f64,
}

impl FourierGroupVelocity {
    /// `V_g` (m/s); negative in the anomalous regime, infinite when `1/V_g = 0`.
    pub fn velocity(&self) -> f64 {
        1.0 / self.inverse_velocity
    }

    pub fn is_anomalous(&self) -> bool {
        self.inverse_velocity <= 0.0
    }
}

pub fn group_velocity_fourier(series: &FourierSeries, gamma: f64) -> FourierGroupVelocity {
    let t = series.period_time();
    let sum: f64 = series
        .nonnegative()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| n as f64 * c.re * libm::exp(-(n as f64) * gamma * t))
        .sum();
    FourierGroupVelocity {
        inverse_velocity: 1.0 / SPEED_OF_LIGHT - t * sum,
    }
}

/// `T_g = L/V_g`, vacuum transit included.
pub fn group_delay_analytic(series: &FourierSeries, gamma: f64, length: f64) -> f64 {
    group_velocity_fourier(series, gamma).inverse_velocity * length
}

/// `V_g = L/T_g`.
pub fn velocity_from_delay(length: f64, delay: f64) -> f64 {
    length / delay
}
