use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use super::{Alignment, CombSpectrum, Medium};
use crate::error::{positive, Error, Result};
use crate::grid::{interpolate, UniformGrid};

/// Fourier coefficients `α_n` of a real periodic absorption profile,
/// `α(Δ) = Σ_n α_n e^{inΔT}`.
///
/// Only `n = 0..=n_max` is stored; negative orders are conjugates, so the
/// series is Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coefficients: Vec<Complex64>,
    period_time: f64,
}

impl FourierSeries {
    /// From non-negative orders `α_0, α_1, …`. `α_0` must be real.
    pub fn from_nonnegative(mut coefficients: Vec<Complex64>, period_time: f64) -> Result<Self> {
        positive("period_time", period_time)?;
        let Some(first) = coefficients.first_mut() else {
            return Err(crate::error::invalid("coefficients", "need at least α_0"));
        };
        if first.im.abs() > 1e-12 * first.re.abs().max(1e-300) && first.im != 0.0 {
            return Err(Error::NotHermitian { order: 0 });
        }
        first.im = 0.0;
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(crate::error::invalid("coefficients", "must be finite"));
        }
        Ok(Self {
            coefficients,
            period_time,
        })
    }

    /// From the full two-sided list `α_{-n_max} … α_{n_max}`, checking
    /// `α_{-n} = conj(α_n)`.
    pub fn from_two_sided(two_sided: &[Complex64], period_time: f64) -> Result<Self> {
        if two_sided.len().is_multiple_of(2) {
            return Err(crate::error::invalid("coefficients", "need an odd count"));
        }
        let n_max = two_sided.len() / 2;
        let scale = two_sided.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for n in 0..=n_max {
            let pos = two_sided[n_max + n];
            let neg = two_sided[n_max - n];
            if (pos - neg.conj()).norm() > tol {
                return Err(Error::NotHermitian { order: n });
            }
        }
        Self::from_nonnegative(two_sided[n_max..].to_vec(), period_time)
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn period_time(&self) -> f64 {
        self.period_time
    }

    /// `α_n` for any order; zero beyond the truncation.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        match self.coefficients.get(n.unsigned_abs() as usize) {
            Some(c) if n >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Average absorption per length `α_0`.
    pub fn alpha0(&self) -> f64 {
        self.coefficients[0].re
    }

    /// `α_0, α_1, …, α_{n_max}`.
    pub fn nonnegative(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Drops orders above `n_max`.
    pub fn truncated(&self, n_max: usize) -> Self {
        Self {
            coefficients: self.coefficients[..=n_max.min(self.n_max())].to_vec(),
            period_time: self.period_time,
        }
    }

    /// Translation of the profile by half a comb period: `α_n → (-1)^n α_n`.
    pub fn half_period_shift(&self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| if n % 2 == 1 { -c } else { *c })
            .collect();
        Self {
            coefficients,
            period_time: self.period_time,
        }
    }

    pub fn evaluate(&self, delta: f64) -> f64 {
        let t = self.period_time;
        self.coefficients[0].re
            + 2.0
                * self.coefficients[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let phase = (k + 1) as f64 * delta * t;
                        c.re * libm::cos(phase) - c.im * libm::sin(phase)
                    })
                    .sum::<f64>()
    }
}

/// `(T/2π)∫ α(Δ) e^{-inΔT} dΔ` over one period for every `n` in `orders`.
///
/// The window is `[-π/T, π/T]` for `OnPeak` and `[0, 2π/T]` for `InWindow`
/// (edges in the transparency windows), moved by whole periods to the one
/// nearest the grid centre that fits. Trapezoid rule on the grid nodes, with
/// linearly interpolated partial cells at the window edges when the period is
/// not commensurate with the grid.
pub(crate) fn period_integral(
    grid: &UniformGrid,
    values: &[f64],
    period_time: f64,
    alignment: Alignment,
    orders: &[usize],
) -> Result<Vec<Complex64>> {
    let spacing = TAU / period_time;
    let covered = (grid.end() - grid.start()) / spacing;
    if covered + 1e-9 < 1.0 {
        return Err(Error::InsufficientCoverage {
            covered_periods: covered,
            required: 1.0,
        });
    }
    let base = match alignment {
        Alignment::OnPeak => -0.5 * spacing,
        Alignment::InWindow => 0.0,
    };
    let centre = 0.5 * (grid.start() + grid.end());
    let tol = 1e-9 * spacing;
    let mut k = libm::round((centre - 0.5 * spacing - base) / spacing);
    let lo_k = libm::ceil((grid.start() - tol - base) / spacing);
    let hi_k = libm::floor((grid.end() + tol - spacing - base) / spacing);
    if lo_k > hi_k {
        // covers a period but no aligned window fits: anchor at the grid start
        k = (grid.start() - base) / spacing;
    } else {
        k = k.clamp(lo_k, hi_k);
    }
    let a = base + k * spacing;
    let b = a + spacing;

    // Integration nodes: interior grid nodes plus the window edges.
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let snap = 1e-9;
    let pa = grid.position(a);
    let pb = grid.position(b);
    let first = libm::ceil(pa - snap).max(0.0) as usize;
    let last = (libm::floor(pb + snap) as usize).min(grid.len() - 1);
    if (pa - libm::round(pa)).abs() > snap {
        nodes.push((a, interpolate(grid, values, a).unwrap_or(values[0])));
    }
    for i in first..=last {
        nodes.push((grid.point(i), values[i]));
    }
    if (pb - libm::round(pb)).abs() > snap {
        nodes.push((b, interpolate(grid, values, b).unwrap_or(values[grid.len() - 1])));
    }

    let out = orders
        .iter()
        .map(|&n| {
            let integrand = |&(x, v): &(f64, f64)| {
                let phase = -(n as f64) * x * period_time;
                Complex64::new(v * libm::cos(phase), v * libm::sin(phase))
            };
            let mut acc = Complex64::new(0.0, 0.0);
            let mut prev = integrand(&nodes[0]);
            for w in nodes.windows(2) {
                let next = integrand(&w[1]);
                acc += (prev + next) * (0.5 * (w[1].0 - w[0].0));
                prev = next;
            }
            acc / spacing
        })
        .collect();
    Ok(out)
}

/// Fourier coefficients of a comb by trapezoid quadrature over one period.
///
/// `n_max` must stay below half the number of samples per period.
pub fn fourier_coefficients(comb: &CombSpectrum, n_max: usize) -> Result<FourierSeries> {
    let spp = comb.samples_per_period();
    let nyquist = (libm::ceil(0.5 * spp) as usize).saturating_sub(1);
    if n_max > nyquist {
        return Err(Error::AboveNyquist { n_max, nyquist });
    }
    let orders: Vec<usize> = (0..=n_max).collect();
    let coefficients = period_integral(
        comb.grid(),
        comb.alpha(),
        comb.period_time(),
        comb.alignment(),
        &orders,
    )?;
    FourierSeries::from_nonnegative(coefficients, comb.period_time())
}

/// Raw synthesis `α(Δ) = Σ α_n e^{inΔT}` on a grid; may dip below zero.
pub fn synthesize_values(series: &FourierSeries, grid: &UniformGrid) -> Vec<f64> {
    grid.points().map(|d| series.evaluate(d)).collect()
}

/// Rebuilds a comb from its Fourier series.
///
/// Dips below zero within `1e-12` of the largest sample are rounding and are
/// clipped; anything deeper is a non-physical truncation and is rejected.
pub fn synthesize_from_fourier(
    series: &FourierSeries,
    grid: &UniformGrid,
    medium: Medium,
    alignment: Alignment,
) -> Result<CombSpectrum> {
    if series.n_max() < 1 && series.alpha0() == 0.0 {
        return Err(crate::error::invalid("series", "empty series"));
    }
    let mut values = synthesize_values(series, grid);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-12 * scale {
        return Err(Error::NegativeSynthesis { min });
    }
    for v in &mut values {
        *v = v.max(0.0);
    }
    CombSpectrum::new(*grid, values, series.period_time(), medium, alignment)
}

/// Average optical depth `α_0·L`.
pub fn average_optical_depth(comb: &CombSpectrum) -> Result<f64> {
    Ok(fourier_coefficients(comb, 0)?.alpha0() * comb.length())
}
