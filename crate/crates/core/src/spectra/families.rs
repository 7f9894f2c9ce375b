use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{offset_from_centre, Alignment, CombGrid, CombSpectrum, Medium};
use crate::error::{invalid, positive, Error, Result};
use crate::grid::UniformGrid;
use crate::spectra::fourier::period_integral;

/// Periodic train of Lorentzian lines `α_M Γ²/(Γ² + (Δ - Δ_c)²)` with centres
/// every `2π/T`.
///
/// The periodized sum is evaluated in closed form,
/// `Σ_k Γ²/(Γ² + (x - 2πk/T)²) = (ΓT/2)·sinh(ΓT)/(cosh(ΓT) - cos(xT))`,
/// so the profile is exactly periodic. Overlapping tails are not renormalized:
/// the value on a line centre is `α_M·(ΓT/2)·coth(ΓT/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianComb {
    pub alpha_max: f64,
    pub hwhm: f64,
    pub period_time: f64,
    pub alignment: Alignment,
}

impl LorentzianComb {
    pub fn new(alpha_max: f64, hwhm: f64, period_time: f64, alignment: Alignment) -> Result<Self> {
        positive("alpha_max", alpha_max)?;
        positive("hwhm", hwhm)?;
        positive("period_time", period_time)?;
        if hwhm >= PI / period_time {
            return Err(invalid(
                "hwhm",
                format!("{hwhm} rad/s is not below half the comb spacing {}", PI / period_time),
            ));
        }
        Ok(Self {
            alpha_max,
            hwhm,
            period_time,
            alignment,
        })
    }

    /// Dimensionless width ΓT.
    pub fn width_product(&self) -> f64 {
        self.hwhm * self.period_time
    }

    pub fn alpha_at(&self, delta: f64) -> f64 {
        let spacing = TAU / self.period_time;
        let theta = offset_from_centre(delta, spacing, self.alignment) * self.period_time;
        let gt = self.width_product();
        let sh = libm::sinh(0.5 * gt);
        let s = libm::sin(0.5 * theta);
        // cosh(ΓT) - cos θ = 2 sinh²(ΓT/2) + 2 sin²(θ/2), free of cancellation
        self.alpha_max * 0.5 * gt * libm::sinh(gt) / (2.0 * (sh * sh + s * s))
    }

    /// Closed-form Fourier coefficient `α_n = (α_M ΓT/2)·e^{-|n|ΓT}`, times
    /// `(-1)^n` when the carrier sits mid-window.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let gt = self.width_product();
        let mut c = 0.5 * self.alpha_max * gt * libm::exp(-(n.unsigned_abs() as f64) * gt);
        if self.alignment == Alignment::InWindow && n % 2 != 0 {
            c = -c;
        }
        Complex64::new(c, 0.0)
    }

    pub fn sample(&self, grid: &UniformGrid) -> Vec<f64> {
        grid.points().map(|d| self.alpha_at(d)).collect()
    }
}

/// Builds a sampled Lorentzian comb. The grid must put at least 8 samples in
/// one half-width.
pub fn build_lorentzian_comb(
    alpha_max: f64,
    hwhm: f64,
    period_time: f64,
    alignment: Alignment,
    grid: CombGrid,
    medium: Medium,
) -> Result<CombSpectrum> {
    let profile = LorentzianComb::new(alpha_max, hwhm, period_time, alignment)?;
    let g = grid.grid(period_time)?;
    if hwhm < 8.0 * g.step() {
        return Err(Error::GridTooCoarse(format!(
            "half-width {hwhm} rad/s spans {:.2} samples, at least 8 needed",
            hwhm / g.step()
        )));
    }
    CombSpectrum::new(g, profile.sample(&g), period_time, medium, alignment)
}

/// Uniform absorber with rectangular transparency windows of full width
/// `2βμ` (ordinary frequency), one per comb period: the idealized outcome of
/// burning with chirped hyperbolic-secant pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareComb {
    pub alpha_background: f64,
    /// β (Hz).
    pub beta_hz: f64,
    pub mu: f64,
    pub period_time: f64,
    pub alignment: Alignment,
}

impl SquareComb {
    pub fn new(
        alpha_background: f64,
        beta_hz: f64,
        mu: f64,
        period_time: f64,
        alignment: Alignment,
    ) -> Result<Self> {
        positive("alpha_background", alpha_background)?;
        positive("beta_hz", beta_hz)?;
        positive("period_time", period_time)?;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(invalid("mu", "must be non-negative"));
        }
        if 2.0 * mu * beta_hz * period_time >= 1.0 {
            return Err(invalid(
                "mu",
                format!(
                    "window width 2βμ = {} Hz is not narrower than the comb spacing {} Hz",
                    2.0 * mu * beta_hz,
                    1.0 / period_time
                ),
            ));
        }
        Ok(Self {
            alpha_background,
            beta_hz,
            mu,
            period_time,
            alignment,
        })
    }

    /// Full transparency-window width (rad/s).
    pub fn window_width(&self) -> f64 {
        TAU * 2.0 * self.beta_hz * self.mu
    }

    /// Window centres: on the carrier for `InWindow`, half a period away for `OnPeak`.
    fn window_alignment(&self) -> Alignment {
        match self.alignment {
            Alignment::OnPeak => Alignment::InWindow,
            Alignment::InWindow => Alignment::OnPeak,
        }
    }

    /// Absorption averaged over the cell `[delta - h/2, delta + h/2]`, so that
    /// edges falling between samples get fractional values.
    pub fn cell_average(&self, delta: f64, h: f64) -> f64 {
        let w = self.window_width();
        if w == 0.0 {
            return self.alpha_background;
        }
        let spacing = TAU / self.period_time;
        let u = offset_from_centre(delta, spacing, self.window_alignment());
        let overlap = |lo: f64, hi: f64| (hi.min(0.5 * w) - lo.max(-0.5 * w)).max(0.0);
        let mut open = 0.0;
        for k in -1..=1 {
            let shift = k as f64 * spacing;
            open += overlap(u - 0.5 * h - shift, u + 0.5 * h - shift);
        }
        self.alpha_background * (1.0 - (open / h).min(1.0))
    }

    pub fn sample(&self, grid: &UniformGrid) -> Vec<f64> {
        grid.points()
            .map(|d| self.cell_average(d, grid.step()))
            .collect()
    }
}

pub fn build_square_comb(
    alpha_background: f64,
    beta_hz: f64,
    mu: f64,
    period_time: f64,
    alignment: Alignment,
    grid: CombGrid,
    medium: Medium,
) -> Result<CombSpectrum> {
    let profile = SquareComb::new(alpha_background, beta_hz, mu, period_time, alignment)?;
    let g = grid.grid(period_time)?;
    let w = profile.window_width();
    if w > 0.0 && w < 2.0 * g.step() {
        return Err(Error::GridTooCoarse(format!(
            "window width {w} rad/s spans fewer than 2 samples"
        )));
    }
    CombSpectrum::new(g, profile.sample(&g), period_time, medium, alignment)
}

/// A measured spectrum after ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredComb {
    pub comb: CombSpectrum,
    /// Samples that were negative and clipped to zero.
    pub clipped_samples: usize,
    /// α₀·L computed before clipping.
    pub raw_average_optical_depth: f64,
}

impl MeasuredComb {
    /// Validates and clips a measured absorption spectrum.
    ///
    /// At least two comb periods of data are required unless
    /// `periodic_extension` is set, in which case one full period suffices.
    pub fn from_samples(
        grid: UniformGrid,
        alpha: Vec<f64>,
        period_time: f64,
        medium: Medium,
        alignment: Alignment,
        periodic_extension: bool,
    ) -> Result<Self> {
        positive("period_time", period_time)?;
        if alpha.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: alpha.len(),
            });
        }
        if let Some(index) = alpha.iter().position(|a| !a.is_finite()) {
            return Err(invalid("alpha", format!("non-finite value at sample {index}")));
        }
        let covered = (grid.end() - grid.start()) * period_time / TAU;
        let required = if periodic_extension { 1.0 } else { 2.0 };
        if covered + 1e-9 < required {
            return Err(Error::InsufficientCoverage {
                covered_periods: covered,
                required,
            });
        }
        let raw_alpha0 = period_integral(&grid, &alpha, period_time, alignment, &[0])?[0].re;
        let mut clipped_samples = 0;
        let alpha = alpha
            .into_iter()
            .map(|a| {
                if a < 0.0 {
                    clipped_samples += 1;
                    0.0
                } else {
                    a
                }
            })
            .collect();
        let comb = CombSpectrum::new(grid, alpha, period_time, medium, alignment)?;
        Ok(Self {
            comb,
            clipped_samples,
            raw_average_optical_depth: raw_alpha0 * medium.length,
        })
    }
}
