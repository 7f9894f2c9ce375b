//! Comb absorption spectra and their Fourier-series representation.

mod families;
mod fourier;

use alloc::vec::Vec;
use core::f64::consts::TAU;

pub use families::{
    build_lorentzian_comb, build_square_comb, LorentzianComb, MeasuredComb, SquareComb,
};
pub use fourier::{
    average_optical_depth, fourier_coefficients, synthesize_from_fourier, synthesize_values,
    FourierSeries,
};

use crate::error::{invalid, non_negative, positive, Error, Result};
use crate::grid::{interpolate, UniformGrid};

/// Where the signal carrier sits relative to the comb structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    /// Carrier on the centre of an absorbing feature.
    OnPeak,
    /// Carrier in the middle of a transparency window.
    #[default]
    InWindow,
}

impl Alignment {
    /// Detuning of the absorbing feature nearest to zero, as a fraction of the
    /// comb spacing.
    pub(crate) fn peak_offset(self) -> f64 {
        match self {
            Alignment::OnPeak => 0.0,
            Alignment::InWindow => 0.5,
        }
    }
}

/// Length and homogeneous half-width of the absorbing medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// Medium length L (m).
    pub length: f64,
    /// Homogeneous half-width γ (rad/s).
    pub gamma: f64,
}

impl Medium {
    pub fn new(length: f64, gamma: f64) -> Result<Self> {
        positive("length", length)?;
        non_negative("gamma", gamma)?;
        Ok(Self { length, gamma })
    }
}

/// Sampling layout for analytic comb families: a closed grid centred on the
/// carrier spanning `periods` comb spacings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombGrid {
    pub periods: usize,
    pub samples_per_period: usize,
}

impl CombGrid {
    pub fn new(periods: usize, samples_per_period: usize) -> Self {
        Self {
            periods,
            samples_per_period,
        }
    }

    pub fn grid(&self, period_time: f64) -> Result<UniformGrid> {
        positive("period_time", period_time)?;
        if self.periods == 0 {
            return Err(invalid("periods", "need at least one period"));
        }
        if self.samples_per_period < 4 || !self.samples_per_period.is_multiple_of(2) {
            return Err(invalid(
                "samples_per_period",
                "must be an even number of at least 4",
            ));
        }
        let spacing = TAU / period_time;
        let step = spacing / self.samples_per_period as f64;
        let n = self.periods * self.samples_per_period;
        UniformGrid::new(-((n / 2) as f64) * step, step, n + 1)
    }
}

/// Sampled absorption coefficient α(Δ) of a comb, with the medium it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct CombSpectrum {
    grid: UniformGrid,
    alpha: Vec<f64>,
    period_time: f64,
    medium: Medium,
    alignment: Alignment,
}

impl CombSpectrum {
    pub fn new(
        grid: UniformGrid,
        alpha: Vec<f64>,
        period_time: f64,
        medium: Medium,
        alignment: Alignment,
    ) -> Result<Self> {
        if alpha.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: grid.len(),
                right: alpha.len(),
            });
        }
        positive("period_time", period_time)?;
        let medium = Medium::new(medium.length, medium.gamma)?;
        if let Some((index, &value)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a >= 0.0))
        {
            return Err(Error::NegativeAbsorption { index, value });
        }
        Ok(Self {
            grid,
            alpha,
            period_time,
            medium,
            alignment,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn period_time(&self) -> f64 {
        self.period_time
    }

    /// Comb spacing 2π/T (rad/s).
    pub fn spacing(&self) -> f64 {
        TAU / self.period_time
    }

    pub fn medium(&self) -> Medium {
        self.medium
    }

    pub fn length(&self) -> f64 {
        self.medium.length
    }

    pub fn gamma(&self) -> f64 {
        self.medium.gamma
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }

    pub fn with_medium(mut self, medium: Medium) -> Result<Self> {
        self.medium = Medium::new(medium.length, medium.gamma)?;
        Ok(self)
    }

    /// Number of comb periods spanned by the grid.
    pub fn covered_periods(&self) -> f64 {
        (self.grid.end() - self.grid.start()) / self.spacing()
    }

    /// Samples per comb period (not necessarily an integer for measured data).
    pub fn samples_per_period(&self) -> f64 {
        self.spacing() / self.grid.step()
    }

    pub fn max_alpha(&self) -> f64 {
        self.alpha.iter().copied().fold(0.0, f64::max)
    }

    /// Linearly interpolated α at detuning `delta`, `None` outside the grid.
    pub fn alpha_at(&self, delta: f64) -> Option<f64> {
        interpolate(&self.grid, &self.alpha, delta)
    }

    /// Level used to continue α beyond the grid: the average of the
    /// trapezoid means over one comb spacing at each end (the whole grid if
    /// it is narrower). Equals α_0 for periodic combs and tends to zero for
    /// localized spectra.
    pub(crate) fn edge_mean(&self) -> f64 {
        let n = self.alpha.len();
        if n == 1 {
            return self.alpha[0];
        }
        let m = ((self.spacing() / self.grid.step()).round() as usize).clamp(1, n - 1);
        let mean = |s: &[f64]| {
            let inner: f64 = s[1..s.len() - 1].iter().sum();
            (inner + 0.5 * (s[0] + s[s.len() - 1])) / (s.len() - 1) as f64
        };
        0.5 * (mean(&self.alpha[..=m]) + mean(&self.alpha[n - 1 - m..]))
    }
}

/// Offset of `delta` from the nearest feature centre, in `[-spacing/2, spacing/2)`.
pub(crate) fn offset_from_centre(delta: f64, spacing: f64, alignment: Alignment) -> f64 {
    let u = delta / spacing - alignment.peak_offset();
    (u - libm::floor(u + 0.5)) * spacing
}
