//! Sampled complex envelopes of the probe fields, and the bridge to the
//! spectral domain.
//!
//! Amplitudes are Rabi frequencies in arbitrary units: everything downstream
//! is linear, and reported quantities are energy ratios.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, TAU};

use num_complex::Complex64;

use crate::error::{invalid, positive, Error, Result};
use crate::fft;
use crate::grid::UniformGrid;

/// Uniform time sampling: `len` samples starting at `t0`, spaced by `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, len: usize) -> Result<Self> {
        positive("dt", dt)?;
        if len == 0 {
            return Err(invalid("len", "need at least one sample"));
        }
        if !t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        Ok(Self { t0, dt, len })
    }

    /// Default layout for echo experiments with comb period `period`:
    /// `dt = T/64` and `periods·64` samples starting at `t0`.
    pub fn for_period(period: f64, periods: usize, t0: f64) -> Result<Self> {
        positive("period", period)?;
        Self::new(t0, period / 64.0, periods * 64)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.len as f64 * self.dt
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<Complex64>,
    dt: f64,
    t0: f64,
}

impl Waveform {
    pub fn new(samples: Vec<Complex64>, dt: f64, t0: f64) -> Result<Self> {
        positive("dt", dt)?;
        if samples.is_empty() {
            return Err(invalid("samples", "waveform must not be empty"));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); grid.len],
            dt: grid.dt,
            t0: grid.t0,
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            dt: self.dt,
            len: self.samples.len(),
        }
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// `Σ|Ω|²·dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Energy of the samples with `lo <= t < hi`.
    pub fn energy_between(&self, lo: f64, hi: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let t = self.time(*i);
                t >= lo && t < hi
            })
            .map(|(_, s)| s.norm_sqr())
            .sum::<f64>()
            * self.dt
    }

    /// Intensity-weighted mean time.
    pub fn centroid(&self) -> Option<f64> {
        self.centroid_between(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn centroid_between(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, s) in self.samples.iter().enumerate() {
            let t = self.time(i);
            if t >= lo && t < hi {
                let p = s.norm_sqr();
                num += p * t;
                den += p;
            }
        }
        (den > 0.0).then(|| num / den)
    }

    /// Angular-frequency grid of [`spectrum`] for this waveform.
    pub fn spectral_grid(&self) -> UniformGrid {
        UniformGrid::dft(self.samples.len(), self.dt).expect("dt is positive")
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    /// Sample-wise `self + other·factor`; the time grids must match.
    pub fn add_scaled(&mut self, other: &Waveform, factor: Complex64) -> Result<()> {
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if (other.dt - self.dt).abs() > 1e-12 * self.dt || (other.t0 - self.t0).abs() > 1e-9 * self.dt {
            return Err(Error::NotCommensurate(alloc::format!(
                "time grids differ (dt {} vs {}, t0 {} vs {})",
                self.dt,
                other.dt,
                self.t0,
                other.t0
            )));
        }
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += b * factor;
        }
        Ok(())
    }
}

/// Complex spectrum `Ω̃(ω_k) = dt·Σ_n Ω(t_n)·e^{-iω_k t_n}` on an increasing
/// angular-frequency grid, with the time grid needed to invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
    pub time: TimeGrid,
}

impl SpectralField {
    /// `(1/2π)·Σ|Ω̃|²·dω`, equal to the time-domain energy.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step() / TAU
    }

    pub fn energy_density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

pub fn spectrum(w: &Waveform) -> SpectralField {
    let n = w.len();
    let mut buf = w.samples.clone();
    fft::forward(&mut buf);
    let grid = w.spectral_grid();
    let half = n / 2;
    let values = (0..n)
        .map(|k| {
            let omega = grid.point(k);
            let phase = -omega * w.t0;
            buf[(k + n - half) % n] * Complex64::new(libm::cos(phase), libm::sin(phase)) * w.dt
        })
        .collect();
    SpectralField {
        grid,
        values,
        time: w.time_grid(),
    }
}

pub fn inverse_spectrum(field: &SpectralField) -> Waveform {
    let n = field.values.len();
    let half = n / 2;
    let TimeGrid { t0, dt, .. } = field.time;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in field.values.iter().enumerate() {
        let phase = field.grid.point(k) * t0;
        buf[(k + n - half) % n] = v * Complex64::new(libm::cos(phase), libm::sin(phase));
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / (n as f64 * dt);
    for v in &mut buf {
        *v *= scale;
    }
    Waveform {
        samples: buf,
        dt,
        t0,
    }
}

/// Field envelope of a Gaussian whose intensity has FWHM `fwhm`.
fn gaussian_envelope(t: f64, fwhm: f64) -> f64 {
    libm::exp(-2.0 * LN_2 * t * t / (fwhm * fwhm))
}

/// Gaussian pulse with intensity FWHM `fwhm` centred at `center`.
pub fn gaussian_pulse(fwhm: f64, center: f64, amplitude: Complex64, grid: TimeGrid) -> Result<Waveform> {
    positive("fwhm", fwhm)?;
    if fwhm < 8.0 * grid.dt {
        return Err(Error::GridTooCoarse(alloc::format!(
            "pulse FWHM {fwhm} s spans fewer than 8 samples of {} s",
            grid.dt
        )));
    }
    let samples = (0..grid.len)
        .map(|i| amplitude * gaussian_envelope(grid.time(i) - center, fwhm))
        .collect();
    Waveform::new(samples, grid.dt, grid.t0)
}

/// Envelope applied across the pulses of a train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainEnvelope {
    Flat,
    /// Gaussian in intensity with the given FWHM (s), centred on the train.
    Gaussian { fwhm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    pub count: usize,
    pub spacing: f64,
    pub pulse_fwhm: f64,
    pub envelope: TrainEnvelope,
    /// Centre of the first pulse (s).
    pub first_center: f64,
}

impl PulseTrain {
    pub fn pulse_times(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.first_center + j as f64 * self.spacing)
            .collect()
    }

    /// Field weight of each pulse: unit peak amplitude times the envelope.
    pub fn weights(&self) -> Vec<f64> {
        let mid = self.first_center + 0.5 * (self.count as f64 - 1.0) * self.spacing;
        self.pulse_times()
            .into_iter()
            .map(|t| match self.envelope {
                TrainEnvelope::Flat => 1.0,
                TrainEnvelope::Gaussian { fwhm } => gaussian_envelope(t - mid, fwhm),
            })
            .collect()
    }
}

pub fn pulse_train(train: &PulseTrain, grid: TimeGrid) -> Result<Waveform> {
    if train.count == 0 {
        return Err(invalid("count", "need at least one pulse"));
    }
    positive("spacing", train.spacing)?;
    positive("pulse_fwhm", train.pulse_fwhm)?;
    if let TrainEnvelope::Gaussian { fwhm } = train.envelope {
        positive("envelope_fwhm", fwhm)?;
    }
    if train.count > 1 && train.spacing <= train.pulse_fwhm {
        return Err(Error::OverlappingPulses {
            spacing: train.spacing,
            fwhm: train.pulse_fwhm,
        });
    }
    let mut out = Waveform::zeros(grid);
    for (t, w) in train.pulse_times().into_iter().zip(train.weights()) {
        let p = gaussian_pulse(train.pulse_fwhm, t, Complex64::new(w, 0.0), grid)?;
        out.add_scaled(&p, Complex64::new(1.0, 0.0))?;
    }
    Ok(out)
}

/// Complex hyperbolic secant `Ω₀·sech(bt)^{1-iμ}` centred at `t = 0`, with
/// `b = 2πβ`.
///
/// The instantaneous frequency is `μβ·tanh(bt)` in Hz, sweeping `±μβ`.
pub fn chs_waveform(omega0_amp: f64, beta_hz: f64, mu: f64, grid: TimeGrid) -> Result<Waveform> {
    positive("beta_hz", beta_hz)?;
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(invalid("mu", "must be non-negative"));
    }
    if grid.duration() < 10.0 / beta_hz {
        return Err(Error::GridTooCoarse(alloc::format!(
            "time window {} s is shorter than 10/β = {} s",
            grid.duration(),
            10.0 / beta_hz
        )));
    }
    let b = TAU * beta_hz;
    let samples = (0..grid.len)
        .map(|i| {
            let x = b * grid.time(i);
            // sech^{1-iμ} = sech·e^{iμ ln cosh}; ln cosh computed without overflow
            let ax = x.abs();
            let ln_cosh = ax + libm::log1p(libm::exp(-2.0 * ax)) - LN_2;
            let amp = omega0_amp * libm::exp(-ln_cosh);
            let phase = mu * ln_cosh;
            Complex64::new(amp * libm::cos(phase), amp * libm::sin(phase))
        })
        .collect();
    Waveform::new(samples, grid.dt, grid.t0)
}
