//! Applying a medium response to a probe field, and energy bookkeeping.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{non_negative, positive, Error, Result};
use crate::fft;
use crate::grid::{interpolate, UniformGrid};
use crate::response::TransferFunction;
use crate::signals::{inverse_spectrum, spectrum, SpectralField, Waveform};
use crate::spectra::CombSpectrum;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagateOptions {
    /// Interpolate `H` onto the waveform's spectral grid when the two grids
    /// are not node-aligned.
    pub resample: bool,
}

/// Fraction of `[lo, hi]` covered by `grid`'s span.
fn overlap(grid: &UniformGrid, lo: f64, hi: f64) -> f64 {
    let covered = (hi.min(grid.end()) - lo.max(grid.start())).max(0.0);
    if hi > lo {
        covered / (hi - lo)
    } else {
        1.0
    }
}

/// Index in `outer` of the first node of `inner`, if every node of `inner`
/// is a node of `outer`.
fn commensurate_offset(outer: &UniformGrid, inner: &UniformGrid) -> Option<usize> {
    if (outer.step() - inner.step()).abs() > 1e-9 * outer.step() {
        return None;
    }
    let k = outer.node_index(inner.start(), 1e-6)?;
    (k + inner.len() <= outer.len()).then_some(k)
}

/// Band-limited interpolation of `H` onto `target`.
///
/// The samples are extended to a power-of-two length with a raised-cosine
/// blend back to the first sample, refined eightfold by zero-padding the
/// conjugate (time) domain, and read off linearly.
pub(crate) fn resample_transfer(h: &TransferFunction, target: &UniformGrid) -> Result<Vec<Complex64>> {
    const REFINE: usize = 8;
    let grid = h.grid();
    let tol = 1e-9 * grid.step();
    if target.start() < grid.start() - tol || target.end() > grid.end() + tol {
        return Err(Error::BandMismatch {
            overlap: overlap(grid, target.start(), target.end()),
        });
    }
    let values = h.values();
    let m = values.len();
    if m < 2 {
        return Ok(vec![values[0]; target.len()]);
    }
    let p = (m + m / 4 + 1).next_power_of_two();
    let blend = p - m;
    let (first, last) = (values[0], values[m - 1]);
    let mut buf: Vec<Complex64> = values.to_vec();
    buf.extend((1..=blend).map(|j| {
        let s = j as f64 / (blend + 1) as f64;
        last + (first - last) * (0.5 * (1.0 - libm::cos(PI * s)))
    }));
    fft::inverse(&mut buf);
    let q = p * REFINE;
    let mut padded = vec![Complex64::new(0.0, 0.0); q];
    let half = p / 2;
    padded[..half].copy_from_slice(&buf[..half]);
    padded[q - (p - half)..].copy_from_slice(&buf[half..]);
    fft::forward(&mut padded);
    let scale = 1.0 / p as f64;
    let fine_len = (m - 1) * REFINE + 1;
    let fine = UniformGrid::new(grid.start(), grid.step() / REFINE as f64, fine_len)?;
    let (re, im): (Vec<f64>, Vec<f64>) = padded[..fine_len].iter().map(|v| (v.re * scale, v.im * scale)).unzip();
    target
        .points()
        .map(|w| {
            let w = w.clamp(fine.start(), fine.end());
            let r = interpolate(&fine, &re, w).ok_or(Error::BandMismatch { overlap: 0.0 })?;
            let i = interpolate(&fine, &im, w).ok_or(Error::BandMismatch { overlap: 0.0 })?;
            Ok(Complex64::new(r, i))
        })
        .collect()
}

/// `H` on the spectral grid of a waveform.
pub fn transfer_on_grid(h: &TransferFunction, target: &UniformGrid, options: PropagateOptions) -> Result<Vec<Complex64>> {
    if let Some(k) = commensurate_offset(h.grid(), target) {
        return Ok(h.values()[k..k + target.len()].to_vec());
    }
    if options.resample {
        return resample_transfer(h, target);
    }
    let grid = h.grid();
    if target.start() < grid.start() - 1e-9 * grid.step() || target.end() > grid.end() + 1e-9 * grid.step() {
        return Err(Error::BandMismatch {
            overlap: overlap(grid, target.start(), target.end()),
        });
    }
    Err(Error::NotCommensurate(format!(
        "waveform spectral step {} and transfer-function step {} are not node-aligned",
        target.step(),
        grid.step()
    )))
}

/// Output envelope `Ω_out = F⁻¹[H·F[Ω_in]]` on the input's time grid.
///
/// The DFT makes the time window circular, so it must be long enough to hold
/// every echo of interest. The vacuum transit `L/c` is not applied; see
/// [`TransferFunction::vacuum_delay`].
pub fn propagate(w: &Waveform, h: &TransferFunction, options: PropagateOptions) -> Result<Waveform> {
    let mut field = spectrum(w);
    let values = transfer_on_grid(h, &field.grid, options)?;
    for (v, hv) in field.values.iter_mut().zip(&values) {
        *v *= hv;
    }
    Ok(inverse_spectrum(&field))
}

/// Exact Beer-Lambert transmitted energy fraction
/// `∫|Ω̃|² e^{-α(-ω)L} dω / ∫|Ω̃|² dω`, with α linearly interpolated.
///
/// Field samples outside the comb band are skipped; more than 1e-9 of the
/// input energy out there is rejected.
pub fn energy_transmission_fraction(comb: &CombSpectrum, input: &SpectralField) -> Result<f64> {
    let length = comb.length();
    let mut total = 0.0;
    let mut passed = 0.0;
    let mut outside = 0.0;
    for (w, v) in input.grid.points().zip(&input.values) {
        let e = v.norm_sqr();
        match comb.alpha_at(-w) {
            Some(a) => {
                total += e;
                passed += e * libm::exp(-a * length);
            }
            None => outside += e,
        }
    }
    if total + outside == 0.0 {
        return Err(Error::ZeroEnergy("input spectrum"));
    }
    if outside > 1e-9 * (total + outside) {
        let lo = -comb.grid().end();
        let hi = -comb.grid().start();
        return Err(Error::BandMismatch {
            overlap: overlap(&UniformGrid::new(lo, hi - lo, 2)?, input.grid.start(), input.grid.end()),
        });
    }
    Ok(passed / total)
}

/// Near-peak approximation `T(ω) = exp(-α_M L / (1 + 4ω²/Γ_opt²))`, with
/// `ω` measured from the peak.
pub fn transmission_profile_near_peak(alpha_max_l: f64, gamma_opt: f64, grid: &UniformGrid) -> Result<Vec<f64>> {
    non_negative("alpha_max_l", alpha_max_l)?;
    positive("gamma_opt", gamma_opt)?;
    Ok(grid
        .points()
        .map(|w| libm::exp(-alpha_max_l / (1.0 + 4.0 * w * w / (gamma_opt * gamma_opt))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{analytic_transfer_function, TransferKind, Truncation};
    use crate::signals::{gaussian_pulse, TimeGrid};
    use crate::spectra::{
        build_lorentzian_comb, build_square_comb, Alignment, CombGrid, FourierSeries, LorentzianComb, Medium,
    };

    const T: f64 = 500e-9;
    const L: f64 = 5e-3;

    fn lorentz_series(alpha_max: f64, gt: f64, alignment: Alignment, n_max: i64) -> FourierSeries {
        let p = LorentzianComb::new(alpha_max, gt / T, T, alignment).unwrap();
        FourierSeries::from_nonnegative((0..=n_max).map(|n| p.coefficient(n)).collect(), T).unwrap()
    }

    fn pulse(periods: usize) -> Waveform {
        let grid = TimeGrid::for_period(T, periods, -2.0 * T).unwrap();
        gaussian_pulse(100e-9, 0.0, Complex64::new(1.0, 0.0), grid).unwrap()
    }

    fn comb_tf(w: &Waveform, alpha_max: f64, gt: f64) -> TransferFunction {
        let s = lorentz_series(alpha_max, gt, Alignment::OnPeak, 400);
        analytic_transfer_function(&s, 0.0, L, &w.spectral_grid(), Truncation::default()).unwrap()
    }

    #[test]
    fn identity_medium() {
        let w = pulse(16);
        let grid = w.spectral_grid();
        let h = TransferFunction::new(grid, vec![Complex64::new(1.0, 0.0); grid.len()], L, TransferKind::AnalyticFourier)
            .unwrap();
        let out = propagate(&w, &h, PropagateOptions::default()).unwrap();
        for (a, b) in out.samples().iter().zip(w.samples()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn uniform_absorber_is_beer_lambert() {
        let w = pulse(16);
        let s = FourierSeries::from_nonnegative(vec![Complex64::new(2.0 / L, 0.0)], T).unwrap();
        let h = analytic_transfer_function(&s, 0.0, L, &w.spectral_grid(), Truncation::default()).unwrap();
        let out = propagate(&w, &h, PropagateOptions::default()).unwrap();
        let ratio = out.energy() / w.energy();
        assert!((ratio - libm::exp(-2.0)).abs() < 1e-12);
    }

    #[test]
    fn first_echo_energy_matches_closed_form() {
        let w = pulse(32);
        let (alpha_max, gt) = (1600.0, 0.25);
        let h = comb_tf(&w, alpha_max, gt);
        let s = lorentz_series(alpha_max, gt, Alignment::OnPeak, 2);
        let out = propagate(&w, &h, PropagateOptions::default()).unwrap();
        let echo = out.energy_between(0.5 * T, 1.5 * T) / w.energy();
        let expected = (s.coefficient(1) * L).norm_sqr() * libm::exp(-s.alpha0() * L);
        assert!((echo - expected).abs() < 1e-3 * expected, "{echo} vs {expected}");
        // echoes sit at whole periods
        for k in 1..4 {
            let c = out.centroid_between((k as f64 - 0.5) * T, (k as f64 + 0.5) * T).unwrap();
            assert!((c - k as f64 * T).abs() < 0.01 * T, "order {k}: {c}");
        }
    }

    #[test]
    fn no_energy_before_input() {
        // long enough that the echo train does not wrap around
        let w = pulse(128);
        let h = comb_tf(&w, 2000.0, 0.2);
        let out = propagate(&w, &h, PropagateOptions::default()).unwrap();
        // the input itself is below 1e-30 there
        let pre = out.energy_between(-2.0 * T, -T) / out.energy();
        assert!(pre < 1e-9, "{pre}");
    }

    #[test]
    fn linearity_and_time_invariance() {
        let w1 = pulse(32);
        let grid = w1.time_grid();
        let w2 = gaussian_pulse(80e-9, 0.3 * T, Complex64::new(0.0, 0.5), grid).unwrap();
        let h = comb_tf(&w1, 1200.0, 0.3);
        let opts = PropagateOptions::default();
        let (a, b) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
        let mut sum = w1.scaled(a);
        sum.add_scaled(&w2, b).unwrap();
        let lhs = propagate(&sum, &h, opts).unwrap();
        let mut rhs = propagate(&w1, &h, opts).unwrap().scaled(a);
        rhs.add_scaled(&propagate(&w2, &h, opts).unwrap(), b).unwrap();
        let scale = lhs.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((x - y).norm() < 1e-12 * scale);
        }

        let shift = 40;
        let tau = shift as f64 * grid.dt;
        let delayed = gaussian_pulse(100e-9, tau, Complex64::new(1.0, 0.0), grid).unwrap();
        let out = propagate(&w1, &h, opts).unwrap();
        let out_delayed = propagate(&delayed, &h, opts).unwrap();
        let n = out.len();
        for i in 0..n {
            let j = (i + shift) % n;
            assert!((out_delayed.samples()[j] - out.samples()[i]).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn band_mismatch_and_resampling() {
        let w = pulse(16);
        let grid = w.spectral_grid();
        let narrow = UniformGrid::new(grid.start() * 0.5, grid.step(), grid.len() / 2).unwrap();
        let s = lorentz_series(1000.0, 0.3, Alignment::OnPeak, 100);
        let h = analytic_transfer_function(&s, 0.0, L, &narrow, Truncation::default()).unwrap();
        match propagate(&w, &h, PropagateOptions { resample: true }) {
            Err(Error::BandMismatch { overlap }) => assert!((overlap - 0.5).abs() < 0.01),
            other => panic!("{other:?}"),
        }

        // a finer, offset grid covering the band: rejected unless resampling
        let fine = UniformGrid::new(grid.start() - 1.3 * grid.step(), grid.step() / 3.0, 3 * grid.len() + 8).unwrap();
        let hf = analytic_transfer_function(&s, 0.0, L, &fine, Truncation::default()).unwrap();
        assert!(matches!(
            propagate(&w, &hf, PropagateOptions::default()),
            Err(Error::NotCommensurate(_))
        ));
        let resampled = propagate(&w, &hf, PropagateOptions { resample: true }).unwrap();
        let h_exact = analytic_transfer_function(&s, 0.0, L, &grid, Truncation::default()).unwrap();
        let direct = propagate(&w, &h_exact, PropagateOptions::default()).unwrap();
        let scale = direct.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = resampled
            .samples()
            .iter()
            .zip(direct.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-3 * scale, "{err}");
    }

    fn flat_field(comb: &CombSpectrum) -> SpectralField {
        let grid = comb.grid().mirrored();
        SpectralField {
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.len()],
            time: TimeGrid::new(0.0, 1.0, grid.len()).unwrap(),
        }
    }

    #[test]
    fn transmission_fraction_limits() {
        let medium = Medium::new(L, 0.0).unwrap();
        let grid = CombGrid::new(8, 64).grid(T).unwrap();
        let clear = CombSpectrum::new(grid, vec![0.0; grid.len()], T, medium, Alignment::OnPeak).unwrap();
        assert_eq!(energy_transmission_fraction(&clear, &flat_field(&clear)).unwrap(), 1.0);

        // windows of 2μβ = 1 MHz in a 2 MHz spacing
        let square = build_square_comb(1e5, 500e3, 1.0, T, Alignment::InWindow, CombGrid::new(8, 1024), medium).unwrap();
        let f = energy_transmission_fraction(&square, &flat_field(&square)).unwrap();
        assert!((f - 0.5).abs() < 2e-3, "{f}");

        let mut silent = flat_field(&clear);
        silent.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        assert!(matches!(
            energy_transmission_fraction(&clear, &silent),
            Err(Error::ZeroEnergy(_))
        ));
    }

    /// Absorbed fraction of a flat spectrum at the optimal width `ΓT = 4/d`
    /// falls as `1/√(α_M L)`.
    #[test]
    fn absorbed_fraction_scaling() {
        let absorbed = |d: f64| {
            let gt = 4.0 / d;
            let comb = build_lorentzian_comb(
                d / L,
                gt / T,
                T,
                Alignment::OnPeak,
                CombGrid::new(4, 8192),
                Medium::new(L, 0.0).unwrap(),
            )
            .unwrap();
            1.0 - energy_transmission_fraction(&comb, &flat_field(&comb)).unwrap()
        };
        for d in [20.0, 40.0, 80.0] {
            let ratio = absorbed(4.0 * d) / absorbed(d);
            assert!((ratio - 0.5).abs() < 0.15 * 0.5, "d = {d}: {ratio}");
        }
    }

    #[test]
    fn near_peak_profile() {
        let g = 2.0e5;
        let grid = UniformGrid::new(0.0, g / 100.0, 100_001).unwrap();
        let t = transmission_profile_near_peak(16.0, g, &grid).unwrap();
        assert_eq!(t[0], libm::exp(-16.0));
        assert!((t[t.len() - 1] - 1.0).abs() < 1e-3);
        let target = 0.5 * g * libm::sqrt(15.0);
        let k = t.iter().position(|&v| v >= libm::exp(-1.0)).unwrap();
        assert!((grid.point(k) - target).abs() <= grid.step());
        // half-absorption width grows as Γ_opt·√(α_M L)
        let half_width = |d: f64| {
            let t = transmission_profile_near_peak(d, g, &grid).unwrap();
            grid.point(t.iter().position(|&v| v >= 0.5).unwrap())
        };
        let r = half_width(400.0) / half_width(100.0);
        assert!((r - 2.0).abs() < 0.05, "{r}");
    }
}
