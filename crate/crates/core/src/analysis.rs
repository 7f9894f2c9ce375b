//! Observables: echo efficiencies, closed-form efficiency laws, envelope
//! delays and the pulse-by-pulse decomposition of train responses.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, non_negative, positive, Error, Result};
use crate::fft;
use crate::signals::{inverse_spectrum, spectrum, Waveform};
use crate::spectra::FourierSeries;

/// Summary of one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayEfficiencyReport {
    /// First-echo efficiency η.
    pub efficiency: f64,
    /// Group delay `T_g` (s).
    pub group_delay: f64,
    /// `L/T_g` (m/s).
    pub group_velocity: f64,
    /// Output energy over input energy.
    pub transmitted_fraction: f64,
    /// Energy in echo window `k`, over the input energy, for `k = 0, 1, …`.
    pub echo_energies: Vec<f64>,
}

impl DelayEfficiencyReport {
    pub fn new(
        efficiency: f64,
        group_delay: f64,
        length: f64,
        transmitted_fraction: f64,
        echo_energies: Vec<f64>,
    ) -> Result<Self> {
        const SLACK: f64 = 1e-9;
        if !(-SLACK..=1.0 + SLACK).contains(&efficiency) {
            return Err(invalid("efficiency", "must lie in [0, 1]"));
        }
        if !(-SLACK..=1.0 + SLACK).contains(&transmitted_fraction) {
            return Err(invalid("transmitted_fraction", "must lie in [0, 1]"));
        }
        if echo_energies.iter().any(|e| *e < -SLACK) || echo_energies.iter().sum::<f64>() > 1.0 + SLACK {
            return Err(invalid("echo_energies", "must be non-negative and sum to at most 1"));
        }
        positive("length", length)?;
        Ok(Self {
            efficiency,
            group_delay,
            group_velocity: length / group_delay,
            transmitted_fraction,
            echo_energies,
        })
    }
}

/// Input energy allowed outside the order-0 window before windows are
/// considered ambiguous.
const SPAN_TOLERANCE: f64 = 1e-6;

/// Energies in the echo windows `[t_c + kT - T/2, t_c + kT + T/2)` for
/// `k = 0..orders`, relative to the input energy. `t_c` is the input
/// intensity centroid.
pub fn echo_energies(input: &Waveform, output: &Waveform, period: f64, orders: usize) -> Result<Vec<f64>> {
    positive("period", period)?;
    let total = input.energy();
    if total == 0.0 {
        return Err(Error::ZeroEnergy("input"));
    }
    let centre = input.centroid().ok_or(Error::ZeroEnergy("input"))?;
    let inside = input.energy_between(centre - 0.5 * period, centre + 0.5 * period);
    let fraction = 1.0 - inside / total;
    if fraction > SPAN_TOLERANCE {
        return Err(Error::InputSpansWindows { fraction });
    }
    Ok((0..orders)
        .map(|k| {
            let mid = centre + k as f64 * period;
            output.energy_between(mid - 0.5 * period, mid + 0.5 * period) / total
        })
        .collect())
}

/// Energy in echo window `order` over the input energy; order 1 is the
/// protocol efficiency.
pub fn echo_efficiency_measured(input: &Waveform, output: &Waveform, period: f64, order: usize) -> Result<f64> {
    Ok(echo_energies(input, output, period, order + 1)?[order])
}

/// First-echo efficiency `|α_1 L|²·e^{-α_0 L}`.
pub fn efficiency_analytic(series: &FourierSeries, length: f64) -> f64 {
    (series.coefficient(1) * length).norm_sqr() * libm::exp(-series.alpha0() * length)
}

/// Normalization of the Lorentzian-comb efficiency law.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LorentzianForm {
    /// `(d·ΓT/2)²·e^{-ΓT(2 + d/2)}`, consistent with the Fourier coefficients
    /// of the comb and with [`efficiency_optimal`].
    #[default]
    Halved,
    /// `(d·ΓT)²·e^{-ΓT(2 + d/2)}`, four times larger; exceeds 1 at large depth.
    Unhalved,
}

/// Efficiency of a Lorentzian comb with depth `d = α_M L` and width
/// product `ΓT`.
pub fn efficiency_lorentzian(d: f64, gamma_t: f64, form: LorentzianForm) -> Result<f64> {
    positive("d", d)?;
    positive("gamma_t", gamma_t)?;
    let amplitude = match form {
        LorentzianForm::Halved => 0.5 * d * gamma_t,
        LorentzianForm::Unhalved => d * gamma_t,
    };
    Ok(amplitude * amplitude * libm::exp(-gamma_t * (2.0 + 0.5 * d)))
}

/// Exact maximizer `Γ = 4/((4 + d)·T)` of [`efficiency_lorentzian`].
pub fn optimal_width(d: f64, period: f64) -> Result<f64> {
    positive("d", d)?;
    positive("period", period)?;
    Ok(4.0 / ((4.0 + d) * period))
}

/// Large-depth form `Γ = 4/(d·T)` of [`optimal_width`].
pub fn optimal_width_asymptotic(d: f64, period: f64) -> Result<f64> {
    positive("d", d)?;
    positive("period", period)?;
    Ok(4.0 / (d * period))
}

/// `4e^{-2}·d²/(4 + d)²`, the efficiency at the optimal width.
pub fn efficiency_optimal(d: f64) -> Result<f64> {
    non_negative("d", d)?;
    let r = d / (4.0 + d);
    Ok(4.0 * libm::exp(-2.0) * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayMethod {
    /// Difference of intensity centroids; the output centroid may be taken
    /// within `[lo, hi)` to exclude distinct echo orders.
    Centroid { window: Option<(f64, f64)> },
    /// Peak of the cross-correlation of the intensity envelopes, each first
    /// smoothed by a Gaussian of FWHM `smoothing` seconds (0 for none),
    /// refined by a parabola through the peak and its neighbours.
    ///
    /// Trains behind a periodic medium keep their pulses on the input's time
    /// grid while the envelope moves, so the smoothing must wash out the
    /// pulse spacing: a FWHM of twice the spacing is enough.
    CrossCorrelation { smoothing: f64 },
}

fn check_same_grid(a: &Waveform, b: &Waveform) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if (a.dt() - b.dt()).abs() > 1e-12 * a.dt() || (a.t0() - b.t0()).abs() > 1e-9 * a.dt() {
        return Err(Error::NotCommensurate(format!(
            "time grids differ (dt {} vs {}, t0 {} vs {})",
            a.dt(),
            b.dt(),
            a.t0(),
            b.t0()
        )));
    }
    Ok(())
}

/// Envelope delay of `output` relative to `input`, both on one time grid.
pub fn measure_group_delay(input: &Waveform, output: &Waveform, method: DelayMethod) -> Result<f64> {
    check_same_grid(input, output)?;
    match method {
        DelayMethod::Centroid { window } => {
            let t_in = input.centroid().ok_or(Error::ZeroEnergy("input"))?;
            let t_out = match window {
                Some((lo, hi)) => output.centroid_between(lo, hi),
                None => output.centroid(),
            }
            .ok_or(Error::ZeroEnergy("output"))?;
            Ok(t_out - t_in)
        }
        DelayMethod::CrossCorrelation { smoothing } => {
            non_negative("smoothing", smoothing)?;
            cross_correlation_delay(input, output, smoothing)
        }
    }
}

fn cross_correlation_delay(input: &Waveform, output: &Waveform, smoothing: f64) -> Result<f64> {
    let n = input.len();
    let dt = input.dt();
    let a = input.intensity();
    let b = output.intensity();
    if a.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroEnergy("input"));
    }
    if b.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroEnergy("output"));
    }
    // linear (not circular) correlation: pad to 2n
    let m = (2 * n).next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        fa[i] = Complex64::new(a[i], 0.0);
        fb[i] = Complex64::new(b[i], 0.0);
    }
    fft::forward(&mut fa);
    fft::forward(&mut fb);
    // smoothing both envelopes by G multiplies the cross-spectrum by |Ĝ|²
    let sigma = smoothing / (2.0 * libm::sqrt(2.0 * core::f64::consts::LN_2));
    for (k, (x, y)) in fa.iter_mut().zip(&fb).enumerate() {
        let j = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        let w = core::f64::consts::TAU * j / (m as f64 * dt) * sigma;
        *x = x.conj() * y * libm::exp(-w * w);
    }
    fft::inverse(&mut fa);
    // lag ℓ ∈ (-n, n) lives at index ℓ mod m
    let lags: Vec<i64> = (-(n as i64) + 1..n as i64).collect();
    let corr: Vec<f64> = lags.iter().map(|&l| fa[l.rem_euclid(m as i64) as usize].re).collect();
    let (peak, &max) = corr
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty");
    let mut lo = peak;
    while lo > 0 && corr[lo - 1] <= corr[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < corr.len() && corr[hi + 1] <= corr[hi] {
        hi += 1;
    }
    let second = corr[..lo]
        .iter()
        .chain(&corr[hi + 1..])
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1));
    if let Some((j, &value)) = second {
        if value > 0.9 * max {
            let j = if j < lo { j } else { j + hi + 1 - lo };
            return Err(Error::AmbiguousLag {
                first: lags[peak] as f64 * dt,
                second: lags[j] as f64 * dt,
            });
        }
    }
    let mut shift = 0.0;
    if peak > 0 && peak + 1 < corr.len() {
        let (l, c, r) = (corr[peak - 1], corr[peak], corr[peak + 1]);
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            shift = 0.5 * (l - r) / denom;
        }
    }
    Ok((lags[peak] as f64 + shift) * dt)
}

/// Field-level superposition `Σ_j w_j·out(t - τ_j)` of copies of a
/// single-pulse response, where `τ_j` is the offset of pulse `j` from the
/// pulse that produced `single_output`.
///
/// Offsets that are whole multiples of `dt` are applied as circular sample
/// shifts (the same wrap the propagator uses). Other offsets need
/// `resample`, which applies them as spectral phases.
pub fn decompose_train_response(
    single_output: &Waveform,
    offsets: &[f64],
    weights: &[f64],
    resample: bool,
) -> Result<Waveform> {
    if offsets.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: offsets.len(),
            right: weights.len(),
        });
    }
    let n = single_output.len();
    let dt = single_output.dt();
    let mut out = Waveform::zeros(single_output.time_grid());
    let mut field = None;
    for (&tau, &w) in offsets.iter().zip(weights) {
        let steps = tau / dt;
        let whole = libm::round(steps);
        if (steps - whole).abs() < 1e-6 {
            let s = (whole as i64).rem_euclid(n as i64) as usize;
            let src = single_output.samples();
            let dst = out.samples_mut();
            for i in 0..n {
                dst[(i + s) % n] += src[i] * w;
            }
        } else if resample {
            let base = field.get_or_insert_with(|| spectrum(single_output));
            let mut shifted = base.clone();
            for (v, omega) in shifted.values.iter_mut().zip(base.grid.points()) {
                let phase = -omega * tau;
                *v *= Complex64::new(libm::cos(phase), libm::sin(phase)) * w;
            }
            out.add_scaled(&inverse_spectrum(&shifted), Complex64::new(1.0, 0.0))?;
        } else {
            return Err(Error::NotCommensurate(format!(
                "offset {tau} s is {steps} samples; enable resampling for fractional shifts"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::golden_section_max;
    use crate::propagation::{propagate, PropagateOptions};
    use crate::response::{analytic_transfer_function, Truncation};
    use crate::signals::{gaussian_pulse, pulse_train, PulseTrain, TimeGrid, TrainEnvelope};
    use crate::spectra::{Alignment, LorentzianComb};

    const T: f64 = 500e-9;
    const L: f64 = 5e-3;

    fn lorentz_series(alpha_max: f64, gt: f64, n_max: i64) -> FourierSeries {
        let p = LorentzianComb::new(alpha_max, gt / T, T, Alignment::OnPeak).unwrap();
        FourierSeries::from_nonnegative((0..=n_max).map(|n| p.coefficient(n)).collect(), T).unwrap()
    }

    fn pulse_at(grid: TimeGrid, centre: f64) -> Waveform {
        gaussian_pulse(100e-9, centre, Complex64::new(1.0, 0.0), grid).unwrap()
    }

    #[test]
    fn transparent_medium_windows() {
        let grid = TimeGrid::for_period(T, 16, -2.0 * T).unwrap();
        let w = pulse_at(grid, 0.0);
        let e = echo_energies(&w, &w, T, 3).unwrap();
        // the Gaussian tail beyond ±T/2 is ~3e-8
        assert!((e[0] - 1.0).abs() < 1e-7);
        assert!(e[1] < 1e-7 && e[2] < 1e-20);
        assert_eq!(echo_efficiency_measured(&w, &w, T, 1).unwrap(), e[1]);
    }

    #[test]
    fn windows_need_compact_input() {
        let grid = TimeGrid::for_period(T, 16, -2.0 * T).unwrap();
        let train = PulseTrain {
            count: 2,
            spacing: T,
            pulse_fwhm: 100e-9,
            envelope: TrainEnvelope::Flat,
            first_center: 0.0,
        };
        let w = pulse_train(&train, grid).unwrap();
        assert!(matches!(
            echo_energies(&w, &w, T, 2),
            Err(Error::InputSpansWindows { .. })
        ));
    }

    #[test]
    fn measured_first_echo_matches_closed_form() {
        let grid = TimeGrid::for_period(T, 32, -2.0 * T).unwrap();
        let w = pulse_at(grid, 0.0);
        // α_0 L = 2
        let s = lorentz_series(2.0 / L, 0.3, 400);
        let h = analytic_transfer_function(&s, 0.0, L, &w.spectral_grid(), Truncation::default()).unwrap();
        let out = propagate(&w, &h, PropagateOptions::default()).unwrap();
        let eta = echo_efficiency_measured(&w, &out, T, 1).unwrap();
        let expected = efficiency_analytic(&s, L);
        assert!((eta - expected).abs() < 1e-3 * expected, "{eta} vs {expected}");
        let energies = echo_energies(&w, &out, T, 20).unwrap();
        let report =
            DelayEfficiencyReport::new(eta, 1e-7, L, out.energy() / w.energy(), energies).unwrap();
        assert!(report.echo_energies.iter().sum::<f64>() <= report.transmitted_fraction + 1e-12);
        assert!((report.group_velocity - 5e4).abs() < 1e-6);
    }

    #[test]
    fn report_invariants() {
        assert!(DelayEfficiencyReport::new(1.2, 1e-7, L, 0.5, vec![]).is_err());
        assert!(DelayEfficiencyReport::new(0.2, 1e-7, L, 1.5, vec![]).is_err());
        assert!(DelayEfficiencyReport::new(0.2, 1e-7, L, 0.5, vec![0.7, 0.6]).is_err());
    }

    #[test]
    fn analytic_efficiency() {
        let flat = FourierSeries::from_nonnegative(vec![Complex64::new(100.0, 0.0), Complex64::new(0.0, 0.0)], T).unwrap();
        assert_eq!(efficiency_analytic(&flat, L), 0.0);
        for (d, gt) in [(1.0, 0.3), (5.0, 0.1), (20.0, 0.5)] {
            let s = lorentz_series(d / L, gt, 3);
            let closed = (d * gt / 2.0).powi(2) * libm::exp(-2.0 * gt) * libm::exp(-d * gt / 2.0);
            assert!((efficiency_analytic(&s, L) - closed).abs() < 1e-12 * closed);
            let law = efficiency_lorentzian(d, gt, LorentzianForm::Halved).unwrap();
            assert!((law - closed).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn lorentzian_law_values() {
        let eta = efficiency_lorentzian(10.0, 4.0 / 14.0, LorentzianForm::Halved).unwrap();
        assert!((eta - 4.0 * libm::exp(-2.0) * 100.0 / 196.0).abs() < 1e-12);
        assert!((eta - 0.2762).abs() < 1e-4);
        let unhalved = efficiency_lorentzian(10.0, 4.0 / 14.0, LorentzianForm::Unhalved).unwrap();
        assert!((unhalved - 4.0 * eta).abs() < 1e-12);
        assert!(efficiency_lorentzian(400.0, 4.0 / 404.0, LorentzianForm::Unhalved).unwrap() > 1.0);
        assert!(efficiency_lorentzian(10.0, 1e-9, LorentzianForm::Halved).unwrap() < 1e-15);
    }

    #[test]
    fn optimum_is_consistent() {
        for d in [0.5, 4.0, 10.0, 40.0, 400.0] {
            let m = golden_section_max(
                |gt| efficiency_lorentzian(d, gt, LorentzianForm::Halved).unwrap(),
                1e-6,
                3.0,
                1e-12,
            )
            .unwrap();
            let exact = optimal_width(d, T).unwrap() * T;
            assert!((m.x - exact).abs() < 1e-6 * exact, "d = {d}: {} vs {exact}", m.x);
            let at = efficiency_lorentzian(d, exact, LorentzianForm::Halved).unwrap();
            assert!((at - efficiency_optimal(d).unwrap()).abs() < 1e-12);
        }
        assert!((optimal_width(4.0, T).unwrap() * T - 0.5).abs() < 1e-15);
        assert!((optimal_width_asymptotic(400.0, T).unwrap() * T - 0.01).abs() < 1e-15);
    }

    #[test]
    fn optimal_efficiency_asymptote() {
        let limit = 4.0 * libm::exp(-2.0);
        assert_eq!(efficiency_optimal(0.0).unwrap(), 0.0);
        assert!((efficiency_optimal(10.0).unwrap() - 0.2762).abs() < 1e-4);
        let at_400 = efficiency_optimal(400.0).unwrap();
        assert!((at_400 - limit * (400.0f64 / 404.0).powi(2)).abs() < 1e-15);
        let mut last = 0.0;
        for i in 1..200 {
            let v = efficiency_optimal(i as f64 * 5.0).unwrap();
            assert!(v > last && v < limit);
            last = v;
        }
    }

    #[test]
    fn delay_of_identity_and_shift() {
        let grid = TimeGrid::new(-2e-6, 5e-9, 1024).unwrap();
        let w = pulse_at(grid, 0.0);
        let methods = [
            DelayMethod::Centroid { window: None },
            DelayMethod::CrossCorrelation { smoothing: 0.0 },
            DelayMethod::CrossCorrelation { smoothing: 50e-9 },
        ];
        for m in methods {
            assert!(measure_group_delay(&w, &w, m).unwrap().abs() < 1e-15);
            let shifted = pulse_at(grid, 300e-9);
            let d = measure_group_delay(&w, &shifted, m).unwrap();
            assert!((d - 300e-9).abs() < grid.dt, "{m:?}: {d}");
            let off_grid = pulse_at(grid, 302e-9);
            let d = measure_group_delay(&w, &off_grid, m).unwrap();
            assert!((d - 302e-9).abs() < grid.dt, "{m:?}: {d}");
        }
    }

    #[test]
    fn centroid_window_selects_an_echo() {
        let grid = TimeGrid::new(-2e-6, 5e-9, 1024).unwrap();
        let w = pulse_at(grid, 0.0);
        let mut out = pulse_at(grid, 0.0).scaled(Complex64::new(0.5, 0.0));
        out.add_scaled(&pulse_at(grid, T), Complex64::new(0.3, 0.0)).unwrap();
        let d = measure_group_delay(&w, &out, DelayMethod::Centroid { window: Some((0.5 * T, 1.5 * T)) }).unwrap();
        assert!((d - T).abs() < 1e-12);
    }

    #[test]
    fn twin_peaks_are_ambiguous() {
        let grid = TimeGrid::new(-2e-6, 5e-9, 1024).unwrap();
        let w = pulse_at(grid, 0.0);
        let mut out = pulse_at(grid, 200e-9);
        out.add_scaled(&pulse_at(grid, 700e-9), Complex64::new(0.98, 0.0)).unwrap();
        assert!(matches!(
            measure_group_delay(&w, &out, DelayMethod::CrossCorrelation { smoothing: 0.0 }),
            Err(Error::AmbiguousLag { .. })
        ));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = pulse_at(TimeGrid::new(-2e-6, 5e-9, 1024).unwrap(), 0.0);
        let b = pulse_at(TimeGrid::new(-2e-6, 5e-9, 1000).unwrap(), 0.0);
        assert!(measure_group_delay(&a, &b, DelayMethod::Centroid { window: None }).is_err());
    }

    fn comb_response(grid: TimeGrid) -> impl Fn(&Waveform) -> Waveform {
        let s = lorentz_series(1500.0, 0.25, 400);
        let spectral = Waveform::zeros(grid).spectral_grid();
        let h = analytic_transfer_function(&s, 0.0, L, &spectral, Truncation::default()).unwrap();
        move |w| propagate(w, &h, PropagateOptions::default()).unwrap()
    }

    #[test]
    fn single_pulse_decomposition_is_identity() {
        let grid = TimeGrid::for_period(T, 32, -2.0 * T).unwrap();
        let out = comb_response(grid)(&pulse_at(grid, 0.0));
        let d = decompose_train_response(&out, &[0.0], &[1.0], false).unwrap();
        assert_eq!(d, out);
    }

    #[test]
    fn two_pulses_add_as_fields() {
        let grid = TimeGrid::for_period(T, 32, -2.0 * T).unwrap();
        let respond = comb_response(grid);
        let single = respond(&pulse_at(grid, 0.0));
        let d = decompose_train_response(&single, &[0.0, T], &[1.0, 1.0], false).unwrap();
        // window around 2T: second echo of pulse 1 plus first echo of pulse 2
        let (lo, hi) = (1.5 * T, 2.5 * T);
        let i = ((2.0 * T - grid.t0) / grid.dt).round() as usize;
        let k = (T / grid.dt).round() as usize;
        let field = single.samples()[i] + single.samples()[i - k];
        assert!((d.samples()[i] - field).norm() < 1e-15);
        let incoherent = single.energy_between(lo, hi) + single.energy_between(lo - T, hi - T);
        assert!((d.energy_between(lo, hi) - incoherent).abs() > 1e-3 * incoherent);
    }

    #[test]
    fn four_pulse_train_decomposes_exactly() {
        let grid = TimeGrid::for_period(T, 64, -2.0 * T).unwrap();
        let respond = comb_response(grid);
        let train = PulseTrain {
            count: 4,
            spacing: T,
            pulse_fwhm: 100e-9,
            envelope: TrainEnvelope::Gaussian { fwhm: 2.0 * T },
            first_center: 0.0,
        };
        let direct = respond(&pulse_train(&train, grid).unwrap());
        let centre = train.pulse_times()[0];
        let single = respond(&pulse_at(grid, centre));
        let offsets: Vec<f64> = train.pulse_times().iter().map(|t| t - centre).collect();
        let d = decompose_train_response(&single, &offsets, &train.weights(), false).unwrap();
        let diff: f64 = d
            .samples()
            .iter()
            .zip(direct.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * grid.dt;
        assert!(diff < 1e-10 * direct.energy(), "{diff}");
    }

    #[test]
    fn fractional_offsets_need_resampling() {
        let grid = TimeGrid::for_period(T, 32, -2.0 * T).unwrap();
        let respond = comb_response(grid);
        let single = respond(&pulse_at(grid, 0.0));
        let tau = 0.3 * grid.dt + 10.0 * grid.dt;
        assert!(matches!(
            decompose_train_response(&single, &[tau], &[1.0], false),
            Err(Error::NotCommensurate(_))
        ));
        let d = decompose_train_response(&single, &[tau], &[1.0], true).unwrap();
        let direct = respond(&pulse_at(grid, tau));
        let scale = direct.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in d.samples().iter().zip(direct.samples()) {
            assert!((a - b).norm() < 1e-9 * scale);
        }
    }
}
