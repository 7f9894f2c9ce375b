use afc_core::analysis::{
    echo_energies, efficiency_lorentzian, efficiency_optimal, optimal_width, LorentzianForm,
};
use afc_core::optimize::golden_section_max;
use afc_core::propagation::{propagate, PropagateOptions};
use afc_core::response::{
    analytic_transfer_function, group_delay_analytic, pre_signal_energy_fraction, Truncation,
};
use afc_core::signals::{gaussian_pulse, inverse_spectrum, spectrum, TimeGrid, Waveform};
use afc_core::spectra::{
    build_lorentzian_comb, fourier_coefficients, synthesize_from_fourier, Alignment, CombGrid, FourierSeries,
    LorentzianComb, Medium, MeasuredComb,
};
use afc_core::{Complex64, UniformGrid};
use proptest::prelude::*;

const T: f64 = 500e-9;
const L: f64 = 5e-3;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn alignment() -> impl Strategy<Value = Alignment> {
    prop_oneof![Just(Alignment::OnPeak), Just(Alignment::InWindow)]
}

/// Random non-negative spectrum over four periods: a few Gaussian bumps per
/// period on a background, repeated so the comb is periodic. Bumps are wide
/// enough that 31 harmonics represent them without negative excursions.
fn periodic_spectrum() -> impl Strategy<Value = Vec<f64>> {
    (
        0.0..50.0f64,
        prop::collection::vec((0.0..1.0f64, 0.06..0.2f64, 10.0..2000.0f64), 1..4),
    )
        .prop_map(|(background, bumps)| {
            let spp = 64;
            (0..=4 * spp)
                .map(|i| {
                    let u = (i % spp) as f64 / spp as f64;
                    background
                        + bumps
                            .iter()
                            .map(|&(c, w, a)| {
                                (-2..=2)
                                    .map(|k| {
                                        let x = (u - c - k as f64) / w;
                                        a * (-x * x).exp()
                                    })
                                    .sum::<f64>()
                            })
                            .sum::<f64>()
                })
                .collect()
        })
}

fn random_pulse(grid: TimeGrid) -> impl Strategy<Value = Waveform> {
    (70e-9..100e-9f64, -0.3..0.3f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(move |(fwhm, c, re, im)| {
        gaussian_pulse(fwhm, c * T, Complex64::new(re, im), grid).unwrap()
    })
}

fn lorentz_series(alpha_max: f64, gt: f64, alignment: Alignment, n_max: i64) -> FourierSeries {
    let p = LorentzianComb::new(alpha_max, gt / T, T, alignment).unwrap();
    FourierSeries::from_nonnegative((0..=n_max).map(|n| p.coefficient(n)).collect(), T).unwrap()
}

proptest! {
    #![proptest_config(config())]

    /// Real spectra have Hermitian coefficients, and non-negative ones are
    /// bounded by their mean.
    #[test]
    fn coefficients_are_hermitian_and_bounded(alpha in periodic_spectrum(), al in alignment()) {
        let grid = CombGrid::new(4, 64).grid(T).unwrap();
        let m = MeasuredComb::from_samples(grid, alpha, T, Medium::new(L, 0.0).unwrap(), al, false).unwrap();
        let s = fourier_coefficients(&m.comb, 31).unwrap();
        for n in 1..=31i64 {
            prop_assert_eq!(s.coefficient(-n), s.coefficient(n).conj());
            prop_assert!(s.coefficient(n).norm() <= s.alpha0() * (1.0 + 1e-12));
        }
    }

    /// Moving the reference from a peak to a window flips odd orders.
    #[test]
    fn alignment_shift_flips_odd_orders(alpha_max in 10.0..3000.0f64, gt in 0.2..1.5f64) {
        let medium = Medium::new(L, 0.0).unwrap();
        let grid = CombGrid::new(4, 256);
        let on = build_lorentzian_comb(alpha_max, gt / T, T, Alignment::OnPeak, grid, medium).unwrap();
        let within = build_lorentzian_comb(alpha_max, gt / T, T, Alignment::InWindow, grid, medium).unwrap();
        let a = fourier_coefficients(&on, 20).unwrap();
        let b = fourier_coefficients(&within, 20).unwrap();
        for n in 0..=20i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((b.coefficient(n) - a.coefficient(n) * sign).norm() < 1e-9 * a.alpha0());
        }
    }

    /// Synthesis followed by analysis returns the series.
    #[test]
    fn synthesis_round_trip(
        harmonics in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8),
        al in alignment(),
    ) {
        let mut c: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        c.extend(harmonics.iter().map(|&(re, im)| Complex64::new(re, im) * 100.0));
        // α_0 above Σ 2|α_n| keeps the synthesis non-negative
        c[0] = Complex64::new(1.0 + 2.0 * c.iter().map(|v| v.norm()).sum::<f64>(), 0.0);
        let s = FourierSeries::from_nonnegative(c, T).unwrap();
        let grid = CombGrid::new(2, 64).grid(T).unwrap();
        let comb = synthesize_from_fourier(&s, &grid, Medium::new(L, 0.0).unwrap(), al).unwrap();
        let back = fourier_coefficients(&comb, s.n_max()).unwrap();
        for n in 0..=s.n_max() as i64 {
            prop_assert!((back.coefficient(n) - s.coefficient(n)).norm() < 1e-9 * s.alpha0());
        }
    }

    #[test]
    fn parseval_and_round_trip(
        samples in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..300),
        dt in 1e-10..1e-7f64,
        t0 in -1e-6..1e-6f64,
    ) {
        let w = Waveform::new(samples.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), dt, t0).unwrap();
        let f = spectrum(&w);
        prop_assert!((f.energy() - w.energy()).abs() <= 1e-12 * w.energy().max(1e-300));
        let back = inverse_spectrum(&f);
        for (a, b) in back.samples().iter().zip(w.samples()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    /// A passive comb never amplifies and is linear.
    #[test]
    fn passivity_and_linearity(
        alpha in periodic_spectrum(),
        gamma_t in 0.0..0.5f64,
        w1 in random_pulse(TimeGrid::for_period(T, 32, -2.0 * T).unwrap()),
        w2 in random_pulse(TimeGrid::for_period(T, 32, -2.0 * T).unwrap()),
        (a, b) in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let grid = CombGrid::new(4, 64).grid(T).unwrap();
        let m = MeasuredComb::from_samples(grid, alpha, T, Medium::new(L, 0.0).unwrap(), Alignment::InWindow, false).unwrap();
        let s = fourier_coefficients(&m.comb, 31).unwrap();
        let h = analytic_transfer_function(&s, gamma_t / T, L, &w1.spectral_grid(), Truncation::Forced).unwrap();
        prop_assert!(h.values().iter().all(|v| v.norm() <= 1.0 + 1e-12));

        let opts = PropagateOptions::default();
        let o1 = propagate(&w1, &h, opts).unwrap();
        prop_assert!(o1.energy() <= w1.energy() * (1.0 + 1e-12));
        let o2 = propagate(&w2, &h, opts).unwrap();
        let mut sum = w1.scaled(Complex64::new(a, 0.0));
        sum.add_scaled(&w2, Complex64::new(b, 0.0)).unwrap();
        let lhs = propagate(&sum, &h, opts).unwrap();
        let mut rhs = o1.scaled(Complex64::new(a, 0.0));
        rhs.add_scaled(&o2, Complex64::new(b, 0.0)).unwrap();
        let scale = lhs.samples().iter().chain(rhs.samples()).map(|v| v.norm()).fold(1e-300, f64::max);
        for (x, y) in lhs.samples().iter().zip(rhs.samples()) {
            prop_assert!((x - y).norm() < 1e-12 * scale);
        }
        let e = echo_energies(&w1, &o1, T, 30).unwrap();
        prop_assert!(e.iter().sum::<f64>() <= 1.0 + 1e-9);
    }

    #[test]
    fn analytic_response_is_causal(
        alpha_max in 10.0..3000.0f64,
        gt in 0.1..1.5f64,
        gamma_t in 0.0..0.3f64,
        al in alignment(),
    ) {
        let s = lorentz_series(alpha_max, gt, al, 400);
        let grid = UniformGrid::dft(16 * 512, T / 16.0).unwrap();
        let h = analytic_transfer_function(&s, gamma_t / T, L, &grid, Truncation::Forced).unwrap();
        prop_assert!(pre_signal_energy_fraction(&h).unwrap() < 1e-9);
    }

    /// Extending the series changes `T_g` by less than the geometric bound
    /// `L·T·α_0·Σ_{n>N} n·e^{-nγT}`, using `|α_n| ≤ α_0`.
    #[test]
    fn truncation_changes_delay_within_tail_bound(
        alpha in periodic_spectrum(),
        gamma_t in 0.02..0.5f64,
        n1 in 1usize..20,
        extra in 1usize..11,
    ) {
        let grid = CombGrid::new(4, 64).grid(T).unwrap();
        let m = MeasuredComb::from_samples(grid, alpha, T, Medium::new(L, 0.0).unwrap(), Alignment::InWindow, false).unwrap();
        let s = fourier_coefficients(&m.comb, 31).unwrap();
        let gamma = gamma_t / T;
        let short = group_delay_analytic(&s.truncated(n1), gamma, L);
        let long = group_delay_analytic(&s.truncated(n1 + extra), gamma, L);
        let q: f64 = (-gamma_t).exp();
        let n = n1 as f64;
        let tail = q.powf(n + 1.0) * ((n + 1.0) - n * q) / ((1.0 - q) * (1.0 - q));
        let bound = L * T * s.alpha0() * tail;
        prop_assert!((long - short).abs() <= bound * (1.0 + 1e-9) + 1e-22, "{} > {}", (long - short).abs(), bound);
    }

    #[test]
    fn optimum_matches_closed_form(d in 0.5..500.0f64) {
        let m = golden_section_max(
            |gt| efficiency_lorentzian(d, gt, LorentzianForm::Halved).unwrap(),
            1e-6,
            3.0,
            1e-12,
        ).unwrap();
        let exact = optimal_width(d, T).unwrap() * T;
        prop_assert!((m.x - exact).abs() < 1e-6 * exact);
        prop_assert!((m.value - efficiency_optimal(d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn optimal_efficiency_is_monotone_and_bounded(d in 0.0..1e4f64, step in 1e-3..10.0f64) {
        let (a, b) = (efficiency_optimal(d).unwrap(), efficiency_optimal(d + step).unwrap());
        prop_assert!(a < b || (a == b && a == 4.0 * (-2.0f64).exp()));
        prop_assert!(b < 4.0 * (-2.0f64).exp());
    }
}
