//! Evaluation of validated scenarios into in-memory tables.

use afc_core::analysis::{
    echo_efficiency_measured, efficiency_analytic, efficiency_lorentzian, measure_group_delay, DelayMethod,
    LorentzianForm,
};
use afc_core::optimize::golden_section_max;
use afc_core::propagation::{propagate, PropagateOptions};
use afc_core::response::{analytic_transfer_function, group_delay_analytic, TransferFunction};
use afc_core::signals::{gaussian_pulse, pulse_train, TrainEnvelope, Waveform};
use afc_core::Complex64;
use rayon::prelude::*;

use crate::config::{CombPlan, Plan, ScenarioKind};
use crate::csvio::{transfer_table, waveform_table, Table, REPORT_HEADER};
use crate::error::CliError;

/// Width-product resolution of the efficiency optimum search.
const WIDTH_TOLERANCE: f64 = 1e-4;

/// One row of the report table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub avg_optical_depth: f64,
    pub eta_measured: f64,
    pub eta_analytic: f64,
    pub tg_measured: f64,
    pub tg_analytic: f64,
    pub transmitted_fraction: f64,
}

impl ReportRow {
    /// Values in report-column order.
    pub fn values(&self) -> [f64; 6] {
        [
            self.avg_optical_depth,
            self.eta_measured,
            self.eta_analytic,
            self.tg_measured,
            self.tg_analytic,
            self.transmitted_fraction,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub input: Waveform,
    pub output: Waveform,
    pub transfer: TransferFunction,
    pub row: ReportRow,
    /// Cross-correlation envelope delay, for enveloped trains.
    pub xcorr_delay: Option<f64>,
}

/// Propagates the scenario's signal through `comb`.
///
/// The measured efficiency always comes from a lone copy of the first pulse,
/// since echoes of neighbouring pulses in a train share windows. Delays
/// include the vacuum transit `L/c`.
pub fn propagate_comb(plan: &Plan, comb: &CombPlan, gamma_t: Option<f64>) -> afc_core::Result<Propagation> {
    let series = plan.series(comb, gamma_t)?;
    let length = plan.length();
    let input = pulse_train(&plan.train, plan.grid)?;
    let transfer = analytic_transfer_function(&series, plan.gamma(), length, &input.spectral_grid(), plan.truncation)?;
    let opts = PropagateOptions::default();
    let output = propagate(&input, &transfer, opts)?;
    let vacuum = transfer.vacuum_delay();

    let eta_measured = if plan.train.count == 1 {
        echo_efficiency_measured(&input, &output, plan.period, 1)?
    } else {
        let one = Complex64::new(1.0, 0.0);
        let single = gaussian_pulse(plan.train.pulse_fwhm, plan.train.first_center, one, plan.grid)?;
        echo_efficiency_measured(&single, &propagate(&single, &transfer, opts)?, plan.period, 1)?
    };
    // a lone pulse's delay is that of its transmitted part, not of the echoes
    let window = if plan.train.count == 1 {
        let c = input.centroid().ok_or(afc_core::Error::ZeroEnergy("input"))?;
        Some((c - 0.5 * plan.period, c + 0.5 * plan.period))
    } else {
        None
    };
    let tg_measured = measure_group_delay(&input, &output, DelayMethod::Centroid { window })? + vacuum;
    let xcorr_delay = match plan.train.envelope {
        TrainEnvelope::Gaussian { .. } if plan.train.count > 1 => {
            let method = DelayMethod::CrossCorrelation {
                smoothing: 2.0 * plan.train.spacing,
            };
            Some(measure_group_delay(&input, &output, method)? + vacuum)
        }
        _ => None,
    };
    let row = ReportRow {
        avg_optical_depth: series.alpha0() * length,
        eta_measured,
        eta_analytic: efficiency_analytic(&series, length),
        tg_measured,
        tg_analytic: group_delay_analytic(&series, plan.gamma(), length),
        transmitted_fraction: output.energy() / input.energy(),
    };
    Ok(Propagation {
        input,
        output,
        transfer,
        row,
        xcorr_delay,
    })
}

/// Files produced by one scenario, plus its report row if it has one.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOutput {
    pub tables: Vec<(String, Table)>,
    pub report: Option<ReportRow>,
}

pub fn evaluate(plan: &Plan) -> Result<ScenarioOutput, CliError> {
    let physics = |source| CliError::Physics {
        scenario: plan.name.clone(),
        source,
    };
    let name = &plan.name;
    let mut out = ScenarioOutput::default();
    match plan.kind {
        ScenarioKind::SinglePulse | ScenarioKind::PulseTrain | ScenarioKind::SlowLight => {
            let p = propagate_comb(plan, &plan.comb, None).map_err(physics)?;
            out.tables.push((format!("{name}_input.csv"), waveform_table(&p.input)));
            out.tables.push((format!("{name}_output.csv"), waveform_table(&p.output)));
            out.tables.push((format!("{name}_transfer.csv"), transfer_table(&p.transfer)));
            if let Some(xcorr) = p.xcorr_delay {
                let mut t = Table::new(["tg_centroid_s", "tg_xcorr_s", "tg_analytic_s"]);
                t.push_floats(&[p.row.tg_measured, xcorr, p.row.tg_analytic]);
                out.tables.push((format!("{name}_delays.csv"), t));
            }
            out.report = Some(p.row);
        }
        ScenarioKind::DelaySweep => {
            let points: Vec<_> = plan
                .alpha_values
                .par_iter()
                .map(|&a| propagate_comb(plan, &plan.with_peak(a), None))
                .collect();
            let mut t = Table::new(
                std::iter::once("alpha_max_per_m")
                    .chain(REPORT_HEADER)
                    .chain(std::iter::once("tg_xcorr_s")),
            );
            for (a, p) in plan.alpha_values.iter().zip(points) {
                let p = p.map_err(physics)?;
                let mut row = vec![*a];
                row.extend(p.row.values());
                row.push(p.xcorr_delay.unwrap_or(f64::NAN));
                t.push_floats(&row);
            }
            out.tables.push((format!("{name}.csv"), t));
        }
        ScenarioKind::EfficiencyWidth => {
            let CombPlan::Lorentzian { alpha_max, .. } = plan.comb else {
                unreachable!("validation admits only lorentzian width sweeps")
            };
            let d = alpha_max * plan.length();
            let measured = |gt: f64| propagate_comb(plan, &plan.comb, Some(gt)).map(|p| p.row);
            let points: Vec<_> = plan.gamma_t_values.par_iter().map(|&gt| measured(gt)).collect();
            let mut t = Table::new(["gamma_t", "eta_closed_form", "eta_analytic", "eta_measured"]);
            for (gt, row) in plan.gamma_t_values.iter().zip(points) {
                let row = row.map_err(physics)?;
                let closed = efficiency_lorentzian(d, *gt, LorentzianForm::Halved).map_err(physics)?;
                t.push_floats(&[*gt, closed, row.eta_analytic, row.eta_measured]);
            }
            out.tables.push((format!("{name}.csv"), t));
            out.tables.push((format!("{name}_optimum.csv"), optimum(plan, d, measured)?));
        }
    }
    Ok(out)
}

/// Closed-form optimum next to a golden-section search of the measured
/// efficiency over the swept width range.
fn optimum(
    plan: &Plan,
    d: f64,
    measured: impl Fn(f64) -> afc_core::Result<ReportRow>,
) -> Result<Table, CliError> {
    let physics = |source| CliError::Physics {
        scenario: plan.name.clone(),
        source,
    };
    let lo = plan.gamma_t_values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = plan.gamma_t_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (gt_search, eta_search) = if hi > lo {
        let mut failure = None;
        let m = golden_section_max(
            |gt| match measured(gt) {
                Ok(row) => row.eta_measured,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            WIDTH_TOLERANCE,
        )
        .map_err(physics)?;
        if let Some(e) = failure {
            return Err(physics(e));
        }
        (m.x, m.value)
    } else {
        (lo, measured(lo).map_err(physics)?.eta_measured)
    };
    let gt_closed = 4.0 / (4.0 + d);
    let eta_closed = efficiency_lorentzian(d, gt_closed, LorentzianForm::Halved).map_err(physics)?;
    let mut t = Table::new([
        "peak_optical_depth",
        "gamma_t_closed_form",
        "eta_closed_form",
        "gamma_t_measured",
        "eta_measured",
    ]);
    t.push_floats(&[d, gt_closed, eta_closed, gt_search, eta_search]);
    Ok(t)
}
