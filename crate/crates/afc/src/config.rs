//! Scenario configuration files.
//!
//! TOML, with the unit in every dimensional key name. A config is parsed,
//! checked and converted to SI units in full before anything is computed, so
//! an invalid file never produces partial output.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use afc_core::response::{truncation_tail, Truncation};
use afc_core::signals::{pulse_train, PulseTrain, TimeGrid, TrainEnvelope};
use afc_core::spectra::{
    build_square_comb, fourier_coefficients, Alignment, CombGrid, FourierSeries, LorentzianComb, MeasuredComb,
    Medium,
};
use serde::Deserialize;

use crate::csvio::read_spectrum;
use crate::error::{CliError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// One pulse: transmitted part and echoes.
    SinglePulse,
    /// Equally spaced pulses, optionally under an envelope.
    PulseTrain,
    /// A Gaussian-envelope train and its envelope delay.
    SlowLight,
    /// Slow-light delay against peak absorption.
    DelaySweep,
    /// Echo efficiency against comb line width.
    EfficiencyWidth,
}

impl ScenarioKind {
    /// Kinds that contribute one row to the report table.
    pub fn reports(self) -> bool {
        matches!(self, Self::SinglePulse | Self::PulseTrain | Self::SlowLight)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentKey {
    #[default]
    InWindow,
    OnPeak,
}

impl From<AlignmentKey> for Alignment {
    fn from(a: AlignmentKey) -> Self {
        match a {
            AlignmentKey::InWindow => Alignment::InWindow,
            AlignmentKey::OnPeak => Alignment::OnPeak,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the config file's directory.
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Also write a gnuplot script per scenario.
    #[serde(default)]
    pub gnuplot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            gnuplot: false,
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("afc-output")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub period_ns: f64,
    pub length_mm: f64,
    /// Homogeneous half-width of each atom; 2π/35 rad/µs when absent.
    pub gamma_rad_per_us: Option<f64>,
    #[serde(default)]
    pub alignment: AlignmentKey,
    /// Fourier truncation order. Lorentzian combs pick the smallest order
    /// meeting the tolerance when absent; sampled combs use the grid limit.
    pub n_max: Option<usize>,
    #[serde(default = "default_tolerance")]
    pub truncation_tolerance: f64,
    #[serde(default)]
    pub force_truncation: bool,
    pub comb: CombConfig,
    pub signal: SignalConfig,
    #[serde(default)]
    pub time: TimeConfig,
    /// `delay_sweep` only: peak absorption of each point.
    pub alpha_max_per_m_values: Option<Vec<f64>>,
    /// `efficiency_width` only: width products ΓT of each point.
    pub gamma_t_values: Option<Vec<f64>>,
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CombConfig {
    Lorentzian {
        alpha_max_per_m: Option<f64>,
        /// Alternative to `alpha_max_per_m`: α_M·L.
        peak_optical_depth: Option<f64>,
        /// Half-width times period, ΓT.
        gamma_t: Option<f64>,
        /// Use the efficiency-optimal ΓT = 4/(4 + α_M L) instead of `gamma_t`.
        #[serde(default)]
        optimal_width: bool,
    },
    Square {
        alpha_background_per_m: f64,
        beta_khz: f64,
        mu: f64,
        #[serde(default = "default_comb_periods")]
        periods: usize,
        #[serde(default = "default_comb_samples")]
        samples_per_period: usize,
    },
    Measured {
        /// `delta_hz,alpha_per_m` CSV, relative to the config file.
        file: PathBuf,
        #[serde(default)]
        periodic_extension: bool,
    },
}

fn default_comb_periods() -> usize {
    4
}

fn default_comb_samples() -> usize {
    256
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub pulse_fwhm_ns: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Defaults to the comb period.
    pub spacing_ns: Option<f64>,
    /// Gaussian intensity envelope across the train.
    pub envelope_fwhm_ns: Option<f64>,
    #[serde(default)]
    pub first_center_ns: f64,
}

fn default_count() -> usize {
    1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Window length in comb periods (64 when absent).
    pub periods: Option<usize>,
    /// Samples per comb period (64 when absent).
    pub samples_per_period: Option<usize>,
    /// Window start; two periods before the first pulse when absent.
    pub start_ns: Option<f64>,
}

/// Comb line width of a Lorentzian family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Width {
    GammaT(f64),
    Optimal,
    /// Supplied per point by the scenario.
    Swept,
}

/// Absorber description in SI units.
#[derive(Debug, Clone, PartialEq)]
pub enum CombPlan {
    Lorentzian { alpha_max: f64, width: Width },
    Square { alpha_background: f64, beta_hz: f64, mu: f64, grid: CombGrid },
    Measured(Box<MeasuredComb>),
}

/// A validated scenario in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub name: String,
    pub kind: ScenarioKind,
    pub period: f64,
    pub medium: Medium,
    pub alignment: Alignment,
    pub n_max: Option<usize>,
    pub truncation: Truncation,
    pub comb: CombPlan,
    pub train: PulseTrain,
    pub grid: TimeGrid,
    pub alpha_values: Vec<f64>,
    pub gamma_t_values: Vec<f64>,
}

/// Largest automatic Lorentzian truncation order.
const MAX_AUTO_ORDER: usize = 200_000;

impl Plan {
    pub fn gamma(&self) -> f64 {
        self.medium.gamma
    }

    pub fn length(&self) -> f64 {
        self.medium.length
    }

    /// The same absorber with its peak absorption replaced.
    pub fn with_peak(&self, alpha: f64) -> CombPlan {
        match &self.comb {
            CombPlan::Lorentzian { width, .. } => CombPlan::Lorentzian {
                alpha_max: alpha,
                width: *width,
            },
            CombPlan::Square { beta_hz, mu, grid, .. } => CombPlan::Square {
                alpha_background: alpha,
                beta_hz: *beta_hz,
                mu: *mu,
                grid: *grid,
            },
            CombPlan::Measured(_) => unreachable!("validation rejects peak sweeps of measured spectra"),
        }
    }

    /// Fourier series of `comb`, with `gamma_t` supplying a swept width.
    pub fn series(&self, comb: &CombPlan, gamma_t: Option<f64>) -> afc_core::Result<FourierSeries> {
        let t = self.period;
        match comb {
            CombPlan::Lorentzian { alpha_max, width } => {
                let gt = match (*width, gamma_t) {
                    (_, Some(gt)) | (Width::GammaT(gt), None) => gt,
                    (Width::Optimal, None) => 4.0 / (4.0 + alpha_max * self.length()),
                    (Width::Swept, None) => unreachable!("swept widths come with a value"),
                };
                let profile = LorentzianComb::new(*alpha_max, gt / t, t, self.alignment)?;
                let n = self.n_max.unwrap_or_else(|| self.auto_order(&profile, gt));
                FourierSeries::from_nonnegative((0..=n as i64).map(|k| profile.coefficient(k)).collect(), t)
            }
            CombPlan::Square {
                alpha_background,
                beta_hz,
                mu,
                grid,
            } => {
                let c = build_square_comb(*alpha_background, *beta_hz, *mu, t, self.alignment, *grid, self.medium)?;
                fourier_coefficients(&c, self.n_max.unwrap_or(grid.samples_per_period / 2 - 1))
            }
            CombPlan::Measured(m) => {
                let limit = (m.comb.samples_per_period() / 2.0).floor() as usize;
                fourier_coefficients(&m.comb, self.n_max.unwrap_or(limit.saturating_sub(1).max(1)))
            }
        }
    }

    /// Smallest order whose tail `(α_M ΓT/2)·e^{-n(Γ+γ)T}·L` meets the
    /// truncation tolerance.
    fn auto_order(&self, profile: &LorentzianComb, gt: f64) -> usize {
        let tolerance = match self.truncation {
            Truncation::Checked { tolerance } => tolerance,
            Truncation::Forced => default_tolerance(),
        };
        let lead = profile.coefficient(0).re * self.length();
        let decay = gt + self.gamma() * self.period;
        if lead <= tolerance {
            return 1;
        }
        let n = ((lead / tolerance).ln() / decay).ceil() + 1.0;
        (n as usize).clamp(1, MAX_AUTO_ORDER)
    }
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn fail(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: String, v: f64) -> bool {
        let ok = v.is_finite() && v > 0.0;
        if !ok {
            self.fail(path, format!("must be positive and finite, got {v}"));
        }
        ok
    }

    fn finite(&mut self, path: String, v: f64) -> bool {
        let ok = v.is_finite();
        if !ok {
            self.fail(path, "must be finite");
        }
        ok
    }
}

/// Parses TOML text into a table, reporting syntax errors.
pub fn parse_table(text: &str) -> Result<toml::Table, CliError> {
    text.parse::<toml::Table>().map_err(|e| CliError::Syntax(e.to_string()))
}

/// Typed view of a parsed table; unknown or mistyped keys are reported with
/// their path.
pub fn from_table(table: toml::Table) -> Result<Config, CliError> {
    serde_path_to_error::deserialize::<_, Config>(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        CliError::Invalid(vec![Violation {
            path: if path == "." { String::new() } else { path },
            message: e.into_inner().to_string(),
        }])
    })
}

pub fn load(path: &Path) -> Result<(Config, toml::Table), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let table = parse_table(&text)?;
    Ok((from_table(table.clone())?, table))
}

/// Checks every scenario and resolves it to SI units. `base` anchors the
/// relative paths inside the config.
pub fn resolve(config: &Config, base: &Path) -> Result<Vec<Plan>, CliError> {
    let mut c = Checker { violations: Vec::new() };
    let mut names = BTreeSet::new();
    let mut plans = Vec::new();
    for (i, s) in config.scenarios.iter().enumerate() {
        let at = |field: &str| format!("scenario[{i}].{field}");
        if s.name.is_empty() || !s.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
            c.fail(at("name"), "must be non-empty and use only letters, digits, `_` and `-`");
        } else if !names.insert(s.name.as_str()) || s.name == "report" {
            c.fail(at("name"), format!("`{}` is already used", s.name));
        }
        if let Some(plan) = resolve_scenario(&mut c, s, i, base) {
            plans.push(plan);
        }
    }
    if c.violations.is_empty() {
        Ok(plans)
    } else {
        Err(CliError::Invalid(c.violations))
    }
}

fn resolve_scenario(c: &mut Checker, s: &ScenarioConfig, i: usize, base: &Path) -> Option<Plan> {
    let at = |field: &str| format!("scenario[{i}].{field}");
    let before = c.violations.len();
    c.positive(at("period_ns"), s.period_ns);
    c.positive(at("length_mm"), s.length_mm);
    if let Some(g) = s.gamma_rad_per_us {
        if !(g.is_finite() && g >= 0.0) {
            c.fail(at("gamma_rad_per_us"), "must be non-negative and finite");
        }
    }
    c.positive(at("truncation_tolerance"), s.truncation_tolerance);
    if s.n_max == Some(0) {
        c.fail(at("n_max"), "must be at least 1");
    }

    let sig = &s.signal;
    c.positive(at("signal.pulse_fwhm_ns"), sig.pulse_fwhm_ns);
    c.finite(at("signal.first_center_ns"), sig.first_center_ns);
    if let Some(v) = sig.spacing_ns {
        c.positive(at("signal.spacing_ns"), v);
    }
    if let Some(v) = sig.envelope_fwhm_ns {
        c.positive(at("signal.envelope_fwhm_ns"), v);
    }
    match s.kind {
        ScenarioKind::SinglePulse | ScenarioKind::EfficiencyWidth if sig.count != 1 => {
            c.fail(at("signal.count"), "this scenario kind uses a single pulse");
        }
        ScenarioKind::PulseTrain if sig.count < 2 => {
            c.fail(at("signal.count"), "a pulse train needs at least 2 pulses");
        }
        ScenarioKind::SlowLight | ScenarioKind::DelaySweep if sig.count < 2 || sig.envelope_fwhm_ns.is_none() => {
            c.fail(at("signal"), "slow-light scenarios need count ≥ 2 and envelope_fwhm_ns");
        }
        _ => {}
    }
    if sig.count == 0 {
        c.fail(at("signal.count"), "must be at least 1");
    }
    if s.time.periods == Some(0) {
        c.fail(at("time.periods"), "must be at least 1");
    }
    if matches!(s.time.samples_per_period, Some(n) if n < 2) {
        c.fail(at("time.samples_per_period"), "must be at least 2");
    }
    if let Some(v) = s.time.start_ns {
        c.finite(at("time.start_ns"), v);
    }

    let sweep_alpha = s.kind == ScenarioKind::DelaySweep;
    let sweep_width = s.kind == ScenarioKind::EfficiencyWidth;
    let alpha_values = list(c, at("alpha_max_per_m_values"), &s.alpha_max_per_m_values, sweep_alpha);
    let gamma_t_values = list(c, at("gamma_t_values"), &s.gamma_t_values, sweep_width);

    let comb = resolve_comb(c, s, i, base, sweep_width);
    if sweep_alpha && matches!(comb, Some(CombPlan::Measured(_))) {
        c.fail(at("comb.family"), "delay sweeps need a lorentzian or square comb");
    }
    if sweep_width && !matches!(comb, Some(CombPlan::Lorentzian { .. })) {
        c.fail(at("comb.family"), "width sweeps need a lorentzian comb");
    }
    if c.violations.len() > before {
        return None;
    }

    let period = s.period_ns * 1e-9;
    let medium = match Medium::new(
        s.length_mm * 1e-3,
        s.gamma_rad_per_us.map_or(afc_core::DEFAULT_GAMMA, |g| g * 1e6),
    ) {
        Ok(m) => m,
        Err(e) => {
            c.fail(at("length_mm"), e.to_string());
            return None;
        }
    };
    let spp = s.time.samples_per_period.unwrap_or(64);
    let first_center = sig.first_center_ns * 1e-9;
    let grid = match TimeGrid::new(
        s.time.start_ns.map_or(first_center - 2.0 * period, |v| v * 1e-9),
        period / spp as f64,
        s.time.periods.unwrap_or(64) * spp,
    ) {
        Ok(g) => g,
        Err(e) => {
            c.fail(at("time"), e.to_string());
            return None;
        }
    };
    let train = PulseTrain {
        count: sig.count,
        spacing: sig.spacing_ns.map_or(period, |v| v * 1e-9),
        pulse_fwhm: sig.pulse_fwhm_ns * 1e-9,
        envelope: sig
            .envelope_fwhm_ns
            .map_or(TrainEnvelope::Flat, |v| TrainEnvelope::Gaussian { fwhm: v * 1e-9 }),
        first_center,
    };
    if let Err(e) = pulse_train(&train, grid) {
        c.fail(at("signal"), e.to_string());
        return None;
    }
    let last = train.pulse_times().last().copied().unwrap_or(first_center);
    if first_center < grid.t0 || last >= grid.t0 + grid.duration() {
        c.fail(at("time"), "the time window does not contain every pulse centre");
        return None;
    }

    let plan = Plan {
        name: s.name.clone(),
        kind: s.kind,
        period,
        medium,
        alignment: s.alignment.into(),
        n_max: s.n_max,
        truncation: if s.force_truncation {
            Truncation::Forced
        } else {
            Truncation::Checked {
                tolerance: s.truncation_tolerance,
            }
        },
        comb: comb?,
        train,
        grid,
        alpha_values,
        gamma_t_values,
    };
    check_series(c, &plan, i);
    (c.violations.len() == before).then_some(plan)
}

fn list(c: &mut Checker, path: String, values: &Option<Vec<f64>>, wanted: bool) -> Vec<f64> {
    match (values, wanted) {
        (Some(v), true) => {
            if v.is_empty() {
                c.fail(path.clone(), "needs at least one value");
            }
            for (k, x) in v.iter().enumerate() {
                c.positive(format!("{path}[{k}]"), *x);
            }
            v.clone()
        }
        (None, true) => {
            c.fail(path, "required for this scenario kind");
            Vec::new()
        }
        (Some(_), false) => {
            c.fail(path, "only used by another scenario kind");
            Vec::new()
        }
        (None, false) => Vec::new(),
    }
}

fn resolve_comb(c: &mut Checker, s: &ScenarioConfig, i: usize, base: &Path, swept_width: bool) -> Option<CombPlan> {
    let at = |field: &str| format!("scenario[{i}].comb.{field}");
    let length = s.length_mm * 1e-3;
    match &s.comb {
        CombConfig::Lorentzian {
            alpha_max_per_m,
            peak_optical_depth,
            gamma_t,
            optimal_width,
        } => {
            let alpha_max = match (alpha_max_per_m, peak_optical_depth) {
                (Some(a), None) => c.positive(at("alpha_max_per_m"), *a).then_some(*a),
                (None, Some(d)) => c.positive(at("peak_optical_depth"), *d).then_some(*d / length),
                _ => {
                    c.fail(at("alpha_max_per_m"), "give exactly one of alpha_max_per_m and peak_optical_depth");
                    None
                }
            };
            let width = match (gamma_t, optimal_width, swept_width) {
                (None, false, true) => Some(Width::Swept),
                (_, _, true) => {
                    c.fail(at("gamma_t"), "the width is swept; leave gamma_t and optimal_width unset");
                    None
                }
                (Some(g), false, false) => c.positive(at("gamma_t"), *g).then_some(Width::GammaT(*g)),
                (None, true, false) => Some(Width::Optimal),
                _ => {
                    c.fail(at("gamma_t"), "give exactly one of gamma_t and optimal_width = true");
                    None
                }
            };
            Some(CombPlan::Lorentzian {
                alpha_max: alpha_max?,
                width: width?,
            })
        }
        CombConfig::Square {
            alpha_background_per_m,
            beta_khz,
            mu,
            periods,
            samples_per_period,
        } => {
            let ok = c.positive(at("alpha_background_per_m"), *alpha_background_per_m)
                & c.positive(at("beta_khz"), *beta_khz)
                & c.finite(at("mu"), *mu);
            if *periods < 1 || *samples_per_period < 4 {
                c.fail(at("samples_per_period"), "need periods ≥ 1 and samples_per_period ≥ 4");
                return None;
            }
            ok.then_some(CombPlan::Square {
                alpha_background: *alpha_background_per_m,
                beta_hz: beta_khz * 1e3,
                mu: *mu,
                grid: CombGrid::new(*periods, *samples_per_period),
            })
        }
        CombConfig::Measured {
            file,
            periodic_extension,
        } => {
            let path = base.join(file);
            let samples = match read_spectrum(&path) {
                Ok(s) => s,
                Err(e) => {
                    c.fail(at("file"), format!("{}: {e}", path.display()));
                    return None;
                }
            };
            let medium = Medium::new(length.max(f64::MIN_POSITIVE), 0.0).ok()?;
            match MeasuredComb::from_samples(
                samples.grid,
                samples.alpha,
                s.period_ns * 1e-9,
                medium,
                s.alignment.into(),
                *periodic_extension,
            ) {
                Ok(m) => Some(CombPlan::Measured(Box::new(m))),
                Err(e) => {
                    c.fail(at("file"), e.to_string());
                    None
                }
            }
        }
    }
}

/// Builds every Fourier series the scenario will use and checks truncation.
fn check_series(c: &mut Checker, plan: &Plan, i: usize) {
    let at = format!("scenario[{i}].comb");
    let mut cases: Vec<(CombPlan, Option<f64>)> = Vec::new();
    match plan.kind {
        ScenarioKind::DelaySweep => cases.extend(plan.alpha_values.iter().map(|&a| (plan.with_peak(a), None))),
        ScenarioKind::EfficiencyWidth => {
            cases.extend(plan.gamma_t_values.iter().map(|&g| (plan.comb.clone(), Some(g))))
        }
        _ => cases.push((plan.comb.clone(), None)),
    }
    for (comb, gt) in cases {
        match plan.series(&comb, gt) {
            Ok(series) => {
                if let Truncation::Checked { tolerance } = plan.truncation {
                    let tail = truncation_tail(&series, plan.gamma(), plan.length());
                    if tail >= tolerance {
                        c.fail(
                            format!("scenario[{i}].n_max"),
                            format!(
                                "Fourier tail {tail:e} at order {} exceeds {tolerance:e}; raise n_max, widen the lines or set force_truncation",
                                series.n_max()
                            ),
                        );
                        return;
                    }
                }
            }
            Err(e) => {
                c.fail(at.clone(), e.to_string());
                return;
            }
        }
    }
}
