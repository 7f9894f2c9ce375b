//! File formats, scenario configs and the `afc` command-line runner.
//!
//! Every command validates its whole config, computes all results in memory
//! and only then writes files, so a failure leaves the output directory
//! untouched.

pub mod config;
pub mod csvio;
pub mod error;
pub mod pipeline;

use std::path::{Path, PathBuf};

use afc_core::spectra::MeasuredComb;
use rayon::prelude::*;

use crate::config::{CombPlan, Config, Plan};
use crate::csvio::{Table, REPORT_HEADER};
pub use crate::error::{CliError, Violation};
use crate::pipeline::{evaluate, propagate_comb};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "AFC_OUTPUT_DIR";

/// Files a command produced, or would produce.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub directory: PathBuf,
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl Outcome {
    /// Creates the directory and writes every file; returns their paths.
    pub fn write(&self) -> Result<Vec<PathBuf>, CliError> {
        if self.files.is_empty() {
            return Ok(Vec::new());
        }
        std::fs::create_dir_all(&self.directory).map_err(|source| CliError::Write {
            path: self.directory.clone(),
            source,
        })?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let path = self.directory.join(name);
                std::fs::write(&path, contents).map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })?;
                Ok(path)
            })
            .collect()
    }
}

struct Loaded {
    config: Config,
    table: toml::Table,
    base: PathBuf,
    plans: Vec<Plan>,
    warnings: Vec<String>,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let (config, table) = config::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let plans = config::resolve(&config, &base)?;
    let mut warnings = Vec::new();
    if plans.is_empty() {
        warnings.push("config lists no scenarios; nothing to do".to_string());
    }
    for p in &plans {
        if let CombPlan::Measured(m) = &p.comb {
            let MeasuredComb { clipped_samples, .. } = **m;
            if clipped_samples > 0 {
                warnings.push(format!(
                    "scenario `{}`: {clipped_samples} negative absorption samples clipped to 0",
                    p.name
                ));
            }
        }
    }
    Ok(Loaded {
        config,
        table,
        base,
        plans,
        warnings,
    })
}

fn output_directory(config: &Config, base: &Path, override_dir: Option<&Path>) -> PathBuf {
    match override_dir {
        Some(dir) => dir.to_path_buf(),
        None => base.join(&config.output.directory),
    }
}

/// Parses and checks a config without computing anything; returns the
/// number of scenarios and any warnings.
pub fn validate(config_path: &Path) -> Result<(usize, Vec<String>), CliError> {
    let l = load(config_path)?;
    Ok((l.plans.len(), l.warnings))
}

/// Runs every scenario of a config.
pub fn run(config_path: &Path, override_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let l = load(config_path)?;
    let results: Vec<_> = l.plans.par_iter().map(evaluate).collect();
    let mut outcome = Outcome {
        directory: output_directory(&l.config, &l.base, override_dir),
        warnings: l.warnings,
        ..Outcome::default()
    };
    let mut report = Table::new(std::iter::once("scenario").chain(REPORT_HEADER));
    for (plan, result) in l.plans.iter().zip(results) {
        let result = result?;
        for (name, table) in &result.tables {
            outcome.files.push((name.clone(), table.render()));
        }
        if let Some(row) = result.report {
            let mut cells = vec![plan.name.clone()];
            cells.extend(row.values().iter().map(|v| csvio::format_float(*v)));
            report.push(cells);
        }
        if l.config.output.gnuplot {
            outcome.files.push((format!("{}.gp", plan.name), gnuplot::scenario(plan)));
        }
    }
    if !report.rows().is_empty() {
        outcome.files.push(("report.csv".into(), report.render()));
    }
    Ok(outcome)
}

/// Re-runs every scenario with the numeric field `axis` (a dotted path
/// inside each scenario, such as `comb.gamma_t`) set to each of `values`,
/// giving one report row per value.
pub fn sweep(config_path: &Path, axis: &str, values: &[f64], override_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let l = load(config_path)?;
    let axis_error = |reason: String| CliError::Axis {
        axis: axis.to_string(),
        reason,
    };
    if values.is_empty() {
        return Err(axis_error("no values given".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(axis_error(format!("value {v} is not finite")));
    }
    if let Some(p) = l.plans.iter().find(|p| !p.kind.reports()) {
        return Err(axis_error(format!(
            "scenario `{}` is a table scenario; sweeps take single_pulse, pulse_train or slow_light",
            p.name
        )));
    }
    let mut variants = Vec::with_capacity(values.len());
    for &v in values {
        let mut table = l.table.clone();
        if let Some(toml::Value::Array(scenarios)) = table.get_mut("scenario") {
            for (i, s) in scenarios.iter_mut().enumerate() {
                let toml::Value::Table(s) = s else { continue };
                set_field(s, axis, v).map_err(|r| axis_error(format!("scenario[{i}]: {r}")))?;
            }
        }
        let plans = config::from_table(table)
            .and_then(|c| config::resolve(&c, &l.base))
            .map_err(|e| match e {
                CliError::Invalid(mut violations) => {
                    for x in &mut violations {
                        x.message = format!("{} (with {axis} = {v})", x.message);
                    }
                    CliError::Invalid(violations)
                }
                other => other,
            })?;
        variants.push(plans);
    }

    // collected in order so the reported failure does not depend on scheduling
    let results: Vec<Vec<_>> = variants
        .par_iter()
        .map(|plans| plans.par_iter().map(|p| propagate_comb(p, &p.comb, None)).collect())
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for per_value in results {
        let mut r = Vec::with_capacity(per_value.len());
        for (p, result) in l.plans.iter().zip(per_value) {
            r.push(
                result
                    .map_err(|source| CliError::Physics {
                        scenario: p.name.clone(),
                        source,
                    })?
                    .row,
            );
        }
        rows.push(r);
    }
    let mut outcome = Outcome {
        directory: output_directory(&l.config, &l.base, override_dir),
        warnings: l.warnings,
        ..Outcome::default()
    };
    for (k, plan) in l.plans.iter().enumerate() {
        let mut t = Table::new(std::iter::once(axis).chain(REPORT_HEADER));
        for (v, per_value) in values.iter().zip(&rows) {
            let mut row = vec![*v];
            row.extend(per_value[k].values());
            t.push_floats(&row);
        }
        outcome.files.push((format!("{}_sweep.csv", plan.name), t.render()));
        if l.config.output.gnuplot {
            outcome.files.push((format!("{}_sweep.gp", plan.name), gnuplot::sweep(&plan.name, axis)));
        }
    }
    Ok(outcome)
}

/// Sets the numeric field at dotted `path` inside `table`.
fn set_field(table: &mut toml::Table, path: &str, value: f64) -> Result<(), String> {
    let mut parts = path.split('.').peekable();
    let mut current = table;
    while let Some(key) = parts.next() {
        let slot = current.get_mut(key).ok_or_else(|| format!("no field `{path}`"))?;
        if parts.peek().is_none() {
            *slot = match slot {
                toml::Value::Float(_) => toml::Value::Float(value),
                toml::Value::Integer(_) if value.fract() == 0.0 && value.abs() < 9e15 => {
                    toml::Value::Integer(value as i64)
                }
                toml::Value::Integer(_) => return Err(format!("`{path}` takes integers, got {value}")),
                _ => return Err(format!("`{path}` is not numeric")),
            };
            return Ok(());
        }
        current = match slot {
            toml::Value::Table(t) => t,
            _ => return Err(format!("`{key}` in `{path}` is not a section")),
        };
    }
    Err(format!("no field `{path}`"))
}

mod gnuplot {
    use crate::config::{Plan, ScenarioKind};

    const PREAMBLE: &str = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";

    pub fn scenario(plan: &Plan) -> String {
        let n = &plan.name;
        let body = match plan.kind {
            ScenarioKind::SinglePulse | ScenarioKind::PulseTrain | ScenarioKind::SlowLight => format!(
                "set xlabel 'time (ns)'\nset ylabel 'intensity'\n\
                 plot '{n}_input.csv' using ($1*1e9):($2**2+$3**2) with lines title 'input', \\\n     \
                 '{n}_output.csv' using ($1*1e9):($2**2+$3**2) with lines title 'output'\n"
            ),
            ScenarioKind::DelaySweep => format!(
                "set xlabel 'average optical depth'\nset ylabel 'delay (ns)'\n\
                 plot '{n}.csv' using 2:($5*1e9) with linespoints title 'measured', \\\n     \
                 '' using 2:($6*1e9) with linespoints title 'analytic', \\\n     \
                 '' using 2:($8*1e9) with linespoints title 'cross-correlation'\n"
            ),
            ScenarioKind::EfficiencyWidth => format!(
                "set xlabel 'Gamma T'\nset ylabel 'efficiency'\n\
                 plot '{n}.csv' using 1:2 with lines title 'closed form', \\\n     \
                 '' using 1:4 with points title 'measured'\n"
            ),
        };
        format!("{PREAMBLE}{body}")
    }

    pub fn sweep(name: &str, axis: &str) -> String {
        format!(
            "{PREAMBLE}set xlabel '{axis}'\nset ylabel 'efficiency'\n\
             plot '{name}_sweep.csv' using 1:3 with linespoints title 'measured', \\\n     \
             '' using 1:4 with linespoints title 'analytic'\n"
        )
    }
}
