use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

/// One schema or physics problem in a config, located by field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("invalid config: {}", summary(.0))]
    Invalid(Vec<Violation>),
    #[error("sweep axis `{axis}`: {reason}")]
    Axis { axis: String, reason: String },
    #[error("scenario `{scenario}`: {source}")]
    Physics {
        scenario: String,
        source: afc_core::Error,
    },
}

fn summary(v: &[Violation]) -> String {
    v.iter()
        .map(|x| if x.path.is_empty() { x.message.clone() } else { format!("{}: {}", x.path, x.message) })
        .collect::<Vec<_>>()
        .join("; ")
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::Syntax(_) | CliError::Invalid(_) | CliError::Axis { .. } => "config",
            CliError::Physics { .. } => "physics",
        }
    }

    /// 2 for problems with the input files, 1 for failures while computing
    /// or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Physics { .. } | CliError::Write { .. } => 1,
            _ => 2,
        }
    }

    /// Machine-readable record printed on stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut record = json!({
            "kind": self.kind(),
            "message": self.to_string(),
        });
        match self {
            CliError::Invalid(v) => record["violations"] = json!(v),
            CliError::Physics { scenario, .. } => record["scenario"] = json!(scenario),
            CliError::Axis { axis, .. } => record["axis"] = json!(axis),
            CliError::Read { path, .. } | CliError::Write { path, .. } => record["path"] = json!(path),
            CliError::Syntax(_) => {}
        }
        json!({ "error": record })
    }
}
