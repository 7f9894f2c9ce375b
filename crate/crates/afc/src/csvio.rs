//! CSV formats for spectra, waveforms, transfer functions and report tables.
//!
//! Floats are written in shortest round-trip scientific notation so that
//! identical results give byte-identical files.

use std::f64::consts::TAU;
use std::io::Read;
use std::path::Path;

use afc_core::response::TransferFunction;
use afc_core::signals::Waveform;
use afc_core::UniformGrid;

pub const SPECTRUM_HEADER: [&str; 2] = ["delta_hz", "alpha_per_m"];
pub const WAVEFORM_HEADER: [&str; 3] = ["t_s", "re_omega", "im_omega"];
pub const TRANSFER_HEADER: [&str; 3] = ["omega_rad_s", "re_H", "im_H"];
pub const REPORT_HEADER: [&str; 6] = [
    "avg_optical_depth",
    "eta_measured",
    "eta_analytic",
    "tg_measured_s",
    "tg_analytic_s",
    "transmitted_fraction",
];

/// Relative step deviation tolerated in a spectrum file's frequency column.
const GRID_TOLERANCE: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error("cannot read spectrum: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("{0}")]
    Shape(String),
}

/// A spectrum file's contents: angular detunings (rad/s) and absorption (1/m).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSamples {
    pub grid: UniformGrid,
    pub alpha: Vec<f64>,
}

pub fn format_float(x: f64) -> String {
    format!("{x:e}")
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumSamples, SpectrumError> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    parse_spectrum(&text)
}

pub fn parse_spectrum(text: &str) -> Result<SpectrumSamples, SpectrumError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut header_seen = false;
    let mut hz = Vec::new();
    let mut alpha = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| SpectrumError::Line {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| SpectrumError::Line { line, message };
        if !header_seen {
            if record.iter().collect::<Vec<_>>() != SPECTRUM_HEADER {
                return Err(fail(format!("expected header `{}`", SPECTRUM_HEADER.join(","))));
            }
            header_seen = true;
            continue;
        }
        if record.len() != 2 {
            return Err(fail(format!("expected 2 fields, found {}", record.len())));
        }
        let mut values = [0.0; 2];
        for (v, (field, name)) in values.iter_mut().zip(record.iter().zip(SPECTRUM_HEADER)) {
            *v = field
                .parse::<f64>()
                .map_err(|_| fail(format!("`{field}` is not a number in column {name}")))?;
            if !v.is_finite() {
                return Err(fail(format!("non-finite value in column {name}")));
            }
        }
        if let Some(&last) = hz.last() {
            if values[0] <= last {
                return Err(fail("delta_hz must increase strictly".into()));
            }
        }
        hz.push(values[0]);
        alpha.push(values[1]);
    }
    if !header_seen {
        return Err(SpectrumError::Shape("empty spectrum file".into()));
    }
    let omega: Vec<f64> = hz.iter().map(|f| TAU * f).collect();
    let grid = UniformGrid::from_points(&omega, GRID_TOLERANCE)
        .map_err(|e| SpectrumError::Shape(format!("frequency column: {e}")))?;
    Ok(SpectrumSamples { grid, alpha })
}

/// In-memory CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(format_float).collect());
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV from UTF-8 fields")
    }
}

pub fn spectrum_table(grid: &UniformGrid, alpha: &[f64]) -> Table {
    let mut t = Table::new(SPECTRUM_HEADER);
    for (omega, a) in grid.points().zip(alpha) {
        t.push_floats(&[omega / TAU, *a]);
    }
    t
}

pub fn waveform_table(w: &Waveform) -> Table {
    let mut t = Table::new(WAVEFORM_HEADER);
    for (i, v) in w.samples().iter().enumerate() {
        t.push_floats(&[w.time(i), v.re, v.im]);
    }
    t
}

pub fn transfer_table(h: &TransferFunction) -> Table {
    let mut t = Table::new(TRANSFER_HEADER);
    for (omega, v) in h.grid().points().zip(h.values()) {
        t.push_floats(&[omega, v.re, v.im]);
    }
    t
}
