use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid is not uniform or not strictly increasing at sample {index}")]
    NonUniformGrid { index: usize },

    #[error("negative absorption {value} at sample {index}")]
    NegativeAbsorption { index: usize, value: f64 },

    #[error("spectrum covers {covered_periods:.3} periods, {required} required")]
    InsufficientCoverage { covered_periods: f64, required: f64 },

    #[error("truncation order {n_max} exceeds the Nyquist order {nyquist} of the grid")]
    AboveNyquist { n_max: usize, nyquist: usize },

    #[error("coefficients are not Hermitian at order {order}")]
    NotHermitian { order: usize },

    #[error("Fourier tail {tail:e} at order {n_max} exceeds {tolerance:e}; raise n_max or force truncation")]
    TruncationTooShort { n_max: usize, tail: f64, tolerance: f64 },

    #[error("pole at ω = {omega} is not on the spectrum grid and γ = 0")]
    OffGridPole { omega: f64 },

    #[error("homogeneous width γ = {gamma} is below the grid step {step}")]
    UnresolvedLinewidth { gamma: f64, step: f64 },

    #[error("band mismatch: {overlap:.1}% of the requested band lies inside the response grid")]
    BandMismatch { overlap: f64 },

    #[error("grids are not commensurate: {0}")]
    NotCommensurate(String),

    #[error("zero energy in {0}")]
    ZeroEnergy(&'static str),

    #[error("echo windows overlap the input support ({fraction:e} of the input energy lies outside the order-0 window)")]
    InputSpansWindows { fraction: f64 },

    #[error("ambiguous correlation lag: peaks at {first} s and {second} s")]
    AmbiguousLag { first: f64, second: f64 },

    #[error("pulses overlap: spacing {spacing} s does not exceed pulse FWHM {fwhm} s")]
    OverlappingPulses { spacing: f64, fwhm: f64 },

    #[error("synthesized absorption dips to {min} (non-physical truncation)")]
    NegativeSynthesis { min: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, alloc::format!("must be positive and finite, got {value}")))
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, alloc::format!("must be non-negative and finite, got {value}")))
    }
}
