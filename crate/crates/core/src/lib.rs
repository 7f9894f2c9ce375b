//! Weak-signal propagation through periodic spectrally structured absorbers.
//!
//! A comb of absorption lines with spacing `2π/T` acts on an incoming pulse
//! like a spectral grating: part of the pulse is transmitted, part is diffracted
//! into echoes at multiples of `T`, and inside the transparency windows the
//! medium is strongly dispersive (slow light). This crate computes those
//! quantities two ways: from closed-form Fourier-series expressions of the
//! absorption profile, and from brute-force spectral propagation of sampled
//! waveforms.
//!
//! Conventions used throughout:
//!
//! * all frequencies are angular (rad/s) and relative to the signal carrier;
//!   builders that take ordinary frequencies say so in the argument name;
//! * spectra use the `e^{-iωt}` forward transform, so a delay `τ` multiplies a
//!   spectrum by `e^{-iωτ}`;
//! * an atom detuned by `Δ` interacts with the field component at `ω = -Δ`,
//!   which is what puts the echoes at positive times. For the symmetric
//!   built-in combs the distinction is invisible.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod fft;
pub mod grid;
pub mod optimize;
pub mod propagation;
pub mod response;
pub mod signals;
pub mod spectra;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use grid::UniformGrid;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default homogeneous half-width γ, from a measured `2π/γ = 35 µs`.
pub const DEFAULT_GAMMA: f64 = core::f64::consts::TAU / 35e-6;
