use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{positive, Error, Result};

/// Uniformly spaced, strictly increasing sample positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        positive("step", step)?;
        if !start.is_finite() {
            return Err(crate::error::invalid("start", "must be finite"));
        }
        if len == 0 {
            return Err(crate::error::invalid("len", "grid must not be empty"));
        }
        Ok(Self { start, step, len })
    }

    /// Closed grid `[-half_width, half_width]` with `2·half_count + 1` points.
    pub fn symmetric(step: f64, half_count: usize) -> Result<Self> {
        Self::new(-(half_count as f64) * step, step, 2 * half_count + 1)
    }

    /// Angular-frequency grid of an `n`-point DFT with sample interval `dt`,
    /// in increasing order: `ω_k = (k - ⌊n/2⌋)·2π/(n·dt)`.
    pub fn dft(n: usize, dt: f64) -> Result<Self> {
        positive("dt", dt)?;
        let step = TAU / (n as f64 * dt);
        Self::new(-((n / 2) as f64) * step, step, n)
    }

    /// Checks that `points` are uniformly spaced (relative tolerance `rel_tol`
    /// on each step) and strictly increasing.
    pub fn from_points(points: &[f64], rel_tol: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(crate::error::invalid("points", "need at least two samples"));
        }
        let step = (points[points.len() - 1] - points[0]) / (points.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::NonUniformGrid { index: 1 });
        }
        for (i, w) in points.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) || libm::fabs(d - step) > rel_tol * step {
                return Err(Error::NonUniformGrid { index: i + 1 });
            }
        }
        Self::new(points[0], step, points.len())
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Fractional index of `x`, unclamped.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.start) / self.step
    }

    /// Index of the node equal to `x` within `tol` steps, if any.
    pub fn node_index(&self, x: f64, tol: f64) -> Option<usize> {
        let p = self.position(x);
        let r = libm::round(p);
        if libm::fabs(p - r) <= tol && r >= 0.0 && (r as usize) < self.len {
            Some(r as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-9 * self.step;
        x >= self.start - tol && x <= self.end() + tol
    }

    /// Mirrored grid `{-x_k}`, still increasing.
    pub fn mirrored(&self) -> Self {
        Self {
            start: -self.end(),
            step: self.step,
            len: self.len,
        }
    }
}

/// Linear interpolation of `values` sampled on `grid`; `None` outside the grid.
pub(crate) fn interpolate(grid: &UniformGrid, values: &[f64], x: f64) -> Option<f64> {
    if !grid.contains(x) {
        return None;
    }
    let p = grid.position(x).clamp(0.0, (grid.len() - 1) as f64);
    let i = (libm::floor(p) as usize).min(grid.len().saturating_sub(2));
    if grid.len() == 1 {
        return Some(values[0]);
    }
    let f = p - i as f64;
    Some(values[i] * (1.0 - f) + values[i + 1] * f)
}
