//! One-dimensional maximization.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `x_tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Maximum> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid("bracket", "need finite lo < hi"));
    }
    if !(x_tol > 0.0) {
        return Err(invalid("x_tol", "must be positive"));
    }
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = 2;
    while b - a > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(Maximum { x, value, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let m = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 4.0, 1e-10).unwrap();
        // a flat top resolves x only to about √ε
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
        assert!(m.evaluations < 60);
    }

    #[test]
    fn maximum_at_edge() {
        let m = golden_section_max(|x| x, 0.0, 1.0, 1e-8).unwrap();
        assert!(m.x > 1.0 - 1e-7);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(golden_section_max(|x| x, 1.0, 1.0, 1e-3).is_err());
        assert!(golden_section_max(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
