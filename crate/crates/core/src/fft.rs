//! Discrete Fourier transforms of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; every other length
//! goes through Bluestein's chirp-z algorithm on a padded power-of-two buffer.
//! Both directions are unnormalized: `inverse(forward(x)) = n·x`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ x_n e^{-2πikn/N}`
    Forward,
    /// `x_n = Σ X_k e^{+2πikn/N}`
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

pub fn transform(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, direction);
    } else {
        bluestein(data, direction);
    }
}

pub fn forward(data: &mut [Complex64]) {
    transform(data, Direction::Forward);
}

pub fn inverse(data: &mut [Complex64]) {
    transform(data, Direction::Inverse);
}

fn twiddle(sign: f64, k: usize, n: usize) -> Complex64 {
    let angle = sign * 2.0 * PI * k as f64 / n as f64;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

fn radix2(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    // Twiddles for the largest stage; smaller stages stride through them.
    let sign = direction.sign();
    let table: Vec<Complex64> = (0..n / 2).map(|k| twiddle(sign, k, n)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for chunk in data.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let t = hi[k] * table[k * stride];
                hi[k] = lo[k] - t;
                lo[k] += t;
            }
        }
        len <<= 1;
    }
}

fn bluestein(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = direction.sign();
    // Chirp w_k = e^{sign·iπk²/n}; k² is reduced mod 2n to keep the angle small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let angle = sign * PI * k2 / n as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, Direction::Inverse);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * chirp[k] * scale;
    }
}
