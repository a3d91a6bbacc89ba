//! Discrete Fourier transforms on products of cyclic groups.
//!
//! Forward: `X[k] = Σ_j x[j] e^{-2πi jk/n}`. Inverse includes the `1/n`.
//! Multi-dimensional data is row-major with the last axis fastest.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

fn twiddle(n: usize, k: usize, inverse: bool) -> Complex64 {
    let ang = TAU * (k % n) as f64 / n as f64;
    let s = if inverse { 1.0 } else { -1.0 };
    Complex64::new(ang.cos(), s * ang.sin())
}

fn radix2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let w: Vec<Complex64> = (0..len / 2).map(|k| twiddle(len, k, inverse)).collect();
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w[k];
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

fn naive(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let w: Vec<Complex64> = (0..n).map(|k| twiddle(n, k, inverse)).collect();
    let out: Vec<Complex64> =
        (0..n).map(|k| buf.iter().enumerate().map(|(j, x)| x * w[(j * k) % n]).sum()).collect();
    buf.copy_from_slice(&out);
}

/// Unnormalised transform of one contiguous axis.
pub fn dft_1d(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, inverse);
    } else {
        naive(buf, inverse);
    }
}

fn transform(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    assert_eq!(total, data.len(), "data length must match the product of dims");
    let mut stride = 1;
    let mut line = Vec::new();
    for &n in dims.iter().rev() {
        if n > 1 {
            let block = n * stride;
            line.resize(n, Complex64::new(0.0, 0.0));
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + off + k * stride];
                    }
                    dft_1d(&mut line, inverse);
                    for (k, v) in line.iter().enumerate() {
                        data[base + off + k * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let s = 1.0 / total as f64;
        for x in data.iter_mut() {
            *x *= s;
        }
    }
}

pub fn forward(data: &mut [Complex64], dims: &[usize]) {
    transform(data, dims, false);
}

pub fn inverse(data: &mut [Complex64], dims: &[usize]) {
    transform(data, dims, true);
}

pub fn forward_copy(data: &[Complex64], dims: &[usize]) -> Vec<Complex64> {
    let mut v = data.to_vec();
    forward(&mut v, dims);
    v
}

pub fn inverse_copy(data: &[Complex64], dims: &[usize]) -> Vec<Complex64> {
    let mut v = data.to_vec();
    inverse(&mut v, dims);
    v
}

/// Zero-filled buffer for the given shape.
pub fn zeros(dims: &[usize]) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); dims.iter().product()]
}
