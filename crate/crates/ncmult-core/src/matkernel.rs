//! Dense complex matrices and the spectral routines everything else is
//! built on: a cyclic Jacobi eigensolver for Hermitian matrices, a one-sided
//! Jacobi SVD, polar decomposition, fractional powers and Schatten norms.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Exponent of a Schatten or noncommutative `L_p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);
    pub const INF: Exponent = Exponent::Infinity;

    /// `p` must lie in `[1, inf]`; `f64::INFINITY` maps to [`Exponent::Infinity`].
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// Hölder conjugate.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn scale(self, t: f64) -> Result<Exponent> {
        match self {
            Exponent::Infinity => Ok(Exponent::Infinity),
            Exponent::Finite(p) => Exponent::new(p * t),
        }
    }
}

impl core::fmt::Display for Exponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Product for operands whose shapes are known to agree.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        self.matmul(other).expect("matrix shapes agree")
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn check_same_shape(&self, other: &CMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        Ok(())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.check_same_shape(other).expect("matrix shapes agree");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.check_same_shape(other).expect("matrix shapes agree");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add_assign_scaled(&mut self, other: &CMatrix, s: Complex64) {
        self.check_same_shape(other).expect("matrix shapes agree");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..=i {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * (1.0 + self.frobenius_norm())
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.adjoint()).scale_real(0.5)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// `V f(D) V*`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fv[k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn check_dense(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.rows > tol::MAX_DENSE_DIM {
        return Err(invalid("matrix dimension exceeds the dense solver limit"));
    }
    Ok(())
}

/// 2x2 unitary that diagonalises the Hermitian block `[[app, apq], [conj(apq), aqq]]`
/// when applied as `U* A U`. Returns `(c, s, e)` with `U = [[c, s], [-s e*, c e*]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let g = apq.norm();
    let e = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, e)
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    check_dense(a)?;
    let dev = a.hermitian_deviation();
    if dev > tol::HERMITIAN * (1.0 + a.frobenius_norm()) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total = m.frobenius_norm();
    let target = tol::JACOBI_OFFDIAG * total;
    let off = |m: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let max_sweeps = 100;
    let mut sweeps = 0;
    let mut residual = off(&m);
    while residual > target && total > 0.0 {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps, residual });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, e) = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, apq);
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -e.conj() * s;
                let uqq = e.conj() * c;
                // A <- A U
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = akp * upp + akq * uqp;
                    m[(k, q)] = akp * upq + akq * uqq;
                }
                // A <- U* A
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    m[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
        sweeps += 1;
        residual = off(&m);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// Thin singular value decomposition `A = U diag(s) V*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD. Small singular values are computed to
/// high relative accuracy, which keeps polar factors clean on rank-deficient input.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    if a.rows.max(a.cols) > tol::MAX_DENSE_DIM {
        return Err(invalid("matrix dimension exceeds the dense solver limit"));
    }
    if a.rows < a.cols {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = (a.rows, a.cols);
    // Column-major working copy of A.
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut c = vec![ZERO; n];
            c[j] = ONE;
            c
        })
        .collect();
    let eps = 1e-15;
    // Columns driven to roundoff level no longer carry information.
    let negligible = (1e-18 * a.frobenius_norm()).powi(2);
    let max_sweeps = 80;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                if gamma.norm() <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= negligible || gamma.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let (c, s, e) = jacobi_rotation(alpha, beta, gamma);
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -e.conj() * s;
                let uqq = e.conj() * c;
                for k in 0..m {
                    let (x, y) = (w[p][k], w[q][k]);
                    w[p][k] = x * upp + y * uqp;
                    w[q][k] = x * upq + y * uqq;
                }
                for k in 0..n {
                    let (x, y) = (v[p][k], v[q][k]);
                    v[p][k] = x * upp + y * uqp;
                    v[q][k] = x * upq + y * uqq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: max_sweeps, residual: f64::NAN });
    }
    let norms: Vec<f64> = w.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (col, &j) in order.iter().enumerate() {
        let sj = norms[j];
        s.push(sj);
        if sj > tol::RANK_CUTOFF * smax && sj > 0.0 {
            for k in 0..m {
                u[(k, col)] = w[j][k] / sj;
            }
        }
        for k in 0..n {
            vm[(k, col)] = v[j][k];
        }
    }
    Ok(Svd { u, s, v: vm })
}

pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// Polar decomposition `A = u |A|` with `u` a partial isometry whose initial
/// projection is the support of `|A|`.
pub fn polar(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    check_dense(a)?;
    let d = svd(a)?;
    let n = a.rows;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut u = CMatrix::zeros(n, n);
    let mut abs = CMatrix::zeros(n, n);
    for k in 0..n {
        let sk = d.s[k];
        let keep = sk > tol::RANK_CUTOFF * smax && sk > 0.0;
        for i in 0..n {
            for j in 0..n {
                let vv = d.v[(i, k)] * d.v[(j, k)].conj();
                abs[(i, j)] += vv * sk;
                if keep {
                    u[(i, j)] += d.u[(i, k)] * d.v[(j, k)].conj();
                }
            }
        }
    }
    Ok((u, abs))
}

/// `u |A|^t` built from one SVD; `t = 0` gives the partial isometry itself.
pub fn polar_power(a: &CMatrix, t: f64) -> Result<CMatrix> {
    check_dense(a)?;
    let d = svd(a)?;
    let n = a.rows;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let sk = d.s[k];
        if !(sk > tol::RANK_CUTOFF * smax && sk > 0.0) {
            continue;
        }
        let w = if t == 0.0 { 1.0 } else { sk.powf(t) };
        for i in 0..n {
            let a = d.u[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += a * d.v[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

fn psd_eig(a: &CMatrix) -> Result<HermitianEig> {
    let mut e = hermitian_eig(a)?;
    let scale = e.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let min = e.values.first().copied().unwrap_or(0.0);
    if min < -tol::PSD_CLIP * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    for x in e.values.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    Ok(e)
}

/// `A^theta` for positive semidefinite `A` and `theta > 0`.
pub fn psd_power(a: &CMatrix, theta: f64) -> Result<CMatrix> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidExponent(theta));
    }
    let e = psd_eig(a)?;
    Ok(e.reconstruct(|x| if x > 0.0 { x.powf(theta) } else { 0.0 }))
}

pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    psd_power(a, 0.5)
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let e = hermitian_eig(&a.hermitian_part())?;
    Ok(e.reconstruct(|x| x.max(0.0)))
}

/// `f(A)` for Hermitian `A`.
pub fn hermitian_apply(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    Ok(hermitian_eig(a)?.reconstruct(f))
}

/// `(Σ σ_i^p)^{1/p}` over the supplied singular values, scaled to avoid overflow.
pub fn lp_of_values(values: &[f64], p: Exponent, weight: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    match p {
        Exponent::Infinity => m,
        Exponent::Finite(p) => {
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = values.iter().map(|x| (x.abs() / m).powf(p)).sum();
            m * (weight * s).powf(1.0 / p)
        }
    }
}

/// Weighted Schatten norm `(weight * Σ σ_i^p)^{1/p}`; the weight is ignored at `p = inf`.
pub fn schatten_norm(a: &CMatrix, p: Exponent, weight: f64) -> Result<f64> {
    if !(weight > 0.0) {
        return Err(invalid("trace weight must be positive"));
    }
    if let Exponent::Finite(q) = p {
        if q == 2.0 {
            return Ok(weight.sqrt() * a.frobenius_norm());
        }
    }
    Ok(lp_of_values(&singular_values(a)?, p, weight))
}

pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut crate::rng::Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| crate::rng::complex_normal(rng))
}

pub fn random_hermitian(rng: &mut crate::rng::Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// `B B*` with `B` an `n × rank` Gaussian matrix.
pub fn random_psd(rng: &mut crate::rng::Rng, n: usize, rank: usize) -> CMatrix {
    let b = random_matrix(rng, n, rank);
    b.mul(&b.adjoint())
}

#[cfg(test)]
pub(crate) mod testutil {
    pub use super::{random_hermitian, random_matrix, random_psd};
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponent_conjugates() {
        assert_eq!(Exponent::ONE.conjugate(), Exponent::INF);
        assert_eq!(Exponent::INF.conjugate(), Exponent::ONE);
        assert_eq!(Exponent::Finite(4.0).conjugate(), Exponent::Finite(4.0 / 3.0));
        assert!(Exponent::new(0.5).is_err());
        assert_eq!(Exponent::new(f64::INFINITY).unwrap(), Exponent::INF);
    }

    #[test]
    fn eig_of_pauli_y() {
        let a = CMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = hermitian_eig(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct(|x| x).sub(&a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = CMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn schatten_examples() {
        let a = CMatrix::diag_real(&[3.0, 4.0]);
        assert!((schatten_norm(&a, Exponent::TWO, 1.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&a, Exponent::INF, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((schatten_norm(&a, Exponent::ONE, 0.5).unwrap() - 3.5).abs() < 1e-14);
        let z = CMatrix::zeros(3, 3);
        assert_eq!(schatten_norm(&z, Exponent::Finite(3.0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn polar_of_rank_deficient() {
        let mut rng = stream(11, 0);
        let b = random_matrix(&mut rng, 5, 2);
        let cmat = random_matrix(&mut rng, 2, 5);
        let a = b.mul(&cmat);
        let (u, abs) = polar(&a).unwrap();
        assert!(a.sub(&u.mul(&abs)).frobenius_norm() < 1e-10 * (1.0 + a.frobenius_norm()));
        let p = u.adjoint().mul(&u);
        let support = polar_power(&abs, 0.0).unwrap();
        assert!(p.sub(&support).frobenius_norm() < 1e-9);
        assert!((p.trace().re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn psd_power_rejects_negative() {
        let a = CMatrix::diag_real(&[1.0, -1e-3]);
        assert!(matches!(psd_power(&a, 0.5), Err(Error::NotPsd { .. })));
        let a = CMatrix::diag_real(&[1.0, -1e-13]);
        assert!(psd_power(&a, 0.5).is_ok());
    }

    #[test]
    fn psd_project_is_idempotent() {
        let mut rng = stream(3, 0);
        let h = random_hermitian(&mut rng, 6);
        let p = psd_project(&h).unwrap();
        assert!(psd_project(&p).unwrap().sub(&p).frobenius_norm() < 1e-12);
        assert!(hermitian_eig(&p).unwrap().values[0] > -1e-12);
    }

    fn seed_strategy() -> impl Strategy<Value = (u64, usize)> {
        (any::<u64>(), 1usize..9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_reconstructs((seed, n) in seed_strategy()) {
            let mut rng = stream(seed, 0);
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&a).unwrap();
            prop_assert!(e.reconstruct(|x| x).sub(&a).frobenius_norm() <= 1e-11 * (1.0 + a.frobenius_norm()));
            let v = &e.vectors;
            prop_assert!(v.adjoint().mul(v).sub(&CMatrix::identity(n)).frobenius_norm() < 1e-11);
        }

        #[test]
        fn polar_reconstructs((seed, n) in seed_strategy(), rank in 1usize..9) {
            let mut rng = stream(seed, 1);
            let a = random_matrix(&mut rng, n, rank.min(n)).mul(&random_matrix(&mut rng, rank.min(n), n));
            let (u, abs) = polar(&a).unwrap();
            prop_assert!(a.sub(&u.mul(&abs)).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
            let support = polar_power(&abs, 0.0).unwrap();
            prop_assert!(u.adjoint().mul(&u).sub(&support).frobenius_norm() <= 1e-9);
        }

        #[test]
        fn psd_power_composes((seed, n) in seed_strategy(), a_exp in 0.1f64..2.0, b_exp in 0.1f64..2.0) {
            let mut rng = stream(seed, 2);
            let a = random_psd(&mut rng, n, n);
            let lhs = psd_power(&psd_power(&a, a_exp).unwrap(), b_exp).unwrap();
            let rhs = psd_power(&a, a_exp * b_exp).unwrap();
            prop_assert!(lhs.sub(&rhs).frobenius_norm() <= 1e-8 * (1.0 + rhs.frobenius_norm()));
        }

        #[test]
        fn schatten_is_unitarily_invariant_and_monotone((seed, n) in seed_strategy(), p in 1.0f64..6.0) {
            let mut rng = stream(seed, 3);
            let a = random_matrix(&mut rng, n, n);
            let (u, _) = polar(&random_matrix(&mut rng, n, n)).unwrap();
            let p = Exponent::Finite(p);
            let na = schatten_norm(&a, p, 1.0).unwrap();
            let nu = schatten_norm(&u.mul(&a), p, 1.0).unwrap();
            prop_assert!((na - nu).abs() <= 1e-10 * (1.0 + na));
            let w = 1.0 / n as f64;
            let lower = schatten_norm(&a, p, w).unwrap();
            let higher = schatten_norm(&a, Exponent::Finite(p.value() + 1.0), w).unwrap();
            prop_assert!(lower <= higher * (1.0 + 1e-12));
        }
    }
}
