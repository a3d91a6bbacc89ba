//! Almost multiplicative inequalities for positive maps on matrix algebras.
//!
//! All norms use the normalised trace `τ = Tr / n`; every inequality here is
//! homogeneous in the trace weight, so the choice only fixes the reported
//! magnitudes.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::matkernel::{self, hermitian_eig, lp_of_values, polar_power, psd_power, psd_sqrt, schatten_norm, CMatrix, Exponent};
use crate::rng::Rng;
use crate::tol;

/// Constant in the `θ`-power perturbation bound for positive maps.
pub const COR13_CONSTANT: f64 = (3.0 + SQRT_2) / 2.0;
/// Constant for the odd (polar) version; twice [`COR13_CONSTANT`].
pub const COR14_CONSTANT: f64 = 3.0 + SQRT_2;

/// `x ↦ Σ K_i* x K_i`, or `Σ K_i* xᵀ K_i` when `transpose_twist` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    kraus: Vec<CMatrix>,
    transpose_twist: bool,
}

impl KrausMap {
    /// Checks `Σ K*K ⪯ 1` and `Σ KK* ⪯ 1` spectrally.
    pub fn new(kraus: Vec<CMatrix>, transpose_twist: bool) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| invalid("at least one Kraus operator is required"))?;
        let dim = first.rows();
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.rows().max(k.cols()) });
            }
        }
        let (unital, trace) = Self::sums(&kraus, dim);
        for s in [unital, trace] {
            let top = hermitian_eig(&s)?.values.last().copied().unwrap_or(0.0);
            if top > 1.0 + 1e-10 {
                return Err(invalid("Kraus operators are not subunital and trace-nonincreasing"));
            }
        }
        Ok(KrausMap { dim, kraus, transpose_twist })
    }

    fn sums(kraus: &[CMatrix], dim: usize) -> (CMatrix, CMatrix) {
        let mut a = CMatrix::zeros(dim, dim);
        let mut b = CMatrix::zeros(dim, dim);
        let one = Complex64::new(1.0, 0.0);
        for k in kraus {
            a.add_assign_scaled(&k.adjoint().mul(k), one);
            b.add_assign_scaled(&k.mul(&k.adjoint()), one);
        }
        (a.hermitian_part(), b.hermitian_part())
    }

    pub fn identity(dim: usize) -> Self {
        KrausMap { dim, kraus: alloc::vec![CMatrix::identity(dim)], transpose_twist: false }
    }

    /// `k` Gaussian Kraus operators scaled by `s^{-1/2}`, where `s` is the
    /// larger of `‖Σ K*K‖_∞` and `‖Σ KK*‖_∞`.
    pub fn random(rng: &mut Rng, n: usize, k: usize, twist: bool) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid("dimension and Kraus rank must be positive"));
        }
        let raw: Vec<CMatrix> = (0..k).map(|_| matkernel::random_matrix(rng, n, n)).collect();
        Self::normalized(raw, twist)
    }

    /// Rescales arbitrary operators so the map becomes admissible.
    pub fn normalized(raw: Vec<CMatrix>, twist: bool) -> Result<Self> {
        let dim = raw.first().map(|k| k.rows()).ok_or_else(|| invalid("at least one Kraus operator is required"))?;
        let (a, b) = Self::sums(&raw, dim);
        let s = matkernel::operator_norm(&a)?.max(matkernel::operator_norm(&b)?);
        if s == 0.0 {
            return Self::new(raw, twist);
        }
        let f = Complex64::new(1.0 / s.sqrt(), 0.0);
        Self::new(raw.iter().map(|k| k.scale(f)).collect(), twist)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_twisted(&self) -> bool {
        self.transpose_twist
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.rows() });
        }
        let src = if self.transpose_twist { x.transpose() } else { x.clone() };
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out.add_assign_scaled(&k.adjoint().mul(&src).mul(k), Complex64::new(1.0, 0.0));
        }
        Ok(out)
    }
}

/// Both sides of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl GapReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        GapReport { lhs, rhs, slack: rhs - lhs }
    }

    /// `lhs / rhs`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

fn weight(n: usize) -> f64 {
    1.0 / n as f64
}

fn norm(a: &CMatrix, p: Exponent) -> Result<f64> {
    schatten_norm(a, p, weight(a.rows()))
}

fn require_square(a: &CMatrix, n: usize) -> Result<()> {
    if a.rows() != n || a.cols() != n {
        Err(Error::DimensionMismatch { expected: n, found: a.rows() })
    } else {
        Ok(())
    }
}

/// Trapezoid approximation of `½∫_{-S}^{S} α^{-is}(αγ + γβ)β^{is} sech(πs) ds`.
/// Phases vanish on the kernels of `α` and `β`.
pub fn lemma11_quadrature(alpha: &CMatrix, beta: &CMatrix, gamma: &CMatrix, s_max: f64, h: f64) -> Result<CMatrix> {
    if !(h > 0.0) || !(s_max > 0.0) {
        return Err(invalid("quadrature range and step must be positive"));
    }
    let ea = hermitian_eig(alpha)?;
    let eb = hermitian_eig(beta)?;
    let (m, n) = (alpha.rows(), beta.rows());
    if gamma.rows() != m || gamma.cols() != n {
        return Err(Error::DimensionMismatch { expected: m * n, found: gamma.rows() * gamma.cols() });
    }
    let clip = |v: &[f64]| {
        let top = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        v.iter().map(|&x| if x > tol::PSD_CLIP * top.max(1.0) { x } else { 0.0 }).collect::<Vec<f64>>()
    };
    let a = clip(&ea.values);
    let b = clip(&eb.values);
    let g = ea.vectors.adjoint().mul(gamma).mul(&eb.vectors);
    let steps = (2.0 * s_max / h).round() as usize;
    let step = 2.0 * s_max / steps as f64;
    // Weights of the trapezoid rule for ½ sech(πs).
    let nodes: Vec<(f64, f64)> = (0..=steps)
        .map(|k| {
            let s = -s_max + k as f64 * step;
            let end = if k == 0 || k == steps { 0.5 } else { 1.0 };
            (s, 0.5 * end * step / (PI * s).cosh())
        })
        .collect();
    let mut out = CMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            if a[i] == 0.0 || b[j] == 0.0 {
                continue;
            }
            let log = (b[j] / a[i]).ln();
            let mut acc = Complex64::new(0.0, 0.0);
            for &(s, w) in &nodes {
                acc += Complex64::from_polar(w, s * log);
            }
            out[(i, j)] = acc * (a[i] + b[j]) * g[(i, j)];
        }
    }
    Ok(ea.vectors.mul(&out).mul(&eb.vectors.adjoint()))
}

/// `‖α^{1/2}γβ^{1/2}‖_p ≤ ½‖αγ + γβ‖_p`.
pub fn lemma11_mean_gap(alpha: &CMatrix, beta: &CMatrix, gamma: &CMatrix, p: Exponent) -> Result<GapReport> {
    let lhs = norm(&psd_sqrt(alpha)?.mul(gamma).mul(&psd_sqrt(beta)?), p)?;
    let rhs = 0.5 * norm(&alpha.mul(gamma).add(&gamma.mul(beta)), p)?;
    Ok(GapReport::new(lhs, rhs))
}

/// `‖α^{1/2}γα^{1/2}‖_p ≤ ‖αγ‖_p` for Hermitian `γ`.
pub fn lemma11_symmetric_gap(alpha: &CMatrix, gamma: &CMatrix, p: Exponent) -> Result<GapReport> {
    if !gamma.is_hermitian(tol::HERMITIAN) {
        return Err(Error::NotHermitian { deviation: gamma.hermitian_deviation() });
    }
    let r = psd_sqrt(alpha)?;
    let lhs = norm(&r.mul(gamma).mul(&r), p)?;
    let rhs = norm(&alpha.mul(gamma), p)?;
    Ok(GapReport::new(lhs, rhs))
}

/// `‖x^θ − y^θ‖_p ≤ ‖x − y‖_{θp}^θ`, restricted to `θp ≥ 1`.
pub fn powers_stormer_gap(x: &CMatrix, y: &CMatrix, theta: f64, p: Exponent) -> Result<GapReport> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(invalid("theta must lie in (0, 1]"));
    }
    let tp = p.scale(theta).map_err(|_| invalid("theta * p must be at least 1"))?;
    require_square(y, x.rows())?;
    let lhs = norm(&psd_power(x, theta)?.sub(&psd_power(y, theta)?), p)?;
    let rhs = norm(&x.sub(y), tp)?.powf(theta);
    Ok(GapReport::new(lhs, rhs))
}

/// `‖T(x) − T(√x)²‖_{2p} ≤ ½‖T(x²) − T(x)²‖_p^{1/2}`.
pub fn theorem_b_gap(t: &KrausMap, x: &CMatrix, p: Exponent) -> Result<GapReport> {
    require_square(x, t.dim)?;
    let tx = t.apply(x)?;
    let tr = t.apply(&psd_sqrt(x)?)?;
    let lhs = norm(&tx.sub(&tr.mul(&tr)), p.scale(2.0)?)?;
    let rhs = 0.5 * norm(&t.apply(&x.mul(x))?.sub(&tx.mul(&tx)), p)?.sqrt();
    Ok(GapReport::new(lhs, rhs))
}

/// `‖T(x²) − T(x)²‖₁ ≤ 2‖T(x) − x‖₂‖x‖₂`.
pub fn kadison_gap(t: &KrausMap, x: &CMatrix) -> Result<GapReport> {
    require_square(x, t.dim)?;
    let tx = t.apply(x)?;
    let lhs = norm(&t.apply(&x.mul(x))?.sub(&tx.mul(&tx)), Exponent::ONE)?;
    let rhs = 2.0 * norm(&tx.sub(x), Exponent::TWO)? * norm(x, Exponent::TWO)?;
    Ok(GapReport::new(lhs, rhs))
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(invalid("theta must lie in (0, 1]"))
    }
}

/// `‖T(x^θ) − x^θ‖_{2/θ} ≤ C‖T(x) − x‖₂^{θ/2}‖x‖₂^{θ/2}` with `C = (3+√2)/2`.
pub fn cor13_gap(t: &KrausMap, x: &CMatrix, theta: f64) -> Result<GapReport> {
    check_theta(theta)?;
    require_square(x, t.dim)?;
    let xt = psd_power(x, theta)?;
    let lhs = norm(&t.apply(&xt)?.sub(&xt), Exponent::Finite(2.0 / theta))?;
    let d = norm(&t.apply(x)?.sub(x), Exponent::TWO)?;
    let rhs = COR13_CONSTANT * (d * norm(x, Exponent::TWO)?).powf(theta / 2.0);
    Ok(GapReport::new(lhs, rhs))
}

/// `‖T(u|y|^θ) − u|y|^θ‖_{2/θ} ≤ C‖T(y) − y‖₂^{θ/4}‖y‖₂^{3θ/4}` with `C = 3+√2`.
pub fn cor14_gap(t: &KrausMap, y: &CMatrix, theta: f64) -> Result<GapReport> {
    check_theta(theta)?;
    require_square(y, t.dim)?;
    if !y.is_hermitian(tol::HERMITIAN) {
        return Err(Error::NotHermitian { deviation: y.hermitian_deviation() });
    }
    let yt = polar_power(y, theta)?;
    let lhs = norm(&t.apply(&yt)?.sub(&yt), Exponent::Finite(2.0 / theta))?;
    let d = norm(&t.apply(y)?.sub(y), Exponent::TWO)?;
    let rhs = COR14_CONSTANT * d.powf(theta / 4.0) * norm(y, Exponent::TWO)?.powf(3.0 * theta / 4.0);
    Ok(GapReport::new(lhs, rhs))
}

/// Outcome of the band-limited smoothing check on `ℤ_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyControl {
    /// `‖T_ζ g − g‖_p^p` with `g = f^{2/p}`.
    pub correction: f64,
    /// `C^p ‖T_ζ f − f‖₂ ‖f‖₂`.
    pub bound: f64,
    pub beta: f64,
}

fn centered(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Applies the triangle symbol `ζ_β(k) = (1 − |k|/2β)₊`, `β = α/(2ε)`, to
/// `g = f^{2/p}` for a nonnegative `f` on `ℤ_N` whose spectrum lies in `|k| < α`.
pub fn freq_support_control(f: &[f64], alpha: f64, eps: f64, p: f64) -> Result<FrequencyControl> {
    let n = f.len();
    if n == 0 || !(alpha > 0.0) || !(eps > 0.0) || !(p >= 2.0) {
        return Err(invalid("need nonempty f, positive bandwidth and epsilon, and p >= 2"));
    }
    if f.iter().any(|&v| !(v >= 0.0)) {
        return Err(invalid("f must be nonnegative"));
    }
    let beta = alpha / (2.0 * eps);
    let zeta: Vec<f64> = (0..n).map(|k| (1.0 - centered(k, n).abs() / (2.0 * beta)).max(0.0)).collect();
    let to_c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    let spec_f = fft::forward_copy(&to_c(f), &[n]);
    let top = spec_f.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    for (k, z) in spec_f.iter().enumerate() {
        if centered(k, n).abs() >= alpha && z.norm() > 1e-9 * top.max(f64::MIN_POSITIVE) {
            return Err(invalid("f has spectrum outside the band"));
        }
    }
    // T_ζ h − h for a real function h, returned as |values|.
    let defect = |h: &[f64]| {
        let mut s = fft::forward_copy(&to_c(h), &[n]);
        for (z, &w) in s.iter_mut().zip(&zeta) {
            *z *= w - 1.0;
        }
        fft::inverse_copy(&s, &[n]).iter().map(|z| z.norm()).collect::<Vec<f64>>()
    };
    let w = 1.0 / n as f64;
    let g: Vec<f64> = f.iter().map(|&v| v.powf(2.0 / p)).collect();
    let correction = lp_of_values(&defect(&g), Exponent::Finite(p), w).powf(p);
    let df = lp_of_values(&defect(f), Exponent::TWO, w);
    let bound = COR13_CONSTANT.powf(p) * df * lp_of_values(f, Exponent::TWO, w);
    Ok(FrequencyControl { correction, bound, beta })
}

fn superlevel_gap(xi: &[f64], etas: &[Vec<f64>], measure: &[f64], t: f64) -> (f64, f64) {
    let mass: f64 = xi.iter().zip(measure).filter(|(&v, _)| v > t).map(|(_, &m)| m).sum();
    let diff: f64 = etas
        .iter()
        .map(|eta| {
            xi.iter().zip(eta).zip(measure).filter(|((&a, &b), _)| (a > t) != (b > t)).map(|(_, &m)| m).sum::<f64>()
        })
        .sum();
    (diff, mass)
}

/// Finds `t > 0` with `Σ_ℓ ‖1_{ξ>t} − 1_{η_ℓ>t}‖₁ < ε‖1_{ξ>t}‖₁` for step
/// functions given by their values on cells of the given measures.
pub fn threshold_select(xi: &[f64], etas: &[Vec<f64>], measure: &[f64], eps: f64) -> Result<f64> {
    let n = xi.len();
    if measure.len() != n || etas.iter().any(|e| e.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: measure.len() });
    }
    if xi.iter().chain(etas.iter().flatten()).chain(measure).any(|&v| !(v >= 0.0)) {
        return Err(invalid("step functions and cell measures must be nonnegative"));
    }
    let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(measure).map(|((x, y), m)| (x - y).abs() * m).sum::<f64>();
    let zeros = alloc::vec![0.0; n];
    let lhs: f64 = etas.iter().map(|e| l1(xi, e)).sum();
    let rhs = eps * l1(xi, &zeros);
    if !(lhs < rhs) {
        return Err(Error::InvalidInput(alloc::format!(
            "need sum of L1 distances below eps * |xi|_1; ratio is {}",
            if rhs > 0.0 { lhs / rhs } else { f64::INFINITY }
        )));
    }
    let mut levels: Vec<f64> = xi.iter().chain(etas.iter().flatten()).copied().chain(core::iter::once(0.0)).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    for w in levels.windows(2) {
        let t = 0.5 * (w[0] + w[1]);
        let (diff, mass) = superlevel_gap(xi, etas, measure, t);
        if diff < eps * mass {
            return Ok(t);
        }
    }
    Err(invalid("no admissible threshold among the level midpoints"))
}

/// Checks the strict inequality at a given level.
pub fn threshold_holds(xi: &[f64], etas: &[Vec<f64>], measure: &[f64], eps: f64, t: f64) -> bool {
    let (diff, mass) = superlevel_gap(xi, etas, measure, t);
    t > 0.0 && diff < eps * mass
}
