//! Lattice approximation, restriction and periodization on desk surrogates.
//!
//! On the circle `𝕋 = ℝ/ℤ` an element of the group algebra is given by a
//! function `f̂` on `𝕋`; we store its Fourier coefficients `F(k)`. The algebra
//! product is convolution of the `f̂`, i.e. the pointwise product of the `F`,
//! and `‖f‖_p` is the `ℓ_p` norm of `F`. A multiplier `T_m` multiplies `f̂`
//! pointwise by `m`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::groups::{CosetStructure, FiniteGroup};
use crate::matkernel::{self, lp_of_values, Exponent};
use crate::rng::{self, complex_normal};
use crate::vna::{self, AlgebraElement, Budget, NormEstimate, Subgroup, Symbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `∫_{|θ|<w/2} e^{-2πikθ} dθ`.
fn arc_coeff(w: f64, k: i64) -> f64 {
    if k == 0 {
        w
    } else {
        let k = k as f64;
        (PI * k * w).sin() / (PI * k)
    }
}

/// Distance to the nearest integer.
fn circle_dist(theta: f64) -> f64 {
    let t = theta - theta.round();
    t.abs()
}

/// Symbols on `𝕋` with closed-form Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleSymbol {
    Constant(Complex64),
    /// `θ ↦ e^{2πiaθ}`.
    Character(i64),
    /// Triangle wave `1 − 4|θ|`, Lipschitz with constant 4.
    Sawtooth,
    /// Indicator of the half circle `|θ| < 1/4` with linear ramps of width `ramp`
    /// centred on the jumps.
    SmoothedIndicator { ramp: f64 },
    /// `(1 − |θ|/w)₊`, the overlap function of an arc of width `w`.
    Tent { half_width: f64 },
}

impl CircleSymbol {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CircleSymbol::SmoothedIndicator { ramp } if !(ramp > 0.0 && ramp <= 0.5) => Err(invalid("ramp must lie in (0, 1/2]")),
            CircleSymbol::Tent { half_width } if !(half_width > 0.0 && half_width <= 0.5) => {
                Err(invalid("tent half width must lie in (0, 1/2]"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let d = circle_dist(theta);
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            CircleSymbol::Constant(c) => c,
            CircleSymbol::Character(a) => Complex64::from_polar(1.0, 2.0 * PI * (a as f64) * (theta - theta.floor())),
            CircleSymbol::Sawtooth => re(1.0 - 4.0 * d),
            CircleSymbol::SmoothedIndicator { ramp } => {
                let a = 0.25 - ramp / 2.0;
                re(if d <= a { 1.0 } else { ((a + ramp - d) / ramp).max(0.0) })
            }
            CircleSymbol::Tent { half_width } => re((1.0 - d / half_width).max(0.0)),
        }
    }

    /// `m̂(k) = ∫ m(θ) e^{-2πikθ} dθ`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            CircleSymbol::Constant(c) => if k == 0 { c } else { ZERO },
            CircleSymbol::Character(a) => if k == a { re(1.0) } else { ZERO },
            CircleSymbol::Sawtooth => {
                if k % 2 == 0 {
                    ZERO
                } else {
                    re(4.0 / (PI * PI * (k * k) as f64))
                }
            }
            CircleSymbol::SmoothedIndicator { ramp } => re(arc_coeff(0.5, k) * arc_coeff(ramp, k) / ramp),
            CircleSymbol::Tent { half_width } => re(arc_coeff(half_width, k).powi(2) / half_width),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match *self {
            CircleSymbol::Constant(c) => c.norm(),
            _ => 1.0,
        }
    }
}

/// Element of the circle surrogate with coefficients on `[−K, K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleElement {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl CircleElement {
    pub fn new(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * cutoff + 1, found: coeffs.len() });
        }
        Ok(CircleElement { cutoff, coeffs })
    }

    pub fn zero(cutoff: usize) -> Self {
        CircleElement { cutoff, coeffs: vec![ZERO; 2 * cutoff + 1] }
    }

    pub fn from_fn(cutoff: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let k = cutoff as i64;
        CircleElement { cutoff, coeffs: (-k..=k).map(f).collect() }
    }

    pub fn random(cutoff: usize, rng: &mut rng::Rng) -> Self {
        CircleElement { cutoff, coeffs: (0..2 * cutoff + 1).map(|_| complex_normal(rng)).collect() }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `F(k)`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let c = self.cutoff as i64;
        if k.abs() > c {
            ZERO
        } else {
            self.coeffs[(k + c) as usize]
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        let abs: Vec<f64> = self.coeffs.iter().map(|z| z.norm()).collect();
        lp_of_values(&abs, p, 1.0)
    }

    /// Algebra product, truncated to the larger of the two cutoffs.
    pub fn product(&self, other: &CircleElement) -> CircleElement {
        let k = self.cutoff.max(other.cutoff);
        CircleElement::from_fn(k, |i| self.coeff(i) * other.coeff(i))
    }

    pub fn sub(&self, other: &CircleElement) -> CircleElement {
        let k = self.cutoff.max(other.cutoff);
        CircleElement::from_fn(k, |i| self.coeff(i) - other.coeff(i))
    }

    /// `f̂(θ) = Σ F(k) e^{2πikθ}`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let c = self.cutoff as i64;
        (-c..=c).map(|k| self.coeff(k) * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * theta)).sum()
    }

    /// `T_m f`, exact coefficients on `[−(K+extra), K+extra]`.
    pub fn multiply_symbol(&self, m: &CircleSymbol, extra: usize) -> CircleElement {
        let c = self.cutoff as i64;
        CircleElement::from_fn(self.cutoff + extra, |k| (-c..=c).map(|l| m.coeff(k - l) * self.coeff(l)).sum())
    }
}

/// Result of one lattice approximation level.
#[derive(Debug, Clone)]
pub struct LatticeStep {
    /// `S_j f` on `[−(K+guard), K+guard]`.
    pub s: CircleElement,
    /// `‖S_j f − T_m f‖₂` over the same range.
    pub defect: f64,
    /// The same difference on `K+guard < |k| ≤ 8(K+guard)`, which the defect omits.
    pub tail: f64,
}

const MAX_LEVEL: u32 = 24;

/// `S_j = L_j* P_j T_{m_j} L_j` for `Γ_j = ℤ_{2^j}` and fundamental arcs of width `2^{−j}`.
/// In coefficients `S_j f = μ^{−3} Σ_γ m(γ)⟨f̂, Δ_γ⟩ Δ_γ` with `Δ_γ = 1_X ∗ 1_{γ+X}`.
pub fn lattice_step(m: &CircleSymbol, f: &CircleElement, j: u32, guard: usize) -> Result<LatticeStep> {
    m.validate()?;
    if j > MAX_LEVEL {
        return Err(invalid("lattice level exceeds the supported range"));
    }
    let n = 1usize << j;
    let nf = n as f64;
    let mu = 1.0 / nf;
    let kk = f.cutoff as i64;
    // a_l = ⟨f̂, Δ_{l/n}⟩ = Σ_k F(k) c_k² e^{2πikl/n}.
    let mut bins = vec![ZERO; n];
    for k in -kk..=kk {
        bins[k.rem_euclid(n as i64) as usize] += f.coeff(k) * arc_coeff(mu, k).powi(2);
    }
    let mut a = fft::inverse_copy(&bins, &[n]);
    for (l, z) in a.iter_mut().enumerate() {
        *z *= nf * m.eval(l as f64 * mu);
    }
    let b = fft::forward_copy(&a, &[n]);
    let s_coeff = |k: i64| b[k.rem_euclid(n as i64) as usize] * (arc_coeff(mu, k).powi(2) * nf * nf * nf);
    let cut = f.cutoff + guard;
    let s = CircleElement::from_fn(cut, s_coeff);
    let tm = f.multiply_symbol(m, guard);
    let defect = s.sub(&tm).l2_norm();
    let c = cut as i64;
    let mut tail2 = 0.0;
    for k in (c + 1)..=(8 * c) {
        for kk2 in [k, -k] {
            let exact: Complex64 = (-kk..=kk).map(|l| m.coeff(kk2 - l) * f.coeff(l)).sum();
            tail2 += (s_coeff(kk2) - exact).norm_sqr();
        }
    }
    Ok(LatticeStep { s, defect, tail: tail2.sqrt() })
}

/// `m` sampled on `ℤ_n ⊂ 𝕋`.
pub fn lattice_symbol(m: &CircleSymbol, n: usize) -> Result<Symbol> {
    let g = Arc::new(FiniteGroup::cyclic(n)?);
    Ok(Symbol::from_fn(g, |l| m.eval(l as f64 / n as f64)))
}

fn sequence_dual(x: &[Complex64], p: Exponent) -> Option<Vec<Complex64>> {
    let abs: Vec<f64> = x.iter().map(|z| z.norm()).collect();
    let norm = lp_of_values(&abs, p, 1.0);
    if norm == 0.0 {
        return None;
    }
    let phase = |z: &Complex64, a: f64| if a > 0.0 { z / a } else { ZERO };
    Some(match p {
        Exponent::Finite(q) if q == 1.0 => x.iter().zip(&abs).map(|(z, &a)| phase(z, a)).collect(),
        Exponent::Finite(q) => x.iter().zip(&abs).map(|(z, &a)| phase(z, a) * (a / norm).powf(q - 1.0)).collect(),
        Exponent::Infinity => {
            let cut = norm * (1.0 - 1e-9);
            let count = abs.iter().filter(|&&a| a >= cut).count() as f64;
            x.iter().zip(&abs).map(|(z, &a)| if a >= cut { phase(z, a) / count } else { ZERO }).collect()
        }
    })
}

/// Lower bound for `‖T_m‖` on `L_p` of the circle surrogate, from inputs and
/// outputs restricted to `[−K, K]`: the Toeplitz matrix `m̂(k − l)`.
pub fn circle_multiplier_estimate(m: &CircleSymbol, p: Exponent, cutoff: usize, budget: &Budget) -> Result<NormEstimate<CircleElement>> {
    m.validate()?;
    if budget.restarts == 0 || budget.iterations == 0 {
        return Err(Error::ZeroBudget);
    }
    let c = cutoff as i64;
    let size = 2 * cutoff + 1;
    let table: Vec<Complex64> = (-2 * c..=2 * c).map(|d| m.coeff(d)).collect();
    let at = |d: i64| table[(d + 2 * c) as usize];
    let apply = |x: &Vec<Complex64>| -> Result<Vec<Complex64>> {
        Ok((0..size).map(|k| (0..size).map(|l| at(k as i64 - l as i64) * x[l]).sum()).collect())
    };
    let adj = |x: &Vec<Complex64>| -> Result<Vec<Complex64>> {
        Ok((0..size).map(|k| (0..size).map(|l| at(l as i64 - k as i64).conj() * x[l]).sum()).collect())
    };
    let norm = |x: &Vec<Complex64>, q: Exponent| -> Result<f64> {
        Ok(lp_of_values(&x.iter().map(|z| z.norm()).collect::<Vec<_>>(), q, 1.0))
    };
    let dual = |x: &Vec<Complex64>, q: Exponent| -> Result<Option<Vec<Complex64>>> { Ok(sequence_dual(x, q)) };
    let scale = |x: &Vec<Complex64>, s: f64| x.iter().map(|z| z * s).collect::<Vec<_>>();
    let asc = vna::Ascent { apply: &apply, apply_adjoint: &adj, norm: &norm, dual: &dual, scale: &scale };
    let mut results = Vec::new();
    let mut delta = vec![ZERO; size];
    delta[cutoff] = Complex64::new(1.0, 0.0);
    let starts = core::iter::once(delta).chain((1..=budget.restarts).map(|r| {
        let mut g = rng::stream(budget.seed, r as u64);
        (0..size).map(|_| complex_normal(&mut g)).collect::<Vec<_>>()
    }));
    for start in starts {
        let (v, w, conv) = asc.run(start, p, budget.iterations, budget.tol)?;
        results.push(NormEstimate { lower_bound: v, witness: CircleElement { cutoff, coeffs: w }, converged: conv });
    }
    Ok(vna::reduce_best(&results).expect("nonempty"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeNormTable {
    /// `(j, estimate of ‖T_{m|Γ_j}‖)`.
    pub levels: Vec<(u32, f64)>,
    pub circle: f64,
}

impl LatticeNormTable {
    pub fn lattice_sup(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, &(_, v)| m.max(v))
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.circle <= self.lattice_sup() * (1.0 + tol)
    }
}

/// Compares a circle estimate with multiplier estimates on `ℤ_{2^j}`.
pub fn lattice_norm_bound_check(m: &CircleSymbol, p: Exponent, levels: &[u32], cutoff: usize, budget: &Budget) -> Result<LatticeNormTable> {
    let mut out = Vec::with_capacity(levels.len());
    for &j in levels {
        if j > 12 {
            return Err(invalid("lattice level too large for the dense estimator"));
        }
        let sym = lattice_symbol(m, 1 << j)?;
        out.push((j, vna::multiplier_norm_estimate(&sym, p, budget)?.lower_bound));
    }
    let circle = circle_multiplier_estimate(m, p, cutoff, budget)?.lower_bound;
    Ok(LatticeNormTable { levels: out, circle })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionReport {
    /// `|‖Φ² f‖₂ − ‖f‖₂|`.
    pub isometry_residual: f64,
    /// `‖k f* h − k h f*‖₂`.
    pub claim_a_gap: f64,
    /// `‖Φ^q(T_{m|Γ} f) − T_m(Φ^q f)‖_q`.
    pub claim_b_defect: f64,
}

fn check_symmetric(group: &FiniteGroup, window: &[usize]) -> Result<()> {
    for &v in window {
        if !window.contains(&group.inv(v)) {
            return Err(invalid("window must be symmetric"));
        }
    }
    Ok(())
}

/// Restriction maps on a finite group with `h = |V|^{−1/2} λ(1_V)` and
/// `Φ^q(λ(γ)) = λ(γ) u|h|^{2/q}`.
pub fn restriction_defect_finite(
    sub: &Subgroup,
    window: &[usize],
    m: &Symbol,
    q: Exponent,
    f: &AlgebraElement,
    k: &AlgebraElement,
) -> Result<RestrictionReport> {
    let g = sub.parent.clone();
    let mut w: Vec<usize> = window.to_vec();
    w.sort_unstable();
    w.dedup();
    if w.is_empty() || w.iter().any(|&x| x >= g.order()) {
        return Err(invalid("window must be a nonempty set of group elements"));
    }
    check_symmetric(&g, &w)?;
    let mut owner = vec![usize::MAX; g.order()];
    for &gamma in &sub.elements {
        for &v in &w {
            let x = g.mul(gamma, v);
            if owner[x] != usize::MAX {
                return Err(Error::OverlappingTranslates { a: owner[x], b: gamma });
            }
            owner[x] = gamma;
        }
    }
    let mut h = AlgebraElement::zero(g.clone());
    let amp = Complex64::new(1.0 / (w.len() as f64).sqrt(), 0.0);
    for &v in &w {
        h.coeffs_mut()[v] = amp;
    }
    let lh = vna::regular_rep(&h);
    let phi = |t: f64, x: &AlgebraElement| -> Result<AlgebraElement> {
        let weight = AlgebraElement::from_regular_matrix(g.clone(), &matkernel::polar_power(&lh, t)?);
        vna::convolve(&sub.include(x)?, &weight)
    };
    let iso = (phi(1.0, f)?.l2_norm() - f.l2_norm()).abs();
    let kf = vna::convolve(&sub.include(k)?, &sub.include(f)?.adjoint())?;
    let left = vna::convolve(&kf, &h)?;
    let right = vna::convolve(&vna::convolve(&sub.include(k)?, &h)?, &sub.include(f)?.adjoint())?;
    let claim_a = left.sub(&right)?.l2_norm();
    let t = match q {
        Exponent::Infinity => 0.0,
        Exponent::Finite(v) => 2.0 / v,
    };
    let restricted = m.restrict(sub)?;
    let lhs = phi(t, &vna::fourier_multiplier(&restricted, f)?)?;
    let rhs = vna::fourier_multiplier(m, &phi(t, f)?)?;
    let claim_b = vna::lp_norm(&lhs.sub(&rhs)?, q)?;
    Ok(RestrictionReport { isometry_residual: iso, claim_a_gap: claim_a, claim_b_defect: claim_b })
}

/// Circle version: `Γ = ℤ_n ⊂ 𝕋`, `V_j` the arc of width `2^{−j}`, coefficients
/// truncated to `|k| ≤ cutoff`. `f` holds the coefficients `f̂(l/n)`.
pub fn restriction_defect_circle(n: usize, j: u32, m: &CircleSymbol, q: Exponent, f: &[Complex64], cutoff: usize) -> Result<RestrictionReport> {
    m.validate()?;
    if f.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    if j > MAX_LEVEL || (1u64 << j) <= 2 * n as u64 {
        return Err(Error::OverlappingTranslates { a: 0, b: 1 });
    }
    let mu = 1.0 / (1u64 << j) as f64;
    let c = cutoff as i64;
    let weight = |t: f64, k: i64| {
        let ck = arc_coeff(mu, k);
        if ck == 0.0 {
            0.0
        } else {
            ck.signum() * (ck.abs() / mu.sqrt()).powf(t)
        }
    };
    // F(k) = Σ_l f̂(l) e^{−2πikl/n}, periodic in k.
    let spectrum = |vals: &[Complex64]| fft::forward_copy(vals, &[n]);
    let phi = |t: f64, vals: &[Complex64]| -> Vec<Complex64> {
        let s = spectrum(vals);
        (-c..=c).map(|k| s[k.rem_euclid(n as i64) as usize] * weight(t, k)).collect()
    };
    let l2 = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let iso = (l2(&phi(1.0, f)) - l2(f)).abs();
    let t = match q {
        Exponent::Infinity => 0.0,
        Exponent::Finite(v) => 2.0 / v,
    };
    let restricted: Vec<Complex64> = f.iter().enumerate().map(|(l, z)| z * m.eval(l as f64 / n as f64)).collect();
    let lhs = phi(t, &restricted);
    let g = phi(t, f);
    // T_m on the coefficient side: synthesize on a fine grid, multiply, analyse.
    let size = (8 * (2 * cutoff + 1)).next_power_of_two();
    let mut grid = vec![ZERO; size];
    for k in -c..=c {
        grid[k.rem_euclid(size as i64) as usize] = g[(k + c) as usize];
    }
    let mut vals = fft::inverse_copy(&grid, &[size]);
    for (x, z) in vals.iter_mut().enumerate() {
        *z *= m.eval(x as f64 / size as f64);
    }
    let back = fft::forward_copy(&vals, &[size]);
    let diff: Vec<f64> = (-c..=c).map(|k| (lhs[(k + c) as usize] - back[k.rem_euclid(size as i64) as usize]).norm()).collect();
    Ok(RestrictionReport { isometry_residual: iso, claim_a_gap: 0.0, claim_b_defect: lp_of_values(&diff, q, 1.0) })
}

/// `ζ(g) = |W ∩ gW| / |W|` for a symmetric window in a finite group.
pub fn coefficient_symbol(group: &Arc<FiniteGroup>, window: &[usize]) -> Result<Symbol> {
    let mut w: Vec<usize> = window.to_vec();
    w.sort_unstable();
    w.dedup();
    if w.is_empty() || w.iter().any(|&x| x >= group.order()) {
        return Err(invalid("window must be a nonempty set of group elements"));
    }
    check_symmetric(group, &w)?;
    let mut member = vec![false; group.order()];
    for &x in &w {
        member[x] = true;
    }
    let size = w.len() as f64;
    Ok(Symbol::from_fn(group.clone(), |g| {
        let hits = w.iter().filter(|&&x| member[group.mul(g, x)]).count();
        Complex64::new(hits as f64 / size, 0.0)
    }))
}

/// Overlap function of an arc of width `w` on the circle.
pub fn coefficient_symbol_arc(width: f64) -> Result<CircleSymbol> {
    let s = CircleSymbol::Tent { half_width: width };
    s.validate()?;
    Ok(s)
}

/// A point `num/den` of `𝕋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalPoint {
    pub num: u64,
    pub den: u64,
}

impl RationalPoint {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(invalid("denominator must be positive"));
        }
        Ok(RationalPoint { num: num % den, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Circular distance as a fraction `(numerator, denominator)`.
fn rational_dist(a: RationalPoint, b: RationalPoint) -> (u128, u128) {
    let den = a.den as u128 * b.den as u128;
    let x = (a.num as u128 * b.den as u128 + den - b.num as u128 * a.den as u128) % den;
    (x.min(den - x), den)
}

/// `|‖(Σ a_g λ(g))h‖₂² − Σ|a_g|²|` for `h = μ(V)^{−1/2} λ(1_V)`, `V` the arc of
/// width `num/den`. Disjointness of the translates is decided exactly.
pub fn window_isometry_check(points: &[RationalPoint], width: RationalPoint, a: &[Complex64]) -> Result<f64> {
    if points.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: a.len() });
    }
    if width.num == 0 {
        return Err(invalid("window width must be positive"));
    }
    for i in 0..points.len() {
        for k in i + 1..points.len() {
            let (dn, dd) = rational_dist(points[i], points[k]);
            if dn * (width.den as u128) < (width.num as u128) * dd {
                return Err(Error::OverlappingTranslates { a: i, b: k });
            }
        }
    }
    // ‖·‖² = μ^{−1} Σ a_g conj(a_g') |(g+V) ∩ (g'+V)|, overlaps in exact arithmetic.
    let mut total = ZERO;
    for (i, p) in points.iter().enumerate() {
        for (k, r) in points.iter().enumerate() {
            let (dn, dd) = rational_dist(*p, *r);
            let wn = width.num as u128 * dd;
            let gap = dn * width.den as u128;
            let overlap = if wn > gap { (wn - gap) as f64 / wn as f64 } else { 0.0 };
            total += a[i] * a[k].conj() * overlap;
        }
    }
    let plain: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    Ok((total.re - plain).abs())
}

/// `m_π(g) = m_q(gH)`.
pub fn periodize_symbol(cs: &CosetStructure, m_q: &Symbol) -> Result<Symbol> {
    let quotient = cs.quotient.as_ref().ok_or(Error::NotNormal { witness: 0 })?;
    if m_q.group().order() != quotient.order() {
        return Err(Error::GroupMismatch);
    }
    Ok(Symbol::from_fn(cs.group.clone(), |g| m_q.values()[cs.coset_of[g]]))
}

/// `π : 𝓛(G/H) → Π𝓛G`, `λ(gH) ↦ λ(g)Π`; coefficients `f̂(gH)/|H|`.
pub fn lift(cs: &CosetStructure, f: &AlgebraElement) -> Result<AlgebraElement> {
    let quotient = cs.quotient.as_ref().ok_or(Error::NotNormal { witness: 0 })?;
    if f.group().order() != quotient.order() {
        return Err(Error::GroupMismatch);
    }
    let h = cs.subgroup.len() as f64;
    let coeffs = (0..cs.group.order()).map(|g| f.coeffs()[cs.coset_of[g]] / h).collect();
    AlgebraElement::new(cs.group.clone(), coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodizationReport {
    /// `max(‖Π² − Π‖, ‖Π − Π*‖)`, entrywise.
    pub projection_residual: f64,
    /// `max_g ‖Πλ(g) − λ(g)Π‖`, entrywise.
    pub central_residual: f64,
    /// `max` over `λ(gH)` of `‖π(T_{m_q} λ(gH)) − T_{m_π} π(λ(gH))‖₂`.
    pub intertwine_residual: f64,
    pub quotient_estimate: f64,
    pub lifted_estimate: f64,
}

/// The lifted estimate is seeded with the image of the quotient witness, so
/// it is never below the quotient estimate.
pub fn periodization_check(cs: &CosetStructure, m_q: &Symbol, p: Exponent, budget: &Budget) -> Result<PeriodizationReport> {
    let quotient = cs.quotient.clone().ok_or(Error::NotNormal { witness: 0 })?;
    let g = cs.group.clone();
    let n = g.order();
    let mut pi_elem = AlgebraElement::zero(g.clone());
    for &h in &cs.subgroup {
        pi_elem.coeffs_mut()[h] = Complex64::new(1.0 / cs.subgroup.len() as f64, 0.0);
    }
    let big_pi = vna::regular_rep(&pi_elem);
    let mut proj = big_pi.mul(&big_pi).sub(&big_pi).max_abs();
    proj = proj.max(big_pi.sub(&big_pi.adjoint()).max_abs());
    let mut central: f64 = 0.0;
    for x in 0..n {
        let l = vna::regular_rep(&AlgebraElement::delta(g.clone(), x));
        central = central.max(big_pi.mul(&l).sub(&l.mul(&big_pi)).max_abs());
    }
    let m_pi = periodize_symbol(cs, m_q)?;
    let mut inter: f64 = 0.0;
    for c in 0..quotient.order() {
        let e = AlgebraElement::delta(quotient.clone(), c);
        let lhs = lift(cs, &vna::fourier_multiplier(m_q, &e)?)?;
        let rhs = vna::fourier_multiplier(&m_pi, &lift(cs, &e)?)?;
        inter = inter.max(lhs.sub(&rhs)?.l2_norm());
    }
    let q_est = vna::multiplier_norm_estimate(m_q, p, budget)?;
    let seed = lift(cs, &q_est.witness)?;
    let l_est = vna::multiplier_norm_estimate_seeded(&m_pi, p, budget, &[seed])?;
    Ok(PeriodizationReport {
        projection_residual: proj,
        central_residual: central,
        intertwine_residual: inter,
        quotient_estimate: q_est.lower_bound,
        lifted_estimate: l_est.lower_bound,
    })
}

/// Piecewise-linear extension of a symbol on `ℤ_n ⊂ 𝕋`: `m̃ = n Σ_γ m(γ) Δ(· − γ)`
/// with `Δ = 1_X ∗ 1_X` and `X` the arc of width `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JodeitExtension {
    values: Vec<Complex64>,
}

pub fn jodeit_extend(m: &Symbol) -> Result<JodeitExtension> {
    if m.group().abelian_moduli().map_or(true, |d| d.len() != 1) {
        return Err(invalid("Jodeit extension needs a symbol on a cyclic group"));
    }
    Ok(JodeitExtension { values: m.values().to_vec() })
}

impl JodeitExtension {
    pub fn eval(&self, theta: f64) -> Complex64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let nf = n as f64;
        let x = (theta - theta.floor()) * nf;
        let lo = x.floor() as usize;
        let mut acc = ZERO;
        for gamma in [lo, lo + 1] {
            // n · Δ(θ − γ/n) = (1 − n·dist)₊.
            let d = circle_dist(theta - gamma as f64 / nf);
            acc += self.values[gamma % n] * (1.0 - nf * d).max(0.0);
        }
        acc
    }

    pub fn sample(&self, grid: usize) -> Vec<Complex64> {
        (0..grid).map(|i| self.eval(i as f64 / grid as f64)).collect()
    }
}

/// Action of `ℤ` on a finite set of equal-measure cells by powers of a permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAction {
    perm: Vec<usize>,
    cycle_id: Vec<usize>,
    cycle_pos: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl CellAction {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(invalid("cell action must be a permutation"));
            }
            seen[p] = true;
        }
        let mut cycle_id = vec![usize::MAX; n];
        let mut cycle_pos = vec![0; n];
        let mut cycles = Vec::new();
        for s in 0..n {
            if cycle_id[s] != usize::MAX {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = s;
            while cycle_id[x] == usize::MAX {
                cycle_id[x] = cycles.len();
                cycle_pos[x] = cyc.len();
                cyc.push(x);
                x = perm[x];
            }
            cycles.push(cyc);
        }
        Ok(CellAction { perm, cycle_id, cycle_pos, cycles })
    }

    pub fn trivial(cells: usize) -> Self {
        Self::new((0..cells).collect()).expect("identity permutation")
    }

    pub fn cells(&self) -> usize {
        self.perm.len()
    }

    /// `σ^g(c)` for any integer `g`.
    pub fn act(&self, g: i64, c: usize) -> usize {
        let cyc = &self.cycles[self.cycle_id[c]];
        cyc[(self.cycle_pos[c] as i64 + g).rem_euclid(cyc.len() as i64) as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SainWitness {
    /// Size `N` of the Følner interval `U = {0, …, N−1}`.
    pub folner_size: usize,
    pub window: Vec<usize>,
    pub xi: Vec<f64>,
    pub level: f64,
    pub v: Vec<usize>,
    /// `Σ_{γ∈F} μ(σ^γ V Δ V) / μ(V)`.
    pub sain_sum: f64,
}

/// Averages the window over a Følner interval and thresholds the result into a
/// set `V` that is almost invariant under every `γ ∈ F`. The window is the set
/// of cells within cyclic distance `radius` of cell 0.
pub fn folner_sain_witness(f: &[i64], j: usize, action: &CellAction, radius: usize) -> Result<SainWitness> {
    if j == 0 {
        return Err(invalid("j must be positive"));
    }
    let cells = action.cells();
    if cells == 0 {
        return Err(invalid("cell action must act on at least one cell"));
    }
    let max_f = f.iter().map(|g| g.unsigned_abs() as usize).max().unwrap_or(0);
    let n = 2 * j * f.len() * max_f + 1;
    let window: Vec<usize> = (0..cells).filter(|&c| c.min(cells - c) <= radius).collect();
    let cell_mu = 1.0 / cells as f64;
    let w_mu = window.len() as f64 * cell_mu;
    let mut xi = vec![0.0; cells];
    for g in 0..n as i64 {
        for &c in &window {
            xi[action.act(g, c)] += 1.0 / (n as f64 * w_mu);
        }
    }
    let etas: Vec<Vec<f64>> = f.iter().map(|&gamma| (0..cells).map(|c| xi[action.act(-gamma, c)]).collect()).collect();
    let measure = vec![cell_mu; cells];
    let level = crate::almostmult::threshold_select(&xi, &etas, &measure, 1.0 / j as f64)?;
    let v: Vec<usize> = (0..cells).filter(|&c| xi[c] > level).collect();
    let mut inside = vec![false; cells];
    for &c in &v {
        inside[c] = true;
    }
    let mut sum = 0.0;
    for &gamma in f {
        let mut moved = vec![false; cells];
        for &c in &v {
            moved[action.act(gamma, c)] = true;
        }
        let diff = (0..cells).filter(|&c| moved[c] != inside[c]).count();
        sum += diff as f64 / v.len() as f64;
    }
    Ok(SainWitness { folner_size: n, window, xi, level, v, sain_sum: sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::CosetSide;
    use crate::matkernel::CMatrix;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn symbols() -> Vec<CircleSymbol> {
        vec![
            CircleSymbol::Sawtooth,
            CircleSymbol::SmoothedIndicator { ramp: 0.05 },
            CircleSymbol::Tent { half_width: 0.3 },
            CircleSymbol::Character(3),
            CircleSymbol::Constant(Complex64::new(0.5, -1.0)),
        ]
    }

    #[test]
    fn symbol_coefficients_match_numerical_transform() {
        let size = 1 << 14;
        for m in symbols() {
            let samples: Vec<Complex64> = (0..size).map(|x| m.eval(x as f64 / size as f64)).collect();
            let spec = fft::forward_copy(&samples, &[size]);
            for k in -20i64..=20 {
                let num = spec[k.rem_euclid(size as i64) as usize] / size as f64;
                assert!((num - m.coeff(k)).norm() < 1e-6, "{m:?} k={k}: {num} vs {}", m.coeff(k));
            }
        }
    }

    /// Independent evaluation of `L_j* P_j T_{m_j} L_j f` on a fine grid.
    fn lattice_oracle(m: &CircleSymbol, f: &CircleElement, j: u32, kmax: i64) -> Vec<Complex64> {
        let size = 1usize << 14;
        let n = 1usize << j;
        let mu = 1.0 / n as f64;
        let cells = size / n;
        let to_grid = |coef: &dyn Fn(i64) -> Complex64| {
            let mut g = vec![ZERO; size];
            for k in -(size as i64 / 2 - 1)..(size as i64 / 2) {
                g[k.rem_euclid(size as i64) as usize] = coef(k);
            }
            fft::inverse_copy(&g, &[size]).iter().map(|z| z * size as f64).collect::<Vec<_>>()
        };
        // L_j f = μ^{-1}(1_X ∗ f̂).
        let lf = to_grid(&|k| f.coeff(k) * arc_coeff(mu, k) / mu);
        // Cell of grid point x: the arc centred at γ = round(x n / size).
        let cell_of = |x: usize| ((x + cells / 2) / cells) % n;
        let mut avg = vec![ZERO; n];
        for x in 0..size {
            avg[cell_of(x)] += lf[x] / cells as f64;
        }
        let mut proj = vec![ZERO; size];
        for x in 0..size {
            let g = cell_of(x);
            proj[x] = avg[g] * m.eval(g as f64 * mu);
        }
        let spec = fft::forward_copy(&proj, &[size]);
        (-kmax..=kmax).map(|k| spec[k.rem_euclid(size as i64) as usize] / size as f64 * arc_coeff(mu, k) / mu).collect()
    }

    #[test]
    fn lattice_step_matches_grid_oracle() {
        let mut r = stream(1, 0);
        let f = CircleElement::random(4, &mut r);
        for m in [CircleSymbol::Sawtooth, CircleSymbol::Character(2)] {
            let step = lattice_step(&m, &f, 4, 12).unwrap();
            let want = lattice_oracle(&m, &f, 4, 16);
            for (i, k) in (-16i64..=16).enumerate() {
                assert!((step.s.coeff(k) - want[i]).norm() < 1e-3 * f.l2_norm(), "k={k}");
            }
        }
    }

    #[test]
    fn lattice_defect_decreases() {
        let one = CircleElement::from_fn(0, |_| c(1.0));
        let mut last = f64::INFINITY;
        for j in 3..10 {
            let d = lattice_step(&CircleSymbol::Character(1), &one, j, 32).unwrap().defect;
            assert!(d < last);
            last = d;
        }
        let mut r = stream(2, 0);
        let f = CircleElement::random(8, &mut r);
        let ds: Vec<f64> = (4..10).map(|j| lattice_step(&CircleSymbol::Constant(c(1.0)), &f, j, 32).unwrap().defect).collect();
        assert!(ds.windows(2).all(|w| w[1] < w[0]));
        assert!(lattice_step(&CircleSymbol::Sawtooth, &f, 30, 8).is_err());
    }

    #[test]
    fn lattice_norm_table_examples() {
        let b = Budget::new(2, 30, 1);
        let t = lattice_norm_bound_check(&CircleSymbol::Constant(c(-2.0)), Exponent::Finite(4.0), &[3, 4], 8, &b).unwrap();
        for &(_, v) in &t.levels {
            assert!((v - 2.0).abs() < 1e-9);
        }
        assert!((t.circle - 2.0).abs() < 1e-9);
        let t = lattice_norm_bound_check(&CircleSymbol::Sawtooth, Exponent::TWO, &[3, 5], 16, &b).unwrap();
        assert_eq!(t.lattice_sup(), 1.0);
        assert!(t.circle <= 1.0 + 1e-9 && t.circle > 0.9);
        assert!(t.holds(1e-9));
    }

    #[test]
    fn finite_restriction_examples() {
        let g = Arc::new(FiniteGroup::cyclic(12).unwrap());
        let sub = Subgroup::new(g.clone(), &[0, 4, 8]).unwrap();
        let mut r = stream(3, 0);
        let f = AlgebraElement::random(sub.group.clone(), &mut r);
        let k = AlgebraElement::random(sub.group.clone(), &mut r);
        let m = Symbol::from_fn(g.clone(), |x| c((x as f64).cos()));
        let rep = restriction_defect_finite(&sub, &[11, 0, 1], &m, Exponent::Finite(4.0), &f, &k).unwrap();
        assert!(rep.isometry_residual < 1e-10);
        assert!(rep.claim_a_gap < 1e-12);
        assert!(matches!(
            restriction_defect_finite(&sub, &[10, 11, 0, 1, 2], &m, Exponent::TWO, &f, &k),
            Err(Error::OverlappingTranslates { .. })
        ));
        assert!(restriction_defect_finite(&sub, &[0, 1], &m, Exponent::TWO, &f, &k).is_err());
        // At q = 2 the weight is h itself, so symbols constant on each γV commute with Φ.
        let flat = Symbol::from_fn(g.clone(), |x| c(if x % 4 == 0 || x % 4 == 1 || x % 4 == 3 { 1.0 } else { 0.3 }));
        let rep = restriction_defect_finite(&sub, &[11, 0, 1], &flat, Exponent::TWO, &f, &k).unwrap();
        assert!(rep.claim_b_defect < 1e-9, "{rep:?}");
    }

    #[test]
    fn finite_restriction_nonabelian() {
        let g = Arc::new(FiniteGroup::heisenberg_mod(3).unwrap());
        let center = g.center();
        let sub = Subgroup::new(g.clone(), &center).unwrap();
        // Elements (a, b, 0) with a, b ∈ {0, ±1} except those differing by the center.
        let window: Vec<usize> = vec![0, 3, 6, 9, 18];
        let window: Vec<usize> = window.into_iter().filter(|&x| x < 27).collect();
        let inv_closed: Vec<usize> = {
            let mut w = window.clone();
            for &x in &window {
                w.push(g.inv(x));
            }
            w.sort_unstable();
            w.dedup();
            w
        };
        let mut r = stream(4, 0);
        let f = AlgebraElement::random(sub.group.clone(), &mut r);
        let k = AlgebraElement::random(sub.group.clone(), &mut r);
        let m = Symbol::from_fn(g.clone(), |x| c(1.0 / (1.0 + x as f64)));
        match restriction_defect_finite(&sub, &inv_closed, &m, Exponent::Finite(4.0), &f, &k) {
            Ok(rep) => assert!(rep.isometry_residual < 1e-10),
            Err(Error::OverlappingTranslates { .. }) => panic!("window translates should be disjoint"),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn circle_restriction_examples() {
        let one = [c(1.0)];
        let mut last = f64::INFINITY;
        for j in 4..8 {
            let rep = restriction_defect_circle(1, j, &CircleSymbol::Sawtooth, Exponent::Finite(4.0), &one, 64 << j).unwrap();
            assert!(rep.isometry_residual < 0.02, "{rep:?}");
            assert!(rep.claim_b_defect < last);
            last = rep.claim_b_defect;
        }
        let mut r = stream(5, 0);
        let f: Vec<Complex64> = (0..4).map(|_| complex_normal(&mut r)).collect();
        let rep = restriction_defect_circle(4, 6, &CircleSymbol::Constant(c(2.0)), Exponent::Finite(4.0), &f, 4096).unwrap();
        assert!(rep.claim_b_defect < 1e-9);
        assert!(restriction_defect_circle(4, 3, &CircleSymbol::Sawtooth, Exponent::TWO, &f, 64).is_err());
    }

    #[test]
    fn coefficient_symbol_examples() {
        let g = Arc::new(FiniteGroup::dihedral(4).unwrap());
        let all: Vec<usize> = (0..8).collect();
        assert!(coefficient_symbol(&g, &all).unwrap().values().iter().all(|v| *v == c(1.0)));
        let e = coefficient_symbol(&g, &[0]).unwrap();
        assert!(e.values().iter().enumerate().all(|(x, v)| *v == c(if x == 0 { 1.0 } else { 0.0 })));
        let w = [0, 1, 3, 4];
        let z = coefficient_symbol(&g, &w).unwrap();
        assert_eq!(z.values()[0], c(1.0));
        // Positive definite: [ζ(x⁻¹y)] is PSD.
        let m = CMatrix::from_fn(8, 8, |x, y| z.values()[g.mul(g.inv(x), y)]);
        assert!(matkernel::hermitian_eig(&m).unwrap().values[0] > -1e-12);
        assert!(coefficient_symbol(&g, &[0, 1]).is_err());
        assert_eq!(coefficient_symbol_arc(0.2).unwrap(), CircleSymbol::Tent { half_width: 0.2 });
    }

    #[test]
    fn window_isometry_examples() {
        let p = |a, b| RationalPoint::new(a, b).unwrap();
        assert_eq!(window_isometry_check(&[p(1, 3)], p(1, 2), &[c(2.0)]).unwrap(), 0.0);
        let r = window_isometry_check(&[p(0, 1), p(1, 2)], p(1, 4), &[c(1.0), Complex64::new(0.0, 2.0)]).unwrap();
        assert!(r <= 1e-12);
        // Touching arcs are still disjoint.
        assert!(window_isometry_check(&[p(0, 1), p(1, 4)], p(1, 4), &[c(1.0), c(1.0)]).unwrap() <= 1e-12);
        assert!(matches!(
            window_isometry_check(&[p(0, 1), p(1, 5)], p(1, 4), &[c(1.0), c(1.0)]),
            Err(Error::OverlappingTranslates { a: 0, b: 1 })
        ));
        assert!(matches!(
            window_isometry_check(&[p(1, 10), p(19, 20)], p(1, 4), &[c(1.0), c(1.0)]),
            Err(Error::OverlappingTranslates { .. })
        ));
    }

    #[test]
    fn periodization_examples() {
        let g = Arc::new(FiniteGroup::dihedral(4).unwrap());
        let cs = CosetStructure::new(g.clone(), &g.center(), CosetSide::Left).unwrap();
        let q = cs.quotient.clone().unwrap();
        let m_q = Symbol::from_fn(q.clone(), |x| c(x as f64 - 1.5));
        let m_pi = periodize_symbol(&cs, &m_q).unwrap();
        for x in 0..8 {
            for &h in &cs.subgroup {
                assert_eq!(m_pi.values()[g.mul(x, h)], m_pi.values()[x]);
            }
        }
        let rep = periodization_check(&cs, &m_q, Exponent::Finite(4.0), &Budget::new(3, 60, 2)).unwrap();
        assert!(rep.projection_residual <= 1e-12 && rep.central_residual <= 1e-12);
        assert!(rep.intertwine_residual <= 1e-12);
        assert!(rep.quotient_estimate <= rep.lifted_estimate);
        let one = periodization_check(&cs, &Symbol::constant(q.clone(), c(1.0)), Exponent::Finite(3.0), &Budget::new(1, 5, 1)).unwrap();
        assert!((one.quotient_estimate - 1.0).abs() < 1e-12 && (one.lifted_estimate - 1.0).abs() < 1e-12);
        // Trivial subgroup: m_π = m_q; whole group: constant.
        let triv = CosetStructure::new(g.clone(), &[0], CosetSide::Left).unwrap();
        let m = Symbol::from_fn(triv.quotient.clone().unwrap(), |x| c(x as f64));
        assert_eq!(periodize_symbol(&triv, &m).unwrap().values(), m.values());
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let not_normal = CosetStructure::new(s3, &[0, 1], CosetSide::Left).unwrap();
        assert!(periodize_symbol(&not_normal, &m).is_err());
    }

    #[test]
    fn periodization_p2_on_cyclic() {
        let g = Arc::new(FiniteGroup::cyclic(6).unwrap());
        let cs = CosetStructure::new(g.clone(), &[0, 2, 4], CosetSide::Left).unwrap();
        let m_q = Symbol::from_fn(cs.quotient.clone().unwrap(), |x| c(if x == 0 { 0.5 } else { -3.0 }));
        let rep = periodization_check(&cs, &m_q, Exponent::TWO, &Budget::new(1, 5, 1)).unwrap();
        assert_eq!(rep.quotient_estimate, 3.0);
        assert_eq!(rep.lifted_estimate, 3.0);
    }

    #[test]
    fn jodeit_examples() {
        let g = Arc::new(FiniteGroup::cyclic(5).unwrap());
        let flat = jodeit_extend(&Symbol::constant(g.clone(), c(2.0))).unwrap();
        assert!(flat.sample(97).iter().all(|v| (v - c(2.0)).norm() < 1e-12));
        let spike = jodeit_extend(&Symbol::from_fn(g.clone(), |x| c(if x == 2 { 1.0 } else { 0.0 }))).unwrap();
        assert!((spike.eval(0.4) - c(1.0)).norm() < 1e-12);
        assert!((spike.eval(0.5) - c(0.5)).norm() < 1e-12);
        assert!(spike.eval(0.2).norm() < 1e-12);
        assert!(jodeit_extend(&Symbol::constant(Arc::new(FiniteGroup::dihedral(3).unwrap()), c(1.0))).is_err());
    }

    #[test]
    fn folner_examples() {
        let triv = CellAction::trivial(64);
        let w = folner_sain_witness(&[1, -1], 4, &triv, 5).unwrap();
        assert_eq!(w.sain_sum, 0.0);
        assert_eq!(w.v, w.window);
        assert_eq!(w.folner_size, 2 * 4 * 2 + 1);
        // Rotation of the 64 cells by one step.
        let rot = CellAction::new((0..64).map(|c| (c + 1) % 64).collect()).unwrap();
        let w = folner_sain_witness(&[1, -1], 4, &rot, 3).unwrap();
        assert!(w.sain_sum < 0.25, "{}", w.sain_sum);
        assert!(CellAction::new(vec![0, 0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn window_isometry_random(seed in any::<u64>()) {
            let mut r = stream(seed, 0);
            let den = 64u64;
            let count = 1 + crate::rng::below(&mut r, 8);
            let mut pts: Vec<u64> = (0..count).map(|i| (i as u64) * (den / count as u64)).collect();
            let shift = crate::rng::below(&mut r, den as usize) as u64;
            for p in pts.iter_mut() {
                *p = (*p + shift) % den;
            }
            let points: Vec<RationalPoint> = pts.iter().map(|&p| RationalPoint::new(p, den).unwrap()).collect();
            let width = RationalPoint::new(den / 8, den).unwrap();
            let a: Vec<Complex64> = (0..count).map(|_| complex_normal(&mut r)).collect();
            prop_assert!(window_isometry_check(&points, width, &a).unwrap() <= 1e-12);
        }

        #[test]
        fn jodeit_restricts_and_bounds(seed in any::<u64>(), n in 1usize..20) {
            let mut r = stream(seed, 1);
            let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
            let vals: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut r)).collect();
            let m = Symbol::new(g, vals.clone()).unwrap();
            let ext = jodeit_extend(&m).unwrap();
            for (l, v) in vals.iter().enumerate() {
                prop_assert!((ext.eval(l as f64 / n as f64) - v).norm() <= 1e-12 * (1.0 + v.norm()));
            }
            let sup = ext.sample(64 * n).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            prop_assert!(sup <= m.sup_norm() * (1.0 + 1e-12));
        }

        #[test]
        fn periodization_projection_invariants(seed in any::<u64>()) {
            let g = Arc::new(FiniteGroup::heisenberg_mod(3).unwrap());
            let cs = CosetStructure::new(g.clone(), &g.center(), CosetSide::Right).unwrap();
            let mut r = stream(seed, 2);
            let vals: Vec<Complex64> = (0..9).map(|_| complex_normal(&mut r)).collect();
            let m_q = Symbol::new(cs.quotient.clone().unwrap(), vals).unwrap();
            let rep = periodization_check(&cs, &m_q, Exponent::TWO, &Budget::new(1, 3, seed)).unwrap();
            prop_assert!(rep.projection_residual <= 1e-12 && rep.central_residual <= 1e-12 && rep.intertwine_residual <= 1e-12);
        }
    }
}
