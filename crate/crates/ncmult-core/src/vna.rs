//! The group von Neumann algebra of a finite group.
//!
//! An element is its coefficient vector `f̂` over the group; the algebra acts
//! on `ℓ²(G)` through the left regular representation `λ(g)δ_h = δ_{gh}`, and
//! the trace is `τ(f) = f̂(e)`. Norms on abelian groups go through the DFT,
//! everything else through dense matrices.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::groups::FiniteGroup;
use crate::matkernel::{self, lp_of_values, CMatrix, Exponent};
use crate::rng::{self, complex_normal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    group: Arc<FiniteGroup>,
    coeffs: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn new(group: Arc<FiniteGroup>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order(), found: coeffs.len() });
        }
        Ok(AlgebraElement { group, coeffs })
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        AlgebraElement { group, coeffs: vec![ZERO; n] }
    }

    /// `λ(g)`.
    pub fn delta(group: Arc<FiniteGroup>, g: usize) -> Self {
        let mut f = Self::zero(group);
        f.coeffs[g] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn one(group: Arc<FiniteGroup>) -> Self {
        Self::delta(group, 0)
    }

    pub fn random(group: Arc<FiniteGroup>, rng: &mut rng::Rng) -> Self {
        let coeffs = (0..group.order()).map(|_| complex_normal(rng)).collect();
        AlgebraElement { group, coeffs }
    }

    /// Reads coefficients off the column `e` of a matrix in the image of the
    /// regular representation: `L(f)[g, e] = f̂(g)`.
    pub fn from_regular_matrix(group: Arc<FiniteGroup>, m: &CMatrix) -> Self {
        let coeffs = (0..group.order()).map(|g| m[(g, 0)]).collect();
        AlgebraElement { group, coeffs }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn check(&self, other: &Arc<FiniteGroup>) -> Result<()> {
        if same_group(&self.group, other) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// `(f*)^(g) = conj(f̂(g⁻¹))`.
    pub fn adjoint(&self) -> Self {
        let g = &self.group;
        let coeffs = (0..g.order()).map(|x| self.coeffs[g.inv(x)].conj()).collect();
        AlgebraElement { group: g.clone(), coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AlgebraElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(&other.group)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(AlgebraElement { group: self.group.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Plancherel inner product `τ(h* f) = Σ f̂(g) conj(ĥ(g))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check(&other.group)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Values `F(χ) = Σ_g f̂(g) χ(g)` over the dual group when `G` is a product of cyclic groups.
    fn spectrum(&self) -> Option<Vec<Complex64>> {
        self.group.abelian_moduli().map(|dims| fft::forward_copy(&self.coeffs, dims))
    }

    fn from_spectrum(group: Arc<FiniteGroup>, spec: &[Complex64]) -> Self {
        let dims = group.abelian_moduli().expect("abelian group");
        let coeffs = fft::inverse_copy(spec, dims);
        AlgebraElement { group, coeffs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    group: Arc<FiniteGroup>,
    values: Vec<Complex64>,
}

impl Symbol {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order(), found: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("symbol values must be finite"));
        }
        Ok(Symbol { group, values })
    }

    pub fn from_fn(group: Arc<FiniteGroup>, f: impl Fn(usize) -> Complex64) -> Self {
        let values = (0..group.order()).map(f).collect();
        Symbol { group, values }
    }

    pub fn constant(group: Arc<FiniteGroup>, c: Complex64) -> Self {
        Self::from_fn(group, |_| c)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// First index attaining `max |m|`.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > self.values[best].norm() {
                best = i;
            }
        }
        best
    }

    /// `g ↦ m(g⁻¹)`.
    pub fn reversed(&self) -> Self {
        let g = &self.group;
        Symbol::from_fn(g.clone(), |x| self.values[g.inv(x)])
    }

    pub fn conj(&self) -> Self {
        Symbol { group: self.group.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn product(&self, other: &Symbol) -> Result<Symbol> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Symbol { group: self.group.clone(), values })
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Symbol> {
        if !same_group(&self.group, &sub.parent) {
            return Err(Error::GroupMismatch);
        }
        Ok(Symbol::from_fn(sub.group.clone(), |i| self.values[sub.elements[i]]))
    }
}

/// A subgroup together with the group structure it inherits, indexed by
/// position in the sorted element list (so the identity stays at 0).
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub parent: Arc<FiniteGroup>,
    pub elements: Vec<usize>,
    pub group: Arc<FiniteGroup>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, elements: &[usize]) -> Result<Self> {
        let mut el = elements.to_vec();
        el.sort_unstable();
        el.dedup();
        let n = parent.order();
        if el.first() != Some(&0) || el.iter().any(|&x| x >= n) {
            return Err(Error::NotSubgroup { a: 0, b: 0 });
        }
        let pos = |x: usize| el.binary_search(&x).ok();
        let m = el.len();
        let mut table = Vec::with_capacity(m * m);
        for &a in &el {
            for &b in &el {
                match pos(parent.mul(a, b)) {
                    Some(i) => table.push(i),
                    None => return Err(Error::NotSubgroup { a, b }),
                }
            }
        }
        let label = alloc::format!("{}|{}", parent.label(), m);
        let group = Arc::new(FiniteGroup::from_table(label, m, &table)?);
        Ok(Subgroup { parent, elements: el, group })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    /// Inclusion `𝓛H → 𝓛G`.
    pub fn include(&self, f: &AlgebraElement) -> Result<AlgebraElement> {
        f.check(&self.group)?;
        let mut out = AlgebraElement::zero(self.parent.clone());
        for (i, &g) in self.elements.iter().enumerate() {
            out.coeffs[g] = f.coeffs[i];
        }
        Ok(out)
    }
}

/// `Σ_g f̂(g) λ(g)` as a `|G| × |G|` matrix; entry `[x, y] = f̂(x y⁻¹)`.
pub fn regular_rep(f: &AlgebraElement) -> CMatrix {
    let g = &f.group;
    let n = g.order();
    let inv: Vec<usize> = (0..n).map(|y| g.inv(y)).collect();
    CMatrix::from_fn(n, n, |x, y| f.coeffs[g.mul(x, inv[y])])
}

pub fn plancherel_trace(f: &AlgebraElement) -> Complex64 {
    f.coeffs[0]
}

/// `(f ∗ h)^(g) = Σ_k f̂(k) ĥ(k⁻¹ g)`.
pub fn convolve(f: &AlgebraElement, h: &AlgebraElement) -> Result<AlgebraElement> {
    f.check(&h.group)?;
    let g = &f.group;
    let n = g.order();
    let mut out = vec![ZERO; n];
    for k in 0..n {
        let a = f.coeffs[k];
        if a == ZERO {
            continue;
        }
        for x in 0..n {
            out[g.mul(k, x)] += a * h.coeffs[x];
        }
    }
    Ok(AlgebraElement { group: g.clone(), coeffs: out })
}

/// Noncommutative `L_p` norm for the normalised trace `τ`.
pub fn lp_norm(f: &AlgebraElement, p: Exponent) -> Result<f64> {
    if let Exponent::Finite(q) = p {
        if q == 2.0 {
            return Ok(f.l2_norm());
        }
    }
    let n = f.group.order() as f64;
    match f.spectrum() {
        Some(spec) => {
            let abs: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
            Ok(lp_of_values(&abs, p, 1.0 / n))
        }
        None => matkernel::schatten_norm(&regular_rep(f), p, 1.0 / n),
    }
}

/// `E_H(f)`: keep coefficients on `H`, returned as an element of `𝓛H`.
pub fn cond_expectation(f: &AlgebraElement, sub: &Subgroup) -> Result<AlgebraElement> {
    f.check(&sub.parent)?;
    let coeffs = sub.elements.iter().map(|&g| f.coeffs[g]).collect();
    Ok(AlgebraElement { group: sub.group.clone(), coeffs })
}

/// `T_m f`, coefficientwise product.
pub fn fourier_multiplier(m: &Symbol, f: &AlgebraElement) -> Result<AlgebraElement> {
    f.check(&m.group)?;
    let coeffs = m.values.iter().zip(&f.coeffs).map(|(a, b)| a * b).collect();
    Ok(AlgebraElement { group: f.group.clone(), coeffs })
}

/// Relative cutoff defining the top spectral projection at `p = ∞`.
const TOP_BAND: f64 = 1e-9;

/// Norming element of `x` in `L_{p'}`: unit norm and `τ(J* x) = ‖x‖_p`.
/// Returns `None` when `x = 0`.
pub fn dual_element(x: &AlgebraElement, p: Exponent) -> Result<Option<AlgebraElement>> {
    let group = x.group.clone();
    let n = group.order() as f64;
    if let Some(spec) = x.spectrum() {
        let abs: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
        let norm = lp_of_values(&abs, p, 1.0 / n);
        if norm == 0.0 {
            return Ok(None);
        }
        let out: Vec<Complex64> = match p {
            Exponent::Finite(q) if q == 1.0 => {
                spec.iter().zip(&abs).map(|(z, &a)| if a > 0.0 { z / a } else { ZERO }).collect()
            }
            Exponent::Finite(q) => spec
                .iter()
                .zip(&abs)
                .map(|(z, &a)| if a > 0.0 { z / a * (a / norm).powf(q - 1.0) } else { ZERO })
                .collect(),
            Exponent::Infinity => {
                let cut = norm * (1.0 - TOP_BAND);
                let count = abs.iter().filter(|&&a| a >= cut).count() as f64;
                spec.iter().zip(&abs).map(|(z, &a)| if a >= cut { z / a * (n / count) } else { ZERO }).collect()
            }
        };
        return Ok(Some(AlgebraElement::from_spectrum(group, &out)));
    }
    let l = regular_rep(x);
    let d = matkernel::svd(&l)?;
    let norm = lp_of_values(&d.s, p, 1.0 / n);
    if norm == 0.0 {
        return Ok(None);
    }
    let smax = d.s[0];
    let weights: Vec<f64> = match p {
        Exponent::Finite(q) if q == 1.0 => d.s.iter().map(|&s| if s > crate::tol::RANK_CUTOFF * smax { 1.0 } else { 0.0 }).collect(),
        Exponent::Finite(q) => d.s.iter().map(|&s| (s / norm).powf(q - 1.0)).collect(),
        Exponent::Infinity => {
            let cut = smax * (1.0 - TOP_BAND);
            let count = d.s.iter().filter(|&&s| s >= cut).count() as f64;
            d.s.iter().map(|&s| if s >= cut { n / count } else { 0.0 }).collect()
        }
    };
    // Only column e of U diag(w) V* is needed.
    let size = group.order();
    let coeffs = (0..size)
        .map(|gi| (0..size).map(|k| d.u[(gi, k)] * weights[k] * d.v[(0, k)].conj()).sum())
        .collect();
    Ok(Some(AlgebraElement { group, coeffs }))
}

/// Work allowed to the ascent: random restarts, iterations per restart,
/// relative improvement below which a restart counts as converged, and the
/// seed from which restart streams are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Budget {
    pub fn new(restarts: usize, iterations: usize, seed: u64) -> Self {
        Budget { restarts, iterations, tol: 1e-10, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations == 0 {
            Err(Error::ZeroBudget)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormEstimate<W> {
    pub lower_bound: f64,
    pub witness: W,
    pub converged: bool,
}

/// Exponent used at ascent step `t` when aiming at `target`. Endpoint targets
/// are approached through finite exponents on a fixed schedule, so the path of
/// a restart does not depend on the budget.
pub fn continuation(target: Exponent, t: usize) -> Exponent {
    let ramp = |t: usize| 2.0 * 1.5f64.powi(t as i32);
    match target {
        Exponent::Infinity => {
            let q = ramp(t);
            if q > 256.0 {
                Exponent::Infinity
            } else {
                Exponent::Finite(q)
            }
        }
        Exponent::Finite(p) if p == 1.0 => continuation(Exponent::Infinity, t).conjugate(),
        other => other,
    }
}

/// Generic nonlinear power iteration for `‖A : L_p → L_p‖`, where the caller
/// supplies `A`, its adjoint for the trace pairing, the norm and the dual map.
pub(crate) struct Ascent<'a, X> {
    pub apply: &'a dyn Fn(&X) -> Result<X>,
    pub apply_adjoint: &'a dyn Fn(&X) -> Result<X>,
    pub norm: &'a dyn Fn(&X, Exponent) -> Result<f64>,
    pub dual: &'a dyn Fn(&X, Exponent) -> Result<Option<X>>,
    pub scale: &'a dyn Fn(&X, f64) -> X,
}

impl<'a, X: Clone> Ascent<'a, X> {
    /// Runs one restart from `start`; returns the best ratio seen with its unit witness.
    pub fn run(&self, start: X, p: Exponent, iterations: usize, tol: f64) -> Result<(f64, X, bool)> {
        let n0 = (self.norm)(&start, p)?;
        if n0 == 0.0 {
            return Ok((0.0, start, true));
        }
        let mut x = (self.scale)(&start, 1.0 / n0);
        let mut best = (self.norm)(&(self.apply)(&x)?, p)?;
        let mut best_x = x.clone();
        let mut converged = false;
        let mut last = best;
        for t in 0..iterations {
            let q = continuation(p, t);
            let y = (self.apply)(&x)?;
            let w = match (self.dual)(&y, q)? {
                Some(w) => w,
                None => {
                    converged = true;
                    break;
                }
            };
            let z = (self.apply_adjoint)(&w)?;
            let next = match (self.dual)(&z, q.conjugate())? {
                Some(v) => v,
                None => {
                    converged = true;
                    break;
                }
            };
            let nn = (self.norm)(&next, p)?;
            if nn == 0.0 {
                converged = true;
                break;
            }
            x = (self.scale)(&next, 1.0 / nn);
            let val = (self.norm)(&(self.apply)(&x)?, p)?;
            if val > best {
                best = val;
                best_x = x.clone();
            }
            let settled = continuation(p, t) == p;
            if settled && (val - last).abs() <= tol * val.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            last = val;
        }
        Ok((best, best_x, converged))
    }
}

/// Picks the largest estimate; ties go to the earliest entry so the result
/// does not depend on the order in which restarts finished.
pub fn reduce_best<W: Clone>(results: &[NormEstimate<W>]) -> Option<NormEstimate<W>> {
    let mut best: Option<&NormEstimate<W>> = None;
    for r in results {
        if best.map_or(true, |b| r.lower_bound > b.lower_bound) {
            best = Some(r);
        }
    }
    best.cloned()
}

fn multiplier_ascent<R>(m: &Symbol, p: Exponent, f: impl FnOnce(&Ascent<'_, AlgebraElement>) -> R) -> R {
    let mc = m.conj();
    let apply = |x: &AlgebraElement| fourier_multiplier(m, x);
    let adj = |x: &AlgebraElement| fourier_multiplier(&mc, x);
    let norm = |x: &AlgebraElement, q: Exponent| lp_norm(x, q);
    let dual = |x: &AlgebraElement, q: Exponent| dual_element(x, q);
    let scale = |x: &AlgebraElement, s: f64| x.scale(Complex64::new(s, 0.0));
    let _ = p;
    let asc = Ascent { apply: &apply, apply_adjoint: &adj, norm: &norm, dual: &dual, scale: &scale };
    f(&asc)
}

/// One random restart of the multiplier ascent (`restart ≥ 1`), or the
/// deterministic candidate `λ(argmax |m|)` for `restart = 0`.
pub fn multiplier_restart(m: &Symbol, p: Exponent, budget: &Budget, restart: usize) -> Result<NormEstimate<AlgebraElement>> {
    let group = m.group.clone();
    if restart == 0 {
        let g = m.argmax();
        return Ok(NormEstimate { lower_bound: m.values[g].norm(), witness: AlgebraElement::delta(group, g), converged: true });
    }
    let mut r = rng::stream(budget.seed, restart as u64);
    let start = AlgebraElement::random(group, &mut r);
    multiplier_from(m, p, budget, start)
}

/// Ascent from a caller-supplied starting element.
pub fn multiplier_from(m: &Symbol, p: Exponent, budget: &Budget, start: AlgebraElement) -> Result<NormEstimate<AlgebraElement>> {
    start.check(&m.group)?;
    let (v, w, c) = multiplier_ascent(m, p, |a| a.run(start, p, budget.iterations, budget.tol))?;
    Ok(NormEstimate { lower_bound: v, witness: w, converged: c })
}

/// Lower bound for `‖T_m : L_p(Ĝ) → L_p(Ĝ)‖`. Exact at `p = 2`.
pub fn multiplier_norm_estimate(m: &Symbol, p: Exponent, budget: &Budget) -> Result<NormEstimate<AlgebraElement>> {
    multiplier_norm_estimate_seeded(m, p, budget, &[])
}

/// As [`multiplier_norm_estimate`], with extra starting points run alongside
/// the random restarts.
pub fn multiplier_norm_estimate_seeded(
    m: &Symbol,
    p: Exponent,
    budget: &Budget,
    starts: &[AlgebraElement],
) -> Result<NormEstimate<AlgebraElement>> {
    budget.validate()?;
    let exact = multiplier_restart(m, p, budget, 0)?;
    if p == Exponent::TWO {
        return Ok(exact);
    }
    let mut results = vec![exact];
    for r in 1..=budget.restarts {
        results.push(multiplier_restart(m, p, budget, r)?);
    }
    for s in starts {
        results.push(multiplier_from(m, p, budget, s.clone())?);
    }
    let mut best = reduce_best(&results).expect("at least one candidate");
    best.converged = results.iter().skip(1).any(|r| r.converged) || results.len() == 1;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FellReport {
    /// `‖Σ a_g ⊗ λ(g) ⊗ π(g)‖_2` and `‖Σ a_g ⊗ λ(g)‖_2` (normalised traces).
    pub p2: (f64, f64),
    /// Operator norms of the same pair.
    pub pinf: (f64, f64),
}

/// Builds `Σ a_g ⊗ λ(g) ⊗ π(g)` and `Σ a_g ⊗ λ(g)`; `a[g]` is `k × k`, `pi[g]` is `d × d`.
pub fn fell_absorption_check(group: &Arc<FiniteGroup>, a: &[CMatrix], pi: &[CMatrix]) -> Result<FellReport> {
    let n = group.order();
    if a.len() != n || pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.len().min(pi.len()) });
    }
    let k = a[0].rows();
    let d = pi[0].rows();
    if a.iter().any(|x| x.rows() != k || x.cols() != k) || pi.iter().any(|x| x.rows() != d || x.cols() != d) {
        return Err(invalid("coefficient and representation matrices must be square of fixed size"));
    }
    for x in pi {
        if x.adjoint().mul(x).sub(&CMatrix::identity(d)).frobenius_norm() > 1e-10 {
            return Err(invalid("representation matrix is not unitary"));
        }
    }
    for g in 0..n {
        for h in 0..n {
            if pi[g].mul(&pi[h]).sub(&pi[group.mul(g, h)]).frobenius_norm() > 1e-10 {
                return Err(Error::NotHomomorphism { g, h });
            }
        }
    }
    let lambda = |g: usize| regular_rep(&AlgebraElement::delta(group.clone(), g));
    let mut big = CMatrix::zeros(k * n * d, k * n * d);
    let mut small = CMatrix::zeros(k * n, k * n);
    for g in 0..n {
        let al = a[g].kron(&lambda(g));
        big.add_assign_scaled(&al.kron(&pi[g]), Complex64::new(1.0, 0.0));
        small.add_assign_scaled(&al, Complex64::new(1.0, 0.0));
    }
    let lhs2 = matkernel::schatten_norm(&big, Exponent::TWO, 1.0 / (k * n * d) as f64)?;
    let rhs2 = matkernel::schatten_norm(&small, Exponent::TWO, 1.0 / (k * n) as f64)?;
    let lhs_inf = matkernel::operator_norm(&big)?;
    let rhs_inf = matkernel::operator_norm(&small)?;
    Ok(FellReport { p2: (lhs2, rhs2), pinf: (lhs_inf, rhs_inf) })
}
