//! Schur multipliers on `S_p(ℓ₂(F))` for finite index sets `F`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::groups::CosetStructure;
use crate::matkernel::{self, hermitian_eig, schatten_norm, svd, CMatrix, Exponent};
use crate::rng;
use crate::tol;
use crate::vna::{reduce_best, Ascent, Budget, NormEstimate, Symbol};
use crate::deleeuw::periodize_symbol;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone)]
pub struct SchurSymbol {
    /// Group elements or abstract indices labelling rows and columns.
    pub labels: Vec<usize>,
    pub matrix: CMatrix,
    /// Set when `m_ij = m(g_i⁻¹ g_j)`.
    pub source: Option<Symbol>,
}

impl SchurSymbol {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let labels = (0..matrix.rows()).collect();
        Ok(SchurSymbol { labels, matrix, source: None })
    }

    /// Herz-Schur matrix of `m` on the listed elements.
    pub fn herz_schur(m: &Symbol, elements: &[usize]) -> Result<Self> {
        let g = m.group();
        if elements.iter().any(|&x| x >= g.order()) {
            return Err(invalid("element out of range"));
        }
        let n = elements.len();
        let matrix = CMatrix::from_fn(n, n, |i, j| m.values()[g.left_div(elements[i], elements[j])]);
        Ok(SchurSymbol { labels: elements.to_vec(), matrix, source: Some(m.clone()) })
    }

    pub fn herz_schur_full(m: &Symbol) -> Self {
        let all: Vec<usize> = (0..m.group().order()).collect();
        Self::herz_schur(m, &all).expect("elements in range")
    }

    /// `m_ij = f(θ_j − θ_i)` on the grid `θ_i = i/n` of the circle `[0, 1)`.
    pub fn circle_grid(n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            let d = (j as f64 - i as f64) / n as f64;
            f(d - d.floor())
        });
        SchurSymbol { labels: (0..n).collect(), matrix, source: None }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Principal submatrix on positions `idx`.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        if idx.iter().any(|&i| i >= self.size()) {
            return Err(invalid("section index out of range"));
        }
        Ok(SchurSymbol {
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            matrix: self.matrix.submatrix(idx, idx),
            source: self.source.clone(),
        })
    }
}

/// `m_ij = ⟨x_i, y_j⟩` with `⟨x, y⟩ = Σ x_k conj(y_k)`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub x: Vec<Vec<Complex64>>,
    pub y: Vec<Vec<Complex64>>,
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Factorization {
    pub fn value(&self) -> f64 {
        let a = self.x.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
        let b = self.y.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
        a * b
    }

    pub fn gram(&self) -> CMatrix {
        CMatrix::from_fn(self.x.len(), self.y.len(), |i, j| {
            self.x[i].iter().zip(&self.y[j]).map(|(a, b)| a * b.conj()).sum()
        })
    }

    /// Largest entrywise deviation of the Gram matrix from `m`.
    pub fn residual(&self, m: &CMatrix) -> f64 {
        if m.rows() != self.x.len() || m.cols() != self.y.len() {
            return f64::INFINITY;
        }
        self.gram().sub(m).max_abs()
    }

    pub fn restrict(&self, idx: &[usize]) -> Factorization {
        Factorization { x: idx.iter().map(|&i| self.x[i].clone()).collect(), y: idx.iter().map(|&i| self.y[i].clone()).collect() }
    }
}

pub fn schur_apply(m: &SchurSymbol, a: &CMatrix) -> Result<CMatrix> {
    m.matrix.hadamard(a)
}

/// Norming functional of `x` in `S_{p'}` for the pairing `Re tr(J* X)`.
fn schatten_dual(x: &CMatrix, p: Exponent) -> Result<Option<CMatrix>> {
    let d = svd(x)?;
    let smax = d.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(None);
    }
    let norm = matkernel::lp_of_values(&d.s, p, 1.0);
    let weights: Vec<f64> = match p {
        Exponent::Finite(q) if q == 1.0 => {
            d.s.iter().map(|&s| if s > tol::RANK_CUTOFF * smax { 1.0 } else { 0.0 }).collect()
        }
        Exponent::Finite(q) => d.s.iter().map(|&s| (s / norm).powf(q - 1.0)).collect(),
        Exponent::Infinity => {
            let cut = smax * (1.0 - 1e-9);
            let count = d.s.iter().filter(|&&s| s >= cut).count() as f64;
            d.s.iter().map(|&s| if s >= cut { 1.0 / count } else { 0.0 }).collect()
        }
    };
    let (r, c) = (x.rows(), x.cols());
    let mut out = CMatrix::zeros(r, c);
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for i in 0..r {
            let a = d.u[(i, k)] * w;
            for j in 0..c {
                out[(i, j)] += a * d.v[(j, k)].conj();
            }
        }
    }
    Ok(Some(out))
}

fn schur_ascent<R>(m: &SchurSymbol, f: impl FnOnce(&Ascent<'_, CMatrix>) -> R) -> R {
    let mc = m.matrix.conj();
    let apply = |x: &CMatrix| m.matrix.hadamard(x);
    let adj = |x: &CMatrix| mc.hadamard(x);
    let norm = |x: &CMatrix, q: Exponent| schatten_norm(x, q, 1.0);
    let dual = |x: &CMatrix, q: Exponent| schatten_dual(x, q);
    let scale = |x: &CMatrix, s: f64| x.scale_real(s);
    let asc = Ascent { apply: &apply, apply_adjoint: &adj, norm: &norm, dual: &dual, scale: &scale };
    f(&asc)
}

fn schur_from(m: &SchurSymbol, p: Exponent, budget: &Budget, start: CMatrix) -> Result<NormEstimate<CMatrix>> {
    let n = m.size();
    if start.rows() != n || start.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: start.rows() });
    }
    let (v, w, c) = schur_ascent(m, |a| a.run(start, p, budget.iterations, budget.tol))?;
    Ok(NormEstimate { lower_bound: v, witness: w, converged: c })
}

/// Lower bound for `‖S_M : S_p → S_p‖` with a witness of unit `S_p` norm.
/// Exact at `p = 2`.
pub fn schur_norm_estimate(m: &SchurSymbol, p: Exponent, budget: &Budget) -> Result<NormEstimate<CMatrix>> {
    schur_norm_estimate_seeded(m, p, budget, &[])
}

pub fn schur_norm_estimate_seeded(
    m: &SchurSymbol,
    p: Exponent,
    budget: &Budget,
    starts: &[CMatrix],
) -> Result<NormEstimate<CMatrix>> {
    if budget.restarts == 0 || budget.iterations == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = m.size();
    if n == 0 {
        return Ok(NormEstimate { lower_bound: 0.0, witness: CMatrix::zeros(0, 0), converged: true });
    }
    let (mut bi, mut bj) = (0, 0);
    for i in 0..n {
        for j in 0..n {
            if m.matrix[(i, j)].norm() > m.matrix[(bi, bj)].norm() {
                bi = i;
                bj = j;
            }
        }
    }
    let mut e = CMatrix::zeros(n, n);
    e[(bi, bj)] = ONE;
    let exact = NormEstimate { lower_bound: m.matrix[(bi, bj)].norm(), witness: e, converged: true };
    if p == Exponent::TWO {
        return Ok(exact);
    }
    let mut results = vec![exact];
    for r in 1..=budget.restarts {
        let mut g = rng::stream(budget.seed, r as u64);
        let start = matkernel::random_matrix(&mut g, n, n);
        results.push(schur_from(m, p, budget, start)?);
    }
    for s in starts {
        results.push(schur_from(m, p, budget, s.clone())?);
    }
    let mut best = reduce_best(&results).expect("at least one candidate");
    best.converged = results.iter().skip(1).any(|r| r.converged);
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct CbNorm {
    /// Value of the certificate; an upper bound for the cb norm.
    pub value: f64,
    /// Certified lower bound `‖D_u M D_v‖_1` for unit weights `u, v`.
    pub lower: f64,
    pub certificate: Factorization,
}

fn diag_scaled(m: &CMatrix, u: &[f64], v: &[f64]) -> CMatrix {
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * (u[i] * v[j]))
}

fn normalized_positive(g: Vec<f64>) -> Option<Vec<f64>> {
    let g: Vec<f64> = g.into_iter().map(|x| x.max(0.0)).collect();
    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        Some(g.into_iter().map(|x| x / n).collect())
    } else {
        None
    }
}

struct Bracket {
    lower: f64,
    upper: f64,
    cert: Option<Factorization>,
}

impl Bracket {
    fn offer(&mut self, f: Factorization) {
        let v = f.value();
        if v < self.upper {
            self.upper = v;
            self.cert = Some(f);
        }
    }
}

/// Evaluates the weights `(u, v)`: the trace norm of `D_u M D_v` and the
/// factorization `x = D_u⁻¹ U Σ^½`, `y = D_v⁻¹ V Σ^½`. Returns the partial
/// isometry of the polar decomposition for the next step.
fn weighted_step(m: &CMatrix, u: &[f64], v: &[f64], br: &mut Bracket) -> Result<CMatrix> {
    let n = m.rows();
    let d = svd(&diag_scaled(m, u, v))?;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let trace_norm: f64 = d.s.iter().sum();
    br.lower = br.lower.max(trace_norm);
    let keep: Vec<usize> = (0..n).filter(|&k| d.s[k] > tol::RANK_CUTOFF * smax && d.s[k] > 0.0).collect();
    let umin = u.iter().chain(v).cloned().fold(f64::INFINITY, f64::min);
    if umin > 0.0 {
        let x = (0..n).map(|i| keep.iter().map(|&k| d.u[(i, k)] * (d.s[k].sqrt() / u[i])).collect()).collect();
        let y = (0..n).map(|j| keep.iter().map(|&k| d.v[(j, k)] * (d.s[k].sqrt() / v[j])).collect()).collect();
        let f = Factorization { x, y };
        if f.residual(m) <= tol::FACTORIZATION {
            br.offer(f);
        }
    }
    let mut w = CMatrix::zeros(n, n);
    for &k in &keep {
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] += d.u[(i, k)] * d.v[(j, k)].conj();
            }
        }
    }
    Ok(w)
}

fn closed(br: &Bracket, tol: f64) -> bool {
    br.upper - br.lower <= tol * br.upper.max(1.0)
}

/// Monotone ascent of `‖D_u M D_v‖_1` over nonnegative unit weights,
/// alternating the two sides.
fn weight_ascent(m: &CMatrix, tol: f64, cap: usize, br: &mut Bracket) -> Result<()> {
    let n = m.rows();
    let floor = 1e-12;
    let start = 1.0 / (n as f64).sqrt();
    let mut u = vec![start; n];
    let mut v = vec![start; n];
    let mut last = 0.0;
    for it in 0..cap {
        let w = weighted_step(m, &u, &v, br)?;
        if closed(br, tol) {
            break;
        }
        if it % 2 == 0 {
            let g = (0..n).map(|i| (0..n).map(|j| (m[(i, j)] * v[j] * w[(i, j)].conj()).re).sum()).collect();
            match normalized_positive(g) {
                Some(x) => u = x.into_iter().map(|t| t.max(floor)).collect(),
                None => break,
            }
        } else {
            let g = (0..n).map(|j| (0..n).map(|i| (m[(i, j)] * u[i] * w[(i, j)].conj()).re).sum()).collect();
            match normalized_positive(g) {
                Some(x) => v = x.into_iter().map(|t| t.max(floor)).collect(),
                None => break,
            }
        }
        if it % 50 == 49 {
            if br.lower - last <= 1e-14 * br.lower {
                break;
            }
            last = br.lower;
        }
    }
    Ok(())
}

/// Dykstra projections between the PSD cone and the set of Hermitian block
/// matrices with off-diagonal block `m` and diagonal at most `t`. Returns the
/// last iterate of the affine set.
fn dykstra(m: &CMatrix, t: f64, start: &CMatrix) -> Result<CMatrix> {
    let n = m.rows();
    let cap = 5000;
    let affine = |z: &CMatrix| {
        let mut z = z.hermitian_part();
        for i in 0..n {
            for j in 0..n {
                z[(i, n + j)] = m[(i, j)];
                z[(n + j, i)] = m[(i, j)].conj();
            }
        }
        for i in 0..2 * n {
            z[(i, i)] = Complex64::new(z[(i, i)].re.min(t), 0.0);
        }
        z
    };
    let mut x = affine(start);
    let mut p = CMatrix::zeros(2 * n, 2 * n);
    let mut q = CMatrix::zeros(2 * n, 2 * n);
    for _ in 0..cap {
        let y = matkernel::psd_project(&x.add(&p))?;
        p = x.add(&p).sub(&y);
        let next = affine(&y.add(&q));
        q = y.add(&q).sub(&next);
        let step = next.sub(&x).frobenius_norm();
        x = next;
        if step < 1e-9 {
            break;
        }
    }
    Ok(x)
}

/// Repairs `z` to `z + δI` with `δ = max(0, −λ_min)` and reads off a
/// factorization from a square root.
fn certificate_from_block(z: &CMatrix, n: usize) -> Result<(f64, Factorization)> {
    let e = hermitian_eig(z)?;
    let shift = (-e.values.first().copied().unwrap_or(0.0)).max(0.0);
    let k = 2 * n;
    let roots: Vec<f64> = e.values.iter().map(|&l| (l + shift).max(0.0).sqrt()).collect();
    let row = |i: usize| (0..k).map(|c| e.vectors[(i, c)] * roots[c]).collect::<Vec<_>>();
    let x = (0..n).map(row).collect();
    let y = (n..k).map(row).collect();
    Ok((shift, Factorization { x, y }))
}

/// `‖S_M‖_cb` on `B(ℓ₂^n)`, which equals the factorization norm
/// `min max_i‖x_i‖ · max_j‖y_j‖`.
///
/// The ascent of `‖D_u M D_v‖_1` gives certified lower bounds and, at each
/// step, a factorization. If the bracket is still wider than `tol` (relative
/// above 1), bisection on the block-matrix feasibility problem tightens it.
pub fn cb_inf_norm(m: &SchurSymbol, tol: f64) -> Result<CbNorm> {
    let a = &m.matrix;
    let n = a.rows();
    if n == 0 {
        return Ok(CbNorm { value: 0.0, lower: 0.0, certificate: Factorization { x: vec![], y: vec![] } });
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut br = Bracket { lower: a.max_abs(), upper: f64::INFINITY, cert: None };
    // Balanced SVD factorization as the initial upper bound.
    let d = svd(a)?;
    let x = (0..n).map(|i| (0..n).map(|k| d.u[(i, k)] * d.s[k].sqrt()).collect()).collect();
    let y = (0..n).map(|j| (0..n).map(|k| d.v[(j, k)] * d.s[k].sqrt()).collect()).collect();
    br.offer(Factorization { x, y });
    if a.max_abs() == 0.0 {
        let cert = br.cert.take().expect("svd certificate");
        return Ok(CbNorm { value: 0.0, lower: 0.0, certificate: cert });
    }
    if !closed(&br, tol) {
        weight_ascent(a, tol, 5000, &mut br)?;
    }
    let mut floor = br.lower;
    if !closed(&br, tol) {
        let mut lo = br.lower;
        let depth = ((br.upper - lo) / tol).log2().ceil().clamp(1.0, 60.0) as usize;
        let mut start = CMatrix::zeros(2 * n, 2 * n);
        for _ in 0..depth {
            if br.upper - lo <= tol * br.upper.max(1.0) {
                break;
            }
            let t = 0.5 * (lo + br.upper);
            let z = dykstra(a, t, &start)?;
            let (shift, cert) = certificate_from_block(&z, n)?;
            if cert.residual(a) <= tol::FACTORIZATION {
                br.offer(cert);
            }
            if shift <= 0.25 * tol {
                start = z;
            } else {
                lo = t;
            }
        }
        floor = floor.max(lo);
    }
    if br.upper - floor > tol * br.upper.max(1.0) {
        return Err(Error::IntervalNotClosed { lower: br.lower, upper: br.upper });
    }
    let cert = br.cert.take().expect("svd certificate");
    Ok(CbNorm { value: br.upper, lower: br.lower, certificate: cert })
}

#[derive(Debug, Clone)]
pub struct SectionRow {
    pub size: usize,
    pub value: f64,
    pub converged: bool,
}

/// Positions `0..k` for each `k` in `sizes`.
pub fn leading_sections(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().map(|&k| (0..k).collect()).collect()
}

/// `‖S_{m|F}‖` on nested sections `F₁ ⊂ F₂ ⊂ …` of `m`. Each estimate is
/// seeded with the previous witness embedded by zeros.
pub fn finite_section_sup(m: &SchurSymbol, sections: &[Vec<usize>], p: Exponent, budget: &Budget) -> Result<Vec<SectionRow>> {
    let mut rows = Vec::with_capacity(sections.len());
    let mut prev: Option<(Vec<usize>, CMatrix)> = None;
    for sec in sections {
        let sub = m.restrict(sec)?;
        let k = sec.len();
        let mut seeds = Vec::new();
        if let Some((pidx, w)) = &prev {
            let pos: Option<Vec<usize>> = pidx.iter().map(|i| sec.iter().position(|j| j == i)).collect();
            let pos = pos.ok_or_else(|| invalid("sections must be nested"))?;
            let mut e = CMatrix::zeros(k, k);
            for (a, &pa) in pos.iter().enumerate() {
                for (b, &pb) in pos.iter().enumerate() {
                    e[(pa, pb)] = w[(a, b)];
                }
            }
            seeds.push(e);
        }
        let est = schur_norm_estimate_seeded(&sub, p, budget, &seeds)?;
        rows.push(SectionRow { size: k, value: est.lower_bound, converged: est.converged });
        prev = Some((sec.clone(), est.witness));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferenceReport {
    pub fourier_side: f64,
    pub schur_side: f64,
}

/// `k(x) = (1/n) Σ_g m(g) e^{2πi g x / n}`.
fn inverse_dft(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|x| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(g, &v)| v * Complex64::from_polar(1.0, 2.0 * PI * ((g * x) % n) as f64 / n as f64))
                .sum();
            s / n as f64
        })
        .collect()
}

/// Fourier and Herz-Schur sides for a symbol on a cyclic group.
pub fn transference_check(m: &Symbol, p: Exponent) -> Result<TransferenceReport> {
    let g = m.group();
    match g.abelian_moduli() {
        Some(mods) if mods.len() <= 1 => {}
        _ => return Err(invalid("transference check needs a cyclic group")),
    }
    let hs = SchurSymbol::herz_schur_full(m);
    match p {
        Exponent::Finite(q) if q == 2.0 => Ok(TransferenceReport { fourier_side: m.sup_norm(), schur_side: hs.matrix.max_abs() }),
        Exponent::Infinity => {
            let k = inverse_dft(m.values());
            let l1 = k.iter().map(|z| z.norm()).sum();
            let cb = cb_inf_norm(&hs, tol::CB_NORM)?;
            Ok(TransferenceReport { fourier_side: l1, schur_side: cb.value })
        }
        other => Err(Error::InvalidExponent(other.value())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurPeriodizationReport {
    pub quotient_value: f64,
    pub lifted_value: f64,
    /// `max |P M_π P⁻¹ − M_q ⊗ J_H|` for the permutation `P` induced by `Υ`.
    pub upsilon_residual: f64,
}

/// Herz-Schur matrices of `m_q` on `G/H` and of its periodization on `G`.
/// At `p = ∞` both sides are cb norms; at other finite `p` both are ascent
/// estimates seeded with the image of the other side's witness.
pub fn schur_periodize_check(cs: &CosetStructure, m_q: &Symbol, p: Exponent, budget: &Budget) -> Result<SchurPeriodizationReport> {
    let m_pi = periodize_symbol(cs, m_q)?;
    let mq = SchurSymbol::herz_schur_full(m_q);
    let mp = SchurSymbol::herz_schur_full(&m_pi);
    let h = cs.subgroup.len();
    let order = cs.group.order();
    let pos: Vec<usize> = (0..order)
        .map(|g| {
            let (c, f) = cs.upsilon(g);
            c * h + cs.subgroup_position(f).expect("factor lies in the subgroup")
        })
        .collect();
    let kron = mq.matrix.kron(&CMatrix::from_fn(h, h, |_, _| ONE));
    let mut residual = 0.0f64;
    for a in 0..order {
        for b in 0..order {
            residual = residual.max((mp.matrix[(a, b)] - kron[(pos[a], pos[b])]).norm());
        }
    }
    let (quotient_value, lifted_value) = match p {
        Exponent::Infinity => (cb_inf_norm(&mq, tol::CB_NORM)?.value, cb_inf_norm(&mp, tol::CB_NORM)?.value),
        _ => {
            let q = schur_norm_estimate(&mq, p, budget)?;
            // A ↦ A ⊗ e_00, pulled back along Υ.
            let lift = |w: &CMatrix| {
                CMatrix::from_fn(order, order, |a, b| {
                    let (pa, pb) = (pos[a], pos[b]);
                    if pa % h == 0 && pb % h == 0 {
                        w[(pa / h, pb / h)]
                    } else {
                        ZERO
                    }
                })
            };
            let l = schur_norm_estimate_seeded(&mp, p, budget, &[lift(&q.witness)])?;
            // Compression of the lifted witness to the block `h = h' = e`.
            let k = cs.coset_count();
            let mut inv = vec![0; order];
            for (g, &x) in pos.iter().enumerate() {
                inv[x] = g;
            }
            let back = CMatrix::from_fn(k, k, |a, b| l.witness[(inv[a * h], inv[b * h])]);
            let q2 = schur_norm_estimate_seeded(&mq, p, budget, &[back])?;
            (q.lower_bound.max(q2.lower_bound), l.lower_bound)
        }
    };
    Ok(SchurPeriodizationReport { quotient_value, lifted_value, upsilon_residual: residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{CosetSide, FiniteGroup};
    use crate::matkernel::{random_matrix, random_psd};
    use crate::rng::{stream, uniform};
    use alloc::sync::Arc;
    use proptest::prelude::*;

    fn ones(n: usize) -> SchurSymbol {
        SchurSymbol::new(CMatrix::from_fn(n, n, |_, _| ONE)).unwrap()
    }

    fn rank_one(a: &[f64], b: &[f64]) -> SchurSymbol {
        SchurSymbol::new(CMatrix::from_fn(a.len(), b.len(), |i, j| Complex64::new(a[i] * b[j], 0.0))).unwrap()
    }

    #[test]
    fn apply_examples() {
        let mut r = stream(1, 0);
        let a = random_matrix(&mut r, 5, 5);
        assert_eq!(schur_apply(&ones(5), &a).unwrap(), a);
        let diag = SchurSymbol::new(CMatrix::identity(5)).unwrap();
        let d = schur_apply(&diag, &a).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(d[(i, j)], if i == j { a[(i, j)] } else { ZERO });
            }
        }
        assert!(schur_apply(&ones(4), &a).is_err());
    }

    #[test]
    fn hilbert_schmidt_bound_is_entrywise() {
        let mut r = stream(2, 0);
        let m = SchurSymbol::new(random_matrix(&mut r, 6, 6)).unwrap();
        let sup = m.matrix.max_abs();
        for _ in 0..20 {
            let a = random_matrix(&mut r, 6, 6);
            let lhs = schur_apply(&m, &a).unwrap().frobenius_norm();
            assert!(lhs <= sup * a.frobenius_norm() * (1.0 + 1e-12));
        }
        let est = schur_norm_estimate(&m, Exponent::TWO, &Budget::new(2, 10, 0)).unwrap();
        assert_eq!(est.lower_bound, sup);
    }

    #[test]
    fn ones_has_norm_one_everywhere() {
        let m = ones(6);
        for p in [Exponent::ONE, Exponent::Finite(3.0), Exponent::INF] {
            let est = schur_norm_estimate(&m, p, &Budget::new(3, 60, 1)).unwrap();
            assert!((est.lower_bound - 1.0).abs() < 1e-9, "{p}");
        }
        let cb = cb_inf_norm(&m, 1e-6).unwrap();
        assert!((cb.value - 1.0).abs() < 1e-9);
        assert!(cb.certificate.residual(&m.matrix) < 1e-7);
    }

    #[test]
    fn rank_one_symbols() {
        let mut r = stream(3, 0);
        for n in [2, 5, 9] {
            let a: Vec<f64> = (0..n).map(|_| 2.0 * uniform(&mut r) - 1.0).collect();
            let b: Vec<f64> = (0..n).map(|_| 3.0 * uniform(&mut r) - 1.0).collect();
            let want = a.iter().fold(0.0f64, |m, x| m.max(x.abs())) * b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let m = rank_one(&a, &b);
            let est = schur_norm_estimate(&m, Exponent::INF, &Budget::new(2, 40, 2)).unwrap();
            assert!((est.lower_bound - want).abs() < 1e-6);
            let cb = cb_inf_norm(&m, 1e-7).unwrap();
            assert!((cb.value - want).abs() < 1e-6, "{} {want}", cb.value);
            assert!(cb.certificate.residual(&m.matrix) < 1e-7);
        }
    }

    // Independent oracle: random search over real factorizations through R^2,
    // x_i rows of X and y_j rows of (X⁻¹ M)ᵀ.
    fn factorization_search(m: [[f64; 2]; 2], seed: u64) -> f64 {
        let mut r = stream(seed, 0);
        let value = |x: [[f64; 2]; 2]| -> f64 {
            let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
            if det.abs() < 1e-9 {
                return f64::INFINITY;
            }
            let inv = [[x[1][1] / det, -x[0][1] / det], [-x[1][0] / det, x[0][0] / det]];
            // Y^T = X^{-1} M, so y_j is column j of X^{-1} M.
            let c = |j: usize| [inv[0][0] * m[0][j] + inv[0][1] * m[1][j], inv[1][0] * m[0][j] + inv[1][1] * m[1][j]];
            let nx = (x[0][0].hypot(x[0][1])).max(x[1][0].hypot(x[1][1]));
            let (c0, c1) = (c(0), c(1));
            nx * c0[0].hypot(c0[1]).max(c1[0].hypot(c1[1]))
        };
        let mut best = [[1.0, 0.0], [0.0, 1.0]];
        let mut bv = value(best);
        let mut step = 0.5;
        for _ in 0..60000 {
            let mut cand = best;
            for row in cand.iter_mut() {
                for e in row.iter_mut() {
                    *e += step * (2.0 * uniform(&mut r) - 1.0);
                }
            }
            let v = value(cand);
            if v < bv {
                bv = v;
                best = cand;
            } else {
                step = (step * 0.9995).max(1e-5);
            }
        }
        bv
    }

    #[test]
    fn triangular_truncation_two_by_two() {
        let oracle = factorization_search([[1.0, 1.0], [0.0, 1.0]], 11);
        let m = SchurSymbol::new(CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap()).unwrap();
        let cb = cb_inf_norm(&m, 1e-8).unwrap();
        let est = schur_norm_estimate(&m, Exponent::INF, &Budget::new(8, 200, 4)).unwrap();
        assert!((cb.value - oracle).abs() < 1e-4, "{} {oracle}", cb.value);
        assert!((est.lower_bound - oracle).abs() < 1e-4, "{} {oracle}", est.lower_bound);
        assert!((cb.value - 2.0 / 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn correlation_matrices() {
        let mut r = stream(4, 0);
        for n in [3, 6, 10] {
            let p = random_psd(&mut r, n, 2);
            let d: Vec<f64> = (0..n).map(|i| p[(i, i)].re.sqrt()).collect();
            let c = CMatrix::from_fn(n, n, |i, j| p[(i, j)] / (d[i] * d[j]));
            let m = SchurSymbol::new(c).unwrap();
            let cb = cb_inf_norm(&m, 1e-6).unwrap();
            assert!(cb.value >= 1.0 - 1e-9);
            assert!((cb.value - 1.0).abs() < 1e-6, "{}", cb.value);
            let cert = &cb.certificate;
            assert!(cert.residual(&m.matrix) < 1e-7);
            // The block Gram matrix of the certificate is positive semidefinite.
            let all: Vec<Vec<Complex64>> = cert.x.iter().chain(&cert.y).cloned().collect();
            let g = CMatrix::from_fn(2 * n, 2 * n, |i, j| all[i].iter().zip(&all[j]).map(|(a, b)| a * b.conj()).sum());
            let e = hermitian_eig(&g).unwrap();
            assert!(e.values[0] > -1e-9);
        }
    }

    #[test]
    fn dykstra_fallback_certifies() {
        let mut r = stream(5, 0);
        let a = random_matrix(&mut r, 4, 4);
        let ub = {
            let mut br = Bracket { lower: 0.0, upper: f64::INFINITY, cert: None };
            weight_ascent(&a, 1e-6, 400, &mut br).unwrap();
            br.upper
        };
        let z = dykstra(&a, ub * 1.05, &CMatrix::zeros(8, 8)).unwrap();
        let (shift, cert) = certificate_from_block(&z, 4).unwrap();
        assert!(shift < 1e-6, "{shift}");
        assert!(cert.residual(&a) < 1e-7);
        assert!(cert.value() <= ub * 1.05 + 1e-6);
    }

    #[test]
    fn cb_dominates_bounded_estimate() {
        let mut r = stream(6, 0);
        for n in [3, 5, 8] {
            let m = SchurSymbol::new(random_matrix(&mut r, n, n)).unwrap();
            let cb = cb_inf_norm(&m, 1e-6).unwrap();
            let est = schur_norm_estimate(&m, Exponent::INF, &Budget::new(4, 200, 9)).unwrap();
            assert!(est.lower_bound <= cb.value + 1e-6, "{} {}", est.lower_bound, cb.value);
            assert!(cb.lower <= cb.value);
            assert!(cb.certificate.residual(&m.matrix) < 1e-7);
        }
    }

    #[test]
    fn sections() {
        let grp = Arc::new(FiniteGroup::cyclic(32).unwrap());
        let c = Symbol::constant(grp.clone(), Complex64::new(-0.7, 0.0));
        let hs = SchurSymbol::herz_schur_full(&c);
        let rows = finite_section_sup(&hs, &leading_sections(&[1, 4, 9]), Exponent::Finite(3.0), &Budget::new(2, 40, 0)).unwrap();
        for row in &rows {
            assert!((row.value - 0.7).abs() < 1e-9);
        }
        let sign = Symbol::from_fn(grp.clone(), |g| if g < 16 { ONE } else { -ONE });
        let hs = SchurSymbol::herz_schur_full(&sign);
        let first = finite_section_sup(&hs, &leading_sections(&[1]), Exponent::Finite(4.0), &Budget::new(1, 10, 0)).unwrap();
        assert_eq!(first[0].value, 1.0);
        let rows = finite_section_sup(&hs, &leading_sections(&[4, 8, 16, 32]), Exponent::Finite(4.0), &Budget::new(3, 60, 5)).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].value >= w[0].value * (1.0 - tol::SECTION_SLACK), "{:?}", rows);
        }
        assert!(finite_section_sup(&hs, &[vec![0, 1], vec![2, 3, 4]], Exponent::Finite(4.0), &Budget::new(1, 10, 0)).is_err());
    }

    #[test]
    fn transference_examples() {
        let grp = Arc::new(FiniteGroup::cyclic(8).unwrap());
        let one = Symbol::constant(grp.clone(), ONE);
        for p in [Exponent::TWO, Exponent::INF] {
            let t = transference_check(&one, p).unwrap();
            assert!((t.fourier_side - 1.0).abs() < 1e-9 && (t.schur_side - 1.0).abs() < 1e-6);
        }
        let spike = Symbol::from_fn(grp.clone(), |g| if g == 3 { ONE } else { ZERO });
        let t = transference_check(&spike, Exponent::INF).unwrap();
        assert!((t.fourier_side - 1.0).abs() < 1e-9);
        assert!((t.schur_side - 1.0).abs() < 1e-6);
        let mut r = stream(7, 0);
        for _ in 0..5 {
            let m = Symbol::new(grp.clone(), (0..8).map(|_| Complex64::new(2.0 * uniform(&mut r) - 1.0, 0.0)).collect()).unwrap();
            let t2 = transference_check(&m, Exponent::TWO).unwrap();
            assert_eq!(t2.fourier_side, t2.schur_side);
            let t = transference_check(&m, Exponent::INF).unwrap();
            assert!((t.schur_side / t.fourier_side - 1.0).abs() < tol::TRANSFERENCE, "{t:?}");
        }
        assert!(transference_check(&one, Exponent::Finite(3.0)).is_err());
        let d = Arc::new(FiniteGroup::dihedral(3).unwrap());
        assert!(transference_check(&Symbol::constant(d, ONE), Exponent::TWO).is_err());
    }

    #[test]
    fn l1_of_idft_oracle() {
        // Independent check of the Fourier side: the convolution kernel of a
        // two-frequency symbol is known in closed form.
        let n = 16;
        let grp = Arc::new(FiniteGroup::cyclic(n).unwrap());
        let m = Symbol::from_fn(grp, |g| if g == 0 || g == 5 { ONE } else { ZERO });
        let k = inverse_dft(m.values());
        let l1: f64 = k.iter().map(|z| z.norm()).sum();
        let closed: f64 = (0..n).map(|x| 2.0 * (PI * 5.0 * x as f64 / n as f64).cos().abs()).sum::<f64>() / n as f64;
        assert!((l1 - closed).abs() < 1e-12, "{l1} {closed}");
    }

    #[test]
    fn periodization() {
        let grp = Arc::new(FiniteGroup::dihedral(4).unwrap());
        let cs = CosetStructure::new(grp.clone(), &grp.center(), CosetSide::Left).unwrap();
        let q = cs.quotient.clone().unwrap();
        let one = Symbol::constant(q.clone(), ONE);
        let rep = schur_periodize_check(&cs, &one, Exponent::Finite(4.0), &Budget::new(2, 60, 0)).unwrap();
        assert!((rep.quotient_value - 1.0).abs() < 1e-9 && (rep.lifted_value - 1.0).abs() < 1e-9);
        assert_eq!(rep.upsilon_residual, 0.0);
        let mut r = stream(8, 0);
        let m = Symbol::new(q.clone(), (0..q.order()).map(|_| Complex64::new(2.0 * uniform(&mut r) - 1.0, 0.0)).collect()).unwrap();
        let rep = schur_periodize_check(&cs, &m, Exponent::Finite(4.0), &Budget::new(6, 200, 3)).unwrap();
        assert_eq!(rep.upsilon_residual, 0.0);
        assert!((rep.lifted_value / rep.quotient_value - 1.0).abs() < tol::PERIODIZATION_RATIO - 1.0, "{rep:?}");
        let rep2 = schur_periodize_check(&cs, &m, Exponent::TWO, &Budget::new(1, 10, 0)).unwrap();
        assert_eq!(rep2.quotient_value, rep2.lifted_value);
        let repi = schur_periodize_check(&cs, &m, Exponent::INF, &Budget::new(1, 10, 0)).unwrap();
        assert!((repi.lifted_value - repi.quotient_value).abs() < 1e-5, "{repi:?}");
        // Trivial subgroup: the quotient is G itself.
        let triv = CosetStructure::new(grp.clone(), &[0], CosetSide::Left).unwrap();
        let mq = Symbol::new(triv.quotient.clone().unwrap(), m.values().iter().cycle().take(8).cloned().collect()).unwrap();
        let rep = schur_periodize_check(&triv, &mq, Exponent::Finite(4.0), &Budget::new(2, 60, 0)).unwrap();
        assert_eq!(rep.upsilon_residual, 0.0);
        assert!((rep.lifted_value / rep.quotient_value - 1.0).abs() < 1e-3, "{rep:?}");
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let nn = CosetStructure::new(s3.clone(), &s3.generate(&[1]), CosetSide::Left).unwrap();
        if !nn.normal {
            assert!(schur_periodize_check(&nn, &one, Exponent::TWO, &Budget::new(1, 1, 0)).is_err());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn restriction_is_monotone(seed in any::<u64>(), n in 2usize..7, drop in 0usize..6) {
            let mut r = stream(seed, 0);
            let m = SchurSymbol::new(random_matrix(&mut r, n, n)).unwrap();
            let idx: Vec<usize> = (0..n).filter(|&i| i != drop % n).collect();
            let full = cb_inf_norm(&m, 1e-6).unwrap();
            let part = cb_inf_norm(&m.restrict(&idx).unwrap(), 1e-6).unwrap();
            prop_assert!(part.value <= full.value + 1e-6 * full.value.max(1.0));
            prop_assert!(full.certificate.restrict(&idx).residual(&m.restrict(&idx).unwrap().matrix) < 1e-7);
        }

        #[test]
        fn certificates_reproduce(seed in any::<u64>(), n in 1usize..8) {
            let mut r = stream(seed, 1);
            let m = SchurSymbol::new(random_matrix(&mut r, n, n)).unwrap();
            let cb = cb_inf_norm(&m, 1e-6).unwrap();
            prop_assert!(cb.certificate.residual(&m.matrix) < tol::FACTORIZATION);
            prop_assert!((cb.certificate.value() - cb.value).abs() < 1e-12 * cb.value.max(1.0));
            prop_assert!(cb.lower <= cb.value * (1.0 + 1e-12));
        }
    }
}
