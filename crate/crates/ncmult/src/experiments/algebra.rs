//! Suites on finite group von Neumann algebras.

use std::sync::Arc;

use ncmult_core::deleeuw::{periodization_check, PeriodizationReport};
use ncmult_core::groups::{CosetSide, CosetStructure, FiniteGroup};
use ncmult_core::matkernel::{random_matrix, CMatrix};
use ncmult_core::rng::{complex_normal, Rng};
use ncmult_core::vna::{self, AlgebraElement, Budget, Subgroup, Symbol};
use ncmult_core::{tol, Exponent};
use num_complex::Complex64;

use super::{core_err, exp_label, instance_rng, par_map};
use crate::config::Params;
use crate::formats::{named_group, read_group, write_group};
use crate::output::{mark, num, Outcome, Table};

fn random_symbol(r: &mut Rng, g: &Arc<FiniteGroup>) -> Symbol {
    let values = (0..g.order()).map(|_| complex_normal(r)).collect();
    Symbol::new(g.clone(), values).expect("finite values")
}

fn budget(params: &Params, seed: u64) -> Result<Budget, String> {
    Ok(Budget::new(params.count("restarts").map_err(|e| e.0)?, params.count("iterations").map_err(|e| e.0)?, seed))
}

/// Every group construction available, up to the given order.
fn group_zoo(max_order: usize) -> Result<Vec<FiniteGroup>, String> {
    let e = |x: ncmult_core::Error| x.to_string();
    let mut out = Vec::new();
    for n in 1..=max_order {
        out.push(FiniteGroup::cyclic(n).map_err(e)?);
    }
    for n in 2..=max_order / 2 {
        out.push(FiniteGroup::dihedral(n).map_err(e)?);
    }
    for n in [3usize, 4, 5] {
        let g = FiniteGroup::symmetric(n).map_err(e)?;
        if g.order() <= max_order {
            out.push(g);
        }
    }
    for n in 2..=max_order {
        if n * n * n > max_order {
            break;
        }
        out.push(FiniteGroup::heisenberg_mod(n).map_err(e)?);
    }
    for moduli in [&[2usize, 2][..], &[2, 2, 2], &[3, 3], &[4, 4], &[2, 4, 8], &[2, 2, 2, 2, 2, 2], &[2, 3, 5]] {
        let label = format!("abelian{}", moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("."));
        let g = FiniteGroup::abelian(moduli, label).map_err(e)?;
        if g.order() <= max_order {
            out.push(g);
        }
    }
    let pairs = [
        (FiniteGroup::dihedral(4), FiniteGroup::cyclic(3)),
        (FiniteGroup::symmetric(3), FiniteGroup::cyclic(2)),
        (FiniteGroup::heisenberg_mod(2), FiniteGroup::cyclic(2)),
        (FiniteGroup::dihedral(3), FiniteGroup::dihedral(3)),
        (FiniteGroup::symmetric(3), FiniteGroup::symmetric(3)),
    ];
    for (a, b) in pairs {
        let g = FiniteGroup::product(&a.map_err(e)?, &b.map_err(e)?).map_err(e)?;
        if g.order() <= max_order {
            out.push(g);
        }
    }
    // The same groups once more as bare tables, as read from the text format.
    for g in [FiniteGroup::cyclic(12), FiniteGroup::dihedral(5), FiniteGroup::heisenberg_mod(3)] {
        let g = g.map_err(e)?;
        if g.order() <= max_order {
            let label = format!("{}-table", g.label());
            out.push(read_group(&write_group(&g.with_label(&label))).map_err(|u| u.0)?);
        }
    }
    Ok(out)
}

/// `τ(x) = tr λ(x) / |G|` computed from the regular representation.
fn trace_via_matrix(x: &AlgebraElement) -> Complex64 {
    vna::regular_rep(x).trace() / x.group().order() as f64
}

pub fn plancherel(params: &Params, seed: u64) -> Result<Outcome, String> {
    let max_order = params.count("max_order").map_err(|e| e.0)?;
    let groups: Vec<Arc<FiniteGroup>> = group_zoo(max_order)?.into_iter().map(Arc::new).collect();
    let idx: Vec<usize> = (0..groups.len()).collect();
    let rows = par_map(&idx, |&i| -> Result<(bool, f64, f64), String> {
        let g = &groups[i];
        let mut r = instance_rng(seed, 5, i as u64);
        let f = AlgebraElement::random(g.clone(), &mut r);
        let h = AlgebraElement::random(g.clone(), &mut r);
        let ff = vna::convolve(&f.adjoint(), &f).map_err(core_err)?;
        let sum: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let scale = sum.max(1.0);
        let l2 = vna::lp_norm(&f, Exponent::TWO).map_err(core_err)?;
        let plancherel_err = [
            (vna::plancherel_trace(&ff) - sum).norm(),
            (trace_via_matrix(&ff) - sum).norm(),
            (l2 * l2 - sum).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / scale;
        let fh = vna::convolve(&f, &h).map_err(core_err)?;
        let hf = vna::convolve(&h, &f).map_err(core_err)?;
        let t1 = vna::plancherel_trace(&fh);
        let trace_err = (t1 - vna::plancherel_trace(&hf)).norm().max((t1 - trace_via_matrix(&hf)).norm()) / t1.norm().max(1.0);
        Ok((g.verify_axioms(), plancherel_err, trace_err))
    });
    let mut table = Table::new("plancherel", &["group", "order", "axioms", "plancherel_err", "trace_err", "pass"]);
    let (mut fails, mut worst) = (0, 0.0f64);
    for (g, row) in groups.iter().zip(rows) {
        let (axioms, pe, te) = row?;
        let ok = axioms && pe <= tol::PLANCHEREL && te <= tol::PLANCHEREL;
        fails += usize::from(!ok);
        worst = worst.max(pe).max(te);
        table.push(vec![g.label().to_string(), g.order().to_string(), axioms.to_string(), num(pe), num(te), mark(ok)]);
    }
    let mut out = Outcome::default();
    out.check(
        "identities",
        fails == 0,
        format!("{} groups of order <= {max_order}, worst relative error {worst:.2e}", groups.len()),
    );
    out.table(table);
    Ok(out)
}

fn restriction_pairs() -> Result<Vec<(&'static str, Subgroup)>, String> {
    let e = |x: ncmult_core::Error| x.to_string();
    let c12 = Arc::new(FiniteGroup::cyclic(12).map_err(e)?);
    let heis = Arc::new(FiniteGroup::heisenberg_mod(2).map_err(e)?);
    let d4 = Arc::new(FiniteGroup::dihedral(4).map_err(e)?);
    let center = heis.center();
    // In dihedral(n), indices 0..n are the rotations.
    Ok(vec![
        ("cyclic12/cyclic4", Subgroup::new(c12.clone(), &c12.generate(&[3])).map_err(e)?),
        ("heisenberg2/center", Subgroup::new(heis.clone(), &center).map_err(e)?),
        ("dihedral4/rotations", Subgroup::new(d4.clone(), &d4.generate(&[1])).map_err(e)?),
    ])
}

pub fn restriction(params: &Params, seed: u64) -> Result<Outcome, String> {
    let symbols = params.count("symbols").map_err(|e| e.0)?;
    let exps = params.exps("exps").to_vec();
    let pairs = restriction_pairs()?;
    let mut jobs = Vec::new();
    for pi in 0..pairs.len() {
        for s in 0..symbols {
            jobs.push((pi, s));
        }
    }
    let rows = par_map(&jobs, |&(pi, s)| -> Result<Vec<(Exponent, f64, f64)>, String> {
        let sub = &pairs[pi].1;
        let id = (pi as u64) << 24 | s as u64;
        let mut r = instance_rng(seed, 6, id);
        let m = random_symbol(&mut r, &sub.parent);
        let m_h = m.restrict(sub).map_err(core_err)?;
        let b = budget(params, seed ^ id.wrapping_mul(0x9e37_79b9))?;
        let mut out = Vec::new();
        for &p in &exps {
            let est_h = vna::multiplier_norm_estimate(&m_h, p, &b).map_err(core_err)?;
            let start = sub.include(&est_h.witness).map_err(core_err)?;
            let est_g = vna::multiplier_norm_estimate_seeded(&m, p, &b, &[start]).map_err(core_err)?;
            out.push((p, est_h.lower_bound, est_g.lower_bound));
        }
        Ok(out)
    });
    let mut table = Table::new("restriction", &["pair", "symbol", "p", "est_h", "est_g", "ratio", "pass"]);
    let (mut fails, mut worst) = (0, 0.0f64);
    for (&(pi, s), row) in jobs.iter().zip(rows) {
        for (p, h, g) in row? {
            let ratio = h / g;
            // At p = 2 both sides are exact sup norms and no slack is allowed.
            let ok = if p == Exponent::TWO { h <= g } else { h <= g * tol::RESTRICTION_RATIO };
            fails += usize::from(!ok);
            worst = worst.max(ratio);
            table.push(vec![pairs[pi].0.to_string(), s.to_string(), exp_label(p), num(h), num(g), num(ratio), mark(ok)]);
        }
    }
    let mut out = Outcome::default();
    out.check("restriction", fails == 0, format!("max est_H/est_G {worst:.6}, {fails} violations"));
    out.table(table);
    Ok(out)
}

pub fn periodization(params: &Params, seed: u64) -> Result<Outcome, String> {
    let symbols = params.count("symbols").map_err(|e| e.0)?;
    let exps = params.exps("exps").to_vec();
    let names: Vec<String> = params.text("group").split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err("group must name at least one group".into());
    }
    let mut structures = Vec::new();
    for name in &names {
        let g = Arc::new(named_group(name).map_err(|e| e.0)?);
        let center = g.center();
        structures.push(CosetStructure::new(g, &center, CosetSide::Left).map_err(core_err)?);
    }
    let mut jobs = Vec::new();
    for gi in 0..structures.len() {
        for s in 0..symbols {
            jobs.push((gi, s));
        }
    }
    let rows = par_map(&jobs, |&(gi, s)| -> Result<Vec<(Exponent, PeriodizationReport)>, String> {
        let cs = &structures[gi];
        let quotient = cs.quotient.clone().ok_or("center is normal")?;
        let id = (gi as u64) << 24 | s as u64;
        let mut r = instance_rng(seed, 9, id);
        let m_q = random_symbol(&mut r, &quotient);
        let b = budget(params, seed ^ id.wrapping_mul(0x9e37_79b9))?;
        exps.iter().map(|&p| Ok((p, periodization_check(cs, &m_q, p, &b).map_err(core_err)?))).collect()
    });
    let mut table = Table::new(
        "periodization",
        &["group", "symbol", "p", "projection", "central", "intertwine", "quotient", "lifted", "ratio", "pass"],
    );
    let (mut proj_fail, mut inter_fail, mut norm_fail) = (0, 0, 0);
    let (mut worst_proj, mut worst_inter, mut worst_ratio) = (0.0f64, 0.0f64, 0.0f64);
    for (&(gi, s), row) in jobs.iter().zip(rows) {
        for (p, rep) in row? {
            let proj = rep.projection_residual.max(rep.central_residual);
            let ratio = rep.quotient_estimate / rep.lifted_estimate;
            let ok_proj = proj <= tol::PROJECTION;
            let ok_inter = rep.intertwine_residual <= tol::INTERTWINING;
            let ok_norm = ratio <= tol::PERIODIZATION_RATIO;
            proj_fail += usize::from(!ok_proj);
            inter_fail += usize::from(!ok_inter);
            norm_fail += usize::from(!ok_norm);
            worst_proj = worst_proj.max(proj);
            worst_inter = worst_inter.max(rep.intertwine_residual);
            worst_ratio = worst_ratio.max(ratio);
            table.push(vec![
                names[gi].clone(),
                s.to_string(),
                exp_label(p),
                num(rep.projection_residual),
                num(rep.central_residual),
                num(rep.intertwine_residual),
                num(rep.quotient_estimate),
                num(rep.lifted_estimate),
                num(ratio),
                mark(ok_proj && ok_inter && ok_norm),
            ]);
        }
    }
    let mut out = Outcome::default();
    out.check("projection", proj_fail == 0, format!("max residual {worst_proj:.2e}"));
    out.check("intertwining", inter_fail == 0, format!("max residual {worst_inter:.2e}"));
    out.check("norm", norm_fail == 0, format!("max quotient/lifted {worst_ratio:.6}"));
    out.table(table);
    Ok(out)
}

pub fn fell(params: &Params, seed: u64) -> Result<Outcome, String> {
    let orders = params.counts("orders").map_err(|e| e.0)?;
    let k = params.count("k").map_err(|e| e.0)?;
    let trials = params.count("trials").map_err(|e| e.0)?;
    let mut jobs = Vec::new();
    for &n in &orders {
        for t in 0..trials {
            jobs.push((n, t));
        }
    }
    let rows = par_map(&jobs, |&(n, t)| -> Result<vna::FellReport, String> {
        let g = Arc::new(FiniteGroup::cyclic(n).map_err(core_err)?);
        let mut r = instance_rng(seed, 11, (n as u64) << 24 | t as u64);
        let a: Vec<CMatrix> = (0..n).map(|_| random_matrix(&mut r, k, k)).collect();
        // π = χ_1 ⊕ χ_t: two characters of ℤ_n.
        let chi = |freq: usize, x: usize| Complex64::from_polar(1.0, std::f64::consts::TAU * (freq * x % n) as f64 / n as f64);
        let pi: Vec<CMatrix> = (0..n)
            .map(|x| {
                let mut m = CMatrix::zeros(2, 2);
                m[(0, 0)] = chi(1, x);
                m[(1, 1)] = chi(t % n, x);
                m
            })
            .collect();
        vna::fell_absorption_check(&g, &a, &pi).map_err(core_err)
    });
    let mut table = Table::new("fell", &["n", "trial", "p2_lhs", "p2_rhs", "pinf_lhs", "pinf_rhs", "p2_err", "pinf_err", "pass"]);
    let (mut fails, mut w2, mut winf) = (0, 0.0f64, 0.0f64);
    for (&(n, t), row) in jobs.iter().zip(rows) {
        let rep = row?;
        let e2 = (rep.p2.0 - rep.p2.1).abs();
        let einf = (rep.pinf.0 - rep.pinf.1).abs();
        let ok = e2 <= tol::FELL_P2 && einf <= tol::FELL_OPERATOR;
        fails += usize::from(!ok);
        w2 = w2.max(e2);
        winf = winf.max(einf);
        table.push(vec![
            n.to_string(),
            t.to_string(),
            num(rep.p2.0),
            num(rep.p2.1),
            num(rep.pinf.0),
            num(rep.pinf.1),
            num(e2),
            num(einf),
            mark(ok),
        ]);
    }
    let mut out = Outcome::default();
    out.check("absorption", fails == 0, format!("max p=2 gap {w2:.2e}, max operator gap {winf:.2e}"));
    out.table(table);
    Ok(out)
}
