//! Matrix inequality suites on random positive maps and states.

use ncmult_core::almostmult::{self, GapReport, KrausMap};
use ncmult_core::matkernel::{psd_sqrt, random_hermitian, random_matrix, random_psd, CMatrix};
use ncmult_core::rng::{below, uniform, uniform_range, Rng};
use ncmult_core::{tol, Exponent};

use super::{core_err, exp_label, instance_rng, par_map, random_state};
use crate::config::Params;
use crate::output::{mark, num, Outcome, Table};

fn random_map(r: &mut Rng, n: usize, max_kraus: usize, twist: bool) -> Result<KrausMap, String> {
    let k = 1 + below(r, max_kraus.max(1));
    KrausMap::random(r, n, k, twist).map_err(core_err)
}

/// Mostly the identity plus a small random perturbation, so `T(x) − x` is small.
fn near_identity_map(r: &mut Rng, n: usize, twist: bool) -> Result<KrausMap, String> {
    let eps = 10f64.powf(uniform_range(r, -4.0, -0.5));
    let raw = vec![CMatrix::identity(n), random_matrix(r, n, n).scale_real(eps)];
    KrausMap::normalized(raw, twist).map_err(core_err)
}

fn gap_cells(g: &GapReport) -> [String; 3] {
    [num(g.lhs), num(g.rhs), num(g.slack)]
}

pub fn theorem_b(params: &Params, seed: u64) -> Result<Outcome, String> {
    let instances = params.count("instances").map_err(|e| e.0)?;
    let dims = params.counts("dims").map_err(|e| e.0)?;
    let max_kraus = params.count("max_kraus").map_err(|e| e.0)?;
    let exps = params.exps("exps");
    let mut jobs = Vec::new();
    for &n in &dims {
        for &p in exps {
            for i in 0..instances {
                jobs.push((n, p, i));
            }
        }
    }
    let rows = par_map(&jobs, |&(n, p, i)| -> Result<(GapReport, bool, u64), String> {
        let id = (n as u64) << 24 | (i as u64);
        let mut r = instance_rng(seed, 1, id);
        // Every other instance composes with the transpose.
        let twist = i % 2 == 1;
        let t = random_map(&mut r, n, max_kraus, twist)?;
        let x = random_state(&mut r, n);
        Ok((almostmult::theorem_b_gap(&t, &x, p).map_err(core_err)?, twist, id))
    });
    let mut table = Table::new("theoremB", &["seed", "instance", "n", "p", "theta", "lhs", "rhs", "slack", "twist", "pass"]);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for (&(n, p, _), row) in jobs.iter().zip(rows) {
        let (g, twist, id) = row?;
        let ok = g.slack >= tol::THEOREM_B_SLACK;
        failures += usize::from(!ok);
        worst = worst.min(g.slack);
        let [l, rh, s] = gap_cells(&g);
        table.push(vec![seed.to_string(), id.to_string(), n.to_string(), exp_label(p), String::new(), l, rh, s, twist.to_string(), mark(ok)]);
    }
    let mut out = Outcome::default();
    out.check(
        "slack",
        failures == 0,
        format!("{} instances, min slack {:.3e}, {failures} below {:e}", jobs.len(), worst, tol::THEOREM_B_SLACK),
    );
    out.table(table);
    Ok(out)
}

pub fn lemma11(params: &Params, seed: u64) -> Result<Outcome, String> {
    let instances = params.count("instances").map_err(|e| e.0)?;
    let n = params.count("n").map_err(|e| e.0)?;
    let (s_max, h) = (params.float("s_max"), params.float("h"));
    let exps = params.exps("exps").to_vec();
    let ids: Vec<usize> = (0..instances).collect();
    type Row = (f64, Vec<(Exponent, &'static str, GapReport)>);
    let rows = par_map(&ids, |&i| -> Result<Row, String> {
        let mut r = instance_rng(seed, 2, i as u64);
        let alpha = random_psd(&mut r, n, n).scale_real(uniform_range(&mut r, 0.1, 3.0));
        let beta = random_psd(&mut r, n, n).scale_real(uniform_range(&mut r, 0.1, 3.0));
        let gamma = random_matrix(&mut r, n, n);
        let quad = almostmult::lemma11_quadrature(&alpha, &beta, &gamma, s_max, h).map_err(core_err)?;
        let exact = psd_sqrt(&alpha).map_err(core_err)?.mul(&gamma).mul(&psd_sqrt(&beta).map_err(core_err)?);
        let err = quad.sub(&exact).frobenius_norm();
        let herm = random_hermitian(&mut r, n);
        let mut gaps = Vec::new();
        for &p in &exps {
            gaps.push((p, "mean", almostmult::lemma11_mean_gap(&alpha, &beta, &gamma, p).map_err(core_err)?));
            gaps.push((p, "symmetric", almostmult::lemma11_symmetric_gap(&alpha, &herm, p).map_err(core_err)?));
        }
        Ok((err, gaps))
    });
    let mut quad = Table::new("quadrature", &["seed", "instance", "n", "error", "pass"]);
    let mut ineq = Table::new("lemma11", &["seed", "instance", "n", "p", "part", "lhs", "rhs", "slack", "pass"]);
    let (mut worst_err, mut worst_slack) = (0.0f64, f64::INFINITY);
    let (mut quad_fail, mut ineq_fail) = (0, 0);
    for (i, row) in rows.into_iter().enumerate() {
        let (err, gaps) = row?;
        let ok = err <= tol::LEMMA11_QUADRATURE;
        quad_fail += usize::from(!ok);
        worst_err = worst_err.max(err);
        quad.push(vec![seed.to_string(), i.to_string(), n.to_string(), num(err), mark(ok)]);
        for (p, part, g) in gaps {
            let ok = g.slack >= tol::LEMMA11_SLACK;
            ineq_fail += usize::from(!ok);
            worst_slack = worst_slack.min(g.slack);
            let [l, rh, s] = gap_cells(&g);
            ineq.push(vec![seed.to_string(), i.to_string(), n.to_string(), exp_label(p), part.to_string(), l, rh, s, mark(ok)]);
        }
    }
    let mut out = Outcome::default();
    out.check("quadrature", quad_fail == 0, format!("max Frobenius error {worst_err:.3e} (limit {:e})", tol::LEMMA11_QUADRATURE));
    out.check("inequalities", ineq_fail == 0, format!("min slack {worst_slack:.3e} (limit {:e})", tol::LEMMA11_SLACK));
    out.table(quad);
    out.table(ineq);
    Ok(out)
}

pub fn powers_stormer(params: &Params, seed: u64) -> Result<Outcome, String> {
    let instances = params.count("instances").map_err(|e| e.0)?;
    let dims = params.counts("dims").map_err(|e| e.0)?;
    if dims.is_empty() {
        return Err("dims must not be empty".into());
    }
    let thetas = params.floats("thetas").to_vec();
    let exps = params.exps("exps").to_vec();
    let mut jobs = Vec::new();
    for (ti, &theta) in thetas.iter().enumerate() {
        for i in 0..instances {
            jobs.push((ti, theta, i));
        }
    }
    type Row = (usize, Vec<(Exponent, GapReport)>);
    let rows = par_map(&jobs, |&(ti, theta, i)| -> Result<Row, String> {
        let mut r = instance_rng(seed, 3, (ti as u64) << 24 | i as u64);
        let n = dims[below(&mut r, dims.len())];
        let x = random_state(&mut r, n);
        // Half of the pairs are close, where the inequality is tightest.
        let y = if uniform(&mut r) < 0.5 {
            random_state(&mut r, n)
        } else {
            let e = 10f64.powf(uniform_range(&mut r, -6.0, -1.0));
            x.add(&random_psd(&mut r, n, 1).scale_real(e))
        };
        let mut gaps = Vec::new();
        for &p in &exps {
            if p.value() * theta >= 1.0 {
                gaps.push((p, almostmult::powers_stormer_gap(&x, &y, theta, p).map_err(core_err)?));
            }
        }
        Ok((n, gaps))
    });
    let mut table = Table::new("powers_stormer", &["seed", "instance", "n", "p", "theta", "lhs", "rhs", "slack", "pass"]);
    let (mut fails, mut worst, mut count) = (0, f64::INFINITY, 0);
    for (&(_, theta, i), row) in jobs.iter().zip(rows) {
        let (n, gaps) = row?;
        for (p, g) in gaps {
            let ok = g.slack >= tol::POWERS_STORMER_SLACK;
            fails += usize::from(!ok);
            worst = worst.min(g.slack);
            count += 1;
            let [l, rh, s] = gap_cells(&g);
            table.push(vec![seed.to_string(), i.to_string(), n.to_string(), exp_label(p), format!("{theta}"), l, rh, s, mark(ok)]);
        }
    }
    let mut out = Outcome::default();
    out.check("slack", fails == 0 && count > 0, format!("{count} evaluations, min slack {worst:.3e}"));
    out.table(table);
    Ok(out)
}

pub fn corollaries(params: &Params, seed: u64) -> Result<Outcome, String> {
    let instances = params.count("instances").map_err(|e| e.0)?;
    let dims = params.counts("dims").map_err(|e| e.0)?;
    let thetas = params.floats("thetas").to_vec();
    let mut jobs = Vec::new();
    for &n in &dims {
        for (ti, &theta) in thetas.iter().enumerate() {
            for i in 0..instances {
                jobs.push((n, ti, theta, i));
            }
        }
    }
    let rows = par_map(&jobs, |&(n, ti, theta, i)| -> Result<(GapReport, GapReport, bool), String> {
        let mut r = instance_rng(seed, 4, (n as u64) << 32 | (ti as u64) << 24 | i as u64);
        let twist = i % 4 == 3;
        let t = if i % 2 == 0 { near_identity_map(&mut r, n, twist)? } else { random_map(&mut r, n, 3, twist)? };
        let x = random_state(&mut r, n);
        let y = random_hermitian(&mut r, n);
        let c13 = almostmult::cor13_gap(&t, &x, theta).map_err(core_err)?;
        let c14 = almostmult::cor14_gap(&t, &y, theta).map_err(core_err)?;
        Ok((c13, c14, twist))
    });
    let mut table = Table::new("corollaries", &["suite", "seed", "instance", "n", "p", "theta", "lhs", "rhs", "slack", "twist", "pass"]);
    let mut stats = [(0usize, 0.0f64, f64::INFINITY, 0usize); 2];
    let names = ["positive", "hermitian"];
    for (&(n, _, theta, i), row) in jobs.iter().zip(rows) {
        let (c13, c14, twist) = row?;
        for (s, g) in [c13, c14].iter().enumerate() {
            let ok = g.slack >= tol::COROLLARY_SLACK;
            let st = &mut stats[s];
            st.0 += 1;
            st.1 = st.1.max(g.ratio());
            st.2 = st.2.min(g.slack);
            st.3 += usize::from(!ok);
            let [l, rh, sl] = gap_cells(g);
            table.push(vec![
                names[s].to_string(),
                seed.to_string(),
                i.to_string(),
                n.to_string(),
                num(2.0 / theta),
                format!("{theta}"),
                l,
                rh,
                sl,
                twist.to_string(),
                mark(ok),
            ]);
        }
    }
    let mut summary = Table::new("corollary_summary", &["suite", "constant", "instances", "max_ratio", "min_slack"]);
    let mut out = Outcome::default();
    for (s, c) in [almostmult::COR13_CONSTANT, almostmult::COR14_CONSTANT].iter().enumerate() {
        let (count, ratio, slack, fails) = stats[s];
        summary.push(vec![names[s].to_string(), num(*c), count.to_string(), num(ratio), num(slack)]);
        out.check(
            names[s],
            fails == 0,
            format!("C = {c:.6}: {count} instances, max lhs/rhs {ratio:.4}, min slack {slack:.3e}"),
        );
    }
    out.table(table);
    out.table(summary);
    Ok(out)
}
