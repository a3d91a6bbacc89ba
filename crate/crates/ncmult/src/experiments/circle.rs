//! Circle surrogates: lattice approximation, restriction maps, windows,
//! thresholds and the Jodeit extension.

use std::sync::Arc;

use ncmult_core::almostmult::threshold_select;
use ncmult_core::deleeuw::{
    folner_sain_witness, jodeit_extend, lattice_step, restriction_defect_circle, restriction_defect_finite, window_isometry_check,
    CellAction, CircleElement, CircleSymbol, RationalPoint,
};
use ncmult_core::groups::FiniteGroup;
use ncmult_core::rng::{below, complex_normal, uniform, uniform_range, Rng};
use ncmult_core::vna::{self, AlgebraElement, Budget, Subgroup, Symbol};
use ncmult_core::{tol, Exponent};
use num_complex::Complex64;

use super::{core_err, instance_rng, par_map};
use crate::config::Params;
use crate::output::{mark, num, Outcome, Table};

pub fn lattice_approx(params: &Params, seed: u64) -> Result<Outcome, String> {
    let cutoff = params.count("cutoff").map_err(|e| e.0)?;
    let guard = params.count("guard").map_err(|e| e.0)?;
    let levels: Vec<u32> = params.counts("levels").map_err(|e| e.0)?.into_iter().map(|j| j as u32).collect();
    if levels.is_empty() {
        return Err("levels must not be empty".into());
    }
    let symbols = [
        ("sawtooth", CircleSymbol::Sawtooth),
        ("smoothed-indicator", CircleSymbol::SmoothedIndicator { ramp: params.float("ramp") }),
    ];
    let mut r = instance_rng(seed, 7, 0);
    let f = CircleElement::random(cutoff, &mut r);
    let fnorm = f.l2_norm();
    let mut table = Table::new("lattice", &["symbol", "j", "defect", "relative_defect", "tail", "pass"]);
    let mut out = Outcome::default();
    let (mut final_ok, mut trend_ok) = (true, true);
    let mut details = Vec::new();
    for (name, m) in symbols {
        let steps: Vec<Result<_, String>> = par_map(&levels, |&j| lattice_step(&m, &f, j, guard).map_err(core_err));
        let mut prev: Option<f64> = None;
        let mut last = f64::NAN;
        for (&j, step) in levels.iter().zip(steps) {
            let step = step?;
            let rel = step.defect / fnorm;
            let trend = prev.is_none_or(|p| rel <= p * (1.0 + tol::LATTICE_RIPPLE));
            trend_ok &= trend;
            prev = Some(rel);
            last = rel;
            let ok = trend && (j != *levels.last().unwrap() || rel < tol::LATTICE_DEFECT);
            table.push(vec![name.to_string(), j.to_string(), num(step.defect), num(rel), num(step.tail), mark(ok)]);
        }
        final_ok &= last < tol::LATTICE_DEFECT;
        details.push(format!("{name} {last:.3e}"));
    }
    out.check(
        "final",
        final_ok,
        format!("relative defect at j = {}: {} (limit {:e})", levels.last().unwrap(), details.join(", "), tol::LATTICE_DEFECT),
    );
    out.check("trend", trend_ok, format!("nonincreasing within {}% ripple", tol::LATTICE_RIPPLE * 100.0));
    out.table(table);
    Ok(out)
}

struct FiniteSetting {
    name: &'static str,
    sub: Subgroup,
    window: Vec<usize>,
}

fn symmetric_closure(g: &FiniteGroup, w: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = w.iter().flat_map(|&x| [x, g.inv(x)]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn finite_settings() -> Result<Vec<FiniteSetting>, String> {
    let c12 = Arc::new(FiniteGroup::cyclic(12).map_err(core_err)?);
    let c20 = Arc::new(FiniteGroup::cyclic(20).map_err(core_err)?);
    let h3 = Arc::new(FiniteGroup::heisenberg_mod(3).map_err(core_err)?);
    let center = h3.center();
    Ok(vec![
        FiniteSetting { name: "cyclic12/cyclic3", sub: Subgroup::new(c12.clone(), &[0, 4, 8]).map_err(core_err)?, window: vec![11, 0, 1] },
        FiniteSetting {
            name: "cyclic20/cyclic4",
            sub: Subgroup::new(c20.clone(), &[0, 5, 10, 15]).map_err(core_err)?,
            window: vec![18, 19, 0, 1, 2],
        },
        FiniteSetting {
            name: "heisenberg3/center",
            window: symmetric_closure(&h3, &[0, 3, 6, 9, 18]),
            sub: Subgroup::new(h3, &center).map_err(core_err)?,
        },
    ])
}

pub fn restriction_machinery(params: &Params, seed: u64) -> Result<Outcome, String> {
    let trials = params.count("trials").map_err(|e| e.0)?;
    let levels: Vec<u32> = params.counts("levels").map_err(|e| e.0)?.into_iter().map(|j| j as u32).collect();
    let q = Exponent::new(params.float("q")).map_err(core_err)?;
    let settings = finite_settings()?;
    let mut jobs = Vec::new();
    for si in 0..settings.len() {
        for t in 0..trials {
            jobs.push((si, t));
        }
    }
    let rows = par_map(&jobs, |&(si, t)| {
        let s = &settings[si];
        let mut r = instance_rng(seed, 8, (si as u64) << 24 | t as u64);
        let f = AlgebraElement::random(s.sub.group.clone(), &mut r);
        let k = AlgebraElement::random(s.sub.group.clone(), &mut r);
        let values = (0..s.sub.parent.order()).map(|_| complex_normal(&mut r)).collect();
        let m = Symbol::new(s.sub.parent.clone(), values).map_err(core_err)?;
        restriction_defect_finite(&s.sub, &s.window, &m, q, &f, &k).map_err(core_err)
    });
    let mut iso = Table::new("isometry", &["setting", "trial", "isometry_residual", "claim_a_gap", "claim_b_defect", "pass"]);
    let (mut iso_fail, mut worst_iso) = (0, 0.0f64);
    for (&(si, t), row) in jobs.iter().zip(rows) {
        let rep = row?;
        let ok = rep.isometry_residual <= tol::ISOMETRY;
        iso_fail += usize::from(!ok);
        worst_iso = worst_iso.max(rep.isometry_residual);
        iso.push(vec![
            settings[si].name.to_string(),
            t.to_string(),
            num(rep.isometry_residual),
            num(rep.claim_a_gap),
            num(rep.claim_b_defect),
            mark(ok),
        ]);
    }
    let symbols = [
        ("sawtooth", CircleSymbol::Sawtooth),
        ("smoothed-indicator", CircleSymbol::SmoothedIndicator { ramp: 0.1 }),
        ("tent", CircleSymbol::Tent { half_width: 0.3 }),
    ];
    let mut claim = Table::new("claim_b", &["symbol", "j", "claim_b_defect", "isometry_residual", "pass"]);
    let mut decreasing = true;
    let mut summary = Vec::new();
    let one = [Complex64::new(1.0, 0.0)];
    for (name, m) in symbols {
        let reps = par_map(&levels, |&j| restriction_defect_circle(1, j, &m, q, &one, 64 << j).map_err(core_err));
        let mut prev = f64::INFINITY;
        let mut first = f64::NAN;
        for (&j, rep) in levels.iter().zip(reps) {
            let rep = rep?;
            let ok = rep.claim_b_defect < prev;
            decreasing &= ok;
            if first.is_nan() {
                first = rep.claim_b_defect;
            }
            prev = rep.claim_b_defect;
            claim.push(vec![name.to_string(), j.to_string(), num(rep.claim_b_defect), num(rep.isometry_residual), mark(ok)]);
        }
        summary.push(format!("{name} {first:.2e} -> {prev:.2e}"));
    }
    let mut out = Outcome::default();
    out.check("isometry", iso_fail == 0, format!("max finite-group residual {worst_iso:.2e}"));
    out.check("claim-b", decreasing, format!("defect at q = {}: {}", q.value(), summary.join(", ")));
    out.table(iso);
    out.table(claim);
    Ok(out)
}

/// Distinct random numerators in `0..den`.
fn distinct(r: &mut Rng, count: usize, den: u64) -> Vec<u64> {
    let mut v: Vec<u64> = Vec::with_capacity(count);
    while v.len() < count {
        let x = below(r, den as usize) as u64;
        if !v.contains(&x) {
            v.push(x);
        }
    }
    v
}

pub fn window_isometry(params: &Params, seed: u64) -> Result<Outcome, String> {
    let configs = params.count("configs").map_err(|e| e.0)?;
    let max_points = params.count("max_points").map_err(|e| e.0)?.max(2);
    let ids: Vec<usize> = (0..configs).collect();
    let rows = par_map(&ids, |&i| -> Result<(usize, u64, u64, f64), String> {
        let mut r = instance_rng(seed, 10, i as u64);
        let count = 2 + below(&mut r, max_points - 1);
        let den = (4 * count + below(&mut r, 4000)) as u64;
        let nums = distinct(&mut r, count, den);
        let mut sorted = nums.clone();
        sorted.sort_unstable();
        let gap = sorted.windows(2).map(|w| w[1] - w[0]).chain(std::iter::once(den - sorted[count - 1] + sorted[0])).min().unwrap();
        // Widths up to the minimal gap keep the translates disjoint; half the
        // configurations touch exactly.
        let width = if i % 2 == 0 { gap } else { 1 + below(&mut r, gap as usize) as u64 };
        let points = nums.iter().map(|&n| RationalPoint::new(n, den)).collect::<Result<Vec<_>, _>>().map_err(core_err)?;
        let a: Vec<Complex64> = (0..count).map(|_| complex_normal(&mut r)).collect();
        let res = window_isometry_check(&points, RationalPoint::new(width, den).map_err(core_err)?, &a).map_err(core_err)?;
        Ok((count, den, width, res))
    });
    let mut table = Table::new("window", &["config", "points", "den", "width_num", "residual", "pass"]);
    let (mut fails, mut worst) = (0, 0.0f64);
    for (i, row) in rows.into_iter().enumerate() {
        let (count, den, width, res) = row?;
        let ok = res <= tol::WINDOW_ISOMETRY;
        fails += usize::from(!ok);
        worst = worst.max(res);
        table.push(vec![i.to_string(), count.to_string(), den.to_string(), width.to_string(), num(res), mark(ok)]);
    }
    let mut out = Outcome::default();
    out.check("isometry", fails == 0, format!("{configs} configurations, max residual {worst:.2e}"));
    out.table(table);
    Ok(out)
}

/// Mass of `{ξ > t}` and `Σ_ℓ` mass of `{ξ > t} Δ {η_ℓ > t}`, computed afresh.
fn level_scan(xi: &[f64], etas: &[Vec<f64>], measure: &[f64], eps: f64) -> Vec<(f64, bool)> {
    let mut levels: Vec<f64> = xi.iter().chain(etas.iter().flatten()).copied().collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels.push(levels.last().unwrap() + 1.0);
    levels
        .windows(2)
        .map(|w| {
            let t = 0.5 * (w[0] + w[1]);
            (t, admissible(xi, etas, measure, eps, t))
        })
        .collect()
}

fn admissible(xi: &[f64], etas: &[Vec<f64>], measure: &[f64], eps: f64, t: f64) -> bool {
    let mut mass = 0.0;
    let mut diff = 0.0;
    for c in 0..xi.len() {
        let a = xi[c] > t;
        if a {
            mass += measure[c];
        }
        for eta in etas {
            if a != (eta[c] > t) {
                diff += measure[c];
            }
        }
    }
    t > 0.0 && diff < eps * mass
}

fn random_steps(r: &mut Rng, cells: usize, shifts: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let measure: Vec<f64> = (0..cells).map(|_| uniform_range(r, 0.1, 1.0)).collect();
    let xi: Vec<f64> = (0..cells).map(|_| (uniform(r) * 5.0).floor()).collect();
    let etas = (0..shifts)
        .map(|_| xi.iter().map(|&v| if uniform(r) < 0.1 { (v + uniform_range(r, -1.0, 1.0)).max(0.0) } else { v }).collect())
        .collect();
    (xi, etas, measure)
}

pub fn threshold_folner(params: &Params, seed: u64) -> Result<Outcome, String> {
    let instances = params.count("instances").map_err(|e| e.0)?;
    let cells = params.count("cells").map_err(|e| e.0)?.max(1);
    let shifts = params.count("shifts").map_err(|e| e.0)?;
    let js = params.counts("js").map_err(|e| e.0)?;
    let action_cells = params.count("action_cells").map_err(|e| e.0)?;
    let radius = params.count("radius").map_err(|e| e.0)?;
    let ids: Vec<usize> = (0..instances).collect();
    let rows = par_map(&ids, |&i| {
        let mut r = instance_rng(seed, 14, i as u64);
        let (xi, etas, measure) = loop {
            let s = random_steps(&mut r, cells, shifts);
            if s.0.iter().any(|&v| v > 0.0) {
                break s;
            }
        };
        let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&measure).map(|((x, y), m)| (x - y).abs() * m).sum::<f64>();
        let lhs: f64 = etas.iter().map(|e| l1(&xi, e)).sum();
        let mass: f64 = xi.iter().zip(&measure).map(|(x, m)| x * m).sum();
        // ε just above the hypothesis ratio, so the selection is not trivial.
        let eps = (lhs / mass * uniform_range(&mut r, 1.05, 3.0)).max(1e-3);
        let oracle = level_scan(&xi, &etas, &measure, eps).iter().any(|&(_, ok)| ok);
        let t = threshold_select(&xi, &etas, &measure, eps);
        let valid = t.as_ref().is_ok_and(|&t| admissible(&xi, &etas, &measure, eps, t));
        (eps, t.ok(), oracle, valid)
    });
    let mut thr = Table::new("threshold", &["instance", "eps", "t", "oracle_admissible", "valid", "pass"]);
    let mut thr_fail = 0;
    for (i, (eps, t, oracle, valid)) in rows.into_iter().enumerate() {
        let ok = valid && oracle;
        thr_fail += usize::from(!ok);
        thr.push(vec![i.to_string(), num(eps), t.map_or("none".into(), num), oracle.to_string(), valid.to_string(), mark(ok)]);
    }
    let n = action_cells.max(2);
    let rotation = CellAction::new((0..n).map(|c| (c + 1) % n).collect()).map_err(core_err)?;
    // Two cycles running in opposite directions.
    let half = n / 2;
    let two_cycles =
        CellAction::new((0..n).map(|c| if c < half { (c + 1) % half } else { half + (c - half + (n - half) - 1) % (n - half) }).collect())
            .map_err(core_err)?;
    let mut sain = Table::new("sain", &["action", "j", "folner_size", "level", "sain_sum", "bound", "pass"]);
    let mut sain_fail = 0;
    let mut worst = Vec::new();
    for (name, action) in [("rotation", &rotation), ("two-cycles", &two_cycles)] {
        for &j in &js {
            let w = folner_sain_witness(&[1, -1], j, action, radius).map_err(core_err)?;
            let bound = 1.0 / j as f64;
            let ok = w.sain_sum < bound;
            sain_fail += usize::from(!ok);
            worst.push(format!("{name} j={j}: {:.4}", w.sain_sum));
            sain.push(vec![name.to_string(), j.to_string(), w.folner_size.to_string(), num(w.level), num(w.sain_sum), num(bound), mark(ok)]);
        }
    }
    let mut out = Outcome::default();
    out.check("threshold", thr_fail == 0, format!("{instances} instances, {thr_fail} without a valid threshold"));
    out.check("sain", sain_fail == 0, worst.join(", "));
    out.table(thr);
    out.table(sain);
    Ok(out)
}

pub fn jodeit(params: &Params, seed: u64) -> Result<Outcome, String> {
    let symbols = params.count("symbols").map_err(|e| e.0)?;
    let max_order = params.count("max_order").map_err(|e| e.0)?.max(2);
    let oversample = params.count("oversample").map_err(|e| e.0)?.max(1);
    let ids: Vec<usize> = (0..symbols).collect();
    let rows = par_map(&ids, |&i| -> Result<(usize, f64, f64, f64, f64), String> {
        let mut r = instance_rng(seed, 17, i as u64);
        let n = 2 + below(&mut r, max_order - 1);
        let g = Arc::new(FiniteGroup::cyclic(n).map_err(core_err)?);
        let m = Symbol::new(g, (0..n).map(|_| complex_normal(&mut r)).collect()).map_err(core_err)?;
        let ext = jodeit_extend(&m).map_err(core_err)?;
        let restriction_err = (0..n).map(|k| (ext.eval(k as f64 / n as f64) - m.values()[k]).norm()).fold(0.0, f64::max);
        let sup_ext = ext.sample(oversample * n).iter().map(|z| z.norm()).fold(0.0, f64::max);
        // At p = 2 a multiplier norm is the sup of its symbol: on the circle
        // that of m̃, on ℤ_n the exact ascent value.
        let norm_m = vna::multiplier_norm_estimate(&m, Exponent::TWO, &Budget::new(1, 1, seed)).map_err(core_err)?.lower_bound;
        Ok((n, restriction_err, sup_ext, m.sup_norm(), norm_m))
    });
    let mut table = Table::new("jodeit", &["symbol", "n", "restriction_err", "sup_ext", "max_m", "norm_ext", "norm_m", "pass"]);
    let (mut fails, mut worst) = (0, 0.0f64);
    for (i, row) in rows.into_iter().enumerate() {
        let (n, err, sup_ext, max_m, norm_m) = row?;
        let ok = err <= tol::JODEIT && (sup_ext - max_m).abs() <= tol::JODEIT * max_m && sup_ext <= norm_m * (1.0 + tol::JODEIT);
        fails += usize::from(!ok);
        worst = worst.max(err);
        table.push(vec![i.to_string(), n.to_string(), num(err), num(sup_ext), num(max_m), num(sup_ext), num(norm_m), mark(ok)]);
    }
    let mut out = Outcome::default();
    out.check("extension", fails == 0, format!("{symbols} symbols, max restriction error {worst:.2e}"));
    out.table(table);
    Ok(out)
}
