//! Diophantine and planar geometry suites.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use ncmult_core::kakeya::{
    arc_directions, besicovitch_family, crt_is_bijective, dirichlet_holds, dirichlet_pairs, golden_minus_one, grid_multiplier_norm,
    hausdorff_distance, sqrt2_minus_one, transport_symbol, truncated_polygon, Polygon, Region,
};
use ncmult_core::vna::Budget;
use ncmult_core::Exponent;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::{core_err, exp_label, par_map};
use crate::config::Params;
use crate::formats::{write_polygon, write_rects};
use crate::output::{mark, num, Outcome, Table};

/// `|qβ − p|·q < 1` and `gcd(p, q) = 1`, evaluated without the library predicate.
fn dirichlet_oracle(beta: &BigRational, p: &BigInt, q: &BigInt) -> bool {
    let gap = (beta * BigRational::from_integer(q.clone()) - BigRational::from_integer(p.clone())).abs();
    let coprime = num_integer::Integer::gcd(p, q).is_one();
    coprime && gap * BigRational::from_integer(q.clone()) < BigRational::one()
}

/// Pairs until the denominator exceeds `q_min`.
fn pairs_past(beta: &BigRational, q_min: &BigInt) -> Result<(Vec<(BigInt, BigInt)>, bool), String> {
    let mut count = 8;
    loop {
        let d = dirichlet_pairs(beta, count).map_err(core_err)?;
        let reached = d.pairs.last().is_some_and(|(_, q)| q > q_min);
        if reached || d.exhausted {
            return Ok((d.pairs, reached));
        }
        count *= 2;
    }
}

pub fn geometry(params: &Params, _seed: u64) -> Result<Outcome, String> {
    let q_min = BigInt::from(params.count("q_min").map_err(|e| e.0)?);
    let transport_pairs = params.count("transport_pairs").map_err(|e| e.0)?;
    let length = params.float("polygon_length");
    let radius = params.float("disc_radius");
    let directions = params.count("directions").map_err(|e| e.0)?;
    let target = params.float("target");
    let disc = Region::Disc { center: (0.5, 0.5), radius };
    let betas = [("golden-1", golden_minus_one(95)), ("sqrt2-1", sqrt2_minus_one(50))];

    let mut out = Outcome::default();
    let mut dir_table = Table::new("dirichlet", &["beta", "p", "q", "exact"]);
    let mut tr_table = Table::new("transport", &["beta", "p", "q", "alpha_max", "alpha_max_q", "mismatches", "crt", "pass"]);
    let mut poly_table = Table::new("polygon", &["beta", "length", "vertices", "area", "hausdorff", "pass"]);
    let (mut exact_ok, mut reach_ok, mut transport_ok, mut crt_ok, mut poly_ok) = (true, true, true, true, true);
    let mut worst_aq = 0.0f64;
    let mut worst_h = 0.0f64;
    for (name, beta) in &betas {
        let (pairs, reached) = pairs_past(beta, &q_min)?;
        reach_ok &= reached;
        for (p, q) in &pairs {
            let ok = dirichlet_oracle(beta, p, q) && dirichlet_holds(beta, p, q);
            exact_ok &= ok;
            dir_table.push(vec![name.to_string(), p.to_string(), q.to_string(), ok.to_string()]);
        }
        for (p, q) in pairs.iter().take(transport_pairs) {
            let (p, q) = (p.to_u64().ok_or("p overflows")?, q.to_u64().ok_or("q overflows")?);
            let rep = transport_symbol(&disc, beta, p, q, 1.0).map_err(core_err)?;
            let crt = crt_is_bijective(p, q).map_err(core_err)?;
            let aq = rep.alpha_max * q as f64;
            // α(k) ≤ arc length · |β − p/q| < √(p²+q²)/q² ≤ √2/q.
            let ok = aq <= SQRT_2 * (1.0 + 1e-9);
            transport_ok &= ok;
            crt_ok &= crt;
            worst_aq = worst_aq.max(aq);
            tr_table.push(vec![
                name.to_string(),
                p.to_string(),
                q.to_string(),
                num(rep.alpha_max),
                num(aq),
                rep.polygon_mismatches.to_string(),
                crt.to_string(),
                mark(ok && crt),
            ]);
        }
        let poly = truncated_polygon(&disc, beta, length).map_err(core_err)?;
        let h = hausdorff_distance(&poly, &disc, 4000).map_err(core_err)?;
        let ok = h < 0.05;
        poly_ok &= ok;
        worst_h = worst_h.max(h);
        poly_table.push(vec![name.to_string(), num(length), poly.vertices.len().to_string(), num(poly.area()), num(h), mark(ok)]);
        out.artifacts.push((format!("polygon_{name}.txt"), write_polygon(&poly)));
    }

    let mut bes = Table::new("besicovitch", &["stage", "directions", "ratio", "area_error", "pass"]);
    let mut stages: Vec<usize> = Vec::new();
    let mut k = 4;
    while k < directions {
        stages.push(k);
        k *= 2;
    }
    stages.push(directions);
    let reports = par_map(&stages, |&d| besicovitch_family(target, &arc_directions(d, 0.0, FRAC_PI_2)).map_err(core_err));
    let mut final_ratio = 0.0;
    let mut final_err = f64::INFINITY;
    for (stage, (&d, rep)) in stages.iter().zip(reports).enumerate() {
        let rep = rep?;
        let last = stage + 1 == stages.len();
        let ok = rep.ratio >= target && rep.area_error <= 0.01;
        bes.push(vec![stage.to_string(), d.to_string(), num(rep.ratio), num(rep.area_error), if last { mark(ok) } else { String::new() }]);
        if last {
            final_ratio = rep.ratio;
            final_err = rep.area_error;
            out.artifacts.push(("besicovitch_rects.txt".into(), write_rects(&rep.family.rects)));
            out.artifacts.push(("besicovitch_shifts.txt".into(), write_rects(&rep.family.shifts)));
        }
    }

    out.check("dirichlet", exact_ok && reach_ok, format!("all pairs exact, denominators past {q_min}: {reach_ok}"));
    out.check("transport", transport_ok, format!("max alpha_max*q {worst_aq:.4} (bound sqrt 2)"));
    out.check("crt", crt_ok, "exhaustive CRT bijections".into());
    out.check("polygon", poly_ok, format!("max Hausdorff distance {worst_h:.4} at L = {length}"));
    out.check(
        "besicovitch",
        final_ratio >= target && final_err <= 0.01,
        format!("ratio {final_ratio:.3} (target {target}), rasterization change {final_err:.2e}"),
    );
    out.table(dir_table);
    out.table(tr_table);
    out.table(poly_table);
    out.table(bes);
    Ok(out)
}

pub fn growth(params: &Params, seed: u64) -> Result<Outcome, String> {
    let sizes = params.counts("sizes").map_err(|e| e.0)?;
    let p = Exponent::new(params.float("p")).map_err(core_err)?;
    let radius = params.float("radius");
    let budget = Budget::new(params.count("restarts").map_err(|e| e.0)?, params.count("iterations").map_err(|e| e.0)?, seed);
    let regions = [
        ("disc", Region::Disc { center: (0.0, 0.0), radius }),
        ("octagon", Region::Polygon(Polygon::regular(8, (0.0, 0.0), radius, 0.0))),
    ];
    let mut jobs = Vec::new();
    for &n in &sizes {
        for ri in 0..regions.len() {
            jobs.push((n, ri));
        }
    }
    let rows = par_map(&jobs, |&(n, ri)| grid_multiplier_norm(&regions[ri].1, n, p, &budget).map_err(core_err));
    let mut table = Table::new("growth", &["N", "p", "region", "lower_bound", "converged"]);
    let mut values = [Vec::new(), Vec::new()];
    for (&(n, ri), row) in jobs.iter().zip(rows) {
        let est = row?;
        values[ri].push(est.lower_bound);
        table.push(vec![n.to_string(), exp_label(p), regions[ri].0.to_string(), num(est.lower_bound), est.converged.to_string()]);
    }
    let disc_up = values[0].windows(2).all(|w| w[1] >= w[0]);
    let oct_ratio = match (values[1].first(), values[1].last()) {
        (Some(a), Some(b)) if *a > 0.0 => b / a,
        _ => f64::NAN,
    };
    let mut out = Outcome::default();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    out.soft("disc-growth", disc_up, format!("disc values {}", fmt(&values[0])));
    out.soft("octagon-flat", oct_ratio <= 1.1, format!("octagon values {}, ratio {oct_ratio:.4}", fmt(&values[1])));
    out.table(table);
    Ok(out)
}
