//! Schur multiplier suites.

use std::sync::Arc;

use ncmult_core::deleeuw::CircleSymbol;
use ncmult_core::groups::FiniteGroup;
use ncmult_core::rng::{complex_normal, normal};
use ncmult_core::schur::{cb_inf_norm, finite_section_sup, leading_sections, transference_check, SchurSymbol};
use ncmult_core::vna::{Budget, Symbol};
use ncmult_core::{tol, CMatrix, Exponent};
use num_complex::Complex64;

use super::{core_err, exp_label, instance_rng, par_map};
use crate::config::Params;
use crate::output::{mark, num, Outcome, Table};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn schur_suite(params: &Params, seed: u64) -> Result<Outcome, String> {
    let ones = params.counts("ones_sizes").map_err(|e| e.0)?;
    let rank_one = params.count("rank_one").map_err(|e| e.0)?;
    let size = params.count("rank_one_size").map_err(|e| e.0)?.max(1);
    let p = Exponent::new(params.float("p")).map_err(core_err)?;
    let budget = Budget::new(params.count("restarts").map_err(|e| e.0)?, params.count("iterations").map_err(|e| e.0)?, seed);

    // (case, symbol, expected value)
    let mut cases: Vec<(String, SchurSymbol, f64)> = Vec::new();
    for &n in &ones {
        cases.push((format!("ones{n}"), SchurSymbol::new(CMatrix::from_fn(n, n, |_, _| c(1.0))).map_err(core_err)?, 1.0));
    }
    for i in 0..rank_one {
        let mut r = instance_rng(seed, 12, i as u64);
        let a: Vec<Complex64> = (0..size).map(|_| complex_normal(&mut r)).collect();
        let b: Vec<Complex64> = (0..size).map(|_| complex_normal(&mut r)).collect();
        let expected = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let m = SchurSymbol::new(CMatrix::from_fn(size, size, |i, j| a[i] * b[j])).map_err(core_err)?;
        cases.push((format!("rank-one{i}"), m, expected));
    }
    let results = par_map(&cases, |(_, m, _)| cb_inf_norm(m, tol::CB_NORM).map_err(core_err));
    let mut cb = Table::new("cb", &["case", "size", "value", "expected", "lower", "residual", "pass"]);
    let (mut value_fail, mut cert_fail) = (0, 0);
    let (mut worst_value, mut worst_cert) = (0.0f64, 0.0f64);
    for ((name, m, expected), res) in cases.iter().zip(results) {
        let res = res?;
        let residual = res.certificate.residual(&m.matrix);
        let err = (res.value - expected).abs();
        let ok_value = err <= tol::CB_NORM;
        let ok_cert = residual <= tol::FACTORIZATION;
        value_fail += usize::from(!ok_value);
        cert_fail += usize::from(!ok_cert);
        worst_value = worst_value.max(err);
        worst_cert = worst_cert.max(residual);
        cb.push(vec![
            name.clone(),
            m.size().to_string(),
            num(res.value),
            num(*expected),
            num(res.lower),
            num(residual),
            mark(ok_value && ok_cert),
        ]);
    }

    // Three nested-section sweeps.
    let c32 = Arc::new(FiniteGroup::cyclic(32).map_err(core_err)?);
    let sign = Symbol::from_fn(c32, |k| c(if k == 0 || k == 16 { 0.0 } else if k < 16 { 1.0 } else { -1.0 }));
    let d8 = Arc::new(FiniteGroup::dihedral(8).map_err(core_err)?);
    let mut r = instance_rng(seed, 12, 1 << 30);
    let random = Symbol::new(d8.clone(), (0..d8.order()).map(|_| c(normal(&mut r))).collect()).map_err(core_err)?;
    let saw = CircleSymbol::Sawtooth;
    let grid = SchurSymbol::circle_grid(32, |t| saw.eval(t));
    let dyadic: Vec<Vec<usize>> = [4usize, 8, 16, 32].iter().map(|&s| (0..s).map(|i| i * 32 / s).collect()).collect();
    let sweeps: Vec<(&str, SchurSymbol, Vec<Vec<usize>>)> = vec![
        ("sign-cyclic32", SchurSymbol::herz_schur_full(&sign), leading_sections(&[4, 8, 16, 32])),
        ("random-dihedral8", SchurSymbol::herz_schur_full(&random), leading_sections(&[2, 4, 8, 16])),
        ("sawtooth-grid32", grid, dyadic),
    ];
    let rows = par_map(&sweeps, |(_, m, secs)| finite_section_sup(m, secs, p, &budget).map_err(core_err));
    let mut sections = Table::new("sections", &["sweep", "p", "size", "value", "converged", "pass"]);
    let mut monotone_fail = 0;
    let mut summary = Vec::new();
    for ((name, _, _), rows) in sweeps.iter().zip(rows) {
        let rows = rows?;
        let mut prev = 0.0f64;
        for row in &rows {
            let ok = row.value >= prev * (1.0 - tol::SECTION_SLACK);
            monotone_fail += usize::from(!ok);
            prev = prev.max(row.value);
            sections.push(vec![name.to_string(), exp_label(p), row.size.to_string(), num(row.value), row.converged.to_string(), mark(ok)]);
        }
        summary.push(format!("{name} {:.4}", prev));
    }
    let mut out = Outcome::default();
    out.check("cb-values", value_fail == 0, format!("{} symbols, max deviation {worst_value:.2e}", cases.len()));
    out.check("certificates", cert_fail == 0, format!("max factorization residual {worst_cert:.2e}"));
    out.check("sections", monotone_fail == 0, format!("final section values {}", summary.join(", ")));
    out.table(cb);
    out.table(sections);
    Ok(out)
}

pub fn transference(params: &Params, seed: u64) -> Result<Outcome, String> {
    let orders = params.counts("orders").map_err(|e| e.0)?;
    let symbols = params.count("symbols").map_err(|e| e.0)?;
    let mut jobs = Vec::new();
    for &n in &orders {
        for s in 0..symbols {
            jobs.push((n, s));
        }
    }
    let rows = par_map(&jobs, |&(n, s)| -> Result<Vec<(Exponent, f64, f64)>, String> {
        let g = Arc::new(FiniteGroup::cyclic(n).map_err(core_err)?);
        let mut r = instance_rng(seed, 13, (n as u64) << 24 | s as u64);
        let m = Symbol::new(g, (0..n).map(|_| c(normal(&mut r))).collect()).map_err(core_err)?;
        [Exponent::TWO, Exponent::INF]
            .iter()
            .map(|&p| {
                let rep = transference_check(&m, p).map_err(core_err)?;
                Ok((p, rep.fourier_side, rep.schur_side))
            })
            .collect()
    });
    let mut table = Table::new("transference", &["n", "symbol", "p", "fourier", "schur", "rel_err", "pass"]);
    let (mut fails, mut worst) = (0, 0.0f64);
    for (&(n, s), row) in jobs.iter().zip(rows) {
        for (p, f, sc) in row? {
            let rel = (f - sc).abs() / f.max(f64::MIN_POSITIVE);
            let ok = if p == Exponent::TWO { f == sc } else { rel <= tol::TRANSFERENCE };
            fails += usize::from(!ok);
            if p == Exponent::INF {
                worst = worst.max(rel);
            }
            table.push(vec![n.to_string(), s.to_string(), exp_label(p), num(f), num(sc), num(rel), mark(ok)]);
        }
    }
    let mut out = Outcome::default();
    out.check("transference", fails == 0, format!("{} symbols, max relative gap at p = inf {worst:.2e}", jobs.len()));
    out.table(table);
    Ok(out)
}
