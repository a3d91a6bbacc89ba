//! Plain-text formats for groups, symbols, Schur symbols and planar geometry.
//!
//! ```text
//! group <label> <n>          symbol <group-label>      schur <n>
//! <n rows of n entries>      <index> <re> <im>         <n rows of 2n reals: re im ...>
//!
//! polygon                    rects
//! <x> <y>                    <cx> <cy> <angle> <length> <width>
//! ```
//! Blank lines and `#` comments are ignored everywhere.

use std::fmt::Write as _;
use std::sync::Arc;

use ncmult_core::groups::FiniteGroup;
use ncmult_core::kakeya::{Polygon, Rect};
use ncmult_core::schur::SchurSymbol;
use ncmult_core::vna::Symbol;
use ncmult_core::CMatrix;
use num_complex::Complex64;

use crate::config::UsageError;

fn bad(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn numbers<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, UsageError> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| bad(format!("line {line}: cannot parse `{t}`")))).collect()
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, keyword: &str) -> Result<Vec<&'a str>, UsageError> {
    let (no, l) = lines.next().ok_or_else(|| bad(format!("missing `{keyword}` header")))?;
    let mut parts = l.split_whitespace();
    if parts.next() != Some(keyword) {
        return Err(bad(format!("line {no}: expected `{keyword}` header")));
    }
    Ok(parts.collect())
}

/// Named constructions: `cyclicN`, `dihedralN`, `symmetricN`, `heisenbergN`,
/// and `abelianA.B.C` for `ℤ_A × ℤ_B × ℤ_C`.
pub fn named_group(spec: &str) -> Result<FiniteGroup, UsageError> {
    let split = spec.find(|c: char| c.is_ascii_digit()).ok_or_else(|| bad(format!("unknown group `{spec}`")))?;
    let (kind, rest) = spec.split_at(split);
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("unknown group `{spec}`")));
    let g = match kind {
        "cyclic" => FiniteGroup::cyclic(num(rest)?),
        "dihedral" => FiniteGroup::dihedral(num(rest)?),
        "symmetric" => FiniteGroup::symmetric(num(rest)?),
        "heisenberg" => FiniteGroup::heisenberg_mod(num(rest)?),
        "abelian" => {
            let moduli = rest.split('.').map(num).collect::<Result<Vec<_>, _>>()?;
            FiniteGroup::abelian(&moduli, spec.to_string())
        }
        _ => return Err(bad(format!("unknown group `{spec}`"))),
    };
    g.map(|g| g.with_label(spec)).map_err(|e| bad(format!("group `{spec}`: {e}")))
}

pub fn write_group(g: &FiniteGroup) -> String {
    let n = g.order();
    let table = g.table();
    let mut s = format!("group {} {n}\n", g.label());
    for row in table.chunks(n) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_group(text: &str) -> Result<FiniteGroup, UsageError> {
    let mut lines = content_lines(text);
    let h = header(&mut lines, "group")?;
    let [label, n] = h[..] else { return Err(bad("group header must be `group <label> <n>`")) };
    let n: usize = n.parse().map_err(|_| bad("group order is not an integer"))?;
    let mut table = Vec::with_capacity(n * n);
    for (no, l) in lines {
        let row: Vec<usize> = numbers(no, l)?;
        if row.len() != n {
            return Err(bad(format!("line {no}: expected {n} entries")));
        }
        table.extend(row);
    }
    if table.len() != n * n {
        return Err(bad(format!("expected {n} table rows")));
    }
    FiniteGroup::from_table(label.to_string(), n, &table).map_err(|e| bad(e.to_string()))
}

pub fn write_symbol(m: &Symbol) -> String {
    let mut s = format!("symbol {}\n", m.group().label());
    for (i, v) in m.values().iter().enumerate() {
        let _ = writeln!(s, "{i} {:e} {:e}", v.re, v.im);
    }
    s
}

/// Reads a symbol on `group`; indices not listed are zero.
pub fn read_symbol(text: &str, group: Arc<FiniteGroup>) -> Result<Symbol, UsageError> {
    let mut lines = content_lines(text);
    let h = header(&mut lines, "symbol")?;
    if h != [group.label()] {
        return Err(bad(format!("symbol is for group `{}`, expected `{}`", h.join(" "), group.label())));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); group.order()];
    let mut seen = vec![false; group.order()];
    for (no, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let [i, re, im] = parts[..] else { return Err(bad(format!("line {no}: expected `index re im`"))) };
        let i: usize = i.parse().map_err(|_| bad(format!("line {no}: bad index")))?;
        if i >= group.order() || seen[i] {
            return Err(bad(format!("line {no}: index {i} out of range or repeated")));
        }
        seen[i] = true;
        let v: Vec<f64> = numbers(no, &format!("{re} {im}"))?;
        values[i] = Complex64::new(v[0], v[1]);
    }
    Symbol::new(group, values).map_err(|e| bad(e.to_string()))
}

pub fn write_schur(m: &SchurSymbol) -> String {
    let n = m.size();
    let mut s = format!("schur {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let v = m.matrix.data()[i * n + j];
                format!("{:e} {:e}", v.re, v.im)
            })
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_schur(text: &str) -> Result<SchurSymbol, UsageError> {
    let mut lines = content_lines(text);
    let h = header(&mut lines, "schur")?;
    let n: usize = h.first().and_then(|v| v.parse().ok()).ok_or_else(|| bad("schur header must be `schur <n>`"))?;
    let mut data = Vec::with_capacity(n * n);
    for (no, l) in lines {
        let row: Vec<f64> = numbers(no, l)?;
        if row.len() != 2 * n {
            return Err(bad(format!("line {no}: expected {} reals", 2 * n)));
        }
        data.extend(row.chunks(2).map(|c| Complex64::new(c[0], c[1])));
    }
    let matrix = CMatrix::from_vec(n, n, data).map_err(|_| bad(format!("expected {n} rows")))?;
    SchurSymbol::new(matrix).map_err(|e| bad(e.to_string()))
}

pub fn write_polygon(p: &Polygon) -> String {
    let mut s = String::from("polygon\n");
    for (x, y) in &p.vertices {
        let _ = writeln!(s, "{x:e} {y:e}");
    }
    s
}

pub fn read_polygon(text: &str) -> Result<Polygon, UsageError> {
    let mut lines = content_lines(text);
    header(&mut lines, "polygon")?;
    let mut v = Vec::new();
    for (no, l) in lines {
        let xy: Vec<f64> = numbers(no, l)?;
        let [x, y] = xy[..] else { return Err(bad(format!("line {no}: expected `x y`"))) };
        v.push((x, y));
    }
    Polygon::new(v).map_err(|e| bad(e.to_string()))
}

pub fn write_rects(rects: &[Rect]) -> String {
    let mut s = String::from("rects\n");
    for r in rects {
        let _ = writeln!(s, "{:e} {:e} {:e} {:e} {:e}", r.center.0, r.center.1, r.angle, r.length, r.width);
    }
    s
}

pub fn read_rects(text: &str) -> Result<Vec<Rect>, UsageError> {
    let mut lines = content_lines(text);
    header(&mut lines, "rects")?;
    lines
        .map(|(no, l)| {
            let v: Vec<f64> = numbers(no, l)?;
            let [cx, cy, angle, length, width] = v[..] else { return Err(bad(format!("line {no}: expected 5 reals"))) };
            Ok(Rect { center: (cx, cy), angle, length, width })
        })
        .collect()
}
