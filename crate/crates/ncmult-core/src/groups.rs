//! Finite groups as dense index sets, coset bookkeeping and the CRT
//! isomorphism `Z_pq -> Z_p x Z_q`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Largest order for which a full multiplication table is stored.
pub const MAX_TABLE_ORDER: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `Z_{m_1} x ... x Z_{m_k}`, row-major mixed radix, first factor most significant.
    Abelian(Vec<usize>),
    Table { mult: Vec<u32>, inv: Vec<u32> },
}

/// A finite group on the elements `0..n`. The identity is always index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    label: String,
    order: usize,
    repr: Repr,
}

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("cyclic group order must be positive"));
        }
        Self::abelian(&[n], format!("cyclic{n}"))
    }

    /// `Z_{m_1} x ... x Z_{m_k}` with arithmetic multiplication.
    pub fn abelian(moduli: &[usize], label: String) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|&m| m == 0) {
            return Err(invalid("abelian group moduli must be positive"));
        }
        let order = moduli.iter().try_fold(1usize, |a, &m| a.checked_mul(m)).ok_or_else(|| invalid("order overflows"))?;
        Ok(FiniteGroup { label, order, repr: Repr::Abelian(moduli.to_vec()) })
    }

    /// Direct product; element `(a, b)` has index `a * |G2| + b`.
    pub fn product(g1: &FiniteGroup, g2: &FiniteGroup) -> Result<Self> {
        let label = format!("{}x{}", g1.label, g2.label);
        if let (Repr::Abelian(m1), Repr::Abelian(m2)) = (&g1.repr, &g2.repr) {
            let mut m = m1.clone();
            m.extend_from_slice(m2);
            return Self::abelian(&m, label);
        }
        let (n1, n2) = (g1.order, g2.order);
        let n = n1 * n2;
        Self::from_fn(n, label, |x, y| {
            let (a1, b1) = (x / n2, x % n2);
            let (a2, b2) = (y / n2, y % n2);
            g1.mul(a1, a2) * n2 + g2.mul(b1, b2)
        })
    }

    /// Dihedral group of order `2n`: index `k + n*b` is `r^k s^b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dihedral parameter must be positive"));
        }
        Self::from_fn(2 * n, format!("dihedral{n}"), |x, y| {
            let (k1, b1) = (x % n, x / n);
            let (k2, b2) = (y % n, y / n);
            // r^k1 s^b1 r^k2 s^b2 = r^(k1 ± k2) s^(b1+b2)
            let k = if b1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
            k + n * ((b1 + b2) % 2)
        })
    }

    /// Symmetric group on `n ≤ 5` letters; permutations in lexicographic
    /// order (identity first), composed as functions: `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(invalid("symmetric groups are supported for 1 <= n <= 5"));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("permutation listed");
        let table: Vec<usize> = {
            let mut t = Vec::with_capacity(perms.len() * perms.len());
            let mut buf = vec![0; n];
            for s in &perms {
                for t2 in &perms {
                    for i in 0..n {
                        buf[i] = s[t2[i]];
                    }
                    t.push(index(&buf));
                }
            }
            t
        };
        let m = perms.len();
        Self::from_fn(m, format!("symmetric{n}"), |x, y| table[x * m + y])
    }

    /// `(a, b, c)` with index `a n^2 + b n + c` and product
    /// `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
    pub fn heisenberg_mod(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Heisenberg modulus must be positive"));
        }
        let split = |x: usize| (x / (n * n), (x / n) % n, x % n);
        Self::from_fn(n * n * n, format!("heis{n}"), |x, y| {
            let (a, b, c) = split(x);
            let (a2, b2, c2) = split(y);
            let na = (a + a2) % n;
            let nb = (b + b2) % n;
            let nc = (c + c2 + a * b2) % n;
            na * n * n + nb * n + nc
        })
    }

    fn from_fn(n: usize, label: String, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(f(x, y));
            }
        }
        Self::from_table(label, n, &table)
    }

    /// Validates a multiplication table given row-major (`table[x*n+y] = xy`).
    /// The identity element is moved to index 0 if necessary is not supported:
    /// index 0 must be the identity.
    pub fn from_table(label: String, n: usize, table: &[usize]) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_ORDER {
            return Err(invalid("table order out of range"));
        }
        if table.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: table.len() });
        }
        if table.iter().any(|&v| v >= n) {
            return Err(invalid("table entry out of range"));
        }
        for x in 0..n {
            if table[x] != x || table[x * n] != x {
                return Err(invalid("index 0 is not a two-sided identity"));
            }
        }
        let mut inv = vec![u32::MAX; n];
        for x in 0..n {
            for y in 0..n {
                if table[x * n + y] == 0 {
                    if table[y * n + x] != 0 {
                        return Err(invalid("one-sided inverse in table"));
                    }
                    inv[x] = y as u32;
                    break;
                }
            }
            if inv[x] == u32::MAX {
                return Err(invalid("element without inverse"));
            }
        }
        let mult: Vec<u32> = table.iter().map(|&v| v as u32).collect();
        let g = FiniteGroup { label, order: n, repr: Repr::Table { mult, inv } };
        g.check_associative()?;
        Ok(g)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        let bad = |x: usize, y: usize, z: usize| self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z));
        if n <= 64 {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if bad(x, y, z) {
                            return Err(invalid("multiplication table is not associative"));
                        }
                    }
                }
            }
        } else {
            // Fixed LCG so construction stays deterministic.
            let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) as usize % n
            };
            for _ in 0..20_000 {
                let (x, y, z) = (next(), next(), next());
                if bad(x, y, z) {
                    return Err(invalid("multiplication table is not associative"));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = String::from(label);
        self
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        match &self.repr {
            Repr::Table { mult, .. } => mult[x * self.order + y] as usize,
            Repr::Abelian(m) => {
                let mut out = 0;
                let mut place = 1;
                let (mut x, mut y) = (x, y);
                for &mi in m.iter().rev() {
                    out += ((x % mi + y % mi) % mi) * place;
                    place *= mi;
                    x /= mi;
                    y /= mi;
                }
                out
            }
        }
    }

    pub fn inv(&self, x: usize) -> usize {
        match &self.repr {
            Repr::Table { inv, .. } => inv[x] as usize,
            Repr::Abelian(m) => {
                let mut out = 0;
                let mut place = 1;
                let mut x = x;
                for &mi in m.iter().rev() {
                    out += ((mi - x % mi) % mi) * place;
                    place *= mi;
                    x /= mi;
                }
                out
            }
        }
    }

    /// Moduli when the group is a product of cyclic groups in its native indexing.
    pub fn abelian_moduli(&self) -> Option<&[usize]> {
        match &self.repr {
            Repr::Abelian(m) => Some(m),
            Repr::Table { .. } => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match &self.repr {
            Repr::Abelian(_) => true,
            Repr::Table { .. } => (0..self.order).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x))),
        }
    }

    pub fn pow(&self, x: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// `x^{-1} y`.
    pub fn left_div(&self, x: usize, y: usize) -> usize {
        self.mul(self.inv(x), y)
    }

    /// Smallest subgroup containing `gens`, sorted.
    pub fn generate(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order).filter(|&z| (0..self.order).all(|x| self.mul(x, z) == self.mul(z, x))).collect()
    }

    /// Full table, row-major.
    pub fn table(&self) -> Vec<usize> {
        let n = self.order;
        let mut t = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                t.push(self.mul(x, y));
            }
        }
        t
    }

    /// Exhaustive axiom check (identity, inverses, associativity).
    pub fn verify_axioms(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x || self.mul(x, self.inv(x)) != 0 || self.mul(self.inv(x), x) != 0 {
                return false;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Which cosets are formed and how an element factors through its representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetSide {
    /// Cosets `gH`, `g = σ(gH) h(g)`.
    Left,
    /// Cosets `Hg`, `g = h(g) σ(Hg)`.
    Right,
}

#[derive(Debug, Clone)]
pub struct CosetStructure {
    pub group: Arc<FiniteGroup>,
    /// Sorted subgroup elements.
    pub subgroup: Vec<usize>,
    pub side: CosetSide,
    /// Coset index of every element of `G`.
    pub coset_of: Vec<usize>,
    /// Smallest element of each coset.
    pub transversal: Vec<usize>,
    /// `h(g)`, an element of the subgroup.
    pub factor: Vec<usize>,
    pub normal: bool,
    pub quotient: Option<Arc<FiniteGroup>>,
}

impl CosetStructure {
    pub fn new(group: Arc<FiniteGroup>, subgroup: &[usize], side: CosetSide) -> Result<Self> {
        let n = group.order();
        let mut sub: Vec<usize> = subgroup.to_vec();
        sub.sort_unstable();
        sub.dedup();
        if sub.iter().any(|&h| h >= n) {
            return Err(invalid("subgroup element out of range"));
        }
        let mut member = vec![false; n];
        for &h in &sub {
            member[h] = true;
        }
        if !member[0] {
            return Err(Error::NotSubgroup { a: 0, b: 0 });
        }
        for &a in &sub {
            for &b in &sub {
                if !member[group.mul(a, group.inv(b))] {
                    return Err(Error::NotSubgroup { a, b });
                }
            }
        }
        let mut coset_of = vec![usize::MAX; n];
        let mut transversal = Vec::new();
        let mut factor = vec![0; n];
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = transversal.len();
            transversal.push(g);
            for &h in &sub {
                let x = match side {
                    CosetSide::Left => group.mul(g, h),
                    CosetSide::Right => group.mul(h, g),
                };
                coset_of[x] = c;
                factor[x] = h;
            }
        }
        let normal = (0..n).all(|g| sub.iter().all(|&h| member[group.mul(group.mul(g, h), group.inv(g))]));
        let quotient = if normal {
            let m = transversal.len();
            let mut table = Vec::with_capacity(m * m);
            for &a in &transversal {
                for &b in &transversal {
                    table.push(coset_of[group.mul(a, b)]);
                }
            }
            let label = format!("{}/H{}", group.label(), sub.len());
            Some(Arc::new(FiniteGroup::from_table(label, m, &table)?))
        } else {
            None
        };
        Ok(CosetStructure { group, subgroup: sub, side, coset_of, transversal, factor, normal, quotient })
    }

    pub fn coset_count(&self) -> usize {
        self.transversal.len()
    }

    /// `Υ(g) = (coset, h(g))`.
    pub fn upsilon(&self, g: usize) -> (usize, usize) {
        (self.coset_of[g], self.factor[g])
    }

    pub fn reassemble(&self, coset: usize, h: usize) -> usize {
        let s = self.transversal[coset];
        match self.side {
            CosetSide::Left => self.group.mul(s, h),
            CosetSide::Right => self.group.mul(h, s),
        }
    }

    /// Position of `h` inside the sorted subgroup list.
    pub fn subgroup_position(&self, h: usize) -> Option<usize> {
        self.subgroup.binary_search(&h).ok()
    }
}

/// `Λ(k) = (k mod p, k mod q)` for coprime `p, q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crt {
    p: u64,
    q: u64,
    /// `q^{-1} mod p` and `p^{-1} mod q`.
    q_inv: u64,
    p_inv: u64,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

impl Crt {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(invalid("CRT moduli must be positive"));
        }
        let (q_inv, p_inv) = match (mod_inverse(q % p, p), mod_inverse(p % q, q)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(invalid("CRT moduli must be coprime")),
        };
        Ok(Crt { p, q, q_inv, p_inv })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn forward(&self, k: u64) -> (u64, u64) {
        (k % self.p, k % self.q)
    }

    pub fn inverse(&self, a: u64, b: u64) -> u64 {
        let n = (self.p * self.q) as u128;
        let x = (a % self.p) as u128 * self.q as u128 % n * self.q_inv as u128
            + (b % self.q) as u128 * self.p as u128 % n * self.p_inv as u128;
        (x % n) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
        // Brute force over bijections respecting element orders; fine for order <= 8.
        let n = a.order();
        if n != b.order() {
            return false;
        }
        fn search(a: &FiniteGroup, b: &FiniteGroup, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            let n = a.order();
            let i = map.len();
            if i == n {
                return (0..n).all(|x| (0..n).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y])));
            }
            for j in 0..n {
                if !used[j] && a.element_order(i) == b.element_order(j) {
                    used[j] = true;
                    map.push(j);
                    if search(a, b, map, used) {
                        return true;
                    }
                    map.pop();
                    used[j] = false;
                }
            }
            false
        }
        search(a, b, &mut Vec::new(), &mut vec![false; n])
    }

    fn all_small_groups() -> Vec<FiniteGroup> {
        let mut v = Vec::new();
        for n in 1..=12 {
            v.push(FiniteGroup::cyclic(n).unwrap());
            v.push(FiniteGroup::dihedral(n).unwrap());
        }
        for n in 1..=5 {
            v.push(FiniteGroup::symmetric(n).unwrap());
        }
        for n in 1..=4 {
            v.push(FiniteGroup::heisenberg_mod(n).unwrap());
        }
        let c2 = FiniteGroup::cyclic(2).unwrap();
        v.push(FiniteGroup::product(&c2, &FiniteGroup::dihedral(4).unwrap()).unwrap());
        v.push(FiniteGroup::product(&FiniteGroup::cyclic(4).unwrap(), &FiniteGroup::cyclic(6).unwrap()).unwrap());
        v
    }

    #[test]
    fn constructed_groups_satisfy_axioms() {
        for g in all_small_groups() {
            if g.order() <= 64 {
                assert!(g.verify_axioms(), "{}", g.label());
            }
        }
    }

    #[test]
    fn heisenberg_two_is_nonabelian_of_order_eight() {
        let h = FiniteGroup::heisenberg_mod(2).unwrap();
        assert_eq!(h.order(), 8);
        assert!(!h.is_abelian());
        assert_eq!(h.center().len(), 2);
        assert!(!isomorphic(&h, &FiniteGroup::cyclic(8).unwrap()));
    }

    #[test]
    fn c2_times_c3_is_c6() {
        let p = FiniteGroup::product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(3).unwrap()).unwrap();
        assert!(isomorphic(&p, &FiniteGroup::cyclic(6).unwrap()));
        let t = FiniteGroup::from_table("c6".into(), 6, &p.table()).unwrap();
        assert!(isomorphic(&t, &FiniteGroup::cyclic(6).unwrap()));
    }

    #[test]
    fn trivial_and_rejections() {
        assert_eq!(FiniteGroup::cyclic(1).unwrap().order(), 1);
        assert!(FiniteGroup::symmetric(6).is_err());
        assert!(FiniteGroup::cyclic(0).is_err());
        let bad = [0, 1, 1, 1];
        assert!(FiniteGroup::from_table("bad".into(), 2, &bad).is_err());
    }

    #[test]
    fn dihedral_rotation_cosets() {
        let d = Arc::new(FiniteGroup::dihedral(4).unwrap());
        let rot = d.generate(&[1]);
        assert_eq!(rot.len(), 4);
        let cs = CosetStructure::new(d.clone(), &rot, CosetSide::Left).unwrap();
        assert_eq!(cs.coset_count(), 2);
        assert!(cs.normal);
        let q = cs.quotient.as_ref().unwrap();
        assert!(isomorphic(q, &FiniteGroup::cyclic(2).unwrap()));
    }

    #[test]
    fn trivial_cosets() {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let all: Vec<usize> = (0..6).collect();
        let cs = CosetStructure::new(g.clone(), &all, CosetSide::Left).unwrap();
        assert_eq!(cs.coset_count(), 1);
        assert!((0..6).all(|x| cs.factor[x] == x));
        let cs = CosetStructure::new(g.clone(), &[0], CosetSide::Right).unwrap();
        assert_eq!(cs.coset_count(), 6);
        assert!((0..6).all(|x| cs.factor[x] == 0));
    }

    #[test]
    fn non_subgroup_names_pair() {
        let g = Arc::new(FiniteGroup::cyclic(6).unwrap());
        assert!(matches!(CosetStructure::new(g, &[0, 1], CosetSide::Left), Err(Error::NotSubgroup { .. })));
    }

    #[test]
    fn non_normal_subgroup_has_no_quotient() {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let h = g.generate(&[1]);
        assert_eq!(h.len(), 2);
        let cs = CosetStructure::new(g, &h, CosetSide::Right).unwrap();
        assert!(!cs.normal && cs.quotient.is_none());
    }

    #[test]
    fn crt_examples() {
        let c = Crt::new(2, 3).unwrap();
        assert_eq!(c.forward(1), (1, 1));
        assert_eq!(c.forward(0), (0, 0));
        assert!(Crt::new(4, 6).is_err());
        let c = Crt::new(3, 5).unwrap();
        let mut seen = [false; 15];
        for k in 0..15 {
            let (a, b) = c.forward(k);
            seen[(a * 5 + b) as usize] = true;
            assert_eq!(c.inverse(a, b), k);
        }
        assert!(seen.iter().all(|&s| s));
    }

    proptest! {
        #[test]
        fn upsilon_reassembles(idx in 0usize..6, side in any::<bool>()) {
            let g = Arc::new(match idx {
                0 => FiniteGroup::dihedral(4).unwrap(),
                1 => FiniteGroup::heisenberg_mod(3).unwrap(),
                2 => FiniteGroup::symmetric(4).unwrap(),
                3 => FiniteGroup::cyclic(12).unwrap(),
                4 => FiniteGroup::heisenberg_mod(2).unwrap(),
                _ => FiniteGroup::dihedral(6).unwrap(),
            });
            let gens = [1usize.min(g.order() - 1), g.order() / 2];
            let h = g.generate(&gens[..1 + (idx % 2)]);
            let side = if side { CosetSide::Left } else { CosetSide::Right };
            let cs = CosetStructure::new(g.clone(), &h, side).unwrap();
            prop_assert_eq!(cs.coset_count() * h.len(), g.order());
            for x in 0..g.order() {
                let (c, f) = cs.upsilon(x);
                prop_assert_eq!(cs.reassemble(c, f), x);
            }
            if let Some(q) = &cs.quotient {
                prop_assert!(q.verify_axioms());
            }
        }

        #[test]
        fn crt_homomorphism(p in 1u64..40, q in 1u64..40) {
            prop_assume!(num_integer::gcd(p, q) == 1);
            let c = Crt::new(p, q).unwrap();
            let n = p * q;
            for k in 0..n {
                let l = (k * 7 + 3) % n;
                let (a, b) = c.forward((k + l) % n);
                let (a1, b1) = c.forward(k);
                let (a2, b2) = c.forward(l);
                prop_assert_eq!((a, b), ((a1 + a2) % p, (b1 + b2) % q));
                prop_assert_eq!(c.inverse(a1, b1), k);
            }
        }
    }
}
