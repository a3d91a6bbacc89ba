//! Cross-module properties checked through the public API only.

use std::sync::Arc;

use ncmult_core::almostmult::KrausMap;
use ncmult_core::groups::{CosetSide, CosetStructure, FiniteGroup};
use ncmult_core::kakeya::{arc_directions, besicovitch_family, crt_is_bijective, interiors_overlap};
use ncmult_core::matkernel::{random_hermitian, random_matrix, singular_values};
use ncmult_core::rng;
use ncmult_core::schur::{cb_inf_norm, schur_apply, SchurSymbol};
use ncmult_core::vna::{convolve, AlgebraElement};
use ncmult_core::CMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn trace_norm(a: &CMatrix) -> f64 {
    singular_values(a).unwrap().iter().sum()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // ‖T(x²) − T(x)²‖₁ ≤ 2‖T(x) − x‖₂‖x‖₂, recomputed from singular values.
    #[test]
    fn kadison_step(seed in any::<u64>(), n in 2usize..6, k in 1usize..4, twist in any::<bool>()) {
        let mut r = rng::stream(seed, 0);
        let t = KrausMap::random(&mut r, n, k, twist).unwrap();
        let x = random_hermitian(&mut r, n);
        let tx = t.apply(&x).unwrap();
        let lhs = trace_norm(&t.apply(&x.mul(&x)).unwrap().sub(&tx.mul(&tx)));
        let rhs = 2.0 * tx.sub(&x).frobenius_norm() * x.frobenius_norm();
        prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs), "lhs {lhs} rhs {rhs}");
    }

    // At p = 2 a Schur multiplier acts entrywise, so its norm is max|m_ij|.
    #[test]
    fn schur_two_norm_is_entrywise(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng::stream(seed, 1);
        let m = SchurSymbol::new(random_matrix(&mut r, n, n)).unwrap();
        let a = random_matrix(&mut r, n, n);
        let b = schur_apply(&m, &a).unwrap();
        prop_assert!(b.frobenius_norm() <= m.matrix.max_abs() * a.frobenius_norm() * (1.0 + 1e-12));
        let (i, j) = (0..n * n).map(|k| (k / n, k % n)).max_by(|x, y| m.matrix[*x].norm().total_cmp(&m.matrix[*y].norm())).unwrap();
        let e = CMatrix::from_fn(n, n, |a, b| if (a, b) == (i, j) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let hit = schur_apply(&m, &e).unwrap().frobenius_norm();
        prop_assert!((hit - m.matrix.max_abs()).abs() <= 1e-12 * (1.0 + hit));
    }

    // Compressing to a principal block restricts the factorization.
    #[test]
    fn cb_norm_of_principal_block(seed in any::<u64>(), n in 2usize..6, mask in 1u32..32) {
        let mut r = rng::stream(seed, 2);
        let m = SchurSymbol::new(random_matrix(&mut r, n, n)).unwrap();
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!idx.is_empty());
        let sub = SchurSymbol::new(m.matrix.submatrix(&idx, &idx)).unwrap();
        let full = cb_inf_norm(&m, 1e-6).unwrap();
        let part = cb_inf_norm(&sub, 1e-6).unwrap();
        prop_assert!(part.value <= full.value + 1e-6, "{} > {}", part.value, full.value);
        prop_assert!(part.value + 1e-9 >= sub.matrix.max_abs());
    }

    #[test]
    fn besicovitch_rectangles_are_disjoint(count in 2usize..40, spread in 0.2f64..3.1) {
        let rep = besicovitch_family(2.0, &arc_directions(count, 0.0, spread)).unwrap();
        let rs = &rep.family.rects;
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                prop_assert!(!interiors_overlap(&rs[i], &rs[j]));
            }
        }
        for (r, s) in rs.iter().zip(&rep.family.shifts) {
            let gap = ((r.center.0 - s.center.0).powi(2) + (r.center.1 - s.center.1).powi(2)).sqrt();
            prop_assert!((gap - r.length).abs() <= 1e-12 && r.angle == s.angle && r.width == s.width);
        }
    }

    #[test]
    fn crt_bijective_exactly_when_coprime(p in 1u64..40, q in 1u64..40) {
        prop_assert_eq!(crt_is_bijective(p, q).unwrap_or(false), gcd(p, q) == 1);
    }

    // Product groups satisfy the axioms and the coset map of the first factor
    // reassembles every element.
    #[test]
    fn product_groups_and_cosets(a in 1usize..6, b in 2usize..5) {
        let g1 = FiniteGroup::cyclic(a).unwrap();
        let g2 = FiniteGroup::dihedral(b).unwrap();
        let g = Arc::new(FiniteGroup::product(&g1, &g2).unwrap());
        prop_assert!(g.verify_axioms());
        prop_assert_eq!(g.order(), a * 2 * b);
        let center = g.center();
        let cs = CosetStructure::new(g.clone(), &center, CosetSide::Left).unwrap();
        prop_assert_eq!(cs.coset_count() * center.len(), g.order());
        for x in 0..g.order() {
            let (c, h) = cs.upsilon(x);
            prop_assert_eq!(cs.reassemble(c, h), x);
        }
    }

    // Convolution in the group algebra is associative.
    #[test]
    fn convolution_associates(seed in any::<u64>(), n in 2usize..5) {
        let g = Arc::new(FiniteGroup::heisenberg_mod(n).unwrap());
        let mut r = rng::stream(seed, 3);
        let f = AlgebraElement::random(g.clone(), &mut r);
        let h = AlgebraElement::random(g.clone(), &mut r);
        let k = AlgebraElement::random(g, &mut r);
        let left = convolve(&convolve(&f, &h).unwrap(), &k).unwrap();
        let right = convolve(&f, &convolve(&h, &k).unwrap()).unwrap();
        let diff = left.coeffs().iter().zip(right.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-10);
    }
}
