use std::sync::Arc;

use polar_core::compose::{compose_quadratic, compose_sesquilinear, LinearFunctional, RestrictionContext};
use polar_core::forms::{Budget, FormType, OrthogonalClass, QuadraticForm, SesquilinearForm};
use polar_core::gf::GaloisField;
use polar_core::linalg::{self, Matrix};
use proptest::prelude::*;

const B: Budget = Budget(1_000_000);

fn field(p: u32, n: usize) -> Arc<GaloisField> {
    Arc::new(GaloisField::new(p, n, None).unwrap())
}

/// `(p, N)` for the small fields the properties run over.
fn small_field() -> impl Strategy<Value = (u32, usize)> {
    prop_oneof![Just((2, 1)), Just((2, 2)), Just((3, 1)), Just((3, 2)), Just((5, 1)), Just((2, 3))]
}

fn matrix_from(k: &GaloisField, n: usize, raw: &[u64], upper: bool) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if !upper || j >= i {
                m.set(i, j, k.element_at(raw[i * n + j] % k.order()));
            }
        }
    }
    m
}

fn quadratic() -> impl Strategy<Value = QuadraticForm> {
    (small_field(), 1usize..=3)
        .prop_flat_map(|(pn, n)| (Just(pn), Just(n), prop::collection::vec(any::<u64>(), n * n)))
        .prop_map(|((p, e), n, raw)| {
            let k = field(p, e);
            let u = matrix_from(&k, n, &raw, true);
            QuadraticForm::new(k.clone(), k.full(), u).unwrap()
        })
}

fn vector(k: &GaloisField, raw: &[u64]) -> Vec<polar_core::gf::FieldElement> {
    raw.iter().map(|&r| k.element_at(r % k.order())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_identity(q in quadratic(), ru in prop::collection::vec(any::<u64>(), 3), rv in prop::collection::vec(any::<u64>(), 3)) {
        let k = q.field().clone();
        let n = q.dim();
        let u = vector(&k, &ru[..n]);
        let v = vector(&k, &rv[..n]);
        let sum: Vec<_> = u.iter().zip(&v).map(|(a, b)| k.add(a, b)).collect();
        let expected = k.sub(&k.sub(&q.eval(&sum).unwrap(), &q.eval(&u).unwrap()), &q.eval(&v).unwrap());
        prop_assert_eq!(q.polar_form().eval(&u, &v).unwrap(), expected);
    }

    #[test]
    fn polar_type_by_characteristic(q in quadratic()) {
        let t = q.polar_form().classify_reflexive();
        if q.field().is_char_two() || q.polar_form().gram().is_zero() {
            prop_assert_eq!(t, FormType::Alternating);
        } else {
            prop_assert_eq!(t, FormType::Symmetric);
        }
    }

    #[test]
    fn radical_vectors_annihilate(q in quadratic()) {
        let b = q.polar_form();
        let k = q.field().clone();
        let n = q.dim();
        for r in b.radical() {
            for i in 0..n {
                let e: Vec<_> = (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect();
                prop_assert!(b.eval(&r, &e).unwrap().is_zero());
            }
        }
        prop_assert_eq!(b.radical().is_empty(), !b.is_degenerate());
    }

    #[test]
    fn oracle_is_self_consistent(q in quadratic()) {
        // witt index, singular count and closed forms must agree
        prop_assert!(q.orthogonal_report(B).is_ok());
    }

    #[test]
    fn decomposition_reassembles(q in quadratic()) {
        prop_assume!(!q.is_degenerate());
        let d = q.decompose_hyperbolic_germ(B).unwrap();
        prop_assert!(d.germ.dim() <= 2);
        prop_assert_eq!(d.germ.witt_index(B).unwrap(), 0);
        prop_assert_eq!(d.hyperbolic_rank(), q.witt_index(B).unwrap());
        let p = d.change_of_basis();
        prop_assert_eq!(linalg::rank(q.field(), &p), q.dim());
        prop_assert_eq!(q.pullback(&p).unwrap(), d.split_form());
        prop_assert!(d.split_form().maps_onto(&p, &q, B).unwrap());
        if q.dim() % 2 == 1 {
            prop_assert!(d.gamma.is_some());
        }
    }

    #[test]
    fn discriminant_matches_witt(p in prop_oneof![Just(3u32), Just(5)], half in 1usize..=2, raw in prop::collection::vec(any::<u64>(), 16)) {
        let k = field(p, 1);
        let n = 2 * half;
        let q = QuadraticForm::new(k.clone(), k.full(), matrix_from(&k, n, &raw, true)).unwrap();
        prop_assume!(!q.is_degenerate());
        let plus = q.orthogonal_class(B).unwrap() == OrthogonalClass::Plus;
        prop_assert_eq!(q.discriminant_says_plus().unwrap(), plus);
    }

    #[test]
    fn diagonal_map_is_onto_in_char_two(e in 1usize..=3, n in 1usize..=3, raw in prop::collection::vec(any::<u64>(), 9)) {
        let k = field(2, e);
        let mut m = matrix_from(&k, n, &raw, true);
        for i in 0..n {
            for j in 0..i {
                m.set(i, j, m.get(j, i));
            }
        }
        let b = SesquilinearForm::bilinear(k.clone(), m).unwrap();
        prop_assume!(b.classify_reflexive() == FormType::SymmetricNotAlternating);
        let mut image = std::collections::HashSet::new();
        let mut v = vec![k.zero(); n];
        for x in k.elements() {
            for i in 0..n {
                v[i] = x;
                image.insert(b.eval(&v, &v).unwrap());
                v[i] = k.zero();
            }
        }
        prop_assert_eq!(image.len() as u64, k.order());
    }

    #[test]
    fn composition_commutes_with_polar(q in quadratic(), ra in any::<u64>()) {
        let k = q.field().clone();
        for m in (1..=k.degree()).filter(|m| k.degree() % m == 0) {
            let sub = k.subfield(m).unwrap();
            let l = LinearFunctional::new(k.element_at(ra % k.order()), sub);
            let lq = compose_quadratic(&q, &l).unwrap();
            prop_assert_eq!(lq.polar_form(), compose_sesquilinear(&q.polar_form(), &l).unwrap());
        }
    }

    #[test]
    fn composition_is_pointwise(q in quadratic(), ra in any::<u64>(), rv in prop::collection::vec(any::<u64>(), 3)) {
        let k = q.field().clone();
        let sub = k.subfield(1).unwrap();
        let l = LinearFunctional::new(k.element_at(ra % k.order()), sub);
        let ctx = RestrictionContext::new(k.clone(), sub, q.dim());
        let v = vector(&k, &rv[..q.dim()]);
        let lq = compose_quadratic(&q, &l).unwrap();
        prop_assert_eq!(lq.eval(&ctx.restrict_vector(&v).unwrap()).unwrap(), l.apply(&k, &q.eval(&v).unwrap()));
        prop_assert_eq!(ctx.lift_vector(&ctx.restrict_vector(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn nondegenerate_sesquilinear_stays_nondegenerate(
        (p, e) in prop_oneof![Just((3u32, 2usize)), Just((2, 2)), Just((5, 2)), Just((2, 3))],
        n in 1usize..=2,
        sigma in 0usize..3,
        raw in prop::collection::vec(any::<u64>(), 4),
        ra in any::<u64>(),
    ) {
        let k = field(p, e);
        let b = SesquilinearForm::new(k.clone(), k.full(), matrix_from(&k, n, &raw, false), sigma).unwrap();
        prop_assume!(!b.is_degenerate());
        let alpha = k.element_at(ra % k.order());
        let c = compose_sesquilinear(&b, &LinearFunctional::new(alpha, k.subfield(1).unwrap())).unwrap();
        prop_assert_eq!(c.is_degenerate(), alpha.is_zero());
    }

    #[test]
    fn embedding_is_multiplicative(raw in prop::collection::vec(any::<u64>(), 8), n in 1usize..=2) {
        let k = field(3, 2);
        let ctx = RestrictionContext::new(k.clone(), k.subfield(1).unwrap(), n);
        let s = matrix_from(&k, n, &raw[..4], false);
        let t = matrix_from(&k, n, &raw[4..], false);
        let lhs = ctx.embed_isometry(&s.mul(&k, &t).unwrap()).unwrap();
        let rhs = ctx.embed_isometry(&s).unwrap().mul(&k, &ctx.embed_isometry(&t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
