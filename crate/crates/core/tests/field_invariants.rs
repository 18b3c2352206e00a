//! Exhaustive checks of trace, norm, Frobenius and square classes on every
//! tower with |K| ≤ 4096.

use std::collections::HashSet;

use polar_core::gf::{GaloisField, SquareClass, Subfield};

fn fields() -> Vec<GaloisField> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7, 11, 13] {
        for n in 1..=12usize {
            if (p as u64).pow(n as u32) <= 4096 {
                out.push(GaloisField::new(p, n, None).unwrap());
            }
        }
    }
    out
}

fn subfields(k: &GaloisField) -> Vec<Subfield> {
    (1..=k.degree())
        .filter(|m| k.degree().is_multiple_of(*m))
        .map(|m| k.subfield(m).unwrap())
        .collect()
}

#[test]
fn trace_is_linear_onto_and_frobenius_invariant() {
    for k in fields() {
        let samples: Vec<_> = k.elements().step_by((k.order() as usize / 16).max(1)).collect();
        for f in subfields(&k) {
            let scalars = k.subfield_elements(f);
            let mut image = HashSet::new();
            for x in k.elements() {
                let t = k.relative_trace(&x, f);
                assert!(k.is_in_subfield(&t, f));
                image.insert(t);
                assert_eq!(k.relative_trace(&k.frobenius_power(&x, f.degree()), f), t);
                for y in &samples {
                    let lhs = k.relative_trace(&k.add(&x, y), f);
                    assert_eq!(lhs, k.add(&t, &k.relative_trace(y, f)));
                }
                let c = scalars[(k.index_of(&x) as usize) % scalars.len()];
                assert_eq!(k.relative_trace(&k.mul(&c, &x), f), k.mul(&c, &t));
            }
            assert_eq!(image.len(), scalars.len(), "trace onto F for GF({}^{})", k.p(), k.degree());
        }
    }
}

#[test]
fn norm_is_multiplicative_and_onto() {
    for k in fields() {
        let samples: Vec<_> = k.elements().skip(1).step_by((k.order() as usize / 16).max(1)).collect();
        for f in subfields(&k) {
            let mut image = HashSet::new();
            for x in k.elements().skip(1) {
                let n = k.relative_norm(&x, f);
                assert!(k.is_in_subfield(&n, f) && !n.is_zero());
                image.insert(n);
                for y in &samples {
                    assert_eq!(k.relative_norm(&k.mul(&x, y), f), k.mul(&n, &k.relative_norm(y, f)));
                }
            }
            assert_eq!(image.len() as u64, k.subfield_order(f) - 1);
        }
    }
}

#[test]
fn frobenius_fixes_exactly_the_subfield() {
    for k in fields() {
        for m in 1..=k.degree() {
            let fixed = k.elements().filter(|x| k.frobenius_power(x, m) == *x).count() as u64;
            let g = gcd(m, k.degree());
            assert_eq!(fixed, (k.p() as u64).pow(g as u32));
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn square_classes_split_evenly() {
    for k in fields().into_iter().filter(|k| k.p() != 2) {
        for f in subfields(&k) {
            let (mut sq, mut non) = (0u64, 0u64);
            for x in k.subfield_elements(f).into_iter().skip(1) {
                match k.square_class(&x, f).unwrap() {
                    SquareClass::Square => sq += 1,
                    SquareClass::Nonsquare => non += 1,
                }
            }
            assert_eq!(sq, non);
        }
    }
}

#[test]
fn pure_quadratic_elements_have_zero_trace() {
    for k in fields().into_iter().filter(|k| k.p() != 2 && k.degree() % 2 == 0) {
        let f = k.subfield(k.degree() / 2).unwrap();
        let mut seen = 0;
        for x in k.elements() {
            if !k.is_in_subfield(&x, f) && k.is_in_subfield(&k.mul(&x, &x), f) {
                seen += 1;
                assert!(k.relative_trace(&x, f).is_zero());
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn power_basis_spans() {
    for k in fields().into_iter().filter(|k| k.order() <= 729) {
        for f in subfields(&k) {
            let basis = k.subfield_power_basis(f);
            let scalars = k.subfield_elements(f);
            let mut span = HashSet::from([k.zero()]);
            for b in &basis {
                span = span
                    .iter()
                    .flat_map(|v| scalars.iter().map(move |c| (v, c)))
                    .map(|(v, c)| k.add(v, &k.mul(c, b)))
                    .collect();
            }
            assert_eq!(span.len() as u64, k.order());
        }
    }
}
