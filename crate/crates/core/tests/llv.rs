mod common;

use common::*;
use llv_core::builders::build_k3;
use llv_core::lie::lie_closure;
use llv_core::llv::{compute_llv, is_q_skew, verify_so_tilde};
use llv_core::sl2::{has_lefschetz_property, solve_lambda};
use llv_core::{AlgebraElement, Error, QuadraticFormSpec, Q};
use proptest::prelude::*;

fn elem(v: &[i64]) -> AlgebraElement {
    AlgebraElement::new(2, v.iter().map(|&x| q(x)).collect())
}

#[test]
fn lefschetz_property_examples() {
    let plus = build_k3(&QuadraticFormSpec::diagonal(&[1, 1])).unwrap();
    assert!(has_lefschetz_property(&plus, &elem(&[1, 0])).unwrap());
    let mixed = build_k3(&QuadraticFormSpec::diagonal(&[1, -1])).unwrap();
    assert!(!has_lefschetz_property(&mixed, &elem(&[1, 1])).unwrap());
    assert!(matches!(
        solve_lambda(&mixed, &elem(&[1, 1])),
        Err(Error::NoSl2(_))
    ));
    let a = sh5();
    assert!(!has_lefschetz_property(&a, &elem(&[1, 0, 0, 0, 0])).unwrap());
    assert!(has_lefschetz_property(&a, &elem(&[1, 1, 0, 0, 0])).unwrap());
    assert!(!has_lefschetz_property(&a, &elem(&[0, 0, 0, 0, 0])).unwrap());
}

#[test]
fn lambda_on_k3_has_closed_form() {
    // Λ(top) = (2/q(x))·x and Λ(y) = (2 q(x,y)/q(x))·1
    let a = k3_small();
    let x = elem(&[2, 1, 1, 3]);
    let qx = a.q(&x.coords, &x.coords);
    let triple = solve_lambda(&a, &x).unwrap();
    let (_, top_image) = triple.f.apply_level(2, &[q(1)]).unwrap();
    let expected: Vec<Q> = x.coords.iter().map(|c| &(&q(2) * c) / &qx).collect();
    assert_eq!(top_image, expected);
    for i in 0..4 {
        let y = a.basis_element(2, i);
        let (_, image) = triple.f.apply_level(1, &y.coords).unwrap();
        assert_eq!(image, vec![&(&q(2) * &a.q(&x.coords, &y.coords)) / &qx]);
    }
}

#[test]
fn single_triple_closes_to_sl2() {
    let a = sh5();
    let t = solve_lambda(&a, &elem(&[1, 2, 0, 1, 0])).unwrap();
    assert!(t.check().all());
    assert_eq!(t.h, a.theta());
    assert_eq!(lie_closure(&[t.e, t.f]).unwrap().dim(), 3);
}

#[test]
fn total_algebra_dimension() {
    for a in [k3_small(), k3_lattice(), sh5(), augmented(1), augmented(2)] {
        let llv = compute_llv(&a).unwrap();
        let b2 = a.b2();
        assert_eq!(llv.g.dim(), so_dim(b2 + 2));
        assert_eq!(llv.parts.dims(), [b2, so_dim(b2) + 1, b2]);
        assert_eq!(llv.so_h.algebra.dim(), so_dim(b2));
        assert!(llv.g.closure_failure().is_none());
    }
}

#[test]
fn closure_is_idempotent() {
    let llv = compute_llv(sh5_shared()).unwrap();
    let again = lie_closure(llv.g.basis()).unwrap();
    assert!(again.same_span(&llv.g));
    assert!(lie_closure(&llv.lambdas).unwrap().dim() < llv.g.dim());
}

#[test]
fn bracket_respects_grading() {
    let a = sh5_shared();
    let llv = compute_llv(a).unwrap();
    assert!(llv.g.contains(&a.theta()));
    for i in [-2, 0, 2] {
        for j in [-2, 0, 2] {
            for x in llv.g.part(i) {
                for y in llv.g.part(j) {
                    let z = x.bracket(y);
                    assert!(llv.g.contains(&z));
                    if i + j == 4 || i + j == -4 {
                        assert!(z.is_zero());
                    } else if !z.is_zero() {
                        assert_eq!(a.theta().bracket(&z), z.scale(&q((i + j) as i64)));
                    }
                }
            }
        }
    }
}

#[test]
fn so_h_acts_by_skew_derivations() {
    for a in [k3_small(), sh5(), augmented(1)] {
        let llv = compute_llv(&a).unwrap();
        assert!(llv.so_h.is_standard());
        for op in llv.so_h.algebra.basis() {
            assert!(a.derivation_failure(op).is_none());
            assert!(is_q_skew(a.bb_form(), op.block(1).unwrap()));
            assert!(op.bracket(&a.theta()).is_zero());
        }
    }
}

#[test]
fn model_map_is_an_isomorphism() {
    for a in [k3_small(), sh5(), augmented(2)] {
        let llv = compute_llv(&a).unwrap();
        let r = verify_so_tilde(&a, &llv).unwrap();
        assert!(r.iso_verified, "{:?}", r.first_failure);
        assert_eq!(r.dim_found, r.dim_expected);
        assert_eq!(r.lambda_span_dim, a.b2());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lefschetz_classes_give_sl2_triples(v in proptest::collection::vec(-3i64..=3, 5)) {
        let a = sh5_shared();
        let x = elem(&v);
        let lefschetz = has_lefschetz_property(a, &x).unwrap();
        prop_assert_eq!(lefschetz, !a.q(&x.coords, &x.coords).is_zero());
        match solve_lambda(a, &x) {
            Ok(t) => {
                prop_assert!(lefschetz);
                prop_assert!(t.check().all());
            }
            Err(Error::NoSl2(_)) => prop_assert!(!lefschetz),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
