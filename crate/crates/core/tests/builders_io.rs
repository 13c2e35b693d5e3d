mod common;

use common::*;
use llv_core::builders::{build_augmented_model, build_k3, build_verbitsky_component};
use llv_core::forms::{bilinear, HyperbolicFrame, QuadraticFormSpec};
use llv_core::io::{
    canonical_hash, form_from_json_str, from_json_str, load_algebra, save_algebra,
    to_canonical_json,
};
use llv_core::{AlgebraElement, Error, GradedAlgebra, Q};
use proptest::prelude::*;

fn power(a: &GradedAlgebra, x: &AlgebraElement, k: usize) -> AlgebraElement {
    let mut acc = a.unit();
    for _ in 0..k {
        acc = a.cup(&acc, x).unwrap();
    }
    acc
}

#[test]
fn verbitsky_dims_match_symmetric_powers() {
    for (form, n) in [
        ("U+<1>", 1),
        ("U+<1>", 2),
        ("U+<1,1>", 2),
        ("U+<1,1,1>", 2),
        ("U+<-1>", 3),
    ] {
        let spec = QuadraticFormSpec::parse(form).unwrap();
        let a = build_verbitsky_component(&spec, n, 0).unwrap();
        assert_eq!(
            a.dims(),
            verbitsky_dims(spec.rank(), n, 0).as_slice(),
            "{form} n={n}"
        );
        let r = a.validate();
        assert!(r.is_ok(), "{form} n={n}: {}", r.summary());
    }
}

#[test]
fn k3_lattice_profile() {
    let a = k3_lattice();
    assert_eq!(a.dims(), &[1, 22, 1]);
    assert_eq!(a.b2(), 22);
    assert_eq!(a.phi_matrix(1).rank(), 22);
}

#[test]
fn verbitsky_at_half_dim_one_is_k3() {
    let spec = QuadraticFormSpec::parse("U+<2,-1/3>").unwrap();
    assert_eq!(
        build_verbitsky_component(&spec, 1, 0).unwrap(),
        build_k3(&spec).unwrap()
    );
}

#[test]
fn isotropic_classes_are_nilpotent() {
    let a = sh5();
    let m = a.bb_form().clone();
    let frame = HyperbolicFrame::find(&m).unwrap();
    for (s, w) in [
        (1, [0, 0, 1, 0, 0]),
        (3, [0, 0, 1, -2, 1]),
        (-2, [0, 0, 0, 1, 1]),
    ] {
        let w: Vec<Q> = frame.project(&m, &w.iter().map(|&v| q(v)).collect::<Vec<_>>());
        let x = frame.isotropic(&m, &q(s), &w);
        assert!(bilinear(&m, &x, &x).is_zero());
        let x = AlgebraElement::new(2, x);
        assert!(!power(&a, &x, 2).is_zero());
        assert!(power(&a, &x, 3).is_zero());
    }
}

#[test]
fn fujiki_normalization() {
    let a = sh5();
    for v in [[1, 1, 0, 0, 0], [2, 1, 1, 0, -1], [0, 0, 1, 1, 1]] {
        let x: Vec<Q> = v.iter().map(|&c| q(c)).collect();
        let qx = a.q(&x, &x);
        assert_eq!(
            a.integrate(&power(&a, &AlgebraElement::new(2, x), 4)),
            &qx * &qx
        );
    }
}

#[test]
fn augmented_model_profile() {
    for t in 0..3 {
        let a = augmented(t);
        assert_eq!(a.dims(), verbitsky_dims(5, 2, t).as_slice());
        assert!(a.validate().is_ok());
    }
    assert_eq!(augmented(0), sh5());
    let a = augmented(1);
    let c = a.basis_element(4, 15);
    for i in 0..5 {
        assert!(a.cup(&c, &a.basis_element(2, i)).unwrap().is_zero());
    }
    assert_eq!(a.integrate(&a.cup(&c, &c).unwrap()), q(1));
}

#[test]
fn builder_rejections() {
    let degenerate = QuadraticFormSpec::diagonal(&[1, 0]);
    assert!(build_k3(&degenerate).is_err());
    let small = QuadraticFormSpec::parse("U").unwrap();
    assert!(matches!(
        build_verbitsky_component(&small, 2, 0),
        Err(Error::Malformed(_))
    ));
    let spec = QuadraticFormSpec::parse("U+<1>").unwrap();
    assert!(matches!(
        build_verbitsky_component(&spec, 0, 0),
        Err(Error::Malformed(_))
    ));
    assert!(build_augmented_model(&spec, 1, 1, 0).is_err());
}

#[test]
fn form_expressions() {
    assert_eq!(QuadraticFormSpec::parse("k3").unwrap().rank(), 22);
    assert_eq!(
        QuadraticFormSpec::parse("U^3+E8(-1)^2").unwrap(),
        QuadraticFormSpec::k3_lattice()
    );
    assert_eq!(QuadraticFormSpec::parse("<1, -2/3>").unwrap().rank(), 2);
    for bad in ["", "U+", "V", "<1,x>", "U^a"] {
        assert!(QuadraticFormSpec::parse(bad).is_err(), "{bad:?}");
    }
}

#[test]
fn form_json() {
    let spec = form_from_json_str(r#"[[0, 1], [1, "-1/2"]]"#).unwrap();
    assert_eq!(spec.matrix()[(1, 1)], Q::new(-1, 2));
    assert_eq!(
        form_from_json_str(r#"[["2/4"]]"#).unwrap().matrix()[(0, 0)],
        Q::new(1, 2)
    );
    for bad in ["[]", "[[1, 2]]", "[[1, 0], [0, 0]]", r#"[["x"]]"#, "{}"] {
        assert!(form_from_json_str(bad).is_err(), "{bad}");
    }
}

#[test]
fn serialization_round_trip() {
    for a in [k3_lattice(), sh5(), augmented(1)] {
        let text = to_canonical_json(&a);
        let b = from_json_str(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_canonical_json(&b), text);
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }
}

#[test]
fn file_round_trip() {
    let path = std::env::temp_dir().join(format!("llv-builders-io-{}.json", std::process::id()));
    let a = augmented(1);
    save_algebra(&a, &path).unwrap();
    let b = load_algebra(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(a, b);
    assert!(load_algebra(std::env::temp_dir().join("llv-missing-file.json")).is_err());
}

#[test]
fn corrupted_json_is_rejected() {
    let text = to_canonical_json(&k3_small());
    assert!(from_json_str(&text[..text.len() / 2]).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["bb_form"][0][0] = serde_json::Value::String("2/4".into());
    assert!(matches!(
        from_json_str(&v.to_string()),
        Err(Error::Schema { .. })
    ));
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["products"].as_array_mut().unwrap().clear();
    assert!(matches!(
        from_json_str(&v.to_string()),
        Err(Error::Validation(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn k3_from_nondegenerate_diagonals(entries in proptest::collection::vec((1i64..=5, prop::bool::ANY), 1..8)) {
        let diag: Vec<i64> = entries.iter().map(|&(v, neg)| if neg { -v } else { v }).collect();
        let a = build_k3(&QuadraticFormSpec::diagonal(&diag)).unwrap();
        prop_assert!(a.validate().is_ok());
        prop_assert_eq!(a.phi_matrix(1).rank(), diag.len());
        let b = from_json_str(&to_canonical_json(&a)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn quotient_is_seed_independent(seed in 0u64..1000) {
        let spec = QuadraticFormSpec::parse("U+<1>").unwrap();
        let a = build_verbitsky_component(&spec, 2, seed).unwrap();
        let b = build_verbitsky_component(&spec, 2, 0).unwrap();
        prop_assert_eq!(to_canonical_json(&a), to_canonical_json(&b));
    }
}
