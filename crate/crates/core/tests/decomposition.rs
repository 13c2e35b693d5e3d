mod common;

use common::*;
use llv_core::decomposition::{
    compute_prim, generated_subalgebra, markman_decompose, module_b, module_generated,
    orth_complement, subalgebra_a, verify_ll_spanning,
};
use llv_core::llv::compute_llv;
use llv_core::subspace::GradedSubspace;

#[test]
fn primitive_classes() {
    let a = sh5();
    let llv = compute_llv(&a).unwrap();
    assert_eq!(compute_prim(&a, &llv).level_dims(), vec![1, 0, 0, 0, 0]);
    for t in 1..3 {
        let a = augmented(t);
        let llv = compute_llv(&a).unwrap();
        assert_eq!(compute_prim(&a, &llv).level_dims(), vec![1, 0, t, 0, 0]);
    }
    let k3 = k3_small();
    let llv = compute_llv(&k3).unwrap();
    assert_eq!(compute_prim(&k3, &llv).level_dims(), vec![1, 0, 0]);
}

#[test]
fn generated_subalgebras() {
    let a = sh5();
    assert_eq!(subalgebra_a(&a, 0).level_dims(), vec![1, 0, 0, 0, 0]);
    assert_eq!(subalgebra_a(&a, 1).level_dims(), verbitsky_dims(5, 2, 0));
    let aug = augmented(2);
    assert_eq!(subalgebra_a(&aug, 1).level_dims(), verbitsky_dims(5, 2, 0));
    assert_eq!(subalgebra_a(&aug, 2).level_dims(), verbitsky_dims(5, 2, 2));
    let e = GradedSubspace::from_vectors(aug.dims(), &[(1, aug.basis_element(2, 0).coords)]);
    assert_eq!(
        generated_subalgebra(&aug, &e).level_dims(),
        vec![1, 1, 1, 0, 0]
    );
}

#[test]
fn modules_generated_by_primitives() {
    let k3 = k3_small();
    let llv = compute_llv(&k3).unwrap();
    let prim = compute_prim(&k3, &llv);
    assert_eq!(module_b(&k3, &llv, &prim, 0).total_dim(), k3.total_dim());

    let a = augmented(1);
    let llv = compute_llv(&a).unwrap();
    let prim = compute_prim(&a, &llv);
    let b2 = module_b(&a, &llv, &prim, 1);
    assert_eq!(b2.level_dims(), verbitsky_dims(5, 2, 0));
    let c = a.basis_element(4, 15);
    assert!(!b2.contains(2, &c.coords));
    assert_eq!(module_b(&a, &llv, &prim, 2).total_dim(), a.total_dim());
    let seed = GradedSubspace::from_vectors(a.dims(), &[(2, c.coords)]);
    assert_eq!(module_generated(&llv, &seed).total_dim(), 1);
}

#[test]
fn orthogonal_complements() {
    let a = augmented(1);
    let zero = GradedSubspace::zero(a.dims());
    let all = orth_complement(&a, &zero);
    assert_eq!(all.space.total_dim(), a.total_dim());
    let sh_part = subalgebra_a(&a, 1);
    let o = orth_complement(&a, &sh_part);
    assert!(o.complementary);
    assert_eq!(o.space.level_dims(), vec![0, 0, 1, 0, 0]);
    assert!(o.space.contains(2, &a.basis_element(4, 15).coords));
    let full = orth_complement(&a, &GradedSubspace::full(a.dims()));
    assert!(full.space.is_zero());
}

#[test]
fn markman_parts() {
    for (a, t) in [(sh5(), 0), (augmented(1), 1), (augmented(2), 2)] {
        let llv = compute_llv(&a).unwrap();
        let m = markman_decompose(&a, &llv);
        assert!(m.verified && m.generates);
        for (degree, dim) in m.c_dims() {
            let expected = match degree {
                2 => 5,
                4 => t,
                _ => 0,
            };
            assert_eq!(dim, expected, "degree {degree}");
        }
        assert!(m
            .degrees
            .iter()
            .all(|d| d.direct_sum && d.step_v && d.b_nondegenerate));
    }
    let k3 = k3_lattice();
    let llv = compute_llv(&k3).unwrap();
    let m = markman_decompose(&k3, &llv);
    assert!(m.verified);
    assert_eq!(m.c_part(2).unwrap().total_dim(), 22);
}

#[test]
fn lefschetz_span() {
    for a in [k3_small(), sh5(), augmented(2)] {
        let llv = compute_llv(&a).unwrap();
        let r = verify_ll_spanning(&a, &llv);
        assert!(r.passed && r.spans_all && r.direct);
        assert!(r.degrees.iter().all(|d| d.equals_module));
    }
}
