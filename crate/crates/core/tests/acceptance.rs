//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use llv_core::decomposition::{markman_decompose, verify_ll_spanning};
use llv_core::finiteness::{certify, commutant_constraint_space, CertificateStatus};
use llv_core::hodge::{check_pi2_faithful, hodge_numbers, sample_periods, verify_weil_membership};
use llv_core::io::{from_json_str, to_canonical_json};
use llv_core::linalg::linear_relations;
use llv_core::llv::{compute_llv, verify_so_tilde, Llv};
use llv_core::pipeline::{report_render, run_pipeline, Format, PipelineConfig};
use llv_core::rep::{check_markman_c, isotypic_decompose, ConstituentKind, RepContext};
use llv_core::ring::{AlgebraElement, ValidationFailure};
use llv_core::sl2::{has_lefschetz_property, solve_lambda};
use llv_core::subspace::GradedSubspace;
use llv_core::{GradedAlgebra, GradedEndomorphism, SparseVec};

const K3_BUDGET: Duration = Duration::from_secs(300);
const SMALL_BUDGET: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> Vec<(&'static str, GradedAlgebra)> {
    vec![
        ("k3", k3_lattice()),
        ("sh", sh5()),
        ("augmented", augmented(1)),
    ]
}

fn llv_structure_k3() -> Outcome {
    let start = Instant::now();
    let a = k3_lattice();
    let llv = compute_llv(&a).map_err(|e| e.to_string())?;
    let r = verify_so_tilde(&a, &llv).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let b2 = 22;
    ensure!(llv.g.dim() == so_dim(b2 + 2), "dim g_tot = {}", llv.g.dim());
    ensure!(llv.g.dim() == 276, "dim g_tot = {}", llv.g.dim());
    ensure!(
        r.grading_dims == [b2, so_dim(b2) + 1, b2],
        "grading {:?}",
        r.grading_dims
    );
    ensure!(
        r.grading_dims == [22, 232, 22],
        "grading {:?}",
        r.grading_dims
    );
    ensure!(
        r.iso_verified,
        "isomorphism not verified: {:?}",
        r.first_failure
    );
    ensure!(r.so_h_dim == 231, "dim so(H) = {}", r.so_h_dim);
    ensure!(elapsed <= K3_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "dim 276, grading (22, 232, 22), so(H) 231, iso verified, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn llv_structure_small() -> Outcome {
    let start = Instant::now();
    let a = sh5();
    let llv = compute_llv(&a).map_err(|e| e.to_string())?;
    let r = verify_so_tilde(&a, &llv).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(
        a.dims() == verbitsky_dims(5, 2, 0).as_slice(),
        "dims {:?}",
        a.dims()
    );
    ensure!(a.dims() == [1, 5, 15, 5, 1], "dims {:?}", a.dims());
    ensure!(
        llv.g.dim() == so_dim(7) && llv.g.dim() == 21,
        "dim g_tot = {}",
        llv.g.dim()
    );
    ensure!(r.grading_dims == [5, 11, 5], "grading {:?}", r.grading_dims);
    ensure!(
        r.iso_verified,
        "isomorphism not verified: {:?}",
        r.first_failure
    );
    ensure!(elapsed <= SMALL_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "dims (1,5,15,5,1), dim 21 = dim so(7), grading (5,11,5), {:.3}s",
        elapsed.as_secs_f64()
    ))
}

/// Dimension of `{D of shift −2 : [L, D] = 0}`, by brute force over
/// elementary matrices.
fn lambda_ambiguity(a: &GradedAlgebra, l: &GradedEndomorphism) -> usize {
    let dims = a.dims();
    let mut columns = Vec::new();
    for k in 1..dims.len() {
        for r in 0..dims[k - 1] {
            for c in 0..dims[k] {
                let mut d = GradedEndomorphism::zero(dims, -2);
                let mut m = llv_core::Matrix::zeros(dims[k - 1], dims[k]);
                m[(r, c)] = q(1);
                d.set_block(k, m);
                columns.push(l.bracket(&d).to_sparse());
            }
        }
    }
    linear_relations(GradedEndomorphism::flat_len(dims, 0), &columns).len()
}

fn sl2_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0;
    for (name, a) in fixtures() {
        let b2 = a.b2();
        let theta = a.theta();
        let mut found = 0;
        let mut tries = 0;
        while found < 10 {
            tries += 1;
            ensure!(tries < 500, "{name}: could not sample 10 Lefschetz classes");
            let x = AlgebraElement::new(2, (0..b2).map(|_| q(rng.gen_range(-3..=3))).collect());
            if !has_lefschetz_property(&a, &x).map_err(|e| e.to_string())? {
                continue;
            }
            let t = solve_lambda(&a, &x).map_err(|e| format!("{name}: {e}"))?;
            ensure!(t.e.bracket(&t.f) == theta, "{name}: [L, Λ] ≠ θ");
            ensure!(
                theta.bracket(&t.e) == t.e.scale(&q(2)),
                "{name}: [θ, L] ≠ 2L"
            );
            ensure!(
                theta.bracket(&t.f) == t.f.scale(&q(-2)),
                "{name}: [θ, Λ] ≠ −2Λ"
            );
            ensure!(t.check().all(), "{name}: triple check failed");
            ensure!(lambda_ambiguity(&a, &t.e) == 0, "{name}: Λ not unique");
            found += 1;
        }
        total += found;
    }
    Ok(format!(
        "{total} triples over 3 fixtures, identities exact, solution unique each time"
    ))
}

fn ll_spanning() -> Outcome {
    for (name, a) in fixtures() {
        let llv = compute_llv(&a).map_err(|e| e.to_string())?;
        let r = verify_ll_spanning(&a, &llv);
        ensure!(r.spans_all && r.passed, "{name}: {r:?}");
        ensure!(
            r.degrees.iter().all(|d| d.equals_module && d.g0_stable),
            "{name}: per-degree check failed"
        );
    }
    Ok(
        "k3, sh, augmented: A2·Prim spans H* and equals the generated module in every degree"
            .into(),
    )
}

fn markman() -> Outcome {
    let a = augmented(1);
    let llv = compute_llv(&a).map_err(|e| e.to_string())?;
    let m = markman_decompose(&a, &llv);
    let c = m.c_dims();
    ensure!(c.first() == Some(&(2, 5)), "C² {:?}", c.first());
    ensure!(
        m.c_part(2)
            .is_some_and(|s| *s == GradedSubspace::level(a.dims(), 1)),
        "C² ≠ H²"
    );
    ensure!(c.iter().find(|x| x.0 == 4) == Some(&(4, 1)), "C⁴ {c:?}");
    ensure!(
        c.iter().filter(|x| x.0 > 4).all(|x| x.1 == 0),
        "higher C {c:?}"
    );
    ensure!(
        m.degrees.iter().all(|d| d.direct_sum && d.step_v),
        "direct sum or step (v) failed"
    );
    ensure!(
        m.generates && m.verified,
        "generation {} verified {}",
        m.generates,
        m.verified
    );
    let s = sh5();
    let sl = compute_llv(&s).map_err(|e| e.to_string())?;
    let sm = markman_decompose(&s, &sl);
    ensure!(
        sm.c_dims().iter().filter(|x| x.0 >= 4).all(|x| x.1 == 0),
        "SH C {:?}",
        sm.c_dims()
    );
    ensure!(sm.verified, "SH decomposition not verified");
    Ok("augmented: C²=H² (5), C⁴ dim 1, direct, generating, step (v); SH: C^{2i}=0 for i≥2".into())
}

fn rep_checks() -> Outcome {
    let k3 = k3_lattice();
    let llv = compute_llv(&k3).map_err(|e| e.to_string())?;
    let cs = commutant_constraint_space(&k3, &llv).map_err(|e| e.to_string())?;
    ensure!(
        cs.commutant.len() == 1,
        "commutant of g_tot on H*(K3) has dim {}",
        cs.commutant.len()
    );
    let mut parts = 0;
    for (name, a) in fixtures()
        .into_iter()
        .chain([("augmented t=2", augmented(2))])
    {
        let llv = compute_llv(&a).map_err(|e| e.to_string())?;
        let ctx = RepContext::new(&llv.so_h.algebra).map_err(|e| e.to_string())?;
        let full = isotypic_decompose(&ctx, &GradedSubspace::full(a.dims()), "H*")
            .map_err(|e| e.to_string())?;
        ensure!(
            full.schur_consistent && full.unresolved_dim == 0,
            "{name}: Schur identity fails on H*"
        );
        let sum: usize = full
            .constituents
            .iter()
            .map(|c| {
                c.multiplicity.unwrap() * c.multiplicity.unwrap() * c.endomorphism_dim.unwrap()
            })
            .sum();
        ensure!(
            sum == full.commutant_dim,
            "{name}: Σ m² = {sum} vs commutant {}",
            full.commutant_dim
        );
        let m = markman_decompose(&a, &llv);
        for d in m.degrees.iter().filter(|d| !d.c_part.is_zero()) {
            let r = isotypic_decompose(&ctx, &d.c_part, "C").map_err(|e| e.to_string())?;
            ensure!(
                r.schur_consistent,
                "{name}: Schur identity fails on C^{}",
                d.degree
            );
            let expect = !(name == "augmented t=2" && d.degree == 4);
            ensure!(
                check_markman_c(&r) == expect,
                "{name}: markman_c on C^{} is {}",
                d.degree,
                !expect
            );
            parts += 1;
        }
    }
    let s = sh5();
    let sl = compute_llv(&s).map_err(|e| e.to_string())?;
    let ctx = RepContext::new(&sl.so_h.algebra).map_err(|e| e.to_string())?;
    let fake = isotypic_decompose(&ctx, &GradedSubspace::level(s.dims(), 2), "H4")
        .map_err(|e| e.to_string())?;
    ensure!(!check_markman_c(&fake), "Sym² control accepted");
    ensure!(
        fake.constituents
            .iter()
            .any(|c| c.kind == ConstituentKind::Other && c.eigenspace_dim == sym_dim(5, 2) - 1),
        "Sym² control lacks the traceless constituent"
    );
    Ok(format!("K3 commutant 1, Schur identity on 4 fixtures, markman_c on {parts} C-parts, Sym² control rejected"))
}

fn weil_membership() -> Outcome {
    let mut checked = 0;
    for (name, a) in fixtures() {
        let llv = compute_llv(&a).map_err(|e| e.to_string())?;
        let periods = sample_periods(&a, 3, 1).map_err(|e| e.to_string())?;
        ensure!(periods.len() >= 3, "{name}: fewer than 3 periods");
        let b2 = a.b2();
        let n = a.half_dim();
        let extra = if name == "augmented" { 1 } else { 0 };
        for p in &periods {
            let w = verify_weil_membership(&a, &llv, p).map_err(|e| format!("{name}: {e}"))?;
            ensure!(
                w.restriction_matches,
                "{name}: degree-2 block differs from W"
            );
            ensure!(
                w.derivation,
                "{name}: extended operator is not a derivation"
            );
            ensure!(w.consistent(), "{name}: spectrum inconsistent");
            let h2 = hodge_numbers(&w, 2).map_err(|e| e.to_string())?;
            ensure!(
                h2 == vec![(2, 0, 1), (1, 1, b2 - 2), (0, 2, 1)],
                "{name}: H² Hodge numbers {h2:?}"
            );
            for k in 0..a.dims().len() {
                let h = hodge_numbers(&w, 2 * k).map_err(|e| e.to_string())?;
                for &(p, q, d) in &h {
                    ensure!(
                        h.contains(&(q, p, d)),
                        "{name}: h^{p},{q} asymmetric in degree {}",
                        2 * k
                    );
                }
                ensure!(
                    h.iter().map(|x| x.2).sum::<usize>() == a.dims()[k],
                    "{name}: degree {} incomplete",
                    2 * k
                );
                let oracle = verbitsky_hodge(b2, n, k, extra);
                ensure!(h == oracle, "{name}: degree {}: {h:?} vs {oracle:?}", 2 * k);
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} periods: exact membership, derivations, H² numbers (1, b2−2, 1), symmetric in every degree"))
}

fn pi2() -> Outcome {
    for (name, a) in fixtures().into_iter().chain([("k3 small", k3_small())]) {
        let llv: Llv = compute_llv(&a).map_err(|e| e.to_string())?;
        let periods = sample_periods(&a, 3, 2).map_err(|e| e.to_string())?;
        let data = periods
            .iter()
            .map(|p| verify_weil_membership(&a, &llv, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let r = check_pi2_faithful(&a, &llv, &data).map_err(|e| e.to_string())?;
        ensure!(r.kernel_dim == 0, "{name}: ρ⁺ kernel {}", r.kernel_dim);
        ensure!(r.degree2_standard, "{name}: degree-2 block not standard");
        ensure!(
            r.so_h_dim == so_dim(a.b2()),
            "{name}: dim so(H) = {}",
            r.so_h_dim
        );
        ensure!(r.weil_restriction_injective && r.passed, "{name}: {r:?}");
    }
    Ok("ρ⁺ kernel 0 and degree-2 block standard on k3, sh, augmented, k3 small".into())
}

fn finiteness() -> Outcome {
    let omega = |b2: usize| {
        let mut w = vec![q(0); b2];
        w[0] = q(1);
        w[1] = q(1);
        w[2] = q(1);
        w
    };
    let a = augmented(1);
    let llv = compute_llv(&a).map_err(|e| e.to_string())?;
    let c =
        certify(&a, &llv, &markman_decompose(&a, &llv), &omega(5)).map_err(|e| e.to_string())?;
    ensure!(
        c.is_certified() && c.n == 1 && c.bound == "Z/2",
        "augmented t=1: {:?} N = {}",
        c.status,
        c.n
    );
    ensure!(
        c.components.iter().all(|k| k.phi_omega_nondegenerate),
        "augmented t=1: φ_ω degenerate"
    );
    // φ_ω(c, c) = φ(c, c) = ∫ c·c with sign exponent 0
    let cvec = AlgebraElement::new(4, (0..16).map(|i| q(i64::from(i == 15))).collect());
    let expected = a.poincare_phi(&cvec, &cvec).map_err(|e| e.to_string())?;
    ensure!(expected == q(1), "oracle φ(c, c) = {expected}");
    ensure!(
        c.components[0].phi_omega_value.as_ref() == Some(&expected),
        "φ_ω(c, c) = {:?}",
        c.components[0].phi_omega_value
    );

    let s = sh5();
    let sl = compute_llv(&s).map_err(|e| e.to_string())?;
    let cs = certify(&s, &sl, &markman_decompose(&s, &sl), &omega(5)).map_err(|e| e.to_string())?;
    ensure!(
        cs.is_certified() && cs.n == 0 && cs.bound == "trivial group",
        "SH: {:?} N = {}",
        cs.status,
        cs.n
    );

    let a2 = augmented(2);
    let l2 = compute_llv(&a2).map_err(|e| e.to_string())?;
    let c2 =
        certify(&a2, &l2, &markman_decompose(&a2, &l2), &omega(5)).map_err(|e| e.to_string())?;
    match &c2.status {
        CertificateStatus::Failed {
            reason,
            degree: 4,
            constituent: Some(_),
        } if reason.contains("multiplicity 2") => {}
        other => return Err(format!("augmented t=2: {other:?}")),
    }
    Ok("augmented t=1 certified Z/2 with φ_ω(c,c)=1, SH trivial bound, t=2 failed with multiplicity 2 in C⁴".into())
}

fn infrastructure() -> Outcome {
    for (name, a) in fixtures()
        .into_iter()
        .chain([("augmented t=2", augmented(2))])
    {
        let text = to_canonical_json(&a);
        let back = from_json_str(&text).map_err(|e| e.to_string())?;
        ensure!(back == a, "{name}: loaded algebra differs");
        ensure!(
            to_canonical_json(&back) == text,
            "{name}: round trip not byte-stable"
        );
    }
    for a in [sh5(), augmented(1)] {
        let one = report_render(&run_pipeline(&a, &PipelineConfig::default()), Format::Json);
        let two = report_render(&run_pipeline(&a, &PipelineConfig::default()), Format::Json);
        ensure!(one == two, "pipeline output differs between runs");
    }
    // associativity fault: e1·e2 gets an extra component
    let mut bad = sh5();
    let prod = bad.basis_product(1, 0, 1, 1).unwrap().clone();
    let shifted = prod.axpy(&q(1), &SparseVec::unit(0));
    bad.set_product(2, 0, 2, 1, shifted.clone());
    bad.set_product(2, 1, 2, 0, shifted);
    let report = bad.validate();
    let witness = report.failures.iter().find_map(|f| match f {
        ValidationFailure::NonAssociative { a, b, c } => Some((*a, *b, *c)),
        _ => None,
    });
    ensure!(
        witness.is_some(),
        "associativity fault not caught: {}",
        report.summary()
    );
    // Frobenius fault: kill the products of e1 with degree 2
    let mut bad = k3_small();
    for j in 0..4 {
        bad.set_product(2, 0, 2, j, SparseVec::new());
        bad.set_product(2, j, 2, 0, SparseVec::new());
    }
    let report = bad.validate();
    ensure!(
        report
            .failures
            .iter()
            .any(|f| matches!(f, ValidationFailure::FrobeniusDegenerate { degree: 2, .. })),
        "Frobenius fault not caught: {}",
        report.summary()
    );
    Ok(format!(
        "round trips byte-stable, pipeline deterministic, associativity witness {:?}, Frobenius fault in degree 2",
        witness.unwrap()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("llv structure, K3 lattice", llv_structure_k3),
        ("llv structure, SH(b2=5, n=2)", llv_structure_small),
        ("sl2 triples", sl2_suite),
        ("Looijenga-Lunts spanning", ll_spanning),
        ("Markman decomposition", markman),
        ("representation checks", rep_checks),
        ("Weil membership", weil_membership),
        ("pi2 mechanism", pi2),
        ("finiteness certificate", finiteness),
        ("infrastructure", infrastructure),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
