mod common;

use common::*;
use llv_core::builders::build_verbitsky_component;
use llv_core::pipeline::{
    auto_omega, report_render, run_pipeline, to_json, Format, OmegaChoice, PipelineConfig,
    StageStatus,
};
use llv_core::{QuadraticFormSpec, Q};

const STAGES: [&str; 5] = ["llv", "markman", "isotypic", "hodge", "certify"];

#[test]
fn verbitsky_component_passes() {
    let r = run_pipeline(&sh5(), &PipelineConfig::default());
    assert!(r.passed(), "{:?}", r.stages);
    assert_eq!(r.stages.iter().map(|s| s.name).collect::<Vec<_>>(), STAGES);
    let c = r.certificate.as_ref().unwrap();
    assert_eq!((c.n, c.bound.as_str()), (0, "trivial group"));
    assert_eq!(r.so_tilde.as_ref().unwrap().dim_found, 21);
    assert_eq!(r.hodge.as_ref().unwrap().periods.len(), 3);
    let text = report_render(&r, Format::Text);
    assert!(text.contains("dim g_tot = 21 = dim so(7)"), "{text}");
}

#[test]
fn augmented_models() {
    let r = run_pipeline(&augmented(1), &PipelineConfig::default());
    assert!(r.passed(), "{:?}", r.stages);
    assert_eq!(r.certificate.as_ref().unwrap().bound, "Z/2");
    assert_eq!(
        r.markman.as_ref().unwrap().c_dims,
        vec![(2, 5), (4, 1), (6, 0), (8, 0)]
    );

    let r = run_pipeline(&augmented(2), &PipelineConfig::default());
    assert!(!r.passed());
    assert_eq!(r.stage("certify").unwrap().status, StageStatus::Failed);
    assert_eq!(r.stage("isotypic").unwrap().status, StageStatus::Failed);
    assert_eq!(r.stage("hodge").unwrap().status, StageStatus::Passed);
    let text = report_render(&r, Format::Text);
    assert!(!text.contains("(Z/2)^"), "{text}");
}

#[test]
fn k3_lattice_report() {
    let r = run_pipeline(&k3_lattice(), &PipelineConfig::default());
    assert!(r.passed(), "{:?}", r.stages);
    assert_eq!(r.isotypic.as_ref().unwrap().g_commutant_dim, 1);
    let text = report_render(&r, Format::Text);
    assert!(text.contains("dim g_tot = 276 = dim so(24)"), "{text}");
}

#[test]
fn output_is_deterministic() {
    let a = augmented(1);
    let config = PipelineConfig {
        seed: 7,
        source: "test".into(),
        ..PipelineConfig::default()
    };
    let first = to_json(&run_pipeline(&a, &config));
    let second = to_json(&run_pipeline(&a, &config));
    assert_eq!(first, second);
    assert!(!first.contains("timings"));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["source"], "test");
    assert_eq!(v["stages"][0]["status"], "passed");
    assert_eq!(v["certificate"]["status"]["state"], "certified");
}

#[test]
fn omega_selection() {
    let v = |x: &[i64]| x.iter().map(|&c| q(c)).collect::<Vec<Q>>();
    assert_eq!(auto_omega(&sh5()).unwrap(), v(&[0, 0, 1, 0, 0]));
    let negative =
        build_verbitsky_component(&QuadraticFormSpec::parse("U+<-1,-1,-1>").unwrap(), 2, 0)
            .unwrap();
    assert_eq!(auto_omega(&negative).unwrap(), v(&[1, 1, 0, 0, 0]));
}

#[test]
fn bad_omega_only_affects_certification() {
    let config = PipelineConfig {
        omega: OmegaChoice::Explicit(vec![q(1), q(0), q(0), q(0), q(0)]),
        ..Default::default()
    };
    let r = run_pipeline(&sh5(), &config);
    assert_eq!(r.stage("certify").unwrap().status, StageStatus::Error);
    for name in &STAGES[..4] {
        assert_eq!(r.stage(name).unwrap().status, StageStatus::Passed, "{name}");
    }
    assert!(r.certificate.is_none());
}
