//! The end-to-end run: LLV structure, Markman decomposition, isotypic
//! analysis, Weil operators and the finiteness certificate.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::decomposition::{
    markman_decompose, verify_ll_spanning, LlSpanningReport, MarkmanDecomposition,
};
use crate::error::{Error, Result};
use crate::finiteness::{certify, commutant_constraint_space, FinitenessCertificate};
use crate::hodge::{
    check_pi2_faithful, hodge_numbers, sample_periods, verify_weil_membership, PeriodPoint,
    Pi2Report,
};
use crate::io::canonical_hash;
use crate::llv::{compute_llv, verify_so_tilde, Llv, SoTildeReport};
use crate::rational::Q;
use crate::rep::{check_markman_c, isotypic_decompose, IsotypicReport, RepContext};
use crate::ring::{unit_vec, AlgebraElement, GradedAlgebra};
use crate::sl2::has_lefschetz_property;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaChoice {
    Auto,
    Explicit(Vec<Q>),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub seed: u64,
    pub omega: OmegaChoice,
    pub periods: usize,
    /// How the algebra was obtained, recorded verbatim.
    pub source: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            omega: OmegaChoice::Auto,
            periods: 3,
            source: String::new(),
        }
    }
}

/// First class among `e_i`, `e_i + e_j`, `e_i − e_j` with `q > 0` and the
/// Lefschetz property.
pub fn auto_omega(algebra: &GradedAlgebra) -> Result<Vec<Q>> {
    let b2 = algebra.b2();
    let singles = (0..b2).map(|i| unit_vec(b2, i));
    let pairs = (0..b2)
        .flat_map(|i| (i + 1..b2).map(move |j| (i, j)))
        .flat_map(|(i, j)| {
            [Q::ONE, -Q::ONE].into_iter().map(move |s| {
                let mut v = unit_vec(b2, i);
                v[j] = s;
                v
            })
        });
    for x in singles.chain(pairs) {
        if algebra.q(&x, &x).is_positive()
            && has_lefschetz_property(algebra, &AlgebraElement::new(2, x.clone()))?
        {
            return Ok(x);
        }
    }
    Err(Error::NoSl2(
        "no basis combination with q > 0 has the Lefschetz property".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Passed,
    Failed,
    Error,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: &'static str,
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkmanSummary {
    pub c_dims: Vec<(usize, usize)>,
    pub decomposition: MarkmanDecomposition,
    pub ll_spanning: LlSpanningReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotypicSummary {
    /// Dimension of the commutant of `g_tot` on all of `H*`.
    pub g_commutant_dim: usize,
    pub c_parts: Vec<IsotypicReport>,
    pub markman_c: Vec<bool>,
}

/// `(degree, [(p, q, h^{p,q})])` per degree.
pub type HodgeTable = Vec<(usize, Vec<(usize, usize, usize)>)>;

#[derive(Clone, Debug, Serialize)]
pub struct WeilSummary {
    pub periods: Vec<PeriodPoint>,
    pub consistent: Vec<bool>,
    /// `(degree, [(p, q, h^{p,q})])` for the first period.
    pub hodge_numbers: HodgeTable,
    pub hodge_numbers_agree: bool,
    pub hodge_symmetric: bool,
    pub pi2: Pi2Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaRecord {
    pub mode: &'static str,
    pub class: Vec<Q>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub source: String,
    pub input_hash: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub b2: usize,
    pub stages: Vec<StageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub so_tilde: Option<SoTildeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markman: Option<MarkmanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotypic: Option<IsotypicSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hodge: Option<WeilSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FinitenessCertificate>,
    /// Wall-clock seconds per stage; not part of the deterministic output.
    #[serde(skip)]
    pub timings: Vec<(&'static str, f64)>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.status == StageStatus::Passed)
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.name == name)
    }
}

struct Runner {
    stages: Vec<StageReport>,
    timings: Vec<(&'static str, f64)>,
}

impl Runner {
    /// Runs a stage if its inputs exist; the closure returns its output
    /// together with the reason its checks failed, if they did.
    fn run<T>(
        &mut self,
        name: &'static str,
        ready: bool,
        f: impl FnOnce() -> Result<(T, Option<String>)>,
    ) -> Option<T> {
        if !ready {
            self.stages.push(StageReport {
                name,
                status: StageStatus::Skipped,
                detail: None,
            });
            return None;
        }
        let start = Instant::now();
        let out = f();
        self.timings.push((name, start.elapsed().as_secs_f64()));
        match out {
            Ok((v, failure)) => {
                let status = if failure.is_some() {
                    StageStatus::Failed
                } else {
                    StageStatus::Passed
                };
                self.stages.push(StageReport {
                    name,
                    status,
                    detail: failure,
                });
                Some(v)
            }
            Err(e) => {
                self.stages.push(StageReport {
                    name,
                    status: StageStatus::Error,
                    detail: Some(e.to_string()),
                });
                None
            }
        }
    }
}

fn failure_if(ok: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(msg)
}

pub fn markman_stage(algebra: &GradedAlgebra, llv: &Llv) -> MarkmanSummary {
    let decomposition = markman_decompose(algebra, llv);
    let ll_spanning = verify_ll_spanning(algebra, llv);
    MarkmanSummary {
        c_dims: decomposition.c_dims(),
        decomposition,
        ll_spanning,
    }
}

impl MarkmanSummary {
    pub fn failure(&self) -> Option<String> {
        let (v, p) = (self.decomposition.verified, self.ll_spanning.passed);
        failure_if(v && p, || format!("markman verified = {v}, spanning = {p}"))
    }
}

/// Isotypic reports for every non-zero `C^{2i}`, `i ≥ 2`.
pub fn isotypic_stage(
    algebra: &GradedAlgebra,
    llv: &Llv,
    m: &MarkmanDecomposition,
) -> Result<IsotypicSummary> {
    let ctx = RepContext::new(&llv.so_h.algebra)?;
    let g_commutant_dim = commutant_constraint_space(algebra, llv)?.commutant.len();
    let mut c_parts = Vec::new();
    for d in m
        .degrees
        .iter()
        .filter(|d| d.degree >= 4 && !d.c_part.is_zero())
    {
        c_parts.push(isotypic_decompose(
            &ctx,
            &d.c_part,
            &format!("C^{}", d.degree),
        )?);
    }
    let markman_c = c_parts.iter().map(check_markman_c).collect();
    Ok(IsotypicSummary {
        g_commutant_dim,
        c_parts,
        markman_c,
    })
}

impl IsotypicSummary {
    pub fn failure(&self) -> Option<String> {
        let ok =
            self.markman_c.iter().all(|&b| b) && self.c_parts.iter().all(|c| c.schur_consistent);
        failure_if(ok, || {
            let bad: Vec<&str> = self
                .c_parts
                .iter()
                .zip(&self.markman_c)
                .filter(|(_, ok)| !**ok)
                .map(|(c, _)| c.label.as_str())
                .collect();
            format!(
                "not a multiplicity-free sum of trivial and standard parts: {}",
                bad.join(", ")
            )
        })
    }
}

pub fn hodge_stage(
    algebra: &GradedAlgebra,
    llv: &Llv,
    periods: Vec<PeriodPoint>,
) -> Result<WeilSummary> {
    if periods.is_empty() {
        return Err(Error::Period("no period points given".into()));
    }
    let data = periods
        .iter()
        .map(|p| verify_weil_membership(algebra, llv, p))
        .collect::<Result<Vec<_>>>()?;
    let consistent: Vec<bool> = data.iter().map(|d| d.consistent()).collect();
    let table = |d| -> Result<HodgeTable> {
        (0..algebra.dims().len())
            .map(|k| Ok((2 * k, hodge_numbers(d, 2 * k)?)))
            .collect()
    };
    let first = table(&data[0])?;
    let mut agree = true;
    for d in &data[1..] {
        agree &= table(d)? == first;
    }
    let symmetric = first.iter().all(|(_, row)| {
        row.iter().all(|&(p, q, h)| {
            row.iter()
                .any(|&(p2, q2, h2)| p2 == q && q2 == p && h2 == h)
        })
    });
    let pi2 = check_pi2_faithful(algebra, llv, &data)?;
    Ok(WeilSummary {
        periods,
        consistent,
        hodge_numbers: first,
        hodge_numbers_agree: agree,
        hodge_symmetric: symmetric,
        pi2,
    })
}

impl WeilSummary {
    pub fn failure(&self) -> Option<String> {
        let ok = self.consistent.iter().all(|&c| c)
            && self.hodge_numbers_agree
            && self.hodge_symmetric
            && self.pi2.passed;
        failure_if(ok, || {
            format!(
                "weil consistent = {:?}, agree = {}, symmetric = {}, pi2 = {}",
                self.consistent, self.hodge_numbers_agree, self.hodge_symmetric, self.pi2.passed
            )
        })
    }
}

pub fn run_pipeline(algebra: &GradedAlgebra, config: &PipelineConfig) -> PipelineReport {
    let mut r = Runner {
        stages: Vec::new(),
        timings: Vec::new(),
    };
    let mut report = PipelineReport {
        tool: "llv-lab",
        version: VERSION,
        source: config.source.clone(),
        input_hash: canonical_hash(algebra),
        seed: config.seed,
        dims: algebra.dims().to_vec(),
        b2: algebra.b2(),
        stages: Vec::new(),
        omega: None,
        so_tilde: None,
        markman: None,
        isotypic: None,
        hodge: None,
        certificate: None,
        timings: Vec::new(),
    };

    let llv: Option<(Llv, SoTildeReport)> = r.run("llv", true, || {
        let llv = compute_llv(algebra)?;
        let so = verify_so_tilde(algebra, &llv)?;
        let fail = failure_if(so.iso_verified, || {
            so.first_failure
                .clone()
                .unwrap_or_else(|| "g_tot ≇ so(H̃)".to_string())
        });
        Ok(((llv, so), fail))
    });
    let llv = llv.map(|(l, so)| {
        report.so_tilde = Some(so);
        l
    });

    let markman = r.run("markman", llv.is_some(), || {
        let m = markman_stage(algebra, llv.as_ref().expect("llv stage ran"));
        let fail = m.failure();
        Ok((m, fail))
    });

    report.isotypic = r.run("isotypic", llv.is_some() && markman.is_some(), || {
        let m = &markman.as_ref().expect("markman stage ran").decomposition;
        let iso = isotypic_stage(algebra, llv.as_ref().expect("llv stage ran"), m)?;
        let fail = iso.failure();
        Ok((iso, fail))
    });

    report.hodge = r.run("hodge", llv.is_some(), || {
        let periods = sample_periods(algebra, config.periods, config.seed)?;
        let w = hodge_stage(algebra, llv.as_ref().expect("llv stage ran"), periods)?;
        let fail = w.failure();
        Ok((w, fail))
    });

    let certificate = r.run("certify", llv.is_some() && markman.is_some(), || {
        let llv = llv.as_ref().expect("llv stage ran");
        let m = &markman.as_ref().expect("markman stage ran").decomposition;
        let (mode, class) = match &config.omega {
            OmegaChoice::Auto => ("auto", auto_omega(algebra)?),
            OmegaChoice::Explicit(x) => ("explicit", x.clone()),
        };
        report.omega = Some(OmegaRecord {
            mode,
            class: class.clone(),
        });
        let cert = certify(algebra, llv, m, &class)?;
        let fail = cert.failure();
        Ok((cert, fail))
    });
    report.certificate = certificate;
    report.markman = markman;
    report.stages = r.stages;
    report.timings = r.timings;
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn so_dim(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

pub fn report_render(report: &PipelineReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Text => render_text(report),
    }
}

fn render_text(r: &PipelineReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "llv-lab {}  input {}  seed {}",
        r.version,
        &r.input_hash[..16],
        r.seed
    );
    if !r.source.is_empty() {
        let _ = writeln!(s, "source: {}", r.source);
    }
    let dims: Vec<String> = r.dims.iter().map(usize::to_string).collect();
    let _ = writeln!(s, "betti (even degrees): {}", dims.join(" "));
    let _ = writeln!(s);
    for st in &r.stages {
        let status = format!("{:?}", st.status).to_lowercase();
        match &st.detail {
            Some(d) => {
                let _ = writeln!(s, "  {:<9} {:<7} {}", st.name, status, d);
            }
            None => {
                let _ = writeln!(s, "  {:<9} {}", st.name, status);
            }
        }
    }
    if let Some(so) = &r.so_tilde {
        let m = r.b2 + 2;
        let _ = writeln!(s);
        if so.dim_found == so_dim(m) {
            let _ = writeln!(s, "dim g_tot = {} = dim so({m})", so.dim_found);
        } else {
            let _ = writeln!(
                s,
                "dim g_tot = {} (dim so({m}) = {})",
                so.dim_found,
                so_dim(m)
            );
        }
        let [a, b, c] = so.grading_dims;
        let _ = writeln!(s, "grading (g_-2, g_0, g_2) = ({a}, {b}, {c})");
        let _ = writeln!(
            s,
            "dim so(H) = {}  isomorphism verified: {}",
            so.so_h_dim, so.iso_verified
        );
    }
    if let Some(m) = &r.markman {
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>6} {:>6} {:>6} {:>6}", "degree", "dim", "A", "C");
        for d in &m.decomposition.degrees {
            let _ = writeln!(
                s,
                "{:>6} {:>6} {:>6} {:>6}",
                d.degree, d.dim, d.a_dim, d.c_dim
            );
        }
        let _ = writeln!(
            s,
            "C generates: {}  spanning: {}",
            m.decomposition.generates, m.ll_spanning.passed
        );
    }
    if let Some(iso) = &r.isotypic {
        let _ = writeln!(s);
        let _ = writeln!(s, "commutant of g_tot on H*: dim {}", iso.g_commutant_dim);
        for (c, ok) in iso.c_parts.iter().zip(&iso.markman_c) {
            let parts: Vec<String> = c
                .constituents
                .iter()
                .map(|k| {
                    let m = k.multiplicity.map_or("?".to_string(), |m| m.to_string());
                    format!(
                        "{:?}(casimir {}, dim {}, mult {m})",
                        k.kind, k.casimir, k.eigenspace_dim
                    )
                    .to_lowercase()
                })
                .collect();
            let _ = writeln!(
                s,
                "{}: {}  [{}]",
                c.label,
                parts.join(", "),
                if *ok { "ok" } else { "rejected" }
            );
        }
    }
    if let Some(h) = &r.hodge {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "hodge numbers ({} periods, agree: {}):",
            h.periods.len(),
            h.hodge_numbers_agree
        );
        for (d, row) in &h.hodge_numbers {
            let cells: Vec<String> = row
                .iter()
                .map(|(p, q, n)| format!("h{p},{q}={n}"))
                .collect();
            let _ = writeln!(s, "  H^{d}: {}", cells.join(" "));
        }
        let _ = writeln!(
            s,
            "pi2: kernel {}  standard on H^2: {}  weil algebra dim {}",
            h.pi2.kernel_dim, h.pi2.degree2_standard, h.pi2.weil_algebra_dim
        );
    }
    if let Some(c) = &r.certificate {
        let _ = writeln!(s);
        if let Some(o) = &r.omega {
            let cls: Vec<String> = o.class.iter().map(Q::to_string).collect();
            let _ = writeln!(s, "omega ({}): ({})", o.mode, cls.join(", "));
        }
        match c.failure() {
            None => {
                let _ = writeln!(s, "certificate: certified  N = {}  bound {}", c.n, c.bound);
            }
            Some(f) => {
                let _ = writeln!(s, "certificate: failed at {f}");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_augmented_model, build_verbitsky_component};
    use crate::forms::QuadraticFormSpec;

    #[test]
    fn verbitsky_pipeline_passes() {
        let form = QuadraticFormSpec::default_for_rank(5);
        let a = build_verbitsky_component(&form, 2, 0).unwrap();
        let r = run_pipeline(&a, &PipelineConfig::default());
        assert!(r.passed(), "{:?}", r.stages);
        assert_eq!(r.certificate.as_ref().unwrap().n, 0);
        let text = report_render(&r, Format::Text);
        assert!(text.contains("dim g_tot = 21 = dim so(7)"), "{text}");
        assert_eq!(
            report_render(&r, Format::Json),
            report_render(&run_pipeline(&a, &PipelineConfig::default()), Format::Json)
        );
    }

    #[test]
    fn augmented_pipeline_certifies() {
        let form = QuadraticFormSpec::default_for_rank(5);
        let a = build_augmented_model(&form, 2, 1, 0).unwrap();
        let r = run_pipeline(&a, &PipelineConfig::default());
        assert!(r.passed(), "{:?}", r.stages);
        assert_eq!(r.certificate.as_ref().unwrap().bound, "Z/2");
        assert_eq!(r.omega.as_ref().unwrap().mode, "auto");
    }
}
