use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use llv_core::builders::{build_augmented_model, build_k3, build_verbitsky_component};
use llv_core::decomposition::markman_decompose;
use llv_core::finiteness::certify;
use llv_core::forms::QuadraticFormSpec;
use llv_core::hodge::{sample_periods, PeriodPoint};
use llv_core::io::{load_algebra, load_form, to_canonical_json};
use llv_core::llv::{compute_llv, verify_so_tilde};
use llv_core::pipeline::{
    hodge_stage, isotypic_stage, markman_stage, report_render, run_pipeline, so_dim, to_json,
    Format, OmegaChoice, PipelineConfig,
};
use llv_core::{GradedAlgebra, Q};

#[derive(Parser)]
#[command(
    name = "llv-lab",
    version,
    about = "Exact LLV algebra computations on graded Frobenius algebras"
)]
struct Cli {
    /// Seed for every randomized step (isotropic sampling, period sampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    K3,
    Sh,
    Augmented,
}

#[derive(Args, Clone)]
struct BuildSpec {
    /// Rank of the degree-2 lattice; selects a default form when --form is absent.
    #[arg(long)]
    b2: Option<usize>,
    /// A form expression such as `U^3+E8(-1)^2`, `U+<1,1,1>`, `k3`, or a JSON matrix file.
    #[arg(long)]
    form: Option<String>,
    /// Half the complex dimension.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Number of extra middle-degree classes (augmented model).
    #[arg(long, default_value_t = 1)]
    t: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build a fixture algebra and print its canonical JSON.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        #[command(flatten)]
        spec: BuildSpec,
    },
    /// LLV algebra and the so(H~) isomorphism check.
    Llv {
        algebra: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Markman decomposition and Looijenga-Lunts spanning.
    Markman {
        algebra: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Isotypic reports of every C^{2i}, i >= 2.
    Isotypic { algebra: PathBuf },
    /// Weil operators and Hodge numbers for given or sampled periods.
    Hodge {
        algebra: PathBuf,
        /// `e1=<csv> e2=<csv>`; may be repeated.
        #[arg(long, num_args = 2, value_names = ["E1", "E2"], action = clap::ArgAction::Append)]
        period: Vec<String>,
        /// Number of sampled periods when none are given.
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Finiteness certificate for a Lefschetz class omega.
    Certify {
        algebra: PathBuf,
        /// Comma-separated coordinates, or `auto`.
        #[arg(long, default_value = "auto")]
        omega: String,
    },
    /// All stages in order on a file or a built fixture.
    Pipeline {
        algebra: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "algebra")]
        build: Option<BuildKind>,
        #[command(flatten)]
        spec: BuildSpec,
        #[arg(long, default_value = "auto")]
        omega: String,
        #[arg(long, default_value_t = 3)]
        periods: usize,
        /// Print per-stage wall times to stderr.
        #[arg(long)]
        timings: bool,
    },
}

/// Exit status for a completed run whose checks may have failed.
enum Outcome {
    Passed,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LLV_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_form(spec: &BuildSpec, default_rank: usize) -> Result<QuadraticFormSpec> {
    let form = match &spec.form {
        Some(f) if Path::new(f).is_file() => {
            load_form(f).with_context(|| format!("reading form file {f}"))?
        }
        Some(f) => QuadraticFormSpec::parse(f)?,
        None => QuadraticFormSpec::default_for_rank(spec.b2.unwrap_or(default_rank)),
    };
    if let Some(b2) = spec.b2 {
        if form.rank() != b2 {
            bail!(
                "--b2 {b2} does not match the rank {} of the form",
                form.rank()
            );
        }
    }
    Ok(form)
}

fn build(kind: BuildKind, spec: &BuildSpec, seed: u64) -> Result<(GradedAlgebra, String)> {
    Ok(match kind {
        BuildKind::K3 => {
            let form = parse_form(spec, 22)?;
            let desc = format!("k3 form={form}");
            (build_k3(&form)?, desc)
        }
        BuildKind::Sh => {
            let form = parse_form(spec, 5)?;
            let desc = format!("sh form={form} n={} seed={seed}", spec.n);
            (build_verbitsky_component(&form, spec.n, seed)?, desc)
        }
        BuildKind::Augmented => {
            let form = parse_form(spec, 5)?;
            let desc = format!(
                "augmented form={form} n={} t={} seed={seed}",
                spec.n, spec.t
            );
            (build_augmented_model(&form, spec.n, spec.t, seed)?, desc)
        }
    })
}

fn load(path: &Path) -> Result<GradedAlgebra> {
    load_algebra(path).with_context(|| format!("loading {}", path.display()))
}

fn parse_csv(s: &str) -> Result<Vec<Q>> {
    s.split(',')
        .map(|x| x.trim().parse::<Q>().map_err(|e| anyhow::anyhow!("{e}")))
        .collect()
}

fn parse_omega(s: &str) -> Result<OmegaChoice> {
    Ok(if s == "auto" {
        OmegaChoice::Auto
    } else {
        OmegaChoice::Explicit(parse_csv(s)?)
    })
}

fn parse_periods(algebra: &GradedAlgebra, raw: &[String]) -> Result<Vec<PeriodPoint>> {
    raw.chunks(2)
        .map(|pair| {
            let mut e1 = None;
            let mut e2 = None;
            for item in pair {
                match item.split_once('=') {
                    Some(("e1", v)) => e1 = Some(parse_csv(v)?),
                    Some(("e2", v)) => e2 = Some(parse_csv(v)?),
                    _ => bail!("period entries look like e1=<csv> e2=<csv>, got {item:?}"),
                }
            }
            match (e1, e2) {
                (Some(a), Some(b)) => Ok(PeriodPoint::new(algebra, a, b)?),
                _ => bail!("a period needs both e1 and e2"),
            }
        })
        .collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Passed
    } else {
        Outcome::Failed
    }
}

fn line(s: &mut String, text: impl AsRef<str>) {
    let _ = writeln!(s, "{}", text.as_ref());
}

fn run(cli: Cli) -> Result<Outcome> {
    let text = matches!(cli.format, OutputFormat::Text);
    let output = cli.output.clone();
    match cli.command {
        Command::Build { kind, spec } => {
            let (a, desc) = build(kind, &spec, cli.seed)?;
            let doc = if text {
                let dims: Vec<String> = a.dims().iter().map(usize::to_string).collect();
                format!(
                    "{desc}\ndims {}\nhash {}\n",
                    dims.join(" "),
                    llv_core::io::canonical_hash(&a)
                )
            } else {
                to_canonical_json(&a)
            };
            emit(output.as_deref(), &doc)?;
            Ok(Outcome::Passed)
        }
        Command::Llv { algebra, report } => {
            let a = load(&algebra)?;
            let llv = compute_llv(&a)?;
            let r = verify_so_tilde(&a, &llv)?;
            let doc = if text {
                let mut s = String::new();
                let m = a.b2() + 2;
                line(
                    &mut s,
                    format!("dim g_tot = {} (dim so({m}) = {})", r.dim_found, so_dim(m)),
                );
                let [x, y, z] = r.grading_dims;
                line(
                    &mut s,
                    format!("grading (g_-2, g_0, g_2) = ({x}, {y}, {z})"),
                );
                line(&mut s, format!("dim so(H) = {}", r.so_h_dim));
                line(&mut s, format!("isomorphism verified: {}", r.iso_verified));
                if let Some(f) = &r.first_failure {
                    line(&mut s, format!("first failure: {f}"));
                }
                s
            } else {
                to_json(&r)
            };
            emit(report.as_deref().or(output.as_deref()), &doc)?;
            Ok(outcome(r.iso_verified))
        }
        Command::Markman { algebra, report } => {
            let a = load(&algebra)?;
            let llv = compute_llv(&a)?;
            let m = markman_stage(&a, &llv);
            let doc = if text {
                let mut s = String::new();
                line(
                    &mut s,
                    format!(
                        "{:>6} {:>6} {:>6} {:>6} {:>7}",
                        "degree", "dim", "A", "C", "direct"
                    ),
                );
                for d in &m.decomposition.degrees {
                    line(
                        &mut s,
                        format!(
                            "{:>6} {:>6} {:>6} {:>6} {:>7}",
                            d.degree, d.dim, d.a_dim, d.c_dim, d.direct_sum
                        ),
                    );
                }
                line(&mut s, format!("generates: {}", m.decomposition.generates));
                line(&mut s, format!("verified: {}", m.decomposition.verified));
                line(&mut s, format!("spanning: {}", m.ll_spanning.passed));
                s
            } else {
                to_json(&m)
            };
            emit(report.as_deref().or(output.as_deref()), &doc)?;
            Ok(outcome(m.failure().is_none()))
        }
        Command::Isotypic { algebra } => {
            let a = load(&algebra)?;
            let llv = compute_llv(&a)?;
            let m = markman_decompose(&a, &llv);
            let iso = isotypic_stage(&a, &llv, &m)?;
            let doc = if text {
                let mut s = String::new();
                line(
                    &mut s,
                    format!("commutant of g_tot on H*: dim {}", iso.g_commutant_dim),
                );
                if iso.c_parts.is_empty() {
                    line(&mut s, "no non-zero C^{2i} with i >= 2");
                }
                for (c, ok) in iso.c_parts.iter().zip(&iso.markman_c) {
                    line(
                        &mut s,
                        format!(
                            "{} (dim {}): markman_c {ok}, schur {}",
                            c.label, c.dim, c.schur_consistent
                        ),
                    );
                    for k in &c.constituents {
                        let mult = k.multiplicity.map_or("?".into(), |m| m.to_string());
                        line(
                            &mut s,
                            format!(
                                "  {:?} casimir {} dim {} multiplicity {mult}",
                                k.kind, k.casimir, k.eigenspace_dim
                            ),
                        );
                    }
                }
                s
            } else {
                to_json(&iso)
            };
            emit(output.as_deref(), &doc)?;
            Ok(outcome(iso.failure().is_none()))
        }
        Command::Hodge {
            algebra,
            period,
            count,
        } => {
            let a = load(&algebra)?;
            let llv = compute_llv(&a)?;
            let periods = if period.is_empty() {
                sample_periods(&a, count, cli.seed)?
            } else {
                parse_periods(&a, &period)?
            };
            let w = hodge_stage(&a, &llv, periods)?;
            let doc = if text {
                let mut s = String::new();
                for (d, row) in &w.hodge_numbers {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|(p, q, n)| format!("h{p},{q}={n}"))
                        .collect();
                    line(&mut s, format!("H^{d}: {}", cells.join(" ")));
                }
                line(&mut s, format!("consistent: {:?}", w.consistent));
                line(
                    &mut s,
                    format!(
                        "pi2 kernel {}, standard on H^2: {}",
                        w.pi2.kernel_dim, w.pi2.degree2_standard
                    ),
                );
                s
            } else {
                to_json(&w)
            };
            emit(output.as_deref(), &doc)?;
            Ok(outcome(w.failure().is_none()))
        }
        Command::Certify { algebra, omega } => {
            let a = load(&algebra)?;
            let llv = compute_llv(&a)?;
            let m = markman_decompose(&a, &llv);
            let omega = match parse_omega(&omega)? {
                OmegaChoice::Auto => llv_core::pipeline::auto_omega(&a)?,
                OmegaChoice::Explicit(x) => x,
            };
            let c = certify(&a, &llv, &m, &omega)?;
            let doc = if text {
                let mut s = String::new();
                match c.failure() {
                    None => line(&mut s, format!("certified: N = {}, bound {}", c.n, c.bound)),
                    Some(f) => line(&mut s, format!("failed: {f}")),
                }
                for k in &c.components {
                    line(
                        &mut s,
                        format!(
                            "  degree {} constituent {}: {:?} dim {} phi_omega rank {}",
                            k.degree, k.constituent_id, k.kind, k.dimension, k.phi_omega_rank
                        ),
                    );
                }
                s
            } else {
                to_json(&c)
            };
            emit(output.as_deref(), &doc)?;
            Ok(outcome(c.is_certified()))
        }
        Command::Pipeline {
            algebra,
            build: kind,
            spec,
            omega,
            periods,
            timings,
        } => {
            let (a, source) = match (algebra, kind) {
                (Some(p), _) => {
                    let a = load(&p)?;
                    (a, format!("file {}", p.display()))
                }
                (None, Some(k)) => build(k, &spec, cli.seed)?,
                (None, None) => bail!("pipeline needs an algebra file or --build"),
            };
            let config = PipelineConfig {
                seed: cli.seed,
                omega: parse_omega(&omega)?,
                periods,
                source,
            };
            let r = run_pipeline(&a, &config);
            let format = if text { Format::Text } else { Format::Json };
            emit(output.as_deref(), &report_render(&r, format))?;
            if timings {
                for (name, secs) in &r.timings {
                    eprintln!("{name:<9} {secs:.3}s");
                }
            }
            Ok(outcome(r.passed()))
        }
    }
}
