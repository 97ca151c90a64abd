//! Command-line front end.
//!
//! Subcommands: `list`, `eval`, `verify`, `classify`, `sweep`. Exit codes
//! follow a scripting contract: 0 on success, 1 when a verification check
//! fails, 2 on domain/usage/configuration errors, 3 on I/O errors. Reports
//! go to stdout or `--out PATH`, as JSON (canonical) or CSV.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::catalog::{build_calabi, catalog_list, lookup, ImmersionSpec, MAX_CALABI_DEGREE};
use crate::classifier::{classify, summarize, Classification, SurfaceSummary};
use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::analyze;
use crate::identities::{check_constants, run_suite, sweep_degree, IdentityReport, SweepRow};
use crate::normalizer::{canonicalize, CanonicalForm};
use crate::report::{fmt_f64, to_csv, to_json, write_output};

#[derive(Parser)]
#[command(
    name = "minsurf",
    version,
    about = "Curvature verification for closed minimal surfaces in round spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the surface catalog with expected constants
    List {
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Evaluate curvature and the canonical frame at one chart point
    Eval {
        #[command(flatten)]
        surface: SurfaceOpts,
        /// Chart coordinate u
        u: f64,
        /// Chart coordinate v
        v: f64,
        #[command(flatten)]
        run: RunOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the identity suite over a grid; exit 1 if any check fails
    Verify {
        #[command(flatten)]
        surface: SurfaceOpts,
        #[command(flatten)]
        run: RunOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Measure curvature ranges and classify the surface
    Classify {
        #[command(flatten)]
        surface: SurfaceOpts,
        #[command(flatten)]
        run: RunOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Sweep the harmonic degree family, one row per degree
    Sweep {
        /// Degree range, e.g. `1..4` (inclusive) or a single degree
        range: String,
        #[command(flatten)]
        run: RunOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Args)]
struct SurfaceOpts {
    /// Catalog surface name (see `list`)
    #[arg(long, conflicts_with = "s")]
    surface: Option<String>,
    /// Harmonic-family degree: selects the degree-s standard immersion
    #[arg(long)]
    s: Option<u32>,
}

impl SurfaceOpts {
    fn resolve(&self) -> Result<ImmersionSpec> {
        match (&self.surface, self.s) {
            (Some(name), None) => lookup(name),
            (None, Some(s)) => build_calabi(s),
            (None, None) => Err(Error::Usage("pass --surface NAME or --s DEGREE".into())),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        }
    }
}

#[derive(Args)]
struct RunOpts {
    /// Sampling grid NUxNV over the valid chart rectangle
    #[arg(long, default_value = "10x10")]
    grid: String,
    /// Jet truncation order (tier 2 requires 4)
    #[arg(long, default_value_t = 4)]
    jet_order: usize,
    /// Check tier: 1 = first derivatives, 2 = adds second covariant derivatives
    #[arg(long, default_value_t = 1)]
    tier: u8,
    /// Tolerance override NAME=VALUE; repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Seed for randomized gauge tests
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutputOpts {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatOpt::Json)]
    format: FormatOpt,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatOpt {
    Json,
    Csv,
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let (nu, nv) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Usage(format!("grid must look like 10x10, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Usage(format!("bad grid dimension `{s}`")))
    };
    Ok((parse(nu)?, parse(nv)?))
}

fn build_config(surface: &str, run: &RunOpts, out: &OutputOpts) -> Result<RunConfig> {
    let (nu, nv) = parse_grid(&run.grid)?;
    let mut config = RunConfig {
        surface: surface.to_string(),
        nu,
        nv,
        jet_order: run.jet_order,
        tier: run.tier,
        seed: run.seed,
        format: match out.format {
            FormatOpt::Json => OutputFormat::Json,
            FormatOpt::Csv => OutputFormat::Csv,
        },
        ..RunConfig::default()
    };
    for entry in &run.tol {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--tol expects NAME=VALUE, got `{entry}`")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Usage(format!("bad tolerance value in `{entry}`")))?;
        config.tolerances.set(name.trim(), value)?;
    }
    config.validate()?;
    Ok(config)
}

#[derive(Serialize)]
struct CatalogRow {
    name: String,
    ambient_n: usize,
    degree_s: Option<u32>,
    expected_k: Option<f64>,
    expected_s: Option<f64>,
    expected_kn: Option<f64>,
}

#[derive(Serialize)]
struct EvalReport {
    point: (f64, f64),
    curvature: crate::geometry::CurvatureReport,
    canonical: CanonicalForm,
    /// Derivative-level scalars, present when the jet order admits them.
    p: Option<f64>,
    q: Option<f64>,
    grad_s: Option<[f64; 2]>,
    laplacian_s: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport {
    summary: SurfaceSummary,
    classification: Classification,
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::List { out } => cmd_list(&out),
        Command::Eval {
            surface,
            u,
            v,
            run,
            out,
        } => cmd_eval(&surface, u, v, &run, &out),
        Command::Verify { surface, run, out } => cmd_verify(&surface, &run, &out),
        Command::Classify { surface, run, out } => cmd_classify(&surface, &run, &out),
        Command::Sweep { range, run, out } => cmd_sweep(&range, &run, &out),
    }
}

fn emit<T: Serialize>(
    kind: &str,
    config: &RunConfig,
    report: &T,
    csv: (Vec<&str>, Vec<Vec<String>>),
    out: &OutputOpts,
) -> Result<()> {
    let content = match out.format {
        FormatOpt::Json => to_json(kind, config, report)?,
        FormatOpt::Csv => to_csv(&csv.0, &csv.1),
    };
    write_output(out.out.as_deref(), &content)
}

fn cmd_list(out: &OutputOpts) -> Result<i32> {
    let mut rows: Vec<CatalogRow> = Vec::new();
    let mut specs = catalog_list();
    for s in 1..=MAX_CALABI_DEGREE {
        specs.push(build_calabi(s)?);
    }
    for spec in &specs {
        rows.push(CatalogRow {
            name: spec.name.clone(),
            ambient_n: spec.ambient_n,
            degree_s: spec.degree_s,
            expected_k: spec.expected.map(|e| e.k),
            expected_s: spec.expected.map(|e| e.s),
            expected_kn: spec.expected.map(|e| e.kn),
        });
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.ambient_n.to_string(),
                r.degree_s.map(|s| s.to_string()).unwrap_or_default(),
                r.expected_k.map(fmt_f64).unwrap_or_default(),
                r.expected_s.map(fmt_f64).unwrap_or_default(),
                r.expected_kn.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();
    let config = RunConfig {
        surface: "catalog".into(),
        ..RunConfig::default()
    };
    emit(
        "catalog",
        &config,
        &rows,
        (vec!["name", "ambient_n", "s", "K", "S", "KN"], csv_rows),
        out,
    )?;
    Ok(0)
}

fn cmd_eval(surface: &SurfaceOpts, u: f64, v: f64, run: &RunOpts, out: &OutputOpts) -> Result<i32> {
    let spec = surface.resolve()?;
    let config = build_config(&spec.name, run, out)?;
    let analysis = analyze(&spec, u, v, config.jet_order)?;
    let canonical = canonicalize(
        &analysis.shape.h,
        analysis.shape.s,
        config.tolerances.get("flatness"),
    )?;
    let report = EvalReport {
        point: (u, v),
        curvature: analysis.curvature.clone(),
        canonical,
        p: analysis.shape.p,
        q: analysis.shape.q,
        grad_s: analysis.shape.grad_s,
        laplacian_s: analysis.laplacian_s,
    };
    let csv_row = vec![
        spec.name.clone(),
        fmt_f64(u),
        fmt_f64(v),
        fmt_f64(report.curvature.k),
        fmt_f64(report.curvature.kn),
        fmt_f64(report.curvature.s),
        format!("{:?}", report.canonical.branch),
        fmt_f64(report.canonical.b),
        fmt_f64(report.canonical.residual),
    ];
    emit(
        "eval",
        &config,
        &report,
        (
            vec![
                "surface", "u", "v", "K", "KN", "S", "branch", "b", "residual",
            ],
            vec![csv_row],
        ),
        out,
    )?;
    Ok(0)
}

fn verify_csv(report: &IdentityReport) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.tier.to_string(),
                format!("{:?}", c.status),
                c.points_checked.to_string(),
                c.failures.to_string(),
                fmt_f64(c.max_residual),
                fmt_f64(c.tolerance),
            ]
        })
        .collect();
    (
        vec![
            "check",
            "tier",
            "status",
            "points",
            "failures",
            "max_residual",
            "tolerance",
        ],
        rows,
    )
}

fn cmd_verify(surface: &SurfaceOpts, run: &RunOpts, out: &OutputOpts) -> Result<i32> {
    let spec = surface.resolve()?;
    let config = build_config(&spec.name, run, out)?;
    let grid = config.grid_for(&spec);
    let report = run_suite(&spec, &grid, config.tier, &config)?;
    let constants = check_constants(&spec, &grid, &config).ok();

    #[derive(Serialize)]
    struct VerifyReport {
        identity: IdentityReport,
        constants: Option<crate::identities::ConstantsReport>,
    }
    let passed = report.passed && constants.as_ref().is_none_or(|c| c.pass);
    let payload = VerifyReport {
        identity: report,
        constants,
    };
    let csv = verify_csv(&payload.identity);
    emit("verify", &config, &payload, csv, out)?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_classify(surface: &SurfaceOpts, run: &RunOpts, out: &OutputOpts) -> Result<i32> {
    let spec = surface.resolve()?;
    let config = build_config(&spec.name, run, out)?;
    let grid = config.grid_for(&spec);
    let summary = summarize(&spec, &grid, &config)?;
    let classification = classify(&summary, config.tolerances.get("classify"))?;
    let csv_row = vec![
        summary.surface.clone(),
        format!("{:?}", classification.verdict),
        classification.theorem_used.clone(),
        fmt_f64(classification.margin),
        format!("{:?}", summary.branch),
        fmt_f64(summary.k_min),
        fmt_f64(summary.k_max),
        fmt_f64(summary.kn_min),
        fmt_f64(summary.kn_max),
        fmt_f64(summary.s_min),
        fmt_f64(summary.s_max),
    ];
    let report = ClassifyReport {
        summary,
        classification,
    };
    emit(
        "classify",
        &config,
        &report,
        (
            vec![
                "surface", "verdict", "theorem", "margin", "branch", "K_min", "K_max", "KN_min",
                "KN_max", "S_min", "S_max",
            ],
            vec![csv_row],
        ),
        out,
    )?;
    Ok(0)
}

fn parse_range(text: &str) -> Result<(u32, u32)> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("bad sweep range `{text}`")))?;
        let hi: u32 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| Error::Usage(format!("bad sweep range `{text}`")))?;
        if lo > hi {
            return Err(Error::Usage(format!("empty sweep range `{text}`")));
        }
        Ok((lo, hi))
    } else {
        let s: u32 = text
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("bad sweep degree `{text}`")))?;
        Ok((s, s))
    }
}

fn cmd_sweep(range: &str, run: &RunOpts, out: &OutputOpts) -> Result<i32> {
    let (lo, hi) = parse_range(range)?;
    let config = build_config(&format!("calabi_{lo}..{hi}"), run, out)?;
    let mut rows: Vec<SweepRow> = Vec::new();
    for s in lo..=hi {
        rows.push(sweep_degree(s, &config)?);
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.s.to_string(),
                fmt_f64(r.k),
                fmt_f64(r.s_value),
                fmt_f64(r.kn),
                fmt_f64(r.p),
                fmt_f64(r.wintgen_residual),
            ]
        })
        .collect();
    emit(
        "sweep",
        &config,
        &rows,
        (vec!["s", "K", "S", "KN", "P", "wintgen_residual"], csv_rows),
        out,
    )?;
    Ok(0)
}
