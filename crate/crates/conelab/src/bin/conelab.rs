//! Batch front end: parse problem files, dispatch analyses, emit
//! machine-readable JSON reports and curve CSVs.
//!
//! Exit codes: 0 success (a mathematical "fails" verdict is a successful
//! analysis), 1 internal failure, 2 input/schema error, 3 asserted verdict
//! not reproduced.

use clap::{Parser, Subcommand, ValueEnum};
use conelab::bellman::{reduce_to_bellman, supersolution_lower_bound};
use conelab::closed_forms::{
    example_registry, prop16_construct, residual, unit_disk_points,
    unit_square_points, wmp_fails_prediction, Prop16Params, ZetaQuery,
};
use conelab::cone_synthesis::{
    commute_check, synthesize_full_cone, synthesize_partial_cone, ConeCertificate,
    EllipticSystem, SynthesisError,
};
use conelab::fd_lab::{
    assemble, cone_certificate, monte_carlo_invariance, wmp_certificate, FdError, GridDomain,
    Outcome, Scheme, Verdict,
};
use conelab::matrix_algebra::{eigen, is_cooperative, is_m_matrix, Mat};
use conelab::report::{figure_csv, ProblemFile, Report};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "conelab", version, about = "Invariant-cone analysis for elliptic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Centered,
    Upwind,
}

#[derive(Subcommand)]
enum Command {
    /// Algebraic checks and cone synthesis for a problem file.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete sign-propagation certificate on the problem's grid.
    Wmp {
        file: PathBuf,
        /// Target grid spacing; overrides the file's resolution.
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, value_enum, default_value = "centered")]
        scheme: SchemeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cone-invariance certificate plus Monte-Carlo check.
    Invariance {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal-eigenvalue bounds for the reduced scalar problem.
    Eigen {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a named scenario end-to-end and compare verdicts.
    Reproduce {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print generated CSV data to stdout.
        #[arg(long)]
        csv: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: msg.into(),
        }
    }

    fn internal(msg: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }

    fn mismatch(msg: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<FdError> for Failure {
    fn from(e: FdError) -> Failure {
        match e {
            FdError::UnsupportedDimension(_)
            | FdError::DimensionMismatch { .. }
            | FdError::BadGrid(_)
            | FdError::TooLargeForDense(_)
            | FdError::PartialConeUnsupported => Failure::input(e.to_string()),
            _ => Failure::internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_problem(path: &Path) -> Result<(ProblemFile, Vec<u8>), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::input("problem file is not UTF-8"))?;
    let file = ProblemFile::parse(&text).map_err(|e| Failure::input(e.to_string()))?;
    Ok((file, bytes))
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<(), Failure> {
    let text = report.to_json();
    println!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
        std::fs::write(dir.join("report.json"), &text)
            .map_err(|e| Failure::internal(e.to_string()))?;
    }
    Ok(())
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    json!({
        "outcome": v.outcome,
        "margin": v.margin,
        "diagnostics": v.diagnostics,
    })
}

fn synthesize_any(sys: &EllipticSystem) -> Result<ConeCertificate, SynthesisError> {
    synthesize_full_cone(sys).or_else(|_| synthesize_partial_cone(sys))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { file, out } => cmd_analyze(&file, &out),
        Command::Wmp {
            file,
            grid,
            scheme,
            out,
        } => cmd_wmp(&file, grid, scheme, &out),
        Command::Invariance {
            file,
            trials,
            seed,
            out,
        } => cmd_invariance(&file, trials, seed, &out),
        Command::Eigen { file, out } => cmd_eigen(&file, &out),
        Command::Reproduce { id, out, csv } => cmd_reproduce(&id, &out, csv),
    }
}

fn cmd_analyze(path: &Path, out: &Option<PathBuf>) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, bytes) = load_problem(path)?;
    let sys = file.system().map_err(|e| Failure::input(e.to_string()))?;
    let mut report = Report::new("analyze", &bytes, file.seed);

    let mut verdicts = serde_json::Map::new();
    verdicts.insert("commute".into(), json!(commute_check(&sys)));
    let eigen_summaries: Vec<_> = sys
        .b
        .iter()
        .map(|b| match eigen(b) {
            Ok(d) => json!({
                "eigenvalues": d.eigenvalues,
                "diagonalizable_real": d.real_eigenbasis.is_some(),
            }),
            Err(e) => json!({ "error": e.to_string() }),
        })
        .collect();
    verdicts.insert("eigen".into(), json!(eigen_summaries));
    match is_cooperative(&sys.c) {
        Ok(r) => verdicts.insert("cooperativity".into(), json!(r)),
        Err(e) => verdicts.insert("cooperativity".into(), json!({ "error": e.to_string() })),
    };

    if let Some(cone) = &file.cone {
        if cone.k == file.m {
            let rows: Vec<&[f64]> = cone.p.iter().map(|r| r.as_slice()).collect();
            let p = Mat::from_rows(&rows);
            match p.inverse().and_then(|q| is_m_matrix(&q)) {
                Ok(r) => verdicts.insert("candidate_q_m_matrix".into(), json!(r)),
                Err(e) => verdicts
                    .insert("candidate_q_m_matrix".into(), json!({ "error": e.to_string() })),
            };
        }
    }

    match synthesize_any(&sys) {
        Ok(cert) => {
            report.certificates = json!({ "cone": cert });
            verdicts.insert("cone_found".into(), json!(true));
        }
        Err(SynthesisError::SearchExhausted(nf)) => {
            verdicts.insert("cone_found".into(), json!(false));
            verdicts.insert("not_found".into(), json!(nf));
        }
        Err(e) => {
            verdicts.insert("cone_found".into(), json!(false));
            verdicts.insert("not_found".into(), json!({ "reason": e.to_string() }));
        }
    }

    report.verdicts = serde_json::Value::Object(verdicts);
    record_time(&mut report, "total", start);
    emit(&report, out)
}

fn grid_with_spacing(grid: &GridDomain, h: f64) -> Result<GridDomain, Failure> {
    if !(h > 0.0) {
        return Err(Failure::input("--grid spacing must be positive"));
    }
    let resolution = (0..grid.dim())
        .map(|i| (((grid.hi[i] - grid.lo[i]) / h).round() as usize + 1).max(3))
        .collect();
    GridDomain::new(grid.kind, grid.lo.clone(), grid.hi.clone(), resolution)
        .map_err(Failure::from)
}

fn cmd_wmp(
    path: &Path,
    h: Option<f64>,
    scheme: SchemeArg,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, bytes) = load_problem(path)?;
    let sys = file.system().map_err(|e| Failure::input(e.to_string()))?;
    let mut grid = file.grid().map_err(|e| Failure::input(e.to_string()))?;
    if let Some(h) = h {
        grid = grid_with_spacing(&grid, h)?;
    }
    let scheme = match scheme {
        SchemeArg::Centered => Scheme::Centered,
        SchemeArg::Upwind => Scheme::Upwind,
    };
    let op = assemble(&sys, &grid, scheme)?;
    let verdict = wmp_certificate(&op)?;

    let mut report = Report::new("wmp", &bytes, file.seed);
    report.verdicts = json!({
        "wmp": verdict_json(&verdict),
        "grid": grid,
        "scheme": scheme,
        "drift_cell_ratio": op.drift_cell_ratio,
        "warning": op.warning,
    });
    if let Some(w) = &verdict.witness {
        report.witnesses = json!({ "wmp": w });
    }
    record_time(&mut report, "total", start);
    emit(&report, out)
}

fn cmd_invariance(
    path: &Path,
    trials: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, bytes) = load_problem(path)?;
    let sys = file.system().map_err(|e| Failure::input(e.to_string()))?;
    let grid = file.grid().map_err(|e| Failure::input(e.to_string()))?;
    let trials = file.trials.unwrap_or(trials);
    let seed = file.seed.unwrap_or(seed);

    let cert = synthesize_any(&sys)
        .map_err(|e| Failure::input(format!("no invariant cone synthesized: {e}")))?;
    let mut report = Report::new("invariance", &bytes, Some(seed));
    let mut verdicts = serde_json::Map::new();

    if cert.k == sys.m {
        let dense = cone_certificate(&sys, &cert, &grid)?;
        verdicts.insert("certificate".into(), verdict_json(&dense));
        if let Some(w) = dense.witness {
            report.witnesses = json!({ "certificate": w });
        }
    }
    let mc = monte_carlo_invariance(&sys, &cert, &grid, trials, seed)?;
    verdicts.insert("monte_carlo".into(), verdict_json(&mc));
    verdicts.insert("trials".into(), json!(trials));
    if let Some(w) = mc.witness {
        report.witnesses["monte_carlo"] = json!(w);
    }
    report.certificates = json!({ "cone": cert });
    report.verdicts = serde_json::Value::Object(verdicts);
    record_time(&mut report, "total", start);
    emit(&report, out)
}

fn cmd_eigen(path: &Path, out: &Option<PathBuf>) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, bytes) = load_problem(path)?;
    let sys = file.system().map_err(|e| Failure::input(e.to_string()))?;
    let grid = file.grid().map_err(|e| Failure::input(e.to_string()))?;
    let cert = synthesize_full_cone(&sys)
        .map_err(|e| Failure::input(format!("no full-cone certificate: {e}")))?;
    let problem =
        reduce_to_bellman(&sys, &cert, grid).map_err(|e| Failure::input(e.to_string()))?;
    let bound = supersolution_lower_bound(&problem);

    let mut report = Report::new("eigen", &bytes, file.seed);
    report.verdicts = json!({
        "eigen_bound": bound,
        "positive": bound.lower > 0.0,
        "drifts": problem.drifts,
    });
    report.certificates = json!({ "cone": cert });
    record_time(&mut report, "total", start);
    emit(&report, out)
}

fn record_time(report: &mut Report, key: &str, start: Instant) {
    report
        .timings_ms
        .insert(key.to_string(), start.elapsed().as_secs_f64() * 1e3);
}

/// Checks an analytic pair against the registry system: residuals within
/// tolerance of nonnegativity, boundary values nonpositive, and a strictly
/// positive interior value somewhere.
fn check_analytic_witness(
    entry: &conelab::closed_forms::RegistryEntry,
    interior_pts: &[Vec<f64>],
    boundary_pts: &[Vec<f64>],
) -> Result<serde_json::Value, Failure> {
    let field = entry
        .field
        .as_ref()
        .ok_or_else(|| Failure::internal("registry entry has no analytic field"))?;
    let mins = residual(&entry.system, field, interior_pts)
        .map_err(|e| Failure::internal(e.to_string()))?;
    if mins.iter().any(|&v| v < -1e-10) {
        return Err(Failure::mismatch(format!(
            "analytic residual dips below tolerance: {mins:?}"
        )));
    }
    for x in boundary_pts {
        for j in 0..field.num_components() {
            if field.value(j, x) > 1e-12 {
                return Err(Failure::mismatch(format!(
                    "boundary value positive at {x:?} (component {j})"
                )));
            }
        }
    }
    let violation = interior_pts
        .iter()
        .flat_map(|x| (0..field.num_components()).map(move |j| field.value(j, x)))
        .fold(f64::NEG_INFINITY, f64::max);
    if violation <= 0.0 {
        return Err(Failure::mismatch("no interior sign violation found"));
    }
    Ok(json!({
        "residual_minima": mins,
        "interior_violation": violation,
        "wmp_fails": true,
    }))
}

fn circle_points(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

fn square_edge_points(count: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for i in 0..=count {
        let t = i as f64 / count as f64;
        pts.push(vec![0.0, t]);
        pts.push(vec![1.0, t]);
        pts.push(vec![t, 0.0]);
        pts.push(vec![t, 1.0]);
    }
    pts
}

fn expect(cond: bool, msg: &str) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::mismatch(msg.to_string()))
    }
}

fn cmd_reproduce(id: &str, out: &Option<PathBuf>, csv: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let mut report = Report::new("reproduce", id.as_bytes(), None);

    match id {
        "figure1" => {
            let data = figure_csv();
            let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)
                .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join("figure1.csv");
            std::fs::write(&path, &data).map_err(|e| Failure::internal(e.to_string()))?;
            if csv {
                print!("{data}");
            }
            report.verdicts = json!({
                "csv": path.display().to_string(),
                "curves": 4,
                "samples_per_curve": 400,
            });
        }
        "prop1.4" => {
            let q = ZetaQuery {
                rho: 1.0,
                c: 1.0,
                alpha_over_eps: 0.0,
            };
            let (predicted, margin) = wmp_fails_prediction(&q);
            expect(predicted, "threshold condition not met")?;
            let sys = EllipticSystem::new(
                vec![Mat::from_rows(&[&[0.0, -1.0], &[0.0, 0.0]])],
                Mat::from_rows(&[&[-1.0, 0.0], &[0.0, 0.0]]),
            )
            .map_err(|e| Failure::internal(e.to_string()))?;
            let grid = GridDomain::interval(0.0, 1.0, 101)?;
            let verdict = wmp_certificate(&assemble(&sys, &grid, Scheme::Centered)?)?;
            expect(
                verdict.outcome == Outcome::Fails,
                "discrete certificate did not fail",
            )?;
            report.verdicts = json!({
                "prediction_margin": margin,
                "discrete": verdict_json(&verdict),
                "wmp_fails": true,
            });
        }
        "prop1.6" => {
            let params = Prop16Params {
                eps: 1.0,
                eps_tilde: 2.0,
                alpha: -1.0,
                beta: 3.0,
                c_tilde: 1.0,
            };
            // The thresholds do not depend on c; probe at a large value
            // where the construction is guaranteed admissible.
            let c0 = prop16_construct(&params, 1e9)
                .map_err(|e| Failure::internal(e.to_string()))?
                .c_threshold;
            let cons = prop16_construct(&params, 1.01 * c0)
                .map_err(|e| Failure::mismatch(format!("construction failed: {e}")))?;
            expect(
                cons.residual_infima.0 > 0.0 && cons.residual_infima.1 > 0.0,
                "strict residuals not positive",
            )?;
            expect(
                cons.positive_component().is_some(),
                "no interior positivity",
            )?;
            report.verdicts = json!({
                "construction": cons,
                "wmp_fails": true,
            });
        }
        "ex1.1" => {
            let entry =
                example_registry(id).map_err(|e| Failure::input(e.to_string()))?;
            let checks =
                check_analytic_witness(&entry, &unit_disk_points(1000, 11), &circle_points(64))?;
            expect(
                entry.expected.wmp_fails == Some(true),
                "registry verdict mismatch",
            )?;
            report.verdicts = json!({ "analytic": checks, "expected": entry.expected });
        }
        "ex1.3" | "ex1.10" => {
            let entry =
                example_registry(id).map_err(|e| Failure::input(e.to_string()))?;
            let checks = check_analytic_witness(
                &entry,
                &unit_square_points(1000, 7),
                &square_edge_points(40),
            )?;
            let mut verdicts = json!({ "analytic": checks, "expected": entry.expected });
            if id == "ex1.10" {
                let cert = synthesize_partial_cone(&entry.system)
                    .map_err(|e| Failure::mismatch(e.to_string()))?;
                expect(
                    Some(cert.k) == entry.expected.invariant_cone_k,
                    "partial cone width mismatch",
                )?;
                let grid = GridDomain::rectangle([0.0, 0.0], [1.0, 1.0], [11, 11])?;
                let mc = monte_carlo_invariance(&entry.system, &cert, &grid, 50, 42)?;
                expect(mc.outcome == Outcome::Holds, "partial cone not invariant")?;
                verdicts["monte_carlo"] = verdict_json(&mc);
                report.certificates = json!({ "cone": cert });
            }
            report.verdicts = verdicts;
        }
        "ex1.3-decoupled" | "remark1.8-matrices" | "ex1.8" => {
            let entry =
                example_registry(id).map_err(|e| Failure::input(e.to_string()))?;
            let cert = synthesize_full_cone(&entry.system)
                .map_err(|e| Failure::mismatch(format!("synthesis failed: {e}")))?;
            expect(
                Some(cert.k) == entry.expected.invariant_cone_k,
                "cone width mismatch",
            )?;
            let grid = if entry.system.n == 1 {
                GridDomain::interval(0.0, 1.0, 41)?
            } else {
                GridDomain::rectangle([0.0, 0.0], [1.0, 1.0], [11, 11])?
            };
            let verdict = cone_certificate(&entry.system, &cert, &grid)?;
            expect(
                verdict.outcome == Outcome::Holds,
                "cone certificate did not hold",
            )?;
            if entry.expected.wmp_fails == Some(false) {
                let op = assemble(&entry.system, &grid, Scheme::Centered)?;
                let wmp = wmp_certificate(&op)?;
                expect(wmp.outcome == Outcome::Holds, "wMP expected to hold")?;
            }
            report.certificates = json!({ "cone": cert });
            report.verdicts = json!({
                "cone": verdict_json(&verdict),
                "expected": entry.expected,
            });
        }
        other => return Err(Failure::input(format!("unknown scenario id {other:?}"))),
    }

    record_time(&mut report, "total", start);
    emit(&report, out)
}
