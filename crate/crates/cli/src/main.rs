//! `momentvar`: analyze algebras, run the gradient flow, reproduce the
//! classification tables and the `d21` family check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use momentvar::algebra::{catalog, parse_json, to_json_value, AlgebraError, AlgebraTensor, ASSOC_TOL};
use momentvar::cla;
use momentvar::flow::{self, FlowConfig, FlowStatus, FlowTrace};
use momentvar::moment::{self, CriticalReport, CRITICAL_TOL, FLOW_CRITICAL_TOL};
use momentvar::sample;
use momentvar::structure::{self, NikolayevskyResult, StructureChecks, SubstructureReport, DER_TOL};
use momentvar::tables::{self, FamilyPoint, TableOptions, TableRow};
use momentvar::Exec;

#[derive(Parser)]
#[command(name = "momentvar", version, about = "Moment map and critical points on the variety of associative algebras")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment matrix, critical test, Nikolayevsky derivation and substructures.
    Analyze {
        path: PathBuf,
        /// Exit with status 2 if the algebra is not associative.
        #[arg(long)]
        require_associative: bool,
    },
    /// Negative gradient flow of F to a critical point.
    Flow {
        path: PathBuf,
        /// Initial step (default 0.1 / F at the start).
        #[arg(long)]
        step: Option<f64>,
        /// Gradient-norm tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
        /// Conjugate the input by a random invertible matrix from this seed.
        #[arg(long)]
        seed_metric: Option<u64>,
        /// Keep every n-th F value in the trace.
        #[arg(long, default_value_t = 100)]
        record_every: usize,
    },
    /// Reproduce the table of critical types for dimension 2 or 3.
    Tables {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        /// Skip the flow cross-check.
        #[arg(long)]
        no_flow: bool,
        /// Random samples of the d22 family besides (1, 1).
        #[arg(long, default_value_t = 2)]
        d22_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the D-spectrum law on the one-parameter family of metrics on d21.
    D21 {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Also flow from d21 and report the degeneration.
        #[arg(long)]
        flow: bool,
    },
    /// Named algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print all names.
    List,
    /// Print one algebra as JSON.
    Show { name: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::Algebra(_) | CliError::Compute(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn read_algebra(path: &Path) -> Result<AlgebraTensor, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mu = parse_json(&text)?;
    if mu.is_zero() {
        return Err(AlgebraError::ZeroTensor.into());
    }
    Ok(mu)
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

#[derive(Serialize)]
struct Dims {
    center: usize,
    annihilator: usize,
    radical: usize,
}

#[derive(Serialize)]
struct AnalyzeReport {
    dim: usize,
    norm: f64,
    associative: bool,
    max_associator: f64,
    moment_eigenvalues: Vec<f64>,
    f_value: f64,
    critical: CriticalReport,
    derivation_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    nikolayevsky: Option<NikolayevskyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    substructure_dims: Option<Dims>,
    #[serde(skip_serializing_if = "Option::is_none")]
    substructures: Option<SubstructureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structure_checks: Option<StructureChecks>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

fn analyze(path: &Path, require_associative: bool, json: bool) -> Result<(), CliError> {
    let mu = read_algebra(path)?;
    let (associative, max_associator) = mu.is_associative(ASSOC_TOL);
    if require_associative && !associative {
        return Err(CliError::Validation(format!(
            "algebra is not associative (max associator {max_associator:.2e})"
        )));
    }
    let mm = moment::moment_matrix(&mu).map_err(compute)?;
    let moment_eigenvalues = cla::hermitian_eig(&mm.m).map_err(compute)?.eigenvalues;
    let critical = moment::critical_test(&mu, CRITICAL_TOL).map_err(compute)?;
    let derivation_dim = structure::derivation_algebra(&mu, DER_TOL).map_err(compute)?.dim();
    let mut notes = Vec::new();
    let mut report = AnalyzeReport {
        dim: mu.dim(),
        norm: mu.norm(),
        associative,
        max_associator,
        moment_eigenvalues,
        f_value: critical.value,
        critical,
        derivation_dim,
        nikolayevsky: None,
        substructure_dims: None,
        substructures: None,
        structure_checks: None,
        notes: Vec::new(),
    };
    match structure::nikolayevsky(&mu) {
        Ok(n) => report.nikolayevsky = Some(n),
        Err(e) => notes.push(format!("nikolayevsky derivation: {e}")),
    }
    if associative {
        match structure::substructures(&mu, DER_TOL) {
            Ok(s) => {
                report.substructure_dims = Some(Dims {
                    center: s.center.len(),
                    annihilator: s.annihilator.len(),
                    radical: s.radical.len(),
                });
                report.substructures = Some(s);
            }
            Err(e) => notes.push(format!("substructures: {e}")),
        }
        if report.critical.critical {
            match structure::structure_checks(&mu, &report.critical) {
                Ok(c) => report.structure_checks = Some(c),
                Err(e) => notes.push(format!("structure checks: {e}")),
            }
        }
    } else {
        notes.push("not associative: substructures skipped".into());
    }
    report.notes = notes;

    if json {
        print_json(&report);
        return Ok(());
    }
    let c = &report.critical;
    println!("dimension        {}", report.dim);
    println!("norm             {:.6}", report.norm);
    println!("associative      {} (max associator {:.2e})", report.associative, report.max_associator);
    println!("M spectrum       {}", fmt_list(&report.moment_eigenvalues));
    println!("F                {:.10}", report.f_value);
    println!("c                {:.10}", c.c);
    println!("D spectrum       {}", fmt_list(&c.d_eigenvalues));
    println!("residual         {:.3e}", c.residual);
    if c.critical {
        println!("critical         yes, type {}", c.type_string());
    } else {
        println!("critical         not critical");
    }
    if let Some(e) = &c.type_error {
        println!("type             {e}");
    }
    println!("dim Der          {}", report.derivation_dim);
    if let Some(n) = &report.nikolayevsky {
        let ev: Vec<String> = n.eigen_rationals.iter().map(|[p, q]| fmt_rational(*p, *q)).collect();
        println!("Nikolayevsky     [{}] semisimple={}", ev.join(", "), n.is_semisimple);
    }
    if let Some(d) = &report.substructure_dims {
        println!("dim C, ann, N    {}, {}, {}", d.center, d.annihilator, d.radical);
    }
    if let Some(checks) = &report.structure_checks {
        for cl in &checks.clauses {
            println!("{:<40} {} ({:.1e})", cl.clause, if cl.passed { "pass" } else { "FAIL" }, cl.residual);
        }
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_rational(p: i64, q: i64) -> String {
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

#[derive(Serialize)]
struct FlowReport {
    trace: FlowTrace,
    final_report: CriticalReport,
    degenerated: Option<bool>,
}

fn show_invariants(i: &flow::OrbitInvariants) -> String {
    format!("(der {}, radical {}, ann {}, center {})", i.der, i.radical, i.annihilator, i.center)
}

fn run_flow(path: &Path, cfg: FlowConfig, seed_metric: Option<u64>, json: bool) -> Result<(), CliError> {
    use rand::SeedableRng;
    let mut mu = read_algebra(path)?;
    if let Some(seed) = seed_metric {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = sample::random_gl(mu.dim(), 100.0, &mut rng);
        mu = mu.act_group(&g)?;
    }
    cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    // the flow is only meaningful inside the variety
    let (associative, worst) = mu.is_associative(ASSOC_TOL);
    if !associative {
        return Err(CliError::Validation(format!("algebra is not associative (max associator {worst:.2e})")));
    }
    let trace = flow::flow_to_critical(&mu, &cfg).map_err(compute)?;
    let final_report = moment::critical_test(&trace.final_tensor, FLOW_CRITICAL_TOL).map_err(compute)?;
    let degenerated = flow::detect_degeneration(&trace).ok();
    let status = trace.status;
    let iterations = trace.iterations;
    let report = FlowReport {
        trace,
        final_report,
        degenerated,
    };
    if json {
        print_json(&report);
    } else {
        let t = &report.trace;
        println!("status           {:?} after {} iterations", t.status, t.iterations);
        println!("gradient norm    {:.3e}", t.grad_norm);
        println!("F start, final   {:.10}, {:.10}", t.f_values[0].1, t.final_value());
        println!("final type       {}", report.final_report.type_string());
        println!("final value      {:.10}", report.final_report.value);
        println!("invariants       {} -> {}", show_invariants(&t.start_invariants), show_invariants(&t.final_invariants));
        match report.degenerated {
            Some(d) => println!("degenerated      {d}"),
            None => println!("degenerated      unknown (not converged)"),
        }
    }
    match status {
        FlowStatus::Converged | FlowStatus::Stalled => Ok(()),
        FlowStatus::BudgetExhausted => Err(CliError::Budget(format!(
            "iteration budget exhausted after {iterations} iterations"
        ))),
        FlowStatus::LineSearchFailed => Err(CliError::Budget(format!(
            "line search failed after {iterations} iterations"
        ))),
    }
}

fn run_tables(dim: usize, opts: TableOptions, json: bool) -> Result<(), CliError> {
    let rows = tables::table(dim, &opts).map_err(compute)?;
    if json {
        print_json(&rows);
    } else {
        print_rows(&rows);
    }
    let bad: Vec<&str> = rows.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("rows not reproduced: {}", bad.join(", "))))
    }
}

fn print_rows(rows: &[TableRow]) {
    println!("| row | expected type | expected value | computed type | computed value | residual | status |");
    println!("|---|---|---|---|---|---|---|");
    let opt = |s: &Option<String>| s.clone().unwrap_or_else(|| "-".into());
    let val = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| format!("{v:.6}"));
    for r in rows {
        let status = serde_json::to_value(r.status).expect("status serializes");
        println!(
            "| {} | {} | {} | {} | {} | {:.1e} | {} |",
            r.name,
            opt(&r.expected_type),
            val(r.expected_value),
            opt(&r.computed_type),
            val(r.computed_value),
            r.residual,
            status.as_str().unwrap_or("?"),
        );
    }
    for r in rows.iter().filter(|r| !r.notes.is_empty()) {
        println!("{}: {}", r.name, r.notes.join("; "));
    }
}

#[derive(Serialize)]
struct D21Report {
    points: Vec<FamilyPoint>,
    all_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    flow_degenerated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flow_limit_type: Option<String>,
}

const FAMILY_TOL: f64 = 1e-8;

fn run_d21(samples: usize, with_flow: bool, exec: Exec, json: bool) -> Result<(), CliError> {
    let pts = tables::d21_samples(samples).map_err(|e| CliError::Validation(e.to_string()))?;
    let points = tables::d21_family(&pts, exec).map_err(compute)?;
    let all_ok = points.iter().all(|p| p.ok(FAMILY_TOL));
    let mut report = D21Report {
        points,
        all_ok,
        flow_degenerated: None,
        flow_limit_type: None,
    };
    if with_flow {
        let (trace, degenerated) = tables::d21_flow(&FlowConfig::default()).map_err(compute)?;
        let r = moment::critical_test(&trace.final_tensor, FLOW_CRITICAL_TOL).map_err(compute)?;
        report.flow_degenerated = Some(degenerated);
        report.flow_limit_type = Some(r.type_string());
    }
    if json {
        print_json(&report);
    } else {
        println!("| a | D spectrum / sum | predicted / sum | rel error | multiplicities | critical |");
        println!("|---|---|---|---|---|---|");
        for p in &report.points {
            let s: f64 = p.spectrum.iter().sum();
            let t: f64 = p.predicted.iter().sum();
            let sp: Vec<f64> = p.spectrum.iter().map(|x| x / s).collect();
            let pr: Vec<f64> = p.predicted.iter().map(|x| x / t).collect();
            println!(
                "| {:.4} | {} | {} | {:.1e} | {:?} | {} |",
                p.a,
                fmt_list(&sp),
                fmt_list(&pr),
                p.rel_error,
                p.multiplicities,
                p.critical
            );
        }
        if let (Some(d), Some(t)) = (report.flow_degenerated, &report.flow_limit_type) {
            println!("flow from d21: degenerated = {d}, limit type {t}");
        }
    }
    if report.all_ok {
        Ok(())
    } else {
        Err(CliError::Validation("D-spectrum law failed on at least one sample".into()))
    }
}

fn run_catalog(action: CatalogAction, json: bool) -> Result<(), CliError> {
    match action {
        CatalogAction::List => {
            let names = catalog::names();
            if json {
                print_json(&names);
            } else {
                for n in names {
                    println!("{n}");
                }
            }
        }
        CatalogAction::Show { name } => {
            let e = catalog::get(&name)?;
            print_json(&to_json_value(&e.tensor));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Analyze { path, require_associative } => analyze(&path, require_associative, cli.json),
        Command::Flow {
            path,
            step,
            tol,
            max_iter,
            seed_metric,
            record_every,
        } => {
            let cfg = FlowConfig {
                step0: step,
                grad_tol: tol,
                stall_tol: tol.max(FlowConfig::default().stall_tol),
                max_iters: max_iter,
                record_every,
                ..FlowConfig::default()
            };
            run_flow(&path, cfg, seed_metric, cli.json)
        }
        Command::Tables {
            dim,
            no_flow,
            d22_samples,
            seed,
        } => {
            let opts = TableOptions {
                flows: !no_flow,
                d22_samples,
                seed,
                exec,
                ..TableOptions::default()
            };
            run_tables(dim as usize, opts, cli.json)
        }
        Command::D21 { samples, flow } => run_d21(samples as usize, flow, exec, cli.json),
        Command::Catalog { action } => run_catalog(action, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
