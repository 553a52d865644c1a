use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use flatopt::crane_solver::{
    crane_tolerances, solve_constrained, solve_unconstrained, verify_crane, write_crane_csv, CraneConfig,
    CraneSolution, CraneSummary,
};
use flatopt::di_solver::{
    cubic_cost, di_escalate_with, di_tolerances, di_unconstrained, default_strategies, verify_di, write_di_csv,
    DiProblem, DiSolution, DiSummary, Escalation,
};
use flatopt::optimality::{Tolerances, VerificationReport};
use flatopt::simulate::{compare, crane_models, di_lq_oracle, lq_oracle, open_loop_force, rollout, write_sim_csv, SimConfig};
use flatopt::Error;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "flatopt", version, about = "Flat-output optimal control solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the crane transfer with the payload position bound.
    CraneSolve(RunArgs),
    /// Solve the double integrator around a circular obstacle.
    DiSolve(RunArgs),
    /// Solve and certify optimality (crane or double-integrator config).
    Verify(RunArgs),
    /// Replay the crane force on the full and small-angle models.
    Simulate(RunArgs),
    /// Discretized LQ reference cost (crane or double-integrator config).
    Oracle(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Problem configuration (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Verification tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// CSV sample count; for `oracle`, the number of intervals.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Simulation step in seconds.
    #[arg(long, value_name = "SECONDS", default_value_t = 1e-3)]
    dt: f64,
}

const CRANE_SAMPLES: usize = 1501;
const DI_SAMPLES: usize = 1001;
const ORACLE_INTERVALS: usize = 1000;

enum Failure {
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. }
            | Error::Infeasible(_)
            | Error::Unsupported(_)
            | Error::EscalationFailed(_)
            | Error::Singular { .. }
            | Error::RankDeficient { .. }
            | Error::DegenerateJunctions(_)
            | Error::FlatnessSingularity(_) => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

enum Problem {
    Crane(CraneConfig),
    Di(DiProblem),
}

fn read_config(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Run<Problem> {
    let text = read_config(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if value.get("obstacle").is_some() {
        Ok(Problem::Di(DiProblem::from_json(&text)?))
    } else {
        Ok(Problem::Crane(CraneConfig::from_json(&text)?))
    }
}

fn load_crane(path: &Path) -> Run<CraneConfig> {
    Ok(CraneConfig::from_json(&read_config(path)?)?)
}

fn load_di(path: &Path) -> Run<DiProblem> {
    Ok(DiProblem::from_json(&read_config(path)?)?)
}

fn parse_tolerances(mut tol: Tolerances, overrides: &[String]) -> Run<Tolerances> {
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("--tol expects NAME=VALUE, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("--tol {name}: `{value}` is not a number")))?;
        if !(value > 0.0) {
            return Err(Failure::Input(format!("--tol {name}: tolerance must be positive")));
        }
        tol.set(name.trim(), value)?;
    }
    Ok(tol)
}

fn create(dir: &Path, name: &str) -> Run<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Run<()> {
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    fs::write(dir.join(name), text + "\n")?;
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn solve_crane(cfg: &CraneConfig) -> Run<CraneSolution> {
    let (params, boundary) = cfg.problem()?;
    Ok(solve_constrained(&params, &boundary)?)
}

fn emit_crane(sol: &CraneSolution, args: &RunArgs) -> Run<()> {
    write_crane_csv(sol, args.samples.unwrap_or(CRANE_SAMPLES), create(&args.out, "crane_trajectory.csv")?)?;
    write_json(&args.out, "crane_summary.json", &to_value(&CraneSummary::new(sol)))
}

fn crane_line(sol: &CraneSolution) -> String {
    let d = &sol.diagnostics;
    let junctions = match sol.junctions {
        Some((t1, t2)) => format!("t1={t1:.6} t2={t2:.6}"),
        None => "unconstrained".to_string(),
    };
    format!(
        "{junctions} cost={:.8} boundary={:.2e} junction={:.2e} wall={:.2}ms",
        sol.cost(),
        d.boundary_residual,
        d.junction_residual,
        d.wall_time_ms
    )
}

fn solve_di(problem: &DiProblem) -> Run<Escalation> {
    Ok(di_escalate_with(problem, &default_strategies())?)
}

fn emit_di(esc: &Escalation, args: &RunArgs) -> Run<()> {
    let sol = &esc.solution;
    write_di_csv(sol, args.samples.unwrap_or(DI_SAMPLES), create(&args.out, "di_trajectory.csv")?)?;
    let steps: Vec<_> = esc
        .steps
        .iter()
        .map(|s| json!({ "strategy": s.strategy, "outcome": s.outcome }))
        .collect();
    let mut summary = to_value(&DiSummary::new(sol));
    summary["escalation"] = json!(steps);
    write_json(&args.out, "di_summary.json", &summary)
}

fn di_line(sol: &DiSolution) -> String {
    let d = &sol.diagnostics;
    format!(
        "case={} cost={:.8} min_clearance={:.2e} boundary={:.2e} solver={:.2e} wall={:.2}ms",
        sol.case.name(),
        sol.cost,
        sol.min_clearance,
        d.boundary_residual,
        d.solver_residual,
        d.wall_time_ms
    )
}

fn emit_report(report: &VerificationReport, args: &RunArgs) -> Run<()> {
    write_json(&args.out, "verification_report.json", &to_value(report))
}

fn report_line(report: &VerificationReport) -> String {
    let worst = report
        .checks
        .iter()
        .map(|c| c.residual / c.tolerance)
        .fold(0.0, f64::max);
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        format!("checks={} all pass (worst residual/tol {worst:.2e})", report.checks.len())
    } else {
        format!("checks={} failed: {}", report.checks.len(), failed.join(", "))
    }
}

fn run(command: Command) -> Run<()> {
    match command {
        Command::CraneSolve(args) => {
            let sol = solve_crane(&load_crane(&args.config)?)?;
            emit_crane(&sol, &args)?;
            println!("crane-solve: {}", crane_line(&sol));
        }
        Command::DiSolve(args) => {
            let esc = solve_di(&load_di(&args.config)?)?;
            emit_di(&esc, &args)?;
            println!("di-solve: {}", di_line(&esc.solution));
        }
        Command::Verify(args) => {
            let report = match load_problem(&args.config)? {
                Problem::Crane(cfg) => {
                    let tol = parse_tolerances(crane_tolerances(), &args.tol)?;
                    let sol = solve_crane(&cfg)?;
                    emit_crane(&sol, &args)?;
                    let report = verify_crane(&sol, &tol)?;
                    println!("verify: {} {}", crane_line(&sol), report_line(&report));
                    report
                }
                Problem::Di(problem) => {
                    let tol = parse_tolerances(di_tolerances(), &args.tol)?;
                    let esc = solve_di(&problem)?;
                    emit_di(&esc, &args)?;
                    let report = verify_di(&esc.solution, &tol)?;
                    println!("verify: {} {}", di_line(&esc.solution), report_line(&report));
                    report
                }
            };
            emit_report(&report, &args)?;
            if !report.all_pass() {
                return Err(Failure::Solver("optimality certificate failed".to_string()));
            }
        }
        Command::Simulate(args) => {
            let cfg = load_crane(&args.config)?;
            let sol = solve_crane(&cfg)?;
            emit_crane(&sol, &args)?;
            let start = Instant::now();
            let force = open_loop_force(&sol);
            let sim_config = SimConfig::for_solution(&sol, args.dt);
            let mut models = Vec::new();
            let mut line = Vec::new();
            for model in crane_models() {
                let sim = rollout(model.as_ref(), &force, &sim_config, &sol.params)?;
                let metrics = compare(&sim, &sol)?;
                let file = format!("sim_{}.csv", model.name().replace('-', "_"));
                write_sim_csv(&sim, create(&args.out, &file)?)?;
                line.push(format!(
                    "{}: miss={:.3e} err={:.3e} peak={:.3}deg",
                    model.name(),
                    metrics.terminal_miss,
                    metrics.max_position_error,
                    metrics.peak_theta_deg
                ));
                models.push(json!({
                    "model": model.name(),
                    "csv": file,
                    "diagnostics": to_value(&sim.diagnostics),
                    "metrics": to_value(&metrics),
                }));
            }
            let summary = json!({
                "dt": args.dt,
                "cost": sol.cost(),
                "junction_times": sol.junctions,
                "models": models,
            });
            write_json(&args.out, "simulate_summary.json", &summary)?;
            println!(
                "simulate: {} | {} wall={:.2}ms",
                crane_line(&sol),
                line.join(" | "),
                start.elapsed().as_secs_f64() * 1e3
            );
        }
        Command::Oracle(args) => {
            let n = args.samples.unwrap_or(ORACLE_INTERVALS);
            let start = Instant::now();
            let (system, oracle, closed_form) = match load_problem(&args.config)? {
                Problem::Crane(cfg) => {
                    let (params, boundary) = cfg.problem()?;
                    let oracle = lq_oracle(&params, &boundary, n)?;
                    ("crane", oracle, solve_unconstrained(&params, &boundary)?.cost())
                }
                Problem::Di(problem) => {
                    let oracle = di_lq_oracle(&problem, n)?;
                    let c = di_unconstrained(&problem)?;
                    let h = problem.horizon();
                    ("double_integrator", oracle, cubic_cost(c[0], h) + cubic_cost(c[1], h))
                }
            };
            let wall = start.elapsed().as_secs_f64() * 1e3;
            let gap = (oracle - closed_form) / closed_form.abs().max(f64::MIN_POSITIVE);
            let summary = json!({
                "system": system,
                "intervals": n,
                "oracle_cost": oracle,
                "closed_form_cost": closed_form,
                "relative_gap": gap,
                "wall_time_ms": wall,
            });
            write_json(&args.out, "oracle_summary.json", &summary)?;
            println!("oracle: {system} N={n} cost={oracle:.10} closed_form={closed_form:.10} gap={gap:.2e} wall={wall:.2}ms");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(2)
        }
    }
}
