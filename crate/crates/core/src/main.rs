use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rapdhg::bench::{run_bench, write_log, write_report, BenchConfig};
use rapdhg::generators::{generate, GenSpec, ProblemClass, SizePreset};
use rapdhg::qps::{read_qps_file, write_qps};
use rapdhg::solver::{solve, Algorithm, RestartPolicy, SolverConfig, Status, StepRule};
use rapdhg::Error;

const EXIT_OK: u8 = 0;
const EXIT_LIMIT: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "rapdhg", version, about = "Restarted accelerated PDHG for convex QPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one QPS instance.
    Solve(SolveArgs),
    /// Run a config matrix over a directory of QPS files.
    Bench(BenchArgs),
    /// Write a generated instance as QPS plus a JSON sidecar.
    Generate(GenerateArgs),
}

#[derive(Args, Clone)]
struct SolverFlags {
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    /// Seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 40)]
    check_interval: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    #[command(flatten)]
    common: SolverFlags,
    /// pdhg | apdhg
    #[arg(long, default_value = "apdhg")]
    algorithm: String,
    /// none | fixed=K | halving | adaptive
    #[arg(long, default_value = "adaptive")]
    restart: String,
    /// theoretical | adaptive
    #[arg(long, default_value = "adaptive")]
    step: String,
    /// on | off
    #[arg(long, default_value = "on")]
    scaling: String,
    /// Solution JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-check CSV log path.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    #[command(flatten)]
    common: SolverFlags,
    /// Comma-separated list; every combination of the four lists is run.
    #[arg(long, default_value = "apdhg")]
    algorithm: String,
    #[arg(long, default_value = "adaptive")]
    restart: String,
    #[arg(long, default_value = "adaptive")]
    step: String,
    #[arg(long, default_value = "on")]
    scaling: String,
    /// CSV table path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-run check logs.
    #[arg(long)]
    log_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    class: String,
    /// tiny | small | medium | large (ignored when --n is given)
    #[arg(long, default_value = "tiny")]
    size: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "L", alias = "l")]
    l: Option<f64>,
    /// QPS output path; the sidecar goes next to it with a .json extension.
    #[arg(long)]
    out: PathBuf,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, Error> {
    match s {
        "pdhg" => Ok(Algorithm::Pdhg),
        "apdhg" => Ok(Algorithm::Apdhg),
        _ => Err(Error::InvalidArgument(format!("unknown algorithm '{s}'"))),
    }
}

fn parse_restart(s: &str) -> Result<RestartPolicy, Error> {
    match s {
        "none" => Ok(RestartPolicy::None),
        "halving" => Ok(RestartPolicy::AdaptiveHalving),
        "adaptive" => Ok(RestartPolicy::PdqpAdaptive),
        _ => s
            .strip_prefix("fixed=")
            .and_then(|k| k.parse().ok())
            .map(RestartPolicy::Fixed)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown restart policy '{s}'"))),
    }
}

fn parse_step(s: &str) -> Result<StepRule, Error> {
    match s {
        "theoretical" => Ok(StepRule::Theoretical),
        "adaptive" => Ok(StepRule::PdqpAdaptive),
        _ => Err(Error::InvalidArgument(format!("unknown step rule '{s}'"))),
    }
}

fn parse_switch(s: &str) -> Result<bool, Error> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("expected on or off, got '{s}'"))),
    }
}

fn build_config(f: &SolverFlags, algorithm: &str, restart: &str, step: &str, scaling: &str) -> Result<SolverConfig, Error> {
    let cfg = SolverConfig {
        algorithm: parse_algorithm(algorithm)?,
        restart: parse_restart(restart)?,
        step_rule: parse_step(step)?,
        scaling: parse_switch(scaling)?,
        tol: f.tol,
        max_iters: f.max_iters,
        time_limit: f.time_limit,
        check_interval: f.check_interval,
        seed: f.seed,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct RelKktJson {
    primal: f64,
    dual: f64,
    gap: f64,
}

#[derive(Serialize)]
struct SolutionJson<'a> {
    status: Status,
    objective: f64,
    x: &'a [f64],
    /// Stacked as inequality duals then equality duals.
    y: Vec<f64>,
    m_ineq: usize,
    relkkt: RelKktJson,
    iterations: usize,
    restarts: usize,
    seconds: f64,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run_solve(a: &SolveArgs) -> Result<u8, Error> {
    let cfg = build_config(&a.common, &a.algorithm, &a.restart, &a.step, &a.scaling)?;
    let problem = read_qps_file(&a.path)?;
    let r = solve(&problem, &cfg)?;
    let json = SolutionJson {
        status: r.status,
        objective: r.objective,
        x: &r.point.x,
        y: r.point.stacked_y(),
        m_ineq: r.point.y_ineq.len(),
        relkkt: RelKktJson { primal: r.relkkt.r_primal, dual: r.relkkt.r_dual, gap: r.relkkt.r_gap },
        iterations: r.iterations,
        restarts: r.restarts,
        seconds: r.seconds,
    };
    write_output(a.out.as_deref(), &serde_json::to_string_pretty(&json).map_err(|e| Error::InvalidArgument(e.to_string()))?)?;
    if let Some(p) = &a.log {
        write_log(std::fs::File::create(p)?, &r.log)?;
    }
    eprintln!("{}: {} after {} iterations, relkkt {:.3e}", problem.name, r.status, r.iterations, r.relkkt.relkkt);
    Ok(match r.status {
        Status::Optimal => EXIT_OK,
        Status::IterationLimit | Status::TimeLimit => EXIT_LIMIT,
        Status::NumericalError => EXIT_NUMERICAL,
    })
}

fn split(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn run_bench_cmd(a: &BenchArgs) -> Result<u8, Error> {
    let mut configs = Vec::new();
    for alg in split(&a.algorithm) {
        for restart in split(&a.restart) {
            for step in split(&a.step) {
                for scaling in split(&a.scaling) {
                    configs.push(BenchConfig {
                        id: format!("{alg}-{restart}-{step}-{scaling}"),
                        config: build_config(&a.common, alg, restart, step, scaling)?,
                    });
                }
            }
        }
    }
    let report = run_bench(&a.dir, &configs, a.log_dir.as_deref())?;
    let mut buf = Vec::new();
    write_report(&mut buf, &report)?;
    let text = String::from_utf8(buf).expect("csv output is utf-8");
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn run_generate(a: &GenerateArgs) -> Result<u8, Error> {
    let class: ProblemClass = a.class.parse()?;
    let mut spec = match a.n {
        Some(n) => GenSpec::new(class, n, a.seed),
        None => GenSpec::preset(class, a.size.parse::<SizePreset>()?, a.seed),
    };
    if let Some(d) = a.density {
        spec.density = d;
    }
    if let Some(mu) = a.mu {
        spec.mu = mu;
    }
    if let Some(l) = a.l {
        spec.l = l;
    }
    let inst = generate(&spec)?;
    std::fs::write(&a.out, write_qps(&inst.problem))?;
    let sidecar = serde_json::json!({ "spec": spec, "metadata": inst.metadata });
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    std::fs::write(a.out.with_extension("json"), text)?;
    Ok(EXIT_OK)
}

/// Bad input of any kind maps to 3; a failed generator self-check to 4.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Oracle(_) => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Bench(a) => run_bench_cmd(a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
