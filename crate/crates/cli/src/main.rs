mod bench;
mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpcp_core::io::{self, Format, Instance, ProblemKind};
use dpcp_core::models::rcpsp::{ordering_oracle, RcpspModel, RcpspOptions};
use dpcp_core::models::smswt::{generate, SmsGeneratorConfig, SmsModel};
use dpcp_core::models::tsptw::permutation_oracle;
use dpcp_core::oracle::optimal_cost;
use dpcp_core::Cost;

use run::{Algo, Limits, Mode, RunConfig, RunError};

/// Largest instance the exhaustive oracle accepts.
const ORACLE_CAP: usize = 10;

#[derive(Parser)]
#[command(name = "dpcp", version, about = "DP heuristic search with constraint propagation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print a JSON report.
    Solve(SolveArgs),
    /// Write random single-machine instances.
    Generate(GenerateArgs),
    /// Exhaustive optimum of a small instance.
    Oracle(OracleArgs),
    /// Run a manifest of solves and write CSV rows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Smswt,
    Rcpsp,
    Tsptw,
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::Smswt => ProblemKind::Smswt,
            Problem::Rcpsp => ProblemKind::Rcpsp,
            Problem::Tsptw => ProblemKind::Tsptw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Auto,
    Json,
    Psplib,
    TsptwMatrix,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Auto => Format::Auto,
            FileFormat::Json => Format::Json,
            FileFormat::Psplib => Format::Psplib,
            FileFormat::TsptwMatrix => Format::TsptwMatrix,
        }
    }
}

#[derive(Args)]
struct InstanceArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long, value_enum, default_value = "auto")]
    format: FileFormat,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance, String> {
        io::load(&self.instance, self.problem.into(), self.format.into()).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, value_enum, default_value = "cabs")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "once")]
    propagation: Mode,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Megabytes of stored search nodes (estimated).
    #[arg(long)]
    mem_limit: Option<usize>,
    #[arg(long)]
    expansion_cap: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Recorded in the report; the solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    phi: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the instance files.
    #[arg(long, default_value = ".")]
    output: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InstanceArgs,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Runs executed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Failed(String),
    #[error("instance too large for the oracle: {size} > {cap}")]
    TooLarge { size: usize, cap: usize },
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<String> for CliError {
    fn from(e: String) -> Self {
        CliError::Failed(e)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failed(format!("{}: {e}", p.display()))),
        None => print_line(text),
    }
}

/// Writes a line to standard output; a closed pipe is not an error.
fn print_line(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failed(e.to_string())),
        _ => Ok(()),
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode, CliError> {
    let inst = args.input.load()?;
    let limits = Limits {
        time_limit: args.time_limit,
        mem_limit: args.mem_limit,
        expansion_cap: args.expansion_cap,
    }
    .to_solver()?;
    let cfg = RunConfig {
        algo: args.algo,
        mode: args.propagation,
        limits,
    };
    let report = run::solve(&inst, &cfg)?;
    let mut json = serde_json::to_value(&report).expect("reports serialize");
    json["seed"] = args.seed.into();
    json["instance"] = args.input.instance.display().to_string().into();
    write_out(args.output.as_deref(), &serde_json::to_string_pretty(&json).expect("json values serialize"))?;
    Ok(if report.status.is_proven() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn generate_files(args: GenerateArgs) -> Result<ExitCode, CliError> {
    if !matches!(args.problem, Problem::Smswt) {
        return Err(CliError::Failed("only smswt instances can be generated".into()));
    }
    let cfg = SmsGeneratorConfig {
        n: args.n,
        tau: args.tau,
        rho: args.rho,
        phi: args.phi,
        seed: args.seed,
        count: args.count,
    };
    let instances = generate(&cfg).map_err(|e| CliError::Failed(e.to_string()))?;
    fs::create_dir_all(&args.output).map_err(|e| CliError::Failed(format!("{}: {e}", args.output.display())))?;
    for (k, inst) in instances.into_iter().enumerate() {
        let name = format!(
            "smswt_n{}_tau{}_rho{}_phi{}_seed{}_{k:03}.json",
            args.n, args.tau, args.rho, args.phi, args.seed
        );
        let path = args.output.join(name);
        let text = Instance::Smswt(inst).to_json() + "\n";
        fs::write(&path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        print_line(&path.display().to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs) -> Result<ExitCode, CliError> {
    let inst = args.input.load()?;
    let size = match &inst {
        Instance::Smswt(i) => i.n,
        Instance::Rcpsp(i) => i.tasks.len(),
        Instance::Tsptw(i) => i.n,
    };
    if size > ORACLE_CAP {
        return Err(CliError::TooLarge { size, cap: ORACLE_CAP });
    }
    let best: Option<u64> = match inst {
        Instance::Smswt(i) => {
            let m = SmsModel::new(i).map_err(|e| e.to_string())?;
            optimal_cost(&m, size + 1).map_err(|e| e.to_string())?.finite()
        }
        Instance::Rcpsp(i) => {
            let m = RcpspModel::new(i, RcpspOptions::default()).map_err(|e| e.to_string())?;
            ordering_oracle(&m).map(|v| v as u64)
        }
        Instance::Tsptw(i) => permutation_oracle(&i),
    };
    match best {
        Some(v) => print_line(&Cost::Finite(v).to_string())?,
        None => print_line("INFEASIBLE")?,
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode, CliError> {
    let manifest = bench::load_manifest(&args.manifest)?;
    let rows = bench::run_all(&manifest, args.jobs);
    let csv_err = |e: csv::Error| CliError::Failed(e.to_string());
    match &args.output {
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))?;
            bench::write_csv(&rows, f).map_err(csv_err)?;
        }
        None => bench::write_csv(&rows, std::io::stdout().lock()).map_err(csv_err)?,
    }
    let mut err = std::io::stderr().lock();
    for ((algo, mode), (solved, total)) in bench::summary(&rows) {
        let _ = writeln!(err, "summary {algo} {mode}: solved {solved}/{total}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate_files(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
