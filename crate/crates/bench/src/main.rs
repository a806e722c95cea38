use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyschwarz_bench::{run, run_sweep, BenchError, PartialConfig, SweepSpec};

#[derive(Parser)]
#[command(
    name = "polyschwarz-bench",
    version,
    about = "Run additive Schwarz preconditioner experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write its residual history and summary.
    Run(RunArgs),
    /// Run every configuration in a sweep file.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// bfs, adini, c0ip or jinwu.
    #[arg(long)]
    element: Option<String>,
    /// Fine mesh size h = 2^-a.
    #[arg(long = "h-exp")]
    h_exp: Option<u32>,
    /// Coarse mesh size H = 2^-b.
    #[arg(long = "H-exp")]
    coarse_exp: Option<u32>,
    /// Overlap in fine cells, delta = l h.
    #[arg(long)]
    overlap_layers: Option<usize>,
    /// Interior penalty parameter (c0ip only).
    #[arg(long)]
    eta: Option<f64>,
    /// none, one-level or two-level.
    #[arg(long)]
    precond: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// manufactured-m2, manufactured-m3 or ones.
    #[arg(long)]
    rhs: Option<String>,
    /// Output prefix for .residuals.csv and .summary.json.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report the energy distance to the interpolated exact solution.
    #[arg(long)]
    check_error: bool,
    /// Worker threads; 1 gives a fully serial run.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    spec: PathBuf,
    /// Overrides the sweep file's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the number of concurrent runs.
    #[arg(long)]
    workers: Option<usize>,
    /// Threads shared by all runs.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            element: self.element.clone(),
            h_exponent: self.h_exp,
            coarse_exponent: self.coarse_exp,
            overlap_layers: self.overlap_layers,
            eta: self.eta,
            precond: self.precond.clone(),
            tol: self.tol,
            max_iters: self.max_iters,
            rhs: self.rhs.clone(),
            output: self.output.clone(),
            check_error: self.check_error.then_some(true),
            threads: self.threads,
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), BenchError> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| BenchError::Io(e.to_string()))?;
    }
    Ok(())
}

fn run_command(args: RunArgs) -> Result<bool, BenchError> {
    let file = match &args.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let cfg = file.overlay(args.partial()).resolve()?;
    init_threads(cfg.threads)?;
    let s = run(&cfg)?;
    println!(
        "{} h={} H={} delta={} {}: {} iterations, converged={}, kappa={:.4}, setup {:.3} s, solve {:.3} s",
        s.element, s.h, s.coarse_h, s.delta, s.precond, s.iterations, s.converged, s.kappa_estimate, s.setup_seconds, s.solve_seconds
    );
    if let Some(e) = s.energy_error {
        println!("energy error {e:.6e}");
    }
    println!(
        "wrote {} and {}",
        cfg.residuals_path().display(),
        cfg.summary_path().display()
    );
    Ok(s.converged)
}

fn sweep_command(args: SweepArgs) -> Result<bool, BenchError> {
    let mut spec = SweepSpec::from_file(&args.spec)?;
    if args.output_dir.is_some() {
        spec.output_dir = args.output_dir;
    }
    if args.workers.is_some() {
        spec.workers = args.workers;
    }
    init_threads(args.threads)?;
    let report = run_sweep(&spec)?;
    print!("{}", report.table());
    for g in &report.scalability {
        let kappas: Vec<String> = g
            .entries
            .iter()
            .map(|e| format!("{:.3}", e.kappa_estimate))
            .collect();
        println!(
            "{} H/h={} l={} {}: kappa {}",
            g.element,
            g.coarse_ratio,
            g.overlap_layers,
            g.precond,
            kappas.join(" -> ")
        );
    }
    for r in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "row {} failed: {}",
            r.index,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(report.all_converged())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run_command(a),
        Command::Sweep(a) => sweep_command(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
