use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oddic::runner::{self, Overrides, PolicyChoice};
use oddic::{load_config, write_outputs, Error, ExperimentOutput};

#[derive(Parser)]
#[command(name = "oddic", version, about = "Outlier-filtered resilient consensus simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed (experiments default to 0; `run` defaults to the config's).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// oddic, mean, msr or msr:<d>. Overrides the config policy for `run`;
    /// restricts the written policies for experiments.
    #[arg(long, global = true)]
    policy: Option<PolicyChoice>,
    /// Runs per batch (experiments default to 50, `run` to 1).
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Number of update steps.
    #[arg(long, global = true)]
    tmax: Option<usize>,
    /// Debug: apply the update with the printed sign, own + eta*(own - mean).
    #[arg(long, global = true)]
    literal_eq11: bool,
    /// Include the node's own value in the ODDI-C median/MAD sample.
    #[arg(long, global = true)]
    inclusive_sample: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration file.
    Run { config: PathBuf },
    /// Fixed 7- and 15-node networks, ODDI-C vs mean.
    Exp1,
    /// In-degree sweep, ODDI-C vs MSR.
    Exp2,
    /// Disruptor-count sweep, ODDI-C vs MSR.
    Exp3,
    /// Exhaustive (r,s)-robustness check of a bundled fixture name or graph file.
    Robustness { fixture: String, r: usize, s: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    let o = Overrides {
        seed: cli.seed,
        runs: cli.runs,
        t_max: cli.tmax,
        policy: cli.policy,
        literal_eq11: cli.literal_eq11,
        inclusive_sample: cli.inclusive_sample,
    };
    let (name, output) = match cli.command {
        Command::Run { config } => ("run", runner::run(load_config(&config)?, &o)?),
        Command::Exp1 => ("exp1", runner::exp1(&o)?),
        Command::Exp2 => ("exp2", runner::exp2(&o)?),
        Command::Exp3 => ("exp3", runner::exp3(&o)?),
        Command::Robustness { fixture, r, s } => {
            let (g, robust) = runner::robustness(&fixture, r, s)?;
            let verdict = if robust { "is" } else { "is NOT" };
            println!("{} ({} nodes, sha256 {}) {verdict} ({r},{s})-robust", g.name, g.graph.node_count(), g.sha256);
            return Ok(());
        }
    };
    let dir = cli.out.unwrap_or_else(|| PathBuf::from("out").join(name));
    let manifest = write_outputs(&output, &dir)?;
    report(&output, &dir, &manifest.rows);
    Ok(())
}

fn report(output: &ExperimentOutput, dir: &std::path::Path, rows: &oddic::output::RowCounts) {
    println!("{} runs written to {}", output.runs.len(), dir.display());
    for s in &output.summaries {
        let last = s.final_mean().map_or("-".into(), |v| format!("{v:.3e}"));
        println!("  {:>3} {:<8} runs={:<3} final mean cm={last}", s.batch_param, s.policy.to_string(), s.run_count);
    }
    println!(
        "  rows: trajectories={} metrics={} summary={}",
        rows.trajectories, rows.metrics, rows.summary
    );
}
