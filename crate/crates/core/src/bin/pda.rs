//! Command-line front end: run mechanisms, compute Shapley contributions,
//! audit instances, run the random-network experiment, generate instances.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use diffusion_auction::analysis::{run_audit, CheckKind};
use diffusion_auction::harness::{gen_instance, load_instance, run_experiment, save_instance, write_csv, ExperimentConfig};
use diffusion_auction::mechanism::{expected_outcome, run_order, vcg, EvalMode, Mechanism};
use diffusion_auction::model::Order;
use diffusion_auction::rational;
use diffusion_auction::shapley::{shapley_exact, shapley_sampled};
use diffusion_auction::Result;

#[derive(Parser)]
#[command(name = "pda", version, about = "Permutation diffusion auctions with Shapley-fairness audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on one order, exactly over all orders, or by sampling.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "pda")]
        mechanism: Mechanism,
        /// Comma-separated join order, e.g. `s,A,B`.
        #[arg(long, conflicts_with_all = ["exact", "samples"])]
        order: Option<String>,
        #[command(flatten)]
        eval: Eval,
    },
    /// Shapley contribution of every agent.
    Shapley {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        eval: Eval,
    },
    /// Audit an instance; exits 0 iff every check passes.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "pda")]
        mechanism: Mechanism,
        #[arg(long, default_value = "sf,ic,ir,unsold,revenue")]
        checks: String,
        #[command(flatten)]
        eval: Eval,
    },
    /// Audit randomly generated networks and write per-buyer rows as CSV.
    Experiment {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[command(flatten)]
        eval: Eval,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one random instance file.
    Gen {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which instance of the seeded sequence to produce.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Eval {
    /// Average over every order (the default).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Average over this many random orders instead.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Eval {
    fn mode(&self) -> EvalMode {
        match self.samples {
            Some(samples) => EvalMode::Sampled { samples, seed: self.seed },
            None => EvalMode::Exact,
        }
    }
}

#[derive(Args)]
struct Shape {
    /// Number of buyers.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Edge probability.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Units on sale.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Sell this many distinct items instead of `k` units.
    #[arg(long)]
    items: Option<usize>,
    #[arg(long, default_value_t = 1)]
    lo: i64,
    #[arg(long, default_value_t = 100)]
    hi: i64,
}

impl Shape {
    fn config(&self, count: usize, seed: u64, mode: EvalMode) -> ExperimentConfig {
        ExperimentConfig {
            count,
            n: self.n,
            p: self.p,
            lo: self.lo,
            hi: self.hi,
            k: self.k,
            items: self.items,
            seed,
            mode,
        }
    }
}

fn print(value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { instance, mechanism, order, eval } => {
            let profile = load_instance(&instance)?.truthful_profile()?;
            let value = match (mechanism, order) {
                (Mechanism::Vcg, _) => vcg(&profile)?.to_json(profile.items()),
                (_, Some(order)) => {
                    let outcome = run_order(&profile, &Order::parse(&order)?)?;
                    outcome.to_json(profile.items())
                }
                (_, None) => expected_outcome(&profile, mechanism, eval.mode())?.to_json(profile.items()),
            };
            print(&value)?;
            Ok(true)
        }
        Command::Shapley { instance, eval } => {
            let profile = load_instance(&instance)?.truthful_profile()?;
            let report = match eval.mode() {
                EvalMode::Sampled { samples, seed } => shapley_sampled(&profile, samples, seed)?,
                _ => shapley_exact(&profile)?,
            };
            print(&report.to_json())?;
            Ok(true)
        }
        Command::Audit { instance: path, mechanism, checks, eval } => {
            let instance = load_instance(&path)?;
            let checks = CheckKind::parse_list(&checks)?;
            let report = run_audit(&instance, &path.display().to_string(), mechanism, &checks, eval.mode())?;
            print(&report.to_json())?;
            Ok(report.pass())
        }
        Command::Experiment { shape, count, eval, out } => {
            let config = shape.config(count, eval.seed, eval.mode());
            let result = run_experiment(&config)?;
            match out {
                Some(path) => write_csv(&result.rows, BufWriter::new(File::create(path)?))?,
                None => write_csv(&result.rows, io::stdout().lock())?,
            }
            let s = &result.summary;
            let show = |r: &Option<rational::Rational>| r.as_ref().map_or("-".to_string(), rational::format);
            eprintln!(
                "instances {} rows {} min ratio {} max ratio {} all above 2/5 {}",
                s.instances,
                s.rows,
                show(&s.min_ratio),
                show(&s.max_ratio),
                s.all_above_two_fifths
            );
            eprintln!(
                "fairness failures {} unsold failures {} revenue failures {} errors {}",
                s.fairness_failures,
                s.unsold_failures,
                s.revenue_failures,
                s.errors.len()
            );
            for (index, message) in &s.errors {
                eprintln!("instance {index}: {message}");
            }
            Ok(s.pass())
        }
        Command::Gen { shape, seed, index, out } => {
            let config = shape.config(index as usize + 1, seed, EvalMode::Exact);
            save_instance(&gen_instance(&config, index)?, &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
