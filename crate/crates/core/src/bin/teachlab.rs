//! Command-line front end; see `teachlab --help`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use teachlab::budget::Budget;
use teachlab::ccls::load_ccls;
use teachlab::experiment::{
    cmd_experiment, cmd_gen, cmd_greedy, cmd_verify, exit_code, Construction, ExperimentConfig, SuiteOptions,
};
use teachlab::oracles::{crosscheck_subclasses, ts_min_search, vc_dimension, TsMinMode, VcMode};
use teachlab::{Error, Result};

#[derive(Parser)]
#[command(name = "teachlab", version, about = "Greedy teaching sets on adversarial concept classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a class file, or print analytic counts.
    Gen(GenArgs),
    /// Run the greedy algorithm on a class file.
    Greedy {
        #[arg(long)]
        class: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run verification suites on a class file.
    Verify {
        #[arg(long)]
        class: PathBuf,
        /// Comma-separated or repeated suite names.
        #[arg(long = "suite", value_delimiter = ',', required = true)]
        suites: Vec<String>,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        vc_size: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// VC dimension, exact or by seeded sampling.
    Vc {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, value_enum)]
        mode: VcArg,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Search for a small teaching set of some concept.
    Tsmin {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, value_enum)]
        mode: TsArg,
        #[arg(long, default_value_t = 2)]
        cap: usize,
    },
    /// Compare the fast best-restriction scan with the brute-force oracle.
    Crosscheck {
        #[arg(long)]
        class: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Generate, run greedy and verify in one go; writes a JSON report.
    Experiment {
        /// JSON configuration; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
        #[arg(long)]
        greedy_k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VcArg {
    Exact,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum TsArg {
    Exhaustive,
    Structured,
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(short)]
    k: Option<usize>,
    /// Comma-separated widths, arbitrary precision.
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<BigUint>>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    force: bool,
    /// Bit-operation budget, e.g. 1e11; overrides TEACHLAB_BUDGET.
    #[arg(long)]
    budget: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    analytic_only: bool,
}

impl ClassArgs {
    fn apply(self, base: Option<ExperimentConfig>) -> Result<ExperimentConfig> {
        let mut c = match (base, &self.construction) {
            (Some(mut c), Some(name)) => {
                c.construction = name.parse()?;
                c
            }
            (Some(c), None) => c,
            (None, Some(name)) => ExperimentConfig::new(name.parse::<Construction>()?),
            (None, None) => return Err(Error::Usage("--construction is required".into())),
        };
        if self.levels.is_some() {
            c.levels = self.levels;
        }
        if self.k.is_some() {
            c.k = self.k;
        }
        if self.widths.is_some() {
            c.widths = self.widths;
            c.schedule = None;
        }
        if self.schedule.is_some() {
            c.schedule = self.schedule;
            c.widths = None;
        }
        c.force |= self.force;
        if self.budget.is_some() {
            c.budget = self.budget;
        }
        Ok(c)
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let budget = Budget::from_env()?;
    match cli.command {
        Command::Gen(args) => {
            let mut config = args.class.apply(None)?;
            config.class_out = args.out;
            // counts go out first so a budget refusal still reports them
            print_json(&config.analytic()?)?;
            let generated = cmd_gen(&config, args.analytic_only)?;
            if let Some(class) = generated.class {
                eprintln!("{} points, {} concepts", class.domain_size(), class.len());
            }
            Ok(true)
        }
        Command::Greedy { class, k, trace } => {
            print_json(&cmd_greedy(&class, k, trace.as_deref(), &budget)?)?;
            Ok(true)
        }
        Command::Verify { class, suites, k, seed, vc_size, samples, trials } => {
            let opts = SuiteOptions { k, seed, vc_size, vc_samples: samples, crosscheck_trials: trials, budget };
            let outcomes = cmd_verify(&class, &suites, &opts)?;
            print_json(&outcomes)?;
            Ok(outcomes.iter().all(|o| o.passed))
        }
        Command::Vc { class, mode, size, samples, seed } => {
            let class = load_ccls(&class)?;
            let mode = match mode {
                VcArg::Exact => VcMode::Exact,
                VcArg::Sample => VcMode::Sample {
                    size: size.ok_or_else(|| Error::Usage("--size is required when sampling".into()))?,
                    samples,
                    seed,
                },
            };
            let report = vc_dimension(&class, mode, &budget)?;
            print_json(&report)?;
            Ok(report.sample.as_ref().is_none_or(|s| s.shattered_found == 0))
        }
        Command::Tsmin { class, mode, cap } => {
            let class = load_ccls(&class)?;
            let mode = match mode {
                TsArg::Exhaustive => TsMinMode::Exhaustive { cap },
                TsArg::Structured => TsMinMode::Structured,
            };
            let report = ts_min_search(&class, mode, &budget)?;
            print_json(&report)?;
            Ok(report.best.is_some())
        }
        Command::Crosscheck { class, k, trials, seed } => {
            let report = crosscheck_subclasses(&load_ccls(&class)?, k, trials, seed, 200, &budget)?;
            print_json(&report)?;
            Ok(report.passed())
        }
        Command::Experiment { config, class, suites, greedy_k, seed, trace, report, timings } => {
            let base = config.map(ExperimentConfig::from_json_file).transpose()?;
            let mut config = class.apply(base)?;
            if !suites.is_empty() {
                config.suites = suites;
            }
            if greedy_k.is_some() {
                config.greedy_k = greedy_k;
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            if trace.is_some() {
                config.trace_out = trace;
            }
            if report.is_some() {
                config.report_out = report;
            }
            config.timings |= timings;
            let report = cmd_experiment(&config)?;
            print!("{}", report.to_json());
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
