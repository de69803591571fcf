use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kdknap::harness::{gap_report, oracle_budget, run_suite, solve_report, GapOptions, Method, SolveOptions, Suite};
use kdknap::instance::{generate_random, parse_instance, serialize_instance, GenParams, KnapsackInstance};
use kdknap::rational::parse;
use kdknap::{Error, Result, Sense};

#[derive(Parser)]
#[command(name = "kdknap", version, about = "Exact LP relaxations for k-dimensional knapsack")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "packing")]
        sense: SenseArg,
        #[arg(long, default_value_t = 0)]
        min_weight: u64,
        #[arg(long, default_value_t = 9)]
        max_weight: u64,
        #[arg(long, default_value_t = 1)]
        min_cost: u64,
        #[arg(long, default_value_t = 9)]
        max_cost: u64,
        #[arg(long, default_value_t = 1)]
        min_bound: u64,
        #[arg(long, default_value_t = 3)]
        max_bound: u64,
        #[arg(long, default_value_t = 0.5)]
        tightness: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one pipeline and print its report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        gamma: Option<u64>,
        /// Accuracy as a rational `p/q`; sets gamma when gamma is not given.
        #[arg(long)]
        epsilon: Option<String>,
        /// Solve per-guess LPs on the thread pool.
        #[arg(long)]
        parallel: bool,
        /// Include the per-guess trace (ptas only).
        #[arg(long)]
        trace: bool,
    },
    /// Integer optimum, naive LP and hull LP values for a list of gammas.
    Gap {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        gammas: Vec<u64>,
        /// Skip the cost-free LP.
        #[arg(long)]
        no_costfree: bool,
        /// Add wall-clock timings to the report.
        #[arg(long)]
        timings: bool,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Directory for a shrunk counterexample.
        #[arg(long, default_value = ".")]
        dump_dir: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SenseArg {
    Packing,
    Covering,
}

fn read_instance(path: &PathBuf) -> Result<KnapsackInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

fn print_json(v: &serde_json::Value) {
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Gen {
            k,
            n,
            seed,
            sense,
            min_weight,
            max_weight,
            min_cost,
            max_cost,
            min_bound,
            max_bound,
            tightness,
            out,
        } => {
            let params = GenParams {
                k,
                n,
                weights: (min_weight, max_weight),
                costs: (min_cost, max_cost),
                bounds: (min_bound, max_bound),
                sense: match sense {
                    SenseArg::Packing => Sense::Packing,
                    SenseArg::Covering => Sense::Covering,
                },
                tightness,
            };
            let text = serialize_instance(&generate_random(&params, seed)?) + "\n";
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                None => {
                    let _ = std::io::stdout().lock().write_all(text.as_bytes());
                }
            }
            Ok(0)
        }
        Command::Solve { instance, method, gamma, epsilon, parallel, trace } => {
            let inst = read_instance(&instance)?;
            let epsilon = epsilon
                .map(|s| parse(&s).ok_or_else(|| Error::InvalidParams(format!("epsilon {s:?} is not a rational"))))
                .transpose()?;
            let opts = SolveOptions { gamma, epsilon, parallel, trace, budget: oracle_budget()? };
            print_json(&solve_report(&inst, method, &opts)?);
            Ok(0)
        }
        Command::Gap { instance, gammas, no_costfree, timings } => {
            let inst = read_instance(&instance)?;
            let opts = GapOptions { gammas, budget: oracle_budget()?, costfree: !no_costfree, timings };
            let report = gap_report(&inst, &opts)?;
            print_json(&report.to_json());
            if !report.all_hold() {
                eprintln!("error: a gap inequality failed");
                return Ok(5);
            }
            Ok(0)
        }
        Command::Verify { suite, seed, count, dump_dir } => {
            let report = run_suite(suite, seed, count, oracle_budget()?)?;
            let mut summary = report.to_json();
            if let Some((inst, message)) = &report.counterexample {
                let path = dump_dir.join(format!("counterexample-{}-{seed}.json", suite.name()));
                fs::write(&path, serialize_instance(inst) + "\n")
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                eprintln!("counterexample ({message}) written to {}", path.display());
                summary["counterexample"] = serde_json::json!(path.display().to_string());
            }
            print_json(&summary);
            Ok(if report.ok() { 0 } else { 5 })
        }
    }
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
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
