use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gc3_core::experiments::{
    check_case, cmd_bounds, cmd_oracle_check, cmd_simulate, cmd_sweep, CaseFailure, ExperimentConfig,
    Format, GaussianElimination, RowWriter,
};
use gc3_core::protocol::Scheme;

#[derive(Parser)]
#[command(name = "gc3", version, about = "Two-step graph-code data collection: simulation and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of the block error probability for each N.
    Simulate(RunArgs),
    /// Evaluate the bound formulas only.
    Bounds(RunArgs),
    /// Simulate over increasing N and summarise the trend.
    Sweep(RunArgs),
    /// Compare the decoder against an exhaustive oracle on small graphs.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Network sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_prime: Option<f64>,
    #[arg(long)]
    p_ch: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    e1: Option<f64>,
    #[arg(long)]
    e2: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// gc3, naive, or both comma separated.
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<Scheme>>,
    /// Sample one graph per N and reuse it for every trial.
    #[arg(long)]
    fixed_graph: bool,
    #[arg(long)]
    p_tar: Option<f64>,
    #[arg(long)]
    d_cap: Option<f64>,
    #[arg(long)]
    e_cap: Option<f64>,
    /// Broadcast rounds; overrides the derived value.
    #[arg(long = "t")]
    rounds: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 1000)]
    cases: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write failing cases as JSON (stderr if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-check cases from a file previously written by a failing run.
    #[arg(long)]
    replay: Option<PathBuf>,
}

enum Outcome {
    /// Usage, configuration or I/O problem; exit code 1.
    Error(anyhow::Error),
    /// Decoder disagreed with the oracle; exit code 2.
    Mismatch,
}

impl<E: Into<anyhow::Error>> From<E> for Outcome {
    fn from(e: E) -> Self {
        Outcome::Error(e.into())
    }
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(n_list, epsilon, c, c_prime, p_ch, eta, e1, e2, trials, seed, scheme);
        if self.fixed_graph {
            cfg.fixed_graph = true;
        }
        for (slot, v) in [
            (&mut cfg.p_tar, self.p_tar),
            (&mut cfg.d_cap, self.d_cap),
            (&mut cfg.e_cap, self.e_cap),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
        if self.rounds.is_some() {
            cfg.rounds = self.rounds;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run_rows(args: &RunArgs, which: &Command) -> Result<(), Outcome> {
    let cfg = args.config()?;
    let mut writer = RowWriter::new(open_out(&args.out)?, args.format);
    let emit = |row: &_| writer.push(row);
    let extra = match which {
        Command::Simulate(_) => {
            cmd_simulate(&cfg, emit)?;
            None
        }
        Command::Bounds(_) => {
            let out = cmd_bounds(&cfg, emit)?;
            eprint!("{out}");
            Some(serde_json::json!({ "gap": out.gap, "sparseness": out.sparseness }))
        }
        Command::Sweep(_) => {
            let out = cmd_sweep(&cfg, emit)?;
            for s in &out.summaries {
                eprintln!("{s}");
            }
            Some(serde_json::to_value(&out.summaries)?)
        }
        Command::OracleCheck(_) => unreachable!(),
    };
    writer.finish(extra)?;
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<(), Outcome> {
    let failures: Vec<CaseFailure> = match &args.replay {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cases: Vec<CaseFailure> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let mut still = Vec::new();
            for f in cases {
                match check_case(&f.case, &GaussianElimination) {
                    Some(m) => {
                        eprintln!("case {} (seed {}): {m:?}", f.index, f.seed);
                        still.push(CaseFailure { mismatch: m, ..f });
                    }
                    None => eprintln!("case {} (seed {}): agrees", f.index, f.seed),
                }
            }
            still
        }
        None => {
            let report = cmd_oracle_check(args.n_max, args.cases, args.seed, &GaussianElimination)?;
            println!("{report}");
            report.failures
        }
    };
    if failures.is_empty() {
        return Ok(());
    }
    let json = serde_json::to_string_pretty(&failures)?;
    match &args.out {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("{json}"),
    }
    Err(Outcome::Mismatch)
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
    let result = match &cli.command {
        Command::OracleCheck(args) => run_oracle(args),
        cmd @ (Command::Simulate(a) | Command::Bounds(a) | Command::Sweep(a)) => run_rows(a, cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Outcome::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Outcome::Mismatch) => {
            eprintln!("oracle mismatch");
            ExitCode::from(2)
        }
    }
}
