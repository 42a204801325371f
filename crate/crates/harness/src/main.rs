use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use synccount_adversary::Strategy;
use synccount_harness::verify::{run_suite, Suite};
use synccount_harness::{build, run_sweep, ExperimentConfig, HarnessError, Mode};

#[derive(Parser)]
#[command(name = "synccount", version, about = "Self-stabilising Byzantine counters: build, run, sweep, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the construction tree, bounds, state bits and pulls per round.
    Build {
        n: usize,
        f: usize,
        c: u32,
        #[command(flatten)]
        construction: ConstructionArgs,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// One execution: a trace file and a one-row metrics table.
    Run(RunArgs),
    /// Many seeds: one trace per run and one metrics row per run.
    Sweep(RunArgs),
    /// Run an invariant suite.
    Verify {
        suite: String,
        /// Where witness traces of failures go.
        #[arg(long, default_value = "out/witness")]
        out: PathBuf,
    },
}

#[derive(Args, Default)]
struct ConstructionArgs {
    #[arg(long)]
    mode: Option<Mode>,
    /// Silencing window.
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    allow_short_kappa: bool,
    #[arg(long)]
    gamma: Option<f64>,
    /// Error exponent of the sampling guarantee.
    #[arg(long)]
    k: Option<u32>,
    /// Samples per vote (K).
    #[arg(long = "samples", short = 'K')]
    samples: Option<u32>,
    #[arg(long)]
    master_seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective configuration with all defaults and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    f: Option<usize>,
    #[arg(long)]
    c: Option<u32>,
    #[command(flatten)]
    construction: ConstructionArgs,
    #[arg(long)]
    adversary: Option<Strategy>,
    #[arg(long)]
    oblivious: bool,
    #[arg(long)]
    first_seed: Option<u64>,
    #[arg(long)]
    seeds: Option<u64>,
    /// Rounds to simulate; 0 picks bound plus guard band.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    allow_short_horizon: bool,
    #[arg(long)]
    out: Option<String>,
    /// Skip writing trace files.
    #[arg(long)]
    no_traces: bool,
}

impl ConstructionArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let c = &mut cfg.construction;
        if let Some(m) = self.mode {
            c.mode = m;
        }
        c.kappa = self.kappa.unwrap_or(c.kappa);
        c.allow_short_kappa |= self.allow_short_kappa;
        c.gamma = self.gamma.unwrap_or(c.gamma);
        c.k = self.k.unwrap_or(c.k);
        c.samples = self.samples.unwrap_or(c.samples);
        c.master_seed = self.master_seed.unwrap_or(c.master_seed);
    }
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| HarnessError::Io { run: "config".into(), path: path.clone(), source })?;
                ExperimentConfig::from_toml(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let c = &mut cfg.construction;
        c.n = self.n.unwrap_or(c.n);
        c.f = self.f.unwrap_or(c.f);
        c.c = self.c.unwrap_or(c.c);
        self.construction.apply(&mut cfg);
        if let Some(s) = self.adversary {
            cfg.adversary.strategy = s;
        }
        cfg.adversary.oblivious |= self.oblivious;
        let r = &mut cfg.run;
        r.first_seed = self.first_seed.unwrap_or(r.first_seed);
        r.seeds = self.seeds.unwrap_or(r.seeds);
        r.horizon = self.horizon.unwrap_or(r.horizon);
        r.allow_short_horizon |= self.allow_short_horizon;
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        cfg.output.traces &= !self.no_traces;
        Ok(cfg)
    }
}

fn sweep(args: &RunArgs, single: bool) -> Result<ExitCode, HarnessError> {
    let mut cfg = args.config()?;
    if single {
        cfg.run.seeds = 1;
    }
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    let sweep = run_sweep(&cfg)?;
    let stabilised = sweep.rows.iter().filter(|r| r.within_bound).count();
    println!(
        "{} runs, horizon {}: {} stabilised within bound {}; metrics in {}",
        sweep.rows.len(),
        sweep.horizon,
        stabilised,
        sweep.rows.first().map_or(0, |r| r.bound),
        std::path::Path::new(&cfg.output.dir).join(synccount_harness::sweep::METRICS_FILE).display()
    );
    Ok(if sweep.all_within_bound() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main_inner(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Build { n, f, c, construction, json } => {
            let mut cfg = ExperimentConfig::default();
            cfg.construction.n = n;
            cfg.construction.f = f;
            cfg.construction.c = c;
            construction.apply(&mut cfg);
            let report = build(&cfg.construction)?.report();
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            } else {
                print!("{report}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => sweep(&args, true),
        Command::Sweep(args) => sweep(&args, false),
        Command::Verify { suite, out } => {
            let suite: Suite = suite.parse()?;
            let rep = run_suite(suite, &out)?;
            for note in &rep.notes {
                println!("  {note}");
            }
            for failure in &rep.failures {
                println!("  FAIL {failure}");
            }
            for w in &rep.witnesses {
                println!("  witness {}", w.display());
            }
            let verdict = if rep.passed() { "pass" } else { "FAIL" };
            println!("{}: {verdict} ({} checks, {} failures)", suite.name(), rep.checks, rep.failures.len());
            Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
