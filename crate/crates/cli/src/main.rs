use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use memub::bounds::BoundReport;
use memub::io::read_state;
use memub::measurement::ObservablePair;
use memub::optimizer::OptimizerConfig;
use memub::scenario::{
    csv_string, evaluate_state, format_sig9, parse_scenario, run_scenario, write_csv, DiscordSide,
    ScenarioConfig, ScenarioKind, StateReport, SweepRow,
};
use memub::selftest::{run_selftest, Depth, SelftestReport};
use memub::state::{B, C};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Entropic uncertainty bounds with quantum memory.
#[derive(Parser)]
#[command(name = "memub", version)]
struct Cli {
    /// Optimizer seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Optimizer restarts (entanglement of assistance uses twice this).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Print a JSON report to standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Sweep {
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = memub::scenario::DEFAULT_STEPS)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum Memory {
    B,
    C,
}

#[derive(Subcommand)]
enum Command {
    /// W-class pure state sweep over theta.
    Fig2 {
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        phi: f64,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Rank-two AB state times a diagonal C, swept over theta.
    Fig3 {
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p: f64,
        /// Subsystem measured in the discord.
        #[arg(long, value_enum, default_value = "b")]
        discord_side: Side,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// GHZ state sweep over alpha.
    Fig4 {
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Bounds for a state read from a JSON file.
    Bound {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        qbasis: String,
        #[arg(long)]
        rbasis: String,
        /// Memory party for tripartite states.
        #[arg(long, value_enum, default_value = "b")]
        memory: Memory,
    },
    /// Run the randomized invariant suites.
    Selftest {
        /// 1000 draws per suite instead of 100.
        #[arg(long)]
        full: bool,
    },
    /// Run a scenario described by a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output path in the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    SelftestFailed,
}

impl Cli {
    fn apply(&self, optimizer: &mut OptimizerConfig) {
        if let Some(seed) = self.seed {
            optimizer.seed = seed;
        }
        if let Some(restarts) = self.restarts {
            optimizer.restarts = restarts;
        }
    }
}

fn sweep_config(cli: &Cli, kind: ScenarioKind, sweep: &Sweep) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind);
    cfg.steps = sweep.steps;
    cfg.out = Some(sweep.out.clone());
    cli.apply(&mut cfg.optimizer);
    cfg
}

fn run_sweep(cli: &Cli, cfg: &ScenarioConfig) -> Result<()> {
    cfg.validate()?;
    let rows = run_scenario(cfg)?;
    match &cfg.out {
        Some(path) => write_csv(path, cfg.kind, &rows)?,
        None => print!("{}", csv_string(cfg.kind, &rows)),
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&sweep_json(cfg, &rows))?);
    } else if let Some(path) = &cfg.out {
        print_sweep_summary(&rows, path);
    }
    Ok(())
}

fn sweep_json(cfg: &ScenarioConfig, rows: &[SweepRow]) -> serde_json::Value {
    json!({
        "config": cfg,
        "columns": cfg.kind.header().split(',').collect::<Vec<_>>(),
        "rows": rows,
    })
}

fn print_sweep_summary(rows: &[SweepRow], path: &Path) {
    let max_after = rows.iter().map(|r| r.after).fold(f64::NEG_INFINITY, f64::max);
    let min_after = rows.iter().map(|r| r.after).fold(f64::INFINITY, f64::min);
    println!(
        "wrote {} rows to {} (after-bound range {} .. {})",
        rows.len(),
        path.display(),
        format_sig9(min_after),
        format_sig9(max_after)
    );
}

fn print_report(label: &str, report: &BoundReport) {
    let parts: Vec<String> = report
        .components
        .iter()
        .map(|(c, v)| format!("{} = {}", serde_json::to_value(c).unwrap().as_str().unwrap(), format_sig9(*v)))
        .collect();
    println!("{label}: {}  ({})", format_sig9(report.bound), parts.join(", "));
}

fn bound(cli: &Cli, state: &Path, qbasis: &str, rbasis: &str, memory: Memory) -> Result<()> {
    let file = read_state(state)?;
    let pair = ObservablePair::named(qbasis, rbasis)?;
    let mut optimizer = OptimizerConfig::default();
    cli.apply(&mut optimizer);
    optimizer.validate()?;
    let memory = match memory {
        Memory::B => B,
        Memory::C => C,
    };
    let report: StateReport = evaluate_state(&file, &pair, memory, &optimizer)?;
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    println!("dims: {:?}", report.dims);
    println!("complementarity c: {}", format_sig9(pair.c()));
    println!("uncertainty sum: {}", format_sig9(report.uncertainty_sum));
    print_report("memory bound", &report.memory);
    if let Some((after, ci)) = &report.concentrated {
        print_report("after concentration", after);
        println!(
            "concentrated information: {} ({})",
            format_sig9(ci.value),
            serde_json::to_value(ci.source)?.as_str().unwrap_or_default()
        );
    }
    Ok(())
}

fn selftest(cli: &Cli, full: bool) -> Result<Outcome> {
    let depth = if full { Depth::Full } else { Depth::Quick };
    let report: SelftestReport = run_selftest(depth, cli.seed.unwrap_or(0));
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for s in &report.suites {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            print!("{status} {:<22} draws={:<5} failures={}", s.name, s.draws, s.failures);
            if !s.passed() {
                print!(" worst_excess={:e}", s.worst_excess);
                if let Some(e) = &s.first_error {
                    print!(" error: {e}");
                }
            }
            println!();
        }
        let passed = report.suites.iter().filter(|s| s.passed()).count();
        println!("{passed}/{} suites passed", report.suites.len());
    }
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::SelftestFailed
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Fig2 { phi, sweep } => {
            let mut cfg = sweep_config(cli, ScenarioKind::Fig2, sweep);
            cfg.phi = *phi;
            run_sweep(cli, &cfg)?;
        }
        Command::Fig3 { p, discord_side, sweep } => {
            let mut cfg = sweep_config(cli, ScenarioKind::Fig3, sweep);
            cfg.p = *p;
            cfg.discord_side = match discord_side {
                Side::A => DiscordSide::A,
                Side::B => DiscordSide::B,
            };
            run_sweep(cli, &cfg)?;
        }
        Command::Fig4 { sweep } => {
            run_sweep(cli, &sweep_config(cli, ScenarioKind::Fig4, sweep))?;
        }
        Command::Bound { state, qbasis, rbasis, memory } => bound(cli, state, qbasis, rbasis, *memory)?,
        Command::Selftest { full } => return selftest(cli, *full),
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = parse_scenario(&text).with_context(|| config.display().to_string())?;
            if out.is_some() {
                cfg.out = out.clone();
            }
            cli.apply(&mut cfg.optimizer);
            run_sweep(cli, &cfg)?;
        }
    }
    Ok(Outcome::Ok)
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
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::SelftestFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
