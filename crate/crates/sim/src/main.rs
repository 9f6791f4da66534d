use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riskbandit_sim::config::{preset, RunConfig, PRESETS};
use riskbandit_sim::experiment::{prepare, resolve_output_dir, run_experiment, RunOptions};
use riskbandit_sim::{formats, plot, Result, SimError};

/// Mean-variance linear bandit simulator.
#[derive(Parser)]
#[command(name = "riskbandit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-seed and aggregate regret CSVs.
    Run(RunArgs),
    /// Render an aggregate CSV as an SVG plot.
    Plot {
        #[arg(long = "in", value_name = "CSV")]
        input: PathBuf,
        #[arg(long = "out", value_name = "SVG")]
        output: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
    /// Check a config without running it.
    Validate {
        #[command(flatten)]
        source: Source,
        /// Print the resolved config as JSON.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in figure setup.
    #[arg(long, value_parser = PRESETS)]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Number of seeds (replaces the config's count).
    #[arg(long)]
    seeds: Option<usize>,
    /// Override the horizon.
    #[arg(long)]
    horizon: Option<u64>,
    /// Output directory (default: config `output_dir`, then $RISKBANDIT_OUT, then results/<label>).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write every trajectory as CSV plus JSON sidecar.
    #[arg(long)]
    save_trajectories: bool,
    /// Also write the G-optimal design of the full action set.
    #[arg(long)]
    dump_design: bool,
    /// Also render regret.svg.
    #[arg(long)]
    plot: bool,
}

fn load(source: &Source) -> Result<RunConfig> {
    match (&source.config, &source.preset) {
        (Some(path), _) => RunConfig::from_path(path),
        (None, Some(name)) => preset(name),
        (None, None) => Err(SimError::Invalid("one of --config or --preset is required".into())),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load(&args.source)?;
    if let Some(n) = args.seeds {
        cfg = cfg.with_seed_count(n)?;
    }
    if let Some(t) = args.horizon {
        cfg.horizon = t;
    }
    let out_dir = resolve_output_dir(args.out, &cfg);
    let opts = RunOptions {
        jobs: args.jobs,
        out_dir: Some(out_dir.clone()),
        save_trajectories: args.save_trajectories,
        dump_design: args.dump_design,
        plot: args.plot,
    };
    let out = run_experiment(&cfg, &opts)?;
    let t = cfg.horizon;
    println!("{} K={} T={t} seeds={} -> {}", out.prepared.label, out.prepared.instance.num_actions(), out.prepared.seeds.len(), out_dir.display());
    for r in &out.reports {
        let last = r.mean.len() - 1;
        println!("  {:<12} regret(T) = {:.3} ± {:.3}", r.meta.policy, r.mean[last], r.stderr[last]);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Plot { input, output, title } => formats::read_aggregate_csv(&input).and_then(|rows| {
            let title = title.unwrap_or_else(|| rows.first().map(|r| r.scenario.clone()).unwrap_or_default());
            let svg = plot::render(&rows, &title)?;
            formats::write_bytes(&output, svg.as_bytes())
        }),
        Command::Validate { source, print } => load(&source).and_then(|cfg| {
            let prep = prepare(&cfg)?;
            if print {
                println!("{}", cfg.to_json_pretty());
            } else {
                println!(
                    "ok: {} d={} K={} T={} policies={} seeds={} checkpoints={}",
                    prep.label,
                    prep.instance.dim(),
                    prep.instance.num_actions(),
                    cfg.horizon,
                    prep.policies.len(),
                    prep.seeds.len(),
                    prep.checkpoints.len()
                );
            }
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
