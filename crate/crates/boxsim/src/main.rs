//! Command-line front end: `boxsim run` and `boxsim sweep`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use boxsim::runner::{load_config, run_pipeline, sweep, RunManifest, SimConfig};

#[derive(Parser)]
#[command(
    name = "boxsim",
    about = "Wave-packet decoherence in an infinite square well",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline once and write CSV/JSON outputs.
    Run(CommonArgs),
    /// Run the pipeline for each value of one numeric config field.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file: flat `key = value` lines, `#` comments.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config key; repeatable. Example: --set t=0.25
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (same as --set output_dir=DIR).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Skip the decoherence factor and diagonalize the pure state.
    #[arg(long)]
    no_decoherence: bool,

    /// Run the forward/backward evolution consistency check.
    #[arg(long)]
    reversal_check: bool,

    /// How many leading eigenvectors to dump as eigvec_<k>.csv.
    #[arg(long, value_name = "K")]
    dump_top_k: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Config field to vary (numeric fields only).
    #[arg(long, value_name = "KEY")]
    axis: String,

    /// Comma-separated values for the axis.
    #[arg(long, value_name = "V1,V2,...", value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

fn build_config(args: &CommonArgs) -> boxsim::Result<SimConfig> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    for pair in &args.set {
        let Some((k, v)) = pair.split_once('=') else {
            return Err(boxsim::Error::Config(format!(
                "--set expects KEY=VALUE, got {pair:?}"
            )));
        };
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(out) = &args.out {
        overrides.push(("output_dir".into(), out.display().to_string()));
    }
    if args.no_decoherence {
        overrides.push(("no_decoherence".into(), "true".into()));
    }
    if args.reversal_check {
        overrides.push(("reversal_check".into(), "true".into()));
    }
    if let Some(k) = args.dump_top_k {
        overrides.push(("dump_top_k".into(), k.to_string()));
    }
    load_config(args.config.as_deref(), &overrides)
}

fn print_summary(m: &RunManifest) {
    println!(
        "n_points={} t={} d={}{}",
        m.config.n_points,
        m.config.t,
        m.config.d,
        if m.config.no_decoherence {
            " (decoherence off)"
        } else {
            ""
        }
    );
    println!(
        "trace={:.12} purity={:.6e} effective_rank={:.4}",
        m.trace, m.purity, m.effective_rank
    );
    if let Some(r) = m.reversal_fidelity {
        println!("reversal_fidelity={:.15}", r);
    }
    match m.mean_node_spacing {
        Some(s) => println!("nodes={} mean_spacing={:.6}", m.n_nodes, s),
        None => println!(
            "nodes={}{}",
            m.n_nodes,
            if m.pre_spreading {
                " (pre-spreading regime)"
            } else {
                ""
            }
        ),
    }
    println!(
        "lambda_dB={:.6} weight_fraction_below_lambda_dB={:.4} weighted_median_width={:.6}",
        m.lambda_db, m.weight_fraction_below_lambda_db, m.weighted_median_width
    );
    println!(
        "wrote {}",
        m.config.output_dir.join("manifest.json").display()
    );
}

fn run(cli: Cli) -> boxsim::Result<()> {
    match cli.cmd {
        Cmd::Run(args) => {
            let cfg = build_config(&args)?;
            let manifest = run_pipeline(&cfg)?;
            print_summary(&manifest);
            Ok(())
        }
        Cmd::Sweep(args) => {
            let cfg = build_config(&args.common)?;
            let items = sweep(&cfg, &args.axis, &args.values)?;
            for item in &items {
                match &item.outcome {
                    Ok(m) => println!(
                        "{}={} effective_rank={:.4} weight_fraction_below_lambda_dB={:.4} -> {}",
                        args.axis,
                        item.value,
                        m.effective_rank,
                        m.weight_fraction_below_lambda_db,
                        item.directory.display()
                    ),
                    Err(e) => println!("{}={} FAILED: {e}", args.axis, item.value),
                }
            }
            println!(
                "wrote {}",
                cfg.output_dir.join("sweep_summary.csv").display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
