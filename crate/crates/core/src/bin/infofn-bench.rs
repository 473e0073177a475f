use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use infofn::bench::{parse_configs, run_benchmark, BenchConfig};

/// Measures per-call overhead of flow contracts and argument constraints.
#[derive(Parser, Debug)]
#[command(name = "infofn-bench", version)]
struct Cli {
    /// Timed calls per configuration.
    #[arg(long, default_value_t = 30)]
    trials: usize,
    /// Seconds the shared body sleeps; 0 isolates decoration overhead.
    #[arg(long = "sleep-s", default_value_t = 0.1)]
    sleep_s: f64,
    /// Comma-separated subset of NoDeco,FlowConf,ArgConf,FlowConf+ArgConf.
    #[arg(long, default_value = "NoDeco,FlowConf,ArgConf,FlowConf+ArgConf")]
    configs: String,
    /// Unrecorded calls before timing starts.
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    /// CSV file receiving every trial.
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let configs = match parse_configs(&cli.configs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("infofn-bench: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = BenchConfig {
        trials: cli.trials,
        sleep_s: cli.sleep_s,
        configs,
        warmup: cli.warmup,
        output_path: Some(cli.out.clone()),
    };
    match run_benchmark(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary_table());
            eprintln!("wrote {} records to {}", outcome.records.len(), cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("infofn-bench: {e}");
            ExitCode::FAILURE
        }
    }
}
