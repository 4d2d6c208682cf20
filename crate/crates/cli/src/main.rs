use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldpc_subshift::experiments::{read_config, run, write_run, Experiment, ExperimentConfig};
use ldpc_subshift::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_THRESHOLD: u8 = 4;

/// Experiments on random LDPC parity-check codes over free products of cyclic groups.
#[derive(Parser, Debug)]
#[command(name = "ldpc-subshift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized code entropy (1/n) log|X_σ| against (1-d/k) log 2.
    EntropyValue(Params),
    /// The codeword growth curve G_cw and its small-density asymptotic.
    GrowthCurve(Params),
    /// Emptiness of a weight band of (approximate) codewords.
    Shattering(Params),
    /// Fraction of r-proper vertices and edge-marginal TV.
    ProperFraction(Params),
    /// Projected entropy on a separated vertex set.
    PropertyM(Params),
    /// Double covers in ker Hᵀ for the permutation and uniform models.
    Contiguity(Params),
    /// Exact first-moment counts by weight.
    ExpectedCount(Params),
    /// Near-cancellation search in conditioned samples.
    NearCancellation(Params),
    /// Re-run the configuration stored in a config.json.
    Replay {
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct Params {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Upper band edge or cancellation scale (default depends on the experiment).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Uniform codewords averaged per trial for edge-marginal TV.
    #[arg(long)]
    codeword_samples: Option<usize>,
    /// Density of the separated set or of the conditioned vertex set.
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    /// Grid intervals for the growth curve.
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Run directory; defaults to <output root>/<experiment>-<config hash>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root for run directories when --out is not given.
    #[arg(long, env = "LDPC_SUBSHIFT_OUTPUT_ROOT", default_value = "runs")]
    output_root: PathBuf,
    /// Show entropies in bits on stdout (files stay in nats).
    #[arg(long)]
    bits: bool,
}

impl Params {
    fn into_config(self, experiment: Experiment) -> (ExperimentConfig, OutputArgs) {
        let mut c = ExperimentConfig::defaults(experiment);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(d, k, n, r, eps, eta, trials, seed, codeword_samples, density, s_max, grid);
        if self.delta.is_some() {
            c.delta = self.delta;
        }
        (c, self.output)
    }
}

/// Rescales every `*_nats` number for display.
fn to_bits(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            let keys: Vec<String> = map.keys().cloned().collect();
            for key in keys {
                let mut v = map.remove(&key).expect("key present");
                to_bits(&mut v);
                match (key.strip_suffix("_nats"), v.as_f64()) {
                    (Some(stem), Some(x)) => {
                        map.insert(format!("{stem}_bits"), serde_json::json!(x / LN_2));
                    }
                    _ => {
                        map.insert(key, v);
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(to_bits),
        _ => {}
    }
}

fn execute(config: ExperimentConfig, output: OutputArgs) -> Result<bool, Error> {
    let result = run(&config)?;
    let dir = output.out.unwrap_or_else(|| output.output_root.join(format!("{}-{}", config.experiment, config.hash())));
    write_run(&dir, &config, &result)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut shown = result.summary.clone();
    if output.bits {
        to_bits(&mut shown);
    }
    println!("{}", serde_json::to_string_pretty(&shown)?);
    match result.passed {
        Some(true) => println!("threshold: pass"),
        Some(false) => println!("threshold: FAIL"),
        None => {}
    }
    println!("wrote {}", dir.display());
    Ok(result.passed != Some(false))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, output) = match cli.command {
        Command::EntropyValue(p) => p.into_config(Experiment::EntropyValue),
        Command::GrowthCurve(p) => p.into_config(Experiment::GrowthCurve),
        Command::Shattering(p) => p.into_config(Experiment::Shattering),
        Command::ProperFraction(p) => p.into_config(Experiment::ProperFraction),
        Command::PropertyM(p) => p.into_config(Experiment::PropertyM),
        Command::Contiguity(p) => p.into_config(Experiment::Contiguity),
        Command::ExpectedCount(p) => p.into_config(Experiment::ExpectedCount),
        Command::NearCancellation(p) => p.into_config(Experiment::NearCancellation),
        Command::Replay { config, output } => match read_config(&config) {
            Ok(c) => (c, output),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };
    match execute(config, output) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_THRESHOLD),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidParameter(_) | Error::Json(_) => EXIT_CONFIG,
                Error::Resource(_) => EXIT_RESOURCE,
                _ => 1,
            })
        }
    }
}
