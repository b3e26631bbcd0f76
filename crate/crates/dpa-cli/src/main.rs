//! `dpa` — Monte Carlo harness for double-data-piling discriminant
//! analysis in the high-dimension low-sample-size regime.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use dpa::geometry::{fit_geometry, Regime};
use dpa::limits::{limit_report, score_summary};
use dpa::model::{make_setting, sample_pair, SettingId};
use dpa::DpaError;
use dpa_cli::{
    convergence_sweep, emit_records, emit_table, parse_alpha_grid, parse_rules, render_records,
    render_table, ridge_curve, run_experiment, ExperimentConfig, ModelSource, OutputFormat,
    RuleSpec,
};

#[derive(Parser)]
#[command(
    name = "dpa",
    about = "Monte Carlo experiments for HDLSS discriminant analysis under spiked covariance models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the sampling subcommands.
#[derive(Args, Clone)]
struct CommonOpts {
    /// Shipped setting id (I–X, or 1–10).
    #[arg(long, conflicts_with = "model_file")]
    setting: Option<String>,
    /// JSON file with a custom population pair.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Data dimension.
    #[arg(long, default_value_t = 10_000)]
    p: usize,
    /// Class-1 training size.
    #[arg(long, default_value_t = 20)]
    n1: usize,
    /// Class-2 training size.
    #[arg(long, default_value_t = 20)]
    n2: usize,
    /// Test observations per class.
    #[arg(long, default_value_t = 500)]
    n_test: usize,
    /// Monte Carlo repetitions.
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data splits for the SMDP rules.
    #[arg(long, default_value_t = 10)]
    k_splits: usize,
    /// Test-split size per class for the SMDP rules.
    #[arg(long, default_value_t = 6)]
    split_size: usize,
    /// Record wall-clock runtimes (breaks byte-identical reproducibility).
    #[arg(long, default_value_t = false)]
    record_runtime: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment over a set of classification rules.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated rules, e.g. "mdp,bmdp,prd:ahat,bprd:ahat1,smdp1".
        #[arg(long, default_value = "mdp,bmdp,prd:ahat,bprd:ahat")]
        rules: String,
    },
    /// Accuracy of the projected ridge rule over an α grid.
    RidgeCurve {
        #[command(flatten)]
        common: CommonOpts,
        /// α grid: comma list or start:end:step, e.g. "-60:60:5".
        #[arg(long, default_value = "-60:60:5")]
        alpha: String,
    },
    /// Convergence diagnostics of sample quantities against their limits.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated increasing dimensions.
        #[arg(long, default_value = "500,2000,8000")]
        p_grid: String,
    },
    /// Print the limit predictions for a single training draw.
    Limits {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Inspect the shipped settings.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List the ten shipped settings with their key parameters.
    List,
}

fn model_source(common: &CommonOpts) -> dpa::Result<ModelSource> {
    match (&common.setting, &common.model_file) {
        (Some(s), None) => Ok(ModelSource::Setting(SettingId::from_str(s)?)),
        (None, Some(f)) => Ok(ModelSource::File(f.clone())),
        _ => Err(DpaError::InvalidConfig(
            "exactly one of --setting or --model-file is required".into(),
        )),
    }
}

fn config_from(common: &CommonOpts, rules: Vec<RuleSpec>) -> dpa::Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        model: model_source(common)?,
        p: common.p,
        n1: common.n1,
        n2: common.n2,
        n_test: common.n_test,
        reps: common.reps,
        seed: common.seed,
        rules,
        k_splits: common.k_splits,
        split_sizes: (common.split_size, common.split_size),
        record_runtime: common.record_runtime,
    })
}

fn write_out(common: &CommonOpts, text: String) -> dpa::Result<()> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> dpa::Result<()> {
    match cli.command {
        Command::Simulate { common, rules } => {
            let format = OutputFormat::from_str(&common.format)?;
            let cfg = config_from(&common, parse_rules(&rules)?)?;
            let table = run_experiment(&cfg)?;
            match &common.out {
                Some(path) => emit_table(&table, path, format),
                None => write_out(&common, render_table(&table, format)?),
            }
        }
        Command::RidgeCurve { common, alpha } => {
            let format = OutputFormat::from_str(&common.format)?;
            let grid = parse_alpha_grid(&alpha)?;
            let cfg = config_from(&common, vec![RuleSpec::Mdp])?;
            let curve = ridge_curve(&cfg, &grid)?;
            eprintln!("argmax alpha = {}", curve.argmax_alpha);
            match &common.out {
                Some(path) => emit_records(&curve.points, path, format),
                None => write_out(&common, render_records(&curve.points, format)?),
            }
        }
        Command::Sweep { common, p_grid } => {
            let format = OutputFormat::from_str(&common.format)?;
            let grid: Vec<usize> = p_grid
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.trim().parse::<usize>().map_err(|_| {
                        DpaError::InvalidConfig(format!("bad dimension '{t}' in p grid"))
                    })
                })
                .collect::<dpa::Result<_>>()?;
            let cfg = config_from(&common, vec![RuleSpec::Mdp])?;
            let records = convergence_sweep(&cfg, &grid)?;
            match &common.out {
                Some(path) => emit_records(&records, path, format),
                None => write_out(&common, render_records(&records, format)?),
            }
        }
        Command::Limits { common } => {
            let source = model_source(&common)?;
            let pair = source.resolve(common.p)?;
            let regime = Regime::of_pair(&pair);
            let train = sample_pair(&pair, common.p, common.n1, common.n2, common.seed)?;
            let s = score_summary(&pair, &train, common.p)?;
            let report = limit_report(&s, regime)?;
            // Also report the observed values for side-by-side reading.
            let g = fit_geometry(&train)?;
            eprintln!(
                "observed: kappa = {:.6}, leading eigenvalue/p = {:.6}",
                g.kappa_mdp,
                g.lambdas[0] / common.p as f64
            );
            write_out(
                &common,
                format!("{}\n", serde_json::to_string_pretty(&report)?),
            )
        }
        Command::Preset { action } => {
            let PresetAction::List = action;
            let mut lines = String::new();
            lines.push_str("setting  beta1  beta2  m1  m2  m  tau1_sq  tau2_sq  regime\n");
            for id in SettingId::ALL {
                let pair = make_setting(id, 400)?;
                lines.push_str(&format!(
                    "{:<8} {:<6} {:<6} {:<3} {:<3} {:<2} {:<8} {:<8} {:?}\n",
                    id.to_string(),
                    pair.class1.beta(),
                    pair.class2.beta(),
                    pair.class1.m_k(),
                    pair.class2.m_k(),
                    pair.m,
                    pair.class1.tail_var,
                    pair.class2.tail_var,
                    Regime::of_pair(&pair),
                ));
            }
            print!("{lines}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                DpaError::Degenerate(_) | DpaError::RidgePole { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
