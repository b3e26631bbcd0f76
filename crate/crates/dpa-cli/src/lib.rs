//! Monte Carlo harness around the `dpa` library: experiment
//! configuration, deterministic parallel repetition running, ridge
//! curves, convergence sweeps against the theory oracle, and CSV/JSON
//! emission.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dpa::classifiers::{
    classify_bmdp, classify_bprd, classify_mdp, classify_prd, smdp_classify, smdp_fit, SmdpVariant,
};
use dpa::geometry::{
    alpha_hat, alpha_hat_k, fit_geometry, index_set_d, project_scores, projected_ridge, IndexSetD,
    Regime, TrainedGeometry,
};
use dpa::limits::{angle_limits, common_basis, eigenvalue_limits, kappa_limit, score_summary};
use dpa::model::{make_setting, sample_pair, LabeledData, PopulationPair, SettingId};
use dpa::{seed, DpaError, Result};

/// Where the population comes from: a shipped setting or a JSON model
/// file.
#[derive(Clone, Debug)]
pub enum ModelSource {
    Setting(SettingId),
    File(PathBuf),
}

impl ModelSource {
    /// Label used for seed derivation and the `setting` output column.
    pub fn label(&self) -> String {
        match self {
            ModelSource::Setting(id) => id.to_string(),
            ModelSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into()),
        }
    }

    /// Resolve to a validated population pair at dimension `p`.
    pub fn resolve(&self, p: usize) -> Result<PopulationPair> {
        match self {
            ModelSource::Setting(id) => make_setting(*id, p),
            ModelSource::File(path) => PopulationPair::from_path(path),
        }
    }
}

/// How the ridge parameter is chosen for a ridge-family rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaChoice {
    /// Pooled tail estimate `α̂`.
    Pooled,
    /// Class-1 tail estimate `α̂₁`.
    Class1,
    /// Class-2 tail estimate `α̂₂`.
    Class2,
    /// An explicit value.
    Fixed(f64),
}

impl AlphaChoice {
    fn column_label(&self) -> String {
        match self {
            AlphaChoice::Pooled => "ahat".into(),
            AlphaChoice::Class1 => "ahat1".into(),
            AlphaChoice::Class2 => "ahat2".into(),
            AlphaChoice::Fixed(v) => format!("{v}"),
        }
    }
}

impl FromStr for AlphaChoice {
    type Err = DpaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ahat" => Ok(AlphaChoice::Pooled),
            "ahat1" => Ok(AlphaChoice::Class1),
            "ahat2" => Ok(AlphaChoice::Class2),
            other => other
                .parse::<f64>()
                .map(AlphaChoice::Fixed)
                .map_err(|_| DpaError::InvalidConfig(format!("bad alpha choice '{other}'"))),
        }
    }
}

/// One classification rule to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleSpec {
    Mdp,
    BiasMdp,
    Prd {
        alpha: AlphaChoice,
    },
    BiasPrd {
        alpha: AlphaChoice,
    },
    SmdpTypeI,
    SmdpTypeII,
    /// Degenerate rule predicting class 1 always; accounting sanity
    /// check (its accuracy must equal the empirical class-1 prior).
    AlwaysClass1,
}

impl RuleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RuleSpec::Mdp => "mdp",
            RuleSpec::BiasMdp => "bmdp",
            RuleSpec::Prd { .. } => "prd",
            RuleSpec::BiasPrd { .. } => "bprd",
            RuleSpec::SmdpTypeI => "smdp1",
            RuleSpec::SmdpTypeII => "smdp2",
            RuleSpec::AlwaysClass1 => "always1",
        }
    }

    pub fn alpha_label(&self) -> String {
        match self {
            RuleSpec::Prd { alpha } | RuleSpec::BiasPrd { alpha } => alpha.column_label(),
            _ => String::new(),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = DpaError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, alpha) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<AlphaChoice>()?)),
            None => (s, None),
        };
        let default_alpha = alpha.unwrap_or(AlphaChoice::Pooled);
        match name {
            "mdp" => Ok(RuleSpec::Mdp),
            "bmdp" => Ok(RuleSpec::BiasMdp),
            "prd" => Ok(RuleSpec::Prd {
                alpha: default_alpha,
            }),
            "bprd" => Ok(RuleSpec::BiasPrd {
                alpha: default_alpha,
            }),
            "smdp1" => Ok(RuleSpec::SmdpTypeI),
            "smdp2" => Ok(RuleSpec::SmdpTypeII),
            "always1" => Ok(RuleSpec::AlwaysClass1),
            other => Err(DpaError::InvalidConfig(format!("unknown rule '{other}'"))),
        }
    }
}

/// Parse a comma-separated rule list.
pub fn parse_rules(s: &str) -> Result<Vec<RuleSpec>> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse())
        .collect()
}

/// Full configuration of one Monte Carlo experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    /// Test observations per class.
    pub n_test: usize,
    pub reps: usize,
    pub seed: u64,
    pub rules: Vec<RuleSpec>,
    /// Number of data splits for the SMDP rules.
    pub k_splits: usize,
    /// Test-split sizes per class for the SMDP rules.
    pub split_sizes: (usize, usize),
    /// When false (the default), `runtime_s` is reported as 0.0 so
    /// outputs are byte-identical across runs and machines.
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(DpaError::InvalidConfig(
                "need at least one repetition".into(),
            ));
        }
        if self.rules.is_empty() {
            return Err(DpaError::InvalidConfig("rule list must be nonempty".into()));
        }
        if self.p == 0 || self.n1 < 2 || self.n2 < 2 || self.n_test == 0 {
            return Err(DpaError::InvalidConfig(
                "need p ≥ 1, n₁, n₂ ≥ 2 and at least one test point per class".into(),
            ));
        }
        Ok(())
    }
}

/// One output row of a result table. Field order fixes the CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub setting: String,
    pub rule: String,
    pub alpha: String,
    pub p: usize,
    pub reps: usize,
    pub acc_mean: f64,
    pub acc_se: f64,
    pub acc_class1: f64,
    pub acc_class2: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Per-rule outcome of a single repetition.
struct RuleOutcome {
    acc: f64,
    acc_class1: f64,
    acc_class2: f64,
    secs: f64,
}

/// Spike-eigenspace bookkeeping shared by the rules: the declared `m`
/// and the strong spike counts per class.
fn spike_counts(pair: &PopulationPair) -> (usize, usize, usize) {
    (pair.m, pair.strong_m_k(1), pair.strong_m_k(2))
}

fn d_set_for(pair: &PopulationPair, n1: usize) -> Result<IndexSetD> {
    let (m, sm1, sm2) = spike_counts(pair);
    index_set_d(Regime::of_pair(pair), m, sm1, sm2, n1)
}

fn resolve_alpha(choice: AlphaChoice, g: &TrainedGeometry, pair: &PopulationPair) -> Result<f64> {
    let (m, sm1, sm2) = spike_counts(pair);
    match choice {
        AlphaChoice::Pooled => alpha_hat(g, m),
        AlphaChoice::Class1 => alpha_hat_k(g, 1, sm1),
        AlphaChoice::Class2 => alpha_hat_k(g, 2, sm2),
        AlphaChoice::Fixed(v) => Ok(v),
    }
}

/// Accuracy of predictions against a balanced labeled test set.
fn accuracies(pred: &[u8], labels: &[u8]) -> (f64, f64, f64) {
    let mut hit = [0usize; 2];
    let mut tot = [0usize; 2];
    for (&p, &l) in pred.iter().zip(labels) {
        let k = (l - 1) as usize;
        tot[k] += 1;
        if p == l {
            hit[k] += 1;
        }
    }
    let a1 = hit[0] as f64 / tot[0].max(1) as f64;
    let a2 = hit[1] as f64 / tot[1].max(1) as f64;
    let overall = (hit[0] + hit[1]) as f64 / pred.len() as f64;
    (overall, a1, a2)
}

#[allow(clippy::too_many_arguments)]
fn run_rule(
    rule: &RuleSpec,
    pair: &PopulationPair,
    cfg: &ExperimentConfig,
    g: &TrainedGeometry,
    train: &LabeledData,
    test: &LabeledData,
    d_set: &IndexSetD,
    rep_seed: u64,
) -> Result<RuleOutcome> {
    let (m, sm1, sm2) = spike_counts(pair);
    let start = Instant::now();
    let pred = match rule {
        RuleSpec::Mdp => classify_mdp(g, &test.x),
        RuleSpec::BiasMdp => classify_bmdp(g, sm1, sm2, &test.x)?,
        RuleSpec::Prd { alpha } => {
            let a = resolve_alpha(*alpha, g, pair)?;
            classify_prd(g, a, d_set, &test.x)?
        }
        RuleSpec::BiasPrd { alpha } => {
            let a = resolve_alpha(*alpha, g, pair)?;
            classify_bprd(g, a, d_set, sm1, sm2, &test.x)?
        }
        RuleSpec::SmdpTypeI | RuleSpec::SmdpTypeII => {
            let variant = if matches!(rule, RuleSpec::SmdpTypeI) {
                SmdpVariant::TypeI
            } else {
                SmdpVariant::TypeII
            };
            let fit = smdp_fit(
                train,
                cfg.k_splits,
                m,
                sm1,
                sm2,
                cfg.split_sizes,
                variant,
                seed::derive(rep_seed, 3),
            )?;
            smdp_classify(&fit, &test.x)
        }
        RuleSpec::AlwaysClass1 => vec![1u8; test.labels.len()],
    };
    let secs = if cfg.record_runtime {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    let (acc, acc_class1, acc_class2) = accuracies(&pred, &test.labels);
    Ok(RuleOutcome {
        acc,
        acc_class1,
        acc_class2,
        secs,
    })
}

/// Run a full experiment: repetitions in parallel, deterministic per-rep
/// seeds, fixed-order aggregation.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let pair = cfg.model.resolve(cfg.p)?;
    let label = cfg.model.label();
    let setting_seed = seed::derive_str(cfg.seed, &label);

    let per_rep: Vec<Vec<RuleOutcome>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<RuleOutcome>> {
            let rep_seed = seed::derive(setting_seed, rep as u64);
            let train = sample_pair(&pair, cfg.p, cfg.n1, cfg.n2, seed::derive(rep_seed, 1))?;
            let test = sample_pair(
                &pair,
                cfg.p,
                cfg.n_test,
                cfg.n_test,
                seed::derive(rep_seed, 2),
            )?;
            let g = fit_geometry(&train)?;
            let d_set = d_set_for(&pair, cfg.n1)?;
            cfg.rules
                .iter()
                .map(|rule| run_rule(rule, &pair, cfg, &g, &train, &test, &d_set, rep_seed))
                .collect()
        })
        .collect::<Result<_>>()?;

    let reps_f = cfg.reps as f64;
    let rows = cfg
        .rules
        .iter()
        .enumerate()
        .map(|(j, rule)| {
            let accs: Vec<f64> = per_rep.iter().map(|r| r[j].acc).collect();
            let mean = accs.iter().sum::<f64>() / reps_f;
            let se = if cfg.reps > 1 {
                let var =
                    accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (reps_f - 1.0);
                (var / reps_f).sqrt()
            } else {
                0.0
            };
            ResultRow {
                setting: label.clone(),
                rule: rule.name().into(),
                alpha: rule.alpha_label(),
                p: cfg.p,
                reps: cfg.reps,
                acc_mean: mean,
                acc_se: se,
                acc_class1: per_rep.iter().map(|r| r[j].acc_class1).sum::<f64>() / reps_f,
                acc_class2: per_rep.iter().map(|r| r[j].acc_class2).sum::<f64>() / reps_f,
                runtime_s: per_rep.iter().map(|r| r[j].secs).sum::<f64>(),
            }
        })
        .collect();
    Ok(ResultTable { rows })
}

/// One point of a ridge accuracy curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgePoint {
    pub alpha: f64,
    pub acc_mean: f64,
    pub acc_se: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgeCurve {
    pub setting: String,
    pub p: usize,
    pub reps: usize,
    pub points: Vec<RidgePoint>,
    /// Grid point with the highest mean accuracy (first on ties).
    pub argmax_alpha: f64,
}

/// Evaluate the projected-ridge rule over an explicit α grid, fitting
/// the geometry once per repetition.
pub fn ridge_curve(cfg: &ExperimentConfig, alpha_grid: &[f64]) -> Result<RidgeCurve> {
    cfg.validate()?;
    if alpha_grid.is_empty() {
        return Err(DpaError::InvalidConfig(
            "alpha grid must be nonempty".into(),
        ));
    }
    let pair = cfg.model.resolve(cfg.p)?;
    let label = cfg.model.label();
    let setting_seed = seed::derive_str(cfg.seed, &label);

    let per_rep: Vec<Vec<f64>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<f64>> {
            let rep_seed = seed::derive(setting_seed, rep as u64);
            let train = sample_pair(&pair, cfg.p, cfg.n1, cfg.n2, seed::derive(rep_seed, 1))?;
            let test = sample_pair(
                &pair,
                cfg.p,
                cfg.n_test,
                cfg.n_test,
                seed::derive(rep_seed, 2),
            )?;
            let g = fit_geometry(&train)?;
            let d_set = d_set_for(&pair, cfg.n1)?;
            alpha_grid
                .iter()
                .map(|&a| {
                    let pred = classify_prd(&g, a, &d_set, &test.x)?;
                    Ok(accuracies(&pred, &test.labels).0)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let reps_f = cfg.reps as f64;
    let points: Vec<RidgePoint> = alpha_grid
        .iter()
        .enumerate()
        .map(|(j, &alpha)| {
            let accs: Vec<f64> = per_rep.iter().map(|r| r[j]).collect();
            let mean = accs.iter().sum::<f64>() / reps_f;
            let se = if cfg.reps > 1 {
                let var =
                    accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (reps_f - 1.0);
                (var / reps_f).sqrt()
            } else {
                0.0
            };
            RidgePoint {
                alpha,
                acc_mean: mean,
                acc_se: se,
            }
        })
        .collect();
    let argmax_alpha = points
        .iter()
        .fold((f64::NEG_INFINITY, 0.0), |(best, arg), pt| {
            if pt.acc_mean > best {
                (pt.acc_mean, pt.alpha)
            } else {
                (best, arg)
            }
        })
        .1;
    Ok(RidgeCurve {
        setting: label,
        p: cfg.p,
        reps: cfg.reps,
        points,
        argmax_alpha,
    })
}

/// One convergence diagnostic record (one repetition at one dimension).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRecord {
    pub setting: String,
    pub p: usize,
    pub rep: usize,
    /// `max_i |λ̂ᵢ/p − pred_i| / pred_i`.
    pub max_rel_eig_err: f64,
    /// `mean_i |λ̂ᵢ/p − pred_i| / pred_i`. The max is dominated by the
    /// Wishart edge fluctuation of the pure-noise eigenvalues, which is
    /// of order `2√(n/p)` relative no matter how good the fit is; the
    /// mean averages over the bulk and tracks genuine model error.
    pub mean_rel_eig_err: f64,
    /// `max_i |cos(Angle(ûᵢ, 𝒰)) − pred_i|`.
    pub max_abs_angle_err: f64,
    pub kappa_emp: f64,
    pub kappa_pred: f64,
    /// Pooled within-class SD of scaled test projections onto `v_α̂`.
    pub within_sd: f64,
    /// Gap between the two class means of those projections.
    pub between_gap: f64,
    /// Mean `|w_SMDPᵀu_j|` over the realized common basis (0 if `m = 0`).
    pub smdp_u_align: f64,
}

/// Run the convergence diagnostics over an increasing `p` grid. The
/// per-repetition seed does not depend on `p`, so the recorded true
/// scores — and hence the oracle predictions — are identical across the
/// grid; only the tail noise changes.
pub fn convergence_sweep(cfg: &ExperimentConfig, p_grid: &[usize]) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    if p_grid.windows(2).any(|w| w[0] >= w[1]) || p_grid.is_empty() {
        return Err(DpaError::InvalidConfig(
            "p grid must be nonempty and strictly increasing".into(),
        ));
    }
    let label = cfg.model.label();
    let setting_seed = seed::derive_str(cfg.seed, &label);

    let mut records: Vec<SweepRecord> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<SweepRecord>> {
            let rep_seed = seed::derive(setting_seed, rep as u64);
            p_grid
                .iter()
                .map(|&p| -> Result<SweepRecord> {
                    let pair = cfg.model.resolve(p)?;
                    let regime = Regime::of_pair(&pair);
                    let train = sample_pair(&pair, p, cfg.n1, cfg.n2, seed::derive(rep_seed, 1))?;
                    let test =
                        sample_pair(&pair, p, cfg.n_test, cfg.n_test, seed::derive(rep_seed, 2))?;
                    let g = fit_geometry(&train)?;
                    let s = score_summary(&pair, &train, p)?;

                    let (eig_pred, _) = eigenvalue_limits(&s, regime)?;
                    let p_f = p as f64;
                    let rel_eig_errs: Vec<f64> = g
                        .lambdas
                        .iter()
                        .zip(&eig_pred)
                        .map(|(&lam, &pred)| (lam / p_f - pred).abs() / pred)
                        .collect();
                    let max_rel_eig_err = rel_eig_errs.iter().copied().fold(0.0, f64::max);
                    let mean_rel_eig_err =
                        rel_eig_errs.iter().sum::<f64>() / rel_eig_errs.len().max(1) as f64;

                    let angle_pred = angle_limits(&s, regime)?;
                    let u1 = common_basis(&pair, p)?;
                    let max_abs_angle_err = (0..g.rank())
                        .map(|i| {
                            let emp = if u1.ncols() > 0 {
                                (u1.transpose() * g.u1hat.column(i)).norm().min(1.0)
                            } else {
                                0.0
                            };
                            (emp - angle_pred[i]).abs()
                        })
                        .fold(0.0, f64::max);

                    let kappa_pred = kappa_limit(&s, regime)?;

                    // Projections of test data onto the estimated ridge
                    // direction.
                    let (m, sm1, sm2) = spike_counts(&pair);
                    let alpha = alpha_hat(&g, m)?;
                    let d_set = d_set_for(&pair, cfg.n1)?;
                    let v = projected_ridge(&g, alpha, &d_set)?;
                    let scores = project_scores(&v, &test.x, &g.xbar);
                    let (n_te1, n_te2) = (cfg.n_test, cfg.n_test);
                    let mean1 = scores[..n_te1].iter().sum::<f64>() / n_te1 as f64;
                    let mean2 = scores[n_te1..].iter().sum::<f64>() / n_te2 as f64;
                    let ss: f64 = scores[..n_te1]
                        .iter()
                        .map(|x| (x - mean1) * (x - mean1))
                        .chain(scores[n_te1..].iter().map(|x| (x - mean2) * (x - mean2)))
                        .sum();
                    let within_sd = (ss / (n_te1 + n_te2 - 2) as f64).sqrt();
                    let between_gap = (mean1 - mean2).abs();

                    let smdp_u_align = if m > 0 {
                        let fit = smdp_fit(
                            &train,
                            cfg.k_splits,
                            m,
                            sm1,
                            sm2,
                            cfg.split_sizes,
                            SmdpVariant::TypeII,
                            seed::derive(rep_seed, 3),
                        )?;
                        let aligns = u1.transpose() * &fit.w_smdp;
                        aligns.iter().map(|a| a.abs()).sum::<f64>() / m as f64
                    } else {
                        0.0
                    };

                    Ok(SweepRecord {
                        setting: label.clone(),
                        p,
                        rep,
                        max_rel_eig_err,
                        mean_rel_eig_err,
                        max_abs_angle_err,
                        kappa_emp: g.kappa_mdp,
                        kappa_pred,
                        within_sd,
                        between_gap,
                        smdp_u_align,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?
        .into_iter()
        .flatten()
        .collect();
    // Stable output order: by repetition, then dimension (already so,
    // but make it explicit for aggregation independence).
    records.sort_by_key(|r| (r.rep, r.p));
    Ok(records)
}

/// Output formats for [`emit_table`] and the record emitters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = DpaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(DpaError::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

/// Render a result table to a string in the requested format. The CSV
/// schema is fixed: header row always present, even for empty tables.
pub fn render_table(table: &ResultTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record([
                "setting",
                "rule",
                "alpha",
                "p",
                "reps",
                "acc_mean",
                "acc_se",
                "acc_class1",
                "acc_class2",
                "runtime_s",
            ])
            .map_err(csv_err)?;
            for row in &table.rows {
                w.serialize(row).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error().into()))?)
                .map_err(|e| DpaError::InvalidConfig(format!("non-utf8 csv output: {e}")))
        }
        OutputFormat::Json => Ok(format!("{}\n", serde_json::to_string_pretty(table)?)),
    }
}

/// Render a homogeneous record stream (sweep rows, ridge points).
pub fn render_records<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error().into()))?)
                .map_err(|e| DpaError::InvalidConfig(format!("non-utf8 csv output: {e}")))
        }
        OutputFormat::Json => Ok(format!("{}\n", serde_json::to_string_pretty(rows)?)),
    }
}

fn csv_err(e: csv::Error) -> DpaError {
    DpaError::InvalidConfig(format!("csv serialization failed: {e}"))
}

/// Write rendered output to a file.
pub fn emit_table(table: &ResultTable, path: &Path, format: OutputFormat) -> Result<()> {
    std::fs::write(path, render_table(table, format)?)?;
    Ok(())
}

pub fn emit_records<T: Serialize>(rows: &[T], path: &Path, format: OutputFormat) -> Result<()> {
    std::fs::write(path, render_records(rows, format)?)?;
    Ok(())
}

/// A parsed α grid: either comma-separated values or `start:end:step`.
pub fn parse_alpha_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| DpaError::InvalidConfig(format!("bad grid start '{}'", parts[0])))?;
        let end: f64 = parts[1]
            .parse()
            .map_err(|_| DpaError::InvalidConfig(format!("bad grid end '{}'", parts[1])))?;
        let step: f64 = parts[2]
            .parse()
            .map_err(|_| DpaError::InvalidConfig(format!("bad grid step '{}'", parts[2])))?;
        if step <= 0.0 || end < start {
            return Err(DpaError::InvalidConfig(
                "grid needs start ≤ end and step > 0".into(),
            ));
        }
        let count = ((end - start) / step).round() as usize;
        Ok((0..=count).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| DpaError::InvalidConfig(format!("bad alpha value '{t}'")))
            })
            .collect()
    }
}

/// Realize the common basis columns as individual vectors; convenience
/// for diagnostics that need `u_j` separately.
pub fn basis_columns(pair: &PopulationPair, p: usize) -> Result<Vec<nalgebra::DVector<f64>>> {
    let u1: DMatrix<f64> = common_basis(pair, p)?;
    Ok((0..u1.ncols()).map(|j| u1.column(j).into_owned()).collect())
}
