//! Heterogeneous spiked covariance population models and sampling.
//!
//! A class-`k` population has mean `μ_k`, covariance
//! `Σ_k = Σ_i σ_{k,i}² p^{β_k} u_{k,i} u_{k,i}ᵀ + τ_k² I_p`, and Gaussian
//! principal-component scores. Eigenvectors and means are block-constant
//! patterns over coordinate fractions, so they can be realized at any
//! dimension `p`. The covariance is never materialized: sampling and all
//! covariance applications use the factored form, costing `O(p·(n+m))`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::DpaError;
use crate::seed;
use crate::Result;

/// Probe dimension used to validate pattern invariants at construction
/// time. Divisible by 2..=8, which covers every block denominator used in
/// practice; invariants are re-checked at each `realize` anyway.
const PROBE_P: usize = 1680;

/// Orthogonality tolerance between distinct realized eigenvectors.
const ORTHO_TOL: f64 = 1e-10;

/// One constant block of a pattern vector: coordinates
/// `⌊start·p⌋ .. ⌊end·p⌋-1` receive the (relative) coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start_fraction: f64,
    pub end_fraction: f64,
    pub coefficient: f64,
}

/// A block-constant unit-vector pattern, realizable at any dimension `p`.
///
/// The realized vector assigns `coefficient·c` to the coordinates of each
/// block and `0` elsewhere, with `c` chosen so the result has exactly unit
/// norm (renormalization absorbs the `⌊·⌋` rounding of block edges).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigvecPattern {
    pub blocks: Vec<Block>,
}

impl EigvecPattern {
    /// Build and validate a pattern.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let pat = Self { blocks };
        pat.validate()?;
        Ok(pat)
    }

    /// Convenience constructor from `(start, end, coefficient)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|&(s, e, c)| Block {
                    start_fraction: s,
                    end_fraction: e,
                    coefficient: c,
                })
                .collect(),
        )
    }

    /// Check block ranges, non-overlap, and that the pattern is nonzero.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(DpaError::InvalidModel("pattern has no blocks".into()));
        }
        for b in &self.blocks {
            if !(0.0..1.0).contains(&b.start_fraction)
                || !(b.end_fraction > 0.0 && b.end_fraction <= 1.0)
                || b.start_fraction >= b.end_fraction
            {
                return Err(DpaError::InvalidModel(format!(
                    "bad block fractions [{}, {})",
                    b.start_fraction, b.end_fraction
                )));
            }
        }
        let mut sorted: Vec<&Block> = self.blocks.iter().collect();
        sorted.sort_by(|a, b| a.start_fraction.total_cmp(&b.start_fraction));
        for w in sorted.windows(2) {
            if w[1].start_fraction < w[0].end_fraction {
                return Err(DpaError::InvalidModel(format!(
                    "overlapping blocks at fraction {}",
                    w[1].start_fraction
                )));
            }
        }
        if self.blocks.iter().all(|b| b.coefficient == 0.0) {
            return Err(DpaError::InvalidModel("all block coefficients zero".into()));
        }
        Ok(())
    }

    /// Materialize the pattern at dimension `p` as an exact unit vector.
    pub fn realize(&self, p: usize) -> Result<DVector<f64>> {
        if p < 2 * self.blocks.len() {
            return Err(DpaError::InvalidConfig(format!(
                "p = {} too small for a {}-block pattern",
                p,
                self.blocks.len()
            )));
        }
        let mut v = DVector::zeros(p);
        for b in &self.blocks {
            let lo = (b.start_fraction * p as f64).floor() as usize;
            let hi = (b.end_fraction * p as f64).floor() as usize;
            if hi <= lo {
                return Err(DpaError::InvalidConfig(format!(
                    "block [{}, {}) is empty at p = {}",
                    b.start_fraction, b.end_fraction, p
                )));
            }
            for i in lo..hi.min(p) {
                v[i] = b.coefficient;
            }
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(DpaError::InvalidModel("pattern realized to zero".into()));
        }
        Ok(v / norm)
    }
}

/// A mean-vector specification: a block pattern scaled by a magnitude.
///
/// The realized mean is `scale·√p·(unit pattern)`, so `p⁻¹‖μ‖² = scale²`
/// exactly at every `p`. An empty block list (or zero scale) is the zero
/// mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanPattern {
    pub blocks: Vec<Block>,
    pub scale: f64,
}

impl MeanPattern {
    /// The zero mean.
    pub fn zero() -> Self {
        Self {
            blocks: Vec::new(),
            scale: 0.0,
        }
    }

    /// Realize the mean at dimension `p`.
    pub fn realize(&self, p: usize) -> Result<DVector<f64>> {
        if self.blocks.is_empty() || self.scale == 0.0 {
            return Ok(DVector::zeros(p));
        }
        let unit = EigvecPattern {
            blocks: self.blocks.clone(),
        }
        .realize(p)?;
        Ok(unit * (self.scale * (p as f64).sqrt()))
    }
}

/// One spike of a class covariance: eigenvalue `σ² p^β + τ²` along the
/// realized pattern `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub sigma2: f64,
    pub beta: f64,
    pub u: EigvecPattern,
}

/// One class's population model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    pub mean: MeanPattern,
    pub spikes: Vec<Spike>,
    pub tail_var: f64,
}

impl ClassModel {
    /// Build and validate a class model.
    pub fn new(mean: MeanPattern, spikes: Vec<Spike>, tail_var: f64) -> Result<Self> {
        let model = Self {
            mean,
            spikes,
            tail_var,
        };
        model.validate()?;
        Ok(model)
    }

    /// Number of spikes `m_k`.
    pub fn m_k(&self) -> usize {
        self.spikes.len()
    }

    /// The shared spike exponent `β_k` (0 if the class has no spikes).
    pub fn beta(&self) -> f64 {
        self.spikes.first().map_or(0.0, |s| s.beta)
    }

    /// Whether the class has strong spikes (`β_k = 1`).
    pub fn is_strong(&self) -> bool {
        !self.spikes.is_empty() && self.beta() == 1.0
    }

    /// Validate structural invariants, realizing patterns at a probe
    /// dimension to check mutual orthogonality.
    pub fn validate(&self) -> Result<()> {
        if self.tail_var <= 0.0 {
            return Err(DpaError::InvalidModel("tail_var must be positive".into()));
        }
        for s in &self.spikes {
            if s.sigma2 <= 0.0 {
                return Err(DpaError::InvalidModel(
                    "spike sigma2 must be positive".into(),
                ));
            }
            if !(0.0..=1.0).contains(&s.beta) {
                return Err(DpaError::InvalidModel(
                    "spike beta must lie in [0, 1]".into(),
                ));
            }
            s.u.validate()?;
        }
        for w in self.spikes.windows(2) {
            if w[0].beta != w[1].beta {
                return Err(DpaError::InvalidModel(
                    "all spikes of one class must share one beta".into(),
                ));
            }
            if w[1].sigma2 > w[0].sigma2 {
                return Err(DpaError::InvalidModel(
                    "spike sigma2 values must be nonincreasing".into(),
                ));
            }
        }
        self.check_orthogonality(PROBE_P)
    }

    /// Check that realized spike eigenvectors are mutually orthogonal at
    /// dimension `p`.
    pub fn check_orthogonality(&self, p: usize) -> Result<()> {
        let us: Vec<DVector<f64>> = self
            .spikes
            .iter()
            .map(|s| s.u.realize(p))
            .collect::<Result<_>>()?;
        for i in 0..us.len() {
            for j in (i + 1)..us.len() {
                let dot = us[i].dot(&us[j]);
                if dot.abs() > ORTHO_TOL {
                    return Err(DpaError::InvalidModel(format!(
                        "spike eigenvectors {} and {} not orthogonal at p = {} (|<u,u>| = {:.2e})",
                        i, j, p, dot
                    )));
                }
            }
        }
        Ok(())
    }

    /// Apply the class covariance `Σ_k` in factored form: `Σ_k v` without
    /// materializing a `p×p` matrix.
    pub fn apply_covariance(&self, p: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
        let mut out = v * self.tail_var;
        for s in &self.spikes {
            let u = s.u.realize(p)?;
            let lam_spike = s.sigma2 * (p as f64).powf(s.beta);
            out += &u * (lam_spike * u.dot(v));
        }
        Ok(out)
    }
}

/// A two-class population with priors, the declared dimension `m` of the
/// common leading eigenspace, and the mean-separation constant `δ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationPair {
    pub class1: ClassModel,
    pub class2: ClassModel,
    pub priors: (f64, f64),
    pub m: usize,
    pub delta2: f64,
}

impl PopulationPair {
    /// Build and validate a population pair.
    pub fn new(
        class1: ClassModel,
        class2: ClassModel,
        priors: (f64, f64),
        m: usize,
        delta2: f64,
    ) -> Result<Self> {
        let pair = Self {
            class1,
            class2,
            priors,
            m,
            delta2,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Validate the pair-level invariants (priors, `m` bounds).
    pub fn validate(&self) -> Result<()> {
        self.class1.validate()?;
        self.class2.validate()?;
        if (self.priors.0 + self.priors.1 - 1.0).abs() > 1e-12
            || self.priors.0 <= 0.0
            || self.priors.1 <= 0.0
        {
            return Err(DpaError::InvalidModel(
                "priors must be positive and sum to 1".into(),
            ));
        }
        if self.delta2 < 0.0 {
            return Err(DpaError::InvalidModel("delta2 must be nonnegative".into()));
        }
        let ms1 = if self.class1.is_strong() {
            self.class1.m_k()
        } else {
            0
        };
        let ms2 = if self.class2.is_strong() {
            self.class2.m_k()
        } else {
            0
        };
        let lo = ms1.max(ms2);
        let hi = ms1 + ms2;
        if self.m < lo || self.m > hi {
            return Err(DpaError::InvalidModel(format!(
                "m = {} inconsistent with strong spike counts (must lie in [{}, {}])",
                self.m, lo, hi
            )));
        }
        Ok(())
    }

    /// Number of strong spikes of class `k` (`k ∈ {1, 2}`); 0 for a
    /// weak-spiked class.
    pub fn strong_m_k(&self, k: usize) -> usize {
        let c = if k == 1 { &self.class1 } else { &self.class2 };
        if c.is_strong() {
            c.m_k()
        } else {
            0
        }
    }

    /// Parse and validate a pair from its JSON configuration form.
    pub fn from_json(text: &str) -> Result<Self> {
        let pair: Self = serde_json::from_str(text)?;
        pair.validate()?;
        Ok(pair)
    }

    /// Load and validate a pair from a JSON configuration file.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// A sampled two-class data set: columns grouped class-1 first, with the
/// true leading principal-component scores recorded at sampling time.
#[derive(Clone, Debug)]
pub struct LabeledData {
    /// `p×n` data matrix, class-1 columns first.
    pub x: DMatrix<f64>,
    /// Length-`n` labels in `{1, 2}`, grouped by class.
    pub labels: Vec<u8>,
    /// Per-class true score matrices `W_k` (`n_k × m_k`, entries
    /// `σ_{k,i}·z_{k,i,j}`), when the data came from the sampler.
    pub true_scores: Option<[DMatrix<f64>; 2]>,
}

impl LabeledData {
    /// Class-1 sample size.
    pub fn n1(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    /// Class-2 sample size.
    pub fn n2(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 2).count()
    }

    /// Dimension `p`.
    pub fn p(&self) -> usize {
        self.x.nrows()
    }
}

/// Draw `n_k` observations from one class model.
///
/// Returns the `p×n_k` data matrix and the `n_k×m_k` matrix of true scores
/// `σ_i·z_{i,j}`. All spike scores are drawn before any tail noise, so for
/// a fixed rng stream the recorded scores are identical at every `p` —
/// this is what makes score-conditional convergence checks across a `p`
/// grid meaningful, and is a deliberate contract of this sampler.
pub fn sample_class(
    model: &ClassModel,
    p: usize,
    n_k: usize,
    rng: &mut impl Rng,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m_k = model.m_k();
    let mean = model.mean.realize(p)?;
    let us: Vec<DVector<f64>> = model
        .spikes
        .iter()
        .map(|s| s.u.realize(p))
        .collect::<Result<_>>()?;

    // Spike scores first (p-invariant per stream).
    let mut z = DMatrix::zeros(n_k, m_k);
    for j in 0..n_k {
        for i in 0..m_k {
            z[(j, i)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let mut scores = DMatrix::zeros(n_k, m_k);
    for i in 0..m_k {
        let sigma = model.spikes[i].sigma2.sqrt();
        for j in 0..n_k {
            scores[(j, i)] = sigma * z[(j, i)];
        }
    }

    let tau = model.tail_var.sqrt();
    let mut x = DMatrix::zeros(p, n_k);
    for j in 0..n_k {
        let mut col = mean.clone();
        for i in 0..m_k {
            let amp = model.spikes[i].sigma2.sqrt()
                * (p as f64).powf(model.spikes[i].beta / 2.0)
                * z[(j, i)];
            col.axpy(amp, &us[i], 1.0);
        }
        for r in 0..p {
            col[r] += tau * rng.sample::<f64, _>(StandardNormal);
        }
        x.set_column(j, &col);
    }
    Ok((x, scores))
}

/// Draw a labeled two-class data set. Deterministic given `seed`: each
/// class gets its own derived rng stream, so the recorded scores for a
/// class do not depend on the other class's sizes.
pub fn sample_pair(
    pair: &PopulationPair,
    p: usize,
    n1: usize,
    n2: usize,
    seed: u64,
) -> Result<LabeledData> {
    if n1 == 0 || n2 == 0 {
        return Err(DpaError::InvalidConfig(
            "both classes need at least one observation".into(),
        ));
    }
    let mut rng1 = ChaCha8Rng::seed_from_u64(seed::derive(seed, 1));
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed::derive(seed, 2));
    let (x1, w1) = sample_class(&pair.class1, p, n1, &mut rng1)?;
    let (x2, w2) = sample_class(&pair.class2, p, n2, &mut rng2)?;

    let mut x = DMatrix::zeros(p, n1 + n2);
    x.columns_mut(0, n1).copy_from(&x1);
    x.columns_mut(n1, n2).copy_from(&x2);
    let mut labels = vec![1u8; n1];
    labels.extend(std::iter::repeat_n(2u8, n2));
    Ok(LabeledData {
        x,
        labels,
        true_scores: Some([w1, w2]),
    })
}

/// Identifiers of the ten shipped simulation settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
}

impl SettingId {
    /// All settings in order.
    pub const ALL: [SettingId; 10] = [
        SettingId::I,
        SettingId::II,
        SettingId::III,
        SettingId::IV,
        SettingId::V,
        SettingId::VI,
        SettingId::VII,
        SettingId::VIII,
        SettingId::IX,
        SettingId::X,
    ];
}

impl std::fmt::Display for SettingId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SettingId::I => "I",
            SettingId::II => "II",
            SettingId::III => "III",
            SettingId::IV => "IV",
            SettingId::V => "V",
            SettingId::VI => "VI",
            SettingId::VII => "VII",
            SettingId::VIII => "VIII",
            SettingId::IX => "IX",
            SettingId::X => "X",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SettingId {
    type Err = DpaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_uppercase().as_str() {
            "I" | "1" => Ok(SettingId::I),
            "II" | "2" => Ok(SettingId::II),
            "III" | "3" => Ok(SettingId::III),
            "IV" | "4" => Ok(SettingId::IV),
            "V" | "5" => Ok(SettingId::V),
            "VI" | "6" => Ok(SettingId::VI),
            "VII" | "7" => Ok(SettingId::VII),
            "VIII" | "8" => Ok(SettingId::VIII),
            "IX" | "9" => Ok(SettingId::IX),
            "X" | "10" => Ok(SettingId::X),
            other => Err(DpaError::InvalidConfig(format!(
                "unknown setting id '{other}'"
            ))),
        }
    }
}

/// Class-1 mean pattern: `δ² = 1` concentrated on the first eighth of the
/// coordinates.
fn mean1() -> MeanPattern {
    MeanPattern {
        blocks: vec![Block {
            start_fraction: 0.0,
            end_fraction: 0.125,
            coefficient: 1.0,
        }],
        scale: 1.0,
    }
}

fn pat(triples: &[(f64, f64, f64)]) -> EigvecPattern {
    EigvecPattern::from_triples(triples).expect("preset pattern is valid")
}

/// Class-1 eigenvector patterns (halves, plus an eighth-block alternating
/// pattern for the 3-spike variants).
fn class1_patterns() -> [EigvecPattern; 3] {
    [
        pat(&[(0.0, 0.5, 1.0)]),
        pat(&[(0.5, 1.0, 1.0)]),
        pat(&[
            (0.0, 0.25, 1.0),
            (0.25, 0.5, -1.0),
            (0.5, 0.75, 1.0),
            (0.75, 1.0, -1.0),
        ]),
    ]
}

/// Class-2 eigenvector patterns (uniform plus two quarter-block
/// alternating patterns).
fn class2_patterns() -> [EigvecPattern; 3] {
    [
        pat(&[(0.0, 1.0, 1.0)]),
        pat(&[(0.0, 0.25, 1.0), (0.5, 0.75, -1.0)]),
        pat(&[(0.25, 0.5, 1.0), (0.75, 1.0, -1.0)]),
    ]
}

fn spikes_from(patterns: &[EigvecPattern], sigma2s: &[f64], beta: f64) -> Vec<Spike> {
    patterns
        .iter()
        .zip(sigma2s)
        .map(|(u, &sigma2)| Spike {
            sigma2,
            beta,
            u: u.clone(),
        })
        .collect()
}

/// Construct one of the ten shipped settings. `p` is used only to verify
/// that the block patterns are realizable at that dimension.
pub fn make_setting(id: SettingId, p: usize) -> Result<PopulationPair> {
    let u1 = class1_patterns();
    let u2 = class2_patterns();
    let tau30 = 30.0;
    let tau15 = 15.0;

    // (β₁, β₂, class-1 third spike, τ₂², m, shared covariance for I/II)
    let (beta1, beta2, third_spike, tau2_sq, m, common_cov) = match id {
        SettingId::I => (0.5, 0.5, false, tau30, 0, true),
        SettingId::II => (1.0, 1.0, false, tau30, 2, true),
        SettingId::III => (0.5, 0.5, false, tau30, 0, false),
        SettingId::IV => (1.0, 0.5, false, tau30, 2, false),
        SettingId::V => (1.0, 1.0, false, tau30, 3, false),
        SettingId::VI => (1.0, 1.0, true, tau30, 4, false),
        SettingId::VII => (0.5, 0.5, false, tau15, 0, false),
        SettingId::VIII => (1.0, 0.5, false, tau15, 2, false),
        SettingId::IX => (1.0, 1.0, false, tau15, 3, false),
        SettingId::X => (1.0, 1.0, true, tau15, 4, false),
    };

    let class1_spikes = if third_spike {
        spikes_from(&u1, &[20.0, 10.0, 5.0], beta1)
    } else {
        spikes_from(&u1[..2], &[20.0, 10.0], beta1)
    };
    let class2_spikes = if common_cov {
        spikes_from(&u1[..2], &[20.0, 10.0], beta2)
    } else {
        spikes_from(&u2, &[20.0, 10.0, 5.0], beta2)
    };

    let class1 = ClassModel::new(mean1(), class1_spikes, tau30)?;
    let class2 = ClassModel::new(
        MeanPattern::zero(),
        class2_spikes,
        if common_cov { tau30 } else { tau2_sq },
    )?;
    let pair = PopulationPair::new(class1, class2, (0.5, 0.5), m, 1.0)?;

    // Fail early if the requested dimension cannot carry the patterns.
    for s in pair.class1.spikes.iter().chain(pair.class2.spikes.iter()) {
        s.u.realize(p)?;
    }
    pair.class1.mean.realize(p)?;
    Ok(pair)
}
