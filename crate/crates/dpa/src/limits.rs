//! Theory oracle: closed-form asymptotic limits, conditional on the true
//! principal-component scores.
//!
//! Given the recorded scores of a sampled training set, these functions
//! predict the `p → ∞` limits of every sample quantity the geometry
//! module computes: scaled eigenvalues `λ̂ᵢ/p`, the cosines of the angles
//! between sample eigenvectors and the common leading eigenspace `𝒰`,
//! the piling distance `κ_MDP`, the test-data piling offsets `ν₁`/`ν₂`,
//! the ridge-direction norm limits `γ` (equal tails) / `γ₁`, `γ₂`
//! (unequal tails), the data-splitting piling constant `υ₀`, and the
//! ridge-preference probability `ζ`. They exist so the Monte Carlo
//! convergence suites can compare empirical values against exact
//! score-conditional predictions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::DpaError;
use crate::geometry::Regime;
use crate::model::{LabeledData, PopulationPair};
use crate::Result;

mod betainc;

pub use betainc::{f_cdf, ln_gamma, regularized_incomplete_beta};

/// Everything the limit formulas need, extracted from one draw's true
/// scores and the population's realized eigenvector geometry.
#[derive(Clone, Debug)]
pub struct ScoreSummary {
    pub n1: usize,
    pub n2: usize,
    /// Dimension of the common leading eigenspace `𝒰`.
    pub m: usize,
    /// Spike counts per class (weak-spiked classes keep their counts, but
    /// their rotations are zero and they drop out of the strong-spike
    /// formulas).
    pub m1: usize,
    pub m2: usize,
    /// True score matrices `W_k` (`n_k × m_k`, entries `σ_{k,i} z_{k,i,j}`).
    pub w1: DMatrix<f64>,
    pub w2: DMatrix<f64>,
    /// Rotations `R_k = U₁ᵀU_{k,1}` (`m × m_k`) into the common basis;
    /// zero for a weak-spiked class.
    pub r1: DMatrix<f64>,
    pub r2: DMatrix<f64>,
    /// Centered score Gram matrices `Φ_k = W_kᵀ(I − n_k⁻¹J)W_k`.
    pub phi1: DMatrix<f64>,
    pub phi2: DMatrix<f64>,
    /// Pooled `Φ = Wᵀ(I − J)W = R₁Φ₁R₁ᵀ + R₂Φ₂R₂ᵀ` (`m × m`).
    pub phi: DMatrix<f64>,
    /// The `(m₁+m₂)×(m₁+m₂)` two-block matrix `Φ_{τ₁,τ₂}`.
    pub phi_tau: DMatrix<f64>,
    /// Cosines `cos θ_j` of the angles between the mean difference and
    /// the common basis vectors (length `m`).
    pub cos_thetas: DVector<f64>,
    /// `cos²φ = Σⱼ cos²θⱼ`.
    pub cos2_phi: f64,
    pub delta2: f64,
    pub tau1_sq: f64,
    pub tau2_sq: f64,
}

/// Symmetric positive-semidefinite square root.
fn sym_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.nrows() == 0 {
        return a.clone();
    }
    let eig = a.clone().symmetric_eigen();
    let mut s = DMatrix::zeros(a.nrows(), a.nrows());
    for i in 0..a.nrows() {
        s[(i, i)] = eig.eigenvalues[i].max(0.0).sqrt();
    }
    &eig.eigenvectors * s * eig.eigenvectors.transpose()
}

/// Eigenvalues (descending) and eigenvectors of a symmetric matrix.
fn sorted_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if a.nrows() == 0 {
        return (Vec::new(), a.clone());
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Centered Gram matrix `Wᵀ(I − n⁻¹J)W` of a score matrix.
fn centered_gram(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    if n == 0 || w.ncols() == 0 {
        return DMatrix::zeros(w.ncols(), w.ncols());
    }
    let mean = w.row_mean();
    let mut c = w.clone();
    for i in 0..n {
        let centered = c.row(i) - &mean;
        c.row_mut(i).copy_from(&centered);
    }
    c.transpose() * c
}

impl ScoreSummary {
    /// Assemble a summary from its raw parts, computing the derived Gram
    /// matrices and `Φ_{τ₁,τ₂}`.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        w1: DMatrix<f64>,
        w2: DMatrix<f64>,
        r1: DMatrix<f64>,
        r2: DMatrix<f64>,
        cos_thetas: DVector<f64>,
        delta2: f64,
        tau1_sq: f64,
        tau2_sq: f64,
        m: usize,
    ) -> Result<Self> {
        let (n1, m1) = w1.shape();
        let (n2, m2) = w2.shape();
        if r1.shape() != (m, m1) || r2.shape() != (m, m2) || cos_thetas.len() != m {
            return Err(DpaError::InvalidConfig(
                "score summary parts have inconsistent shapes".into(),
            ));
        }
        let phi1 = centered_gram(&w1);
        let phi2 = centered_gram(&w2);
        let phi = &r1 * &phi1 * r1.transpose() + &r2 * &phi2 * r2.transpose();

        let phi1_h = sym_sqrt(&phi1);
        let phi2_h = sym_sqrt(&phi2);
        let cross = &phi1_h * r1.transpose() * &r2 * &phi2_h;
        let mut phi_tau = DMatrix::zeros(m1 + m2, m1 + m2);
        phi_tau
            .view_mut((0, 0), (m1, m1))
            .copy_from(&(&phi1 + DMatrix::identity(m1, m1) * tau1_sq));
        phi_tau
            .view_mut((m1, m1), (m2, m2))
            .copy_from(&(&phi2 + DMatrix::identity(m2, m2) * tau2_sq));
        phi_tau.view_mut((0, m1), (m1, m2)).copy_from(&cross);
        phi_tau
            .view_mut((m1, 0), (m2, m1))
            .copy_from(&cross.transpose());

        let cos2_phi = cos_thetas.norm_squared();
        Ok(Self {
            n1,
            n2,
            m,
            m1,
            m2,
            w1,
            w2,
            r1,
            r2,
            phi1,
            phi2,
            phi,
            phi_tau,
            cos_thetas,
            cos2_phi,
            delta2,
            tau1_sq,
            tau2_sq,
        })
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn eta1(&self) -> f64 {
        self.n1 as f64 / self.n() as f64
    }

    pub fn eta2(&self) -> f64 {
        self.n2 as f64 / self.n() as f64
    }

    /// The mean-vs-score vector `r`:
    /// `r_j = cosθ_j·δ + [R₁w̄₁]_j − [R₂w̄₂]_j`, with `w̄_k` the column
    /// means of `W_k`.
    pub fn r_vector(&self) -> DVector<f64> {
        let delta = self.delta2.sqrt();
        let mut r = &self.cos_thetas * delta;
        if self.m > 0 {
            if self.w1.nrows() > 0 && self.w1.ncols() > 0 {
                let w1bar = self.w1.row_mean().transpose();
                r += &self.r1 * w1bar;
            }
            if self.w2.nrows() > 0 && self.w2.ncols() > 0 {
                let w2bar = self.w2.row_mean().transpose();
                r -= &self.r2 * w2bar;
            }
        }
        r
    }

    /// Eigenvalues `φ_l(Φ_{τ₁,τ₂})` (descending) and the common-basis
    /// images `ω_l = R₁Φ₁^{1/2}ṽ_{l,1} + R₂Φ₂^{1/2}ṽ_{l,2}` of its
    /// eigenvectors.
    pub fn omegas(&self) -> (Vec<f64>, Vec<DVector<f64>>) {
        let (phis, vecs) = sorted_eigen(&self.phi_tau);
        let phi1_h = sym_sqrt(&self.phi1);
        let phi2_h = sym_sqrt(&self.phi2);
        let map1 = &self.r1 * phi1_h;
        let map2 = &self.r2 * phi2_h;
        let omegas = (0..phis.len())
            .map(|l| {
                let v = vecs.column(l);
                let v1 = DVector::from_iterator(self.m1, (0..self.m1).map(|i| v[i]));
                let v2 = DVector::from_iterator(self.m2, (0..self.m2).map(|i| v[self.m1 + i]));
                &map1 * v1 + &map2 * v2
            })
            .collect();
        (phis, omegas)
    }

    /// `k₀`: the number of eigenvalues of `Φ_{τ₁,τ₂}` exceeding `τ₁²`.
    pub fn k0(&self) -> usize {
        let (phis, _) = sorted_eigen(&self.phi_tau);
        phis.iter().filter(|&&v| v > self.tau1_sq).count()
    }

    /// The unobservable index set `𝒟′` (1-based, strong/strong regimes):
    /// `{1..k₀} ∪ {k₀+(n₁−m₁) .. n₁+m₂−1}`.
    pub fn d_prime(&self) -> Vec<usize> {
        if self.m == 0 {
            return Vec::new();
        }
        let k0 = self.k0();
        (1..=k0)
            .chain(k0 + self.n1 - self.m1..self.n1 + self.m2)
            .collect()
    }
}

/// Realized strong eigenvectors `(class, vector)` of a pair, class 1
/// first.
fn strong_eigenvectors(pair: &PopulationPair, p: usize) -> Result<Vec<(usize, DVector<f64>)>> {
    let mut out = Vec::new();
    for (k, class) in [(1usize, &pair.class1), (2usize, &pair.class2)] {
        if class.is_strong() {
            for s in &class.spikes {
                out.push((k, s.u.realize(p)?));
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of the realized common leading eigenspace `𝒰`
/// (`p × m`), built by Gram–Schmidt over the strong classes' realized
/// eigenvectors with class 1 first. Errors if the realized dimension
/// disagrees with the declared `m`.
pub fn common_basis(pair: &PopulationPair, p: usize) -> Result<DMatrix<f64>> {
    let strong_vecs = strong_eigenvectors(pair, p)?;
    // Residuals below threshold are dependent directions already covered
    // by earlier vectors.
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for (_, v) in &strong_vecs {
        let mut res = v.clone();
        for b in &basis {
            let c = b.dot(&res);
            res.axpy(-c, b, 1.0);
        }
        let norm = res.norm();
        if norm > 1e-8 {
            basis.push(res / norm);
        }
    }
    if basis.len() != pair.m {
        return Err(DpaError::InvalidModel(format!(
            "realized common eigenspace has dimension {} but the pair declares m = {}",
            basis.len(),
            pair.m
        )));
    }
    if basis.is_empty() {
        return Ok(DMatrix::zeros(p, 0));
    }
    Ok(DMatrix::from_columns(&basis))
}

/// Build a score summary for a sampled data set: realizes the strong
/// classes' eigenvectors at the working dimension, builds the common
/// basis `U₁` by Gram–Schmidt (class 1 first), and extracts the rotation
/// matrices and mean angles.
pub fn score_summary(pair: &PopulationPair, data: &LabeledData, p: usize) -> Result<ScoreSummary> {
    let scores = data.true_scores.as_ref().ok_or_else(|| {
        DpaError::InvalidConfig("score summary needs data with recorded true scores".into())
    })?;

    let strong_vecs = strong_eigenvectors(pair, p)?;
    let basis_mat = common_basis(pair, p)?;
    let m = pair.m;
    let basis: Vec<DVector<f64>> = (0..m).map(|j| basis_mat.column(j).into_owned()).collect();

    // Rotations R_k = U₁ᵀ U_{k,1} for strong classes, zero otherwise.
    let m1 = pair.class1.m_k();
    let m2 = pair.class2.m_k();
    let mut r1 = DMatrix::zeros(m, m1);
    let mut r2 = DMatrix::zeros(m, m2);
    let mut col1 = 0;
    let mut col2 = 0;
    for (k, v) in &strong_vecs {
        for (j, b) in basis.iter().enumerate() {
            let c = b.dot(v);
            if *k == 1 {
                r1[(j, col1)] = c;
            } else {
                r2[(j, col2)] = c;
            }
        }
        if *k == 1 {
            col1 += 1;
        } else {
            col2 += 1;
        }
    }

    // Assumption: the stacked rotation [R₁ R₂] must have rank m.
    if m > 0 {
        let stacked = {
            let mut s = DMatrix::zeros(m, m1 + m2);
            s.view_mut((0, 0), (m, m1)).copy_from(&r1);
            s.view_mut((0, m1), (m, m2)).copy_from(&r2);
            s
        };
        let svals = stacked.svd(false, false).singular_values;
        if svals.iter().filter(|&&s| s > 1e-8).count() < m {
            return Err(DpaError::InvalidModel(
                "stacked rotation matrix is rank deficient (violates the common-basis assumption)"
                    .into(),
            ));
        }
    }

    // Mean-difference angles against the common basis.
    let mu1 = pair.class1.mean.realize(p)?;
    let mu2 = pair.class2.mean.realize(p)?;
    let mu = mu1 - mu2;
    let mu_norm = mu.norm();
    let delta2 = mu_norm * mu_norm / p as f64;
    let cos_thetas = DVector::from_iterator(
        m,
        basis.iter().map(|b| {
            if mu_norm > 0.0 {
                b.dot(&mu) / mu_norm
            } else {
                0.0
            }
        }),
    );

    ScoreSummary::assemble(
        scores[0].clone(),
        scores[1].clone(),
        r1,
        r2,
        cos_thetas,
        delta2,
        pair.class1.tail_var,
        pair.class2.tail_var,
        m,
    )
}

/// Check the tail-order convention the unequal-tail formulas assume.
fn require_tau_order(s: &ScoreSummary) -> Result<()> {
    if s.tau1_sq + 1e-12 * s.tau1_sq.max(s.tau2_sq) < s.tau2_sq {
        return Err(DpaError::InvalidConfig(
            "limit formulas assume τ₁² ≥ τ₂²; swap the class roles".into(),
        ));
    }
    Ok(())
}

/// Predicted limits of the scaled sample eigenvalues `λ̂ᵢ/p`
/// (length `n−2`), plus the split index `k₀` (strong/strong unequal) or
/// `k₁` (weak/strong) where applicable.
pub fn eigenvalue_limits(s: &ScoreSummary, regime: Regime) -> Result<(Vec<f64>, Option<usize>)> {
    let (n1, n2) = (s.n1, s.n2);
    let (t1, t2) = (s.tau1_sq, s.tau2_sq);
    match regime {
        Regime::WeakWeak => {
            let mut v: Vec<f64> = std::iter::repeat_n(t1, n1 - 1)
                .chain(std::iter::repeat_n(t2, n2 - 1))
                .collect();
            v.sort_by(|a, b| b.total_cmp(a));
            Ok((v, None))
        }
        Regime::StrongWeak => {
            require_tau_order(s)?;
            let (phis, _) = sorted_eigen(&s.phi1);
            let mut v: Vec<f64> = phis.iter().map(|f| f + t1).collect();
            v.extend(std::iter::repeat_n(t1, n1 - s.m1 - 1));
            v.extend(std::iter::repeat_n(t2, n2 - 1));
            Ok((v, None))
        }
        Regime::WeakStrong { .. } => {
            require_tau_order(s)?;
            let (phis, _) = sorted_eigen(&s.phi2);
            let psis: Vec<f64> = phis.iter().map(|f| f + t2).collect();
            let k1 = psis.iter().filter(|&&x| x > t1).count();
            let mut v: Vec<f64> = psis[..k1].to_vec();
            v.extend(std::iter::repeat_n(t1, n1 - 1));
            v.extend_from_slice(&psis[k1..]);
            v.extend(std::iter::repeat_n(t2, n2 - s.m2 - 1));
            Ok((v, Some(k1)))
        }
        Regime::StrongStrongEqualTail => {
            let (phis, _) = sorted_eigen(&s.phi);
            let mut v: Vec<f64> = phis.iter().map(|f| f + t1).collect();
            v.extend(std::iter::repeat_n(t1, s.n() - s.m - 2));
            Ok((v, None))
        }
        Regime::StrongStrongUnequalTail { .. } => {
            require_tau_order(s)?;
            let (phis, _) = sorted_eigen(&s.phi_tau);
            let k0 = phis.iter().filter(|&&x| x > t1).count();
            let mut v: Vec<f64> = phis[..k0].to_vec();
            v.extend(std::iter::repeat_n(t1, n1 - s.m1 - 1));
            v.extend_from_slice(&phis[k0..]);
            v.extend(std::iter::repeat_n(t2, n2 - s.m2 - 1));
            Ok((v, Some(k0)))
        }
    }
}

/// Predicted limits of `cos(Angle(ûᵢ, 𝒰))` per sample eigenvector
/// (length `n−2`; zero outside the index set `𝒟`).
pub fn angle_limits(s: &ScoreSummary, regime: Regime) -> Result<Vec<f64>> {
    let n_minus_2 = s.n() - 2;
    let mut out = vec![0.0; n_minus_2];
    match regime {
        Regime::WeakWeak => {}
        Regime::StrongWeak => {
            let (phis, _) = sorted_eigen(&s.phi1);
            for (i, &f) in phis.iter().enumerate() {
                out[i] = (f / (f + s.tau1_sq)).max(0.0).sqrt();
            }
        }
        Regime::WeakStrong { .. } => {
            require_tau_order(s)?;
            let (phis, _) = sorted_eigen(&s.phi2);
            let k1 = phis.iter().filter(|&&f| f + s.tau2_sq > s.tau1_sq).count();
            for (i, &f) in phis.iter().enumerate() {
                let b = (f / (f + s.tau2_sq)).max(0.0).sqrt();
                // Positions track the eigenvalue layout: the first k₁
                // spike limits sit above the τ₁² run, the rest below it.
                let pos = if i < k1 { i } else { i + s.n1 - 1 };
                out[pos] = b;
            }
        }
        Regime::StrongStrongEqualTail => {
            let (phis, _) = sorted_eigen(&s.phi);
            for (i, &f) in phis.iter().enumerate() {
                out[i] = (f / (f + s.tau1_sq)).max(0.0).sqrt();
            }
        }
        Regime::StrongStrongUnequalTail { .. } => {
            require_tau_order(s)?;
            let (phis, omegas) = s.omegas();
            let k0 = phis.iter().filter(|&&x| x > s.tau1_sq).count();
            for (l, (&phi_l, omega_l)) in phis.iter().zip(&omegas).enumerate() {
                let d_l = if phi_l > 0.0 {
                    (omega_l.norm_squared() / phi_l).min(1.0).sqrt()
                } else {
                    0.0
                };
                let pos = if l < k0 { l } else { l + s.n1 - s.m1 - 1 };
                out[pos] = d_l;
            }
        }
    }
    Ok(out)
}

/// The predicted limit of `κ_MDP` for a regime.
///
/// All regimes share the decomposition
/// `κ² = (1−cos²φ)δ² + τ₁²/n₁ + τ₂²/n₂ + ‖r‖² − P`,
/// where `P` is the squared mass of `r` recovered by the sample
/// eigendirections in `𝒟` (each term an angle limit squared times a
/// projection coefficient squared).
pub fn kappa_limit(s: &ScoreSummary, regime: Regime) -> Result<f64> {
    let r = s.r_vector();
    let base = (1.0 - s.cos2_phi) * s.delta2
        + s.tau1_sq / s.n1 as f64
        + s.tau2_sq / s.n2 as f64
        + r.norm_squared();
    let p_mass = match regime {
        Regime::WeakWeak => 0.0,
        Regime::StrongWeak => {
            require_tau_order(s)?;
            let (phis, vecs) = sorted_eigen(&s.phi1);
            (0..s.m1)
                .map(|i| {
                    let dir = &s.r1 * vecs.column(i).into_owned();
                    phis[i] / (phis[i] + s.tau1_sq) * r.dot(&dir).powi(2)
                })
                .sum()
        }
        Regime::WeakStrong { .. } => {
            require_tau_order(s)?;
            let (phis, vecs) = sorted_eigen(&s.phi2);
            (0..s.m2)
                .map(|i| {
                    let dir = &s.r2 * vecs.column(i).into_owned();
                    phis[i] / (phis[i] + s.tau2_sq) * r.dot(&dir).powi(2)
                })
                .sum()
        }
        Regime::StrongStrongEqualTail => {
            let (phis, vecs) = sorted_eigen(&s.phi);
            (0..s.m)
                .map(|i| {
                    phis[i] / (phis[i] + s.tau1_sq) * r.dot(&vecs.column(i).into_owned()).powi(2)
                })
                .sum()
        }
        Regime::StrongStrongUnequalTail { .. } => {
            require_tau_order(s)?;
            let (phis, omegas) = s.omegas();
            phis.iter()
                .zip(&omegas)
                .filter(|(&phi_l, _)| phi_l > 0.0)
                .map(|(&phi_l, omega_l)| r.dot(omega_l).powi(2) / phi_l)
                .sum()
        }
    };
    let k2 = base - p_mass;
    if k2 <= 0.0 {
        return Err(DpaError::Degenerate(format!(
            "predicted κ² = {k2} is not positive"
        )));
    }
    Ok(k2.sqrt())
}

/// Predicted test-data piling offsets `(ν₁, ν₂)`:
/// `ν₁ = κ⁻¹(η₂(1−cos²φ)δ² − (τ₁²−τ₂²)/n)` and
/// `ν₂ = κ⁻¹(−η₁(1−cos²φ)δ² − (τ₁²−τ₂²)/n)`.
pub fn piling_offsets(s: &ScoreSummary, regime: Regime) -> Result<(f64, f64)> {
    let kappa = kappa_limit(s, regime)?;
    let sep = (1.0 - s.cos2_phi) * s.delta2;
    let tail = (s.tau1_sq - s.tau2_sq) / s.n() as f64;
    Ok((
        (s.eta2() * sep - tail) / kappa,
        (-s.eta1() * sep - tail) / kappa,
    ))
}

/// Output of [`gamma_upsilon_limits`].
#[derive(Clone, Debug)]
pub struct GammaUpsilon {
    /// `[γ]` for equal tails, `[γ₁, γ₂]` for unequal tails.
    pub gammas: Vec<f64>,
    /// The data-splitting piling constant `υ₀`.
    pub upsilon0: f64,
}

/// The `(m₁+m₂)×m` matrix with rows `ω_lᵀ/√φ_l`.
fn omega_tilde1(s: &ScoreSummary) -> DMatrix<f64> {
    let (phis, omegas) = s.omegas();
    let mut o = DMatrix::zeros(s.m1 + s.m2, s.m);
    for (l, (&phi_l, omega_l)) in phis.iter().zip(&omegas).enumerate() {
        if phi_l > 0.0 {
            let scale = phi_l.sqrt().recip();
            for j in 0..s.m {
                o[(l, j)] = omega_l[j] * scale;
            }
        }
    }
    o
}

/// `υ₀` from the normalized rotation stack:
/// `υ₀ = (κ² + rᵀ(I−G⁻¹)G(I−G⁻¹)r)^{−1/2}` with `G = Ω̃₁ᵀΩ̃₁`.
fn upsilon0_from(s: &ScoreSummary, kappa2: f64) -> Result<f64> {
    if s.m == 0 {
        return Ok(kappa2.sqrt().recip());
    }
    let r = s.r_vector();
    let o = omega_tilde1(s);
    let g = o.transpose() * &o;
    let g_inv = g.clone().try_inverse().ok_or_else(|| {
        DpaError::Degenerate("Ω̃₁ᵀΩ̃₁ is singular; rotation stack rank deficient".into())
    })?;
    let shrink = DMatrix::identity(s.m, s.m) - g_inv;
    let q = (&shrink * &g * &shrink * &r).dot(&r);
    Ok((kappa2 + q).sqrt().recip())
}

/// Predicted ridge-norm limits `γ` (equal tails) or `γ₁`, `γ₂` (unequal
/// tails), together with `υ₀`. Defined for the strong/strong regimes.
pub fn gamma_upsilon_limits(s: &ScoreSummary, regime: Regime) -> Result<GammaUpsilon> {
    let r = s.r_vector();
    match regime {
        Regime::StrongStrongEqualTail => {
            let kappa = kappa_limit(s, regime)?;
            let kappa2 = kappa * kappa;
            let tau2 = s.tau1_sq;
            let (phis, vecs) = sorted_eigen(&s.phi);
            let mut inv_g2 = kappa2;
            for (i, &f) in phis.iter().enumerate().take(s.m) {
                if f > 0.0 {
                    inv_g2 += tau2 * tau2 / (f * (f + tau2))
                        * r.dot(&vecs.column(i).into_owned()).powi(2);
                }
            }
            Ok(GammaUpsilon {
                gammas: vec![inv_g2.sqrt().recip()],
                upsilon0: upsilon0_from(s, kappa2)?,
            })
        }
        Regime::StrongStrongUnequalTail { .. } => {
            require_tau_order(s)?;
            let kappa = kappa_limit(s, regime)?;
            let kappa2 = kappa * kappa;
            let (phis, omegas) = s.omegas();
            let mut gammas = Vec::with_capacity(2);
            for tau_k in [s.tau1_sq, s.tau2_sq] {
                let mut inv_g2 = kappa2;
                for (&phi_l, omega_l) in phis.iter().zip(&omegas) {
                    if phi_l <= 0.0 {
                        continue;
                    }
                    // Directions with no limit mass (D_l ≈ 0) contribute
                    // nothing; skipping them avoids spurious poles when an
                    // eigenvalue numerically coincides with a tail value.
                    if omega_l.norm_squared() / phi_l < 1e-10 {
                        continue;
                    }
                    let gap = phi_l - tau_k;
                    if gap.abs() < 1e-9 * tau_k {
                        return Err(DpaError::Degenerate(format!(
                            "ridge-norm limit pole: φ_l(Φ_τ) = {phi_l} coincides with τ_k² = {tau_k}"
                        )));
                    }
                    inv_g2 += tau_k * tau_k * r.dot(omega_l).powi(2) / (gap * gap * phi_l);
                }
                gammas.push(inv_g2.sqrt().recip());
            }
            Ok(GammaUpsilon {
                gammas,
                upsilon0: upsilon0_from(s, kappa2)?,
            })
        }
        other => Err(DpaError::InvalidConfig(format!(
            "ridge-norm limits are defined for strong/strong regimes, not {other:?}"
        ))),
    }
}

/// The probability `ζ` that the class-2 tail estimate yields the better
/// projected-ridge direction:
/// `ζ = P(F ≤ ((n₂−1)τ₂⁻²σ²₂)/((n₁−1)τ₁⁻²σ²₁))` with
/// `F ~ F(n₁−1, n₂−1)`.
pub fn ridge_preference_zeta(
    n1: usize,
    n2: usize,
    sigma1_sq: f64,
    sigma2_sq: f64,
    tau1_sq: f64,
    tau2_sq: f64,
) -> Result<f64> {
    if n1 < 2 || n2 < 2 {
        return Err(DpaError::InvalidConfig("ζ needs n₁, n₂ ≥ 2".into()));
    }
    if sigma1_sq <= 0.0 || sigma2_sq <= 0.0 || tau1_sq <= 0.0 || tau2_sq <= 0.0 {
        return Err(DpaError::InvalidConfig("ζ needs positive variances".into()));
    }
    let d1 = (n1 - 1) as f64;
    let d2 = (n2 - 1) as f64;
    let threshold = d2 * sigma2_sq / tau2_sq / (d1 * sigma1_sq / tau1_sq);
    Ok(f_cdf(threshold, d1, d2))
}

/// The matrices characterizing the limit of the projected test scatter
/// `p⁻¹VᵀS_W*V` in the data-splitting construction.
#[derive(Clone, Debug)]
pub struct SmdpScaffold {
    /// `(m₁+m₂)×m` training rotation stack with rows `ω_lᵀ/√φ_l`.
    pub omega_tilde1: DMatrix<f64>,
    /// `(n−1)×m`: `Ω̃₁` rows embedded at the `𝒟′` positions, last row
    /// `ω₁ᵀ = κ⁻¹rᵀ(I − Ω̃₁ᵀΩ̃₁)`.
    pub omega: DMatrix<f64>,
    /// Test-scores analogue of `Ω̃₁`.
    pub omega_tilde1_star: DMatrix<f64>,
    /// `Ξ = Ω Ω̃₁*ᵀ`, the limit inner products between train and test
    /// sample eigenvectors (columns indexed by the test `𝒟′*`).
    pub xi: DMatrix<f64>,
    /// `L = Ξ·Diag(φ_{l'}(Φ*_{τ₁,τ₂}))·Ξᵀ`, the `(n−1)×(n−1)` limit of
    /// `p⁻¹VᵀS_W*V`; rank `m`.
    pub l_matrix: DMatrix<f64>,
    /// The training `𝒟′` (1-based positions in `1..n−2`).
    pub d_prime: Vec<usize>,
}

/// Build the limit scaffold of the projected test scatter from the
/// training summary and an independent test draw's scores
/// `(W₁*, W₂*)`.
pub fn smdp_limit_scaffold(
    s: &ScoreSummary,
    test_scores: (&DMatrix<f64>, &DMatrix<f64>),
) -> Result<SmdpScaffold> {
    let n_minus_1 = s.n() - 1;
    if s.m == 0 {
        // No common eigenspace: every limit inner product vanishes.
        let zero_mm = DMatrix::zeros(s.m1 + s.m2, 0);
        return Ok(SmdpScaffold {
            omega_tilde1: zero_mm.clone(),
            omega: DMatrix::zeros(n_minus_1, 0),
            omega_tilde1_star: zero_mm,
            xi: DMatrix::zeros(n_minus_1, s.m1 + s.m2),
            l_matrix: DMatrix::zeros(n_minus_1, n_minus_1),
            d_prime: Vec::new(),
        });
    }

    let kappa = kappa_limit(
        s,
        if (s.tau1_sq - s.tau2_sq).abs() <= 1e-12 * s.tau1_sq.max(s.tau2_sq) {
            Regime::StrongStrongEqualTail
        } else {
            Regime::StrongStrongUnequalTail {
                m_exceeds_m1: s.m > s.m1,
            }
        },
    )?;
    let ot1 = omega_tilde1(s);
    let r = s.r_vector();
    let omega1_row = (&r - ot1.transpose() * &ot1 * &r) / kappa;

    let d_prime = s.d_prime();
    let mut omega = DMatrix::zeros(n_minus_1, s.m);
    for (l, &pos) in d_prime.iter().enumerate() {
        for j in 0..s.m {
            omega[(pos - 1, j)] = ot1[(l, j)];
        }
    }
    for j in 0..s.m {
        omega[(n_minus_1 - 1, j)] = omega1_row[j];
    }

    // Test-side summary re-uses the training rotations and tails.
    let star = ScoreSummary::assemble(
        test_scores.0.clone(),
        test_scores.1.clone(),
        s.r1.clone(),
        s.r2.clone(),
        s.cos_thetas.clone(),
        s.delta2,
        s.tau1_sq,
        s.tau2_sq,
        s.m,
    )?;
    let ot1_star = omega_tilde1(&star);
    let (phis_star, _) = sorted_eigen(&star.phi_tau);

    let xi = &omega * ot1_star.transpose();
    let mut weighted = xi.clone();
    for (c, &phi) in phis_star.iter().enumerate() {
        weighted.column_mut(c).scale_mut(phi);
    }
    let l_matrix = &weighted * xi.transpose();

    Ok(SmdpScaffold {
        omega_tilde1: ot1,
        omega,
        omega_tilde1_star: ot1_star,
        xi,
        l_matrix,
        d_prime,
    })
}

/// Serializable bundle of every limit prediction for one draw.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub regime: String,
    pub eigenvalue_limits: Vec<f64>,
    pub angle_limits: Vec<f64>,
    pub nu1: f64,
    pub nu2: f64,
    pub kappa: f64,
    /// `[γ]` or `[γ₁, γ₂]`; empty when the regime has no ridge-norm
    /// limits.
    pub gammas: Vec<f64>,
    pub upsilon0: Option<f64>,
    /// `k₀` (strong/strong unequal) or `k₁` (weak/strong).
    pub k_index: Option<usize>,
}

/// Assemble the full limit report for one draw.
pub fn limit_report(s: &ScoreSummary, regime: Regime) -> Result<LimitReport> {
    let (eigenvalue_limits, k_index) = eigenvalue_limits(s, regime)?;
    let angle_limits = angle_limits(s, regime)?;
    let kappa = kappa_limit(s, regime)?;
    let (nu1, nu2) = piling_offsets(s, regime)?;
    let (gammas, upsilon0) = match gamma_upsilon_limits(s, regime) {
        Ok(gu) => (gu.gammas, Some(gu.upsilon0)),
        Err(_) => (Vec::new(), None),
    };
    Ok(LimitReport {
        regime: format!("{regime:?}"),
        eigenvalue_limits,
        angle_limits,
        nu1,
        nu2,
        kappa,
        gammas,
        upsilon0,
        k_index,
    })
}
