//! Sample geometry from training data via the `n×n` dual matrix.
//!
//! Everything a classifier needs is derived here: the eigenpairs of the
//! within-class scatter `S_W` (computed from the dual Gram matrix
//! `(X−X̄)ᵀ(X−X̄)`, never from the `p×p` primal), the maximal-data-piling
//! direction `w_MDP`, the piling distance `κ_MDP`, the ridge /
//! projected-ridge direction family, tail-variance estimators `α̂` and
//! `α̂_k`, and the index set `𝒟` of sample eigenvectors that stay
//! correlated with the common leading eigenspace.

use nalgebra::{DMatrix, DVector};

use crate::error::DpaError;
use crate::model::{LabeledData, PopulationPair};
use crate::Result;

/// Relative tolerance separating a genuine ridge pole from roundoff.
const POLE_TOL: f64 = 1e-10;

/// Relative threshold below which the piling component of `d` counts as
/// degenerate.
const PILING_TOL: f64 = 1e-12;

/// All sample geometry fitted from one training set.
#[derive(Clone, Debug)]
pub struct TrainedGeometry {
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    /// Mean difference `d = X̄₁ − X̄₂`.
    pub d: DVector<f64>,
    /// Pooled mean `X̄` of all training observations.
    pub xbar: DVector<f64>,
    /// Per-class means `[X̄₁, X̄₂]`.
    pub class_means: [DVector<f64>; 2],
    /// Sample eigenvectors `û₁..û_r` of `S_W` (columns; `r = n−2` absent
    /// rank deficiency), oriented so `ûᵢᵀd ≥ 0`.
    pub u1hat: DMatrix<f64>,
    /// Eigenvalues `λ̂₁ ≥ … ≥ λ̂_r` of `S_W`.
    pub lambdas: Vec<f64>,
    /// The maximal-data-piling direction (unit, `w_MDPᵀd > 0`).
    pub w_mdp: DVector<f64>,
    /// Piling distance `κ_MDP = p^{−1/2} w_MDPᵀ d`.
    pub kappa_mdp: f64,
    /// Eigenvalues of the per-class scatters `S₁`, `S₂`
    /// (lengths `n₁−1`, `n₂−1`), for the per-class estimators `α̂_k`.
    pub per_class_lambdas: [Vec<f64>; 2],
}

impl TrainedGeometry {
    /// Total sample size.
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Number of retained sample eigenpairs (`n−2` absent rank deficiency).
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }
}

/// Eigenvalues (descending) and eigenvectors of a symmetric matrix.
fn sorted_symmetric_eigen(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Fit all sample geometry from a labeled training set.
pub fn fit_geometry(data: &LabeledData) -> Result<TrainedGeometry> {
    let (n1, n2) = (data.n1(), data.n2());
    let p = data.p();
    if n1 < 2 || n2 < 2 {
        return Err(DpaError::InvalidConfig(format!(
            "geometry fitting needs at least 2 observations per class (got {n1}, {n2})"
        )));
    }
    let n = n1 + n2;

    let x1 = data.x.columns(0, n1);
    let x2 = data.x.columns(n1, n2);
    let mean1 = x1.column_mean();
    let mean2 = x2.column_mean();
    let xbar = (&mean1 * n1 as f64 + &mean2 * n2 as f64) / n as f64;
    let d = &mean1 - &mean2;

    // Class-centered data and its n×n dual Gram matrix.
    let mut xc = data.x.clone();
    for j in 0..n1 {
        xc.column_mut(j).axpy(-1.0, &mean1, 1.0);
    }
    for j in n1..n {
        xc.column_mut(j).axpy(-1.0, &mean2, 1.0);
    }
    let dual = xc.transpose() * &xc;
    let (dual_vals, dual_vecs) = sorted_symmetric_eigen(dual);

    // Retain the n−2 positive eigenvalues; warn and truncate on rank
    // deficiency.
    let lead = dual_vals[0].max(0.0);
    let mut rank = 0;
    for &v in dual_vals.iter().take(n - 2) {
        if v > lead * 1e-12 && v > 0.0 {
            rank += 1;
        }
    }
    if rank < n - 2 {
        eprintln!(
            "warning: within-class dual matrix is rank deficient ({} < {}); truncating",
            rank,
            n - 2
        );
    }
    if rank == 0 {
        return Err(DpaError::Degenerate(
            "within-class scatter has no positive eigenvalues".into(),
        ));
    }

    let mut lambdas = Vec::with_capacity(rank);
    let mut u_cols = Vec::with_capacity(rank);
    for (i, &lam) in dual_vals.iter().enumerate().take(rank) {
        lambdas.push(lam);
        // ûᵢ = λ̂ᵢ^{−1/2} (X − X̄) v̂ᵢ, sign-fixed so ûᵢᵀd ≥ 0.
        let mut u = (&xc * dual_vecs.column(i)) / lam.sqrt();
        if u.dot(&d) < 0.0 {
            u.neg_mut();
        }
        u_cols.push(u);
    }
    let u1hat = DMatrix::from_columns(&u_cols);

    // w_MDP ∝ Û₂Û₂ᵀd computed by complement: d − Û₁Û₁ᵀd.
    let coeffs = u1hat.transpose() * &d;
    let mut w = d.clone();
    w.gemv(-1.0, &u1hat, &coeffs, 1.0);
    let wnorm = w.norm();
    if wnorm < PILING_TOL * d.norm() {
        return Err(DpaError::Degenerate(
            "piling component of the mean difference vanishes (d lies in span(S_W))".into(),
        ));
    }
    let w_mdp = &w / wnorm;
    // w_MDPᵀd = ‖w‖ ≥ 0 by construction, so κ needs no absolute value.
    let kappa_mdp = w_mdp.dot(&d) / (p as f64).sqrt();

    // Per-class scatter eigenvalues from the class-wise dual matrices.
    let mut per_class_lambdas: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (k, (cols, mean, nk)) in [(x1, &mean1, n1), (x2, &mean2, n2)].into_iter().enumerate() {
        let mut ck = cols.into_owned();
        for j in 0..nk {
            ck.column_mut(j).axpy(-1.0, mean, 1.0);
        }
        let dual_k = ck.transpose() * &ck;
        let (vals, _) = sorted_symmetric_eigen(dual_k);
        per_class_lambdas[k] = vals.into_iter().take(nk - 1).map(|v| v.max(0.0)).collect();
    }

    Ok(TrainedGeometry {
        p,
        n1,
        n2,
        d,
        xbar,
        class_means: [mean1, mean2],
        u1hat,
        lambdas,
        w_mdp,
        kappa_mdp,
        per_class_lambdas,
    })
}

/// Asymptotic regime of a two-class population: which classes carry strong
/// (`β = 1`) spikes, and whether the tail eigenvalues coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Neither class strong-spiked.
    WeakWeak,
    /// Class 1 strong, class 2 weak.
    StrongWeak,
    /// Class 1 weak, class 2 strong.
    WeakStrong { equal_tails: bool },
    /// Both strong, `τ₁² = τ₂²`.
    StrongStrongEqualTail,
    /// Both strong, `τ₁² ≠ τ₂²`; the index set differs depending on
    /// whether the common eigenspace exceeds class 1's spike count.
    StrongStrongUnequalTail { m_exceeds_m1: bool },
}

impl Regime {
    /// Classify a population pair.
    pub fn of_pair(pair: &PopulationPair) -> Regime {
        let s1 = pair.class1.is_strong();
        let s2 = pair.class2.is_strong();
        let t1 = pair.class1.tail_var;
        let t2 = pair.class2.tail_var;
        let equal_tails = (t1 - t2).abs() <= 1e-12 * t1.max(t2);
        match (s1, s2) {
            (false, false) => Regime::WeakWeak,
            (true, false) => Regime::StrongWeak,
            (false, true) => Regime::WeakStrong { equal_tails },
            (true, true) => {
                if equal_tails {
                    Regime::StrongStrongEqualTail
                } else {
                    Regime::StrongStrongUnequalTail {
                        m_exceeds_m1: pair.m > pair.class1.m_k(),
                    }
                }
            }
        }
    }
}

/// The index set `𝒟` of sample eigenvectors asymptotically correlated
/// with the common leading eigenspace. Indices are 1-based positions into
/// `λ̂₁ ≥ … ≥ λ̂_{n−2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSetD {
    pub regime: Regime,
    pub indices: Vec<usize>,
}

/// Build the index set `𝒟` for a regime from the spike counts and `n₁`.
pub fn index_set_d(regime: Regime, m: usize, m1: usize, m2: usize, n1: usize) -> Result<IndexSetD> {
    let bad = |msg: String| Err(DpaError::InvalidConfig(msg));
    let indices: Vec<usize> = match regime {
        Regime::WeakWeak => {
            if m != 0 {
                return bad(format!("weak/weak regime requires m = 0, got {m}"));
            }
            Vec::new()
        }
        Regime::StrongWeak => {
            if m != m1 || m1 == 0 {
                return bad(format!(
                    "strong/weak regime requires m = m₁ ≥ 1, got m={m}, m₁={m1}"
                ));
            }
            (1..=m1).collect()
        }
        Regime::WeakStrong { equal_tails } => {
            if m != m2 || m2 == 0 {
                return bad(format!(
                    "weak/strong regime requires m = m₂ ≥ 1, got m={m}, m₂={m2}"
                ));
            }
            if equal_tails {
                (1..=m2).collect()
            } else {
                (1..=m2).chain(n1..n1 + m2).collect()
            }
        }
        Regime::StrongStrongEqualTail => {
            if m < m1.max(m2) || m > m1 + m2 || m1 == 0 || m2 == 0 {
                return bad(
                    "strong/strong regime requires max(m₁,m₂) ≤ m ≤ m₁+m₂ with m₁,m₂ ≥ 1"
                        .to_string(),
                );
            }
            (1..=m).collect()
        }
        Regime::StrongStrongUnequalTail { m_exceeds_m1 } => {
            if m < m1.max(m2) || m > m1 + m2 || m1 == 0 || m2 == 0 {
                return bad(
                    "strong/strong regime requires max(m₁,m₂) ≤ m ≤ m₁+m₂ with m₁,m₂ ≥ 1"
                        .to_string(),
                );
            }
            if m_exceeds_m1 != (m > m1) {
                return bad(format!(
                    "regime flag inconsistent with counts: m={m}, m₁={m1}"
                ));
            }
            if m_exceeds_m1 {
                (1..=m1 + m2).chain(n1..n1 + m2).collect()
            } else {
                (1..=m1).chain(n1..n1 + m2).collect()
            }
        }
    };
    Ok(IndexSetD { regime, indices })
}

/// Provenance of a discriminant direction.
#[derive(Clone, Debug, PartialEq)]
pub enum DirectionKind {
    Mdp,
    Ridge { alpha: f64 },
    ProjectedRidge { alpha: f64, indices: Vec<usize> },
    ConditionedProjectedRidge { alpha: f64, indices: Vec<usize> },
    Smdp,
}

/// A unit discriminant direction with its provenance and the norm of the
/// un-normalized `p^{−1/2}`-scaled vector (used by bias corrections).
#[derive(Clone, Debug)]
pub struct DirectionVector {
    pub v: DVector<f64>,
    pub kind: DirectionKind,
    /// `‖ṽ_α‖ = p^{−1/2}·‖un-normalized direction‖`.
    pub pre_norm: f64,
}

/// Shared ridge-family constructor: shrinkage over the given (1-based)
/// eigenvalue indices plus the piling component of `d`.
fn ridge_over_indices(
    g: &TrainedGeometry,
    alpha: f64,
    indices: &[usize],
    kind: DirectionKind,
) -> Result<DirectionVector> {
    let alpha_p = alpha * g.p as f64;
    let lead = g.lambdas[0];
    for &i in indices {
        if i == 0 || i > g.rank() {
            return Err(DpaError::InvalidConfig(format!(
                "index {i} outside 1..={} in ridge index set",
                g.rank()
            )));
        }
        let lam = g.lambdas[i - 1];
        if (lam + alpha_p).abs() <= POLE_TOL * lead {
            return Err(DpaError::RidgePole { index: i, alpha_p });
        }
    }

    // Piling component Û₂Û₂ᵀd = w_MDP·‖Û₂Û₂ᵀd‖, with ‖·‖ = κ·√p.
    let mut w = &g.w_mdp * (g.kappa_mdp * (g.p as f64).sqrt());
    for &i in indices {
        let lam = g.lambdas[i - 1];
        let f = alpha_p / (lam + alpha_p);
        let u = g.u1hat.column(i - 1);
        w.axpy(f * u.dot(&g.d), &u, 1.0);
    }
    let norm = w.norm();
    if norm == 0.0 {
        return Err(DpaError::Degenerate("ridge direction vanished".into()));
    }
    Ok(DirectionVector {
        v: w / norm,
        kind,
        pre_norm: norm / (g.p as f64).sqrt(),
    })
}

/// The MDP direction as a [`DirectionVector`]. Its un-normalized scaled
/// form `p^{−1/2}Û₂Û₂ᵀd` has norm `κ_MDP`, which becomes `pre_norm`.
pub fn mdp_direction(g: &TrainedGeometry) -> DirectionVector {
    DirectionVector {
        v: g.w_mdp.clone(),
        kind: DirectionKind::Mdp,
        pre_norm: g.kappa_mdp,
    }
}

/// The ridged discriminant direction `w_α ∝ Σᵢ [αp/(λ̂ᵢ+αp)] ûᵢûᵢᵀd +
/// Û₂Û₂ᵀd`, computed spectrally.
pub fn ridge_direction(g: &TrainedGeometry, alpha: f64) -> Result<DirectionVector> {
    let all: Vec<usize> = (1..=g.rank()).collect();
    ridge_over_indices(g, alpha, &all, DirectionKind::Ridge { alpha })
}

/// The projected ridged direction `v_α`: shrinkage restricted to the
/// index set `𝒟`.
pub fn projected_ridge(
    g: &TrainedGeometry,
    alpha: f64,
    d_set: &IndexSetD,
) -> Result<DirectionVector> {
    ridge_over_indices(
        g,
        alpha,
        &d_set.indices,
        DirectionKind::ProjectedRidge {
            alpha,
            indices: d_set.indices.clone(),
        },
    )
}

/// The conditioned projected ridged direction `v_α^c` over a
/// caller-supplied index set `𝒟′` (which depends on unobservable
/// quantities; only the limits module can compute it, from true scores).
pub fn conditioned_projected_ridge(
    g: &TrainedGeometry,
    alpha: f64,
    dprime: &[usize],
) -> Result<DirectionVector> {
    ridge_over_indices(
        g,
        alpha,
        dprime,
        DirectionKind::ConditionedProjectedRidge {
            alpha,
            indices: dprime.to_vec(),
        },
    )
}

/// Pooled tail-variance ridge parameter
/// `α̂ = −(n−m−2)^{−1} Σ_{i=m+1}^{n−2} λ̂ᵢ/p`.
pub fn alpha_hat(g: &TrainedGeometry, m: usize) -> Result<f64> {
    if m >= g.rank() {
        return Err(DpaError::InvalidConfig(format!(
            "alpha_hat needs m < n−2 (m = {m}, n−2 = {})",
            g.rank()
        )));
    }
    let tail = &g.lambdas[m..];
    Ok(-tail.iter().sum::<f64>() / (tail.len() as f64 * g.p as f64))
}

/// Per-class tail-variance ridge parameter
/// `α̂_k = −(n_k−m_k−1)^{−1} Σ_{i=m_k+1}^{n_k−1} λ̂_{(k),i}/p`.
pub fn alpha_hat_k(g: &TrainedGeometry, k: usize, m_k: usize) -> Result<f64> {
    if k != 1 && k != 2 {
        return Err(DpaError::InvalidConfig(format!(
            "class index {k} must be 1 or 2"
        )));
    }
    let lams = &g.per_class_lambdas[k - 1];
    if m_k >= lams.len() {
        return Err(DpaError::InvalidConfig(format!(
            "alpha_hat_k needs m_k < n_k−1 (m_k = {m_k}, n_k−1 = {})",
            lams.len()
        )));
    }
    let tail = &lams[m_k..];
    Ok(-tail.iter().sum::<f64>() / (tail.len() as f64 * g.p as f64))
}

/// Scaled projections `p^{−1/2} vᵀ(yⱼ − X̄)` of the columns of `y`.
pub fn project_scores(v: &DirectionVector, y: &DMatrix<f64>, xbar: &DVector<f64>) -> Vec<f64> {
    let scale = (y.nrows() as f64).sqrt().recip();
    (0..y.ncols())
        .map(|j| {
            let col = y.column(j);
            scale * (v.v.dot(&col) - v.v.dot(xbar))
        })
        .collect()
}
