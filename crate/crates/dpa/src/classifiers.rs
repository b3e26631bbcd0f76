//! Classification rules built on the fitted sample geometry.
//!
//! Projection rules (ties at the boundary always go to class 1, matching
//! the `≥` in each rule):
//!
//! * `φ_MDP` — sign of `w_MDPᵀ(Y−X̄)`.
//! * `φ_b-MDP` — the `p^{−1/2}`-scaled MDP score shifted by
//!   `(α̂₁−α̂₂)/(n·κ_MDP)`, which removes the asymptotic bias caused by
//!   unequal tail eigenvalues.
//! * `φ_PRD,α` / `φ_b-PRD,α` — the same pair for the projected ridged
//!   direction `v_α`, with bias `(α̂₁−α̂₂)/(n·‖ṽ_α‖)`.
//!
//! Data-splitting rules: `smdp_fit` runs the second-maximal-data-piling
//! (SMDP) algorithm — split, fit geometry on the training part, project
//! the basis `V = [Û₁, w_MDP]` onto the trailing eigenspace of the test
//! part's projected scatter, average over `K` splits — with either a
//! theory-driven threshold (Type I) or a 1-D LDA threshold (Type II).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::DpaError;
use crate::geometry::{alpha_hat_k, fit_geometry, projected_ridge, IndexSetD, TrainedGeometry};
use crate::model::LabeledData;
use crate::seed;
use crate::Result;

/// Classify by the sign of the raw MDP projection.
pub fn classify_mdp(g: &TrainedGeometry, y: &DMatrix<f64>) -> Vec<u8> {
    (0..y.ncols())
        .map(|j| {
            let s = g.w_mdp.dot(&y.column(j)) - g.w_mdp.dot(&g.xbar);
            if s >= 0.0 {
                1
            } else {
                2
            }
        })
        .collect()
}

/// The bias shift `(α̂₁−α̂₂)/(n·scale)` common to both bias-corrected
/// rules.
fn bias_shift(g: &TrainedGeometry, m1: usize, m2: usize, scale: f64) -> Result<f64> {
    let a1 = alpha_hat_k(g, 1, m1)?;
    let a2 = alpha_hat_k(g, 2, m2)?;
    Ok((a1 - a2) / (g.n() as f64 * scale))
}

/// Classify by the bias-corrected MDP rule.
pub fn classify_bmdp(
    g: &TrainedGeometry,
    m1: usize,
    m2: usize,
    y: &DMatrix<f64>,
) -> Result<Vec<u8>> {
    let shift = bias_shift(g, m1, m2, g.kappa_mdp)?;
    let scale = (g.p as f64).sqrt().recip();
    Ok((0..y.ncols())
        .map(|j| {
            let s = scale * (g.w_mdp.dot(&y.column(j)) - g.w_mdp.dot(&g.xbar));
            if s - shift >= 0.0 {
                1
            } else {
                2
            }
        })
        .collect())
}

/// Classify by the sign of the projected-ridge projection.
pub fn classify_prd(
    g: &TrainedGeometry,
    alpha: f64,
    d_set: &IndexSetD,
    y: &DMatrix<f64>,
) -> Result<Vec<u8>> {
    let v = projected_ridge(g, alpha, d_set)?;
    Ok((0..y.ncols())
        .map(|j| {
            let s = v.v.dot(&y.column(j)) - v.v.dot(&g.xbar);
            if s >= 0.0 {
                1
            } else {
                2
            }
        })
        .collect())
}

/// Classify by the bias-corrected projected-ridge rule.
pub fn classify_bprd(
    g: &TrainedGeometry,
    alpha: f64,
    d_set: &IndexSetD,
    m1: usize,
    m2: usize,
    y: &DMatrix<f64>,
) -> Result<Vec<u8>> {
    let v = projected_ridge(g, alpha, d_set)?;
    let shift = bias_shift(g, m1, m2, v.pre_norm)?;
    let scale = (g.p as f64).sqrt().recip();
    Ok((0..y.ncols())
        .map(|j| {
            let s = scale * (v.v.dot(&y.column(j)) - v.v.dot(&g.xbar));
            if s - shift >= 0.0 {
                1
            } else {
                2
            }
        })
        .collect())
}

/// Which SMDP thresholding variant to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmdpVariant {
    /// Theory-driven threshold from the training-split means and
    /// per-class tail estimates.
    TypeI,
    /// Empirical threshold from 1-D LDA on the projected test split.
    TypeII,
}

/// The fitted threshold of an SMDP rule.
#[derive(Clone, Debug)]
pub enum SmdpThreshold {
    TypeI {
        /// Averaged projected pooled train mean `K⁻¹Σⱼ wⱼᵀX̄ⱼ`.
        xbar_smdp: f64,
        /// Averaged bias `K⁻¹Σⱼ gⱼ`.
        g_smdp: f64,
    },
    TypeII {
        /// Averaged LDA threshold `K⁻¹Σⱼ bⱼ` on the `p^{−1/2}`-scaled
        /// projections.
        b_smdp: f64,
    },
}

/// Per-split diagnostics: the loading vector of `w_j` in the split basis
/// and the spectrum of the projected test scatter.
#[derive(Clone, Debug)]
pub struct SplitDiagnostics {
    /// Unit loading `a_j` (`n_tr−1` entries, last coordinate ≥ 0).
    pub a: DVector<f64>,
    /// Eigenvalues of `p⁻¹VᵀS_te V`, descending.
    pub h: Vec<f64>,
}

/// A fitted SMDP classifier.
#[derive(Clone, Debug)]
pub struct SmdpFit {
    /// Averaged direction `K⁻¹Σⱼ wⱼ` (deliberately not renormalized).
    pub w_smdp: DVector<f64>,
    pub threshold: SmdpThreshold,
    pub k: usize,
    pub diagnostics: Vec<SplitDiagnostics>,
}

/// Deterministically sample `take` distinct indices from `0..n`.
fn sample_indices(rng: &mut ChaCha8Rng, n: usize, take: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, take).into_vec();
    idx.sort_unstable();
    idx
}

/// Fit an SMDP classifier by `k_splits` random stratified train/test
/// splits with `split_sizes = (n₁ₜₑ, n₂ₜₑ)` test observations per class.
#[allow(clippy::too_many_arguments)]
pub fn smdp_fit(
    data: &LabeledData,
    k_splits: usize,
    m: usize,
    m1: usize,
    m2: usize,
    split_sizes: (usize, usize),
    variant: SmdpVariant,
    seed_value: u64,
) -> Result<SmdpFit> {
    let (n1, n2) = (data.n1(), data.n2());
    let p = data.p();
    let (n1_te, n2_te) = split_sizes;
    if k_splits == 0 {
        return Err(DpaError::InvalidConfig("need at least one split".into()));
    }
    if n1_te <= m1 || n2_te <= m2 {
        return Err(DpaError::InvalidConfig(format!(
            "test split sizes must exceed the spike counts (need n₁ₜₑ > {m1}, n₂ₜₑ > {m2})"
        )));
    }
    if n1_te >= n1 || n2_te >= n2 {
        return Err(DpaError::InvalidConfig(
            "test split sizes must leave a nonempty training part".into(),
        ));
    }
    let (n1_tr, n2_tr) = (n1 - n1_te, n2 - n2_te);
    if n1_tr < 2 || n2_tr < 2 {
        return Err(DpaError::InvalidConfig(
            "training split needs at least 2 observations per class".into(),
        ));
    }
    let n_tr = n1_tr + n2_tr;
    if m >= n_tr - 1 {
        return Err(DpaError::InvalidConfig(format!(
            "m = {m} must be below the split basis dimension n_tr−1 = {}",
            n_tr - 1
        )));
    }

    let scale = (p as f64).sqrt().recip();
    let mut w_sum: DVector<f64> = DVector::zeros(p);
    let mut xbar_sum = 0.0;
    let mut g_sum = 0.0;
    let mut b_sum = 0.0;
    let mut diagnostics = Vec::with_capacity(k_splits);

    for j in 0..k_splits {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed_value, j as u64));
        let te1 = sample_indices(&mut rng, n1, n1_te);
        let te2 = sample_indices(&mut rng, n2, n2_te);

        // Assemble train (class 1 first) and test column sets.
        let mut tr_cols = Vec::with_capacity(n_tr);
        let mut tr_labels = Vec::with_capacity(n_tr);
        let mut te_cols = Vec::with_capacity(n1_te + n2_te);
        let mut te_labels = Vec::with_capacity(n1_te + n2_te);
        for i in 0..n1 {
            if te1.binary_search(&i).is_ok() {
                te_cols.push(data.x.column(i).into_owned());
                te_labels.push(1u8);
            } else {
                tr_cols.push(data.x.column(i).into_owned());
                tr_labels.push(1u8);
            }
        }
        for i in 0..n2 {
            if te2.binary_search(&i).is_ok() {
                te_cols.push(data.x.column(n1 + i).into_owned());
                te_labels.push(2u8);
            } else {
                tr_cols.push(data.x.column(n1 + i).into_owned());
                tr_labels.push(2u8);
            }
        }
        let train = LabeledData {
            x: DMatrix::from_columns(&tr_cols),
            labels: tr_labels,
            true_scores: None,
        };
        let g = fit_geometry(&train)?;
        let r = g.rank();

        // Split basis V = [û₁ .. û_{n_tr−2}, w_MDP].
        let mut v_cols: Vec<DVector<f64>> =
            (0..r).map(|i| g.u1hat.column(i).into_owned()).collect();
        v_cols.push(g.w_mdp.clone());
        let v_basis = DMatrix::from_columns(&v_cols);

        // Within-class scatter of the test split, projected: each test
        // column centered at its own class's test mean.
        let te_mat = DMatrix::from_columns(&te_cols);
        let mean_te1 = te_mat.columns(0, n1_te).column_mean();
        let mean_te2 = te_mat.columns(n1_te, n2_te).column_mean();
        let mut b = te_mat.clone();
        for c in 0..n1_te + n2_te {
            let mu = if c < n1_te { &mean_te1 } else { &mean_te2 };
            b.column_mut(c).axpy(-1.0, mu, 1.0);
        }
        let projected = v_basis.transpose() * &b;
        let scatter = (&projected * projected.transpose()) / p as f64;
        let eig = scatter.symmetric_eigen();
        let mut order: Vec<usize> = (0..r + 1).collect();
        order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
        let h: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

        // Project e_MDP = (0, …, 0, 1)ᵀ onto the trailing eigenspace Q̂₂.
        // The e_MDP coordinate of the result is ‖Q̂₂ᵀe_MDP‖² ≥ 0, so the
        // sign convention on a_j holds automatically.
        let a = if m == 0 {
            // Q̂₂ spans all of ℝ^{n_tr−1}: the projection is e_MDP itself.
            let mut e = DVector::zeros(r + 1);
            e[r] = 1.0;
            e
        } else {
            let mut acc = DVector::zeros(r + 1);
            for &col in order.iter().skip(m) {
                let q = eig.eigenvectors.column(col);
                acc.axpy(q[r], &q.into_owned(), 1.0);
            }
            let norm = acc.norm();
            if norm < 1e-12 {
                return Err(DpaError::Degenerate(
                    "e_MDP has no component in the trailing test eigenspace".into(),
                ));
            }
            acc / norm
        };
        let w_j = &v_basis * &a;
        w_sum += &w_j;

        match variant {
            SmdpVariant::TypeI => {
                let xbar_tr = (&g.class_means[0] * n1_tr as f64 + &g.class_means[1] * n2_tr as f64)
                    / n_tr as f64;
                xbar_sum += w_j.dot(&xbar_tr);
                let a1 = alpha_hat_k(&g, 1, m1)?;
                let a2 = alpha_hat_k(&g, 2, m2)?;
                g_sum += a[r] * (a1 - a2) / (n_tr as f64 * g.kappa_mdp);
            }
            SmdpVariant::TypeII => {
                let scores: Vec<f64> = te_cols.iter().map(|c| scale * w_j.dot(c)).collect();
                b_sum += lda_threshold_1d(&scores, &te_labels)?;
            }
        }
        diagnostics.push(SplitDiagnostics { a, h });
    }

    let kf = k_splits as f64;
    Ok(SmdpFit {
        w_smdp: w_sum / kf,
        threshold: match variant {
            SmdpVariant::TypeI => SmdpThreshold::TypeI {
                xbar_smdp: xbar_sum / kf,
                g_smdp: g_sum / kf,
            },
            SmdpVariant::TypeII => SmdpThreshold::TypeII { b_smdp: b_sum / kf },
        },
        k: k_splits,
        diagnostics,
    })
}

/// Classify with a fitted SMDP rule.
pub fn smdp_classify(fit: &SmdpFit, y: &DMatrix<f64>) -> Vec<u8> {
    let scale = (y.nrows() as f64).sqrt().recip();
    (0..y.ncols())
        .map(|j| {
            let proj = fit.w_smdp.dot(&y.column(j));
            let s = match &fit.threshold {
                SmdpThreshold::TypeI { xbar_smdp, g_smdp } => scale * (proj - xbar_smdp) - g_smdp,
                SmdpThreshold::TypeII { b_smdp } => scale * proj - b_smdp,
            };
            if s >= 0.0 {
                1
            } else {
                2
            }
        })
        .collect()
}

/// Pooled-variance Gaussian LDA threshold for 1-D scores with empirical
/// priors: `b = (m̄₁+m̄₂)/2 + s²·ln(n₂/n₁)/(m̄₁−m̄₂)`.
pub fn lda_threshold_1d(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let s1: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(s, _)| *s)
        .collect();
    let s2: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 2)
        .map(|(s, _)| *s)
        .collect();
    if s1.is_empty() || s2.is_empty() {
        return Err(DpaError::InvalidConfig(
            "1-D LDA needs both classes present".into(),
        ));
    }
    let (n1, n2) = (s1.len() as f64, s2.len() as f64);
    let m1 = s1.iter().sum::<f64>() / n1;
    let m2 = s2.iter().sum::<f64>() / n2;
    let ss: f64 = s1.iter().map(|s| (s - m1).powi(2)).sum::<f64>()
        + s2.iter().map(|s| (s - m2).powi(2)).sum::<f64>();
    let midpoint = 0.5 * (m1 + m2);
    if m1 == m2 {
        eprintln!("warning: coincident class means in 1-D LDA; falling back to the midpoint");
        return Ok(midpoint);
    }
    let denom = n1 + n2 - 2.0;
    let pooled = if denom > 0.0 { ss / denom } else { 0.0 };
    Ok(midpoint + pooled * (n2 / n1).ln() / (m1 - m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{index_set_d, Regime};
    use crate::model::{make_setting, sample_pair, SettingId};
    use approx::assert_abs_diff_eq;

    fn setting_data(
        id: SettingId,
        p: usize,
        seed_value: u64,
    ) -> (crate::model::PopulationPair, LabeledData) {
        let pair = make_setting(id, p).unwrap();
        let data = sample_pair(&pair, p, 12, 12, seed_value).unwrap();
        (pair, data)
    }

    #[test]
    fn mdp_boundary_goes_to_class_1() {
        let (_, data) = setting_data(SettingId::I, 100, 1);
        let g = fit_geometry(&data).unwrap();
        // A point exactly at X̄ scores 0 → class 1.
        let y = DMatrix::from_columns(std::slice::from_ref(&g.xbar));
        assert_eq!(classify_mdp(&g, &y), vec![1]);
        // Points shifted along ±w_MDP.
        let plus = &g.xbar + &g.w_mdp * 0.3;
        let minus = &g.xbar - &g.w_mdp * 0.3;
        let y = DMatrix::from_columns(&[plus, minus]);
        assert_eq!(classify_mdp(&g, &y), vec![1, 2]);
    }

    #[test]
    fn bmdp_reduces_to_mdp_for_equal_alpha_hats() {
        let (_, data) = setting_data(SettingId::II, 300, 2);
        let mut g = fit_geometry(&data).unwrap();
        g.per_class_lambdas[1] = g.per_class_lambdas[0].clone();
        let pair = make_setting(SettingId::II, 300).unwrap();
        let test = sample_pair(&pair, 300, 30, 30, 77).unwrap();
        let a = classify_mdp(&g, &test.x);
        let b = classify_bmdp(&g, 2, 2, &test.x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bmdp_threshold_shift_is_exact() {
        let (_, data) = setting_data(SettingId::VII, 400, 3);
        let g = fit_geometry(&data).unwrap();
        let a1 = alpha_hat_k(&g, 1, 0).unwrap();
        let a2 = alpha_hat_k(&g, 2, 0).unwrap();
        let shift = (a1 - a2) / (g.n() as f64 * g.kappa_mdp);
        // A point placed exactly at the shifted boundary (plus epsilon on
        // either side) flips label across it.
        let base = &g.xbar + &g.w_mdp * (shift * (400.0_f64).sqrt());
        let eps = &g.w_mdp * 1e-9;
        let y = DMatrix::from_columns(&[&base + &eps, &base - &eps]);
        assert_eq!(classify_bmdp(&g, 0, 0, &y).unwrap(), vec![1, 2]);
    }

    #[test]
    fn bprd_equals_prd_for_equal_tails() {
        let (pair, data) = setting_data(SettingId::V, 500, 4);
        let mut g = fit_geometry(&data).unwrap();
        // Force exactly equal per-class spectra and use equal spike
        // counts, so α̂₁ = α̂₂ and the bias shift is exactly zero.
        g.per_class_lambdas[1] = g.per_class_lambdas[0].clone();
        let d_set = index_set_d(Regime::StrongStrongEqualTail, pair.m, 2, 3, g.n1).unwrap();
        let test = sample_pair(&pair, 500, 40, 40, 88).unwrap();
        let a = classify_prd(&g, -10.0, &d_set, &test.x).unwrap();
        let b = classify_bprd(&g, -10.0, &d_set, 2, 2, &test.x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lda_threshold_symmetric() {
        let b = lda_threshold_1d(&[1.0, 1.0, -1.0, -1.0], &[1, 1, 2, 2]).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lda_threshold_equal_priors_is_midpoint() {
        let b = lda_threshold_1d(&[2.0, 4.0, -1.0, -3.0], &[1, 1, 2, 2]).unwrap();
        assert_abs_diff_eq!(b, 0.5 * (3.0 + (-2.0)), epsilon = 1e-12);
    }

    #[test]
    fn lda_threshold_unequal_priors_matches_bayes() {
        // Sample stats by construction: m̄₁ = 1 (ss 2), m̄₂ = −2 (ss 8).
        let scores = [0.0, 2.0, -4.0, 0.0, -2.0];
        let labels = [1, 1, 2, 2, 2];
        let b = lda_threshold_1d(&scores, &labels).unwrap();
        let pooled = (2.0 + 8.0) / 3.0;
        // Equal-variance Gaussian Bayes boundary with priors (2/5, 3/5).
        let expect = (1.0 + (-2.0)) / 2.0 + pooled * (3.0f64 / 2.0).ln() / (1.0 - (-2.0));
        assert_abs_diff_eq!(b, expect, epsilon = 1e-12);
    }

    #[test]
    fn lda_degenerate_means_fall_back_to_midpoint() {
        let b = lda_threshold_1d(&[1.0, 3.0, 3.0, 1.0], &[1, 1, 2, 2]).unwrap();
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn smdp_m_zero_projects_to_e_mdp() {
        let (_, data) = setting_data(SettingId::I, 300, 5);
        let fit = smdp_fit(&data, 4, 0, 0, 0, (3, 3), SmdpVariant::TypeII, 10).unwrap();
        for diag in &fit.diagnostics {
            let r = diag.a.len() - 1;
            assert_abs_diff_eq!(diag.a[r], 1.0, epsilon = 1e-12);
            for i in 0..r {
                assert_abs_diff_eq!(diag.a[i], 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn smdp_loadings_are_unit_with_nonnegative_last_coordinate() {
        let (pair, data) = setting_data(SettingId::IX, 600, 6);
        let fit = smdp_fit(&data, 5, pair.m, 2, 3, (4, 4), SmdpVariant::TypeI, 11).unwrap();
        assert_eq!(fit.k, 5);
        for diag in &fit.diagnostics {
            assert_abs_diff_eq!(diag.a.norm(), 1.0, epsilon = 1e-10);
            assert!(diag.a[diag.a.len() - 1] >= 0.0);
            // h-spectrum descending.
            for w in diag.h.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn smdp_split_size_validation() {
        let (_, data) = setting_data(SettingId::IX, 200, 7);
        // n₁ₜₑ must exceed m₁.
        assert!(smdp_fit(&data, 2, 3, 2, 3, (2, 4), SmdpVariant::TypeI, 1).is_err());
        assert!(smdp_fit(&data, 2, 3, 2, 3, (4, 3), SmdpVariant::TypeI, 1).is_err());
        assert!(smdp_fit(&data, 2, 3, 2, 3, (12, 4), SmdpVariant::TypeI, 1).is_err());
        assert!(smdp_fit(&data, 0, 3, 2, 3, (4, 4), SmdpVariant::TypeI, 1).is_err());
    }

    #[test]
    fn smdp_is_deterministic_given_seed() {
        let (pair, data) = setting_data(SettingId::X, 400, 8);
        let a = smdp_fit(&data, 3, pair.m, 3, 3, (4, 4), SmdpVariant::TypeII, 21).unwrap();
        let b = smdp_fit(&data, 3, pair.m, 3, 3, (4, 4), SmdpVariant::TypeII, 21).unwrap();
        assert_eq!(a.w_smdp, b.w_smdp);
    }

    #[test]
    fn scale_invariance_of_all_rules() {
        let (pair, data) = setting_data(SettingId::IX, 500, 9);
        let test = sample_pair(&pair, 500, 25, 25, 123).unwrap();
        let c = 7.3;
        let mut data_scaled = data.clone();
        data_scaled.x *= c;
        let test_scaled = &test.x * c;

        let g = fit_geometry(&data).unwrap();
        let gs = fit_geometry(&data_scaled).unwrap();
        let d_set = index_set_d(
            Regime::StrongStrongUnequalTail { m_exceeds_m1: true },
            pair.m,
            2,
            3,
            g.n1,
        )
        .unwrap();

        assert_eq!(classify_mdp(&g, &test.x), classify_mdp(&gs, &test_scaled));
        assert_eq!(
            classify_bmdp(&g, 2, 3, &test.x).unwrap(),
            classify_bmdp(&gs, 2, 3, &test_scaled).unwrap()
        );
        // Ridge shrinkage factors depend on λ̂/α ratios, so α rescales by c².
        assert_eq!(
            classify_prd(&g, -20.0, &d_set, &test.x).unwrap(),
            classify_prd(&gs, -20.0 * c * c, &d_set, &test_scaled).unwrap()
        );
        assert_eq!(
            classify_bprd(&g, -20.0, &d_set, 2, 3, &test.x).unwrap(),
            classify_bprd(&gs, -20.0 * c * c, &d_set, 2, 3, &test_scaled).unwrap()
        );
        let f = smdp_fit(&data, 3, pair.m, 2, 3, (4, 4), SmdpVariant::TypeII, 5).unwrap();
        let fs = smdp_fit(
            &data_scaled,
            3,
            pair.m,
            2,
            3,
            (4, 4),
            SmdpVariant::TypeII,
            5,
        )
        .unwrap();
        assert_eq!(smdp_classify(&f, &test.x), smdp_classify(&fs, &test_scaled));
    }

    #[test]
    fn label_permutation_swaps_predictions() {
        let (pair, data) = setting_data(SettingId::II, 400, 10);
        let test = sample_pair(&pair, 400, 30, 30, 55).unwrap();
        // Swap the classes: class-2 columns first, labels exchanged.
        let n1 = data.n1();
        let n = data.labels.len();
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
        for j in n1..n {
            cols.push(data.x.column(j).into_owned());
        }
        for j in 0..n1 {
            cols.push(data.x.column(j).into_owned());
        }
        let swapped = LabeledData {
            x: DMatrix::from_columns(&cols),
            labels: data.labels.clone(),
            true_scores: None,
        };
        let g = fit_geometry(&data).unwrap();
        let gs = fit_geometry(&swapped).unwrap();
        let a = classify_mdp(&g, &test.x);
        let b = classify_mdp(&gs, &test.x);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, 3 - *y);
        }
    }
}
