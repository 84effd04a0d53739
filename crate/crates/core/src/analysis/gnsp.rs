use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{kernel_basis, AnalysisError};
use crate::penalties::PenaltyModel;

/// Outcome of a randomized search for a violation of the generalized null
/// space property `J(v_S) < J(v_Sᶜ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GnspVerdict {
    /// A kernel vector and support violating the strict inequality.
    Falsified {
        witness: Vec<f64>,
        support: Vec<usize>,
        support_penalty: f64,
        complement_penalty: f64,
    },
    /// No violation among the sampled vectors. This is evidence, not a proof.
    NotFalsified,
}

impl GnspVerdict {
    pub fn is_falsified(&self) -> bool {
        matches!(self, GnspVerdict::Falsified { .. })
    }
}

/// Search budget for [`gnsp_falsify_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnspSearch {
    /// Random directions drawn uniformly on the unit sphere of kernel
    /// coordinates, in addition to the `±` basis vectors.
    pub budget: usize,
    pub seed: u64,
    /// Magnitudes at which every direction is tested; `J` is not
    /// scale-invariant, so a violation may only appear at some scales.
    pub scales: Vec<f64>,
}

impl GnspSearch {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            scales: vec![1.0],
        }
    }
}

/// Verdict plus what was searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnspReport {
    #[serde(flatten)]
    pub verdict: GnspVerdict,
    pub model: String,
    pub s: usize,
    pub kernel_dim: usize,
    /// Number of (direction, scale) pairs examined.
    pub vectors_checked: usize,
    pub budget: usize,
    pub seed: u64,
    pub scales: Vec<f64>,
}

/// Samples unit-norm kernel vectors of `a` and reports the first one whose
/// `s` largest-magnitude entries carry at least as much penalty as the rest.
pub fn gnsp_falsify(
    a: &DMatrix<f64>,
    s: usize,
    model: &PenaltyModel,
    budget: usize,
    seed: u64,
) -> Result<GnspReport, AnalysisError> {
    gnsp_falsify_with(a, s, model, &GnspSearch::new(budget, seed))
}

pub fn gnsp_falsify_with(
    a: &DMatrix<f64>,
    s: usize,
    model: &PenaltyModel,
    search: &GnspSearch,
) -> Result<GnspReport, AnalysisError> {
    let n = a.ncols();
    if s == 0 || s > n {
        return Err(AnalysisError::Input(format!("s = {s} must lie in 1..={n}")));
    }
    if search.scales.is_empty() || search.scales.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(AnalysisError::Input(
            "scales must be positive and finite".into(),
        ));
    }
    let kernel = kernel_basis(a)?;
    let d = kernel.dim();
    let mut report = GnspReport {
        verdict: GnspVerdict::NotFalsified,
        model: model.to_string(),
        s,
        kernel_dim: d,
        vectors_checked: 0,
        budget: search.budget,
        seed: search.seed,
        scales: search.scales.clone(),
    };
    if d == 0 {
        return Ok(report);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut coords = vec![0.0; d];
    let total = 2 * d + search.budget;
    for i in 0..total {
        coords.iter_mut().for_each(|c| *c = 0.0);
        if i < 2 * d {
            coords[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
        } else {
            loop {
                for c in coords.iter_mut() {
                    *c = StandardNormal.sample(&mut rng);
                }
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    coords.iter_mut().for_each(|c| *c /= norm);
                    break;
                }
            }
        }
        let direction = kernel.embed(&coords);
        for &scale in &search.scales {
            report.vectors_checked += 1;
            let v: Vec<f64> = direction.iter().map(|x| x * scale).collect();
            if let Some(verdict) = check_vector(&v, s, model)? {
                report.verdict = verdict;
                return Ok(report);
            }
        }
    }
    Ok(report)
}

fn check_vector(
    v: &[f64],
    s: usize,
    model: &PenaltyModel,
) -> Result<Option<GnspVerdict>, AnalysisError> {
    let support = worst_support(v, s);
    let mut on = vec![0.0; v.len()];
    let mut off = v.to_vec();
    for &j in &support {
        on[j] = v[j];
        off[j] = 0.0;
    }
    let support_penalty = model.penalty(&on)?;
    let complement_penalty = model.penalty(&off)?;
    Ok(
        (support_penalty >= complement_penalty).then(|| GnspVerdict::Falsified {
            witness: v.to_vec(),
            support,
            support_penalty,
            complement_penalty,
        }),
    )
}

/// Indices of the `s` largest `|v_j|`, ties broken by index.
pub fn worst_support(v: &[f64], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));
    idx.truncate(s);
    idx.sort_unstable();
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pair_is_falsified() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let model = PenaltyModel::exponential(1.0).unwrap();
        let r = gnsp_falsify(&a, 1, &model, 10, 0).unwrap();
        assert!(r.verdict.is_falsified());
        assert_eq!(r.kernel_dim, 1);
    }

    #[test]
    fn trivial_kernel() {
        let model = PenaltyModel::exponential(1.0).unwrap();
        let r = gnsp_falsify(&DMatrix::identity(3, 3), 1, &model, 10, 0).unwrap();
        assert_eq!(r.verdict, GnspVerdict::NotFalsified);
        assert_eq!(r.vectors_checked, 0);
    }

    #[test]
    fn all_ones_ray_survives() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, -1.0, 0.0, 1.0, -1.0]);
        let model = PenaltyModel::exponential(1.0).unwrap();
        let r = gnsp_falsify(&a, 1, &model, 50, 3).unwrap();
        assert!(!r.verdict.is_falsified());
        assert_eq!(r.vectors_checked, 52);
    }

    #[test]
    fn support_selection() {
        assert_eq!(worst_support(&[0.1, -3.0, 2.0, 0.5], 2), vec![1, 2]);
        assert_eq!(worst_support(&[1.0, 1.0, 1.0], 1), vec![0]);
    }

    #[test]
    fn invalid_sparsity() {
        let model = PenaltyModel::exponential(1.0).unwrap();
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        assert!(gnsp_falsify(&a, 0, &model, 1, 0).is_err());
        assert!(gnsp_falsify(&a, 3, &model, 1, 0).is_err());
    }
}
