//! Principal component analysis over the community×subject matrix:
//! loadings, subject scores, explained variance, extreme-subject tables and
//! the coordinates of the first-two-dimensions plane.
//!
//! Subjects are the observations and communities the variables. Columns are
//! mean-centered (covariance PCA; standardization is opt-in) and the
//! decomposition runs as an SVD of the centered matrix, which is the stable
//! route on thin matrices. SVD signs are arbitrary, so each loading is
//! canonicalized to make its largest-magnitude entry positive.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{CommunitySubjectMatrix, PcaResult};

#[derive(Debug, Clone, Default)]
pub struct PcaConfig {
    /// Divide centered columns by their sample standard deviation
    /// (correlation PCA). Off by default: centering only.
    pub standardize: bool,
    /// Retain at most this many leading dimensions; `None` keeps every
    /// dimension with nonzero variance.
    pub n_dims: Option<usize>,
}

/// Relative variance below which a dimension counts as numerically zero.
const VARIANCE_RATIO_FLOOR: f64 = 1e-12;

/// Run PCA on the prevalence matrix.
///
/// `explained_variance_ratio` is `σ_d² / Σ σ²` per retained dimension;
/// loadings are the right-singular vectors (dimensions × communities) and
/// scores are the centered data projected onto them (subjects × dimensions).
pub fn run_pca(matrix: &CommunitySubjectMatrix, cfg: &PcaConfig) -> Result<PcaResult> {
    let rows = matrix.subjects().len();
    let cols = matrix.communities().len();
    if rows < 2 {
        return Err(Error::Degenerate(format!(
            "PCA needs at least 2 subjects, found {rows}"
        )));
    }
    if cols < 2 {
        return Err(Error::Degenerate(format!(
            "PCA needs at least 2 communities, found {cols}"
        )));
    }
    if let Some(n) = cfg.n_dims {
        if n < 1 {
            return Err(Error::Config("n_dims must be >= 1".into()));
        }
    }

    let mut x = matrix.prevalence().clone();
    for c in 0..cols {
        let mean = x.column(c).sum() / rows as f64;
        for r in 0..rows {
            x[(r, c)] -= mean;
        }
    }
    if cfg.standardize {
        for c in 0..cols {
            let var = x.column(c).iter().map(|v| v * v).sum::<f64>() / (rows as f64 - 1.0);
            if var == 0.0 {
                return Err(Error::Degenerate(format!(
                    "community {} has zero variance; cannot standardize",
                    matrix.communities()[c]
                )));
            }
            let std = var.sqrt();
            for r in 0..rows {
                x[(r, c)] /= std;
            }
        }
    }
    let total_variance: f64 = x.iter().map(|v| v * v).sum();
    if total_variance == 0.0 {
        return Err(Error::Degenerate(
            "matrix has zero total variance (all rows identical)".into(),
        ));
    }

    let svd = x.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Degenerate("SVD failed to produce singular vectors".into()))?;
    let mut singular: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    // nalgebra returns singular values sorted descending; keep the sort as
    // a guarantee rather than an assumption.
    singular.sort_by(|a, b| b.0.total_cmp(&a.0));

    let sigma_sq_sum: f64 = singular.iter().map(|&(s, _)| s * s).sum();
    let mut retained: Vec<(f64, usize)> = singular
        .iter()
        .copied()
        .filter(|&(s, _)| s * s / sigma_sq_sum >= VARIANCE_RATIO_FLOOR)
        .collect();
    if let Some(n) = cfg.n_dims {
        retained.truncate(n);
    }
    let dims = retained.len();

    let mut loadings = DMatrix::zeros(dims, cols);
    for (d, &(_, src)) in retained.iter().enumerate() {
        let row = v_t.row(src);
        // Sign convention: largest-magnitude entry positive.
        let mut pivot = 0usize;
        for c in 1..cols {
            if row[c].abs() > row[pivot].abs() {
                pivot = c;
            }
        }
        let flip = if row[pivot] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..cols {
            loadings[(d, c)] = flip * row[c];
        }
    }
    let scores = &x * loadings.transpose();
    let explained_variance_ratio: Vec<f64> = retained
        .iter()
        .map(|&(s, _)| s * s / sigma_sq_sum)
        .collect();

    Ok(PcaResult {
        loadings,
        scores,
        explained_variance_ratio,
        subjects: matrix.subjects().to_vec(),
        communities: matrix.communities().to_vec(),
    })
}

/// Subjects paired with their scores on one dimension, sorted.
pub type RankedSubjects = Vec<(String, f64)>;

/// Split one dimension's scores into sorted positive/negative extremes.
/// Kept separate from [`extreme_subjects`] so the antisymmetry of the split
/// is testable on raw score columns.
pub(crate) fn extremes_from(
    names: &[String],
    scores: &[f64],
    n: usize,
) -> (RankedSubjects, RankedSubjects) {
    let mut positive: RankedSubjects = Vec::new();
    let mut negative: RankedSubjects = Vec::new();
    for (name, &score) in names.iter().zip(scores) {
        if score >= 0.0 {
            positive.push((name.clone(), score));
        } else {
            negative.push((name.clone(), score));
        }
    }
    positive.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    negative.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    positive.truncate(n);
    negative.truncate(n);
    (positive, negative)
}

/// The `n` most extreme subjects at each end of dimension `dim` (0-based).
/// Returns `(positive, negative)`: the positive list descends from the
/// highest score, the negative list ascends from the lowest; subjects with
/// non-negative scores belong to the positive side, so the two lists never
/// overlap and `n` larger than the subject count degenerates to the full
/// sorted list split at zero.
pub fn extreme_subjects(
    result: &PcaResult,
    dim: usize,
    n: usize,
) -> Result<(RankedSubjects, RankedSubjects)> {
    if dim >= result.dimensions() {
        return Err(Error::Config(format!(
            "dimension {dim} out of range (have {})",
            result.dimensions()
        )));
    }
    if n < 1 {
        return Err(Error::Config("extreme_subjects needs n >= 1".into()));
    }
    let column: Vec<f64> = result.scores.column(dim).iter().copied().collect();
    Ok(extremes_from(&result.subjects, &column, n))
}

/// Positions on the plane spanned by the first two dimensions: communities
/// as loading entries (biplot variable arrows), subjects as score points.
#[derive(Debug, Clone)]
pub struct PlaneCoordinates {
    pub communities: Vec<(u32, [f64; 2])>,
    pub subjects: Vec<(String, [f64; 2])>,
}

/// Pearson correlations between community prevalence columns, in row-major
/// `(community_a, community_b, r)` order over the full matrix. A
/// zero-variance column correlates 0 with everything (1 with itself).
pub fn community_correlations(matrix: &CommunitySubjectMatrix) -> Vec<(u32, u32, f64)> {
    let rows = matrix.subjects().len();
    let cols = matrix.communities().len();
    let mean: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|s| matrix.entry(s, c)).sum::<f64>() / rows.max(1) as f64)
        .collect();
    let dev = |s: usize, c: usize| matrix.entry(s, c) - mean[c];
    let norm: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|s| dev(s, c) * dev(s, c)).sum::<f64>().sqrt())
        .collect();
    let mut out = Vec::with_capacity(cols * cols);
    for a in 0..cols {
        for b in 0..cols {
            let r = if a == b {
                1.0
            } else if norm[a] == 0.0 || norm[b] == 0.0 {
                0.0
            } else {
                (0..rows).map(|s| dev(s, a) * dev(s, b)).sum::<f64>() / (norm[a] * norm[b])
            };
            out.push((matrix.communities()[a], matrix.communities()[b], r));
        }
    }
    out
}

pub fn plane_coordinates(result: &PcaResult) -> Result<PlaneCoordinates> {
    if result.dimensions() < 2 {
        return Err(Error::Degenerate(format!(
            "plane needs 2 dimensions, PCA retained {}",
            result.dimensions()
        )));
    }
    let communities = result
        .communities
        .iter()
        .enumerate()
        .map(|(c, &id)| (id, [result.loadings[(0, c)], result.loadings[(1, c)]]))
        .collect();
    let subjects = result
        .subjects
        .iter()
        .enumerate()
        .map(|(s, name)| {
            (
                name.clone(),
                [result.scores[(s, 0)], result.scores[(s, 1)]],
            )
        })
        .collect();
    Ok(PlaneCoordinates {
        communities,
        subjects,
    })
}
