//! Column-selection rules and the coordinate update they feed.

use crate::error::{Error, Result};
use crate::linalg::ColumnMatrix;
use crate::rng::{self, Rng};

/// Outcome of a greedy Gauss-Seidel selection.
#[derive(Debug, Clone, PartialEq)]
pub struct GgsChoice {
    pub index: usize,
    /// Columns whose `|s_j|` attains the maximum (within the tie tolerance).
    pub candidates: Vec<usize>,
}

/// Outcome of a greedy randomized coordinate descent selection.
#[derive(Debug, Clone, PartialEq)]
pub struct GrcdChoice {
    pub index: usize,
    pub candidates: Vec<usize>,
    pub delta: f64,
}

/// Two-stage greedy selection.
///
/// Stage one keeps every `j` with `|s_j| >= (1 - tie_tolerance_rel) * max|s|`;
/// stage two picks the candidate maximizing `s_j^2 / ||A_j||^2`, lowest index
/// on ties.
pub fn ggs_select(s: &[f64], col_norms_sq: &[f64], tie_tolerance_rel: f64) -> Result<GgsChoice> {
    let mut candidates = Vec::new();
    let index = ggs_select_into(s, col_norms_sq, tie_tolerance_rel, &mut candidates)?;
    Ok(GgsChoice { index, candidates })
}

pub(crate) fn ggs_select_into(
    s: &[f64],
    col_norms_sq: &[f64],
    tie_tolerance_rel: f64,
    candidates: &mut Vec<usize>,
) -> Result<usize> {
    fill_max_set(s, tie_tolerance_rel, candidates)?;
    let mut best = candidates[0];
    let mut best_ratio = ratio(s, col_norms_sq, best)?;
    for &j in &candidates[1..] {
        let q = ratio(s, col_norms_sq, j)?;
        if q > best_ratio {
            best = j;
            best_ratio = q;
        }
    }
    Ok(best)
}

/// Randomized variant of [`ggs_select`]: the same candidate set,
/// but the index is sampled with probability proportional to
/// `s_j^2 / ||A_j||^2` over the candidates.
pub fn ggs_randomized_select(
    s: &[f64],
    col_norms_sq: &[f64],
    tie_tolerance_rel: f64,
    rng: &mut Rng,
) -> Result<GgsChoice> {
    let mut candidates = Vec::new();
    let index = ggs_randomized_select_into(s, col_norms_sq, tie_tolerance_rel, rng, &mut candidates)?;
    Ok(GgsChoice { index, candidates })
}

pub(crate) fn ggs_randomized_select_into(
    s: &[f64],
    col_norms_sq: &[f64],
    tie_tolerance_rel: f64,
    rng: &mut Rng,
    candidates: &mut Vec<usize>,
) -> Result<usize> {
    fill_max_set(s, tie_tolerance_rel, candidates)?;
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let mut total = 0.0;
    for &j in candidates.iter() {
        total += ratio(s, col_norms_sq, j)?;
    }
    let target = rng::uniform(rng) * total;
    Ok(sample_from(candidates, |j| s[j] * s[j] / col_norms_sq[j], target))
}

/// Greedy randomized coordinate descent selection.
///
/// With `q_j = s_j^2 / ||A_j||^2`, the threshold is
/// `delta = (max_j q_j / ||s||^2 + 1 / ||A||_F^2) / 2`; the candidate set
/// keeps every `j` with `s_j^2 >= delta ||s||^2 ||A_j||^2`, and the index is
/// drawn from it with probability `s_j^2 / sum_{i in set} s_i^2`.
pub fn grcd_select(s: &[f64], col_norms_sq: &[f64], frob_sq: f64, rng: &mut Rng) -> Result<GrcdChoice> {
    let mut candidates = Vec::new();
    let (index, delta) = grcd_select_into(s, col_norms_sq, frob_sq, rng, &mut candidates)?;
    Ok(GrcdChoice {
        index,
        candidates,
        delta,
    })
}

pub(crate) fn grcd_select_into(
    s: &[f64],
    col_norms_sq: &[f64],
    frob_sq: f64,
    rng: &mut Rng,
    candidates: &mut Vec<usize>,
) -> Result<(usize, f64)> {
    debug_assert_eq!(s.len(), col_norms_sq.len());
    if !(frob_sq > 0.0) {
        return Err(Error::InvalidDimensions("Frobenius norm must be positive".into()));
    }
    let mut grad_sq = 0.0;
    let mut max_ratio = 0.0;
    let mut argmax = 0;
    for (j, (&sj, &nj)) in s.iter().zip(col_norms_sq).enumerate() {
        if !(nj > 0.0) {
            return Err(Error::ZeroColumn(j));
        }
        let sq = sj * sj;
        grad_sq += sq;
        let q = sq / nj;
        if q > max_ratio {
            max_ratio = q;
            argmax = j;
        }
    }
    if grad_sq == 0.0 {
        return Err(Error::AllZeroGradient);
    }
    let delta = 0.5 * (max_ratio / grad_sq + 1.0 / frob_sq);
    let scaled = delta * grad_sq;

    candidates.clear();
    let mut total = 0.0;
    for (j, (&sj, &nj)) in s.iter().zip(col_norms_sq).enumerate() {
        let sq = sj * sj;
        // The maximizer always qualifies in exact arithmetic.
        if j == argmax || sq >= scaled * nj {
            candidates.push(j);
            total += sq;
        }
    }
    let target = rng::uniform(rng) * total;
    Ok((sample_from(candidates, |j| s[j] * s[j], target), delta))
}

/// Randomized Gauss-Seidel selection: `j` with probability
/// `||A_j||^2 / ||A||_F^2`, independent of the residual.
pub fn rgs_select(col_norms_sq: &[f64], frob_sq: f64, rng: &mut Rng) -> Result<usize> {
    if !(frob_sq > 0.0) {
        return Err(Error::InvalidDimensions("Frobenius norm must be positive".into()));
    }
    Ok(ColumnSampler::new(col_norms_sq).sample(rng))
}

/// Inverse-CDF sampler over fixed column weights.
#[derive(Debug, Clone)]
pub(crate) struct ColumnSampler {
    cumulative: Vec<f64>,
}

impl ColumnSampler {
    pub(crate) fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub(crate) fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("at least one column");
        let target = rng::uniform(rng) * total;
        let j = self.cumulative.partition_point(|&c| c <= target);
        j.min(self.cumulative.len() - 1)
    }
}

/// Coordinate update on column `j`.
///
/// Computes `alpha = A_j^T r / ||A_j||^2` from the current residual, then
/// sets `x_j += alpha` and `r -= alpha A_j`. Returns `alpha`.
pub fn step<M: ColumnMatrix + ?Sized>(
    x: &mut [f64],
    r: &mut [f64],
    a: &M,
    j: usize,
    col_norm_sq_j: f64,
) -> Result<f64> {
    if !(col_norm_sq_j > 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    crate::linalg::check_len(a.cols(), x.len())?;
    let alpha = a.column_dot(j, r)? / col_norm_sq_j;
    if alpha != 0.0 {
        x[j] += alpha;
        a.axpy_column_unchecked(r, j, -alpha);
    }
    Ok(alpha)
}

fn fill_max_set(s: &[f64], tie_tolerance_rel: f64, candidates: &mut Vec<usize>) -> Result<()> {
    let max = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Err(Error::AllZeroGradient);
    }
    let floor = (1.0 - tie_tolerance_rel) * max;
    candidates.clear();
    candidates.extend(s.iter().enumerate().filter(|(_, v)| v.abs() >= floor).map(|(j, _)| j));
    Ok(())
}

fn ratio(s: &[f64], col_norms_sq: &[f64], j: usize) -> Result<f64> {
    let n = col_norms_sq[j];
    if !(n > 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    Ok(s[j] * s[j] / n)
}

/// Walks `candidates` accumulating `weight` until the running sum exceeds
/// `target`. Falls back to the last positively weighted candidate.
fn sample_from(candidates: &[usize], weight: impl Fn(usize) -> f64, target: f64) -> usize {
    let mut acc = 0.0;
    let mut last = candidates[0];
    for &j in candidates {
        let w = weight(j);
        if w > 0.0 {
            acc += w;
            last = j;
            if acc > target {
                return j;
            }
        }
    }
    last
}
