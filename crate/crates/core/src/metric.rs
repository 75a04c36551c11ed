//! Earth mover's distance on position distributions and the positionwise
//! distance between frequency matrices (minimum-cost column assignment).

use crate::election::Election;
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use serde::Serialize;

/// Result of a positionwise comparison.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub m: usize,
    /// Sum of column EMDs under the best assignment.
    pub raw: f64,
    /// `raw / ((m^2 - 1) / 3)`, the distance between identity and uniformity.
    pub normalized: f64,
    /// A minimizing assignment: column `i` of the first matrix is matched to
    /// column `assignment[i]` of the second. Ties are broken by the
    /// algorithm's deterministic scan order, so this is *a* minimizer.
    pub assignment: Vec<usize>,
}

fn checked_distribution(x: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = x.iter().find(|&&v| v < 0.0) {
        return Err(Error::NotStochastic(format!("negative entry {bad}")));
    }
    let sum: f64 = x.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotStochastic(format!(
            "distribution sums to {sum}, not 1"
        )));
    }
    Ok(x.iter().map(|v| v / sum).collect())
}

/// Earth mover's distance between two distributions over positions, with
/// unit cost per position moved. Computed by the prefix-sum identity
/// `sum_i |sum_{t<=i} (x_t - y_t)|`, which equals the greedy earth-moving
/// cost. Inputs must be nonnegative and sum to 1 within `1e-9`; they are
/// renormalized before the comparison.
pub fn emd(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let xs = checked_distribution(x)?;
    let ys = checked_distribution(y)?;
    Ok(emd_unchecked(&xs, &ys))
}

pub(crate) fn emd_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let mut carry = 0.0;
    let mut total = 0.0;
    for i in 0..x.len().saturating_sub(1) {
        carry += x[i] - y[i];
        total += carry.abs();
    }
    total
}

/// Exact minimum-cost perfect matching on a square cost matrix, by the
/// O(n^3) shortest-augmenting-path form of the Hungarian method.
/// Returns the column assigned to each row and the total cost.
pub(crate) fn hungarian(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    // potentials and matching are 1-indexed; column 0 is the virtual source
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[matched_row[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (assignment, total)
}

/// Normalization constant: the positionwise distance between the identity
/// and uniformity matrices, `(m^2 - 1) / 3`.
pub fn normalization_constant(m: usize) -> f64 {
    ((m * m) as f64 - 1.0) / 3.0
}

/// Positionwise distance between two frequency matrices: the minimum over
/// column assignments of the summed per-column EMDs, solved exactly.
pub fn positionwise_distance(
    a: &FrequencyMatrix,
    b: &FrequencyMatrix,
) -> Result<DistanceReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let m = a.dim();
    let cols_a = a.columns();
    let cols_b = b.columns();
    let cost: Vec<Vec<f64>> = cols_a
        .iter()
        .map(|ca| cols_b.iter().map(|cb| emd_unchecked(ca, cb)).collect())
        .collect();
    let (assignment, raw) = hungarian(&cost);
    let normalized = if m <= 1 {
        0.0
    } else {
        raw / normalization_constant(m)
    };
    Ok(DistanceReport {
        m,
        raw,
        normalized,
        assignment,
    })
}

/// Shorthand for the normalized positionwise distance.
pub fn npos(a: &FrequencyMatrix, b: &FrequencyMatrix) -> Result<f64> {
    Ok(positionwise_distance(a, b)?.normalized)
}

/// Positionwise distance between two elections (their candidate counts must
/// match; voter counts may differ).
pub fn election_distance(a: &Election, b: &Election) -> Result<DistanceReport> {
    positionwise_distance(&a.frequency_matrix(), &b.frequency_matrix())
}

/// Positionwise distance between an election and a frequency matrix.
pub fn election_matrix_distance(e: &Election, f: &FrequencyMatrix) -> Result<DistanceReport> {
    positionwise_distance(&e.frequency_matrix(), f)
}
