//! Frequency matrices of the Mallows distribution and the normalized
//! dispersion parameterization.

use crate::election::Ranking;
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::models::mahonian::{max_swaps, MahonianTable};
use crate::scalar::{rows_to_f64, Scalar};

/// Default cap on the candidate count for Mallows matrices. Lift it with
/// [`mallows_matrix_with_cap`] when a larger run is intentional.
pub const DEFAULT_MALLOWS_CAP: usize = 50;

/// Parameters of a Mallows distribution: probability of a vote `v` is
/// proportional to `phi^swap_distance(v, central)`.
#[derive(Clone, Debug)]
pub struct MallowsParams {
    pub m: usize,
    /// Dispersion in `[0, 1]`; 0 concentrates on the central vote, 1 is
    /// impartial culture.
    pub phi: f64,
    /// Central vote; `None` means `0 > 1 > ... > m-1`.
    pub central: Option<Ranking>,
}

impl MallowsParams {
    pub fn new(m: usize, phi: f64) -> Self {
        Self {
            m,
            phi,
            central: None,
        }
    }
}

/// `1 + phi + ... + phi^(q-1)` for `q = 0..=m`.
fn geometric_sums<S: Scalar>(phi: &S, m: usize) -> Vec<S> {
    let mut geo = Vec::with_capacity(m + 1);
    geo.push(S::zero());
    let mut power = S::one();
    let mut sum = S::zero();
    for _ in 1..=m {
        sum = sum + power.clone();
        geo.push(sum.clone());
        power = power * phi.clone();
    }
    geo
}

fn powers<S: Scalar>(phi: &S, m: usize) -> Vec<S> {
    let mut pow = Vec::with_capacity(m + 1);
    pow.push(S::one());
    for t in 1..=m {
        pow.push(pow[t - 1].clone() * phi.clone());
    }
    pow
}

/// Position distribution of the candidate ranked `j` (1-based) in the
/// central vote, via the repeated-insertion view of the distribution: the
/// candidate enters at position `p <= j` with weight `phi^(j-p)`, and each
/// later candidate pushes it down one step with the probability of being
/// inserted above it.
pub(crate) fn mallows_column<S: Scalar>(m: usize, j: usize, pow: &[S], geo: &[S]) -> Vec<S> {
    let mut dist = vec![S::zero(); m + 2];
    for p in 1..=j {
        dist[p] = pow[j - p].clone() / geo[j].clone();
    }
    for t in (j + 1)..=m {
        let mut next = vec![S::zero(); m + 2];
        for q in 1..t {
            let d = dist[q].clone();
            if d.is_zero() {
                continue;
            }
            // probability the t-th candidate lands at or above position q
            let up = pow[t - q].clone() * geo[q].clone() / geo[t].clone();
            next[q + 1] = next[q + 1].clone() + d.clone() * up.clone();
            next[q] = next[q].clone() + d * (S::one() - up);
        }
        dist = next;
    }
    dist[1..=m].to_vec()
}

pub(crate) fn mallows_rows<S: Scalar>(m: usize, phi: &S, central: Option<&Ranking>) -> Vec<Vec<S>> {
    if *phi == S::one() {
        // all votes equiprobable: the matrix is exactly uniform
        return vec![vec![S::from_ratio(1, m as u64); m]; m];
    }
    let pow = powers(phi, m);
    let geo = geometric_sums(phi, m);
    let mut rows = vec![vec![S::zero(); m]; m];
    for j in 1..=m {
        let col = mallows_column(m, j, &pow, &geo);
        let cand = central.map_or(j - 1, |c| c.candidate_at(j - 1));
        for (i, v) in col.into_iter().enumerate() {
            rows[i][cand] = v;
        }
    }
    rows
}

fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Frequency matrix of a Mallows distribution, refusing `m` above `cap`.
pub fn mallows_matrix_with_cap(params: &MallowsParams, cap: usize) -> Result<FrequencyMatrix> {
    if params.m == 0 {
        return Err(Error::OutOfRange {
            name: "m",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if params.m > cap {
        return Err(Error::ResourceLimit {
            what: "mallows matrix",
            cap,
            m: params.m,
            hint: "pass a larger cap explicitly to confirm the run",
        });
    }
    check_phi(params.phi)?;
    if let Some(c) = &params.central {
        if c.len() != params.m {
            return Err(Error::DimensionMismatch {
                left: c.len(),
                right: params.m,
            });
        }
    }
    let rows = mallows_rows(params.m, &params.phi, params.central.as_ref());
    Ok(FrequencyMatrix::from_rows_unchecked(rows_to_f64(&rows)))
}

/// Frequency matrix of a Mallows distribution with the default size cap.
pub fn mallows_matrix(params: &MallowsParams) -> Result<FrequencyMatrix> {
    mallows_matrix_with_cap(params, DEFAULT_MALLOWS_CAP)
}

/// Largest `m` for which Mahonian rows stay within `f64` range (values up to
/// `m!`). Beyond it the expectation falls back to the per-insertion closed
/// form, which is algebraically identical.
const MAHONIAN_F64_LIMIT: usize = 150;

/// Converts between the raw dispersion `phi` and the normalized dispersion,
/// defined so that the expected swap distance from the central vote is
/// `norm_phi / 2` of the maximum swap distance.
///
/// Reusable across a parameter grid: the Mahonian row is built once.
#[derive(Clone, Debug)]
pub struct NormPhiConverter {
    m: usize,
    mahonian_row: Option<Vec<f64>>,
}

impl NormPhiConverter {
    pub fn new(m: usize) -> Self {
        let mahonian_row = (m >= 2 && m <= MAHONIAN_F64_LIMIT)
            .then(|| MahonianTable::new(m).row_f64(m));
        Self { m, mahonian_row }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Expected swap distance between a sampled vote and the central vote.
    /// Increasing in `phi`, from 0 at `phi = 0` to `m(m-1)/4` at `phi = 1`.
    pub fn expected_swap_distance(&self, phi: f64) -> f64 {
        if self.m < 2 {
            return 0.0;
        }
        if phi == 0.0 {
            return 0.0;
        }
        if phi == 1.0 {
            return max_swaps(self.m) as f64 / 2.0;
        }
        match &self.mahonian_row {
            Some(row) => {
                // E[k] = sum_k k S(m,k) phi^k / sum_k S(m,k) phi^k, by Horner
                let mut num = 0.0;
                let mut den = 0.0;
                for (k, s) in row.iter().enumerate().rev() {
                    num = num * phi + k as f64 * s;
                    den = den * phi + s;
                }
                num / den
            }
            None => {
                // sum over insertion steps of the truncated-geometric mean
                let mut total = 0.0;
                for t in 2..=self.m {
                    let tf = t as f64;
                    total += phi / (1.0 - phi) - tf * phi.powi(t as i32) / (1.0 - phi.powi(t as i32));
                }
                total
            }
        }
    }

    /// The `phi` whose expected swap distance equals `target`, by bisection.
    /// `target` is clamped to the attainable range `[0, m(m-1)/4]`.
    pub fn phi_for_expected_distance(&self, target: f64) -> f64 {
        if self.m < 2 {
            return 0.0;
        }
        let half_max = max_swaps(self.m) as f64 / 2.0;
        if target <= 0.0 {
            return 0.0;
        }
        if target >= half_max {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let diff = self.expected_swap_distance(mid) - target;
            if diff.abs() <= 1e-10 {
                return mid;
            }
            if diff < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Normalized dispersion to raw `phi`. Endpoints map exactly: 0 to 0 and
    /// 1 to 1.
    pub fn to_phi(&self, norm_phi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&norm_phi) {
            return Err(Error::OutOfRange {
                name: "norm_phi",
                value: norm_phi,
                min: 0.0,
                max: 1.0,
            });
        }
        if self.m < 2 {
            // a single candidate admits only one vote; the map is trivial
            return Ok(norm_phi);
        }
        if norm_phi == 0.0 {
            return Ok(0.0);
        }
        if norm_phi == 1.0 {
            return Ok(1.0);
        }
        let target = norm_phi * max_swaps(self.m) as f64 / 2.0;
        Ok(self.phi_for_expected_distance(target))
    }

    /// Inverse map: the normalized dispersion whose expected distance equals
    /// `mean_distance`, clamped to `[0, 1]`.
    pub fn norm_phi_for_mean_distance(&self, mean_distance: f64) -> f64 {
        if self.m < 2 {
            return 0.0;
        }
        (mean_distance / (max_swaps(self.m) as f64 / 2.0)).clamp(0.0, 1.0)
    }
}

/// One-shot normalized-to-raw dispersion conversion.
pub fn norm_phi_to_phi(m: usize, norm_phi: f64) -> Result<f64> {
    NormPhiConverter::new(m).to_phi(norm_phi)
}
