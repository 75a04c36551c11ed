//! Rankings, elections, and their empirical frequency matrices.

use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use serde::{Deserialize, Serialize};

/// A strict total order over candidates `0..m`.
///
/// `order[i]` is the candidate at position `i`; position 0 is the top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    /// Builds a ranking, checking that `order` is a permutation of `0..m`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        if m == 0 {
            return Err(Error::InvalidRanking("empty ranking".into()));
        }
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m {
                return Err(Error::InvalidRanking(format!(
                    "candidate {c} out of range for m={m}"
                )));
            }
            if seen[c] {
                return Err(Error::InvalidRanking(format!("candidate {c} repeated")));
            }
            seen[c] = true;
        }
        Ok(Self { order })
    }

    /// The ranking `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        Self {
            order: (0..m).collect(),
        }
    }

    /// Number of candidates.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Candidates from top to bottom.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Candidate at position `i` (0 = top).
    pub fn candidate_at(&self, i: usize) -> usize {
        self.order[i]
    }

    /// Position of candidate `c`; 0 is the top position.
    ///
    /// Panics if `c >= m`.
    pub fn position_of(&self, c: usize) -> usize {
        assert!(c < self.len(), "candidate {c} out of range");
        self.order.iter().position(|&x| x == c).unwrap()
    }

    /// The reverse order. An involution.
    pub fn reversed(&self) -> Ranking {
        let mut order = self.order.clone();
        order.reverse();
        Ranking { order }
    }

    /// Inverse permutation: `inv[c]` = position of candidate `c`.
    pub fn inverse_positions(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (i, &c) in self.order.iter().enumerate() {
            inv[c] = i;
        }
        inv
    }
}

/// Swap (Kendall tau) distance: the number of discordant candidate pairs.
///
/// Symmetric, zero iff the rankings are equal, at most `m(m-1)/2`.
pub fn swap_distance(u: &Ranking, v: &Ranking) -> Result<u64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let pu = u.inverse_positions();
    let pv = v.inverse_positions();
    let m = u.len();
    let mut discordant = 0u64;
    for a in 0..m {
        for b in (a + 1)..m {
            let du = pu[a] as i64 - pu[b] as i64;
            let dv = pv[a] as i64 - pv[b] as i64;
            if du * dv < 0 {
                discordant += 1;
            }
        }
    }
    Ok(discordant)
}

/// An election: `m` candidates and a multiset of rankings.
///
/// Votes are stored as `(ranking, multiplicity)` pairs, the way preference
/// files encode them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    m: usize,
    votes: Vec<(Ranking, u64)>,
}

impl Election {
    /// Builds an election, validating vote lengths and multiplicities.
    pub fn new(m: usize, votes: Vec<(Ranking, u64)>) -> Result<Self> {
        for (r, mult) in &votes {
            if r.len() != m {
                return Err(Error::DimensionMismatch {
                    left: r.len(),
                    right: m,
                });
            }
            if *mult == 0 {
                return Err(Error::InvalidRanking(
                    "vote multiplicity must be positive".into(),
                ));
            }
        }
        if votes.iter().map(|(_, k)| *k).sum::<u64>() == 0 {
            return Err(Error::EmptyElection);
        }
        Ok(Self { m, votes })
    }

    /// Convenience constructor from plain vote lists (multiplicity 1 each).
    pub fn from_rankings(m: usize, rankings: Vec<Ranking>) -> Result<Self> {
        Self::new(m, rankings.into_iter().map(|r| (r, 1)).collect())
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    /// Total number of voters (sum of multiplicities).
    pub fn num_voters(&self) -> u64 {
        self.votes.iter().map(|(_, k)| *k).sum()
    }

    pub fn votes(&self) -> &[(Ranking, u64)] {
        &self.votes
    }

    /// Exact per-entry counts: `counts[i][j]` = number of voters putting
    /// candidate `j` at position `i`.
    pub fn position_counts(&self) -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; self.m]; self.m];
        for (r, mult) in &self.votes {
            for (i, &c) in r.order().iter().enumerate() {
                counts[i][c] += mult;
            }
        }
        counts
    }

    /// Empirical frequency matrix: entry `(i, j)` is the fraction of voters
    /// ranking candidate `j` at position `i`.
    ///
    /// Accumulation is exact integer counting; the single rounding step is the
    /// final division by `n`, so the result is bistochastic to machine
    /// precision.
    pub fn frequency_matrix(&self) -> FrequencyMatrix {
        let n = self.num_voters() as f64;
        let counts = self.position_counts();
        let rows: Vec<Vec<f64>> = counts
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / n).collect())
            .collect();
        FrequencyMatrix::from_rows_unchecked(rows)
    }

    /// Mean swap distance from `center` over all voters.
    pub fn mean_swap_distance(&self, center: &Ranking) -> Result<f64> {
        let mut total = 0u64;
        for (r, mult) in &self.votes {
            total += swap_distance(r, center)? * mult;
        }
        Ok(total as f64 / self.num_voters() as f64)
    }
}
