//! Frequency matrices of the two classic single-peaked distributions on the
//! axis `0 < 1 < ... < m-1`: uniform over single-peaked votes (Walsh) and
//! the random-peak process (Conitzer).

use crate::matrix::FrequencyMatrix;
use crate::scalar::{rows_to_f64, Scalar};

/// Walsh: candidate `j` (1-based) at position `i` has probability
/// `C(m-i, j-1)/2^(m-i+1)` (when `j <= m-i+1`) plus `C(m-i, j-i)/2^(m-i+1)`
/// (when `j >= i`). Row `i` only involves binomials over `m-i` elements, so
/// rows are built bottom-up while a scaled Pascal row grows.
pub(crate) fn walsh_rows<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    let mut rows = vec![vec![S::zero(); m]; m];
    let half = S::half();
    // scaled[x] = C(d, x) / 2^(d+1), for the current d = m - i
    let mut scaled = vec![half.clone()];
    for i in (1..=m).rev() {
        let d = m - i;
        for j in 1..=m {
            let mut v = S::zero();
            if j <= d + 1 {
                v = v + scaled[j - 1].clone();
            }
            if j >= i && j - i <= d {
                v = v + scaled[j - i].clone();
            }
            rows[i - 1][j - 1] = v;
        }
        // grow the scaled row from d to d + 1
        let mut next = vec![S::zero(); scaled.len() + 1];
        for (x, s) in scaled.iter().enumerate() {
            let h = half.clone() * s.clone();
            next[x] = next[x].clone() + h.clone();
            next[x + 1] = next[x + 1].clone() + h;
        }
        scaled = next;
    }
    rows
}

/// Frequency matrix of the uniform single-peaked (Walsh) distribution.
pub fn walsh_matrix(m: usize) -> FrequencyMatrix {
    assert!(m >= 1, "walsh matrix needs m >= 1");
    FrequencyMatrix::from_rows_unchecked(rows_to_f64(&walsh_rows::<f64>(m)))
}

/// Probability that the candidates `a..=b` (1-based interval of the axis)
/// occupy the top `b - a + 1` positions under the random-peak process.
fn interval_top_probability<S: Scalar>(a: usize, b: usize, m: usize) -> S {
    debug_assert!(1 <= a && a <= b && b <= m);
    let m64 = m as u64;
    if a == 1 && b == m {
        S::one()
    } else if a == 1 {
        S::from_ratio(b as u64 + 1, 2 * m64)
    } else if b == m {
        S::from_ratio((m - a) as u64 + 2, 2 * m64)
    } else {
        S::from_ratio(1, m64)
    }
}

/// Conitzer (random peak): candidate `j` reaches position `i` only if the
/// `i-1` candidates above it form an axis interval directly to its left or
/// right; the candidate is then picked over the interval's other neighbor
/// with probability 1/2, or surely when the interval already touches an end
/// of the axis.
pub(crate) fn conitzer_rows<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    let mut rows = vec![vec![S::zero(); m]; m];
    let half = S::half();
    for j in 1..=m {
        rows[0][j - 1] = S::from_ratio(1, m as u64);
        for i in 2..=m {
            let mut v = S::zero();
            // interval of i-1 candidates to the right of j on the axis
            if j + i - 1 <= m {
                let p = interval_top_probability::<S>(j + 1, j + i - 1, m);
                let ext = if j + i <= m { half.clone() } else { S::one() };
                v = v + p * ext;
            }
            // interval of i-1 candidates to the left of j on the axis
            if j >= i {
                let p = interval_top_probability::<S>(j - i + 1, j - 1, m);
                let ext = if j > i { half.clone() } else { S::one() };
                v = v + p * ext;
            }
            rows[i - 1][j - 1] = v;
        }
    }
    rows
}

/// Frequency matrix of the Conitzer (random peak) distribution.
pub fn conitzer_matrix(m: usize) -> FrequencyMatrix {
    assert!(m >= 1, "conitzer matrix needs m >= 1");
    FrequencyMatrix::from_rows_unchecked(rows_to_f64(&conitzer_rows::<f64>(m)))
}
