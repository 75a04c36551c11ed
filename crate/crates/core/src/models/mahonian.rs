//! Mahonian numbers: permutation counts by inversion number, and the refined
//! counts that additionally fix one candidate's position. Everything here is
//! exact big-integer arithmetic; floats enter only downstream.

use num::bigint::BigUint;
use num::{One, Zero};

/// Maximum inversion count of a permutation of `m` elements.
pub fn max_swaps(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Table of `S(m', k)`: the number of permutations of `m'` elements with
/// exactly `k` inversions, for all `m' <= m`.
#[derive(Clone, Debug)]
pub struct MahonianTable {
    m: usize,
    /// `rows[mp][k]`, `k <= mp(mp-1)/2`; `rows[0] = [1]`.
    rows: Vec<Vec<BigUint>>,
}

impl MahonianTable {
    /// Builds the table via the classic recurrence
    /// `S(m',k) = S(m',k-1) + S(m'-1,k) - S(m'-1,k-m')`.
    pub fn new(m: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(m + 1);
        rows.push(vec![BigUint::one()]);
        for mp in 1..=m {
            let prev = &rows[mp - 1];
            let kmax = max_swaps(mp);
            let mut row = Vec::with_capacity(kmax + 1);
            row.push(BigUint::one());
            for k in 1..=kmax {
                let mut v = row[k - 1].clone();
                if k < prev.len() {
                    v += &prev[k];
                }
                if k >= mp && k - mp < prev.len() {
                    v -= &prev[k - mp];
                }
                row.push(v);
            }
            rows.push(row);
        }
        Self { m, rows }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `S(mp, k)`; out-of-range `k` yields zero.
    pub fn value(&self, mp: usize, k: usize) -> BigUint {
        assert!(mp <= self.m, "row {mp} beyond table size {}", self.m);
        self.rows[mp].get(k).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Row `mp` of the table.
    pub fn row(&self, mp: usize) -> &[BigUint] {
        &self.rows[mp]
    }

    /// Row `mp` converted to `f64` (exact for values below 2^53).
    pub fn row_f64(&self, mp: usize) -> Vec<f64> {
        self.rows[mp]
            .iter()
            .map(|v| {
                let s = v.to_string();
                s.parse::<f64>().expect("decimal digits parse as f64")
            })
            .collect()
    }
}

/// `T(m, k, j, i)` with 1-based `j, i`: the number of permutations of `m`
/// elements at `k` inversions from the sorted order that place element `j`
/// at position `i`. Out-of-range indices yield zero.
///
/// Marginalizing over `i` recovers `S(m, k)`.
pub fn mallows_position_counts(m: usize, k: usize, j: usize, i: usize) -> BigUint {
    assert!(m >= 1 && (1..=m).contains(&j) && (1..=m).contains(&i));
    if k > max_swaps(m) {
        return BigUint::zero();
    }
    let table = position_count_table(m, j, &MahonianTable::new(m.max(1) - 1));
    table[k][i - 1].clone()
}

/// Full `T(m, ., j, .)` slice for one element `j`: `out[k][i-1]`.
///
/// Built by growing the election one element at a time. The base case for
/// the largest element is a shifted Mahonian row; each growth step inserts
/// the new largest element at every possible position, which turns into two
/// contiguous window sums over the inversion axis (handled with prefix sums).
pub(crate) fn position_count_table(
    m: usize,
    j: usize,
    mahonian: &MahonianTable,
) -> Vec<Vec<BigUint>> {
    debug_assert!(mahonian.m() >= j.max(1) - 1);
    // level mp = j: element j is the largest, so placing it at position i
    // costs j - i extra inversions on top of a permutation of j - 1 elements
    let mut table = shifted_base(j, mahonian);
    for mp in (j + 1)..=m {
        table = grow_level(&table, mp);
    }
    table
}

fn shifted_base(j: usize, mahonian: &MahonianTable) -> Vec<Vec<BigUint>> {
    let kmax = max_swaps(j);
    let mut table = vec![vec![BigUint::zero(); j]; kmax + 1];
    for (k, row) in table.iter_mut().enumerate() {
        for (i0, cell) in row.iter_mut().enumerate() {
            let shift = j - (i0 + 1);
            if k >= shift {
                *cell = mahonian.value(j - 1, k - shift);
            }
        }
    }
    table
}

/// One growth step: from `T(mp-1, ., j, .)` to `T(mp, ., j, .)`.
fn grow_level(prev: &[Vec<BigUint>], mp: usize) -> Vec<Vec<BigUint>> {
    let prev_kmax = prev.len() - 1;
    let prev_m = prev[0].len();
    let kmax = max_swaps(mp);
    // prefix[i0][k+1] = sum over k' <= k of prev[k'][i0]
    let mut prefix = vec![vec![BigUint::zero(); prev_kmax + 2]; prev_m];
    for i0 in 0..prev_m {
        for k in 0..=prev_kmax {
            prefix[i0][k + 1] = &prefix[i0][k] + &prev[k][i0];
        }
    }
    let window = |i0: usize, lo: i64, hi: i64| -> BigUint {
        // sum of prev[k][i0] for lo <= k <= hi, clamped
        let hi = hi.min(prev_kmax as i64);
        let lo = lo.max(0);
        if hi < lo {
            return BigUint::zero();
        }
        &prefix[i0][(hi + 1) as usize] - &prefix[i0][lo as usize]
    };
    let mut next = vec![vec![BigUint::zero(); mp]; kmax + 1];
    for k in 0..=kmax {
        let ki = k as i64;
        for i in 1..=mp {
            let i0 = i - 1;
            let mut v = BigUint::zero();
            // new element inserted below position i: old position stays i
            if i0 < prev_m {
                v += window(i0, ki - (mp as i64 - i as i64 - 1), ki);
            }
            // new element inserted above position i: old position was i - 1
            if i >= 2 && i0 - 1 < prev_m {
                v += window(i0 - 1, ki - (mp as i64 - 1), ki - (mp as i64 - i as i64 + 1));
            }
            next[k][i0] = v;
        }
    }
    next
}
