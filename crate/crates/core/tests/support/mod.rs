//! Brute-force oracles shared by the integration suites: exhaustive
//! enumerations kept deliberately independent of the library's fast paths.

use itertools::Itertools;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use votemap::election::{swap_distance, Ranking};
use votemap::metric::emd;
use votemap::structures::{is_single_peaked_wrt, GsTree};
use votemap::FrequencyMatrix;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_rankings(m: usize) -> Vec<Ranking> {
    (0..m)
        .permutations(m)
        .map(|p| Ranking::new(p).unwrap())
        .collect()
}

/// Average of `m + 2` random permutation matrices: bistochastic by
/// construction.
pub fn random_bistochastic(m: usize, rng: &mut ChaCha8Rng) -> FrequencyMatrix {
    let k = m + 2;
    let mut rows = vec![vec![0.0f64; m]; m];
    for _ in 0..k {
        let mut order: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for (i, &c) in order.iter().enumerate() {
            rows[i][c] += 1.0 / k as f64;
        }
    }
    FrequencyMatrix::from_rows(rows).unwrap()
}

/// Minimum summed column EMD over all m! column assignments.
pub fn brute_force_positionwise(a: &FrequencyMatrix, b: &FrequencyMatrix) -> f64 {
    let m = a.dim();
    let cols_a: Vec<Vec<f64>> = a.columns();
    let cols_b: Vec<Vec<f64>> = b.columns();
    let cost: Vec<Vec<f64>> = cols_a
        .iter()
        .map(|ca| {
            cols_b
                .iter()
                .map(|cb| emd(ca, cb).unwrap())
                .collect()
        })
        .collect();
    (0..m)
        .permutations(m)
        .map(|assign| (0..m).map(|i| cost[i][assign[i]]).sum())
        .fold(f64::INFINITY, f64::min)
}

fn average_of_votes(votes: &[(Ranking, f64)]) -> FrequencyMatrix {
    let m = votes[0].0.len();
    let mut rows = vec![vec![0.0f64; m]; m];
    for (v, weight) in votes {
        for (i, &c) in v.order().iter().enumerate() {
            rows[i][c] += weight;
        }
    }
    FrequencyMatrix::from_rows(rows).unwrap()
}

/// Full-enumeration Mallows expectation: weight phi^distance over all m!
/// votes around the identity central order.
pub fn brute_force_mallows(m: usize, phi: f64) -> FrequencyMatrix {
    let central = Ranking::identity(m);
    let weighted: Vec<(Ranking, f64)> = all_rankings(m)
        .into_iter()
        .map(|v| {
            let k = swap_distance(&v, &central).unwrap();
            (v, phi.powi(k as i32))
        })
        .collect();
    let z: f64 = weighted.iter().map(|(_, w)| w).sum();
    let normalized: Vec<(Ranking, f64)> =
        weighted.into_iter().map(|(v, w)| (v, w / z)).collect();
    average_of_votes(&normalized)
}

/// Uniform average over the distinct frontiers reachable by reversing
/// internal nodes.
pub fn brute_force_tree_uniform(tree: &GsTree) -> FrequencyMatrix {
    let k = tree.internal_nodes().len();
    let mut support = std::collections::BTreeSet::new();
    for mask in 0u64..(1 << k) {
        let flags: Vec<bool> = (0..k).map(|b| mask >> b & 1 == 1).collect();
        support.insert(tree.frontier_with_reversals(&flags));
    }
    let weight = 1.0 / support.len() as f64;
    let votes: Vec<(Ranking, f64)> = support.into_iter().map(|v| (v, weight)).collect();
    average_of_votes(&votes)
}

/// Uniform average over all votes single-peaked on the identity axis.
pub fn brute_force_walsh(m: usize) -> FrequencyMatrix {
    let axis = Ranking::identity(m);
    let support: Vec<Ranking> = all_rankings(m)
        .into_iter()
        .filter(|v| is_single_peaked_wrt(v, &axis).unwrap())
        .collect();
    assert_eq!(support.len(), 1 << (m - 1), "single-peaked support size");
    let weight = 1.0 / support.len() as f64;
    let votes: Vec<(Ranking, f64)> = support.into_iter().map(|v| (v, weight)).collect();
    average_of_votes(&votes)
}

/// Exact expectation of the random-peak process: enumerate every peak and
/// every left/right extension sequence with its probability.
pub fn brute_force_conitzer(m: usize) -> FrequencyMatrix {
    let mut outcomes: Vec<(Ranking, f64)> = Vec::new();
    for peak in 0..m {
        expand_conitzer(m, vec![peak], peak, peak, 1.0 / m as f64, &mut outcomes);
    }
    average_of_votes(&outcomes)
}

fn expand_conitzer(
    m: usize,
    prefix: Vec<usize>,
    lo: usize,
    hi: usize,
    prob: f64,
    out: &mut Vec<(Ranking, f64)>,
) {
    if prefix.len() == m {
        out.push((Ranking::new(prefix).unwrap(), prob));
        return;
    }
    let can_left = lo > 0;
    let can_right = hi + 1 < m;
    let step = if can_left && can_right { 0.5 } else { 1.0 };
    if can_left {
        let mut next = prefix.clone();
        next.push(lo - 1);
        expand_conitzer(m, next, lo - 1, hi, prob * step, out);
    }
    if can_right {
        let mut next = prefix;
        next.push(hi + 1);
        expand_conitzer(m, next, lo, hi + 1, prob * step, out);
    }
}

/// Closed-form random-peak entry for even m, 1-based indices, straight from
/// the even-m case analysis (mirrored onto the right half of the axis).
pub fn conitzer_case_table(m: usize, j: usize, i: usize) -> f64 {
    assert!(m % 2 == 0);
    let j = if j > m / 2 { m + 1 - j } else { j };
    let m_f = m as f64;
    if i + j > m {
        if i == m - j + 1 {
            (m_f - j as f64 + 1.0) / (2.0 * m_f)
        } else {
            0.0
        }
    } else if i < j {
        1.0 / m_f
    } else if i == j {
        (j as f64 + 1.0) / (2.0 * m_f)
    } else {
        // j < i < m - j + 1
        1.0 / (2.0 * m_f)
    }
}
