//! Frequency matrices of group-separable distributions: the general tree
//! dynamic program and the closed form for caterpillar trees.

use crate::matrix::FrequencyMatrix;
use crate::scalar::{rows_to_f64, Scalar};
use crate::structures::GsTree;

/// `f[node][t]`: probability that `node` is preceded by exactly `t`
/// candidates in the frontier after reversing each internal node with
/// probability 1/2. Nodes are processed parents-first; a child's offset is
/// the leaf count of its left or right siblings depending on whether the
/// parent is reversed.
pub(crate) fn gs_tree_rows<S: Scalar>(tree: &GsTree) -> Vec<Vec<S>> {
    let m = tree.num_candidates();
    let n_nodes = tree.node_count();
    let mut f: Vec<Vec<S>> = vec![vec![S::zero(); m]; n_nodes];
    f[tree.root()][0] = S::one();
    // arena ids are in pre-order, so parents precede children
    for id in 0..n_nodes {
        if id == tree.root() {
            continue;
        }
        let parent = tree.parent_of(id).expect("non-root node has a parent");
        let siblings = tree.children_of(parent);
        let my_index = siblings.iter().position(|&c| c == id).unwrap();
        let left: usize = siblings[..my_index]
            .iter()
            .map(|&c| tree.subtree_leaf_count(c))
            .sum();
        let right: usize = siblings[my_index + 1..]
            .iter()
            .map(|&c| tree.subtree_leaf_count(c))
            .sum();
        let half = S::half();
        for t in 0..m {
            let mut v = S::zero();
            if t >= left {
                v = v + half.clone() * f[parent][t - left].clone();
            }
            if t >= right {
                v = v + half.clone() * f[parent][t - right].clone();
            }
            f[id][t] = v;
        }
    }
    let mut rows = vec![vec![S::zero(); m]; m];
    for id in 0..n_nodes {
        if let Some(c) = tree.leaf_label(id) {
            for t in 0..m {
                rows[t][c] = f[id][t].clone();
            }
        }
    }
    rows
}

/// Frequency matrix of the uniform distribution over votes consistent with
/// `tree`. `O(m^2)` arithmetic operations.
pub fn gs_tree_matrix(tree: &GsTree) -> FrequencyMatrix {
    FrequencyMatrix::from_rows_unchecked(rows_to_f64(&gs_tree_rows::<f64>(tree)))
}

/// Closed form for the caterpillar tree over `0..m`: candidate `j` (1-based)
/// lands at position `i` with probability
/// `C(j-1, i-1)/2^j` (when `i <= j`) plus `C(j-1, i-1-(m-j))/2^j` (when
/// `i > m-j`). Evaluated through binomial rows pre-scaled by powers of two,
/// so it is stable for hundreds of candidates.
pub(crate) fn caterpillar_rows<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    let mut rows = vec![vec![S::zero(); m]; m];
    // scaled[i] = C(j-1, i) / 2^(j-1), updated in place as j grows
    let mut scaled = vec![S::one()];
    let half = S::half();
    for j in 1..=m {
        for i in 1..=m {
            let mut v = S::zero();
            if i <= j {
                v = v + half.clone() * scaled[i - 1].clone();
            }
            if i > m - j {
                let x = i - 1 - (m - j);
                if x <= j - 1 {
                    v = v + half.clone() * scaled[x].clone();
                }
            }
            rows[i - 1][j - 1] = v;
        }
        // advance the scaled binomial row from j-1 to j
        let mut next = vec![S::zero(); scaled.len() + 1];
        for (i, s) in scaled.iter().enumerate() {
            let h = half.clone() * s.clone();
            next[i] = next[i].clone() + h.clone();
            next[i + 1] = next[i + 1].clone() + h;
        }
        scaled = next;
    }
    rows
}

/// Closed-form caterpillar frequency matrix; stable for `m` in the hundreds.
pub fn caterpillar_matrix(m: usize) -> FrequencyMatrix {
    assert!(m >= 1, "caterpillar matrix needs m >= 1");
    FrequencyMatrix::from_rows_unchecked(rows_to_f64(&caterpillar_rows::<f64>(m)))
}
