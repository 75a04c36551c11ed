//! Structured preference domains: single-peaked votes and group-separable
//! trees, with the membership checks the samplers and tests rely on.

use crate::election::Ranking;
use crate::error::{Error, Result};

/// True iff for every `t`, the top `t` candidates of `v` form a contiguous
/// interval of `axis`.
pub fn is_single_peaked_wrt(v: &Ranking, axis: &Ranking) -> Result<bool> {
    if v.len() != axis.len() {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: axis.len(),
        });
    }
    let ax = axis.inverse_positions();
    let mut lo = ax[v.candidate_at(0)];
    let mut hi = lo;
    for i in 1..v.len() {
        let q = ax[v.candidate_at(i)];
        if q + 1 == lo {
            lo = q;
        } else if q == hi + 1 {
            hi = q;
        } else {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nested description used to build a [`GsTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(usize),
    Internal(Vec<TreeNode>),
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<usize>,
    children: Vec<usize>,
    /// Candidate index for leaves, `None` for internal nodes.
    leaf: Option<usize>,
    /// Sorted candidate set of the subtree.
    leaves: Vec<usize>,
}

/// A rooted ordered tree whose leaves are the candidates `0..m`. Reversing
/// the children of internal nodes generates the votes of the associated
/// group-separable domain.
#[derive(Clone, Debug)]
pub struct GsTree {
    m: usize,
    nodes: Vec<Node>,
    root: usize,
    internal: Vec<usize>,
}

impl GsTree {
    /// Builds and validates a tree: internal nodes need at least two
    /// children, and the leaves must be exactly `0..m`, each once.
    pub fn from_node(root: &TreeNode) -> Result<Self> {
        let mut tree = GsTree {
            m: 0,
            nodes: Vec::new(),
            root: 0,
            internal: Vec::new(),
        };
        tree.build(root, None)?;
        let leaves = &tree.nodes[tree.root].leaves;
        let m = leaves.len();
        if leaves.iter().enumerate().any(|(i, &c)| i != c) {
            return Err(Error::InvalidTree(format!(
                "leaves must be exactly 0..{m}, got {leaves:?}"
            )));
        }
        tree.m = m;
        Ok(tree)
    }

    fn build(&mut self, node: &TreeNode, parent: Option<usize>) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            children: Vec::new(),
            leaf: None,
            leaves: Vec::new(),
        });
        match node {
            TreeNode::Leaf(c) => {
                self.nodes[id].leaf = Some(*c);
                self.nodes[id].leaves = vec![*c];
            }
            TreeNode::Internal(children) => {
                if children.len() < 2 {
                    return Err(Error::InvalidTree(
                        "internal nodes need at least two children".into(),
                    ));
                }
                self.internal.push(id);
                for child in children {
                    let cid = self.build(child, Some(id))?;
                    self.nodes[id].children.push(cid);
                    let mut leaves = self.nodes[cid].leaves.clone();
                    self.nodes[id].leaves.append(&mut leaves);
                }
                self.nodes[id].leaves.sort_unstable();
                if self.nodes[id].leaves.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidTree("duplicate leaf label".into()));
                }
            }
        }
        Ok(id)
    }

    /// Flat tree: one internal node with leaves `0..m` as children.
    pub fn flat(m: usize) -> Result<Self> {
        Self::from_node(&TreeNode::Internal(
            (0..m).map(TreeNode::Leaf).collect(),
        ))
    }

    /// Perfectly balanced binary tree; `m` must be a power of two.
    pub fn balanced(m: usize) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidTree(format!(
                "balanced tree needs a power-of-two leaf count, got {m}"
            )));
        }
        fn build(lo: usize, hi: usize) -> TreeNode {
            if hi - lo == 1 {
                TreeNode::Leaf(lo)
            } else {
                let mid = (lo + hi) / 2;
                TreeNode::Internal(vec![build(lo, mid), build(mid, hi)])
            }
        }
        Self::from_node(&build(0, m))
    }

    /// Binary caterpillar tree over `0..m`: each internal node has leaf `j`
    /// on the left and the rest of the spine on the right.
    pub fn caterpillar(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidTree(
                "caterpillar tree needs at least two leaves".into(),
            ));
        }
        let mut node = TreeNode::Internal(vec![
            TreeNode::Leaf(m - 2),
            TreeNode::Leaf(m - 1),
        ]);
        for j in (0..m.saturating_sub(2)).rev() {
            node = TreeNode::Internal(vec![TreeNode::Leaf(j), node]);
        }
        Self::from_node(&node)
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    /// Ids of internal nodes in construction (pre-order) order.
    pub fn internal_nodes(&self) -> &[usize] {
        &self.internal
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn parent_of(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub(crate) fn children_of(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    pub(crate) fn leaf_label(&self, id: usize) -> Option<usize> {
        self.nodes[id].leaf
    }

    pub(crate) fn subtree_leaf_count(&self, id: usize) -> usize {
        self.nodes[id].leaves.len()
    }

    pub(crate) fn root(&self) -> usize {
        self.root
    }

    /// The frontier: leaves read left to right.
    pub fn frontier(&self) -> Ranking {
        self.frontier_with_reversals(&vec![false; self.internal.len()])
    }

    /// Frontier after reversing the children of the internal nodes whose flag
    /// is set; flags follow [`GsTree::internal_nodes`] order.
    pub fn frontier_with_reversals(&self, reversed: &[bool]) -> Ranking {
        assert_eq!(reversed.len(), self.internal.len());
        let mut flip = vec![false; self.nodes.len()];
        for (&id, &f) in self.internal.iter().zip(reversed) {
            flip[id] = f;
        }
        let mut order = Vec::with_capacity(self.m);
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if let Some(c) = node.leaf {
                order.push(c);
            } else if flip[id] {
                // stack is LIFO, so push in frontier order to pop reversed
                stack.extend(node.children.iter().copied());
            } else {
                stack.extend(node.children.iter().rev().copied());
            }
        }
        Ranking::new(order).expect("tree leaves form a permutation")
    }
}

/// True iff some choice of child reversals makes `v` the frontier of `tree`.
pub fn is_consistent_with_tree(v: &Ranking, tree: &GsTree) -> Result<bool> {
    if v.len() != tree.num_candidates() {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: tree.num_candidates(),
        });
    }
    fn segment_matches(tree: &GsTree, id: usize, seg: &[usize]) -> bool {
        let node = &tree.nodes[id];
        if let Some(c) = node.leaf {
            return seg == [c];
        }
        let mut sorted = seg.to_vec();
        sorted.sort_unstable();
        if sorted != node.leaves {
            return false;
        }
        let try_order = |ids: &mut dyn Iterator<Item = usize>| -> bool {
            let mut off = 0;
            for cid in ids {
                let k = tree.nodes[cid].leaves.len();
                if !segment_matches(tree, cid, &seg[off..off + k]) {
                    return false;
                }
                off += k;
            }
            true
        };
        try_order(&mut node.children.iter().copied())
            || try_order(&mut node.children.iter().rev().copied())
    }
    Ok(segment_matches(tree, tree.root(), v.order()))
}

/// The rank-reversing relabeling that carries caterpillar-consistent votes
/// to votes single-peaked on the axis `0 < 1 < ... < m-1`: if candidate `j`
/// sits at position `i` of `v`, candidate `i` sits at position `m-j-1` of
/// the image (0-based). A bijection on rankings.
pub fn caterpillar_sp_image(v: &Ranking) -> Ranking {
    let m = v.len();
    let mut order = vec![0; m];
    for (i, &j) in v.order().iter().enumerate() {
        order[m - 1 - j] = i;
    }
    Ranking::new(order).expect("image of a permutation is a permutation")
}
