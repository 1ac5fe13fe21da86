use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::dataset::{ranks0, Arity, Dataset};

/// One node of a [`DyadicTree`]: a contiguous block of ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub level: usize,
    pub position: usize,
    /// Half-open interval of 0-based ranks covered by the node.
    pub ranks: Range<usize>,
    /// First rank of the right child, or `None` for a node that is not split.
    pub cut: Option<usize>,
    /// Sample indices in the node, ascending.
    pub indices: Vec<u32>,
}

impl TreeNode {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Nested median splits of one variable. Level `l` holds `2^l` nodes; the
/// children of node `p` at level `l` are nodes `2p` and `2p + 1` at `l + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicTree {
    depth: usize,
    levels: Vec<Vec<TreeNode>>,
    // assignment[l][i]: position of sample i's node at level l
    assignment: Vec<Vec<u32>>,
}

/// Tree of depth `min(depth, ⌊log₂ n⌋)` over the ranks of `values`. A node
/// with `m` samples sends the `⌈m/2⌉` lowest ranks left.
pub fn build_dyadic_tree(values: &[f64], depth: usize) -> DyadicTree {
    let n = values.len();
    assert!(n >= 1, "tree over an empty sample");
    let depth = depth.min(floor_log2(n));
    let ranks = ranks0(values);
    DyadicTree::from_ranks(&ranks, depth, |lo, hi| lo + (hi - lo).div_ceil(2))
}

impl DyadicTree {
    /// Tree for a column of the given arity. A binary column yields a
    /// depth-one tree whose children are its two observed values.
    pub fn for_column(values: &[f64], arity: Arity, depth: usize) -> DyadicTree {
        match arity {
            Arity::Continuous => build_dyadic_tree(values, depth),
            Arity::Binary => {
                let n = values.len();
                let low = values.iter().copied().fold(f64::INFINITY, f64::min);
                let low_count = values.iter().filter(|&&v| v == low).count();
                let depth = depth.min(1).min(floor_log2(n));
                let ranks = ranks0(values);
                DyadicTree::from_ranks(&ranks, depth, |_, _| low_count)
            }
        }
    }

    fn from_ranks(ranks: &[u32], depth: usize, cut: impl Fn(usize, usize) -> usize) -> DyadicTree {
        let n = ranks.len();
        let mut order = vec![0u32; n];
        for (i, &r) in ranks.iter().enumerate() {
            order[r as usize] = i as u32;
        }

        let mut levels: Vec<Vec<TreeNode>> = Vec::with_capacity(depth + 1);
        #[allow(clippy::single_range_in_vec_init)]
        let mut spans = vec![0..n];
        for level in 0..=depth {
            let last = level == depth;
            let mut nodes = Vec::with_capacity(spans.len());
            let mut next = Vec::with_capacity(spans.len() * 2);
            for (position, span) in spans.iter().enumerate() {
                let split = if !last && span.len() >= 2 {
                    Some(cut(span.start, span.end))
                } else {
                    None
                };
                if !last {
                    // unsplit nodes keep their samples on the left
                    let c = split.unwrap_or(span.end);
                    next.push(span.start..c);
                    next.push(c..span.end);
                }
                let mut indices = order[span.clone()].to_vec();
                indices.sort_unstable();
                nodes.push(TreeNode {
                    level,
                    position,
                    ranks: span.clone(),
                    cut: split,
                    indices,
                });
            }
            levels.push(nodes);
            spans = next;
        }

        let assignment = levels
            .iter()
            .map(|nodes| {
                let mut a = vec![0u32; n];
                for node in nodes {
                    for &i in &node.indices {
                        a[i as usize] = node.position as u32;
                    }
                }
                a
            })
            .collect();

        DyadicTree {
            depth,
            levels,
            assignment,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, l: usize) -> &[TreeNode] {
        &self.levels[l]
    }

    pub fn node(&self, level: usize, position: usize) -> &TreeNode {
        &self.levels[level][position]
    }

    /// Position of the level-`l` node containing sample `i`.
    pub fn position_of(&self, level: usize, i: usize) -> usize {
        self.assignment[level][i] as usize
    }

    pub(crate) fn assignment(&self, level: usize) -> &[u32] {
        &self.assignment[level]
    }

    pub fn sample_count(&self) -> usize {
        self.assignment.first().map_or(0, Vec::len)
    }
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// A scanning window `I × J`: node `pos_i` at level `l1` of the X-tree times
/// node `pos_j` at level `l2` of the Y-tree. Its quadrants are the products
/// of the two nodes' children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Window {
    pub l1: usize,
    pub pos_i: usize,
    pub l2: usize,
    pub pos_j: usize,
}

impl Window {
    pub fn resolution(&self) -> usize {
        self.l1 + self.l2
    }
}

/// The pair of trees a scan runs over.
#[derive(Debug, Clone)]
pub struct WindowGrid {
    x_tree: DyadicTree,
    y_tree: DyadicTree,
}

impl WindowGrid {
    pub fn new(data: &Dataset, k1: usize, k2: usize) -> WindowGrid {
        WindowGrid {
            x_tree: DyadicTree::for_column(data.x(), data.x_arity(), k1),
            y_tree: DyadicTree::for_column(data.y(), data.y_arity(), k2),
        }
    }

    pub fn from_trees(x_tree: DyadicTree, y_tree: DyadicTree) -> WindowGrid {
        assert_eq!(x_tree.sample_count(), y_tree.sample_count());
        WindowGrid { x_tree, y_tree }
    }

    pub fn x_tree(&self) -> &DyadicTree {
        &self.x_tree
    }

    pub fn y_tree(&self) -> &DyadicTree {
        &self.y_tree
    }

    /// Realised depths `(k1, k2)` of the two trees.
    pub fn depths(&self) -> (usize, usize) {
        (self.x_tree.depth, self.y_tree.depth)
    }

    pub fn sample_count(&self) -> usize {
        self.x_tree.sample_count()
    }

    /// All windows of partition `(l1, l2)` in row-major position order.
    pub fn partition_windows(&self, l1: usize, l2: usize) -> impl Iterator<Item = Window> {
        let (ni, nj) = (1usize << l1, 1usize << l2);
        (0..ni).flat_map(move |pos_i| {
            (0..nj).map(move |pos_j| Window {
                l1,
                pos_i,
                l2,
                pos_j,
            })
        })
    }

    pub fn contains(&self, w: &Window, i: usize) -> bool {
        self.x_tree.position_of(w.l1, i) == w.pos_i && self.y_tree.position_of(w.l2, i) == w.pos_j
    }

    /// Samples in the window, ascending.
    pub fn window_indices(&self, w: &Window) -> Vec<u32> {
        let a = &self.x_tree.node(w.l1, w.pos_i).indices;
        let b = &self.y_tree.node(w.l2, w.pos_j).indices;
        let (mut p, mut q) = (0, 0);
        let mut out = Vec::new();
        while p < a.len() && q < b.len() {
            match a[p].cmp(&b[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[p]);
                    p += 1;
                    q += 1;
                }
            }
        }
        out
    }

    /// Quadrant of sample `i` inside window `w`: 0 = (left, left),
    /// 1 = (left, right), 2 = (right, left), 3 = (right, right) for the
    /// (X child, Y child) pair. Requires both trees to have a level below
    /// the window.
    #[inline]
    pub fn quadrant(&self, w: &Window, i: usize) -> usize {
        let qx = self.x_tree.assignment[w.l1 + 1][i] as usize & 1;
        let qy = self.y_tree.assignment[w.l2 + 1][i] as usize & 1;
        qx * 2 + qy
    }
}
