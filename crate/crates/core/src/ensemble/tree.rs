//! Binary decision trees: Gini classification trees over integer sample
//! multiplicities, weighted Gini trees for boosting, and variance regression
//! trees.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Node<L> {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(L),
}

/// Nodes in pre-order; the root is node 0. A sample goes left when its
/// feature value is `<= threshold`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tree<L> {
    pub nodes: Vec<Node<L>>,
}

impl<L> Tree<L> {
    pub fn leaf(&self, x: &[f64]) -> &L {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf(l) => return l,
            }
        }
    }

    /// Largest number of split nodes on any root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go<L>(t: &Tree<L>, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
                Node::Leaf(_) => 0,
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(self, 0)
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = &L> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(l) => Some(l),
            Node::Split { .. } => None,
        })
    }
}

/// Class totals at a leaf (sample counts or boosting weights).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassCounts {
    pub negative: f64,
    pub positive: f64,
}

impl ClassCounts {
    pub fn total(&self) -> f64 {
        self.negative + self.positive
    }

    pub fn positive_fraction(&self) -> f64 {
        self.positive / self.total()
    }
}

pub type DecisionTree = Tree<ClassCounts>;
pub type RegressionTree = Tree<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Candidate features per node; all features when `>= d`.
    pub features_per_split: usize,
}

/// Candidate feature indices for one node, ascending.
fn candidates(d: usize, k: usize, rng: &mut Option<&mut ChaCha8Rng>) -> Vec<usize> {
    match rng {
        Some(rng) if k < d => {
            let mut f = index::sample(*rng, d, k).into_vec();
            f.sort_unstable();
            f
        }
        _ => (0..d).collect(),
    }
}

/// Threshold halfway between two consecutive distinct values, never equal
/// to the upper one.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

/// Gini split quality `S_l / n_l + S_r / n_r` with `S` the sum of squared
/// class counts, kept as an exact fraction. Larger is better; it equals
/// `n - n * weighted_gini`.
#[derive(Debug, Clone, Copy)]
struct GiniScore {
    num: u128,
    den: u128,
}

impl GiniScore {
    fn new(left: [u64; 2], right: [u64; 2]) -> Self {
        let sq = |c: [u64; 2]| (c[0] as u128) * (c[0] as u128) + (c[1] as u128) * (c[1] as u128);
        let nl = (left[0] + left[1]) as u128;
        let nr = (right[0] + right[1]) as u128;
        GiniScore {
            num: sq(left) * nr + sq(right) * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &GiniScore) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Weighted Gini impurity of a node (`1 - sum p^2`), times its weight.
pub(crate) fn weighted_gini(counts: [f64; 2]) -> f64 {
    let n = counts[0] + counts[1];
    if n <= 0.0 {
        return 0.0;
    }
    n - (counts[0] * counts[0] + counts[1] * counts[1]) / n
}

/// Grows a Gini classification tree. `samples` may repeat indices
/// (bootstrap multiplicities). Split choice is exact: ties go to the lowest
/// feature index, then the lowest threshold.
pub(crate) fn grow_classifier(
    x: &[Vec<f64>],
    y: &[u8],
    samples: Vec<usize>,
    params: GrowParams,
    mut rng: Option<&mut ChaCha8Rng>,
) -> DecisionTree {
    let d = x.first().map_or(0, Vec::len);
    let mut nodes = Vec::new();
    // explicit stack: (samples, depth, slot to patch in parent)
    let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = alloc::vec![(samples, 0, None)];
    while let Some((samples, depth, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some((p, is_left)) = parent {
            if let Node::Split { left, right, .. } = &mut nodes[p] {
                if is_left {
                    *left = id;
                } else {
                    *right = id;
                }
            }
        }
        let mut counts = [0u64; 2];
        for &i in &samples {
            counts[y[i] as usize] += 1;
        }
        let leaf = Node::Leaf(ClassCounts {
            negative: counts[0] as f64,
            positive: counts[1] as f64,
        });
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || depth >= params.max_depth || samples.len() < params.min_samples_split {
            nodes.push(leaf);
            continue;
        }

        let mut best: Option<(GiniScore, usize, f64)> = None;
        let mut sorted: Vec<usize> = samples.clone();
        for f in candidates(d, params.features_per_split, &mut rng) {
            sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
            let mut left = [0u64; 2];
            for w in 0..sorted.len() - 1 {
                left[y[sorted[w]] as usize] += 1;
                let (lo, hi) = (x[sorted[w]][f], x[sorted[w + 1]][f]);
                if lo == hi {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let score = GiniScore::new(left, right);
                let better = match &best {
                    None => true,
                    Some((b, _, _)) => score.cmp(b) == Ordering::Greater,
                };
                if better {
                    best = Some((score, f, midpoint(lo, hi)));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            nodes.push(leaf);
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            samples.iter().partition(|&&i| x[i][feature] <= threshold);
        debug_assert!({
            let count = |s: &[usize]| {
                let mut c = [0f64; 2];
                for &i in s {
                    c[y[i] as usize] += 1.0;
                }
                c
            };
            weighted_gini(count(&l)) + weighted_gini(count(&r))
                <= weighted_gini([counts[0] as f64, counts[1] as f64]) + 1e-9
        });
        nodes.push(Node::Split {
            feature,
            threshold,
            left: usize::MAX,
            right: usize::MAX,
        });
        // right pushed first so the left subtree is numbered next
        stack.push((r, depth + 1, Some((id, false))));
        stack.push((l, depth + 1, Some((id, true))));
    }
    Tree { nodes }
}

/// Node statistics for the floating-point builders.
pub(crate) trait Criterion {
    type Leaf;
    /// Accumulator over samples.
    fn zero(&self) -> [f64; 3];
    fn add(&self, acc: &mut [f64; 3], i: usize);
    /// Impurity of a node from its accumulator (lower is better, additive).
    fn impurity(&self, acc: &[f64; 3]) -> f64;
    fn is_pure(&self, acc: &[f64; 3]) -> bool;
    fn leaf(&self, samples: &[usize], acc: &[f64; 3]) -> Self::Leaf;
}

/// Weighted Gini for boosting stumps: acc = [w_neg, w_pos, count].
pub(crate) struct WeightedGini<'a> {
    pub y: &'a [u8],
    pub w: &'a [f64],
}

impl Criterion for WeightedGini<'_> {
    type Leaf = ClassCounts;

    fn zero(&self) -> [f64; 3] {
        [0.0; 3]
    }

    fn add(&self, acc: &mut [f64; 3], i: usize) {
        acc[self.y[i] as usize] += self.w[i];
        acc[2] += 1.0;
    }

    fn impurity(&self, acc: &[f64; 3]) -> f64 {
        weighted_gini([acc[0], acc[1]])
    }

    fn is_pure(&self, acc: &[f64; 3]) -> bool {
        acc[0] <= 0.0 || acc[1] <= 0.0
    }

    fn leaf(&self, _samples: &[usize], acc: &[f64; 3]) -> ClassCounts {
        ClassCounts {
            negative: acc[0],
            positive: acc[1],
        }
    }
}

/// Squared error regression with a caller-supplied leaf value:
/// acc = [sum, sum of squares, count].
pub(crate) struct Variance<'a, F> {
    pub target: &'a [f64],
    pub leaf_value: F,
}

impl<F: Fn(&[usize]) -> f64> Criterion for Variance<'_, F> {
    type Leaf = f64;

    fn zero(&self) -> [f64; 3] {
        [0.0; 3]
    }

    fn add(&self, acc: &mut [f64; 3], i: usize) {
        let t = self.target[i];
        acc[0] += t;
        acc[1] += t * t;
        acc[2] += 1.0;
    }

    fn impurity(&self, acc: &[f64; 3]) -> f64 {
        if acc[2] == 0.0 {
            0.0
        } else {
            acc[1] - acc[0] * acc[0] / acc[2]
        }
    }

    fn is_pure(&self, acc: &[f64; 3]) -> bool {
        self.impurity(acc) <= 1e-15
    }

    fn leaf(&self, samples: &[usize], _acc: &[f64; 3]) -> f64 {
        (self.leaf_value)(samples)
    }
}

/// Grows a tree with a floating-point criterion, all features considered.
/// Ties go to the lowest feature index, then the lowest threshold.
pub(crate) fn grow_with<C: Criterion>(
    x: &[Vec<f64>],
    samples: Vec<usize>,
    criterion: &C,
    max_depth: usize,
    min_samples_split: usize,
) -> Tree<C::Leaf> {
    let d = x.first().map_or(0, Vec::len);
    let mut nodes = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = alloc::vec![(samples, 0, None)];
    while let Some((samples, depth, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some((p, is_left)) = parent {
            if let Node::Split { left, right, .. } = &mut nodes[p] {
                if is_left {
                    *left = id;
                } else {
                    *right = id;
                }
            }
        }
        let mut total = criterion.zero();
        for &i in &samples {
            criterion.add(&mut total, i);
        }
        if criterion.is_pure(&total) || depth >= max_depth || samples.len() < min_samples_split {
            nodes.push(Node::Leaf(criterion.leaf(&samples, &total)));
            continue;
        }

        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = samples.clone();
        for f in 0..d {
            sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
            let mut left = criterion.zero();
            for w in 0..sorted.len() - 1 {
                criterion.add(&mut left, sorted[w]);
                let (lo, hi) = (x[sorted[w]][f], x[sorted[w + 1]][f]);
                if lo == hi {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1], total[2] - left[2]];
                let score = criterion.impurity(&left) + criterion.impurity(&right);
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, f, midpoint(lo, hi)));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            nodes.push(Node::Leaf(criterion.leaf(&samples, &total)));
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            samples.iter().partition(|&&i| x[i][feature] <= threshold);
        nodes.push(Node::Split {
            feature,
            threshold,
            left: usize::MAX,
            right: usize::MAX,
        });
        stack.push((r, depth + 1, Some((id, false))));
        stack.push((l, depth + 1, Some((id, true))));
    }
    Tree { nodes }
}
