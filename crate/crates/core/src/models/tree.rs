//! CART classification trees (Gini) and bagged random forests.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::Result;
use crate::util::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 10,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Share of features examined at each split, rounded up.
    pub feature_fraction: f64,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            feature_fraction: 0.3,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Node {
    Leaf {
        label: u8,
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) feature_dim: usize,
}

impl DecisionTree {
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn predict_row(&self, x: &[f64]) -> u8 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { label } => return label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Root split as `(feature, threshold)`, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

/// `n * gini` of a node with `ones` positives, in closed form so that equal
/// partitions give bit-identical scores.
fn weighted_gini(n: usize, ones: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (n1, n0) = (ones as f64, (n - ones) as f64);
    n as f64 - (n1 * n1 + n0 * n0) / n as f64
}

fn majority(ones: usize, n: usize) -> u8 {
    u8::from(2 * ones > n)
}

struct Builder<'a> {
    data: &'a Dataset,
    params: &'a TreeParams,
    /// Features examined per split; `None` means all of them in order.
    per_split: Option<usize>,
    rng: Option<Rng>,
    nodes: Vec<Node>,
    buf: Vec<(f64, u8)>,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.data.dim();
        match (self.per_split, self.rng.as_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut f = sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let total_ones = idx.iter().filter(|&&i| self.data.y()[i] == 1).count();
        let mut best: Option<BestSplit> = None;
        for f in self.candidate_features() {
            self.buf.clear();
            self.buf
                .extend(idx.iter().map(|&i| (self.data.x().row(i)[f], self.data.y()[i])));
            self.buf.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_ones = 0usize;
            for k in 0..n - 1 {
                left_ones += self.buf[k].1 as usize;
                let (lo, hi) = (self.buf[k].0, self.buf[k + 1].0);
                if lo == hi {
                    continue;
                }
                let nl = k + 1;
                if nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let score =
                    weighted_gini(nl, left_ones) + weighted_gini(n - nl, total_ones - left_ones);
                if best.as_ref().is_none_or(|b| score < b.score) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit {
                        score,
                        feature: f,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let n = idx.len();
        let ones = idx.iter().filter(|&&i| self.data.y()[i] == 1).count();
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf {
            label: majority(ones, n),
        });
        let pure = ones == 0 || ones == n;
        if pure || depth >= self.params.max_depth || n < 2 * self.params.min_leaf.max(1) {
            return slot;
        }
        let Some(split) = self.best_split(&idx) else {
            return slot;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.data.x().row(i)[split.feature] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        slot
    }
}

fn build_tree(
    data: &Dataset,
    params: &TreeParams,
    rows: Vec<usize>,
    per_split: Option<usize>,
    rng: Option<Rng>,
) -> DecisionTree {
    let mut b = Builder {
        data,
        params,
        per_split,
        rng,
        nodes: Vec::new(),
        buf: Vec::with_capacity(rows.len()),
    };
    b.grow(rows, 0);
    DecisionTree {
        nodes: b.nodes,
        feature_dim: data.dim(),
    }
}

/// Greedy CART: every feature, midpoint thresholds, lowest feature index on
/// impurity ties, majority leaves with ties to class 0.
pub fn train_dtree(data: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    Ok(build_tree(data, params, (0..data.len()).collect(), None, None))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub(crate) trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn feature_dim(&self) -> usize {
        self.trees.first().map_or(0, |t| t.feature_dim)
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    fn votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict_row(x) == 1).count()
    }

    pub fn proba_row(&self, x: &[f64]) -> f64 {
        self.votes(x) as f64 / self.trees.len() as f64
    }

    /// Majority vote; a split vote goes to class 0.
    pub fn predict_row(&self, x: &[f64]) -> u8 {
        majority(self.votes(x), self.trees.len())
    }
}

/// Trees are grown in parallel; tree `i` draws from its own stream derived
/// from `seed`, so the forest does not depend on scheduling.
pub fn train_rforest(
    data: &Dataset,
    tree: &TreeParams,
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest> {
    let n = data.len();
    let d = data.dim();
    let per_split = ((params.feature_fraction * d as f64).ceil() as usize).clamp(1, d.max(1));
    let trees = (0..params.n_trees.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let rows = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            build_tree(data, tree, rows, Some(per_split), Some(rng))
        })
        .collect();
    Ok(RandomForest { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::FeatureMatrix;

    fn ds1(xs: &[f64], y: &[u8]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::new(FeatureMatrix::from_rows(&rows, 1).unwrap(), y.to_vec()).unwrap()
    }

    fn xor() -> Dataset {
        Dataset::new(
            FeatureMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], 2).unwrap(),
            vec![0, 1, 1, 0],
        )
        .unwrap()
    }

    fn train_acc(t: &DecisionTree, d: &Dataset) -> f64 {
        let hits = d
            .x()
            .iter_rows()
            .zip(d.y())
            .filter(|(r, &y)| t.predict_row(r) == y)
            .count();
        hits as f64 / d.len() as f64
    }

    #[test]
    fn obvious_root_split() {
        let d = ds1(&[1.0, 2.0, 8.0, 9.0], &[0, 0, 1, 1]);
        let t = train_dtree(&d, &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 5.0)));
        assert_eq!(train_acc(&t, &d), 1.0);
    }

    #[test]
    fn pure_data_is_a_single_leaf() {
        let t = train_dtree(&ds1(&[1.0, 2.0, 3.0], &[1, 1, 1]), &TreeParams::default()).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.predict_row(&[-100.0]), 1);
    }

    #[test]
    fn xor_needs_depth_two() {
        let d = xor();
        let shallow = train_dtree(&d, &TreeParams { max_depth: 1, min_leaf: 1 }).unwrap();
        assert_eq!(train_acc(&shallow, &d), 0.5);
        let deep = train_dtree(&d, &TreeParams { max_depth: 2, min_leaf: 1 }).unwrap();
        assert_eq!(train_acc(&deep, &d), 1.0);
    }

    #[test]
    fn impurity_tie_takes_lowest_feature() {
        // both features separate perfectly
        let d = Dataset::new(
            FeatureMatrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]], 2).unwrap(),
            vec![0, 1],
        )
        .unwrap();
        let t = train_dtree(&d, &TreeParams::default()).unwrap();
        assert_eq!(t.root_split(), Some((0, 0.5)));
    }

    #[test]
    fn min_leaf_blocks_small_children() {
        let d = ds1(&[1.0, 2.0, 3.0, 4.0], &[0, 1, 1, 1]);
        let t = train_dtree(&d, &TreeParams { max_depth: 5, min_leaf: 2 }).unwrap();
        assert_eq!(t.root_split(), Some((0, 2.5)));
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn forest_of_one_is_the_tree() {
        let d = xor();
        let p = ForestParams {
            n_trees: 1,
            feature_fraction: 1.0,
            bootstrap: false,
        };
        let f = train_rforest(&d, &TreeParams::default(), &p, 9).unwrap();
        let t = train_dtree(&d, &TreeParams::default()).unwrap();
        assert_eq!(f.trees[0], t);
    }

    #[test]
    fn forest_is_deterministic() {
        let d = ds1(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[0, 0, 1, 0, 1, 1]);
        let p = ForestParams {
            n_trees: 15,
            ..Default::default()
        };
        let a = train_rforest(&d, &TreeParams::default(), &p, 4).unwrap();
        let b = train_rforest(&d, &TreeParams::default(), &p, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_vote_goes_to_zero() {
        let leaf = |label| DecisionTree {
            nodes: vec![Node::Leaf { label }],
            feature_dim: 1,
        };
        let f = RandomForest {
            trees: vec![leaf(0), leaf(1)],
        };
        assert_eq!(f.predict_row(&[0.0]), 0);
        assert_eq!(f.proba_row(&[0.0]), 0.5);
    }
}
