//! CART decision trees (variance criterion for regression, Gini for
//! classification) and bagged forests built from them.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeTask {
    Regression,
    /// Labels are class indices `0..num_classes` stored as `f64`.
    Classification { num_classes: usize },
}

/// How many candidate features each split inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSubset {
    All,
    Sqrt,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(&self, d: usize) -> usize {
        let k = match *self {
            FeatureSubset::All => d,
            FeatureSubset::Sqrt => (d as f64).sqrt().ceil() as usize,
            FeatureSubset::Count(k) => k,
        };
        k.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: FeatureSubset,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
            features_per_split: FeatureSubset::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        /// Mean target (regression) or class distribution (classification).
        value: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// What this node predicts when the tree is cut here.
        value: Vec<f64>,
        /// Contribution to `impurity_decrease[feature]`.
        gain: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    task: TreeTask,
    num_features: usize,
    /// Total weighted impurity decrease per feature (not normalized).
    impurity_decrease: Vec<f64>,
}

fn check_inputs(x: &Matrix, y: &[f64], task: TreeTask) -> Result<()> {
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            what: "tree targets",
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some((row, col)) = x.first_non_finite() {
        return Err(Error::NonFinite {
            matrix: "tree features",
            row,
            col,
        });
    }
    if let TreeTask::Classification { num_classes } = task {
        if let Some(row) = y
            .iter()
            .position(|&v| v < 0.0 || v.fract() != 0.0 || v as usize >= num_classes)
        {
            return Err(Error::InvalidParameter(format!(
                "label {} at row {row} is not a class below {num_classes}",
                y[row]
            )));
        }
    }
    Ok(())
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    task: TreeTask,
    params: TreeParams,
    nodes: Vec<Node>,
    decrease: Vec<f64>,
    total: f64,
    goes_left: Vec<bool>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    pos: usize,
}

impl Builder<'_> {
    fn leaf_value(&self, samples: &[usize]) -> Vec<f64> {
        match self.task {
            TreeTask::Regression => {
                vec![samples.iter().map(|&s| self.y[s]).sum::<f64>() / samples.len() as f64]
            }
            TreeTask::Classification { num_classes } => {
                let mut counts = vec![0.0; num_classes];
                for &s in samples {
                    counts[self.y[s] as usize] += 1.0;
                }
                let n = samples.len() as f64;
                counts.iter_mut().for_each(|c| *c /= n);
                counts
            }
        }
    }

    /// Best split along one presorted feature. Gain is the reduction in
    /// `n · impurity`.
    fn scan(&self, f: usize, order: &[usize], best: &mut Option<BestSplit>) {
        let n = order.len();
        let min_leaf = self.params.min_leaf.max(1);
        if n < 2 * min_leaf {
            return;
        }
        let x = self.x;
        match self.task {
            TreeTask::Regression => {
                let total: f64 = order.iter().map(|&s| self.y[s]).sum();
                let parent = total * total / n as f64;
                let mut left = 0.0;
                for p in 1..n {
                    left += self.y[order[p - 1]];
                    if p < min_leaf || n - p < min_leaf {
                        continue;
                    }
                    if x.get(order[p - 1], f) >= x.get(order[p], f) {
                        continue;
                    }
                    let right = total - left;
                    let gain = left * left / p as f64 + right * right / (n - p) as f64 - parent;
                    if best.as_ref().map_or(true, |b| gain > b.gain) {
                        *best = Some(BestSplit { gain, feature: f, pos: p });
                    }
                }
            }
            TreeTask::Classification { num_classes } => {
                let mut right_counts = vec![0.0f64; num_classes];
                for &s in order {
                    right_counts[self.y[s] as usize] += 1.0;
                }
                let mut left_counts = vec![0.0f64; num_classes];
                let mut sq_right: f64 = right_counts.iter().map(|c| c * c).sum();
                let parent = sq_right / n as f64;
                let mut sq_left = 0.0;
                for p in 1..n {
                    let k = self.y[order[p - 1]] as usize;
                    sq_left += 2.0 * left_counts[k] + 1.0;
                    sq_right -= 2.0 * right_counts[k] - 1.0;
                    left_counts[k] += 1.0;
                    right_counts[k] -= 1.0;
                    if p < min_leaf || n - p < min_leaf {
                        continue;
                    }
                    if x.get(order[p - 1], f) >= x.get(order[p], f) {
                        continue;
                    }
                    let gain = sq_left / p as f64 + sq_right / (n - p) as f64 - parent;
                    if best.as_ref().map_or(true, |b| gain > b.gain) {
                        *best = Some(BestSplit { gain, feature: f, pos: p });
                    }
                }
            }
        }
    }

    fn is_pure(&self, samples: &[usize]) -> bool {
        let first = self.y[samples[0]];
        samples.iter().all(|&s| self.y[s] == first)
    }

    fn node_weight_impurity(&self, samples: &[usize]) -> f64 {
        let n = samples.len() as f64;
        match self.task {
            TreeTask::Regression => {
                let mean = samples.iter().map(|&s| self.y[s]).sum::<f64>() / n;
                samples.iter().map(|&s| (self.y[s] - mean).powi(2)).sum()
            }
            TreeTask::Classification { num_classes } => {
                let mut counts = vec![0.0f64; num_classes];
                for &s in samples {
                    counts[self.y[s] as usize] += 1.0;
                }
                n - counts.iter().map(|c| c * c).sum::<f64>() / n
            }
        }
    }

    /// `orders[f]` holds the node's samples sorted by feature `f`. Each node
    /// draws from its own seed, so a depth-limited tree is exactly the
    /// unlimited one cut at that depth.
    fn build(&mut self, orders: Vec<Vec<usize>>, depth: usize, seed: u64) -> usize {
        let samples = &orders[0];
        let n = samples.len();
        let at_depth = self.params.max_depth.is_some_and(|m| depth >= m);
        if at_depth || n < 2 * self.params.min_leaf.max(1) || self.is_pure(samples) {
            let value = self.leaf_value(samples);
            self.nodes.push(Node::Leaf { value });
            return self.nodes.len() - 1;
        }

        let d = self.x.ncols();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(&mut seeded(seed));
        let k = self.params.features_per_split.resolve(d);
        let mut best = None;
        for (i, &f) in features.iter().enumerate() {
            // keep looking past the first k only while nothing valid was found
            if i >= k && best.is_some() {
                break;
            }
            self.scan(f, &orders[f], &mut best);
        }
        let parent_imp = self.node_weight_impurity(samples);
        let best = match best {
            Some(b) if b.gain > 1e-12 * parent_imp.max(1e-300) && b.gain > 0.0 => b,
            _ => {
                let value = self.leaf_value(samples);
                self.nodes.push(Node::Leaf { value });
                return self.nodes.len() - 1;
            }
        };

        let order = &orders[best.feature];
        let lo = self.x.get(order[best.pos - 1], best.feature);
        let hi = self.x.get(order[best.pos], best.feature);
        let mut threshold = 0.5 * (lo + hi);
        if threshold >= hi || threshold < lo {
            threshold = lo;
        }
        for (p, &s) in order.iter().enumerate() {
            self.goes_left[s] = p < best.pos;
        }
        let gain = best.gain / self.total;
        self.decrease[best.feature] += gain;
        let value = self.leaf_value(samples);

        let mut left_orders = Vec::with_capacity(d);
        let mut right_orders = Vec::with_capacity(d);
        for o in orders {
            let (l, r): (Vec<usize>, Vec<usize>) = o.into_iter().partition(|&s| self.goes_left[s]);
            left_orders.push(l);
            right_orders.push(r);
        }

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: Vec::new() });
        let left = self.build(left_orders, depth + 1, derive_seed(seed, 1));
        let right = self.build(right_orders, depth + 1, derive_seed(seed, 2));
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold,
            left,
            right,
            value,
            gain,
        };
        id
    }
}

impl DecisionTree {
    /// Fits on all rows of `x`.
    pub fn fit(x: &Matrix, y: &[f64], task: TreeTask, params: &TreeParams, seed: u64) -> Result<Self> {
        let all: Vec<usize> = (0..x.nrows()).collect();
        let mut rng = seeded(seed);
        Self::fit_on(x, y, &all, task, params, &mut rng)
    }

    /// Fits on the listed rows; repeated indices act as sample weights.
    pub fn fit_on(
        x: &Matrix,
        y: &[f64],
        samples: &[usize],
        task: TreeTask,
        params: &TreeParams,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        check_inputs(x, y, task)?;
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        let d = x.ncols();
        let orders: Vec<Vec<usize>> = (0..d)
            .map(|f| {
                let mut o = samples.to_vec();
                o.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)));
                o
            })
            .collect();
        let mut b = Builder {
            x,
            y,
            task,
            params: *params,
            nodes: Vec::new(),
            decrease: vec![0.0; d],
            total: samples.len() as f64,
            goes_left: vec![false; x.nrows()],
        };
        b.build(orders, 0, rng.gen());
        Ok(Self {
            nodes: b.nodes,
            task,
            num_features: d,
            impurity_decrease: b.decrease,
        })
    }

    fn leaf(&self, row: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    fn check_width(&self, x: &Matrix) -> Result<()> {
        if x.ncols() != self.num_features {
            return Err(Error::DimensionMismatch {
                what: "tree feature count",
                expected: self.num_features,
                found: x.ncols(),
            });
        }
        Ok(())
    }

    /// Regression mean, or the most probable class (lowest index on ties).
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x)?;
        Ok((0..x.nrows())
            .map(|r| {
                let v = self.leaf(x.row(r));
                match self.task {
                    TreeTask::Regression => v[0],
                    TreeTask::Classification { .. } => argmax(v) as f64,
                }
            })
            .collect())
    }

    /// Class distributions; regression trees return their mean as a single column.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        self.check_width(x)?;
        let width = match self.task {
            TreeTask::Regression => 1,
            TreeTask::Classification { num_classes } => num_classes,
        };
        let mut out = Vec::with_capacity(x.nrows() * width);
        for r in 0..x.nrows() {
            out.extend_from_slice(self.leaf(x.row(r)));
        }
        Matrix::new(x.nrows(), width, out)
    }

    pub fn impurity_decrease(&self) -> &[f64] {
        &self.impurity_decrease
    }

    /// The tree cut at `max_depth`, identical to growing it with that limit.
    pub fn truncated(&self, max_depth: Option<usize>) -> DecisionTree {
        let Some(limit) = max_depth else {
            return self.clone();
        };
        let mut nodes = Vec::new();
        let mut decrease = vec![0.0; self.num_features];
        fn copy(src: &[Node], i: usize, depth: usize, limit: usize, out: &mut Vec<Node>, dec: &mut [f64]) -> usize {
            match &src[i] {
                Node::Leaf { value } => {
                    out.push(Node::Leaf { value: value.clone() });
                }
                Node::Split { value, .. } if depth >= limit => {
                    out.push(Node::Leaf { value: value.clone() });
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    value,
                    gain,
                } => {
                    dec[*feature] += gain;
                    let id = out.len();
                    out.push(Node::Leaf { value: Vec::new() });
                    let l = copy(src, *left, depth + 1, limit, out, dec);
                    let r = copy(src, *right, depth + 1, limit, out, dec);
                    out[id] = Node::Split {
                        feature: *feature,
                        threshold: *threshold,
                        left: l,
                        right: r,
                        value: value.clone(),
                        gain: *gain,
                    };
                    return id;
                }
            }
            out.len() - 1
        }
        copy(&self.nodes, 0, 0, limit, &mut nodes, &mut decrease);
        DecisionTree {
            nodes,
            task: self.task,
            num_features: self.num_features,
            impurity_decrease: decrease,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub num_trees: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            num_trees: 10,
            tree: TreeParams::default(),
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    task: TreeTask,
    importances: Vec<f64>,
}

impl RandomForest {
    pub fn fit(x: &Matrix, y: &[f64], task: TreeTask, params: &ForestParams) -> Result<Self> {
        check_inputs(x, y, task)?;
        if params.num_trees == 0 {
            return Err(Error::InvalidParameter("forest needs at least one tree".into()));
        }
        let n = x.nrows();
        let d = x.ncols();
        let mut trees = Vec::with_capacity(params.num_trees);
        for t in 0..params.num_trees {
            let mut rng = seeded(derive_seed(params.seed, t as u64));
            let samples: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            trees.push(DecisionTree::fit_on(x, y, &samples, task, &params.tree, &mut rng)?);
        }
        Ok(Self::from_trees(trees, task, d))
    }

    fn from_trees(trees: Vec<DecisionTree>, task: TreeTask, d: usize) -> Self {
        let mut sum = vec![0.0; d];
        for t in &trees {
            sum.iter_mut().zip(t.impurity_decrease()).for_each(|(s, v)| *s += v);
        }
        let total: f64 = sum.iter().sum();
        let importances = if total > 0.0 {
            sum.iter().map(|v| v / total).collect()
        } else {
            vec![0.0; d]
        };
        Self {
            trees,
            task,
            importances,
        }
    }

    /// Every tree cut at `max_depth`; equal to fitting with that depth limit
    /// under the same seed.
    pub fn truncated(&self, max_depth: Option<usize>) -> RandomForest {
        let d = self.importances.len();
        Self::from_trees(self.trees.iter().map(|t| t.truncated(max_depth)).collect(), self.task, d)
    }

    /// Impurity decrease per feature averaged over trees and normalized to
    /// sum to 1; all zeros when no tree ever split.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        let mut acc: Option<Matrix> = None;
        for t in &self.trees {
            let p = t.predict_proba(x)?;
            acc = Some(match acc {
                None => p,
                Some(a) => {
                    let data = a.as_slice().iter().zip(p.as_slice()).map(|(u, v)| u + v).collect();
                    Matrix::new(a.nrows(), a.ncols(), data)?
                }
            });
        }
        let a = acc.expect("forest has at least one tree");
        let k = self.trees.len() as f64;
        Matrix::new(a.nrows(), a.ncols(), a.as_slice().iter().map(|v| v / k).collect())
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let p = self.predict_proba(x)?;
        Ok((0..p.nrows())
            .map(|r| match self.task {
                TreeTask::Regression => p.get(r, 0),
                TreeTask::Classification { .. } => argmax(p.row(r)) as f64,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::{prop_assert, proptest};

    fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
        let mut rng = seeded(seed);
        Matrix::new(n, d, (0..n * d).map(|_| rng.gen()).collect()).unwrap()
    }

    #[test]
    fn step_function_is_learned_exactly() {
        let x = Matrix::from_columns(&[(0..20).map(f64::from).collect()]).unwrap();
        let y: Vec<f64> = (0..20).map(|i| if i < 7 { 1.0 } else { 4.0 }).collect();
        let t = DecisionTree::fit(&x, &y, TreeTask::Regression, &TreeParams::default(), 0).unwrap();
        assert_eq!(t.predict(&x).unwrap(), y);
        assert_eq!(t.depth(), 1);
        assert!(t.impurity_decrease()[0] > 0.0);
    }

    #[test]
    fn classifier_separates_classes() {
        let x = Matrix::from_columns(&[
            vec![0.0, 0.1, 0.2, 0.8, 0.9, 1.0],
            vec![5.0, 1.0, 3.0, 2.0, 4.0, 0.0],
        ])
        .unwrap();
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let t = DecisionTree::fit(
            &x,
            &y,
            TreeTask::Classification { num_classes: 2 },
            &TreeParams::default(),
            3,
        )
        .unwrap();
        assert_eq!(t.predict(&x).unwrap(), y);
        assert_eq!(t.impurity_decrease()[1], 0.0);
        let p = t.predict_proba(&x).unwrap();
        assert_eq!(p.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn depth_and_leaf_size_limits() {
        let x = random_matrix(200, 3, 1);
        let y: Vec<f64> = (0..200).map(|r| x.get(r, 0) + x.get(r, 1)).collect();
        let params = TreeParams {
            max_depth: Some(2),
            ..Default::default()
        };
        let t = DecisionTree::fit(&x, &y, TreeTask::Regression, &params, 0).unwrap();
        assert!(t.depth() <= 2);
        assert!(t.num_leaves() <= 4);
        let params = TreeParams {
            min_leaf: 150,
            ..Default::default()
        };
        let t = DecisionTree::fit(&x, &y, TreeTask::Regression, &params, 0).unwrap();
        assert_eq!(t.num_leaves(), 1);
    }

    #[test]
    fn invalid_inputs() {
        let x = random_matrix(4, 2, 0);
        assert!(DecisionTree::fit(&x, &[0.0; 3], TreeTask::Regression, &TreeParams::default(), 0).is_err());
        let task = TreeTask::Classification { num_classes: 2 };
        assert!(DecisionTree::fit(&x, &[0.0, 1.0, 2.0, 0.0], task, &TreeParams::default(), 0).is_err());
        assert!(DecisionTree::fit(&x, &[0.0, 0.5, 1.0, 0.0], task, &TreeParams::default(), 0).is_err());
        let t = DecisionTree::fit(&x, &[0.0, 1.0, 1.0, 0.0], task, &TreeParams::default(), 0).unwrap();
        assert!(t.predict(&random_matrix(1, 3, 0)).is_err());
    }

    #[test]
    fn forest_importances_pick_the_signal() {
        let x = random_matrix(500, 4, 7);
        let y: Vec<f64> = (0..500).map(|r| (x.get(r, 2) * 10.0).floor()).collect();
        let f = RandomForest::fit(&x, &y, TreeTask::Regression, &ForestParams::default()).unwrap();
        let imp = f.importances();
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(imp[2] > 0.95, "{imp:?}");
    }

    #[test]
    fn forest_is_deterministic() {
        let x = random_matrix(100, 3, 9);
        let y: Vec<f64> = (0..100).map(|r| x.get(r, 0)).collect();
        let p = ForestParams {
            seed: 42,
            ..Default::default()
        };
        let a = RandomForest::fit(&x, &y, TreeTask::Regression, &p).unwrap();
        let b = RandomForest::fit(&x, &y, TreeTask::Regression, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_target_gives_zero_importance() {
        let x = random_matrix(50, 2, 4);
        let f = RandomForest::fit(&x, &[1.0; 50], TreeTask::Regression, &ForestParams::default()).unwrap();
        assert_eq!(f.importances(), &[0.0, 0.0]);
    }

    #[test]
    fn feature_subset_sizes() {
        assert_eq!(FeatureSubset::All.resolve(8), 8);
        assert_eq!(FeatureSubset::Sqrt.resolve(8), 3);
        assert_eq!(FeatureSubset::Sqrt.resolve(10), 4);
        assert_eq!(FeatureSubset::Count(20).resolve(8), 8);
        assert_eq!(FeatureSubset::Count(0).resolve(8), 1);
    }

    #[test]
    fn truncation_matches_depth_limited_growth() {
        let x = random_matrix(300, 4, 5);
        let y: Vec<f64> = (0..300).map(|r| (6.0 * x.get(r, 0)).sin() + x.get(r, 2)).collect();
        let full = RandomForest::fit(&x, &y, TreeTask::Regression, &ForestParams::default()).unwrap();
        for depth in [0, 1, 3, 6] {
            let params = ForestParams {
                tree: TreeParams {
                    max_depth: Some(depth),
                    ..Default::default()
                },
                ..Default::default()
            };
            let limited = RandomForest::fit(&x, &y, TreeTask::Regression, &params).unwrap();
            assert_eq!(full.truncated(Some(depth)), limited);
        }
        assert_eq!(full.truncated(None), full);
    }

    proptest! {
        #[test]
        fn tree_training_sse_never_exceeds_mean_model(seed in 0u64..300, depth in 1usize..6) {
            let x = random_matrix(60, 3, seed);
            let y: Vec<f64> = (0..60).map(|r| (x.get(r, 1) * 7.0).sin()).collect();
            let params = TreeParams { max_depth: Some(depth), ..Default::default() };
            let t = DecisionTree::fit(&x, &y, TreeTask::Regression, &params, seed).unwrap();
            let pred = t.predict(&x).unwrap();
            let mean = y.iter().sum::<f64>() / 60.0;
            let sse: f64 = y.iter().zip(&pred).map(|(a, b)| (a - b).powi(2)).sum();
            let base: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
            prop_assert!(sse <= base + 1e-9);
            let total: f64 = t.impurity_decrease().iter().sum();
            // recorded decrease equals the per-sample SSE reduction
            prop_assert!((total - (base - sse) / 60.0).abs() < 1e-9);
        }
    }
}
