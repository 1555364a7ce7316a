use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{FeatureVector, MlError, Schema, TrainingInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub feature_subset_size: usize,
    /// Recorded for compatibility; every feature is numeric.
    pub max_categories: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 25,
            min_samples_leaf: 5,
            feature_subset_size: 20,
            max_categories: 15,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// `x[feature] <= threshold` goes to the left child, which follows
    /// immediately; `right` indexes the right child.
    Split {
        feature: usize,
        threshold: f64,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// Nodes in preorder; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_of(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, right } => {
                    i = if x[feature] <= threshold { i + 1 } else { right };
                }
            }
        }
    }

    pub fn classify(&self, x: &[f64]) -> usize {
        match self.nodes[self.leaf_of(x)] {
            Node::Leaf { class } => class,
            Node::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> (usize, usize) {
            // returns (depth below i, index after the subtree)
            match nodes[i] {
                Node::Leaf { .. } => (0, i + 1),
                Node::Split { right, .. } => {
                    let (l, _) = walk(nodes, i + 1);
                    let (r, end) = walk(nodes, right);
                    (1 + l.max(r), end)
                }
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0).0
        }
    }
}

/// Bootstrap draws of each tree, kept in memory only.
#[derive(Debug, Clone, Default)]
pub struct TrainingTrace {
    pub bootstrap: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    pub mode: String,
    pub schema: Schema,
    /// Sorted backend names; class indices refer to this list.
    pub classes: Vec<String>,
    pub params: ForestParams,
    pub trees: Vec<Tree>,
    pub oob_accuracy: f64,
    pub trace: Option<TrainingTrace>,
}

impl PartialEq for ForestModel {
    fn eq(&self, o: &Self) -> bool {
        self.mode == o.mode
            && self.schema == o.schema
            && self.classes == o.classes
            && self.params == o.params
            && self.trees == o.trees
            && self.oob_accuracy.to_bits() == o.oob_accuracy.to_bits()
    }
}

impl ForestModel {
    /// Majority vote; ties go to the earlier class.
    pub fn vote(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.classes.len()];
        for t in &self.trees {
            votes[t.classify(x)] += 1;
        }
        argmax_first(&votes)
    }
}

fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

pub fn predict(model: &ForestModel, fv: &FeatureVector) -> Result<String, MlError> {
    let expected = model.schema.fingerprint();
    if fv.schema_hash != expected || fv.values.len() != model.schema.len() {
        return Err(MlError::SchemaMismatch { model: expected, vector: fv.schema_hash.clone() });
    }
    Ok(model.classes[model.vote(&fv.values)].clone())
}

struct Data<'a> {
    x: Vec<&'a [f64]>,
    y: Vec<usize>,
    n_classes: usize,
}

pub fn train(
    mode: &str,
    schema: &Schema,
    instances: &[TrainingInstance],
    params: &ForestParams,
) -> Result<ForestModel, MlError> {
    train_with_bootstrap(mode, schema, instances, params, None)
}

/// Like [`train`], but each tree uses the given bootstrap draws instead of
/// its own. The random stream still advances as if it had drawn them.
pub fn train_with_bootstrap(
    mode: &str,
    schema: &Schema,
    instances: &[TrainingInstance],
    params: &ForestParams,
    bootstrap: Option<&[Vec<usize>]>,
) -> Result<ForestModel, MlError> {
    if instances.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    for (index, inst) in instances.iter().enumerate() {
        if inst.features.len() != schema.len() {
            return Err(MlError::FeatureCount { index, got: inst.features.len(), expected: schema.len() });
        }
    }
    let mut classes: Vec<String> = instances.iter().map(|i| i.label.clone()).collect();
    classes.sort();
    classes.dedup();
    let data = Data {
        x: instances.iter().map(|i| i.features.as_slice()).collect(),
        y: instances.iter().map(|i| classes.binary_search(&i.label).unwrap()).collect(),
        n_classes: classes.len(),
    };
    let mut params = *params;
    params.n_trees = params.n_trees.max(1);
    let subset = params.feature_subset_size.clamp(1, schema.len().max(1));
    if subset != params.feature_subset_size {
        log::warn!("feature subset size {} clamped to {subset}", params.feature_subset_size);
    }

    let built: Vec<(Tree, Vec<usize>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|k| grow_tree(&data, &params, subset, k as u64, bootstrap.and_then(|b| b.get(k)).map(Vec::as_slice)))
        .collect();
    let (trees, bootstrap): (Vec<Tree>, Vec<Vec<usize>>) = built.into_iter().unzip();

    let mut model = ForestModel {
        mode: mode.to_string(),
        schema: schema.clone(),
        classes,
        params,
        trees,
        oob_accuracy: 0.0,
        trace: None,
    };
    model.oob_accuracy = if model.classes.len() == 1 {
        log::warn!("all instances share one label; the model is constant");
        1.0
    } else {
        oob_accuracy(&model, &data, &bootstrap)
    };
    model.trace = Some(TrainingTrace { bootstrap });
    Ok(model)
}

fn oob_accuracy(model: &ForestModel, data: &Data, bootstrap: &[Vec<usize>]) -> f64 {
    let n = data.y.len();
    let mut votes = vec![vec![0usize; data.n_classes]; n];
    for (tree, drawn) in model.trees.iter().zip(bootstrap) {
        let mut in_bag = vec![false; n];
        for &i in drawn {
            in_bag[i] = true;
        }
        for i in (0..n).filter(|&i| !in_bag[i]) {
            votes[i][tree.classify(data.x[i])] += 1;
        }
    }
    let (mut seen, mut right) = (0usize, 0usize);
    for (i, v) in votes.iter().enumerate() {
        if v.iter().any(|&c| c > 0) {
            seen += 1;
            right += usize::from(argmax_first(v) == data.y[i]);
        }
    }
    if seen == 0 {
        log::warn!("no out-of-bag instances; reporting 0 accuracy");
        return 0.0;
    }
    right as f64 / seen as f64
}

fn grow_tree(
    data: &Data,
    params: &ForestParams,
    subset: usize,
    index: u64,
    given: Option<&[usize]>,
) -> (Tree, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index);
    let n = data.y.len();
    let mut drawn: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    if let Some(g) = given {
        drawn = g.to_vec();
    }
    let mut tree = Tree::default();
    let mut rows = drawn.clone();
    build(data, params, subset, &mut rng, &mut rows, 0, &mut tree.nodes);
    (tree, drawn)
}

fn class_counts(data: &Data, rows: &[usize]) -> Vec<usize> {
    let mut c = vec![0; data.n_classes];
    for &r in rows {
        c[data.y[r]] += 1;
    }
    c
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

fn build(
    data: &Data,
    params: &ForestParams,
    subset: usize,
    rng: &mut ChaCha8Rng,
    rows: &mut [usize],
    depth: usize,
    nodes: &mut Vec<Node>,
) {
    let counts = class_counts(data, rows);
    let majority = argmax_first(&counts);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth >= params.max_depth || rows.len() < 2 * params.min_samples_leaf.max(1) {
        nodes.push(Node::Leaf { class: majority });
        return;
    }
    let n_features = data.x[0].len();
    let features = sample(rng, n_features, subset.min(n_features));
    let parent = gini(&counts, rows.len());
    let mut best: Option<Split> = None;
    for f in features.iter() {
        if let Some(s) = best_split_on(data, rows, f, params.min_samples_leaf.max(1)) {
            if s.score < parent - 1e-12 && best.as_ref().is_none_or(|b| s.score < b.score) {
                best = Some(s);
            }
        }
    }
    let Some(split) = best else {
        nodes.push(Node::Leaf { class: majority });
        return;
    };
    let mid = partition(rows, |r| data.x[r][split.feature] <= split.threshold);
    let at = nodes.len();
    nodes.push(Node::Split { feature: split.feature, threshold: split.threshold, right: 0 });
    let (left, right) = rows.split_at_mut(mid);
    build(data, params, subset, rng, left, depth + 1, nodes);
    let right_at = nodes.len();
    if let Node::Split { right, .. } = &mut nodes[at] {
        *right = right_at;
    }
    build(data, params, subset, rng, right, depth + 1, nodes);
}

/// Stable partition; returns the number of rows satisfying `pred`.
fn partition(rows: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| pred(r));
    let mid = yes.len();
    for (slot, r) in rows.iter_mut().zip(yes.into_iter().chain(no)) {
        *slot = r;
    }
    mid
}

/// Lowest weighted child impurity over midpoint thresholds of `feature`
/// with at least `min_leaf` rows on each side.
fn best_split_on(data: &Data, rows: &[usize], feature: usize, min_leaf: usize) -> Option<Split> {
    let mut sorted: Vec<(f64, usize)> = rows.iter().map(|&r| (data.x[r][feature], data.y[r])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = sorted.len();
    let mut left = vec![0usize; data.n_classes];
    let mut right = class_counts(data, rows);
    let mut best: Option<Split> = None;
    for i in 0..n - 1 {
        let (v, y) = sorted[i];
        left[y] += 1;
        right[y] -= 1;
        let next = sorted[i + 1].0;
        let n_left = i + 1;
        if next <= v || n_left < min_leaf || n - n_left < min_leaf {
            continue;
        }
        let score = (n_left as f64 * gini(&left, n_left) + (n - n_left) as f64 * gini(&right, n - n_left)) / n as f64;
        if best.as_ref().is_none_or(|b| score < b.score) {
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next {
                threshold = v;
            }
            best = Some(Split { feature, threshold, score });
        }
    }
    best
}
