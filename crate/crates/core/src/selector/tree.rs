//! Decision tree for algorithm selection.
//!
//! CART with weighted Gini splits (sample weight one over the size of the
//! sample's problem family), grown fully and reduced by minimal
//! cost-complexity pruning. The pruning strength is chosen by k-fold cross
//! validation that splits each family evenly over the folds and maximizes
//! the family-balanced mean relative performance of the pruned tree's picks.
//!
//! The text serialization is line oriented so that externally specified
//! trees can be loaded and used without retraining:
//!
//! ```text
//! node <id> feature <k> threshold <x> left <id> right <id>
//! leaf <id> label <name>
//! ```
//!
//! Node 0 is the root. Prediction descends left on `value < threshold`,
//! right otherwise (ties route right).

use std::collections::HashMap;

use super::{rp_score, FeatureVector, RpSample, SelectorError, FEATURE_COUNT};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: String,
    },
}

/// A trained (or hand-written) selection tree.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    /// Single-leaf tree that always answers `label`.
    pub fn leaf(label: impl Into<String>) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf {
                label: label.into(),
            }],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn depth_at(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + depth_at(nodes, *left).max(depth_at(nodes, *right))
                }
            }
        }
        depth_at(&self.nodes, 0)
    }

    /// Deterministic root-to-leaf descent; left on `value < threshold`.
    pub fn predict(&self, f: &FeatureVector) -> Result<&str, SelectorError> {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return Ok(label),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= FEATURE_COUNT {
                        return Err(SelectorError::LayoutMismatch(*feature, FEATURE_COUNT));
                    }
                    at = if f.0[*feature] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Line-oriented text form; see the module docs for the grammar.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => out.push_str(&format!(
                    "node {id} feature {feature} threshold {threshold} left {left} right {right}\n"
                )),
                Node::Leaf { label } => out.push_str(&format!("leaf {id} label {label}\n")),
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, SelectorError> {
        let mut by_id: HashMap<usize, Node> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| SelectorError::TreeParse(lineno + 1, msg.to_string());
            match toks.first() {
                Some(&"node") => {
                    if toks.len() != 10
                        || toks[2] != "feature"
                        || toks[4] != "threshold"
                        || toks[6] != "left"
                        || toks[8] != "right"
                    {
                        return Err(err("expected `node <id> feature <k> threshold <x> left <id> right <id>`"));
                    }
                    let id = toks[1].parse().map_err(|_| err("bad node id"))?;
                    let feature: usize = toks[3].parse().map_err(|_| err("bad feature index"))?;
                    if feature >= FEATURE_COUNT {
                        return Err(SelectorError::LayoutMismatch(feature, FEATURE_COUNT));
                    }
                    let threshold = toks[5].parse().map_err(|_| err("bad threshold"))?;
                    let left = toks[7].parse().map_err(|_| err("bad left id"))?;
                    let right = toks[9].parse().map_err(|_| err("bad right id"))?;
                    by_id.insert(
                        id,
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        },
                    );
                }
                Some(&"leaf") => {
                    if toks.len() != 4 || toks[2] != "label" {
                        return Err(err("expected `leaf <id> label <name>`"));
                    }
                    let id = toks[1].parse().map_err(|_| err("bad leaf id"))?;
                    by_id.insert(
                        id,
                        Node::Leaf {
                            label: toks[3].to_string(),
                        },
                    );
                }
                _ => return Err(err("expected `node` or `leaf`")),
            }
        }
        let count = by_id.len();
        if count == 0 {
            return Err(SelectorError::BadTree("empty tree".into()));
        }
        let mut nodes = Vec::with_capacity(count);
        for id in 0..count {
            let n = by_id
                .remove(&id)
                .ok_or_else(|| SelectorError::BadTree(format!("missing node id {id}")))?;
            if let Node::Split { left, right, .. } = &n {
                if *left >= count || *right >= count {
                    return Err(SelectorError::BadTree(format!(
                        "node {id} points outside the tree"
                    )));
                }
            }
            nodes.push(n);
        }
        Ok(DecisionTree { nodes })
    }
}

/// Training configuration.
#[derive(Debug, Clone, Default)]
pub struct TrainOptions<'a> {
    /// timing samples aligned with the training rows; when present, the
    /// cross-validation objective is the balanced mean relative performance
    /// of the pruned tree's picks, otherwise balanced accuracy
    pub rp: Option<&'a [RpSample]>,
}

struct TrainData<'a> {
    x: &'a [FeatureVector],
    y: Vec<u32>,
    classes: Vec<String>,
    weight: Vec<f64>,
}

/// Work tree built on sample index sets.
#[derive(Clone)]
struct WorkNode {
    samples: Vec<usize>,
    split: Option<(usize, f64)>,
    left: usize,
    right: usize,
    /// weighted Gini risk of this node: impurity times weight share
    risk: f64,
    majority: u32,
}

struct WorkTree {
    nodes: Vec<WorkNode>,
    total_weight: f64,
}

fn gini(counts: &HashMap<u32, f64>, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.values().map(|w| (w / total) * (w / total)).sum::<f64>()
}

fn class_weights(d: &TrainData, samples: &[usize]) -> (HashMap<u32, f64>, f64) {
    let mut counts: HashMap<u32, f64> = HashMap::new();
    let mut total = 0.0;
    for &i in samples {
        *counts.entry(d.y[i]).or_default() += d.weight[i];
        total += d.weight[i];
    }
    (counts, total)
}

fn majority(counts: &HashMap<u32, f64>) -> u32 {
    counts
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(c, _)| *c)
        .unwrap_or(0)
}

impl WorkTree {
    /// Grows the full tree on the given sample rows.
    fn grow(d: &TrainData, rows: Vec<usize>) -> WorkTree {
        let total_weight: f64 = rows.iter().map(|&i| d.weight[i]).sum();
        let mut tree = WorkTree {
            nodes: Vec::new(),
            total_weight,
        };
        tree.grow_node(d, rows);
        tree
    }

    fn grow_node(&mut self, d: &TrainData, rows: Vec<usize>) -> usize {
        let (counts, node_w) = class_weights(d, &rows);
        let imp = gini(&counts, node_w);
        let id = self.nodes.len();
        self.nodes.push(WorkNode {
            samples: rows,
            split: None,
            left: usize::MAX,
            right: usize::MAX,
            risk: imp * node_w / self.total_weight,
            majority: majority(&counts),
        });
        if counts.len() <= 1 {
            return id;
        }
        // best weighted-Gini split: candidate thresholds are midpoints of
        // sorted distinct feature values; ties route right
        let rows = self.nodes[id].samples.clone();
        let mut best: Option<(f64, usize, f64)> = None; // (child risk, feature, threshold)
        for feat in 0..FEATURE_COUNT {
            let mut vals: Vec<f64> = rows.iter().map(|&i| d.x[i].0[feat]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let thr = (w[0] + w[1]) / 2.0;
                let (mut lc, mut lw) = (HashMap::<u32, f64>::new(), 0.0);
                let (mut rc, mut rw) = (HashMap::<u32, f64>::new(), 0.0);
                for &i in &rows {
                    if d.x[i].0[feat] < thr {
                        *lc.entry(d.y[i]).or_default() += d.weight[i];
                        lw += d.weight[i];
                    } else {
                        *rc.entry(d.y[i]).or_default() += d.weight[i];
                        rw += d.weight[i];
                    }
                }
                if lw == 0.0 || rw == 0.0 {
                    continue;
                }
                let child = gini(&lc, lw) * lw + gini(&rc, rw) * rw;
                if best.map_or(true, |(b, _, _)| child < b) {
                    best = Some((child, feat, thr));
                }
            }
        }
        let Some((child_risk, feat, thr)) = best else {
            return id; // identical feature rows: stay a leaf
        };
        if child_risk >= imp * node_w {
            return id; // no impurity decrease
        }
        let (lrows, rrows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| d.x[i].0[feat] < thr);
        let left = self.grow_node(d, lrows);
        let right = self.grow_node(d, rrows);
        self.nodes[id].split = Some((feat, thr));
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    fn is_pruned_leaf(&self, pruned: &[bool], i: usize) -> bool {
        pruned[i] || self.nodes[i].split.is_none()
    }

    /// Subtree risk and leaf count under the current pruning marks.
    fn subtree_risk(&self, pruned: &[bool], i: usize) -> (f64, usize) {
        if self.is_pruned_leaf(pruned, i) {
            return (self.nodes[i].risk, 1);
        }
        let (lr, ll) = self.subtree_risk(pruned, self.nodes[i].left);
        let (rr, rl) = self.subtree_risk(pruned, self.nodes[i].right);
        (lr + rr, ll + rl)
    }

    /// Weakest-link sequence of effective alphas for this tree.
    fn alpha_path(&self) -> Vec<f64> {
        let mut pruned = vec![false; self.nodes.len()];
        let mut alphas = vec![0.0];
        loop {
            let mut weakest: Option<(f64, usize)> = None;
            for i in 0..self.nodes.len() {
                if self.is_pruned_leaf(&pruned, i) || !self.reachable(&pruned, i) {
                    continue;
                }
                let (risk, leaves) = self.subtree_risk(&pruned, i);
                let g = (self.nodes[i].risk - risk) / (leaves as f64 - 1.0);
                if weakest.map_or(true, |(w, _)| g < w) {
                    weakest = Some((g, i));
                }
            }
            let Some((g, i)) = weakest else { break };
            alphas.push(g.max(0.0));
            pruned[i] = true;
        }
        alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        alphas
    }

    fn reachable(&self, pruned: &[bool], target: usize) -> bool {
        // walk from the root skipping pruned subtrees
        fn walk(t: &WorkTree, pruned: &[bool], i: usize, target: usize) -> bool {
            if i == target {
                return true;
            }
            if t.is_pruned_leaf(pruned, i) {
                return false;
            }
            walk(t, pruned, t.nodes[i].left, target) || walk(t, pruned, t.nodes[i].right, target)
        }
        walk(self, pruned, 0, target)
    }

    /// Marks every internal node whose weakest-link value is at most alpha.
    fn prune_marks(&self, alpha: f64) -> Vec<bool> {
        let mut pruned = vec![false; self.nodes.len()];
        loop {
            let mut weakest: Option<(f64, usize)> = None;
            for i in 0..self.nodes.len() {
                if self.is_pruned_leaf(&pruned, i) || !self.reachable(&pruned, i) {
                    continue;
                }
                let (risk, leaves) = self.subtree_risk(&pruned, i);
                let g = (self.nodes[i].risk - risk) / (leaves as f64 - 1.0);
                if weakest.map_or(true, |(w, _)| g < w) {
                    weakest = Some((g, i));
                }
            }
            match weakest {
                Some((g, i)) if g <= alpha + 1e-15 => pruned[i] = true,
                _ => break,
            }
        }
        pruned
    }

    /// Weighted training risk of the tree pruned at `alpha`.
    fn risk_at(&self, alpha: f64) -> f64 {
        let marks = self.prune_marks(alpha);
        self.subtree_risk(&marks, 0).0
    }

    fn predict_class(&self, pruned: &[bool], f: &FeatureVector) -> u32 {
        let mut at = 0usize;
        loop {
            if self.is_pruned_leaf(pruned, at) {
                return self.nodes[at].majority;
            }
            let (feat, thr) = self.nodes[at].split.unwrap();
            at = if f.0[feat] < thr {
                self.nodes[at].left
            } else {
                self.nodes[at].right
            };
        }
    }

    fn export(&self, pruned: &[bool], classes: &[String]) -> DecisionTree {
        fn emit(
            t: &WorkTree,
            pruned: &[bool],
            classes: &[String],
            i: usize,
            out: &mut Vec<Node>,
        ) -> usize {
            let id = out.len();
            if t.is_pruned_leaf(pruned, i) {
                out.push(Node::Leaf {
                    label: classes[t.nodes[i].majority as usize].clone(),
                });
                return id;
            }
            let (feature, threshold) = t.nodes[i].split.unwrap();
            out.push(Node::Split {
                feature,
                threshold,
                left: 0,
                right: 0,
            });
            let left = emit(t, pruned, classes, t.nodes[i].left, out);
            let right = emit(t, pruned, classes, t.nodes[i].right, out);
            if let Node::Split {
                left: l, right: r, ..
            } = &mut out[id]
            {
                *l = left;
                *r = right;
            }
            id
        }
        let mut out = Vec::new();
        emit(self, pruned, classes, 0, &mut out);
        DecisionTree { nodes: out }
    }
}

/// Trains a selection tree.
///
/// `x`, `y` (best-algorithm labels), and `family` are aligned rows; sample
/// weights are one over the family size. The tree is grown fully, then
/// pruned by minimal cost-complexity with the pruning strength chosen by
/// `folds`-fold cross validation (each family split evenly over the folds),
/// maximizing the family-balanced validation objective. A single-class
/// input yields a single-leaf tree.
pub fn train_tree(
    x: &[FeatureVector],
    y: &[String],
    family: &[String],
    folds: usize,
    opts: TrainOptions<'_>,
) -> DecisionTree {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), family.len());
    assert!(!x.is_empty(), "training set must not be empty");
    if let Some(rp) = opts.rp {
        assert_eq!(rp.len(), x.len());
    }

    let mut classes: Vec<String> = y.to_vec();
    classes.sort();
    classes.dedup();
    let class_of: HashMap<&str, u32> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i as u32))
        .collect();
    let mut fam_size: HashMap<&str, usize> = HashMap::new();
    for f in family {
        *fam_size.entry(f.as_str()).or_default() += 1;
    }
    let d = TrainData {
        x,
        y: y.iter().map(|l| class_of[l.as_str()]).collect(),
        classes: classes.clone(),
        weight: family
            .iter()
            .map(|f| 1.0 / fam_size[f.as_str()] as f64)
            .collect(),
    };
    if classes.len() == 1 {
        return DecisionTree::leaf(classes[0].clone());
    }

    let full = WorkTree::grow(&d, (0..x.len()).collect());
    let alphas = full.alpha_path();

    // fold assignment: each family split evenly, round robin
    let folds = folds.max(2).min(x.len());
    let mut fold_of = vec![0usize; x.len()];
    let mut fam_counter: HashMap<&str, usize> = HashMap::new();
    for i in 0..x.len() {
        let c = fam_counter.entry(family[i].as_str()).or_default();
        fold_of[i] = *c % folds;
        *c += 1;
    }

    // pick the alpha with the best balanced validation score, ties toward
    // the simpler (larger alpha) tree
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    for &alpha in &alphas {
        let mut scores = Vec::new();
        for fold in 0..folds {
            let train_rows: Vec<usize> = (0..x.len()).filter(|i| fold_of[*i] != fold).collect();
            let val_rows: Vec<usize> = (0..x.len()).filter(|i| fold_of[*i] == fold).collect();
            if train_rows.is_empty() || val_rows.is_empty() {
                continue;
            }
            let t = WorkTree::grow(&d, train_rows);
            let marks = t.prune_marks(alpha);
            // family-balanced validation objective
            let mut fams: Vec<&str> = val_rows.iter().map(|&i| family[i].as_str()).collect();
            fams.sort_unstable();
            fams.dedup();
            let mut fam_mean = 0.0;
            for fam in &fams {
                let mut s = 0.0;
                let mut c = 0usize;
                for &i in val_rows.iter().filter(|&&i| family[i] == *fam) {
                    let pred = t.predict_class(&marks, &x[i]);
                    s += match opts.rp {
                        Some(rp) => {
                            rp_score(&rp[i], &d.classes[pred as usize]).unwrap_or(0.0)
                        }
                        None => (pred == d.y[i]) as u32 as f64,
                    };
                    c += 1;
                }
                fam_mean += s / c as f64;
            }
            scores.push(fam_mean / fams.len() as f64);
        }
        let mean = scores.iter().sum::<f64>() / scores.len().max(1) as f64;
        if mean > best.0 || (mean == best.0 && alpha > best.1) {
            best = (mean, alpha);
        }
    }

    let marks = full.prune_marks(best.1);
    full.export(&marks, &classes)
}

/// Training risk curve along the pruning path, exposed for invariant tests:
/// the weighted training impurity of the pruned tree at each alpha of the
/// weakest-link sequence, in path order.
pub fn training_risk_path(
    x: &[FeatureVector],
    y: &[String],
    family: &[String],
) -> Vec<(f64, f64)> {
    let mut classes: Vec<String> = y.to_vec();
    classes.sort();
    classes.dedup();
    let class_of: HashMap<&str, u32> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i as u32))
        .collect();
    let mut fam_size: HashMap<&str, usize> = HashMap::new();
    for f in family {
        *fam_size.entry(f.as_str()).or_default() += 1;
    }
    let d = TrainData {
        x,
        y: y.iter().map(|l| class_of[l.as_str()]).collect(),
        classes,
        weight: family
            .iter()
            .map(|f| 1.0 / fam_size[f.as_str()] as f64)
            .collect(),
    };
    let full = WorkTree::grow(&d, (0..x.len()).collect());
    full.alpha_path()
        .into_iter()
        .map(|a| (a, full.risk_at(a)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: f64) -> FeatureVector {
        let mut a = [0.0; FEATURE_COUNT];
        a[0] = v;
        FeatureVector(a)
    }

    #[test]
    fn single_class_gives_single_leaf() {
        let x = vec![fv(1.0), fv(2.0)];
        let y = vec!["bk".to_string(), "bk".to_string()];
        let fam = vec!["f".to_string(), "f".to_string()];
        let t = train_tree(&x, &y, &fam, 5, TrainOptions::default());
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.predict(&fv(99.0)).unwrap(), "bk");
    }

    #[test]
    fn separable_feature_gives_depth_one_tree() {
        let x: Vec<FeatureVector> = (0..8)
            .map(|i| fv(if i < 4 { -(i as f64) - 1.0 } else { i as f64 }))
            .collect();
        let y: Vec<String> = (0..8)
            .map(|i| if i < 4 { "A".into() } else { "B".into() })
            .collect();
        let fam: Vec<String> = (0..8).map(|i| format!("f{}", i % 2)).collect();
        let t = train_tree(&x, &y, &fam, 4, TrainOptions::default());
        assert_eq!(t.depth(), 1);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(t.predict(xi).unwrap(), yi);
        }
    }

    #[test]
    fn threshold_tie_routes_right() {
        let text = "node 0 feature 0 threshold 5 left 1 right 2\nleaf 1 label L\nleaf 2 label R\n";
        let t = DecisionTree::parse_text(text).unwrap();
        assert_eq!(t.predict(&fv(5.0)).unwrap(), "R");
        assert_eq!(t.predict(&fv(4.999)).unwrap(), "L");
    }

    #[test]
    fn text_round_trip() {
        let x: Vec<FeatureVector> = (0..6).map(|i| fv(i as f64)).collect();
        let y: Vec<String> = (0..6)
            .map(|i| if i < 3 { "A".into() } else { "B".into() })
            .collect();
        let fam: Vec<String> = (0..6).map(|_| "f".to_string()).collect();
        let t = train_tree(&x, &y, &fam, 3, TrainOptions::default());
        let parsed = DecisionTree::parse_text(&t.to_text()).unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn layout_mismatch_detected() {
        let text = "node 0 feature 99 threshold 5 left 1 right 2\nleaf 1 label L\nleaf 2 label R\n";
        assert!(matches!(
            DecisionTree::parse_text(text),
            Err(SelectorError::LayoutMismatch(99, _))
        ));
    }

    #[test]
    fn pure_node_has_zero_gini() {
        let mut counts = HashMap::new();
        counts.insert(0u32, 5.0);
        assert_eq!(gini(&counts, 5.0), 0.0);
    }
}
