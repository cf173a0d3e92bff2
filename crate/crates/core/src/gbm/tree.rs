//! Regression trees with vector-valued leaves grown by exact greedy search.

use ndarray::{ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// One Newton step per class, before learning-rate scaling.
    Leaf { values: Vec<f64> },
}

/// Nodes are stored in an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_values(&self, x: ArrayView1<f64>) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { values } => return values,
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub lambda: f64,
}

/// Row-major per-observation gradients and Hessians, `n x k`.
pub(crate) struct Targets<'a> {
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub k: usize,
}

impl Targets<'_> {
    fn sums(&self, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let mut g = vec![0.0; self.k];
        let mut h = vec![0.0; self.k];
        for &i in rows {
            self.add(i, &mut g, &mut h);
        }
        (g, h)
    }

    #[inline]
    fn add(&self, row: usize, g: &mut [f64], h: &mut [f64]) {
        let off = row * self.k;
        for c in 0..self.k {
            g[c] += self.grad[off + c];
            h[c] += self.hess[off + c];
        }
    }
}

#[inline]
fn score(g: f64, h: f64, lambda: f64) -> f64 {
    let d = h + lambda;
    if d > 0.0 {
        g * g / d
    } else {
        0.0
    }
}

/// `-G / (H + lambda)` per class; zero where the denominator vanishes.
pub(crate) fn newton_leaf(g: &[f64], h: &[f64], lambda: f64) -> Vec<f64> {
    g.iter()
        .zip(h)
        .map(|(&g, &h)| {
            let d = h + lambda;
            if d > 0.0 {
                -g / d
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn best_split_for_feature(
    x: ArrayView2<f64>,
    feature: usize,
    rows: &[usize],
    t: &Targets,
    parent_score: f64,
    p: &GrowParams,
) -> Option<Candidate> {
    let mut order: Vec<usize> = rows.to_vec();
    order.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]).then(a.cmp(&b)));
    let (gt, ht) = t.sums(rows);
    let mut gl = vec![0.0; t.k];
    let mut hl = vec![0.0; t.k];
    let mut best: Option<Candidate> = None;
    let n = order.len();
    for i in 0..n - 1 {
        t.add(order[i], &mut gl, &mut hl);
        let left = i + 1;
        if left < p.min_samples_leaf {
            continue;
        }
        if n - left < p.min_samples_leaf {
            break;
        }
        let lo = x[[order[i], feature]];
        let hi = x[[order[i + 1], feature]];
        if lo == hi {
            continue;
        }
        let mut gain = -parent_score;
        for c in 0..t.k {
            gain += score(gl[c], hl[c], p.lambda) + score(gt[c] - gl[c], ht[c] - hl[c], p.lambda);
        }
        // strict improvement keeps the lowest threshold on ties
        if best.is_none_or(|b| gain > b.gain) {
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            best = Some(Candidate {
                gain,
                feature,
                threshold,
            });
        }
    }
    best
}

pub(crate) fn grow(x: ArrayView2<f64>, t: &Targets, p: &GrowParams) -> Tree {
    let rows: Vec<usize> = (0..x.nrows()).collect();
    let mut nodes = Vec::new();
    grow_node(x, t, p, rows, 0, &mut nodes);
    Tree { nodes }
}

fn grow_node(
    x: ArrayView2<f64>,
    t: &Targets,
    p: &GrowParams,
    rows: Vec<usize>,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    let (g, h) = t.sums(&rows);
    nodes.push(Node::Leaf {
        values: newton_leaf(&g, &h, p.lambda),
    });
    if depth >= p.max_depth || rows.len() < 2 * p.min_samples_leaf {
        return id;
    }
    let parent_score: f64 = g.iter().zip(&h).map(|(&g, &h)| score(g, h, p.lambda)).sum();
    let candidates: Vec<Option<Candidate>> = (0..x.ncols())
        .into_par_iter()
        .map(|f| best_split_for_feature(x, f, &rows, t, parent_score, p))
        .collect();
    // lowest feature index wins ties
    let best = candidates
        .into_iter()
        .flatten()
        .fold(None::<Candidate>, |acc, c| match acc {
            Some(a) if a.gain >= c.gain => Some(a),
            _ => Some(c),
        });
    let Some(best) = best.filter(|b| b.gain > 0.0) else {
        return id;
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&i| x[[i, best.feature]] <= best.threshold);
    let left = grow_node(x, t, p, left_rows, depth + 1, nodes);
    let right = grow_node(x, t, p, right_rows, depth + 1, nodes);
    nodes[id] = Node::Split {
        feature: best.feature,
        threshold: best.threshold,
        left,
        right,
    };
    id
}
