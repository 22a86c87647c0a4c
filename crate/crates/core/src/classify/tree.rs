//! Axis-aligned binary decision trees shared by both ensembles.
//!
//! A split sends `x <= threshold` left. Thresholds sit halfway between
//! adjacent distinct training values, so the partition of the training
//! rows depends only on the order of values within a feature.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features drawn per node; `None` uses all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub(crate) fn predict_at(&self, x: &Matrix, row: usize) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x.get(row, feature) <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

/// Additive node statistics plus the split score and leaf value built on them.
pub(crate) trait Criterion {
    type Stats: Copy + Default;
    fn add(&self, s: &mut Self::Stats, sample: usize);
    fn sub(s: Self::Stats, t: Self::Stats) -> Self::Stats;
    fn count(s: &Self::Stats) -> usize;
    /// Score of a node; a split's gain is `score(l) + score(r) - score(parent)`.
    fn score(s: &Self::Stats) -> f64;
    fn leaf(s: &Self::Stats) -> f64;
    fn is_pure(s: &Self::Stats) -> bool;
}

/// Gini impurity on 0/1 labels; leaves hold the positive fraction.
pub(crate) struct Gini<'a> {
    pub y: &'a [bool],
}

#[derive(Clone, Copy, Default)]
pub(crate) struct ClassCounts {
    n: usize,
    pos: usize,
}

impl Criterion for Gini<'_> {
    type Stats = ClassCounts;

    fn add(&self, s: &mut ClassCounts, i: usize) {
        s.n += 1;
        s.pos += self.y[i] as usize;
    }

    fn sub(s: ClassCounts, t: ClassCounts) -> ClassCounts {
        ClassCounts {
            n: s.n - t.n,
            pos: s.pos - t.pos,
        }
    }

    fn count(s: &ClassCounts) -> usize {
        s.n
    }

    // n * (1 - gini) = (pos^2 + neg^2) / n
    fn score(s: &ClassCounts) -> f64 {
        if s.n == 0 {
            return 0.0;
        }
        let (p, q) = (s.pos as f64, (s.n - s.pos) as f64);
        (p * p + q * q) / s.n as f64
    }

    fn leaf(s: &ClassCounts) -> f64 {
        s.pos as f64 / s.n as f64
    }

    fn is_pure(s: &ClassCounts) -> bool {
        s.pos == 0 || s.pos == s.n
    }
}

/// Second-order boosting criterion with L2 leaf penalty `lambda`.
pub(crate) struct Newton<'a> {
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub lambda: f64,
}

#[derive(Clone, Copy, Default)]
pub(crate) struct GradStats {
    n: usize,
    g: f64,
    h: f64,
    lambda: f64,
}

impl Criterion for Newton<'_> {
    type Stats = GradStats;

    fn add(&self, s: &mut GradStats, i: usize) {
        s.n += 1;
        s.g += self.grad[i];
        s.h += self.hess[i];
        s.lambda = self.lambda;
    }

    fn sub(s: GradStats, t: GradStats) -> GradStats {
        GradStats {
            n: s.n - t.n,
            g: s.g - t.g,
            h: s.h - t.h,
            lambda: s.lambda,
        }
    }

    fn count(s: &GradStats) -> usize {
        s.n
    }

    fn score(s: &GradStats) -> f64 {
        s.g * s.g / (s.h + s.lambda)
    }

    fn leaf(s: &GradStats) -> f64 {
        -s.g / (s.h + s.lambda)
    }

    fn is_pure(_: &GradStats) -> bool {
        false
    }
}

const MIN_GAIN: f64 = 1e-12;

/// Halfway point that still satisfies `lo <= t < hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m < hi {
        m
    } else {
        lo
    }
}

struct Builder<'a, C: Criterion, R: Rng> {
    x: &'a Matrix,
    crit: &'a C,
    params: TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    scratch: Vec<usize>,
}

impl<C: Criterion, R: Rng> Builder<'_, C, R> {
    fn stats(&self, samples: &[usize]) -> C::Stats {
        let mut s = C::Stats::default();
        for &i in samples {
            self.crit.add(&mut s, i);
        }
        s
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let n = self.x.n_cols();
        match self.params.max_features {
            Some(k) if k < n => {
                let mut f = rand::seq::index::sample(self.rng, n, k.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..n).collect(),
        }
    }

    /// Best `(feature, threshold, gain)` over the candidate features.
    fn best_split(&mut self, samples: &[usize], total: C::Stats) -> Option<(usize, f64, f64)> {
        let min_leaf = self.params.min_leaf.max(1);
        let n = samples.len();
        if n < 2 * min_leaf {
            return None;
        }
        let parent = C::score(&total);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in self.candidate_features() {
            let col = self.x.col(f);
            self.scratch.clear();
            self.scratch.extend_from_slice(samples);
            self.scratch
                .sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            let mut left = C::Stats::default();
            for k in 0..n - 1 {
                let i = self.scratch[k];
                self.crit.add(&mut left, i);
                let v = col[i];
                if v == col[self.scratch[k + 1]] || k + 1 < min_leaf || n - k - 1 < min_leaf {
                    continue;
                }
                let right = C::sub(total, left);
                let gain = C::score(&left) + C::score(&right) - parent;
                if gain > MIN_GAIN && best.is_none_or(|b| gain > b.2) {
                    best = Some((f, midpoint(v, col[self.scratch[k + 1]]), gain));
                }
            }
        }
        best
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let total = self.stats(&samples);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: C::leaf(&total),
        });
        if C::is_pure(&total) || self.params.max_depth.is_some_and(|d| depth >= d) {
            return id;
        }
        let Some((feature, threshold, _)) = self.best_split(&samples, total) else {
            return id;
        };
        let col = self.x.col(feature);
        let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| col[i] <= threshold);
        debug_assert!(C::count(&self.stats(&l)) > 0 && !r.is_empty());
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Grow one tree on `samples` (row indices, repeats allowed).
pub(crate) fn grow_tree<C: Criterion, R: Rng>(
    x: &Matrix,
    samples: Vec<usize>,
    crit: &C,
    params: TreeParams,
    rng: &mut R,
) -> Tree {
    let mut b = Builder {
        x,
        crit,
        params,
        rng,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(samples.len()),
    };
    b.grow(samples, 0);
    Tree { nodes: b.nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (Matrix, Vec<bool>) {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64, ((i * 7) % 5) as f64])
            .collect();
        let y = (0..20).map(|i| i >= 10).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn separable_gini_tree_is_one_split() {
        let (x, y) = toy();
        let params = TreeParams {
            max_depth: None,
            min_leaf: 1,
            max_features: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = grow_tree(&x, (0..20).collect(), &Gini { y: &y }, params, &mut rng);
        assert_eq!(t.depth(), 1);
        assert_eq!(
            t.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 9.5,
                left: 1,
                right: 2
            }
        );
        for i in 0..20 {
            let p = t.predict(&[i as f64, 0.0]);
            assert_eq!(p, if i >= 10 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn depth_and_leaf_limits_hold() {
        let (x, _) = toy();
        let y: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let params = TreeParams {
            max_depth: Some(2),
            min_leaf: 3,
            max_features: None,
        };
        let t = grow_tree(&x, (0..20).collect(), &Gini { y: &y }, params, &mut rng);
        assert!(t.depth() <= 2);
    }

    #[test]
    fn newton_leaf_is_regularised_mean() {
        let (x, _) = toy();
        let grad = vec![-0.5; 20];
        let hess = vec![0.25; 20];
        let crit = Newton {
            grad: &grad,
            hess: &hess,
            lambda: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let params = TreeParams {
            max_depth: Some(3),
            min_leaf: 1,
            max_features: None,
        };
        let t = grow_tree(&x, (0..20).collect(), &crit, params, &mut rng);
        assert_eq!(t.nodes.len(), 1);
        assert!((t.predict(&[0.0, 0.0]) - 10.0 / 6.0).abs() < 1e-12);
    }
}
