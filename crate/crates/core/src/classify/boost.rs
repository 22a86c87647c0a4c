use serde::{Deserialize, Serialize};

use super::forest::{check_two_classes, tree_rng};
use super::tree::{grow_tree, Newton, Tree, TreeParams};
use super::Matrix;
use crate::error::{Error, Result};

/// L2 penalty on leaf weights.
pub const LEAF_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub learning_rate: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(4),
            min_leaf: 1,
            learning_rate: 0.1,
        }
    }
}

/// Gradient-boosted trees on the logistic loss with Newton leaf values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub params: BoostParams,
    pub seed: u64,
    /// Initial log-odds.
    pub base_score: f64,
    pub trees: Vec<Tree>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl BoostModel {
    pub fn fit(x: &Matrix, y: &[bool], params: BoostParams, seed: u64) -> Result<BoostModel> {
        check_two_classes(y)?;
        if x.n_rows() != y.len() {
            return Err(Error::Invalid("feature/label length mismatch".into()));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
            return Err(Error::Invalid("learning rate must be positive".into()));
        }
        let n = x.n_rows();
        let pos = y.iter().filter(|&&v| v).count() as f64;
        let base_score = (pos / (n as f64 - pos)).ln();
        let tp = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            max_features: None,
        };
        let mut margin = vec![base_score; n];
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        let mut trees = Vec::with_capacity(params.n_trees);
        for t in 0..params.n_trees {
            for i in 0..n {
                let p = sigmoid(margin[i]);
                grad[i] = p - y[i] as u8 as f64;
                hess[i] = (p * (1.0 - p)).max(1e-16);
            }
            let crit = Newton {
                grad: &grad,
                hess: &hess,
                lambda: LEAF_LAMBDA,
            };
            let mut tree = grow_tree(x, (0..n).collect(), &crit, tp, &mut tree_rng(seed, t));
            for node in &mut tree.nodes {
                if let super::Node::Leaf { value } = node {
                    *value *= params.learning_rate;
                }
            }
            for (i, m) in margin.iter_mut().enumerate() {
                *m += tree.predict_at(x, i);
            }
            trees.push(tree);
        }
        Ok(BoostModel {
            params,
            seed,
            base_score,
            trees,
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>())
    }
}
