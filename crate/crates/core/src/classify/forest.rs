use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, Gini, Tree, TreeParams};
use super::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per node; `None` means `round(sqrt(n_features))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            max_features: None,
        }
    }
}

/// Bootstrap-aggregated Gini trees. Probability is the fraction of trees
/// voting for the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub seed: u64,
    pub trees: Vec<Tree>,
}

pub(crate) fn check_two_classes(y: &[bool]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptySeries);
    }
    if y.iter().all(|&v| v) || y.iter().all(|&v| !v) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Independent RNG stream for tree `index`, so results do not depend on
/// how trees are scheduled across threads.
pub(crate) fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

impl ForestModel {
    pub fn fit(x: &Matrix, y: &[bool], params: ForestParams, seed: u64) -> Result<ForestModel> {
        check_two_classes(y)?;
        if x.n_rows() != y.len() {
            return Err(Error::Invalid("feature/label length mismatch".into()));
        }
        if params.n_trees == 0 {
            return Err(Error::Invalid("forest needs at least one tree".into()));
        }
        let n = x.n_rows();
        let mtry = params
            .max_features
            .unwrap_or_else(|| (x.n_cols() as f64).sqrt().round() as usize)
            .clamp(1, x.n_cols());
        let tp = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            max_features: Some(mtry),
        };
        let crit = Gini { y };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(seed, t);
                let samples: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                grow_tree(x, samples, &crit, tp, &mut rng)
            })
            .collect();
        Ok(ForestModel {
            params,
            seed,
            trees,
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(x) >= 0.5).count();
        votes as f64 / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> (Matrix, Vec<bool>) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![i as f64, ((i * 13) % 7) as f64, (i % 3) as f64])
            .collect();
        (
            Matrix::from_rows(&rows).unwrap(),
            (0..n).map(|i| i * 2 >= n).collect(),
        )
    }

    #[test]
    fn separable_training_accuracy_is_perfect() {
        let (x, y) = toy(40);
        let p = ForestParams {
            n_trees: 25,
            max_features: Some(3),
            ..Default::default()
        };
        let m = ForestModel::fit(&x, &y, p, 3).unwrap();
        for (i, &yi) in y.iter().enumerate() {
            let row = [x.get(i, 0), x.get(i, 1), x.get(i, 2)];
            assert_eq!(m.predict_proba(&row) >= 0.5, yi);
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = toy(30);
        let a = ForestModel::fit(&x, &y, ForestParams::default(), 11).unwrap();
        let b = ForestModel::fit(&x, &y, ForestParams::default(), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_class_is_rejected() {
        let (x, _) = toy(10);
        let y = vec![true; 10];
        assert!(matches!(
            ForestModel::fit(&x, &y, ForestParams::default(), 0),
            Err(Error::SingleClass)
        ));
    }
}
