use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train, ModelFamily};
use super::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// One hyperparameter setting. `learning_rate` only matters for boosting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
}

/// Cartesian grid description, as read from a JSON grid file.
/// `null` in `max_depth` means unlimited depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<Option<usize>>,
    pub min_leaf: Vec<usize>,
    #[serde(default)]
    pub learning_rate: Vec<f64>,
}

impl Grid {
    pub fn default_for(family: ModelFamily) -> Grid {
        Grid {
            n_trees: vec![100, 300],
            max_depth: vec![Some(4), Some(8), None],
            min_leaf: vec![1, 5],
            learning_rate: match family {
                ModelFamily::Forest => vec![],
                ModelFamily::Boost => vec![0.1, 0.3],
            },
        }
    }

    pub fn single(point: GridPoint) -> Grid {
        Grid {
            n_trees: vec![point.n_trees],
            max_depth: vec![point.max_depth],
            min_leaf: vec![point.min_leaf],
            learning_rate: point.learning_rate.into_iter().collect(),
        }
    }

    /// Expand in row-major order: n_trees, max_depth, min_leaf, learning_rate.
    /// Boosting without listed learning rates uses 0.1.
    pub fn points(&self, family: ModelFamily) -> Vec<GridPoint> {
        let rates: Vec<Option<f64>> = match family {
            ModelFamily::Forest => vec![None],
            ModelFamily::Boost if self.learning_rate.is_empty() => vec![Some(0.1)],
            ModelFamily::Boost => self.learning_rate.iter().map(|&r| Some(r)).collect(),
        };
        let mut out = Vec::new();
        for &n_trees in &self.n_trees {
            for &max_depth in &self.max_depth {
                for &min_leaf in &self.min_leaf {
                    for &learning_rate in &rates {
                        out.push(GridPoint {
                            n_trees,
                            max_depth,
                            min_leaf,
                            learning_rate,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvRow {
    pub index: usize,
    pub point: GridPoint,
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub best_index: usize,
    pub best: GridPoint,
    pub table: Vec<CvRow>,
}

/// Fold number per row. Rows sharing an id (a row and its swapped twin)
/// always land in the same fold; folds are stratified by label.
pub(crate) fn group_folds(data: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    let mut groups: Vec<(&str, Label)> = Vec::new();
    let mut seen = HashMap::new();
    for r in &data.rows {
        if !seen.contains_key(r.id.as_str()) {
            seen.insert(r.id.as_str(), groups.len());
            groups.push((r.id.as_str(), r.label));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of_group = vec![0; groups.len()];
    let mut next = 0;
    for label in [Label::Healthy, Label::Disease] {
        let mut g: Vec<usize> = (0..groups.len())
            .filter(|&i| groups[i].1 == label)
            .collect();
        g.shuffle(&mut rng);
        for i in g {
            fold_of_group[i] = next % k;
            next += 1;
        }
    }
    let folds: Vec<usize> = data
        .rows
        .iter()
        .map(|r| fold_of_group[seen[r.id.as_str()]])
        .collect();
    for f in 0..k {
        let size = folds.iter().filter(|&&x| x == f).count();
        if size < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: size,
            });
        }
    }
    Ok(folds)
}

fn fold_accuracy(
    family: ModelFamily,
    point: GridPoint,
    data: &LabeledDataset,
    folds: &[usize],
    f: usize,
    seed: u64,
) -> Result<f64> {
    let split = |held: bool| LabeledDataset {
        rows: data
            .rows
            .iter()
            .zip(folds)
            .filter(|(_, &g)| (g == f) == held)
            .map(|(r, _)| r.clone())
            .collect(),
    };
    let (train_part, held_out) = (split(false), split(true));
    let model = train(family, point, &train_part, seed)?;
    let correct = held_out
        .rows
        .iter()
        .filter(|r| model.predict(&r.features) == r.label)
        .count();
    Ok(correct as f64 / held_out.len() as f64)
}

fn depth_key(d: Option<usize>) -> usize {
    d.unwrap_or(usize::MAX)
}

/// K-fold CV accuracy for every grid point. Best is the highest mean
/// accuracy, ties going to fewer trees, then shallower trees, then the
/// earlier grid entry.
pub fn grid_search(
    family: ModelFamily,
    grid: &Grid,
    train_data: &LabeledDataset,
    folds: usize,
    seed: u64,
) -> Result<GridResult> {
    let points = grid.points(family);
    if points.is_empty() {
        return Err(Error::Invalid("empty hyperparameter grid".into()));
    }
    if folds < 2 {
        return Err(Error::Invalid("need at least 2 folds".into()));
    }
    let fold_of = group_folds(train_data, folds, seed)?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..folds).map(move |f| (p, f)))
        .collect();
    let acc: Vec<f64> = jobs
        .par_iter()
        .map(|&(p, f)| fold_accuracy(family, points[p], train_data, &fold_of, f, seed))
        .collect::<Result<_>>()?;
    let table: Vec<CvRow> = points
        .iter()
        .enumerate()
        .map(|(i, &point)| {
            let fold_accuracy = acc[i * folds..(i + 1) * folds].to_vec();
            let mean_accuracy = fold_accuracy.iter().sum::<f64>() / folds as f64;
            CvRow {
                index: i,
                point,
                fold_accuracy,
                mean_accuracy,
            }
        })
        .collect();
    let best = table
        .iter()
        .min_by(|a, b| {
            b.mean_accuracy
                .total_cmp(&a.mean_accuracy)
                .then(a.point.n_trees.cmp(&b.point.n_trees))
                .then(depth_key(a.point.max_depth).cmp(&depth_key(b.point.max_depth)))
                .then(a.index.cmp(&b.index))
        })
        .expect("non-empty grid");
    Ok(GridResult {
        best_index: best.index,
        best: best.point,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{augment_swap_lr, Row};
    use crate::features::N_FEATURES;

    fn data(n_each: usize) -> LabeledDataset {
        let mut rows = Vec::new();
        for i in 0..2 * n_each {
            let label = if i % 2 == 0 {
                Label::Healthy
            } else {
                Label::Disease
            };
            let shift = if label == Label::Disease { 10.0 } else { 0.0 };
            rows.push(Row {
                id: format!("r{i}"),
                features: (0..N_FEATURES)
                    .map(|j| shift + ((i * 31 + j * 7) % 5) as f64)
                    .collect(),
                label,
                swapped: false,
            });
        }
        LabeledDataset::new(rows).unwrap()
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(
            Grid::default_for(ModelFamily::Forest)
                .points(ModelFamily::Forest)
                .len(),
            12
        );
        assert_eq!(
            Grid::default_for(ModelFamily::Boost)
                .points(ModelFamily::Boost)
                .len(),
            24
        );
    }

    #[test]
    fn twins_share_a_fold() {
        let aug = augment_swap_lr(&data(10));
        let folds = group_folds(&aug, 5, 3).unwrap();
        let n = aug.len() / 2;
        for i in 0..n {
            assert_eq!(folds[i], folds[i + n]);
        }
        assert!(group_folds(&data(2), 5, 0).is_err());
    }

    #[test]
    fn singleton_grid_returns_its_point() {
        let p = GridPoint {
            n_trees: 5,
            max_depth: Some(2),
            min_leaf: 1,
            learning_rate: None,
        };
        let r = grid_search(ModelFamily::Forest, &Grid::single(p), &data(10), 5, 1).unwrap();
        assert_eq!(r.best, p);
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table[0].mean_accuracy, 1.0);
    }

    #[test]
    fn ties_prefer_smaller_models_and_runs_repeat() {
        let grid = Grid {
            n_trees: vec![20, 5],
            max_depth: vec![None, Some(3)],
            min_leaf: vec![1],
            learning_rate: vec![],
        };
        let d = data(10);
        let r = grid_search(ModelFamily::Forest, &grid, &d, 5, 2).unwrap();
        // separable data: every setting is perfect, so the tie-break decides
        assert!(r.table.iter().all(|row| row.mean_accuracy == 1.0));
        assert_eq!(r.best.n_trees, 5);
        assert_eq!(r.best.max_depth, Some(3));
        assert_eq!(
            r,
            grid_search(ModelFamily::Forest, &grid, &d, 5, 2).unwrap()
        );
    }

    #[test]
    fn dominant_setting_wins() {
        // depth-0 trees only predict the majority class; grown trees separate
        let grid = Grid {
            n_trees: vec![1, 50],
            max_depth: vec![Some(0), None],
            min_leaf: vec![1],
            learning_rate: vec![],
        };
        let r = grid_search(ModelFamily::Forest, &grid, &data(10), 5, 4).unwrap();
        assert!(r.best.max_depth.is_none());
        assert_eq!(r.best.n_trees, 1);
    }
}
