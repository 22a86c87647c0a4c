use serde::{Deserialize, Serialize};

use super::boost::{BoostModel, BoostParams};
use super::forest::{ForestModel, ForestParams};
use super::grid::{grid_search, Grid, GridPoint, GridResult};
use super::metrics::{auroc, metrics, Metrics};
use super::{augment_swap_lr, split_train_test, Imputer, Label, LabeledDataset, Matrix};
use crate::error::{Error, Result};
use crate::features::feature_registry;

/// Format tag written into every serialized model.
pub const MODEL_FORMAT: &str = "periometry-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    #[serde(rename = "rf")]
    Forest,
    #[serde(rename = "gbt")]
    Boost,
}

impl ModelFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelFamily::Forest => "rf",
            ModelFamily::Boost => "gbt",
        }
    }

    pub fn parse(s: &str) -> Result<ModelFamily> {
        match s {
            "rf" => Ok(ModelFamily::Forest),
            "gbt" => Ok(ModelFamily::Boost),
            other => Err(Error::Invalid(format!("unknown model family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Ensemble {
    Forest(ForestModel),
    Boost(BoostModel),
}

/// A trained ensemble together with the imputation it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub format: String,
    pub features: Vec<String>,
    pub imputer: Imputer,
    pub ensemble: Ensemble,
}

impl Classifier {
    /// Disease probability for a raw feature vector (`NaN` = invalid).
    pub fn predict_proba(&self, features: &[f64]) -> f64 {
        let x = self.imputer.apply(features);
        match &self.ensemble {
            Ensemble::Forest(m) => m.predict_proba(&x),
            Ensemble::Boost(m) => m.predict_proba(&x),
        }
    }

    /// Hard prediction at probability 0.5.
    pub fn predict(&self, features: &[f64]) -> Label {
        if self.predict_proba(features) >= 0.5 {
            Label::Disease
        } else {
            Label::Healthy
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Classifier> {
        let c: Classifier = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        if c.format != MODEL_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported model format '{}'",
                c.format
            )));
        }
        Ok(c)
    }
}

/// Fit one model on `data`, imputing with medians of `data` itself.
pub fn train(
    family: ModelFamily,
    point: GridPoint,
    data: &LabeledDataset,
    seed: u64,
) -> Result<Classifier> {
    let imputer = Imputer::fit(data);
    let rows: Vec<Vec<f64>> = data
        .rows
        .iter()
        .map(|r| imputer.apply(&r.features))
        .collect();
    let x = Matrix::from_rows(&rows)?;
    let y = data.labels();
    let ensemble = match family {
        ModelFamily::Forest => Ensemble::Forest(ForestModel::fit(
            &x,
            &y,
            ForestParams {
                n_trees: point.n_trees,
                max_depth: point.max_depth,
                min_leaf: point.min_leaf,
                max_features: None,
            },
            seed,
        )?),
        ModelFamily::Boost => Ensemble::Boost(BoostModel::fit(
            &x,
            &y,
            BoostParams {
                n_trees: point.n_trees,
                max_depth: point.max_depth,
                min_leaf: point.min_leaf,
                learning_rate: point.learning_rate.unwrap_or(0.1),
            },
            seed,
        )?),
    };
    Ok(Classifier {
        format: MODEL_FORMAT.to_string(),
        features: feature_registry(),
        imputer,
        ensemble,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub family: ModelFamily,
    pub grid: Grid,
    pub split_fraction: f64,
    pub folds: usize,
    pub seed: u64,
    pub augment: bool,
}

impl PipelineConfig {
    pub fn new(family: ModelFamily, seed: u64) -> Self {
        Self {
            family,
            grid: Grid::default_for(family),
            split_fraction: 0.8,
            folds: 5,
            seed,
            augment: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub n_train: usize,
    pub n_train_augmented: usize,
    pub n_test: usize,
    pub grid: GridResult,
    pub classifier: Classifier,
    pub test_ids: Vec<String>,
    pub test_scores: Vec<f64>,
    pub test_labels: Vec<Label>,
    pub metrics: Metrics,
    pub auroc: f64,
}

/// Split, augment the training part, grid-search, refit on the whole
/// training part and score the untouched test part.
pub fn run_pipeline(data: &LabeledDataset, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let (train_raw, test) = split_train_test(data, cfg.split_fraction, cfg.seed)?;
    let train_set = if cfg.augment {
        augment_swap_lr(&train_raw)
    } else {
        train_raw.clone()
    };
    let grid = grid_search(cfg.family, &cfg.grid, &train_set, cfg.folds, cfg.seed)?;
    let classifier = train(cfg.family, grid.best, &train_set, cfg.seed)?;
    let test_scores: Vec<f64> = test
        .rows
        .iter()
        .map(|r| classifier.predict_proba(&r.features))
        .collect();
    let predicted: Vec<bool> = test_scores.iter().map(|&p| p >= 0.5).collect();
    let actual = test.labels();
    Ok(PipelineReport {
        n_train: train_raw.len(),
        n_train_augmented: train_set.len(),
        n_test: test.len(),
        metrics: metrics(&predicted, &actual)?,
        auroc: auroc(&test_scores, &actual)?,
        grid,
        classifier,
        test_ids: test.rows.iter().map(|r| r.id.clone()).collect(),
        test_scores,
        test_labels: test.rows.iter().map(|r| r.label).collect(),
    })
}
