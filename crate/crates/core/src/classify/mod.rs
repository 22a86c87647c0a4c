//! Healthy/disease classification from 36-feature measurement vectors.
//!
//! Pipeline: stratified split, left/right swap augmentation of the training
//! part only, grid search with grouped k-fold CV, refit, held-out metrics.

mod boost;
mod forest;
mod grid;
mod metrics;
mod model;
mod tree;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Feature, MeasurementSet, N_FEATURES};

pub use boost::{BoostModel, BoostParams};
pub use forest::{ForestModel, ForestParams};
pub use grid::{grid_search, CvRow, Grid, GridPoint, GridResult};
pub use metrics::{auroc, auroc_pairwise, metrics, Confusion, Metrics};
pub use model::{
    run_pipeline, train, Classifier, Ensemble, ModelFamily, PipelineConfig, PipelineReport,
    MODEL_FORMAT,
};
pub use tree::{Node, Tree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Healthy,
    Disease,
}

impl Label {
    pub fn is_disease(&self) -> bool {
        *self == Label::Disease
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Healthy => "healthy",
            Label::Disease => "disease",
        }
    }

    pub fn parse(s: &str) -> Result<Label> {
        match s.trim().to_ascii_lowercase().as_str() {
            "healthy" | "0" => Ok(Label::Healthy),
            "disease" | "1" => Ok(Label::Disease),
            other => Err(Error::Invalid(format!("unknown label '{other}'"))),
        }
    }
}

/// One labelled feature vector. `NaN` marks an invalid feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: String,
    pub features: Vec<f64>,
    pub label: Label,
    /// True for the left/right-swapped copy made by augmentation.
    pub swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    pub rows: Vec<Row>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Row>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.features.len() != N_FEATURES) {
            return Err(Error::Invalid(format!(
                "row '{}' has {} features, expected {N_FEATURES}",
                r.id,
                r.features.len()
            )));
        }
        Ok(Self { rows })
    }

    /// Join measurement sets with labels by id; unlabelled sets are skipped.
    pub fn from_measurements(sets: &[MeasurementSet], labels: &HashMap<String, Label>) -> Self {
        let rows = sets
            .iter()
            .filter_map(|s| {
                labels.get(&s.id).map(|&label| Row {
                    id: s.id.clone(),
                    features: s.values().to_vec(),
                    label,
                    swapped: false,
                })
            })
            .collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let d = self.rows.iter().filter(|r| r.label.is_disease()).count();
        (self.rows.len() - d, d)
    }

    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.label.is_disease()).collect()
    }

    fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

fn swap_sides(features: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NAN; features.len()];
    for (i, &v) in features.iter().enumerate() {
        let j = Feature::from_index(i)
            .expect("registry width")
            .mirrored()
            .index();
        out[j] = v;
    }
    out
}

/// Originals followed by their left/right-swapped copies.
pub fn augment_swap_lr(data: &LabeledDataset) -> LabeledDataset {
    let mut rows = data.rows.clone();
    rows.extend(data.rows.iter().map(|r| Row {
        id: r.id.clone(),
        features: swap_sides(&r.features),
        label: r.label,
        swapped: !r.swapped,
    }));
    LabeledDataset { rows }
}

/// Stratified, seeded split. Each class contributes `round(n_c * (1 - fraction))`
/// rows to the test part; rows keep their original order within each part.
pub fn split_train_test(
    data: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if data.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: data.len(),
        });
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Invalid(format!(
            "split fraction {fraction} not in (0, 1)"
        )));
    }
    let (h, d) = data.class_counts();
    if h == 0 || d == 0 {
        return Err(Error::SingleClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; data.len()];
    for label in [Label::Healthy, Label::Disease] {
        let mut idx: Vec<usize> = (0..data.len())
            .filter(|&i| data.rows[i].label == label)
            .collect();
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * (1.0 - fraction)).round() as usize;
        for &i in &idx[..n_test] {
            is_test[i] = true;
        }
    }
    let train: Vec<usize> = (0..data.len()).filter(|&i| !is_test[i]).collect();
    let test: Vec<usize> = (0..data.len()).filter(|&i| is_test[i]).collect();
    Ok((data.subset(&train), data.subset(&test)))
}

/// Per-feature training medians used to fill invalid entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputer {
    pub medians: Vec<f64>,
}

impl Imputer {
    /// Features with no valid training value are filled with 0.
    pub fn fit(data: &LabeledDataset) -> Imputer {
        let medians = (0..N_FEATURES)
            .map(|j| {
                let mut v: Vec<f64> = data
                    .rows
                    .iter()
                    .map(|r| r.features[j])
                    .filter(|x| x.is_finite())
                    .collect();
                if v.is_empty() {
                    return 0.0;
                }
                v.sort_by(f64::total_cmp);
                let m = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[m]
                } else {
                    0.5 * (v[m - 1] + v[m])
                }
            })
            .collect();
        Imputer { medians }
    }

    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(&self.medians)
            .map(|(&x, &m)| if x.is_finite() { x } else { m })
            .collect()
    }
}

/// Column-major feature matrix with no missing values.
#[derive(Debug, Clone)]
pub struct Matrix {
    n_rows: usize,
    cols: Vec<Vec<f64>>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Invalid("ragged feature rows".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite feature value".into()));
        }
        let cols = (0..n_cols)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Ok(Matrix {
            n_rows: rows.len(),
            cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cols[col][row]
    }

    pub fn col(&self, col: usize) -> &[f64] {
        &self.cols[col]
    }
}
