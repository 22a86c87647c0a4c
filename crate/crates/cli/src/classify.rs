use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use periometry::classify::{run_pipeline, Grid, LabeledDataset, ModelFamily, PipelineConfig};
use periometry::features::read_measurements_csv;
use periometry::{MeasurementSet, Units};

use crate::io::read_labels;
use crate::{create_dir, fmt_opt, Status};

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub family: ModelFamily,
    /// JSON grid file; the family's default grid when absent.
    pub grid: Option<PathBuf>,
    pub seed: u64,
    pub split: f64,
    pub folds: usize,
    pub units: Units,
    pub augment: bool,
}

impl ClassifyOptions {
    pub fn new(family: ModelFamily, seed: u64) -> Self {
        Self {
            family,
            grid: None,
            seed,
            split: 0.8,
            folds: 5,
            units: Units::Mm,
            augment: true,
        }
    }
}

pub fn read_grid(path: &Path) -> Result<Grid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing grid {}", path.display()))
}

/// Train and evaluate a healthy/disease classifier on measured features.
pub fn run(
    features_csv: &Path,
    labels_csv: &Path,
    out_dir: &Path,
    opts: &ClassifyOptions,
) -> Result<Status> {
    let f =
        File::open(features_csv).with_context(|| format!("opening {}", features_csv.display()))?;
    let sets: Vec<MeasurementSet> = read_measurements_csv(f)?
        .into_iter()
        .filter(|s| s.units == opts.units)
        .collect();
    if sets.is_empty() {
        bail!(
            "{} has no rows in {} units",
            features_csv.display(),
            opts.units.as_str()
        );
    }
    let labels = read_labels(labels_csv)?;
    let unlabelled = sets.iter().filter(|s| !labels.contains_key(&s.id)).count();
    if unlabelled > 0 {
        eprintln!("skipping {unlabelled} feature rows without a label");
    }
    let data = LabeledDataset::from_measurements(&sets, &labels);
    let cfg = PipelineConfig {
        family: opts.family,
        grid: match &opts.grid {
            Some(p) => read_grid(p)?,
            None => Grid::default_for(opts.family),
        },
        split_fraction: opts.split,
        folds: opts.folds,
        seed: opts.seed,
        augment: opts.augment,
    };
    let rep = run_pipeline(&data, &cfg)?;
    create_dir(out_dir)?;

    let m = &rep.metrics;
    let mut w = csv::Writer::from_path(out_dir.join("metrics.csv"))?;
    w.write_record([
        "model",
        "accuracy",
        "precision",
        "recall",
        "auroc",
        "n_train",
        "n_train_augmented",
        "n_test",
        "seed",
    ])?;
    w.write_record([
        opts.family.as_str().to_string(),
        m.accuracy.to_string(),
        m.precision.to_string(),
        m.recall.to_string(),
        rep.auroc.to_string(),
        rep.n_train.to_string(),
        rep.n_train_augmented.to_string(),
        rep.n_test.to_string(),
        opts.seed.to_string(),
    ])?;
    w.flush()?;

    let mut w = csv::Writer::from_path(out_dir.join("cv.csv"))?;
    let mut header: Vec<String> = ["index", "n_trees", "max_depth", "min_leaf", "learning_rate"]
        .map(String::from)
        .to_vec();
    header.extend((1..=opts.folds).map(|k| format!("fold_{k}")));
    header.extend(["mean_accuracy".to_string(), "selected".to_string()]);
    w.write_record(&header)?;
    for row in &rep.grid.table {
        let p = row.point;
        let mut rec = vec![
            row.index.to_string(),
            p.n_trees.to_string(),
            fmt_opt(p.max_depth),
            p.min_leaf.to_string(),
            fmt_opt(p.learning_rate),
        ];
        rec.extend(row.fold_accuracy.iter().map(f64::to_string));
        rec.push(row.mean_accuracy.to_string());
        rec.push((row.index == rep.grid.best_index).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;

    fs::write(out_dir.join("model.json"), rep.classifier.to_json()?)?;

    let mut w = csv::Writer::from_path(out_dir.join("predictions.csv"))?;
    w.write_record(["id", "label", "p_disease", "predicted"])?;
    for ((id, label), p) in rep
        .test_ids
        .iter()
        .zip(&rep.test_labels)
        .zip(&rep.test_scores)
    {
        let predicted = if *p >= 0.5 { "disease" } else { "healthy" };
        w.write_record([id.as_str(), label.as_str(), &p.to_string(), predicted])?;
    }
    w.flush()?;

    if !m.precision_defined || !m.recall_defined {
        eprintln!("warning: precision or recall undefined on the test split, reported as 0");
    }
    println!(
        "{}: accuracy {:.4}, precision {:.4}, recall {:.4}, AUROC {:.4} ({} test faces)",
        opts.family.as_str(),
        m.accuracy,
        m.precision,
        m.recall,
        rep.auroc,
        rep.n_test
    );
    Ok(Status::Clean)
}
