use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use periometry::features::{read_measurements_csv, Feature, N_FEATURES};
use periometry::stats::{
    bilateral_average, bland_altman, filter_outliers_1sd, mae, mae_of_errors, subset_compare,
    PairedSeries,
};
use periometry::{MeasurementSet, Units};

use crate::plot::bland_altman_svg;
use crate::{create_dir, Status};

#[derive(Debug, Clone, Default)]
pub struct EvaluateOptions {
    /// Average left and right eyes into 20 features instead of 36.
    pub bilateral_average: bool,
    /// Report brow errors again after dropping those above mean + 1 SD.
    pub filter_brow_outliers: bool,
    /// Ids left out of the reports; with `baseline`, the baseline's failures.
    pub exclude_ids: Option<PathBuf>,
    /// Second method's measurements, compared on the shared subset.
    pub baseline: Option<PathBuf>,
}

type Columns = Vec<(String, Option<f64>)>;

fn columns(set: &MeasurementSet, bilateral: bool) -> Columns {
    if bilateral {
        bilateral_average(set)
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect()
    } else {
        (0..N_FEATURES)
            .map(|i| (Feature::from_index(i).expect("registry").name(), set.get(i)))
            .collect()
    }
}

fn by_id(sets: &[MeasurementSet], units: Units, bilateral: bool) -> Vec<(String, Columns)> {
    sets.iter()
        .filter(|s| s.units == units)
        .map(|s| (s.id.clone(), columns(s, bilateral)))
        .collect()
}

fn read_sets(path: &Path) -> Result<Vec<MeasurementSet>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_measurements_csv(f).with_context(|| format!("parsing {}", path.display()))
}

/// One id per line; blank lines, `#` comments and an `id` header are skipped.
pub fn read_id_list(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && *l != "id")
        .map(|l| l.split(',').next().unwrap_or(l).trim().to_string())
        .collect())
}

fn series(
    name: &str,
    units: Units,
    pred: &[(String, Columns)],
    truth: &HashMap<&str, &Columns>,
    j: usize,
    keep: impl Fn(&str) -> bool,
) -> Option<PairedSeries> {
    PairedSeries::from_pairs(
        name,
        units,
        pred.iter()
            .filter(|(id, _)| keep(id))
            .filter_map(|(id, c)| {
                truth
                    .get(id.as_str())
                    .map(|t| (id.as_str(), c[j].1, t[j].1))
            }),
    )
    .ok()
}

fn unit_label(feature: &str, units: Units) -> &'static str {
    if feature.ends_with("canthal_tilt_deg") {
        "deg"
    } else if feature.ends_with("scleral_area_ratio") {
        "ratio"
    } else {
        units.as_str()
    }
}

/// Agreement between predicted and reference measurements: per-feature MAE,
/// Bland-Altman limits with one plot per feature, optional brow outlier
/// filtering and an optional comparison against a baseline method.
pub fn run(
    pred_csv: &Path,
    truth_csv: &Path,
    out_dir: &Path,
    opts: &EvaluateOptions,
) -> Result<Status> {
    let pred = read_sets(pred_csv)?;
    let truth = read_sets(truth_csv)?;
    let baseline = opts.baseline.as_deref().map(read_sets).transpose()?;
    let excluded = match &opts.exclude_ids {
        Some(p) => read_id_list(p)?,
        None => HashSet::new(),
    };
    let plots = out_dir.join("plots");
    create_dir(&plots)?;

    let mut mae_w = csv::Writer::from_path(out_dir.join("mae.csv"))?;
    mae_w.write_record(["units", "feature", "n", "mae", "sd"])?;
    let mut ba_w = csv::Writer::from_path(out_dir.join("agreement.csv"))?;
    ba_w.write_record([
        "units",
        "feature",
        "n",
        "mean_diff",
        "sd_diff",
        "loa_low",
        "loa_high",
        "pct_outside",
    ])?;
    let mut brow_w = opts
        .filter_brow_outliers
        .then(|| csv::Writer::from_path(out_dir.join("brow_outliers.csv")))
        .transpose()?;
    if let Some(w) = brow_w.as_mut() {
        w.write_record([
            "units",
            "feature",
            "n",
            "removed",
            "threshold",
            "mae_before",
            "mae_after",
        ])?;
    }
    let mut cmp_w = baseline
        .as_ref()
        .map(|_| csv::Writer::from_path(out_dir.join("compare.csv")))
        .transpose()?;
    if let Some(w) = cmp_w.as_mut() {
        w.write_record([
            "units",
            "feature",
            "retained",
            "total",
            "coverage",
            "mae",
            "sd",
            "baseline_mae",
            "baseline_sd",
        ])?;
    }

    let mut any = false;
    for units in [Units::Px, Units::Mm] {
        let p = by_id(&pred, units, opts.bilateral_average);
        let t = by_id(&truth, units, opts.bilateral_average);
        let t_map: HashMap<&str, &Columns> = t.iter().map(|(id, c)| (id.as_str(), c)).collect();
        let b = baseline
            .as_deref()
            .map(|b| by_id(b, units, opts.bilateral_average));
        let Some(names) = p
            .first()
            .map(|(_, c)| c.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>())
        else {
            continue;
        };
        for (j, name) in names.iter().enumerate() {
            let Some(s) = series(name, units, &p, &t_map, j, |id| !excluded.contains(id)) else {
                continue;
            };
            any = true;
            let u = units.as_str();
            let m = mae(&s)?;
            mae_w.write_record([
                u,
                name,
                &m.n.to_string(),
                &m.mean.to_string(),
                &m.sd.to_string(),
            ])?;
            if let Ok(r) = bland_altman(&s) {
                ba_w.write_record([
                    u,
                    name,
                    &r.n.to_string(),
                    &r.mean_diff.to_string(),
                    &r.sd_diff.to_string(),
                    &r.loa_low.to_string(),
                    &r.loa_high.to_string(),
                    &r.pct_outside.to_string(),
                ])?;
                let svg = bland_altman_svg(&format!("{name} ({u})"), unit_label(name, units), &r);
                fs::write(plots.join(format!("{u}_{name}.svg")), svg)?;
            }
            if let Some(w) = brow_w.as_mut().filter(|_| name.contains("brow_")) {
                let errors = s.abs_errors();
                let f = filter_outliers_1sd(&errors);
                let kept: Vec<f64> = f.kept.iter().map(|&i| errors[i]).collect();
                let after = mae_of_errors(&kept)?;
                println!(
                    "{name} ({u}): removed {} of {}, MAE {:.4} -> {:.4}",
                    f.removed, m.n, m.mean, after.mean
                );
                w.write_record([
                    u,
                    name,
                    &m.n.to_string(),
                    &f.removed.to_string(),
                    &f.threshold.to_string(),
                    &m.mean.to_string(),
                    &after.mean.to_string(),
                ])?;
            }
            if let (Some(w), Some(b)) = (cmp_w.as_mut(), b.as_ref()) {
                let ours = series(name, units, &p, &t_map, j, |_| true);
                let base = series(name, units, b, &t_map, j, |_| true);
                let Some(c) = ours
                    .zip(base)
                    .and_then(|(o, b)| subset_compare(&o, &b, &excluded).ok())
                else {
                    continue;
                };
                w.write_record([
                    u,
                    name,
                    &c.retained.to_string(),
                    &c.total.to_string(),
                    &c.coverage.to_string(),
                    &c.ours.mean.to_string(),
                    &c.ours.sd.to_string(),
                    &c.baseline.mean.to_string(),
                    &c.baseline.sd.to_string(),
                ])?;
            }
        }
    }
    if !any {
        bail!("no feature has a valid value in both predictions and reference for any shared id");
    }
    mae_w.flush()?;
    ba_w.flush()?;
    if let Some(w) = brow_w.as_mut() {
        w.flush()?;
    }
    if let Some(w) = cmp_w.as_mut() {
        w.flush()?;
    }
    println!("wrote agreement reports to {}", out_dir.display());
    Ok(Status::Clean)
}
