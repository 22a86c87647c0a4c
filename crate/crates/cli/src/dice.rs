use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use periometry::maskgeom::dice;
use periometry::stats::quantile_sorted;
use periometry::{EyeSide, FaceRecord, MaskClass};
use rayon::prelude::*;

use crate::io::{load_face, Manifest, CLASSES};
use crate::Status;

/// Both eyes' masks of one class merged, so a face gets one score per class.
fn merged(face: &FaceRecord, class: MaskClass) -> Result<periometry::RasterMask> {
    let r = face.eye(EyeSide::Right).mask(class);
    Ok(r.union(face.eye(EyeSide::Left).mask(class))?)
}

fn face_scores(pred: &FaceRecord, truth: &FaceRecord) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, class) in out.iter_mut().zip(CLASSES) {
        *slot = dice(&merged(pred, class)?, &merged(truth, class)?)?;
    }
    Ok(out)
}

pub fn summary_path(out_csv: &Path) -> PathBuf {
    let stem = out_csv
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dice");
    out_csv.with_file_name(format!("{stem}.summary.csv"))
}

/// Per-face Dice between predicted and reference masks, plus quartiles per
/// dataset and class (and over everything, as dataset `all`).
pub fn run(pred_manifest: &Path, truth_manifest: &Path, out_csv: &Path) -> Result<Status> {
    let pred = Manifest::read(pred_manifest)?;
    let truth = Manifest::read(truth_manifest)?;
    let truth_by_id: HashMap<&str, usize> = truth
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();
    let pred_ids: HashSet<&str> = pred.entries.iter().map(|e| e.id.as_str()).collect();
    let mut offenders: Vec<String> = pred
        .entries
        .iter()
        .filter(|e| !truth_by_id.contains_key(e.id.as_str()))
        .map(|e| format!("{} (prediction only)", e.id))
        .collect();
    offenders.extend(
        truth
            .entries
            .iter()
            .filter(|e| !pred_ids.contains(e.id.as_str()))
            .map(|e| format!("{} (reference only)", e.id)),
    );
    if !offenders.is_empty() {
        bail!("manifests disagree on ids: {}", offenders.join(", "));
    }

    let results: Vec<Result<[f64; 3]>> = pred
        .entries
        .par_iter()
        .map(|e| {
            let t = &truth.entries[truth_by_id[e.id.as_str()]];
            face_scores(&load_face(&pred, e)?.face, &load_face(&truth, t)?.face)
        })
        .collect();

    let mut w = csv::Writer::from_path(out_csv)?;
    w.write_record(["id", "dataset", "sclera", "iris", "brow"])?;
    let mut groups: BTreeMap<String, [Vec<f64>; 3]> = BTreeMap::new();
    let mut failures = 0;
    for (e, r) in pred.entries.iter().zip(results) {
        let scores = match r {
            Ok(s) => s,
            Err(err) => {
                eprintln!("{}: {err:#}", e.id);
                failures += 1;
                continue;
            }
        };
        let mut rec = vec![e.id.clone(), e.dataset.clone()];
        rec.extend(scores.iter().map(|s| s.to_string()));
        w.write_record(&rec)?;
        for key in [e.dataset.clone(), "all".to_string()] {
            let g = groups.entry(key).or_default();
            for (v, s) in g.iter_mut().zip(scores) {
                v.push(s);
            }
        }
    }
    w.flush()?;

    let mut s = csv::Writer::from_path(summary_path(out_csv))?;
    s.write_record(["dataset", "class", "n", "q1", "median", "q3"])?;
    // `all` goes last; the rest sort by name
    let mut keys: Vec<&String> = groups.keys().filter(|k| *k != "all").collect();
    keys.extend(groups.keys().filter(|k| *k == "all"));
    for key in keys {
        for (class, vals) in CLASSES.iter().zip(&groups[key]) {
            let mut v = vals.clone();
            v.sort_by(f64::total_cmp);
            let q = |p| quantile_sorted(&v, p).map_or(String::new(), |x| x.to_string());
            s.write_record([
                key.clone(),
                class.as_str().to_string(),
                v.len().to_string(),
                q(0.25),
                q(0.5),
                q(0.75),
            ])?;
        }
    }
    s.flush()?;

    let n = pred.entries.len();
    println!(
        "scored {} of {n} faces -> {}",
        n - failures,
        out_csv.display()
    );
    Ok(if n > 0 && failures == n {
        Status::Failed
    } else if failures > 0 {
        Status::Partial
    } else {
        Status::Clean
    })
}
