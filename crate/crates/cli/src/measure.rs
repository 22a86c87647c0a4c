use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use periometry::anthro::measure_face;
use periometry::features::write_measurements_csv;
use periometry::prep::normalize_orientation;
use periometry::MeasurementSet;
use rayon::prelude::*;

use crate::io::{load_face, Manifest, ManifestEntry};
use crate::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum UnitChoice {
    Px,
    Mm,
    Both,
}

struct Measured {
    sets: Vec<MeasurementSet>,
    missing: Vec<String>,
}

fn measure_entry(
    manifest: &Manifest,
    e: &ManifestEntry,
    units: UnitChoice,
    normalize: bool,
) -> Result<Measured> {
    let loaded = load_face(manifest, e)?;
    let face = if normalize {
        normalize_orientation(&loaded.face)?.0
    } else {
        loaded.face
    };
    let m = measure_face(&face);
    let sets = match units {
        UnitChoice::Px => vec![m.px],
        UnitChoice::Mm => vec![m.mm],
        UnitChoice::Both => vec![m.px, m.mm],
    };
    Ok(Measured {
        sets,
        missing: loaded.missing,
    })
}

/// Path of the per-face error table written next to `out_csv`.
pub fn errors_path(out_csv: &Path) -> PathBuf {
    let stem = out_csv
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out");
    out_csv.with_file_name(format!("{stem}.errors.csv"))
}

/// Measure every face of a manifest. Rows follow manifest order; faces that
/// fail to load are reported and skipped.
pub fn run(
    manifest_path: &Path,
    out_csv: &Path,
    units: UnitChoice,
    normalize: bool,
) -> Result<Status> {
    let manifest = Manifest::read(manifest_path)?;
    let results: Vec<Result<Measured>> = manifest
        .entries
        .par_iter()
        .map(|e| measure_entry(&manifest, e, units, normalize))
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut partial = false;
    for (e, r) in manifest.entries.iter().zip(results) {
        match r {
            Ok(m) => {
                if !m.missing.is_empty() {
                    eprintln!(
                        "{}: missing masks treated as empty: {}",
                        e.id,
                        m.missing.join(", ")
                    );
                }
                partial |= m.sets.iter().any(|s| !s.all_valid());
                rows.extend(m.sets);
            }
            Err(err) => {
                eprintln!("{}: {err:#}", e.id);
                errors.push((e.id.clone(), format!("{err:#}")));
            }
        }
    }
    let file = File::create(out_csv).with_context(|| format!("creating {}", out_csv.display()))?;
    write_measurements_csv(BufWriter::new(file), &rows)?;
    if !errors.is_empty() {
        let mut w = csv::Writer::from_path(errors_path(out_csv))?;
        w.write_record(["id", "error"])?;
        for (id, msg) in &errors {
            w.write_record([id, msg])?;
        }
        w.flush()?;
    }
    let n = manifest.entries.len();
    println!(
        "measured {} of {n} faces, {} rows -> {}",
        n - errors.len(),
        rows.len(),
        out_csv.display()
    );
    Ok(if n > 0 && errors.len() == n {
        Status::Failed
    } else if partial || !errors.is_empty() {
        Status::Partial
    } else {
        Status::Clean
    })
}
