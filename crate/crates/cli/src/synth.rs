use std::path::Path;

use anyhow::{Context, Result};
use periometry::features::{to_mm, write_measurements_csv};
use periometry::synth::{gen_mixed, SynthFace};
use periometry::{EyeSide, MeasurementSet, Scale};
use rayon::prelude::*;

use crate::io::{write_labels, write_landmarks, write_mask, Manifest, ManifestEntry, CLASSES};
use crate::{create_dir, Status};

fn mask_name(id: &str, side: EyeSide, class: periometry::MaskClass) -> String {
    format!("masks/{id}_{}_{}.png", side.as_str(), class.as_str())
}

fn write_face(out: &Path, f: &SynthFace) -> Result<ManifestEntry> {
    let id = &f.params.id;
    for side in [EyeSide::Right, EyeSide::Left] {
        let eye = f.face.eye(side);
        for class in CLASSES {
            write_mask(&out.join(mask_name(id, side, class)), eye.mask(class))?;
        }
    }
    let landmarks = format!("landmarks/{id}.toml");
    write_landmarks(&out.join(&landmarks), &f.face.landmarks)?;
    let m = |side, class| mask_name(id, side, class);
    use periometry::MaskClass::{Brow, Iris, Sclera};
    Ok(ManifestEntry {
        id: id.clone(),
        dataset: f.label.as_str().to_string(),
        right_sclera: m(EyeSide::Right, Sclera),
        right_iris: m(EyeSide::Right, Iris),
        right_brow: m(EyeSide::Right, Brow),
        left_sclera: m(EyeSide::Left, Sclera),
        left_iris: m(EyeSide::Left, Iris),
        left_brow: m(EyeSide::Left, Brow),
        landmarks,
        truth: "truth.csv".to_string(),
    })
}

/// Analytic truth in millimetres, scaled by each eye's true iris diameter.
fn truth_mm(f: &SynthFace) -> Result<MeasurementSet> {
    let scale = |r: f64| Scale::from_iris_diameter(2.0 * r).ok();
    Ok(to_mm(
        &f.truth,
        scale(f.params.right.iris_radius),
        scale(f.params.left.iris_radius),
    )?)
}

/// Write `n` synthetic faces (masks, landmarks, manifest, labels and the
/// analytic truth table) under `out`.
pub fn run(n: usize, disease_fraction: f64, seed: u64, out: &Path) -> Result<Status> {
    let faces = gen_mixed(n, disease_fraction, seed)?;
    create_dir(&out.join("masks"))?;
    create_dir(&out.join("landmarks"))?;
    let entries: Vec<ManifestEntry> = faces
        .par_iter()
        .map(|f| write_face(out, f))
        .collect::<Result<_>>()?;
    Manifest::write(&out.join("manifest.csv"), &entries)?;

    let mut truth = Vec::with_capacity(2 * faces.len());
    for f in &faces {
        truth.push(f.truth.clone());
        truth.push(truth_mm(f)?);
    }
    let file = std::fs::File::create(out.join("truth.csv")).context("creating truth.csv")?;
    write_measurements_csv(std::io::BufWriter::new(file), &truth)?;

    let labels: Vec<_> = faces
        .iter()
        .map(|f| (f.params.id.clone(), f.label))
        .collect();
    write_labels(&out.join("labels.csv"), &labels)?;
    let n_d = faces.iter().filter(|f| f.label.is_disease()).count();
    println!(
        "wrote {} faces ({} healthy, {n_d} disease) to {}",
        faces.len(),
        faces.len() - n_d,
        out.display()
    );
    Ok(Status::Clean)
}
