//! File formats: mask images, landmark sidecars, manifests and label tables.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use image::{GrayImage, ImageFormat, Luma};
use periometry::classify::Label;
use periometry::{EyeRecord, EyeSide, FaceRecord, Landmarks, MaskClass, Point, RasterMask};
use serde::{Deserialize, Serialize};

pub const LANDMARK_SCHEMA: &str = "periometry-landmarks/1";

/// Read a single-channel mask; any non-zero pixel is set.
pub fn read_mask(path: &Path, class: MaskClass) -> Result<RasterMask> {
    let img = image::open(path)
        .with_context(|| format!("reading mask {}", path.display()))?
        .to_luma8();
    let (w, h) = img.dimensions();
    let bits: Vec<bool> = img.pixels().map(|p| p.0[0] > 0).collect();
    Ok(RasterMask::from_bits(w as usize, h as usize, class, &bits)?)
}

/// Write a mask as an 8-bit PNG with values 0 and 255.
pub fn write_mask(path: &Path, mask: &RasterMask) -> Result<()> {
    let mut img = GrayImage::new(mask.width() as u32, mask.height() as u32);
    for (x, y) in mask.pixels() {
        img.put_pixel(x as u32, y as u32, Luma([255]));
    }
    img.save_with_format(path, ImageFormat::Png)
        .with_context(|| format!("writing mask {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XY {
    pub x: f64,
    pub y: f64,
}

/// Landmark sidecar, one per face, in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkFile {
    pub schema: String,
    pub nasion: XY,
    pub hairline_mid: XY,
}

impl LandmarkFile {
    pub fn new(l: &Landmarks) -> Self {
        Self {
            schema: LANDMARK_SCHEMA.to_string(),
            nasion: XY {
                x: l.nasion.x,
                y: l.nasion.y,
            },
            hairline_mid: XY {
                x: l.hairline_mid.x,
                y: l.hairline_mid.y,
            },
        }
    }

    pub fn landmarks(&self) -> Landmarks {
        Landmarks {
            nasion: Point::new(self.nasion.x, self.nasion.y),
            hairline_mid: Point::new(self.hairline_mid.x, self.hairline_mid.y),
        }
    }
}

pub fn read_landmarks(path: &Path) -> Result<Landmarks> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading landmarks {}", path.display()))?;
    let f: LandmarkFile =
        toml::from_str(&text).with_context(|| format!("parsing landmarks {}", path.display()))?;
    if f.schema != LANDMARK_SCHEMA {
        bail!(
            "{}: unsupported landmark schema '{}'",
            path.display(),
            f.schema
        );
    }
    Ok(f.landmarks())
}

pub fn write_landmarks(path: &Path, l: &Landmarks) -> Result<()> {
    let text = toml::to_string(&LandmarkFile::new(l))?;
    fs::write(path, text).with_context(|| format!("writing landmarks {}", path.display()))
}

/// One manifest row. Paths are relative to the manifest's directory unless
/// absolute; an empty mask path means the mask was not annotated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub dataset: String,
    pub right_sclera: String,
    pub right_iris: String,
    pub right_brow: String,
    pub left_sclera: String,
    pub left_iris: String,
    pub left_brow: String,
    pub landmarks: String,
    /// Optional measurement CSV holding this face's reference values.
    #[serde(default)]
    pub truth: String,
}

impl ManifestEntry {
    pub fn mask_path(&self, side: EyeSide, class: MaskClass) -> &str {
        match (side, class) {
            (EyeSide::Right, MaskClass::Sclera) => &self.right_sclera,
            (EyeSide::Right, MaskClass::Iris) => &self.right_iris,
            (EyeSide::Right, MaskClass::Brow) => &self.right_brow,
            (EyeSide::Left, MaskClass::Sclera) => &self.left_sclera,
            (EyeSide::Left, MaskClass::Iris) => &self.left_iris,
            (EyeSide::Left, MaskClass::Brow) => &self.left_brow,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub base: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Manifest> {
        let mut r = csv::Reader::from_path(path)
            .with_context(|| format!("opening manifest {}", path.display()))?;
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for rec in r.deserialize() {
            let e: ManifestEntry = rec.with_context(|| format!("parsing {}", path.display()))?;
            if !seen.insert(e.id.clone()) {
                bail!("{}: duplicate id '{}'", path.display(), e.id);
            }
            entries.push(e);
        }
        Ok(Manifest {
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            entries,
        })
    }

    pub fn write(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for e in entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

pub const CLASSES: [MaskClass; 3] = [MaskClass::Sclera, MaskClass::Iris, MaskClass::Brow];

/// A face assembled from its manifest row, with notes about masks that were
/// absent and replaced by empty ones.
pub struct LoadedFace {
    pub face: FaceRecord,
    pub missing: Vec<String>,
}

/// Load all masks and landmarks of one entry. A mask whose path is empty or
/// whose file does not exist is treated as empty; a file that exists but
/// cannot be decoded is an error.
pub fn load_face(manifest: &Manifest, e: &ManifestEntry) -> Result<LoadedFace> {
    let mut masks: HashMap<(EyeSide, MaskClass), RasterMask> = HashMap::new();
    let mut missing = Vec::new();
    for side in [EyeSide::Right, EyeSide::Left] {
        for class in CLASSES {
            let rel = e.mask_path(side, class);
            let path = manifest.resolve(rel);
            if rel.is_empty() || !path.exists() {
                missing.push(format!("{}_{}", side.as_str(), class.as_str()));
                continue;
            }
            masks.insert((side, class), read_mask(&path, class)?);
        }
    }
    let Some(first) = masks.values().next() else {
        bail!("{}: no mask files found", e.id);
    };
    let (w, h) = (first.width(), first.height());
    for m in masks.values() {
        if (m.width(), m.height()) != (w, h) {
            bail!(
                "{}: masks differ in size ({}x{} vs {w}x{h})",
                e.id,
                m.width(),
                m.height()
            );
        }
    }
    let mut take = |side, class| {
        masks
            .remove(&(side, class))
            .unwrap_or_else(|| RasterMask::empty(w, h, class))
    };
    let mut eye = |side| -> Result<EyeRecord> {
        let (s, i, b) = (
            take(side, MaskClass::Sclera),
            take(side, MaskClass::Iris),
            take(side, MaskClass::Brow),
        );
        Ok(EyeRecord::new(
            side,
            s,
            i,
            b,
            format!("{}_{}", e.id, side.as_str()),
        )?)
    };
    let right = eye(EyeSide::Right)?;
    let left = eye(EyeSide::Left)?;
    let landmarks = read_landmarks(&manifest.resolve(&e.landmarks))?;
    let face = FaceRecord::new(e.id.clone(), right, left, landmarks, (w, h))?;
    Ok(LoadedFace { face, missing })
}

/// `id,label` rows; labels are `healthy`/`disease` or `0`/`1`.
pub fn read_labels(path: &Path) -> Result<HashMap<String, Label>> {
    #[derive(Deserialize)]
    struct Rec {
        id: String,
        label: String,
    }
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("opening labels {}", path.display()))?;
    let mut out = HashMap::new();
    for rec in r.deserialize() {
        let rec: Rec = rec.with_context(|| format!("parsing {}", path.display()))?;
        let label = Label::parse(&rec.label)?;
        if out.insert(rec.id.clone(), label).is_some() {
            bail!("{}: duplicate id '{}'", path.display(), rec.id);
        }
    }
    Ok(out)
}

pub fn write_labels(path: &Path, rows: &[(String, Label)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "label"])?;
    for (id, l) in rows {
        w.write_record([id.as_str(), l.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_png_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let m = RasterMask::from_fn(13, 7, MaskClass::Iris, |x, y| (x * y) % 3 == 1);
        let p = dir.path().join("m.png");
        write_mask(&p, &m).unwrap();
        assert_eq!(read_mask(&p, MaskClass::Iris).unwrap(), m);
    }

    #[test]
    fn landmark_roundtrip_and_schema_check() {
        let dir = tempfile::tempdir().unwrap();
        let l = Landmarks {
            nasion: Point::new(260.0, 175.5),
            hairline_mid: Point::new(259.25, 15.0),
        };
        let p = dir.path().join("l.toml");
        write_landmarks(&p, &l).unwrap();
        assert_eq!(read_landmarks(&p).unwrap(), l);
        let text = fs::read_to_string(&p)
            .unwrap()
            .replace(LANDMARK_SCHEMA, "other/2");
        fs::write(&p, text).unwrap();
        assert!(read_landmarks(&p).is_err());
    }
}
