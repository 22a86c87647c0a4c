//! The 36-feature measurement vector, its unit conversion and CSV schema.
//!
//! Registry order is a public contract: sixteen per-side features for the
//! subject's right eye, the same sixteen for the left eye, then four
//! face-global distances. The same order is used for CSV columns and for
//! classifier feature vectors.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::EyeSide;

/// Visible iris diameter used to calibrate pixels to millimetres.
pub const IRIS_DIAMETER_MM: f64 = 11.71;

pub const N_SIDE_FEATURES: usize = 16;
pub const N_GLOBAL_FEATURES: usize = 4;
pub const N_FEATURES: usize = 2 * N_SIDE_FEATURES + N_GLOBAL_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideFeature {
    Mrd1,
    Mrd2,
    InferiorScleralShow,
    SuperiorScleralShow,
    VerticalFissure,
    HorizontalFissure,
    MedialCanthalHeight,
    LateralCanthalHeight,
    CanthalTilt,
    ScleralAreaRatio,
    BrowSupMedial,
    BrowSupCentral,
    BrowSupLateral,
    BrowInfMedial,
    BrowInfCentral,
    BrowInfLateral,
}

impl SideFeature {
    pub const ALL: [SideFeature; N_SIDE_FEATURES] = [
        SideFeature::Mrd1,
        SideFeature::Mrd2,
        SideFeature::InferiorScleralShow,
        SideFeature::SuperiorScleralShow,
        SideFeature::VerticalFissure,
        SideFeature::HorizontalFissure,
        SideFeature::MedialCanthalHeight,
        SideFeature::LateralCanthalHeight,
        SideFeature::CanthalTilt,
        SideFeature::ScleralAreaRatio,
        SideFeature::BrowSupMedial,
        SideFeature::BrowSupCentral,
        SideFeature::BrowSupLateral,
        SideFeature::BrowInfMedial,
        SideFeature::BrowInfCentral,
        SideFeature::BrowInfLateral,
    ];

    pub const BROW: [SideFeature; 6] = [
        SideFeature::BrowSupMedial,
        SideFeature::BrowSupCentral,
        SideFeature::BrowSupLateral,
        SideFeature::BrowInfMedial,
        SideFeature::BrowInfCentral,
        SideFeature::BrowInfLateral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SideFeature::Mrd1 => "mrd1",
            SideFeature::Mrd2 => "mrd2",
            SideFeature::InferiorScleralShow => "iss",
            SideFeature::SuperiorScleralShow => "sss",
            SideFeature::VerticalFissure => "vpf",
            SideFeature::HorizontalFissure => "hpf",
            SideFeature::MedialCanthalHeight => "medial_canthal_height",
            SideFeature::LateralCanthalHeight => "lateral_canthal_height",
            SideFeature::CanthalTilt => "canthal_tilt_deg",
            SideFeature::ScleralAreaRatio => "scleral_area_ratio",
            SideFeature::BrowSupMedial => "brow_sup_medial",
            SideFeature::BrowSupCentral => "brow_sup_central",
            SideFeature::BrowSupLateral => "brow_sup_lateral",
            SideFeature::BrowInfMedial => "brow_inf_medial",
            SideFeature::BrowInfCentral => "brow_inf_central",
            SideFeature::BrowInfLateral => "brow_inf_lateral",
        }
    }

    /// Angles and area ratios carry no length unit.
    pub fn is_dimensionless(&self) -> bool {
        matches!(
            self,
            SideFeature::CanthalTilt | SideFeature::ScleralAreaRatio
        )
    }

    pub fn is_brow(&self) -> bool {
        Self::BROW.contains(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlobalFeature {
    InnerCanthal,
    Interpupillary,
    OuterCanthal,
    VerticalDystopia,
}

impl GlobalFeature {
    pub const ALL: [GlobalFeature; N_GLOBAL_FEATURES] = [
        GlobalFeature::InnerCanthal,
        GlobalFeature::Interpupillary,
        GlobalFeature::OuterCanthal,
        GlobalFeature::VerticalDystopia,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GlobalFeature::InnerCanthal => "icd",
            GlobalFeature::Interpupillary => "ipd",
            GlobalFeature::OuterCanthal => "ocd",
            GlobalFeature::VerticalDystopia => "vertical_dystopia",
        }
    }
}

/// A registry slot: one side-specific feature of one eye, or a global one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Side(EyeSide, SideFeature),
    Global(GlobalFeature),
}

impl Feature {
    pub fn index(&self) -> usize {
        match *self {
            Feature::Side(side, f) => {
                let base = match side {
                    EyeSide::Right => 0,
                    EyeSide::Left => N_SIDE_FEATURES,
                };
                base + SideFeature::ALL.iter().position(|&g| g == f).unwrap()
            }
            Feature::Global(g) => {
                2 * N_SIDE_FEATURES + GlobalFeature::ALL.iter().position(|&h| h == g).unwrap()
            }
        }
    }

    pub fn from_index(i: usize) -> Option<Feature> {
        match i {
            i if i < N_SIDE_FEATURES => Some(Feature::Side(EyeSide::Right, SideFeature::ALL[i])),
            i if i < 2 * N_SIDE_FEATURES => Some(Feature::Side(
                EyeSide::Left,
                SideFeature::ALL[i - N_SIDE_FEATURES],
            )),
            i if i < N_FEATURES => {
                Some(Feature::Global(GlobalFeature::ALL[i - 2 * N_SIDE_FEATURES]))
            }
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Feature::Side(side, f) => format!("{}_{}", side.as_str(), f.name()),
            Feature::Global(g) => g.name().to_string(),
        }
    }

    /// Same feature on the other eye; globals map to themselves.
    pub fn mirrored(&self) -> Feature {
        match *self {
            Feature::Side(side, f) => Feature::Side(side.opposite(), f),
            g => g,
        }
    }
}

/// Ordered list of the 36 feature names.
pub fn feature_registry() -> Vec<String> {
    (0..N_FEATURES)
        .map(|i| Feature::from_index(i).unwrap().name())
        .collect()
}

pub fn feature_index(name: &str) -> Option<usize> {
    (0..N_FEATURES).find(|&i| Feature::from_index(i).unwrap().name() == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Px,
    Mm,
}

impl Units {
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::Px => "px",
            Units::Mm => "mm",
        }
    }

    pub fn parse(s: &str) -> Result<Units> {
        match s {
            "px" => Ok(Units::Px),
            "mm" => Ok(Units::Mm),
            other => Err(Error::Invalid(format!("unknown units '{other}'"))),
        }
    }
}

/// Millimetres per pixel, calibrated from the visible iris diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    mm_per_px: f64,
}

impl Scale {
    pub fn from_iris_diameter(diameter_px: f64) -> Result<Scale> {
        if !(diameter_px.is_finite() && diameter_px > 0.0) {
            return Err(Error::Invalid(format!(
                "iris diameter must be positive, got {diameter_px}"
            )));
        }
        Ok(Scale {
            mm_per_px: IRIS_DIAMETER_MM / diameter_px,
        })
    }

    pub fn mm_per_px(&self) -> f64 {
        self.mm_per_px
    }
}

/// One face's feature vector with explicit validity.
///
/// Invalid features keep a `NaN` payload and a cleared validity bit; they are
/// never reported as zero. `clamped` marks features that were negative and
/// clamped to zero (a lid crossing the iris centre).
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub id: String,
    pub units: Units,
    values: [f64; N_FEATURES],
    valid: u64,
    clamped: u64,
}

impl MeasurementSet {
    pub fn new(id: impl Into<String>, units: Units) -> Self {
        Self {
            id: id.into(),
            units,
            values: [f64::NAN; N_FEATURES],
            valid: 0,
            clamped: 0,
        }
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.is_valid(i).then(|| self.values[i])
    }

    pub fn feature(&self, f: Feature) -> Option<f64> {
        self.get(f.index())
    }

    pub fn side(&self, side: EyeSide, f: SideFeature) -> Option<f64> {
        self.feature(Feature::Side(side, f))
    }

    pub fn global(&self, g: GlobalFeature) -> Option<f64> {
        self.feature(Feature::Global(g))
    }

    pub fn is_valid(&self, i: usize) -> bool {
        (self.valid >> i) & 1 == 1
    }

    pub fn is_clamped(&self, i: usize) -> bool {
        (self.clamped >> i) & 1 == 1
    }

    /// Store a value; non-finite values are recorded as invalid.
    pub fn set(&mut self, i: usize, value: f64) {
        if value.is_finite() {
            self.values[i] = value;
            self.valid |= 1 << i;
        } else {
            self.invalidate(i);
        }
    }

    pub fn set_opt(&mut self, i: usize, value: Option<f64>) {
        match value {
            Some(v) => self.set(i, v),
            None => self.invalidate(i),
        }
    }

    pub fn set_feature(&mut self, f: Feature, value: Option<f64>) {
        self.set_opt(f.index(), value);
    }

    pub fn mark_clamped(&mut self, i: usize) {
        self.clamped |= 1 << i;
    }

    pub fn invalidate(&mut self, i: usize) {
        self.values[i] = f64::NAN;
        self.valid &= !(1 << i);
        self.clamped &= !(1 << i);
    }

    pub fn valid_bitmask(&self) -> u64 {
        self.valid
    }

    pub fn clamped_bitmask(&self) -> u64 {
        self.clamped
    }

    pub fn valid_count(&self) -> usize {
        self.valid.count_ones() as usize
    }

    pub fn all_valid(&self) -> bool {
        self.valid_count() == N_FEATURES
    }

    /// Raw payload (NaN where invalid).
    pub fn values(&self) -> &[f64; N_FEATURES] {
        &self.values
    }

    /// Left and right features exchanged; globals untouched.
    pub fn swapped_sides(&self) -> MeasurementSet {
        let mut out = MeasurementSet::new(self.id.clone(), self.units);
        for i in 0..N_FEATURES {
            let j = Feature::from_index(i).unwrap().mirrored().index();
            out.set_opt(j, self.get(i));
            if self.is_clamped(i) {
                out.mark_clamped(j);
            }
        }
        out
    }
}

/// Equality ignores the payload of invalid slots.
impl PartialEq for MeasurementSet {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.units == other.units
            && self.valid == other.valid
            && self.clamped == other.clamped
            && (0..N_FEATURES).all(|i| self.get(i) == other.get(i))
    }
}

/// Convert a pixel-unit set to millimetres.
///
/// Linear per-side features use their own eye's scale; the four global
/// distances use the mean of both scales. Tilt and area ratio are copied.
/// A missing scale invalidates every feature that depends on it.
pub fn to_mm(
    set: &MeasurementSet,
    scale_right: Option<Scale>,
    scale_left: Option<Scale>,
) -> Result<MeasurementSet> {
    if set.units != Units::Px {
        return Err(Error::Invalid("to_mm expects a pixel-unit set".into()));
    }
    let mut out = MeasurementSet::new(set.id.clone(), Units::Mm);
    let global_scale = match (scale_right, scale_left) {
        (Some(r), Some(l)) => Some(0.5 * (r.mm_per_px() + l.mm_per_px())),
        _ => None,
    };
    for i in 0..N_FEATURES {
        let factor = match Feature::from_index(i).unwrap() {
            Feature::Side(_, f) if f.is_dimensionless() => Some(1.0),
            Feature::Side(EyeSide::Right, _) => scale_right.map(|s| s.mm_per_px()),
            Feature::Side(EyeSide::Left, _) => scale_left.map(|s| s.mm_per_px()),
            Feature::Global(_) => global_scale,
        };
        out.set_opt(i, set.get(i).zip(factor).map(|(v, k)| v * k));
        if set.is_clamped(i) && out.is_valid(i) {
            out.mark_clamped(i);
        }
    }
    Ok(out)
}

pub fn csv_header() -> Vec<String> {
    let mut h = vec!["id".to_string(), "units".to_string()];
    h.extend(feature_registry());
    h.push("valid_bitmask".to_string());
    h
}

/// Write measurement rows: `id,units,<36 features>,valid_bitmask`.
///
/// Values use six decimals; invalid features are left empty.
pub fn write_measurements_csv<W: Write>(out: W, sets: &[MeasurementSet]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(csv_header())?;
    for s in sets {
        let mut rec = Vec::with_capacity(N_FEATURES + 3);
        rec.push(s.id.clone());
        rec.push(s.units.as_str().to_string());
        for i in 0..N_FEATURES {
            rec.push(match s.get(i) {
                Some(v) => format!("{v:.6}"),
                None => String::new(),
            });
        }
        rec.push(s.valid_bitmask().to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

pub fn read_measurements_csv<R: Read>(input: R) -> Result<Vec<MeasurementSet>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != csv_header() {
        return Err(Error::Csv(
            "measurement header does not match the registry".into(),
        ));
    }
    let mut sets = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let units = Units::parse(&rec[1])?;
        let mut s = MeasurementSet::new(&rec[0], units);
        let mask: u64 = rec[N_FEATURES + 2]
            .parse()
            .map_err(|_| Error::Csv(format!("row {}: bad valid_bitmask", row + 1)))?;
        for i in 0..N_FEATURES {
            let field = &rec[i + 2];
            let flagged = (mask >> i) & 1 == 1;
            if field.is_empty() {
                if flagged {
                    return Err(Error::Csv(format!(
                        "row {}: feature {} flagged valid but empty",
                        row + 1,
                        i
                    )));
                }
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Csv(format!("row {}: bad number '{field}'", row + 1)))?;
            if flagged {
                s.set(i, v);
            }
        }
        sets.push(s);
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_36_bilateral_names() {
        let reg = feature_registry();
        assert_eq!(reg.len(), 36);
        assert!(reg.contains(&"right_mrd1".to_string()));
        assert!(reg.contains(&"left_mrd1".to_string()));
        assert_eq!(reg, feature_registry());
        for (i, name) in reg.iter().enumerate() {
            assert_eq!(feature_index(name), Some(i));
        }
    }

    #[test]
    fn index_roundtrip_and_mirror() {
        for i in 0..N_FEATURES {
            let f = Feature::from_index(i).unwrap();
            assert_eq!(f.index(), i);
            assert_eq!(f.mirrored().mirrored(), f);
        }
        assert!(Feature::from_index(36).is_none());
    }

    #[test]
    fn scale_from_iris() {
        let s = Scale::from_iris_diameter(117.1).unwrap();
        assert!((s.mm_per_px() - 0.1).abs() < 1e-12);
        assert!(Scale::from_iris_diameter(0.0).is_err());
        assert!(Scale::from_iris_diameter(f64::NAN).is_err());
    }

    #[test]
    fn mm_conversion_rules() {
        let mut px = MeasurementSet::new("f", Units::Px);
        let mrd1 = Feature::Side(EyeSide::Right, SideFeature::Mrd1).index();
        let tilt = Feature::Side(EyeSide::Right, SideFeature::CanthalTilt).index();
        let left_mrd1 = Feature::Side(EyeSide::Left, SideFeature::Mrd1).index();
        let icd = Feature::Global(GlobalFeature::InnerCanthal).index();
        px.set(mrd1, 30.0);
        px.set(tilt, 5.0);
        px.set(left_mrd1, 30.0);
        px.set(icd, 100.0);
        let r = Scale::from_iris_diameter(100.0).unwrap();
        let l = Scale::from_iris_diameter(117.1).unwrap();
        let mm = to_mm(&px, Some(r), Some(l)).unwrap();
        assert!((mm.get(mrd1).unwrap() - 3.513).abs() < 1e-12);
        assert_eq!(mm.get(tilt), Some(5.0));
        assert!((mm.get(left_mrd1).unwrap() - 3.0).abs() < 1e-12);
        assert!((mm.get(icd).unwrap() - 100.0 * 0.5 * (0.1171 + 0.1)).abs() < 1e-12);

        let mm = to_mm(&px, Some(r), None).unwrap();
        assert!(mm.get(left_mrd1).is_none());
        assert!(mm.get(icd).is_none());
        assert_eq!(mm.get(tilt), Some(5.0));
        assert!(to_mm(&mm, Some(r), Some(l)).is_err());
    }

    #[test]
    fn invalid_is_not_zero() {
        let mut s = MeasurementSet::new("x", Units::Px);
        s.set(3, 1.5);
        s.set(4, f64::INFINITY);
        assert_eq!(s.get(3), Some(1.5));
        assert_eq!(s.get(4), None);
        assert_eq!(s.valid_bitmask(), 1 << 3);
        s.invalidate(3);
        assert_eq!(s.valid_count(), 0);
    }

    #[test]
    fn csv_layout() {
        let mut s = MeasurementSet::new("face_1", Units::Mm);
        s.set(0, 1.0);
        s.set(35, 2.25);
        let mut buf = Vec::new();
        write_measurements_csv(&mut buf, &[s.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("id,units,right_mrd1,right_mrd2,"));
        assert!(header.ends_with(",vertical_dystopia,valid_bitmask"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("face_1,mm,1.000000,,"));
        assert!(row.ends_with(&format!(",2.250000,{}", (1u64 << 35) | 1)));
        let back = read_measurements_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![s]);
    }

    #[test]
    fn csv_rejects_foreign_header() {
        let bad = "id,units,foo\nx,px,1\n";
        assert!(read_measurements_csv(bad.as_bytes()).is_err());
    }
}
