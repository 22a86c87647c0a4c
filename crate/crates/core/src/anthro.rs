//! Periorbital measurement engine.
//!
//! Masks are reduced to a handful of geometric anchors per eye (iris centre
//! and visible diameter, canthi, degree-4 lid margins, cleaned brow) and all
//! 36 features are derived from those anchors.
//!
//! Pixel-centre anchors are turned into physical boundaries where a distance
//! spans a mask edge: a lid margin lies half a pixel outside the extreme
//! fissure pixel of its column, and a canthal corner lies half a pixel beyond
//! the extreme sclera column. Without this, widths and fissure heights come
//! out one pixel short on average.

use crate::error::{Error, Result};
use crate::features::{to_mm, Feature, GlobalFeature, MeasurementSet, Scale, SideFeature, Units};
use crate::mask::{EyeRecord, EyeSide, FaceRecord, Point, RasterMask};
use crate::maskgeom::{
    canthi, fit_iris, fit_margins, largest_component, Canthi, IrisFit, MarginKind, MarginPoly,
};
use crate::prep::axis_from_landmarks;

/// The face's vertical line: starts at the nasion, points toward the
/// hairline midpoint (image "up" for an upright face).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacialAxis {
    pub origin: Point,
    pub direction: Point,
}

impl FacialAxis {
    pub fn through(origin: Point, toward: Point) -> Result<FacialAxis> {
        let d = toward - origin;
        let n = d.norm();
        if !(n.is_finite() && n > 1e-9) {
            return Err(Error::Degenerate("facial axis points coincide"));
        }
        Ok(FacialAxis {
            origin,
            direction: d.scale(1.0 / n),
        })
    }

    /// Image-vertical axis through `origin`.
    pub fn vertical(origin: Point) -> FacialAxis {
        FacialAxis {
            origin,
            direction: Point::new(0.0, -1.0),
        }
    }

    /// Unit vector perpendicular to the axis.
    pub fn horizontal(&self) -> Point {
        Point::new(-self.direction.y, self.direction.x)
    }

    /// Signed position of `p` along the axis (positive toward the hairline).
    pub fn project(&self, p: Point) -> f64 {
        (p - self.origin).dot(self.direction)
    }

    /// Angle between the axis and image-vertical, degrees.
    pub fn tilt_from_vertical_deg(&self) -> f64 {
        self.direction.x.atan2(-self.direction.y).to_degrees()
    }
}

/// A distance that was negative and reported as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub clamped: bool,
}

impl Clamped {
    fn from_raw(raw: f64) -> Clamped {
        if raw < 0.0 {
            Clamped {
                value: 0.0,
                clamped: true,
            }
        } else {
            Clamped {
                value: raw,
                clamped: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mrd {
    One,
    Two,
}

/// Geometric anchors of one eye.
#[derive(Debug, Clone)]
pub struct EyeGeometry {
    pub side: EyeSide,
    pub iris: Option<IrisFit>,
    /// Extreme sclera pixels (pixel centres).
    pub canthi: Option<Canthi>,
    pub margins: Option<(MarginPoly, MarginPoly)>,
    pub sclera_area: usize,
    pub iris_area: usize,
    pub brow: Option<RasterMask>,
}

impl EyeGeometry {
    pub fn analyze(eye: &EyeRecord) -> EyeGeometry {
        let iris_clean = largest_component(&eye.iris).ok();
        let iris_fit = iris_clean.as_ref().and_then(|m| fit_iris(m).ok());

        // The fissure is the eye opening; cleaning it (rather than the sclera
        // alone) keeps both scleral triangles when the iris spans the lids.
        let fissure = match &iris_clean {
            Some(ic) => eye.sclera.union(ic).ok(),
            None => Some(eye.sclera.clone()),
        }
        .and_then(|u| largest_component(&u).ok());

        let sclera_clean = fissure
            .as_ref()
            .and_then(|f| eye.sclera.intersection(f).ok())
            .filter(|s| !s.is_empty());

        EyeGeometry {
            side: eye.side,
            iris: iris_fit,
            canthi: sclera_clean.as_ref().and_then(|s| canthi(s, eye.side).ok()),
            margins: fissure.as_ref().and_then(|f| fit_margins(f).ok()),
            sclera_area: sclera_clean.as_ref().map_or(0, RasterMask::count),
            iris_area: iris_clean.as_ref().map_or(0, RasterMask::count),
            brow: largest_component(&eye.brow).ok(),
        }
    }

    /// Canthal corners: the canthi pushed half a pixel outward to the mask edge.
    pub fn corners(&self) -> Option<Canthi> {
        self.canthi.map(|c| {
            let s = self.side.medial_sign();
            Canthi {
                medial: Point::new(c.medial.x + 0.5 * s, c.medial.y),
                lateral: Point::new(c.lateral.x - 0.5 * s, c.lateral.y),
            }
        })
    }

    fn iris_and_margins(&self) -> Result<(IrisFit, &MarginPoly, &MarginPoly)> {
        let iris = self.iris.ok_or(Error::EmptyMask)?;
        let (sup, inf) = self
            .margins
            .as_ref()
            .ok_or(Error::Degenerate("no lid margin fit"))?;
        Ok((iris, sup, inf))
    }

    /// Lid position (outer pixel edge) above and below the iris centre.
    fn lids_at_iris(&self) -> Result<(IrisFit, f64, f64)> {
        let (iris, sup, inf) = self.iris_and_margins()?;
        let x = iris.center.x;
        Ok((iris, sup.eval(x)? - 0.5, inf.eval(x)? + 0.5))
    }

    pub fn mrd(&self, which: Mrd) -> Result<Clamped> {
        let (iris, upper, lower) = self.lids_at_iris()?;
        Ok(Clamped::from_raw(match which {
            Mrd::One => iris.center.y - upper,
            Mrd::Two => lower - iris.center.y,
        }))
    }

    /// Sclera visible between the iris rim and the lid; zero when the lid
    /// overlaps the iris.
    pub fn scleral_show(&self, which: MarginKind) -> Result<f64> {
        let (iris, upper, lower) = self.lids_at_iris()?;
        let r = 0.5 * iris.diameter_px;
        Ok(match which {
            MarginKind::Inferior => (lower - (iris.center.y + r)).max(0.0),
            MarginKind::Superior => ((iris.center.y - r) - upper).max(0.0),
        })
    }

    pub fn scleral_area_ratio(&self) -> Result<f64> {
        if self.iris_area == 0 {
            return Err(Error::EmptyMask);
        }
        if self.sclera_area == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(self.sclera_area as f64 / self.iris_area as f64)
    }

    /// Six brow heights: superior then inferior, each medial/central/lateral.
    pub fn brow_heights(&self) -> [Option<f64>; 6] {
        let (Some(brow), Some(c), Some(iris)) = (&self.brow, self.corners(), self.iris) else {
            return [None; 6];
        };
        brow_heights(brow, c.medial, iris.center, c.lateral)
    }
}

/// Topmost/bottommost brow rows at a possibly fractional column, linearly
/// interpolated between the two neighbouring columns.
fn brow_extent_at(brow: &RasterMask, x: f64) -> Option<(f64, f64)> {
    if !(x.is_finite() && x >= 0.0 && x <= (brow.width() - 1) as f64) {
        return None;
    }
    let x0 = x.floor();
    let f = x - x0;
    let e0 = brow.column_extent(x0 as usize)?;
    if f == 0.0 {
        return Some((e0.0 as f64, e0.1 as f64));
    }
    let e1 = brow.column_extent(x0 as usize + 1)?;
    let lerp = |a: usize, b: usize| (1.0 - f) * a as f64 + f * b as f64;
    Some((lerp(e0.0, e1.0), lerp(e0.1, e1.1)))
}

/// Brow heights above three reference points.
///
/// For each reference the brow is sampled in the reference's own column;
/// superior height = ref.y − topmost brow row, inferior = ref.y − bottommost
/// brow row. A column without brow pixels yields `None` for both.
/// Output order: sup medial, sup central, sup lateral, inf medial, inf
/// central, inf lateral.
pub fn brow_heights(
    brow: &RasterMask,
    medial: Point,
    iris_center: Point,
    lateral: Point,
) -> [Option<f64>; 6] {
    let mut out = [None; 6];
    for (k, p) in [medial, iris_center, lateral].into_iter().enumerate() {
        if let Some((top, bottom)) = brow_extent_at(brow, p.x) {
            out[k] = Some(p.y - top);
            out[k + 3] = Some(p.y - bottom);
        }
    }
    out
}

pub fn mrd(eye: &EyeRecord, which: Mrd) -> Result<Clamped> {
    EyeGeometry::analyze(eye).mrd(which)
}

pub fn scleral_show(eye: &EyeRecord, which: MarginKind) -> Result<f64> {
    EyeGeometry::analyze(eye).scleral_show(which)
}

pub fn scleral_area_ratio(eye: &EyeRecord) -> Result<f64> {
    EyeGeometry::analyze(eye).scleral_area_ratio()
}

/// Vertical fissure (MRD1 + MRD2) and horizontal fissure (corner to corner).
pub fn palpebral_fissure(mrd1: f64, mrd2: f64, corners: &Canthi) -> (f64, f64) {
    (mrd1 + mrd2, (corners.medial.x - corners.lateral.x).abs())
}

/// Inner canthal, outer canthal and interpupillary distances (horizontal).
pub fn intercanthal(
    right: &EyeGeometry,
    left: &EyeGeometry,
) -> (Option<f64>, Option<f64>, Option<f64>) {
    let (rc, lc) = (right.corners(), left.corners());
    let icd = rc.zip(lc).map(|(r, l)| (l.medial.x - r.medial.x).abs());
    let ocd = rc.zip(lc).map(|(r, l)| (l.lateral.x - r.lateral.x).abs());
    let ipd = right
        .iris
        .zip(left.iris)
        .map(|(r, l)| (l.center.x - r.center.x).abs());
    (icd, ocd, ipd)
}

/// Angle of the medial→lateral corner line against the facial horizontal,
/// positive when the lateral corner is superior.
pub fn canthal_tilt(corners: &Canthi, axis: &FacialAxis) -> Result<f64> {
    let v = corners.lateral - corners.medial;
    let up = v.dot(axis.direction);
    let across = v.dot(axis.horizontal()).abs();
    if up.abs() < 1e-12 && across < 1e-12 {
        return Err(Error::Degenerate("coincident canthi"));
    }
    Ok(up.atan2(across).to_degrees())
}

/// Distance between the feet of the two medial corners on the facial axis.
pub fn vertical_dystopia(right_medial: Point, left_medial: Point, axis: &FacialAxis) -> f64 {
    (axis.project(right_medial) - axis.project(left_medial)).abs()
}

/// Signed perpendicular distance from `p` to the line through both iris
/// centres; positive above the line (toward the hairline).
pub fn height_above_iris_line(
    p: Point,
    right_iris: Point,
    left_iris: Point,
    axis: &FacialAxis,
) -> Result<f64> {
    let d = left_iris - right_iris;
    let n = d.norm();
    if n < 1e-9 {
        return Err(Error::Degenerate("coincident iris centres"));
    }
    let mut normal = Point::new(-d.y / n, d.x / n);
    if normal.dot(axis.direction) < 0.0 {
        normal = normal.scale(-1.0);
    }
    Ok((p - right_iris).dot(normal))
}

/// Medial and lateral canthal heights of both eyes:
/// `[right medial, right lateral, left medial, left lateral]`.
pub fn canthal_heights(
    right: &EyeGeometry,
    left: &EyeGeometry,
    axis: &FacialAxis,
) -> [Option<f64>; 4] {
    let (Some(ri), Some(li)) = (right.iris, left.iris) else {
        return [None; 4];
    };
    let h = |c: Option<Canthi>, medial: bool| {
        c.and_then(|c| {
            let p = if medial { c.medial } else { c.lateral };
            height_above_iris_line(p, ri.center, li.center, axis).ok()
        })
    };
    [
        h(right.corners(), true),
        h(right.corners(), false),
        h(left.corners(), true),
        h(left.corners(), false),
    ]
}

#[derive(Debug, Clone)]
pub struct FaceMeasurement {
    pub px: MeasurementSet,
    pub mm: MeasurementSet,
    pub scale_right: Option<Scale>,
    pub scale_left: Option<Scale>,
}

fn put_side(set: &mut MeasurementSet, side: EyeSide, f: SideFeature, v: Option<f64>) {
    set.set_feature(Feature::Side(side, f), v);
}

fn measure_eye(set: &mut MeasurementSet, g: &EyeGeometry, axis: Option<&FacialAxis>) {
    let side = g.side;
    let mrd1 = g.mrd(Mrd::One).ok();
    let mrd2 = g.mrd(Mrd::Two).ok();
    for (f, m) in [(SideFeature::Mrd1, mrd1), (SideFeature::Mrd2, mrd2)] {
        put_side(set, side, f, m.map(|m| m.value));
        if m.is_some_and(|m| m.clamped) {
            set.mark_clamped(Feature::Side(side, f).index());
        }
    }
    put_side(
        set,
        side,
        SideFeature::InferiorScleralShow,
        g.scleral_show(MarginKind::Inferior).ok(),
    );
    put_side(
        set,
        side,
        SideFeature::SuperiorScleralShow,
        g.scleral_show(MarginKind::Superior).ok(),
    );
    let corners = g.corners();
    put_side(
        set,
        side,
        SideFeature::VerticalFissure,
        mrd1.zip(mrd2).map(|(a, b)| a.value + b.value),
    );
    put_side(
        set,
        side,
        SideFeature::HorizontalFissure,
        corners.map(|c| (c.medial.x - c.lateral.x).abs()),
    );
    put_side(
        set,
        side,
        SideFeature::CanthalTilt,
        corners
            .zip(axis)
            .and_then(|(c, a)| canthal_tilt(&c, a).ok()),
    );
    put_side(
        set,
        side,
        SideFeature::ScleralAreaRatio,
        g.scleral_area_ratio().ok(),
    );
    for (f, v) in SideFeature::BROW.iter().zip(g.brow_heights()) {
        put_side(set, side, *f, v);
    }
}

/// Measure all 36 features of a face in pixels and millimetres.
///
/// Missing or unmeasurable anatomy invalidates the affected features only.
pub fn measure_face(face: &FaceRecord) -> FaceMeasurement {
    let right = EyeGeometry::analyze(&face.right);
    let left = EyeGeometry::analyze(&face.left);
    measure_geometry(&face.id, &right, &left, face)
}

pub(crate) fn measure_geometry(
    id: &str,
    right: &EyeGeometry,
    left: &EyeGeometry,
    face: &FaceRecord,
) -> FaceMeasurement {
    let axis = axis_from_landmarks(face.landmarks.nasion, face.landmarks.hairline_mid).ok();
    let mut px = MeasurementSet::new(id, Units::Px);
    measure_eye(&mut px, right, axis.as_ref());
    measure_eye(&mut px, left, axis.as_ref());

    let (icd, ocd, ipd) = intercanthal(right, left);
    px.set_feature(Feature::Global(GlobalFeature::InnerCanthal), icd);
    px.set_feature(Feature::Global(GlobalFeature::OuterCanthal), ocd);
    px.set_feature(Feature::Global(GlobalFeature::Interpupillary), ipd);
    let dystopia = right
        .corners()
        .zip(left.corners())
        .zip(axis.as_ref())
        .map(|((r, l), a)| vertical_dystopia(r.medial, l.medial, a));
    px.set_feature(Feature::Global(GlobalFeature::VerticalDystopia), dystopia);

    let heights = match axis.as_ref() {
        Some(a) => canthal_heights(right, left, a),
        None => [None; 4],
    };
    let slots = [
        (EyeSide::Right, SideFeature::MedialCanthalHeight),
        (EyeSide::Right, SideFeature::LateralCanthalHeight),
        (EyeSide::Left, SideFeature::MedialCanthalHeight),
        (EyeSide::Left, SideFeature::LateralCanthalHeight),
    ];
    for ((side, f), h) in slots.into_iter().zip(heights) {
        put_side(&mut px, side, f, h);
    }

    let scale_right = right
        .iris
        .and_then(|i| Scale::from_iris_diameter(i.diameter_px).ok());
    let scale_left = left
        .iris
        .and_then(|i| Scale::from_iris_diameter(i.diameter_px).ok());
    let mm = to_mm(&px, scale_right, scale_left).expect("px set converts");
    FaceMeasurement {
        px,
        mm,
        scale_right,
        scale_left,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::N_FEATURES;
    use crate::mask::{Landmarks, MaskClass};

    const W: usize = 200;
    const H: usize = 120;

    fn ellipse(cx: f64, cy: f64, a: f64, b: f64) -> RasterMask {
        RasterMask::from_fn(W, H, MaskClass::Sclera, |x, y| {
            ((x as f64 - cx) / a).powi(2) + ((y as f64 - cy) / b).powi(2) <= 1.0
        })
    }

    fn disc(cx: f64, cy: f64, r: f64) -> RasterMask {
        RasterMask::from_fn(W, H, MaskClass::Iris, |x, y| {
            (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r
        })
    }

    /// Fissure ellipse with an iris disc clipped to it.
    fn eye(
        side: EyeSide,
        fissure: &RasterMask,
        iris_disc: &RasterMask,
        brow: RasterMask,
    ) -> EyeRecord {
        let iris = fissure.intersection(iris_disc).unwrap();
        let sclera = RasterMask::from_fn(W, H, MaskClass::Sclera, |x, y| {
            fissure.get(x, y) && !iris.get(x, y)
        });
        EyeRecord::new(side, sclera, iris, brow, "e").unwrap()
    }

    fn no_brow() -> RasterMask {
        RasterMask::empty(W, H, MaskClass::Brow)
    }

    #[test]
    fn mrd_on_centered_ellipse() {
        let f = ellipse(100.5, 60.5, 50.0, 20.0);
        let e = eye(EyeSide::Right, &f, &disc(100.5, 60.5, 15.0), no_brow());
        let m1 = mrd(&e, Mrd::One).unwrap();
        let m2 = mrd(&e, Mrd::Two).unwrap();
        assert!((m1.value - 20.0).abs() <= 1.0, "{m1:?}");
        assert!((m2.value - 20.0).abs() <= 1.0, "{m2:?}");
        assert!(!m1.clamped);
    }

    #[test]
    fn mrd_with_raised_iris() {
        // iris centre 5 px above the fissure centre, fully visible
        let f = ellipse(100.5, 60.5, 50.0, 20.0);
        let e = eye(EyeSide::Left, &f, &disc(100.5, 55.5, 10.0), no_brow());
        let m1 = mrd(&e, Mrd::One).unwrap().value;
        let m2 = mrd(&e, Mrd::Two).unwrap().value;
        assert!((m1 - 15.0).abs() <= 1.0, "{m1}");
        assert!((m2 - 25.0).abs() <= 1.0, "{m2}");
    }

    #[test]
    fn mrd_clamps_when_lid_crosses_iris_centre() {
        // iris detached above a thin fissure band: the lid is below its centre
        let band = RasterMask::from_fn(W, H, MaskClass::Sclera, |x, y| {
            (40..160).contains(&x) && (70..80).contains(&y)
        });
        let iris = disc(100.0, 40.0, 8.0);
        let e = EyeRecord::new(EyeSide::Right, band, iris, no_brow(), "e").unwrap();
        let m1 = mrd(&e, Mrd::One).unwrap();
        assert_eq!(m1.value, 0.0);
        assert!(m1.clamped);
    }

    #[test]
    fn scleral_show_examples() {
        // inferior lid 20 px below the iris centre, iris radius 15
        let f = ellipse(100.5, 60.5, 50.0, 20.0);
        let e = eye(EyeSide::Right, &f, &disc(100.5, 60.5, 15.0), no_brow());
        let iss = scleral_show(&e, MarginKind::Inferior).unwrap();
        let sss = scleral_show(&e, MarginKind::Superior).unwrap();
        assert!((iss - 5.0).abs() <= 1.0, "{iss}");
        assert!((sss - 5.0).abs() <= 1.0, "{sss}");

        // lids overlapping the iris rim on both sides
        let f = ellipse(100.5, 60.5, 50.0, 12.0);
        let e = eye(EyeSide::Right, &f, &disc(100.5, 60.5, 16.0), no_brow());
        assert_eq!(scleral_show(&e, MarginKind::Inferior).unwrap(), 0.0);
        assert_eq!(scleral_show(&e, MarginKind::Superior).unwrap(), 0.0);
    }

    #[test]
    fn palpebral_fissure_examples() {
        let c = Canthi {
            medial: Point::new(40.0, 10.0),
            lateral: Point::new(5.0, 10.0),
        };
        assert_eq!(palpebral_fissure(20.0, 20.0, &c), (40.0, 35.0));
        assert_eq!(palpebral_fissure(0.0, 0.0, &c).0, 0.0);
    }

    #[test]
    fn tilt_examples() {
        let axis = FacialAxis::vertical(Point::new(100.0, 100.0));
        let flat = Canthi {
            medial: Point::new(40.0, 10.0),
            lateral: Point::new(5.0, 10.0),
        };
        assert_eq!(canthal_tilt(&flat, &axis).unwrap(), 0.0);
        let up = Canthi {
            medial: Point::new(40.0, 20.0),
            lateral: Point::new(30.0, 10.0),
        };
        assert!((canthal_tilt(&up, &axis).unwrap() - 45.0).abs() < 1e-12);
        let mirrored = Canthi {
            medial: Point::new(160.0, 20.0),
            lateral: Point::new(170.0, 10.0),
        };
        assert_eq!(
            canthal_tilt(&mirrored, &axis).unwrap(),
            canthal_tilt(&up, &axis).unwrap()
        );
        let same = Canthi {
            medial: Point::new(1.0, 1.0),
            lateral: Point::new(1.0, 1.0),
        };
        assert!(canthal_tilt(&same, &axis).is_err());
    }

    #[test]
    fn dystopia_examples() {
        let axis = FacialAxis::vertical(Point::new(100.0, 100.0));
        assert_eq!(
            vertical_dystopia(Point::new(80.0, 50.0), Point::new(120.0, 50.0), &axis),
            0.0
        );
        assert_eq!(
            vertical_dystopia(Point::new(80.0, 44.0), Point::new(120.0, 50.0), &axis),
            6.0
        );
    }

    #[test]
    fn canthal_height_examples() {
        let axis = FacialAxis::vertical(Point::new(100.0, 100.0));
        let (r, l) = (Point::new(50.0, 60.0), Point::new(150.0, 60.0));
        assert_eq!(
            height_above_iris_line(Point::new(80.0, 60.0), r, l, &axis).unwrap(),
            0.0
        );
        assert_eq!(
            height_above_iris_line(Point::new(80.0, 53.0), r, l, &axis).unwrap(),
            7.0
        );
        // slope-1 line (image coordinates), point at perpendicular distance 5
        let (r, l) = (Point::new(0.0, 0.0), Point::new(10.0, 10.0));
        let s = 5.0 / 2f64.sqrt();
        let p = Point::new(5.0 + s, 5.0 - s);
        assert!((height_above_iris_line(p, r, l, &axis).unwrap() - 5.0).abs() < 1e-6);
        assert!(height_above_iris_line(p, r, r, &axis).is_err());
    }

    #[test]
    fn brow_band_heights() {
        let brow = RasterMask::from_fn(W, H, MaskClass::Brow, |x, y| {
            (20..90).contains(&x) && (10..=20).contains(&y)
        });
        let h = brow_heights(
            &brow,
            Point::new(80.0, 62.0),
            Point::new(50.0, 60.0),
            Point::new(95.0, 61.0),
        );
        assert_eq!(h[1], Some(50.0));
        assert_eq!(h[4], Some(40.0));
        assert_eq!(h[0], Some(52.0));
        // lateral column has no brow
        assert_eq!(h[2], None);
        assert_eq!(h[5], None);
        // half-integer column interpolates its neighbours
        let h = brow_heights(
            &brow,
            Point::new(80.0, 62.0),
            Point::new(19.5, 60.0),
            Point::new(30.0, 61.0),
        );
        assert_eq!(h[1], None);
        let h = brow_heights(
            &brow,
            Point::new(80.0, 62.0),
            Point::new(50.5, 60.0),
            Point::new(30.0, 61.0),
        );
        assert_eq!(h[1], Some(50.0));
    }

    #[test]
    fn area_ratio_examples() {
        let sclera = RasterMask::from_fn(W, H, MaskClass::Sclera, |x, y| x < 30 && y < 10);
        let iris = RasterMask::from_fn(W, H, MaskClass::Iris, |x, y| {
            (30..40).contains(&x) && y < 10
        });
        let e = EyeRecord::new(EyeSide::Right, sclera, iris, no_brow(), "e").unwrap();
        assert_eq!(scleral_area_ratio(&e).unwrap(), 3.0);
        let sclera = RasterMask::from_fn(W, H, MaskClass::Sclera, |x, y| x < 10 && y < 10);
        let iris = RasterMask::from_fn(W, H, MaskClass::Iris, |x, y| {
            (10..20).contains(&x) && y < 10
        });
        let e = EyeRecord::new(EyeSide::Right, sclera.clone(), iris, no_brow(), "e").unwrap();
        assert_eq!(scleral_area_ratio(&e).unwrap(), 1.0);
        let e = EyeRecord::new(
            EyeSide::Right,
            sclera,
            RasterMask::empty(W, H, MaskClass::Iris),
            no_brow(),
            "e",
        )
        .unwrap();
        assert!(scleral_area_ratio(&e).is_err());
    }

    #[test]
    fn missing_brow_only_invalidates_brow() {
        let band = |x0: usize| {
            RasterMask::from_fn(W, H, MaskClass::Brow, move |x, y| {
                (x0..x0 + 80).contains(&x) && (8..16).contains(&y)
            })
        };
        let fr = ellipse(55.0, 60.0, 35.0, 12.0);
        let fl = ellipse(145.0, 60.0, 35.0, 12.0);
        let right = eye(EyeSide::Right, &fr, &disc(55.0, 59.0, 14.0), band(15));
        let left = eye(EyeSide::Left, &fl, &disc(145.0, 59.0, 14.0), no_brow());
        let lm = Landmarks {
            nasion: Point::new(100.0, 62.0),
            hairline_mid: Point::new(100.0, 1.0),
        };
        let face = FaceRecord::new("f", right, left, lm, (W, H)).unwrap();
        let m = measure_face(&face);
        assert_eq!(m.px.valid_count(), N_FEATURES - 6);
        for f in SideFeature::BROW {
            assert!(m.px.side(EyeSide::Left, f).is_none());
            assert!(m.px.side(EyeSide::Right, f).is_some());
        }
        let mrd1 = m.px.side(EyeSide::Right, SideFeature::Mrd1).unwrap();
        let mrd2 = m.px.side(EyeSide::Right, SideFeature::Mrd2).unwrap();
        assert_eq!(
            m.px.side(EyeSide::Right, SideFeature::VerticalFissure)
                .unwrap(),
            mrd1 + mrd2
        );
        let icd = m.px.global(GlobalFeature::InnerCanthal).unwrap();
        let ocd = m.px.global(GlobalFeature::OuterCanthal).unwrap();
        assert!(icd <= ocd);
        let scale = m.scale_right.unwrap().mm_per_px();
        let mm = m.mm.side(EyeSide::Right, SideFeature::Mrd1).unwrap();
        assert!((mm - mrd1 * scale).abs() <= 1e-12 * mm.abs());
    }

    #[test]
    fn axis_geometry() {
        let a = FacialAxis::through(Point::new(100.0, 200.0), Point::new(100.0, 50.0)).unwrap();
        assert_eq!(a.direction, Point::new(0.0, -1.0));
        assert_eq!(a.tilt_from_vertical_deg(), 0.0);
        assert!(FacialAxis::through(Point::new(1.0, 1.0), Point::new(1.0, 1.0)).is_err());
    }
}
