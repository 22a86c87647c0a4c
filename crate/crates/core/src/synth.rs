//! Synthetic faces with analytically known measurements.
//!
//! Each eye is a rotated ellipse (the palpebral fissure) with a circular
//! iris clipped to it; the brow is a band of whole pixel rows per column.
//! The ground truth is computed from the shape parameters alone, never from
//! the rendered masks, so it can serve as an oracle for the extractor.
//!
//! Truth conventions, all in the upright face frame:
//! - canthal corners are the extreme-x points of the ellipse;
//! - the iris centre is the centre of the visible iris extent and its
//!   diameter is the disc diameter (the generator keeps the disc's
//!   horizontal extremes inside the fissure);
//! - lid positions are the ellipse boundary in the iris-centre column;
//! - brow rows are linearly interpolated between neighbouring columns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::Label;
use crate::error::{Error, Result};
use crate::features::{Feature, GlobalFeature, MeasurementSet, SideFeature, Units};
use crate::mask::{EyeRecord, EyeSide, FaceRecord, Landmarks, MaskClass, Point, RasterMask};
use crate::prep::RigidTransform;

pub const IMAGE_WIDTH: usize = 520;
pub const IMAGE_HEIGHT: usize = 320;
const MIDLINE_X: f64 = 260.0;
const EYE_LEVEL_Y: f64 = 160.0;
const NASION: Point = Point::new(MIDLINE_X, 175.0);
const HAIRLINE: Point = Point::new(MIDLINE_X, 15.0);
/// Pixels kept free around every shape.
const BORDER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrowParams {
    /// Vertical distance from the fissure centre up to the brow's lower
    /// edge at its peak column.
    pub gap: f64,
    /// Rows per column.
    pub thickness: usize,
    /// Curvature of the lower edge, px⁻¹ (`y += arc * dx²`).
    pub arc: f64,
    /// Peak column offset from the fissure centre, toward lateral.
    pub peak_offset: f64,
    /// Columns of brow beyond each canthal corner.
    pub overhang: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeParams {
    /// Fissure ellipse centre.
    pub center: Point,
    /// Semi-axes along and across the fissure.
    pub a: f64,
    pub b: f64,
    pub iris_radius: f64,
    /// Iris centre relative to the fissure centre (image axes).
    pub iris_offset: Point,
    /// Fissure rotation, positive when the lateral end is higher.
    pub tilt_deg: f64,
    pub brow: BrowParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceParams {
    pub id: String,
    pub image_size: (usize, usize),
    pub nasion: Point,
    pub hairline_mid: Point,
    /// Whole-face rotation about the nasion, degrees (image convention).
    pub rotation_deg: f64,
    pub right: EyeParams,
    pub left: EyeParams,
}

/// Rotated ellipse.
#[derive(Debug, Clone, Copy)]
struct Ellipse {
    c: Point,
    a: f64,
    b: f64,
    cos: f64,
    sin: f64,
}

impl Ellipse {
    fn new(c: Point, a: f64, b: f64, phi_deg: f64) -> Self {
        let (sin, cos) = phi_deg.to_radians().sin_cos();
        Self { c, a, b, cos, sin }
    }

    /// Normalised radius²: ≤ 1 inside.
    fn level(&self, p: Point) -> f64 {
        let d = p - self.c;
        let u = d.x * self.cos + d.y * self.sin;
        let v = -d.x * self.sin + d.y * self.cos;
        (u / self.a).powi(2) + (v / self.b).powi(2)
    }

    /// `(top, bottom)` boundary rows in column `x`.
    fn y_range_at(&self, x: f64) -> Option<(f64, f64)> {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let (c, s) = (self.cos, self.sin);
        let dx = x - self.c.x;
        let qa = s * s / a2 + c * c / b2;
        let qb = 2.0 * dx * c * s * (1.0 / a2 - 1.0 / b2);
        let qc = dx * dx * (c * c / a2 + s * s / b2) - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        Some((
            self.c.y + (-qb - r) / (2.0 * qa),
            self.c.y + (-qb + r) / (2.0 * qa),
        ))
    }

    /// Points of largest and smallest x.
    fn x_extremes(&self) -> (Point, Point) {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let xe = (a2 * self.cos * self.cos + b2 * self.sin * self.sin).sqrt();
        let ye = (a2 - b2) * self.sin * self.cos / xe;
        (
            Point::new(self.c.x + xe, self.c.y + ye),
            Point::new(self.c.x - xe, self.c.y - ye),
        )
    }

    fn half_extent_y(&self) -> f64 {
        (self.a * self.a * self.sin * self.sin + self.b * self.b * self.cos * self.cos).sqrt()
    }

    fn area(&self) -> f64 {
        std::f64::consts::PI * self.a * self.b
    }
}

#[derive(Debug, Clone, Copy)]
struct Disc {
    c: Point,
    r: f64,
}

impl Disc {
    fn y_range_at(&self, x: f64) -> Option<(f64, f64)> {
        let h = self.r * self.r - (x - self.c.x).powi(2);
        (h >= 0.0).then(|| (self.c.y - h.sqrt(), self.c.y + h.sqrt()))
    }
}

/// Brow as explicit integer row ranges per column.
#[derive(Debug, Clone)]
struct BrowBand {
    x0: i64,
    tops: Vec<i64>,
    bottoms: Vec<i64>,
}

impl BrowBand {
    fn contains(&self, x: i64, y: i64) -> bool {
        let i = x - self.x0;
        i >= 0
            && (i as usize) < self.tops.len()
            && (self.tops[i as usize]..=self.bottoms[i as usize]).contains(&y)
    }

    /// Interpolated `(top, bottom)` at a fractional column.
    fn extent_at(&self, x: f64) -> Option<(f64, f64)> {
        let i = x - self.x0 as f64;
        if i < 0.0 || i > (self.tops.len() - 1) as f64 {
            return None;
        }
        let i0 = i.floor() as usize;
        let f = i - i0 as f64;
        let i1 = (i0 + 1).min(self.tops.len() - 1);
        let lerp = |v: &[i64]| (1.0 - f) * v[i0] as f64 + f * v[i1] as f64;
        Some((lerp(&self.tops), lerp(&self.bottoms)))
    }

    fn y_bounds(&self) -> (i64, i64) {
        (
            *self.tops.iter().min().unwrap(),
            *self.bottoms.iter().max().unwrap(),
        )
    }
}

/// Shapes of one eye in the upright frame.
struct EyeShapes {
    side: EyeSide,
    fissure: Ellipse,
    iris: Disc,
    brow: BrowBand,
}

fn fissure_phi(side: EyeSide, tilt_deg: f64) -> f64 {
    match side {
        EyeSide::Right => tilt_deg,
        EyeSide::Left => -tilt_deg,
    }
}

impl EyeShapes {
    fn new(side: EyeSide, p: &EyeParams) -> Result<EyeShapes> {
        let positive = [p.a, p.b, p.iris_radius, p.brow.gap, p.brow.overhang];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || p.brow.thickness == 0 {
            return Err(Error::Invalid("eye parameters must be positive".into()));
        }
        let fissure = Ellipse::new(p.center, p.a, p.b, fissure_phi(side, p.tilt_deg));
        let iris = Disc {
            c: p.center + p.iris_offset,
            r: p.iris_radius,
        };
        for dx in [-iris.r, iris.r] {
            if fissure.level(Point::new(iris.c.x + dx, iris.c.y)) >= 1.0 {
                return Err(Error::Invalid(
                    "iris horizontal extremes must lie inside the fissure".into(),
                ));
            }
        }
        let (hi, lo) = fissure.x_extremes();
        let s = side.medial_sign();
        let (medial_x, lateral_x) = if s > 0.0 { (hi.x, lo.x) } else { (lo.x, hi.x) };
        let x_from = (medial_x.min(lateral_x) - p.brow.overhang).floor() as i64;
        let x_to = (medial_x.max(lateral_x) + p.brow.overhang).ceil() as i64;
        let peak_x = p.center.x - s * p.brow.peak_offset;
        let mut tops = Vec::new();
        let mut bottoms = Vec::new();
        for x in x_from..=x_to {
            let lower = p.center.y - p.brow.gap + p.brow.arc * (x as f64 - peak_x).powi(2);
            let bottom = lower.round() as i64;
            bottoms.push(bottom);
            tops.push(bottom - p.brow.thickness as i64 + 1);
        }
        let brow = BrowBand {
            x0: x_from,
            tops,
            bottoms,
        };
        if brow.y_bounds().1 as f64 >= p.center.y - fissure.half_extent_y() {
            return Err(Error::Invalid("brow overlaps the fissure".into()));
        }
        Ok(EyeShapes {
            side,
            fissure,
            iris,
            brow,
        })
    }

    fn in_fissure(&self, p: Point) -> bool {
        self.fissure.level(p) <= 1.0
    }

    fn in_iris(&self, p: Point) -> bool {
        self.in_fissure(p) && (p - self.iris.c).norm() <= self.iris.r
    }

    /// Upright-frame bounding box `(min_x, min_y, max_x, max_y)`.
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let (hi, lo) = self.fissure.x_extremes();
        let hy = self.fissure.half_extent_y();
        let (bt, _) = self.brow.y_bounds();
        let bx1 = self.brow.x0 as f64 + (self.brow.tops.len() - 1) as f64;
        (
            lo.x.min(self.brow.x0 as f64),
            bt as f64,
            hi.x.max(bx1),
            self.fissure.c.y + hy,
        )
    }

    /// Visible iris column span, where both shapes overlap.
    fn visible_iris_range(&self, x: f64) -> Option<(f64, f64)> {
        let (et, eb) = self.fissure.y_range_at(x)?;
        let (ct, cb) = self.iris.y_range_at(x)?;
        let (t, b) = (et.max(ct), eb.min(cb));
        (t <= b).then_some((t, b))
    }

    /// Centre of the visible iris extent.
    fn iris_center(&self) -> Point {
        let (x0, x1) = (self.iris.c.x - self.iris.r, self.iris.c.x + self.iris.r);
        // both boundary envelopes are convex in x, so each extreme is unimodal
        let top = golden_min(x0, x1, |x| {
            self.visible_iris_range(x).map_or(f64::INFINITY, |r| r.0)
        });
        let bottom = -golden_min(x0, x1, |x| {
            self.visible_iris_range(x).map_or(f64::INFINITY, |r| -r.1)
        });
        Point::new(self.iris.c.x, 0.5 * (top + bottom))
    }

    fn visible_iris_area(&self) -> f64 {
        let n = 4000;
        let (x0, x1) = (self.iris.c.x - self.iris.r, self.iris.c.x + self.iris.r);
        let h = (x1 - x0) / n as f64;
        (0..n)
            .map(|i| {
                let x = x0 + (i as f64 + 0.5) * h;
                self.visible_iris_range(x).map_or(0.0, |(t, b)| b - t)
            })
            .sum::<f64>()
            * h
    }

    /// `(medial, lateral)` canthal corners.
    fn corners(&self) -> (Point, Point) {
        let (hi, lo) = self.fissure.x_extremes();
        if self.side.medial_sign() > 0.0 {
            (hi, lo)
        } else {
            (lo, hi)
        }
    }
}

/// Minimum value of a unimodal function on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

fn put(set: &mut MeasurementSet, side: EyeSide, f: SideFeature, v: f64) {
    set.set_feature(Feature::Side(side, f), Some(v));
}

fn eye_truth(set: &mut MeasurementSet, e: &EyeShapes) {
    let side = e.side;
    let ic = e.iris_center();
    let r = e.iris.r;
    let (top, bottom) = e
        .fissure
        .y_range_at(ic.x)
        .expect("iris centre column crosses the fissure");
    let mrd1 = (ic.y - top).max(0.0);
    let mrd2 = (bottom - ic.y).max(0.0);
    put(set, side, SideFeature::Mrd1, mrd1);
    put(set, side, SideFeature::Mrd2, mrd2);
    put(
        set,
        side,
        SideFeature::InferiorScleralShow,
        (bottom - (ic.y + r)).max(0.0),
    );
    put(
        set,
        side,
        SideFeature::SuperiorScleralShow,
        ((ic.y - r) - top).max(0.0),
    );
    put(set, side, SideFeature::VerticalFissure, mrd1 + mrd2);
    let (medial, lateral) = e.corners();
    put(
        set,
        side,
        SideFeature::HorizontalFissure,
        (medial.x - lateral.x).abs(),
    );
    let v = lateral - medial;
    put(
        set,
        side,
        SideFeature::CanthalTilt,
        (-v.y).atan2(v.x.abs()).to_degrees(),
    );
    let iris_area = e.visible_iris_area();
    put(
        set,
        side,
        SideFeature::ScleralAreaRatio,
        (e.fissure.area() - iris_area) / iris_area,
    );
    for (k, p) in [medial, ic, lateral].into_iter().enumerate() {
        if let Some((t, b)) = e.brow.extent_at(p.x) {
            put(set, side, SideFeature::BROW[k], p.y - t);
            put(set, side, SideFeature::BROW[k + 3], p.y - b);
        }
    }
}

fn face_truth(id: &str, right: &EyeShapes, left: &EyeShapes) -> MeasurementSet {
    let mut set = MeasurementSet::new(id, Units::Px);
    eye_truth(&mut set, right);
    eye_truth(&mut set, left);
    let (rm, rl) = right.corners();
    let (lm, ll) = left.corners();
    let (ri, li) = (right.iris_center(), left.iris_center());
    let g = |f| Feature::Global(f);
    set.set_feature(g(GlobalFeature::InnerCanthal), Some((lm.x - rm.x).abs()));
    set.set_feature(g(GlobalFeature::OuterCanthal), Some((ll.x - rl.x).abs()));
    set.set_feature(g(GlobalFeature::Interpupillary), Some((li.x - ri.x).abs()));
    set.set_feature(
        g(GlobalFeature::VerticalDystopia),
        Some((rm.y - lm.y).abs()),
    );
    // distance above the iris line, with "up" = -y in the upright frame
    let d = li - ri;
    let mut n = Point::new(-d.y, d.x).scale(1.0 / d.norm());
    if n.y > 0.0 {
        n = n.scale(-1.0);
    }
    let h = |p: Point| (p - ri).dot(n);
    for (side, m, l) in [(EyeSide::Right, rm, rl), (EyeSide::Left, lm, ll)] {
        put(&mut set, side, SideFeature::MedialCanthalHeight, h(m));
        put(&mut set, side, SideFeature::LateralCanthalHeight, h(l));
    }
    set
}

fn render_eye(
    e: &EyeShapes,
    size: (usize, usize),
    to_upright: &RigidTransform,
    window: (usize, usize, usize, usize),
    id: &str,
) -> Result<EyeRecord> {
    let (w, h) = size;
    let mut sclera = RasterMask::empty(w, h, MaskClass::Sclera);
    let mut iris = RasterMask::empty(w, h, MaskClass::Iris);
    let mut brow = RasterMask::empty(w, h, MaskClass::Brow);
    let (x0, y0, x1, y1) = window;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = to_upright.apply(Point::new(x as f64, y as f64));
            if e.in_iris(p) {
                iris.set(x, y, true);
            } else if e.in_fissure(p) {
                sclera.set(x, y, true);
            }
            if e.brow.contains(p.x.round() as i64, p.y.round() as i64) {
                brow.set(x, y, true);
            }
        }
    }
    EyeRecord::new(e.side, sclera, iris, brow, id)
}

/// Rasterise a face and compute its analytic pixel-unit measurements.
///
/// The truth refers to the upright face; for a rotated face it is what an
/// orientation-normalised measurement should recover.
pub fn render_face(params: &FaceParams) -> Result<(FaceRecord, MeasurementSet)> {
    let (w, h) = params.image_size;
    if w == 0 || h == 0 {
        return Err(Error::Invalid("empty image".into()));
    }
    if !params.rotation_deg.is_finite() {
        return Err(Error::Invalid("non-finite rotation".into()));
    }
    let right = EyeShapes::new(EyeSide::Right, &params.right)?;
    let left = EyeShapes::new(EyeSide::Left, &params.left)?;
    let (rb, lb) = (right.bounds(), left.bounds());
    if rb.2 >= lb.0 {
        return Err(Error::Invalid(
            "right eye must lie left of the left eye in the image".into(),
        ));
    }

    let forward = RigidTransform::rotation(params.nasion, params.rotation_deg);
    let to_upright = forward.inverse();
    let mut windows = Vec::new();
    for b in [rb, lb] {
        let corners = [(b.0, b.1), (b.2, b.1), (b.0, b.3), (b.2, b.3)]
            .map(|(x, y)| forward.apply(Point::new(x, y)));
        let min_x = corners.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - BORDER;
        let max_x = corners
            .iter()
            .map(|p| p.x)
            .fold(f64::NEG_INFINITY, f64::max)
            + BORDER;
        let min_y = corners.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - BORDER;
        let max_y = corners
            .iter()
            .map(|p| p.y)
            .fold(f64::NEG_INFINITY, f64::max)
            + BORDER;
        if min_x < 0.0 || min_y < 0.0 || max_x > (w - 1) as f64 || max_y > (h - 1) as f64 {
            return Err(Error::Invalid("shape extends past the image border".into()));
        }
        windows.push((
            min_x.floor() as usize,
            min_y.floor() as usize,
            max_x.ceil() as usize,
            max_y.ceil() as usize,
        ));
    }

    let landmarks = Landmarks {
        nasion: forward.apply(params.nasion),
        hairline_mid: forward.apply(params.hairline_mid),
    };
    let face = FaceRecord::new(
        params.id.clone(),
        render_eye(&right, (w, h), &to_upright, windows[0], &params.id)?,
        render_eye(&left, (w, h), &to_upright, windows[1], &params.id)?,
        landmarks,
        (w, h),
    )?;
    Ok((face, face_truth(&params.id, &right, &left)))
}

/// One generated face.
#[derive(Debug, Clone)]
pub struct SynthFace {
    pub params: FaceParams,
    pub face: FaceRecord,
    pub truth: MeasurementSet,
    pub label: Label,
}

/// Sampling ranges for one class. Disease shifts are illustrative, not
/// clinically calibrated: taller fissures, a raised iris that exposes
/// inferior sclera, flatter tilt and larger vertical asymmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub iris_radius: (f64, f64),
    pub iris_dx: (f64, f64),
    pub iris_dy: (f64, f64),
    pub tilt_deg: (f64, f64),
    pub half_icd: (f64, f64),
    pub eye_y_jitter: f64,
    pub brow_gap: (f64, f64),
    pub brow_thickness: (usize, usize),
    pub brow_arc: (f64, f64),
    pub brow_peak: (f64, f64),
}

impl Profile {
    pub fn healthy() -> Profile {
        Profile {
            a: (40.0, 50.0),
            b: (13.0, 17.0),
            iris_radius: (17.0, 20.0),
            iris_dx: (-3.0, 3.0),
            iris_dy: (-3.0, 0.0),
            tilt_deg: (2.0, 8.0),
            half_icd: (45.0, 55.0),
            eye_y_jitter: 1.5,
            brow_gap: (30.0, 40.0),
            brow_thickness: (8, 14),
            brow_arc: (0.0005, 0.002),
            brow_peak: (0.0, 15.0),
        }
    }

    pub fn disease() -> Profile {
        let h = Profile::healthy();
        Profile {
            b: (h.b.0 * 1.25, h.b.1 * 1.25),
            iris_dy: (-5.0, -2.0),
            tilt_deg: (-4.0, 4.0),
            eye_y_jitter: 4.0,
            ..h
        }
    }

    pub fn for_label(label: Label) -> Profile {
        match label {
            Label::Healthy => Profile::healthy(),
            Label::Disease => Profile::disease(),
        }
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn sample_eye<R: Rng>(rng: &mut R, prof: &Profile, side: EyeSide, half_icd: f64) -> EyeParams {
    loop {
        let a = uniform(rng, prof.a);
        let b = uniform(rng, prof.b);
        let r = uniform(rng, prof.iris_radius);
        let tilt = uniform(rng, prof.tilt_deg);
        let off = Point::new(uniform(rng, prof.iris_dx), uniform(rng, prof.iris_dy));
        let jitter = uniform(rng, (-prof.eye_y_jitter, prof.eye_y_jitter));
        let brow = BrowParams {
            gap: uniform(rng, prof.brow_gap) + b,
            thickness: rng.random_range(prof.brow_thickness.0..=prof.brow_thickness.1),
            arc: uniform(rng, prof.brow_arc),
            peak_offset: uniform(rng, prof.brow_peak),
            overhang: 8.0,
        };
        let ell = Ellipse::new(Point::default(), a, b, fissure_phi(side, tilt));
        // keep the iris' horizontal extremes clear of the lids
        if [-r, r]
            .iter()
            .any(|dx| ell.level(Point::new(off.x + dx, off.y)) > 0.9)
        {
            continue;
        }
        let (hi, _) = ell.x_extremes();
        let medial_gap = half_icd + hi.x;
        let center = Point::new(
            MIDLINE_X - side.medial_sign() * medial_gap,
            EYE_LEVEL_Y + jitter,
        );
        return EyeParams {
            center,
            a,
            b,
            iris_radius: r,
            iris_offset: off,
            tilt_deg: tilt,
            brow,
        };
    }
}

/// Draw face parameters for one class.
pub fn sample_face<R: Rng>(rng: &mut R, label: Label, id: impl Into<String>) -> FaceParams {
    let prof = Profile::for_label(label);
    let half_icd = uniform(rng, prof.half_icd);
    let right = sample_eye(rng, &prof, EyeSide::Right, half_icd);
    let left = sample_eye(rng, &prof, EyeSide::Left, half_icd);
    FaceParams {
        id: id.into(),
        image_size: (IMAGE_WIDTH, IMAGE_HEIGHT),
        nasion: NASION,
        hairline_mid: HAIRLINE,
        rotation_deg: 0.0,
        right,
        left,
    }
}

/// `n` faces of one class. Face `i` uses its own RNG stream, so the output
/// does not depend on thread scheduling.
pub fn gen_population(n: usize, label: Label, seed: u64) -> Result<Vec<SynthFace>> {
    if n == 0 {
        return Err(Error::Invalid("population size must be at least 1".into()));
    }
    let class_stream = match label {
        Label::Healthy => 0,
        Label::Disease => 1,
    };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2 * i as u64 + class_stream);
            let params = sample_face(&mut rng, label, format!("{}_{i:04}", label.as_str()));
            let (face, truth) = render_face(&params)?;
            Ok(SynthFace {
                params,
                face,
                truth,
                label,
            })
        })
        .collect()
}

/// A mixed population: `round(n * disease_fraction)` disease faces, the rest
/// healthy; healthy faces first.
pub fn gen_mixed(n: usize, disease_fraction: f64, seed: u64) -> Result<Vec<SynthFace>> {
    if n == 0 {
        return Err(Error::Invalid("population size must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&disease_fraction) {
        return Err(Error::Invalid("disease fraction must be in [0, 1]".into()));
    }
    let n_d = (n as f64 * disease_fraction).round() as usize;
    let mut out = Vec::with_capacity(n);
    if n - n_d > 0 {
        out.extend(gen_population(n - n_d, Label::Healthy, seed)?);
    }
    if n_d > 0 {
        out.extend(gen_population(n_d, Label::Disease, seed)?);
    }
    Ok(out)
}
