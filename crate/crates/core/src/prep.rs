//! Orientation normalisation and midline cropping.
//!
//! Faces are rotated about the nasion until the nasion→hairline line is
//! image-vertical. Masks are resampled by majority vote over nearest-neighbour
//! sub-samples so they stay binary.

use crate::anthro::FacialAxis;
use crate::error::Result;
use crate::mask::{EyeRecord, EyeSide, FaceRecord, Landmarks, Point, RasterMask};
use crate::maskgeom::{bbox, fit_iris};

pub fn axis_from_landmarks(nasion: Point, hairline_mid: Point) -> Result<FacialAxis> {
    FacialAxis::through(nasion, hairline_mid)
}

/// Rotation about `center` followed by a translation.
///
/// `rotation_deg` is measured in image coordinates (y down), so a positive
/// angle turns the picture clockwise on screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation_deg: f64,
    pub center: Point,
    pub translation: (f64, f64),
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self::rotation(Point::default(), 0.0)
    }

    pub fn rotation(center: Point, rotation_deg: f64) -> Self {
        Self {
            rotation_deg,
            center,
            translation: (0.0, 0.0),
        }
    }

    fn rotate(p: Point, deg: f64) -> Point {
        let (s, c) = deg.to_radians().sin_cos();
        Point::new(p.x * c - p.y * s, p.x * s + p.y * c)
    }

    pub fn apply(&self, p: Point) -> Point {
        let r = Self::rotate(p - self.center, self.rotation_deg);
        Point::new(
            r.x + self.center.x + self.translation.0,
            r.y + self.center.y + self.translation.1,
        )
    }

    pub fn apply_inverse(&self, p: Point) -> Point {
        let q = Point::new(
            p.x - self.translation.0 - self.center.x,
            p.y - self.translation.1 - self.center.y,
        );
        Self::rotate(q, -self.rotation_deg) + self.center
    }

    pub fn inverse(&self) -> RigidTransform {
        // x -> R(x - c) + c + t  inverts to  x -> R^-1(x - (c + t)) + c,
        // i.e. a rotation about c + t followed by translation -t.
        let c2 = Point::new(
            self.center.x + self.translation.0,
            self.center.y + self.translation.1,
        );
        RigidTransform {
            rotation_deg: -self.rotation_deg,
            center: c2,
            translation: (-self.translation.0, -self.translation.1),
        }
    }
}

/// Sub-pixel offsets of the 5x5 sample grid inside each output pixel.
const SUB: [f64; 5] = [-0.4, -0.2, 0.0, 0.2, 0.4];

/// Resample a mask through `t` onto the same grid size. Each output pixel
/// takes 25 nearest-neighbour samples and is set by strict majority, which
/// keeps labels binary without the one-pixel spurs plain nearest neighbour
/// leaves along rotated edges.
pub fn transform_mask(mask: &RasterMask, t: &RigidTransform) -> RasterMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = RasterMask::empty(w, h, mask.class());
    let Ok(b) = bbox(mask) else {
        return out;
    };
    // Only output pixels near the forward image of the source bbox can hit.
    let corners = [
        (b.min_x, b.min_y),
        (b.max_x, b.min_y),
        (b.min_x, b.max_y),
        (b.max_x, b.max_y),
    ]
    .map(|(x, y)| t.apply(Point::new(x as f64, y as f64)));
    let lo_x = corners
        .iter()
        .map(|p| p.x)
        .fold(f64::INFINITY, f64::min)
        .floor()
        - 1.0;
    let hi_x = corners
        .iter()
        .map(|p| p.x)
        .fold(f64::NEG_INFINITY, f64::max)
        .ceil()
        + 1.0;
    let lo_y = corners
        .iter()
        .map(|p| p.y)
        .fold(f64::INFINITY, f64::min)
        .floor()
        - 1.0;
    let hi_y = corners
        .iter()
        .map(|p| p.y)
        .fold(f64::NEG_INFINITY, f64::max)
        .ceil()
        + 1.0;
    let clamp = |v: f64, n: usize| v.max(0.0).min((n - 1) as f64) as usize;
    for y in clamp(lo_y, h)..=clamp(hi_y, h) {
        for x in clamp(lo_x, w)..=clamp(hi_x, w) {
            let mut votes = 0;
            for sy in SUB {
                for sx in SUB {
                    let src = t.apply_inverse(Point::new(x as f64 + sx, y as f64 + sy));
                    votes += mask.get_signed(src.x.round() as i64, src.y.round() as i64) as u32;
                }
            }
            if 2 * votes > (SUB.len() * SUB.len()) as u32 {
                out.set(x, y, true);
            }
        }
    }
    out
}

fn transform_eye(eye: &EyeRecord, t: &RigidTransform) -> EyeRecord {
    EyeRecord {
        side: eye.side,
        sclera: transform_mask(&eye.sclera, t),
        iris: transform_mask(&eye.iris, t),
        brow: transform_mask(&eye.brow, t),
        id: eye.id.clone(),
    }
}

/// Apply a rigid transform to every mask and landmark of a face.
pub fn transform_face(face: &FaceRecord, t: &RigidTransform) -> Result<FaceRecord> {
    FaceRecord::new(
        face.id.clone(),
        transform_eye(&face.right, t),
        transform_eye(&face.left, t),
        Landmarks {
            nasion: t.apply(face.landmarks.nasion),
            hairline_mid: t.apply(face.landmarks.hairline_mid),
        },
        face.image_size,
    )
}

/// Rotate a face about its nasion.
pub fn rotate_face(face: &FaceRecord, rotation_deg: f64) -> Result<FaceRecord> {
    transform_face(
        face,
        &RigidTransform::rotation(face.landmarks.nasion, rotation_deg),
    )
}

/// Rotate the face about the nasion so the facial axis is image-vertical.
/// The returned transform maps original to normalised coordinates.
pub fn normalize_orientation(face: &FaceRecord) -> Result<(FaceRecord, RigidTransform)> {
    let axis = axis_from_landmarks(face.landmarks.nasion, face.landmarks.hairline_mid)?;
    let psi = axis.direction.y.atan2(axis.direction.x);
    let mut deg = (-std::f64::consts::FRAC_PI_2 - psi).to_degrees();
    if deg <= -180.0 {
        deg += 360.0;
    } else if deg > 180.0 {
        deg -= 360.0;
    }
    let t = RigidTransform::rotation(face.landmarks.nasion, deg);
    if deg == 0.0 {
        return Ok((face.clone(), t));
    }
    let mut out = transform_face(face, &t)?;
    // keep the hairline exactly above the nasion
    out.landmarks.hairline_mid.x = out.landmarks.nasion.x;
    Ok((out, t))
}

/// One eye cropped to its half of the image.
#[derive(Debug, Clone)]
pub struct HalfFace {
    pub eye: EyeRecord,
    /// Face-frame position of the crop's (0, 0) pixel.
    pub offset: (usize, usize),
}

impl HalfFace {
    pub fn to_face_frame(&self, p: Point) -> Point {
        Point::new(p.x + self.offset.0 as f64, p.y + self.offset.1 as f64)
    }
}

#[derive(Debug, Clone)]
pub struct MidlineSplit {
    pub midline_x: f64,
    /// Subject's right eye (image-left half).
    pub right: HalfFace,
    /// Subject's left eye (image-right half).
    pub left: HalfFace,
}

/// Split a face at the midline between the iris centres; falls back to the
/// image centre when either iris is missing.
pub fn split_midline(face: &FaceRecord) -> MidlineSplit {
    let (w, h) = face.image_size;
    let midline_x = match (fit_iris(&face.right.iris), fit_iris(&face.left.iris)) {
        (Ok(r), Ok(l)) => 0.5 * (r.center.x + l.center.x),
        _ => w as f64 / 2.0,
    };
    let split = (midline_x.ceil().max(1.0) as usize).min(w.saturating_sub(1).max(1));
    let crop = |eye: &EyeRecord, x0: usize, cw: usize| EyeRecord {
        side: eye.side,
        sclera: eye.sclera.crop(x0, 0, cw, h),
        iris: eye.iris.crop(x0, 0, cw, h),
        brow: eye.brow.crop(x0, 0, cw, h),
        id: eye.id.clone(),
    };
    MidlineSplit {
        midline_x,
        right: HalfFace {
            eye: crop(face.eye(EyeSide::Right), 0, split),
            offset: (0, 0),
        },
        left: HalfFace {
            eye: crop(face.eye(EyeSide::Left), split, w - split),
            offset: (split, 0),
        },
    }
}
