//! Binary raster masks and the per-eye / per-face records built from them.
//!
//! Coordinates follow the raster convention: `x` is the column and grows to
//! the right, `y` is the row and grows downward, so "superior" means a
//! smaller `y`. Pixel `(x, y)` covers the unit square centred on `(x, y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl std::ops::Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskClass {
    Sclera,
    Iris,
    Brow,
}

impl MaskClass {
    pub const ALL: [MaskClass; 3] = [MaskClass::Sclera, MaskClass::Iris, MaskClass::Brow];

    pub fn as_str(&self) -> &'static str {
        match self {
            MaskClass::Sclera => "sclera",
            MaskClass::Iris => "iris",
            MaskClass::Brow => "brow",
        }
    }
}

/// Anatomical side of the subject.
///
/// In a frontal photograph the subject's right eye appears on the image's
/// left half, so its medial (nasal) corner is its largest-x extreme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EyeSide {
    Right,
    Left,
}

impl EyeSide {
    pub const BOTH: [EyeSide; 2] = [EyeSide::Right, EyeSide::Left];

    /// Sign of the image-x direction pointing toward the facial midline.
    pub fn medial_sign(&self) -> f64 {
        match self {
            EyeSide::Right => 1.0,
            EyeSide::Left => -1.0,
        }
    }

    pub fn opposite(&self) -> EyeSide {
        match self {
            EyeSide::Right => EyeSide::Left,
            EyeSide::Left => EyeSide::Right,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EyeSide::Right => "right",
            EyeSide::Left => "left",
        }
    }
}

/// Bit-packed binary occupancy grid for one anatomical class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RasterMask {
    width: usize,
    height: usize,
    words: Vec<u64>,
    class: MaskClass,
}

impl std::fmt::Debug for RasterMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RasterMask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("class", &self.class)
            .field("count", &self.count())
            .finish()
    }
}

impl RasterMask {
    /// An all-background mask. Panics on zero dimensions.
    pub fn empty(width: usize, height: usize, class: MaskClass) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        Self {
            width,
            height,
            words: vec![0; (width * height).div_ceil(64)],
            class,
        }
    }

    pub fn from_bits(width: usize, height: usize, class: MaskClass, bits: &[bool]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Invalid("mask dimensions must be >= 1".into()));
        }
        if bits.len() != width * height {
            return Err(Error::Invalid(format!(
                "expected {} mask bits, got {}",
                width * height,
                bits.len()
            )));
        }
        let mut m = Self::empty(width, height, class);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                m.words[i >> 6] |= 1 << (i & 63);
            }
        }
        Ok(m)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        class: MaskClass,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut m = Self::empty(width, height, class);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    /// Build a mask from a list of set pixels; coordinates outside the grid are ignored.
    pub fn from_pixels(
        width: usize,
        height: usize,
        class: MaskClass,
        pixels: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut m = Self::empty(width, height, class);
        for (x, y) in pixels {
            if x < width && y < height {
                m.set(x, y, true);
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class(&self) -> MaskClass {
        self.class
    }

    pub fn with_class(mut self, class: MaskClass) -> Self {
        self.class = class;
        self
    }

    pub fn same_dims(&self, other: &RasterMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_dims(&self, other: &RasterMask) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let i = y * self.width + x;
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// Like [`get`](Self::get) but false outside the grid.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let i = y * self.width + x;
        if value {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of pixels set in both masks.
    pub fn intersection_count(&self, other: &RasterMask) -> Result<usize> {
        self.check_dims(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    pub fn union(&self, other: &RasterMask) -> Result<RasterMask> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &RasterMask) -> Result<RasterMask> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(out)
    }

    /// Set pixels in raster order (row by row, left to right).
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        let total = self.width * self.height;
        self.words.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + tz)
            })
            .take_while(move |&i| i < total)
            .map(move |i| (i % w, i / w))
        })
    }

    /// Rows occupied in column `x`, ascending.
    pub fn column_rows(&self, x: usize) -> Vec<usize> {
        (0..self.height).filter(|&y| self.get(x, y)).collect()
    }

    /// Topmost and bottommost occupied rows of column `x`.
    pub fn column_extent(&self, x: usize) -> Option<(usize, usize)> {
        let top = (0..self.height).find(|&y| self.get(x, y))?;
        let bottom = (0..self.height).rev().find(|&y| self.get(x, y))?;
        Some((top, bottom))
    }

    /// Per-column (top, bottom) extents for every occupied column, in one pass.
    pub fn column_extents(&self) -> Vec<(usize, usize, usize)> {
        let mut ext: Vec<Option<(usize, usize)>> = vec![None; self.width];
        for (x, y) in self.pixels() {
            ext[x] = Some(match ext[x] {
                None => (y, y),
                Some((t, b)) => (t.min(y), b.max(y)),
            });
        }
        ext.into_iter()
            .enumerate()
            .filter_map(|(x, e)| e.map(|(t, b)| (x, t, b)))
            .collect()
    }

    pub fn mirrored_horizontally(&self) -> RasterMask {
        let mut out = RasterMask::empty(self.width, self.height, self.class);
        for (x, y) in self.pixels() {
            out.set(self.width - 1 - x, y, true);
        }
        out
    }

    /// Copy of the rectangle starting at `(x0, y0)`, clipped to the grid.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> RasterMask {
        let mut out = RasterMask::empty(width.max(1), height.max(1), self.class);
        for y in 0..height {
            for x in 0..width {
                let (sx, sy) = (x0 + x, y0 + y);
                if sx < self.width && sy < self.height && self.get(sx, sy) {
                    out.set(x, y, true);
                }
            }
        }
        out
    }

    /// Shift every set pixel by `(dx, dy)`, dropping pixels that leave the grid.
    pub fn translated(&self, dx: i64, dy: i64) -> RasterMask {
        let mut out = RasterMask::empty(self.width, self.height, self.class);
        for (x, y) in self.pixels() {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                out.set(nx as usize, ny as usize, true);
            }
        }
        out
    }

    /// Row-major occupancy, one bool per pixel.
    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width * self.height)
            .map(|i| (self.words[i >> 6] >> (i & 63)) & 1 == 1)
            .collect()
    }
}

/// All masks of one eye, in the shared face coordinate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeRecord {
    pub side: EyeSide,
    pub sclera: RasterMask,
    pub iris: RasterMask,
    pub brow: RasterMask,
    pub id: String,
}

impl EyeRecord {
    pub fn new(
        side: EyeSide,
        sclera: RasterMask,
        iris: RasterMask,
        brow: RasterMask,
        id: impl Into<String>,
    ) -> Result<Self> {
        sclera.check_dims(&iris)?;
        sclera.check_dims(&brow)?;
        Ok(Self {
            side,
            sclera: sclera.with_class(MaskClass::Sclera),
            iris: iris.with_class(MaskClass::Iris),
            brow: brow.with_class(MaskClass::Brow),
            id: id.into(),
        })
    }

    pub fn mask(&self, class: MaskClass) -> &RasterMask {
        match class {
            MaskClass::Sclera => &self.sclera,
            MaskClass::Iris => &self.iris,
            MaskClass::Brow => &self.brow,
        }
    }

    pub fn width(&self) -> usize {
        self.sclera.width()
    }

    pub fn height(&self) -> usize {
        self.sclera.height()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub nasion: Point,
    pub hairline_mid: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceRecord {
    pub id: String,
    pub right: EyeRecord,
    pub left: EyeRecord,
    pub landmarks: Landmarks,
    pub image_size: (usize, usize),
}

impl FaceRecord {
    pub fn new(
        id: impl Into<String>,
        right: EyeRecord,
        left: EyeRecord,
        landmarks: Landmarks,
        image_size: (usize, usize),
    ) -> Result<Self> {
        if right.side != EyeSide::Right || left.side != EyeSide::Left {
            return Err(Error::Invalid("eye records carry the wrong side".into()));
        }
        let (w, h) = image_size;
        for eye in [&right, &left] {
            if eye.width() != w || eye.height() != h {
                return Err(Error::DimensionMismatch(eye.width(), eye.height(), w, h));
            }
        }
        let Landmarks {
            nasion,
            hairline_mid,
        } = landmarks;
        if !nasion.is_finite() || !hairline_mid.is_finite() {
            return Err(Error::Invalid("landmarks must be finite".into()));
        }
        if nasion.y <= hairline_mid.y {
            return Err(Error::Invalid(
                "nasion must lie below the hairline midpoint".into(),
            ));
        }
        Ok(Self {
            id: id.into(),
            right,
            left,
            landmarks,
            image_size,
        })
    }

    pub fn eye(&self, side: EyeSide) -> &EyeRecord {
        match side {
            EyeSide::Right => &self.right,
            EyeSide::Left => &self.left,
        }
    }

    pub fn eye_mut(&mut self, side: EyeSide) -> &mut EyeRecord {
        match side {
            EyeSide::Right => &mut self.right,
            EyeSide::Left => &mut self.left,
        }
    }
}
