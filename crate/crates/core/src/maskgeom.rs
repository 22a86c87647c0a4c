//! Geometric primitives over binary masks.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::mask::{EyeSide, Point, RasterMask};

/// Inclusive pixel bounds of a non-empty mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BBox {
    /// Pixel count spanned horizontally (edge to edge).
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.min_x + self.max_x) as f64,
            0.5 * (self.min_y + self.max_y) as f64,
        )
    }

    pub fn contains(&self, other: &BBox) -> bool {
        self.min_x <= other.min_x
            && self.min_y <= other.min_y
            && self.max_x >= other.max_x
            && self.max_y >= other.max_y
    }
}

/// Dice overlap `2|X∩Y| / (|X|+|Y|)`; two empty masks score 1.
pub fn dice(x: &RasterMask, y: &RasterMask) -> Result<f64> {
    let inter = x.intersection_count(y)?;
    let total = x.count() + y.count();
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / total as f64)
}

pub fn bbox(mask: &RasterMask) -> Result<BBox> {
    let mut it = mask.pixels();
    let (x0, y0) = it.next().ok_or(Error::EmptyMask)?;
    let mut b = BBox {
        min_x: x0,
        min_y: y0,
        max_x: x0,
        max_y: y0,
    };
    for (x, y) in it {
        b.min_x = b.min_x.min(x);
        b.max_x = b.max_x.max(x);
        b.min_y = b.min_y.min(y);
        b.max_y = b.max_y.max(y);
    }
    Ok(b)
}

struct Component {
    pixels: Vec<(usize, usize)>,
    min_x: usize,
    min_y: usize,
}

fn components(mask: &RasterMask) -> Vec<Component> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = RasterMask::empty(w, h, mask.class());
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for (sx, sy) in mask.pixels() {
        if seen.get(sx, sy) {
            continue;
        }
        seen.set(sx, sy, true);
        queue.push_back((sx, sy));
        let mut comp = Component {
            pixels: Vec::new(),
            min_x: sx,
            min_y: sy,
        };
        while let Some((x, y)) = queue.pop_front() {
            comp.pixels.push((x, y));
            comp.min_x = comp.min_x.min(x);
            comp.min_y = comp.min_y.min(y);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if mask.get_signed(nx, ny) && !seen.get(nx as usize, ny as usize) {
                        seen.set(nx as usize, ny as usize, true);
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Keep only the largest 8-connected component.
///
/// Equal sizes are resolved toward the component with the smallest `min_y`,
/// then the smallest `min_x`.
pub fn largest_component(mask: &RasterMask) -> Result<RasterMask> {
    let best = components(mask)
        .into_iter()
        .min_by(|a, b| {
            b.pixels
                .len()
                .cmp(&a.pixels.len())
                .then(a.min_y.cmp(&b.min_y))
                .then(a.min_x.cmp(&b.min_x))
        })
        .ok_or(Error::EmptyMask)?;
    Ok(RasterMask::from_pixels(
        mask.width(),
        mask.height(),
        mask.class(),
        best.pixels,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrisFit {
    pub center: Point,
    pub diameter_px: f64,
}

/// Iris centre and horizontal visible diameter from the bounding box of the
/// largest iris component. Lids occlude the vertical extent, so the width
/// is the calibrated dimension.
pub fn fit_iris(iris: &RasterMask) -> Result<IrisFit> {
    let clean = largest_component(iris)?;
    let b = bbox(&clean)?;
    Ok(IrisFit {
        center: b.center(),
        diameter_px: b.width() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canthi {
    pub medial: Point,
    pub lateral: Point,
}

fn median_row(mut rows: Vec<usize>) -> f64 {
    rows.sort_unstable();
    let n = rows.len();
    if n % 2 == 1 {
        rows[n / 2] as f64
    } else {
        0.5 * (rows[n / 2 - 1] + rows[n / 2]) as f64
    }
}

/// Medial and lateral canthi as the extreme sclera columns toward and away
/// from the facial midline. Each canthus sits on the pixel centre of its
/// extreme column at the median occupied row.
pub fn canthi(sclera: &RasterMask, side: EyeSide) -> Result<Canthi> {
    let b = bbox(sclera)?;
    let at = |x: usize| Point::new(x as f64, median_row(sclera.column_rows(x)));
    let (min_pt, max_pt) = (at(b.min_x), at(b.max_x));
    Ok(match side {
        EyeSide::Right => Canthi {
            medial: max_pt,
            lateral: min_pt,
        },
        EyeSide::Left => Canthi {
            medial: min_pt,
            lateral: max_pt,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginKind {
    Superior,
    Inferior,
}

/// Degree-4 polynomial `y = p(x)` over a closed pixel domain.
///
/// Stored in the normalised variable `t = (x - x_mid) / half_span` so the
/// normal equations stay well conditioned; [`coefficients`](Self::coefficients)
/// expands back to the raw power basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginPoly {
    t_coeffs: [f64; 5],
    x_mid: f64,
    half_span: f64,
    pub domain: (f64, f64),
    pub which: MarginKind,
}

impl MarginPoly {
    /// Least-squares degree-4 fit; needs at least five distinct abscissae.
    pub fn fit(xs: &[f64], ys: &[f64], which: MarginKind) -> Result<MarginPoly> {
        if xs.len() != ys.len() {
            return Err(Error::Invalid("x and y sample counts differ".into()));
        }
        let mut distinct: Vec<f64> = xs.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if distinct.len() < 5 {
            return Err(Error::Underdetermined {
                needed: 5,
                got: distinct.len(),
            });
        }
        let (lo, hi) = (distinct[0], *distinct.last().unwrap());
        let x_mid = xs.iter().sum::<f64>() / xs.len() as f64;
        let half_span = ((hi - x_mid).max(x_mid - lo)).max(1e-12);

        let mut ata = [[0.0f64; 5]; 5];
        let mut aty = [0.0f64; 5];
        for (&x, &y) in xs.iter().zip(ys) {
            let t = (x - x_mid) / half_span;
            let mut pw = [1.0; 9];
            for k in 1..9 {
                pw[k] = pw[k - 1] * t;
            }
            for i in 0..5 {
                aty[i] += pw[i] * y;
                for j in 0..5 {
                    ata[i][j] += pw[i + j];
                }
            }
        }
        let t_coeffs = solve5(ata, aty).ok_or(Error::Degenerate("singular normal equations"))?;
        Ok(MarginPoly {
            t_coeffs,
            x_mid,
            half_span,
            domain: (lo, hi),
            which,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain;
        if !(x >= lo - 1e-9 && x <= hi + 1e-9) {
            return Err(Error::OutOfDomain {
                x,
                min: lo,
                max: hi,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        let t = (x - self.x_mid) / self.half_span;
        self.t_coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Coefficients `c0..c4` of `c0 + c1 x + ... + c4 x^4` in raw pixel x.
    pub fn coefficients(&self) -> [f64; 5] {
        let binom = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut out = [0.0; 5];
        for (k, &c) in self.t_coeffs.iter().enumerate() {
            let ck = c / self.half_span.powi(k as i32);
            for j in 0..=k {
                out[j] += ck * binom[k][j] * (-self.x_mid).powi((k - j) as i32);
            }
        }
        out
    }
}

fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let piv = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let s: f64 = (row + 1..5).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Fit the superior and inferior margins of the palpebral fissure.
///
/// Every occupied column contributes its topmost row to the superior sample
/// and its bottommost row to the inferior sample (pixel centres).
pub fn fit_margins(fissure: &RasterMask) -> Result<(MarginPoly, MarginPoly)> {
    let ext = fissure.column_extents();
    if ext.is_empty() {
        return Err(Error::EmptyMask);
    }
    if ext.len() < 5 {
        return Err(Error::Underdetermined {
            needed: 5,
            got: ext.len(),
        });
    }
    let xs: Vec<f64> = ext.iter().map(|e| e.0 as f64).collect();
    let tops: Vec<f64> = ext.iter().map(|e| e.1 as f64).collect();
    let bottoms: Vec<f64> = ext.iter().map(|e| e.2 as f64).collect();
    Ok((
        MarginPoly::fit(&xs, &tops, MarginKind::Superior)?,
        MarginPoly::fit(&xs, &bottoms, MarginKind::Inferior)?,
    ))
}
