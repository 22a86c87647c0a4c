use periometry::maskgeom::{bbox, canthi, dice, fit_margins, largest_component};
use periometry::{EyeSide, MaskClass, RasterMask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> RasterMask {
    let bits: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
    RasterMask::from_bits(w, h, MaskClass::Sclera, &bits).unwrap()
}

fn brute_dice(x: &RasterMask, y: &RasterMask) -> f64 {
    let (mut inter, mut nx, mut ny) = (0usize, 0usize, 0usize);
    for yy in 0..x.height() {
        for xx in 0..x.width() {
            let (a, b) = (x.get(xx, yy), y.get(xx, yy));
            nx += a as usize;
            ny += b as usize;
            inter += (a && b) as usize;
        }
    }
    if nx + ny == 0 {
        1.0
    } else {
        2.0 * inter as f64 / (nx + ny) as f64
    }
}

#[test]
fn dice_matches_pixel_count_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..200 {
        let (w, h) = (rng.random_range(1..70), rng.random_range(1..70));
        let density = [0.0, 0.05, 0.3, 0.7, 1.0][k % 5];
        let x = random_mask(&mut rng, w, h, density);
        let dy = rng.random_range(0.0..1.0);
        let y = random_mask(&mut rng, w, h, dy);
        let d = dice(&x, &y).unwrap();
        assert_eq!(d, brute_dice(&x, &y));
        assert_eq!(d, dice(&y, &x).unwrap());
        if !x.is_empty() {
            assert_eq!(dice(&x, &x).unwrap(), 1.0);
        }
    }
}

#[test]
fn dice_rejects_mismatched_grids() {
    let a = RasterMask::empty(4, 4, MaskClass::Iris);
    let b = RasterMask::empty(4, 5, MaskClass::Iris);
    assert!(dice(&a, &b).is_err());
}

fn ellipse_mask(w: usize, h: usize, cx: f64, cy: f64, a: f64, b: f64) -> RasterMask {
    RasterMask::from_fn(w, h, MaskClass::Sclera, |x, y| {
        let (u, v) = ((x as f64 - cx) / a, (y as f64 - cy) / b);
        u * u + v * v <= 1.0
    })
}

proptest! {
    #[test]
    fn largest_component_stays_inside_bbox(
        seed in any::<u64>(),
        w in 1usize..40,
        h in 1usize..40,
        density in 0.05f64..0.9,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, w, h, density);
        prop_assume!(!m.is_empty());
        let big = largest_component(&m).unwrap();
        prop_assert!(bbox(&m).unwrap().contains(&bbox(&big).unwrap()));
        prop_assert!(big.count() <= m.count());
    }

    #[test]
    fn canthi_are_mirror_symmetric(
        seed in any::<u64>(),
        w in 3usize..50,
        h in 1usize..30,
        density in 0.05f64..0.9,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, w, h, density);
        prop_assume!(!m.is_empty());
        let c = canthi(&m, EyeSide::Right).unwrap();
        let mirrored = canthi(&m.mirrored_horizontally(), EyeSide::Left).unwrap();
        let flip = |x: f64| (w - 1) as f64 - x;
        prop_assert_eq!(mirrored.medial.x, flip(c.medial.x));
        prop_assert_eq!(mirrored.lateral.x, flip(c.lateral.x));
        prop_assert_eq!(mirrored.medial.y, c.medial.y);
        prop_assert_eq!(mirrored.lateral.y, c.lateral.y);
    }

    #[test]
    fn symmetric_fissure_margins_reflect(
        a in 8.0f64..40.0,
        b in 3.0f64..15.0,
        dx in -0.5f64..0.5,
    ) {
        // centre on a pixel row so the mask is exactly symmetric about it
        let (w, h) = (100, 40);
        let cy = 20.0;
        let m = ellipse_mask(w, h, 50.0 + dx, cy, a, b);
        let (sup, inf) = fit_margins(&m).unwrap();
        let (lo, hi) = sup.domain;
        for k in 0..=20 {
            let x = lo + (hi - lo) * k as f64 / 20.0;
            let s = sup.eval(x).unwrap();
            let i = inf.eval(x).unwrap();
            prop_assert!((cy - s - (i - cy)).abs() < 1e-6, "x={} s={} i={}", x, s, i);
        }
    }
}

#[test]
fn margin_fit_tracks_ellipse_at_centre() {
    for (a, b) in [(30.0, 10.0), (45.0, 15.0), (20.0, 12.5)] {
        let m = ellipse_mask(120, 60, 60.0, 30.0, a, b);
        let (sup, inf) = fit_margins(&m).unwrap();
        // outer pixel edge versus the analytic boundary
        assert!(((sup.eval(60.0).unwrap() - 0.5) - (30.0 - b)).abs() <= 0.5);
        assert!(((inf.eval(60.0).unwrap() + 0.5) - (30.0 + b)).abs() <= 0.5);
        assert!(sup.eval(60.0 + a + 5.0).is_err());
    }
}
