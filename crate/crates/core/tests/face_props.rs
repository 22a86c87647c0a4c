use periometry::anthro::measure_face;
use periometry::classify::Label;
use periometry::prep::{axis_from_landmarks, normalize_orientation, rotate_face, RigidTransform};
use periometry::synth::{gen_population, render_face, sample_face, SynthFace};
use periometry::{
    feature_index, EyeRecord, EyeSide, FaceRecord, Feature, GlobalFeature, Landmarks, MaskClass,
    Point, RasterMask, SideFeature, N_FEATURES,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn faces(n: usize, seed: u64) -> Vec<SynthFace> {
    let mut v = gen_population(n, Label::Healthy, seed).unwrap();
    v.extend(gen_population(n, Label::Disease, seed).unwrap());
    v
}

fn map_face(
    face: &FaceRecord,
    size: (usize, usize),
    mask: impl Fn(&RasterMask) -> RasterMask,
    point: impl Fn(Point) -> Point,
    swap: bool,
) -> FaceRecord {
    let eye = |e: &EyeRecord, side: EyeSide| {
        EyeRecord::new(
            side,
            mask(&e.sclera),
            mask(&e.iris),
            mask(&e.brow),
            e.id.clone(),
        )
        .unwrap()
    };
    let (r, l) = if swap {
        (&face.left, &face.right)
    } else {
        (&face.right, &face.left)
    };
    FaceRecord::new(
        face.id.clone(),
        eye(r, EyeSide::Right),
        eye(l, EyeSide::Left),
        Landmarks {
            nasion: point(face.landmarks.nasion),
            hairline_mid: point(face.landmarks.hairline_mid),
        },
        size,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn transform_roundtrip_is_tight(
        x in -500.0f64..500.0,
        y in -500.0f64..500.0,
        deg in -180.0f64..180.0,
        cx in 0.0f64..300.0,
        cy in 0.0f64..300.0,
    ) {
        let t = RigidTransform::rotation(Point::new(cx, cy), deg);
        let p = Point::new(x, y);
        prop_assert!(t.apply_inverse(t.apply(p)).distance(p) <= 0.51);
        prop_assert!(t.inverse().apply(t.apply(p)).distance(p) <= 1e-9);
    }
}

#[test]
fn rotation_preserves_mask_area() {
    for f in faces(5, 21) {
        for deg in [-20.0, -13.0, -5.0, 3.0, 10.0, 20.0] {
            let r = rotate_face(&f.face, deg).unwrap();
            for (a, b) in [(&f.face.right, &r.right), (&f.face.left, &r.left)] {
                for class in [MaskClass::Sclera, MaskClass::Iris, MaskClass::Brow] {
                    let (n0, n1) = (a.mask(class).count() as f64, b.mask(class).count() as f64);
                    assert!((n1 - n0).abs() / n0 < 0.02, "{class:?} {deg}: {n0} -> {n1}");
                }
            }
        }
    }
}

#[test]
fn normalisation_is_vertical_and_idempotent() {
    for f in faces(4, 22) {
        let rotated = rotate_face(&f.face, 10.0).unwrap();
        let (norm, t) = normalize_orientation(&rotated).unwrap();
        assert!((t.rotation_deg + 10.0).abs() < 1e-9);
        let axis = axis_from_landmarks(norm.landmarks.nasion, norm.landmarks.hairline_mid).unwrap();
        assert!(axis.tilt_from_vertical_deg().abs() < 0.5);
        let (_, again) = normalize_orientation(&norm).unwrap();
        assert!(again.rotation_deg.abs() < 0.1);
    }
    let f = &faces(1, 23)[0];
    let (same, t) = normalize_orientation(&f.face).unwrap();
    assert_eq!(t.rotation_deg, 0.0);
    assert_eq!(same, f.face);
}

#[test]
fn dystopia_survives_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut p = sample_face(&mut rng, Label::Healthy, "raised");
    // identical eyes, the right one 6 px higher
    p.left = p.right;
    p.left.center.x = 2.0 * p.nasion.x - p.right.center.x;
    p.left.iris_offset.x = -p.right.iris_offset.x;
    p.left.center.y = p.right.center.y + 6.0;
    let (face, _) = render_face(&p).unwrap();
    let i = feature_index("vertical_dystopia").unwrap();
    assert_eq!(measure_face(&face).px.get(i), Some(6.0));
    let (norm, _) = normalize_orientation(&rotate_face(&face, 10.0).unwrap()).unwrap();
    let d = measure_face(&norm).px.get(i).unwrap();
    assert!((d - 6.0).abs() <= 0.5, "{d}");
}

#[test]
fn measurements_are_translation_invariant() {
    for f in faces(3, 24) {
        let base = measure_face(&f.face).px;
        for (dx, dy) in [(1, 0), (-2, 1), (2, -2)] {
            let moved = map_face(
                &f.face,
                f.face.image_size,
                |m| m.translated(dx, dy),
                |p| Point::new(p.x + dx as f64, p.y + dy as f64),
                false,
            );
            let m = measure_face(&moved).px;
            for i in 0..N_FEATURES {
                match (base.get(i), m.get(i)) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-9, "{i}: {a} vs {b}"),
                    (a, b) => assert_eq!(a.is_some(), b.is_some()),
                }
            }
        }
    }
}

#[test]
fn mirroring_swaps_sides() {
    for f in faces(3, 25) {
        let w = f.face.image_size.0 as f64;
        let mirrored = map_face(
            &f.face,
            f.face.image_size,
            RasterMask::mirrored_horizontally,
            |p| Point::new(w - 1.0 - p.x, p.y),
            true,
        );
        let (a, b) = (measure_face(&f.face).px, measure_face(&mirrored).px);
        for i in 0..N_FEATURES {
            let j = Feature::from_index(i).unwrap().mirrored().index();
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-9, "{i}: {x} vs {y}"),
                (x, y) => assert_eq!(x.is_some(), y.is_some()),
            }
        }
    }
}

fn upsample2(m: &RasterMask) -> RasterMask {
    RasterMask::from_fn(2 * m.width(), 2 * m.height(), m.class(), |x, y| {
        m.get(x / 2, y / 2)
    })
}

#[test]
fn measurements_scale_with_the_image() {
    for f in faces(3, 26) {
        let (w, h) = f.face.image_size;
        let big = map_face(
            &f.face,
            (2 * w, 2 * h),
            upsample2,
            |p| Point::new(2.0 * p.x + 0.5, 2.0 * p.y + 0.5),
            false,
        );
        let (a, b) = (measure_face(&f.face), measure_face(&big));
        for i in 0..N_FEATURES {
            let linear = !matches!(Feature::from_index(i).unwrap(), Feature::Side(_, s) if s.is_dimensionless());
            if let (true, Some(x), Some(y)) = (linear, a.px.get(i), b.px.get(i)) {
                assert!((y - 2.0 * x).abs() <= 2.0, "{i}: {x} vs {y}");
            }
            if let (true, Some(x), Some(y)) = (linear, a.mm.get(i), b.mm.get(i)) {
                let k = a
                    .scale_right
                    .unwrap()
                    .mm_per_px()
                    .max(a.scale_left.unwrap().mm_per_px());
                assert!((y - x).abs() <= 2.0 * k, "{i}: {x} vs {y} mm");
            }
        }
    }
}

#[test]
fn structural_identities_hold() {
    for f in faces(20, 27) {
        let m = measure_face(&f.face).px;
        let icd = m.global(GlobalFeature::InnerCanthal).unwrap();
        let ocd = m.global(GlobalFeature::OuterCanthal).unwrap();
        assert!(icd <= ocd);
        for side in [EyeSide::Right, EyeSide::Left] {
            let (m1, m2) = (
                m.side(side, SideFeature::Mrd1),
                m.side(side, SideFeature::Mrd2),
            );
            let vpf = m.side(side, SideFeature::VerticalFissure).unwrap();
            assert!((vpf - (m1.unwrap() + m2.unwrap())).abs() <= 1e-9);
        }
    }
}

#[test]
fn synthetic_faces_match_their_truth() {
    for f in faces(40, 28) {
        let m = measure_face(&f.face).px;
        for i in 0..N_FEATURES {
            let (Some(got), Some(want)) = (m.get(i), f.truth.get(i)) else {
                continue;
            };
            let tol = match Feature::from_index(i).unwrap() {
                Feature::Side(_, SideFeature::ScleralAreaRatio) => continue,
                _ => 1.0,
            };
            assert!(
                (got - want).abs() <= tol,
                "{} {}: {got} vs {want}",
                f.params.id,
                i
            );
        }
    }
}

#[test]
fn rendering_is_deterministic() {
    let a = gen_population(6, Label::Disease, 8).unwrap();
    let b = gen_population(6, Label::Disease, 8).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.face, y.face);
        assert_eq!(x.truth, y.truth);
    }
}
