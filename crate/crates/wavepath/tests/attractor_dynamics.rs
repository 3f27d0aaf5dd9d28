use proptest::prelude::*;

use wavepath::attractor::{set_diameter, Attractor, AttractorParams};
use wavepath::manifold::{Manifold, Rect};

fn warm(m: &Manifold, x: i64, y: i64) -> Attractor {
    Attractor::init_bump(m, m.node(x, y).unwrap(), &AttractorParams::default(), 0).unwrap()
}

#[test]
fn bump_holds_still_without_drive() {
    let m = Manifold::open(41, 41).unwrap();
    let mut a = warm(&m, 20, 20);
    let c0 = a.center();
    for _ in 0..1000 {
        a.step().unwrap();
    }
    assert!(m.distance(c0, a.center()) <= 1.0);
    let d = set_diameter(&m, &a.footprint());
    assert!(d >= 3, "footprint diameter {d}");
}

#[test]
fn bump_drifts_along_the_direction_vector() {
    let m = Manifold::open(41, 41).unwrap();
    let mut a = warm(&m, 20, 20);
    a.set_delta((2.0 / 41.0, 0.0));
    for _ in 0..5 {
        a.step().unwrap();
    }
    let (x, y) = m.coords(a.center());
    assert!(x > 20, "moved to x = {x}");
    assert_eq!(y, 20);

    let mut b = warm(&m, 20, 20);
    b.set_delta((0.0, -2.0 / 41.0));
    for _ in 0..5 {
        b.step().unwrap();
    }
    let (x, y) = m.coords(b.center());
    assert!(y < 20 && x == 20, "moved to ({x}, {y})");
}

#[test]
fn one_step_shift_stops_when_drive_stops() {
    let m = Manifold::open(41, 41).unwrap();
    let mut a = warm(&m, 20, 20);
    a.set_delta((3.0 / 41.0, 3.0 / 41.0));
    a.step().unwrap();
    a.set_delta((0.0, 0.0));
    for _ in 0..10 {
        a.step().unwrap();
    }
    let c1 = a.center();
    for _ in 0..200 {
        a.step().unwrap();
    }
    assert!(m.distance(c1, a.center()) <= 1.0);
}

#[test]
fn bump_respects_walls() {
    let m = Manifold::new(41, 41, &[Rect::new(24, 0, 26, 40)]).unwrap();
    let mut a = warm(&m, 20, 20);
    a.set_delta((2.0 / 41.0, 0.0));
    for _ in 0..30 {
        a.step().unwrap();
        assert!(!m.is_blocked(a.center()));
        for (k, &v) in a.activity().iter().enumerate() {
            assert!(v == 0.0 || !m.blocked()[k]);
        }
    }
}

#[test]
fn jitter_is_seeded() {
    let m = Manifold::open(21, 21).unwrap();
    let p = AttractorParams {
        jitter: 0.01,
        ..AttractorParams::default()
    };
    let s = m.node(10, 10).unwrap();
    let a = Attractor::init_bump(&m, s, &p, 3).unwrap();
    let b = Attractor::init_bump(&m, s, &p, 3).unwrap();
    let c = Attractor::init_bump(&m, s, &p, 4).unwrap();
    assert_eq!(a.activity(), b.activity());
    assert_ne!(a.activity(), c.activity());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn activity_stays_normalized_and_nonnegative(
        dx in -0.03f64..0.03,
        dy in -0.03f64..0.03,
        steps in 1usize..8,
        wall in 0i64..3,
    ) {
        let m = Manifold::new(31, 31, &[Rect::new(22 + wall, 0, 23 + wall, 20)]).unwrap();
        let mut a = Attractor::init_bump(&m, m.node(10, 15).unwrap(), &AttractorParams::default(), 0).unwrap();
        a.set_delta((dx, dy));
        for _ in 0..steps {
            a.step().unwrap();
        }
        let sum: f64 = a.activity().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        for (k, &v) in a.activity().iter().enumerate() {
            prop_assert!(v >= 0.0 && v.is_finite());
            if m.blocked()[k] {
                prop_assert_eq!(v, 0.0);
            }
        }
        prop_assert!(!m.is_blocked(a.center()));
    }

    #[test]
    fn zero_drive_bump_is_translation_invariant(x in 8i64..23, y in 8i64..23) {
        let m = Manifold::open(31, 31).unwrap();
        let a = warm(&m, x, y);
        prop_assert_eq!(a.center(), m.node(x, y).unwrap());
        let ref_a = warm(&m, 15, 15);
        prop_assert_eq!(a.footprint().len(), ref_a.footprint().len());
    }
}
