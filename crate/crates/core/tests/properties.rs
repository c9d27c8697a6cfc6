use henonlab::periodic::{find_periodic_orbits, OrbitSearch};
use henonlab::potential::{GreenOptions, Potential};
use henonlab::{Direction, HenonMap, Point2C, C64};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2C> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, c, d)| Point2C::new(C64::new(a, b), C64::new(c, d)))
}

fn map() -> impl Strategy<Value = HenonMap> {
    (-2.0..2.0f64, -1.0..1.0f64, 0.05..0.9f64, 0.0..6.28f64).prop_map(|(cr, ci, r, th)| {
        HenonMap::new(
            vec![C64::new(cr, ci), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            C64::from_polar(r, th),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_map(f in map(), z in point()) {
        let w = f.apply(z).unwrap();
        let back = f.apply_inverse(w).unwrap();
        prop_assert!((back - z).norm() < 1e-12 * (1.0 + w.norm() / f.jacobian().norm()));
    }

    #[test]
    fn differential_has_constant_determinant(f in map(), z in point()) {
        let d = f.differential(z).det();
        prop_assert!((d - f.jacobian()).norm() < 1e-12);
    }

    #[test]
    fn green_scales_by_degree(f in map(), r in 5.0..20.0f64, th in 0.0..6.28f64) {
        let pot = Potential::new(&f).unwrap();
        let z = Point2C::new(C64::from_polar(r * pot.radius(), th), C64::new(0.1, 0.0));
        let opts = GreenOptions::default();
        let g = pot.green(z, Direction::Forward, &opts).unwrap();
        let g1 = pot.green(f.apply(z).unwrap(), Direction::Forward, &opts).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!((g1 - 2.0 * g).abs() < 1e-6 * g1.max(1.0));
    }
}

#[test]
fn fixed_point_search_finds_both_fixed_points() {
    let f = HenonMap::real(&[-1.0, 0.0, 1.0], 0.3).unwrap();
    let orbits = find_periodic_orbits(&f, 1, &OrbitSearch::new(&f, 200).unwrap()).unwrap();
    assert_eq!(orbits.len(), 2);
    for o in &orbits {
        let p = o.points[0];
        assert!((f.apply(p).unwrap() - p).norm() < 1e-10);
    }
}
