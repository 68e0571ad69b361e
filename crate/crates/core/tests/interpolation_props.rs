use std::f64::consts::PI;

use circum_core::geometry::{metrics, Affine2, Triangle};
use circum_core::interpolation::{basis, interpolate_field, interpolation_residual, nodes, ErrorField};
use circum_core::norms::{FieldWithDerivatives, SinSin};
use circum_core::polynomial::{coeff_count, seminorm_p2_exact, Poly2};
use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

fn well_shaped() -> impl Strategy<Value = Triangle> {
    prop::array::uniform6(-1.0f64..1.0).prop_filter_map("shape", |c| {
        Triangle::from_coords(c)
            .ok()
            .filter(|t| t.area() > 0.25 && metrics(t).theta_min > PI / 12.0)
    })
}

fn poly_of_degree(d: usize) -> impl Strategy<Value = Poly2> {
    prop::collection::vec(-1.0f64..1.0, coeff_count(d)).prop_map(move |c| Poly2::from_coeffs(d, c).unwrap())
}

fn order_and_poly() -> impl Strategy<Value = (usize, Poly2)> {
    (1usize..=5).prop_flat_map(|k| (Just(k), poly_of_degree(k)))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn reproduces_polynomials_of_its_order(t in well_shaped(), (k, p) in order_and_poly()) {
        let e = interpolation_residual(&p, k, &t).unwrap();
        let scale = 1.0 + seminorm_p2_exact(&p, k, &t).unwrap();
        for m in 0..=k {
            prop_assert!(seminorm_p2_exact(&e, m, &t).unwrap() <= 1e-10 * scale);
        }
    }

    #[test]
    fn nodes_follow_affine_maps(t in well_shaped(), m in prop::array::uniform4(-2.0f64..2.0), k in 1usize..=5) {
        let map = Affine2 { m: Matrix2::new(m[0], m[1], m[2], m[3]), t: Vector2::new(0.3, -0.7) };
        prop_assume!(map.m.determinant().abs() > 0.1);
        let image = match t.mapped(&map) { Ok(i) => i, Err(_) => return Ok(()) };
        let mapped: Vec<_> = nodes(k, &t).unwrap().nodes.iter().map(|x| map.apply(*x)).collect();
        let direct = nodes(k, &image).unwrap().nodes;
        // orientation may flip, so compare as sets
        for x in &mapped {
            prop_assert!(direct.iter().any(|y| (*x - *y).norm() < 1e-12));
        }
    }

    #[test]
    fn interpolant_commutes_with_affine_maps(t in well_shaped(), m in prop::array::uniform4(-2.0f64..2.0), k in 1usize..=4) {
        let map = Affine2 { m: Matrix2::new(m[0], m[1], m[2], m[3]), t: Vector2::new(-0.2, 0.4) };
        prop_assume!(map.m.determinant().abs() > 0.25);
        let image = t.mapped(&map).unwrap();
        // I_{F(T)} v ∘ F = I_T (v ∘ F)
        let v = SinSin::new();
        let on_image = interpolate_field(&v, k, &image).unwrap().compose_affine(&map);
        let pulled = circum_core::norms::FnField::new("v∘F", 0, move |_, x| v.value(map.apply(x)));
        let on_t = interpolate_field(&pulled, k, &t).unwrap();
        for x in nodes(k + 1, &t).unwrap().nodes {
            prop_assert!((on_image.eval(x) - on_t.eval(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn partition_of_unity(t in well_shaped(), k in 1usize..=5, b in prop::array::uniform3(0.0f64..1.0)) {
        let s = b[0] + b[1] + b[2] + 1e-9;
        let x = t.point_at([b[0] / s, b[1] / s, b[2] / s]);
        let total: f64 = basis(k, &t).unwrap().eval_all(x).iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_field_vanishes_at_nodes(t in well_shaped(), k in 1usize..=5) {
        let v = SinSin::new();
        let e = ErrorField::new(&v, k, &t).unwrap();
        for x in nodes(k, &t).unwrap().nodes {
            prop_assert!(e.value(x).abs() < 1e-11);
        }
    }
}
