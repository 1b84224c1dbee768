mod common;

use affinemetrics::domain::Rect;
use affinemetrics::surfgeo::{
    affine_first_fundamental, affine_lmn, check_reparam_covariance, classify_point, fundamental_forms_euclid,
    gauss_curvature, normal_curvature, PointClass, SurfaceDef, CATALOG,
};
use common::{domain_point, rel, rng, surface, translation, unimodular};
use nalgebra::Matrix2;
use proptest::prelude::*;
use rand::Rng;

fn nondegenerate(s: &SurfaceDef, u: f64, v: f64) -> bool {
    matches!(classify_point(s, u, v), Ok(PointClass::Elliptic | PointClass::Hyperbolic))
}

fn coeff_close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    let scale = b.iter().chain(a.iter()).map(|x| x.abs()).fold(0.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn catalog_point() -> impl Strategy<Value = (&'static str, u64)> {
    (0..CATALOG.len(), any::<u64>()).prop_map(|(k, seed)| (CATALOG[k], seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn affine_form_is_rescaled_second_form((name, seed) in catalog_point()) {
        let s = surface(name);
        let mut r = rng(seed);
        let (u, v) = domain_point(&mut r, &s, 0.0);
        prop_assume!(nondegenerate(&s, u, v));
        let f = affine_first_fundamental(&s, u, v).unwrap();
        let e = fundamental_forms_euclid(&s, u, v).unwrap();
        let k = gauss_curvature(&s, u, v).unwrap();
        let expect = e.second.scale(k.abs().powf(-0.25)).coefficients();
        prop_assert!(coeff_close(f.form.coefficients(), expect, 1e-9), "{:?} vs {expect:?}", f.form);
    }

    #[test]
    fn determinants_are_normal_components_times_area((name, seed) in catalog_point()) {
        let s = surface(name);
        let mut r = rng(seed);
        let (u, v) = domain_point(&mut r, &s, 0.0);
        let lmn = affine_lmn(&s, u, v).unwrap().coefficients();
        let e = fundamental_forms_euclid(&s, u, v).unwrap();
        let area = e.first.discriminant().sqrt();
        let efg = e.second.scale(e.orientation * area).coefficients();
        prop_assert!(coeff_close(lmn, efg, 1e-10), "{lmn:?} vs {efg:?}");
    }

    #[test]
    fn equiaffine_maps_preserve_form_and_class((name, seed) in catalog_point()) {
        let s = surface(name);
        let mut r = rng(seed);
        let (u, v) = domain_point(&mut r, &s, 0.0);
        let image = s.affine_image(&unimodular(&mut r), &translation(&mut r));
        let (c0, c1) = (classify_point(&s, u, v).unwrap(), classify_point(&image, u, v).unwrap());
        if c0 != PointClass::Degenerate {
            prop_assert_eq!(c0, c1);
            let f0 = affine_first_fundamental(&s, u, v).unwrap().form.coefficients();
            let f1 = affine_first_fundamental(&image, u, v).unwrap().form.coefficients();
            prop_assert!(coeff_close(f1, f0, 1e-9), "{f0:?} vs {f1:?}");
        }
    }

    #[test]
    fn reparametrization_scales_discriminant_by_fourth_power((name, seed) in catalog_point()) {
        let s = surface(name);
        let mut r = rng(seed);
        let (u, v) = domain_point(&mut r, &s, 0.05);
        let j: Matrix2<f64> = Matrix2::from_fn(|_, _| r.gen_range(-2.0..2.0));
        prop_assume!(j.determinant().abs() > 0.05);
        let (lhs, rhs) = check_reparam_covariance(&s, u, v, &j).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-300) || (lhs == 0.0 && rhs == 0.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn swapping_parameters_keeps_the_point_class() {
    let mut r = rng(21);
    for name in CATALOG {
        let s = surface(name);
        let swapped_src: Vec<String> =
            s.sources().iter().map(|c| c.replace('u', "#").replace('v', "u").replace('#', "v")).collect();
        let d = s.domain();
        let swapped =
            SurfaceDef::parse([&swapped_src[0], &swapped_src[1], &swapped_src[2]], Rect::new(d.v, d.u)).unwrap();
        for _ in 0..50 {
            let (u, v) = domain_point(&mut r, &s, 0.0);
            assert_eq!(
                classify_point(&s, u, v).unwrap(),
                classify_point(&swapped, v, u).unwrap(),
                "{name} at ({u},{v})"
            );
        }
    }
}

#[test]
fn swap_map_on_helicoid_has_unit_fourth_power() {
    let j = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    let (lhs, rhs) = check_reparam_covariance(&surface("helicoid"), 0.7, 1.1, &j).unwrap();
    assert!(rel(lhs, rhs) < 1e-14);
}

#[test]
fn sphere_normal_curvature_is_one() {
    let s = surface("sphere");
    let mut r = rng(22);
    for _ in 0..50 {
        let (u, v) = domain_point(&mut r, &s, 0.0);
        let (du, dv) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let k = normal_curvature(&s, u, v, du, dv).unwrap();
        assert!((k.abs() - 1.0).abs() < 1e-12, "{k}");
    }
}
