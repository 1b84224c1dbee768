mod common;

use std::sync::Arc;

use affinemetrics::commensurate::{
    check_corollary_euclidean, commensurate_residual, commensurate_residual_general, induced_arclength,
    integrate_commensurate, CommensurateIvp, InducedOrientation, ParamCurve, SolutionTrace, SolveOptions, ThetaDd,
    ThetaState,
};
use affinemetrics::curvegeo::{affine_arclength, curve_jets, euclidean_frenet};
use affinemetrics::expr::{parse_expression, Ring};
use affinemetrics::numerics::finite_diff;
use common::{interval, rng, surface, translation, unimodular};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::Rng;

const QUAD_TOL: f64 = 1e-11;

fn trace(name: &str, u0: f64, v0: f64, theta0: f64, omega0: f64, t_max: f64) -> Arc<SolutionTrace> {
    let ivp =
        CommensurateIvp { surface: surface(name), u0, v0, theta0, omega0, t_max, options: SolveOptions::default() };
    Arc::new(integrate_commensurate(&ivp).unwrap())
}

fn max_scaled_residual(pc: &ParamCurve, t0: f64, t1: f64) -> f64 {
    (0..=40)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / 40.0;
            let (u, v) = pc.uv_jets(t, 3).unwrap();
            let d = |j: &affinemetrics::jets::Jet1| [j.deriv(1), j.deriv(2), j.deriv(3)];
            let r = commensurate_residual_general(pc.surface(), u.value(), v.value(), d(&u), d(&v), pc.sign()).unwrap();
            r.value.abs() / r.scale()
        })
        .fold(0.0, f64::max)
}

#[test]
fn arclengths_agree_exactly_when_residual_vanishes() {
    let tr = trace("paraboloid", 0.4, 1.5, 0.8, 0.3, 0.5);
    let (t0, t1) = tr.t_range();
    let on = ParamCurve::from_trace(tr, ThetaDd::Model).unwrap();
    assert!(max_scaled_residual(&on, t0, t1) <= 1e-9);
    let sa = affine_arclength(&on, t0, t1, QUAD_TOL).unwrap();
    let ss = induced_arclength(&on, t0, t1, QUAD_TOL).unwrap();
    assert!((sa.value - ss.value).abs() <= 10.0 * QUAD_TOL * ss.value + sa.error_estimate + ss.error_estimate);

    let off = ParamCurve::from_exprs(
        surface("paraboloid"),
        "0.4 - t",
        "1.5 + t^2/2",
        interval(0.0, 0.5),
        InducedOrientation::Auto,
    )
    .unwrap();
    assert!(max_scaled_residual(&off, 0.0, 0.5) > 1e-9);
    let sa = affine_arclength(&off, 0.0, 0.5, QUAD_TOL).unwrap();
    let ss = induced_arclength(&off, 0.0, 0.5, QUAD_TOL).unwrap();
    assert!((sa.value - ss.value).abs() > 1e3 * QUAD_TOL * ss.value, "{} vs {}", sa.value, ss.value);
}

#[test]
fn reparametrized_trace_stays_commensurate() {
    // phi(t) = t + 0.3 t^2 maps [0, 0.65] into [0, 0.78]
    let tr = trace("paraboloid", -0.7, 2.0, 2.2, -0.4, 0.8);
    let pc = ParamCurve::from_trace(tr, ThetaDd::Model).unwrap();
    let phi = parse_expression("t + 0.3*t^2", &["t"]).unwrap();
    let re = pc.reparametrized(phi, interval(0.0, 0.65));
    let sa = affine_arclength(&re, 0.0, 0.65, QUAD_TOL).unwrap();
    let ss = induced_arclength(&re, 0.0, 0.65, QUAD_TOL).unwrap();
    assert!((sa.value - ss.value).abs() <= 10.0 * QUAD_TOL * ss.value + sa.error_estimate + ss.error_estimate);
    let direct = induced_arclength(&pc, 0.0, 0.65 + 0.3 * 0.65 * 0.65, QUAD_TOL).unwrap();
    assert!((ss.value - direct.value).abs() <= 1e-9 * direct.value);
}

#[test]
fn trace_keeps_unit_parameter_speed() {
    for tr in [trace("sphere", 0.3, 0.2, 1.0, 0.5, 1.0), trace("paraboloid", 0.0, 1.0, -0.5, 1.0, 1.0)] {
        let pc = ParamCurve::from_trace(tr.clone(), ThetaDd::Model).unwrap();
        for n in &tr.nodes {
            let (u, v) = pc.uv_jets(n.t, 1).unwrap();
            assert!((u.deriv(1).powi(2) + v.deriv(1).powi(2) - 1.0).abs() <= 1e-9);
        }
        let (t0, t1) = tr.t_range();
        for k in 1..20 {
            // independent check on the interpolated state
            let t = t0 + (t1 - t0) * k as f64 / 20.0;
            let du = finite_diff(|s| tr.state_at(s).unwrap()[0], t, 1, 1e-3);
            let dv = finite_diff(|s| tr.state_at(s).unwrap()[1], t, 1, 1e-3);
            assert!((du * du + dv * dv - 1.0).abs() <= 1e-6, "{}", du * du + dv * dv);
        }
    }
}

#[test]
fn sphere_traces_have_geodesic_curvature_linear_in_arclength() {
    let tr = trace("sphere", -0.5, 0.1, 0.4, 0.2, 1.5);
    let pc = ParamCurve::from_trace(tr.clone(), ThetaDd::Model).unwrap();
    let geodesic = |t: f64| {
        let f = euclidean_frenet(&pc, t).unwrap();
        let p = curve_jets(&pc, t, 1).unwrap().value();
        let n = p.normalize();
        f.curvature * Vector3::from(f.e2).dot(&n.cross(&Vector3::from(f.e1)))
    };
    let (t0, t1) = tr.t_range();
    let k0 = geodesic(t0);
    for k in 1..=10 {
        let t = t0 + (t1 - t0) * k as f64 / 10.0;
        let s = induced_arclength(&pc, t0, t, QUAD_TOL).unwrap().value;
        assert!(((geodesic(t) - k0).abs() - s).abs() <= 1e-7, "t = {t}: {} vs {s}", geodesic(t) - k0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_is_equiaffine_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let name = if r.gen_bool(0.5) { "paraboloid" } else { "helicoid" };
        let s = surface(name);
        let image = s.affine_image(&unimodular(&mut r), &translation(&mut r));
        let (u, v) = common::domain_point(&mut r, &s, 0.1);
        let st = ThetaState {
            u,
            v,
            theta: r.gen_range(-3.0..3.0),
            theta_p: r.gen_range(-2.0..2.0),
            theta_pp: r.gen_range(-2.0..2.0),
        };
        let (a, b) = (commensurate_residual(&s, &st, 1.0).unwrap(), commensurate_residual(&image, &st, 1.0).unwrap());
        prop_assert!((a.value - b.value).abs() <= 1e-8 * a.scale(), "{a:?} vs {b:?}");
    }

    #[test]
    fn residual_equals_scaled_corollary_deviation(
        cu in prop::array::uniform3(-1.0f64..1.0),
        cv in prop::array::uniform3(-1.0f64..1.0),
        t in 0.1f64..0.9,
    ) {
        // det = kappa^2 tau |alpha'|^6 and I_aff(alpha') = sigma |K|^(-1/4) k_n |alpha'|^2
        let u = format!("0.3 + ({})*t + ({})*t^2 + ({})*t^3", cu[0], cu[1], cu[2]);
        let v = format!("1.5 + ({})*t + ({})*t^2 + ({})*t^3", cv[0], cv[1], cv[2]);
        let pc = ParamCurve::from_exprs(surface("paraboloid"), &u, &v, interval(0.0, 1.0), InducedOrientation::Canonical).unwrap();
        let c = check_corollary_euclidean(&pc, t);
        prop_assume!(matches!(c, Ok(ref c) if !c.curve_degenerate));
        let c = c.unwrap();
        let (uj, vj) = pc.uv_jets(t, 3).unwrap();
        let d = |j: &affinemetrics::jets::Jet1| [j.deriv(1), j.deriv(2), j.deriv(3)];
        let res = commensurate_residual_general(pc.surface(), uj.value(), vj.value(), d(&uj), d(&vj), 1.0).unwrap();
        let speed = curve_jets(&pc, t, 1).unwrap().deriv(1).norm();
        let expect = speed.powi(6) * (c.lhs - c.rhs);
        prop_assert!((res.value - expect).abs() <= 1e-9 * res.scale(), "{} vs {expect}", res.value);
    }
}
