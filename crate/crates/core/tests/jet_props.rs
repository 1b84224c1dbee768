mod common;

use affinemetrics::expr::{parse_expression, Ring};
use affinemetrics::jets::{compose_curve_in_surface, Jet1, Jet2};
use affinemetrics::numerics::finite_diff;
use affinemetrics::surfgeo::CATALOG;
use common::{domain_point, rng, surface};
use proptest::prelude::*;

fn agree(jet: f64, fd: f64) -> bool {
    (jet - fd).abs() <= 1e-6 * jet.abs().max(fd.abs()) || (jet - fd).abs() <= 1e-9
}

/// Direct stencils on the point function, orders 1 and 2.
fn fd_partial(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, i: usize, j: usize) -> f64 {
    match (i, j) {
        (_, 0) => finite_diff(|x| f(x, v), u, i, [0.0, 1e-3, 5e-3][i]),
        (0, _) => finite_diff(|y| f(u, y), v, j, [0.0, 1e-3, 5e-3][j]),
        _ => finite_diff(|x| finite_diff(|y| f(x, y), v, 1, 1e-3), u, 1, 1e-3),
    }
}

#[test]
fn surface_partials_match_finite_differences() {
    let mut r = rng(11);
    for name in CATALOG {
        let s = surface(name);
        for _ in 0..40 {
            let (u, v) = domain_point(&mut r, &s, 0.05);
            let jets = s.jets(u, v, 3).unwrap();
            for c in 0..3 {
                let f = |x: f64, y: f64| s.components()[c].eval_real(&[("u", x), ("v", y)]).unwrap();
                for d in 1..=2 {
                    for i in 0..=d {
                        let jet = jets.0[c].partial(i, d - i);
                        let fd = fd_partial(&f, u, v, i, d - i);
                        assert!(
                            agree(jet, fd),
                            "{name} component {c} partial ({i},{}) at ({u},{v}): {jet} vs {fd}",
                            d - i
                        );
                    }
                }
                // every partial through order 3 against a first difference
                // of the partial one order below
                for d in 1..=3 {
                    for i in 0..=d {
                        let j = d - i;
                        let lower = |x: f64, y: f64, a: usize, b: usize| s.jets(x, y, 2).unwrap().0[c].partial(a, b);
                        let fd = if i > 0 {
                            finite_diff(|x| lower(x, v, i - 1, j), u, 1, 1e-3)
                        } else {
                            finite_diff(|y| lower(u, y, 0, j - 1), v, 1, 1e-3)
                        };
                        let jet = jets.0[c].partial(i, j);
                        assert!(agree(jet, fd), "{name} component {c} partial ({i},{j}) at ({u},{v}): {jet} vs {fd}");
                    }
                }
            }
        }
    }
}

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec(-2i32..=2, 1..=4)
        .prop_map(|cs| cs.iter().enumerate().map(|(k, c)| format!("({c})*t^{k}")).collect::<Vec<_>>().join(" + "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_matches_substituted_expression(
        pu in poly(),
        pv in poly(),
        t0 in -1.0f64..1.0,
    ) {
        let surf = ["u*v + u^3", "v^2 - 2*u", "u^2*v^2 + v"];
        let uast = parse_expression(&pu, &["t"]).unwrap();
        let vast = parse_expression(&pv, &["t"]).unwrap();
        let n = 4;
        let tj = Jet1::variable(n, t0);
        let uj = uast.eval(n, &[("t", tj)]).unwrap();
        let vj = vast.eval(n, &[("t", tj)]).unwrap();
        let xs: [Jet2; 3] = std::array::from_fn(|c| {
            let a = parse_expression(surf[c], &["u", "v"]).unwrap();
            a.eval(n, &[("u", Jet2::var_u(n, uj.value())), ("v", Jet2::var_v(n, vj.value()))]).unwrap()
        });
        let composed = compose_curve_in_surface(&affinemetrics::jets::JetVec3(xs), &uj, &vj, n).unwrap();
        for c in 0..3 {
            let direct = parse_expression(surf[c], &["u", "v"]).unwrap().substitute("u", &uast).substitute("v", &vast);
            let d = direct.eval(n, &[("t", tj)]).unwrap();
            for k in 0..=n {
                let (a, b) = (composed.0[c].deriv(k), d.deriv(k));
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "component {c} order {k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn polynomial_jets_are_exact(c in prop::collection::vec(-3i32..=3, 5), t0 in -2i32..=2) {
        // p(t) = sum c_k t^k at an integer point: every derivative is an integer
        let src = c.iter().enumerate().map(|(k, ck)| format!("({ck})*t^{k}")).collect::<Vec<_>>().join(" + ");
        let j = parse_expression(&src, &["t"]).unwrap().eval(6, &[("t", Jet1::variable(6, t0 as f64))]).unwrap();
        for m in 0..=6 {
            let mut exact = 0i64;
            for (k, &ck) in c.iter().enumerate() {
                if k >= m {
                    let falling: i64 = ((k - m + 1)..=k).map(|x| x as i64).product();
                    exact += ck as i64 * falling * (t0 as i64).pow((k - m) as u32);
                }
            }
            let x = j.deriv(m);
            prop_assert!((x - exact as f64).abs() <= 4.0 * f64::EPSILON * (exact as f64).abs().max(1.0), "order {m}: {x} vs {exact}");
        }
    }

    #[test]
    fn inverse_series_composes_to_identity(a in 0.5f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0, t0 in -0.5f64..0.5) {
        let f = parse_expression(&format!("{a}*t + ({b})*t^2 + ({c})*sin(t)"), &["t"]).unwrap();
        let j = f.eval(6, &[("t", Jet1::variable(6, t0))]).unwrap();
        prop_assume!(j.deriv(1).abs() > 0.1);
        let inv = j.invert(t0).unwrap();
        let id = Jet1::compose(&inv, &j);
        prop_assert!((id.deriv(0) - t0).abs() < 1e-14);
        prop_assert!((id.deriv(1) - 1.0).abs() < 1e-12);
        for k in 2..=6 {
            prop_assert!(id.deriv(k).abs() < 1e-8 * (1.0 + j.deriv(1).abs().powi(-(2 * k as i32))), "order {k}: {}", id.deriv(k));
        }
    }
}
