//! Truncated Taylor jets carrying raw derivatives.
//!
//! [`Jet1`] holds `f, f', ..., f^(N)` of a function of one variable and
//! [`Jet2`] holds every partial `d^(i+j) f / du^i dv^j` with `i + j <= N`.
//! Both implement [`Ring`](crate::expr::Ring), so evaluating a parsed
//! expression over jets yields exact derivatives of the expression.
//!
//! Elementary functions are applied by composing the univariate derivative
//! stack of the function with the jet (Faà di Bruno in Horner form), so
//! the value slot always matches plain `f64` evaluation.

mod jet1;
mod jet2;
mod stack;

pub use jet1::Jet1;
pub use jet2::Jet2;

use nalgebra::Vector3;
use thiserror::Error;

/// Highest supported order of a [`Jet1`].
pub const MAX_JET1_ORDER: usize = 6;
/// Highest supported total order of a [`Jet2`].
pub const MAX_JET2_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("requested order {requested} exceeds available order {available}")]
    OrderMismatch { requested: usize, available: usize },
    #[error("order {order} is not supported (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
}

fn binom(n: usize, k: usize) -> f64 {
    const ROWS: [[f64; 7]; 7] = [
        [1., 0., 0., 0., 0., 0., 0.],
        [1., 1., 0., 0., 0., 0., 0.],
        [1., 2., 1., 0., 0., 0., 0.],
        [1., 3., 3., 1., 0., 0., 0.],
        [1., 4., 6., 4., 1., 0., 0.],
        [1., 5., 10., 10., 5., 1., 0.],
        [1., 6., 15., 20., 15., 6., 1.],
    ];
    ROWS[n][k]
}

const FACTORIAL: [f64; 7] = [1., 1., 2., 6., 24., 120., 720.];

/// Three component jets of a point in 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetVec3<J>(pub [J; 3]);

impl JetVec3<Jet1> {
    pub fn order(&self) -> usize {
        self.0.iter().map(Jet1::order).min().unwrap_or(0)
    }

    /// The vector of k-th derivatives.
    pub fn deriv(&self, k: usize) -> Vector3<f64> {
        Vector3::new(self.0[0].deriv(k), self.0[1].deriv(k), self.0[2].deriv(k))
    }

    pub fn value(&self) -> Vector3<f64> {
        self.deriv(0)
    }
}

impl JetVec3<Jet2> {
    pub fn order(&self) -> usize {
        self.0.iter().map(Jet2::order).min().unwrap_or(0)
    }

    /// The vector of partials `d^(i+j) X / du^i dv^j`.
    pub fn partial(&self, i: usize, j: usize) -> Vector3<f64> {
        Vector3::new(self.0[0].partial(i, j), self.0[1].partial(i, j), self.0[2].partial(i, j))
    }

    pub fn value(&self) -> Vector3<f64> {
        self.partial(0, 0)
    }
}

/// Derivatives of the curve `t -> X(u(t), v(t))` through order `order`.
///
/// `surface` must be expanded at `(u.value(), v.value())`. The result is an
/// exact truncated-polynomial substitution of the jets of `u` and `v` into
/// the Taylor polynomial of `X`.
pub fn compose_curve_in_surface(
    surface: &JetVec3<Jet2>,
    u: &Jet1,
    v: &Jet1,
    order: usize,
) -> Result<JetVec3<Jet1>, JetError> {
    let available = surface.order().min(u.order()).min(v.order());
    if order > available {
        return Err(JetError::OrderMismatch { requested: order, available });
    }
    let du = u.truncate(order).delta();
    let dv = v.truncate(order).delta();
    let mut pu = vec![Jet1::constant(order, 1.0)];
    let mut pv = vec![Jet1::constant(order, 1.0)];
    for k in 1..=order {
        pu.push(pu[k - 1] * du);
        pv.push(pv[k - 1] * dv);
    }
    let mut out = [Jet1::constant(order, 0.0); 3];
    for (c, comp) in out.iter_mut().enumerate() {
        let x = &surface.0[c];
        let mut acc = Jet1::constant(order, x.partial(0, 0));
        for d in 1..=order {
            for i in 0..=d {
                let j = d - i;
                let coeff = x.partial(i, j) / (FACTORIAL[i] * FACTORIAL[j]);
                if coeff != 0.0 {
                    acc = acc + (pu[i] * pv[j]).scale(coeff);
                }
            }
        }
        *comp = acc;
    }
    Ok(JetVec3(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn surface_jets(src: [&str; 3], u0: f64, v0: f64, order: usize) -> JetVec3<Jet2> {
        let u = Jet2::var_u(order, u0);
        let v = Jet2::var_v(order, v0);
        let comps = src.map(|s| parse_expression(s, &["u", "v"]).unwrap().eval(order, &[("u", u), ("v", v)]).unwrap());
        JetVec3(comps)
    }

    #[test]
    fn monomial_curve_on_graph_surface() {
        let x = surface_jets(["u", "v", "u*v"], 1.0, 1.0, 3);
        let u = Jet1::variable(3, 1.0);
        let v = Jet1::variable(3, 1.0) * Jet1::variable(3, 1.0);
        let a = compose_curve_in_surface(&x, &u, &v, 3).unwrap();
        // alpha(t) = (t, t^2, t^3) at t = 1
        assert_eq!(a.deriv(0), Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(a.deriv(1), Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(a.deriv(2), Vector3::new(0.0, 2.0, 6.0));
        assert_eq!(a.deriv(3), Vector3::new(0.0, 0.0, 6.0));
    }

    #[test]
    fn line_in_u_direction_gives_u_partials() {
        let x = surface_jets(["cos(u)*sin(v)", "u^3*v", "exp(u-v)"], 0.3, -0.7, 4);
        let u = Jet1::variable(4, 0.3);
        let v = Jet1::constant(4, -0.7);
        let a = compose_curve_in_surface(&x, &u, &v, 4).unwrap();
        for k in 0..=4 {
            let diff = a.deriv(k) - x.partial(k, 0);
            assert!(diff.norm() < 1e-14, "k={k} diff={diff}");
        }
    }

    #[test]
    fn spherical_helix_velocity() {
        let x = surface_jets(["cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"], 0.0, 0.0, 3);
        let u = Jet1::variable(3, 0.0).scale(8.0);
        let v = Jet1::variable(3, 0.0);
        let a = compose_curve_in_surface(&x, &u, &v, 3).unwrap();
        assert!((a.deriv(1) - Vector3::new(0.0, 8.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn order_beyond_inputs_is_rejected() {
        let x = surface_jets(["u", "v", "u*v"], 0.0, 0.0, 2);
        let u = Jet1::variable(3, 0.0);
        let err = compose_curve_in_surface(&x, &u, &u, 3).unwrap_err();
        assert_eq!(err, JetError::OrderMismatch { requested: 3, available: 2 });
    }
}
