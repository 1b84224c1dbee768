//! Induced arc length of curves in surfaces, the commensurateness residual
//! `det[a' a'' a'''] - I_aff(a')^3`, and generation of commensurate curves.
//!
//! Signs: on hyperbolic surfaces the affine first fundamental form is only
//! defined up to orientation. A [`ParamCurve`] or IVP carries the sign
//! `sigma` applied to the canonical form (see
//! [`surfgeo`](crate::surfgeo)); with [`InducedOrientation::Auto`] it is
//! chosen so that the form is positive on the initial tangent.

mod ivp;
mod sphere;

pub use ivp::{
    integrate_commensurate, sweep_family, CommensurateIvp, EventKind, SolutionTrace, SolveOptions, Termination,
    TraceNode,
};
pub use sphere::{sphere_kappa, sphere_reference_curve, sphere_tau, ReferenceSample};

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::curvegeo::{frenet_from_derivs, integrate_flagged, ArcLength, SignPolicy, SpaceCurve};
use crate::domain::Interval;
use crate::error::{GeomError, Result};
use crate::expr::{parse_expression, Ast, Ring};
use crate::jets::{compose_curve_in_surface, Jet1, JetError, JetVec3, MAX_JET2_ORDER};
use crate::numerics::finite_diff;
use crate::surfgeo::{affine_form_from_partials, gauss_curvature, normal_curvature, AffineForm, SurfaceDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InducedOrientation {
    /// Positive on the initial tangent.
    #[default]
    Auto,
    /// The canonical form of [`affine_first_fundamental`](crate::surfgeo::affine_first_fundamental).
    Canonical,
    /// Its negative.
    Reversed,
}

impl InducedOrientation {
    fn fixed(self) -> Option<f64> {
        match self {
            InducedOrientation::Auto => None,
            InducedOrientation::Canonical => Some(1.0),
            InducedOrientation::Reversed => Some(-1.0),
        }
    }
}

/// Source of `theta''` when a trace is differentiated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaDd {
    /// Solve the commensurateness condition at the interpolated state.
    Model,
    /// Central difference of `theta'` on the dense output.
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone)]
pub enum CurvePath {
    Expr {
        u: Ast,
        v: Ast,
    },
    Trace {
        trace: Arc<SolutionTrace>,
        theta_dd: ThetaDd,
    },
    /// `inner(phi(t))`.
    Reparam {
        inner: Box<CurvePath>,
        phi: Ast,
    },
}

impl CurvePath {
    fn max_order(&self) -> usize {
        match self {
            CurvePath::Expr { .. } => MAX_JET2_ORDER,
            CurvePath::Trace { .. } => 3,
            CurvePath::Reparam { inner, .. } => inner.max_order(),
        }
    }

    fn uv_jets(&self, t: f64, order: usize) -> Result<(Jet1, Jet1)> {
        match self {
            CurvePath::Expr { u, v } => {
                let seed = Jet1::variable(order, t);
                Ok((u.eval(order, &[("t", seed)])?, v.eval(order, &[("t", seed)])?))
            }
            CurvePath::Trace { trace, theta_dd } => {
                if order > 3 {
                    return Err(JetError::UnsupportedOrder { order, max: 3 }.into());
                }
                let y = trace.state_at(t).ok_or(GeomError::OutOfDomain { point: vec![t] })?;
                let tdd = match theta_dd {
                    ThetaDd::Model => trace.theta_dd_model(t)?,
                    ThetaDd::FiniteDifference { step } => {
                        trace.theta_dd_fd(t, *step).ok_or(GeomError::OutOfDomain { point: vec![t] })?
                    }
                };
                let (du, dv) = theta_derivs(y[2], y[3], tdd);
                let u = Jet1::from_derivs(&[y[0], du[0], du[1], du[2]]).truncate(order);
                let v = Jet1::from_derivs(&[y[1], dv[0], dv[1], dv[2]]).truncate(order);
                Ok((u, v))
            }
            CurvePath::Reparam { inner, phi } => {
                let p = phi.eval(order, &[("t", Jet1::variable(order, t))])?;
                let (u, v) = inner.uv_jets(p.value(), order)?;
                Ok((Jet1::compose(&u, &p), Jet1::compose(&v, &p)))
            }
        }
    }
}

/// `(u', u'', u''')` and `(v', v'', v''')` for `u' = cos theta`,
/// `v' = sin theta`.
pub fn theta_derivs(theta: f64, omega: f64, theta_dd: f64) -> ([f64; 3], [f64; 3]) {
    let (s, c) = theta.sin_cos();
    ([c, -omega * s, -theta_dd * s - omega * omega * c], [s, omega * c, theta_dd * c - omega * omega * s])
}

/// A curve `t -> X(u(t), v(t))` in a surface.
#[derive(Debug, Clone)]
pub struct ParamCurve {
    surface: SurfaceDef,
    path: CurvePath,
    domain: Interval,
    sign: f64,
}

impl ParamCurve {
    pub fn new(
        surface: SurfaceDef,
        path: CurvePath,
        domain: Interval,
        orientation: InducedOrientation,
    ) -> Result<ParamCurve> {
        let mut pc = ParamCurve { surface, path, domain, sign: 1.0 };
        pc.sign = match orientation.fixed() {
            Some(s) => s,
            None => pc.detect_sign()?,
        };
        Ok(pc)
    }

    pub fn from_exprs(
        surface: SurfaceDef,
        u: &str,
        v: &str,
        domain: Interval,
        orientation: InducedOrientation,
    ) -> Result<ParamCurve> {
        let parse = |index: usize, src: &str| {
            parse_expression(src, &["t"]).map_err(|source| GeomError::Component { what: "curve", index, source })
        };
        let path = CurvePath::Expr { u: parse(0, u)?, v: parse(1, v)? };
        ParamCurve::new(surface, path, domain, orientation)
    }

    /// A trace as a curve over its integrated range, with the trace's sign.
    pub fn from_trace(trace: Arc<SolutionTrace>, theta_dd: ThetaDd) -> Result<ParamCurve> {
        let (t0, t1) = trace.t_range();
        let sign = trace.orientation;
        Ok(ParamCurve {
            surface: trace.surface().clone(),
            path: CurvePath::Trace { trace, theta_dd },
            domain: Interval::new(t0, t1)?,
            sign,
        })
    }

    /// `self(phi(t))` over `domain`, keeping the sign.
    pub fn reparametrized(&self, phi: Ast, domain: Interval) -> ParamCurve {
        ParamCurve {
            surface: self.surface.clone(),
            path: CurvePath::Reparam { inner: Box::new(self.path.clone()), phi },
            domain,
            sign: self.sign,
        }
    }

    pub fn surface(&self) -> &SurfaceDef {
        &self.surface
    }

    /// The sign applied to the canonical affine form.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn uv_jets(&self, t: f64, order: usize) -> Result<(Jet1, Jet1)> {
        if !self.domain.contains(t) {
            return Err(GeomError::OutOfDomain { point: vec![t] });
        }
        self.path.uv_jets(t, order)
    }

    fn detect_sign(&self) -> Result<f64> {
        const SAMPLES: usize = 33;
        for i in 0..SAMPLES {
            let t = self.domain.lerp(i as f64 / (SAMPLES - 1) as f64);
            let (x, eps) = self.form_on_tangent_with_sign(t, 1.0)?;
            if x.abs() > eps {
                return Ok(x.signum());
            }
        }
        Ok(1.0)
    }

    fn form_on_tangent_with_sign(&self, t: f64, sign: f64) -> Result<(f64, f64)> {
        let (u, v) = self.uv_jets(t, 1)?;
        let f = affine_form_at(&self.surface, u.value(), v.value())?;
        let (du, dv) = (u.deriv(1), v.deriv(1));
        Ok((sign * f.form.apply(du, dv), 1e-12 * f.scale() * (du * du + dv * dv)))
    }

    /// Signed `I_aff(alpha')` and its degeneracy threshold.
    pub fn form_on_tangent(&self, t: f64) -> Result<(f64, f64)> {
        self.form_on_tangent_with_sign(t, self.sign)
    }
}

fn affine_form_at(surface: &SurfaceDef, u: f64, v: f64) -> Result<AffineForm> {
    let j = surface.jets(u, v, 2)?;
    affine_form_from_partials(j.partial(1, 0), j.partial(0, 1), j.partial(2, 0), j.partial(1, 1), j.partial(0, 2), u, v)
}

impl SpaceCurve for ParamCurve {
    fn jets(&self, t: f64, order: usize) -> Result<JetVec3<Jet1>> {
        let (u, v) = self.uv_jets(t, order)?;
        let x = self.surface.jets(u.value(), v.value(), order.max(1))?;
        Ok(compose_curve_in_surface(&x, &u, &v, order)?)
    }

    fn domain(&self) -> Interval {
        self.domain
    }

    fn max_order(&self) -> usize {
        self.path.max_order()
    }
}

/// `sqrt(I_aff(alpha'))`; zero along asymptotic directions.
pub fn induced_arclength_integrand(pc: &ParamCurve, t: f64) -> Result<f64> {
    let (x, eps) = pc.form_on_tangent(t)?;
    if x.abs() <= eps {
        return Ok(0.0);
    }
    if x < 0.0 {
        return Err(GeomError::NegativeForm { t, value: x });
    }
    Ok(x.sqrt())
}

/// `s_Sigma` over `[t0, t1]`.
pub fn induced_arclength(pc: &ParamCurve, t0: f64, t1: f64, tol: f64) -> Result<ArcLength> {
    induced_arclength_with(pc, t0, t1, tol, SignPolicy::Strict)
}

pub fn induced_arclength_with(pc: &ParamCurve, t0: f64, t1: f64, tol: f64, policy: SignPolicy) -> Result<ArcLength> {
    integrate_flagged(
        t0,
        t1,
        tol,
        policy,
        |t| pc.form_on_tangent(t),
        f64::sqrt,
        |t, value| GeomError::NegativeForm { t, value },
    )
}

/// Both sides of the commensurateness condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// `det - iaff^3`
    pub value: f64,
    pub det: f64,
    /// Signed `I_aff(alpha')`.
    pub iaff: f64,
}

impl Residual {
    /// Magnitude scale of the two sides, at least 1.
    pub fn scale(&self) -> f64 {
        self.det.abs().max(self.iaff.abs().powi(3)).max(1.0)
    }
}

/// Residual for an arbitrary parametrization: `du = (u', u'', u''')`,
/// `dv = (v', v'', v''')`.
pub fn commensurate_residual_general(
    surface: &SurfaceDef,
    u: f64,
    v: f64,
    du: [f64; 3],
    dv: [f64; 3],
    sign: f64,
) -> Result<Residual> {
    let x = surface.jets(u, v, 3)?;
    residual_from_jets(&x, u, v, du, dv, sign)
}

fn residual_from_jets(
    x: &JetVec3<crate::jets::Jet2>,
    u: f64,
    v: f64,
    du: [f64; 3],
    dv: [f64; 3],
    sign: f64,
) -> Result<Residual> {
    let uj = Jet1::from_derivs(&[u, du[0], du[1], du[2]]);
    let vj = Jet1::from_derivs(&[v, dv[0], dv[1], dv[2]]);
    let a = compose_curve_in_surface(x, &uj, &vj, 3)?;
    let det = Matrix3::from_columns(&[a.deriv(1), a.deriv(2), a.deriv(3)]).determinant();
    let f = affine_form_from_partials(
        x.partial(1, 0),
        x.partial(0, 1),
        x.partial(2, 0),
        x.partial(1, 1),
        x.partial(0, 2),
        u,
        v,
    )?;
    let iaff = sign * f.form.apply(du[0], dv[0]);
    Ok(Residual { value: det - iaff * iaff * iaff, det, iaff })
}

/// State of a curve in the parametrization `u' = cos theta`, `v' = sin theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaState {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub theta_p: f64,
    pub theta_pp: f64,
}

pub fn commensurate_residual(surface: &SurfaceDef, state: &ThetaState, sign: f64) -> Result<Residual> {
    let (du, dv) = theta_derivs(state.theta, state.theta_p, state.theta_pp);
    commensurate_residual_general(surface, state.u, state.v, du, dv, sign)
}

/// Pieces of the residual that is affine in `theta''`:
/// `residual = d * theta'' + r`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaSplit {
    pub r: f64,
    pub d: f64,
    /// `|alpha'| |alpha''| |Xu x Xv|`
    pub d_scale: f64,
    pub form: AffineForm,
    pub iaff: f64,
}

pub(crate) fn theta_split(
    surface: &SurfaceDef,
    u: f64,
    v: f64,
    theta: f64,
    omega: f64,
    sign: f64,
    checked: bool,
) -> Result<ThetaSplit> {
    let x = if checked { surface.jets(u, v, 3)? } else { surface.jets_unchecked(u, v, 3)? };
    let (du, dv) = theta_derivs(theta, omega, 0.0);
    let uj = Jet1::from_derivs(&[u, du[0], du[1], du[2]]);
    let vj = Jet1::from_derivs(&[v, dv[0], dv[1], dv[2]]);
    let a = compose_curve_in_surface(&x, &uj, &vj, 3)?;
    let (xu, xv) = (x.partial(1, 0), x.partial(0, 1));
    let (s, c) = theta.sin_cos();
    let normal_dir: Vector3<f64> = xv * c - xu * s;
    let (a1, a2) = (a.deriv(1), a.deriv(2));
    let det0 = Matrix3::from_columns(&[a1, a2, a.deriv(3)]).determinant();
    let d = Matrix3::from_columns(&[a1, a2, normal_dir]).determinant();
    let form = affine_form_from_partials(xu, xv, x.partial(2, 0), x.partial(1, 1), x.partial(0, 2), u, v)?;
    let iaff = sign * form.form.apply(c, s);
    Ok(ThetaSplit {
        r: det0 - iaff * iaff * iaff,
        d,
        d_scale: a1.norm() * a2.norm() * xu.cross(&xv).norm(),
        form,
        iaff,
    })
}

/// Default relative threshold on the `theta''` coefficient.
pub const DEFAULT_EPS_DEN: f64 = 1e-10;

/// The `theta''` that makes the residual vanish.
pub fn solve_theta_dd(surface: &SurfaceDef, u: f64, v: f64, theta: f64, theta_p: f64, sign: f64) -> Result<f64> {
    solve_theta_dd_with(surface, u, v, theta, theta_p, sign, DEFAULT_EPS_DEN)
}

pub fn solve_theta_dd_with(
    surface: &SurfaceDef,
    u: f64,
    v: f64,
    theta: f64,
    theta_p: f64,
    sign: f64,
    eps_den: f64,
) -> Result<f64> {
    theta_dd_from(surface, u, v, theta, theta_p, sign, eps_den, true)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn theta_dd_from(
    surface: &SurfaceDef,
    u: f64,
    v: f64,
    theta: f64,
    theta_p: f64,
    sign: f64,
    eps_den: f64,
    checked: bool,
) -> Result<f64> {
    let sp = theta_split(surface, u, v, theta, theta_p, sign, checked)?;
    let threshold = eps_den * sp.d_scale;
    if sp.d.abs() <= threshold {
        return Err(GeomError::SingularDenominator { denominator: sp.d, threshold });
    }
    Ok(-sp.r / sp.d)
}

/// Both sides of `kappa^2 tau = (sigma |K|^(-1/4) k_n)^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub curvature: f64,
    pub torsion: Option<f64>,
    pub gauss_curvature: f64,
    pub normal_curvature: f64,
    /// Curvature vanishes: the torsion is undefined and `lhs` is reported
    /// as its limit 0.
    pub curve_degenerate: bool,
}

impl CorollaryCheck {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn check_corollary_euclidean(pc: &ParamCurve, t: f64) -> Result<CorollaryCheck> {
    let j = pc.jets(t, 3)?;
    let (u, v) = pc.uv_jets(t, 1)?;
    let (uu, vv) = (u.value(), v.value());
    let gauss = gauss_curvature(pc.surface(), uu, vv)?;
    if gauss == 0.0 {
        return Err(GeomError::DegenerateSurfacePoint { u: uu, v: vv, discriminant: 0.0 });
    }
    let kn = normal_curvature(pc.surface(), uu, vv, u.deriv(1), v.deriv(1))?;
    let rhs = (pc.sign() * gauss.abs().powf(-0.25) * kn).powi(3);
    let (lhs, curvature, torsion, curve_degenerate) = match frenet_from_derivs(j.deriv(1), j.deriv(2), j.deriv(3), t) {
        Ok(f) => (f.curvature * f.curvature * f.torsion, f.curvature, Some(f.torsion), false),
        Err(GeomError::EuclideanDegenerate { curvature, .. }) => (0.0, curvature, None, true),
        Err(e) => return Err(e),
    };
    Ok(CorollaryCheck { lhs, rhs, curvature, torsion, gauss_curvature: gauss, normal_curvature: kn, curve_degenerate })
}

/// Central difference of `theta'` on a trace's dense output.
pub(crate) fn dense_rate(trace: &SolutionTrace, t: f64, step: f64) -> Option<f64> {
    let (t0, t1) = trace.t_range();
    if t - step < t0 || t + step > t1 {
        return None;
    }
    let omega = |s: f64| trace.state_at(s).map(|y| y[3]).unwrap_or(f64::NAN);
    let r = finite_diff(omega, t, 1, step);
    r.is_finite().then_some(r)
}
