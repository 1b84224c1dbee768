//! Euclidean and equiaffine invariants of space curves.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::domain::Interval;
use crate::error::{GeomError, Result};
use crate::expr::{affine_combination, parse_expression, Ast, Ring};
use crate::jets::{Jet1, JetError, JetVec3, MAX_JET1_ORDER};
use crate::numerics::{quad_adaptive_with, QuadConfig, QuadError};

/// Anything that can produce exact derivatives of a curve in 3-space.
pub trait SpaceCurve {
    /// Derivatives of `alpha` at `t` through `order`.
    fn jets(&self, t: f64, order: usize) -> Result<JetVec3<Jet1>>;

    fn domain(&self) -> Interval;

    /// Highest order [`jets`](Self::jets) can deliver.
    fn max_order(&self) -> usize {
        MAX_JET1_ORDER
    }
}

/// A curve `alpha(t)` given by three expressions in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDef {
    sources: [String; 3],
    components: [Ast; 3],
    domain: Interval,
}

impl CurveDef {
    pub fn parse(sources: [&str; 3], domain: Interval) -> Result<CurveDef> {
        let mut components = Vec::with_capacity(3);
        for (index, src) in sources.iter().enumerate() {
            let ast = parse_expression(src, &["t"]).map_err(|source| GeomError::Component {
                what: "curve",
                index,
                source,
            })?;
            components.push(ast);
        }
        let components: [Ast; 3] = components.try_into().expect("three components");
        Ok(CurveDef { sources: sources.map(str::to_string), components, domain })
    }

    pub fn from_components(components: [Ast; 3], domain: Interval) -> CurveDef {
        let sources = std::array::from_fn(|k| components[k].to_string());
        CurveDef { sources, components, domain }
    }

    pub fn sources(&self) -> &[String; 3] {
        &self.sources
    }

    pub fn components(&self) -> &[Ast; 3] {
        &self.components
    }

    pub fn point(&self, t: f64) -> Result<Vector3<f64>> {
        let mut p = Vector3::zeros();
        for (k, ast) in self.components.iter().enumerate() {
            p[k] = ast.eval_real(&[("t", t)])?;
        }
        Ok(p)
    }

    /// The curve `A alpha + b`.
    pub fn affine_image(&self, a: &Matrix3<f64>, b: &Vector3<f64>) -> CurveDef {
        let rows =
            [[a[(0, 0)], a[(0, 1)], a[(0, 2)]], [a[(1, 0)], a[(1, 1)], a[(1, 2)]], [a[(2, 0)], a[(2, 1)], a[(2, 2)]]];
        CurveDef::from_components(affine_combination(&self.components, &rows, &[b[0], b[1], b[2]]), self.domain)
    }

    /// The curve `alpha(phi(t))` over `domain`.
    pub fn reparametrize(&self, phi: &Ast, domain: Interval) -> CurveDef {
        CurveDef::from_components(self.components.clone().map(|c| c.substitute("t", phi)), domain)
    }
}

impl SpaceCurve for CurveDef {
    fn jets(&self, t: f64, order: usize) -> Result<JetVec3<Jet1>> {
        if !self.domain.contains(t) {
            return Err(GeomError::OutOfDomain { point: vec![t] });
        }
        let seed = Jet1::variable(order, t);
        let mut out = [Jet1::constant(order, 0.0); 3];
        for (slot, ast) in out.iter_mut().zip(&self.components) {
            *slot = ast.eval(order, &[("t", seed)])?;
        }
        Ok(JetVec3(out))
    }

    fn domain(&self) -> Interval {
        self.domain
    }
}

/// Checked entry point for curve derivatives.
pub fn curve_jets<C: SpaceCurve + ?Sized>(curve: &C, t: f64, order: usize) -> Result<JetVec3<Jet1>> {
    let max = curve.max_order();
    if order == 0 || order > max {
        return Err(JetError::UnsupportedOrder { order, max }.into());
    }
    curve.jets(t, order)
}

/// `det[alpha' alpha'' alpha''']` and the scale used for degeneracy tests.
pub fn affine_det<C: SpaceCurve + ?Sized>(curve: &C, t: f64) -> Result<(f64, f64)> {
    let j = curve_jets(curve, t, 3)?;
    let (d1, d2, d3) = (j.deriv(1), j.deriv(2), j.deriv(3));
    let det = Matrix3::from_columns(&[d1, d2, d3]).determinant();
    let threshold = 1e-12 * (d1.norm() * d2.norm() * d3.norm()).max(1.0);
    Ok((det, threshold))
}

/// `det[alpha' alpha'' alpha''']^(1/6)`.
pub fn affine_integrand<C: SpaceCurve + ?Sized>(curve: &C, t: f64) -> Result<f64> {
    let (det, eps) = affine_det(curve, t)?;
    if det.abs() <= eps {
        return Err(GeomError::DegenerateCurve { t, det });
    }
    if det < 0.0 {
        return Err(GeomError::NegativeOrientation { t, det });
    }
    Ok(det.powf(1.0 / 6.0))
}

/// How arc-length integrands treat a negative determinant or form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignPolicy {
    /// Negative values are an error.
    #[default]
    Strict,
    /// Use the absolute value.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcLength {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Integrand evaluations that fell within the degeneracy threshold and
    /// contributed zero.
    pub degenerate_nodes: usize,
}

impl ArcLength {
    pub fn all_degenerate(&self) -> bool {
        self.evaluations > 0 && self.degenerate_nodes == self.evaluations
    }
}

/// Adaptive quadrature of a sign-checked integrand. `sample` returns the raw
/// signed quantity and its degeneracy threshold; `root` maps a positive
/// value to the integrand.
pub(crate) fn integrate_flagged(
    t0: f64,
    t1: f64,
    tol: f64,
    policy: SignPolicy,
    mut sample: impl FnMut(f64) -> Result<(f64, f64)>,
    root: impl Fn(f64) -> f64,
    negative: impl Fn(f64, f64) -> GeomError,
) -> Result<ArcLength> {
    let mut degenerate = 0usize;
    let r = quad_adaptive_with(
        |t| {
            let (x, eps) = sample(t)?;
            if x.abs() <= eps {
                degenerate += 1;
                return Ok(0.0);
            }
            if x < 0.0 && policy == SignPolicy::Strict {
                return Err(negative(t, x));
            }
            Ok(root(x.abs()))
        },
        t0,
        t1,
        QuadConfig { rel_tol: tol, abs_tol: tol, ..QuadConfig::default() },
    );
    match r {
        Ok(q) => Ok(ArcLength {
            value: q.value,
            error_estimate: q.error_estimate,
            evaluations: q.evaluations,
            degenerate_nodes: degenerate,
        }),
        Err(QuadError::Integrand(e)) => Err(e),
        Err(e) => Err(GeomError::Quadrature(e.to_string())),
    }
}

/// `s_alpha` over `[t0, t1]`. Degenerate nodes contribute zero and are
/// counted in the result.
pub fn affine_arclength<C: SpaceCurve + ?Sized>(curve: &C, t0: f64, t1: f64, tol: f64) -> Result<ArcLength> {
    affine_arclength_with(curve, t0, t1, tol, SignPolicy::Strict)
}

pub fn affine_arclength_with<C: SpaceCurve + ?Sized>(
    curve: &C,
    t0: f64,
    t1: f64,
    tol: f64,
    policy: SignPolicy,
) -> Result<ArcLength> {
    integrate_flagged(
        t0,
        t1,
        tol,
        policy,
        |t| affine_det(curve, t),
        |d| d.powf(1.0 / 6.0),
        |t, det| GeomError::NegativeOrientation { t, det },
    )
}

/// Euclidean Frenet data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetData {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
    pub speed: f64,
    pub curvature: f64,
    pub torsion: f64,
}

fn arr(v: Vector3<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

pub fn euclidean_frenet<C: SpaceCurve + ?Sized>(curve: &C, t: f64) -> Result<FrenetData> {
    let j = curve_jets(curve, t, 3)?;
    frenet_from_derivs(j.deriv(1), j.deriv(2), j.deriv(3), t)
}

pub(crate) fn frenet_from_derivs(d1: Vector3<f64>, d2: Vector3<f64>, d3: Vector3<f64>, t: f64) -> Result<FrenetData> {
    let speed = d1.norm();
    if speed == 0.0 || !speed.is_finite() {
        return Err(GeomError::ZeroSpeed { t });
    }
    let b = d1.cross(&d2);
    let bn = b.norm();
    let curvature = bn / speed.powi(3);
    if bn <= 1e-12 * speed * d2.norm() || bn == 0.0 {
        return Err(GeomError::EuclideanDegenerate { t, speed, curvature });
    }
    let torsion = b.dot(&d3) / (bn * bn);
    let e1 = d1 / speed;
    let e3 = b / bn;
    let e2 = e3.cross(&e1);
    Ok(FrenetData { e1: arr(e1), e2: arr(e2), e3: arr(e3), speed, curvature, torsion })
}

/// `(kappa^2 tau)^(1/6) |alpha'|`.
pub fn affine_integrand_via_euclidean<C: SpaceCurve + ?Sized>(curve: &C, t: f64) -> Result<f64> {
    let f = match euclidean_frenet(curve, t) {
        Err(GeomError::EuclideanDegenerate { .. }) => return Err(GeomError::NonpositiveTorsion { t, tau: 0.0 }),
        r => r?,
    };
    if f.torsion <= 0.0 {
        return Err(GeomError::NonpositiveTorsion { t, tau: f.torsion });
    }
    Ok((f.curvature * f.curvature * f.torsion).powf(1.0 / 6.0) * f.speed)
}

/// Affine Frenet frame and affine curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFrenetData {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
    pub kappa1: f64,
    pub kappa2: f64,
    /// Component of `e3'` along `e3`, zero in exact arithmetic.
    pub residual: f64,
}

/// Frame `(alpha_s, alpha_ss, alpha_sss)` in affine arc length and the
/// coefficients of `e3' = kappa1 e1 + kappa2 e2`.
///
/// `t(s)` is obtained by inverting the jet of `s(t)`, whose derivatives come
/// from differentiating the determinant; the arc-length integral itself is
/// never inverted numerically.
pub fn affine_frenet<C: SpaceCurve + ?Sized>(curve: &C, t: f64) -> Result<AffineFrenetData> {
    let j = curve_jets(curve, t, 6)?;
    let (det0, eps) = affine_det(curve, t)?;
    if det0.abs() <= eps {
        return Err(GeomError::DegenerateCurve { t, det: det0 });
    }
    if det0 < 0.0 {
        return Err(GeomError::NegativeOrientation { t, det: det0 });
    }
    // det(t) as an order-3 jet
    let cols: Vec<[Jet1; 3]> = (1..=3).map(|k| j.0.map(|c| c.shift(k))).collect();
    let m = |r: usize, c: usize| cols[c][r];
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    let ds = det.powf(1.0 / 6.0)?;
    let mut s_derivs = vec![0.0];
    s_derivs.extend_from_slice(ds.derivs());
    let s = Jet1::from_derivs(&s_derivs);
    let t_of_s = s.invert(t).ok_or(GeomError::DegenerateCurve { t, det: det0 })?;
    let along = j.0.map(|c| Jet1::compose(&c, &t_of_s));
    let d = |k: usize| Vector3::new(along[0].deriv(k), along[1].deriv(k), along[2].deriv(k));
    let (e1, e2, e3, e4) = (d(1), d(2), d(3), d(4));
    let frame = Matrix3::from_columns(&[e1, e2, e3]);
    let coeffs = frame.lu().solve(&e4).ok_or_else(|| GeomError::Numerical("affine frame is singular".into()))?;
    Ok(AffineFrenetData {
        e1: arr(e1),
        e2: arr(e2),
        e3: arr(e3),
        kappa1: coeffs[0],
        kappa2: coeffs[1],
        residual: coeffs[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(src: [&str; 3]) -> CurveDef {
        CurveDef::parse(src, Interval::new(-10.0, 10.0).unwrap()).unwrap()
    }

    fn cubic() -> CurveDef {
        curve(["t", "t^2", "t^3"])
    }

    fn helix() -> CurveDef {
        curve(["cos(t)", "sin(t)", "t"])
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn jets_of_examples() {
        let j = curve_jets(&cubic(), 1.0, 3).unwrap();
        assert_eq!(j.deriv(0), Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(j.deriv(1), Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(j.deriv(2), Vector3::new(0.0, 2.0, 6.0));
        assert_eq!(j.deriv(3), Vector3::new(0.0, 0.0, 6.0));
        let c = curve_jets(&curve(["cos(t)", "sin(t)", "0"]), 0.0, 2).unwrap();
        assert_eq!(c.deriv(1), Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(c.deriv(2), Vector3::new(-1.0, 0.0, 0.0));
        assert!(matches!(curve_jets(&cubic(), 0.0, 7), Err(GeomError::Jet(JetError::UnsupportedOrder { .. }))));
        assert!(matches!(curve_jets(&cubic(), 11.0, 3), Err(GeomError::OutOfDomain { .. })));
    }

    #[test]
    fn integrand_examples() {
        let r6 = 12f64.powf(1.0 / 6.0);
        for t in [-2.0, 0.0, 0.5, 3.0] {
            assert!(rel(affine_integrand(&cubic(), t).unwrap(), r6) < 1e-14);
        }
        assert!(matches!(
            affine_integrand(&curve(["cos(t)", "sin(t)", "0"]), 0.3),
            Err(GeomError::DegenerateCurve { .. })
        ));
        let sh = curve(["cos(8*t)*cos(t)", "sin(8*t)*cos(t)", "sin(t)"]);
        assert!(rel(affine_integrand(&sh, 0.0).unwrap(), 34320f64.powf(1.0 / 6.0)) < 1e-14);
        let mirrored = curve(["t", "t^2", "-t^3"]);
        match affine_integrand(&mirrored, 0.0) {
            Err(GeomError::NegativeOrientation { det, .. }) => assert!(rel(det, -12.0) < 1e-14),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn arclength_examples() {
        let a = affine_arclength(&cubic(), 0.0, 1.0, 1e-12).unwrap();
        assert!(rel(a.value, 12f64.powf(1.0 / 6.0)) < 1e-12);
        assert_eq!(a.degenerate_nodes, 0);
        assert_eq!(affine_arclength(&cubic(), 0.5, 0.5, 1e-12).unwrap().value, 0.0);
        let planar = affine_arclength(&curve(["cos(t)", "sin(t)", "0"]), 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(planar.value, 0.0);
        assert!(planar.all_degenerate());
        let abs = affine_arclength_with(&curve(["t", "t^2", "-t^3"]), 0.0, 1.0, 1e-12, SignPolicy::Absolute).unwrap();
        assert!(rel(abs.value, 12f64.powf(1.0 / 6.0)) < 1e-12);
    }

    #[test]
    fn frenet_examples() {
        let f = euclidean_frenet(&helix(), 0.7).unwrap();
        assert!(rel(f.curvature, 0.5) < 1e-14 && rel(f.torsion, 0.5) < 1e-14 && rel(f.speed, 2f64.sqrt()) < 1e-14);
        let circle = curve(["2*cos(t)", "2*sin(t)", "0"]);
        let c = euclidean_frenet(&circle, 0.4).unwrap();
        assert!(rel(c.curvature, 0.5) < 1e-14);
        assert_eq!(c.torsion, 0.0);
        match euclidean_frenet(&curve(["2*t", "0", "0"]), 1.0) {
            Err(GeomError::EuclideanDegenerate { speed, curvature, .. }) => {
                assert_eq!(speed, 2.0);
                assert_eq!(curvature, 0.0);
            }
            r => panic!("{r:?}"),
        }
        assert!(matches!(euclidean_frenet(&curve(["t^2", "0", "0"]), 0.0), Err(GeomError::ZeroSpeed { .. })));
    }

    #[test]
    fn frenet_frame_is_orthonormal_and_right_handed() {
        let f = euclidean_frenet(&curve(["t + t^3", "sin(2*t)", "exp(t/3)"]), 0.9).unwrap();
        let (a, b, c) = (Vector3::from(f.e1), Vector3::from(f.e2), Vector3::from(f.e3));
        for x in [a, b, c] {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
        assert!(a.dot(&b).abs() < 1e-12 && b.dot(&c).abs() < 1e-12 && a.dot(&c).abs() < 1e-12);
        assert!((Matrix3::from_columns(&[a, b, c]).determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_route() {
        assert!(rel(affine_integrand_via_euclidean(&helix(), 0.3).unwrap(), 1.0) < 1e-14);
        assert!(rel(affine_integrand(&helix(), 0.3).unwrap(), 1.0) < 1e-14);
        let c = cubic();
        assert!(rel(affine_integrand_via_euclidean(&c, 0.0).unwrap(), affine_integrand(&c, 0.0).unwrap()) < 1e-12);
        assert!(matches!(
            affine_integrand_via_euclidean(&curve(["cos(t)", "sin(t)", "0"]), 0.0),
            Err(GeomError::NonpositiveTorsion { .. })
        ));
    }

    #[test]
    fn affine_frenet_of_cubic() {
        let c = cubic();
        let f = affine_frenet(&c, 1.0).unwrap();
        let det = Matrix3::from_columns(&[f.e1.into(), f.e2.into(), f.e3.into()]).determinant();
        assert!((det - 1.0).abs() < 1e-9);
        let ks: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let f = affine_frenet(&c, -2.0 + 0.45 * i as f64).unwrap();
                (f.kappa1, f.kappa2)
            })
            .collect();
        for (k1, k2) in ks {
            assert!(k1.abs() < 1e-8 && k2.abs() < 1e-8);
        }
    }

    #[test]
    fn affine_frenet_of_helix() {
        // unit affine speed, alpha'''' = -alpha''
        let f = affine_frenet(&helix(), 0.4).unwrap();
        assert!(f.kappa1.abs() < 1e-12);
        assert!((f.kappa2 + 1.0).abs() < 1e-12);
        assert!(f.residual.abs() < 1e-12);
    }

    #[test]
    fn affine_images_and_reparametrization() {
        let c = curve(["t", "t^2 + sin(t)", "t^3/3"]);
        let a = Matrix3::new(2.0, 1.0, 0.0, 0.0, 0.5, 0.0, 1.0, 3.0, 1.0);
        let img = c.affine_image(&a, &Vector3::new(1.0, 2.0, 3.0));
        let x = c.point(0.3).unwrap();
        assert!((a * x + Vector3::new(1.0, 2.0, 3.0) - img.point(0.3).unwrap()).norm() < 1e-14);
        let phi = parse_expression("t^3 + t", &["t"]).unwrap();
        let re = c.reparametrize(&phi, Interval::new(0.0, 1.0).unwrap());
        let direct = affine_arclength(&c, 0.0, 2.0, 1e-11).unwrap().value;
        let back = affine_arclength(&re, 0.0, 1.0, 1e-11).unwrap().value;
        assert!(rel(back, direct) < 1e-9);
    }
}
