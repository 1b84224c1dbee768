use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::domain::{Interval, Rect};
use crate::error::{GeomError, Result};
use crate::expr::{affine_combination, parse_expression, Ast};
use crate::jets::{Jet2, JetError, JetVec3, MAX_JET2_ORDER};

/// A parametrized surface `X(u, v)` over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDef {
    name: Option<String>,
    sources: [String; 3],
    components: [Ast; 3],
    domain: Rect,
}

/// Names accepted by [`SurfaceDef::builtin`].
pub const CATALOG: [&str; 6] = ["sphere", "helicoid", "paraboloid", "hyperbolic-paraboloid", "hyperboloid", "plane"];

impl SurfaceDef {
    pub fn parse(sources: [&str; 3], domain: Rect) -> Result<SurfaceDef> {
        let mut components = Vec::with_capacity(3);
        for (index, src) in sources.iter().enumerate() {
            let ast = parse_expression(src, &["u", "v"]).map_err(|source| GeomError::Component {
                what: "surface",
                index,
                source,
            })?;
            components.push(ast);
        }
        let components: [Ast; 3] = components.try_into().expect("three components");
        Ok(SurfaceDef { name: None, sources: sources.map(str::to_string), components, domain })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SurfaceDef {
        self.name = Some(name.into());
        self
    }

    /// A surface from the builtin catalog (see [`CATALOG`]).
    pub fn builtin(name: &str) -> Option<SurfaceDef> {
        let iv = |lo: f64, hi: f64| Interval { lo, hi };
        let (sources, domain) = match name {
            "sphere" => {
                (["cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"], Rect::new(iv(-4.0 * PI, 4.0 * PI), iv(-1.5, 1.5)))
            }
            "helicoid" => (["u*cos(v)", "u*sin(v)", "v"], Rect::new(iv(-3.0, 3.0), iv(-4.0 * PI, 4.0 * PI))),
            "paraboloid" => (["v*cos(u)", "v*sin(u)", "v^2"], Rect::new(iv(-4.0 * PI, 4.0 * PI), iv(0.05, 4.0))),
            "hyperbolic-paraboloid" => (["u", "v", "u*v"], Rect::new(iv(-3.0, 3.0), iv(-3.0, 3.0))),
            "hyperboloid" => {
                (["cos(u)-v*sin(u)", "sin(u)+v*cos(u)", "v"], Rect::new(iv(-4.0 * PI, 4.0 * PI), iv(-3.0, 3.0)))
            }
            "plane" => (["u", "v", "0"], Rect::new(iv(-5.0, 5.0), iv(-5.0, 5.0))),
            _ => return None,
        };
        Some(SurfaceDef::parse(sources, domain).expect("catalog surfaces parse").with_name(name))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn sources(&self) -> &[String; 3] {
        &self.sources
    }

    pub fn components(&self) -> &[Ast; 3] {
        &self.components
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn with_domain(mut self, domain: Rect) -> SurfaceDef {
        self.domain = domain;
        self
    }

    /// Partials of `X` through total order `order` at `(u, v)`.
    pub fn jets(&self, u: f64, v: f64, order: usize) -> Result<JetVec3<Jet2>> {
        if !self.domain.contains(u, v) {
            return Err(GeomError::OutOfDomain { point: vec![u, v] });
        }
        self.jets_unchecked(u, v, order)
    }

    /// As [`jets`](Self::jets) without the domain check.
    pub fn jets_unchecked(&self, u: f64, v: f64, order: usize) -> Result<JetVec3<Jet2>> {
        check_order(order)?;
        self.jets_at(Jet2::var_u(order, u), Jet2::var_v(order, v))
    }

    /// Evaluates `X(u, v)` with arbitrary Jet2 arguments, e.g. the seeds of
    /// a linear change of parameters.
    pub fn jets_at(&self, u: Jet2, v: Jet2) -> Result<JetVec3<Jet2>> {
        let order = u.order().min(v.order());
        let mut out = [Jet2::constant(order, 0.0); 3];
        for (slot, ast) in out.iter_mut().zip(&self.components) {
            *slot = ast.eval(order, &[("u", u), ("v", v)])?;
        }
        Ok(JetVec3(out))
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vector3<f64>> {
        let mut p = Vector3::zeros();
        for (k, ast) in self.components.iter().enumerate() {
            p[k] = ast.eval_real(&[("u", u), ("v", v)])?;
        }
        Ok(p)
    }

    /// The surface `A X + b`, on the same parameter domain.
    pub fn affine_image(&self, a: &Matrix3<f64>, b: &Vector3<f64>) -> SurfaceDef {
        let rows =
            [[a[(0, 0)], a[(0, 1)], a[(0, 2)]], [a[(1, 0)], a[(1, 1)], a[(1, 2)]], [a[(2, 0)], a[(2, 1)], a[(2, 2)]]];
        let components = affine_combination(&self.components, &rows, &[b[0], b[1], b[2]]);
        let sources = std::array::from_fn(|k| components[k].to_string());
        SurfaceDef {
            name: self.name.as_ref().map(|n| format!("{n} (affine image)")),
            sources,
            components,
            domain: self.domain,
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_JET2_ORDER {
        return Err(JetError::UnsupportedOrder { order, max: MAX_JET2_ORDER }.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::finite_diff;

    #[test]
    fn catalog_is_complete() {
        for name in CATALOG {
            let s = SurfaceDef::builtin(name).unwrap();
            assert_eq!(s.name(), Some(name));
        }
        assert!(SurfaceDef::builtin("torus").is_none());
    }

    #[test]
    fn sphere_jets_match_hand_partials() {
        let s = SurfaceDef::builtin("sphere").unwrap();
        let j = s.jets(0.0, 0.0, 2).unwrap();
        assert_eq!(j.value(), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(j.partial(1, 0), Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(j.partial(0, 1), Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(j.partial(2, 0), Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn domain_and_order_checks() {
        let s = SurfaceDef::builtin("paraboloid").unwrap();
        assert!(matches!(s.jets(0.0, 0.0, 2), Err(GeomError::OutOfDomain { .. })));
        assert!(s.jets_unchecked(0.0, 0.0, 2).is_ok());
        assert!(matches!(s.jets(0.0, 1.0, 5), Err(GeomError::Jet(JetError::UnsupportedOrder { .. }))));
    }

    #[test]
    fn hyperboloid_partials_against_finite_differences() {
        let s = SurfaceDef::builtin("hyperboloid").unwrap();
        let (u, v) = (0.7, -0.4);
        let j = s.jets(u, v, 3).unwrap();
        for k in 0..3 {
            let f = |x: f64| s.point(x, v).unwrap()[k];
            let g = |y: f64| s.point(u, y).unwrap()[k];
            assert!((j.partial(1, 0)[k] - finite_diff(f, u, 1, 1e-3)).abs() < 1e-9);
            assert!((j.partial(3, 0)[k] - finite_diff(f, u, 3, 2e-2)).abs() < 1e-5);
            assert!((j.partial(0, 2)[k] - finite_diff(g, v, 2, 5e-3)).abs() < 1e-8);
        }
    }

    #[test]
    fn affine_image_reparses() {
        let s = SurfaceDef::builtin("helicoid").unwrap();
        let a = Matrix3::new(2.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.0, -1.0, 1.0);
        let b = Vector3::new(1.0, -2.0, 0.25);
        let img = s.affine_image(&a, &b);
        let back = SurfaceDef::parse(
            [img.sources()[0].as_str(), img.sources()[1].as_str(), img.sources()[2].as_str()],
            img.domain(),
        )
        .unwrap();
        let p = s.point(0.3, 1.1).unwrap();
        let q = back.point(0.3, 1.1).unwrap();
        assert!((a * p + b - q).norm() < 1e-14);
    }
}
