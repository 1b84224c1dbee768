//! Euclidean and equiaffine invariants of parametrized surfaces.
//!
//! Orientation: where the raw form `(l, m, n)` is negative definite the
//! affine first fundamental form is returned negated, with
//! [`AffineForm::orientation`] set to `-1`, and the Euclidean unit normal is
//! flipped to match. This is the same as exchanging `u` and `v` but leaves
//! the user's coordinates alone. At hyperbolic points the raw sign is kept.

mod surface;

pub use surface::{SurfaceDef, CATALOG};

use nalgebra::{Matrix2, Vector3};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jets::Jet2;

/// `a du^2 + 2 b du dv + c dv^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

impl QuadForm {
    pub fn new(a: f64, b: f64, c: f64) -> QuadForm {
        QuadForm { a, b, c }
    }

    pub fn apply(&self, du: f64, dv: f64) -> f64 {
        self.a * du * du + 2.0 * self.b * du * dv + self.c * dv * dv
    }

    /// `ac - b^2`.
    pub fn discriminant(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn scale(&self, k: f64) -> QuadForm {
        QuadForm { a: k * self.a, b: k * self.b, c: k * self.c }
    }

    pub fn definiteness(&self) -> Definiteness {
        let d = self.discriminant();
        if d > 0.0 {
            if self.a + self.c > 0.0 {
                Definiteness::PositiveDefinite
            } else {
                Definiteness::NegativeDefinite
            }
        } else if d < 0.0 {
            Definiteness::Indefinite
        } else {
            Definiteness::Degenerate
        }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

/// Applies a form to a parameter-plane direction.
pub fn iaff_apply(form: &QuadForm, du: f64, dv: f64) -> f64 {
    form.apply(du, dv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

/// First and second fundamental forms with the oriented unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuclideanForms {
    pub first: QuadForm,
    pub second: QuadForm,
    pub normal: [f64; 3],
    pub orientation: f64,
}

/// The affine first fundamental form at a nondegenerate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineForm {
    pub form: QuadForm,
    /// The raw determinants `(l, m, n)`.
    pub lmn: QuadForm,
    pub definiteness: Definiteness,
    /// `-1` when the raw form was negative definite and has been negated.
    pub orientation: f64,
}

impl AffineForm {
    /// Geometric mean of the eigenvalue magnitudes, `|ln - m^2|^(1/4)`.
    pub fn scale(&self) -> f64 {
        self.form.discriminant().abs().sqrt()
    }
}

struct PointData {
    xu: Vector3<f64>,
    xv: Vector3<f64>,
    xuu: Vector3<f64>,
    xuv: Vector3<f64>,
    xvv: Vector3<f64>,
    lmn: QuadForm,
    /// `EG - F^2`
    area2: f64,
}

impl PointData {
    fn new(surface: &SurfaceDef, u: f64, v: f64) -> Result<PointData> {
        let j = surface.jets(u, v, 2)?;
        Ok(PointData::from_parts(j.partial(1, 0), j.partial(0, 1), j.partial(2, 0), j.partial(1, 1), j.partial(0, 2)))
    }

    fn from_parts(
        xu: Vector3<f64>,
        xv: Vector3<f64>,
        xuu: Vector3<f64>,
        xuv: Vector3<f64>,
        xvv: Vector3<f64>,
    ) -> PointData {
        let n = xu.cross(&xv);
        let lmn = QuadForm::new(n.dot(&xuu), n.dot(&xuv), n.dot(&xvv));
        PointData { xu, xv, xuu, xuv, xvv, lmn, area2: n.norm_squared() }
    }

    fn irregular(&self) -> bool {
        self.area2.sqrt() <= 1e-12 * (self.xu.norm() * self.xv.norm()).max(1.0)
    }

    fn degeneracy_threshold(&self) -> f64 {
        1e-10 * self.area2
    }

    fn class(&self) -> PointClass {
        let d = self.lmn.discriminant();
        let eps = self.degeneracy_threshold();
        if d > eps {
            PointClass::Elliptic
        } else if d < -eps {
            PointClass::Hyperbolic
        } else {
            PointClass::Degenerate
        }
    }

    fn orientation(&self) -> f64 {
        if self.class() == PointClass::Elliptic && self.lmn.a + self.lmn.c < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Determinants `l = det[Xu Xv Xuu]`, `m = det[Xu Xv Xuv]`, `n = det[Xu Xv Xvv]`.
pub fn affine_lmn(surface: &SurfaceDef, u: f64, v: f64) -> Result<QuadForm> {
    Ok(PointData::new(surface, u, v)?.lmn)
}

pub fn fundamental_forms_euclid(surface: &SurfaceDef, u: f64, v: f64) -> Result<EuclideanForms> {
    euclid_from(&PointData::new(surface, u, v)?, u, v)
}

fn euclid_from(p: &PointData, u: f64, v: f64) -> Result<EuclideanForms> {
    if p.irregular() {
        return Err(GeomError::IrregularPoint { u, v });
    }
    let sigma = p.orientation();
    let n = p.xu.cross(&p.xv) * (sigma / p.area2.sqrt());
    Ok(EuclideanForms {
        first: QuadForm::new(p.xu.dot(&p.xu), p.xu.dot(&p.xv), p.xv.dot(&p.xv)),
        second: QuadForm::new(n.dot(&p.xuu), n.dot(&p.xuv), n.dot(&p.xvv)),
        normal: [n[0], n[1], n[2]],
        orientation: sigma,
    })
}

/// `K = (eg - f^2) / (EG - F^2)`.
pub fn gauss_curvature(surface: &SurfaceDef, u: f64, v: f64) -> Result<f64> {
    let f = fundamental_forms_euclid(surface, u, v)?;
    Ok(f.second.discriminant() / f.first.discriminant())
}

/// `|ln - m^2|^(-1/4) (l, m, n)`, canonically oriented.
pub fn affine_first_fundamental(surface: &SurfaceDef, u: f64, v: f64) -> Result<AffineForm> {
    affine_form_from(&PointData::new(surface, u, v)?, u, v)
}

fn affine_form_from(p: &PointData, u: f64, v: f64) -> Result<AffineForm> {
    if p.class() == PointClass::Degenerate {
        return Err(GeomError::DegenerateSurfacePoint { u, v, discriminant: p.lmn.discriminant() });
    }
    let sigma = p.orientation();
    let form = p.lmn.scale(sigma * p.lmn.discriminant().abs().powf(-0.25));
    Ok(AffineForm { form, lmn: p.lmn, definiteness: form.definiteness(), orientation: sigma })
}

/// Affine first fundamental form from precomputed first and second
/// partials; used on hot paths that already hold the jets.
pub(crate) fn affine_form_from_partials(
    xu: Vector3<f64>,
    xv: Vector3<f64>,
    xuu: Vector3<f64>,
    xuv: Vector3<f64>,
    xvv: Vector3<f64>,
    u: f64,
    v: f64,
) -> Result<AffineForm> {
    affine_form_from(&PointData::from_parts(xu, xv, xuu, xuv, xvv), u, v)
}

/// `II(du, dv) / I(du, dv)`.
pub fn normal_curvature(surface: &SurfaceDef, u: f64, v: f64, du: f64, dv: f64) -> Result<f64> {
    let f = fundamental_forms_euclid(surface, u, v)?;
    let first = f.first.apply(du, dv);
    if first <= 0.0 {
        return Err(GeomError::ZeroDirection);
    }
    Ok(f.second.apply(du, dv) / first)
}

pub fn classify_point(surface: &SurfaceDef, u: f64, v: f64) -> Result<PointClass> {
    Ok(PointData::new(surface, u, v)?.class())
}

/// Margin of `ln - m^2` over the degeneracy threshold, for reporting.
pub fn degeneracy_margin(surface: &SurfaceDef, u: f64, v: f64) -> Result<f64> {
    let p = PointData::new(surface, u, v)?;
    Ok(p.lmn.discriminant().abs() - p.degeneracy_threshold())
}

/// For `Xbar(s, r) = X((u, v) + jacobian (s, r))`, returns
/// `(lbar nbar - mbar^2, (ln - m^2) J^4)` with `J = det jacobian`.
pub fn check_reparam_covariance(surface: &SurfaceDef, u: f64, v: f64, jacobian: &Matrix2<f64>) -> Result<(f64, f64)> {
    let det = jacobian.determinant();
    if det.abs() <= 1e-14 * jacobian.norm_squared() || !det.is_finite() {
        return Err(GeomError::SingularJacobian { det });
    }
    if !surface.domain().contains(u, v) {
        return Err(GeomError::OutOfDomain { point: vec![u, v] });
    }
    let su = Jet2::affine(2, u, jacobian[(0, 0)], jacobian[(0, 1)]);
    let sv = Jet2::affine(2, v, jacobian[(1, 0)], jacobian[(1, 1)]);
    let bar = surface.jets_at(su, sv)?;
    let pb = PointData::from_parts(
        bar.partial(1, 0),
        bar.partial(0, 1),
        bar.partial(2, 0),
        bar.partial(1, 1),
        bar.partial(0, 2),
    );
    let p = PointData::new(surface, u, v)?;
    Ok((pb.lmn.discriminant(), p.lmn.discriminant() * det.powi(4)))
}
