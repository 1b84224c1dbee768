use affinemetrics::commensurate::{
    check_corollary_euclidean, commensurate_residual_general, InducedOrientation, ParamCurve,
};
use affinemetrics::curvegeo::{affine_integrand, affine_integrand_via_euclidean, curve_jets};
use affinemetrics::domain::{Interval, Rect};
use affinemetrics::expr::Ring;
use affinemetrics::numerics::finite_diff;
use affinemetrics::surfgeo::{
    affine_first_fundamental, affine_lmn, check_reparam_covariance, classify_point, fundamental_forms_euclid,
    gauss_curvature, PointClass, SurfaceDef,
};
use affinemetrics::GeomError;
use nalgebra::{Matrix2, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{output_format, resolve_surface, surface_spec};
use crate::args::{Format, IdentityArgs};
use crate::error::CliError;
use crate::output::{emit, float, json, Table};
use crate::schema::{IdentitiesDoc, IdentityResult, SCHEMA};

const TOL_JETS: f64 = 1e-6;
const TOL_AFFINE_FORM: f64 = 1e-9;
const TOL_NORMAL_ROUTE: f64 = 1e-10;
const TOL_EQUIAFFINE: f64 = 1e-9;
const TOL_REPARAM: f64 = 1e-9;
const TOL_INTEGRAND_ROUTES: f64 = 1e-8;
const TOL_COROLLARY: f64 = 1e-9;

const FD_STEP_1: f64 = 1e-3;
const FD_STEP_2: f64 = 5e-3;
/// Samples stay this far inside the domain, as a fraction of each side.
const INSET: f64 = 0.02;

/// Running maximum deviation of one identity.
struct Tally {
    name: &'static str,
    tolerance: f64,
    checked: usize,
    skipped: usize,
    max_deviation: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Tally {
        Tally { name, tolerance, checked: 0, skipped: 0, max_deviation: 0.0 }
    }

    /// `Ok(None)` and geometric errors count as skipped samples.
    fn record(&mut self, r: Result<Option<f64>, GeomError>) -> Result<(), CliError> {
        match r {
            Ok(Some(d)) => {
                self.checked += 1;
                self.max_deviation = self.max_deviation.max(if d.is_nan() { f64::MAX } else { d.min(f64::MAX) });
            }
            Ok(None) => self.skipped += 1,
            Err(e) if skippable(&e) => self.skipped += 1,
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    fn finish(self) -> IdentityResult {
        IdentityResult {
            name: self.name.into(),
            checked: self.checked,
            skipped: self.skipped,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
            passed: self.max_deviation <= self.tolerance,
        }
    }
}

fn skippable(e: &GeomError) -> bool {
    !matches!(e, GeomError::Parse(_) | GeomError::Component { .. } | GeomError::InvalidDomain(_))
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Coefficientwise distance relative to the larger coefficient.
fn coeff_deviation(a: [f64; 3], b: [f64; 3]) -> f64 {
    let scale = max_abs(a.into_iter().chain(b));
    if scale == 0.0 {
        return 0.0;
    }
    max_abs((0..3).map(|i| a[i] - b[i])) / scale
}

fn sample(rng: &mut ChaCha8Rng, d: Rect) -> (f64, f64) {
    let pick = |rng: &mut ChaCha8Rng, iv: Interval| {
        let pad = INSET * iv.width();
        if iv.width() <= 2.0 * pad {
            iv.lerp(0.5)
        } else {
            rng.gen_range(iv.lo + pad..iv.hi - pad)
        }
    };
    (pick(rng, d.u), pick(rng, d.v))
}

fn nondegenerate(s: &SurfaceDef, u: f64, v: f64) -> Result<bool, GeomError> {
    Ok(classify_point(s, u, v)? != PointClass::Degenerate)
}

fn jets_vs_fd(s: &SurfaceDef, u: f64, v: f64) -> Result<Option<f64>, GeomError> {
    let j = s.jets(u, v, 2)?;
    let p = |u: f64, v: f64| s.point(u, v);
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let c = |u: f64, v: f64| p(u, v).map(|x| x[k]).unwrap_or(f64::NAN);
        let fd = [
            ((1, 0), finite_diff(|x| c(x, v), u, 1, FD_STEP_1)),
            ((0, 1), finite_diff(|y| c(u, y), v, 1, FD_STEP_1)),
            ((2, 0), finite_diff(|x| c(x, v), u, 2, FD_STEP_2)),
            ((0, 2), finite_diff(|y| c(u, y), v, 2, FD_STEP_2)),
            ((1, 1), finite_diff(|y| finite_diff(|x| c(x, y), u, 1, FD_STEP_1), v, 1, FD_STEP_1)),
        ];
        for ((a, b), approx) in fd {
            let exact = j.partial(a, b)[k];
            worst = worst.max((exact - approx).abs() / approx.abs().max(1.0));
        }
    }
    Ok(Some(worst))
}

fn affine_vs_second(s: &SurfaceDef, u: f64, v: f64) -> Result<Option<f64>, GeomError> {
    if !nondegenerate(s, u, v)? {
        return Ok(None);
    }
    let f = affine_first_fundamental(s, u, v)?;
    let e = fundamental_forms_euclid(s, u, v)?;
    let k = gauss_curvature(s, u, v)?;
    Ok(Some(coeff_deviation(f.form.coefficients(), e.second.scale(k.abs().powf(-0.25)).coefficients())))
}

fn determinant_vs_normal(s: &SurfaceDef, u: f64, v: f64) -> Result<Option<f64>, GeomError> {
    let lmn = affine_lmn(s, u, v)?.coefficients();
    let e = fundamental_forms_euclid(s, u, v)?;
    let area = e.first.discriminant().sqrt();
    Ok(Some(coeff_deviation(lmn, e.second.scale(e.orientation * area).coefficients())))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let (a, b): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen_range(0.0..1.0));
    (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos()
}

fn rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let mut q = Matrix3::from_fn(|_, _| gaussian(rng)).qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Random `A` with `det A = 1` and singular values in `[e^-2, e^2]`.
fn unimodular(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let d = Matrix3::from_diagonal(&Vector3::new(a.exp(), b.exp(), (-a - b).exp()));
    rotation(rng) * d * rotation(rng)
}

fn equiaffine(s: &SurfaceDef, u: f64, v: f64, rng: &mut ChaCha8Rng) -> Result<Option<f64>, GeomError> {
    let a = unimodular(rng);
    let b = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
    if !nondegenerate(s, u, v)? {
        return Ok(None);
    }
    let image = s.affine_image(&a, &b);
    if classify_point(&image, u, v)? != classify_point(s, u, v)? {
        return Ok(Some(1.0));
    }
    let f0 = affine_first_fundamental(s, u, v)?.form.coefficients();
    let f1 = affine_first_fundamental(&image, u, v)?.form.coefficients();
    Ok(Some(coeff_deviation(f1, f0)))
}

fn reparam(s: &SurfaceDef, u: f64, v: f64, rng: &mut ChaCha8Rng) -> Result<Option<f64>, GeomError> {
    let j = loop {
        let j: Matrix2<f64> = Matrix2::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        if j.determinant().abs() > 0.05 {
            break j;
        }
    };
    if !nondegenerate(s, u, v)? {
        return Ok(None);
    }
    let (lhs, rhs) = check_reparam_covariance(s, u, v, &j)?;
    Ok(Some((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)))
}

/// A cubic path through `(u, v)` at `t = 1/2` with random coefficients.
fn random_path(s: &SurfaceDef, u: f64, v: f64, rng: &mut ChaCha8Rng) -> Result<ParamCurve, GeomError> {
    let mut poly = |c0: f64| {
        let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        format!("{c0} + ({})*(t - 0.5) + ({})*(t - 0.5)^2 + ({})*(t - 0.5)^3", c[0], c[1], c[2])
    };
    let (pu, pv) = (poly(u), poly(v));
    ParamCurve::from_exprs(
        s.clone(),
        &pu,
        &pv,
        Interval::new(0.0, 1.0).expect("unit interval"),
        InducedOrientation::Canonical,
    )
}

fn integrand_routes(pc: &ParamCurve) -> Result<Option<f64>, GeomError> {
    let direct = affine_integrand(pc, 0.5)?;
    let euclid = affine_integrand_via_euclidean(pc, 0.5)?;
    Ok(Some((direct - euclid).abs() / euclid.abs().max(f64::MIN_POSITIVE)))
}

fn residual_vs_corollary(pc: &ParamCurve) -> Result<Option<f64>, GeomError> {
    let c = check_corollary_euclidean(pc, 0.5)?;
    if c.curve_degenerate {
        return Ok(None);
    }
    let (uj, vj) = pc.uv_jets(0.5, 3)?;
    let d = |j: &affinemetrics::jets::Jet1| [j.deriv(1), j.deriv(2), j.deriv(3)];
    let res = commensurate_residual_general(pc.surface(), uj.value(), vj.value(), d(&uj), d(&vj), pc.sign())?;
    let speed = curve_jets(pc, 0.5, 1)?.deriv(1).norm();
    Ok(Some((res.value - speed.powi(6) * (c.lhs - c.rhs)).abs() / res.scale()))
}

pub fn check_identities(args: &IdentityArgs) -> Result<IdentitiesDoc, CliError> {
    let surface = resolve_surface(&args.surface)?;
    if args.samples == 0 {
        return Err(CliError::Config("--samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut tallies = [
        Tally::new("jets-vs-finite-differences", TOL_JETS),
        Tally::new("affine-form-vs-second-form", TOL_AFFINE_FORM),
        Tally::new("determinant-vs-normal-route", TOL_NORMAL_ROUTE),
        Tally::new("equiaffine-invariance", TOL_EQUIAFFINE),
        Tally::new("reparametrization-covariance", TOL_REPARAM),
        Tally::new("affine-integrand-routes", TOL_INTEGRAND_ROUTES),
        Tally::new("residual-vs-corollary", TOL_COROLLARY),
    ];
    let domain = surface.domain();
    for _ in 0..args.samples {
        let (u, v) = sample(&mut rng, domain);
        tallies[0].record(jets_vs_fd(&surface, u, v))?;
        tallies[1].record(affine_vs_second(&surface, u, v))?;
        tallies[2].record(determinant_vs_normal(&surface, u, v))?;
        tallies[3].record(equiaffine(&surface, u, v, &mut rng))?;
        tallies[4].record(reparam(&surface, u, v, &mut rng))?;
        let pc = random_path(&surface, u, v, &mut rng)?;
        tallies[5].record(integrand_routes(&pc))?;
        tallies[6].record(residual_vs_corollary(&pc))?;
    }
    let identities: Vec<IdentityResult> = tallies.into_iter().map(Tally::finish).collect();
    let passed = identities.iter().all(|r| r.passed);
    Ok(IdentitiesDoc {
        schema: SCHEMA.into(),
        command: "check-identities".into(),
        surface: surface_spec(&surface),
        samples: args.samples,
        seed: args.seed,
        identities,
        passed,
    })
}

pub fn run(args: &IdentityArgs) -> Result<(), CliError> {
    let doc = check_identities(args)?;
    let text = match output_format(&args.output, Format::Json) {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut t = Table::new(&["name", "checked", "skipped", "max_deviation", "tolerance", "passed"]);
            for r in &doc.identities {
                t.push(vec![
                    r.name.clone(),
                    r.checked.to_string(),
                    r.skipped.to_string(),
                    float(r.max_deviation),
                    float(r.tolerance),
                    r.passed.to_string(),
                ]);
            }
            t.render()
        }
    };
    emit(args.output.output.as_deref(), &text)?;
    for r in &doc.identities {
        eprintln!(
            "{} {}: max deviation {:e} (tolerance {:e}, {} checked, {} skipped)",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.max_deviation,
            r.tolerance,
            r.checked,
            r.skipped
        );
    }
    let failed: Vec<String> = doc.identities.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::IdentityFailure(failed))
    }
}
