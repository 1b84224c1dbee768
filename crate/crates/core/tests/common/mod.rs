#![allow(dead_code)]

use affinemetrics::domain::Interval;
use affinemetrics::surfgeo::SurfaceDef;
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn surface(name: &str) -> SurfaceDef {
    SurfaceDef::builtin(name).unwrap()
}

pub fn interval(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

/// A uniformly random point at least `inset` (as a fraction of each side)
/// inside the surface domain.
pub fn domain_point(rng: &mut impl Rng, s: &SurfaceDef, inset: f64) -> (f64, f64) {
    let d = s.domain();
    let pick = |rng: &mut dyn rand::RngCore, iv: Interval| {
        let w = iv.width();
        rng.gen_range(iv.lo + inset * w..iv.hi - inset * w)
    };
    (pick(rng, d.u), pick(rng, d.v))
}

/// One component: a random polynomial of degree at most 4 plus a sinusoid.
pub fn random_component(rng: &mut impl Rng) -> String {
    let mut s = String::new();
    let degree = rng.gen_range(0..=4);
    for j in 0..=degree {
        let c: f64 = rng.gen_range(-1.0..1.0);
        s.push_str(&format!("({c})*t^{j} + "));
    }
    let (a, w, p): (f64, f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0));
    let f = if rng.gen_bool(0.5) { "sin" } else { "cos" };
    s.push_str(&format!("({a})*{f}({w}*t + ({p}))"));
    s
}

pub fn random_curve_sources(rng: &mut impl Rng) -> [String; 3] {
    std::array::from_fn(|_| random_component(rng))
}

fn gaussian_matrix(rng: &mut impl Rng) -> Matrix3<f64> {
    Matrix3::from_fn(|_, _| {
        let (a, b): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen_range(0.0..1.0));
        (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos()
    })
}

fn rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    let mut q = gaussian_matrix(rng).qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `Q1 diag(d) Q2` with rotations `Q1, Q2` and `d1 d2 d3 = 1`, so every
/// singular value lies in `[e^-2, e^2]`.
pub fn unimodular(rng: &mut impl Rng) -> Matrix3<f64> {
    let a: f64 = rng.gen_range(-1.0..1.0);
    let b: f64 = rng.gen_range(-1.0..1.0);
    let c = -(a + b);
    let d = Matrix3::from_diagonal(&Vector3::new(a.exp(), b.exp(), c.exp()));
    rotation(rng) * d * rotation(rng)
}

pub fn translation(rng: &mut impl Rng) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0))
}
