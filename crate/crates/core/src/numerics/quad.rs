//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

#![allow(clippy::excessive_precision)]

use std::convert::Infallible;

use serde::Serialize;
use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subintervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_subintervals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError<E> {
    #[error("integrand failed: {0}")]
    Integrand(E),
    #[error(
        "quadrature did not converge: value {value}, error estimate {error_estimate} after {subintervals} subintervals"
    )]
    Failure { value: f64, error_estimate: f64, subintervals: usize },
    #[error("integrand returned a non-finite value at {x}")]
    NonFiniteValue { x: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<Panel, QuadError<E>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64, QuadError<E>> {
        let y = f(x).map_err(QuadError::Integrand)?;
        if !y.is_finite() {
            return Err(QuadError::NonFiniteValue { x });
        }
        Ok(y)
    };
    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates a fallible integrand over `[a, b]` to
/// `max(abs_tol, rel_tol * |value|)`. Bisects the panel with the largest
/// error estimate until the global estimate meets the tolerance.
pub fn quad_adaptive_with<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    cfg: QuadConfig,
) -> Result<QuadResult, QuadError<E>> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    if b < a {
        let r = quad_adaptive_with(f, b, a, cfg)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut panels = vec![kronrod15(&mut f, a, b)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult { value, error_estimate: error, evaluations });
        }
        if panels.len() >= cfg.max_subintervals {
            return Err(QuadError::Failure { value, error_estimate: error, subintervals: panels.len() });
        }
        let (worst, _) =
            panels.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, p)| {
                    if p.error > acc.1 {
                        (i, p.error)
                    } else {
                        acc
                    }
                },
            );
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(QuadError::Failure { value, error_estimate: error, subintervals: panels.len() + 1 });
        }
        panels.push(kronrod15(&mut f, p.a, mid)?);
        panels.push(kronrod15(&mut f, mid, p.b)?);
        evaluations += 30;
    }
}

/// Infallible convenience wrapper around [`quad_adaptive_with`].
pub fn quad_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError<Infallible>> {
    quad_adaptive_with(|x| Ok::<f64, Infallible>(f(x)), a, b, QuadConfig { rel_tol, abs_tol, ..QuadConfig::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_on_unit_interval() {
        let r = quad_adaptive(|t| t * t, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn sine_over_half_period() {
        let r = quad_adaptive(f64::sin, 0.0, std::f64::consts::PI, 1e-12, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_on_high_degree_polynomials() {
        // K15 integrates degree 22 exactly; G7 only degree 13
        let r = quad_adaptive(|t| t.powi(22), -1.0, 1.0, 1e-15, 1e-15).unwrap();
        assert!((r.value - 2.0 / 23.0).abs() < 1e-13);
        let r = quad_adaptive(|t| 3.0 * t.powi(13) - t.powi(6) + 2.0, -1.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((r.value - (4.0 - 2.0 / 7.0)).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn spherical_helix_speed_against_simpson() {
        let f = |s: f64| (1.0 + 64.0 * s.cos().powi(2)).sqrt();
        let oracle = simpson(f, 0.0, 1.0, 1_000_000);
        let r = quad_adaptive(f, 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((r.value - oracle).abs() < 1e-9, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let r = quad_adaptive(|t| t, 1.0, 0.0, 1e-12, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
        assert_eq!(quad_adaptive(|t| t, 2.0, 2.0, 1e-12, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn integrable_root_singularity() {
        // t^(1/6) behaves like the affine integrand near a zero of the determinant
        let r = quad_adaptive(|t: f64| t.abs().powf(1.0 / 6.0), -1.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((r.value - 12.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn errors_are_reported() {
        let nonfinite = quad_adaptive(|t| 1.0 / t, -1.0, 1.0, 1e-10, 1e-10);
        assert!(matches!(nonfinite, Err(QuadError::NonFiniteValue { .. })));
        let budget = quad_adaptive_with(
            |t: f64| Ok::<_, Infallible>((1.0 / t.abs().max(1e-300)).sqrt()),
            -1.0,
            1.0,
            QuadConfig { rel_tol: 1e-14, abs_tol: 1e-14, max_subintervals: 50 },
        );
        assert!(matches!(budget, Err(QuadError::Failure { .. })));
        let failing =
            quad_adaptive_with(|t| if t > 0.5 { Err("boom") } else { Ok(t) }, 0.0, 1.0, QuadConfig::default());
        assert_eq!(failing, Err(QuadError::Integrand("boom")));
    }
}
