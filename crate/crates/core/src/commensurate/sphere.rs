use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::numerics::{ode_solve, Method, OdeOptions};

/// `kappa(s) = sqrt(s^2 + 1)`.
pub fn sphere_kappa(s: f64) -> f64 {
    (s * s + 1.0).sqrt()
}

/// `tau(s) = 1 / (s^2 + 1)`.
pub fn sphere_tau(s: f64) -> f64 {
    1.0 / (s * s + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceSample {
    pub s: f64,
    pub kappa: f64,
    pub tau: f64,
    pub position: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
    /// `alpha + e2 / kappa + (1 / tau) (1 / kappa)' e3`
    pub center: [f64; 3],
}

/// Integrates the Frenet equations with the closed-form curvature and
/// torsion above from the identity frame at the origin, sampled every
/// `step` in arc length up to `s_max`.
pub fn sphere_reference_curve(s_max: f64, step: f64) -> Result<Vec<ReferenceSample>> {
    if !(s_max > 0.0 && step > 0.0 && s_max.is_finite()) {
        return Err(GeomError::Numerical(format!("need s_max > 0 and step > 0, got {s_max} and {step}")));
    }
    let rhs = |s: f64, y: &[f64], out: &mut [f64]| {
        let (k, t) = (sphere_kappa(s), sphere_tau(s));
        for i in 0..3 {
            let (e1, e2, e3) = (y[3 + i], y[6 + i], y[9 + i]);
            out[i] = e1;
            out[3 + i] = k * e2;
            out[6 + i] = -k * e1 + t * e3;
            out[9 + i] = -t * e2;
        }
        Ok(())
    };
    let mut y0 = [0.0; 12];
    y0[3] = 1.0;
    y0[7] = 1.0;
    y0[11] = 1.0;
    let opts = OdeOptions { rel_tol: 1e-13, abs_tol: 1e-14, method: Method::DormandPrince45, ..OdeOptions::default() };
    let sol = ode_solve(rhs, &y0, (0.0, s_max), &opts, &[])
        .and_then(|s| s.check())
        .map_err(|e| GeomError::Numerical(e.to_string()))?;
    let n = (s_max / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if s_max - grid[n] > 1e-12 * s_max {
        grid.push(s_max);
    }
    Ok(grid
        .into_iter()
        .map(|s| {
            let y = sol.eval(s.min(s_max)).expect("inside the integrated range");
            let v = |k: usize| Vector3::new(y[k], y[k + 1], y[k + 2]);
            let (p, e1, e2, e3) = (v(0), v(3), v(6), v(9));
            let kappa = sphere_kappa(s);
            let tau = sphere_tau(s);
            // (1/kappa)' = -s / (s^2 + 1)^(3/2)
            let dinv = -s / (s * s + 1.0).powf(1.5);
            let c = p + e2 / kappa + e3 * (dinv / tau);
            let a = |x: Vector3<f64>| [x[0], x[1], x[2]];
            ReferenceSample { s, kappa, tau, position: a(p), e1: a(e1), e2: a(e2), e3: a(e3), center: a(c) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_origin() {
        assert_eq!(sphere_kappa(0.0), 1.0);
        assert_eq!(sphere_tau(0.0), 1.0);
        for s in [0.0, 0.7, 3.0] {
            let k = sphere_kappa(s);
            assert!((k * k * sphere_tau(s) - 1.0).abs() <= 1e-15);
            assert!(((k * k - 1.0).sqrt() - s).abs() <= 1e-9);
        }
    }

    #[test]
    fn center_is_fixed_and_radius_is_one() {
        let tr = sphere_reference_curve(5.0, 0.05).unwrap();
        assert_eq!(tr.len(), 101);
        let c0 = Vector3::from(tr[0].center);
        for smp in &tr {
            let c = Vector3::from(smp.center);
            assert!((c - c0).norm() <= 1e-6, "s = {}", smp.s);
            assert!(((Vector3::from(smp.position) - c).norm() - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sphere_reference_curve(0.0, 0.1).is_err());
        assert!(sphere_reference_curve(1.0, 0.0).is_err());
    }
}
