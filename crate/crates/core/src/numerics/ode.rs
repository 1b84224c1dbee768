//! Adaptive ODE integration with dense output and event location.
//!
//! Two methods are available. [`Method::Rosenbrock23`] is the linearly
//! implicit Rosenbrock–Wanner pair of Shampine and Reichelt (order 2 with an
//! order-3 error estimate), L-stable, with a forward-difference Jacobian.
//! [`Method::DormandPrince45`] is the explicit 5(4) pair with Hairer's
//! continuous extension, used for non-stiff problems and cross-checks.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::root::find_root_bracketed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rosenbrock23,
    DormandPrince45,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 200_000,
            method: Method::Rosenbrock23,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Only `-` to `+` crossings.
    Rising,
    /// Only `+` to `-` crossings.
    Falling,
    Either,
}

pub type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + 'a>;

/// A scalar function of the state whose zero crossings are located on the
/// dense output.
pub struct Event<'a> {
    pub g: EventFn<'a>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a> Event<'a> {
    pub fn new(g: impl Fn(f64, &[f64]) -> f64 + 'a, direction: Direction, terminal: bool) -> Event<'a> {
        Event { g: Box::new(g), direction, terminal }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct RhsError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub enum OdeStatus {
    Completed,
    Event { index: usize, t: f64 },
    StepFailure { t: f64, reason: String },
    MaxSteps { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("right-hand side failed at the initial point: {0}")]
    InitialRhs(String),
    #[error("step size underflow at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("maximum number of steps reached at t = {t}")]
    MaxSteps { t: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub jacobian_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub index: usize,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum DenseKind {
    /// Cubic Hermite on `(y0, f0)` and `(y1, f1)`.
    Hermite { f0: Vec<f64>, y1: Vec<f64>, f1: Vec<f64> },
    /// `r1 + s (r2 + (1-s) (r3 + s (r4 + (1-s) r5)))`
    Dopri { r: [Vec<f64>; 5] },
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    y0: Vec<f64>,
    kind: DenseKind,
}

impl DenseSegment {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t0) / self.h;
        match &self.kind {
            DenseKind::Hermite { f0, y1, f1 } => {
                let (s2, s3) = (s * s, s * s * s);
                let (a0, b0) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s);
                let (a1, b1) = (3.0 * s2 - 2.0 * s3, s3 - s2);
                (0..self.y0.len()).map(|i| a0 * self.y0[i] + a1 * y1[i] + self.h * (b0 * f0[i] + b1 * f1[i])).collect()
            }
            DenseKind::Dopri { r } => (0..self.y0.len())
                .map(|i| r[0][i] + s * (r[1][i] + (1.0 - s) * (r[2][i] + s * (r[3][i] + (1.0 - s) * r[4][i]))))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub segments: Vec<DenseSegment>,
    pub status: OdeStatus,
    pub stats: OdeStats,
    /// Non-terminal event crossings, plus the terminal one if any.
    pub events: Vec<EventHit>,
}

impl OdeSolution {
    /// Dense-output state at `t`, or `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let (first, last) = (*self.t.first()?, *self.t.last()?);
        if t < first || t > last {
            return None;
        }
        if t == first {
            return Some(self.y[0].clone());
        }
        let i = self.segments.partition_point(|s| s.t0 + s.h < t);
        self.segments.get(i).map(|s| s.eval(t))
    }

    /// Turns step failures and step-budget exhaustion into errors.
    pub fn check(self) -> Result<OdeSolution, OdeError> {
        match &self.status {
            OdeStatus::StepFailure { t, reason } => Err(OdeError::StepFailure { t: *t, reason: reason.clone() }),
            OdeStatus::MaxSteps { t } => Err(OdeError::MaxSteps { t: *t }),
            _ => Ok(self),
        }
    }
}

const ROS_D: f64 = 0.292_893_218_813_452_5; // 1 / (2 + sqrt 2)
const ROS_E32: f64 = 7.414_213_562_373_095; // 6 + sqrt 2

struct Attempt {
    y_new: Vec<f64>,
    f_new: Vec<f64>,
    err: f64,
    kind: DenseKind,
}

struct Integrator<'f, F> {
    f: &'f F,
    opts: OdeOptions,
    stats: OdeStats,
    jac: Option<(f64, DMatrix<f64>, DVector<f64>)>,
}

impl<'f, F> Integrator<'f, F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<(), RhsError>,
{
    fn rhs(&mut self, t: f64, y: &[f64]) -> Result<Vec<f64>, RhsError> {
        self.stats.rhs_evals += 1;
        let mut out = vec![0.0; y.len()];
        (self.f)(t, y, &mut out)?;
        if out.iter().any(|x| !x.is_finite()) {
            return Err(RhsError(format!("non-finite derivative at t = {t}")));
        }
        Ok(out)
    }

    fn error_norm(&self, err: &[f64], y: &[f64], y_new: &[f64]) -> f64 {
        err.iter()
            .zip(y.iter().zip(y_new))
            .map(|(e, (a, b))| e.abs() / (self.opts.abs_tol + self.opts.rel_tol * a.abs().max(b.abs())))
            .fold(0.0, f64::max)
    }

    /// Forward-difference Jacobian and time derivative at `(t, y)`.
    fn jacobian(&mut self, t: f64, y: &[f64], f0: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>), RhsError> {
        if let Some((tj, j, dt)) = &self.jac {
            if *tj == t {
                return Ok((j.clone(), dt.clone()));
            }
        }
        self.stats.jacobian_evals += 1;
        let n = y.len();
        let mut j = DMatrix::zeros(n, n);
        let sqrt_eps = f64::EPSILON.sqrt();
        let mut yp = y.to_vec();
        for c in 0..n {
            let delta = sqrt_eps * y[c].abs().max(1.0);
            yp[c] = y[c] + delta;
            let fp = self.rhs(t, &yp)?;
            yp[c] = y[c];
            for r in 0..n {
                j[(r, c)] = (fp[r] - f0[r]) / delta;
            }
        }
        let dt_step = sqrt_eps * t.abs().max(1.0);
        let ft = self.rhs(t + dt_step, y)?;
        let dfdt = DVector::from_iterator(n, (0..n).map(|r| (ft[r] - f0[r]) / dt_step));
        self.jac = Some((t, j.clone(), dfdt.clone()));
        Ok((j, dfdt))
    }

    fn rosenbrock(&mut self, t: f64, y: &[f64], f0: &[f64], h: f64) -> Result<Attempt, RhsError> {
        let n = y.len();
        let (j, dfdt) = self.jacobian(t, y, f0)?;
        let w = DMatrix::identity(n, n) - j * (h * ROS_D);
        let lu = w.lu();
        let solve = |b: DVector<f64>| -> Result<DVector<f64>, RhsError> {
            lu.solve(&b).ok_or_else(|| RhsError("singular iteration matrix".into()))
        };
        let f0v = DVector::from_column_slice(f0);
        let hdt = dfdt * (h * ROS_D);
        let k1 = solve(&f0v + &hdt)?;
        let y_mid: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k1[i]).collect();
        let f1 = DVector::from_vec(self.rhs(t + 0.5 * h, &y_mid)?);
        let k2 = solve(&f1 - &k1)? + &k1;
        let y_new: Vec<f64> = (0..n).map(|i| y[i] + h * k2[i]).collect();
        let f2 = self.rhs(t + h, &y_new)?;
        let f2v = DVector::from_column_slice(&f2);
        let k3 = solve(&f2v - (&k2 - &f1) * ROS_E32 - (&k1 - &f0v) * 2.0 + &hdt)?;
        let err_vec: Vec<f64> = (0..n).map(|i| h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i])).collect();
        let err = self.error_norm(&err_vec, y, &y_new);
        let kind = DenseKind::Hermite { f0: f0.to_vec(), y1: y_new.clone(), f1: f2.clone() };
        Ok(Attempt { y_new, f_new: f2, err, kind })
    }

    fn dopri(&mut self, t: f64, y: &[f64], f0: &[f64], h: f64) -> Result<Attempt, RhsError> {
        const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
        const A: [&[f64]; 6] = [
            &[0.2],
            &[3.0 / 40.0, 9.0 / 40.0],
            &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
            &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
            &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] =
            [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
        const D: [f64; 7] = [
            -12715105075.0 / 11282082432.0,
            0.0,
            87487479700.0 / 32700410799.0,
            -10690763975.0 / 1880347072.0,
            701980252875.0 / 199316789632.0,
            -1453857185.0 / 822651844.0,
            69997945.0 / 29380423.0,
        ];
        let n = y.len();
        let mut k: Vec<Vec<f64>> = vec![f0.to_vec()];
        for (s, row) in A.iter().enumerate() {
            let ys: Vec<f64> =
                (0..n).map(|i| y[i] + h * row.iter().enumerate().map(|(j, a)| a * k[j][i]).sum::<f64>()).collect();
            let fs = self.rhs(t + C[s] * h, &ys)?;
            k.push(fs);
        }
        // the last stage is evaluated at y_new (FSAL)
        let y_new: Vec<f64> =
            (0..n).map(|i| y[i] + h * A[5].iter().enumerate().map(|(j, a)| a * k[j][i]).sum::<f64>()).collect();
        let err_vec: Vec<f64> = (0..n).map(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>()).collect();
        let err = self.error_norm(&err_vec, y, &y_new);
        let r1 = y.to_vec();
        let r2: Vec<f64> = (0..n).map(|i| y_new[i] - y[i]).collect();
        let r3: Vec<f64> = (0..n).map(|i| h * k[0][i] - r2[i]).collect();
        let r4: Vec<f64> = (0..n).map(|i| r2[i] - h * k[6][i] - r3[i]).collect();
        let r5: Vec<f64> = (0..n).map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()).collect();
        let f_new = k.pop().unwrap();
        Ok(Attempt { y_new, f_new, err, kind: DenseKind::Dopri { r: [r1, r2, r3, r4, r5] } })
    }
}

fn crossed(direction: Direction, before: f64, after: f64) -> bool {
    let rising = before < 0.0 && after >= 0.0;
    let falling = before > 0.0 && after <= 0.0;
    match direction {
        Direction::Rising => rising,
        Direction::Falling => falling,
        Direction::Either => rising || falling,
    }
}

/// Integrates `y' = f(t, y)` from `t_span.0` to `t_span.1 > t_span.0`.
///
/// `f` writes the derivative into its output slice. A failing right-hand
/// side rejects the step and shrinks it; the run ends with
/// [`OdeStatus::StepFailure`] if the step underflows. Terminal events stop
/// the run at the crossing, located on the dense output to `1e-12` in `t`.
pub fn ode_solve<F>(
    f: F,
    y0: &[f64],
    t_span: (f64, f64),
    opts: &OdeOptions,
    events: &[Event<'_>],
) -> Result<OdeSolution, OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<(), RhsError>,
{
    let (t0, t_end) = t_span;
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(OdeError::InvalidOptions("tolerances must be positive".into()));
    }
    if !t0.is_finite() || !t_end.is_finite() || t_end <= t0 {
        return Err(OdeError::InvalidOptions(format!("bad time span ({t0}, {t_end})")));
    }
    if y0.iter().any(|x| !x.is_finite()) {
        return Err(OdeError::InvalidOptions("initial state is not finite".into()));
    }
    let mut it = Integrator { f: &f, opts: *opts, stats: OdeStats::default(), jac: None };
    let mut f_cur = it.rhs(t0, y0).map_err(|e| OdeError::InitialRhs(e.0))?;
    let (order, safety) = match opts.method {
        Method::Rosenbrock23 => (3.0, 0.8),
        Method::DormandPrince45 => (5.0, 0.9),
    };

    let span = t_end - t0;
    let mut h = match opts.initial_step {
        Some(h) => h,
        None => {
            let scale = |v: &[f64], y: &[f64]| {
                v.iter().zip(y).map(|(a, b)| a.abs() / (opts.abs_tol + opts.rel_tol * b.abs())).fold(0.0, f64::max)
            };
            let d0 = scale(y0, y0);
            let d1 = scale(&f_cur, y0);
            let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            guess.min(0.1 * span)
        }
    }
    .min(opts.max_step)
    .min(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut sol = OdeSolution {
        t: vec![t0],
        y: vec![y.clone()],
        segments: Vec::new(),
        status: OdeStatus::Completed,
        stats: OdeStats::default(),
        events: Vec::new(),
    };
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut last_reason = String::from("error test failed repeatedly");

    loop {
        if sol.stats.accepted + it.stats.rejected >= opts.max_steps {
            sol.status = OdeStatus::MaxSteps { t };
            break;
        }
        let remaining = t_end - t;
        h = h.min(remaining).min(opts.max_step);
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_min {
            sol.status = OdeStatus::StepFailure { t, reason: last_reason };
            break;
        }
        let attempt = match opts.method {
            Method::Rosenbrock23 => it.rosenbrock(t, &y, &f_cur, h),
            Method::DormandPrince45 => it.dopri(t, &y, &f_cur, h),
        };
        let a = match attempt {
            Ok(a) if a.err.is_finite() && a.err <= 1.0 => a,
            Ok(a) => {
                it.stats.rejected += 1;
                let factor = if a.err.is_finite() { (safety * a.err.powf(-1.0 / order)).clamp(0.1, 0.5) } else { 0.25 };
                h *= factor;
                continue;
            }
            Err(e) => {
                it.stats.rejected += 1;
                last_reason = e.0;
                h *= 0.25;
                continue;
            }
        };

        let t_new = if h == remaining { t_end } else { t + h };
        let segment = DenseSegment { t0: t, h: t_new - t, y0: y.clone(), kind: a.kind };
        let g_new: Vec<f64> = events.iter().map(|e| (e.g)(t_new, &a.y_new)).collect();

        let mut terminal_hit: Option<(usize, f64)> = None;
        let mut hits = Vec::new();
        for (i, ev) in events.iter().enumerate() {
            if !crossed(ev.direction, g_prev[i], g_new[i]) {
                continue;
            }
            let root = find_root_bracketed(|s| (ev.g)(s, &segment.eval(s)), t, t_new, 1e-12).unwrap_or(t_new);
            hits.push((i, root));
            if ev.terminal && terminal_hit.is_none_or(|(_, tr)| root < tr) {
                terminal_hit = Some((i, root));
            }
        }
        hits.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (i, root) in hits {
            if terminal_hit.is_some_and(|(_, tr)| root > tr) {
                continue;
            }
            sol.events.push(EventHit { index: i, t: root, y: segment.eval(root) });
        }

        sol.stats.accepted += 1;
        if let Some((index, t_ev)) = terminal_hit {
            let y_ev = segment.eval(t_ev);
            sol.segments.push(segment);
            sol.t.push(t_ev);
            sol.y.push(y_ev);
            sol.status = OdeStatus::Event { index, t: t_ev };
            break;
        }
        sol.segments.push(segment);
        t = t_new;
        y = a.y_new;
        f_cur = a.f_new;
        sol.t.push(t);
        sol.y.push(y.clone());
        g_prev = g_new;
        if t >= t_end {
            break;
        }
        let factor = if a.err == 0.0 { 5.0 } else { (safety * a.err.powf(-1.0 / order)).clamp(0.2, 5.0) };
        h *= factor;
    }
    let rejected = it.stats.rejected;
    sol.stats = OdeStats { rejected, ..it.stats };
    sol.stats.accepted = sol.t.len() - 1;
    Ok(sol)
}
