use serde::{Deserialize, Serialize};

use super::{dense_rate, theta_dd_from, theta_split, InducedOrientation, Residual, ThetaState};
use crate::error::{GeomError, Result};
use crate::numerics::ode::OdeStats;
use crate::numerics::{ode_solve, Direction, Event, Method, OdeOptions, OdeSolution, OdeStatus, RhsError};
use crate::surfgeo::SurfaceDef;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
    /// Stop when `sigma I_aff(alpha') / |ln - m^2|^(1/4)` drops below this.
    pub eps_asym: f64,
    /// Stop when `|D| / (|alpha'| |alpha''| |Xu x Xv|)` drops below this.
    pub eps_den: f64,
    /// Stop this far inside the parameter domain.
    pub domain_margin: f64,
    pub orientation: InducedOrientation,
    #[serde(skip, default = "default_method")]
    pub method: Method,
}

fn default_method() -> Method {
    Method::Rosenbrock23
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: None,
            max_step: 0.05,
            max_steps: 200_000,
            eps_asym: 1e-4,
            eps_den: super::DEFAULT_EPS_DEN,
            domain_margin: 1e-9,
            orientation: InducedOrientation::Auto,
            method: Method::Rosenbrock23,
        }
    }
}

/// Start `(u0, v0)` in direction `theta0` with `theta'(0) = omega0`, the
/// free second-order seed of the one-parameter family.
#[derive(Debug, Clone)]
pub struct CommensurateIvp {
    pub surface: SurfaceDef,
    pub u0: f64,
    pub v0: f64,
    pub theta0: f64,
    pub omega0: f64,
    pub t_max: f64,
    pub options: SolveOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    AsymptoticProximity,
    SingularDenominator,
    DomainExit,
    StepFailure,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::AsymptoticProximity => "AsymptoticProximity",
            EventKind::SingularDenominator => "SingularDenominator",
            EventKind::DomainExit => "DomainExit",
            EventKind::StepFailure => "StepFailure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Event {
        kind: EventKind,
        t_stop: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        detail: Option<String>,
    },
}

impl Termination {
    pub fn kind(&self) -> Option<EventKind> {
        match self {
            Termination::Completed => None,
            Termination::Event { kind, .. } => Some(*kind),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Termination::Completed => "completed".into(),
            Termination::Event { kind, t_stop, .. } => format!("{} at t = {t_stop}", kind.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Residual of the commensurateness condition with the solved `theta''`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolutionTrace {
    surface: SurfaceDef,
    /// Sign applied to the canonical affine form along the trace.
    pub orientation: f64,
    pub nodes: Vec<TraceNode>,
    pub termination: Termination,
    pub max_residual: f64,
    pub stats: OdeStats,
    eps_den: f64,
    solution: OdeSolution,
}

impl SolutionTrace {
    pub fn surface(&self) -> &SurfaceDef {
        &self.surface
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.solution.t[0], *self.solution.t.last().expect("nonempty trace"))
    }

    /// Interpolated `(u, v, theta, theta')`.
    pub fn state_at(&self, t: f64) -> Option<[f64; 4]> {
        let y = self.solution.eval(t)?;
        Some([y[0], y[1], y[2], y[3]])
    }

    /// `theta''` from the commensurateness condition at the interpolated state.
    pub fn theta_dd_model(&self, t: f64) -> Result<f64> {
        let y = self.state_at(t).ok_or(GeomError::OutOfDomain { point: vec![t] })?;
        theta_dd_from(&self.surface, y[0], y[1], y[2], y[3], self.orientation, self.eps_den, false)
    }

    /// `theta''` by central differences of the interpolated `theta'`;
    /// `None` within `step` of either end.
    pub fn theta_dd_fd(&self, t: f64, step: f64) -> Option<f64> {
        dense_rate(self, t, step)
    }

    /// Residual at `t` with `theta''` from finite differences.
    pub fn residual_fd(&self, t: f64, step: f64) -> Option<Result<Residual>> {
        let y = self.state_at(t)?;
        let tdd = self.theta_dd_fd(t, step)?;
        let st = ThetaState { u: y[0], v: y[1], theta: y[2], theta_p: y[3], theta_pp: tdd };
        Some(super::commensurate_residual(&self.surface, &st, self.orientation))
    }
}

fn validate(ivp: &CommensurateIvp) -> Result<f64> {
    let o = &ivp.options;
    if !(o.rel_tol > 0.0 && o.abs_tol > 0.0 && o.eps_asym >= 0.0 && o.eps_den >= 0.0) {
        return Err(GeomError::InvalidIvp("tolerances must be positive".into()));
    }
    if !(ivp.t_max > 0.0 && ivp.t_max.is_finite()) {
        return Err(GeomError::InvalidIvp(format!("t_max = {} must be positive", ivp.t_max)));
    }
    let start = [ivp.u0, ivp.v0, ivp.theta0, ivp.omega0];
    if start.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::InvalidIvp("initial values must be finite".into()));
    }
    if ivp.surface.domain().margin(ivp.u0, ivp.v0) <= o.domain_margin {
        return Err(GeomError::InvalidIvp(format!("({}, {}) is not inside the surface domain", ivp.u0, ivp.v0)));
    }
    let sp = match theta_split(&ivp.surface, ivp.u0, ivp.v0, ivp.theta0, ivp.omega0, 1.0, true) {
        Ok(sp) => sp,
        Err(GeomError::DegenerateSurfacePoint { .. }) => {
            return Err(GeomError::InvalidIvp("the surface is degenerate at the initial point".into()))
        }
        Err(e) => return Err(e),
    };
    let ratio = sp.iaff / sp.form.scale();
    if ratio.abs() <= o.eps_asym {
        return Err(GeomError::InvalidIvp(format!("initial direction is asymptotic: I_aff(v) = {:e}", sp.iaff)));
    }
    let sign = o.orientation.fixed().unwrap_or(ratio.signum());
    if sign * ratio <= o.eps_asym {
        return Err(GeomError::InvalidIvp(format!(
            "I_aff(v) = {:e} is negative for the requested orientation",
            sign * sp.iaff
        )));
    }
    match theta_dd_from(&ivp.surface, ivp.u0, ivp.v0, ivp.theta0, ivp.omega0, sign, o.eps_den, true) {
        Ok(_) => Ok(sign),
        Err(GeomError::SingularDenominator { .. }) => {
            Err(GeomError::InvalidIvp("theta'' coefficient vanishes at the initial state".into()))
        }
        Err(e) => Err(e),
    }
}

/// Integrates `u' = cos theta`, `v' = sin theta`, `theta'' = solve(theta, theta')`
/// on `[0, t_max]`. Breakdowns end the trace with an event; only an invalid
/// start is an error.
pub fn integrate_commensurate(ivp: &CommensurateIvp) -> Result<SolutionTrace> {
    let sign = validate(ivp)?;
    let o = ivp.options;
    let surface = &ivp.surface;
    let domain = surface.domain();

    let rhs = |_: f64, y: &[f64], out: &mut [f64]| -> std::result::Result<(), RhsError> {
        let tdd = theta_dd_from(surface, y[0], y[1], y[2], y[3], sign, o.eps_den, false)
            .map_err(|e| RhsError(e.to_string()))?;
        let (s, c) = y[2].sin_cos();
        out[0] = c;
        out[1] = s;
        out[2] = y[3];
        out[3] = tdd;
        Ok(())
    };
    let events = [
        Event::new(
            |_, y: &[f64]| match theta_split(surface, y[0], y[1], y[2], y[3], sign, false) {
                Ok(sp) => sp.iaff / sp.form.scale() - o.eps_asym,
                Err(_) => -1.0,
            },
            Direction::Falling,
            true,
        ),
        Event::new(
            |_, y: &[f64]| match theta_split(surface, y[0], y[1], y[2], y[3], sign, false) {
                Ok(sp) if sp.d_scale > 0.0 => sp.d.abs() / sp.d_scale - o.eps_den,
                _ => -1.0,
            },
            Direction::Falling,
            true,
        ),
        Event::new(|_, y: &[f64]| domain.margin(y[0], y[1]) - o.domain_margin, Direction::Falling, true),
    ];
    let opts = OdeOptions {
        rel_tol: o.rel_tol,
        abs_tol: o.abs_tol,
        initial_step: o.initial_step,
        max_step: o.max_step,
        max_steps: o.max_steps,
        method: o.method,
    };
    let y0 = [ivp.u0, ivp.v0, ivp.theta0, ivp.omega0];
    let solution =
        ode_solve(rhs, &y0, (0.0, ivp.t_max), &opts, &events).map_err(|e| GeomError::Numerical(e.to_string()))?;

    let termination = match &solution.status {
        OdeStatus::Completed => Termination::Completed,
        OdeStatus::Event { index, t } => {
            let kind = [EventKind::AsymptoticProximity, EventKind::SingularDenominator, EventKind::DomainExit][*index];
            Termination::Event { kind, t_stop: *t, detail: None }
        }
        OdeStatus::StepFailure { t, reason } => {
            Termination::Event { kind: EventKind::StepFailure, t_stop: *t, detail: Some(reason.clone()) }
        }
        OdeStatus::MaxSteps { t } => Termination::Event {
            kind: EventKind::StepFailure,
            t_stop: *t,
            detail: Some(format!("step budget of {} exhausted", o.max_steps)),
        },
    };

    let mut nodes = Vec::with_capacity(solution.t.len());
    let mut max_residual: f64 = 0.0;
    for (t, y) in solution.t.iter().zip(&solution.y) {
        let p = surface.point(y[0], y[1])?;
        let residual = theta_dd_from(surface, y[0], y[1], y[2], y[3], sign, 0.0, false)
            .and_then(|tdd| {
                let st = ThetaState { u: y[0], v: y[1], theta: y[2], theta_p: y[3], theta_pp: tdd };
                super::commensurate_residual(surface, &st, sign).map(|r| r.value)
            })
            .unwrap_or(f64::NAN);
        max_residual = max_residual.max(residual.abs());
        nodes.push(TraceNode {
            t: *t,
            u: y[0],
            v: y[1],
            theta: y[2],
            theta_prime: y[3],
            x: p[0],
            y: p[1],
            z: p[2],
            residual,
        });
    }
    Ok(SolutionTrace {
        surface: surface.clone(),
        orientation: sign,
        nodes,
        termination,
        max_residual,
        stats: solution.stats,
        eps_den: o.eps_den,
        solution,
    })
}

/// One IVP per `theta'(0)` seed, in order.
pub fn sweep_family(ivp: &CommensurateIvp, omegas: &[f64]) -> Vec<Result<SolutionTrace>> {
    omegas.iter().map(|&omega0| integrate_commensurate(&CommensurateIvp { omega0, ..ivp.clone() })).collect()
}
