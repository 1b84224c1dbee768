use std::path::{Path, PathBuf};

use affinemetrics::commensurate::{
    integrate_commensurate, CommensurateIvp, EventKind, SolutionTrace, SolveOptions, Termination,
};
use rayon::prelude::*;

use super::{output_format, pair, resolve_surface, surface_spec, sweep};
use crate::args::{Format, SolveArgs};
use crate::error::CliError;
use crate::output::{emit, float, json, Table};
use crate::schema::{IvpSpec, TraceDoc, SCHEMA};

pub const THREADS_ENV: &str = "AFFINEMETRICS_THREADS";

fn options(args: &SolveArgs) -> Result<SolveOptions, CliError> {
    let mut o = SolveOptions { orientation: args.orientation.into(), ..SolveOptions::default() };
    let positive = |x: Option<f64>, flag: &str| -> Result<Option<f64>, CliError> {
        match x {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Config(format!("{flag} must be positive"))),
            _ => Ok(x),
        }
    };
    if let Some(x) = positive(args.rel_tol, "--rel-tol")? {
        o.rel_tol = x;
    }
    if let Some(x) = positive(args.abs_tol, "--abs-tol")? {
        o.abs_tol = x;
    }
    if let Some(x) = positive(args.max_step, "--max-step")? {
        o.max_step = x;
    }
    if let Some(n) = args.max_steps {
        if n == 0 {
            return Err(CliError::Config("--max-steps must be positive".into()));
        }
        o.max_steps = n;
    }
    for (x, flag, slot) in [(args.eps_asym, "--eps-asym", &mut o.eps_asym), (args.eps_den, "--eps-den", &mut o.eps_den)]
    {
        if let Some(x) = x {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(CliError::Config(format!("{flag} must be nonnegative")));
            }
            *slot = x;
        }
    }
    Ok(o)
}

pub fn trace_doc(ivp: &CommensurateIvp, trace: &SolutionTrace) -> TraceDoc {
    TraceDoc {
        schema: SCHEMA.into(),
        command: "commensurate-solve".into(),
        ivp: IvpSpec {
            surface: surface_spec(&ivp.surface),
            u0: ivp.u0,
            v0: ivp.v0,
            theta0: ivp.theta0,
            omega0: ivp.omega0,
            t_max: ivp.t_max,
        },
        options: ivp.options,
        orientation: trace.orientation,
        termination: trace.termination.clone(),
        max_residual: trace.max_residual,
        node_count: trace.nodes.len(),
        nodes: trace.nodes.clone(),
    }
}

fn render(doc: &TraceDoc, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(doc),
        Format::Csv => {
            let mut t = Table::new(&["t", "u", "v", "theta", "theta_prime", "x", "y", "z", "residual"]);
            for n in &doc.nodes {
                t.push(
                    [n.t, n.u, n.v, n.theta, n.theta_prime, n.x, n.y, n.z, n.residual]
                        .iter()
                        .map(|x| float(*x))
                        .collect(),
                );
            }
            Ok(t.render())
        }
    }
}

/// `dir/stem_omega007.ext` for sweep member 7 of `dir/stem.ext`.
pub fn member_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    let name = match base.extension() {
        Some(ext) => format!("{stem}_omega{index:03}.{}", ext.to_string_lossy()),
        None => format!("{stem}_omega{index:03}"),
    };
    base.with_file_name(name)
}

fn summary(label: &str, trace: &SolutionTrace) -> String {
    format!(
        "{label}{}; {} nodes, max residual {:e}",
        trace.termination.describe(),
        trace.nodes.len(),
        trace.max_residual
    )
}

fn termination_code(t: &Termination) -> u8 {
    match t.kind() {
        Some(EventKind::StepFailure) => 5,
        _ => 0,
    }
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
    }
}

struct Member {
    omega0: f64,
    result: Result<(), CliError>,
}

pub fn run(args: &SolveArgs) -> Result<(), CliError> {
    let surface = resolve_surface(&args.surface)?;
    let (u0, v0) = pair(&args.at, "--at")?;
    let omegas = sweep(&args.omega0, "--omega0")?;
    let options = options(args)?;
    let format = output_format(&args.output, Format::Csv);
    let ivp = |omega0: f64| CommensurateIvp {
        surface: surface.clone(),
        u0,
        v0,
        theta0: args.theta0,
        omega0,
        t_max: args.t_max,
        options,
    };
    let is_sweep = args.omega0.contains(':');
    if !is_sweep {
        let ivp = ivp(omegas[0]);
        let trace = integrate_commensurate(&ivp)?;
        emit(args.output.output.as_deref(), &render(&trace_doc(&ivp, &trace), format)?)?;
        eprintln!("{}", summary("", &trace));
        return match termination_code(&trace.termination) {
            0 => Ok(()),
            _ => Err(CliError::Numerical(format!("integration failed: {}", trace.termination.describe()))),
        };
    }
    let base =
        args.output.output.clone().ok_or_else(|| {
            CliError::Config("an --omega0 sweep writes one file per seed and requires --output".into())
        })?;
    let solve_one = |(index, &omega0): (usize, &f64)| -> Member {
        let ivp = ivp(omega0);
        let result = integrate_commensurate(&ivp).map_err(CliError::from).and_then(|trace| {
            emit(Some(&member_path(&base, index)), &render(&trace_doc(&ivp, &trace), format)?)?;
            eprintln!("{}", summary(&format!("omega0 = {omega0}: "), &trace));
            match termination_code(&trace.termination) {
                0 => Ok(()),
                _ => Err(CliError::Numerical(format!("integration failed: {}", trace.termination.describe()))),
            }
        });
        Member { omega0, result }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker pool: {e}")))?;
    let members: Vec<Member> = pool.install(|| omegas.par_iter().enumerate().map(solve_one).collect());
    let mut failed = 0;
    let mut code = 0;
    for m in &members {
        if let Err(e) = &m.result {
            eprintln!("omega0 = {}: error: {e}", m.omega0);
            failed += 1;
            if code == 0 {
                code = e.exit_code();
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Sweep { failed, total: members.len(), code });
    }
    Ok(())
}
