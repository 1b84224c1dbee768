use affinemetrics::commensurate::{induced_arclength_with, ParamCurve};
use affinemetrics::curvegeo::{affine_arclength_with, affine_det, SignPolicy};
use affinemetrics::GeomError;

use super::{output_format, range, resolve_surface, surface_spec};
use crate::args::{ArclenArgs, Format};
use crate::error::CliError;
use crate::output::{emit, float, json, Table};
use crate::schema::{ArclenDoc, ArclenRow, SCHEMA};

/// Pointwise integrand and degeneracy flag of `sample`, under `policy`.
fn integrand(
    sample: (f64, f64),
    policy: SignPolicy,
    root: impl Fn(f64) -> f64,
    negative: impl Fn(f64) -> GeomError,
) -> Result<(f64, bool), GeomError> {
    let (x, eps) = sample;
    if x.abs() <= eps {
        return Ok((0.0, true));
    }
    if x < 0.0 && policy == SignPolicy::Strict {
        return Err(negative(x));
    }
    Ok((root(x.abs()), false))
}

pub fn arclen_compare(args: &ArclenArgs) -> Result<ArclenDoc, CliError> {
    let surface = resolve_surface(&args.surface)?;
    let span = range(&args.t_range, "--t-range")?;
    if args.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Config("--tol must be positive".into()));
    }
    let spec = surface_spec(&surface);
    let pc = ParamCurve::from_exprs(surface, &args.u, &args.v, span, args.orientation.into())?;
    let policy = if args.auto_orient { SignPolicy::Absolute } else { SignPolicy::Strict };
    let grid: Vec<f64> = (0..args.samples)
        .map(|i| if i + 1 == args.samples { span.hi } else { span.lerp(i as f64 / (args.samples - 1) as f64) })
        .collect();
    let mut rows = Vec::with_capacity(grid.len());
    let (mut s_alpha, mut s_sigma) = (0.0, 0.0);
    for (i, &t) in grid.iter().enumerate() {
        if i > 0 {
            let t0 = grid[i - 1];
            s_alpha += affine_arclength_with(&pc, t0, t, args.tol, policy)?.value;
            s_sigma += induced_arclength_with(&pc, t0, t, args.tol, policy)?.value;
        }
        let (integrand_alpha, degenerate_alpha) = integrand(
            affine_det(&pc, t)?,
            policy,
            |d| d.powf(1.0 / 6.0),
            |det| GeomError::NegativeOrientation { t, det },
        )?;
        let (integrand_sigma, degenerate_sigma) =
            integrand(pc.form_on_tangent(t)?, policy, f64::sqrt, |value| GeomError::NegativeForm { t, value })?;
        rows.push(ArclenRow {
            t,
            s_alpha,
            s_sigma,
            integrand_alpha,
            integrand_sigma,
            degenerate_alpha,
            degenerate_sigma,
        });
    }
    Ok(ArclenDoc {
        schema: SCHEMA.into(),
        command: "arclen-compare".into(),
        surface: spec,
        u: args.u.clone(),
        v: args.v.clone(),
        t_range: [span.lo, span.hi],
        tol: args.tol,
        auto_orient: args.auto_orient,
        orientation: pc.sign(),
        rows,
    })
}

pub fn run(args: &ArclenArgs) -> Result<(), CliError> {
    let doc = arclen_compare(args)?;
    let text = match output_format(&args.output, Format::Csv) {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut t = Table::new(&[
                "t",
                "s_alpha",
                "s_sigma",
                "integrand_alpha",
                "integrand_sigma",
                "degenerate_alpha",
                "degenerate_sigma",
            ]);
            for r in &doc.rows {
                t.push(vec![
                    float(r.t),
                    float(r.s_alpha),
                    float(r.s_sigma),
                    float(r.integrand_alpha),
                    float(r.integrand_sigma),
                    r.degenerate_alpha.to_string(),
                    r.degenerate_sigma.to_string(),
                ]);
            }
            t.render()
        }
    };
    emit(args.output.output.as_deref(), &text)
}
