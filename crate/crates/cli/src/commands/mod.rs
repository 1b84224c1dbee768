pub mod arclen;
pub mod identities;
pub mod info;
pub mod solve;

use affinemetrics::domain::{Interval, Rect};
use affinemetrics::surfgeo::{SurfaceDef, CATALOG};

use crate::args::{Format, OutputArgs, SurfaceArgs};
use crate::error::CliError;
use crate::schema::{DomainSpec, SurfaceSpec};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let x: f64 = s.trim().parse().map_err(|_| config(format!("{what}: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(config(format!("{what}: `{s}` is not finite")));
    }
    Ok(x)
}

/// `a,b`
pub fn pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [a, b] => Ok((number(a, what)?, number(b, what)?)),
        _ => Err(config(format!("{what}: expected `a,b`, got `{s}`"))),
    }
}

/// `lo:hi`
pub fn range(s: &str, what: &str) -> Result<Interval, CliError> {
    match s.split(':').collect::<Vec<_>>()[..] {
        [a, b] => Interval::new(number(a, what)?, number(b, what)?).map_err(|e| config(format!("{what}: {e}"))),
        _ => Err(config(format!("{what}: expected `lo:hi`, got `{s}`"))),
    }
}

/// `u0:u1,v0:v1`
pub fn domain(s: &str) -> Result<Rect, CliError> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [u, v] => Ok(Rect::new(range(u, "--domain")?, range(v, "--domain")?)),
        _ => Err(config(format!("--domain: expected `u0:u1,v0:v1`, got `{s}`"))),
    }
}

/// A single value, or `start:stop:step` with `stop` included when it lies
/// on the grid.
pub fn sweep(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [x] => Ok(vec![number(x, what)?]),
        [a, b, h] => {
            let (a, b, h) = (number(a, what)?, number(b, what)?, number(h, what)?);
            if h <= 0.0 || b < a {
                return Err(config(format!("{what}: need start <= stop and step > 0, got `{s}`")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            if n >= 100_000 {
                return Err(config(format!("{what}: sweep has too many values")));
            }
            Ok((0..=n).map(|k| a + k as f64 * h).collect())
        }
        _ => Err(config(format!("{what}: expected a value or `start:stop:step`, got `{s}`"))),
    }
}

pub fn resolve_surface(args: &SurfaceArgs) -> Result<SurfaceDef, CliError> {
    let override_domain = args.domain.as_deref().map(domain).transpose()?;
    if let Some(name) = &args.surface {
        let s = SurfaceDef::builtin(name)
            .ok_or_else(|| config(format!("unknown surface `{name}`; expected one of {}", CATALOG.join(", "))))?;
        return Ok(match override_domain {
            Some(d) => s.with_domain(d),
            None => s,
        });
    }
    if let Some(src) = &args.surface_expr {
        let parts: Vec<&str> = src.split(';').collect();
        let [x, y, z] = parts[..] else {
            return Err(config(format!(
                "--surface-expr: expected three components separated by `;`, got {}",
                parts.len()
            )));
        };
        let d = override_domain.ok_or_else(|| config("--surface-expr requires --domain"))?;
        return Ok(SurfaceDef::parse([x, y, z], d)?);
    }
    if let Some(path) = &args.surface_file {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        let spec: SurfaceSpec = serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let rect = match override_domain {
            Some(d) => d,
            None => Rect::new(
                Interval::new(spec.domain.u[0], spec.domain.u[1])?,
                Interval::new(spec.domain.v[0], spec.domain.v[1])?,
            ),
        };
        let c = &spec.components;
        let s = SurfaceDef::parse([&c[0], &c[1], &c[2]], rect)?;
        return Ok(match spec.name {
            Some(n) => s.with_name(n),
            None => s,
        });
    }
    Err(config("one of --surface, --surface-expr or --surface-file is required"))
}

pub fn surface_spec(s: &SurfaceDef) -> SurfaceSpec {
    let d = s.domain();
    SurfaceSpec {
        name: s.name().map(str::to_string),
        components: s.sources().clone(),
        domain: DomainSpec { u: [d.u.lo, d.u.hi], v: [d.v.lo, d.v.hi] },
    }
}

/// `--format`, else the `--output` extension, else `default`.
pub fn output_format(out: &OutputArgs, default: Format) -> Format {
    if let Some(f) = out.format {
        return f;
    }
    match out.output.as_deref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => default,
    }
}
