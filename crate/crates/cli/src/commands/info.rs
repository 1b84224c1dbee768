use affinemetrics::surfgeo::{
    affine_first_fundamental, classify_point, fundamental_forms_euclid, Definiteness, PointClass,
};

use super::{output_format, pair, resolve_surface, surface_spec};
use crate::args::{Format, SurfaceInfoArgs};
use crate::error::CliError;
use crate::output::{emit, float, json, Table};
use crate::schema::{SurfaceInfoDoc, SCHEMA};

fn definiteness_name(d: Definiteness) -> &'static str {
    match d {
        Definiteness::PositiveDefinite => "positive-definite",
        Definiteness::NegativeDefinite => "negative-definite",
        Definiteness::Indefinite => "indefinite",
        Definiteness::Degenerate => "degenerate",
    }
}

fn class_name(c: PointClass) -> &'static str {
    match c {
        PointClass::Elliptic => "elliptic",
        PointClass::Hyperbolic => "hyperbolic",
        PointClass::Degenerate => "degenerate",
    }
}

pub fn surface_info(args: &SurfaceInfoArgs) -> Result<SurfaceInfoDoc, CliError> {
    let surface = resolve_surface(&args.surface)?;
    let (u, v) = pair(&args.at, "--at")?;
    let euclid = fundamental_forms_euclid(&surface, u, v)?;
    let class = classify_point(&surface, u, v)?;
    let affine = affine_first_fundamental(&surface, u, v)?;
    Ok(SurfaceInfoDoc {
        schema: SCHEMA.into(),
        command: "surface-info".into(),
        surface: surface_spec(&surface),
        u,
        v,
        first_fundamental: euclid.first.coefficients(),
        second_fundamental: euclid.second.coefficients(),
        normal: euclid.normal,
        lmn: affine.lmn.coefficients(),
        gauss_curvature: euclid.second.discriminant() / euclid.first.discriminant(),
        affine_first_fundamental: affine.form.coefficients(),
        orientation: affine.orientation,
        definiteness: definiteness_name(affine.definiteness).into(),
        classification: class_name(class).into(),
    })
}

pub fn run(args: &SurfaceInfoArgs) -> Result<(), CliError> {
    let doc = surface_info(args)?;
    let text = match output_format(&args.output, Format::Json) {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut t = Table::new(&[
                "u",
                "v",
                "E",
                "F",
                "G",
                "e",
                "f",
                "g",
                "l",
                "m",
                "n",
                "K",
                "iaff_a",
                "iaff_b",
                "iaff_c",
                "orientation",
                "classification",
            ]);
            let mut row = vec![float(doc.u), float(doc.v)];
            for x in doc.first_fundamental.iter().chain(&doc.second_fundamental).chain(&doc.lmn) {
                row.push(float(*x));
            }
            row.push(float(doc.gauss_curvature));
            row.extend(doc.affine_first_fundamental.iter().map(|x| float(*x)));
            row.push(float(doc.orientation));
            row.push(doc.classification.clone());
            t.push(row);
            t.render()
        }
    };
    emit(args.output.output.as_deref(), &text)
}
