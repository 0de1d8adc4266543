use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use realeig::closedform::{
    dnd, expected_count_hypergeom, expected_count_sum, ExpectationValue, ProblemShape,
};
use realeig::density::{
    expected_abs_det, expected_count_quadrature, mc_abs_det, QuadratureConfig, Scheme,
};
use realeig::mc::{run_experiment_with, ExperimentConfig, SystemSource};
use realeig::series::{expected_count_genfun, generating_coefficients};

use crate::format::{significant, two_decimals};
use crate::manifest::RunManifest;
use crate::{RouteArg, SchemeArg, SourceArg, TableFormat};

const DEFAULT_DIGITS: usize = 10;

fn fmt(value: f64, digits: Option<usize>) -> String {
    significant(value, digits.unwrap_or(DEFAULT_DIGITS))
}

fn scheme(s: SchemeArg) -> Scheme {
    match s {
        SchemeArg::GaussHermite => Scheme::GaussHermite,
        SchemeArg::AdaptiveSimpson => Scheme::AdaptiveSimpson,
    }
}

pub fn expect(
    n: u32,
    d: u32,
    route: RouteArg,
    nodes: u32,
    sch: SchemeArg,
    digits: Option<usize>,
) -> Result<bool> {
    let shape = ProblemShape::new(n, d)?;
    let value = match route {
        RouteArg::Hypergeom => expected_count_hypergeom(shape)?,
        RouteArg::Sum => expected_count_sum(shape)?,
        RouteArg::Quadrature => {
            expected_count_quadrature(shape, QuadratureConfig::new(nodes, scheme(sch))?)?
        }
        RouteArg::Genfun => expected_count_genfun(shape)?,
    };
    // two decimals by default; --digits asks for more
    match digits {
        Some(k) => println!("{}", significant(value.value, k)),
        None => println!("{}", two_decimals(value.value)),
    }
    Ok(true)
}

#[derive(Serialize)]
pub struct TableRow {
    n: u32,
    d: u32,
    dnd: u64,
    hypergeom: f64,
    sum: f64,
    quadrature: f64,
    genfun: f64,
    max_rel_deviation: f64,
}

fn table_row(shape: ProblemShape) -> Result<TableRow> {
    let values: [ExpectationValue; 4] = [
        expected_count_hypergeom(shape)?,
        expected_count_sum(shape)?,
        expected_count_quadrature(shape, QuadratureConfig::default())?,
        expected_count_genfun(shape)?,
    ];
    let reference = values[1].value;
    let mut dev: f64 = 0.0;
    for a in &values {
        for b in &values {
            dev = dev.max(((a.value - b.value) / reference).abs());
        }
    }
    Ok(TableRow {
        n: shape.n(),
        d: shape.d(),
        dnd: dnd(shape)?,
        hypergeom: values[0].value,
        sum: values[1].value,
        quadrature: values[2].value,
        genfun: values[3].value,
        max_rel_deviation: dev,
    })
}

/// Every route on 1 ≤ n ≤ nmax, 1 ≤ d ≤ dmax.
pub fn route_table(nmax: u32, dmax: u32) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for n in 1..=nmax {
        for d in 1..=dmax {
            rows.push(table_row(ProblemShape::new(n, d)?)?);
        }
    }
    Ok(rows)
}

pub fn max_deviation(nmax: u32, dmax: u32) -> Result<f64> {
    Ok(route_table(nmax, dmax)?
        .iter()
        .fold(0.0, |m, r| m.max(r.max_rel_deviation)))
}

fn emit(text: &str, out: Option<&Path>, command: &str, params: serde_json::Value) -> Result<()> {
    match out {
        None => print!("{text}"),
        Some(path) => {
            let started = Instant::now();
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            RunManifest::new(command, params, None).finish(&[path.to_path_buf()], started)?;
        }
    }
    Ok(())
}

pub fn table(
    nmax: u32,
    dmax: u32,
    format: TableFormat,
    out: Option<&Path>,
    digits: Option<usize>,
) -> Result<bool> {
    let rows = route_table(nmax, dmax)?;
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.max_rel_deviation));
    let text = match format {
        TableFormat::Csv => {
            let mut s = String::from("n,d,dnd,hypergeom,sum,quadrature,genfun,max_rel_deviation\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{:.3e}\n",
                    r.n,
                    r.d,
                    r.dnd,
                    fmt(r.hypergeom, digits),
                    fmt(r.sum, digits),
                    fmt(r.quadrature, digits),
                    fmt(r.genfun, digits),
                    r.max_rel_deviation
                ));
            }
            s
        }
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "rows": rows,
                "max_rel_deviation": worst,
            }))?;
            s.push('\n');
            s
        }
    };
    emit(
        &text,
        out,
        "table",
        json!({"nmax": nmax, "dmax": dmax, "format": format!("{format:?}").to_lowercase()}),
    )?;
    eprintln!("max pairwise relative deviation: {worst:.3e}");
    Ok(true)
}

pub fn genfun(d: u32, order: usize, out: Option<&Path>, digits: Option<usize>) -> Result<bool> {
    let coeffs = generating_coefficients(d, order)?;
    let mut text = String::from("n,coefficient\n");
    for (i, c) in coeffs.iter().enumerate() {
        text.push_str(&format!("{},{}\n", i + 1, fmt(*c, digits)));
    }
    emit(&text, out, "genfun", json!({"d": d, "order": order}))?;
    Ok(true)
}

pub fn detmoment(
    n: u32,
    t: f64,
    mc_samples: Option<u64>,
    seed: u64,
    digits: Option<usize>,
) -> Result<bool> {
    let exact = expected_abs_det(n, t)?;
    println!("closed form: {}", fmt(exact, digits));
    if let Some(samples) = mc_samples {
        let est = mc_abs_det(n, t, samples, seed)?;
        println!(
            "monte carlo: {} ± {} ({} samples, seed {}, {:.2} std errors from closed form)",
            fmt(est.mean, digits),
            fmt(est.std_error, digits.or(Some(3))),
            est.samples,
            seed,
            est.z_score(exact)
        );
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
pub fn mc_count(
    n: u32,
    d: u32,
    samples: u64,
    seed: u64,
    out: Option<&Path>,
    source: SourceArg,
    digits: Option<usize>,
) -> Result<bool> {
    let started = Instant::now();
    let shape = ProblemShape::new(n, d)?;
    let cfg = ExperimentConfig {
        source: match source {
            SourceArg::Tensor => SystemSource::Tensor,
            SourceArg::Bw => SystemSource::BombieriWeyl,
        },
        ..ExperimentConfig::default()
    };
    let result = run_experiment_with(shape, samples, seed, &cfg)?;
    let h = &result.histogram;
    let est = result.estimate;
    let expected = expected_count_sum(shape)?.value;
    println!("shape: n={n} d={d}  D(n,d)={}", dnd(shape)?);
    println!("samples: {samples}  failures: {}  seed: {seed}", h.failures);
    for (count, freq) in &h.counts {
        println!(
            "  {count:>4}: {freq:>8}  ({:.4})",
            *freq as f64 / h.successes() as f64
        );
    }
    println!(
        "mean: {} ± {}  (two decimals {})",
        fmt(est.mean, digits),
        significant(est.std_error, 3),
        two_decimals(est.mean)
    );
    println!(
        "closed form E: {}  ({:.2} std errors)",
        fmt(expected, digits),
        est.z_score(expected)
    );
    if let Err(e) = h.check_invariants() {
        eprintln!("warning: {e}");
    }
    if let Some(path) = out {
        let (csv, json_path) = h.export(path)?;
        let mut params = json!({
            "n": n, "d": d, "samples": samples,
            "source": format!("{source:?}").to_lowercase(),
        });
        if let Some(summary) = &result.homotopy {
            params["homotopy"] = serde_json::to_value(summary)?;
        }
        let m =
            RunManifest::new("mc-count", params, Some(seed)).finish(&[csv, json_path], started)?;
        log::info!("wrote manifest {}", m.display());
    }
    Ok(true)
}
