//! Representation files and command-line shorthands.
//!
//! A representation file is JSON:
//!
//! ```json
//! {"dimension": 2, "generators": {"a": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}}
//! ```
//!
//! with each matrix given row by row and each entry as `[re, im]`.
//! Generator names must match the surviving generators of the complex's
//! presentation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holonomy::UnitaryRep;
use crate::linalg::{c64, CMatrix};
use crate::pi1::Pi1Presentation;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RepFile {
    dimension: usize,
    generators: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

pub fn parse_rep(text: &str) -> Result<UnitaryRep> {
    let file: RepFile = serde_json::from_str(text)?;
    let d = file.dimension;
    let mut names = Vec::new();
    let mut matrices = Vec::new();
    for (name, rows) in file.generators {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidRepresentation(format!("generator {name} is not {d}x{d}")));
        }
        matrices.push(CMatrix::from_fn(d, d, |i, j| c64(rows[i][j][0], rows[i][j][1])));
        names.push(name);
    }
    UnitaryRep::new(names, matrices, d)
}

pub fn read_rep(path: &Path) -> Result<UnitaryRep> {
    parse_rep(&std::fs::read_to_string(path)?)
}

pub fn rep_to_json(rep: &UnitaryRep) -> Result<String> {
    let generators = rep
        .names()
        .iter()
        .zip(rep.matrices())
        .map(|(n, m)| {
            let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
            (n.clone(), rows)
        })
        .collect();
    Ok(serde_json::to_string_pretty(&RepFile { dimension: rep.dim(), generators })?)
}

/// Resolves a representation spec against a presentation:
///
/// - `trivial` or `trivial:d`: the `d`-dimensional trivial representation;
/// - `theta:t1,t2,…`: the character sending generator `k` to `e^{2πi t_k}`
///   (a single value is used for every generator);
/// - `irrep:i`: the `i`-th irreducible of a finite group, in character
///   table order;
/// - anything else is read as a representation file.
pub fn resolve_rep(spec: &str, pres: &Pi1Presentation) -> Result<UnitaryRep> {
    let names = pres.generator_names();
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "trivial" => {
            let d = if arg.is_empty() { 1 } else { parse_num::<usize>(arg, spec)? };
            if d == 0 {
                return Err(Error::InvalidRepresentation("dimension must be positive".into()));
            }
            Ok(UnitaryRep::trivial(names, d))
        }
        "theta" => {
            let values = arg.split(',').map(|t| parse_num::<f64>(t.trim(), spec)).collect::<Result<Vec<_>>>()?;
            let thetas = match values.as_slice() {
                [t] => vec![*t; names.len()],
                _ => values,
            };
            if thetas.len() != names.len() {
                return Err(Error::InvalidRepresentation(format!(
                    "{spec}: {} phases for {} generators",
                    thetas.len(),
                    names.len()
                )));
            }
            UnitaryRep::character(names, &thetas)
        }
        "irrep" => {
            let i = parse_num::<usize>(arg, spec)?;
            let (_, reps) = UnitaryRep::irreducibles(pres)?;
            let count = reps.len();
            reps.into_iter()
                .nth(i)
                .ok_or_else(|| Error::InvalidRepresentation(format!("{spec}: only {count} irreducibles")))
        }
        _ => read_rep(Path::new(spec))?.aligned_to(pres),
    }
}

fn parse_num<T: std::str::FromStr>(text: &str, spec: &str) -> Result<T> {
    text.parse().map_err(|_| Error::InvalidRepresentation(format!("cannot parse {text:?} in {spec:?}")))
}
