//! JSON input and output: problem files (field, species, arrows, potential,
//! truncation degree), series terms, and report serialization.
//!
//! All vertex indices in JSON are 1-based; basis labels and generators are
//! referenced by name. Reports are deterministic: scalars print in lowest
//! terms and terms are sorted by degree, then lexicographically by
//! (generator name, label name) pairs, then by the tail label.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{quadratic_table, quaternion_table, trivial_table, DivisionAlgebraTable};
use crate::error::QpError;
use crate::scalar::{Field, Scalar};
use crate::series::{GeneratorMap, MonKey, Series};
use crate::species::{Bimodule, ExchangeMatrix, Generator, GenKind, Species};

/// Ground-field descriptor: "rational" (default) or { "prime": p }.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldDesc {
    Name(String),
    Prime { prime: u64 },
}

/// One vertex algebra: a preset or an explicit structure-constant table.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraDesc {
    Preset { preset: PresetDesc },
    Explicit {
        dim: usize,
        basis: Vec<String>,
        mul_table: Vec<Vec<Vec<String>>>,
        inv_table: Vec<Vec<String>>,
    },
}

/// Preset names: "rational" (= trivial), "quaternion", or { "quadratic": m }.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PresetDesc {
    Name(String),
    Quadratic { quadratic: i64 },
}

/// An arrow x with σ(x) = from, τ(x) = to (1-based).
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ArrowDesc {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

/// A degree-0 element: coeff·label at a vertex.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Deg0Desc {
    pub vertex: usize,
    pub label: String,
    pub coeff: String,
}

/// One canonical monomial with its coefficient.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TermDesc {
    pub coeff: String,
    pub word: Vec<(String, String)>,
    pub tail: String,
}

/// A (truncated) series: optional degree-0 part plus monomial terms.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct SeriesDesc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deg0: Vec<Deg0Desc>,
    #[serde(default)]
    pub terms: Vec<TermDesc>,
}

/// The top-level problem file.
#[derive(Clone, Debug, Deserialize)]
pub struct ProblemDesc {
    #[serde(default)]
    pub field: Option<FieldDesc>,
    pub species: Vec<AlgebraDesc>,
    #[serde(default)]
    pub arrows: Vec<ArrowDesc>,
    #[serde(default)]
    pub potential: Option<SeriesDesc>,
    #[serde(default)]
    pub degree: Option<usize>,
}

/// A fully resolved problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub bimodule: Bimodule,
    pub potential: Series,
    pub degree: usize,
}

fn parse_field(desc: &Option<FieldDesc>) -> Result<Field, QpError> {
    let field = match desc {
        None => Field::Rational,
        Some(FieldDesc::Name(n)) if n == "rational" => Field::Rational,
        Some(FieldDesc::Name(n)) => {
            return Err(QpError::Validation(format!("unknown field {n:?}")))
        }
        Some(FieldDesc::Prime { prime }) => Field::Fp(*prime),
    };
    field.validate()?;
    Ok(field)
}

fn parse_algebra(desc: &AlgebraDesc, field: Field) -> Result<DivisionAlgebraTable, QpError> {
    let table = match desc {
        AlgebraDesc::Preset { preset } => match preset {
            PresetDesc::Name(n) if n == "rational" || n == "trivial" => trivial_table(field),
            PresetDesc::Name(n) if n == "quaternion" => {
                require_rational(field, "quaternion")?;
                quaternion_table()
            }
            PresetDesc::Name(n) => {
                return Err(QpError::Validation(format!("unknown preset {n:?}")))
            }
            PresetDesc::Quadratic { quadratic } => {
                require_rational(field, "quadratic")?;
                quadratic_table(*quadratic)?
            }
        },
        AlgebraDesc::Explicit {
            dim,
            basis,
            mul_table,
            inv_table,
        } => {
            if basis.len() != *dim {
                return Err(QpError::Validation("basis length does not match dim".into()));
            }
            let parse_vec = |v: &Vec<String>| -> Result<Vec<Scalar>, QpError> {
                v.iter().map(|s| Scalar::parse(s, field)).collect()
            };
            let mul = mul_table
                .iter()
                .map(|row| row.iter().map(parse_vec).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let inv = inv_table
                .iter()
                .map(parse_vec)
                .collect::<Result<Vec<_>, _>>()?;
            DivisionAlgebraTable::new(field, basis.clone(), mul, inv)?
        }
    };
    let violations = table.validate();
    if !violations.is_empty() {
        return Err(QpError::Validation(format!(
            "invalid algebra table: {}",
            violations.join("; ")
        )));
    }
    Ok(table)
}

fn require_rational(field: Field, preset: &str) -> Result<(), QpError> {
    if field != Field::Rational {
        return Err(QpError::Validation(format!(
            "preset {preset:?} is only available over the rationals"
        )));
    }
    Ok(())
}

fn vertex_index(v: usize, n: usize) -> Result<usize, QpError> {
    if v == 0 || v > n {
        return Err(QpError::Validation(format!(
            "vertex {v} out of range 1..={n}"
        )));
    }
    Ok(v - 1)
}

/// Parse and fully validate a problem file.
pub fn parse_problem(json: &str) -> Result<Problem, QpError> {
    let desc: ProblemDesc = serde_json::from_str(json)
        .map_err(|e| QpError::Validation(format!("malformed problem JSON: {e}")))?;
    let field = parse_field(&desc.field)?;
    let tables = desc
        .species
        .iter()
        .map(|a| parse_algebra(a, field))
        .collect::<Result<Vec<_>, _>>()?;
    let species = Arc::new(Species::new(tables)?);
    let n = species.n();
    let gens = desc
        .arrows
        .iter()
        .map(|a| {
            Ok(Generator {
                name: a.name.clone(),
                sigma: vertex_index(a.from, n)?,
                tau: vertex_index(a.to, n)?,
                kind: GenKind::Plain,
            })
        })
        .collect::<Result<Vec<_>, QpError>>()?;
    let bimodule = Bimodule::new(species, gens)?;
    let degree = desc.degree.unwrap_or(8);
    if degree < 2 {
        return Err(QpError::Validation("degree must be at least 2".into()));
    }
    let potential = match &desc.potential {
        None => Series::zero(degree),
        Some(s) => parse_series(s, &bimodule, degree)?,
    };
    Ok(Problem {
        bimodule,
        potential,
        degree,
    })
}

/// Parse a series description against a bimodule.
pub fn parse_series(desc: &SeriesDesc, bim: &Bimodule, n: usize) -> Result<Series, QpError> {
    let field = bim.species.field();
    let mut out = Series::zero(n);
    for d in &desc.deg0 {
        let v = vertex_index(d.vertex, bim.species.n())?;
        let l = bim.species.table(v).label_index(&d.label)?;
        out = out.add(&Series::deg0_elt(v, l, Scalar::parse(&d.coeff, field)?, n));
    }
    for t in &desc.terms {
        if t.word.is_empty() {
            return Err(QpError::Validation("term with empty word".into()));
        }
        if t.word.len() > n {
            return Err(QpError::Validation(format!(
                "term of degree {} exceeds truncation degree {n}",
                t.word.len()
            )));
        }
        let coeff = Scalar::parse(&t.coeff, field)?;
        let mut body = Vec::with_capacity(t.word.len());
        let mut prev_tau: Option<usize> = None;
        for (label, gen) in &t.word {
            let g = bim.gen_index(gen)?;
            let sigma = bim.gens[g].sigma;
            if let Some(pt) = prev_tau {
                if pt != sigma {
                    return Err(QpError::Validation(format!(
                        "word is not composable at generator {gen:?}"
                    )));
                }
            }
            let l = bim.species.table(sigma).label_index(label)?;
            body.push((l as u32, g as u32));
            prev_tau = Some(bim.gens[g].tau);
        }
        let tau = prev_tau.unwrap();
        let tail = bim.species.table(tau).label_index(&t.tail)? as u32;
        out = out.add(&Series::monomial(MonKey { body, tail }, coeff, n));
    }
    Ok(out)
}

/// Sort key for report output: degree, then (generator name, label name)
/// pairs, then the tail label.
fn report_key(key: &MonKey, bim: &Bimodule) -> (usize, Vec<(String, String)>, String) {
    let pairs: Vec<(String, String)> = key
        .body
        .iter()
        .map(|&(s, g)| {
            let gen = &bim.gens[g as usize];
            (
                gen.name.clone(),
                bim.species.table(gen.sigma).labels[s as usize].clone(),
            )
        })
        .collect();
    let tail = bim.species.table(key.tau(bim)).labels[key.tail as usize].clone();
    (key.degree(), pairs, tail)
}

/// Serialize a series deterministically.
pub fn series_to_desc(s: &Series, bim: &Bimodule) -> SeriesDesc {
    let deg0 = s
        .deg0
        .iter()
        .map(|(&(v, l), c)| Deg0Desc {
            vertex: v + 1,
            label: bim.species.table(v).labels[l].clone(),
            coeff: c.to_string(),
        })
        .collect();
    let mut terms: Vec<(MonKey, &Scalar)> = s.terms.iter().map(|(k, c)| (k.clone(), c)).collect();
    terms.sort_by_key(|(k, _)| report_key(k, bim));
    let terms = terms
        .into_iter()
        .map(|(k, c)| {
            let word = k
                .body
                .iter()
                .map(|&(sl, g)| {
                    let gen = &bim.gens[g as usize];
                    (
                        bim.species.table(gen.sigma).labels[sl as usize].clone(),
                        gen.name.clone(),
                    )
                })
                .collect();
            let tail = bim.species.table(k.tau(bim)).labels[k.tail as usize].clone();
            TermDesc {
                coeff: c.to_string(),
                word,
                tail,
            }
        })
        .collect();
    SeriesDesc { deg0, terms }
}

/// Serialize the generator list of a bimodule as arrows (1-based).
pub fn arrows_to_desc(bim: &Bimodule) -> Vec<ArrowDesc> {
    bim.gens
        .iter()
        .map(|g| ArrowDesc {
            name: g.name.clone(),
            from: g.sigma + 1,
            to: g.tau + 1,
        })
        .collect()
}

/// Exchange-matrix report.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MatrixDesc {
    pub b: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

pub fn matrix_to_desc(em: &ExchangeMatrix) -> MatrixDesc {
    MatrixDesc {
        b: em.b.clone(),
        d: em.d.clone(),
    }
}

/// Serialize a generator map as name → image series, in name order.
pub fn map_to_desc(map: &GeneratorMap, bim: &Bimodule) -> Vec<(String, SeriesDesc)> {
    bim.gens_by_name()
        .map(|g| {
            (
                bim.gens[g].name.clone(),
                series_to_desc(&map.images[g], bim),
            )
        })
        .collect()
}
