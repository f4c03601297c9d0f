//! Command dispatch shared by the command-line binary and the C interface:
//! a serializable [`Request`] describing one operation on a parsed
//! [`Problem`](crate::io::Problem), and [`run_request`] producing a
//! deterministic JSON report.

use serde::{Deserialize, Serialize};

use crate::calculus::{
    def_space_dim, delta, j_generators, quotient_dims, r_generators, x_gen, x_map, DualElt,
};
use crate::io::{
    arrows_to_desc, map_to_desc, matrix_to_desc, series_to_desc, ArrowDesc, MatrixDesc, Problem,
    SeriesDesc,
};
use crate::mutation::{
    double_mutation_compare, fz_mutate, mutate, premutate, search_nondegenerate, seed_potential,
};
use crate::reduction::split;
use crate::scalar::Scalar;
use crate::QpError;

/// One operation on a problem. Vertices in requests are 1-based, matching
/// the on-disk problem format.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Request {
    Validate,
    Delta,
    Xgen {
        arrow: String,
    },
    Xmap {
        arrow: String,
        #[serde(default)]
        label: Option<String>,
    },
    IdealDim {
        ideal: String,
    },
    DefDim,
    Reduce {
        #[serde(default)]
        trace: bool,
    },
    Mutate {
        k: usize,
        #[serde(default)]
        premutate_only: bool,
        #[serde(default)]
        trace: bool,
    },
    InvolutionCheck {
        k: usize,
    },
    Matrix {
        #[serde(default)]
        mutate: Option<usize>,
    },
    SeedPotential {
        k: usize,
    },
    Search {
        seq: Vec<usize>,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_pool")]
        pool: String,
    },
}

fn default_trials() -> usize {
    1000
}

fn default_pool() -> String {
    "-2..2".into()
}

#[derive(Serialize)]
struct ValidateReport {
    status: String,
    vertices: usize,
    arrows: Vec<ArrowDesc>,
    block_dims: Vec<BlockDim>,
    loop_free: bool,
    two_acyclic: bool,
    potential_terms: usize,
    degree: usize,
}

#[derive(Serialize)]
struct BlockDim {
    from: usize,
    to: usize,
    dim: usize,
}

#[derive(Serialize)]
struct SeriesReport {
    series: SeriesDesc,
}

#[derive(Serialize)]
struct IdealReport {
    ideal: String,
    per_degree_dims: Vec<usize>,
    stabilized: bool,
    total: usize,
}

#[derive(Serialize)]
struct DefReport {
    def_dim: usize,
}

#[derive(Serialize)]
struct ReduceReport {
    trivial_pairs: Vec<(String, String)>,
    reduced_arrows: Vec<ArrowDesc>,
    reduced_potential: SeriesDesc,
    normal_form: SeriesDesc,
    #[serde(skip_serializing_if = "Option::is_none")]
    automorphism: Option<Vec<(String, SeriesDesc)>>,
}

#[derive(Serialize)]
struct MutateReport {
    k: usize,
    premutate_only: bool,
    arrows: Vec<ArrowDesc>,
    potential: SeriesDesc,
    #[serde(skip_serializing_if = "Option::is_none")]
    trivial_pairs: Option<Vec<(String, String)>>,
    matrix: MatrixDesc,
    #[serde(skip_serializing_if = "Option::is_none")]
    automorphism: Option<Vec<(String, SeriesDesc)>>,
}

#[derive(Serialize)]
struct InvolutionReport {
    matrix_restored: bool,
    r_dims_match: bool,
    def_dims_match: bool,
    identified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
}

#[derive(Serialize)]
struct SearchReport {
    trial: usize,
    potential: SeriesDesc,
    matrices: Vec<MatrixDesc>,
}

fn vertex_arg(k: usize, n: usize) -> Result<usize, QpError> {
    if k == 0 || k > n {
        return Err(QpError::Validation(format!(
            "vertex {k} out of range 1..={n}"
        )));
    }
    Ok(k - 1)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, QpError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| QpError::Validation(format!("serialization failure: {e}")))
}

/// Parse a coefficient pool: either an inclusive integer range `lo..hi`
/// or a comma-separated list of scalars.
pub fn parse_pool(spec: &str, field: crate::Field) -> Result<Vec<Scalar>, QpError> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|_| QpError::Validation(format!("bad pool bound {lo:?}")))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .map_err(|_| QpError::Validation(format!("bad pool bound {hi:?}")))?;
        if lo > hi {
            return Err(QpError::Validation("empty pool range".into()));
        }
        return Ok((lo..=hi).map(|v| Scalar::from_i64(v, field)).collect());
    }
    spec.split(',')
        .map(|s| Scalar::parse(s.trim(), field))
        .collect()
}

/// Run one request against a parsed problem, returning a pretty-printed
/// JSON report. Reports are deterministic: identical problem and request
/// produce byte-identical output.
pub fn run_request(problem: &Problem, request: &Request) -> Result<String, QpError> {
    let bim = &problem.bimodule;
    let p = &problem.potential;
    let n = problem.degree;
    match request {
        Request::Validate => {
            let nv = bim.species.n();
            let mut block_dims = Vec::new();
            for i in 0..nv {
                for j in 0..nv {
                    let d = bim.block_dim(i, j);
                    if d > 0 {
                        block_dims.push(BlockDim {
                            from: i + 1,
                            to: j + 1,
                            dim: d,
                        });
                    }
                }
            }
            to_json(&ValidateReport {
                status: "ok".into(),
                vertices: nv,
                arrows: arrows_to_desc(bim),
                block_dims,
                loop_free: bim.is_loop_free(),
                two_acyclic: bim.is_2acyclic(),
                potential_terms: p.terms.len(),
                degree: n,
            })
        }
        Request::Delta => to_json(&SeriesReport {
            series: series_to_desc(&delta(p, bim), bim),
        }),
        Request::Xgen { arrow } => {
            let g = bim.gen_index(arrow)?;
            to_json(&SeriesReport {
                series: series_to_desc(&x_gen(p, bim, g), bim),
            })
        }
        Request::Xmap { arrow, label } => {
            let g = bim.gen_index(arrow)?;
            let table = bim.species.table(bim.gens[g].sigma);
            let s = match label {
                Some(l) => table.label_index(l)?,
                None => table.unit_label(),
            };
            let v = x_map(p, &DualElt::basis(g, s, bim), bim)?;
            to_json(&SeriesReport {
                series: series_to_desc(&v, bim),
            })
        }
        Request::IdealDim { ideal } => {
            let gens = match ideal.as_str() {
                "R" | "r" => r_generators(p, bim),
                "J" | "j" => j_generators(p, bim),
                other => {
                    return Err(QpError::Validation(format!(
                        "unknown ideal {other:?} (expected R or J)"
                    )))
                }
            };
            let dims = quotient_dims(&gens, bim, n);
            to_json(&IdealReport {
                ideal: ideal.to_uppercase(),
                per_degree_dims: dims.per_degree.clone(),
                stabilized: dims.stabilized,
                total: dims.total(),
            })
        }
        Request::DefDim => to_json(&DefReport {
            def_dim: def_space_dim(p, bim, n),
        }),
        Request::Reduce { trace } => {
            let sr = split(p, bim)?;
            to_json(&ReduceReport {
                trivial_pairs: sr.trivial_pairs.clone(),
                reduced_arrows: arrows_to_desc(&sr.reduced_bim),
                reduced_potential: series_to_desc(&sr.reduced_potential, &sr.reduced_bim),
                normal_form: series_to_desc(&sr.normal_form, bim),
                automorphism: trace.then(|| map_to_desc(&sr.automorphism, bim)),
            })
        }
        Request::Mutate {
            k,
            premutate_only,
            trace,
        } => {
            let kv = vertex_arg(*k, bim.species.n())?;
            let out = if *premutate_only {
                premutate(bim, p, kv, n)?
            } else {
                mutate(bim, p, kv, n)?
            };
            to_json(&MutateReport {
                k: *k,
                premutate_only: *premutate_only,
                arrows: arrows_to_desc(&out.bimodule),
                potential: series_to_desc(&out.potential, &out.bimodule),
                trivial_pairs: out.split.as_ref().map(|s| s.trivial_pairs.clone()),
                matrix: matrix_to_desc(&out.bimodule.exchange_matrix()),
                automorphism: match (&out.split, trace) {
                    (Some(s), true) => {
                        // The splitting automorphism acts on the premutated
                        // bimodule, not on the input.
                        let pre = premutate(bim, p, kv, n)?;
                        Some(map_to_desc(&s.automorphism, &pre.bimodule))
                    }
                    _ => None,
                },
            })
        }
        Request::InvolutionCheck { k } => {
            let kv = vertex_arg(*k, bim.species.n())?;
            let rep = double_mutation_compare(bim, p, kv, n)?;
            to_json(&InvolutionReport {
                matrix_restored: rep.matrix_restored,
                r_dims_match: rep.r_dims_match,
                def_dims_match: rep.def_dims_match,
                identified: rep.identified,
                certificate: rep.certificate.map(|c| c.to_string()),
            })
        }
        Request::Matrix { mutate } => {
            let mut em = bim.exchange_matrix();
            if let Some(k) = mutate {
                let kv = vertex_arg(*k, bim.species.n())?;
                em = fz_mutate(&em, kv);
            }
            to_json(&matrix_to_desc(&em))
        }
        Request::SeedPotential { k } => {
            let kv = vertex_arg(*k, bim.species.n())?;
            to_json(&SeriesReport {
                series: series_to_desc(&seed_potential(bim, kv, n)?, bim),
            })
        }
        Request::Search {
            seq,
            trials,
            seed,
            pool,
        } => {
            let seq: Vec<usize> = seq
                .iter()
                .map(|&k| vertex_arg(k, bim.species.n()))
                .collect::<Result<_, _>>()?;
            let pool = parse_pool(pool, bim.species.field())?;
            let found = search_nondegenerate(bim, &seq, *trials, *seed, &pool, n)?;
            to_json(&SearchReport {
                trial: found.trial,
                potential: series_to_desc(&found.potential, bim),
                matrices: found.matrices.iter().map(matrix_to_desc).collect(),
            })
        }
    }
}
