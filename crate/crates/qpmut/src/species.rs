//! Species, Z-freely generated bimodules, duals, the mutated bimodule μₖM,
//! and the exchange matrix B(M).
//!
//! A bimodule is described by its species and a Z-free generator set T: each
//! generator a carries its idempotents σ(a), τ(a) (so a = e_{σ(a)} a e_{τ(a)})
//! and a provenance kind that lets mutation trace generators through duals and
//! brackets.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::DivisionAlgebraTable;
use crate::error::QpError;
use crate::scalar::Field;

/// The species S = D₁ × … × D_n. Vertices are 0-based internally; all JSON
/// interfaces are 1-based.
#[derive(Clone, Debug)]
pub struct Species {
    pub tables: Vec<DivisionAlgebraTable>,
}

impl Species {
    pub fn new(tables: Vec<DivisionAlgebraTable>) -> Result<Self, QpError> {
        if tables.is_empty() {
            return Err(QpError::Validation("species needs at least one vertex".into()));
        }
        let field = tables[0].field;
        if tables.iter().any(|t| t.field != field) {
            return Err(QpError::Validation("all vertex algebras must share the ground field".into()));
        }
        Ok(Self { tables })
    }

    pub fn n(&self) -> usize {
        self.tables.len()
    }

    pub fn field(&self) -> Field {
        self.tables[0].field
    }

    /// d(i) = dim_F Dᵢ.
    pub fn d(&self, i: usize) -> usize {
        self.tables[i].dim()
    }

    pub fn table(&self, i: usize) -> &DivisionAlgebraTable {
        &self.tables[i]
    }

    /// Violations across all vertex tables (prefixed with the vertex).
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            for v in t.validate() {
                out.push(format!("vertex {}: {v}", i + 1));
            }
        }
        out
    }
}

/// Provenance of a generator: how it arose from previous bimodules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    Plain,
    /// The bracket generator [a·s·b] of Me_kM (s is a basis-label index in L(k)).
    Bracket { a: String, s: usize, b: String, k: usize },
    /// The right dual a* of a generator a ∈ e_kM.
    RightDual(String),
    /// The left dual *b of a generator b ∈ Me_k.
    LeftDual(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// Left idempotent index: a ∈ e_{σ} M e_{τ}.
    pub sigma: usize,
    pub tau: usize,
    pub kind: GenKind,
}

/// A Z-freely generated S-bimodule, described by its generator set T.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub species: Arc<Species>,
    pub gens: Vec<Generator>,
    name_index: BTreeMap<String, usize>,
    /// Rank of each generator under lexicographic name order (for the
    /// documented monomial total order).
    sort_rank: Vec<usize>,
}

impl Bimodule {
    pub fn new(species: Arc<Species>, gens: Vec<Generator>) -> Result<Self, QpError> {
        let n = species.n();
        let mut name_index = BTreeMap::new();
        for (idx, g) in gens.iter().enumerate() {
            if g.sigma >= n || g.tau >= n {
                return Err(QpError::Validation(format!(
                    "generator {:?} has out-of-range vertex",
                    g.name
                )));
            }
            if name_index.insert(g.name.clone(), idx).is_some() {
                return Err(QpError::Validation(format!(
                    "duplicate generator name {:?}",
                    g.name
                )));
            }
        }
        let mut order: Vec<usize> = (0..gens.len()).collect();
        order.sort_by(|&a, &b| gens[a].name.cmp(&gens[b].name));
        let mut sort_rank = vec![0; gens.len()];
        for (rank, idx) in order.into_iter().enumerate() {
            sort_rank[idx] = rank;
        }
        Ok(Self {
            species,
            gens,
            name_index,
            sort_rank,
        })
    }

    /// Convenience constructor from (name, sigma, tau) triples of plain arrows.
    pub fn from_arrows(
        species: Arc<Species>,
        arrows: &[(&str, usize, usize)],
    ) -> Result<Self, QpError> {
        let gens = arrows
            .iter()
            .map(|&(name, sigma, tau)| Generator {
                name: name.to_string(),
                sigma,
                tau,
                kind: GenKind::Plain,
            })
            .collect();
        Self::new(species, gens)
    }

    pub fn gen_index(&self, name: &str) -> Result<usize, QpError> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| QpError::Validation(format!("unknown generator {name:?}")))
    }

    pub fn sort_rank(&self, idx: usize) -> usize {
        self.sort_rank[idx]
    }

    /// Generator indices sorted by name (the deterministic iteration order).
    pub fn gens_by_name(&self) -> impl Iterator<Item = usize> + '_ {
        self.name_index.values().copied()
    }

    /// Multiplicity m(i,j) = |T ∩ eᵢMe_j|.
    pub fn m(&self, i: usize, j: usize) -> usize {
        self.gens
            .iter()
            .filter(|g| g.sigma == i && g.tau == j)
            .count()
    }

    /// dim_F eᵢMe_j = d(i)·m(i,j)·d(j).
    pub fn block_dim(&self, i: usize, j: usize) -> usize {
        self.species.d(i) * self.m(i, j) * self.species.d(j)
    }

    /// True iff m(i,i) = 0 for all i (M_cyc = 0).
    pub fn is_loop_free(&self) -> bool {
        (0..self.species.n()).all(|i| self.m(i, i) == 0)
    }

    /// True iff no 2-cycle passes through vertex k.
    pub fn is_2acyclic_at(&self, k: usize) -> bool {
        (0..self.species.n())
            .all(|i| i == k || self.m(i, k) == 0 || self.m(k, i) == 0)
    }

    /// True iff no 2-cycle anywhere.
    pub fn is_2acyclic(&self) -> bool {
        (0..self.species.n()).all(|k| self.is_2acyclic_at(k))
    }

    /// The exchange matrix B(M) with its skew-symmetrizer.
    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        let n = self.species.n();
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                b[i][j] = (self.m(i, j) as i64 - self.m(j, i) as i64) * self.species.d(j) as i64;
            }
        }
        let d = (0..n).map(|i| self.species.d(i) as i64).collect();
        let out = ExchangeMatrix { b, d };
        debug_assert!(out.is_skew_symmetrizable());
        out
    }

    /// Right-dual generators {a* : a ∈ T∩e_kM} and left-dual generators
    /// {*b : b ∈ T∩Me_k}, in name order.
    pub fn dual_generators(&self, k: usize) -> (Vec<Generator>, Vec<Generator>) {
        let mut rdual = Vec::new();
        let mut ldual = Vec::new();
        for idx in self.gens_by_name() {
            let g = &self.gens[idx];
            if g.sigma == k {
                rdual.push(Generator {
                    name: format!("{}*", g.name),
                    sigma: g.tau,
                    tau: k,
                    kind: GenKind::RightDual(g.name.clone()),
                });
            }
            if g.tau == k {
                ldual.push(Generator {
                    name: format!("*{}", g.name),
                    sigma: k,
                    tau: g.sigma,
                    kind: GenKind::LeftDual(g.name.clone()),
                });
            }
        }
        (rdual, ldual)
    }

    /// The premutated bimodule μₖM = ē_kMē_k ⊕ Me_kM ⊕ (e_kM)* ⊕ *(Me_k).
    ///
    /// Requires M_cyc = 0 and no 2-cycle through k.
    pub fn mu_bimodule(&self, k: usize) -> Result<Bimodule, QpError> {
        if !self.is_loop_free() {
            return Err(QpError::Validation("bimodule has loops (M_cyc ≠ 0)".into()));
        }
        if !self.is_2acyclic_at(k) {
            return Err(QpError::MutationUndefinedAtVertex { vertex: k + 1 });
        }
        let mut gens: Vec<Generator> = self
            .gens
            .iter()
            .filter(|g| g.sigma != k && g.tau != k)
            .cloned()
            .collect();
        let labels = &self.species.table(k).labels;
        for a_idx in self.gens_by_name() {
            let a = &self.gens[a_idx];
            if a.tau != k {
                continue;
            }
            for (s, s_label) in labels.iter().enumerate() {
                for b_idx in self.gens_by_name() {
                    let b = &self.gens[b_idx];
                    if b.sigma != k {
                        continue;
                    }
                    gens.push(Generator {
                        name: format!("[{}.{}.{}]", a.name, s_label, b.name),
                        sigma: a.sigma,
                        tau: b.tau,
                        kind: GenKind::Bracket {
                            a: a.name.clone(),
                            s,
                            b: b.name.clone(),
                            k,
                        },
                    });
                }
            }
        }
        let (rdual, ldual) = self.dual_generators(k);
        gens.extend(rdual);
        gens.extend(ldual);
        Bimodule::new(self.species.clone(), gens)
    }
}

/// The skew-symmetrizable integer exchange matrix B(M).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeMatrix {
    pub b: Vec<Vec<i64>>,
    /// Skew-symmetrizer diag(d₁,…,dₙ).
    pub d: Vec<i64>,
}

impl ExchangeMatrix {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn is_skew_symmetrizable(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.d[i] * self.b[i][j] == -self.d[j] * self.b[j][i]))
    }
}

/// Rebuild a (species, bimodule) pair realizing a skew-symmetrizable matrix:
/// m(i,j) = b_{i,j}/d(j) when b_{i,j} > 0, else 0.
pub fn species_from_matrix(
    b: &[Vec<i64>],
    tables: Vec<DivisionAlgebraTable>,
) -> Result<(Arc<Species>, Bimodule), QpError> {
    let species = Arc::new(Species::new(tables)?);
    let n = species.n();
    if b.len() != n || b.iter().any(|row| row.len() != n) {
        return Err(QpError::Validation("matrix shape does not match species".into()));
    }
    let d: Vec<i64> = (0..n).map(|i| species.d(i) as i64).collect();
    let em = ExchangeMatrix {
        b: b.to_vec(),
        d: d.clone(),
    };
    if !em.is_skew_symmetrizable() {
        return Err(QpError::Validation(
            "matrix is not skew-symmetrizable with the species' dimensions".into(),
        ));
    }
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if b[i][j] <= 0 {
                continue;
            }
            if b[i][j] % d[j] != 0 {
                return Err(QpError::Validation(format!(
                    "d({}) = {} does not divide b[{}][{}] = {}",
                    j + 1,
                    d[j],
                    i + 1,
                    j + 1,
                    b[i][j]
                )));
            }
            let mult = (b[i][j] / d[j]) as usize;
            for u in 1..=mult {
                gens.push(Generator {
                    name: format!("a_{}_{}_{}", i + 1, j + 1, u),
                    sigma: i,
                    tau: j,
                    kind: GenKind::Plain,
                });
            }
        }
    }
    let bimodule = Bimodule::new(species.clone(), gens)?;
    debug_assert_eq!(bimodule.exchange_matrix().b, b);
    Ok((species, bimodule))
}
