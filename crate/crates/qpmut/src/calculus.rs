//! Cyclic-derivative calculus: δ, dual derivatives, the maps X_{a*} and X^P,
//! the ideals R(P) and J(P), and truncated quotient dimensions.

use std::collections::BTreeMap;

use crate::algebra::AlgElt;
use crate::error::QpError;
use crate::linalg::RowSpace;
use crate::scalar::Scalar;
use crate::series::{enumerate_monomials, ColumnIndex, MonKey, Series};
use crate::species::Bimodule;

/// A functional on the degree-1 part, expressed over the dual special basis
/// {(s·a)* : a ∈ T, s ∈ L(σ(a))}: coefficient map (generator, label) → F.
#[derive(Clone, Debug, Default)]
pub struct DualElt {
    pub coeffs: BTreeMap<(u32, u32), Scalar>,
}

impl DualElt {
    /// The dual basis element (ℓ_s · a)*.
    pub fn basis(gen: usize, label: usize, bim: &Bimodule) -> Self {
        let field = bim.species.field();
        let mut coeffs = BTreeMap::new();
        coeffs.insert((gen as u32, label as u32), Scalar::one(field));
        Self { coeffs }
    }

    /// The right-translated functional ψ·d, (ψ·d)(m) = ψ(d·m). `d` is an
    /// element of the vertex algebra on the left of ψ's support.
    pub fn right_translate(&self, d: &AlgElt, bim: &Bimodule) -> Self {
        let mut coeffs: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
        for (&(gen, u), c) in &self.coeffs {
            let table = bim.species.table(bim.gens[gen as usize].sigma);
            for t in 0..table.dim() {
                // Coefficient of ℓ_u in d·ℓ_t.
                let prod = table.mul_elt(d, &table.basis_elt(t));
                let w = &prod[u as usize];
                if w.is_zero() {
                    continue;
                }
                let add = c * w;
                let entry = coeffs.entry((gen, t as u32)).or_insert_with(|| {
                    Scalar::zero(bim.species.field())
                });
                *entry += add;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Self { coeffs }
    }

    /// The common left vertex σ of the support, if uniform.
    pub fn sigma(&self, bim: &Bimodule) -> Result<usize, QpError> {
        let mut sigma = None;
        for &(gen, _) in self.coeffs.keys() {
            let s = bim.gens[gen as usize].sigma;
            match sigma {
                None => sigma = Some(s),
                Some(prev) if prev != s => {
                    return Err(QpError::Validation(
                        "functional mixes generators with different left vertices".into(),
                    ))
                }
                _ => {}
            }
        }
        sigma.ok_or_else(|| QpError::Validation("zero functional has no vertex".into()))
    }
}

/// δ(x): the sum over all rotations of each cyclic term. Every rotation —
/// including the identity one — merges the trailing label into the slot
/// before the base generator and carries a unit tail, so δ agrees on
/// cyclically equivalent inputs.
pub fn delta(p: &Series, bim: &Bimodule) -> Series {
    let n = p.degree;
    let mut out = Series::zero(n);
    for (key, c) in &p.terms {
        if !key.is_cyclic(bim) {
            continue;
        }
        let m = key.degree();
        let head_table = bim.species.table(key.sigma(bim));
        // Merge t_{m+1} · t_1 in the vertex algebra at σ(a_1).
        let wrap = head_table
            .mul_basis(key.tail as usize, key.body[0].0 as usize)
            .clone();
        for i in 0..m {
            for (u, cu) in wrap.iter().enumerate() {
                if cu.is_zero() {
                    continue;
                }
                let mut body = Vec::with_capacity(m);
                for k in 0..m {
                    let l = (i + k) % m;
                    let label = if l == 0 { u as u32 } else { key.body[l].0 };
                    body.push((label, key.body[l].1));
                }
                let tau = bim.gens[body[m - 1].1 as usize].tau;
                let tail = bim.species.table(tau).unit_label() as u32;
                let rot = MonKey { body, tail };
                out = out.add(&Series::monomial(rot, c * cu, n));
            }
        }
    }
    out
}

/// Apply a degree-1 functional to the first factor of every term:
/// ψ(t₁a₁)·t₂a₂…t_{m+1}.
pub fn delta_dual(x: &Series, psi: &DualElt, bim: &Bimodule) -> Series {
    let n = x.degree;
    let mut out = Series::zero(n);
    for (key, c) in &x.terms {
        let (t1, a1) = key.body[0];
        let Some(w) = psi.coeffs.get(&(a1, t1)) else {
            continue;
        };
        let coeff = c * w;
        if key.degree() == 1 {
            let v = bim.gens[a1 as usize].tau;
            out = out.add(&Series::deg0_elt(v, key.tail as usize, coeff, n));
        } else {
            let rest = MonKey {
                body: key.body[1..].to_vec(),
                tail: key.tail,
            };
            out = out.add(&Series::monomial(rest, coeff, n));
        }
    }
    out
}

/// The cyclic derivative δ_ψ(P) = ψ applied to the first factor of δ(P).
pub fn cyclic_derivative(p: &Series, psi: &DualElt, bim: &Bimodule) -> Series {
    delta_dual(&delta(p, bim), psi, bim)
}

/// X_{a*}(P) = Σ_{s∈L(σ(a))} δ_{(s·a)*}(δ(P)) · s.
pub fn x_gen(p: &Series, bim: &Bimodule, gen: usize) -> Series {
    let n = p.degree;
    let field = bim.species.field();
    let sigma = bim.gens[gen].sigma;
    let dp = delta(p, bim);
    let mut out = Series::zero(n);
    for s in 0..bim.species.d(sigma) {
        let psi = DualElt::basis(gen, s, bim);
        let part = delta_dual(&dp, &psi, bim);
        let lab = Series::deg0_elt(sigma, s, Scalar::one(field), n);
        out = out.add(&part.mul(&lab, bim));
    }
    out
}

/// X^P(ψ) = Σ_{s∈L(i)} (ψ·s⁻¹)(δ(P)) · s where i = σ of ψ's support.
pub fn x_map(p: &Series, psi: &DualElt, bim: &Bimodule) -> Result<Series, QpError> {
    let n = p.degree;
    let field = bim.species.field();
    let i = psi.sigma(bim)?;
    let table = bim.species.table(i);
    let dp = delta(p, bim);
    let mut out = Series::zero(n);
    for s in 0..table.dim() {
        let shifted = psi.right_translate(table.inv_basis(s), bim);
        let part = delta_dual(&dp, &shifted, bim);
        let lab = Series::deg0_elt(i, s, Scalar::one(field), n);
        out = out.add(&part.mul(&lab, bim));
    }
    Ok(out)
}

/// The dual special basis, in deterministic order (generators by name, then
/// labels in table order).
pub fn dual_basis(bim: &Bimodule) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for gen in bim.gens_by_name() {
        let sigma = bim.gens[gen].sigma;
        for s in 0..bim.species.d(sigma) {
            out.push((gen, s));
        }
    }
    out
}

/// Generators of R(P): the image of X^P on the dual special basis.
pub fn r_generators(p: &Series, bim: &Bimodule) -> Vec<Series> {
    dual_basis(bim)
        .into_iter()
        .map(|(gen, s)| {
            x_map(p, &DualElt::basis(gen, s, bim), bim)
                .expect("dual basis element has a well-defined vertex")
        })
        .filter(|x| !x.is_zero())
        .collect()
}

/// Generators of J(P): the cyclic derivatives over the dual special basis.
pub fn j_generators(p: &Series, bim: &Bimodule) -> Vec<Series> {
    dual_basis(bim)
        .into_iter()
        .map(|(gen, s)| cyclic_derivative(p, &DualElt::basis(gen, s, bim), bim))
        .filter(|x| !x.is_zero())
        .collect()
}

/// Spanning vectors of the closed two-sided ideal generated by `gens`, at
/// truncation level `level`: all trunc(u·g·v) with u, v canonical monomials
/// (degree 0 included) and deg u + deg v + ν(g) ≤ level.
pub fn ideal_span(gens: &[Series], bim: &Bimodule, level: usize) -> Vec<Series> {
    let mut out = Vec::new();
    for g in gens {
        let Some(nu) = g.valuation() else { continue };
        if nu > level {
            continue;
        }
        let g = g.truncate(level);
        for du in 0..=(level - nu) {
            let us = enumerate_monomials(bim, du, level);
            for dv in 0..=(level - nu - du) {
                let vs = enumerate_monomials(bim, dv, level);
                for u in &us {
                    let ug = u.mul(&g, bim);
                    if ug.is_zero() {
                        continue;
                    }
                    for v in &vs {
                        let w = ug.mul(v, bim);
                        if !w.is_zero() {
                            out.push(w);
                        }
                    }
                }
            }
        }
    }
    out
}

/// True iff `elt` lies in the span of the ideal at the given truncation level.
pub fn ideal_contains(gens: &[Series], elt: &Series, bim: &Bimodule, level: usize) -> bool {
    let mut index = ColumnIndex::new();
    let mut space = RowSpace::new();
    for v in ideal_span(gens, bim, level) {
        space.insert(v.to_row(&mut index));
    }
    space.contains(elt.truncate(level).to_row(&mut index))
}

/// Per-degree dimensions of the quotient of the truncated series algebra by
/// the closed ideal generated by `gens`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientDims {
    /// Dimension contributed at each degree 0..=N.
    pub per_degree: Vec<usize>,
    /// True iff the top degree contributes nothing (the total has stabilized).
    pub stabilized: bool,
}

impl QuotientDims {
    pub fn total(&self) -> usize {
        self.per_degree.iter().sum()
    }
}

/// Compute quotient dimensions degree by degree: at each level D, the quotient
/// dimension is (number of monomials of degree ≤ D) − rank(ideal span at level
/// D); the degree-D contribution is the difference of successive levels.
pub fn quotient_dims(gens: &[Series], bim: &Bimodule, n: usize) -> QuotientDims {
    let mut per_degree = Vec::with_capacity(n + 1);
    let mut prev = 0usize;
    let mut total_monomials = 0usize;
    for level in 0..=n {
        total_monomials += enumerate_monomials(bim, level, n).len();
        let mut index = ColumnIndex::new();
        let mut space = RowSpace::new();
        for v in ideal_span(gens, bim, level) {
            space.insert(v.to_row(&mut index));
        }
        let q = total_monomials - space.rank();
        per_degree.push(q - prev);
        prev = q;
    }
    let stabilized = per_degree.last().copied() == Some(0);
    QuotientDims {
        per_degree,
        stabilized,
    }
}

/// Quotient dimensions restricted to the corner avoiding vertex k: only
/// monomials with both endpoints different from k are counted, and only the
/// ideal spanning vectors supported there contribute (each spanning vector is
/// homogeneous in its endpoints).
pub fn quotient_dims_avoiding(
    gens: &[Series],
    bim: &Bimodule,
    n: usize,
    k: usize,
) -> QuotientDims {
    let avoid = |s: &Series| -> bool {
        if let Some(((v, _), _)) = s.deg0.iter().next() {
            return *v != k;
        }
        if let Some((key, _)) = s.terms.iter().next() {
            return key.sigma(bim) != k && key.tau(bim) != k;
        }
        false
    };
    let mut per_degree = Vec::with_capacity(n + 1);
    let mut prev = 0usize;
    let mut total_monomials = 0usize;
    for level in 0..=n {
        total_monomials += enumerate_monomials(bim, level, n)
            .iter()
            .filter(|m| avoid(m))
            .count();
        let mut index = ColumnIndex::new();
        let mut space = RowSpace::new();
        for v in ideal_span(gens, bim, level) {
            if avoid(&v) {
                space.insert(v.to_row(&mut index));
            }
        }
        let q = total_monomials - space.rank();
        per_degree.push(q - prev);
        prev = q;
    }
    let stabilized = per_degree.last().copied() == Some(0);
    QuotientDims {
        per_degree,
        stabilized,
    }
}

/// Dimension of the deformation space at truncation N: the series algebra
/// modulo the span of the degree-0 part, all commutators, and R(P).
pub fn def_space_dim(p: &Series, bim: &Bimodule, n: usize) -> usize {
    let p = p.truncate(n);
    let mut index = ColumnIndex::new();
    let mut space = RowSpace::new();
    let mut total = 0usize;
    for d in 0..=n {
        total += enumerate_monomials(bim, d, n).len();
        if d == 0 {
            for s in enumerate_monomials(bim, 0, n) {
                space.insert(s.to_row(&mut index));
            }
        }
        for c in crate::series::commutators(bim, d, n) {
            space.insert(c.to_row(&mut index));
        }
    }
    for v in ideal_span(&r_generators(&p, bim), bim, n) {
        space.insert(v.to_row(&mut index));
    }
    total - space.rank()
}
