//! Splitting a potential into its trivial and reduced parts.
//!
//! The quadratic component P⁽²⁾ induces an S-bimodule map X: M* → M whose
//! image Ξ₂(P) decides everything: the splitting exists iff Ξ₂(P) is Z-freely
//! generated. The algorithm normalizes the quadratic part to Σᵢ aᵢbᵢ by two
//! degree-1 automorphisms, then removes the higher-degree terms touching the
//! pairs (aᵢ, bᵢ) by unitriangular automorphisms whose depth doubles each
//! round, so finitely many rounds suffice at any truncation level.

use std::collections::BTreeMap;

use crate::calculus::{dual_basis, x_map, DualElt};
use crate::error::QpError;
use crate::linalg::{self, RowSpace};
use crate::scalar::Scalar;
use crate::series::{
    enumerate_monomials, is_cyclically_equivalent, ColumnIndex, GeneratorMap, MonKey, Series,
};
use crate::species::Bimodule;

/// True iff the potential has no terms of degree < 3.
pub fn is_reduced(p: &Series) -> bool {
    p.valuation().map_or(true, |v| v >= 3)
}

/// All label translates s·x·t of a degree-≤1 element (the S-bimodule orbit).
fn translates(x: &Series, bim: &Bimodule) -> Vec<Series> {
    let field = bim.species.field();
    let n = x.degree;
    let mut out = Vec::new();
    for v in 0..bim.species.n() {
        for s in 0..bim.species.d(v) {
            let left = Series::deg0_elt(v, s, Scalar::one(field), n);
            let lx = left.mul(x, bim);
            if lx.is_zero() {
                continue;
            }
            for w in 0..bim.species.n() {
                for t in 0..bim.species.d(w) {
                    let right = Series::deg0_elt(w, t, Scalar::one(field), n);
                    let y = lx.mul(&right, bim);
                    if !y.is_zero() {
                        out.push(y);
                    }
                }
            }
        }
    }
    out
}

/// F-dimension of each block e_i Ξ₂(P) e_j, keyed by (i, j).
pub fn xi2_block_dims(p: &Series, bim: &Bimodule) -> BTreeMap<(usize, usize), usize> {
    let p2 = p.homogeneous_part(2);
    let mut spaces: BTreeMap<(usize, usize), (ColumnIndex, RowSpace)> = BTreeMap::new();
    for (gen, s) in dual_basis(bim) {
        let img = x_map(&p2, &DualElt::basis(gen, s, bim), bim)
            .expect("dual basis element has a well-defined vertex");
        if img.is_zero() {
            continue;
        }
        let block = (bim.gens[gen].tau, bim.gens[gen].sigma);
        let entry = spaces
            .entry(block)
            .or_insert_with(|| (ColumnIndex::new(), RowSpace::new()));
        for t in translates(&img, bim) {
            let row = t.to_row(&mut entry.0);
            entry.1.insert(row);
        }
    }
    spaces
        .into_iter()
        .map(|(block, (_, space))| (block, space.rank()))
        .collect()
}

/// True iff P⁽²⁾ is trivial: Ξ₂(P) = M.
pub fn is_trivial_quadratic(p: &Series, bim: &Bimodule) -> bool {
    let dims = xi2_block_dims(p, bim);
    let n = bim.species.n();
    (0..n).all(|i| {
        (0..n).all(|j| {
            bim.block_dim(i, j) == dims.get(&(i, j)).copied().unwrap_or(0)
        })
    })
}

/// True iff P is 2-maximal: for every (i,j) with both blocks nonzero and
/// dim eᵢMe_j ≤ dim e_jMeᵢ, the block e_jΞ₂(P)eᵢ has dimension dim eᵢMe_j.
pub fn is_2maximal(p: &Series, bim: &Bimodule) -> bool {
    let dims = xi2_block_dims(p, bim);
    let n = bim.species.n();
    for i in 0..n {
        for j in 0..n {
            let dij = bim.block_dim(i, j);
            let dji = bim.block_dim(j, i);
            if dij == 0 || dji == 0 || dij > dji {
                continue;
            }
            if dims.get(&(j, i)).copied().unwrap_or(0) != dij {
                return false;
            }
        }
    }
    true
}

/// Classification flags of a quadratic part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticClass {
    /// X^{P⁽²⁾} is surjective onto M.
    pub trivial: bool,
    /// X^{P⁽²⁾} is injective on the duals of the smaller-side blocks.
    pub maximal: bool,
    /// Ξ₂(P) is Z-freely generated.
    pub decomposable: bool,
}

/// S-translate spans of the blockwise Ξ₂(P) images, keyed by (i, j).
fn xi2_block_vectors(p: &Series, bim: &Bimodule) -> BTreeMap<(usize, usize), Vec<Series>> {
    let p2 = p.homogeneous_part(2);
    let mut out: BTreeMap<(usize, usize), Vec<Series>> = BTreeMap::new();
    for (gen, s) in dual_basis(bim) {
        let img = x_map(&p2, &DualElt::basis(gen, s, bim), bim)
            .expect("dual basis element has a well-defined vertex");
        if img.is_zero() {
            continue;
        }
        let block = (bim.gens[gen].tau, bim.gens[gen].sigma);
        out.entry(block).or_default().extend(translates(&img, bim));
    }
    out
}

/// True iff Ξ₂(P) admits a Z-free generating set (constructive greedy test).
pub fn xi2_is_z_free(p: &Series, bim: &Bimodule) -> bool {
    let n = p.degree;
    for (&block, vectors) in &xi2_block_vectors(p, bim) {
        let step = bim.species.d(block.0) * bim.species.d(block.1);
        let mut index = ColumnIndex::new();
        let mut full = RowSpace::new();
        for v in vectors {
            full.insert(v.to_row(&mut index));
        }
        let rank = full.rank();
        if rank % step != 0 {
            return false;
        }
        let mut current = RowSpace::new();
        if extract_z_free(vectors, bim, block, &mut index, &mut current, rank, n).is_err() {
            return false;
        }
    }
    true
}

/// Classify the quadratic part of P: trivial, maximal, decomposable.
pub fn classify_quadratic(p: &Series, bim: &Bimodule) -> QuadraticClass {
    QuadraticClass {
        trivial: is_trivial_quadratic(p, bim),
        maximal: is_2maximal(p, bim),
        decomposable: xi2_is_z_free(p, bim),
    }
}

/// The outcome of splitting P into trivial ⊕ reduced parts.
#[derive(Clone, Debug)]
pub struct SplitResult {
    /// Generator name pairs (aᵢ, bᵢ) carrying the trivial part Σᵢ aᵢbᵢ.
    pub trivial_pairs: Vec<(String, String)>,
    /// The sub-bimodule spanned by the remaining generators.
    pub reduced_bim: Bimodule,
    /// The reduced potential, over `reduced_bim`.
    pub reduced_potential: Series,
    /// The composed automorphism φ of the original algebra with
    /// φ(P) cyclically equivalent to `normal_form`.
    pub automorphism: GeneratorMap,
    /// Σᵢ aᵢbᵢ plus the reduced part, over the original bimodule.
    pub normal_form: Series,
}

/// Invert an S-bimodule automorphism given by degree-1 generator images.
pub fn invert_degree_one(
    map: &GeneratorMap,
    bim: &Bimodule,
    n: usize,
) -> Result<GeneratorMap, QpError> {
    let mons = enumerate_monomials(bim, 1, n);
    let mut index = ColumnIndex::new();
    let cols: Vec<_> = mons
        .iter()
        .map(|m| map.apply(m, bim, bim).truncate(1).to_row(&mut index))
        .collect();
    let mut images = Vec::with_capacity(bim.gens.len());
    for g in 0..bim.gens.len() {
        let target = Series::generator(bim, g, n).to_row(&mut index);
        let sol = linalg::solve(&cols, &target).ok_or_else(|| {
            QpError::Validation("degree-1 generator map is not invertible".into())
        })?;
        let mut img = Series::zero(n);
        for (j, c) in sol.into_iter().enumerate() {
            if let Some(c) = c {
                img = img.add(&mons[j].scale(&c));
            }
        }
        images.push(img);
    }
    Ok(GeneratorMap { images })
}

/// Candidate elements for greedy Z-free generator extraction: the reduced
/// basis, pairwise sums and differences, and one generic weighted sum.
fn candidate_pool(basis: &[Series]) -> Vec<Series> {
    let mut pool: Vec<Series> = basis.to_vec();
    for l in 0..basis.len() {
        for m in (l + 1)..basis.len() {
            pool.push(basis[l].add(&basis[m]));
            pool.push(basis[l].sub(&basis[m]));
        }
    }
    if basis.len() > 2 {
        let mut acc = Series::zero(basis[0].degree);
        for (l, b) in basis.iter().enumerate() {
            let field = bim_field(b);
            acc = acc.add(&b.scale(&Scalar::from_i64(l as i64 + 1, field)));
        }
        pool.push(acc);
    }
    pool
}

fn bim_field(s: &Series) -> crate::scalar::Field {
    s.deg0
        .values()
        .chain(s.terms.values())
        .next()
        .map(|c| c.field())
        .unwrap_or(crate::scalar::Field::Rational)
}

/// Greedily extract Z-free generators of the span of `vectors` inside block
/// (i, j): each accepted element must enlarge the running span by exactly
/// d(i)·d(j) dimensions through its S-bimodule orbit.
fn extract_z_free(
    vectors: &[Series],
    bim: &Bimodule,
    block: (usize, usize),
    index: &mut ColumnIndex,
    current: &mut RowSpace,
    target_rank: usize,
    n: usize,
) -> Result<Vec<Series>, QpError> {
    let step = bim.species.d(block.0) * bim.species.d(block.1);
    let mut reduced_basis: Vec<Series> = Vec::new();
    {
        let mut probe = RowSpace::new();
        for v in vectors {
            let row = v.to_row(index);
            if probe.insert(row.clone()) {
                reduced_basis.push(index.to_series(&current.reduce(row), n));
            }
        }
    }
    let reduced_basis: Vec<Series> = reduced_basis
        .into_iter()
        .filter(|s| !s.is_zero())
        .collect();
    let mut chosen = Vec::new();
    let pool = candidate_pool(&reduced_basis);
    let mut pos = 0;
    while current.rank() < target_rank {
        let mut accepted = false;
        while pos < pool.len() {
            let cand = &pool[pos];
            pos += 1;
            if current.contains(cand.to_row(index)) {
                continue;
            }
            let mut tentative = current.clone();
            for t in translates(cand, bim) {
                tentative.insert(t.to_row(index));
            }
            if tentative.rank() == current.rank() + step && tentative.rank() <= target_rank {
                *current = tentative;
                chosen.push(cand.clone());
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(QpError::NotSplittable {
                details: format!(
                    "no Z-free generator found in block ({}, {})",
                    block.0 + 1,
                    block.1 + 1
                ),
            });
        }
    }
    Ok(chosen)
}

/// Strip the generator at `pos` off the front of the rotated cyclic monomial;
/// the remainder is the factor v with monomial ≡ (unit·g_pos)·v cyclically.
fn strip_leading(key: &MonKey, coeff: &Scalar, pos: usize, bim: &Bimodule, n: usize) -> Series {
    let m = key.degree();
    let head = bim.species.table(key.sigma(bim));
    let wrap = head.mul_basis(key.tail as usize, key.body[0].0 as usize);
    let mut out = Series::zero(n);
    for (u, cu) in wrap.iter().enumerate() {
        if cu.is_zero() {
            continue;
        }
        let mut body = Vec::with_capacity(m - 1);
        for k in 1..m {
            let l = (pos + k) % m;
            let label = if l == 0 { u as u32 } else { key.body[l].0 };
            body.push((label, key.body[l].1));
        }
        let (body, tail) = if pos == 0 {
            (body, u as u32)
        } else {
            (body, key.body[pos].0)
        };
        if body.is_empty() {
            // Degree-1 original monomials never reach here (potentials are ≥ 2).
            continue;
        }
        out = out.add(&Series::monomial(MonKey { body, tail }, coeff * cu, n));
    }
    // For pos == 0 the wrap lands in the tail slot; the loop above used the
    // wrap substitution only when l == 0 occurred inside the body, which never
    // happens for pos == 0, so each iteration differs only in the tail.
    out
}

/// Strip the generator at `pos` off the back of the rotated cyclic monomial;
/// the remainder is the factor u with monomial ≡ u·(g_pos·unit) cyclically.
fn strip_trailing(key: &MonKey, coeff: &Scalar, pos: usize, bim: &Bimodule, n: usize) -> Series {
    let m = key.degree();
    let head = bim.species.table(key.sigma(bim));
    let wrap = head.mul_basis(key.tail as usize, key.body[0].0 as usize);
    let start = (pos + 1) % m;
    let mut out = Series::zero(n);
    for (u, cu) in wrap.iter().enumerate() {
        if cu.is_zero() {
            continue;
        }
        let mut body = Vec::with_capacity(m - 1);
        for k in 0..(m - 1) {
            let l = (start + k) % m;
            let label = if l == 0 { u as u32 } else { key.body[l].0 };
            body.push((label, key.body[l].1));
        }
        // Tail of the remainder: the label that preceded the stripped
        // generator (the wrap product when the stripped generator was g₀).
        let tail = if pos == 0 { u as u32 } else { key.body[pos].0 };
        if body.is_empty() {
            continue;
        }
        out = out.add(&Series::monomial(MonKey { body, tail }, coeff * cu, n));
    }
    out
}

/// Split `p` into its trivial and reduced parts.
pub fn split(p: &Series, bim: &Bimodule) -> Result<SplitResult, QpError> {
    let n = p.degree;
    if !bim.is_loop_free() {
        return Err(QpError::Validation(
            "splitting requires a bimodule without loops".into(),
        ));
    }
    if !p.deg0.is_empty() || p.terms.keys().any(|k| k.degree() < 2 || !k.is_cyclic(bim)) {
        return Err(QpError::Validation(
            "potential must be cyclic of degree ≥ 2".into(),
        ));
    }
    let identity = GeneratorMap::identity(bim, n);
    if p.homogeneous_part(2).is_zero() {
        return Ok(SplitResult {
            trivial_pairs: Vec::new(),
            reduced_bim: bim.clone(),
            reduced_potential: p.clone(),
            automorphism: identity,
            normal_form: p.clone(),
        });
    }

    // Stage 1: extract a Z-free generating set of Ξ₂(P) block by block and a
    // Z-free complement, and realign both onto the original generators.
    let block_vectors = xi2_block_vectors(p, bim);
    // Per block: Z-free generators of the Ξ₂ part (z's) followed by a Z-free
    // complement, matched in order against the block's generators.
    let mut rho_images: Vec<Option<Series>> = vec![None; bim.gens.len()];
    let mut assigned_to_xi2: Vec<bool> = vec![false; bim.gens.len()];
    for (&block, vectors) in &block_vectors {
        let (i, j) = block;
        let step = bim.species.d(i) * bim.species.d(j);
        let mut index = ColumnIndex::new();
        let mut full = RowSpace::new();
        for v in vectors {
            full.insert(v.to_row(&mut index));
        }
        let xi2_rank = full.rank();
        if xi2_rank % step != 0 {
            return Err(QpError::NotSplittable {
                details: format!(
                    "block ({}, {}) image has dimension {} not divisible by {}",
                    i + 1,
                    j + 1,
                    xi2_rank,
                    step
                ),
            });
        }
        let mut current = RowSpace::new();
        let zs = extract_z_free(vectors, bim, block, &mut index, &mut current, xi2_rank, n)?;
        // Complement inside the full block, on top of the Ξ₂ part.
        let block_monomials: Vec<Series> = enumerate_monomials(bim, 1, n)
            .into_iter()
            .filter(|s| {
                let k = s.terms.keys().next().unwrap();
                k.sigma(bim) == i && k.tau(bim) == j
            })
            .collect();
        let block_dim = bim.block_dim(i, j);
        let complement = extract_z_free(
            &block_monomials,
            bim,
            block,
            &mut index,
            &mut current,
            block_dim,
            n,
        )
        .map_err(|_| QpError::NotSplittable {
            details: format!(
                "no Z-free complement of the image in block ({}, {})",
                i + 1,
                j + 1
            ),
        })?;
        let block_gens: Vec<usize> = bim
            .gens_by_name()
            .filter(|&g| bim.gens[g].sigma == i && bim.gens[g].tau == j)
            .collect();
        debug_assert_eq!(block_gens.len(), zs.len() + complement.len());
        for (slot, src) in zs.iter().chain(complement.iter()).enumerate() {
            let g = block_gens[slot];
            rho_images[g] = Some(src.clone());
            if slot < zs.len() {
                assigned_to_xi2[g] = true;
            }
        }
    }
    let rho = GeneratorMap {
        images: rho_images
            .into_iter()
            .enumerate()
            .map(|(g, img)| img.unwrap_or_else(|| Series::generator(bim, g, n)))
            .collect(),
    };
    let phi1 = invert_degree_one(&rho, bim, n)?;
    let p1 = phi1.apply(p, bim, bim);

    // Stage 2: inside the trivial sub-bimodule, pair each generator b (with
    // σ(b) < τ(b)) against its partner X(b*) and realign the partners onto
    // generators.
    let p1_2 = p1.homogeneous_part(2);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut rho2 = GeneratorMap::identity(bim, n);
    {
        // Partners available per block, in name order.
        let mut avail: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for g in bim.gens_by_name() {
            if assigned_to_xi2[g] && bim.gens[g].sigma > bim.gens[g].tau {
                avail.entry((bim.gens[g].sigma, bim.gens[g].tau))
                    .or_default()
                    .push(g);
            }
        }
        for b in bim.gens_by_name() {
            if !assigned_to_xi2[b] || bim.gens[b].sigma >= bim.gens[b].tau {
                continue;
            }
            let fb = x_map(&p1_2, &DualElt::basis(b, 0, bim), bim)?;
            let block = (bim.gens[b].tau, bim.gens[b].sigma);
            let partner = avail
                .get_mut(&block)
                .and_then(|v| if v.is_empty() { None } else { Some(v.remove(0)) })
                .ok_or_else(|| QpError::NotSplittable {
                    details: "quadratic part is not trivial on its image".into(),
                })?;
            if fb.is_zero() {
                return Err(QpError::NotSplittable {
                    details: "vanishing partner in the trivial part".into(),
                });
            }
            rho2.images[partner] = fb;
            pairs.push((b, partner));
        }
        if avail.values().any(|v| !v.is_empty()) {
            return Err(QpError::NotSplittable {
                details: "unmatched generators in the trivial part".into(),
            });
        }
    }
    let phi2 = invert_degree_one(&rho2, bim, n)?;
    let p2full = phi2.apply(&p1, bim, bim);

    // Exact trivial quadratic Σᵢ aᵢbᵢ.
    let mut q_triv = Series::zero(n);
    for &(a, b) in &pairs {
        let ab = Series::generator(bim, a, n).mul(&Series::generator(bim, b, n), bim);
        q_triv = q_triv.add(&ab);
    }
    if !is_cyclically_equivalent(&p2full.homogeneous_part(2), &q_triv, bim) {
        return Err(QpError::NotSplittable {
            details: "quadratic normalization failed".into(),
        });
    }

    let mut a_of: BTreeMap<u32, usize> = BTreeMap::new();
    let mut b_of: BTreeMap<u32, usize> = BTreeMap::new();
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        a_of.insert(a as u32, idx);
        b_of.insert(b as u32, idx);
    }

    // Stage 3: depth-doubling unitriangular rounds.
    let mut phi_total = phi2.compose(&phi1, bim, bim);
    let mut p_cur = q_triv.add(&p2full.sub(&p2full.homogeneous_part(2)));
    let cap = (usize::BITS - n.leading_zeros()) as usize + 2;
    let mut rest = Series::zero(n);
    let mut converged = false;
    for _ in 0..cap {
        let zero = Series::zero(n);
        let mut u: Vec<Series> = vec![zero.clone(); pairs.len()];
        let mut v: Vec<Series> = vec![zero.clone(); pairs.len()];
        rest = Series::zero(n);
        for (key, c) in &p_cur.terms {
            if key.degree() < 3 {
                continue;
            }
            if let Some((pos, k)) = key
                .body
                .iter()
                .enumerate()
                .find_map(|(pos, &(_, g))| a_of.get(&g).map(|&k| (pos, k)))
            {
                v[k] = v[k].add(&strip_leading(key, c, pos, bim, n));
            } else if let Some((pos, k)) = key
                .body
                .iter()
                .enumerate()
                .rev()
                .find_map(|(pos, &(_, g))| b_of.get(&g).map(|&k| (pos, k)))
            {
                u[k] = u[k].add(&strip_trailing(key, c, pos, bim, n));
            } else {
                rest = rest.add(&Series::monomial(key.clone(), c.clone(), n));
            }
        }
        if u.iter().all(|s| s.is_zero()) && v.iter().all(|s| s.is_zero()) {
            converged = true;
            break;
        }
        let mut phi_r = GeneratorMap::identity(bim, n);
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            phi_r.images[a] = Series::generator(bim, a, n).sub(&u[idx]);
            phi_r.images[b] = Series::generator(bim, b, n).sub(&v[idx]);
        }
        // Reassemble the cyclic representative Σ(aᵢbᵢ + aᵢvᵢ + uᵢbᵢ) + rest
        // and push it through the round automorphism.
        let mut repr = q_triv.add(&rest);
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            let ga = Series::generator(bim, a, n);
            let gb = Series::generator(bim, b, n);
            repr = repr.add(&ga.mul(&v[idx], bim)).add(&u[idx].mul(&gb, bim));
        }
        p_cur = phi_r.apply(&repr, bim, bim);
        phi_total = phi_r.compose(&phi_total, bim, bim);
    }
    if !converged {
        return Err(QpError::NotSplittable {
            details: "splitting rounds did not converge".into(),
        });
    }

    // Assemble the reduced data.
    let in_pair: Vec<bool> = (0..bim.gens.len())
        .map(|g| a_of.contains_key(&(g as u32)) || b_of.contains_key(&(g as u32)))
        .collect();
    let keep: Vec<usize> = (0..bim.gens.len()).filter(|&g| !in_pair[g]).collect();
    let remap: BTreeMap<u32, u32> = keep
        .iter()
        .enumerate()
        .map(|(new, &old)| (old as u32, new as u32))
        .collect();
    let reduced_bim = Bimodule::new(
        bim.species.clone(),
        keep.iter().map(|&g| bim.gens[g].clone()).collect(),
    )?;
    let mut reduced_potential = Series::zero(n);
    for (key, c) in &rest.terms {
        let body = key
            .body
            .iter()
            .map(|&(s, g)| (s, remap[&g]))
            .collect();
        reduced_potential = reduced_potential.add(&Series::monomial(
            MonKey {
                body,
                tail: key.tail,
            },
            c.clone(),
            n,
        ));
    }
    let trivial_pairs = pairs
        .iter()
        .map(|&(a, b)| (bim.gens[a].name.clone(), bim.gens[b].name.clone()))
        .collect();
    Ok(SplitResult {
        trivial_pairs,
        reduced_bim,
        reduced_potential,
        automorphism: phi_total,
        normal_form: q_triv.add(&rest),
    })
}
