//! Division algebras presented by structure-constant tables.
//!
//! A table fixes a distinguished F-basis L = [ℓ₁,…,ℓ_d] with ℓ₁ the unit,
//! the products of basis pairs, and the inverse of every basis element.
//! Elements are plain coefficient vectors over L.

use std::collections::BTreeMap;

use crate::error::QpError;
use crate::linalg;
use crate::scalar::{Field, Scalar};

/// An element of the algebra: coefficient vector over the table's basis.
pub type AlgElt = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq)]
pub struct DivisionAlgebraTable {
    pub field: Field,
    /// Basis labels; `labels[0]` is the unit.
    pub labels: Vec<String>,
    /// `mul[s][t]` = coefficient vector of ℓ_s · ℓ_t.
    pub mul: Vec<Vec<AlgElt>>,
    /// `inv[s]` = coefficient vector of ℓ_s⁻¹.
    pub inv: Vec<AlgElt>,
    /// Row s gives the functional (ℓ_s⁻¹)*: x ↦ Σ_j inv_dual[s][j]·x[j]
    /// (coordinates of x over the inverse basis {ℓ_s⁻¹}).
    inv_dual: Vec<Vec<Scalar>>,
}

impl DivisionAlgebraTable {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Build a table and precompute the inverse-basis dual; fails if {ℓ_s⁻¹}
    /// is not a basis.
    pub fn new(
        field: Field,
        labels: Vec<String>,
        mul: Vec<Vec<AlgElt>>,
        inv: Vec<AlgElt>,
    ) -> Result<Self, QpError> {
        let d = labels.len();
        if d == 0 {
            return Err(QpError::Validation("empty basis".into()));
        }
        if mul.len() != d || mul.iter().any(|r| r.len() != d) || inv.len() != d {
            return Err(QpError::Validation("table shape mismatch".into()));
        }
        for v in mul.iter().flatten().chain(inv.iter()) {
            if v.len() != d {
                return Err(QpError::Validation("coefficient vector length mismatch".into()));
            }
        }
        // Invert the matrix whose columns are the inverse-basis vectors.
        let cols: Vec<linalg::Row> = inv
            .iter()
            .map(|v| sparse(v))
            .collect();
        let mut inv_dual = vec![vec![Scalar::zero(field); d]; d];
        for j in 0..d {
            let mut e = BTreeMap::new();
            e.insert(j, Scalar::one(field));
            let sol = linalg::solve(&cols, &e).ok_or_else(|| {
                QpError::Validation("inverse basis is not linearly independent".into())
            })?;
            for (s, c) in sol.into_iter().enumerate() {
                if let Some(c) = c {
                    inv_dual[s][j] = c;
                }
            }
        }
        Ok(Self {
            field,
            labels,
            mul,
            inv,
            inv_dual,
        })
    }

    pub fn zero_elt(&self) -> AlgElt {
        vec![Scalar::zero(self.field); self.dim()]
    }

    pub fn unit(&self) -> AlgElt {
        self.basis_elt(0)
    }

    /// Index of the unit basis label (always 0 by convention).
    pub fn unit_label(&self) -> usize {
        0
    }

    pub fn basis_elt(&self, s: usize) -> AlgElt {
        let mut v = self.zero_elt();
        v[s] = Scalar::one(self.field);
        v
    }

    pub fn label_index(&self, label: &str) -> Result<usize, QpError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| QpError::Validation(format!("unknown basis label {label:?}")))
    }

    /// Exact product of two elements via bilinear expansion through the table.
    pub fn mul_elt(&self, x: &AlgElt, y: &AlgElt) -> AlgElt {
        let mut out = self.zero_elt();
        for (s, xs) in x.iter().enumerate() {
            if xs.is_zero() {
                continue;
            }
            for (t, yt) in y.iter().enumerate() {
                if yt.is_zero() {
                    continue;
                }
                let c = xs * yt;
                for (u, m) in self.mul[s][t].iter().enumerate() {
                    if !m.is_zero() {
                        out[u] += &c * m;
                    }
                }
            }
        }
        out
    }

    /// Product of two basis elements.
    pub fn mul_basis(&self, s: usize, t: usize) -> &AlgElt {
        &self.mul[s][t]
    }

    /// The stored inverse ℓ_s⁻¹.
    pub fn inv_basis(&self, s: usize) -> &AlgElt {
        &self.inv[s]
    }

    /// s*(x): the coefficient of ℓ_s in x.
    pub fn coeff_of(&self, x: &AlgElt, s: usize) -> Scalar {
        x[s].clone()
    }

    /// (ℓ_s⁻¹)*(x): the coefficient of ℓ_s⁻¹ when x is expanded over {ℓ_t⁻¹}.
    pub fn coeff_inv_basis(&self, x: &AlgElt, s: usize) -> Scalar {
        let mut acc = Scalar::zero(self.field);
        for (j, c) in self.inv_dual[s].iter().enumerate() {
            if !c.is_zero() && !x[j].is_zero() {
                acc += c * &x[j];
            }
        }
        acc
    }

    /// Validate every table invariant; returns the list of violations
    /// (empty = valid).
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let d = self.dim();
        let unit = self.unit();
        for s in 0..d {
            if self.mul[0][s] != self.basis_elt(s) || self.mul[s][0] != self.basis_elt(s) {
                bad.push(format!("{} is not a two-sided unit against {}", self.labels[0], self.labels[s]));
            }
        }
        for s in 0..d {
            for t in 0..d {
                for u in 0..d {
                    let left = self.mul_elt(&self.mul[s][t], &self.basis_elt(u));
                    let right = self.mul_elt(&self.basis_elt(s), &self.mul[t][u]);
                    if left != right {
                        bad.push(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[s], self.labels[t], self.labels[u]
                        ));
                    }
                }
            }
        }
        for s in 0..d {
            if self.mul_elt(&self.basis_elt(s), &self.inv[s]) != unit
                || self.mul_elt(&self.inv[s], &self.basis_elt(s)) != unit
            {
                bad.push(format!("{}·{}⁻¹ ≠ 1", self.labels[s], self.labels[s]));
            }
        }
        // Condition (a): e*(s·t⁻¹) ≠ 0 ⟹ s = t, on both sides.
        for s in 0..d {
            for t in 0..d {
                if s == t {
                    continue;
                }
                let st = self.mul_elt(&self.basis_elt(s), &self.inv[t]);
                let ts = self.mul_elt(&self.inv[t], &self.basis_elt(s));
                if !st[0].is_zero() {
                    bad.push(format!(
                        "condition (a) fails: unit coefficient of {}·{}⁻¹ is nonzero",
                        self.labels[s], self.labels[t]
                    ));
                }
                if !ts[0].is_zero() {
                    bad.push(format!(
                        "condition (a) fails: unit coefficient of {}⁻¹·{} is nonzero",
                        self.labels[t], self.labels[s]
                    ));
                }
            }
        }
        // Condition (b): char(F) does not divide the dimension.
        if let Field::Fp(p) = self.field {
            if (d as u64) % p == 0 {
                bad.push(format!("condition (b) fails: char {p} divides dimension {d}"));
            }
        }
        bad
    }

    /// Optional extra check: every basis product is an F-multiple of a single
    /// basis element (semi-multiplicative basis).
    pub fn is_semi_multiplicative(&self) -> bool {
        self.mul
            .iter()
            .flatten()
            .all(|v| v.iter().filter(|c| !c.is_zero()).count() <= 1)
    }
}

fn sparse(v: &AlgElt) -> linalg::Row {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Preset: D = F itself (dimension 1).
pub fn trivial_table(field: Field) -> DivisionAlgebraTable {
    let one = vec![Scalar::one(field)];
    DivisionAlgebraTable::new(field, vec!["1".into()], vec![vec![one.clone()]], vec![one]).unwrap()
}

/// Preset: the quadratic extension ℚ(√m), basis {1, r} with r² = m.
/// `m` must not be a perfect square (else the table has zero divisors).
pub fn quadratic_table(m: i64) -> Result<DivisionAlgebraTable, QpError> {
    if m == 0 || is_square(m) {
        return Err(QpError::Validation(format!(
            "quadratic preset needs a non-square discriminant, got {m}"
        )));
    }
    let f = Field::Rational;
    let z = Scalar::zero(f);
    let one = Scalar::one(f);
    let e = vec![one.clone(), z.clone()];
    let r = vec![z.clone(), one.clone()];
    let m_elt = vec![Scalar::from_i64(m, f), z.clone()];
    let r_inv = vec![z.clone(), Scalar::from_i64(m, f).inv()];
    DivisionAlgebraTable::new(
        f,
        vec!["1".into(), "r".into()],
        vec![vec![e.clone(), r.clone()], vec![r.clone(), m_elt]],
        vec![e, r_inv],
    )
}

fn is_square(m: i64) -> bool {
    if m < 0 {
        return false;
    }
    let s = (m as f64).sqrt().round() as i64;
    (s - 1..=s + 1).any(|k| k * k == m)
}

/// Preset: rational quaternions, basis {1, i, j, k}.
pub fn quaternion_table() -> DivisionAlgebraTable {
    let f = Field::Rational;
    let c = |n: i64, pos: usize| {
        let mut v = vec![Scalar::zero(f); 4];
        v[pos] = Scalar::from_i64(n, f);
        v
    };
    let e = || c(1, 0);
    let i = || c(1, 1);
    let j = || c(1, 2);
    let k = || c(1, 3);
    let mul = vec![
        vec![e(), i(), j(), k()],
        vec![i(), c(-1, 0), k(), c(-1, 2)],
        vec![j(), c(-1, 3), c(-1, 0), i()],
        vec![k(), j(), c(-1, 1), c(-1, 0)],
    ];
    let inv = vec![e(), c(-1, 1), c(-1, 2), c(-1, 3)];
    DivisionAlgebraTable::new(
        f,
        vec!["1".into(), "i".into(), "j".into(), "k".into()],
        mul,
        inv,
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        assert!(trivial_table(Field::Rational).validate().is_empty());
        assert!(quadratic_table(2).unwrap().validate().is_empty());
        assert!(quadratic_table(5).unwrap().validate().is_empty());
        assert!(quadratic_table(-1).unwrap().validate().is_empty());
        assert!(quaternion_table().validate().is_empty());
        assert!(quadratic_table(4).is_err());
    }

    #[test]
    fn quadratic_relations() {
        let t = quadratic_table(2).unwrap();
        let r = t.basis_elt(1);
        let rr = t.mul_elt(&r, &r);
        assert_eq!(rr[0].to_string(), "2");
        assert!(rr[1].is_zero());
        let rinv = t.inv_basis(1);
        assert_eq!(rinv[1].to_string(), "1/2");
        assert_eq!(t.mul_elt(&r, rinv), t.unit());
    }

    #[test]
    fn quaternion_relations() {
        let t = quaternion_table();
        assert!(t.is_semi_multiplicative());
        let i = t.basis_elt(1);
        let j = t.basis_elt(2);
        let ij = t.mul_elt(&i, &j);
        assert_eq!(ij, t.basis_elt(3)); // i·j = k
        let ji = t.mul_elt(&j, &i);
        assert_eq!(ji[3].to_string(), "-1");
    }

    #[test]
    fn inverse_basis_dual() {
        let t = quadratic_table(2).unwrap();
        // x = 3·1 + 4·r expanded over {1⁻¹, r⁻¹} = {1, r/2}: x = 3·1 + 8·(r/2).
        let x = vec![
            Scalar::from_i64(3, Field::Rational),
            Scalar::from_i64(4, Field::Rational),
        ];
        assert_eq!(t.coeff_inv_basis(&x, 0).to_string(), "3");
        assert_eq!(t.coeff_inv_basis(&x, 1).to_string(), "8");
    }

    #[test]
    fn condition_b_over_f2() {
        // A 2-dimensional table over 𝔽₂ violates condition (b).
        let f = Field::Fp(2);
        let z = Scalar::zero(f);
        let one = Scalar::one(f);
        let e = vec![one.clone(), z.clone()];
        let r = vec![z.clone(), one.clone()];
        // r² = r + 1 (the field 𝔽₄); r⁻¹ = r + 1.
        let rr = vec![one.clone(), one.clone()];
        let t = DivisionAlgebraTable::new(
            f,
            vec!["1".into(), "r".into()],
            vec![vec![e.clone(), r.clone()], vec![r.clone(), rr.clone()]],
            vec![e, rr],
        )
        .unwrap();
        assert!(t
            .validate()
            .iter()
            .any(|v| v.contains("condition (b)")));
    }
}
