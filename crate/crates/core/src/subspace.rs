//! Graded subspaces in canonical echelon form.
//!
//! A [`GradedSubspace`] stores, for each degree, a reduced row echelon basis
//! of its intersection with that graded piece, written in the coordinates of
//! the full algebra. Pivots follow the fixed basis order with leading
//! coefficient 1, so two equal subspaces always produce bit-identical
//! matrices and complements are reproducible.

use crate::algebra::GradedAlgebra;
use crate::error::AlgebraError;
use crate::linalg::{coordinates_in, in_row_space, RatMat};
use crate::rat::{is_zero, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct GradedSubspace {
    pub algebra: Arc<GradedAlgebra>,
    /// RREF basis per degree; rows are full-length coefficient vectors.
    parts: BTreeMap<i64, RatMat>,
}

impl GradedSubspace {
    pub fn empty(algebra: &Arc<GradedAlgebra>) -> Self {
        GradedSubspace {
            algebra: Arc::clone(algebra),
            parts: BTreeMap::new(),
        }
    }

    /// Span of arbitrary (not necessarily homogeneous) vectors whose graded
    /// components all lie in the space: each vector must be homogeneous.
    pub fn span(
        algebra: &Arc<GradedAlgebra>,
        vectors: &[Vec<Rat>],
    ) -> Result<Self, AlgebraError> {
        let mut by_degree: BTreeMap<i64, Vec<Vec<Rat>>> = BTreeMap::new();
        for v in vectors {
            if v.len() != algebra.dim() {
                return Err(AlgebraError::DimensionMismatch {
                    got: v.len(),
                    want: algebra.dim(),
                });
            }
            if v.iter().all(is_zero) {
                continue;
            }
            let Some(d) = algebra.homogeneous_degree(v) else {
                return Err(AlgebraError::NotHomogeneous { expected: 0 });
            };
            by_degree.entry(d).or_default().push(v.clone());
        }
        let mut parts = BTreeMap::new();
        for (d, rows) in by_degree {
            let (rref, _) = RatMat::from_rows(rows).rref();
            if rref.rows > 0 {
                parts.insert(d, rref);
            }
        }
        Ok(GradedSubspace {
            algebra: Arc::clone(algebra),
            parts,
        })
    }

    /// The full graded piece `g_d` as a subspace.
    pub fn graded_piece(algebra: &Arc<GradedAlgebra>, d: i64) -> Self {
        let idx = algebra.indices_of_degree(d);
        let mut rows = Vec::new();
        for &i in idx {
            let mut v = vec![Rat::zero(); algebra.dim()];
            v[i] = num_traits::One::one();
            rows.push(v);
        }
        let mut parts = BTreeMap::new();
        if !rows.is_empty() {
            parts.insert(d, RatMat::from_rows(rows));
        }
        GradedSubspace {
            algebra: Arc::clone(algebra),
            parts,
        }
    }

    /// Sum of the graded pieces with degree >= k (the filtration space).
    pub fn filtration(algebra: &Arc<GradedAlgebra>, k: i64) -> Self {
        let mut out = Self::empty(algebra);
        for d in algebra.degrees() {
            if d >= k {
                out = out.sum(&Self::graded_piece(algebra, d));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.parts.values().map(|m| m.rows).sum()
    }

    pub fn dim_in_degree(&self, d: i64) -> usize {
        self.parts.get(&d).map_or(0, |m| m.rows)
    }

    /// Degrees with a nonzero component, sorted.
    pub fn degrees(&self) -> Vec<i64> {
        self.parts.keys().copied().collect()
    }

    /// Graded dimensions `(degree, dim)`, sorted by degree.
    pub fn graded_dims(&self) -> Vec<(i64, usize)> {
        self.parts.iter().map(|(d, m)| (*d, m.rows)).collect()
    }

    pub fn basis_in_degree(&self, d: i64) -> Vec<Vec<Rat>> {
        self.parts.get(&d).map_or(Vec::new(), |m| m.rows_vec())
    }

    /// All basis rows across degrees, in degree order.
    pub fn basis(&self) -> Vec<Vec<Rat>> {
        self.parts.values().flat_map(|m| m.rows_vec()).collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.iter().all(is_zero) {
            return true;
        }
        // decompose into graded components, test each
        for d in self.algebra.degrees() {
            let comp = self.algebra.degree_component(v, d);
            if comp.iter().all(is_zero) {
                continue;
            }
            match self.parts.get(&d) {
                None => return false,
                Some(m) => {
                    if !in_row_space(m, &comp) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coordinates of `v` in the concatenated basis (degree order), or None.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let mut coords = Vec::with_capacity(self.dim());
        for (d, m) in &self.parts {
            let comp = self.algebra.degree_component(v, *d);
            coords.extend(coordinates_in(m, &comp)?);
        }
        // residual outside the listed degrees must vanish
        let listed: Vec<i64> = self.parts.keys().copied().collect();
        for d in self.algebra.degrees() {
            if !listed.contains(&d) {
                let comp = self.algebra.degree_component(v, d);
                if !comp.iter().all(is_zero) {
                    return None;
                }
            }
        }
        Some(coords)
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut parts = self.parts.clone();
        for (d, m) in &other.parts {
            let entry = parts.entry(*d).or_insert_with(|| RatMat::zeros(0, self.algebra.dim()));
            let mut rows = entry.rows_vec();
            rows.extend(m.rows_vec());
            let (rref, _) = RatMat::from_rows(rows).rref();
            *entry = rref;
        }
        parts.retain(|_, m| m.rows > 0);
        GradedSubspace {
            algebra: Arc::clone(&self.algebra),
            parts,
        }
    }

    pub fn intersect(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut parts = BTreeMap::new();
        for (d, a) in &self.parts {
            let Some(b) = other.parts.get(d) else {
                continue;
            };
            // kernel method: rows of A stacked over rows of B; null combos
            // x with x_A * A = x_B * B give intersection vectors
            let stacked = {
                let mut rows = a.rows_vec();
                rows.extend(b.rows_vec().into_iter().map(|r| {
                    r.into_iter().map(|c| -c).collect::<Vec<Rat>>()
                }));
                RatMat::from_rows(rows).transpose()
            };
            let kernel = stacked.kernel();
            let mut vecs = Vec::new();
            for r in 0..kernel.rows {
                let mut v = vec![Rat::zero(); self.algebra.dim()];
                for (i, row) in a.rows_vec().iter().enumerate() {
                    let c = &kernel[(r, i)];
                    if !is_zero(c) {
                        for (j, x) in row.iter().enumerate() {
                            if !is_zero(x) {
                                v[j] += c * x;
                            }
                        }
                    }
                }
                if !v.iter().all(is_zero) {
                    vecs.push(v);
                }
            }
            if !vecs.is_empty() {
                let (rref, _) = RatMat::from_rows(vecs).rref();
                if rref.rows > 0 {
                    parts.insert(*d, rref);
                }
            }
        }
        GradedSubspace {
            algebra: Arc::clone(&self.algebra),
            parts,
        }
    }

    /// Deterministic complement of `self` inside `ambient`, degree by degree:
    /// walk the ambient basis rows in order, keep those that extend the span,
    /// then re-echelon. The result satisfies
    /// `self (+) complement = ambient` with zero intersection.
    pub fn complement_in(&self, ambient: &GradedSubspace) -> GradedSubspace {
        let mut parts = BTreeMap::new();
        for (d, amb) in &ambient.parts {
            let sub_rows = self.basis_in_degree(*d);
            let mut work = sub_rows.clone();
            let mut chosen: Vec<Vec<Rat>> = Vec::new();
            let current_rank = |rows: &[Vec<Rat>]| {
                if rows.is_empty() {
                    0
                } else {
                    RatMat::from_rows(rows.to_vec()).rank()
                }
            };
            let mut rank = current_rank(&work);
            for r in 0..amb.rows {
                let cand = amb.row_vec(r);
                work.push(cand.clone());
                let new_rank = current_rank(&work);
                if new_rank > rank {
                    rank = new_rank;
                    chosen.push(cand);
                } else {
                    work.pop();
                }
            }
            if !chosen.is_empty() {
                let (rref, _) = RatMat::from_rows(chosen).rref();
                parts.insert(*d, rref);
            }
        }
        GradedSubspace {
            algebra: Arc::clone(&self.algebra),
            parts,
        }
    }

    /// Is `self` contained in `other`?
    pub fn subset_of(&self, other: &GradedSubspace) -> bool {
        self.parts.iter().all(|(d, m)| {
            (0..m.rows).all(|r| {
                other
                    .parts
                    .get(d)
                    .is_some_and(|o| in_row_space(o, m.row(r)))
            })
        })
    }

    /// Equality as subspaces = equality of canonical matrices.
    pub fn same_space(&self, other: &GradedSubspace) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .all(|(d, m)| other.parts.get(d).is_some_and(|o| o == m))
    }

    /// Bracket-closure check `[self, self] subset self` (exact).
    pub fn is_subalgebra(&self) -> bool {
        let basis = self.basis();
        for (i, u) in basis.iter().enumerate() {
            for v in basis.iter().skip(i + 1) {
                if !self.contains(&self.algebra.bracket_coeffs(u, v)) {
                    return false;
                }
            }
        }
        true
    }

    /// Stability of `self` under brackets with every basis vector of `other`.
    pub fn stable_under(&self, other: &GradedSubspace) -> bool {
        for s in other.basis() {
            for w in self.basis() {
                if !self.contains(&self.algebra.bracket_coeffs(&s, &w)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            algebra: self.algebra.name.clone(),
            dimension: self.dim(),
            parts: self
                .parts
                .iter()
                .map(|(d, m)| SubspacePart {
                    degree: *d,
                    basis: m
                        .rows_vec()
                        .iter()
                        .map(|row| row.iter().map(crate::rat::format_rat).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(
        algebra: &Arc<GradedAlgebra>,
        json: &SubspaceJson,
    ) -> Result<Self, AlgebraError> {
        let mut vectors = Vec::new();
        for part in &json.parts {
            for row in &part.basis {
                let v: Result<Vec<Rat>, _> = row
                    .iter()
                    .map(|s| crate::rat::parse_rat(s).map_err(AlgebraError::Malformed))
                    .collect();
                vectors.push(v?);
            }
        }
        Self::span(algebra, &vectors)
    }

    /// Labels for basis rows that are plain (scaled) basis vectors of the
    /// algebra; other rows render as linear combinations.
    pub fn basis_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (_, m) in &self.parts {
            for r in 0..m.rows {
                let row = m.row(r);
                let nonzero: Vec<usize> = (0..row.len()).filter(|&i| !is_zero(&row[i])).collect();
                if nonzero.len() == 1 {
                    out.push(self.algebra.basis_labels[nonzero[0]].clone());
                } else {
                    let e = crate::algebra::AlgebraElement {
                        algebra: Arc::clone(&self.algebra),
                        coeffs: row.to_vec(),
                    };
                    out.push(e.display());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub algebra: String,
    pub dimension: usize,
    pub parts: Vec<SubspacePart>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspacePart {
    pub degree: i64,
    pub basis: Vec<Vec<String>>,
}
