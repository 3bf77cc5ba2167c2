//! Graded semisimple Lie algebras with exact structure constants.
//!
//! An algebra here is a finite-dimensional Lie algebra given by a basis, a
//! sparse table of structure constants over the rationals, an integer degree
//! for each basis element, and the grading element realizing those degrees.
//! The constructors ([`GradedAlgebra::sl_flag`], [`GradedAlgebra::slb`] and
//! the `G2` builder in [`crate::g2`]) all come with a defining matrix
//! realization, which the numeric pipeline uses to convert sampled matrices
//! into basis coefficients.

use crate::error::AlgebraError;
use crate::linalg::RatMat;
use crate::rat::{is_zero, rat, ratio, to_f64, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Sparse coefficient vector: `(basis index, coefficient)` pairs, index-sorted.
pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Skew,
}

/// A matrix realization of the algebra inside gl(n).
#[derive(Debug, Clone)]
pub struct MatrixRealization {
    pub n: usize,
    pub basis: Vec<RatMat>,
    /// Left inverse of the basis-as-columns matrix: coefficients = solver * vec(M).
    solver: RatMat,
    solver_f64: Vec<Vec<f64>>,
}

impl MatrixRealization {
    fn new(n: usize, basis: Vec<RatMat>) -> Self {
        let dim = basis.len();
        let nn = n * n;
        let mut b = RatMat::zeros(nn, dim);
        for (j, m) in basis.iter().enumerate() {
            let flat = m.flatten();
            for i in 0..nn {
                b[(i, j)] = flat[i].clone();
            }
        }
        let bt = b.transpose();
        let gram = bt.mul(&b);
        let gram_inv = gram.inverse().expect("matrix basis is linearly independent");
        let solver = gram_inv.mul(&bt);
        let solver_f64 = solver.to_f64();
        MatrixRealization {
            n,
            basis,
            solver,
            solver_f64,
        }
    }

    /// Exact coefficients of a matrix lying in the span of the basis.
    pub fn coeffs_of(&self, m: &RatMat) -> Result<Vec<Rat>, AlgebraError> {
        let flat = m.flatten();
        let coeffs = self.solver.mul_vec(&flat);
        // verify membership: reconstruct and compare
        let mut recon = RatMat::zeros(self.n, self.n);
        for (j, c) in coeffs.iter().enumerate() {
            if !is_zero(c) {
                recon = recon.add(&self.basis[j].scale(c));
            }
        }
        if recon != *m {
            return Err(AlgebraError::Malformed(
                "matrix lies outside the algebra".into(),
            ));
        }
        Ok(coeffs)
    }

    /// Float coefficients of a (numerically spanned) matrix, no membership check.
    pub fn coeffs_of_f64(&self, m: &[Vec<f64>]) -> Vec<f64> {
        let nn = self.n * self.n;
        let mut flat = vec![0.0; nn];
        for i in 0..self.n {
            for j in 0..self.n {
                flat[i * self.n + j] = m[i][j];
            }
        }
        self.solver_f64
            .iter()
            .map(|row| row.iter().zip(&flat).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matrix_of(&self, coeffs: &[Rat]) -> RatMat {
        let mut out = RatMat::zeros(self.n, self.n);
        for (j, c) in coeffs.iter().enumerate() {
            if !is_zero(c) {
                out = out.add(&self.basis[j].scale(c));
            }
        }
        out
    }

    pub fn matrix_of_f64(&self, coeffs: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                for (i, row) in self.basis[j].to_f64().iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        out[i][k] += c * v;
                    }
                }
            }
        }
        out
    }
}

/// A graded Lie algebra with exact structure constants.
///
/// Immutable after construction; share via `Arc`.
#[derive(Debug)]
pub struct GradedAlgebra {
    pub name: String,
    pub dimension: usize,
    pub basis_labels: Vec<String>,
    /// degree of each basis element
    pub degree: Vec<i64>,
    /// structure constants: bracket of basis elements i, j
    pub structure: Vec<Vec<SparseVec>>,
    /// coefficients of the grading element e with [e, u] = deg(u) u
    pub grading_element: Vec<Rat>,
    /// Killing form matrix K(e_i, e_j)
    pub killing: RatMat,
    /// basis indices spanning the distinguished Cartan (diagonalizable) subalgebra
    pub cartan: Vec<usize>,
    pub realization: Option<MatrixRealization>,
    by_degree: BTreeMap<i64, Vec<usize>>,
    structure_f64: Vec<Vec<Vec<(usize, f64)>>>,
}

impl GradedAlgebra {
    /// Assembles the derived data (Killing form, degree index, f64 tables)
    /// from the raw structure constants.
    pub fn assemble(
        name: String,
        basis_labels: Vec<String>,
        degree: Vec<i64>,
        structure: Vec<Vec<SparseVec>>,
        grading_element: Vec<Rat>,
        cartan: Vec<usize>,
        realization: Option<MatrixRealization>,
    ) -> Arc<GradedAlgebra> {
        let dimension = basis_labels.len();
        assert_eq!(degree.len(), dimension);
        assert_eq!(structure.len(), dimension);
        assert_eq!(grading_element.len(), dimension);

        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &d) in degree.iter().enumerate() {
            by_degree.entry(d).or_default().push(i);
        }

        // ad matrices as (row -> value) maps per column, for the Killing form
        let ads: Vec<BTreeMap<(usize, usize), Rat>> = (0..dimension)
            .map(|i| {
                let mut m = BTreeMap::new();
                for j in 0..dimension {
                    for (r, c) in &structure[i][j] {
                        if !is_zero(c) {
                            m.insert((*r, j), c.clone());
                        }
                    }
                }
                m
            })
            .collect();
        let mut killing = RatMat::zeros(dimension, dimension);
        for i in 0..dimension {
            for j in i..dimension {
                let mut acc = Rat::zero();
                for ((a, b), v) in &ads[i] {
                    if let Some(w) = ads[j].get(&(*b, *a)) {
                        acc += v * w;
                    }
                }
                killing[(i, j)] = acc.clone();
                killing[(j, i)] = acc;
            }
        }

        let structure_f64 = structure
            .iter()
            .map(|row| {
                row.iter()
                    .map(|sv| sv.iter().map(|(k, c)| (*k, to_f64(c))).collect())
                    .collect()
            })
            .collect();

        Arc::new(GradedAlgebra {
            name,
            dimension,
            basis_labels,
            degree,
            structure,
            grading_element,
            killing,
            cartan,
            realization,
            by_degree,
            structure_f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    /// Basis indices of the graded piece `g_d` (empty slice if absent).
    pub fn indices_of_degree(&self, d: i64) -> &[usize] {
        self.by_degree.get(&d).map_or(&[], |v| v.as_slice())
    }

    /// Sorted list of degrees that actually occur.
    pub fn degrees(&self) -> Vec<i64> {
        self.by_degree.keys().copied().collect()
    }

    pub fn max_degree(&self) -> i64 {
        *self.by_degree.keys().last().unwrap()
    }

    pub fn min_degree(&self) -> i64 {
        *self.by_degree.keys().next().unwrap()
    }

    pub fn bracket_coeffs(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dimension];
        for (i, a) in u.iter().enumerate() {
            if is_zero(a) {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if is_zero(b) {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.structure[i][j] {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    pub fn bracket_f64(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for (i, &a) in u.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.structure_f64[i][j] {
                    out[*k] += ab * c;
                }
            }
        }
        out
    }

    /// The matrix of `ad u` acting on the algebra (column j = [u, e_j]).
    pub fn ad_matrix(&self, u: &[Rat]) -> RatMat {
        let mut m = RatMat::zeros(self.dimension, self.dimension);
        let mut ej = vec![Rat::zero(); self.dimension];
        for j in 0..self.dimension {
            ej[j] = Rat::one();
            let col = self.bracket_coeffs(u, &ej);
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
            ej[j] = Rat::zero();
        }
        m
    }

    pub fn killing_pair(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (i, a) in u.iter().enumerate() {
            if is_zero(a) {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if !is_zero(b) && !is_zero(&self.killing[(i, j)]) {
                    acc += a * b * &self.killing[(i, j)];
                }
            }
        }
        acc
    }

    /// Degree of a homogeneous element, or `None` for 0 or mixed degrees.
    pub fn homogeneous_degree(&self, coeffs: &[Rat]) -> Option<i64> {
        let mut deg = None;
        for (i, c) in coeffs.iter().enumerate() {
            if !is_zero(c) {
                match deg {
                    None => deg = Some(self.degree[i]),
                    Some(d) if d != self.degree[i] => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Projection of a coefficient vector onto the degree-d piece.
    pub fn degree_component(&self, coeffs: &[Rat], d: i64) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dimension];
        for &i in self.indices_of_degree(d) {
            out[i] = coeffs[i].clone();
        }
        out
    }

    pub fn degree_component_f64(&self, coeffs: &[f64], d: i64) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for &i in self.indices_of_degree(d) {
            out[i] = coeffs[i];
        }
        out
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<Rat>) -> Result<AlgebraElement, AlgebraError> {
        if coeffs.len() != self.dimension {
            return Err(AlgebraError::DimensionMismatch {
                got: coeffs.len(),
                want: self.dimension,
            });
        }
        Ok(AlgebraElement {
            algebra: Arc::clone(self),
            coeffs,
        })
    }

    pub fn basis_element(self: &Arc<Self>, idx: usize) -> AlgebraElement {
        let mut coeffs = vec![Rat::zero(); self.dimension];
        coeffs[idx] = Rat::one();
        AlgebraElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement {
            algebra: Arc::clone(self),
            coeffs: vec![Rat::zero(); self.dimension],
        }
    }

    /// Full structural check: antisymmetry and Jacobi on all basis triples,
    /// the grading-element identity, grading compatibility and
    /// non-degeneracy of the Killing form. Exact, no tolerances.
    pub fn check_invariants(&self) -> Result<(), AlgebraError> {
        let n = self.dimension;
        for i in 0..n {
            for j in 0..n {
                // antisymmetry c[i][j] = -c[j][i]
                let mut sum: BTreeMap<usize, Rat> = BTreeMap::new();
                for (k, c) in &self.structure[i][j] {
                    *sum.entry(*k).or_insert_with(Rat::zero) += c;
                }
                for (k, c) in &self.structure[j][i] {
                    *sum.entry(*k).or_insert_with(Rat::zero) += c;
                }
                if sum.values().any(|v| !is_zero(v)) {
                    return Err(AlgebraError::Malformed(format!(
                        "bracket not antisymmetric at ({i},{j})"
                    )));
                }
                // grading: [g_a, g_b] subset g_{a+b}
                let d = self.degree[i] + self.degree[j];
                for (k, c) in &self.structure[i][j] {
                    if !is_zero(c) && self.degree[*k] != d {
                        return Err(AlgebraError::Malformed(format!(
                            "bracket of degrees {} and {} leaves degree {}",
                            self.degree[i], self.degree[j], d
                        )));
                    }
                }
            }
        }
        // Jacobi on all triples
        let basis: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut v = vec![Rat::zero(); n];
                v[i] = Rat::one();
                v
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                let bij = self.bracket_coeffs(&basis[i], &basis[j]);
                for k in j + 1..n {
                    let bjk = self.bracket_coeffs(&basis[j], &basis[k]);
                    let bik = self.bracket_coeffs(&basis[i], &basis[k]);
                    let t1 = self.bracket_coeffs(&basis[k], &bij);
                    let t2 = self.bracket_coeffs(&basis[i], &bjk);
                    let t3 = self.bracket_coeffs(&bik, &basis[j]);
                    for m in 0..n {
                        // [k,[i,j]] + [i,[j,k]] + [j,[k,i]] = 0 with [j,[k,i]] = [[i,k],j]
                        let s = &t1[m] + &t2[m] + &t3[m];
                        if !is_zero(&s) {
                            return Err(AlgebraError::Malformed(format!(
                                "Jacobi fails on triple ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        // grading element
        for j in 0..n {
            let mut ej = vec![Rat::zero(); n];
            ej[j] = Rat::one();
            let br = self.bracket_coeffs(&self.grading_element, &ej);
            for (m, c) in br.iter().enumerate() {
                let expect = if m == j {
                    rat(self.degree[j])
                } else {
                    Rat::zero()
                };
                if *c != expect {
                    return Err(AlgebraError::Malformed(format!(
                        "grading element fails on basis {j}"
                    )));
                }
            }
        }
        // Killing: nondegenerate and compatible with the grading
        for i in 0..n {
            for j in 0..n {
                if self.degree[i] + self.degree[j] != 0 && !is_zero(&self.killing[(i, j)]) {
                    return Err(AlgebraError::Malformed(
                        "Killing form not grading-compatible".into(),
                    ));
                }
            }
        }
        if self.killing.rank() != n {
            return Err(AlgebraError::Malformed(
                "Killing form is degenerate".into(),
            ));
        }
        Ok(())
    }

    // -- constructors -------------------------------------------------------

    /// sl(n) with the block grading of a flag: entry blocks are graded by
    /// (column block) - (row block), so the lower shift has degree -1 and the
    /// parabolic of the flag is the sum of the non-negative degrees.
    pub fn sl_flag(block_sizes: &[usize]) -> Result<Arc<GradedAlgebra>, AlgebraError> {
        if block_sizes.is_empty() {
            return Err(AlgebraError::BadConstructor("empty block list".into()));
        }
        if block_sizes.iter().any(|&s| s == 0) {
            return Err(AlgebraError::BadConstructor(
                "block sizes must be positive".into(),
            ));
        }
        let n: usize = block_sizes.iter().sum();
        if n < 2 {
            return Err(AlgebraError::BadConstructor(
                "sl(n) needs n >= 2".into(),
            ));
        }
        let mut block = vec![0usize; n];
        {
            let mut idx = 0;
            for (b, &s) in block_sizes.iter().enumerate() {
                for _ in 0..s {
                    block[idx] = b;
                    idx += 1;
                }
            }
        }
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        let mut degree = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut m = RatMat::zeros(n, n);
                    m[(i, j)] = Rat::one();
                    basis.push(m);
                    labels.push(format!("E[{i},{j}]"));
                    degree.push(block[j] as i64 - block[i] as i64);
                }
            }
        }
        let mut cartan = Vec::new();
        for m in 0..n - 1 {
            let mut h = RatMat::zeros(n, n);
            h[(m, m)] = Rat::one();
            h[(m + 1, m + 1)] = -Rat::one();
            cartan.push(basis.len());
            basis.push(h);
            labels.push(format!("H[{m}]"));
            degree.push(0);
        }
        // grading element: diagonal d_i = c - block(i), trace zero
        let c = {
            let total: i64 = block.iter().map(|&b| b as i64).sum();
            ratio(total, n as i64)
        };
        let mut e_mat = RatMat::zeros(n, n);
        for i in 0..n {
            e_mat[(i, i)] = &c - rat(block[i] as i64);
        }
        let name = format!(
            "sl({n})[{}]",
            block_sizes
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::from_matrices(name, basis, labels, degree, e_mat, cartan)
    }

    /// The subalgebra of sl(n) preserving a nondegenerate symmetric or skew
    /// form, graded by an isotropic flag. The form is taken antidiagonal in a
    /// flag-adapted basis, so the parabolic is block upper-triangular.
    pub fn slb(
        n: usize,
        parity: Parity,
        flag: &[usize],
    ) -> Result<Arc<GradedAlgebra>, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::BadConstructor("need n >= 2".into()));
        }
        if parity == Parity::Skew && n % 2 != 0 {
            return Err(AlgebraError::BadConstructor(
                "skew form needs even dimension".into(),
            ));
        }
        let mut prev = 0usize;
        for &r in flag {
            if r <= prev || 2 * r > n {
                return Err(AlgebraError::BadConstructor(
                    "flag must be strictly increasing with r_k <= n/2".into(),
                ));
            }
            prev = r;
        }
        // Gram matrix J on the antidiagonal
        let mut j_mat = RatMat::zeros(n, n);
        for i in 0..n {
            let sign = match parity {
                Parity::Symmetric => Rat::one(),
                Parity::Skew => {
                    if i < n - 1 - i {
                        Rat::one()
                    } else {
                        -Rat::one()
                    }
                }
            };
            j_mat[(i, n - 1 - i)] = sign;
        }
        // weights: flag block m (1-based) gets k - m + 1 (or +1/2 when the last
        // flag space is Lagrangian), mirrored negatively; middle block 0
        let k = flag.len();
        let lagrangian = k > 0 && 2 * flag[k - 1] == n;
        let mut weight = vec![Rat::zero(); n];
        for i in 0..n {
            let m = flag.iter().position(|&r| i < r);
            if let Some(m) = m {
                let base = rat((k - m) as i64);
                weight[i] = if lagrangian {
                    base - ratio(1, 2)
                } else {
                    base
                };
            } else if flag.last().is_some_and(|&rk| i >= n - rk) {
                let mirror = n - 1 - i;
                let m = flag.iter().position(|&r| mirror < r).unwrap();
                let base = rat((k - m) as i64);
                weight[i] = -(if lagrangian { base - ratio(1, 2) } else { base });
            }
        }
        // basis: per-degree kernels of A^T J + J A = 0
        let mut entries_by_degree: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let d = &weight[i] - &weight[j];
                if !d.denom().is_one() {
                    return Err(AlgebraError::BadConstructor(
                        "non-integral degree in flag grading".into(),
                    ));
                }
                let d = d.numer().try_into().map_err(|_| {
                    AlgebraError::BadConstructor("degree overflow".into())
                })?;
                entries_by_degree.entry(d).or_default().push((i, j));
            }
        }
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        let mut degree = Vec::new();
        let mut cartan = Vec::new();
        for (&d, entries) in &entries_by_degree {
            // constraint: for each (p,q), sum_i A_ip J_iq + sum_j J_pj A_jq = 0,
            // restricted to the coordinates of this degree
            let coord_of: BTreeMap<(usize, usize), usize> = entries
                .iter()
                .enumerate()
                .map(|(c, &e)| (e, c))
                .collect();
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for p in 0..n {
                for q in 0..n {
                    let mut row = vec![Rat::zero(); entries.len()];
                    let mut nonzero = false;
                    for i in 0..n {
                        if !is_zero(&j_mat[(i, q)]) {
                            if let Some(&c) = coord_of.get(&(i, p)) {
                                row[c] += j_mat[(i, q)].clone();
                                nonzero = true;
                            }
                        }
                    }
                    for j in 0..n {
                        if !is_zero(&j_mat[(p, j)]) {
                            if let Some(&c) = coord_of.get(&(j, q)) {
                                row[c] += j_mat[(p, j)].clone();
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
            let system = if rows.is_empty() {
                RatMat::zeros(0, entries.len())
            } else {
                RatMat::from_rows(rows)
            };
            let kernel = system.kernel();
            for r in 0..kernel.rows {
                let mut m = RatMat::zeros(n, n);
                for (c, &(i, j)) in entries.iter().enumerate() {
                    if !is_zero(&kernel[(r, c)]) {
                        m[(i, j)] = kernel[(r, c)].clone();
                    }
                }
                // pivot entry names the basis vector
                let pivot = entries
                    .iter()
                    .enumerate()
                    .find(|(c, _)| !is_zero(&kernel[(r, *c)]))
                    .map(|(_, &e)| e)
                    .unwrap();
                let diagonal = (0..n).all(|i| {
                    (0..n).all(|j| i == j || is_zero(&m[(i, j)]))
                });
                if diagonal {
                    cartan.push(basis.len());
                }
                basis.push(m);
                labels.push(format!("F[{},{}]", pivot.0, pivot.1));
                degree.push(d);
            }
        }
        let mut e_mat = RatMat::zeros(n, n);
        for i in 0..n {
            e_mat[(i, i)] = weight[i].clone();
        }
        let kind = match parity {
            Parity::Symmetric => "so",
            Parity::Skew => "sp",
        };
        let name = format!(
            "{kind}({n})[{}]",
            flag.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::from_matrices(name, basis, labels, degree, e_mat, cartan)
    }

    /// Builds a graded algebra from a linearly independent family of matrices
    /// that is closed under commutators.
    pub fn from_matrices(
        name: String,
        basis: Vec<RatMat>,
        labels: Vec<String>,
        degree: Vec<i64>,
        grading_matrix: RatMat,
        cartan: Vec<usize>,
    ) -> Result<Arc<GradedAlgebra>, AlgebraError> {
        let n = basis
            .first()
            .map(|m| m.rows)
            .ok_or_else(|| AlgebraError::BadConstructor("empty basis".into()))?;
        let dim = basis.len();
        let realization = MatrixRealization::new(n, basis);
        let mut structure = vec![vec![SparseVec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let comm = realization.basis[i].commutator(&realization.basis[j]);
                if comm.is_zero_mat() {
                    continue;
                }
                let coeffs = realization.coeffs_of(&comm).map_err(|_| {
                    AlgebraError::BadConstructor(
                        "matrix basis is not closed under commutators".into(),
                    )
                })?;
                structure[i][j] = coeffs
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !is_zero(c))
                    .collect();
            }
        }
        let grading_element = realization.coeffs_of(&grading_matrix).map_err(|_| {
            AlgebraError::BadConstructor("grading element lies outside the algebra".into())
        })?;
        Ok(Self::assemble(
            name,
            labels,
            degree,
            structure,
            grading_element,
            cartan,
            Some(realization),
        ))
    }

    // -- serialization ------------------------------------------------------

    pub fn to_json(&self) -> AlgebraJson {
        let mut constants = Vec::new();
        for i in 0..self.dimension {
            for j in (i + 1)..self.dimension {
                if !self.structure[i][j].is_empty() {
                    constants.push(StructureEntry {
                        i,
                        j,
                        c: self.structure[i][j]
                            .iter()
                            .map(|(k, v)| (*k, crate::rat::format_rat(v)))
                            .collect(),
                    });
                }
            }
        }
        AlgebraJson {
            name: self.name.clone(),
            dimension: self.dimension,
            basis_labels: self.basis_labels.clone(),
            degrees: self.degree.clone(),
            grading_element: self.grading_element.iter().map(crate::rat::format_rat).collect(),
            cartan: self.cartan.clone(),
            structure_constants: constants,
        }
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Arc<GradedAlgebra>, AlgebraError> {
        let dim = json.dimension;
        if json.basis_labels.len() != dim
            || json.degrees.len() != dim
            || json.grading_element.len() != dim
        {
            return Err(AlgebraError::Malformed("inconsistent lengths".into()));
        }
        let mut structure = vec![vec![SparseVec::new(); dim]; dim];
        for entry in &json.structure_constants {
            if entry.i >= dim || entry.j >= dim {
                return Err(AlgebraError::Malformed("index out of range".into()));
            }
            let sv: Result<SparseVec, AlgebraError> = entry
                .c
                .iter()
                .map(|(k, s)| {
                    if *k >= dim {
                        return Err(AlgebraError::Malformed("index out of range".into()));
                    }
                    crate::rat::parse_rat(s)
                        .map(|r| (*k, r))
                        .map_err(AlgebraError::Malformed)
                })
                .collect();
            let sv = sv?;
            structure[entry.j][entry.i] = sv.iter().map(|(k, c)| (*k, -c.clone())).collect();
            structure[entry.i][entry.j] = sv;
        }
        let grading_element: Result<Vec<Rat>, _> = json
            .grading_element
            .iter()
            .map(|s| crate::rat::parse_rat(s).map_err(AlgebraError::Malformed))
            .collect();
        Ok(Self::assemble(
            json.name.clone(),
            json.basis_labels.clone(),
            json.degrees.clone(),
            structure,
            grading_element?,
            json.cartan.clone(),
            None,
        ))
    }
}

/// Stable JSON schema for a graded algebra; rationals as `"p/q"` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub dimension: usize,
    pub basis_labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub grading_element: Vec<String>,
    pub cartan: Vec<usize>,
    pub structure_constants: Vec<StructureEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub c: Vec<(usize, String)>,
}

/// An element of a graded algebra with exact rational coefficients.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub algebra: Arc<GradedAlgebra>,
    pub coeffs: Vec<Rat>,
}

impl AlgebraElement {
    fn same_algebra(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if self.algebra.name != other.algebra.name
            || self.algebra.dimension != other.algebra.dimension
        {
            return Err(AlgebraError::AlgebraMismatch(
                self.algebra.name.clone(),
                other.algebra.name.clone(),
            ));
        }
        Ok(())
    }

    pub fn bracket(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_algebra(other)?;
        Ok(AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.algebra.bracket_coeffs(&self.coeffs, &other.coeffs),
        })
    }

    pub fn killing(&self, other: &AlgebraElement) -> Result<Rat, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.algebra.killing_pair(&self.coeffs, &other.coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(is_zero)
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_algebra(other)?;
        Ok(AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> AlgebraElement {
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn homogeneous_degree(&self) -> Option<i64> {
        self.algebra.homogeneous_degree(&self.coeffs)
    }

    /// Pretty form `3*E[1,0] - 1/2*H[0]` for diagnostics.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !is_zero(c) {
                let lbl = &self.algebra.basis_labels[i];
                if c.is_one() {
                    parts.push(lbl.clone());
                } else if (-c.clone()).is_one() {
                    parts.push(format!("-{lbl}"));
                } else {
                    parts.push(format!("{}*{lbl}", crate::rat::format_rat(c)));
                }
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Parses `--x`-style coefficient lists: comma-separated rationals.
pub fn parse_coeff_list(s: &str, dim: usize) -> Result<Vec<Rat>, AlgebraError> {
    let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
    if parts.len() != dim {
        return Err(AlgebraError::DimensionMismatch {
            got: parts.len(),
            want: dim,
        });
    }
    parts
        .iter()
        .map(|p| crate::rat::parse_rat(p).map_err(AlgebraError::Malformed))
        .collect()
}
