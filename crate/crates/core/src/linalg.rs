//! Exact linear algebra over the rationals, plus the few dense `f64`
//! routines the sampled-curve pipeline needs.
//!
//! The rational side is deliberately simple: row-major matrices, Gauss
//! elimination with the leftmost-nonzero pivot in fixed column order and
//! leading coefficients normalized to 1. That pivot policy is what makes
//! echelon forms canonical (equal row spans produce identical matrices),
//! which the subspace calculus relies on for equality tests and
//! deterministic complements.

use crate::rat::{is_zero, Rat};
use num_traits::{One, Zero};

/// Dense row-major matrix over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        RatMat {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rat) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Rat> {
        self.row(i).to_vec()
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn col_vec(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn push_row(&mut self, row: Vec<Rat>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> RatMat {
        RatMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !is_zero(b) {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !is_zero(&self[(i, j)]) && !is_zero(&v[j]) {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> RatMat {
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn is_zero_mat(&self) -> bool {
        self.data.iter().all(is_zero)
    }

    /// Matrix commutator `ab - ba`.
    pub fn commutator(&self, other: &RatMat) -> RatMat {
        self.mul(other).sub(&other.mul(self))
    }

    /// Flattens row-major into a vector (for treating matrices as vectors).
    pub fn flatten(&self) -> Vec<Rat> {
        self.data.clone()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(crate::rat::to_f64).collect())
            .collect()
    }

    /// Reduced row echelon form with canonical pivoting; returns the pivot
    /// column of each nonzero row. Zero rows are dropped.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            // find pivot row at or below r with nonzero entry in column c
            let Some(p) = (r..m.rows).find(|&i| !is_zero(&m[(i, c)])) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = {
                let lead = m[(r, c)].clone();
                Rat::one() / lead
            };
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !is_zero(&m[(i, c)]) {
                    let factor = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(i, j)] - &factor * &m[(r, j)];
                        m[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        m.truncate_rows(r);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : Mv = 0}`, rows in canonical order
    /// (one row per free column, unit entry at that column).
    pub fn kernel(&self) -> RatMat {
        let (r, pivots) = self.rref();
        let mut free_cols: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free_cols.sort_unstable();
        let mut out = RatMat::zeros(0, self.cols);
        for &fc in &free_cols {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, fc)].clone();
            }
            out.push_row(v);
        }
        out
    }

    /// Solves `Mx = b`. Returns the canonical particular solution (free
    /// coordinates set to zero) or `None` if inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = RatMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(RatMat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn determinant(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !is_zero(&m[(i, c)])) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            det *= m[(c, c)].clone();
            let inv = Rat::one() / m[(c, c)].clone();
            for i in c + 1..n {
                if !is_zero(&m[(i, c)]) {
                    let factor = &m[(i, c)] * &inv;
                    for j in c..n {
                        let v = &m[(i, j)] - &factor * &m[(c, j)];
                        m[(i, j)] = v;
                    }
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn truncate_rows(&mut self, n: usize) {
        self.data.truncate(n * self.cols);
        self.rows = n;
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Row space membership: is `v` in the span of the rows of `basis`?
/// `basis` must already be in RREF.
pub fn in_row_space(basis: &RatMat, v: &[Rat]) -> bool {
    reduce_against(basis, v).iter().all(is_zero)
}

/// Reduces `v` against an RREF basis, returning the residual.
pub fn reduce_against(basis: &RatMat, v: &[Rat]) -> Vec<Rat> {
    let mut v = v.to_vec();
    for i in 0..basis.rows {
        // pivot column = first nonzero entry of row i
        let Some(pc) = (0..basis.cols).find(|&c| !is_zero(&basis[(i, c)])) else {
            continue;
        };
        if !is_zero(&v[pc]) {
            let factor = v[pc].clone();
            for j in 0..basis.cols {
                let d = &v[j] - &factor * &basis[(i, j)];
                v[j] = d;
            }
        }
    }
    v
}

/// Coordinates of `v` in the row space of RREF `basis`, or `None`.
pub fn coordinates_in(basis: &RatMat, v: &[Rat]) -> Option<Vec<Rat>> {
    let mut v = v.to_vec();
    let mut coords = vec![Rat::zero(); basis.rows];
    for i in 0..basis.rows {
        let Some(pc) = (0..basis.cols).find(|&c| !is_zero(&basis[(i, c)])) else {
            continue;
        };
        if !is_zero(&v[pc]) {
            let factor = &v[pc] / &basis[(i, pc)];
            coords[i] = factor.clone();
            for j in 0..basis.cols {
                let d = &v[j] - &factor * &basis[(i, j)];
                v[j] = d;
            }
        }
    }
    if v.iter().all(is_zero) {
        Some(coords)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// f64 helpers for the sampled pipeline
// ---------------------------------------------------------------------------

/// Solves the square system `Ax = b` by partial-pivot LU. Returns `None` when
/// the pivot magnitude degenerates.
pub fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let (p, pv) = (c..n)
            .map(|i| (i, m[i][c].abs()))
            .max_by(|u, v| u.1.total_cmp(&v.1))?;
        if pv < 1e-300 {
            return None;
        }
        m.swap(c, p);
        x.swap(c, p);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            if f != 0.0 {
                for j in c..n {
                    m[i][j] -= f * m[c][j];
                }
                x[i] -= f * x[c];
            }
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

pub fn det_f64(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let (p, pv) = (c..n)
            .map(|i| (i, m[i][c].abs()))
            .max_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        if pv == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns `(eigenvalues, eigenvectors)`, eigenvectors as rows, sorted by
/// decreasing eigenvalue magnitude.
pub fn sym_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frob(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n).map(|i| (m[i][i], v[i].clone())).collect();
    pairs.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.into_iter().map(|p| p.1).collect(),
    )
}

fn frob(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Singular values and right-singular vectors of a rectangular matrix by
/// one-sided Jacobi on equilibrated columns. Works on the matrix itself
/// (no normal-matrix squaring), so small singular values resolve to
/// machine precision times the condition number — which is what the
/// kernel-gap policies downstream rely on.
pub fn singular_kernel(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut col_scale = vec![0.0f64; cols];
    for row in a {
        for (i, v) in row.iter().enumerate() {
            col_scale[i] += v * v;
        }
    }
    for s in col_scale.iter_mut() {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    // column-major working copy, equilibrated
    let mut w: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j] / col_scale[j]).collect())
        .collect();
    let mut v = vec![vec![0.0; cols]; cols];
    for (j, col) in v.iter_mut().enumerate() {
        col[j] = 1.0;
    }
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let aii = dot(&w[i], &w[i]);
                let ajj = dot(&w[j], &w[j]);
                let aij = dot(&w[i], &w[j]);
                if aij.abs() <= 1e-30 + 1e-16 * (aii * ajj).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (ajj - aii) / (2.0 * aij);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let (wi, wj) = (w[i][r], w[j][r]);
                    w[i][r] = c * wi - s * wj;
                    w[j][r] = s * wi + c * wj;
                }
                for r in 0..cols {
                    let (vi, vj) = (v[i][r], v[j][r]);
                    v[i][r] = c * vi - s * vj;
                    v[j][r] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let svals: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let back: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| {
            let mut u: Vec<f64> = v[j]
                .iter()
                .zip(&col_scale)
                .map(|(x, s)| x / s)
                .collect();
            let n = dot(&u, &u).sqrt();
            if n > 0.0 {
                for x in u.iter_mut() {
                    *x /= n;
                }
            }
            u
        })
        .collect();
    (svals, back)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn m(rows: &[&[i64]]) -> RatMat {
        RatMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_canonical() {
        let a = m(&[&[2, 4, 6], &[1, 2, 4]]);
        let (r, p) = a.rref();
        assert_eq!(p, vec![0, 2]);
        assert_eq!(r, m(&[&[1, 2, 0], &[0, 0, 1]]));
    }

    #[test]
    fn rref_is_span_invariant() {
        // shuffled/rescaled generating sets of the same space agree bit-for-bit
        let a = m(&[&[1, 2, 3], &[0, 1, 1]]);
        let b = m(&[&[3, 7, 10], &[2, 4, 6], &[-1, -1, -2]]);
        assert_eq!(a.rref().0, b.rref().0);
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.rows, 2);
        for i in 0..k.rows {
            assert!(a.mul_vec(k.row(i)).iter().all(is_zero));
        }
        let b = vec![rat(6), rat(12)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(a.solve(&[rat(1), rat(0)]).is_none());
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.determinant(), rat(1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMat::identity(2));
        let sing = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.determinant(), rat(0));
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn coordinates_recover_combination() {
        let basis = m(&[&[1, 0, 2], &[0, 1, 3]]);
        let v = vec![ratio(1, 2), rat(2), rat(7)];
        let c = coordinates_in(&basis, &v).unwrap();
        assert_eq!(c, vec![ratio(1, 2), rat(2)]);
        assert!(coordinates_in(&basis, &[rat(0), rat(0), rat(1)]).is_none());
    }

    #[test]
    fn lu_solve_small() {
        let a = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let x = lu_solve(&a, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigen_diagonalizes() {
        let a = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let (eigs, vecs) = sym_eigen(&a);
        for (lam, v) in eigs.iter().zip(&vecs) {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * v[j]).sum();
                assert!((av - lam * v[i]).abs() < 1e-10);
            }
        }
    }
}
