//! Split octonions in the Zorn vector-matrix model, the induced forms on the
//! imaginary subspace, and the derivation algebra.
//!
//! An element is written `(a, v; w, b)` with scalars `a, b` and vectors
//! `v, w` in R^3; coordinates are ordered `[a, v1, v2, v3, w1, w2, w3, b]`.
//! The product is
//!
//! ```text
//! (a1,v1;w1,b1)(a2,v2;w2,b2) =
//!   (a1 a2 + v1.w2,  a1 v2 + b2 v1 - w1 x w2;
//!    a2 w1 + b1 w2 + v1 x v2,  b1 b2 + w1.v2)
//! ```
//!
//! The 7-dimensional imaginary part V is the trace-zero subspace. For
//! imaginary x, y the product splits as `xy = B(x,y) 1 + Omega(x,y)` with
//! `B` symmetric of split signature and `Omega` the skew bilinear map whose
//! B-dual 3-form is totally antisymmetric.

use crate::algebra::GradedAlgebra;
use crate::error::AlgebraError;
use crate::linalg::RatMat;
use crate::rat::{is_zero, Rat};
use crate::subspace::GradedSubspace;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Dimension of the octonion algebra.
pub const OCT_DIM: usize = 8;
/// Dimension of the imaginary subspace V.
pub const IM_DIM: usize = 7;

#[derive(Debug, Clone)]
pub struct OctonionAlgebra {
    /// `table[i][j]` = coordinates of e_i * e_j
    pub table: Vec<Vec<Vec<Rat>>>,
    /// rows of the 7 imaginary basis vectors in octonion coordinates
    pub imaginary_basis: RatMat,
    /// symmetric form B on V in the imaginary basis
    pub b_form: RatMat,
    /// 3-form Omega(x,y,z) = B(Im(xy), z) on V, full 7x7x7 antisymmetric table
    pub three_form: Vec<Vec<Vec<Rat>>>,
}

fn cross(u: &[Rat], v: &[Rat]) -> [Rat; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

fn dot(u: &[Rat], v: &[Rat]) -> Rat {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Zorn vector-matrix product in coordinates `[a, v, w, b]`.
pub fn multiply(x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let (a1, v1, w1, b1) = (&x[0], &x[1..4], &x[4..7], &x[7]);
    let (a2, v2, w2, b2) = (&y[0], &y[1..4], &y[4..7], &y[7]);
    let a = a1 * a2 + dot(v1, w2);
    let b = b1 * b2 + dot(w1, v2);
    let wxw = cross(w1, w2);
    let vxv = cross(v1, v2);
    let mut out = vec![Rat::zero(); OCT_DIM];
    out[0] = a;
    for i in 0..3 {
        out[1 + i] = a1 * &v2[i] + b2 * &v1[i] - &wxw[i];
        out[4 + i] = a2 * &w1[i] + b1 * &w2[i] + &vxv[i];
    }
    out[7] = b;
    out
}

pub fn trace(x: &[Rat]) -> Rat {
    &x[0] + &x[7]
}

pub fn unit() -> Vec<Rat> {
    let mut u = vec![Rat::zero(); OCT_DIM];
    u[0] = Rat::one();
    u[7] = Rat::one();
    u
}

/// Builds the split octonion algebra with its derived data.
pub fn split_octonions() -> OctonionAlgebra {
    let mut table = vec![vec![vec![Rat::zero(); OCT_DIM]; OCT_DIM]; OCT_DIM];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut ei = vec![Rat::zero(); OCT_DIM];
            ei[i] = Rat::one();
            let mut ej = vec![Rat::zero(); OCT_DIM];
            ej[j] = Rat::one();
            *cell = multiply(&ei, &ej);
        }
    }
    // imaginary basis: diagonal (1,-1) first, then the v-units, then w-units
    let mut im_rows = Vec::new();
    {
        let mut u0 = vec![Rat::zero(); OCT_DIM];
        u0[0] = Rat::one();
        u0[7] = -Rat::one();
        im_rows.push(u0);
        for i in 0..6 {
            let mut u = vec![Rat::zero(); OCT_DIM];
            u[1 + i] = Rat::one();
            im_rows.push(u);
        }
    }
    let imaginary_basis = RatMat::from_rows(im_rows);

    // B(x,y) = trace(xy)/2 on V
    let mut b_form = RatMat::zeros(IM_DIM, IM_DIM);
    for i in 0..IM_DIM {
        for j in 0..IM_DIM {
            let p = multiply(imaginary_basis.row(i), imaginary_basis.row(j));
            b_form[(i, j)] = trace(&p) / crate::rat::rat(2);
        }
    }

    // Omega(x,y,z) = B(Im(xy), z); Im(xy) = (xy - yx)/2
    let half = crate::rat::ratio(1, 2);
    let mut three_form = vec![vec![vec![Rat::zero(); IM_DIM]; IM_DIM]; IM_DIM];
    for i in 0..IM_DIM {
        for j in 0..IM_DIM {
            let xy = multiply(imaginary_basis.row(i), imaginary_basis.row(j));
            let yx = multiply(imaginary_basis.row(j), imaginary_basis.row(i));
            let im: Vec<Rat> = xy.iter().zip(&yx).map(|(a, b)| (a - b) * &half).collect();
            let im_coords = imaginary_coords(&im);
            for k in 0..IM_DIM {
                let mut acc = Rat::zero();
                for (m, c) in im_coords.iter().enumerate() {
                    if !is_zero(c) {
                        acc += c * &b_form[(m, k)];
                    }
                }
                three_form[i][j][k] = acc;
            }
        }
    }

    OctonionAlgebra {
        table,
        imaginary_basis,
        b_form,
        three_form,
    }
}

/// Coordinates of a trace-zero octonion in the imaginary basis.
pub fn imaginary_coords(x: &[Rat]) -> Vec<Rat> {
    debug_assert!(is_zero(&trace(x)));
    let mut c = vec![Rat::zero(); IM_DIM];
    c[0] = x[0].clone();
    for i in 0..6 {
        c[1 + i] = x[1 + i].clone();
    }
    c
}

/// Embeds imaginary coordinates back into octonion coordinates.
pub fn imaginary_embed(c: &[Rat]) -> Vec<Rat> {
    let mut x = vec![Rat::zero(); OCT_DIM];
    x[0] = c[0].clone();
    x[7] = -c[0].clone();
    for i in 0..6 {
        x[1 + i] = c[1 + i].clone();
    }
    x
}

impl OctonionAlgebra {
    pub fn b_pair(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..IM_DIM {
            if is_zero(&u[i]) {
                continue;
            }
            for j in 0..IM_DIM {
                if !is_zero(&v[j]) && !is_zero(&self.b_form[(i, j)]) {
                    acc += &u[i] * &v[j] * &self.b_form[(i, j)];
                }
            }
        }
        acc
    }

    pub fn omega(&self, u: &[Rat], v: &[Rat], w: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..IM_DIM {
            if is_zero(&u[i]) {
                continue;
            }
            for j in 0..IM_DIM {
                if is_zero(&v[j]) {
                    continue;
                }
                for k in 0..IM_DIM {
                    if !is_zero(&w[k]) && !is_zero(&self.three_form[i][j][k]) {
                        acc += &u[i] * &v[j] * &w[k] * &self.three_form[i][j][k];
                    }
                }
            }
        }
        acc
    }

    /// Product of two imaginary vectors as `(scalar part, imaginary part)`.
    pub fn imaginary_product(&self, u: &[Rat], v: &[Rat]) -> (Rat, Vec<Rat>) {
        let x = imaginary_embed(u);
        let y = imaginary_embed(v);
        let p = multiply(&x, &y);
        let scalar = trace(&p) / crate::rat::rat(2);
        let mut im = p;
        im[0] -= &scalar;
        im[7] -= &scalar;
        (scalar, imaginary_coords(&im))
    }

    /// Annihilator A(c) = { x in V : xc = 0 } of an imaginary vector, rows in
    /// imaginary coordinates.
    pub fn annihilator(&self, c: &[Rat]) -> RatMat {
        let ce = imaginary_embed(c);
        // kernel of the map x -> x*c restricted to V
        let mut cols = Vec::new();
        for i in 0..IM_DIM {
            let p = multiply(self.imaginary_basis.row(i), &ce);
            cols.push(p);
        }
        // stack as columns: rows are octonion slots, columns imaginary coords
        let m = RatMat::from_fn(OCT_DIM, IM_DIM, |slot, i| cols[i][slot].clone());
        m.kernel()
    }
}

/// The volume-form coefficient of `i_{u_a} Omega ^ i_{u_b} Omega ^ Omega`
/// against `u_0 ^ ... ^ u_6`, by brute antisymmetrization over S_7.
pub fn wedge_vol_coefficient(oct: &OctonionAlgebra, a: usize, b: usize) -> Rat {
    let mut perm: Vec<usize> = (0..7).collect();
    let mut total = Rat::zero();
    permute_accumulate(oct, a, b, &mut perm, 0, &mut total);
    total / crate::rat::rat(2 * 2 * 6)
}

fn permute_accumulate(
    oct: &OctonionAlgebra,
    a: usize,
    b: usize,
    perm: &mut Vec<usize>,
    k: usize,
    total: &mut Rat,
) {
    if k == perm.len() {
        let f = &oct.three_form[a][perm[0]][perm[1]];
        if is_zero(f) {
            return;
        }
        let g = &oct.three_form[b][perm[2]][perm[3]];
        if is_zero(g) {
            return;
        }
        let h = &oct.three_form[perm[4]][perm[5]][perm[6]];
        if is_zero(h) {
            return;
        }
        let sign = permutation_sign(perm);
        *total += f * g * h * crate::rat::rat(sign);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute_accumulate(oct, a, b, perm, k + 1, total);
        perm.swap(k, i);
    }
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Matrices on imaginary coordinates of all derivations of the octonion
/// product: the kernel of `D(xy) - D(x)y - x D(y) = 0`.
pub fn derivation_matrices(oct: &OctonionAlgebra) -> Vec<RatMat> {
    let n = OCT_DIM;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let prod = &oct.table[i][j];
            for slot in 0..n {
                let mut row = vec![Rat::zero(); n * n];
                // D(e_i e_j) slot: sum_m D_{slot,m} prod_m
                for (m, pm) in prod.iter().enumerate() {
                    if !is_zero(pm) {
                        row[slot * n + m] += pm.clone();
                    }
                }
                // -(D e_i) e_j
                for m in 0..n {
                    let c = &oct.table[m][j][slot];
                    if !is_zero(c) {
                        row[m * n + i] -= c.clone();
                    }
                }
                // -e_i (D e_j)
                for m in 0..n {
                    let c = &oct.table[i][m][slot];
                    if !is_zero(c) {
                        row[m * n + j] -= c.clone();
                    }
                }
                if row.iter().any(|c| !is_zero(c)) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = RatMat::from_rows(rows).kernel();
    let mut mats = Vec::new();
    for r in 0..kernel.rows {
        let d8 = RatMat::from_fn(n, n, |i, j| kernel[(r, i * n + j)].clone());
        // restrict to V: derivations kill the unit and preserve V
        let mut d7 = RatMat::zeros(IM_DIM, IM_DIM);
        for j in 0..IM_DIM {
            let img = d8.mul_vec(&imaginary_embed(&unit_im(j)));
            debug_assert!(is_zero(&trace(&img)));
            let coords = imaginary_coords(&img);
            for i in 0..IM_DIM {
                d7[(i, j)] = coords[i].clone();
            }
        }
        mats.push(d7);
    }
    mats
}

fn unit_im(j: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); IM_DIM];
    v[j] = Rat::one();
    v
}

/// The derivation algebra as a graded subspace of sl(7) with the trivial
/// grading (all derivations are traceless).
pub fn derivations_subspace(
    oct: &OctonionAlgebra,
) -> Result<(Arc<GradedAlgebra>, GradedSubspace), AlgebraError> {
    let sl7 = GradedAlgebra::sl_flag(&[7])?;
    let real = sl7.realization.as_ref().unwrap();
    let mats = derivation_matrices(oct);
    let mut vectors = Vec::new();
    for m in &mats {
        vectors.push(real.coeffs_of(m)?);
    }
    let sub = GradedSubspace::span(&sl7, &vectors)?;
    Ok((sl7, sub))
}

/// Signature (positive, negative) of an exact symmetric matrix, by recursive
/// congruence diagonalization.
pub fn exact_signature(m: &RatMat) -> (usize, usize) {
    let n = m.rows;
    let mut a = m.clone();
    let mut pos = 0;
    let mut neg = 0;
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let diag = active.iter().position(|&i| !is_zero(&a[(i, i)]));
        let p = match diag {
            Some(k) => active[k],
            None => {
                let mut found = None;
                'outer: for (ki, &i) in active.iter().enumerate() {
                    for &j in active.iter().skip(ki + 1) {
                        if !is_zero(&a[(i, j)]) {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let Some((i, j)) = found else {
                    break; // zero form on the rest
                };
                for k in 0..n {
                    let v = &a[(i, k)] + &a[(j, k)];
                    a[(i, k)] = v;
                }
                for k in 0..n {
                    let v = &a[(k, i)] + &a[(k, j)];
                    a[(k, i)] = v;
                }
                i
            }
        };
        let pivot = a[(p, p)].clone();
        if pivot > Rat::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        let others: Vec<usize> = active.iter().copied().filter(|&i| i != p).collect();
        for &i in &others {
            if !is_zero(&a[(i, p)]) {
                let f = &a[(i, p)] / &pivot;
                for k in 0..n {
                    let v = &a[(i, k)] - &f * &a[(p, k)];
                    a[(i, k)] = v;
                }
                for k in 0..n {
                    let v = &a[(k, i)] - &f * &a[(k, p)];
                    a[(k, i)] = v;
                }
            }
        }
        active.retain(|&i| i != p);
    }
    (pos, neg)
}
