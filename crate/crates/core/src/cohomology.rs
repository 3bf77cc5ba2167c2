//! First Lie algebra cohomology of the abelian algebra xg with values in
//! g/sg, positive-degree part.
//!
//! For a commutative subspace xg of g_{-1} with symmetry algebra sg, the
//! cochain spaces C^0 = g/sg, C^1 = Hom(xg, g/sg), C^2 = Hom(L^2 xg, g/sg)
//! carry the grading inherited from g (arguments sit in degree -1), and
//! H^1_+ = Z^1_+ / B^1_+ measures the freedom of normalization conditions:
//! its vanishing means every submanifold of type xg is locally flat.

use crate::algebra::GradedAlgebra;
use crate::error::AlgebraError;
use crate::linalg::RatMat;
use crate::rat::{is_zero, Rat};
use crate::structure::symmetry_algebra_multi;
use crate::subspace::GradedSubspace;
use num_traits::Zero;
use std::sync::Arc;

/// A basis cochain is stored as one value vector per xg generator.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub values: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone)]
pub struct H1Plus {
    pub dimension: usize,
    pub representatives: Vec<Cochain>,
    pub z_dim: usize,
    pub b_dim: usize,
}

/// Computes H^1_+(xg, g/sg). `sg` must be the symmetry algebra of `xg`
/// (see [`symmetry_algebra_multi`]); pass `None` to compute it here.
pub fn h1_plus(
    algebra: &Arc<GradedAlgebra>,
    xg: &GradedSubspace,
    sg: Option<&GradedSubspace>,
) -> Result<H1Plus, AlgebraError> {
    let computed;
    let sg = match sg {
        Some(s) => s,
        None => {
            computed = symmetry_algebra_multi(algebra, xg)?;
            &computed
        }
    };
    let gens = xg.basis_in_degree(-1);
    if gens.is_empty() || gens.len() != xg.dim() {
        return Err(AlgebraError::WrongDegree);
    }
    let r = gens.len();
    let dim = algebra.dim();

    // quotient model: Q = deterministic complement of sg in g, with the
    // projection g -> Q along sg
    let full = {
        let mut all = GradedSubspace::empty(algebra);
        for d in algebra.degrees() {
            all = all.sum(&GradedSubspace::graded_piece(algebra, d));
        }
        all
    };
    let q = sg.complement_in(&full);
    let q_basis = q.basis();
    let project = |v: &[Rat]| -> Vec<Rat> {
        // coordinates of v in (sg ++ Q), keep the Q part
        let mut rows = sg.basis();
        let sg_dim = rows.len();
        rows.extend(q_basis.clone());
        let m = RatMat::from_rows(rows).transpose();
        let coords = m.solve(v).expect("sg + Q spans g");
        coords[sg_dim..].to_vec()
    };

    // C^1 coordinates: pairs (generator i, Q-basis index of degree >= 0)
    let q_degrees: Vec<i64> = q_basis
        .iter()
        .map(|v| algebra.homogeneous_degree(v).expect("Q basis homogeneous"))
        .collect();
    let c1_slots: Vec<usize> = (0..q_basis.len()).filter(|&m| q_degrees[m] >= 0).collect();
    let c1_dim = r * c1_slots.len();

    // d1(phi)(x_i, x_j) = pi([x_i, phi(x_j)] - [x_j, phi(x_i)])
    // rows: for each pair i<j and each Q coordinate
    let mut d1_cols: Vec<Vec<Rat>> = Vec::with_capacity(c1_dim);
    for i in 0..r {
        for &slot in &c1_slots {
            // phi = q_slot on generator i, zero elsewhere
            let mut col = Vec::new();
            for a in 0..r {
                for b in a + 1..r {
                    let mut val = vec![Rat::zero(); q_basis.len()];
                    if a == i {
                        let br = algebra.bracket_coeffs(&gens[b], &q_basis[slot]);
                        let p = project(&br);
                        for (m, c) in p.iter().enumerate() {
                            val[m] -= c;
                        }
                    }
                    if b == i {
                        let br = algebra.bracket_coeffs(&gens[a], &q_basis[slot]);
                        let p = project(&br);
                        for (m, c) in p.iter().enumerate() {
                            val[m] += c;
                        }
                    }
                    col.extend(val);
                }
            }
            d1_cols.push(col);
        }
    }
    let c2_rows = if r >= 2 {
        (r * (r - 1) / 2) * q_basis.len()
    } else {
        0
    };
    let z1 = if c2_rows == 0 {
        RatMat::identity(c1_dim)
    } else {
        RatMat::from_fn(c2_rows, c1_dim, |rr, cc| d1_cols[cc][rr].clone()).kernel()
    };

    // B^1_+: images of d0 on positive-degree Q elements:
    // d0(q)(x_i) = pi([x_i, q])
    let mut b1_rows: Vec<Vec<Rat>> = Vec::new();
    for (m, qv) in q_basis.iter().enumerate() {
        if q_degrees[m] < 1 {
            continue;
        }
        let mut row = vec![Rat::zero(); c1_dim];
        for i in 0..r {
            let p = project(&algebra.bracket_coeffs(&gens[i], qv));
            for (pos, &slot) in c1_slots.iter().enumerate() {
                row[i * c1_slots.len() + pos] = p[slot].clone();
            }
            // projections outside non-negative slots would be degree -1 + j
            // with j >= 1, so they stay in the recorded slots
            for (s, c) in p.iter().enumerate() {
                if !c1_slots.contains(&s) {
                    debug_assert!(is_zero(c), "coboundary left the positive part");
                }
            }
        }
        b1_rows.push(row);
    }
    let b1 = if b1_rows.is_empty() {
        RatMat::zeros(0, c1_dim)
    } else {
        RatMat::from_rows(b1_rows).rref().0
    };
    let b_dim = b1.rows;

    // representatives: extend B^1 inside Z^1 deterministically
    let z_rref = z1.rref().0;
    let z_dim = z_rref.rows;
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    {
        let mut work: Vec<Vec<Rat>> = (0..b1.rows).map(|i| b1.row_vec(i)).collect();
        let rank_of = |rows: &[Vec<Rat>]| {
            if rows.is_empty() {
                0
            } else {
                RatMat::from_rows(rows.to_vec()).rank()
            }
        };
        let mut rank = rank_of(&work);
        for rr in 0..z_rref.rows {
            let cand = z_rref.row_vec(rr);
            work.push(cand.clone());
            let nr = rank_of(&work);
            if nr > rank {
                rank = nr;
                chosen.push(cand);
            } else {
                work.pop();
            }
        }
    }
    let representatives = chosen
        .iter()
        .map(|row| {
            let mut values = vec![vec![Rat::zero(); dim]; r];
            for i in 0..r {
                for (pos, &slot) in c1_slots.iter().enumerate() {
                    let c = &row[i * c1_slots.len() + pos];
                    if !is_zero(c) {
                        for (coord, qc) in q_basis[slot].iter().enumerate() {
                            values[i][coord] += c * qc;
                        }
                    }
                }
            }
            Cochain { values }
        })
        .collect();

    Ok(H1Plus {
        dimension: z_dim - b_dim,
        representatives,
        z_dim,
        b_dim,
    })
}

/// Single-generator convenience wrapper.
pub fn h1_plus_of_x(
    algebra: &Arc<GradedAlgebra>,
    x: &[Rat],
) -> Result<H1Plus, AlgebraError> {
    let xg = GradedSubspace::span(algebra, &[x.to_vec()])?;
    h1_plus(algebra, &xg, None)
}

/// Checks d1 . d0 = 0 for the complex of `xg`; used as a structural test.
pub fn verify_complex(
    algebra: &Arc<GradedAlgebra>,
    xg: &GradedSubspace,
) -> Result<bool, AlgebraError> {
    let sg = symmetry_algebra_multi(algebra, xg)?;
    let gens = xg.basis_in_degree(-1);
    let r = gens.len();
    if r < 2 {
        return Ok(true); // C^2 = 0
    }
    let full = {
        let mut all = GradedSubspace::empty(algebra);
        for d in algebra.degrees() {
            all = all.sum(&GradedSubspace::graded_piece(algebra, d));
        }
        all
    };
    let q = sg.complement_in(&full);
    let q_basis = q.basis();
    let project = |v: &[Rat]| -> Vec<Rat> {
        let mut rows = sg.basis();
        let sg_dim = rows.len();
        rows.extend(q_basis.clone());
        let m = RatMat::from_rows(rows).transpose();
        let coords = m.solve(v).expect("sg + Q spans g");
        coords[sg_dim..].to_vec()
    };
    // d1(d0(q))(x_a, x_b) = pi([x_a, lift pi([x_b, q])] - [x_b, lift pi([x_a, q])])
    for qv in &q_basis {
        for a in 0..r {
            for b in a + 1..r {
                let pa = project(&algebra.bracket_coeffs(&gens[a], qv));
                let pb = project(&algebra.bracket_coeffs(&gens[b], qv));
                let lift = |p: &[Rat]| -> Vec<Rat> {
                    let mut v = vec![Rat::zero(); algebra.dim()];
                    for (m, c) in p.iter().enumerate() {
                        if !is_zero(c) {
                            for (coord, qc) in q_basis[m].iter().enumerate() {
                                v[coord] += c * qc;
                            }
                        }
                    }
                    v
                };
                let t1 = project(&algebra.bracket_coeffs(&gens[a], &lift(&pb)));
                let t2 = project(&algebra.bracket_coeffs(&gens[b], &lift(&pa)));
                let diff: Vec<Rat> = t1.iter().zip(&t2).map(|(x, y)| x - y).collect();
                if diff.iter().any(|c| !is_zero(c)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::g2::{g2_case_setup, G2Case};
    use crate::normalization::{generic_complement, reductive_invariant_complement};
    use crate::structure::{symmetry_algebra, SymmetryMode};

    fn principal_x(a: &Arc<GradedAlgebra>, n: usize) -> Vec<Rat> {
        let mut coeffs = vec![Rat::zero(); a.dim()];
        for i in 0..n - 1 {
            let idx = a
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{},{}]", i + 1, i))
                .unwrap();
            coeffs[idx] = Rat::one();
        }
        coeffs
    }

    #[test]
    fn one_dimensional_x_gives_dim_w() {
        for k in 2..=5usize {
            let a = GradedAlgebra::sl_flag(&vec![1usize; k + 1]).unwrap();
            let x = principal_x(&a, k + 1);
            let h1 = h1_plus_of_x(&a, &x).unwrap();
            assert_eq!(h1.dimension, k - 1, "k={k}");
            // cross-check against the normalization space
            let sg = symmetry_algebra(
                &a,
                &a.element(x.clone()).unwrap(),
                SymmetryMode::Unparametrized,
            )
            .unwrap();
            let ws = reductive_invariant_complement(&sg).unwrap();
            assert_eq!(h1.dimension, ws.w.dim(), "k={k}");
        }
    }

    #[test]
    fn g2_b_has_one_dimensional_h1() {
        let (a, xc) = g2_case_setup(G2Case::BNondegenerate);
        let h1 = h1_plus_of_x(&a, &xc).unwrap();
        assert_eq!(h1.dimension, 1);
    }

    #[test]
    fn f24_h1_matches_generic_complement_dimension() {
        let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
        let mut x = vec![Rat::zero(); a.dim()];
        for (i, j) in [(2usize, 0usize), (3, 1), (4, 3)] {
            let idx = a
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{i},{j}]"))
                .unwrap();
            x[idx] = Rat::one();
        }
        let h1 = h1_plus_of_x(&a, &x).unwrap();
        let sg = symmetry_algebra(
            &a,
            &a.element(x.clone()).unwrap(),
            SymmetryMode::Unparametrized,
        )
        .unwrap();
        let generic = generic_complement(&sg);
        assert_eq!(h1.dimension, generic.w.dim());
    }

    #[test]
    fn abelian_radical_of_one_graded_algebra_is_rigid() {
        // |1|-graded sl(4) with blocks (2,2): xg = g_{-1} is abelian and
        // sg = g, so H^1_+ = 0
        let a = GradedAlgebra::sl_flag(&[2, 2]).unwrap();
        let mut vectors = Vec::new();
        for &i in a.indices_of_degree(-1) {
            let mut v = vec![Rat::zero(); a.dim()];
            v[i] = Rat::one();
            vectors.push(v);
        }
        let xg = GradedSubspace::span(&a, &vectors).unwrap();
        let sg = symmetry_algebra_multi(&a, &xg).unwrap();
        assert_eq!(sg.dim(), a.dim());
        let h1 = h1_plus(&a, &xg, Some(&sg)).unwrap();
        assert_eq!(h1.dimension, 0);
        assert!(verify_complex(&a, &xg).unwrap());
    }

    #[test]
    fn two_dimensional_abelian_xg_complex_closes() {
        // xg = span(E[2,0], E[3,1]) inside the F_{2,4} grading: abelian,
        // multi-generator complex must satisfy d1 d0 = 0
        let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
        let mut v1 = vec![Rat::zero(); a.dim()];
        let mut v2 = vec![Rat::zero(); a.dim()];
        let idx = |l: &str| a.basis_labels.iter().position(|s| s == l).unwrap();
        v1[idx("E[2,0]")] = Rat::one();
        v2[idx("E[3,1]")] = Rat::one();
        let xg = GradedSubspace::span(&a, &[v1, v2]).unwrap();
        assert!(verify_complex(&a, &xg).unwrap());
        let h1 = h1_plus(&a, &xg, None).unwrap();
        // dimension data must be internally consistent
        assert_eq!(h1.dimension, h1.z_dim - h1.b_dim);
        assert_eq!(h1.representatives.len(), h1.dimension);
    }

    #[test]
    fn rejects_non_abelian_xg() {
        let a = GradedAlgebra::sl_flag(&[1, 1, 1]).unwrap();
        // two lowering generators in a Borel grading do not commute once we
        // include their sum's components: craft a genuinely non-abelian pair
        // in degree -1 of sl(3): E[1,0] and E[2,1] have [E21,[..]] .. their
        // bracket is E[2,0] of degree -2, nonzero
        let idx = |l: &str| a.basis_labels.iter().position(|s| s == l).unwrap();
        let mut v1 = vec![Rat::zero(); a.dim()];
        v1[idx("E[1,0]")] = Rat::one();
        let mut v2 = vec![Rat::zero(); a.dim()];
        v2[idx("E[2,1]")] = Rat::one();
        let xg = GradedSubspace::span(&a, &[v1, v2]).unwrap();
        assert!(matches!(
            h1_plus(&a, &xg, None),
            Err(AlgebraError::NotAbelian { .. })
        ));
    }
}
