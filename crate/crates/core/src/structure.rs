//! Symmetry algebras of flat curves and sl(2)-triples.
//!
//! Fix a graded algebra g and a nonzero x of degree -1. The symmetry algebra
//! of the flat curve generated by x is the graded subalgebra
//!
//! ```text
//! sg_{-1} = <x>,   sg_i = { u in g_i : [x, u] in sg_{i-1} }  (i >= 0)
//! ```
//!
//! computed here degree by degree with exact kernels. In parametrized mode
//! the degree-0 condition tightens to [x, u] = 0. The triple completion
//! follows the convention `[h,x] = -2x`, `[h,y] = 2y`, `[y,x] = h` with
//! deg y = +1, so h lands in [x, g_1].

use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::error::AlgebraError;
use crate::linalg::{reduce_against, RatMat};
use crate::rat::{is_zero, rat, Rat};
use crate::subspace::GradedSubspace;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryMode {
    Unparametrized,
    Parametrized,
}

/// An sl(2)-triple (x, h, y) of degrees (-1, 0, 1).
#[derive(Debug, Clone)]
pub struct Sl2Triple {
    pub x: AlgebraElement,
    pub h: AlgebraElement,
    pub y: AlgebraElement,
}

/// The graded symmetry algebra of the flat curve of type x.
#[derive(Debug, Clone)]
pub struct SymmetryAlgebra {
    pub subspace: GradedSubspace,
    pub mode: SymmetryMode,
    /// true when the Killing form of g restricts non-degenerately to sg
    pub reductive_flag: bool,
    pub x: Vec<Rat>,
}

fn require_degree_minus_one(
    algebra: &Arc<GradedAlgebra>,
    x: &[Rat],
) -> Result<(), AlgebraError> {
    if x.iter().all(is_zero) {
        return Err(AlgebraError::ZeroElement);
    }
    if algebra.homogeneous_degree(x) != Some(-1) {
        return Err(AlgebraError::NotHomogeneous { expected: -1 });
    }
    Ok(())
}

/// Completes a nonzero degree -1 element x to an sl(2)-triple, solving the
/// graded linear systems for h = [y0, x] and then for y. Among all solutions
/// the echelon-canonical one (free coordinates zero in the fixed basis
/// order) is returned.
pub fn complete_sl2(
    algebra: &Arc<GradedAlgebra>,
    x: &AlgebraElement,
) -> Result<Sl2Triple, AlgebraError> {
    require_degree_minus_one(algebra, &x.coeffs)?;
    let dim = algebra.dim();
    let idx1: Vec<usize> = algebra.indices_of_degree(1).to_vec();

    // columns [[b_j, x], x] over the degree-1 basis; solve = -2x
    let bracket_with_x = |v: &[Rat]| algebra.bracket_coeffs(v, &x.coeffs);
    let mut cols_h: Vec<Vec<Rat>> = Vec::new();
    for &j in &idx1 {
        let mut b = vec![Rat::zero(); dim];
        b[j] = Rat::one();
        cols_h.push(bracket_with_x(&bracket_with_x(&b)));
    }
    let m_h = RatMat::from_fn(dim, idx1.len(), |r, c| cols_h[c][r].clone());
    let target: Vec<Rat> = x.coeffs.iter().map(|c| c * rat(-2)).collect();
    let u = m_h
        .solve(&target)
        .ok_or(AlgebraError::NoSl2Solution { stage: "h" })?;
    let mut u_full = vec![Rat::zero(); dim];
    for (c, &j) in idx1.iter().enumerate() {
        u_full[j] = u[c].clone();
    }
    let h = bracket_with_x(&u_full);

    // y in g_1 with [y, x] = h and [h, y] = 2y
    let mut rows_combined: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    let cols_yx: Vec<Vec<Rat>> = idx1
        .iter()
        .map(|&j| {
            let mut b = vec![Rat::zero(); dim];
            b[j] = Rat::one();
            bracket_with_x(&b)
        })
        .collect();
    let cols_hy: Vec<Vec<Rat>> = idx1
        .iter()
        .map(|&j| {
            let mut b = vec![Rat::zero(); dim];
            b[j] = Rat::one();
            let mut v = algebra.bracket_coeffs(&h, &b);
            v[j] -= rat(2);
            v
        })
        .collect();
    for r in 0..dim {
        rows_combined.push(idx1.iter().enumerate().map(|(c, _)| cols_yx[c][r].clone()).collect());
        rhs.push(h[r].clone());
    }
    for r in 0..dim {
        rows_combined.push(idx1.iter().enumerate().map(|(c, _)| cols_hy[c][r].clone()).collect());
        rhs.push(Rat::zero());
    }
    let m_y = RatMat::from_rows(rows_combined);
    let y = m_y
        .solve(&rhs)
        .ok_or(AlgebraError::NoSl2Solution { stage: "y" })?;
    let mut y_full = vec![Rat::zero(); dim];
    for (c, &j) in idx1.iter().enumerate() {
        y_full[j] = y[c].clone();
    }

    // postcondition: exact triple relations
    let hx = algebra.bracket_coeffs(&h, &x.coeffs);
    let hy = algebra.bracket_coeffs(&h, &y_full);
    let yx = algebra.bracket_coeffs(&y_full, &x.coeffs);
    for i in 0..dim {
        if hx[i] != &x.coeffs[i] * rat(-2) || hy[i] != &y_full[i] * rat(2) || yx[i] != h[i] {
            return Err(AlgebraError::NoSl2Solution { stage: "verify" });
        }
    }

    Ok(Sl2Triple {
        x: x.clone(),
        h: algebra.element(h)?,
        y: algebra.element(y_full)?,
    })
}

/// Kernel of `u -> [x, u] mod target` restricted to the degree-d piece,
/// where `target` is an RREF basis (rows) of the allowed image.
fn preimage_in_degree(
    algebra: &Arc<GradedAlgebra>,
    x: &[Rat],
    d: i64,
    target: &RatMat,
) -> Vec<Vec<Rat>> {
    let idx: Vec<usize> = algebra.indices_of_degree(d).to_vec();
    if idx.is_empty() {
        return Vec::new();
    }
    let dim = algebra.dim();
    let cols: Vec<Vec<Rat>> = idx
        .iter()
        .map(|&j| {
            let mut b = vec![Rat::zero(); dim];
            b[j] = Rat::one();
            let img = algebra.bracket_coeffs(x, &b);
            reduce_against(target, &img)
        })
        .collect();
    let m = RatMat::from_fn(dim, idx.len(), |r, c| cols[c][r].clone());
    let kernel = m.kernel();
    (0..kernel.rows)
        .map(|r| {
            let mut v = vec![Rat::zero(); dim];
            for (c, &j) in idx.iter().enumerate() {
                v[j] = kernel[(r, c)].clone();
            }
            v
        })
        .collect()
}

/// The symmetry algebra of the flat curve of type x, computed degree by
/// degree as exact ad(x)-preimages.
pub fn symmetry_algebra(
    algebra: &Arc<GradedAlgebra>,
    x: &AlgebraElement,
    mode: SymmetryMode,
) -> Result<SymmetryAlgebra, AlgebraError> {
    require_degree_minus_one(algebra, &x.coeffs)?;
    let mut vectors: Vec<Vec<Rat>> = vec![x.coeffs.clone()];
    // RREF basis of the previous graded piece sg_{i-1}
    let mut prev = RatMat::from_rows(vec![x.coeffs.clone()]).rref().0;
    let zero_target = RatMat::zeros(0, algebra.dim());
    let max_d = algebra.max_degree();
    for d in 0..=max_d {
        let target = if d == 0 && mode == SymmetryMode::Parametrized {
            &zero_target
        } else {
            &prev
        };
        let level = preimage_in_degree(algebra, &x.coeffs, d, target);
        prev = if level.is_empty() {
            RatMat::zeros(0, algebra.dim())
        } else {
            RatMat::from_rows(level.clone()).rref().0
        };
        vectors.extend(level);
    }
    let subspace = GradedSubspace::span(algebra, &vectors)?;
    // restricted Killing form rank
    let basis = subspace.basis();
    let n = basis.len();
    let gram = RatMat::from_fn(n, n, |i, j| algebra.killing_pair(&basis[i], &basis[j]));
    let reductive_flag = gram.rank() == n;
    Ok(SymmetryAlgebra {
        subspace,
        mode,
        reductive_flag,
        x: x.coeffs.clone(),
    })
}

/// Symmetry algebra of a flat submanifold of type `xg` (a commutative
/// subspace of g_{-1}): sg_{-1} = xg, sg_i = { u : [u, xg] in sg_{i-1} }.
pub fn symmetry_algebra_multi(
    algebra: &Arc<GradedAlgebra>,
    xg: &GradedSubspace,
) -> Result<GradedSubspace, AlgebraError> {
    let gens = xg.basis_in_degree(-1);
    if gens.is_empty() || xg.dim() != gens.len() {
        return Err(AlgebraError::WrongDegree);
    }
    for (i, u) in gens.iter().enumerate() {
        for (j, v) in gens.iter().enumerate().skip(i + 1) {
            if !algebra.bracket_coeffs(u, v).iter().all(is_zero) {
                return Err(AlgebraError::NotAbelian { i, j });
            }
        }
    }
    let dim = algebra.dim();
    let mut vectors: Vec<Vec<Rat>> = gens.clone();
    let mut prev = RatMat::from_rows(gens.clone()).rref().0;
    for d in 0..=algebra.max_degree() {
        let idx: Vec<usize> = algebra.indices_of_degree(d).to_vec();
        if idx.is_empty() {
            prev = RatMat::zeros(0, dim);
            continue;
        }
        // stack the conditions for each generator of xg
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let cols: Vec<Vec<Vec<Rat>>> = gens
            .iter()
            .map(|g| {
                idx.iter()
                    .map(|&j| {
                        let mut b = vec![Rat::zero(); dim];
                        b[j] = Rat::one();
                        // [u, xg] convention: bracket basis vector with generator
                        let img = algebra.bracket_coeffs(&b, g);
                        reduce_against(&prev, &img)
                    })
                    .collect()
            })
            .collect();
        for gcols in &cols {
            for r in 0..dim {
                rows.push(gcols.iter().map(|col| col[r].clone()).collect());
            }
        }
        let kernel = RatMat::from_rows(rows).kernel();
        let mut level: Vec<Vec<Rat>> = Vec::new();
        for r in 0..kernel.rows {
            let mut v = vec![Rat::zero(); dim];
            for (c, &j) in idx.iter().enumerate() {
                v[j] = kernel[(r, c)].clone();
            }
            level.push(v);
        }
        prev = if level.is_empty() {
            RatMat::zeros(0, dim)
        } else {
            RatMat::from_rows(level.clone()).rref().0
        };
        vectors.extend(level);
    }
    GradedSubspace::span(algebra, &vectors)
}

/// The filtration subspace pg^(k) = sum of degrees >= k.
pub fn filtration(algebra: &Arc<GradedAlgebra>, k: i64) -> GradedSubspace {
    GradedSubspace::filtration(algebra, k)
}

/// hg^(k) = sg_0 + ... + sg_k + sum of degrees > k: the stabilizer algebra
/// of the (k+1)-jet of the flat curve.
pub fn h_filtration(sg: &SymmetryAlgebra, k: i64) -> GradedSubspace {
    let algebra = &sg.subspace.algebra;
    let mut vectors: Vec<Vec<Rat>> = Vec::new();
    for d in 0..=k.min(algebra.max_degree()) {
        vectors.extend(sg.subspace.basis_in_degree(d));
    }
    for d in algebra.degrees() {
        if d > k {
            for &i in algebra.indices_of_degree(d) {
                let mut v = vec![Rat::zero(); algebra.dim()];
                v[i] = Rat::one();
                vectors.push(v);
            }
        }
    }
    GradedSubspace::span(algebra, &vectors).expect("homogeneous by construction")
}

/// Non-negative part sg^(0) of the symmetry algebra.
pub fn nonnegative_part(sg: &SymmetryAlgebra) -> GradedSubspace {
    let algebra = &sg.subspace.algebra;
    let mut vectors = Vec::new();
    for d in sg.subspace.degrees() {
        if d >= 0 {
            vectors.extend(sg.subspace.basis_in_degree(d));
        }
    }
    GradedSubspace::span(algebra, &vectors).expect("homogeneous by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::{g2_case_setup, root_index, G2Case};

    fn principal_x(algebra: &Arc<GradedAlgebra>, n: usize) -> AlgebraElement {
        let mut coeffs = vec![Rat::zero(); algebra.dim()];
        for i in 0..n - 1 {
            let idx = algebra
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{},{}]", i + 1, i))
                .unwrap();
            coeffs[idx] = Rat::one();
        }
        algebra.element(coeffs).unwrap()
    }

    #[test]
    fn sl2_standard_triple() {
        let a = GradedAlgebra::sl_flag(&[1, 1]).unwrap();
        let x = principal_x(&a, 2);
        let t = complete_sl2(&a, &x).unwrap();
        let real = a.realization.as_ref().unwrap();
        let h_mat = real.matrix_of(&t.h.coeffs);
        assert_eq!(h_mat[(0, 0)], rat(1));
        assert_eq!(h_mat[(1, 1)], rat(-1));
    }

    #[test]
    fn sl_principal_h_is_standard_diagonal() {
        for k in 2..=4usize {
            let blocks = vec![1usize; k + 1];
            let a = GradedAlgebra::sl_flag(&blocks).unwrap();
            let x = principal_x(&a, k + 1);
            let t = complete_sl2(&a, &x).unwrap();
            let real = a.realization.as_ref().unwrap();
            let h_mat = real.matrix_of(&t.h.coeffs);
            for i in 0..=k {
                assert_eq!(h_mat[(i, i)], rat(k as i64 - 2 * i as i64), "k={k}, i={i}");
            }
        }
    }

    #[test]
    fn g2_borel_triple_h_on_the_coweight_line() {
        let (a, xc) = g2_case_setup(G2Case::BNondegenerate);
        let x = a.element(xc).unwrap();
        let t = complete_sl2(&a, &x).unwrap();
        // h = 2(H1 + H2): the unique Cartan element with a1(h) = a2(h) = 2
        let mut expected = vec![Rat::zero(); 14];
        expected[0] = rat(2);
        expected[1] = rat(2);
        assert_eq!(t.h.coeffs, expected);
        // y proportional to a combination of X[a1] and X[a2] only
        for (i, c) in t.y.coeffs.iter().enumerate() {
            if i != root_index(1, 0) && i != root_index(0, 1) {
                assert!(is_zero(c), "y has unexpected component {i}");
            }
        }
    }

    #[test]
    fn complete_sl2_rejects_zero_and_wrong_degree() {
        let a = GradedAlgebra::sl_flag(&[1, 1, 1]).unwrap();
        assert!(matches!(
            complete_sl2(&a, &a.zero()),
            Err(AlgebraError::ZeroElement)
        ));
        let y_idx = a.basis_labels.iter().position(|l| l == "E[0,1]").unwrap();
        assert!(matches!(
            complete_sl2(&a, &a.basis_element(y_idx)),
            Err(AlgebraError::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn sl_principal_symmetry_is_three_dimensional() {
        for k in 2..=6usize {
            let blocks = vec![1usize; k + 1];
            let a = GradedAlgebra::sl_flag(&blocks).unwrap();
            let x = principal_x(&a, k + 1);
            let sg = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();
            assert_eq!(sg.subspace.dim(), 3, "k={k}");
            assert!(sg.reductive_flag, "k={k}");
            assert!(sg.subspace.is_subalgebra(), "k={k}");
        }
    }

    /// F_{2,4}(R^5): x maps e0->e2, e1->e3, e3->e4 in block grading (2,2,1).
    pub fn f24_x(a: &Arc<GradedAlgebra>) -> AlgebraElement {
        let mut coeffs = vec![Rat::zero(); a.dim()];
        for (i, j) in [(2usize, 0usize), (3, 1), (4, 3)] {
            let idx = a
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{i},{j}]"))
                .unwrap();
            coeffs[idx] = Rat::one();
        }
        a.element(coeffs).unwrap()
    }

    #[test]
    fn f24_symmetry_graded_dims() {
        // Direct recursion on the explicit matrices: the parameters are
        // a (deg -1), b, d, e0 (deg 0), c, e1 (deg +1); six in total.
        let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
        let x = f24_x(&a);
        let sg = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();
        assert_eq!(sg.subspace.dim(), 6);
        assert_eq!(
            sg.subspace.graded_dims(),
            vec![(-1, 1), (0, 3), (1, 2)]
        );
        assert!(!sg.reductive_flag);
        assert!(sg.subspace.is_subalgebra());
    }

    #[test]
    fn g2_case_symmetry_dimensions() {
        let (a, xc) = g2_case_setup(G2Case::BNondegenerate);
        let sg = symmetry_algebra(&a, &a.element(xc).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        assert_eq!(sg.subspace.dim(), 3);
        assert!(sg.reductive_flag);

        let (a2, xc2) = g2_case_setup(G2Case::P2Orbit2);
        let sg2 = symmetry_algebra(&a2, &a2.element(xc2).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        assert_eq!(sg2.subspace.dim(), 5);
        assert_eq!(sg2.subspace.graded_dims(), vec![(-1, 1), (0, 2), (1, 2)]);
        assert!(!sg2.reductive_flag);
        let labels = sg2.subspace.basis_labels();
        for needed in ["H1", "H2", "X[a1+a2]", "X[a1+3a2]", "X[-a1-a2]"] {
            assert!(labels.iter().any(|l| l == needed), "missing {needed}");
        }

        for case in [G2Case::P2Orbit3, G2Case::P2Orbit4] {
            let (a3, xc3) = g2_case_setup(case);
            let sg3 =
                symmetry_algebra(&a3, &a3.element(xc3).unwrap(), SymmetryMode::Unparametrized)
                    .unwrap();
            assert_eq!(sg3.subspace.dim(), 3, "{case:?}");
            assert!(sg3.subspace.is_subalgebra());
        }
    }

    #[test]
    fn unparametrized_symmetry_contains_the_triple() {
        // sl principal and the G2 Borel case: (x, h, y) all lie in sg
        let a = GradedAlgebra::sl_flag(&[1, 1, 1, 1]).unwrap();
        let x = principal_x(&a, 4);
        let sg = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();
        let t = complete_sl2(&a, &x).unwrap();
        for e in [&t.x, &t.h, &t.y] {
            assert!(sg.subspace.contains(&e.coeffs));
        }
        let (g, xc) = g2_case_setup(G2Case::BNondegenerate);
        let xe = g.element(xc).unwrap();
        let sg = symmetry_algebra(&g, &xe, SymmetryMode::Unparametrized).unwrap();
        let t = complete_sl2(&g, &xe).unwrap();
        for e in [&t.x, &t.h, &t.y] {
            assert!(sg.subspace.contains(&e.coeffs));
        }
    }

    #[test]
    fn parametrized_mode_is_a_subspace_with_codim_at_most_one_in_degree_zero() {
        let cases: Vec<(Arc<GradedAlgebra>, AlgebraElement)> = vec![
            {
                let a = GradedAlgebra::sl_flag(&[1, 1, 1, 1]).unwrap();
                let x = principal_x(&a, 4);
                (a, x)
            },
            {
                let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
                let x = f24_x(&a);
                (a, x)
            },
        ];
        for (a, x) in cases {
            let unp = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();
            let par = symmetry_algebra(&a, &x, SymmetryMode::Parametrized).unwrap();
            assert!(par.subspace.subset_of(&unp.subspace));
            let d0_unp = unp.subspace.dim_in_degree(0);
            let d0_par = par.subspace.dim_in_degree(0);
            assert!(d0_unp - d0_par <= 1);
        }
    }

    #[test]
    fn filtrations_and_jet_stabilizers() {
        let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
        let x = f24_x(&a);
        let sg = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();

        let pg0 = filtration(&a, 0);
        assert_eq!(pg0.dim(), 16);
        assert_eq!(filtration(&a, 3).dim(), 0);

        // hg^(k) is a subalgebra containing pg^(k+1), and stabilizes to sg^(0)
        let sg0 = nonnegative_part(&sg);
        for k in 0..=3i64 {
            let hg = h_filtration(&sg, k);
            assert!(hg.is_subalgebra(), "hg^({k}) not closed");
            assert!(filtration(&a, k + 1).subset_of(&hg));
            if k >= a.max_degree() {
                assert!(hg.same_space(&sg0));
            }
        }
    }

    #[test]
    fn sl_principal_jet_stabilizer_is_h_y_plane() {
        let a = GradedAlgebra::sl_flag(&[1, 1, 1, 1]).unwrap();
        let x = principal_x(&a, 4);
        let sg = symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap();
        let hg = h_filtration(&sg, 10);
        assert_eq!(hg.dim(), 2);
        assert_eq!(hg.graded_dims(), vec![(0, 1), (1, 1)]);
    }
}
