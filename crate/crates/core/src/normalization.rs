//! Normalization spaces: graded complements W to sg^(0) + [x, pg] inside the
//! parabolic, used as gauge conditions by the frame reduction.
//!
//! Three constructions are provided. The generic one picks the deterministic
//! echelon complement degree by degree. When the Killing form restricts
//! non-degenerately to the symmetry algebra, the highest-weight-vector
//! construction `W = { u in sg-perp, deg >= 0 : [u, y] = 0 }` yields an
//! sg^(0)-invariant complement. The certificate search decides, in the
//! non-reductive case, whether any invariant complement exists at all, by
//! decomposing each degree into weight spaces of the maximal torus
//! `t = Cartan ∩ sg_0` and solving the invariance conditions on the affine
//! family of torus-stable complements whenever those conditions are linear.

use crate::algebra::GradedAlgebra;
use crate::error::AlgebraError;
use crate::linalg::RatMat;
use crate::rat::{is_zero, Rat};
use crate::structure::{complete_sl2, nonnegative_part, SymmetryAlgebra};
use crate::subspace::GradedSubspace;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Generic,
    KillingHighestWeight,
    TorusWeight,
    UserSupplied,
}

#[derive(Debug, Clone)]
pub struct NormalizationSpace {
    pub w: GradedSubspace,
    pub invariant_flag: bool,
    pub construction: Construction,
}

/// Witness data for the non-existence verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoneWitness {
    pub torus_dim: usize,
    pub parameters: usize,
    pub linear_conditions: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub enum ComplementCertificate {
    Exists(NormalizationSpace),
    None(NoneWitness),
    Unknown(String),
}

/// The space to be complemented in degree d: sg_d + [x, g_{d+1}].
pub fn normalized_target(sg: &SymmetryAlgebra, d: i64) -> GradedSubspace {
    let algebra = &sg.subspace.algebra;
    let mut vectors = sg.subspace.basis_in_degree(d);
    for &j in algebra.indices_of_degree(d + 1) {
        let mut b = vec![Rat::zero(); algebra.dim()];
        b[j] = Rat::one();
        let img = algebra.bracket_coeffs(&sg.x, &b);
        if !img.iter().all(is_zero) {
            vectors.push(img);
        }
    }
    GradedSubspace::span(algebra, &vectors).expect("homogeneous by construction")
}

fn check_complementarity(sg: &SymmetryAlgebra, w: &GradedSubspace) -> bool {
    let algebra = &sg.subspace.algebra;
    for d in algebra.degrees() {
        if d < 0 {
            continue;
        }
        let target = normalized_target(sg, d);
        let ambient = algebra.indices_of_degree(d).len();
        if w.dim_in_degree(d) + target.dim_in_degree(d) != ambient {
            return false;
        }
        if w.intersect(&target).dim_in_degree(d) != 0 {
            return false;
        }
    }
    true
}

/// Ad-stability of W under the non-negative part of sg, checked exactly.
pub fn is_invariant(w: &GradedSubspace, sg: &SymmetryAlgebra) -> bool {
    w.stable_under(&nonnegative_part(sg))
}

/// Deterministic echelon complement of sg_d + [x, g_{d+1}] in each degree.
pub fn generic_complement(sg: &SymmetryAlgebra) -> NormalizationSpace {
    let algebra = &sg.subspace.algebra;
    let mut w = GradedSubspace::empty(algebra);
    for d in algebra.degrees() {
        if d < 0 {
            continue;
        }
        let target = normalized_target(sg, d);
        let ambient = GradedSubspace::graded_piece(algebra, d);
        w = w.sum(&target.complement_in(&ambient));
    }
    debug_assert!(check_complementarity(sg, &w));
    let invariant_flag = is_invariant(&w, sg);
    NormalizationSpace {
        w,
        invariant_flag,
        construction: Construction::Generic,
    }
}

/// The invariant complement from the sl(2)-module structure:
/// `W = { u in sg-perp ∩ pg : [u, y] = 0 }`, spanned by highest weight
/// vectors. Requires the restricted Killing form to be non-degenerate.
pub fn reductive_invariant_complement(
    sg: &SymmetryAlgebra,
) -> Result<NormalizationSpace, AlgebraError> {
    let algebra = &sg.subspace.algebra;
    let basis = sg.subspace.basis();
    let n = basis.len();
    let gram = RatMat::from_fn(n, n, |i, j| algebra.killing_pair(&basis[i], &basis[j]));
    let radical = gram.kernel();
    if radical.rows > 0 {
        return Err(AlgebraError::DegenerateRestrictedKilling {
            radical_dim: radical.rows,
        });
    }
    let triple = complete_sl2(algebra, &algebra.element(sg.x.clone())?)?;
    let dim = algebra.dim();
    let mut w = GradedSubspace::empty(algebra);
    for d in algebra.degrees() {
        if d < 0 {
            continue;
        }
        let idx: Vec<usize> = algebra.indices_of_degree(d).to_vec();
        if idx.is_empty() {
            continue;
        }
        // rows: K(u, s) = 0 for each sg basis vector s, and [u, y] = 0
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for s in &basis {
            let row: Vec<Rat> = idx
                .iter()
                .map(|&j| {
                    let mut b = vec![Rat::zero(); dim];
                    b[j] = Rat::one();
                    algebra.killing_pair(&b, s)
                })
                .collect();
            if row.iter().any(|c| !is_zero(c)) {
                rows.push(row);
            }
        }
        let cols: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&j| {
                let mut b = vec![Rat::zero(); dim];
                b[j] = Rat::one();
                algebra.bracket_coeffs(&b, &triple.y.coeffs)
            })
            .collect();
        for r in 0..dim {
            let row: Vec<Rat> = (0..idx.len()).map(|c| cols[c][r].clone()).collect();
            if row.iter().any(|c| !is_zero(c)) {
                rows.push(row);
            }
        }
        let kernel = if rows.is_empty() {
            RatMat::identity(idx.len())
        } else {
            RatMat::from_rows(rows).kernel()
        };
        let mut vectors = Vec::new();
        for r in 0..kernel.rows {
            let mut v = vec![Rat::zero(); dim];
            for (c, &j) in idx.iter().enumerate() {
                v[j] = kernel[(r, c)].clone();
            }
            vectors.push(v);
        }
        if !vectors.is_empty() {
            w = w.sum(&GradedSubspace::span(algebra, &vectors)?);
        }
    }
    if !check_complementarity(sg, &w) {
        return Err(AlgebraError::Malformed(
            "highest-weight space is not complementary".into(),
        ));
    }
    if !is_invariant(&w, sg) {
        return Err(AlgebraError::Malformed(
            "highest-weight space is not invariant".into(),
        ));
    }
    Ok(NormalizationSpace {
        w,
        invariant_flag: true,
        construction: Construction::KillingHighestWeight,
    })
}

// --- certificate machinery --------------------------------------------------

/// one weight block of a graded piece: indices, N-part, C-part (complement)
struct Block {
    /// RREF rows spanning the block itself
    space: RatMat,
    /// rows of N ∩ block
    n_rows: Vec<Vec<Rat>>,
    /// rows of the deterministic complement C of N in the block
    c_rows: Vec<Vec<Rat>>,
    /// parameter offset into the global parameter vector (c*n parameters)
    param_offset: usize,
}

type BlockKey = (i64, Vec<Rat>);

/// Decomposition of `v` (inside one block) as (C-coordinates, N-coordinates).
fn block_decompose(block: &Block, v: &[Rat]) -> Option<(Vec<Rat>, Vec<Rat>)> {
    let mut rows = block.c_rows.clone();
    rows.extend(block.n_rows.clone());
    if rows.is_empty() {
        return if v.iter().all(is_zero) {
            Some((Vec::new(), Vec::new()))
        } else {
            None
        };
    }
    let m = RatMat::from_rows(rows);
    // solve c^T M = v  =>  M^T c = v
    let mt = m.transpose();
    let coords = mt.solve(v)?;
    let (c_part, n_part) = coords.split_at(block.c_rows.len());
    Some((c_part.to_vec(), n_part.to_vec()))
}

/// Searches for an sg^(0)-invariant graded complement.
///
/// Reductive symmetry algebras short-circuit to the highest-weight
/// construction. Otherwise every torus-stable complement is parametrized by
/// graph maps over the weight blocks, invariance is imposed condition by
/// condition, and the resulting system is decided exactly when it is linear
/// in the parameters.
pub fn invariant_complement_certificate(sg: &SymmetryAlgebra) -> ComplementCertificate {
    if sg.reductive_flag {
        return match reductive_invariant_complement(sg) {
            Ok(ws) => ComplementCertificate::Exists(ws),
            Err(e) => ComplementCertificate::Unknown(format!(
                "reductive construction failed unexpectedly: {e}"
            )),
        };
    }
    let algebra: &Arc<GradedAlgebra> = &sg.subspace.algebra;
    let dim = algebra.dim();

    // torus t = Cartan ∩ sg_0
    let cartan_rows: Vec<Vec<Rat>> = algebra
        .cartan
        .iter()
        .map(|&i| {
            let mut v = vec![Rat::zero(); dim];
            v[i] = Rat::one();
            v
        })
        .collect();
    let cartan = GradedSubspace::span(algebra, &cartan_rows).expect("cartan homogeneous");
    let torus = cartan.intersect(&sg.subspace);
    let torus_basis = torus.basis();
    let torus_dim = torus_basis.len();

    // weight of each basis index under the torus; requires the fixed basis
    // to diagonalize ad(t)
    let mut weights: Vec<Vec<Rat>> = Vec::with_capacity(dim);
    for m in 0..dim {
        let mut b = vec![Rat::zero(); dim];
        b[m] = Rat::one();
        let mut wt = Vec::with_capacity(torus_dim);
        for t in &torus_basis {
            let img = algebra.bracket_coeffs(t, &b);
            let lambda = img[m].clone();
            let mut residual = img;
            residual[m] = Rat::zero();
            if residual.iter().any(|c| !is_zero(c)) {
                return ComplementCertificate::Unknown(
                    "torus does not act diagonally on the fixed basis".into(),
                );
            }
            wt.push(lambda);
        }
        weights.push(wt);
    }

    // blocks per (degree >= 0, weight)
    let mut blocks: BTreeMap<BlockKey, Block> = BTreeMap::new();
    let mut param_count = 0usize;
    for d in algebra.degrees() {
        if d < 0 {
            continue;
        }
        let target = normalized_target(sg, d);
        let mut groups: BTreeMap<Vec<Rat>, Vec<usize>> = BTreeMap::new();
        for &i in algebra.indices_of_degree(d) {
            groups.entry(weights[i].clone()).or_default().push(i);
        }
        let mut covered = 0usize;
        for (wt, idx) in groups {
            let rows: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&i| {
                    let mut v = vec![Rat::zero(); dim];
                    v[i] = Rat::one();
                    v
                })
                .collect();
            let block_space = GradedSubspace::span(algebra, &rows).expect("homogeneous");
            let n_part = target.intersect(&block_space);
            covered += n_part.dim();
            let c_part = n_part.complement_in(&block_space);
            let (space, _) = RatMat::from_rows(rows).rref();
            let c_rows = c_part.basis_in_degree(d);
            let n_rows = n_part.basis_in_degree(d);
            let block = Block {
                space,
                n_rows,
                c_rows,
                param_offset: param_count,
            };
            param_count += block.c_rows.len() * block.n_rows.len();
            blocks.insert((d, wt), block);
        }
        if covered != target.dim_in_degree(d) {
            // N is not a sum of weight blocks: torus-stability failed
            return ComplementCertificate::Unknown(
                "normalization target is not torus-stable".into(),
            );
        }
    }

    // t-homogeneous basis of sg^(0)
    let mut sg0_elements: Vec<(i64, Vec<Rat>, Vec<Rat>)> = Vec::new(); // (degree, weight, vector)
    for d in sg.subspace.degrees() {
        if d < 0 {
            continue;
        }
        let piece_rows = sg.subspace.basis_in_degree(d);
        if piece_rows.is_empty() {
            continue;
        }
        let piece = GradedSubspace::span(algebra, &piece_rows).expect("homogeneous");
        let mut groups: BTreeMap<Vec<Rat>, Vec<usize>> = BTreeMap::new();
        for &i in algebra.indices_of_degree(d) {
            groups.entry(weights[i].clone()).or_default().push(i);
        }
        let mut total = 0usize;
        for (wt, idx) in groups {
            let rows: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&i| {
                    let mut v = vec![Rat::zero(); dim];
                    v[i] = Rat::one();
                    v
                })
                .collect();
            let block_space = GradedSubspace::span(algebra, &rows).expect("homogeneous");
            let inter = piece.intersect(&block_space);
            total += inter.dim();
            for v in inter.basis_in_degree(d) {
                sg0_elements.push((d, wt.clone(), v));
            }
        }
        if total != piece_rows.len() {
            return ComplementCertificate::Unknown(
                "symmetry algebra is not torus-stable".into(),
            );
        }
    }

    // conditions: for each s and each source block with parameters or basis,
    // [s, w_a + phi(w_a)] must lie in the target block's graph
    #[derive(Default)]
    struct LinearEq {
        constant: Rat,
        coefs: BTreeMap<usize, Rat>,
        bilinear: bool,
    }
    let mut equations: Vec<LinearEq> = Vec::new();

    let add_weights = |a: &[Rat], b: &[Rat]| -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    };

    for (s_deg, s_wt, s_vec) in &sg0_elements {
        for ((d, wt), block) in &blocks {
            let c_dim = block.c_rows.len();
            let n_dim = block.n_rows.len();
            if c_dim == 0 {
                continue; // no W-vectors from this block
            }
            let tgt_deg = d + s_deg;
            let tgt_wt = add_weights(wt, s_wt);
            let tgt = blocks.get(&(tgt_deg, tgt_wt));
            for a in 0..c_dim {
                // z = [s, w_a] + sum_b p_(a,b) [s, n_b]
                let z0 = algebra.bracket_coeffs(s_vec, &block.c_rows[a]);
                let zb: Vec<Vec<Rat>> = (0..n_dim)
                    .map(|b| algebra.bracket_coeffs(s_vec, &block.n_rows[b]))
                    .collect();
                match tgt {
                    None => {
                        // target block absent: the bracket must vanish outright
                        for r in 0..dim {
                            let mut eq = LinearEq {
                                constant: z0[r].clone(),
                                ..Default::default()
                            };
                            for (b, z) in zb.iter().enumerate() {
                                if !is_zero(&z[r]) {
                                    eq.coefs
                                        .insert(block.param_offset + a * n_dim + b, z[r].clone());
                                }
                            }
                            if !is_zero(&eq.constant) || !eq.coefs.is_empty() {
                                equations.push(eq);
                            }
                        }
                    }
                    Some(tblock) => {
                        let tc = tblock.c_rows.len();
                        let tn = tblock.n_rows.len();
                        let Some((z0c, z0n)) = block_decompose(tblock, &z0) else {
                            return ComplementCertificate::Unknown(
                                "bracket leaves its weight block".into(),
                            );
                        };
                        let zbdec: Vec<(Vec<Rat>, Vec<Rat>)> = match zb
                            .iter()
                            .map(|z| block_decompose(tblock, z))
                            .collect::<Option<Vec<_>>>()
                        {
                            Some(v) => v,
                            None => {
                                return ComplementCertificate::Unknown(
                                    "bracket leaves its weight block".into(),
                                )
                            }
                        };
                        // for each target N coordinate b2:
                        // z0n[b2] + sum_b p_ab zbn[b][b2]
                        //   - sum_a2 p'_{a2,b2} z0c[a2]
                        //   - sum_{a2,b} p'_{a2,b2} p_ab zbc[b][a2]  (bilinear)
                        for b2 in 0..tn {
                            let mut eq = LinearEq {
                                constant: z0n[b2].clone(),
                                ..Default::default()
                            };
                            for (b, (_, zn)) in zbdec.iter().enumerate() {
                                if !is_zero(&zn[b2]) {
                                    let key = block.param_offset + a * n_dim + b;
                                    *eq.coefs.entry(key).or_insert_with(Rat::zero) +=
                                        zn[b2].clone();
                                }
                            }
                            for a2 in 0..tc {
                                if !is_zero(&z0c[a2]) {
                                    let key = tblock.param_offset + a2 * tn + b2;
                                    *eq.coefs.entry(key).or_insert_with(Rat::zero) -=
                                        z0c[a2].clone();
                                }
                                for (_, (zc, _)) in zbdec.iter().enumerate() {
                                    if !is_zero(&zc[a2]) {
                                        eq.bilinear = true;
                                    }
                                }
                            }
                            eq.coefs.retain(|_, v| !is_zero(v));
                            if !is_zero(&eq.constant) || !eq.coefs.is_empty() || eq.bilinear {
                                equations.push(eq);
                            }
                        }
                    }
                }
            }
        }
    }

    let any_bilinear = equations.iter().any(|e| e.bilinear);
    let linear_eqs: Vec<&LinearEq> = equations.iter().filter(|e| !e.bilinear).collect();
    let rows: Vec<Vec<Rat>> = linear_eqs
        .iter()
        .map(|e| {
            let mut row = vec![Rat::zero(); param_count];
            for (k, v) in &e.coefs {
                row[*k] = v.clone();
            }
            row
        })
        .collect();
    let rhs: Vec<Rat> = linear_eqs.iter().map(|e| -e.constant.clone()).collect();
    let solution = if rows.is_empty() {
        Some(vec![Rat::zero(); param_count])
    } else {
        RatMat::from_rows(rows).solve(&rhs)
    };

    match (solution, any_bilinear) {
        (None, _) => ComplementCertificate::None(NoneWitness {
            torus_dim,
            parameters: param_count,
            linear_conditions: linear_eqs.len(),
            message: format!(
                "every torus-stable complement family ({} parameters over the \
                 weight blocks) violates the invariance conditions: the linear \
                 subsystem of {} equations is inconsistent",
                param_count,
                linear_eqs.len()
            ),
        }),
        (Some(_), true) => ComplementCertificate::Unknown(
            "invariance conditions are nonlinear in the family parameters".into(),
        ),
        (Some(p), false) => {
            // materialize W from the solved graph maps
            let mut vectors: Vec<Vec<Rat>> = Vec::new();
            for block in blocks.values() {
                let n_dim = block.n_rows.len();
                for (a, w_row) in block.c_rows.iter().enumerate() {
                    let mut v = w_row.clone();
                    for (b, n_row) in block.n_rows.iter().enumerate() {
                        let coef = &p[block.param_offset + a * n_dim + b];
                        if !is_zero(coef) {
                            for (i, x) in n_row.iter().enumerate() {
                                if !is_zero(x) {
                                    v[i] += coef * x;
                                }
                            }
                        }
                    }
                    vectors.push(v);
                }
                let _ = &block.space;
            }
            let w = GradedSubspace::span(algebra, &vectors).expect("homogeneous");
            if !check_complementarity(sg, &w) || !is_invariant(&w, sg) {
                return ComplementCertificate::Unknown(
                    "solved family member failed verification".into(),
                );
            }
            ComplementCertificate::Exists(NormalizationSpace {
                w,
                invariant_flag: true,
                construction: Construction::TorusWeight,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::{build_g2, g2_case_setup, G2Case, G2Parabolic};
    use crate::structure::{symmetry_algebra, SymmetryMode};

    fn principal_sg(k: usize) -> SymmetryAlgebra {
        let blocks = vec![1usize; k + 1];
        let a = GradedAlgebra::sl_flag(&blocks).unwrap();
        let mut coeffs = vec![Rat::zero(); a.dim()];
        for i in 0..k {
            let idx = a
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{},{}]", i + 1, i))
                .unwrap();
            coeffs[idx] = Rat::one();
        }
        let x = a.element(coeffs).unwrap();
        symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap()
    }

    fn f24_sg() -> SymmetryAlgebra {
        let a = GradedAlgebra::sl_flag(&[2, 2, 1]).unwrap();
        let mut coeffs = vec![Rat::zero(); a.dim()];
        for (i, j) in [(2usize, 0usize), (3, 1), (4, 3)] {
            let idx = a
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{i},{j}]"))
                .unwrap();
            coeffs[idx] = Rat::one();
        }
        let x = a.element(coeffs).unwrap();
        symmetry_algebra(&a, &x, SymmetryMode::Unparametrized).unwrap()
    }

    #[test]
    fn sl_reductive_complement_is_y_powers() {
        for k in 2..=5usize {
            let sg = principal_sg(k);
            let ws = reductive_invariant_complement(&sg).unwrap();
            assert_eq!(ws.w.dim(), k - 1, "k={k}");
            assert!(ws.invariant_flag);
            // degrees 2..k, one dimension each
            let dims = ws.w.graded_dims();
            let expect: Vec<(i64, usize)> = (2..=k as i64).map(|d| (d, 1)).collect();
            assert_eq!(dims, expect);
            // spanned by powers of the raising element
            let algebra = &sg.subspace.algebra;
            let triple = complete_sl2(algebra, &algebra.element(sg.x.clone()).unwrap()).unwrap();
            let real = algebra.realization.as_ref().unwrap();
            let y_mat = real.matrix_of(&triple.y.coeffs);
            let mut power = y_mat.clone();
            for _ in 2..=k {
                power = power.mul(&y_mat);
                let coeffs = real.coeffs_of(&power).unwrap();
                assert!(ws.w.contains(&coeffs), "y^i not in W (k={k})");
            }
        }
    }

    #[test]
    fn generic_complement_matches_reductive_dimensions() {
        for k in 2..=4usize {
            let sg = principal_sg(k);
            let generic = generic_complement(&sg);
            let invariant = reductive_invariant_complement(&sg).unwrap();
            for d in 0..=(k as i64) {
                assert_eq!(
                    generic.w.dim_in_degree(d),
                    invariant.w.dim_in_degree(d),
                    "k={k}, d={d}"
                );
            }
        }
    }

    #[test]
    fn trivial_case_sl2_has_zero_w() {
        let sg = principal_sg(1);
        let ws = reductive_invariant_complement(&sg).unwrap();
        assert_eq!(ws.w.dim(), 0);
        assert!(ws.invariant_flag);
    }

    #[test]
    fn f24_reductive_construction_fails_with_radical_witness() {
        let sg = f24_sg();
        match reductive_invariant_complement(&sg) {
            Err(AlgebraError::DegenerateRestrictedKilling { radical_dim }) => {
                assert!(radical_dim > 0);
            }
            other => panic!("expected degenerate Killing error, got {other:?}"),
        }
    }

    #[test]
    fn f24_generic_complement_dims() {
        let sg = f24_sg();
        let ws = generic_complement(&sg);
        // codimension of sg_d + [x, g_{d+1}] in g_d: degrees 0,1,2 -> 1,2,2
        assert_eq!(ws.w.graded_dims(), vec![(0, 1), (1, 2), (2, 2)]);
        assert!(!ws.invariant_flag);
    }

    #[test]
    fn f24_certificate_is_none() {
        let sg = f24_sg();
        match invariant_complement_certificate(&sg) {
            ComplementCertificate::None(w) => {
                assert!(w.torus_dim == 2);
                assert!(w.parameters > 0);
            }
            other => panic!("expected None, got {other:?}"),
        }
    }

    #[test]
    fn f24_none_is_confirmed_on_sampled_family_members() {
        // the certificate's non-existence verdict comes from an exact
        // infeasibility proof; spot-check it by sampling complements and
        // watching them all fail the invariance test
        let sg = f24_sg();
        let algebra = &sg.subspace.algebra;
        let generic = generic_complement(&sg);
        assert!(!is_invariant(&generic.w, &sg));
        // perturb the generic complement inside the target space, degree 1
        let target1 = normalized_target(&sg, 1);
        let w1 = generic.w.basis_in_degree(1);
        let n1 = target1.basis_in_degree(1);
        for scale in [1i64, -1, 2, 3, -5] {
            let mut vectors = Vec::new();
            for d in generic.w.degrees() {
                if d != 1 {
                    vectors.extend(generic.w.basis_in_degree(d));
                }
            }
            for (r, row) in w1.iter().enumerate() {
                let mut v = row.clone();
                let shift = &n1[(r + scale.unsigned_abs() as usize) % n1.len()];
                for (i, x) in shift.iter().enumerate() {
                    v[i] += crate::rat::rat(scale) * x;
                }
                vectors.push(v);
            }
            let candidate = GradedSubspace::span(algebra, &vectors).unwrap();
            assert!(check_complementarity(&sg, &candidate), "still a complement");
            assert!(!is_invariant(&candidate, &sg), "scale {scale}");
        }
    }

    #[test]
    fn g2_b_certificate_exists_with_w_in_top_degree() {
        let (a, xc) = g2_case_setup(G2Case::BNondegenerate);
        let sg = symmetry_algebra(&a, &a.element(xc).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        match invariant_complement_certificate(&sg) {
            ComplementCertificate::Exists(ws) => {
                assert_eq!(ws.w.dim(), 1);
                assert_eq!(ws.w.graded_dims(), vec![(5, 1)]);
                assert!(ws.invariant_flag);
                assert_eq!(ws.w.basis_labels(), vec!["X[2a1+3a2]".to_string()]);
            }
            other => panic!("expected Exists, got {other:?}"),
        }
    }

    #[test]
    fn g2_p2_orbit2_certificate_exists_despite_nonreductive_sg() {
        let (a, xc) = g2_case_setup(G2Case::P2Orbit2);
        let sg = symmetry_algebra(&a, &a.element(xc).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        assert!(!sg.reductive_flag);
        match invariant_complement_certificate(&sg) {
            ComplementCertificate::Exists(ws) => {
                assert_eq!(ws.w.dim(), 2);
                let labels = ws.w.basis_labels();
                assert!(labels.contains(&"X[a1]".to_string()));
                assert!(labels.contains(&"X[2a1+3a2]".to_string()));
                assert!(ws.invariant_flag);
                assert_eq!(ws.construction, Construction::TorusWeight);
            }
            other => panic!("expected Exists, got {other:?}"),
        }
    }

    #[test]
    fn g2_p2_orbit3_reductive_w_matches_listed_roots() {
        let (a, xc) = g2_case_setup(G2Case::P2Orbit3);
        let sg = symmetry_algebra(&a, &a.element(xc).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        assert!(sg.reductive_flag);
        let ws = reductive_invariant_complement(&sg).unwrap();
        assert_eq!(ws.w.dim(), 3);
        let labels = ws.w.basis_labels();
        for needed in ["X[2a1+3a2]", "X[a1+a2]", "X[a1+2a2]"] {
            assert!(labels.contains(&needed.to_string()), "missing {needed}");
        }
        // orbit 4 gives the same dimensions
        let (a4, xc4) = g2_case_setup(G2Case::P2Orbit4);
        let sg4 = symmetry_algebra(&a4, &a4.element(xc4).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        let ws4 = reductive_invariant_complement(&sg4).unwrap();
        assert_eq!(ws4.w.dim(), 3);
    }

    #[test]
    fn invariance_checks() {
        // W = 0 is invariant
        let sg = principal_sg(1);
        let empty = GradedSubspace::empty(&sg.subspace.algebra);
        assert!(is_invariant(&empty, &sg));
        // the F24 generic complement is not
        let sgf = f24_sg();
        let generic = generic_complement(&sgf);
        assert!(!is_invariant(&generic.w, &sgf));
        // the principal invariant W is
        let sg3 = principal_sg(3);
        let ws = reductive_invariant_complement(&sg3).unwrap();
        assert!(is_invariant(&ws.w, &sg3));
    }

    #[test]
    fn p1_grading_certificate_smoke() {
        // the fiber-type direction in G2/P1: x = X[-a2]
        let a = build_g2(G2Parabolic::P1);
        let mut x = vec![Rat::zero(); 14];
        x[crate::g2::root_index(0, -1)] = Rat::one();
        let sg = symmetry_algebra(&a, &a.element(x).unwrap(), SymmetryMode::Unparametrized)
            .unwrap();
        // certificate must come back decisive or honestly unknown; mainly a
        // no-panic regression guard for a case outside the named examples
        let _ = invariant_complement_certificate(&sg);
    }
}
