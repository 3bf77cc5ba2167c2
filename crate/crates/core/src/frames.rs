//! Moving-frame reduction for sampled curves.
//!
//! For a non-degenerate curve in projective space the pipeline is: build the
//! osculating frame from derivatives of a lift, rescale the lift so the
//! frame has unit determinant, pull back the Maurer-Cartan form (a companion
//! matrix by construction), then gauge the connection degree by degree with
//! nilpotent exponentials until every graded component lies in W + sg. The
//! W-components of the result are the invariant traces; for curves in
//! projective space with the highest-weight normalization they are the
//! Wilczynski invariants.
//!
//! Gauges are exact nilpotent series; the only numerical derivatives are the
//! 4th-order stencils applied to lifts, gauge parameters and determinant
//! rescalings, so invariant traces on analytic data converge at order dt^4.

use crate::algebra::GradedAlgebra;
use crate::error::FrameError;
use crate::fd::{cumulative_integral, derivative, derivative_rows};
use crate::linalg::{det_f64, lu_solve, RatMat};
use crate::normalization::{
    generic_complement, reductive_invariant_complement, NormalizationSpace,
};
use crate::rat::{to_f64, Rat};
use crate::structure::{complete_sl2, symmetry_algebra, SymmetryAlgebra, SymmetryMode};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A sampled curve in R^{k+1}, lifting a curve in projective k-space.
/// `derivatives[m-1][node]` holds the m-th derivative of the lift when exact
/// jets are available; otherwise derivatives come from finite differences.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectiveCurve {
    pub k: usize,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<Vec<Vec<Vec<f64>>>>,
}

impl ProjectiveCurve {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.t0 + i as f64 * self.dt).collect()
    }

    /// Samples a lift from a closure `jet(t, order)` providing exact
    /// derivatives for orders 0..=k+1.
    pub fn from_jet(
        k: usize,
        t0: f64,
        dt: f64,
        n: usize,
        jet: impl Fn(f64, usize) -> Vec<f64>,
    ) -> Self {
        let times: Vec<f64> = (0..n).map(|i| t0 + i as f64 * dt).collect();
        let values: Vec<Vec<f64>> = times.iter().map(|&t| jet(t, 0)).collect();
        let derivatives = (1..=k + 1)
            .map(|m| times.iter().map(|&t| jet(t, m)).collect())
            .collect();
        ProjectiveCurve {
            k,
            t0,
            dt,
            values,
            derivatives: Some(derivatives),
        }
    }

    /// Samples a lift from values only; derivatives will use stencils.
    pub fn from_values(k: usize, t0: f64, dt: f64, values: Vec<Vec<f64>>) -> Self {
        ProjectiveCurve {
            k,
            t0,
            dt,
            values,
            derivatives: None,
        }
    }

    fn validate(&self) -> Result<(), FrameError> {
        if self.n() < 8 {
            return Err(FrameError::GridTooSmall {
                got: self.n(),
                need: 8,
            });
        }
        if self.k < 1 {
            return Err(FrameError::DimensionTooSmall(self.k));
        }
        Ok(())
    }
}

/// An osculating frame path: frame matrices with columns v_0 .. v_k, the
/// next derivative column, and the companion coefficients p_0 .. p_k of
/// v_0^{(k+1)} in the frame basis.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub k: usize,
    pub t0: f64,
    pub dt: f64,
    /// `frames[node][row][col]`
    pub frames: Vec<Vec<Vec<f64>>>,
    /// (k+1)-th derivative of the lift
    pub next_column: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub det: Vec<f64>,
}

/// Sampled Lie-algebra-valued connection data along the curve.
#[derive(Debug, Clone)]
pub struct ConnectionPath {
    pub algebra: Arc<GradedAlgebra>,
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<Vec<f64>>,
}

/// One nilpotent gauge factor exp(u(t)) with u valued in a single degree.
#[derive(Debug, Clone)]
pub struct GaugeFactor {
    pub degree: i64,
    pub u: Vec<Vec<f64>>,
}

/// Outcome of the reduction: the connection in the form x + w(t) + sigma(t).
#[derive(Debug, Clone)]
pub struct NormalFormResult {
    pub t0: f64,
    pub dt: f64,
    /// coordinates of w(t) in the echelon basis of W
    pub w_coords: Vec<Vec<f64>>,
    /// coordinates of sigma(t) in the echelon basis of sg^(0)
    pub sg_coords: Vec<Vec<f64>>,
    /// w(t) as full algebra coefficient vectors
    pub w_trace: Vec<Vec<f64>>,
    /// sigma(t) as full algebra coefficient vectors
    pub sigma_trace: Vec<Vec<f64>>,
    pub gauge: Vec<GaugeFactor>,
    /// max relative residual of the final decomposition x + w + sigma
    pub residual: f64,
    /// max deviation of the degree -1 part from x
    pub type_deviation: f64,
    pub w_labels: Vec<String>,
    pub sg_labels: Vec<String>,
}

impl NormalFormResult {
    /// Max absolute W-coefficient over the grid (fixed-basis sup norm).
    pub fn w_sup(&self) -> f64 {
        self.w_trace
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |a, c| a.max(c.abs()))
    }
}

/// Flatness test: w vanishes along the whole grid up to `tol`.
pub fn is_flat(result: &NormalFormResult, tol: f64) -> bool {
    result.w_sup() <= tol
}

fn binomial(n: usize, m: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..m {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Builds the osculating frame, preferring exact derivative data.
pub fn osculating_frame(curve: &ProjectiveCurve) -> Result<FramePath, FrameError> {
    curve.validate()?;
    let k = curve.k;
    let n = curve.n();
    let well_shaped =
        |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|v| v.len() == k + 1);
    if !well_shaped(&curve.values) {
        return Err(FrameError::Algebra(crate::error::AlgebraError::Malformed(
            format!("curve values must be {n} rows of length k+1 = {}", k + 1),
        )));
    }
    // derivative stacks: order 0..=k+1
    let mut stacks: Vec<Vec<Vec<f64>>> = vec![curve.values.clone()];
    match &curve.derivatives {
        Some(derivs) if derivs.len() >= k + 1 => {
            for m in 0..=k {
                if !well_shaped(&derivs[m]) {
                    return Err(FrameError::Algebra(crate::error::AlgebraError::Malformed(
                        format!("derivative array {} has the wrong shape", m + 1),
                    )));
                }
                stacks.push(derivs[m].clone());
            }
        }
        _ => {
            for m in 0..=k {
                let next = derivative_rows(&stacks[m], curve.dt);
                stacks.push(next);
            }
        }
    }
    let mut frames = Vec::with_capacity(n);
    let mut dets = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    for node in 0..n {
        let mut mat = vec![vec![0.0; k + 1]; k + 1];
        for col in 0..=k {
            for (row, slot) in mat.iter_mut().enumerate() {
                slot[col] = stacks[col][node][row];
            }
        }
        let det = det_f64(&mat);
        if det.abs() < 1e-10 {
            return Err(FrameError::DegenerateFrame { node, det });
        }
        let rhs: Vec<f64> = (0..=k).map(|row| stacks[k + 1][node][row]).collect();
        let coeffs = lu_solve(&mat, &rhs).ok_or(FrameError::DegenerateFrame { node, det })?;
        frames.push(mat);
        dets.push(det);
        p.push(coeffs);
    }
    Ok(FramePath {
        k,
        t0: curve.t0,
        dt: curve.dt,
        frames,
        next_column: stacks[k + 1].clone(),
        p,
        det: dets,
    })
}

/// Rescales the lift by det^{-1/(k+1)} pointwise so the frame lands in the
/// special linear group; afterwards |det - 1| and |p_k| sit at stencil-error
/// level. Fails with an orientation obstruction when det < 0 and k+1 is
/// even (negate the lift and resample in that case).
pub fn sl_normalize(frame: &FramePath) -> Result<FramePath, FrameError> {
    let k = frame.k;
    let n = frame.frames.len();
    let root = (k + 1) as f64;
    let mut lambda = vec![0.0; n];
    for node in 0..n {
        let det = frame.det[node];
        if det < 0.0 {
            if (k + 1) % 2 == 0 {
                return Err(FrameError::OrientationObstruction);
            }
            lambda[node] = -(-det).powf(-1.0 / root);
        } else {
            lambda[node] = det.powf(-1.0 / root);
        }
    }
    // lambda' / lambda = -p_k/(k+1) exactly (the determinant satisfies
    // det' = p_k det), so all lambda derivatives follow from stencil
    // derivatives of the algebraically computed p_k via the recurrence
    // g^(m+1) = sum_j C(m,j) rho^(j) g^(m-j). This avoids iterated
    // differentiation of lambda itself, which amplifies rounding noise.
    let rho: Vec<f64> = frame.p.iter().map(|p| -p[k] / root).collect();
    let mut rho_derivs: Vec<Vec<f64>> = vec![rho];
    for _ in 0..k {
        let next = derivative(rho_derivs.last().unwrap(), frame.dt);
        rho_derivs.push(next);
    }
    let mut lambda_derivs: Vec<Vec<f64>> = vec![lambda];
    for m in 0..=k {
        let mut next = vec![0.0; n];
        for (node, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..=m {
                acc += binomial(m, j) * rho_derivs[j][node] * lambda_derivs[m - j][node];
            }
            *slot = acc;
        }
        lambda_derivs.push(next);
    }
    let old_col = |node: usize, order: usize, row: usize| -> f64 {
        if order <= k {
            frame.frames[node][row][order]
        } else {
            frame.next_column[node][row]
        }
    };
    let mut frames = Vec::with_capacity(n);
    let mut next_column = Vec::with_capacity(n);
    let mut dets = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    for node in 0..n {
        let mut mat = vec![vec![0.0; k + 1]; k + 1];
        for order in 0..=k {
            for row in 0..=k {
                let mut acc = 0.0;
                for m in 0..=order {
                    acc +=
                        binomial(order, m) * lambda_derivs[m][node] * old_col(node, order - m, row);
                }
                mat[row][order] = acc;
            }
        }
        let mut next = vec![0.0; k + 1];
        for (row, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for m in 0..=k + 1 {
                acc += binomial(k + 1, m) * lambda_derivs[m][node] * old_col(node, k + 1 - m, row);
            }
            *slot = acc;
        }
        let det = det_f64(&mat);
        if det.abs() < 1e-10 {
            return Err(FrameError::DegenerateFrame { node, det });
        }
        let coeffs = lu_solve(&mat, &next).ok_or(FrameError::DegenerateFrame { node, det })?;
        frames.push(mat);
        next_column.push(next);
        dets.push(det);
        p.push(coeffs);
    }
    Ok(FramePath {
        k,
        t0: frame.t0,
        dt: frame.dt,
        frames,
        next_column,
        p,
        det: dets,
    })
}

/// The Maurer-Cartan pullback s^{-1} s' along the frame section. Because
/// the frame columns are successive derivatives, the pullback is exactly
/// the companion matrix: a subdiagonal shift plus the p-coefficients in the
/// last column.
pub fn maurer_cartan_pullback(
    frame: &FramePath,
    algebra: &Arc<GradedAlgebra>,
) -> Result<ConnectionPath, FrameError> {
    let k = frame.k;
    let real = algebra
        .realization
        .as_ref()
        .filter(|r| r.n == k + 1)
        .ok_or(FrameError::DimensionTooSmall(k))?;
    let mut samples = Vec::with_capacity(frame.frames.len());
    for p in &frame.p {
        let mut mat = vec![vec![0.0; k + 1]; k + 1];
        for i in 0..k {
            mat[i + 1][i] = 1.0;
        }
        for (i, pi) in p.iter().enumerate() {
            mat[i][k] += pi;
        }
        // project off the trace: after sl-normalization p_k is already at
        // stencil-error level
        let tr = mat[k][k] / (k + 1) as f64;
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] -= tr;
        }
        samples.push(real.coeffs_of_f64(&mat));
    }
    Ok(ConnectionPath {
        algebra: Arc::clone(algebra),
        t0: frame.t0,
        dt: frame.dt,
        samples,
    })
}

/// Ad(exp(-u)) kappa + dexp_{-u}(u'): the effect of recalibrating the
/// section by exp(u(t)), via the finite nilpotent series
/// `sum ad(-u)^m(kappa)/m! + sum ad(-u)^m(u')/(m+1)!`.
pub fn apply_gauge_node(
    algebra: &GradedAlgebra,
    kappa: &[f64],
    u: &[f64],
    du: &[f64],
) -> Vec<f64> {
    let dim = algebra.dim();
    let minus_u: Vec<f64> = u.iter().map(|c| -c).collect();
    let mut out = vec![0.0; dim];
    let mut term = kappa.to_vec();
    let mut fact = 1.0;
    let mut m = 0usize;
    while term.iter().any(|c| c.abs() > 0.0) && m <= 64 {
        for i in 0..dim {
            out[i] += term[i] / fact;
        }
        m += 1;
        term = algebra.bracket_f64(&minus_u, &term);
        fact *= m as f64;
    }
    let mut term = du.to_vec();
    let mut fact = 1.0;
    let mut m = 0usize;
    while term.iter().any(|c| c.abs() > 0.0) && m <= 64 {
        for i in 0..dim {
            out[i] += term[i] / fact;
        }
        m += 1;
        term = algebra.bracket_f64(&minus_u, &term);
        fact *= (m + 1) as f64;
    }
    out
}

/// Gauges a whole connection path by exp(u(t)).
pub fn gauge_connection(kappa: &ConnectionPath, u: &[Vec<f64>]) -> ConnectionPath {
    let du = derivative_rows(u, kappa.dt);
    let samples = kappa
        .samples
        .iter()
        .zip(u.iter().zip(&du))
        .map(|(s, (uu, duu))| apply_gauge_node(&kappa.algebra, s, uu, duu))
        .collect();
    ConnectionPath {
        algebra: Arc::clone(&kappa.algebra),
        t0: kappa.t0,
        dt: kappa.dt,
        samples,
    }
}

/// Exact canonical-solution operator for the column system `M z = rhs`:
/// returns an f64 matrix `op` with `z = op . rhs` (free coordinates zero).
/// Canonical RREF solutions are linear in the rhs over the consistent span.
fn solve_operator(columns: &[Vec<Rat>], dim: usize) -> Vec<Vec<f64>> {
    let cols = columns.len();
    let m = RatMat::from_fn(dim, cols, |r, c| columns[c][r].clone());
    let mut op = vec![vec![0.0; dim]; cols];
    for r in 0..dim {
        let mut rhs = vec![Rat::zero(); dim];
        rhs[r] = Rat::one();
        if let Some(sol) = m.solve(&rhs) {
            for (c, row) in op.iter_mut().enumerate() {
                row[r] = to_f64(&sol[c]);
            }
        }
    }
    op
}

fn apply_op(op: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    op.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

struct ReductionStep {
    gauge_degree: i64,
    gauge_indices: Vec<usize>,
    /// operator: degree-(gauge_degree - 1) component -> gauge coordinates
    u_op: Vec<Vec<f64>>,
}

/// Reduction context: exact solve operators precomputed once per
/// (algebra, x, sg, W) tuple, reusable across connection paths.
pub struct Reducer {
    pub algebra: Arc<GradedAlgebra>,
    x_f64: Vec<f64>,
    steps: Vec<ReductionStep>,
    /// per non-negative degree: (W rows, sg rows, combined projector)
    w_rows: Vec<Vec<f64>>,
    sg_rows: Vec<Vec<f64>>,
    /// least-squares operator onto [w_rows; sg_rows] coordinates
    decomp_op: Vec<Vec<f64>>,
    w_labels: Vec<String>,
    sg_labels: Vec<String>,
}

impl Reducer {
    pub fn new(sg: &SymmetryAlgebra, w: &NormalizationSpace) -> Self {
        let algebra = Arc::clone(&sg.subspace.algebra);
        let dim = algebra.dim();
        let x = &sg.x;
        let x_f64: Vec<f64> = x.iter().map(to_f64).collect();
        let max_d = algebra.max_degree().max(0);

        let mut steps = Vec::new();
        for step in 1..=max_d {
            let d = step - 1;
            let gauge_indices: Vec<usize> = algebra.indices_of_degree(step).to_vec();
            let mut columns: Vec<Vec<Rat>> = Vec::new();
            for &j in &gauge_indices {
                let mut b = vec![Rat::zero(); dim];
                b[j] = Rat::one();
                // we remove [u, x] from the connection, so solve on [b, x]
                columns.push(algebra.bracket_coeffs(&b, x));
            }
            let n_gauge = columns.len();
            columns.extend(w.w.basis_in_degree(d).into_iter());
            columns.extend(sg.subspace.basis_in_degree(d).into_iter());
            let op = solve_operator(&columns, dim);
            steps.push(ReductionStep {
                gauge_degree: step,
                gauge_indices,
                u_op: op.into_iter().take(n_gauge).collect(),
            });
        }

        // final decomposition: exact least-squares projector onto the stacked
        // [W basis; sg^(0) basis] coordinates
        let mut w_rows_exact: Vec<Vec<Rat>> = Vec::new();
        let mut w_labels = Vec::new();
        for d in w.w.degrees() {
            w_rows_exact.extend(w.w.basis_in_degree(d));
        }
        w_labels.extend(w.w.basis_labels());
        let mut sg_rows_exact: Vec<Vec<Rat>> = Vec::new();
        let mut sg_labels = Vec::new();
        for d in sg.subspace.degrees() {
            if d >= 0 {
                sg_rows_exact.extend(sg.subspace.basis_in_degree(d));
            }
        }
        let nonneg = crate::structure::nonnegative_part(sg);
        sg_labels.extend(nonneg.basis_labels());

        let mut all_rows = w_rows_exact.clone();
        all_rows.extend(sg_rows_exact.clone());
        let decomp_op = if all_rows.is_empty() {
            Vec::new()
        } else {
            // (B B^T)^{-1} B applied to vectors: coords = op . v
            let b = RatMat::from_rows(all_rows.clone());
            let bt = b.transpose();
            let gram = b.mul(&bt);
            let gram_inv = gram.inverse().expect("basis independent");
            gram_inv.mul(&b).to_f64()
        };
        let to_f64_rows =
            |rows: &[Vec<Rat>]| rows.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        Reducer {
            algebra,
            x_f64,
            steps,
            w_rows: to_f64_rows(&w_rows_exact),
            sg_rows: to_f64_rows(&sg_rows_exact),
            decomp_op,
            w_labels,
            sg_labels,
        }
    }

    /// Runs the stepwise reduction on a connection of constant type x.
    pub fn reduce(&self, kappa: &ConnectionPath) -> Result<NormalFormResult, FrameError> {
        let algebra = &self.algebra;
        let dim = algebra.dim();
        let n = kappa.samples.len();
        if n < 5 {
            return Err(FrameError::GridTooSmall { got: n, need: 5 });
        }
        // type check: degree -1 component must match x
        let scale = kappa
            .samples
            .iter()
            .flat_map(|s| s.iter())
            .fold(1.0f64, |a, c| a.max(c.abs()));
        let mut type_deviation = 0.0f64;
        for s in &kappa.samples {
            for &i in algebra.indices_of_degree(-1) {
                type_deviation = type_deviation.max((s[i] - self.x_f64[i]).abs());
            }
        }
        if type_deviation > 1e-8 * scale {
            return Err(FrameError::TypeViolation {
                dev: type_deviation,
            });
        }

        let mut current: Vec<Vec<f64>> = kappa.samples.clone();
        let mut gauges: Vec<GaugeFactor> = Vec::new();
        for step in &self.steps {
            let d = step.gauge_degree - 1;
            // u(t) from the degree-d component at each node
            let mut u_all: Vec<Vec<f64>> = Vec::with_capacity(n);
            for s in current.iter() {
                let chi = algebra.degree_component_f64(s, d);
                let u_coords = apply_op(&step.u_op, &chi);
                let mut u = vec![0.0; dim];
                for (c, &j) in step.gauge_indices.iter().enumerate() {
                    u[j] = u_coords[c];
                }
                u_all.push(u);
            }
            let du_all = derivative_rows(&u_all, kappa.dt);
            for (node, s) in current.iter_mut().enumerate() {
                *s = apply_gauge_node(algebra, s, &u_all[node], &du_all[node]);
            }
            gauges.push(GaugeFactor {
                degree: step.gauge_degree,
                u: u_all,
            });
        }

        // decompose kappa - x into W + sg coordinates per node
        let w_dim = self.w_rows.len();
        let sg_dim = self.sg_rows.len();
        let mut w_coords = Vec::with_capacity(n);
        let mut sg_coords = Vec::with_capacity(n);
        let mut w_trace = Vec::with_capacity(n);
        let mut sigma_trace = Vec::with_capacity(n);
        let mut residual = 0.0f64;
        for s in &current {
            let mut rest: Vec<f64> = s.iter().zip(&self.x_f64).map(|(a, b)| a - b).collect();
            // non-negative degrees only; degree -1 residue goes to the type check
            for d in algebra.degrees() {
                if d < 0 {
                    for &i in algebra.indices_of_degree(d) {
                        rest[i] = 0.0;
                    }
                }
            }
            let coords = if self.decomp_op.is_empty() {
                Vec::new()
            } else {
                apply_op(&self.decomp_op, &rest)
            };
            let mut w_vec = vec![0.0; dim];
            for (c, row) in self.w_rows.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    w_vec[i] += coords[c] * v;
                }
            }
            let mut s_vec = vec![0.0; dim];
            for (c, row) in self.sg_rows.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    s_vec[i] += coords[w_dim + c] * v;
                }
            }
            for i in 0..dim {
                let r = (rest[i] - w_vec[i] - s_vec[i]).abs();
                residual = residual.max(r / scale.max(1.0));
            }
            w_coords.push(coords[..w_dim].to_vec());
            sg_coords.push(coords[w_dim..w_dim + sg_dim].to_vec());
            w_trace.push(w_vec);
            sigma_trace.push(s_vec);
        }

        Ok(NormalFormResult {
            t0: kappa.t0,
            dt: kappa.dt,
            w_coords,
            sg_coords,
            w_trace,
            sigma_trace,
            gauge: gauges,
            residual,
            type_deviation,
            w_labels: self.w_labels.clone(),
            sg_labels: self.sg_labels.clone(),
        })
    }
}

/// One-shot reduction with a fresh context.
pub fn reduce_to_normal_form(
    kappa: &ConnectionPath,
    sg: &SymmetryAlgebra,
    w: &NormalizationSpace,
) -> Result<NormalFormResult, FrameError> {
    Reducer::new(sg, w).reduce(kappa)
}

/// The closed third-order invariant from the companion coefficients of
/// `v0^(k+1) = sum p_i v0^(i)`:
///
/// ```text
/// theta_3 = p_k'' - 6/(k+1) p_k p_k' + 4/(k+1)^2 p_k^3 - 6/k p_{k-1}'
///           + 12/(k(k+1)) p_k p_{k-1} + 12/(k(k-1)) p_{k-2}
/// ```
///
/// The sign of the p_{k-1}' term is forced: reducing the order-3 case to
/// `u''' + P u' + Q u = 0` gives theta_3 = -6(Q - P'/2), the unique
/// weight-3 relative invariant normalized so that z''' = z has theta_3 = 6,
/// and expanding it back in the p's yields the combination above.
pub fn wilczynski_theta3(p: &[Vec<f64>], k: usize, dt: f64) -> Result<Vec<f64>, FrameError> {
    if k < 2 {
        return Err(FrameError::DimensionTooSmall(k));
    }
    let n = p.len();
    let kf = k as f64;
    let col = |j: usize| -> Vec<f64> { p.iter().map(|row| row[j]).collect() };
    let pk = col(k);
    let pk1 = col(k - 1);
    let pk2 = col(k - 2);
    let dpk = derivative(&pk, dt);
    let ddpk = derivative(&dpk, dt);
    let dpk1 = derivative(&pk1, dt);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(
            ddpk[i] - 6.0 / (kf + 1.0) * pk[i] * dpk[i]
                + 4.0 / ((kf + 1.0) * (kf + 1.0)) * pk[i].powi(3)
                - 6.0 / kf * dpk1[i]
                + 12.0 / (kf * (kf + 1.0)) * pk[i] * pk1[i]
                + 12.0 / (kf * (kf - 1.0)) * pk2[i],
        );
    }
    Ok(out)
}

/// Pipeline context for projective curves of a fixed dimension k: the Borel
/// graded sl(k+1), the principal symmetry algebra, the normalization space
/// and the calibrated invariant basis.
pub struct ProjectiveContext {
    pub algebra: Arc<GradedAlgebra>,
    pub sg: SymmetryAlgebra,
    pub w: NormalizationSpace,
    pub reducer: Reducer,
    pub mode: SymmetryMode,
    /// change of basis from echelon-W coordinates to y-power coordinates
    /// (unparametrized mode), with the theta_3 slot calibrated to the
    /// classical formula
    theta_of_w: Option<Vec<Vec<f64>>>,
    pub theta_names: Vec<String>,
}

impl ProjectiveContext {
    pub fn new(k: usize, mode: SymmetryMode) -> Result<Self, FrameError> {
        let blocks = vec![1usize; k + 1];
        let algebra = GradedAlgebra::sl_flag(&blocks).map_err(FrameError::Algebra)?;
        let mut x = vec![Rat::zero(); algebra.dim()];
        for i in 0..k {
            let idx = algebra
                .basis_labels
                .iter()
                .position(|l| l == &format!("E[{},{}]", i + 1, i))
                .unwrap();
            x[idx] = Rat::one();
        }
        let x_el = algebra.element(x).map_err(FrameError::Algebra)?;
        let sg = symmetry_algebra(&algebra, &x_el, mode).map_err(FrameError::Algebra)?;
        let w = match mode {
            SymmetryMode::Unparametrized => {
                reductive_invariant_complement(&sg).map_err(FrameError::Algebra)?
            }
            SymmetryMode::Parametrized => generic_complement(&sg),
        };
        let reducer = Reducer::new(&sg, &w);

        let (theta_of_w, theta_names) = match mode {
            SymmetryMode::Unparametrized => {
                // y-power basis of W, exact
                let triple =
                    complete_sl2(&algebra, &x_el).map_err(FrameError::Algebra)?;
                let real = algebra.realization.as_ref().unwrap();
                let y_mat = real.matrix_of(&triple.y.coeffs);
                let mut powers: Vec<Vec<Rat>> = Vec::new();
                let mut power = y_mat.clone();
                for _ in 2..=k {
                    power = power.mul(&y_mat);
                    powers.push(real.coeffs_of(&power).map_err(FrameError::Algebra)?);
                }
                // w = sum_i theta_i y^i and y^i = sum_j M[i][j] W_j, so the
                // echelon coordinates are wc = M^T theta: invert M^T
                let m_t = RatMat::from_fn(powers.len(), powers.len(), |i, j| {
                    w.w.coordinates(&powers[j]).unwrap()[i].clone()
                });
                let inv = m_t
                    .inverse()
                    .expect("y-powers form a basis of W")
                    .to_f64();
                let names: Vec<String> = (2..=k).map(|i| format!("theta_{}", i + 1)).collect();
                (Some(inv), names)
            }
            SymmetryMode::Parametrized => {
                let names = w.w.basis_labels().iter().map(|l| format!("w[{l}]")).collect();
                (None, names)
            }
        };
        let mut ctx = ProjectiveContext {
            algebra,
            sg,
            w,
            reducer,
            mode,
            theta_of_w,
            theta_names,
        };
        if mode == SymmetryMode::Unparametrized && k >= 2 {
            ctx.calibrate_theta3(k)?;
        }
        Ok(ctx)
    }

    /// Pins the scale of the theta_3 slot to the classical closed formula by
    /// probing the reduction with the constant connection x + E[k-2, k],
    /// whose formula value is 12/(k(k-1)).
    fn calibrate_theta3(&mut self, k: usize) -> Result<(), FrameError> {
        let dim = self.algebra.dim();
        let idx = self
            .algebra
            .basis_labels
            .iter()
            .position(|l| l == &format!("E[{},{}]", k - 2, k))
            .unwrap();
        let mut sample: Vec<f64> = self.sg.x.iter().map(to_f64).collect();
        sample[idx] += 1.0;
        let kappa = ConnectionPath {
            algebra: Arc::clone(&self.algebra),
            t0: 0.0,
            dt: 0.1,
            samples: vec![sample; 9],
        };
        let red = self.reducer.reduce(&kappa)?;
        let raw = self.theta_raw(&red);
        let probe = raw[4][0]; // interior node, theta_3 slot
        let classical = 12.0 / (k as f64 * (k as f64 - 1.0));
        let scale = classical / probe;
        if let Some(change) = &mut self.theta_of_w {
            for v in change[0].iter_mut() {
                *v *= scale;
            }
        }
        let _ = dim;
        Ok(())
    }

    fn theta_raw(&self, result: &NormalFormResult) -> Vec<Vec<f64>> {
        match &self.theta_of_w {
            Some(change) => result
                .w_coords
                .iter()
                .map(|wc| change.iter().map(|row| {
                    row.iter().zip(wc).map(|(a, b)| a * b).sum()
                }).collect())
                .collect(),
            None => result.w_coords.clone(),
        }
    }

    /// Full pipeline: osculating frame, sl-normalization, pullback,
    /// reduction, invariant extraction.
    pub fn invariants(
        &self,
        curve: &ProjectiveCurve,
    ) -> Result<InvariantTraces, FrameError> {
        let frame = osculating_frame(curve)?;
        let frame = sl_normalize(&frame)?;
        let kappa = maurer_cartan_pullback(&frame, &self.algebra)?;
        let result = self.reducer.reduce(&kappa)?;
        let traces = self.theta_raw(&result);
        Ok(InvariantTraces {
            t: curve.times(),
            names: self.theta_names.clone(),
            traces,
            p: frame.p.clone(),
            result,
        })
    }
}

/// Invariant traces of a projective curve, plus the underlying reduction.
#[derive(Debug, Clone)]
pub struct InvariantTraces {
    pub t: Vec<f64>,
    pub names: Vec<String>,
    /// `traces[node][invariant]`
    pub traces: Vec<Vec<f64>>,
    /// companion coefficients after sl-normalization
    pub p: Vec<Vec<f64>>,
    pub result: NormalFormResult,
}

impl InvariantTraces {
    pub fn max_abs(&self, column: usize) -> f64 {
        self.traces
            .iter()
            .map(|row| row[column].abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_all(&self) -> f64 {
        (0..self.names.len()).map(|c| self.max_abs(c)).fold(0.0, f64::max)
    }

    /// Two-column-per-invariant CSV with a stable header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, &t) in self.t.iter().enumerate() {
            out.push_str(&format!("{t:.12e}"));
            for c in 0..self.names.len() {
                out.push_str(&format!(",{:.12e}", self.traces[i][c]));
            }
            out.push('\n');
        }
        out
    }
}

/// Convenience wrapper: invariants of a curve in the chosen mode.
pub fn projective_invariants(
    curve: &ProjectiveCurve,
    mode: SymmetryMode,
) -> Result<InvariantTraces, FrameError> {
    let ctx = ProjectiveContext::new(curve.k, mode)?;
    ctx.invariants(curve)
}

/// Reparametrized invariant data in the projective parameter.
#[derive(Debug, Clone)]
pub struct ProjectiveParameter {
    /// tau(t_j): the projective parameter along the original grid
    pub tau: Vec<f64>,
    /// invariant traces as densities in tau: theta_i (dtau)^i
    pub traces: Vec<Vec<f64>>,
    pub names: Vec<String>,
}

/// Fixes the projective parameter of a curve from its reduced connection:
/// a Riccati gauge in the raising direction kills the degree-1 residual, a
/// diagonal gauge kills the degree-0 residual, and the parameter tau
/// integrates the induced rescaling of x. Only meaningful in unparametrized
/// mode where sigma is spanned by the triple's h and y.
pub fn fix_projective_parameter(
    ctx: &ProjectiveContext,
    inv: &InvariantTraces,
) -> Result<ProjectiveParameter, FrameError> {
    let algebra = &ctx.algebra;
    let x_el = algebra
        .element(ctx.sg.x.clone())
        .map_err(FrameError::Algebra)?;
    let triple = complete_sl2(algebra, &x_el).map_err(FrameError::Algebra)?;
    let h_f64: Vec<f64> = triple.h.coeffs.iter().map(to_f64).collect();
    let y_f64: Vec<f64> = triple.y.coeffs.iter().map(to_f64).collect();
    let n = inv.result.sigma_trace.len();
    let dt = inv.result.dt;
    // sigma = sigma_h h + sigma_y y, exact least squares on the (h, y) pair
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let g_hh = dot(&h_f64, &h_f64);
    let g_hy = dot(&h_f64, &y_f64);
    let g_yy = dot(&y_f64, &y_f64);
    let det = g_hh * g_yy - g_hy * g_hy;
    let mut sigma_h = vec![0.0; n];
    let mut sigma_y = vec![0.0; n];
    for (i, s) in inv.result.sigma_trace.iter().enumerate() {
        let bh = dot(s, &h_f64);
        let by = dot(s, &y_f64);
        sigma_h[i] = (bh * g_yy - by * g_hy) / det;
        sigma_y[i] = (g_hh * by - g_hy * bh) / det;
    }
    // Riccati phi' = phi^2 - sigma_y, phi(0) = 0, RK4 with cubic interpolation
    let interp = |f: &[f64], s: f64| -> f64 {
        // s in grid units; cubic through the 4 nearest nodes
        let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let xi = s - base as f64;
        let (f0, f1, f2, f3) = (f[base], f[base + 1], f[base + 2], f[base + 3]);
        let d1 = f1 - f0;
        let d2 = f2 - 2.0 * f1 + f0;
        let d3 = f3 - 3.0 * f2 + 3.0 * f1 - f0;
        f0 + d1 * xi + d2 * xi * (xi - 1.0) / 2.0 + d3 * xi * (xi - 1.0) * (xi - 2.0) / 6.0
    };
    let mut phi = vec![0.0; n];
    for i in 0..n - 1 {
        let s0 = i as f64;
        let f = |s: f64, p: f64| -> f64 { p * p - interp(&sigma_y, s) };
        let k1 = f(s0, phi[i]);
        let k2 = f(s0 + 0.5, phi[i] + 0.5 * dt * k1);
        let k3 = f(s0 + 0.5, phi[i] + 0.5 * dt * k2);
        let k4 = f(s0 + 1.0, phi[i] + dt * k3);
        phi[i + 1] = phi[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !phi[i + 1].is_finite() {
            return Err(FrameError::InconsistentReduction { degree: 1 });
        }
    }
    // psi' = -(sigma_h - phi)
    let integrand: Vec<f64> = sigma_h
        .iter()
        .zip(&phi)
        .map(|(sh, p)| -(sh - p))
        .collect();
    let psi = cumulative_integral(&integrand, dt);
    // tau' = exp(2 psi)
    let rho: Vec<f64> = psi.iter().map(|p| (2.0 * p).exp()).collect();
    let tau = cumulative_integral(&rho, dt);
    // densities: theta_{i+1} scales by exp(-2(i+1) psi)
    let mut traces = Vec::with_capacity(n);
    for node in 0..n {
        let mut row = Vec::with_capacity(inv.names.len());
        for (c, _) in inv.names.iter().enumerate() {
            let weight = (c + 3) as f64; // theta_3 first
            row.push(inv.traces[node][c] * (-2.0 * weight * psi[node]).exp());
        }
        traces.push(row);
    }
    Ok(ProjectiveParameter {
        tau,
        traces,
        names: inv.names.clone(),
    })
}
