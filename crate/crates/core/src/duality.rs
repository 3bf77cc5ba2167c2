//! Compatibility of projective curves with bilinear forms and 3-forms, and
//! the binary-cubic orbit classification for G2/P2 tangent directions.
//!
//! A non-degenerate curve is compatible with a bilinear form b when its
//! osculating flag pairs isotropically: b(v_a, v_b) = 0 whenever
//! a + b <= k-1, which makes b(gamma^(i)) the annihilator of
//! gamma^(k-1-i) and exhibits the curve as self-dual. The linear system
//! over the entries of b is assembled from every grid node; a clean
//! one-dimensional kernel with a nondegenerate representative decides
//! compatibility, with parity read off rather than imposed.

use crate::error::DualityError;
use crate::frames::{osculating_frame, ProjectiveCurve};
use crate::g2::{g2_case_setup, G2Case};
use crate::linalg::{singular_kernel, sym_eigen};
use crate::normalization::{
    generic_complement, invariant_complement_certificate, is_invariant, ComplementCertificate,
};
use crate::structure::{symmetry_algebra, SymmetryMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormParity {
    Symmetric,
    Skew,
}

/// A bilinear form on R^{k+1} recovered from curve data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearForm {
    pub matrix: Vec<Vec<f64>>,
    pub parity: FormParity,
    pub nondegenerate: bool,
    pub condition_number: f64,
    /// max |b(v_a, v_b)| over the assembled conditions, relative to
    /// |b| |frame|^2
    pub residual: f64,
}

/// An alternating 3-form on R^7 recovered from curve data, with the
/// bilinear form it induces through the volume identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeForm {
    /// coefficients on e_a ^ e_b ^ e_c for a < b < c, lexicographic
    pub coefficients: Vec<f64>,
    pub b_matrix: Vec<Vec<f64>>,
    /// (positive, negative) inertia of the induced form
    pub signature: (usize, usize),
    pub residual: f64,
}

/// Ratio threshold deciding numerical kernel dimensions.
const KERNEL_GAP: f64 = 1e6;

/// Splits singular values (descending) at the largest gap; returns the
/// kernel dimension, or 0 when no gap reaches the threshold.
fn kernel_dimension(svals: &[f64]) -> usize {
    let mut best = (0.0f64, 0usize);
    for i in 0..svals.len() - 1 {
        let denom = svals[i + 1].max(f64::MIN_POSITIVE);
        let ratio = svals[i] / denom;
        if ratio > best.0 {
            best = (ratio, i + 1);
        }
    }
    if best.0 >= KERNEL_GAP {
        svals.len() - best.1
    } else {
        0
    }
}

/// Unit-Frobenius normalization with the first significant entry positive.
fn normalize_sign_scale(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let first = v.iter().find(|x| x.abs() > 1e-8 * scale);
    let sign = if first.is_some_and(|x| *x < 0.0) { -1.0 } else { 1.0 };
    for x in v.iter_mut() {
        *x *= sign / norm;
    }
}

/// Searches for a nondegenerate bilinear form making the osculating flag of
/// the curve isotropic. Returns `Ok(None)` when the kernel is empty, the
/// representative is degenerate, or its parity is mixed; fails with
/// `KernelAmbiguous` when the kernel has dimension above one.
pub fn find_compatible_bilinear(
    curve: &ProjectiveCurve,
) -> Result<Option<BilinearForm>, DualityError> {
    let k = curve.k;
    let m = (k + 1) * (k + 1);
    if curve.n() < m {
        return Err(DualityError::Frame(crate::error::FrameError::GridTooSmall {
            got: curve.n(),
            need: m,
        }));
    }
    let frame = osculating_frame(curve)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut frame_scale = 0.0f64;
    for mat in &frame.frames {
        for col in 0..=k {
            for row in 0..=k {
                frame_scale = frame_scale.max(mat[row][col].abs());
            }
        }
    }
    for mat in &frame.frames {
        for a in 0..=k {
            for b in 0..=k {
                if a + b > k - 1 {
                    continue;
                }
                // row of coefficients for b_{ij}: v_a[i] v_b[j]
                let mut row = vec![0.0; m];
                for i in 0..=k {
                    for j in 0..=k {
                        row[i * (k + 1) + j] = mat[i][a] * mat[j][b];
                    }
                }
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for x in row.iter_mut() {
                        *x /= norm;
                    }
                }
                rows.push(row);
            }
        }
    }
    let (svals, vecs) = singular_kernel(&rows);
    match kernel_dimension(&svals) {
        0 => Ok(None),
        1 => {
            let mut entries = vecs.last().unwrap().clone();
            normalize_sign_scale(&mut entries);
            let matrix: Vec<Vec<f64>> = (0..=k)
                .map(|i| (0..=k).map(|j| entries[i * (k + 1) + j]).collect())
                .collect();
            // nondegeneracy and parity
            let (bsv, _) = singular_kernel(&matrix);
            let smax = bsv[0];
            let smin = bsv[bsv.len() - 1];
            let nondegenerate = smin > 1e-6 * smax;
            let sym_dev: f64 = (0..=k)
                .flat_map(|i| (0..=k).map(move |j| (i, j)))
                .map(|(i, j)| (matrix[i][j] - matrix[j][i]).abs())
                .fold(0.0, f64::max);
            let skew_dev: f64 = (0..=k)
                .flat_map(|i| (0..=k).map(move |j| (i, j)))
                .map(|(i, j)| (matrix[i][j] + matrix[j][i]).abs())
                .fold(0.0, f64::max);
            let parity = if sym_dev <= 1e-8 {
                Some(FormParity::Symmetric)
            } else if skew_dev <= 1e-8 {
                Some(FormParity::Skew)
            } else {
                None
            };
            let (Some(parity), true) = (parity, nondegenerate) else {
                return Ok(None);
            };
            // residual against the raw (unnormalized) conditions
            let mut residual = 0.0f64;
            for mat in &frame.frames {
                for a in 0..=k {
                    for b in 0..=k {
                        if a + b > k - 1 {
                            continue;
                        }
                        let mut acc = 0.0;
                        for i in 0..=k {
                            for j in 0..=k {
                                acc += mat[i][a] * matrix[i][j] * mat[j][b];
                            }
                        }
                        residual = residual.max(acc.abs());
                    }
                }
            }
            residual /= frame_scale * frame_scale;
            Ok(Some(BilinearForm {
                matrix,
                parity,
                nondegenerate,
                condition_number: smax / smin.max(f64::MIN_POSITIVE),
                residual,
            }))
        }
        dim => Err(DualityError::KernelAmbiguous { dim }),
    }
}

/// Lexicographic triples a < b < c in 0..7.
fn triples7() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity(35);
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// Full antisymmetric table from 35 lexicographic coefficients.
fn three_form_table(coeffs: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let mut t = vec![vec![vec![0.0; 7]; 7]; 7];
    for (idx, &(a, b, c)) in triples7().iter().enumerate() {
        let v = coeffs[idx];
        let perms: [(usize, usize, usize, f64); 6] = [
            (a, b, c, 1.0),
            (b, c, a, 1.0),
            (c, a, b, 1.0),
            (b, a, c, -1.0),
            (a, c, b, -1.0),
            (c, b, a, -1.0),
        ];
        for (i, j, l, s) in perms {
            t[i][j][l] = s * v;
        }
    }
    t
}

/// Volume coefficient of i_{e_a} W ^ i_{e_b} W ^ W for a float 3-form table,
/// by antisymmetrization over S_7 (the induced bilinear form up to scale).
fn wedge_b(table: &[Vec<Vec<f64>>], a: usize, b: usize) -> f64 {
    fn go(
        table: &[Vec<Vec<f64>>],
        a: usize,
        b: usize,
        perm: &mut [usize; 7],
        k: usize,
        total: &mut f64,
    ) {
        if k == 7 {
            let f = table[a][perm[0]][perm[1]];
            if f == 0.0 {
                return;
            }
            let g = table[b][perm[2]][perm[3]];
            if g == 0.0 {
                return;
            }
            let h = table[perm[4]][perm[5]][perm[6]];
            if h == 0.0 {
                return;
            }
            let mut sign = 1.0;
            for i in 0..7 {
                for j in i + 1..7 {
                    if perm[i] > perm[j] {
                        sign = -sign;
                    }
                }
            }
            *total += sign * f * g * h;
            return;
        }
        for i in k..7 {
            perm.swap(k, i);
            go(table, a, b, perm, k + 1, total);
            perm.swap(k, i);
        }
    }
    let mut perm = [0usize, 1, 2, 3, 4, 5, 6];
    let mut total = 0.0;
    go(table, a, b, &mut perm, 0, &mut total);
    total / 24.0
}

/// Searches for an alternating 3-form with Omega(v0, v0'', .) = 0 along the
/// curve whose induced bilinear form is nondegenerate of split type (the
/// open-orbit test: the compact-stabilizer orbit gives a definite form and
/// is rejected).
pub fn find_compatible_three_form(
    curve: &ProjectiveCurve,
) -> Result<Option<ThreeForm>, DualityError> {
    if curve.k != 6 {
        return Err(DualityError::WrongDimension(curve.k));
    }
    let frame = osculating_frame(curve)?;
    let trips = triples7();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for mat in &frame.frames {
        let u: Vec<f64> = (0..7).map(|i| mat[i][0]).collect();
        let v: Vec<f64> = (0..7).map(|i| mat[i][2]).collect();
        for m in 0..7 {
            // coefficient of W_{abc} in W(u, v, e_m)
            let mut row = vec![0.0; 35];
            for (idx, &(a, b, c)) in trips.iter().enumerate() {
                let coeff = if m == c {
                    u[a] * v[b] - u[b] * v[a]
                } else if m == b {
                    -(u[a] * v[c] - u[c] * v[a])
                } else if m == a {
                    u[b] * v[c] - u[c] * v[b]
                } else {
                    0.0
                };
                row[idx] = coeff;
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                for x in row.iter_mut() {
                    *x /= norm;
                }
                rows.push(row);
            }
        }
    }
    let (svals, vecs) = singular_kernel(&rows);
    match kernel_dimension(&svals) {
        0 => Ok(None),
        1 => {
            let mut coeffs = vecs.last().unwrap().clone();
            normalize_sign_scale(&mut coeffs);
            let table = three_form_table(&coeffs);
            let mut b_matrix = vec![vec![0.0; 7]; 7];
            for a in 0..7 {
                for b in a..7 {
                    let v = wedge_b(&table, a, b);
                    b_matrix[a][b] = v;
                    b_matrix[b][a] = v;
                }
            }
            let (eigs, _) = sym_eigen(&b_matrix);
            let emax = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            let pos = eigs.iter().filter(|&&e| e > 1e-6 * emax).count();
            let neg = eigs.iter().filter(|&&e| e < -1e-6 * emax).count();
            if pos + neg < 7 {
                return Ok(None); // degenerate induced form
            }
            if (pos as i64 - neg as i64).abs() != 1 {
                return Ok(None); // definite-type orbit, not the split one
            }
            // residual of the defining conditions
            let mut residual = 0.0f64;
            let mut frame_scale = 0.0f64;
            for mat in &frame.frames {
                let u: Vec<f64> = (0..7).map(|i| mat[i][0]).collect();
                let v: Vec<f64> = (0..7).map(|i| mat[i][2]).collect();
                for x in u.iter().chain(v.iter()) {
                    frame_scale = frame_scale.max(x.abs());
                }
                for m in 0..7 {
                    let mut acc = 0.0;
                    for i in 0..7 {
                        for j in 0..7 {
                            acc += table[i][j][m] * u[i] * v[j];
                        }
                    }
                    residual = residual.max(acc.abs());
                }
            }
            residual /= frame_scale * frame_scale;
            Ok(Some(ThreeForm {
                coefficients: coeffs,
                b_matrix,
                signature: (pos, neg),
                residual,
            }))
        }
        dim => Err(DualityError::KernelAmbiguous { dim }),
    }
}

/// Orbits of binary cubics under GL(2, R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicOrbit {
    /// triple root
    TripleRoot = 1,
    /// one simple and one double root
    DoubleRoot = 2,
    /// one real root and a complex pair
    OneReal = 3,
    /// three distinct real roots
    ThreeReal = 4,
}

impl CubicOrbit {
    pub fn label(&self) -> u8 {
        *self as u8
    }
}

/// Classifies the binary cubic a t^3 + b t^2 + c t + d (roots counted
/// projectively, so a vanishing leading coefficient contributes a root at
/// infinity) through its discriminant and Hessian, with tolerance-scaled
/// thresholds.
pub fn classify_cubic(coeffs: &[f64; 4]) -> Result<CubicOrbit, DualityError> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Err(DualityError::ZeroPolynomial);
    }
    let a = coeffs[0] / scale;
    let b = coeffs[1] / scale;
    let c = coeffs[2] / scale;
    let d = coeffs[3] / scale;
    let disc = 18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c
        - 4.0 * a * c.powi(3)
        - 27.0 * a * a * d * d;
    let tol = 1e-9;
    if disc > tol {
        return Ok(CubicOrbit::ThreeReal);
    }
    if disc < -tol {
        return Ok(CubicOrbit::OneReal);
    }
    // repeated root: the Hessian covariant vanishes exactly for a cube
    let h0 = b * b - 3.0 * a * c;
    let h1 = b * c - 9.0 * a * d;
    let h2 = c * c - 3.0 * b * d;
    if h0.abs().max(h1.abs()).max(h2.abs()) <= tol {
        Ok(CubicOrbit::TripleRoot)
    } else {
        Ok(CubicOrbit::DoubleRoot)
    }
}

/// Reference classification by explicit root finding and clustering: solves
/// the homogenized cubic (roots at infinity when the leading coefficient
/// collapses) and reads the multiplicity pattern. Independent of the
/// discriminant route; used as its oracle.
pub fn classify_cubic_by_roots(coeffs: &[f64; 4]) -> Result<CubicOrbit, DualityError> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Err(DualityError::ZeroPolynomial);
    }
    let v: Vec<f64> = coeffs.iter().map(|c| c / scale).collect();
    // roots as (re, im, at_infinity)
    let mut roots: Vec<(f64, f64, bool)> = Vec::new();
    let eps = 1e-12;
    if v[0].abs() <= eps {
        roots.push((0.0, 0.0, true));
        if v[1].abs() <= eps {
            roots.push((0.0, 0.0, true));
            if v[2].abs() <= eps {
                roots.push((0.0, 0.0, true));
            } else {
                roots.push((-v[3] / v[2], 0.0, false));
            }
        } else {
            // quadratic b t^2 + c t + d
            let disc = v[2] * v[2] - 4.0 * v[1] * v[3];
            if disc >= 0.0 {
                let s = disc.sqrt();
                roots.push(((-v[2] + s) / (2.0 * v[1]), 0.0, false));
                roots.push(((-v[2] - s) / (2.0 * v[1]), 0.0, false));
            } else {
                let s = (-disc).sqrt();
                roots.push((-v[2] / (2.0 * v[1]), s / (2.0 * v[1]), false));
                roots.push((-v[2] / (2.0 * v[1]), -s / (2.0 * v[1]), false));
            }
        }
    } else {
        // depressed cubic: t = y - b/(3a)
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        let shift = -b / (3.0 * a);
        let p = (3.0 * a * c - b * b) / (3.0 * a * a);
        let q = (2.0 * b.powi(3) - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a.powi(3));
        let disc = -4.0 * p.powi(3) - 27.0 * q * q;
        if disc >= 0.0 {
            // three real roots (possibly repeated): trigonometric form
            if p.abs() <= 1e-14 {
                // y^3 = -q
                let y = (-q).cbrt();
                for _ in 0..3 {
                    roots.push((y + shift, 0.0, false));
                }
            } else {
                let r = (-p / 3.0).sqrt();
                let arg = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0);
                let theta = arg.acos();
                for m in 0..3 {
                    let y = 2.0 * r * (theta / 3.0 - 2.0 * std::f64::consts::PI * m as f64 / 3.0)
                        .cos();
                    roots.push((y + shift, 0.0, false));
                }
            }
        } else {
            // one real root, complex pair: Cardano
            let inner = (q * q / 4.0 + p.powi(3) / 27.0).sqrt();
            let u = (-q / 2.0 + inner).cbrt();
            let w = if u.abs() > 1e-300 { -p / (3.0 * u) } else { (-q / 2.0 - inner).cbrt() };
            let y1 = u + w;
            let re = -y1 / 2.0;
            let im = (3.0f64.sqrt() / 2.0) * (u - w).abs();
            roots.push((y1 + shift, 0.0, false));
            roots.push((re + shift, im, false));
            roots.push((re + shift, -im, false));
        }
    }
    // cluster with scaled tolerance
    let close = |x: &(f64, f64, bool), y: &(f64, f64, bool)| -> bool {
        if x.2 || y.2 {
            return x.2 && y.2;
        }
        let scale = 1.0 + x.0.abs() + x.1.abs() + y.0.abs() + y.1.abs();
        ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt() <= 1e-5 * scale
    };
    let mut mults: Vec<(usize, (f64, f64, bool))> = Vec::new();
    'outer: for r in roots {
        for (m, rep) in mults.iter_mut() {
            if close(rep, &r) {
                *m += 1;
                continue 'outer;
            }
        }
        mults.push((1, r));
    }
    let pattern: Vec<usize> = {
        let mut p: Vec<usize> = mults.iter().map(|(m, _)| *m).collect();
        p.sort_unstable_by(|x, y| y.cmp(x));
        p
    };
    let any_complex = mults
        .iter()
        .any(|(_, r)| !r.2 && r.1.abs() > 1e-7 * (1.0 + r.0.abs()));
    Ok(match (pattern.as_slice(), any_complex) {
        ([3], _) => CubicOrbit::TripleRoot,
        ([2, 1], _) => CubicOrbit::DoubleRoot,
        (_, true) => CubicOrbit::OneReal,
        ([1, 1, 1], false) => CubicOrbit::ThreeReal,
        _ => CubicOrbit::DoubleRoot,
    })
}

/// Structural report for a named G2 curve type: symmetry-algebra dimensions,
/// the codimension data of sg + [x, pg] in the parabolic, the normalization
/// space and its invariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct G2CaseReport {
    pub case: String,
    pub algebra: String,
    pub sg_dim: usize,
    pub sg_graded_dims: Vec<(i64, usize)>,
    pub reductive: bool,
    /// per degree >= 0: codimension of sg_d + [x, g_{d+1}] in g_d
    pub codim_by_degree: Vec<(i64, usize)>,
    pub w_dim: usize,
    pub w_labels: Vec<String>,
    pub w_invariant: bool,
    /// certificate outcome: exists / none / unknown
    pub certificate: String,
}

pub fn g2_case_report(case: G2Case) -> G2CaseReport {
    let (algebra, x) = g2_case_setup(case);
    let x_el = algebra.element(x).expect("case element");
    let sg = symmetry_algebra(&algebra, &x_el, SymmetryMode::Unparametrized)
        .expect("case x is homogeneous of degree -1");
    let certificate = invariant_complement_certificate(&sg);
    let (w, cert_tag) = match &certificate {
        ComplementCertificate::Exists(ws) => (ws.clone(), "exists"),
        ComplementCertificate::None(_) => (generic_complement(&sg), "none"),
        ComplementCertificate::Unknown(_) => (generic_complement(&sg), "unknown"),
    };
    let codim_by_degree: Vec<(i64, usize)> = algebra
        .degrees()
        .into_iter()
        .filter(|&d| d >= 0)
        .map(|d| (d, w.w.dim_in_degree(d)))
        .filter(|(_, c)| *c > 0)
        .collect();
    G2CaseReport {
        case: case.name().to_string(),
        algebra: algebra.name.clone(),
        sg_dim: sg.subspace.dim(),
        sg_graded_dims: sg.subspace.graded_dims(),
        reductive: sg.reductive_flag,
        codim_by_degree,
        w_dim: w.w.dim(),
        w_labels: w.w.basis_labels(),
        w_invariant: is_invariant(&w.w, &sg),
        certificate: cert_tag.to_string(),
    }
}
