//! Classical fixed-step Runge-Kutta integration of y^(k+1) = f(x, y, ..., y^(k)),
//! optionally carrying the fundamental matrix of the linearization along the
//! trajectory. Fixed step keeps repeated runs bit-identical.

use crate::error::ExprError;
use crate::ode::expr::{differentiate, evaluate, parse_expr, EvalEnv, ExprAst, Var};

/// An ODE of order k+1 >= 3 solved for the highest derivative, with the
/// partials of f cached for linearization.
#[derive(Debug, Clone)]
pub struct OdeProblem {
    /// k + 1
    pub order: usize,
    pub f: ExprAst,
    /// d f / d y^(i) for i = 0..=k
    pub partials: Vec<ExprAst>,
}

impl OdeProblem {
    pub fn new(order: usize, f: ExprAst) -> Result<Self, ExprError> {
        if order < 3 {
            return Err(ExprError::Syntax {
                pos: 0,
                msg: format!("order must be at least 3, got {order}"),
            });
        }
        let k = order - 1;
        let partials = (0..=k).map(|i| differentiate(&f, Var::Y(i))).collect();
        Ok(OdeProblem { order, f, partials })
    }

    pub fn parse(order: usize, src: &str) -> Result<Self, ExprError> {
        let k = order.saturating_sub(1);
        let f = parse_expr(src, k)?;
        Self::new(order, f)
    }

    pub fn k(&self) -> usize {
        self.order - 1
    }
}

/// A solution sampled on a uniform grid: states are the full jets
/// (y, y', ..., y^(k)); `fundamental` are the matrices Z(t) with identity
/// initial jets, columns indexed by the initial-jet slot.
#[derive(Debug, Clone)]
pub struct SolutionGrid {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
    pub fundamental: Option<Vec<Vec<Vec<f64>>>>,
}

impl SolutionGrid {
    pub fn n(&self) -> usize {
        self.states.len()
    }
}

fn state_derivative(p: &OdeProblem, x: f64, state: &[f64]) -> Result<Vec<f64>, ExprError> {
    let m = p.order;
    let mut out = Vec::with_capacity(m);
    out.extend_from_slice(&state[1..m]);
    out.push(evaluate(&p.f, &EvalEnv { x, y: state })?);
    Ok(out)
}

/// Companion matrix of the linearization at a point of the trajectory.
fn linearization_matrix(p: &OdeProblem, x: f64, state: &[f64]) -> Result<Vec<Vec<f64>>, ExprError> {
    let m = p.order;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m - 1 {
        a[i][i + 1] = 1.0;
    }
    for (i, partial) in p.partials.iter().enumerate() {
        a[m - 1][i] = evaluate(partial, &EvalEnv { x, y: state })?;
    }
    Ok(a)
}

fn mat_mul_add(acc: &mut [Vec<f64>], a: &[Vec<f64>], b: &[Vec<f64>], w: f64) {
    let m = acc.len();
    for i in 0..m {
        for l in 0..m {
            let ail = a[i][l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                acc[i][j] += w * ail * b[l][j];
            }
        }
    }
}

/// Fixed-step RK4 from `t0` for `n` nodes (including the initial one).
/// When `with_fundamental` is set, the matrix ODE Z' = A(x, y(x)) Z with
/// Z(t0) = I rides along in the same Runge-Kutta stages.
pub fn integrate_ode(
    p: &OdeProblem,
    init: &[f64],
    t0: f64,
    dt: f64,
    n: usize,
    with_fundamental: bool,
) -> Result<SolutionGrid, ExprError> {
    let m = p.order;
    assert_eq!(init.len(), m, "initial jet must have length order");
    let mut states = Vec::with_capacity(n);
    let mut fundamental = if with_fundamental { Some(Vec::with_capacity(n)) } else { None };
    let mut y = init.to_vec();
    let mut z: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for step in 0..n {
        let x = t0 + step as f64 * dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(ExprError::NonFinite { t: x });
        }
        states.push(y.clone());
        if let Some(fs) = fundamental.as_mut() {
            fs.push(z.clone());
        }
        if step + 1 == n {
            break;
        }
        // RK4 stages for the state, and for Z when requested
        let k1 = state_derivative(p, x, &y)?;
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = state_derivative(p, x + 0.5 * dt, &y2)?;
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = state_derivative(p, x + 0.5 * dt, &y3)?;
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = state_derivative(p, x + dt, &y4)?;
        if with_fundamental {
            let a1 = linearization_matrix(p, x, &y)?;
            let a2 = linearization_matrix(p, x + 0.5 * dt, &y2)?;
            let a3 = linearization_matrix(p, x + 0.5 * dt, &y3)?;
            let a4 = linearization_matrix(p, x + dt, &y4)?;
            let zero = vec![vec![0.0; m]; m];
            let mut z1 = zero.clone();
            mat_mul_add(&mut z1, &a1, &z, 1.0);
            let mut zimm = z.clone();
            for i in 0..m {
                for j in 0..m {
                    zimm[i][j] += 0.5 * dt * z1[i][j];
                }
            }
            let mut z2 = zero.clone();
            mat_mul_add(&mut z2, &a2, &zimm, 1.0);
            let mut zimm = z.clone();
            for i in 0..m {
                for j in 0..m {
                    zimm[i][j] += 0.5 * dt * z2[i][j];
                }
            }
            let mut z3 = zero.clone();
            mat_mul_add(&mut z3, &a3, &zimm, 1.0);
            let mut zimm = z.clone();
            for i in 0..m {
                for j in 0..m {
                    zimm[i][j] += dt * z3[i][j];
                }
            }
            let mut z4 = zero;
            mat_mul_add(&mut z4, &a4, &zimm, 1.0);
            for i in 0..m {
                for j in 0..m {
                    z[i][j] +=
                        dt / 6.0 * (z1[i][j] + 2.0 * z2[i][j] + 2.0 * z3[i][j] + z4[i][j]);
                }
            }
        }
        for i in 0..m {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(SolutionGrid {
        t0,
        dt,
        states,
        fundamental,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_f64;

    #[test]
    fn polynomial_solution_is_machine_exact() {
        // y''' = 0, init (0, 1, 0): y(t) = t
        let p = OdeProblem::parse(3, "0").unwrap();
        let sol = integrate_ode(&p, &[0.0, 1.0, 0.0], 0.0, 0.01, 101, false).unwrap();
        for (i, s) in sol.states.iter().enumerate() {
            let t = i as f64 * 0.01;
            assert!((s[0] - t).abs() < 1e-14);
            assert!((s[1] - 1.0).abs() < 1e-14);
            assert!(s[2].abs() < 1e-14);
        }
    }

    #[test]
    fn wronskian_of_traceless_system_is_constant() {
        // z''' = z: companion trace 0, so det Z = 1 along the flow
        let p = OdeProblem::parse(3, "y").unwrap();
        let sol = integrate_ode(&p, &[1.0, 0.0, 0.0], 0.0, 0.005, 201, true).unwrap();
        for z in sol.fundamental.as_ref().unwrap() {
            assert!((det_f64(z) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rk4_fourth_order_on_nonlinear_equation() {
        // y''' = sin(y): Richardson step-halving on the endpoint
        let p = OdeProblem::parse(3, "sin(y)").unwrap();
        let run = |dt: f64| -> f64 {
            let n = (1.0 / dt) as usize + 1;
            let sol = integrate_ode(&p, &[0.3, -0.2, 0.1], 0.0, dt, n, false).unwrap();
            sol.states.last().unwrap()[0]
        };
        let y1 = run(0.02);
        let y2 = run(0.01);
        let y3 = run(0.005);
        let ratio = (y1 - y2).abs() / (y2 - y3).abs();
        assert!(ratio >= 14.0, "RK4 step-halving ratio {ratio}");
    }

    #[test]
    fn rejects_low_order_and_nonfinite() {
        assert!(OdeProblem::parse(2, "y").is_err());
        // y''' = y^2 with huge init blows up fast -> NonFinite
        let p = OdeProblem::parse(3, "y^2").unwrap();
        let r = integrate_ode(&p, &[50.0, 50.0, 50.0], 0.0, 0.5, 100, false);
        assert!(r.is_err(), "blow-up must surface as an error");
    }
}
