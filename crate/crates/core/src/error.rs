//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("elements belong to different algebras ({0} vs {1})")]
    AlgebraMismatch(String, String),
    #[error("coefficient vector has length {got}, algebra dimension is {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("element is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: i64 },
    #[error("element is zero where a nonzero element is required")]
    ZeroElement,
    #[error("invalid constructor input: {0}")]
    BadConstructor(String),
    #[error("no sl2 completion: the graded linear system for {stage} is inconsistent")]
    NoSl2Solution { stage: &'static str },
    #[error("restricted Killing form is degenerate; radical dimension {radical_dim}")]
    DegenerateRestrictedKilling { radical_dim: usize },
    #[error("subspace is not abelian: [v{i}, v{j}] != 0")]
    NotAbelian { i: usize, j: usize },
    #[error("subspace lies outside the expected graded component")]
    WrongDegree,
    #[error("malformed algebra data: {0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("degenerate frame at node {node}: |det| = {det:.3e}")]
    DegenerateFrame { node: usize, det: f64 },
    #[error("negative frame determinant with even frame size; negate the lift and retry")]
    OrientationObstruction,
    #[error("connection is not of the expected type: degree -1 part differs from x by {dev:.3e}")]
    TypeViolation { dev: f64 },
    #[error("reduction solve inconsistent at degree {degree} (normalization space invalid)")]
    InconsistentReduction { degree: i64 },
    #[error("grid too small: {got} nodes, need at least {need}")]
    GridTooSmall { got: usize, need: usize },
    #[error("invariants need dimension k >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("kernel dimension {dim} > 1: curve too degenerate or grid too small")]
    KernelAmbiguous { dim: usize },
    #[error("cubic classification needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("three-form compatibility needs k = 6, got {0}")]
    WrongDimension(usize),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("derivative order {found} exceeds the equation order bound {max}")]
    DerivativeOrder { found: usize, max: usize },
    #[error("domain error evaluating {op}: argument {arg:.6e}")]
    Domain { op: &'static str, arg: f64 },
    #[error("non-finite state during integration at t = {t:.6}")]
    NonFinite { t: f64 },
    #[error("degenerate Wronskian: |W| = {wron:.3e} at node {node}")]
    DegenerateWronskian { wron: f64, node: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Duality(#[from] DualityError),
}

/// Umbrella error for CLI and cross-module plumbing.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Input(String),
}
