//! ODE front end: expression parsing, symbolic differentiation, fixed-step
//! integration, linearization along solutions, and the detection of natural
//! conformal, symplectic and G2 structures on the solution space.

pub mod analysis;
pub mod expr;
pub mod solve;

pub use analysis::{
    generalized_wilczynski, linearize, structure_verdict, LinearizationPath, StructureKind,
    StructureVerdict, VerdictConfig,
};
pub use expr::{differentiate, evaluate, parse_expr, EvalEnv, ExprAst};
pub use solve::{integrate_ode, OdeProblem, SolutionGrid};
