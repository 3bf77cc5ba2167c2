//! Symmetry algebras, canonical moving frames and differential invariants of
//! curves in generalized flag varieties.
//!
//! The crate has two halves that meet in the middle:
//!
//! * an exact-arithmetic half ([`algebra`], [`subspace`], [`structure`],
//!   [`normalization`], [`cohomology`]) that builds graded semisimple Lie
//!   algebras (`sl`, `so`/`sp`, split `G2` via octonion derivations), computes
//!   symmetry algebras of flat curves degree by degree, and constructs the
//!   normalization spaces `W` used as moving-frame gauge conditions — all over
//!   arbitrary-precision rationals so rank decisions are exact;
//! * a sampled-numerics half ([`frames`], [`duality`], [`ode`]) that takes a
//!   discretized curve or ODE, pulls back the Maurer-Cartan form along an
//!   osculating frame, reduces it to `W`-normal form by successive nilpotent
//!   gauges, and reads off invariant traces (Wilczynski invariants for
//!   projective curves), compatible bilinear/3-form structures, and the
//!   conformal / symplectic / G2 verdict for the solution space of an ODE.

pub mod algebra;
pub mod cohomology;
pub mod duality;
pub mod error;
pub mod fd;
pub mod frames;
pub mod g2;
pub mod linalg;
pub mod normalization;
pub mod octonion;
pub mod ode;
pub mod rat;
pub mod structure;
pub mod subspace;

pub use algebra::{AlgebraElement, GradedAlgebra, Parity};
pub use error::{AlgebraError, CoreError, DualityError, ExprError, FrameError};
pub use normalization::{ComplementCertificate, NormalizationSpace};
pub use structure::{Sl2Triple, SymmetryAlgebra, SymmetryMode};
pub use subspace::GradedSubspace;
