//! Finite-dimensional quantum mechanics carried out in a real Kähler space.
//!
//! A complex state ψ = q + ip ∈ ℂⁿ is stored as the stacked real vector
//! (q; p) ∈ ℝ²ⁿ with complex structure J(q; p) = (−p; q), metric g and
//! symplectic form ω. Complex operators lift to real block matrices
//! Γ(X + iY) = [[X, −Y], [Y, X]], and Schrödinger evolution becomes a linear
//! Hamiltonian flow that is both symplectic and orthogonal.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod composite;
pub mod continuum;
pub mod dynamics;
pub mod ergodic;
pub mod error;
pub mod kahler;
pub mod linalg;
pub mod operator;
pub mod sampling;

pub use error::{KahlerError, Result};
pub use kahler::KahlerState;
pub use operator::{ComplexOperator, KahlerOperator};
