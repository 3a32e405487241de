//! Best separable approximation of Bell-diagonal two-qubit states.
//!
//! The crate computes the Lewenstein–Sanpera decomposition
//! `ρ = λ ρ_s + (1 − λ) |ψ⟩⟨ψ|` of a Bell-diagonal state in closed form,
//! checks optimality of arbitrary decompositions, transforms decompositions
//! under local filtering, and provides brute-force numerical oracles for
//! cross-checking.
//!
//! Modules, bottom-up:
//!
//! - [`matcore`]: fixed-size complex matrices, Hermitian eigensolver, partial transpose.
//! - [`bdstate`]: Bell-diagonal states in weight (`p`) and correlation (`t`) coordinates.
//! - [`lsd`]: closed-form decomposition and product-state ensembles.
//! - [`measures`]: concurrence and relative entropy of entanglement.
//! - [`optimality`]: optimality verification of a given decomposition.
//! - [`lqcc`]: local filtering and its action on states and decompositions.
//! - [`oracle`]: numerical searches used as independent references.

pub mod bdstate;
pub mod lqcc;
pub mod lsd;
pub mod matcore;
pub mod measures;
pub mod optimality;
pub mod oracle;

pub use bdstate::{BdError, BdState, BellLabel, PauliFrame};
pub use lsd::{bsa_bd, reconstruct, EnsembleTerm, LsDecomposition, LsSplit, LsdError};
pub use matcore::{Ket2, Ket4, Mat2, Mat4, MatError, C64};
