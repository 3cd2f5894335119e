//! Commutation-structure analysis for Pauli-sum Hamiltonians.
//!
//! The crate takes a Hamiltonian given as a weighted sum of Pauli strings and
//! answers three kinds of question about simulating `exp(-iHt)`:
//!
//! * how much destructive interference the commutation structure forces in
//!   the powers of `H` (the `alpha_m` cancellation parameters and their
//!   effective ratios, [`structure::CancellationReport`]),
//! * how small a truncated-Taylor segment error can be certified given that
//!   structure ([`bounds`]), including a modified truncation polynomial that
//!   trades a handful of extra mixing slots for two extra orders of accuracy
//!   ([`lcu::build_modified`]),
//! * and what the resulting mixing (select/prepare) plan costs in qubits and
//!   two-qubit gates ([`lcu::assemble_plan`], [`lcu::GateCost`]).
//!
//! Pairwise anticommuting sums are special-cased: their evolution collapses
//! to a single cosine plus one sine-weighted copy of each term, which
//! [`anticommuting`] exploits for exact schedules and power reductions.
//!
//! Everything claimed by the fast paths is cross-checked against dense
//! matrices in [`verify`]; the oracle side lives in [`oracle`] and is capped
//! at [`pauli::DEFAULT_DENSE_CAP`] qubits.
//!
//! All numeric code is generic over the scalar through [`scalar::Real`];
//! the `*64` aliases below pin the common `f64` instantiations.

pub mod anticommuting;
pub mod bounds;
pub mod error;
pub mod hamiltonian;
pub mod jordan_wigner;
pub mod lcu;
pub mod oracle;
pub mod pauli;
pub mod scalar;
pub mod structure;
pub mod summation;
pub mod symbolic;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::{Hamiltonian, Term};
pub use pauli::{Axis, DenseOperator, PauliKey, PauliString, DEFAULT_DENSE_CAP};
pub use scalar::{r64, Real};

/// `f64` Hamiltonian.
pub type Hamiltonian64 = hamiltonian::Hamiltonian<f64>;
/// `f64` commutation structure.
pub type CommutationStructure64 = structure::CommutationStructure<f64>;
/// `f64` cancellation report.
pub type CancellationReport64 = structure::CancellationReport<f64>;
/// `f64` bound inputs.
pub type BoundInputs64 = bounds::BoundInputs<f64>;
/// `f64` mixing plan.
pub type LcuPlan64 = lcu::LcuPlan<f64>;
/// `f64` dense operator.
pub type DenseOperator64 = pauli::DenseOperator<f64>;
/// `f64` symbolic Pauli accumulator.
pub type PauliMap64 = symbolic::PauliMap<f64>;
