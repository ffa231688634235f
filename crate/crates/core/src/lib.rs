//! Sparse-state quantum circuit simulation with top-k truncation in an adaptively
//! rotated product basis.
//!
//! The state is held as the `k` largest amplitudes of `ψ̃ = U† ψ`, where
//! `U = ⊗ U_j` is a per-qubit [`BasisFrame`]. Gates are conjugated into that frame
//! before application, and the frame is periodically re-chosen from single-qubit
//! reduced density matrices whenever doing so lowers the participation ratio.

pub mod basis_opt;
pub mod circuits;
pub mod error;
pub mod estimators;
pub mod gates;
pub mod hashtable;
pub mod heuristics;
pub mod linalg;
pub mod propagation;
pub mod rdm;
pub mod reference;
pub mod state;
pub mod stats;

pub use basis_opt::{basis_optimize, two_qubit_optimize, OptimizeReport};
pub use circuits::{generate_circuit, Circuit, Family, FamilyParams};
pub use error::{Error, Result};
pub use gates::Gate;
pub use linalg::{Mat2, Mat4, C64};
pub use propagation::{run, BasisFrame, Mode, RunOutput, RunRecord, SimConfig, TruncationRule};
pub use reference::{dense_simulate, fidelity, DenseState};
pub use state::{SparseState, TruncationEvent};
