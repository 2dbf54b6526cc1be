//! Correlation measures for few-qubit density matrices: mutual information,
//! measurement-based classical correlation, quantum discord, concurrence and
//! entanglement of formation, and their three-qubit totals under the two
//! standard ways of splitting total correlations into quantum and classical
//! parts.

pub mod discovery;
pub mod pairwise;
pub mod qmat;
pub mod states;
pub mod tripartite;

pub use qmat::{kron, partial_trace, trace_distance, CMatrix, Ket, QState, QmatError, C64};
