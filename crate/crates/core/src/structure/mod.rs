//! Combinatorial and linear-algebraic structure of a matrix and of its
//! scaling traces.

pub mod certificate;
pub mod kernel;
pub mod support;

pub use certificate::{extract_certificate, ProofCertificate};
pub use kernel::{nullspace_basis, nullspace_of_rows, orthogonality_check, OrthogonalityReport};
pub use support::{matching_size, support_witness, SupportWitness};
