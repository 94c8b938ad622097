//! Finite elements for the lossy Helmholtz equation `-Δu + ζ²u = f` with the
//! Robin condition `∂ₙu + ζu = g`, plus tools that measure stability constants
//! and check frequency-splitting symbol bounds.

pub mod analysis;
pub mod assembly;
pub mod diskmesh;
pub mod exactsol;
pub mod femspace;
pub mod freqsplit;
pub mod linalg;
pub mod sparse;
pub mod study;
pub mod wavenumber;
