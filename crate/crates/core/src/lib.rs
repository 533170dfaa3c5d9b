//! Numerical laboratory for the security analysis of quantum key
//! distribution at desk scale.
//!
//! The crate is organized around the question "how much can an
//! eavesdropper learn about a parity bit?" and the machinery needed to
//! answer it:
//!
//! - [`hilbert`]: dense complex linear algebra over small multi-qubit
//!   spaces: states, density operators, tensor products, partial and
//!   operator-conditioned traces, Bloch vectors, POVM and Bell
//!   measurements.
//! - [`info`]: classical entropies, BSC/BEC mutual information, and
//!   optimal discrimination of two pure or equal-determinant mixed qubit
//!   states.
//! - [`parity`]: the information carried by the parity bit of an n-bit
//!   string of overlapping quantum signals, via block diagonalization of
//!   the parity density matrices.
//! - [`ecc`]: the same question when parities of substrings
//!   (error-correction data) have been announced; Hamming codes, syndrome
//!   decoding, and closed-form security bounds.
//! - [`attacks`]: explicit probe-signal gate models (translucent, weak
//!   swap, weak measurement), induced error rates, information-dependent
//!   reduced density matrices, and mixed-to-pure bounding constructions.
//! - [`protocol`]: seeded Monte Carlo runs of full key-distribution
//!   sessions (four-state, two-state, EPR, time-reversed EPR) with
//!   sifting, error estimation, Hamming correction, and parity-based
//!   privacy amplification.
//! - [`qec`]: repetition-code error reduction, the n-squared-qubit
//!   repetition/rotation/repetition quantum code, subspace projection and
//!   Zeno projection chains.
//!
//! All values are immutable after construction and every operation is a
//! pure function of its inputs; sampling operations take an explicit RNG
//! stream so results are reproducible bit for bit.

pub mod attacks;
pub mod ecc;
pub mod error;
pub mod hilbert;
pub mod info;
pub mod linalg;
pub mod parity;
pub mod protocol;
pub mod qec;
pub mod rng;
pub mod tol;

mod num;

pub use error::{Error, Result};
pub use tol::Tolerances;
