//! Entropy-inequality evaluation on four-factor pure states.
//!
//! A state `Ψ ∈ H_1 ⊗ H_2 ⊗ H_3 ⊗ H_4` is split two ways: Alice holds
//! factors `{1, 3}` and Bob `{2, 4}`, while the Schmidt decomposition is
//! taken across `12|34`. The inequality under test reads
//!
//! ```text
//! S(tr_24 |Ψ⟩⟨Ψ|)  ≥  Σ_α λ_α [ S(tr_2 |Φ¹²_α⟩⟨Φ¹²_α|) + S(tr_4 |Φ³⁴_α⟩⟨Φ³⁴_α|) ]
//! ```
//!
//! and the crate reports `gap = lhs - rhs` for a given decomposition, so a
//! negative gap certifies a violation.
//!
//! Modules, bottom-up:
//!
//! - [`tensor`]: factor shapes, pure states, permutations, partial traces.
//! - [`spectra`]: Jacobi eigensolver and SVD, von Neumann entropy.
//! - [`schmidt`]: Schmidt decompositions and their degenerate-block freedom.
//! - [`inequality`]: both sides of the inequality, the counterexample family
//!   and the right-hand-side maximizer.
//! - [`sampling`]: seeded Haar states/unitaries and batch scans.
//!
//! Factor positions are 0-based in the API; `{1, 3}` above is `[0, 2]`.

pub mod error;
pub mod inequality;
pub mod sampling;
pub mod schmidt;
pub mod spectra;
pub mod tensor;

pub use error::{Error, Result};
pub use inequality::{
    bell_basis, canonical_counterexample, deformed_counterexample, entangled_decomposition, gap,
    lhs, maximize_rhs, product_decomposition, rhs, DecompositionSource, FourFactorState, GapReport,
    MaximizeOptions, MaximizeOutcome,
};
pub use sampling::{derive_seed, haar_state, haar_unitary, scan, ScanReport, ScanRow};
pub use schmidt::{
    decomposition_from_basis, degenerate_blocks, rotate_block, schmidt_decompose,
    verify_decomposition, BipartiteSplit, DecompositionCheck, SchmidtDecomposition,
};
pub use spectra::{hermitian_eigen, svd, von_neumann_entropy, LogBase, Spectrum, Svd};
pub use tensor::{
    flatten_index, unflatten_index, CMatrix, DensityMatrix, FactorShape, PureState, C64,
};
