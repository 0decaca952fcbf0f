//! Complex matrix algebra and two-qubit state primitives.

mod density;
mod eigen;
mod matrix;

pub use density::{
    apply_local_unitary, partial_trace, partial_transpose, partial_transpose_matrix,
    relative_entropy, states, von_neumann_entropy, DensityMatrix, Qubit, HERMITIAN_TOL, PSD_TOL,
    TRACE_TOL, UNITARY_TOL, ZERO_CUTOFF,
};
pub use eigen::{herm_eig, Spectrum};
pub(crate) use eigen::{symmetric3_max, symmetric3_top};
pub use matrix::{kron, pauli, ComplexMatrix, C64, I, ONE, ZERO};
