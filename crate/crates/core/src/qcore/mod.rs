//! Dense complex linear algebra for three qubits: states, spin observables,
//! Kronecker products, expectations, partial traces and a small Hermitian
//! eigensolver.

mod eigen;
mod matrix;
mod observable;
pub mod random;
mod state;

pub use eigen::{herm_eigen, herm_eigenvalues, HermEigen};
pub use matrix::{kron_2_2, kron_2_4, Mat2, Mat4, Mat8, SquareMatrix};
pub use observable::{
    expectation, spin_observable, tensor3, SingleQubitObservable, ThreeQubitOperator, UnitVector,
    HERMITIAN_TOL, IMAG_RESIDUE_TOL, PAULIS, PAULI_X, PAULI_Y, PAULI_Z,
};
pub use state::{
    basis_index, ghz_state, make_state, partial_trace, reduced_single, w_state, ComplexScalar,
    GhzClassParams, Qubit, QubitPair, ThreeQubitPureState, TwoQubitDensity, WClassParams,
    NORM_TOL,
};
