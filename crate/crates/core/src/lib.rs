//! Spectral perturbation toolkit built around the Feshbach-Schur reduction.
//!
//! Given a dense real symmetric splitting `H = H0 + W` with a selected
//! isolated eigenvalue cluster of `H0`, the crate
//!
//! * reduces the eigenproblem to an `m x m` effective Hamiltonian that is
//!   nonlinear in the spectral parameter ([`fsmap`]),
//! * solves the resulting fixed-point equations for the perturbed
//!   eigenvalues and reconstructs full eigenvectors ([`fsmap`]),
//! * evaluates explicit smallness conditions and emits certified
//!   eigenvalue/eigenvector enclosures ([`certify`]),
//! * and applies the machinery to two-electron ions: hydrogenic orbitals
//!   ([`hydrogen`]), the log-radial product quadrature ([`quadrature`]) and
//!   the Coulomb pair constants plus ground-state energy bounds ([`helium`]).
//!
//! Everything is deterministic: fixed iteration orders, compensated sums and
//! a fixed-sweep Jacobi eigensolver ([`densela`]) make outputs bitwise
//! reproducible for identical inputs, independent of thread count.

pub mod certify;
pub mod densela;
pub mod fsmap;
pub mod helium;
pub mod hydrogen;
pub mod quadrature;
