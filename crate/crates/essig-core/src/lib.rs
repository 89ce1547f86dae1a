//! Expected signatures of stopped stochastic processes, computed exactly
//! and by Monte Carlo.
//!
//! The exact side works in the truncated free tensor algebra over exact
//! rationals: the expected signature of planar Brownian motion stopped at
//! the first exit from the unit disk is a field of polynomial coefficients
//! obtained by a level-by-level Poisson recursion ([`disk`]); the
//! one-dimensional analogue on `[-1, 1]` has a closed form and an ODE
//! recursion that must agree ([`interval`]); the simple random walk on a
//! finite lattice domain is solved by discrete Dirichlet problems
//! ([`lattice`]). The stochastic side ([`mc`]) simulates Brownian exit
//! paths, builds their truncated signatures, and estimates the same
//! quantities with standard errors, serving as an independent oracle for
//! the exact solvers.

pub mod disk;
pub mod interval;
pub mod lattice;
pub mod linsolve;
pub mod mc;
pub mod polyring;
pub mod scalar;
pub mod tensor;
pub mod word;

pub use polyring::BivarPoly;
pub use scalar::{Rational, Scalar, ScalarKind};
pub use tensor::{TensorError, TruncatedTensor};
pub use word::Word;
