//! Resonances of spherically symmetric potentials located in the complex
//! charge plane.
//!
//! The radial equation with a Coulomb term `Z/r` is recast as an eigenvalue
//! problem for the charge `Z` at fixed (complex) energy `E`. The operator is
//! represented in an orthonormal Laguerre basis, complex-scaled through the
//! basis length scale, and diagonalized. Tracking the eigenvalues `Z_n(E)` as
//! `E` varies gives trajectories in the `Z` plane; real-axis crossings at a
//! physical charge mark resonances, which are refined by Newton iteration in
//! complex `E`.
//!
//! Layout:
//! - [`potential`]: analytic potentials evaluated at complex radius
//! - [`quadrature`]: the Laguerre `J` matrix and the Gauss rule built from it
//! - [`hamiltonian`]: assembly of the rotated charge operator
//! - [`eigen`]: dense complex eigensolver and eigenvalue derivatives
//! - [`trajectory`]: energy sweeps and branch stitching
//! - [`resonance`]: crossing detection, refinement and stability checks
//! - [`io`]: run configuration and CSV / JSON / SVG writers

pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod matrix;
pub mod potential;
pub mod quadrature;
pub mod resonance;
pub mod trajectory;
pub mod tridiagonal;

pub use num_complex::Complex64;

pub use eigen::{eigen_decompose, eigenvalue_derivative, eigenvalues, EigenSet};
pub use error::{Error, Result};
pub use hamiltonian::{ChannelConfig, ChannelOperator};
pub use matrix::{CMatrix, Tridiagonal};
pub use potential::{PotentialModel, PotentialTerm};
pub use quadrature::QuadratureRule;
pub use resonance::{CrossingCandidate, RefineOptions, Resonance, StabilityGrid, StabilityReport};
pub use trajectory::{EnergyGrid, Trajectory};
