//! Riemannian geometry of the finite-dimensional symplectic group.
//!
//! The crate works with real `2n x 2n` matrices and the fixed complex structure
//! `J = [[0, -I], [I, 0]]`. It provides
//!
//! - dense matrix-function kernels ([`matfun`]),
//! - the group layer: membership predicates, Lie-algebra parities, the
//!   symplectic inverse and the congruence action on positive elements
//!   ([`sympgroup`]),
//! - four Riemannian structures with their geodesics and distances
//!   ([`metrics`]),
//! - sampled curves with numerical length and endpoint-fixed perturbations
//!   ([`curves`]),
//! - randomized verification suites producing JSON reports ([`verify`]),
//! - file formats and the command-line front end ([`io`], [`cli`]).
//!
//! Adjoints are transposes and `||.||_2` is the Frobenius norm of the real
//! representation throughout.

pub mod cli;
pub mod curves;
pub mod error;
pub mod io;
pub mod matfun;
pub mod metrics;
pub mod sympgroup;
pub mod verify;

pub use error::{Error, Result};
pub use matfun::{RealMatrix, SpectralTolerance};
pub use sympgroup::{
    ComplexStructure, Parity, PolarPair, PositiveSymplectic, SpAlgebraElement, SymplecticElement,
    UnitaryJ,
};
