//! Construction, classification and numerical verification of
//! superintegrable Hamiltonian systems in the Euclidean plane that separate
//! in polar coordinates, `V(r, θ) = R(r) + S(θ)/r²`.
//!
//! The crate is organised bottom-up:
//!
//! * [`jetfield`]: truncated Taylor arithmetic and a small expression DAG;
//! * [`observables`]: momentum polynomials and the canonical Poisson bracket;
//! * [`integrals`]: the leading term of an Nth-order integral in the
//!   Cartesian and polar bases, its split and classification;
//! * [`compat`]: the linear compatibility condition and nullspace scans;
//! * [`potentials`]: the potential families, including the Painlevé VI
//!   based exotic quantum family;
//! * [`dynamics`]: trajectories, orbit closure and syzygy detection.

pub mod compat;
pub mod dynamics;
mod error;
pub mod integrals;
pub mod jetfield;
pub mod linalg;
pub mod observables;
pub mod ode;
pub mod potentials;

pub use error::{Error, Result};
