//! Numerical toolkit for the damped wave equation with sign-indefinite
//! damping on bounded and truncated-unbounded domains.
//!
//! The central object is the family of self-adjoint Schrodinger operators
//! obtained by adding `mu` times the damping to the undamped operator. Real
//! spectral points of the non-self-adjoint damped-wave block operator are
//! predicted by intersecting the eigenvalue curves of that family with the
//! parabola `mu -> -(mu/alpha)^2`, then cross-validated against direct
//! block-operator eigensolves and time evolution.

pub mod error;
pub mod expr;
pub mod grid;
pub mod operator;
pub mod eigencurve;
pub mod spectra;

pub use error::{Error, Result};
