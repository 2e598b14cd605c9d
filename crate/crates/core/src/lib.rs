//! Plasmonic eigenvalues of smooth domains through Dirichlet-to-Neumann
//! operators, together with their shape derivatives.
//!
//! A plasmon of a bounded domain `Ω` is a harmonic function on `ℝⁿ \ ∂Ω`,
//! continuous across `∂Ω`, decaying at infinity, whose interior and exterior
//! normal derivatives satisfy `ε ∂ₙu₋ + ∂ₙu₊ = 0`. On the boundary this is the
//! generalised eigenvalue problem `(ε N₋ + N₊) g = 0` for the interior and
//! exterior Dirichlet-to-Neumann operators.
//!
//! The crate has two halves:
//!
//! * planar domains: [`curve`], [`bem`] and [`spectrum`] discretise smooth
//!   closed curves, assemble `N₋`, `N₊` by a spectrally accurate Nyström
//!   method and solve for `ε`; [`dtn_shape`] and [`perturb::planar`] check the
//!   shape calculus against finite differences of full re-solves;
//! * the unit sphere: [`sphere`] supplies real spherical harmonics and the
//!   exact ball spectrum `ε_k = (k+1)/k`; [`perturb::sphere`] evaluates first-
//!   and second-order eigenvalue derivatives under normal boundary shifts.
//!
//! [`validate`] bundles the verification suite behind the `validate`
//! subcommand of the `plasmonic` binary.

pub mod bem;
pub mod cli;
pub mod curve;
pub mod dtn_shape;
pub mod error;
pub mod linalg;
pub mod perturb;
pub mod quadrature;
pub mod spectrum;
pub mod sphere;
pub mod validate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/planar_operators.md")]
    mod planar_operators {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    mod sphere {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/dtn_derivative.md")]
    mod dtn_derivative {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
