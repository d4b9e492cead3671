//! Self-similar solutions of the one-dimensional Fokker-Planck equation
//!
//! ```text
//! ∂W/∂t = [ -∂/∂x D1(x,t) + ∂²/∂x² D2(x,t) ] W(x,t)
//! ```
//!
//! with drift and diffusion coefficients that depend on time through the
//! scaling forms `D1 = t^(α-1) ρ1(z)`, `D2 = t^(2α-1) ρ2(z)`, `z = x / t^α`.
//!
//! The crate is organised around four pieces:
//!
//! - [`scaling`]: the scale transformation, index consistency and the maps
//!   between physical `(x, t)` and similarity `z` coordinates.
//! - [`solutions`]: the zero-flux quadrature solution of the reduced ODE and
//!   the two closed-form families (gamma on the half-line, beta between
//!   moving walls).
//! - [`fpe_fd`]: a conservative finite-volume Crank-Nicolson solver used to
//!   check the closed forms against a direct integration of the PDE.
//! - [`sde_mc`]: an Euler-Maruyama sampler of the equivalent Itô SDE with
//!   reflecting walls, the second independent check.
//!
//! Supporting numerics live in [`special`] (log-gamma, Beta) and
//! [`quadrature`] (adaptive Gauss-Kronrod).

// `!(a < b)` also rejects NaN; published rule and series constants keep
// their printed digits
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod field;
pub mod fpe_fd;
pub mod quadrature;
pub mod scaling;
pub mod sde_mc;
pub mod solutions;
pub mod special;

pub use error::{Error, Result};
pub use field::DensityField;
pub use scaling::{Bound, Coefficients, Profile, ScalingIndices, SimilarityDomain, SimilarityProblem};
pub use solutions::{BetaFamilyParams, Family, GammaFamilyParams, ProfileSolution};
