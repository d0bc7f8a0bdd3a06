//! Numerical toolkit for the integral operator of a beam on an elastic
//! foundation.
//!
//! A beam with flexural rigidity `EI` resting on a Winkler foundation with
//! spring constant `k` deflects under a vertical load `w(x)` according to the
//! fourth-order ODE `EI u'''' + k u = w`.  For an infinite beam the solution
//! is the convolution of the load with a decaying oscillatory Green's kernel;
//! restricting that convolution to a finite interval `[-l, l]` yields a
//! compact self-adjoint integral operator whose spectrum controls the finite
//! beam.
//!
//! The crate has four pillars:
//!
//! - [`charfun`] — the closed-form characteristic functions attached to the
//!   operator (`q`, `f`, `psi_L`, `g_L`, `ghat`, their derivatives and
//!   monotone inverses), evaluated branch-correctly and stably;
//! - [`scanner`] — a certification engine that sweeps `psi_L(kappa) - q(kappa)`
//!   over `(kappa, L)` regions with adaptive refinement, together with the
//!   auxiliary inequality checks that support the spectral-gap argument;
//! - [`spectral`] — symmetrized Nystrom discretization of the operator, a full
//!   symmetric eigensolution, confinement verification, and an eigenvalue
//!   decay fit;
//! - [`deflect`] — deflection solvers: the infinite-beam Green's convolution,
//!   plain operator application, and a Picard fixed-point iteration for
//!   nonlinear foundations.
//!
//! All numerics are generic over the floating-point [`Scalar`] (`f32` or
//! `f64`); the crate root exports `*64` aliases for the usual
//! double-precision instantiation.

// domain guards are written as negated comparisons so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfun;
pub mod deflect;
pub mod eigen;
mod error;
pub mod quad;
mod scalar;
pub mod scanner;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type BeamConfig64 = charfun::BeamConfig<f64>;
pub type SpectralPoint64 = charfun::SpectralPoint<f64>;
pub type BranchedAngle64 = charfun::BranchedAngle<f64>;
pub type ScanRegion64 = scanner::ScanRegion<f64>;
pub type ScanReport64 = scanner::ScanReport<f64>;
pub type KernelMatrix64 = spectral::KernelMatrix<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type LoadProfile64 = deflect::LoadProfile<f64>;
pub type DeflectionProfile64 = deflect::DeflectionProfile<f64>;
