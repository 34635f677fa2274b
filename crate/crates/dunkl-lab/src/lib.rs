//! A numerical laboratory for the Dunkl Laplacian and its semilinear theory.
//!
//! The Dunkl Laplacian attached to a root system R and multiplicity k,
//!
//! ```text
//! L u(x) = Lap u(x) + sum_{alpha in R} k(alpha) [ <grad u(x), alpha> / <alpha, x>
//!            - (|alpha|^2 / 2) (u(x) - u(sigma_alpha x)) / <alpha, x>^2 ],
//! ```
//!
//! behaves in many ways like the ordinary Laplacian in the *effective
//! dimension* m = d + sum_R k(alpha): radial harmonic profiles decay like
//! r^{2-m}, the exit time of the associated jump-diffusion from a ball is
//! (r^2 - rho^2)/(2m), and the radial part of the process is a Bessel process
//! of dimension m. This crate assembles the pieces needed to compute with
//! that picture and with the semilinear equation L u = phi(u):
//!
//! * [`root_system`] -- reflection groups, weights, effective dimension;
//! * [`calculus`] -- pointwise evaluation of L by hybrid stencils;
//! * [`kernels`] -- normalization constants, Green and heat kernels, exit
//!   times, and the radial Green operator;
//! * [`phi`] -- the admissible family of nondecreasing nonlinearities;
//! * [`radial`] -- radial shooting problems, blow-up radii, and the
//!   Keller-Osserman integral test;
//! * [`semilinear`] -- Dirichlet problems on balls by fixed-point iteration
//!   and shooting, with cross-verification;
//! * [`sim`] -- the jump-diffusion sampler, exit statistics, and harmonic
//!   support diagnostics;
//! * [`verify`] -- the named invariant checks behind the `verify` subcommand.
//!
//! The `examples/` directory is the guided tour: each example exercises one
//! capability end to end and prints a small self-describing report. The
//! `dunkl-lab` binary exposes the same functionality as subcommands for
//! scripted use.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod interp;
pub mod kernels;
pub mod linalg;
pub mod ode;
pub mod phi;
pub mod quad;
pub mod radial;
pub mod root_system;
pub mod semilinear;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
