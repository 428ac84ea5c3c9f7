//! Pseudospectral solver and numerical-analysis harness for the
//! two-dimensional beta-plane eddy-mean vorticity system on a periodic box.
//!
//! The crate provides:
//! - spectral primitives on the torus (`spectral`),
//! - the coupled eddy-mean right-hand sides in three formulations
//!   (`dynamics`),
//! - exact linear semigroups and exponential time stepping (`integrator`),
//! - a Duhamel fixed-point solver with measured contraction and global
//!   continuation (`picard`),
//! - brute-force probes of the trilinear convolution-sum bounds
//!   (`estimates`),
//! - diagnostics, initial data, persistence, and configuration
//!   (`diagnostics`, `init`, `io`, `config`).

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod init;
pub mod integrator;
pub mod io;
pub mod picard;
pub mod spectral;

pub use error::{Error, Result};
