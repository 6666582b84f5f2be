//! Pseudo-spectral simulation and verification toolkit for the nonlocal
//! semilinear parabolic equation
//!
//! ```text
//! u_t + v . grad u - Delta u = |u|^p - integral |u|^p
//! ```
//!
//! on the periodic torus, with divergence-free advecting flows. The crate
//! provides the spectral field algebra, a library of incompressible flows,
//! Duhamel-form time integration with blow-up detection, dissipation-time
//! and enhanced-dissipation measurements on truncated Fourier bases, the
//! scalar diagnostics the global-existence arguments predicate on, and a
//! reproducible scenario runner with checkpointing.
//!
//! The `examples/` directory holds one runnable example per capability;
//! the `nlsp` binary exposes the same scenarios as a small CLI.

pub mod diagnostics;
pub mod dissipation;
pub mod error;
pub mod evolution;
pub mod flow;
pub mod linalg;
pub mod picard;
pub mod rng;
pub mod runner;
pub mod spectral;

pub use error::{Error, Result};
