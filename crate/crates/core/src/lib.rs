//! Simulation and verification toolkit for local martingales with jumps.
//!
//! The crate builds a handful of explicit process families (random walks with
//! rare large jumps, single-jump intensity constructions, one-shot jumps),
//! computes their predictable characteristics in closed form, and checks
//! convergence-event identities on finite horizons, exactly where possible and
//! by seeded Monte Carlo otherwise.
//!
//! Typical use:
//!
//! ```
//! use jumpmart::generators::{catalog, Generator};
//! use jumpmart::path::quadratic_variation;
//!
//! let spec = catalog::with_horizon(catalog::preset("rw_alt_harmonic")?, 1000.0)?;
//! let sample = Generator::new(spec)?.sample(7)?;
//! let qv = quadratic_variation(&sample.path);
//! assert!(qv.final_total() > 0.0);
//! # Ok::<(), jumpmart::Error>(())
//! ```

// `!(x > 0.0)` is how parameter checks reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod characteristics;
pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod generators;
pub mod montecarlo;
pub mod path;
pub mod quad;
pub mod rng;
pub mod suite;
pub mod transforms;

pub use error::{Error, Result};
