//! Simulation, characterization and analysis of multimode Gaussian quantum
//! channels `q' = A q + d`, `V' = A V Aᵀ + N`.
//!
//! Quadratures use `xxpp` ordering with `[x, p] = 2i`, so the vacuum
//! covariance is the identity. Mode indices in the API are zero-based;
//! quadrature labels such as `x1` are one-based.
//!
//! The crate is organised as
//!
//! - [`symplectic`]: vectors, covariance matrices, channels and their
//!   physicality, composition, the `G`/`H` complex form, PPT tests.
//! - [`channels`]: squeezers, DFG arrays, loss, cluster and noise channels.
//! - [`measurement`]: coherent probes and homodyne sampling.
//! - [`characterization`]: `Â` from probe means and `N̂` by constrained
//!   maximum likelihood.
//! - [`analysis`]: singular-value eigenquadratures and noise structure.
//! - [`fock`]: a truncated Fock-space reference for small cases.
//! - [`calibration`]: parameter calibration against target PPT values.
//! - [`io`] and [`cli`]: file formats and the `cvchannel` commands.
//!
//! Runnable walkthroughs live under `examples/`.

pub mod analysis;
pub mod calibration;
pub mod channels;
pub mod characterization;
pub mod cli;
mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{
    apply_channel, compose, physicality_margin, CovarianceMatrix, GaussianChannel, GaussianState,
    QuadratureVector,
};
