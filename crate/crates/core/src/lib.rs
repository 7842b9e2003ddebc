//! Group-averaged Markov kernels on finite state spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`chain`]: π-weighted linear algebra (kernels, adjoints, Frobenius
//!   inner products, reversible spectra, worst-case TV curves).
//! - [`partitions`]: state sets, cuts, orbit partitions, Gibbs kernels `G`,
//!   projection chains `P̄` and the averaged kernels `GP`, `PG`, `GPG`.
//! - [`objectives`]: KL and Frobenius distances to stationarity together with
//!   their closed forms (`g`, `h`, Cheeger constants, log-Sobolev bounds).
//! - [`oracle`]: exhaustive minimisation over cuts and cut pairs.
//! - [`submodular`]: modular bounds and the descent algorithms built on them.
//! - [`models`]: Curie–Weiss/Glauber, hypercube and random reversible chains.
//! - [`experiments`]: reproducible experiment runners behind the `orbit-opt`
//!   binary.

pub mod chain;
pub mod config;
pub mod error;
pub mod experiments;
pub mod models;
pub mod objectives;
pub mod oracle;
pub mod partitions;
pub mod submodular;

pub use chain::{SpectrumReport, StationaryDistribution, TransitionKernel};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use partitions::{CutSet, OrbitPartition, StateSet};
