//! Cointegration testing for high-dimensional VAR(k) panels.
//!
//! This crate implements likelihood-ratio-type cointegration tests whose null
//! distributions are taken from random matrix theory rather than from classical
//! fixed-dimension asymptotics. The intended regime is a panel of `N` series
//! observed at `T` time points with `N` and `T` of comparable size, where the
//! classical Johansen critical values are badly miscalibrated.
//!
//! The crate is organised as a pipeline:
//!
//! * [`model`] — vector error-correction data-generating processes and seeded,
//!   reproducible panel simulation;
//! * [`spectra`] — the two squared-canonical-correlation spectra: the classical
//!   Johansen reduced-rank regression spectrum and the cyclically augmented,
//!   detrended variant whose edge fluctuations are tractable;
//! * [`asymptotics`] — the Wachter equilibrium measure, integrals against it,
//!   and the centering/scaling constants of the rescaled test statistic;
//! * [`ensembles`] — reference random-matrix samplers (Haar orthogonal, Jacobi,
//!   tridiagonal Gaussian edge model, rotation-invariant projector model) and
//!   Monte Carlo quantile tables for sums of edge eigenvalue fluctuations;
//! * [`inference`] — spectral statistics, rescaling, and accept/reject
//!   decisions with Monte Carlo p-values;
//! * [`experiments`] — reproducible Monte Carlo studies: empirical size, null
//!   spectral density, lag-order sweeps, power curves, and checks of the
//!   analytic bounds driving power;
//! * [`io`] — CSV panel ingestion and report/table serialization.
//!
//! Everything downstream of a seed is deterministic: simulation and every
//! experiment derive per-column / per-replication generators from the seed by
//! counter-based splitting, so results are independent of thread count and
//! scheduling order.

pub mod asymptotics;
pub mod ensembles;
pub mod experiments;
pub mod inference;
pub mod io;
pub mod model;
pub mod seed;
pub mod spectra;
pub mod stats;

pub(crate) mod quadrature;
pub(crate) mod tridiag;

mod error;

pub use error::{Error, Result};
