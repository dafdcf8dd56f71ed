//! Estimation of inter-sector asset correlations in a two-sector Vasicek
//! event-risk model.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: Φ, Φ⁻¹, Φ₂ and the inversion of Φ₂ in its correlation
//!   argument.
//! - [`model`]: sector parameters, implied moments, latent factor and panel
//!   simulation, panel CSV I/O.
//! - [`estimators`]: IMM, IM2/IM3, MAD, DMM, MAX, Kendall and Spearman based
//!   estimators of γ, and the beta-posterior sign probability.
//! - [`study`]: scenario grids, replication statistics and stratified tables.

pub mod error;
pub mod estimators;
pub mod kernels;
pub mod model;
pub mod rng;
pub mod study;

pub use error::{Error, Result};
pub use estimators::{Estimator, GammaEstimate};
pub use kernels::{Correlation, Probability};
pub use model::{PairModel, Panel, PanelRow, SectorParams};
