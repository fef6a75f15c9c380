//! Level-set fire-front simulation with Bayesian data assimilation.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: grid geometry, scalar and level-set fields, contour extraction,
//!   rasterization and Gaussian blurring.
//! * [`spread`]: the rate-of-spread model `s = beta + gamma * omega` and the
//!   wind series that drives it.
//! * [`solver`]: explicit Hamilton-Jacobi integration of the level-set
//!   equation with ENO upwinding and reinitialization.
//! * [`filter`]: a particle filter whose particles are level-set fields and an
//!   ensemble Kalman filter over the spread parameters.
//! * [`metrics`]: burned-area agreement measures.
//! * [`io`]: run configuration, file formats and the synthetic-truth generator.

pub mod error;
pub mod field;
pub mod filter;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod solver;
pub mod spread;

pub use error::{Error, ErrorKind, Result};
pub use field::{FrontContour, Grid, Ignition, LevelSetField, RasterImage, ScalarField};
pub use spread::{RosParams, RosPrior, WindSample, WindSeries};

