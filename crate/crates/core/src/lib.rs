//! Label-noise channels, plug-in posterior classifiers, and exact and Monte
//! Carlo tools for measuring how far a plug-in classifier trained on noisy
//! labels lands from the Bayes risk of the clean problem.
//!
//! Class indices are 0-based throughout the library API. Files and the
//! command line use 1-based classes.

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod experiment;
pub mod mitigation;
pub mod noise_channel;
pub mod seeding;
pub mod simplex;

pub use error::{Error, Result};
