//! Environment-invariant curriculum relation learning at desk scale:
//! synthetic imbalanced relation datasets, three-environment training with a
//! gradient-norm penalty and a curriculum mixing schedule, and the relation
//! metric suite (R@K, mR@K, F@K, mT@K).

pub mod cli;
pub mod config;
pub mod curriculum;
pub mod data;
pub mod env;
pub mod error;
pub mod metrics;
pub mod model;
pub mod risk;
pub mod trainer;

pub use error::{EicrError, Result};
