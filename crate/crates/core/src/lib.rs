pub mod cli;
pub mod corpus;
pub mod declist;
pub mod error;
pub mod eval;
pub mod features;
pub mod knn;
pub mod labels;
pub mod learner;
pub mod maxent;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
