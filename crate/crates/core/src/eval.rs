//! Evaluation metrics, toy-data generators and CSV input/output.

pub mod generate;
pub mod io;
pub mod metrics;
