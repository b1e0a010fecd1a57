//! Component models for baseball rate estimation.

pub mod betabin;
pub mod chart;
pub mod cli;
pub mod compose;
pub mod contest;
pub mod error;
pub mod ingest;
pub mod normalmodel;
pub mod optim;
pub mod output;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
