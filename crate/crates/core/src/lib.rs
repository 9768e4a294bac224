//! Non-neural layer of a five-track egocentric video pipeline: snippet
//! scheduling, feature and prediction fusion, multi-clip voting, box
//! post-processing, and evaluators for moment queries, natural language
//! queries, future hand prediction, long-term and short-term anticipation,
//! and state-change object detection.

pub mod dataset;
pub mod error;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod model;
pub mod report;
pub mod snippet;
pub mod toyheads;

pub use error::{Error, Result};
