//! Library side of the experiment runner: flat key=value configuration,
//! CSV reading/writing, run metrics, and the four experiment flavours
//! (signal bench, closed-loop servo run, swept frequency response, and
//! replay of recorded data).

pub mod config;
pub mod csvio;
pub mod experiments;
pub mod metrics;
