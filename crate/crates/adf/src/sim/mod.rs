//! Closed-loop test bench: delayed third-order plant, PID controller
//! with an estimated-derivative path, reference generators and bounded
//! measurement noise.
//!
//! The wiring per sample at time `t = l * ts`:
//!
//! 1. reference `r` and its analytic slope `dr` come from the generator;
//! 2. the plant's true position is read and noise is added to form the
//!    measurement;
//! 3. the estimator under test turns the measurement stream into `dx`;
//! 4. the PID acts on `e = r - x_meas` with derivative `dr - dx` and the
//!    saturated voltage drives the plant for one period.
//!
//! Everything is deterministic given the noise seed, so traces are
//! byte-for-byte reproducible.

mod closed_loop;
mod noise;
mod pid;
mod plant;
mod reference;

pub use closed_loop::{run_closed_loop, LoopConfig, LoopRecord};
pub use noise::{NoiseGen, NoiseKind, NoiseModel};
pub use pid::{Pid, PidParams, U_MAX, U_MIN};
pub use plant::{Plant, PlantModel};
pub use reference::{Chirp, ReferenceSignal};
