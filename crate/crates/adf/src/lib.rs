//! Causal derivative estimation for noisy position streams.
//!
//! The centerpiece is [`Adf`], an adaptive-window differentiating filter:
//! at every sample it finds the longest trailing window that a straight
//! line can approximate to within the noise bound `delta`, then fits that
//! line by constrained least squares. The slope is the derivative
//! estimate, the intercept a denoised value estimate. Window search and
//! fit are incremental, so a step costs O(r_max) time and allocates
//! nothing.
//!
//! Two fixed-structure estimators are included for comparison, a linear
//! second-order differentiating filter ([`Ldf`]) and a second-order
//! sliding-mode exact differentiator ([`Red`]), plus a raw finite
//! difference. All of them implement [`Differentiator`], so harness code
//! can swap estimators freely.
//!
//! The [`sim`] module provides the closed-loop test bench: a third-order
//! voice-coil plant with input delay, a PID controller whose derivative
//! path runs through the estimator under test, reference generators and
//! bounded measurement noise.
//!
//! The [`oracles`] module holds slow, independent reference
//! implementations (exhaustive searches, a tiny LP, grid plus
//! golden-section minimization). They exist so tests can check the fast
//! paths against independently computed answers; production code never
//! calls them.

mod envelope;
mod error;
mod filter;
mod lsq;
mod ring;
mod sample;

pub mod differentiators;
pub mod oracles;
pub mod sim;

pub use envelope::SlopeEnvelopes;
pub use error::Error;
pub use filter::{feasible, Adf, AdfParams, FilterOutput, TimeBase};
pub use lsq::{ls_fit_constrained, ls_fit_unconstrained, precompute_phi_psi, LineFit};
pub use sample::Sample;

pub use differentiators::{
    finite_difference, Differentiator, FiniteDifference, Ldf, LdfParams, Red, RedParams, RedState,
};
