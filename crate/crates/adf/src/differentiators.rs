//! Streaming derivative estimators and the interface they share.
//!
//! [`FiniteDifference`] is the raw baseline; it amplifies bounded noise
//! `d` to `2d/ts` and exists mainly to make that visible. [`Ldf`] is a
//! second-order linear differentiating filter, [`Red`] a second-order
//! sliding-mode exact differentiator. Together with the adaptive filter
//! they all implement [`Differentiator`], so harnesses and the
//! closed-loop simulator can swap estimators without caring which one
//! runs.

use crate::error::Error;
use crate::filter::Adf;
use crate::sample::Sample;

/// Common streaming interface: feed samples, get derivative estimates.
pub trait Differentiator {
    /// Process one sample taken at time `t` (strictly increasing) and
    /// return the current derivative estimate. `None` means the
    /// estimator has not seen enough data yet; it is never a fabricated
    /// zero.
    fn step(&mut self, t: f64, x: f64) -> Option<f64>;

    /// Window size behind the latest estimate, for estimators that adapt
    /// one. Fixed-structure estimators return `None`.
    fn window_size(&self) -> Option<usize> {
        None
    }

    /// Denoised value estimate accompanying the latest derivative, for
    /// estimators that maintain one.
    fn value_estimate(&self) -> Option<f64> {
        None
    }
}

/// Two-point difference quotient `(x_now - x_prev) / ts`. With
/// measurement noise bounded by `d` the result can be off by `2d/ts`,
/// which is what the smarter estimators avoid.
pub fn finite_difference(x_now: f64, x_prev: f64, ts: f64) -> f64 {
    assert!(ts > 0.0, "ts must be positive");
    (x_now - x_prev) / ts
}

/// Streaming finite difference over consecutive samples, using actual
/// timestamps.
#[derive(Debug, Clone, Default)]
pub struct FiniteDifference {
    prev: Option<(f64, f64)>,
}

impl FiniteDifference {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Differentiator for FiniteDifference {
    fn step(&mut self, t: f64, x: f64) -> Option<f64> {
        let out = self.prev.map(|(tp, xp)| {
            assert!(t > tp, "time must increase strictly");
            (x - xp) / (t - tp)
        });
        self.prev = Some((t, x));
        out
    }
}

/// Parameters of the linear differentiating filter: corner frequency
/// `omega0` (rad/s) and sample period `ts` (s). Keeping `omega0 * ts`
/// well below 2 preserves the analog shape near the corner; this is a
/// usage note, not an enforced bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdfParams {
    pub omega0: f64,
    pub ts: f64,
}

impl LdfParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidParam("omega0 must be positive and finite"));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::InvalidParam("ts must be positive and finite"));
        }
        Ok(())
    }
}

/// Critically damped second-order differentiating filter
/// `s * omega0^2 / (s + omega0)^2`, discretized with the bilinear
/// transform and run as a direct-form II transposed biquad. Unity ramp
/// gain is preserved exactly by the discretization; the gain at the
/// corner is `omega0 / 2`. Assumes samples arrive at the fixed period
/// `ts` (the step time argument is ignored).
#[derive(Debug, Clone)]
pub struct Ldf {
    b0: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    s1: f64,
    s2: f64,
    params: LdfParams,
}

impl Ldf {
    pub fn new(params: LdfParams) -> Result<Self, Error> {
        params.validate()?;
        let k = 2.0 / params.ts;
        let w = params.omega0;
        let a0 = (k + w) * (k + w);
        Ok(Ldf {
            b0: w * w * k / a0,
            b2: -(w * w * k) / a0,
            a1: 2.0 * (w * w - k * k) / a0,
            a2: (k - w) * (k - w) / a0,
            s1: 0.0,
            s2: 0.0,
            params,
        })
    }

    pub fn params(&self) -> LdfParams {
        self.params
    }

    /// Magnitude of the discrete transfer function at `omega` rad/s,
    /// straight from the realized coefficients.
    pub fn gain_at(&self, omega: f64) -> f64 {
        let th = omega * self.params.ts;
        let (c1, s1) = (th.cos(), th.sin());
        let (c2, s2) = ((2.0 * th).cos(), (2.0 * th).sin());
        // H(z) = (b0 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2) at z = e^{j th}.
        let num_re = self.b0 + self.b2 * c2;
        let num_im = -self.b2 * s2;
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -self.a1 * s1 - self.a2 * s2;
        (num_re * num_re + num_im * num_im).sqrt() / (den_re * den_re + den_im * den_im).sqrt()
    }
}

impl Differentiator for Ldf {
    fn step(&mut self, _t: f64, x: f64) -> Option<f64> {
        let y = self.b0 * x + self.s1;
        self.s1 = -self.a1 * y + self.s2;
        self.s2 = self.b2 * x - self.a2 * y;
        Some(y)
    }
}

/// Parameters of the sliding-mode exact differentiator: gain `kappa`
/// scales the assumed bound on the signal's third derivative, `ts` is
/// the integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedParams {
    pub kappa: f64,
    pub ts: f64,
}

impl RedParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidParam("kappa must be positive and finite"));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::InvalidParam("ts must be positive and finite"));
        }
        Ok(())
    }
}

/// Integrator state of the exact differentiator: value, derivative and
/// second-derivative tracks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RedState {
    pub z0: f64,
    pub z1: f64,
    pub z2: f64,
}

impl RedState {
    /// One explicit Euler step of the continuous dynamics
    ///
    /// ```text
    /// z0' = z1 + 3.1 kappa   |e|^(2/3) sign(e)      e = x - z0
    /// z1' = z2 + 3.2 kappa^2 |e|^(1/3) sign(e)
    /// z2' =      1.1 kappa^3           sign(e)
    /// ```
    ///
    /// All right-hand sides use the pre-step state. `sign(0)` is 0, so
    /// the state is an equilibrium once it matches a constant input
    /// exactly.
    pub fn step(&mut self, x: f64, p: &RedParams) {
        let e = x - self.z0;
        let s = if e > 0.0 {
            1.0
        } else if e < 0.0 {
            -1.0
        } else {
            0.0
        };
        let c = e.abs().cbrt();
        let d0 = self.z1 + 3.1 * p.kappa * c * c * s;
        let d1 = self.z2 + 3.2 * p.kappa * p.kappa * c * s;
        let d2 = 1.1 * p.kappa * p.kappa * p.kappa * s;
        self.z0 += p.ts * d0;
        self.z1 += p.ts * d1;
        self.z2 += p.ts * d2;
    }
}

/// Sliding-mode exact differentiator with the state initialized to zero.
/// The derivative estimate is the `z1` track. Assumes the fixed step
/// `ts` (the step time argument is ignored).
#[derive(Debug, Clone)]
pub struct Red {
    state: RedState,
    params: RedParams,
}

impl Red {
    pub fn new(params: RedParams) -> Result<Self, Error> {
        params.validate()?;
        Ok(Red {
            state: RedState::default(),
            params,
        })
    }

    pub fn state(&self) -> RedState {
        self.state
    }

    pub fn params(&self) -> RedParams {
        self.params
    }
}

impl Differentiator for Red {
    fn step(&mut self, _t: f64, x: f64) -> Option<f64> {
        self.state.step(x, &self.params);
        Some(self.state.z1)
    }
}

impl Differentiator for Adf {
    /// Adapter over [`Adf::step`]; time monotonicity (and the period, in
    /// uniform mode) becomes the caller's contract here.
    fn step(&mut self, t: f64, x: f64) -> Option<f64> {
        Adf::step(self, Sample::new(t, x))
            .expect("sample stream must satisfy the filter's time base")
            .dx_hat
    }

    fn window_size(&self) -> Option<usize> {
        self.r_star()
    }

    fn value_estimate(&self) -> Option<f64> {
        self.x_hat()
    }
}
