//! Reference trajectories for the closed-loop runs: position steps,
//! rate-limited moves, and logarithmic sine sweeps for frequency
//! response measurements. Each generator reports its exact analytic
//! slope so the controller's feedforward path has no discretization
//! error of its own.

use crate::error::Error;

/// Logarithmic sine sweep `offset + A*sin(phi(t))` whose instantaneous
/// frequency climbs from `omega1` to `omega2` (rad/s) over `duration`
/// seconds:
///
/// ```text
/// omega(t) = omega1 * exp(rate*t),   rate = ln(omega2/omega1) / duration
/// phi(t)   = omega1 * (exp(rate*t) - 1) / rate
/// ```
///
/// Past `duration` the sweep holds `omega2`. Equal endpoint frequencies
/// degenerate to a pure sine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chirp {
    pub amplitude: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub duration: f64,
    pub offset: f64,
}

impl Chirp {
    pub fn validate(&self) -> Result<(), Error> {
        for (v, name) in [
            (self.amplitude, "chirp amplitude must be positive and finite"),
            (self.omega1, "chirp omega1 must be positive and finite"),
            (self.omega2, "chirp omega2 must be positive and finite"),
            (self.duration, "chirp duration must be positive and finite"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParam(name));
            }
        }
        if !self.offset.is_finite() {
            return Err(Error::InvalidParam("chirp offset must be finite"));
        }
        if self.omega2 < self.omega1 {
            return Err(Error::InvalidParam("chirp sweep must go upward"));
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        (self.omega2 / self.omega1).ln() / self.duration
    }

    /// Unwrapped phase at time `t >= 0`.
    pub fn phase(&self, t: f64) -> f64 {
        let rate = self.rate();
        if rate == 0.0 {
            return self.omega1 * t;
        }
        if t <= self.duration {
            self.omega1 * ((rate * t).exp() - 1.0) / rate
        } else {
            let end = self.omega1 * ((rate * self.duration).exp() - 1.0) / rate;
            end + self.omega2 * (t - self.duration)
        }
    }

    /// Instantaneous frequency (rad/s) at time `t >= 0`.
    pub fn omega(&self, t: f64) -> f64 {
        let rate = self.rate();
        if t <= self.duration {
            self.omega1 * (rate * t).exp()
        } else {
            self.omega2
        }
    }

    /// Time at which the sweep passes `omega` (rad/s); `omega` must lie
    /// within `[omega1, omega2]`.
    pub fn time_at_omega(&self, omega: f64) -> f64 {
        assert!(
            omega >= self.omega1 && omega <= self.omega2,
            "omega {omega} outside sweep [{}, {}]",
            self.omega1,
            self.omega2
        );
        let rate = self.rate();
        if rate == 0.0 {
            0.0
        } else {
            (omega / self.omega1).ln() / rate
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.offset + self.amplitude * self.phase(t).sin()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.amplitude * self.omega(t) * self.phase(t).cos()
    }
}

/// Position reference shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceSignal {
    /// Zero until `t_start`, then `amplitude`.
    Step { amplitude: f64, t_start: f64 },
    /// Rate-limited move: ramps from zero at `rate` until `target` is
    /// reached, then holds.
    Slope {
        rate: f64,
        target: f64,
        t_start: f64,
    },
    /// Logarithmic sine sweep.
    Sweep(Chirp),
}

impl ReferenceSignal {
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            ReferenceSignal::Step { amplitude, t_start } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidParam("step amplitude must be finite"));
                }
                if !(t_start.is_finite() && *t_start >= 0.0) {
                    return Err(Error::InvalidParam("step t_start must be >= 0"));
                }
                Ok(())
            }
            ReferenceSignal::Slope {
                rate,
                target,
                t_start,
            } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidParam("slope rate must be positive"));
                }
                if !(target.is_finite() && *target > 0.0) {
                    return Err(Error::InvalidParam("slope target must be positive"));
                }
                if !(t_start.is_finite() && *t_start >= 0.0) {
                    return Err(Error::InvalidParam("slope t_start must be >= 0"));
                }
                Ok(())
            }
            ReferenceSignal::Sweep(c) => c.validate(),
        }
    }

    /// Reference value and its exact slope at time `t`.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        match *self {
            ReferenceSignal::Step { amplitude, t_start } => {
                if t >= t_start {
                    (amplitude, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }
            ReferenceSignal::Slope {
                rate,
                target,
                t_start,
            } => {
                if t < t_start {
                    (0.0, 0.0)
                } else {
                    let r = rate * (t - t_start);
                    if r < target {
                        (r, rate)
                    } else {
                        (target, 0.0)
                    }
                }
            }
            ReferenceSignal::Sweep(c) => (c.value(t), c.derivative(t)),
        }
    }
}
