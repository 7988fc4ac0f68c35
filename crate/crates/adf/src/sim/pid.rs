//! Parallel-form PID with an externally supplied error derivative,
//!
//! ```text
//! u = clamp( Kp * ( e + (1/Ti) * integral(e) + Td * de ) + gamma, 0, 10 )
//! ```
//!
//! where `e = r - x_meas` and `de = dr - dx_est` comes from the
//! reference slope and the derivative estimator under test, not from
//! differencing `e`. The integral uses the trapezoid rule. Anti-windup
//! is conditional: the integrator freezes only when the output is
//! saturated and the current error would push it further into the rail,
//! so it can always unwind.

use crate::error::Error;

/// Amplifier output range (V) of the bench hardware.
pub const U_MIN: f64 = 0.0;
pub const U_MAX: f64 = 10.0;

/// Controller gains: proportional `kp`, integral time `ti` (s),
/// derivative time `td` (s), and a constant feedforward offset `gamma`
/// (V) for gravity or bias compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidParams {
    pub kp: f64,
    pub ti: f64,
    pub td: f64,
    pub gamma: f64,
}

impl PidParams {
    /// Gains tuned for the voice-coil bench.
    pub fn bench_tuning() -> Self {
        PidParams {
            kp: 420.0,
            ti: 0.07,
            td: 0.03,
            gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (v, name) in [
            (self.kp, "kp must be positive and finite"),
            (self.ti, "ti must be positive and finite"),
            (self.td, "td must be positive and finite"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParam(name));
            }
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParam("gamma must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Pid {
    params: PidParams,
    ts: f64,
    integral: f64,
    prev_error: f64,
}

impl Pid {
    pub fn new(params: PidParams, ts: f64) -> Result<Self, Error> {
        params.validate()?;
        if !(ts.is_finite() && ts > 0.0) {
            return Err(Error::InvalidParam("ts must be positive and finite"));
        }
        Ok(Pid {
            params,
            ts,
            integral: 0.0,
            prev_error: 0.0,
        })
    }

    pub fn params(&self) -> PidParams {
        self.params
    }

    /// One control update from the reference `r`, measurement `x_meas`,
    /// estimated measurement derivative `dx_est` and reference slope
    /// `dr`. Returns the saturated voltage.
    pub fn step(&mut self, r: f64, x_meas: f64, dx_est: f64, dr: f64) -> f64 {
        let p = self.params;
        let e = r - x_meas;
        let de = dr - dx_est;
        let i_cand = self.integral + 0.5 * self.ts * (e + self.prev_error);
        self.prev_error = e;
        let v_cand = p.kp * (e + i_cand / p.ti + p.td * de) + p.gamma;
        let deeper = (v_cand > U_MAX && e > 0.0) || (v_cand < U_MIN && e < 0.0);
        if !deeper {
            self.integral = i_cand;
        }
        let v = p.kp * (e + self.integral / p.ti + p.td * de) + p.gamma;
        v.clamp(U_MIN, U_MAX)
    }
}
