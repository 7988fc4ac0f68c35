//! Voice-coil positioning stage: gain and a third-order lag behind a
//! pure input delay,
//!
//! ```text
//!                 km * exp(-tau s)
//! G(s) = ------------------------------------
//!         m s^3 + nu s^2 + b0 s
//! ```
//!
//! discretized exactly under a zero-order hold at the period `ts`. The
//! delay must be an integer number of samples; it is realized as an
//! input queue, so the output is bit-identical to the undelayed response
//! shifted by `tau / ts` samples.

use nalgebra::{Matrix3, Matrix4, RowVector3, Vector3};

use crate::error::Error;

/// Continuous-time plant description. `voice_coil` gives the identified
/// bench constants; fields are public so tests can perturb them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantModel {
    /// Input gain (m/s^2 per V after normalization by `m`).
    pub km: f64,
    /// Coefficient of s^3 in the denominator.
    pub m: f64,
    /// Coefficient of s^2.
    pub nu: f64,
    /// Coefficient of s.
    pub b0: f64,
    /// Pure input delay (s); must be an integer multiple of `ts`.
    pub tau: f64,
    /// Sample period (s).
    pub ts: f64,
    /// Optional hard travel stops (lo, hi) in meters. `None` keeps the
    /// model linear, which is what frequency-domain analysis wants; the
    /// physical stage stops at its rails.
    pub position_limits: Option<(f64, f64)>,
}

impl PlantModel {
    /// Identified constants of the bench stage: gain 3.28, denominator
    /// 0.00064 s^3 + 0.634 s^2 + 80 s, delay 11 ms. At 2 kHz the delay
    /// is exactly 22 samples. Travel stops (0 to 18 mm on the hardware)
    /// are left off; enable them explicitly when saturation matters.
    pub fn voice_coil(ts: f64) -> Self {
        PlantModel {
            km: 3.28,
            m: 0.00064,
            nu: 0.634,
            b0: 80.0,
            tau: 0.011,
            ts,
            position_limits: None,
        }
    }

    /// Hardware travel range of the stage.
    pub const TRAVEL: (f64, f64) = (0.0, 0.018);

    /// Checks the parameters and returns the dead time in whole
    /// samples.
    pub fn validate(&self) -> Result<usize, Error> {
        for (v, name) in [
            (self.m, "m must be positive and finite"),
            (self.nu, "nu must be positive and finite"),
            (self.b0, "b0 must be positive and finite"),
            (self.ts, "ts must be positive and finite"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParam(name));
            }
        }
        if !self.km.is_finite() || self.km == 0.0 {
            return Err(Error::InvalidParam("km must be finite and nonzero"));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParam("tau must be nonnegative and finite"));
        }
        let ratio = self.tau / self.ts;
        if (ratio - ratio.round()).abs() > 1e-6 {
            return Err(Error::InvalidParam(
                "tau must be an integer multiple of ts",
            ));
        }
        if let Some((lo, hi)) = self.position_limits {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParam(
                    "position_limits must be finite with lo < hi",
                ));
            }
        }
        Ok(ratio.round() as usize)
    }
}

/// Discrete-time simulator for [`PlantModel`].
#[derive(Debug, Clone)]
pub struct Plant {
    a_d: Matrix3<f64>,
    b_d: Vector3<f64>,
    c: RowVector3<f64>,
    state: Vector3<f64>,
    /// Pending inputs, oldest at `delay_pos`.
    delay_line: Vec<f64>,
    delay_pos: usize,
    limits: Option<(f64, f64)>,
}

impl Plant {
    /// Discretizes the model under a zero-order hold: the augmented
    /// matrix [[A, B], [0, 0]] * ts exponentiates to [[A_d, B_d], [0, I]]
    /// in one shot, which also handles the integrating pole (A is
    /// singular, so the textbook `A^-1 (A_d - I) B` form is unusable).
    pub fn new(model: PlantModel) -> Result<Self, Error> {
        let delay_samples = model.validate()?;
        let a1 = model.b0 / model.m;
        let a2 = model.nu / model.m;
        let gain = model.km / model.m;
        #[rustfmt::skip]
        let aug = Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, -a1, -a2, 1.0,
            0.0, 0.0, 0.0, 0.0,
        ) * model.ts;
        let e = aug.exp();
        let a_d = e.fixed_view::<3, 3>(0, 0).into_owned();
        let b_d = e.fixed_view::<3, 1>(0, 3).into_owned();
        Ok(Plant {
            a_d,
            b_d,
            c: RowVector3::new(gain, 0.0, 0.0),
            state: Vector3::zeros(),
            delay_line: vec![0.0; delay_samples],
            delay_pos: 0,
            limits: model.position_limits,
        })
    }

    /// Position (m) at the current sample instant.
    pub fn position(&self) -> f64 {
        (self.c * self.state)[0]
    }

    /// Velocity (m/s) at the current sample instant.
    pub fn velocity(&self) -> f64 {
        self.c[0] * self.state[1]
    }

    /// Apply voltage `u` over one sample period and return the position
    /// at the next instant. The voltage entering the dynamics is the one
    /// queued `tau/ts` calls ago (zero while the queue warms up).
    pub fn step(&mut self, u: f64) -> f64 {
        assert!(u.is_finite(), "plant input must be finite");
        let u_eff = if self.delay_line.is_empty() {
            u
        } else {
            let slot = &mut self.delay_line[self.delay_pos];
            let delayed = *slot;
            *slot = u;
            self.delay_pos = (self.delay_pos + 1) % self.delay_line.len();
            delayed
        };
        self.state = self.a_d * self.state + self.b_d * u_eff;
        if let Some((lo, hi)) = self.limits {
            let gain = self.c[0];
            let y = gain * self.state[0];
            let pinned = y.clamp(lo, hi);
            if pinned != y {
                // Hard stop: pin the position and kill the velocity; the
                // actuator-side state keeps its value.
                self.state[0] = pinned / gain;
                self.state[1] = 0.0;
            }
        }
        self.position()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TS: f64 = 0.0005;

    #[test]
    fn rest_stays_at_rest() {
        let mut p = Plant::new(PlantModel::voice_coil(TS)).unwrap();
        for _ in 0..100 {
            assert_eq!(p.step(0.0), 0.0);
        }
    }

    #[test]
    fn delay_is_twenty_two_samples() {
        let model = PlantModel::voice_coil(TS);
        assert_eq!(model.tau / model.ts, 22.0);
        let mut delayed = Plant::new(model).unwrap();
        let mut direct = Plant::new(PlantModel {
            tau: 0.0,
            ..model
        })
        .unwrap();
        let input = |l: usize| (l as f64 * 0.37).sin().abs() * 3.0;
        let y_direct: Vec<f64> = (0..200).map(|l| direct.step(input(l))).collect();
        let y_delayed: Vec<f64> = (0..200).map(|l| delayed.step(input(l))).collect();
        for (l, &y) in y_delayed.iter().enumerate() {
            if l < 22 {
                assert_eq!(y, 0.0, "moved during the dead time at {l}");
            } else {
                assert_eq!(y, y_direct[l - 22], "shift mismatch at {l}");
            }
        }
    }

    #[test]
    fn steady_velocity_matches_static_gain() {
        // v_ss = km * u / b0: the cubic and quadratic terms die out.
        let mut p = Plant::new(PlantModel::voice_coil(TS)).unwrap();
        let u = 0.1;
        for _ in 0..2000 {
            p.step(u);
        }
        let expect = 3.28 * u / 80.0;
        let v = p.velocity();
        assert!(
            (v - expect).abs() <= 0.01 * expect,
            "velocity {v}, expected {expect} within 1%"
        );
        // Cross-check with a position difference over 0.1 s.
        let y0 = p.position();
        for _ in 0..200 {
            p.step(u);
        }
        let v_avg = (p.position() - y0) / (200.0 * TS);
        assert!((v_avg - expect).abs() <= 0.01 * expect);
    }

    #[test]
    fn superposition_holds() {
        let model = PlantModel::voice_coil(TS);
        let mut pa = Plant::new(model).unwrap();
        let mut pb = Plant::new(model).unwrap();
        let mut pc = Plant::new(model).unwrap();
        for l in 0..400 {
            let ua = (l as f64 * 0.05).sin();
            let ub = (l as f64 * 0.013).cos() * 2.0;
            let ya = pa.step(ua);
            let yb = pb.step(ub);
            let yc = pc.step(ua + ub);
            assert!(
                (yc - (ya + yb)).abs() <= 1e-9 * yc.abs().max(1.0),
                "superposition violated at {l}"
            );
        }
    }

    #[test]
    fn travel_stops_pin_position() {
        let mut model = PlantModel::voice_coil(TS);
        model.position_limits = Some(PlantModel::TRAVEL);
        let mut p = Plant::new(model).unwrap();
        for _ in 0..4000 {
            p.step(10.0);
        }
        assert!((p.position() - 0.018).abs() < 1e-12);
        assert_eq!(p.velocity(), 0.0);
    }

    #[test]
    fn fractional_delay_is_rejected() {
        let mut model = PlantModel::voice_coil(TS);
        model.tau = 0.0112;
        assert!(Plant::new(model).is_err());
    }
}
