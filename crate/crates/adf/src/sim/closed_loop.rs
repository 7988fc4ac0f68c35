//! Closed-loop execution: reference in, voltage out, one record per
//! sample period.

use crate::differentiators::Differentiator;
use crate::error::Error;
use crate::sim::noise::{NoiseGen, NoiseModel};
use crate::sim::pid::{Pid, PidParams};
use crate::sim::plant::{Plant, PlantModel};
use crate::sim::reference::ReferenceSignal;

/// Everything a run needs besides the derivative estimator itself.
#[derive(Debug, Clone)]
pub struct LoopConfig {
    pub plant: PlantModel,
    pub pid: PidParams,
    pub reference: ReferenceSignal,
    /// `None` runs the loop on the true position.
    pub noise: Option<NoiseModel>,
    /// Run length in seconds.
    pub duration: f64,
}

/// One sample period of the loop. `dx_est` is `None` while the
/// estimator warms up; the control law substitutes zero slope for those
/// samples. `r_star` is the estimator's window size where it has one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopRecord {
    pub t: f64,
    pub r: f64,
    pub x_true: f64,
    pub x_meas: f64,
    pub dx_est: Option<f64>,
    pub u: f64,
    pub r_star: Option<usize>,
}

/// Runs the loop for `cfg.duration` seconds at the plant's sample rate.
///
/// Per sample: read the reference and its slope, measure the plant
/// position (plus bounded noise), update the derivative estimate, form
/// the control voltage, then advance the plant. The record stores the
/// state as the controller saw it.
pub fn run_closed_loop(
    cfg: &LoopConfig,
    diff: &mut dyn Differentiator,
) -> Result<Vec<LoopRecord>, Error> {
    cfg.plant.validate()?;
    cfg.reference.validate()?;
    if !(cfg.duration.is_finite() && cfg.duration > 0.0) {
        return Err(Error::InvalidParam("duration must be positive and finite"));
    }
    let ts = cfg.plant.ts;
    let steps = (cfg.duration / ts).round() as usize;
    if steps == 0 {
        return Err(Error::InvalidParam("duration shorter than one sample"));
    }

    let mut plant = Plant::new(cfg.plant)?;
    let mut pid = Pid::new(cfg.pid, ts)?;
    let mut noise = match cfg.noise {
        Some(model) => Some(NoiseGen::new(model)?),
        None => None,
    };

    let mut records = Vec::with_capacity(steps);
    for l in 0..steps {
        let t = l as f64 * ts;
        let (r, dr) = cfg.reference.sample(t);
        let x_true = plant.position();
        let w = noise.as_mut().map_or(0.0, NoiseGen::sample);
        let x_meas = x_true + w;
        let dx_est = diff.step(t, x_meas);
        let u = pid.step(r, x_meas, dx_est.unwrap_or(0.0), dr);
        plant.step(u);
        records.push(LoopRecord {
            t,
            r,
            x_true,
            x_meas,
            dx_est,
            u,
            r_star: diff.window_size(),
        });
    }
    Ok(records)
}
