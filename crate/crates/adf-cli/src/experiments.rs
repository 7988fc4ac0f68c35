//! The four experiment flavours behind the subcommands. Each returns
//! the trace CSV plus a metrics list; file writing and the config echo
//! stay with the caller. Traces never contain wall-clock timings, so a
//! given config and seed reproduce them byte for byte.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use adf::differentiators::{Differentiator, FiniteDifference, Ldf, LdfParams, Red, RedParams};
use adf::sim::{run_closed_loop, LoopConfig, NoiseGen};
use adf::{Adf, AdfParams, Sample};
use anyhow::{bail, Result};

use crate::config::{Config, FilterKind};
use crate::csvio::{read_samples, CsvWriter, Field};
use crate::metrics::{hf_power, rmse, window_stats, Metrics};

#[derive(Debug)]
pub struct RunArtifacts {
    pub csv: String,
    pub metrics: Metrics,
}

fn f_opt(v: Option<f64>) -> Field {
    v.map_or(Field::Empty, Field::F)
}

fn u_opt(v: Option<usize>) -> Field {
    v.map_or(Field::Empty, Field::U)
}

fn sample_count(cfg: &Config) -> usize {
    (cfg.duration / cfg.ts).round() as usize
}

/// Feeds a generated signal (plus optional bounded noise) to the
/// selected filter and reports how well the derivative is recovered.
pub fn run_bench(cfg: &Config) -> Result<RunArtifacts> {
    let signal = cfg.reference()?;
    let steps = sample_count(cfg);
    let mut noise = cfg.noise_model().map(NoiseGen::new).transpose()?;
    let mut filter = cfg.build_filter(true)?;

    // Generate first, then run the filter in a tight timed loop.
    let mut truth = Vec::with_capacity(steps);
    for l in 0..steps {
        let t = l as f64 * cfg.ts;
        let (x_true, dx_true) = signal.sample(t);
        let w = noise.as_mut().map_or(0.0, NoiseGen::sample);
        truth.push((t, x_true, x_true + w, dx_true));
    }
    let mut outs = Vec::with_capacity(steps);
    let started = Instant::now();
    for &(t, _, x_meas, _) in &truth {
        let dx = filter.step(t, x_meas);
        outs.push((dx, filter.window_size(), filter.value_estimate()));
    }
    let elapsed = started.elapsed();

    let mut w = CsvWriter::new(&["t", "x_true", "x_meas", "dx_true", "dx_est", "r_star"]);
    for (&(t, x_true, x_meas, dx_true), &(dx, r_star, _)) in truth.iter().zip(&outs) {
        w.row(&[
            Field::F(t),
            Field::F(x_true),
            Field::F(x_meas),
            Field::F(dx_true),
            f_opt(dx),
            u_opt(r_star),
        ]);
    }

    let mut m = Metrics::default();
    m.push("n_samples", steps);
    m.push(
        "dx_rmse",
        rmse(
            truth
                .iter()
                .zip(&outs)
                .filter_map(|(t, o)| o.0.map(|dx| (dx, t.3))),
        ),
    );
    // Second half only: past every filter's start-up transient, the
    // number regression tests pin per filter.
    m.push(
        "dx_rmse_tail",
        rmse(
            truth
                .iter()
                .zip(&outs)
                .skip(steps / 2)
                .filter_map(|(t, o)| o.0.map(|dx| (dx, t.3))),
        ),
    );
    if outs.iter().any(|o| o.2.is_some()) {
        m.push(
            "x_hat_rmse",
            rmse(
                truth
                    .iter()
                    .zip(&outs)
                    .filter_map(|(t, o)| o.2.map(|xh| (xh, t.1))),
            ),
        );
    }
    if outs.iter().any(|o| o.1.is_some()) {
        let (mean, max) = window_stats(outs.iter().filter_map(|o| o.1));
        m.push("r_star_mean", mean);
        m.push("r_star_max", max);
    }
    m.push("runtime_ns_per_sample", elapsed.as_nanos() as u64 / steps.max(1) as u64);
    Ok(RunArtifacts {
        csv: w.finish(),
        metrics: m,
    })
}

/// Closed-loop run of the servo bench with the selected estimator in
/// the derivative path.
pub fn run_loop(cfg: &Config) -> Result<RunArtifacts> {
    let mut filter = cfg.build_filter(true)?;
    let loop_cfg = LoopConfig {
        plant: cfg.plant_model(),
        pid: cfg.pid_params(),
        reference: cfg.reference()?,
        noise: cfg.noise_model(),
        duration: cfg.duration,
    };
    let started = Instant::now();
    let records = run_closed_loop(&loop_cfg, filter.as_mut())?;
    let elapsed = started.elapsed();

    let mut w = CsvWriter::new(&["t", "r", "x_true", "x_meas", "u", "dx_est", "r_star"]);
    for rec in &records {
        w.row(&[
            Field::F(rec.t),
            Field::F(rec.r),
            Field::F(rec.x_true),
            Field::F(rec.x_meas),
            Field::F(rec.u),
            f_opt(rec.dx_est),
            u_opt(rec.r_star),
        ]);
    }

    let mut m = Metrics::default();
    m.push("n_samples", records.len());
    m.push(
        "tracking_rmse",
        rmse(records.iter().map(|r| (r.x_true, r.r))),
    );
    let u_series: Vec<f64> = records.iter().map(|r| r.u).collect();
    m.push(
        "u_hf_power",
        hf_power(&u_series, cfg.ts, cfg.hf_cutoff_hz),
    );
    // Second half only: reference transients (step edges) put broadband
    // energy into u that buries the estimator's own noise contribution;
    // the settled window isolates it.
    m.push(
        "u_hf_power_tail",
        hf_power(&u_series[u_series.len() / 2..], cfg.ts, cfg.hf_cutoff_hz),
    );
    if records.iter().any(|r| r.r_star.is_some()) {
        let (mean, max) = window_stats(records.iter().filter_map(|r| r.r_star));
        m.push("r_star_mean", mean);
        m.push("r_star_max", max);
    }
    m.push(
        "runtime_ns_per_sample",
        elapsed.as_nanos() as u64 / records.len().max(1) as u64,
    );
    Ok(RunArtifacts {
        csv: w.finish(),
        metrics: m,
    })
}

/// Empirical frequency response of all three estimators on one up-chirp:
/// per evaluation frequency, the RMS ratio of estimate to (offset-free)
/// input over a six-half-cycle phase window around the moment the sweep
/// passes that frequency, in dB against the ideal differentiator line
/// 20*log10(omega).
pub fn run_frf(cfg: &Config) -> Result<RunArtifacts> {
    let chirp = cfg.chirp();
    chirp.validate()?;
    let nyquist = PI / cfg.ts;
    if chirp.omega2 >= nyquist {
        bail!(
            "sweep_omega2 {} reaches the Nyquist rate {:.1} rad/s",
            chirp.omega2,
            nyquist
        );
    }
    if cfg.frf_omega_lo < chirp.omega1 || cfg.frf_omega_hi > chirp.omega2 {
        bail!(
            "frf evaluation range [{}, {}] outside the sweep [{}, {}]",
            cfg.frf_omega_lo,
            cfg.frf_omega_hi,
            chirp.omega1,
            chirp.omega2
        );
    }
    let phi_lo = chirp.phase(chirp.time_at_omega(cfg.frf_omega_lo));
    if phi_lo < 4.0 * PI {
        bail!("frf_omega_lo is too close to the sweep start; allow two lead-in cycles");
    }

    // Simulate until the top evaluation window has certainly closed.
    let t_end = chirp.time_at_omega(cfg.frf_omega_hi) + 6.0 * PI / cfg.frf_omega_hi;
    let steps = (t_end / cfg.ts).ceil() as usize;
    let mut noise = cfg.noise_model().map(NoiseGen::new).transpose()?;
    let mut x_meas = Vec::with_capacity(steps);
    let mut phases = Vec::with_capacity(steps);
    for l in 0..steps {
        let t = l as f64 * cfg.ts;
        let w = noise.as_mut().map_or(0.0, NoiseGen::sample);
        x_meas.push(chirp.value(t) + w);
        phases.push(chirp.phase(t));
    }

    let mut filters: Vec<(&str, Box<dyn Differentiator>)> = vec![
        (
            "adf",
            Box::new(Adf::with_uniform_rate(
                AdfParams::new(cfg.delta, cfg.r_max)?,
                cfg.ts,
            )?),
        ),
        (
            "ldf",
            Box::new(Ldf::new(LdfParams {
                omega0: cfg.omega0,
                ts: cfg.ts,
            })?),
        ),
        (
            "red",
            Box::new(Red::new(RedParams {
                kappa: cfg.kappa,
                ts: cfg.ts,
            })?),
        ),
    ];
    let started = Instant::now();
    let estimates: Vec<Vec<f64>> = filters
        .iter_mut()
        .map(|(_, f)| {
            x_meas
                .iter()
                .enumerate()
                .map(|(l, &x)| f.step(l as f64 * cfg.ts, x).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let elapsed = started.elapsed();

    let ratio = (cfg.frf_omega_hi / cfg.frf_omega_lo).powf(1.0 / (cfg.frf_points - 1) as f64);
    let mut w = CsvWriter::new(&["omega", "ideal_db", "adf_db", "ldf_db", "red_db"]);
    let mut max_dev = [0.0f64; 3];
    for k in 0..cfg.frf_points {
        let omega = cfg.frf_omega_lo * ratio.powi(k as i32);
        let centre = chirp.phase(chirp.time_at_omega(omega));
        let a = phases.partition_point(|&p| p < centre - 3.0 * PI);
        let b = phases.partition_point(|&p| p <= centre + 3.0 * PI);
        let rms_in = rms(x_meas[a..b].iter().map(|&x| x - chirp.offset));
        let ideal_db = 20.0 * omega.log10();
        let mut row = vec![Field::F(omega), Field::F(ideal_db)];
        for (i, dx) in estimates.iter().enumerate() {
            let rms_out = rms(dx[a..b].iter().copied().filter(|v| v.is_finite()));
            let gain_db = 20.0 * (rms_out / rms_in).log10();
            max_dev[i] = max_dev[i].max((gain_db - ideal_db).abs());
            row.push(Field::F(gain_db));
        }
        w.row(&row);
    }

    let mut m = Metrics::default();
    m.push("n_samples", steps);
    for (i, (name, _)) in filters.iter().enumerate() {
        m.push(&format!("{name}_max_dev_db"), max_dev[i]);
    }
    m.push(
        "runtime_ns_per_sample",
        elapsed.as_nanos() as u64 / (3 * steps.max(1)) as u64,
    );
    Ok(RunArtifacts {
        csv: w.finish(),
        metrics: m,
    })
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v * v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Replays an externally recorded `t,x` stream through the selected
/// filter. The window filter accepts irregular spacing; the fixed-rate
/// filters derive their period from the data and insist on it.
pub fn run_ingest(cfg: &Config, input: &Path) -> Result<RunArtifacts> {
    let samples = read_samples(input)?;
    let mut filter: Box<dyn Differentiator> = match cfg.filter {
        FilterKind::Adf => Box::new(Adf::new(AdfParams::new(cfg.delta, cfg.r_max)?)),
        FilterKind::Fd => Box::new(FiniteDifference::new()),
        FilterKind::Ldf | FilterKind::Red => {
            let ts = uniform_period(&samples)?;
            if cfg.filter == FilterKind::Ldf {
                Box::new(Ldf::new(LdfParams {
                    omega0: cfg.omega0,
                    ts,
                })?)
            } else {
                Box::new(Red::new(RedParams {
                    kappa: cfg.kappa,
                    ts,
                })?)
            }
        }
    };

    let mut outs = Vec::with_capacity(samples.len());
    let started = Instant::now();
    for s in &samples {
        let dx = filter.step(s.t, s.x);
        outs.push((dx, filter.window_size()));
    }
    let elapsed = started.elapsed();

    let mut w = CsvWriter::new(&["t", "x", "dx_est", "r_star"]);
    for (s, &(dx, r_star)) in samples.iter().zip(&outs) {
        w.row(&[Field::F(s.t), Field::F(s.x), f_opt(dx), u_opt(r_star)]);
    }
    let mut m = Metrics::default();
    m.push("n_samples", samples.len());
    if outs.iter().any(|o| o.1.is_some()) {
        let (mean, max) = window_stats(outs.iter().filter_map(|o| o.1));
        m.push("r_star_mean", mean);
        m.push("r_star_max", max);
    }
    m.push(
        "runtime_ns_per_sample",
        elapsed.as_nanos() as u64 / samples.len().max(1) as u64,
    );
    Ok(RunArtifacts {
        csv: w.finish(),
        metrics: m,
    })
}

/// The common sample period of a recorded stream, requiring every gap
/// to agree within one part per million.
fn uniform_period(samples: &[Sample]) -> Result<f64> {
    if samples.len() < 2 {
        bail!("fixed-rate filters need at least two samples");
    }
    let ts = samples[1].t - samples[0].t;
    for (i, pair) in samples.windows(2).enumerate() {
        let gap = pair[1].t - pair[0].t;
        if (gap - ts).abs() > 1e-6 * ts {
            bail!(
                "fixed-rate filters need uniform sampling: gap {} at sample {} differs from {}",
                gap,
                i + 1,
                ts
            );
        }
    }
    Ok(ts)
}
