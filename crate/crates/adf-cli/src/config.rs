//! Flat key=value experiment configuration: optional file, then
//! command-line overrides, then validation. Every run echoes the fully
//! resolved set back out so results are reproducible from the sidecar
//! alone.

use std::path::Path;

use adf::differentiators::{Differentiator, FiniteDifference, Ldf, LdfParams, Red, RedParams};
use adf::sim::{Chirp, NoiseKind, NoiseModel, PidParams, PlantModel, ReferenceSignal};
use adf::{Adf, AdfParams};
use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Adf,
    Ldf,
    Red,
    Fd,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Adf => "adf",
            FilterKind::Ldf => "ldf",
            FilterKind::Red => "red",
            FilterKind::Fd => "fd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Step,
    Slope,
    Sweep,
}

impl SignalKind {
    fn name(self) -> &'static str {
        match self {
            SignalKind::Step => "step",
            SignalKind::Slope => "slope",
            SignalKind::Sweep => "sweep",
        }
    }
}

/// Resolved experiment parameters; one struct covers every subcommand,
/// each reads the fields it needs.
#[derive(Debug, Clone)]
pub struct Config {
    pub ts: f64,
    pub duration: f64,
    pub seed: u64,
    pub filter: FilterKind,
    pub delta: f64,
    pub r_max: usize,
    pub omega0: f64,
    pub kappa: f64,
    pub signal: SignalKind,
    pub step_amplitude: f64,
    pub step_t_start: f64,
    pub slope_rate: f64,
    pub slope_target: f64,
    pub slope_t_start: f64,
    pub sweep_amplitude: f64,
    pub sweep_omega1: f64,
    pub sweep_omega2: f64,
    pub sweep_duration: f64,
    pub sweep_offset: f64,
    pub noise: Option<NoiseKind>,
    pub noise_d: f64,
    pub kp: f64,
    pub ti: f64,
    pub td: f64,
    pub gamma: f64,
    pub hf_cutoff_hz: f64,
    pub travel_stops: bool,
    pub frf_omega_lo: f64,
    pub frf_omega_hi: f64,
    pub frf_points: usize,
}

impl Default for Config {
    /// The servo-bench scenario: 2 kHz sampling, band half-width and
    /// noise bound of 0.1 mm, window cap 140, comparison filters at
    /// their study tuning, a rate-limited 9 mm move, and a decade sweep
    /// for frequency response runs.
    fn default() -> Self {
        Config {
            ts: 5e-4,
            duration: 2.0,
            seed: 1,
            filter: FilterKind::Adf,
            delta: 1e-4,
            r_max: 140,
            omega0: 600.0,
            kappa: 8.0,
            signal: SignalKind::Slope,
            step_amplitude: 0.01,
            step_t_start: 0.1,
            slope_rate: 0.009,
            slope_target: 0.009,
            slope_t_start: 0.1,
            sweep_amplitude: 5e-3,
            sweep_omega1: 0.5,
            sweep_omega2: 80.0,
            sweep_duration: 700.0,
            sweep_offset: 0.009,
            noise: Some(NoiseKind::Uniform),
            noise_d: 1e-4,
            kp: 420.0,
            ti: 0.07,
            td: 0.03,
            gamma: 0.0,
            hf_cutoff_hz: 50.0,
            travel_stops: false,
            frf_omega_lo: 1.0,
            frf_omega_hi: 50.0,
            frf_points: 25,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .parse()
        .with_context(|| format!("config key '{key}': cannot parse '{value}'"))
}

impl Config {
    /// Applies one key=value assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "ts" => self.ts = parse(key, value)?,
            "duration" => self.duration = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "filter" => {
                self.filter = match value {
                    "adf" => FilterKind::Adf,
                    "ldf" => FilterKind::Ldf,
                    "red" => FilterKind::Red,
                    "fd" => FilterKind::Fd,
                    _ => bail!("config key 'filter': expected adf|ldf|red|fd, got '{value}'"),
                }
            }
            "delta" => self.delta = parse(key, value)?,
            "r_max" => self.r_max = parse(key, value)?,
            "omega0" => self.omega0 = parse(key, value)?,
            "kappa" => self.kappa = parse(key, value)?,
            "signal" => {
                self.signal = match value {
                    "step" => SignalKind::Step,
                    "slope" => SignalKind::Slope,
                    "sweep" => SignalKind::Sweep,
                    _ => bail!("config key 'signal': expected step|slope|sweep, got '{value}'"),
                }
            }
            "step_amplitude" => self.step_amplitude = parse(key, value)?,
            "step_t_start" => self.step_t_start = parse(key, value)?,
            "slope_rate" => self.slope_rate = parse(key, value)?,
            "slope_target" => self.slope_target = parse(key, value)?,
            "slope_t_start" => self.slope_t_start = parse(key, value)?,
            "sweep_amplitude" => self.sweep_amplitude = parse(key, value)?,
            "sweep_omega1" => self.sweep_omega1 = parse(key, value)?,
            "sweep_omega2" => self.sweep_omega2 = parse(key, value)?,
            "sweep_duration" => self.sweep_duration = parse(key, value)?,
            "sweep_offset" => self.sweep_offset = parse(key, value)?,
            "noise" => {
                self.noise = match value {
                    "none" => None,
                    "uniform" => Some(NoiseKind::Uniform),
                    "gaussian" => Some(NoiseKind::GaussianTruncated),
                    _ => bail!("config key 'noise': expected none|uniform|gaussian, got '{value}'"),
                }
            }
            "noise_d" => self.noise_d = parse(key, value)?,
            "kp" => self.kp = parse(key, value)?,
            "ti" => self.ti = parse(key, value)?,
            "td" => self.td = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "hf_cutoff_hz" => self.hf_cutoff_hz = parse(key, value)?,
            "travel_stops" => {
                self.travel_stops = match value {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    _ => bail!("config key 'travel_stops': expected on|off, got '{value}'"),
                }
            }
            "frf_omega_lo" => self.frf_omega_lo = parse(key, value)?,
            "frf_omega_hi" => self.frf_omega_hi = parse(key, value)?,
            "frf_points" => self.frf_points = parse(key, value)?,
            _ => bail!("unknown config key '{key}'"),
        }
        Ok(())
    }

    /// Loads `key = value` lines ('#' comments, blank lines allowed).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{} line {}: expected key = value", path.display(), no + 1);
            };
            self.set(key.trim(), value)
                .with_context(|| format!("{} line {}", path.display(), no + 1))?;
        }
        Ok(())
    }

    /// File, then overrides, then a validation pass.
    pub fn resolve(file: Option<&Path>, sets: &[String]) -> Result<Config> {
        let mut cfg = Config::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for s in sets {
            let Some((key, value)) = s.split_once('=') else {
                bail!("--set '{s}': expected KEY=VALUE");
            };
            cfg.set(key.trim(), value).context("--set override")?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ts.is_finite() && self.ts > 0.0) {
            bail!("ts must be positive");
        }
        if !(self.duration.is_finite() && self.duration >= self.ts) {
            bail!("duration must cover at least one sample");
        }
        if !(self.hf_cutoff_hz.is_finite() && self.hf_cutoff_hz >= 0.0) {
            bail!("hf_cutoff_hz must be >= 0");
        }
        if self.frf_points < 2 {
            bail!("frf_points must be at least 2");
        }
        if !(self.frf_omega_lo > 0.0 && self.frf_omega_hi > self.frf_omega_lo) {
            bail!("frf_omega range must satisfy 0 < lo < hi");
        }
        AdfParams::new(self.delta, self.r_max).context("adf parameters")?;
        LdfParams {
            omega0: self.omega0,
            ts: self.ts,
        }
        .validate()
        .context("ldf parameters")?;
        RedParams {
            kappa: self.kappa,
            ts: self.ts,
        }
        .validate()
        .context("red parameters")?;
        self.reference().context("signal parameters")?;
        if let Some(model) = self.noise_model() {
            model.validate().context("noise parameters")?;
        }
        self.pid_params().validate().context("pid parameters")?;
        Ok(())
    }

    /// Canonical reloadable form, keys sorted.
    pub fn echo(&self) -> String {
        let noise = match self.noise {
            None => "none",
            Some(NoiseKind::Uniform) => "uniform",
            Some(NoiseKind::GaussianTruncated) => "gaussian",
        };
        let mut pairs: Vec<(&str, String)> = vec![
            ("ts", self.ts.to_string()),
            ("duration", self.duration.to_string()),
            ("seed", self.seed.to_string()),
            ("filter", self.filter.name().to_string()),
            ("delta", self.delta.to_string()),
            ("r_max", self.r_max.to_string()),
            ("omega0", self.omega0.to_string()),
            ("kappa", self.kappa.to_string()),
            ("signal", self.signal.name().to_string()),
            ("step_amplitude", self.step_amplitude.to_string()),
            ("step_t_start", self.step_t_start.to_string()),
            ("slope_rate", self.slope_rate.to_string()),
            ("slope_target", self.slope_target.to_string()),
            ("slope_t_start", self.slope_t_start.to_string()),
            ("sweep_amplitude", self.sweep_amplitude.to_string()),
            ("sweep_omega1", self.sweep_omega1.to_string()),
            ("sweep_omega2", self.sweep_omega2.to_string()),
            ("sweep_duration", self.sweep_duration.to_string()),
            ("sweep_offset", self.sweep_offset.to_string()),
            ("noise", noise.to_string()),
            ("noise_d", self.noise_d.to_string()),
            ("kp", self.kp.to_string()),
            ("ti", self.ti.to_string()),
            ("td", self.td.to_string()),
            ("gamma", self.gamma.to_string()),
            ("hf_cutoff_hz", self.hf_cutoff_hz.to_string()),
            (
                "travel_stops",
                if self.travel_stops { "on" } else { "off" }.to_string(),
            ),
            ("frf_omega_lo", self.frf_omega_lo.to_string()),
            ("frf_omega_hi", self.frf_omega_hi.to_string()),
            ("frf_points", self.frf_points.to_string()),
        ];
        pairs.sort_by_key(|(k, _)| *k);
        let mut out = String::new();
        for (k, v) in pairs {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn reference(&self) -> Result<ReferenceSignal> {
        let r = match self.signal {
            SignalKind::Step => ReferenceSignal::Step {
                amplitude: self.step_amplitude,
                t_start: self.step_t_start,
            },
            SignalKind::Slope => ReferenceSignal::Slope {
                rate: self.slope_rate,
                target: self.slope_target,
                t_start: self.slope_t_start,
            },
            SignalKind::Sweep => ReferenceSignal::Sweep(self.chirp()),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn chirp(&self) -> Chirp {
        Chirp {
            amplitude: self.sweep_amplitude,
            omega1: self.sweep_omega1,
            omega2: self.sweep_omega2,
            duration: self.sweep_duration,
            offset: self.sweep_offset,
        }
    }

    pub fn noise_model(&self) -> Option<NoiseModel> {
        self.noise.map(|kind| NoiseModel {
            kind,
            d: self.noise_d,
            seed: self.seed,
        })
    }

    pub fn pid_params(&self) -> PidParams {
        PidParams {
            kp: self.kp,
            ti: self.ti,
            td: self.td,
            gamma: self.gamma,
        }
    }

    pub fn plant_model(&self) -> PlantModel {
        let mut plant = PlantModel::voice_coil(self.ts);
        if self.travel_stops {
            plant.position_limits = Some(PlantModel::TRAVEL);
        }
        plant
    }

    /// Builds the selected derivative estimator. `uniform` marks
    /// streams generated on the exact `ts` grid, which lets the window
    /// filter use its precomputed weight tables; pass false for
    /// externally recorded (possibly irregular) data.
    pub fn build_filter(&self, uniform: bool) -> Result<Box<dyn Differentiator>> {
        Ok(match self.filter {
            FilterKind::Adf => {
                let params = AdfParams::new(self.delta, self.r_max)?;
                if uniform {
                    Box::new(Adf::with_uniform_rate(params, self.ts)?)
                } else {
                    Box::new(Adf::new(params))
                }
            }
            FilterKind::Ldf => Box::new(Ldf::new(LdfParams {
                omega0: self.omega0,
                ts: self.ts,
            })?),
            FilterKind::Red => Box::new(Red::new(RedParams {
                kappa: self.kappa,
                ts: self.ts,
            })?),
            FilterKind::Fd => Box::new(FiniteDifference::new()),
        })
    }
}
