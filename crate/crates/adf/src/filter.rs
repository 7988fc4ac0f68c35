//! The adaptive-window differentiating filter.
//!
//! Each incoming sample first tries to grow the trailing window by one,
//! then sheds its oldest samples until a straight line can approximate
//! every sample in the window to within `delta`. A constrained least
//! squares fit over that window yields the derivative estimate (slope)
//! and a denoised value estimate (intercept, kept within `delta` of the
//! newest measurement). Under bounded noise the feasibility test is what
//! makes the estimate robust: the window only shrinks when the signal
//! genuinely bends faster than the noise band can hide.

use crate::envelope::SlopeEnvelopes;
use crate::error::Error;
use crate::lsq::{self, LineFit};
use crate::ring::SampleRing;
use crate::sample::Sample;

/// Relative tolerance for the fixed-period check in uniform mode. Time
/// grids built as `l * ts` accumulate rounding of a few ulps, far below
/// this; genuinely irregular streams miss it by orders of magnitude.
const UNIFORM_SPACING_TOL: f64 = 1e-6;

/// Filter parameters: band half-width `delta` (same unit as the signal)
/// and the largest window size `r_max` (a window of size R spans R+1
/// samples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfParams {
    delta: f64,
    r_max: usize,
}

impl AdfParams {
    pub fn new(delta: f64, r_max: usize) -> Result<Self, Error> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParam("delta must be positive and finite"));
        }
        if r_max < 1 {
            return Err(Error::InvalidParam("r_max must be at least 1"));
        }
        Ok(AdfParams { delta, r_max })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }
}

/// How sample times are treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeBase {
    /// Arbitrary strictly increasing times; fits use the actual stamps.
    Irregular,
    /// Fixed period `ts`; fits use precomputed weights. Samples whose
    /// spacing disagrees with `ts` are rejected instead of silently
    /// producing wrong weights.
    Uniform { ts: f64 },
}

/// One filter output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOutput {
    /// Denoised value estimate at the current sample, always within
    /// `delta` of the measurement.
    pub x_hat: f64,
    /// Derivative estimate. `None` only for the very first sample, where
    /// no window exists yet; it is never fabricated as 0 or NaN.
    pub dx_hat: Option<f64>,
    /// Size of the window the estimate came from (0 for the first sample).
    pub r_star: usize,
    /// True when the value estimate was pinned to the band edge.
    pub constrained: bool,
}

/// Precomputed per-size fit weights for the uniform time base.
#[derive(Debug, Clone)]
struct UniformTables {
    ts: f64,
    /// Index r-1 holds the weight pair for window size r.
    weights: Vec<(Vec<f64>, Vec<f64>)>,
    /// Closed-form sum of shifted times per size, for the band projection.
    st: Vec<f64>,
    stt: Vec<f64>,
}

impl UniformTables {
    fn build(r_max: usize, ts: f64) -> Self {
        let mut weights = Vec::with_capacity(r_max);
        let mut st = Vec::with_capacity(r_max);
        let mut stt = Vec::with_capacity(r_max);
        for r in 1..=r_max {
            weights.push(lsq::precompute_phi_psi(r, ts));
            let (a, b) = lsq::uniform_sums(r, ts);
            st.push(a);
            stt.push(b);
        }
        UniformTables {
            ts,
            weights,
            st,
            stt,
        }
    }
}

/// Streaming adaptive-window differentiating filter. See the module docs
/// for the estimation scheme. All buffers are sized at construction; a
/// step allocates nothing.
#[derive(Debug, Clone)]
pub struct Adf {
    params: AdfParams,
    buf: SampleRing,
    env: SlopeEnvelopes,
    uniform: Option<UniformTables>,
    last_r_star: Option<usize>,
    last_x_hat: Option<f64>,
}

impl Adf {
    /// Filter for irregularly sampled streams (any strictly increasing
    /// times).
    pub fn new(params: AdfParams) -> Self {
        Adf {
            buf: SampleRing::with_capacity(params.r_max + 1),
            env: SlopeEnvelopes::new(params.delta, params.r_max),
            uniform: None,
            last_r_star: None,
            last_x_hat: None,
            params,
        }
    }

    /// Filter for a fixed sample period `ts`, using precomputed fit
    /// weights. Streams that do not keep the period are rejected at the
    /// offending sample; use [`Adf::new`] for irregular streams.
    pub fn with_uniform_rate(params: AdfParams, ts: f64) -> Result<Self, Error> {
        if !(ts.is_finite() && ts > 0.0) {
            return Err(Error::InvalidParam("ts must be positive and finite"));
        }
        let mut f = Adf::new(params);
        f.uniform = Some(UniformTables::build(params.r_max, ts));
        Ok(f)
    }

    pub fn params(&self) -> &AdfParams {
        &self.params
    }

    pub fn time_base(&self) -> TimeBase {
        match &self.uniform {
            Some(t) => TimeBase::Uniform { ts: t.ts },
            None => TimeBase::Irregular,
        }
    }

    /// Current window, oldest sample first.
    pub fn window(&self) -> impl Iterator<Item = Sample> + '_ {
        self.buf.iter()
    }

    /// Current slope envelopes (lower, upper), for diagnostics and tests.
    pub fn envelopes(&self) -> (&[f64], &[f64]) {
        (self.env.lower(), self.env.upper())
    }

    /// Window size used by the latest output, if any.
    pub fn r_star(&self) -> Option<usize> {
        self.last_r_star
    }

    /// Value estimate from the latest output, if any.
    pub fn x_hat(&self) -> Option<f64> {
        self.last_x_hat
    }

    /// Feed one sample. Timestamps must increase strictly; in uniform
    /// mode they must also keep the configured period. A rejected sample
    /// leaves the state untouched.
    pub fn step(&mut self, s: Sample) -> Result<FilterOutput, Error> {
        if !(s.t.is_finite() && s.x.is_finite()) {
            return Err(Error::InvalidParam("sample time and value must be finite"));
        }
        let last = match self.buf.back() {
            Some(last) => last,
            None => {
                // No window yet: pass the measurement through and say so.
                self.buf.push_back(s);
                self.last_r_star = Some(0);
                self.last_x_hat = Some(s.x);
                return Ok(FilterOutput {
                    x_hat: s.x,
                    dx_hat: None,
                    r_star: 0,
                    constrained: false,
                });
            }
        };
        if s.t <= last.t {
            return Err(Error::NonMonotonicTime {
                prev: last.t,
                next: s.t,
            });
        }
        if let Some(tab) = &self.uniform {
            let dt = s.t - last.t;
            if (dt - tab.ts).abs() > UNIFORM_SPACING_TOL * tab.ts {
                return Err(Error::UnevenSampling {
                    expected: tab.ts,
                    got: dt,
                });
            }
        }

        // Grow by one, holding the size cap: at the cap the oldest sample
        // leaves before the new one enters, and the envelope append then
        // only iterates the samples that remain.
        if self.env.len() == self.params.r_max {
            self.buf.pop_front();
        }
        self.env.add_right(s, self.buf.iter_rev());
        self.buf.push_back(s);

        // Shed oldest samples one at a time until a line fits the window;
        // a two-sample window is always feasible, so this terminates.
        while !self.env.is_feasible() {
            self.env.remove_left();
            self.buf.pop_front();
        }
        let r_star = self.env.len();
        debug_assert_eq!(self.buf.len(), r_star + 1);

        let fit = match &self.uniform {
            Some(tab) => fit_uniform(tab, r_star, &self.buf, self.params.delta),
            None => fit_general(&self.buf, self.params.delta),
        };
        self.last_r_star = Some(r_star);
        self.last_x_hat = Some(fit.value);
        Ok(FilterOutput {
            x_hat: fit.value,
            dx_hat: Some(fit.slope),
            r_star,
            constrained: fit.constrained,
        })
    }
}

fn fit_general(buf: &SampleRing, delta: f64) -> LineFit {
    let last = buf.back().expect("window is never empty here");
    let sums = lsq::accumulate(buf.iter(), last.t);
    let (k, b) = lsq::solve(&sums);
    lsq::project_to_band(k, b, last.x, delta, sums.st, sums.stt)
}

fn fit_uniform(tab: &UniformTables, r: usize, buf: &SampleRing, delta: f64) -> LineFit {
    let (phi, psi) = &tab.weights[r - 1];
    let mut k = 0.0;
    let mut b = 0.0;
    for (i, s) in buf.iter().enumerate() {
        k += phi[i] * s.x;
        b += psi[i] * s.x;
    }
    let last = buf.back().expect("window is never empty here");
    lsq::project_to_band(k, b, last.x, delta, tab.st[r - 1], tab.stt[r - 1])
}

/// Window feasibility test, exposed standalone: does some line stay
/// within `delta` of every sample? Computes the pairwise slope bounds
/// directly; windows with fewer than two samples are feasible by
/// convention. `window` must be sorted by strictly increasing time.
pub fn feasible(window: &[Sample], delta: f64) -> bool {
    assert!(
        delta.is_finite() && delta > 0.0,
        "delta must be positive and finite"
    );
    if window.len() < 2 {
        return true;
    }
    let mut m = f64::NEG_INFINITY;
    let mut big_m = f64::INFINITY;
    for j in 0..window.len() {
        for i in (j + 1)..window.len() {
            let dt = window[i].t - window[j].t;
            assert!(dt > 0.0, "sample times must increase strictly");
            let dx = window[i].x - window[j].x;
            m = m.max((dx - 2.0 * delta) / dt);
            big_m = big_m.min((dx + 2.0 * delta) / dt);
        }
    }
    m <= big_m
}
