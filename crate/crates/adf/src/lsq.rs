//! Line fits over a trailing sample window.
//!
//! Times are shifted so the newest sample sits at zero: the fit minimizes
//! `sum (x_i - k*(t_i - t_last) - b)^2`, so `k` estimates the derivative
//! and `b` the denoised value, both at the newest sample. The constrained
//! variant additionally keeps `b` within `delta` of the newest measurement.
//! Shifting keeps the normal equations well conditioned no matter how
//! large the absolute timestamps grow.

use crate::sample::Sample;

/// Result of a line fit over a window, evaluated at the newest sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    /// Fitted slope, the derivative estimate.
    pub slope: f64,
    /// Fitted value at the newest sample's time.
    pub value: f64,
    /// True when the band constraint was active and the fit was projected
    /// onto its boundary.
    pub constrained: bool,
}

/// Accumulated sums over shifted times. `st = sum T_i`, `stt = sum T_i^2`,
/// `sx = sum x_i`, `stx = sum T_i x_i`, with `T_i = t_i - t_last <= 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FitSums {
    pub n: f64,
    pub st: f64,
    pub stt: f64,
    pub sx: f64,
    pub stx: f64,
}

pub(crate) fn accumulate<I>(samples: I, t_last: f64) -> FitSums
where
    I: IntoIterator<Item = Sample>,
{
    let mut s = FitSums {
        n: 0.0,
        st: 0.0,
        stt: 0.0,
        sx: 0.0,
        stx: 0.0,
    };
    for p in samples {
        let tt = p.t - t_last;
        s.n += 1.0;
        s.st += tt;
        s.stt += tt * tt;
        s.sx += p.x;
        s.stx += tt * p.x;
    }
    s
}

/// Unconstrained normal-equation solve. The determinant is positive for
/// any window with at least two distinct times.
pub(crate) fn solve(s: &FitSums) -> (f64, f64) {
    let det = s.n * s.stt - s.st * s.st;
    debug_assert!(det > 0.0, "window must contain two distinct times");
    let k = (s.n * s.stx - s.st * s.sx) / det;
    let b = (s.stt * s.sx - s.st * s.stx) / det;
    (k, b)
}

/// Project an unconstrained fit onto the band `|x_last - b| <= delta`.
///
/// When the unconstrained value estimate leaves the band, `b` moves to
/// the nearer band edge and the slope is re-minimized with `b` held
/// there, which gives `k' = k + (b - b')*st/stt` straight from the normal
/// equations. `st` and `stt` must match the sums the fit came from.
pub(crate) fn project_to_band(
    k: f64,
    b: f64,
    x_last: f64,
    delta: f64,
    st: f64,
    stt: f64,
) -> LineFit {
    let dev = b - x_last;
    if dev.abs() <= delta {
        return LineFit {
            slope: k,
            value: b,
            constrained: false,
        };
    }
    let b_edge = x_last + delta * dev.signum();
    let k_edge = k + (b - b_edge) * st / stt;
    LineFit {
        slope: k_edge,
        value: b_edge,
        constrained: true,
    }
}

fn check_window(window: &[Sample]) {
    assert!(window.len() >= 2, "fit needs at least two samples");
    for pair in window.windows(2) {
        assert!(
            pair[1].t > pair[0].t,
            "sample times must increase strictly"
        );
    }
}

/// Least-squares line through `window` (oldest first, strictly increasing
/// times), evaluated at the newest sample.
pub fn ls_fit_unconstrained(window: &[Sample]) -> LineFit {
    check_window(window);
    let t_last = window[window.len() - 1].t;
    let sums = accumulate(window.iter().copied(), t_last);
    let (k, b) = solve(&sums);
    LineFit {
        slope: k,
        value: b,
        constrained: false,
    }
}

/// Least-squares line with the value at the newest sample confined to
/// `delta` around the newest measurement.
pub fn ls_fit_constrained(window: &[Sample], delta: f64) -> LineFit {
    check_window(window);
    assert!(
        delta.is_finite() && delta > 0.0,
        "delta must be positive and finite"
    );
    let last = window[window.len() - 1];
    let sums = accumulate(window.iter().copied(), last.t);
    let (k, b) = solve(&sums);
    project_to_band(k, b, last.x, delta, sums.st, sums.stt)
}

/// Fit weights for uniformly sampled windows: with shifted times
/// `T_i = -(r - i) * ts` for `i = 0..=r`, the slope is `phi . x` and the
/// value at the newest sample is `psi . x`. The weights satisfy
/// `sum phi = 0`, `sum phi*T = 1`, `sum psi = 1`, `sum psi*T = 0`, so a
/// line is reproduced exactly. Index 0 is the oldest sample.
pub fn precompute_phi_psi(r: usize, ts: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(r >= 1, "window size must be at least 1");
    assert!(ts.is_finite() && ts > 0.0, "ts must be positive and finite");
    let (st, stt) = uniform_sums(r, ts);
    let n = (r + 1) as f64;
    let det = n * stt - st * st;
    let mut phi = Vec::with_capacity(r + 1);
    let mut psi = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let tt = -((r - i) as f64) * ts;
        phi.push((n * tt - st) / det);
        psi.push((stt - st * tt) / det);
    }
    (phi, psi)
}

/// Closed-form `sum T_i` and `sum T_i^2` for the uniform grid
/// `T_i = -(r - i) * ts`.
pub(crate) fn uniform_sums(r: usize, ts: f64) -> (f64, f64) {
    let rf = r as f64;
    let st = -ts * rf * (rf + 1.0) / 2.0;
    let stt = ts * ts * rf * (rf + 1.0) * (2.0 * rf + 1.0) / 6.0;
    (st, stt)
}
