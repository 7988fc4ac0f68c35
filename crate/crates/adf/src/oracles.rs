//! Slow, independent reference implementations for testing.
//!
//! Everything here recomputes from first principles what the streaming
//! code maintains incrementally: exhaustive pair scans instead of
//! envelope updates, a tiny linear program instead of the closed-form
//! feasibility test, numeric minimization instead of the projected fit.
//! The implementations deliberately share no code with the fast paths.
//! They are meant for test suites and small windows; nothing here is
//! suitable for streaming use.

use crate::sample::Sample;

/// Smallest worst-case deviation of any line from the window's samples,
/// found by solving `min e s.t. |x_i - k*T_i - b| <= e` as a linear
/// program in (k, b, e). The optimum sits on a vertex where three
/// constraints are active, so all constraint triples are enumerated and
/// the best feasible vertex wins. Times are shifted to the newest sample
/// for conditioning, which changes neither slope nor deviation.
pub fn chebyshev_deviation_lp(window: &[Sample]) -> f64 {
    let n = window.len();
    assert!(n >= 2, "need at least two samples");
    let t_last = window[n - 1].t;
    // Constraint rows a.(k,b,e) <= c: residual above -e and below +e.
    let mut rows: Vec<([f64; 3], f64)> = Vec::with_capacity(2 * n);
    for s in window {
        let tt = s.t - t_last;
        rows.push(([-tt, -1.0, -1.0], -s.x)); // x - k*T - b <= e
        rows.push(([tt, 1.0, -1.0], s.x)); //  k*T + b - x <= e
    }
    let scale: f64 = window.iter().map(|s| s.x.abs()).fold(1.0, f64::max);
    let mut best = f64::INFINITY;
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            for p in (j + 1)..rows.len() {
                let sol = solve3(&rows[i], &rows[j], &rows[p]);
                let (k, b, e) = match sol {
                    Some(v) => v,
                    None => continue,
                };
                if e < -1e-9 * scale || e >= best {
                    continue;
                }
                let tol = 1e-9 * (scale + e.abs());
                let ok = rows
                    .iter()
                    .all(|(a, c)| a[0] * k + a[1] * b + a[2] * e <= c + tol);
                if ok {
                    best = e;
                }
            }
        }
    }
    assert!(best.is_finite(), "LP enumeration found no feasible vertex");
    best.max(0.0)
}

/// Solve the 3x3 system where all three constraint rows hold with
/// equality. Returns None for (near-)singular triples.
fn solve3(r0: &([f64; 3], f64), r1: &([f64; 3], f64), r2: &([f64; 3], f64)) -> Option<(f64, f64, f64)> {
    let a = [r0.0, r1.0, r2.0];
    let c = [r0.1, r1.1, r2.1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let norm: f64 = a
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    if det.abs() <= 1e-12 * norm * norm * norm {
        return None;
    }
    // Cramer's rule.
    let dk = c[0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (c[1] * a[2][2] - a[1][2] * c[2])
        + a[0][2] * (c[1] * a[2][1] - a[1][1] * c[2]);
    let db = a[0][0] * (c[1] * a[2][2] - a[1][2] * c[2])
        - c[0] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * c[2] - c[1] * a[2][0]);
    let de = a[0][0] * (a[1][1] * c[2] - c[1] * a[2][1])
        - a[0][1] * (a[1][0] * c[2] - c[1] * a[2][0])
        + c[0] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    Some((dk / det, db / det, de / det))
}

/// Same quantity through the classical characterization: for affine
/// approximation the extremal set is three points with alternating
/// residual signs, and the best deviation on a triple is half the
/// vertical distance from the middle point to the chord of the outer
/// two. The answer is the maximum over all time-ordered triples.
pub fn chebyshev_deviation_alternation(window: &[Sample]) -> f64 {
    let n = window.len();
    assert!(n >= 2, "need at least two samples");
    let mut best = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for p in (j + 1)..n {
                let (a, b, c) = (window[i], window[j], window[p]);
                let chord = a.x + (c.x - a.x) * (b.t - a.t) / (c.t - a.t);
                best = best.max((b.x - chord).abs() / 2.0);
            }
        }
    }
    best
}

/// LP-based feasibility reference: a line within `delta` of every sample
/// exists iff the minimal Chebyshev deviation does not exceed `delta`.
pub fn oracle_feasible(window: &[Sample], delta: f64) -> bool {
    if window.len() < 2 {
        return true;
    }
    chebyshev_deviation_lp(window) <= delta
}

/// Recompute both slope envelopes by brute force: entry k-1 aggregates
/// all pairs whose older sample sits k positions behind the newest.
pub fn oracle_envelopes(window: &[Sample], delta: f64) -> (Vec<f64>, Vec<f64>) {
    let n = window.len();
    assert!(n >= 2, "need at least two samples");
    let mut lower = Vec::with_capacity(n - 1);
    let mut upper = Vec::with_capacity(n - 1);
    for k in 1..n {
        let j = n - 1 - k;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in (j + 1)..n {
            let dt = window[i].t - window[j].t;
            let dx = window[i].x - window[j].x;
            lo = lo.max((dx - 2.0 * delta) / dt);
            hi = hi.min((dx + 2.0 * delta) / dt);
        }
        lower.push(lo);
        upper.push(hi);
    }
    (lower, upper)
}

/// Unconstrained line fit via the centered (two-pass) normal equations,
/// an algebraic route distinct from the production solver. Returns
/// (slope, value at the newest sample).
pub fn oracle_ls_unconstrained(window: &[Sample]) -> (f64, f64) {
    let n = window.len() as f64;
    assert!(window.len() >= 2, "need at least two samples");
    let t_last = window[window.len() - 1].t;
    let mean_t: f64 = window.iter().map(|s| s.t - t_last).sum::<f64>() / n;
    let mean_x: f64 = window.iter().map(|s| s.x).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for s in window {
        let dt = (s.t - t_last) - mean_t;
        num += dt * (s.x - mean_x);
        den += dt * dt;
    }
    let k = num / den;
    (k, mean_x - k * mean_t)
}

/// Constrained fit by numeric search: for each candidate value `b` in
/// the band around the newest measurement, the best slope is closed-form
/// and the objective is convex in `b`, so a coarse grid (1e-3 of the
/// band) followed by golden-section refinement (to 1e-8 of the band)
/// finds the constrained minimum. Returns (slope, value).
pub fn oracle_ls_constrained(window: &[Sample], delta: f64) -> (f64, f64) {
    assert!(window.len() >= 2, "need at least two samples");
    assert!(delta > 0.0);
    let last = window[window.len() - 1];
    let t_last = last.t;
    let stt: f64 = window.iter().map(|s| (s.t - t_last).powi(2)).sum();

    let slope_for = |b: f64| -> f64 {
        window
            .iter()
            .map(|s| (s.t - t_last) * (s.x - b))
            .sum::<f64>()
            / stt
    };
    let objective = |b: f64| -> f64 {
        let k = slope_for(b);
        window
            .iter()
            .map(|s| (s.x - k * (s.t - t_last) - b).powi(2))
            .sum()
    };

    let lo = last.x - delta;
    let hi = last.x + delta;
    let steps = 2000usize;
    let mut best_b = lo;
    let mut best_f = objective(lo);
    for i in 1..=steps {
        let b = lo + (hi - lo) * i as f64 / steps as f64;
        let f = objective(b);
        if f < best_f {
            best_f = f;
            best_b = b;
        }
    }
    // Golden-section refinement around the best grid cell.
    let cell = (hi - lo) / steps as f64;
    let mut a = (best_b - cell).max(lo);
    let mut b = (best_b + cell).min(hi);
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while (b - a) > 1e-8 * delta {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let b_star = 0.5 * (a + b);
    (slope_for(b_star), b_star)
}

/// Largest feasible trailing window at the end of `history`, found by
/// scanning every candidate size (the streaming filter must match this).
/// Uses the alternation characterization of the Chebyshev deviation,
/// which tests cross-check against the LP.
pub fn oracle_best_window(history: &[Sample], r_max: usize, delta: f64) -> usize {
    let l = history.len() - 1;
    let cap = r_max.min(l);
    for r in (1..=cap).rev() {
        let w = &history[l - r..=l];
        if chebyshev_deviation_alternation(w) <= delta {
            return r;
        }
    }
    // A two-sample window is always feasible, so cap >= 1 implies return
    // above; reaching here means the history has a single sample.
    0
}
