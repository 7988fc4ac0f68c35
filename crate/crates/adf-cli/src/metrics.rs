//! Run summaries: error norms, spectral content of the control signal,
//! window statistics. Everything lands in an ordered key=value list so
//! runs stay easy to diff and to parse.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Ordered key=value pairs, printed one per line on stdout.
#[derive(Debug, Default)]
pub struct Metrics {
    entries: Vec<(String, String)>,
}

impl Metrics {
    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Root-mean-square of (estimate - truth) over the paired samples;
/// zero for an empty pairing.
pub fn rmse(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (est, truth) in pairs {
        let e = est - truth;
        sum += e * e;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Mean-square content of `series` above `cutoff_hz`, via the
/// periodogram: with U the DFT of u, the power is (1/n^2) * sum of
/// |U_k|^2 over bins whose frequency min(k, n-k)/(n*ts) exceeds the
/// cutoff. By Parseval this is the mean square of the high-pass part.
pub fn hf_power(series: &[f64], ts: f64, cutoff_hz: f64) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut power = 0.0;
    for (k, u) in buf.iter().enumerate().skip(1) {
        let bin = k.min(n - k) as f64;
        let freq = bin / (n as f64 * ts);
        if freq > cutoff_hz {
            power += u.norm_sqr();
        }
    }
    power / (n as f64 * n as f64)
}

/// Mean and max of the reported window sizes.
pub fn window_stats(sizes: impl Iterator<Item = usize>) -> (f64, usize) {
    let mut sum = 0usize;
    let mut max = 0usize;
    let mut n = 0usize;
    for s in sizes {
        sum += s;
        max = max.max(s);
        n += 1;
    }
    let mean = if n == 0 { 0.0 } else { sum as f64 / n as f64 };
    (mean, max)
}
