/// One timestamped measurement: position `x` (m) taken at time `t` (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

impl Sample {
    pub fn new(t: f64, x: f64) -> Self {
        Sample { t, x }
    }
}
