use serde::{Deserialize, Serialize};

/// Rough evaluation-count model comparing a bisection search for the true
/// minimal refinement index against jumping straight to `j_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    /// `j_s·b/ε + b/ε`: first scan plus one scan at `h1/j_s`.
    pub c_real: f64,
    /// First bisection probe at `(j_n + j_s)/2`.
    pub c_bisection_1: f64,
    /// Second probe at the midpoint of the first probe and `j_s`.
    pub c_bisection_2: f64,
    pub ratio_1: f64,
    pub ratio_2: f64,
}

/// Pure arithmetic; expects `j_n <= j_s` and positive `b`, `eps`.
pub fn bisection_cost_model(j_n: u64, j_s: u64, b: f64, eps: f64) -> CostSummary {
    let unit = b / eps;
    let (jn, js) = (j_n as f64, j_s as f64);
    let first_probe = (jn + js) / 2.0;
    let c_real = js * unit + unit;
    let c_bisection_1 = first_probe * unit + unit;
    let c_bisection_2 = (first_probe + js) / 2.0 * unit + c_bisection_1;
    CostSummary {
        c_real,
        c_bisection_1,
        c_bisection_2,
        ratio_1: c_bisection_1 / c_real,
        ratio_2: c_bisection_2 / c_real,
    }
}
