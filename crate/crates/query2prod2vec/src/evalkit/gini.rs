//! Gini coefficient of a non-negative frequency distribution.

use crate::error::{Error, Result};

/// Concentration of a frequency list, in `[0, 1)`: 0 for perfect equality,
/// `(n-1)/n` when a single entry holds everything. Defined as
/// `sum_i sum_j |x_i - x_j| / (2 n sum_i x_i)`; computed here from the
/// ascending sort as `sum_i (2i - n - 1) x_(i) / (n sum x)` with a single
/// final division, so integer-valued inputs round exactly once.
pub fn gini(frequencies: &[f64]) -> Result<f64> {
    if frequencies.is_empty() {
        return Err(Error::EmptyInput("gini over empty list".into()));
    }
    if frequencies.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidConfig(
            "gini requires finite non-negative frequencies".into(),
        ));
    }
    let sum: f64 = frequencies.iter().sum();
    if sum == 0.0 {
        return Err(Error::EmptyInput("gini over all-zero frequencies".into()));
    }
    let mut sorted = frequencies.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len();
    let mut numerator = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        // i is 0-based; 1-based coefficient is 2(i+1) - n - 1
        numerator += (2 * (i + 1)) as f64 * x;
    }
    numerator -= (n + 1) as f64 * sum;
    Ok(numerator / (n as f64 * sum))
}
