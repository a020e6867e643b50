//! Composite Simpson rule on uniform samples, with a Richardson estimate of
//! the discretization error from the half-resolution grid.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpsonEstimate {
    pub value: f64,
    /// Estimated `S_h − I`, i.e. `(S_2h − S_h)/15`; `None` when the sample
    /// count does not admit a half-resolution Simpson rule (`(n − 1)/2` odd).
    pub error_estimate: Option<f64>,
}

/// Composite Simpson sum over uniformly spaced `samples` with spacing `h`.
pub fn simpson(h: f64, samples: &[f64]) -> Result<f64> {
    require_positive("h", h)?;
    let n = samples.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::domain(
            "n_points",
            format!("Simpson needs an odd count >= 3, got {n}"),
        ));
    }
    let interior: f64 = samples[1..n - 1]
        .iter()
        .enumerate()
        .map(|(i, &f)| if i % 2 == 0 { 4.0 * f } else { 2.0 * f })
        .sum();
    Ok(h / 3.0 * (samples[0] + interior + samples[n - 1]))
}

pub fn simpson_with_richardson(h: f64, samples: &[f64]) -> Result<SimpsonEstimate> {
    let value = simpson(h, samples)?;
    let intervals = samples.len() - 1;
    let error_estimate = if intervals >= 4 && (intervals / 2).is_multiple_of(2) {
        let coarse: Vec<f64> = samples.iter().step_by(2).copied().collect();
        Some((simpson(2.0 * h, &coarse)? - value) / 15.0)
    } else {
        None
    };
    Ok(SimpsonEstimate {
        value,
        error_estimate,
    })
}
