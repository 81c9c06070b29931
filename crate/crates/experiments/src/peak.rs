use serde::{Deserialize, Serialize};

use crate::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub tau: f64,
    pub value: f64,
    /// Index of the largest sample.
    pub index: usize,
    /// The largest sample is the first or last one, so the series may not
    /// contain a true maximum.
    pub at_boundary: bool,
}

/// Vertex of the parabola through three points, or `None` when the points
/// are collinear or curve upwards.
pub(crate) fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (d01, d02, d12) = (x[0] - x[1], x[0] - x[2], x[1] - x[2]);
    let denom = d01 * d02 * d12;
    if denom == 0.0 {
        return None;
    }
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom;
    let b = (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2])) / denom;
    if !(a < 0.0) {
        return None;
    }
    let xv = (-b / (2.0 * a)).clamp(x[0].min(x[2]), x[0].max(x[2]));
    let l0 = (xv - x[1]) * (xv - x[2]) / (d01 * d02);
    let l1 = (xv - x[0]) * (xv - x[2]) / (-d01 * d12);
    let l2 = (xv - x[0]) * (xv - x[1]) / (d02 * d12);
    Some((xv, y[0] * l0 + y[1] * l1 + y[2] * l2))
}

/// Global maximum with parabolic refinement through the bracketing samples.
pub fn find_peak(tau: &[f64], values: &[f64]) -> Result<Peak> {
    if tau.len() != values.len() {
        return Err(ExpError::Input(format!(
            "series lengths differ: {} times, {} values",
            tau.len(),
            values.len()
        )));
    }
    if values.len() < 3 {
        return Err(ExpError::Input("find_peak needs at least 3 samples".into()));
    }
    if values.iter().chain(tau).any(|v| !v.is_finite()) {
        return Err(ExpError::Input("series contains non-finite values".into()));
    }
    let mut index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[index] {
            index = i;
        }
    }
    if index == 0 || index == values.len() - 1 {
        return Ok(Peak {
            tau: tau[index],
            value: values[index],
            index,
            at_boundary: true,
        });
    }
    let (t, v) = parabola_vertex(
        [tau[index - 1], tau[index], tau[index + 1]],
        [values[index - 1], values[index], values[index + 1]],
    )
    .unwrap_or((tau[index], values[index]));
    Ok(Peak {
        tau: t,
        value: v.max(values[index]),
        index,
        at_boundary: false,
    })
}
