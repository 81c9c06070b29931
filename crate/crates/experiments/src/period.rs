use crate::peak::parabola_vertex;

/// Three-sample running median; end points are kept.
pub fn median3(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    for i in 1..values.len().saturating_sub(1) {
        let mut w = [values[i - 1], values[i], values[i + 1]];
        w.sort_by(f64::total_cmp);
        out[i] = w[1];
    }
    out
}

/// Interior local maxima whose prominence is at least `min_prominence`
/// times the range of the series, refined parabolically.
pub fn local_maxima(tau: &[f64], values: &[f64], min_prominence: f64) -> Vec<(f64, f64)> {
    let n = values.len().min(tau.len());
    if n < 3 {
        return Vec::new();
    }
    let lo = values[..n].iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values[..n].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = min_prominence * (hi - lo);
    let mut out = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if !(values[i] > values[i - 1]) {
            i += 1;
            continue;
        }
        // walk across a plateau
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        if j + 1 < n && values[j + 1] < values[i] {
            let peak = values[i];
            let left = values[..i]
                .iter()
                .rev()
                .take_while(|&&v| v <= peak)
                .cloned()
                .fold(peak, f64::min);
            let right = values[j + 1..n]
                .iter()
                .take_while(|&&v| v <= peak)
                .cloned()
                .fold(peak, f64::min);
            if peak - left.max(right) >= threshold {
                let mid = (i + j) / 2;
                let refined = if i == j {
                    parabola_vertex([tau[i - 1], tau[i], tau[i + 1]], [values[i - 1], values[i], values[i + 1]])
                } else {
                    None
                };
                out.push(refined.unwrap_or((tau[mid], values[mid])));
            }
        }
        i = j + 1;
    }
    out
}

/// Mean spacing of successive prominent maxima after 3-sample median
/// smoothing; `None` with fewer than two maxima.
pub fn peak_spacing(tau: &[f64], values: &[f64], min_prominence: f64) -> Option<f64> {
    let smooth = median3(values);
    let maxima = local_maxima(tau, &smooth, min_prominence);
    if maxima.len() < 2 {
        return None;
    }
    let first = maxima.first().unwrap().0;
    let last = maxima.last().unwrap().0;
    Some((last - first) / (maxima.len() - 1) as f64)
}
