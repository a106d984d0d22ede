use crate::error::{Error, Result};

/// Trapezoid integrals over every window of `w` sample intervals.
///
/// Requires a uniformly sampled series; returns `(start time, integral)`.
pub(crate) fn sliding_integrals(times: &[f64], values: &[f64], w: usize) -> Vec<(f64, f64)> {
    if values.len() <= w {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(values.len() - w);
    for start in 0..values.len() - w {
        let mut acc = 0.0;
        for i in start..start + w {
            acc += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
        }
        out.push((times[start], acc));
    }
    out
}

/// Number of sample intervals covering a window of length `window`.
pub(crate) fn intervals_per_window(times: &[f64], window: f64, min_samples: usize) -> Result<usize> {
    if times.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: min_samples,
            got: times.len(),
        });
    }
    let dt = times[1] - times[0];
    let w = (window / dt).round() as usize;
    if w + 1 < min_samples {
        return Err(Error::InsufficientSamples {
            needed: min_samples,
            got: w + 1,
        });
    }
    Ok(w)
}
