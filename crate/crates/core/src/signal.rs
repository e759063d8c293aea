//! Small helpers for sampled series: extrema, peaks, phase unwrapping, fits.

use std::f64::consts::PI;

/// A resolved peak of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Quadratic-interpolated abscissa of the maximum.
    pub position: f64,
    pub height: f64,
    /// Full width at half of `height`, linearly interpolated. The walk on
    /// each side stops at the nearest valley, so a neighbouring peak that
    /// never drops below half height clamps the width there; `NaN` only when
    /// the walk runs into a non-finite sample.
    pub fwhm: f64,
    pub prominence: f64,
}

/// Interior indices `i` with `y[i-1] < y[i] >= y[i+1]`.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect()
}

/// Interior indices `i` with `y[i-1] > y[i] <= y[i+1]`.
pub fn local_minima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1])
        .collect()
}

/// Peaks of `y(x)` whose topographic prominence is at least `min_prominence`.
/// `x` must be strictly increasing; non-finite samples break the search.
pub fn find_peaks(x: &[f64], y: &[f64], min_prominence: f64) -> Vec<Peak> {
    assert_eq!(x.len(), y.len());
    let n = y.len();
    let mut peaks = Vec::new();
    for i in local_maxima(y) {
        if !y[i].is_finite() {
            continue;
        }
        // Walk outward until a strictly higher sample; the lowest point on
        // the way is the base on that side.
        let mut lo = i;
        let mut left_min = y[i];
        while lo > 0 && y[lo - 1].is_finite() && y[lo - 1] <= y[i] {
            lo -= 1;
            left_min = left_min.min(y[lo]);
        }
        let mut hi = i;
        let mut right_min = y[i];
        while hi + 1 < n && y[hi + 1].is_finite() && y[hi + 1] <= y[i] {
            hi += 1;
            right_min = right_min.min(y[hi]);
        }
        let prominence = y[i] - left_min.max(right_min);
        if prominence < min_prominence {
            continue;
        }
        let (position, height) = quadratic_vertex(x, y, i);
        let half = 0.5 * height;
        let left = crossing(x, y, i, false, half);
        let right = crossing(x, y, i, true, half);
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => r - l,
            _ => f64::NAN,
        };
        peaks.push(Peak {
            position,
            height,
            fwhm,
            prominence,
        });
    }
    peaks
}

fn quadratic_vertex(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (ym, y0, yp) = (y[i - 1], y[i], y[i + 1]);
    let curv = ym - 2.0 * y0 + yp;
    if curv >= 0.0 {
        return (x[i], y0);
    }
    let offset = 0.5 * (ym - yp) / curv;
    let step = if offset >= 0.0 { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
    (x[i] + offset * step, y0 - 0.25 * (ym - yp) * offset)
}

/// Crossing of `level` while descending from the peak at `start`; clamps to
/// the valley if the descent ends above `level`.
fn crossing(x: &[f64], y: &[f64], start: usize, rightward: bool, level: f64) -> Option<f64> {
    let mut k = start;
    loop {
        let next = if rightward {
            if k + 1 == y.len() {
                return Some(x[k]);
            }
            k + 1
        } else {
            if k == 0 {
                return Some(x[k]);
            }
            k - 1
        };
        if !y[next].is_finite() {
            return None;
        }
        if y[next] < level {
            let frac = (y[k] - level) / (y[k] - y[next]);
            return Some(x[k] + frac * (x[next] - x[k]));
        }
        if y[next] > y[k] {
            return Some(x[k]);
        }
        k = next;
    }
}

/// Continue phases across `2 pi` branch jumps, anchored at the first finite
/// sample. Non-finite samples are passed through and skipped.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut prev: Option<f64> = None;
    for &p in phase {
        if !p.is_finite() {
            out.push(p);
            continue;
        }
        let value = match prev {
            None => p,
            Some(q) => {
                let k = ((q - p) / (2.0 * PI)).round();
                p + 2.0 * PI * k
            }
        };
        out.push(value);
        prev = Some(value);
    }
    out
}

/// Ordinary least-squares line `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Decay rate `k` of `y ~ A e^{-k x}` from a log-linear fit.
pub fn exponential_rate(x: &[f64], y: &[f64]) -> f64 {
    let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    -linear_fit(x, &logs).0
}

/// Mean spacing between consecutive entries.
pub fn mean_spacing(positions: &[f64]) -> Option<f64> {
    if positions.len() < 2 {
        return None;
    }
    Some((positions[positions.len() - 1] - positions[0]) / (positions.len() - 1) as f64)
}

/// `n` uniformly spaced samples on `[a, b]`, endpoints included exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}
