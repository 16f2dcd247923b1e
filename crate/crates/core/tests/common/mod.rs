#![allow(dead_code)]

pub mod fock;

use qwcavity::observables::TimeSeries;

/// Largest |x - y| over two equally sampled channels.
pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn value_at(series: &TimeSeries, channel: &[f64], t: f64) -> f64 {
    let k = series
        .t
        .iter()
        .position(|s| (s - t).abs() < 1e-9)
        .unwrap_or_else(|| panic!("no sample at t = {t}"));
    channel[k]
}
