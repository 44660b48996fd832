//! Metrics over per-cycle records.

use std::collections::HashMap;

use super::CycleRecord;

/// Per-cycle total reward normalized by the white-box trace, averaged over
/// trials. Cycles whose white-box value is zero contribute no samples and
/// come back as NaN; sample exclusion guards the division.
pub fn relative_performance(trials: &[Vec<CycleRecord>], whitebox: &[f64]) -> Vec<f64> {
    let cycles = whitebox.len();
    let mut out = Vec::with_capacity(cycles);
    for t in 0..cycles {
        let wb = whitebox[t];
        if wb == 0.0 {
            out.push(f64::NAN);
            continue;
        }
        let mut sum = 0.0;
        let mut n = 0usize;
        for trial in trials {
            if let Some(rec) = trial.get(t) {
                sum += rec.total / wb;
                n += 1;
            }
        }
        out.push(if n == 0 { f64::NAN } else { sum / n as f64 });
    }
    out
}

/// Cumulative share of cycles covered by the `k` most frequent actions.
///
/// Entry `r` (0-based) is the fraction of all cycles spent in the `r + 1`
/// most sampled distinct actions; the curve goes flat once every distinct
/// action is counted.
pub fn top_k_concentration(records: &[CycleRecord], k: usize) -> Vec<f64> {
    if records.is_empty() {
        return vec![0.0; k];
    }
    let mut counts: HashMap<&[u16], u64> = HashMap::new();
    for rec in records {
        *counts.entry(rec.action.as_slice()).or_default() += 1;
    }
    let mut freq: Vec<(&[u16], u64)> = counts.into_iter().collect();
    freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let total = records.len() as f64;
    let mut curve = Vec::with_capacity(k);
    let mut acc = 0u64;
    for r in 0..k {
        if let Some(&(_, c)) = freq.get(r) {
            acc += c;
        }
        curve.push(acc as f64 / total);
    }
    curve
}

/// Trailing moving average with a ramp-in: entry `t` averages the last
/// `min(t + 1, window)` values.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (t, &v) in values.iter().enumerate() {
        sum += v;
        if t >= window {
            sum -= values[t - window];
        }
        let len = (t + 1).min(window) as f64;
        out.push(sum / len);
    }
    out
}

/// Sample mean and standard deviation (n-1 denominator when possible).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    (mean, var.sqrt())
}
