//! Small sample-statistics helpers with compensated summation.

/// Neumaier-compensated sum; insensitive to the magnitude ordering of terms.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and its standard error (`s / √m`, unbiased sample variance).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let mean = compensated_sum(values.iter().copied()) / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let mean = compensated_sum(values.iter().copied()) / m as f64;
    compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (m - 1) as f64
}
