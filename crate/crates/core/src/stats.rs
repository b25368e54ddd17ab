//! Sample statistics with normal-approximation confidence intervals.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (denominator `k − 1`); 0 for a single value.
    pub std: f64,
    /// `1.96 · std / √k`.
    pub ci95: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let k = xs.len();
    if k == 0 {
        return Summary {
            mean: f64::NAN,
            std: f64::NAN,
            ci95: f64::NAN,
            count: 0,
        };
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    let std = if k > 1 {
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    Summary {
        mean,
        std,
        ci95: Z95 * std / (k as f64).sqrt(),
        count: k,
    }
}

/// Standard error of a difference of two independent means.
pub fn pooled_se(a: &Summary, b: &Summary) -> f64 {
    let va = a.std * a.std / a.count.max(1) as f64;
    let vb = b.std * b.std / b.count.max(1) as f64;
    (va + vb).sqrt()
}
