//! Estimators with standard errors, the KS distance, and Poisson draws.
//!
//! All accumulation runs sequentially over per-trial records in trial order,
//! so floating-point results are identical whatever produced the records.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// Whether a target is an exact identity or a large-n limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Exact,
    Asymptotic,
}

/// Relative allowance granted to large-n limits at size `n`.
pub fn finite_size_allowance(n: usize) -> f64 {
    (5.0 / (n as f64).sqrt()).max(0.10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub name: String,
    pub sample_count: u64,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
    pub theory_value: Option<f64>,
    pub z_score: Option<f64>,
    pub kind: TargetKind,
    /// Relative slack on top of 3 standard errors.
    pub allowance: f64,
    pub within_tolerance: Option<bool>,
}

impl MomentReport {
    pub fn new(name: &str, est: Estimate, theory: Option<f64>, kind: TargetKind, allowance: f64) -> Self {
        let allowance = if kind == TargetKind::Exact { 0.0 } else { allowance };
        let z_score = theory
            .filter(|_| est.standard_error > 0.0)
            .map(|t| (est.mean - t) / est.standard_error);
        let within_tolerance = theory.map(|t| {
            (est.mean - t).abs() <= 3.0 * est.standard_error + allowance * t.abs() + 1e-12
        });
        MomentReport {
            name: name.to_string(),
            sample_count: est.count,
            mean: est.mean,
            variance: est.variance,
            standard_error: est.standard_error,
            theory_value: theory,
            z_score,
            kind,
            allowance,
            within_tolerance,
        }
    }

    /// `|mean - theory| <= sigmas * SE + rel * |theory|`.
    pub fn within(&self, sigmas: f64, rel: f64) -> bool {
        match self.theory_value {
            Some(t) => (self.mean - t).abs() <= sigmas * self.standard_error + rel * t.abs(),
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
}

/// Sample mean, unbiased variance, and standard error of the mean.
pub fn mean_estimate(xs: impl IntoIterator<Item = f64> + Clone) -> Estimate {
    let (mut n, mut sum) = (0u64, 0.0);
    for x in xs.clone() {
        n += 1;
        sum += x;
    }
    if n == 0 {
        return Estimate {
            count: 0,
            mean: f64::NAN,
            variance: f64::NAN,
            standard_error: f64::NAN,
        };
    }
    let mean = sum / n as f64;
    let ss: f64 = xs.into_iter().map(|x| (x - mean).powi(2)).sum();
    let variance = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
    Estimate {
        count: n,
        mean,
        variance,
        standard_error: (variance / n as f64).sqrt(),
    }
}

/// Ratio estimator `sum w x / sum w` with a delta-method standard error.
/// `variance` is the weighted variance of `x`.
pub fn weighted_estimate(pairs: impl IntoIterator<Item = (f64, f64)> + Clone) -> Estimate {
    let (mut n, mut sw, mut swx) = (0u64, 0.0, 0.0);
    for (w, x) in pairs.clone() {
        n += 1;
        sw += w;
        swx += w * x;
    }
    if sw <= 0.0 {
        return Estimate {
            count: n,
            mean: f64::NAN,
            variance: f64::NAN,
            standard_error: f64::NAN,
        };
    }
    let mean = swx / sw;
    let (mut swd, mut sw2d) = (0.0, 0.0);
    for (w, x) in pairs {
        let d2 = (x - mean).powi(2);
        swd += w * d2;
        sw2d += w * w * d2;
    }
    Estimate {
        count: n,
        mean,
        variance: swd / sw,
        standard_error: sw2d.sqrt() / sw,
    }
}

/// `mean(x^2) / mean(x)^2` with a delta-method standard error.
pub fn second_moment_ratio(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let a = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let b = xs.iter().sum::<f64>() / n;
    let ratio = a / (b * b);
    // gradient of a / b^2 with respect to (a, b)
    let (ga, gb) = (1.0 / (b * b), -2.0 * a / (b * b * b));
    let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
    for &x in xs {
        let (da, db) = (x * x - a, x - b);
        vaa += da * da;
        vbb += db * db;
        vab += da * db;
    }
    let denom = (n - 1.0).max(1.0);
    let var = (ga * ga * vaa + gb * gb * vbb + 2.0 * ga * gb * vab) / denom;
    Estimate {
        count: xs.len() as u64,
        mean: ratio,
        variance: var,
        standard_error: (var / n).sqrt(),
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best.min(1.0)
}

/// Poisson draw: inversion for small means, `rand_distr` beyond.
pub fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda > 30.0 {
        return Poisson::new(lambda).expect("positive mean").sample(rng) as u64;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p < 1e-300 && cdf >= 1.0 - 1e-15 {
            break;
        }
    }
    k
}
