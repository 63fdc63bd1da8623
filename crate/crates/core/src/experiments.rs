//! Monte Carlo and exact-enumeration checks of the random-graph moment
//! results: arborescence moments in the configuration model, loop and
//! double-arc statistics, short cycles, Euler-tour moments of random simple
//! graphs, and the limiting law W.
//!
//! Trial `i` always draws from `trial_rng(seed, i)` and per-trial records are
//! reduced in index order, so every report is bit-identical for any rayon
//! pool size.

use std::f64::consts::E;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arborescence::count_arbs_total;
use crate::config_model::{enumerate_configurations, project, sample_configuration, sample_simple_eulerian};
use crate::count::{factorial, Count, Ratio};
use crate::error::{Error, Result};
use crate::euler::best_count;
use crate::graph::{count_double_arcs, count_loops, count_short_cycles, DegreeSequence};
use crate::rng::{sub_seed, trial_rng};
use crate::stats::{
    finite_size_allowance, ks_distance, mean_estimate, poisson, second_moment_ratio, weighted_estimate,
    Estimate, MomentReport, TargetKind,
};

/// Largest configuration size accepted by [`exact_configuration_moments`].
pub const MAX_EXACT_POINTS: usize = 8;
/// Cycle lengths tracked by [`mc_configuration_moments`].
pub const CYCLE_LENGTHS: std::ops::RangeInclusive<usize> = 2..=6;
pub const DEFAULT_K_MAX: usize = 12;

pub const ARBS_LIMIT_NOTE: &str = "The displayed first-moment limit e^(-n/m) prod d_v for arborescences of \
random simple graphs disagrees with the Euler-tour limit (e/m) prod d_v! and with the ratio of the \
simple-graph probabilities. Reports target e (n/m) prod d_v, which is consistent with the tour limit, \
and show the displayed form separately as arbs_vs_displayed_limit.";

pub const SIGMA_NOTE: &str = "The closing simplification of sigma(T_n) in terms of the average degree \
appears to drop a factor. chebyshev_ratio_theory is sqrt(e^(-n/m) m/(m-n) - 1), taken directly from \
the second-moment ratio.";

/// Limits and exact values for a degree sequence. `ln_*` fields are natural
/// logarithms of quantities that overflow `f64` for large `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryMoments {
    pub n: usize,
    pub m: usize,
    pub m2: usize,
    /// Exact configuration-model mean of the total arborescence count.
    pub arbs_mean: Ratio,
    pub arbs_second_moment: Ratio,
    /// `m / (m - n + 1)`.
    pub arbs_second_ratio: Ratio,
    pub ln_prod_degrees: f64,
    pub ln_prod_degree_factorials: f64,
    /// ln of (e/m) prod d_v!.
    pub ln_tours_mean: f64,
    /// ln of e (n/m) prod d_v.
    pub ln_simple_arbs_mean: f64,
    /// ln of e^(-n/m) prod d_v.
    pub ln_simple_arbs_displayed: f64,
    /// `e^(-n/m) m / (m - n)`; absent when `m <= n`.
    pub second_moment_ratio: Option<f64>,
    pub chebyshev_ratio: Option<f64>,
    pub loops_mean: f64,
    pub double_arcs_mean: f64,
    pub loops_mean_weighted: f64,
    pub loops_mean_weighted_pair: f64,
    pub p_simple: f64,
    pub p_simple_weighted: f64,
    pub p_simple_weighted_pair: f64,
    /// `(i, d^i / i)` for regular sequences.
    pub cycle_means: Vec<(usize, f64)>,
    /// `(i, (d^i - 1) / i)` for regular sequences.
    pub weighted_cycle_means: Vec<(usize, f64)>,
}

pub fn theory_moments(d: &DegreeSequence) -> TheoryMoments {
    let (n, m, m2) = (d.n(), d.m(), d.m2());
    let (nf, mf, m2f) = (n as f64, m as f64, m2 as f64);
    let prod: BigUint = d.degrees().iter().fold(BigUint::one(), |acc, &k| acc * k);
    let arbs_mean = Ratio::new(BigInt::from(prod) * n, m);
    let arbs_second_ratio = Ratio::new(m, m - n + 1);
    let arbs_second_moment = Ratio(&arbs_second_ratio.0 * &arbs_mean.0 * &arbs_mean.0);
    let ln_prod_degrees: f64 = d.degrees().iter().map(|&k| (k as f64).ln()).sum();
    let ln_prod_degree_factorials: f64 = d.degrees().iter().map(|&k| ln_factorial(k)).sum();
    let second_moment_ratio = (m > n).then(|| (-nf / mf).exp() * mf / (mf - nf));
    let doubles = (m2f - mf).powi(2) / (2.0 * mf * mf);
    let loops_weighted = (m2f - mf) / mf;
    let loops_weighted_pair = (m2f - 2.0 * mf + nf) / mf;
    let (cycle_means, weighted_cycle_means) = match d.regular_degree() {
        Some(k) => CYCLE_LENGTHS
            .map(|i| {
                let di = (k as f64).powi(i as i32);
                ((i, di / i as f64), (i, (di - 1.0) / i as f64))
            })
            .unzip(),
        None => (Vec::new(), Vec::new()),
    };
    TheoryMoments {
        n,
        m,
        m2,
        arbs_mean,
        arbs_second_moment,
        arbs_second_ratio,
        ln_prod_degrees,
        ln_prod_degree_factorials,
        ln_tours_mean: 1.0 - mf.ln() + ln_prod_degree_factorials,
        ln_simple_arbs_mean: 1.0 + (nf / mf).ln() + ln_prod_degrees,
        ln_simple_arbs_displayed: -nf / mf + ln_prod_degrees,
        second_moment_ratio,
        chebyshev_ratio: second_moment_ratio.map(|r| (r - 1.0).max(0.0).sqrt()),
        loops_mean: m2f / mf,
        double_arcs_mean: doubles,
        loops_mean_weighted: loops_weighted,
        loops_mean_weighted_pair: loops_weighted_pair,
        p_simple: (-m2f / mf - doubles).exp(),
        p_simple_weighted: (-loops_weighted - doubles).exp(),
        p_simple_weighted_pair: (-loops_weighted_pair - doubles).exp(),
        cycle_means,
        weighted_cycle_means,
    }
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Exact arborescence moments over all `m!` configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub degrees: Vec<usize>,
    pub configurations: Count,
    pub mean: Ratio,
    pub second_moment: Ratio,
    pub theory_mean: Ratio,
    pub theory_second_moment: Ratio,
}

impl ExactMoments {
    pub fn matches(&self) -> bool {
        self.mean == self.theory_mean && self.second_moment == self.theory_second_moment
    }
}

pub fn exact_configuration_moments(d: &DegreeSequence) -> Result<ExactMoments> {
    if d.m() > MAX_EXACT_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points exceeds the exact-enumeration limit of {MAX_EXACT_POINTS}",
            d.m()
        )));
    }
    let (mut sum, mut sum_sq) = (BigUint::zero(), BigUint::zero());
    for c in enumerate_configurations(d)? {
        let a = count_arbs_total(&project(&c)).0;
        sum_sq += &a * &a;
        sum += a;
    }
    let total = Count(factorial(d.m() as u64));
    let theory = theory_moments(d);
    Ok(ExactMoments {
        degrees: d.degrees().to_vec(),
        mean: Ratio::from_counts(&Count(sum), &total),
        second_moment: Ratio::from_counts(&Count(sum_sq), &total),
        configurations: total,
        theory_mean: theory.arbs_mean,
        theory_second_moment: theory.arbs_second_moment,
    })
}

struct ConfigTrial {
    loops: f64,
    doubles: f64,
    cycles: Vec<f64>,
    simple: bool,
    /// Total arborescence count divided by its exact mean.
    weight: f64,
}

/// Plain, arborescence-weighted and squared-weighted configuration statistics.
///
/// Weights are exact per-configuration arborescence counts divided by their
/// exact mean, which keeps them near 1 for any `n`.
pub fn mc_configuration_moments(d: &DegreeSequence, trials: u64, seed: u64) -> Result<Vec<MomentReport>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let theory = theory_moments(d);
    let ln_mean = theory.arbs_mean.to_f64().ln();
    let records: Vec<ConfigTrial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = project(&sample_configuration(d, &mut trial_rng(seed, i)));
            let arbs = count_arbs_total(&g);
            let weight = if arbs.is_zero() { 0.0 } else { (arbs.ln() - ln_mean).exp() };
            let loops = count_loops(&g);
            let doubles = count_double_arcs(&g);
            ConfigTrial {
                loops: loops as f64,
                doubles: doubles as f64,
                cycles: CYCLE_LENGTHS.map(|len| count_short_cycles(&g, len) as f64).collect(),
                simple: loops == 0 && doubles == 0,
                weight,
            }
        })
        .collect();

    let allowance = finite_size_allowance(d.n());
    let asym = TargetKind::Asymptotic;
    let plain = |f: &dyn Fn(&ConfigTrial) -> f64| mean_estimate(records.iter().map(f));
    let weighted = |f: &dyn Fn(&ConfigTrial) -> f64| weighted_estimate(records.iter().map(|r| (r.weight, f(r))));
    let weighted_pair =
        |f: &dyn Fn(&ConfigTrial) -> f64| weighted_estimate(records.iter().map(|r| (r.weight * r.weight, f(r))));
    let simple = |r: &ConfigTrial| r.simple as u8 as f64;

    let mut out = vec![
        MomentReport::new("L", plain(&|r| r.loops), Some(theory.loops_mean), TargetKind::Exact, 0.0),
        MomentReport::new("D", plain(&|r| r.doubles), Some(theory.double_arcs_mean), asym, allowance),
    ];
    for (k, len) in CYCLE_LENGTHS.enumerate() {
        let target = theory.cycle_means.get(k).map(|&(_, v)| v);
        out.push(MomentReport::new(&format!("X_{len}"), plain(&|r| r.cycles[k]), target, asym, allowance));
    }
    out.push(MomentReport::new("P_simple", plain(&simple), Some(theory.p_simple), asym, allowance));
    out.push(MomentReport::new("arbs_normalized", plain(&|r| r.weight), Some(1.0), TargetKind::Exact, 0.0));
    out.push(MomentReport::new(
        "arbs_sq_normalized",
        plain(&|r| r.weight * r.weight),
        Some(theory.arbs_second_ratio.to_f64()),
        TargetKind::Exact,
        0.0,
    ));
    out.push(MomentReport::new("L1", weighted(&|r| r.loops), Some(theory.loops_mean_weighted), asym, allowance));
    out.push(MomentReport::new("D1", weighted(&|r| r.doubles), Some(theory.double_arcs_mean), asym, allowance));
    out.push(MomentReport::new("P_simple_1", weighted(&simple), Some(theory.p_simple_weighted), asym, allowance));
    out.push(MomentReport::new(
        "L2",
        weighted_pair(&|r| r.loops),
        Some(theory.loops_mean_weighted_pair),
        asym,
        allowance,
    ));
    out.push(MomentReport::new("D2", weighted_pair(&|r| r.doubles), Some(theory.double_arcs_mean), asym, allowance));
    out.push(MomentReport::new(
        "P_simple_2",
        weighted_pair(&simple),
        Some(theory.p_simple_weighted_pair),
        asym,
        allowance,
    ));
    for (k, len) in CYCLE_LENGTHS.enumerate() {
        let target = theory.weighted_cycle_means.get(k).map(|&(_, v)| v);
        out.push(MomentReport::new(&format!("AX_{len}"), weighted(&|r| r.cycles[k]), target, asym, allowance));
    }
    Ok(out)
}

/// Per-graph results of simple-graph sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleGraphMoments {
    pub reports: Vec<MomentReport>,
    /// ln of the exact Euler-tour count of each graph.
    pub ln_tours: Vec<f64>,
    /// Tour count over (e/m) prod d_v!.
    pub normalized_tours: Vec<f64>,
    pub attempts: Vec<u64>,
    pub notes: Vec<String>,
}

/// Euler-tour moments of uniform simple connected graphs with degrees `d`.
pub fn mc_simple_graph_moments(
    d: &DegreeSequence,
    graphs: u64,
    seed: u64,
    max_attempts: u64,
) -> Result<SimpleGraphMoments> {
    if graphs == 0 {
        return Err(Error::InvalidInput("graphs must be at least 1".into()));
    }
    if d.m() <= d.n() {
        return Err(Error::InvalidInput("simple-graph moments need m > n".into()));
    }
    let theory = theory_moments(d);
    let results: Vec<Result<(f64, u64)>> = (0..graphs)
        .into_par_iter()
        .map(|i| {
            let s = sample_simple_eulerian(d, &mut trial_rng(seed, i), max_attempts)?;
            Ok((best_count(&s.graph)?.ln(), s.attempts))
        })
        .collect();
    let mut ln_tours = Vec::with_capacity(results.len());
    let mut attempts = Vec::with_capacity(results.len());
    for r in results {
        let (t, a) = r?;
        ln_tours.push(t);
        attempts.push(a);
    }
    let normalized_tours: Vec<f64> = ln_tours.iter().map(|t| (t - theory.ln_tours_mean).exp()).collect();
    // A(G) = n |ARBS(G, 0)| and T(G) = prod (d_v - 1)! |ARBS(G, 0)|
    let ln_arbs_offset = (d.n() as f64).ln() - (theory.ln_prod_degree_factorials - theory.ln_prod_degrees);
    let displayed: Vec<f64> = ln_tours
        .iter()
        .map(|t| (t + ln_arbs_offset - theory.ln_simple_arbs_displayed).exp())
        .collect();
    let over_ts: Vec<f64> = ln_tours
        .iter()
        .map(|t| (t - theory.ln_prod_degree_factorials).exp())
        .collect();

    let allowance = finite_size_allowance(d.n());
    let asym = TargetKind::Asymptotic;
    let m = d.m() as f64;
    let reports = vec![
        MomentReport::new("tours_normalized", mean_estimate(normalized_tours.iter().copied()), Some(1.0), asym, allowance),
        MomentReport::new(
            "tours_second_moment_ratio",
            second_moment_ratio(&normalized_tours),
            theory.second_moment_ratio,
            asym,
            allowance,
        ),
        MomentReport::new("tours_over_transition_systems", mean_estimate(over_ts.iter().copied()), Some(E / m), asym, allowance),
        MomentReport::new("arbs_vs_displayed_limit", mean_estimate(displayed.iter().copied()), Some(1.0), asym, allowance),
        MomentReport::new(
            "attempts_per_graph",
            mean_estimate(attempts.iter().map(|&a| a as f64)),
            Some(1.0 / theory.p_simple),
            asym,
            allowance,
        ),
    ];
    Ok(SimpleGraphMoments {
        reports,
        ln_tours,
        normalized_tours,
        attempts,
        notes: vec![ARBS_LIMIT_NOTE.to_string()],
    })
}

/// Upper bound on `sum_{i > k_max} 1 / (i d^i)`, the truncation error in
/// `ln E[W^2]`.
pub fn w_truncation_bound(d: usize, k_max: usize) -> f64 {
    let d = d as f64;
    let k = (k_max + 1) as f64;
    d.powf(-k) / (k * (1.0 - 1.0 / d))
}

/// `exp(-1/d + ln(d / (d - 1)))`.
pub fn w_second_moment_limit(d: usize) -> f64 {
    let d = d as f64;
    (-1.0 / d + (d / (d - 1.0)).ln()).exp()
}

/// Draws of `prod_{i=2}^{k_max} (1 - d^-i)^{Z_i} e^{1/i}` with independent
/// `Z_i ~ Poisson(d^i / i)`, evaluated in log space.
pub fn simulate_w(d: usize, k_max: usize, samples: u64, seed: u64) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::InvalidInput("W needs d >= 2".into()));
    }
    if k_max < 2 {
        return Err(Error::InvalidInput("k_max must be at least 2".into()));
    }
    let terms: Vec<(f64, f64, f64)> = (2..=k_max)
        .map(|i| {
            let di = (d as f64).powi(i as i32);
            (di / i as f64, (-1.0 / di).ln_1p(), 1.0 / i as f64)
        })
        .collect();
    Ok((0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = trial_rng(seed, s);
            terms
                .iter()
                .map(|&(lambda, ln_factor, shift)| poisson(lambda, &mut rng) as f64 * ln_factor + shift)
                .sum::<f64>()
                .exp()
        })
        .collect())
}

/// Mean (exactly 1 even after truncation) and second moment of W draws.
pub fn w_moment_reports(samples: &[f64], d: usize) -> Vec<MomentReport> {
    vec![
        MomentReport::new("W_mean", mean_estimate(samples.iter().copied()), Some(1.0), TargetKind::Exact, 0.0),
        MomentReport::new(
            "W_second_moment",
            mean_estimate(samples.iter().map(|w| w * w)),
            Some(w_second_moment_limit(d)),
            TargetKind::Exact,
            0.0,
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistConfig {
    pub d: usize,
    pub n: usize,
    pub graphs: u64,
    pub w_samples: u64,
    pub k_max: usize,
    pub max_attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistReport {
    pub config: DistConfig,
    pub normalized_samples: Vec<f64>,
    pub w_samples: Vec<f64>,
    pub ks_distance: f64,
    pub truncation_bound: f64,
    /// `1 / (n m)`.
    pub large_count_threshold: f64,
    /// Fraction of graphs with `T / (d!)^n >= 1 / (n m)`.
    pub large_count_fraction: f64,
    pub chebyshev_ratio: f64,
    pub chebyshev_ratio_theory: Option<f64>,
    pub moments: Vec<MomentReport>,
    pub notes: Vec<String>,
}

/// Normalized tour counts of random d-in/d-out graphs against simulated W.
pub fn distribution_experiment(cfg: &DistConfig, seed: u64) -> Result<DistReport> {
    if cfg.d < 2 || cfg.n < 10 {
        return Err(Error::InvalidInput("distribution experiment needs d >= 2 and n >= 10".into()));
    }
    let degrees = DegreeSequence::regular(cfg.d, cfg.n)?;
    let simple = mc_simple_graph_moments(&degrees, cfg.graphs, sub_seed(seed, 1), cfg.max_attempts)?;
    let w = simulate_w(cfg.d, cfg.k_max, cfg.w_samples, sub_seed(seed, 2))?;
    let theory = theory_moments(&degrees);

    let m = degrees.m() as f64;
    let threshold = 1.0 / (cfg.n as f64 * m);
    let ln_ts = theory.ln_prod_degree_factorials;
    let hits = simple.ln_tours.iter().filter(|&&t| t - ln_ts >= threshold.ln()).count();
    let est: Estimate = mean_estimate(simple.normalized_tours.iter().copied());

    let mut moments = simple.reports;
    moments.extend(w_moment_reports(&w, cfg.d));
    Ok(DistReport {
        config: *cfg,
        ks_distance: ks_distance(&simple.normalized_tours, &w),
        truncation_bound: w_truncation_bound(cfg.d, cfg.k_max),
        large_count_threshold: threshold,
        large_count_fraction: hits as f64 / simple.ln_tours.len() as f64,
        chebyshev_ratio: est.variance.sqrt() / est.mean,
        chebyshev_ratio_theory: theory.chebyshev_ratio,
        moments,
        notes: vec![ARBS_LIMIT_NOTE.to_string(), SIGMA_NOTE.to_string()],
        normalized_samples: simple.normalized_tours,
        w_samples: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(v: &[usize]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn theory_examples() {
        let t = theory_moments(&DegreeSequence::regular(2, 4).unwrap());
        assert_eq!(t.arbs_mean, Ratio::new(8, 1));
        let t = theory_moments(&ds(&[1, 1]));
        assert_eq!(t.arbs_mean, Ratio::new(1, 1));
        assert_eq!(t.arbs_second_moment, Ratio::new(2, 1));
        assert_eq!(t.second_moment_ratio, None);
        let t = theory_moments(&DegreeSequence::regular(2, 50).unwrap());
        assert!((t.second_moment_ratio.unwrap() - 2.0 * (-0.5f64).exp()).abs() < 1e-12);
        assert!((t.chebyshev_ratio.unwrap() - 0.4616).abs() < 1e-4);
        assert_eq!(t.loops_mean, 2.0);
        assert_eq!(t.double_arcs_mean, 0.5);
        assert_eq!(t.cycle_means[0], (2, 2.0));
        assert!((t.cycle_means[1].1 - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.weighted_cycle_means[0], (2, 1.5));
        assert!((t.p_simple - (-2.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn exact_moments_examples() {
        let e = exact_configuration_moments(&ds(&[1, 1])).unwrap();
        assert_eq!(e.mean, Ratio::new(1, 1));
        assert_eq!(e.second_moment, Ratio::new(2, 1));
        assert!(e.matches());
        assert_eq!(exact_configuration_moments(&ds(&[2])).unwrap().mean, Ratio::new(1, 1));
        assert_eq!(exact_configuration_moments(&ds(&[1, 1, 1])).unwrap().mean, Ratio::new(1, 1));
        assert!(exact_configuration_moments(&ds(&[2, 3, 1])).unwrap().matches());
        assert!(matches!(exact_configuration_moments(&ds(&[3, 3, 3])), Err(Error::TooLarge(_))));
    }

    #[test]
    fn w_limits() {
        assert!((w_second_moment_limit(2).ln() - 0.193147).abs() < 1e-6);
        assert!(w_truncation_bound(2, 12) < 3e-5);
        assert!(simulate_w(1, 12, 10, 0).is_err());
        assert!(simulate_w(2, 1, 10, 0).is_err());
        let w = simulate_w(2, 12, 20_000, 5).unwrap();
        let r = w_moment_reports(&w, 2);
        assert!(r[0].within(4.0, 0.0), "{:?}", r[0]);
        assert!(r[1].within(4.0, 0.0), "{:?}", r[1]);
    }

    #[test]
    fn simulate_w_is_seed_deterministic() {
        assert_eq!(simulate_w(3, 8, 100, 9).unwrap(), simulate_w(3, 8, 100, 9).unwrap());
    }

    #[test]
    fn small_mc_run_is_sane() {
        let d = DegreeSequence::regular(2, 12).unwrap();
        let r = mc_configuration_moments(&d, 4000, 3).unwrap();
        let get = |name: &str| r.iter().find(|x| x.name == name).unwrap();
        assert!(get("L").within(4.0, 0.0));
        assert!(get("arbs_normalized").within(4.0, 0.0));
        assert_eq!(get("X_2").sample_count, 4000);
        assert!(mc_configuration_moments(&d, 0, 3).is_err());
    }

    #[test]
    fn simple_graph_moments_small() {
        let d = DegreeSequence::regular(2, 10).unwrap();
        let s = mc_simple_graph_moments(&d, 50, 1, 100_000).unwrap();
        assert_eq!(s.ln_tours.len(), 50);
        assert!(s.normalized_tours.iter().all(|&t| t > 0.0));
        assert!(mc_simple_graph_moments(&DegreeSequence::regular(1, 5).unwrap(), 5, 1, 10).is_err());
    }
}
