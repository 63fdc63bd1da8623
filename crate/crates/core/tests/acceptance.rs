//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p eulertour --test acceptance -- --nocapture` to see them.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use eulertour::arborescence::{count_arbs_rooted, enumerate_arbs};
use eulertour::euler::best_count_with_root;
use eulertour::experiments::{
    distribution_experiment, mc_configuration_moments, mc_simple_graph_moments, simulate_w, DistConfig, DistReport,
    SimpleGraphMoments,
};
use eulertour::naive::{acceptance_probability_exact, approximate_seeded, sample_naive};
use eulertour::report::{run_experiment, PRESETS};
use eulertour::rng::trial_rng;
use eulertour::stats::MomentReport;
use eulertour::verify::{compositions, hand_corpus, random_eulerian_corpus, random_forest_instances};
use eulertour::{
    best_count, count_arbs_total, enumerate_tours, forest_config_count_formula, is_eulerian, DegreeSequence,
    Multigraph,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SEED: u64 = 20_240_601;

fn verdict(id: u32, title: &str, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    let limit = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
    println!("[acceptance] {status} {id:>2} {title}: {detail} [{:.1}s{limit}]", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time limit");
}

fn corpus() -> Vec<Multigraph> {
    let mut graphs: Vec<Multigraph> = hand_corpus().into_iter().map(|(_, g)| g).collect();
    graphs.extend(random_eulerian_corpus(200, SEED));
    graphs
}

/// Euler circuits that start with arc 0: one per rotation class.
fn brute_tours(g: &Multigraph) -> u64 {
    fn go(g: &Multigraph, at: usize, used: &mut [bool], left: usize, home: usize) -> u64 {
        if left == 0 {
            return (at == home) as u64;
        }
        let mut total = 0;
        for &a in g.out_arcs(at) {
            if !used[a] {
                used[a] = true;
                total += go(g, g.arc(a).target, used, left - 1, home);
                used[a] = false;
            }
        }
        total
    }
    let mut used = vec![false; g.m()];
    used[0] = true;
    let first = g.arc(0);
    go(g, first.target, &mut used, g.m() - 1, first.source)
}

/// Parent-arc choices at every non-root vertex that lead every vertex to the root.
fn brute_arbs(g: &Multigraph, root: usize) -> u64 {
    let others: Vec<usize> = (0..g.n()).filter(|&v| v != root).collect();
    let mut parent = vec![usize::MAX; g.n()];
    fn go(g: &Multigraph, root: usize, others: &[usize], k: usize, parent: &mut [usize]) -> u64 {
        if k == others.len() {
            let reaches = (0..g.n()).all(|mut v| {
                for _ in 0..g.n() {
                    if v == root {
                        return true;
                    }
                    v = parent[v];
                }
                v == root
            });
            return reaches as u64;
        }
        let v = others[k];
        let mut total = 0;
        for &a in g.out_arcs(v) {
            parent[v] = g.arc(a).target;
            total += go(g, root, others, k + 1, parent);
        }
        total
    }
    go(g, root, &others, 0, &mut parent)
}

#[test]
fn criterion_01_tour_count_identity() {
    let start = Instant::now();
    let graphs = corpus();
    let mut mismatches = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let formula = best_count(g).unwrap();
        let brute = brute_tours(g);
        let listed = enumerate_tours(g).unwrap().len() as u64;
        if formula.to_string() != brute.to_string() || listed != brute {
            mismatches.push(format!("graph {i}: formula {formula}, brute {brute}, enumerated {listed}"));
        }
    }
    let detail = format!("{} graphs, {} mismatches {:?}", graphs.len(), mismatches.len(), mismatches.first());
    verdict(1, "tour count equals brute force", mismatches.is_empty() && graphs.len() >= 200, &detail, start.elapsed(), Some(Duration::from_secs(60)));
}

#[test]
fn criterion_02_matrix_tree() {
    let start = Instant::now();
    let graphs = corpus();
    let mut bad = Vec::new();
    let mut checks = 0;
    for (i, g) in graphs.iter().enumerate() {
        let counts: Vec<String> = (0..g.n()).map(|r| count_arbs_rooted(g, r).unwrap().to_string()).collect();
        for (r, c) in counts.iter().enumerate() {
            checks += 1;
            let listed = enumerate_arbs(g, r).unwrap().len().to_string();
            if *c != brute_arbs(g, r).to_string() || *c != listed {
                bad.push(format!("graph {i} root {r}"));
            }
        }
        if is_eulerian(g) {
            let active: Vec<usize> = (0..g.n()).filter(|&v| g.out_degree(v) > 0).collect();
            if active.iter().any(|&r| counts[r] != counts[active[0]]) {
                bad.push(format!("graph {i}: counts differ across roots"));
            }
            let tours = best_count(g).unwrap();
            if active.iter().any(|&r| best_count_with_root(g, Some(r)).unwrap() != tours) {
                bad.push(format!("graph {i}: tour count depends on root"));
            }
        }
    }
    let detail = format!("{checks} (graph, root) pairs, {} mismatches {:?}", bad.len(), bad.first());
    verdict(2, "matrix-tree count equals brute force", bad.is_empty(), &detail, start.elapsed(), Some(Duration::from_secs(60)));
}

/// Partial matchings giving each non-root one arc into a distinct in-point,
/// such that every vertex reaches a root.
fn brute_forest(x: &[u64], y: &[u64], roots: &[usize]) -> u64 {
    let n = x.len();
    let in_owner: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, x[v] as usize)).collect();
    let children: Vec<usize> = (0..n).filter(|v| !roots.contains(v)).collect();
    struct S<'a> {
        y: &'a [u64],
        roots: &'a [usize],
        in_owner: Vec<usize>,
        children: Vec<usize>,
        taken: Vec<bool>,
        parent: Vec<usize>,
    }
    fn go(s: &mut S, k: usize) -> u64 {
        if k == s.children.len() {
            let n = s.parent.len();
            let ok = (0..n).all(|mut v| {
                for _ in 0..=n {
                    if s.roots.contains(&v) {
                        return true;
                    }
                    v = s.parent[v];
                }
                false
            });
            return ok as u64;
        }
        let v = s.children[k];
        let mut total = 0;
        for _out_point in 0..s.y[v] {
            for p in 0..s.in_owner.len() {
                if !s.taken[p] {
                    s.taken[p] = true;
                    s.parent[v] = s.in_owner[p];
                    total += go(s, k + 1);
                    s.taken[p] = false;
                }
            }
        }
        total
    }
    let mut s = S {
        y,
        roots,
        taken: vec![false; in_owner.len()],
        in_owner,
        children,
        parent: vec![usize::MAX; n],
    };
    go(&mut s, 0)
}

#[test]
fn criterion_03_forest_formula() {
    let start = Instant::now();
    let instances = random_forest_instances(500, SEED);
    let bad: Vec<String> = instances
        .iter()
        .filter(|(x, y, r)| forest_config_count_formula(x, y, r).unwrap().to_string() != brute_forest(x, y, r).to_string())
        .map(|(x, y, r)| format!("x={x:?} y={y:?} roots={r:?}"))
        .collect();
    let nonzero = instances.iter().filter(|(x, y, r)| brute_forest(x, y, r) > 0).count();
    let detail = format!("{} instances ({nonzero} nonzero), {} mismatches {:?}", instances.len(), bad.len(), bad.first());
    verdict(3, "forest formula equals brute force", bad.is_empty(), &detail, start.elapsed(), Some(Duration::from_secs(120)));
}

/// Calls `f` on every permutation of `0..m` (Heap's algorithm).
fn for_each_permutation(m: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..m).collect();
    let mut c = vec![0; m];
    f(&p);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_04_exact_arborescence_moments() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut sequences = 0;
    for m in 1..=7 {
        for d in compositions(m, 3) {
            sequences += 1;
            let n = d.len();
            let owner: Vec<usize> = d.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
            let (mut sum, mut sum_sq, mut count) = (BigUint::zero(), BigUint::zero(), 0u64);
            for_each_permutation(m, |p| {
                let arcs: Vec<(usize, usize)> = (0..m).map(|s| (owner[s], owner[p[s]])).collect();
                let a = count_arbs_total(&Multigraph::new(n, &arcs).unwrap()).0;
                sum_sq += &a * &a;
                sum += a;
                count += 1;
            });
            let total = BigInt::from(count);
            let mean = BigRational::new(BigInt::from(sum), total.clone());
            let second = BigRational::new(BigInt::from(sum_sq), total);
            let prod: BigInt = d.iter().fold(BigInt::one(), |acc, &k| acc * k);
            let want_mean = BigRational::new(prod * n, BigInt::from(m));
            let want_second = BigRational::new(BigInt::from(m), BigInt::from(m - n + 1)) * &want_mean * &want_mean;
            if mean != want_mean || second != want_second {
                bad.push(format!("{d:?}: mean {mean} vs {want_mean}, second {second} vs {want_second}"));
            }
        }
    }
    let detail = format!("{sequences} degree sequences, {} mismatches {:?}", bad.len(), bad.first());
    verdict(4, "exact arborescence moments", bad.is_empty(), &detail, start.elapsed(), Some(Duration::from_secs(300)));
}

fn config_run() -> &'static (Vec<MomentReport>, Duration) {
    static RUN: OnceLock<(Vec<MomentReport>, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let d = DegreeSequence::regular(2, 50).unwrap();
        (mc_configuration_moments(&d, 100_000, SEED).unwrap(), start.elapsed())
    })
}

fn moment<'a>(reports: &'a [MomentReport], name: &str) -> &'a MomentReport {
    reports.iter().find(|r| r.name == name).unwrap()
}

/// `|mean - target| <= 3 SE + rel * target`.
fn near(r: &MomentReport, target: f64, rel: f64) -> bool {
    (r.mean - target).abs() <= 3.0 * r.standard_error + rel * target
}

#[test]
fn criterion_05_loops_and_double_arcs() {
    let (reports, elapsed) = config_run();
    let (l, d) = (moment(reports, "L"), moment(reports, "D"));
    let ok = near(l, 2.0, 0.0) && near(d, 0.5, 0.10);
    let detail = format!(
        "E[L]={:.4}±{:.4} (target 2), E[D]={:.4}±{:.4} (target 0.5, +10%)",
        l.mean, l.standard_error, d.mean, d.standard_error
    );
    verdict(5, "loop and double-arc means, d=2 n=50", ok, &detail, *elapsed, Some(Duration::from_secs(60)));
}

#[test]
fn criterion_06_short_cycles() {
    let (reports, elapsed) = config_run();
    let (x2, x3) = (moment(reports, "X_2"), moment(reports, "X_3"));
    let dispersion = x2.variance / x2.mean;
    let ok = near(x2, 2.0, 0.10) && near(x3, 8.0 / 3.0, 0.10) && (0.85..=1.15).contains(&dispersion);
    let detail = format!(
        "E[X2]={:.4}±{:.4} (2), E[X3]={:.4}±{:.4} (8/3), Var/mean X2={dispersion:.4}",
        x2.mean, x2.standard_error, x3.mean, x3.standard_error
    );
    verdict(6, "short-cycle Poisson means", ok, &detail, *elapsed, None);
}

#[test]
fn criterion_07_weighted_cycles() {
    let (reports, elapsed) = config_run();
    let ax2 = moment(reports, "AX_2");
    let ok = near(ax2, 1.5, 0.10);
    let detail = format!("E[A X2]/E[A]={:.4}±{:.4} (target 3/2, +10%)", ax2.mean, ax2.standard_error);
    verdict(7, "arborescence-weighted 2-cycles", ok, &detail, *elapsed, None);
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn criterion_08_tour_mean() {
    let start = Instant::now();
    let (n, m) = (50usize, 100f64);
    let s: SimpleGraphMoments =
        mc_simple_graph_moments(&DegreeSequence::regular(2, n).unwrap(), 2_000, SEED, 1_000_000).unwrap();
    let ln_target = 1.0 - m.ln() + n as f64 * 2f64.ln();
    let t: Vec<f64> = s.ln_tours.iter().map(|l| (l - ln_target).exp()).collect();
    let mean = mean_of(&t);
    let se = (t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t.len() - 1) as f64 / t.len() as f64).sqrt();
    let ok = (0.85..=1.15).contains(&mean) && t.len() == 2_000;
    let detail = format!("mean T/((e/m) 2^n) = {mean:.4} ± {se:.4} over {} graphs", t.len());
    verdict(8, "Euler-tour mean, d=2 n=50", ok, &detail, start.elapsed(), Some(Duration::from_secs(600)));
}

fn dist_run() -> &'static (DistReport, Duration) {
    static RUN: OnceLock<(DistReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let cfg = DistConfig {
            d: 2,
            n: 100,
            graphs: 2_000,
            w_samples: 100_000,
            k_max: 12,
            max_attempts: 1_000_000,
        };
        (distribution_experiment(&cfg, SEED).unwrap(), start.elapsed())
    })
}

#[test]
fn criterion_09_second_moment_ratio() {
    let (r, elapsed) = dist_run();
    let t = &r.normalized_samples;
    let ratio = mean_of(&t.iter().map(|x| x * x).collect::<Vec<_>>()) / mean_of(t).powi(2);
    let target = 2.0 * (-0.5f64).exp();
    let se = r.moments.iter().find(|m| m.name == "tours_second_moment_ratio").unwrap().standard_error;
    let ok = (ratio / target - 1.0).abs() <= 0.20;
    let detail = format!("E[T^2]/E[T]^2 = {ratio:.4} ± {se:.4} (target {target:.5}, ±20%)");
    verdict(9, "tour second-moment ratio, d=2 n=100", ok, &detail, *elapsed, None);
}

#[test]
fn criterion_10_limit_distribution() {
    let (r, elapsed) = dist_run();
    let ok = r.ks_distance <= 0.1 && r.w_samples.len() == 100_000 && r.normalized_samples.len() == 2_000;
    let detail = format!(
        "KS distance {:.4} between {} graphs and {} W draws, truncation bound {:.2e}",
        r.ks_distance,
        r.normalized_samples.len(),
        r.w_samples.len(),
        r.truncation_bound
    );
    verdict(10, "normalized tour counts against W", ok, &detail, *elapsed, None);
}

#[test]
fn criterion_11_w_moments() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let w = simulate_w(d, 12, 100_000, SEED + d as u64).unwrap();
        let sq: Vec<f64> = w.iter().map(|x| x * x).collect();
        let se = |xs: &[f64]| {
            let m = mean_of(xs);
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64 / xs.len() as f64).sqrt()
        };
        let df = d as f64;
        let target = (-1.0 / df + (df / (df - 1.0)).ln()).exp();
        let (m1, s1, m2, s2) = (mean_of(&w), se(&w), mean_of(&sq), se(&sq));
        ok &= (m1 - 1.0).abs() <= 3.0 * s1 && (m2 - target).abs() <= 3.0 * s2;
        parts.push(format!("d={d}: E[W]={m1:.4}±{s1:.4}, E[W^2]={m2:.4}±{s2:.4} (target {target:.5})"));
    }
    verdict(11, "simulated W moments", ok, &parts.join("; "), start.elapsed(), None);
}

#[test]
fn criterion_12_naive_sampler() {
    use eulertour::graph::fixtures::{bidirected_triangle, double_digon};
    let start = Instant::now();
    let kappa = 100_000u64;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, g, p)) in [("bidirected triangle", bidirected_triangle(), 3.0 / 8.0), ("double digon", double_digon(), 0.5)]
        .into_iter()
        .enumerate()
    {
        assert_eq!(acceptance_probability_exact(&g).unwrap().to_f64(), p);
        let est = approximate_seeded(&g, kappa, SEED + i as u64).unwrap().to_f64();
        let se = (p * (1.0 - p) / kappa as f64).sqrt();
        ok &= (est - p).abs() <= 3.0 * se;

        let tours = enumerate_tours(&g).unwrap();
        let mut freq: HashMap<Vec<usize>, u64> = tours.iter().map(|t| (t.arcs().to_vec(), 0)).collect();
        let mut successes = 0u64;
        for k in 0..kappa {
            if let Some(t) = sample_naive(&g, &mut trial_rng(SEED + 10 + i as u64, k)).unwrap() {
                *freq.get_mut(t.arcs()).expect("sampled tour is a real tour") += 1;
                successes += 1;
            }
        }
        let expected = successes as f64 / tours.len() as f64;
        let chi2: f64 = freq.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let pval = 1.0 - ChiSquared::new((tours.len() - 1) as f64).unwrap().cdf(chi2);
        ok &= pval > 0.001;
        parts.push(format!("{name}: {est:.4} vs {p} (3 SE = {:.4}), uniformity p={pval:.3}", 3.0 * se));
    }
    verdict(12, "naive sampler acceptance and uniformity", ok, &parts.join("; "), start.elapsed(), None);
}

#[test]
fn criterion_13_large_count_fraction() {
    let (r, elapsed) = dist_run();
    // T / 2^n >= 1/(n m)  <=>  T / ((e/m) 2^n) >= 1/(e n)
    let n = 100f64;
    let threshold = 1.0 / (std::f64::consts::E * n);
    let hits = r.normalized_samples.iter().filter(|&&t| t >= threshold).count();
    let fraction = hits as f64 / r.normalized_samples.len() as f64;
    let ok = fraction >= 0.95 && (fraction - r.large_count_fraction).abs() < 1e-12;
    let detail = format!("{hits}/{} graphs have T/2^n >= 1/(n m)", r.normalized_samples.len());
    verdict(13, "large tour counts, d=2 n=100", ok, &detail, *elapsed, None);
}

#[test]
fn criterion_14_determinism() {
    use eulertour::report::{Experiment, Overrides};
    let start = Instant::now();
    let small = Overrides {
        trials: Some(300),
        ..Overrides::default()
    };
    let mut differing = Vec::new();
    for p in PRESETS {
        let exp = match p.experiment {
            Experiment::ExactArborescences { .. } => p.experiment.with_overrides(&Overrides {
                n: Some(5),
                ..Overrides::default()
            }),
            _ => p.experiment.with_overrides(&small),
        };
        let one = run_experiment(p.name, exp, 99, Some(1)).unwrap();
        let four = run_experiment(p.name, exp, 99, Some(4)).unwrap();
        if one.to_json() != four.to_json() || one.to_csv() != four.to_csv() || one.samples_csv() != four.samples_csv() {
            differing.push(p.name);
        }
    }
    let smoke = |w| run_experiment("smoke", PRESETS[0].experiment, 7, Some(w)).unwrap().to_json();
    if smoke(1) != smoke(3) {
        differing.push("smoke (full size)");
    }
    let detail = format!("{} presets at 1 and 4 workers, differing: {differing:?}", PRESETS.len());
    verdict(14, "byte-identical reports across worker counts", differing.is_empty(), &detail, start.elapsed(), None);
}
