//! Oracle suites comparing the closed-form counters with exhaustive
//! enumeration on small instances. Used by the `verify` command and the
//! acceptance tests.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arborescence::{count_arbs_rooted, enumerate_arbs};
use crate::config_model::{forest_config_count_bruteforce, forest_config_count_formula, project, sample_configuration};
use crate::euler::{best_count, best_count_with_root, enumerate_tours};
use crate::experiments::exact_configuration_moments;
use crate::graph::{fixtures, is_eulerian, DegreeSequence, Multigraph};
use crate::rng::{seeded_rng, sub_seed};

pub const CORPUS_MAX_VERTICES: usize = 5;
pub const CORPUS_MAX_ARCS: usize = 12;
pub const CORPUS_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn from_results(name: &str, results: Vec<Option<String>>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            cases: results.len() as u64,
            failures: results.into_iter().flatten().collect(),
        }
    }
}

/// Named hand-built Eulerian graphs, including loops and parallel arcs.
pub fn hand_corpus() -> Vec<(&'static str, Multigraph)> {
    let g = |n, arcs: &[(usize, usize)]| Multigraph::new(n, arcs).expect("valid fixture");
    vec![
        ("directed_triangle", fixtures::directed_triangle()),
        ("bidirected_triangle", fixtures::bidirected_triangle()),
        ("double_digon", fixtures::double_digon()),
        ("single_loop", g(1, &[(0, 0)])),
        ("three_loops", g(1, &[(0, 0), (0, 0), (0, 0)])),
        ("digon_with_loops", g(2, &[(0, 1), (1, 0), (0, 0), (1, 1)])),
        ("bowtie", g(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])),
        ("complete_4", g(4, &[(0, 1), (0, 2), (0, 3), (1, 0), (1, 2), (1, 3), (2, 0), (2, 1), (2, 3), (3, 0), (3, 1), (3, 2)])),
        ("triple_digon", g(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0), (1, 0)])),
        ("two_cycles_shared", g(4, &[(0, 1), (1, 0), (0, 2), (2, 3), (3, 0), (1, 1)])),
    ]
}

/// Random Eulerian multigraphs with at most 5 vertices, 12 arcs and
/// out-degree 4, projected from uniform configurations.
pub fn random_eulerian_corpus(count: usize, seed: u64) -> Vec<Multigraph> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(1..=CORPUS_MAX_VERTICES);
        let degrees: Vec<usize> = (0..n).map(|_| rng.random_range(1..=CORPUS_MAX_DEGREE)).collect();
        if degrees.iter().sum::<usize>() > CORPUS_MAX_ARCS {
            continue;
        }
        let d = DegreeSequence::new(degrees).expect("positive degrees");
        let g = project(&sample_configuration(&d, &mut rng));
        if is_eulerian(&g) {
            out.push(g);
        }
    }
    out
}

pub fn default_corpus(seed: u64) -> Vec<Multigraph> {
    let mut graphs: Vec<Multigraph> = hand_corpus().into_iter().map(|(_, g)| g).collect();
    graphs.extend(random_eulerian_corpus(200, seed));
    graphs
}

/// Closed-form tour count against exhaustive enumeration.
pub fn check_best_identity(graphs: &[Multigraph]) -> CheckOutcome {
    let results = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let formula = best_count(g).map(|c| c.to_string());
            let brute = enumerate_tours(g).map(|t| t.len().to_string());
            match (formula, brute) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => Some(format!("graph {i}: formula {a:?}, enumeration {b:?}\n{}", g.to_text())),
            }
        })
        .collect();
    CheckOutcome::from_results("tour_count_identity", results)
}

/// Determinant count against enumeration at every root, plus equal counts
/// across roots (and root-independent tour counts) on Eulerian graphs.
pub fn check_matrix_tree(graphs: &[Multigraph]) -> CheckOutcome {
    let results = graphs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, g)| {
            let mut out = Vec::new();
            let mut per_root = Vec::new();
            for root in 0..g.n() {
                let det = count_arbs_rooted(g, root).map(|c| c.to_string());
                let brute = enumerate_arbs(g, root).map(|a| a.len().to_string());
                out.push(match (&det, brute) {
                    (Ok(a), Ok(b)) if *a == b => None,
                    (a, b) => Some(format!("graph {i} root {root}: determinant {a:?}, enumeration {b:?}")),
                });
                per_root.push(det.ok());
                if is_eulerian(g) && g.out_degree(root) > 0 {
                    let t = best_count_with_root(g, Some(root)).ok();
                    out.push((t != best_count(g).ok()).then(|| format!("graph {i}: tour count differs at root {root}")));
                }
            }
            if is_eulerian(g) && per_root.windows(2).any(|w| w[0] != w[1]) {
                out.push(Some(format!("graph {i}: arborescence counts differ across roots {per_root:?}")));
            }
            out
        })
        .collect();
    CheckOutcome::from_results("matrix_tree", results)
}

/// Random forest-count instances: `(in_points, out_points, roots)` with
/// n <= 5, at most 3 points of each kind per vertex and at most 9 in-points.
pub fn random_forest_instances(count: usize, seed: u64) -> Vec<(Vec<u64>, Vec<u64>, Vec<usize>)> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(1..=5);
        let x: Vec<u64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        if x.iter().sum::<u64>() > 9 {
            continue;
        }
        let y: Vec<u64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        let k = rng.random_range(1..=n);
        let mut roots = sample(&mut rng, n, k).into_vec();
        roots.sort_unstable();
        out.push((x, y, roots));
    }
    out
}

pub fn check_forest_formula(instances: &[(Vec<u64>, Vec<u64>, Vec<usize>)]) -> CheckOutcome {
    let results = instances
        .par_iter()
        .map(|(x, y, r)| {
            let a = forest_config_count_formula(x, y, r);
            let b = forest_config_count_bruteforce(x, y, r);
            match (&a, &b) {
                (Ok(a), Ok(b)) if a == b => None,
                _ => Some(format!("x={x:?} y={y:?} roots={r:?}: formula {a:?}, enumeration {b:?}")),
            }
        })
        .collect();
    CheckOutcome::from_results("forest_formula", results)
}

/// Every composition of `total` with parts in `1..=max_part`.
pub fn compositions(total: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in 1..=max_part.min(rest) {
            cur.push(p);
            go(rest - p, max_part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if total > 0 {
        go(total, max_part, &mut Vec::new(), &mut out);
    }
    out
}

/// Exact configuration-model arborescence moments for every degree sequence
/// with `m <= max_m` and degrees at most `max_degree`.
pub fn check_exact_moments(max_m: usize, max_degree: usize) -> CheckOutcome {
    let sequences: Vec<Vec<usize>> = (1..=max_m).flat_map(|m| compositions(m, max_degree)).collect();
    let results = sequences
        .par_iter()
        .map(|d| {
            let ds = DegreeSequence::new(d.clone()).expect("positive degrees");
            match exact_configuration_moments(&ds) {
                Ok(e) if e.matches() => None,
                Ok(e) => Some(format!(
                    "degrees {d:?}: mean {} vs {}, second {} vs {}",
                    e.mean, e.theory_mean, e.second_moment, e.theory_second_moment
                )),
                Err(err) => Some(format!("degrees {d:?}: {err}")),
            }
        })
        .collect();
    CheckOutcome::from_results("exact_arborescence_moments", results)
}

/// The full oracle suite at its default sizes.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let corpus = default_corpus(sub_seed(seed, 10));
    vec![
        check_best_identity(&corpus),
        check_matrix_tree(&corpus),
        check_forest_formula(&random_forest_instances(500, sub_seed(seed, 11))),
        check_exact_moments(7, 3),
    ]
}
