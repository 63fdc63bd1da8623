//! Directed configuration model.
//!
//! Vertex `v` owns a contiguous block of `d_v` out-points and the same block
//! of in-points. A configuration is a perfect matching from out-points to
//! in-points, stored as a permutation; its projection has one arc per
//! matched pair, with arc id equal to the out-point index.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::count::{falling_factorial, Count};
use crate::error::{Error, Result};
use crate::graph::{count_double_arcs, count_loops, is_eulerian, DegreeSequence, Multigraph};

/// Exhaustive enumeration limit on the number of points.
pub const MAX_ENUM_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationRepr", into = "ConfigurationRepr")]
pub struct Configuration {
    degrees: DegreeSequence,
    matching: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationRepr {
    degrees: Vec<usize>,
    matching: Vec<usize>,
}

impl From<Configuration> for ConfigurationRepr {
    fn from(c: Configuration) -> Self {
        ConfigurationRepr {
            degrees: c.degrees.degrees().to_vec(),
            matching: c.matching,
        }
    }
}

impl TryFrom<ConfigurationRepr> for Configuration {
    type Error = Error;

    fn try_from(r: ConfigurationRepr) -> Result<Self> {
        Configuration::new(DegreeSequence::new(r.degrees)?, r.matching)
    }
}

impl Configuration {
    /// `matching[k]` is the in-point matched to out-point `k`.
    pub fn new(degrees: DegreeSequence, matching: Vec<usize>) -> Result<Self> {
        let m = degrees.m();
        if matching.len() != m {
            return Err(Error::InvalidInput(format!(
                "matching has {} entries, expected {m}",
                matching.len()
            )));
        }
        let mut seen = vec![false; m];
        for &t in &matching {
            if t >= m || std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidInput("matching is not a permutation".into()));
            }
        }
        Ok(Configuration { degrees, matching })
    }

    pub fn degrees(&self) -> &DegreeSequence {
        &self.degrees
    }

    pub fn matching(&self) -> &[usize] {
        &self.matching
    }
}

/// Set of (out-point, in-point) pairs using each point at most once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialConfig {
    pub pairs: Vec<(usize, usize)>,
}

impl PartialConfig {
    pub fn is_valid(&self) -> bool {
        let mut outs = HashSet::new();
        let mut ins = HashSet::new();
        self.pairs
            .iter()
            .all(|&(s, t)| outs.insert(s) && ins.insert(t))
    }
}

/// Uniform over all m! configurations.
pub fn sample_configuration<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Configuration {
    let mut matching: Vec<usize> = (0..d.m()).collect();
    matching.shuffle(rng);
    Configuration {
        degrees: d.clone(),
        matching,
    }
}

pub fn project(c: &Configuration) -> Multigraph {
    let d = &c.degrees;
    let pairs: Vec<(usize, usize)> = c
        .matching
        .iter()
        .enumerate()
        .map(|(s, &t)| (d.owner(s), d.owner(t)))
        .collect();
    Multigraph::new(d.n(), &pairs).expect("points map into vertex range")
}

/// No loops and no parallel arcs.
pub fn is_simple(g: &Multigraph) -> bool {
    count_loops(g) == 0 && count_double_arcs(g) == 0
}

#[derive(Debug, Clone)]
pub struct SimpleSample {
    pub graph: Multigraph,
    /// Configurations drawn, including the accepted one.
    pub attempts: u64,
}

/// Rejection sampling of a simple connected Eulerian graph with out-degree
/// sequence `d`, uniform over such graphs.
pub fn sample_simple_eulerian<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
    max_attempts: u64,
) -> Result<SimpleSample> {
    if max_attempts == 0 {
        return Err(Error::InvalidInput("max_attempts must be at least 1".into()));
    }
    for attempt in 1..=max_attempts {
        let g = project(&sample_configuration(d, rng));
        if is_simple(&g) && is_eulerian(&g) {
            return Ok(SimpleSample {
                graph: g,
                attempts: attempt,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
    })
}

/// Every configuration exactly once, in lexicographic order of the matching.
pub fn enumerate_configurations(d: &DegreeSequence) -> Result<ConfigurationIter> {
    if d.m() > MAX_ENUM_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points exceeds the limit of {MAX_ENUM_POINTS}",
            d.m()
        )));
    }
    Ok(ConfigurationIter {
        degrees: d.clone(),
        next: Some((0..d.m()).collect()),
    })
}

pub struct ConfigurationIter {
    degrees: DegreeSequence,
    next: Option<Vec<usize>>,
}

impl Iterator for ConfigurationIter {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Configuration {
            degrees: self.degrees.clone(),
            matching: current,
        })
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn check_forest_input(in_points: &[u64], out_points: &[u64], roots: &[usize]) -> Result<()> {
    let n = in_points.len();
    if out_points.len() != n {
        return Err(Error::InvalidInput(
            "in-point and out-point vectors differ in length".into(),
        ));
    }
    if roots.is_empty() {
        return Err(Error::InvalidInput("root set is empty".into()));
    }
    let mut seen = vec![false; n];
    for &r in roots {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::InvalidInput(format!("bad or repeated root {r}")));
        }
    }
    Ok(())
}

/// Number of partial configurations projecting to a spanning in-forest whose
/// component roots are exactly `roots`, when vertex `v` has `in_points[v]`
/// points for entering arcs and `out_points[v]` for leaving arcs:
///
/// `prod_{v not in R} y_v * sum_{v in R} x_v * (sum_v x_v - 1)_{n-|R|-1}`.
///
/// With every vertex a root the forest is empty and the count is 1.
pub fn forest_config_count_formula(
    in_points: &[u64],
    out_points: &[u64],
    roots: &[usize],
) -> Result<Count> {
    check_forest_input(in_points, out_points, roots)?;
    let n = in_points.len();
    if roots.len() == n {
        return Ok(Count::one());
    }
    let mut is_root = vec![false; n];
    for &r in roots {
        is_root[r] = true;
    }
    let non_root_out: BigUint = (0..n)
        .filter(|&v| !is_root[v])
        .fold(BigUint::one(), |acc, v| acc * out_points[v]);
    let root_in: u64 = roots.iter().map(|&r| in_points[r]).sum();
    let total_in: u64 = in_points.iter().sum();
    let k = (n - roots.len() - 1) as u64;
    let tail = if total_in == 0 {
        // (-1)_k is only reached with root_in == 0, which zeroes the product
        BigUint::from((k == 0) as u32)
    } else {
        falling_factorial(total_in - 1, k)
    };
    Ok(Count(non_root_out * root_in * tail))
}

/// Exhaustive oracle for [`forest_config_count_formula`].
pub fn forest_config_count_bruteforce(
    in_points: &[u64],
    out_points: &[u64],
    roots: &[usize],
) -> Result<Count> {
    let mut count = 0u64;
    for_each_forest_config(in_points, out_points, roots, |_| count += 1)?;
    Ok(Count::from(count))
}

/// Visits every partial configuration that projects to a spanning in-forest
/// rooted at `roots`. Limits: `n <= 6` and at most 10 in-points.
pub fn for_each_forest_config<F: FnMut(&PartialConfig)>(
    in_points: &[u64],
    out_points: &[u64],
    roots: &[usize],
    mut visit: F,
) -> Result<()> {
    check_forest_input(in_points, out_points, roots)?;
    let n = in_points.len();
    let total_in: u64 = in_points.iter().sum();
    if n > 6 || total_in > 10 {
        return Err(Error::TooLarge(format!(
            "forest oracle limited to n <= 6 and 10 in-points (got n={n}, {total_in})"
        )));
    }
    let mut is_root = vec![false; n];
    for &r in roots {
        is_root[r] = true;
    }
    let in_owner: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, in_points[v] as usize))
        .collect();
    let mut out_base = Vec::with_capacity(n);
    let mut acc = 0usize;
    for &y in out_points {
        out_base.push(acc);
        acc += y as usize;
    }
    let children: Vec<usize> = (0..n).filter(|&v| !is_root[v]).collect();

    struct Search<'a, F> {
        children: &'a [usize],
        in_owner: &'a [usize],
        out_points: &'a [u64],
        out_base: &'a [usize],
        parent: Vec<Option<usize>>,
        used_in: Vec<bool>,
        current: PartialConfig,
        visit: F,
    }

    impl<F: FnMut(&PartialConfig)> Search<'_, F> {
        fn creates_cycle(&self, child: usize, parent: usize) -> bool {
            let mut at = Some(parent);
            while let Some(v) = at {
                if v == child {
                    return true;
                }
                at = self.parent[v];
            }
            false
        }

        fn run(&mut self, idx: usize) {
            if idx == self.children.len() {
                (self.visit)(&self.current);
                return;
            }
            let v = self.children[idx];
            for t in 0..self.in_owner.len() {
                if self.used_in[t] {
                    continue;
                }
                let p = self.in_owner[t];
                if self.creates_cycle(v, p) {
                    continue;
                }
                self.used_in[t] = true;
                self.parent[v] = Some(p);
                for s in 0..self.out_points[v] as usize {
                    self.current.pairs.push((self.out_base[v] + s, t));
                    self.run(idx + 1);
                    self.current.pairs.pop();
                }
                self.parent[v] = None;
                self.used_in[t] = false;
            }
        }
    }

    let mut search = Search {
        children: &children,
        in_owner: &in_owner,
        out_points,
        out_base: &out_base,
        parent: vec![None; n],
        used_in: vec![false; in_owner.len()],
        current: PartialConfig::default(),
        visit: &mut visit,
    };
    search.run(0);
    Ok(())
}
