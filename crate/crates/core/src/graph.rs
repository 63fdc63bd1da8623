//! Directed multigraphs with identity-bearing arcs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub id: usize,
    pub source: usize,
    pub target: usize,
}

/// Directed multigraph on vertices `0..n`. Arc `k` has id `k`; parallel arcs
/// and loops are distinct objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Multigraph {
    /// Builds a graph from `(source, target)` pairs; arc ids follow list order.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        let mut arcs = Vec::with_capacity(pairs.len());
        for (id, &(source, target)) in pairs.iter().enumerate() {
            if source >= n || target >= n {
                return Err(Error::InvalidInput(format!(
                    "arc {id} ({source}->{target}) out of range for {n} vertices"
                )));
            }
            out_arcs[source].push(id);
            in_arcs[target].push(id);
            arcs.push(Arc { id, source, target });
        }
        Ok(Multigraph {
            n,
            arcs,
            out_arcs,
            in_arcs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    /// Ids of arcs leaving `v`, ascending.
    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    /// Ids of arcs entering `v`, ascending.
    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_arcs[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_arcs[v].len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_arcs.iter().map(Vec::len).collect()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.out_arcs[u]
            .iter()
            .filter(|&&a| self.arcs[a].target == v)
            .count()
    }

    /// `(u, v) -> number of arcs u->v`, only for pairs with at least one arc.
    pub fn multiplicity_table(&self) -> BTreeMap<(usize, usize), usize> {
        let mut table = BTreeMap::new();
        for a in &self.arcs {
            *table.entry((a.source, a.target)).or_insert(0) += 1;
        }
        table
    }

    /// Distinct non-loop out-neighbours of `u` with their multiplicities.
    pub(crate) fn out_neighbours(&self, u: usize) -> Vec<(usize, usize)> {
        let mut nb: BTreeMap<usize, usize> = BTreeMap::new();
        for &a in &self.out_arcs[u] {
            let t = self.arcs[a].target;
            if t != u {
                *nb.entry(t).or_insert(0) += 1;
            }
        }
        nb.into_iter().collect()
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.n).all(|v| self.in_degree(v) == self.out_degree(v))
    }

    /// True when every vertex with an incident arc lies in a single weakly
    /// connected component.
    pub fn is_connected_on_support(&self) -> bool {
        let Some(start) = (0..self.n).find(|&v| self.out_degree(v) + self.in_degree(v) > 0) else {
            return true;
        };
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            let nbrs = self.out_arcs[u]
                .iter()
                .map(|&a| self.arcs[a].target)
                .chain(self.in_arcs[u].iter().map(|&a| self.arcs[a].source));
            for w in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.n).all(|v| seen[v] || self.out_degree(v) + self.in_degree(v) == 0)
    }

    /// Renders the text format: `n m` then one `src dst` line per arc.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m());
        for a in &self.arcs {
            let _ = writeln!(s, "{} {}", a.source, a.target);
        }
        s
    }

    /// Parses the text format. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let [n, m] = parse_pair(hline, header)?;

        let mut pairs = Vec::with_capacity(m);
        for (line, l) in lines {
            if pairs.len() == m {
                return Err(Error::Parse {
                    line,
                    msg: format!("more than the declared {m} arcs"),
                });
            }
            let [s, t] = parse_pair(line, l)?;
            if s >= n || t >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex out of range 0..{n}"),
                });
            }
            pairs.push((s, t));
        }
        if pairs.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("declared {m} arcs, found {}", pairs.len()),
            });
        }
        Multigraph::new(n, &pairs)
    }
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2]> {
    let mut it = l.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse {
                line,
                msg: "expected two integers".into(),
            })?
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "expected exactly two integers".into(),
        });
    }
    Ok(pair)
}

/// Positive out-degree sequence `d_1..d_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    m: usize,
    m2: usize,
    /// Start of each vertex's block of configuration points.
    offsets: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput("empty degree sequence".into()));
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::InvalidInput(format!("vertex {v} has degree 0")));
        }
        let m = degrees.iter().sum();
        let m2 = degrees.iter().map(|d| d * d).sum();
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut acc = 0;
        for &d in &degrees {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        Ok(DegreeSequence {
            degrees,
            m,
            m2,
            offsets,
        })
    }

    /// `n` vertices of degree `d`.
    pub fn regular(d: usize, n: usize) -> Result<Self> {
        DegreeSequence::new(vec![d; n])
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sum of squared degrees.
    pub fn m2(&self) -> usize {
        self.m2
    }

    /// Common degree when all vertices share one.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degrees[0];
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }

    /// Vertex owning configuration point `k` (same layout for out- and in-points).
    pub fn owner(&self, k: usize) -> usize {
        self.offsets.partition_point(|&o| o <= k) - 1
    }

    /// Half-open range of points owned by `v`.
    pub fn points(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }
}

/// Eulerian: at least one arc, in-degree equals out-degree everywhere, and
/// the vertices carrying arcs form one connected piece.
pub fn is_eulerian(g: &Multigraph) -> bool {
    g.m() > 0 && g.is_balanced() && g.is_connected_on_support()
}

/// Number of loop arcs.
pub fn count_loops(g: &Multigraph) -> usize {
    g.arcs().iter().filter(|a| a.source == a.target).count()
}

/// Unordered pairs of parallel non-loop arcs: sum over u != v of C(mult(u,v), 2).
pub fn count_double_arcs(g: &Multigraph) -> usize {
    g.multiplicity_table()
        .into_iter()
        .filter(|((u, v), _)| u != v)
        .map(|(_, k)| k * (k.saturating_sub(1)) / 2)
        .sum()
}

/// Directed cycles of length `len` on distinct vertices, arcs distinguished
/// by identity. Each cycle is enumerated once, from its smallest vertex.
pub fn count_short_cycles(g: &Multigraph, len: usize) -> u64 {
    match len {
        0 => 0,
        1 => count_loops(g) as u64,
        _ => {
            let nbrs: Vec<Vec<(usize, usize)>> = (0..g.n()).map(|u| g.out_neighbours(u)).collect();
            let mut on_path = vec![false; g.n()];
            let mut total = 0u64;
            for start in 0..g.n() {
                on_path[start] = true;
                total += extend_cycle(&nbrs, start, start, len - 1, 1, &mut on_path);
                on_path[start] = false;
            }
            total
        }
    }
}

fn extend_cycle(
    nbrs: &[Vec<(usize, usize)>],
    start: usize,
    at: usize,
    remaining: usize,
    weight: u64,
    on_path: &mut [bool],
) -> u64 {
    if remaining == 0 {
        return nbrs[at]
            .iter()
            .find(|&&(w, _)| w == start)
            .map_or(0, |&(_, k)| weight * k as u64);
    }
    let mut total = 0;
    for &(w, k) in &nbrs[at] {
        if w > start && !on_path[w] {
            on_path[w] = true;
            total += extend_cycle(nbrs, start, w, remaining - 1, weight * k as u64, on_path);
            on_path[w] = false;
        }
    }
    total
}

/// Small named graphs used across tests, docs, and the verify command.
pub mod fixtures {
    use super::Multigraph;

    pub fn directed_triangle() -> Multigraph {
        Multigraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    pub fn bidirected_triangle() -> Multigraph {
        Multigraph::new(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)]).unwrap()
    }

    /// Two vertices with a doubled arc in each direction.
    pub fn double_digon() -> Multigraph {
        Multigraph::new(2, &[(0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    pub fn in_star(leaves: usize) -> Multigraph {
        let pairs: Vec<_> = (1..=leaves).map(|v| (v, 0)).collect();
        Multigraph::new(leaves + 1, &pairs).unwrap()
    }
}
