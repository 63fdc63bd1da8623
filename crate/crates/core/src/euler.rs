//! Euler tours: exact counting by the BEST theorem, transition systems,
//! exhaustive enumeration, and an exactly uniform sampler.

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arborescence::{count_arbs_rooted, sample_arb_uniform};
use crate::count::{factorial, Count};
use crate::error::{Error, Result};
use crate::graph::{is_eulerian, Multigraph};

/// Limit on arcs for [`enumerate_tours`].
pub const MAX_ENUM_TOUR_ARCS: usize = 12;
/// Limit on `prod d_v!` for [`enumerate_transition_systems`].
pub const MAX_ENUM_TRANSITION_SYSTEMS: u64 = 1_000_000;

/// One bijection In(v) -> Out(v) per vertex, stored arc-wise:
/// `successor[a]` is the arc leaving `target(a)` that `a` is paired with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    successor: Vec<usize>,
}

impl TransitionSystem {
    pub fn new(g: &Multigraph, successor: Vec<usize>) -> Result<Self> {
        if successor.len() != g.m() {
            return Err(Error::InvalidInput(format!(
                "transition system has {} entries for {} arcs",
                successor.len(),
                g.m()
            )));
        }
        let mut hit = vec![false; g.m()];
        for (a, &b) in successor.iter().enumerate() {
            if b >= g.m() || g.arc(b).source != g.arc(a).target {
                return Err(Error::InvalidInput(format!(
                    "arc {a} cannot be followed by arc {b}"
                )));
            }
            if std::mem::replace(&mut hit[b], true) {
                return Err(Error::InvalidInput(format!("arc {b} used twice as an exit")));
            }
        }
        Ok(TransitionSystem { successor })
    }

    pub fn successor(&self, arc: usize) -> usize {
        self.successor[arc]
    }

    pub fn successors(&self) -> &[usize] {
        &self.successor
    }

    /// The pairing at `v` as `(in_arc, out_arc)` pairs.
    pub fn pairing_at(&self, g: &Multigraph, v: usize) -> Vec<(usize, usize)> {
        g.in_arcs(v).iter().map(|&a| (a, self.successor[a])).collect()
    }
}

/// Cyclic arc sequence, rotated so the smallest arc id comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EulerTour {
    arcs: Vec<usize>,
}

impl EulerTour {
    /// Validates chaining and coverage, then canonicalizes the rotation.
    pub fn new(g: &Multigraph, mut arcs: Vec<usize>) -> Result<Self> {
        let m = g.m();
        if arcs.len() != m || m == 0 {
            return Err(Error::InvalidTour(format!(
                "tour has {} arcs, graph has {m}",
                arcs.len()
            )));
        }
        let mut seen = vec![false; m];
        for &a in &arcs {
            if a >= m || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidTour(format!("arc {a} missing or repeated")));
            }
        }
        for i in 0..m {
            let (a, b) = (arcs[i], arcs[(i + 1) % m]);
            if g.arc(a).target != g.arc(b).source {
                return Err(Error::InvalidTour(format!("arc {a} does not lead into arc {b}")));
            }
        }
        let start = arcs.iter().enumerate().min_by_key(|&(_, &a)| a).unwrap().0;
        arcs.rotate_left(start);
        Ok(EulerTour { arcs })
    }

    pub fn arcs(&self) -> &[usize] {
        &self.arcs
    }
}

/// The connected support of an Eulerian graph with isolated vertices
/// dropped. Arc ids are unchanged.
fn support(g: &Multigraph) -> Multigraph {
    if (0..g.n()).all(|v| g.out_degree(v) > 0) {
        return g.clone();
    }
    let mut label = vec![usize::MAX; g.n()];
    let mut k = 0;
    for (v, l) in label.iter_mut().enumerate() {
        if g.out_degree(v) > 0 {
            *l = k;
            k += 1;
        }
    }
    let pairs: Vec<_> = g
        .arcs()
        .iter()
        .map(|a| (label[a.source], label[a.target]))
        .collect();
    Multigraph::new(k, &pairs).expect("relabelled arcs stay in range")
}

fn degree_factor(g: &Multigraph) -> BigUint {
    (0..g.n())
        .map(|v| g.out_degree(v))
        .filter(|&d| d > 0)
        .fold(BigUint::one(), |acc, d| acc * factorial(d as u64 - 1))
}

/// |ET(g)| = prod_u (d_u - 1)! * |ARBS(g, root)|.
pub fn best_count(g: &Multigraph) -> Result<Count> {
    best_count_with_root(g, None)
}

/// [`best_count`] with an explicit root vertex of positive degree.
pub fn best_count_with_root(g: &Multigraph, root: Option<usize>) -> Result<Count> {
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    let root = match root {
        Some(r) if r >= g.n() || g.out_degree(r) == 0 => {
            return Err(Error::InvalidInput(format!("root {r} has no arcs")));
        }
        Some(r) => (0..r).filter(|&v| g.out_degree(v) > 0).count(),
        None => 0,
    };
    let h = support(g);
    let arbs = count_arbs_rooted(&h, root)?;
    Ok(Count(degree_factor(&h) * arbs.0))
}

/// The tour induced by `ts`, or `None` when the induced arc permutation has
/// more than one cycle.
pub fn ts_to_tour(g: &Multigraph, ts: &TransitionSystem) -> Option<EulerTour> {
    let m = g.m();
    if m == 0 {
        return None;
    }
    let mut seq = Vec::with_capacity(m);
    let mut a = 0;
    loop {
        seq.push(a);
        a = ts.successor(a);
        if a == 0 {
            break;
        }
        if seq.len() == m {
            return None;
        }
    }
    (seq.len() == m).then_some(EulerTour { arcs: seq })
}

pub fn tour_to_ts(g: &Multigraph, tour: &EulerTour) -> Result<TransitionSystem> {
    let t = EulerTour::new(g, tour.arcs.clone())?;
    let m = t.arcs.len();
    let mut successor = vec![0; m];
    for i in 0..m {
        successor[t.arcs[i]] = t.arcs[(i + 1) % m];
    }
    TransitionSystem::new(g, successor)
}

/// All tours, each once, by depth-first search from arc 0.
pub fn enumerate_tours(g: &Multigraph) -> Result<Vec<EulerTour>> {
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    if g.m() > MAX_ENUM_TOUR_ARCS {
        return Err(Error::TooLarge(format!(
            "tour enumeration limited to {MAX_ENUM_TOUR_ARCS} arcs"
        )));
    }
    let mut used = vec![false; g.m()];
    used[0] = true;
    let mut path = vec![0];
    let mut out = Vec::new();
    extend_tour(g, &mut used, &mut path, &mut out);
    Ok(out)
}

fn extend_tour(g: &Multigraph, used: &mut [bool], path: &mut Vec<usize>, out: &mut Vec<EulerTour>) {
    let at = g.arc(*path.last().unwrap()).target;
    if path.len() == g.m() {
        if at == g.arc(path[0]).source {
            out.push(EulerTour { arcs: path.clone() });
        }
        return;
    }
    for &a in g.out_arcs(at) {
        if !used[a] {
            used[a] = true;
            path.push(a);
            extend_tour(g, used, path, out);
            path.pop();
            used[a] = false;
        }
    }
}

/// Every transition system of `g` (there are prod d_v! of them).
pub fn enumerate_transition_systems(g: &Multigraph) -> Result<Vec<TransitionSystem>> {
    let total = (0..g.n())
        .map(|v| factorial(g.in_degree(v) as u64))
        .fold(BigUint::one(), |acc, f| acc * f);
    if total > BigUint::from(MAX_ENUM_TRANSITION_SYSTEMS) {
        return Err(Error::TooLarge(format!("{total} transition systems")));
    }
    if !g.is_balanced() {
        return Err(Error::NotEulerian);
    }
    let per_vertex: Vec<Vec<Vec<usize>>> = (0..g.n())
        .map(|v| permutations(g.out_arcs(v)))
        .collect();
    let mut out = Vec::new();
    let mut successor = vec![0; g.m()];
    fill_ts(g, &per_vertex, 0, &mut successor, &mut out);
    Ok(out)
}

fn fill_ts(
    g: &Multigraph,
    per_vertex: &[Vec<Vec<usize>>],
    v: usize,
    successor: &mut Vec<usize>,
    out: &mut Vec<TransitionSystem>,
) {
    if v == g.n() {
        out.push(TransitionSystem {
            successor: successor.clone(),
        });
        return;
    }
    for outs in &per_vertex[v] {
        for (&a, &b) in g.in_arcs(v).iter().zip(outs) {
            successor[a] = b;
        }
        fill_ts(g, per_vertex, v + 1, successor, out);
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Exactly uniform Euler tour.
///
/// Draws a uniform arborescence toward the first vertex `r`, orders the
/// non-tree exits of every other vertex uniformly with the tree arc last,
/// fixes the smallest exit of `r` first and orders the rest uniformly, then
/// walks from `r` taking exits in order. Each tour arises from exactly one
/// such choice.
pub fn sample_tour_uniform<R: Rng + ?Sized>(g: &Multigraph, rng: &mut R) -> Result<EulerTour> {
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    let h = support(g);
    let root = 0;
    let tree = sample_arb_uniform(&h, root, rng)?;
    let mut exits: Vec<Vec<usize>> = Vec::with_capacity(h.n());
    for v in 0..h.n() {
        let mut order: Vec<usize> = h.out_arcs(v).to_vec();
        if v == root {
            // out_arcs are ascending, so the smallest stays in front
            order[1..].shuffle(rng);
        } else {
            let tree_arc = tree.parent_arc[v].expect("non-root has a tree arc");
            order.retain(|&a| a != tree_arc);
            order.shuffle(rng);
            order.push(tree_arc);
        }
        exits.push(order);
    }
    let mut next = vec![0usize; h.n()];
    let mut seq = Vec::with_capacity(h.m());
    let mut at = root;
    while next[at] < exits[at].len() {
        let a = exits[at][next[at]];
        next[at] += 1;
        seq.push(a);
        at = h.arc(a).target;
    }
    debug_assert_eq!(seq.len(), h.m());
    EulerTour::new(g, seq)
}
