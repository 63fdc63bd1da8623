//! Spanning in-arborescences: exact counting through the Laplacian cofactor,
//! exhaustive enumeration, and uniform sampling by loop-erased random walks.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::count::Count;
use crate::det::{bareiss_det, det_nonneg_bounded, IntMatrix};
use crate::error::{Error, Result};
use crate::graph::{is_eulerian, Multigraph};

/// Default step budget for [`sample_arb_uniform`].
pub const DEFAULT_WALK_BUDGET: u64 = 100_000_000;

/// Limits for [`enumerate_arbs`].
pub const MAX_ENUM_VERTICES: usize = 8;
pub const MAX_ENUM_ARCS: usize = 16;

/// Spanning tree with every arc directed toward `root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arborescence {
    pub root: usize,
    /// `parent_arc[v]` is the id of the tree arc leaving `v`; `None` at the root.
    pub parent_arc: Vec<Option<usize>>,
}

impl Arborescence {
    /// Arc ids in the tree, ascending.
    pub fn arc_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.parent_arc.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids
    }

    pub fn is_valid_for(&self, g: &Multigraph) -> bool {
        let n = g.n();
        if self.root >= n || self.parent_arc.len() != n || self.parent_arc[self.root].is_some() {
            return false;
        }
        for v in 0..n {
            if v == self.root {
                continue;
            }
            match self.parent_arc[v] {
                Some(a) if a < g.m() && g.arc(a).source == v => {}
                _ => return false,
            }
            let mut at = v;
            for _ in 0..n {
                if at == self.root {
                    break;
                }
                at = g.arc(self.parent_arc[at].unwrap()).target;
            }
            if at != self.root {
                return false;
            }
        }
        true
    }
}

fn check_root(g: &Multigraph, root: usize) -> Result<()> {
    if root >= g.n() {
        return Err(Error::InvalidInput(format!(
            "root {root} out of range for {} vertices",
            g.n()
        )));
    }
    Ok(())
}

/// Whether every vertex has a directed path to `root`.
pub fn all_reach(g: &Multigraph, root: usize) -> bool {
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &a in g.in_arcs(v) {
            let u = g.arc(a).source;
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Out-degree Laplacian with the root's row and column removed. Loops
/// contribute nothing.
pub fn reduced_laplacian(g: &Multigraph, root: usize) -> IntMatrix {
    let n = g.n();
    let index = |v: usize| if v < root { v } else { v - 1 };
    let mut lap = IntMatrix::zeros(n.saturating_sub(1));
    for a in g.arcs() {
        if a.source == a.target || a.source == root {
            continue;
        }
        let i = index(a.source);
        lap.add(i, i, 1);
        if a.target != root {
            lap.add(i, index(a.target), -1);
        }
    }
    lap
}

/// Upper bound: each non-root vertex picks one non-loop out-arc.
fn choice_bound(g: &Multigraph, root: usize) -> BigUint {
    (0..g.n())
        .filter(|&v| v != root)
        .map(|v| g.out_degree(v) - g.multiplicity(v, v))
        .fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact number of in-arborescences rooted at `root`.
pub fn count_arbs_rooted(g: &Multigraph, root: usize) -> Result<Count> {
    check_root(g, root)?;
    if !all_reach(g, root) {
        return Ok(Count::zero());
    }
    let bound = choice_bound(g, root);
    Ok(Count(det_nonneg_bounded(&reduced_laplacian(g, root), &bound)))
}

/// Same count through Bareiss elimination only.
pub fn count_arbs_rooted_bareiss(g: &Multigraph, root: usize) -> Result<Count> {
    check_root(g, root)?;
    let d = bareiss_det(&reduced_laplacian(g, root));
    Ok(Count(d.to_biguint().expect("cofactor is non-negative")))
}

/// Arborescences over all roots.
pub fn count_arbs_total(g: &Multigraph) -> Count {
    let no_isolated = (0..g.n()).all(|v| g.out_degree(v) > 0);
    if is_eulerian(g) && no_isolated {
        // balanced graphs have the same count at every root
        let per_root = count_arbs_rooted(g, 0).expect("root in range");
        return Count(per_root.0 * g.n());
    }
    let mut total = BigUint::zero();
    for v in 0..g.n() {
        total += count_arbs_rooted(g, v).expect("root in range").0;
    }
    Count(total)
}

/// All arborescences rooted at `root`, by backtracking over out-arc choices.
pub fn enumerate_arbs(g: &Multigraph, root: usize) -> Result<Vec<Arborescence>> {
    check_root(g, root)?;
    if g.n() > MAX_ENUM_VERTICES || g.m() > MAX_ENUM_ARCS {
        return Err(Error::TooLarge(format!(
            "arborescence enumeration limited to {MAX_ENUM_VERTICES} vertices and {MAX_ENUM_ARCS} arcs"
        )));
    }
    let order: Vec<usize> = (0..g.n()).filter(|&v| v != root).collect();
    let mut parent_arc = vec![None; g.n()];
    let mut out = Vec::new();
    enumerate_from(g, root, &order, 0, &mut parent_arc, &mut out);
    Ok(out)
}

fn enumerate_from(
    g: &Multigraph,
    root: usize,
    order: &[usize],
    idx: usize,
    parent_arc: &mut Vec<Option<usize>>,
    out: &mut Vec<Arborescence>,
) {
    if idx == order.len() {
        out.push(Arborescence {
            root,
            parent_arc: parent_arc.clone(),
        });
        return;
    }
    let v = order[idx];
    for &a in g.out_arcs(v) {
        let mut at = g.arc(a).target;
        let mut cyclic = false;
        loop {
            if at == v {
                cyclic = true;
                break;
            }
            match parent_arc[at] {
                Some(p) => at = g.arc(p).target,
                None => break,
            }
        }
        if cyclic {
            continue;
        }
        parent_arc[v] = Some(a);
        enumerate_from(g, root, order, idx + 1, parent_arc, out);
        parent_arc[v] = None;
    }
}

/// Uniform arborescence rooted at `root` (Wilson's algorithm, walking along
/// out-arcs; parallel arcs are chosen in proportion to multiplicity).
pub fn sample_arb_uniform<R: Rng + ?Sized>(
    g: &Multigraph,
    root: usize,
    rng: &mut R,
) -> Result<Arborescence> {
    sample_arb_uniform_with_budget(g, root, rng, DEFAULT_WALK_BUDGET)
}

/// As [`sample_arb_uniform`], failing once the walks take `max_steps` steps.
pub fn sample_arb_uniform_with_budget<R: Rng + ?Sized>(
    g: &Multigraph,
    root: usize,
    rng: &mut R,
    max_steps: u64,
) -> Result<Arborescence> {
    check_root(g, root)?;
    if !all_reach(g, root) {
        return Err(Error::NoArborescence { root });
    }
    let n = g.n();
    let exits: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            g.out_arcs(v)
                .iter()
                .copied()
                .filter(|&a| g.arc(a).target != v)
                .collect()
        })
        .collect();
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    let mut next: Vec<Option<usize>> = vec![None; n];
    let mut steps = 0u64;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            if steps == max_steps {
                return Err(Error::NoArborescence { root });
            }
            steps += 1;
            let a = exits[u][rng.random_range(0..exits[u].len())];
            next[u] = Some(a);
            u = g.arc(a).target;
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = g.arc(next[u].unwrap()).target;
        }
    }
    next[root] = None;
    Ok(Arborescence {
        root,
        parent_arc: next,
    })
}
