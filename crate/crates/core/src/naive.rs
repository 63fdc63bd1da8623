//! The naive transition-system sampler and the approximate counter built on
//! it, together with the exact acceptance probability they estimate.

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::count::{factorial, Count, Ratio};
use crate::error::{Error, Result};
use crate::euler::{best_count, ts_to_tour, EulerTour, TransitionSystem};
use crate::graph::{is_eulerian, Multigraph};
use crate::rng::trial_rng;

/// Uniform random transition system: an independent uniform pairing of
/// In(v) with Out(v) at every vertex.
pub fn random_transition_system<R: Rng + ?Sized>(g: &Multigraph, rng: &mut R) -> TransitionSystem {
    let mut successor = vec![0; g.m()];
    let mut outs = Vec::new();
    for v in 0..g.n() {
        outs.clear();
        outs.extend_from_slice(g.out_arcs(v));
        outs.shuffle(rng);
        for (&a, &b) in g.in_arcs(v).iter().zip(&outs) {
            successor[a] = b;
        }
    }
    TransitionSystem::new(g, successor).expect("balanced graph yields a valid pairing")
}

/// One run of the naive sampler: `Some(tour)` when the random transition
/// system is a single cycle.
pub fn sample_naive<R: Rng + ?Sized>(g: &Multigraph, rng: &mut R) -> Result<Option<EulerTour>> {
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    Ok(ts_to_tour(g, &random_transition_system(g, rng)))
}

/// Fraction `k / kappa` of successful naive runs.
pub fn approximate<R: Rng + ?Sized>(g: &Multigraph, kappa: u64, rng: &mut R) -> Result<Ratio> {
    if kappa == 0 {
        return Err(Error::InvalidInput("kappa must be at least 1".into()));
    }
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    let mut k = 0u64;
    for _ in 0..kappa {
        if ts_to_tour(g, &random_transition_system(g, rng)).is_some() {
            k += 1;
        }
    }
    Ok(Ratio::new(k, kappa))
}

/// [`approximate`] with trial `i` drawing from `trial_rng(master_seed, i)`;
/// the result does not depend on the rayon pool size.
pub fn approximate_seeded(g: &Multigraph, kappa: u64, master_seed: u64) -> Result<Ratio> {
    if kappa == 0 {
        return Err(Error::InvalidInput("kappa must be at least 1".into()));
    }
    if !is_eulerian(g) {
        return Err(Error::NotEulerian);
    }
    let k: u64 = (0..kappa)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            ts_to_tour(g, &random_transition_system(g, &mut rng)).is_some() as u64
        })
        .sum();
    Ok(Ratio::new(k, kappa))
}

/// Number of transition systems, prod d_v!.
pub fn transition_system_count(g: &Multigraph) -> Count {
    Count(
        (0..g.n())
            .map(|v| factorial(g.out_degree(v) as u64))
            .fold(BigUint::one(), |acc, f| acc * f),
    )
}

/// |ET(g)| / prod d_v!, exactly.
pub fn acceptance_probability_exact(g: &Multigraph) -> Result<Ratio> {
    let tours = best_count(g)?;
    Ok(Ratio::from_counts(&tours, &transition_system_count(g)))
}
