//! Seeded search for a good (σ, β) pair on general polytopes.
//!
//! Every feasible pair lower-bounds the inner maximum, so the capacity
//! reported here is an upper bound on the true value.

use num::{BigInt, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::search::Scaled;
use super::{run_with_threads, weight_matrix, CapacityError, CapacityResult, Ordering};
use crate::polytope::{self, HPolytope, MultiplierVector};
use crate::ratlinalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Hill-climb restarts per multiplier candidate. When `k!` fits in the
    /// budget the orderings are enumerated instead.
    pub budget: u64,
    pub seed: u64,
    pub vertex_facet_limit: usize,
    pub threads: Option<usize>,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            budget: 2000,
            seed: 0,
            vertex_facet_limit: polytope::DEFAULT_VERTEX_FACET_LIMIT,
            threads: None,
        }
    }
}

fn factorial_at_most(k: usize, budget: u64) -> bool {
    let mut f: u64 = 1;
    for i in 2..=k as u64 {
        match f.checked_mul(i) {
            Some(v) if v <= budget => f = v,
            _ => return false,
        }
    }
    f <= budget
}

pub fn capacity_upper_bound(
    p: &HPolytope,
    opts: &HeuristicOptions,
) -> Result<CapacityResult, CapacityError> {
    let vertices = polytope::multiplier_vertices(p, opts.vertex_facet_limit)?;
    let mut candidates = vertices.clone();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            candidates.push(vertices[i].midpoint(&vertices[j]));
        }
    }
    let w = weight_matrix(p);
    let k = p.k();
    let exhaustive = factorial_at_most(k, opts.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut best: Option<(Rational, Ordering, MultiplierVector)> = None;
    for beta in candidates {
        let scaled = Scaled::new(&w.weighted(beta.values()));
        let (value, order) = if exhaustive {
            run_with_threads(opts.threads, || scaled.maximize(false))?
        } else {
            hill_climb(&scaled, k, opts.budget, &mut rng)
        };
        let value = scaled.to_rational(value);
        let order = Ordering::new(order).expect("search yields a permutation");
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            best = Some((value, order, beta));
        }
    }
    match best {
        Some((value, order, beta)) if value.is_positive() => {
            Ok(CapacityResult::new(value, order, beta, false))
        }
        _ => Err(CapacityError::NoPositiveValueFound),
    }
}

fn hill_climb(
    scaled: &Scaled,
    k: usize,
    restarts: u64,
    rng: &mut ChaCha8Rng,
) -> (BigInt, Vec<usize>) {
    let mut best: Option<(BigInt, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        let mut value = scaled.order_value(&order);
        loop {
            let mut improved = false;
            // adjacent transpositions first, then arbitrary swaps
            let moves = (0..k.saturating_sub(1))
                .map(|i| (i, i + 1))
                .chain((0..k).flat_map(|i| (i + 2..k).map(move |j| (i, j))));
            for (i, j) in moves {
                order.swap(i, j);
                let v = scaled.order_value(&order);
                if v > value {
                    value = v;
                    improved = true;
                } else {
                    order.swap(i, j);
                }
            }
            if !improved {
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((bv, bo)) => value > *bv || (value == *bv && order < *bo),
        };
        if better {
            best = Some((value, order));
        }
    }
    best.expect("at least one restart")
}
