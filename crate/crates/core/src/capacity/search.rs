//! Exhaustive linear-ordering search over integer weights.
//!
//! Maximizes `Σ_{j<i} a[σ(i)][σ(j)]` over all orderings σ. The permutation
//! tree is split by prefix and the subtrees are searched in parallel; each
//! subtree reports its first (lexicographically smallest) maximizer and the
//! merge keeps the larger value, then the smaller ordering, so the result
//! does not depend on the schedule.

use std::ops::AddAssign;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ratlinalg::{RatMatrix, Rational};

pub(crate) trait Score:
    Clone + Ord + Send + Sync + Zero + for<'a> AddAssign<&'a Self>
{
}

impl Score for i64 {}
impl Score for BigInt {}

/// A rational square matrix multiplied through by the lcm of its
/// denominators.
pub(crate) enum ScaledWeights {
    Small(Vec<Vec<i64>>),
    Big(Vec<Vec<BigInt>>),
}

pub(crate) struct Scaled {
    pub weights: ScaledWeights,
    pub scale: BigInt,
}

impl Scaled {
    pub fn new(a: &RatMatrix) -> Self {
        let k = a.rows();
        let scale = a
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let big: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let x = a.get(i, j);
                        x.numer() * (&scale / x.denom())
                    })
                    .collect()
            })
            .collect();
        // any ordering sums at most k² entries
        let bound = i64::MAX / ((k * k).max(1) as i64);
        let fits = big.iter().flatten().all(|x| x.abs() <= BigInt::from(bound));
        let weights = if fits {
            ScaledWeights::Small(
                big.iter()
                    .map(|r| {
                        r.iter()
                            .map(|x| x.to_i64().expect("checked bound"))
                            .collect()
                    })
                    .collect(),
            )
        } else {
            ScaledWeights::Big(big)
        };
        Scaled { weights, scale }
    }

    pub fn to_rational(&self, value: BigInt) -> Rational {
        Rational::new(value, self.scale.clone())
    }

    pub fn has_zero_row_sums(&self) -> bool {
        match &self.weights {
            ScaledWeights::Small(a) => a.iter().all(|r| r.iter().sum::<i64>() == 0),
            ScaledWeights::Big(a) => a.iter().all(|r| r.iter().sum::<BigInt>().is_zero()),
        }
    }

    /// Best value (unscaled numerator) and lexicographically smallest
    /// maximizing ordering.
    pub fn maximize(&self, fix_first: bool) -> (BigInt, Vec<usize>) {
        match &self.weights {
            ScaledWeights::Small(a) => {
                let (v, p) = maximize(a, fix_first);
                (BigInt::from(v), p)
            }
            ScaledWeights::Big(a) => maximize(a, fix_first),
        }
    }

    pub fn order_value(&self, order: &[usize]) -> BigInt {
        match &self.weights {
            ScaledWeights::Small(a) => BigInt::from(order_value(a, order)),
            ScaledWeights::Big(a) => order_value(a, order),
        }
    }
}

pub(crate) fn order_value<T: Score>(a: &[Vec<T>], order: &[usize]) -> T {
    let mut total = T::zero();
    for i in 1..order.len() {
        for j in 0..i {
            total += &a[order[i]][order[j]];
        }
    }
    total
}

/// Prefixes handed to workers, in lexicographic order.
fn prefixes(k: usize, fix_first: bool) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let first: Vec<usize> = if fix_first { vec![0] } else { (0..k).collect() };
    if k < 3 {
        return first.into_iter().map(|f| vec![f]).collect();
    }
    first
        .into_iter()
        .flat_map(|f| (0..k).filter(move |&s| s != f).map(move |s| vec![f, s]))
        .collect()
}

pub(crate) fn maximize<T: Score>(a: &[Vec<T>], fix_first: bool) -> (T, Vec<usize>) {
    let k = a.len();
    let results: Vec<(T, Vec<usize>)> = prefixes(k, fix_first)
        .into_par_iter()
        .map(|prefix| search_subtree(a, prefix))
        .collect();
    let mut best: Option<(T, Vec<usize>)> = None;
    for (value, perm) in results {
        let better = match &best {
            None => true,
            Some((bv, bp)) => value > *bv || (value == *bv && perm < *bp),
        };
        if better {
            best = Some((value, perm));
        }
    }
    best.expect("at least one prefix")
}

fn search_subtree<T: Score>(a: &[Vec<T>], prefix: Vec<usize>) -> (T, Vec<usize>) {
    let k = a.len();
    let mut used = vec![false; k];
    for &p in &prefix {
        used[p] = true;
    }
    let value = order_value(a, &prefix);
    let mut state = Dfs {
        a,
        used,
        perm: prefix,
        best: None,
    };
    state.run(value);
    state.best.expect("subtree has a leaf")
}

struct Dfs<'a, T> {
    a: &'a [Vec<T>],
    used: Vec<bool>,
    perm: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Score> Dfs<'_, T> {
    fn run(&mut self, value: T) {
        let k = self.a.len();
        if self.perm.len() == k {
            // strict: the first maximizer found is the lexicographically smallest
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.perm.clone()));
            }
            return;
        }
        for w in 0..k {
            if self.used[w] {
                continue;
            }
            let mut next = value.clone();
            let row = &self.a[w];
            for &t in &self.perm {
                next += &row[t];
            }
            self.used[w] = true;
            self.perm.push(w);
            self.run(next);
            self.perm.pop();
            self.used[w] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::next_permutation;

    fn brute(a: &[Vec<i64>]) -> (i64, Vec<usize>) {
        let mut p: Vec<usize> = (0..a.len()).collect();
        let mut best = (order_value(a, &p), p.clone());
        while next_permutation(&mut p) {
            let v = order_value(a, &p);
            if v > best.0 {
                best = (v, p.clone());
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_with_ties() {
        let mut state = 7u64;
        for k in 1..=6 {
            for _ in 0..20 {
                let a: Vec<Vec<i64>> = (0..k)
                    .map(|_| {
                        (0..k)
                            .map(|_| {
                                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                                ((state >> 33) % 5) as i64 - 2
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(maximize(&a, false), brute(&a));
            }
        }
    }

    #[test]
    fn prefix_partition_covers_tree() {
        assert_eq!(prefixes(4, false).len(), 12);
        assert_eq!(prefixes(4, true).len(), 3);
        assert_eq!(prefixes(2, false), vec![vec![0], vec![1]]);
        assert_eq!(prefixes(1, true), vec![vec![0]]);
    }
}
