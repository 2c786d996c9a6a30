//! The permutation/multiplier capacity objective.
//!
//! For facet normals `b_1..b_k` and a multiplier `β ∈ Q`, the objective of
//! an ordering σ is `Σ_{j<i} β_σ(i) β_σ(j) ω(b_σ(i), b_σ(j))`, and the
//! capacity is `1 / (2 · max)`. For simplices `β` is unique and the maximum
//! is found exactly by exhaustive search; for general polytopes a seeded
//! hill climb over (σ, β) gives a one-sided bound.

mod heuristic;
pub(crate) mod search;

use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::polytope::{self, HPolytope, MultiplierVector, PolytopeError};
use crate::ratlinalg::{RatMatrix, Rational};

pub use heuristic::{capacity_upper_bound, HeuristicOptions};

pub const DEFAULT_EXACT_FACET_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("vectors have lengths {0} and {1}; expected equal even lengths")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("maximum of the objective is {0}, not positive; capacity undefined")]
    InnerMaxNonpositive(Rational),
    #[error("exact search over {k} facets exceeds the limit of {limit}")]
    LimitExceeded { k: usize, limit: usize },
    #[error("cyclic pruning needs weighted row sums of zero")]
    PruningUnavailable,
    #[error("no candidate produced a positive objective value")]
    NoPositiveValueFound,
    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

/// `ω(x, y) = Σ_{i≤n} (x_i y_{n+i} − x_{n+i} y_i)`.
pub fn symplectic_form(x: &[Rational], y: &[Rational]) -> Result<Rational, CapacityError> {
    if x.len() != y.len() || !x.len().is_multiple_of(2) {
        return Err(CapacityError::DimensionMismatch(x.len(), y.len()));
    }
    let n = x.len() / 2;
    Ok((0..n).map(|i| &x[i] * &y[n + i] - &x[n + i] * &y[i]).sum())
}

/// Skew matrix `W = B J Bᵀ`, i.e. `W_ij = ω(b_i, b_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrix {
    w: RatMatrix,
    zero_row_sums: bool,
}

impl WeightMatrix {
    /// Wraps an arbitrary matrix; `None` unless it is square and skew.
    pub fn from_skew(w: RatMatrix) -> Option<Self> {
        if w.rows() != w.cols() {
            return None;
        }
        let k = w.rows();
        for i in 0..k {
            for j in 0..=i {
                if *w.get(i, j) != -w.get(j, i).clone() {
                    return None;
                }
            }
        }
        let zero_row_sums = (0..k).all(|i| w.row(i).iter().sum::<Rational>().is_zero());
        Some(WeightMatrix { w, zero_row_sums })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.w
    }

    pub fn size(&self) -> usize {
        self.w.rows()
    }

    /// `W𝟙 = 0`.
    pub fn zero_row_sums(&self) -> bool {
        self.zero_row_sums
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.w.get(i, j)
    }

    /// `β_i β_j W_ij`.
    fn weighted(&self, beta: &[Rational]) -> RatMatrix {
        let k = self.size();
        let mut a = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let v = self.w.get(i, j);
                if !v.is_zero() {
                    a.set(i, j, &beta[i] * &beta[j] * v);
                }
            }
        }
        a
    }
}

pub fn weight_matrix(p: &HPolytope) -> WeightMatrix {
    let k = p.k();
    let mut w = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let v = symplectic_form(p.normal(i), p.normal(j)).expect("rows share an even width");
            w.set(j, i, -v.clone());
            w.set(i, j, v);
        }
    }
    let zero_row_sums = p.b().row_sum().iter().all(Zero::is_zero);
    debug_assert!(!zero_row_sums || (0..k).all(|i| w.row(i).iter().sum::<Rational>().is_zero()));
    WeightMatrix { w, zero_row_sums }
}

/// A permutation of `0..k`; `as_slice()[p]` is the index placed at position
/// `p`. Displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(order: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Ordering(order))
    }

    pub fn from_one_based(order: &[usize]) -> Option<Self> {
        if order.contains(&0) {
            return None;
        }
        Self::new(order.iter().map(|i| i - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Ordering((0..k).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `rank[v]` is the position of index `v`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.0.len()];
        for (pos, &v) in self.0.iter().enumerate() {
            r[v] = pos;
        }
        r
    }

    pub fn reversed(&self) -> Self {
        Ordering(self.0.iter().rev().copied().collect())
    }

    /// Moves the first `by` entries to the end.
    pub fn rotated(&self, by: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let by = by % v.len();
            v.rotate_left(by);
        }
        Ordering(v)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `Σ_{j<i} W_{σ(i)σ(j)}`.
pub fn order_sum(w: &WeightMatrix, sigma: &Ordering) -> Rational {
    let s = sigma.as_slice();
    let mut total = Rational::zero();
    for i in 1..s.len() {
        for j in 0..i {
            total += w.get(s[i], s[j]);
        }
    }
    total
}

/// `Σ_{j<i} β_σ(i) β_σ(j) W_{σ(i)σ(j)}`.
pub fn hk_objective(w: &WeightMatrix, sigma: &Ordering, beta: &MultiplierVector) -> Rational {
    let s = sigma.as_slice();
    let b = beta.values();
    let mut total = Rational::zero();
    for i in 1..s.len() {
        for j in 0..i {
            let v = w.get(s[i], s[j]);
            if !v.is_zero() {
                total += &b[s[i]] * &b[s[j]] * v;
            }
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityResult {
    pub value: Rational,
    pub inner_max: Rational,
    pub witness: Ordering,
    pub witness_beta: MultiplierVector,
    pub exact: bool,
}

impl CapacityResult {
    fn new(inner_max: Rational, witness: Ordering, beta: MultiplierVector, exact: bool) -> Self {
        let value = (Rational::from_integer(2.into()) * &inner_max).recip();
        CapacityResult {
            value,
            inner_max,
            witness,
            witness_beta: beta,
            exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Search only orderings that start with the first facet; valid when the
    /// weighted matrix has zero row sums (always true for simplices).
    pub prune_cyclic: bool,
    pub facet_limit: usize,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune_cyclic: false,
            facet_limit: DEFAULT_EXACT_FACET_LIMIT,
            threads: None,
        }
    }
}

pub(crate) fn run_with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CapacityError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CapacityError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Exact capacity of a simplex by exhaustive search over all orderings.
///
/// The witness is the lexicographically smallest maximizing ordering, with or
/// without pruning: when every weighted row sums to zero, rotating an ordering
/// leaves the objective unchanged, so fixing the first position to facet 0
/// loses no maximizer and keeps the smallest one.
pub fn capacity_simplex(
    p: &HPolytope,
    opts: &SearchOptions,
) -> Result<CapacityResult, CapacityError> {
    let cert = polytope::certify_simplex(p)?;
    capacity_with_multiplier(p, &cert.beta, opts)
}

/// Exhaustive maximum over orderings for one fixed multiplier.
///
/// On a simplex this is the capacity; otherwise it evaluates the formula at
/// `beta` only, which is how the rank-deficient limit of a perturbed simplex
/// family is computed.
pub fn capacity_with_multiplier(
    p: &HPolytope,
    beta: &MultiplierVector,
    opts: &SearchOptions,
) -> Result<CapacityResult, CapacityError> {
    let k = p.k();
    if beta.values().len() != k {
        return Err(CapacityError::DimensionMismatch(beta.values().len(), k));
    }
    if k > opts.facet_limit {
        return Err(CapacityError::LimitExceeded {
            k,
            limit: opts.facet_limit,
        });
    }
    let w = weight_matrix(p);
    let scaled = search::Scaled::new(&w.weighted(beta.values()));
    if opts.prune_cyclic && !scaled.has_zero_row_sums() {
        return Err(CapacityError::PruningUnavailable);
    }
    let (best, order) = run_with_threads(opts.threads, || scaled.maximize(opts.prune_cyclic))?;
    if cfg!(debug_assertions) && opts.prune_cyclic && k <= 8 {
        let full = run_with_threads(opts.threads, || scaled.maximize(false))?;
        assert_eq!(
            full,
            (best.clone(), order.clone()),
            "cyclic pruning lost the optimum"
        );
    }
    let inner_max = scaled.to_rational(best);
    if !inner_max.is_positive() {
        return Err(CapacityError::InnerMaxNonpositive(inner_max));
    }
    let witness = Ordering::new(order).expect("search yields a permutation");
    debug_assert_eq!(hk_objective(&w, &witness, beta), inner_max);
    Ok(CapacityResult::new(inner_max, witness, beta.clone(), true))
}

/// `𝟙 / Σc` when the facet normals sum to zero, the multiplier shared by
/// every member of a perturbed family whose rows keep summing to zero.
pub fn uniform_multiplier(p: &HPolytope) -> Option<MultiplierVector> {
    if !weight_matrix(p).zero_row_sums() {
        return None;
    }
    let total: Rational = p.c().iter().sum();
    if !total.is_positive() {
        return None;
    }
    MultiplierVector::new(p, vec![total.recip(); p.k()])
}

/// `c_EHZ(P) ≤ γ`, compared exactly.
pub fn decide_capacity_leq(
    p: &HPolytope,
    gamma: &Rational,
    opts: &SearchOptions,
) -> Result<bool, CapacityError> {
    Ok(capacity_simplex(p, opts)?.value <= *gamma)
}

/// Advances `p` to the next permutation in lexicographic order; returns
/// false (leaving `p` untouched) once `p` is the last one.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::{frac, rat};

    fn triangle() -> HPolytope {
        HPolytope::with_unit_rhs(RatMatrix::from_ints(&[[1, 0], [0, 1], [-1, -1]])).unwrap()
    }

    /// Unperturbed block matrix of the three-by-two example tournament.
    fn example_b() -> RatMatrix {
        RatMatrix::from_ints(&[
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, -1, 0],
            [0, 0, 0, -1, 1, 0],
            [0, 0, 0, 1, 1, 0],
            [-1, -1, -1, -1, -1, 0],
        ])
    }

    fn example_w_golden() -> RatMatrix {
        RatMatrix::from_ints(&[
            [0, 0, 0, 1, -1, 1, -1],
            [0, 0, 0, -1, 1, 1, -1],
            [0, 0, 0, 0, 0, 0, 0],
            [-1, 1, 0, 0, 0, 0, 0],
            [1, -1, 0, 0, 0, 0, 0],
            [-1, -1, 0, 0, 0, 0, 2],
            [1, 1, 0, 0, 0, -2, 0],
        ])
    }

    fn example_w() -> WeightMatrix {
        WeightMatrix::from_skew(example_w_golden()).unwrap()
    }

    fn ord(one_based: &[usize]) -> Ordering {
        Ordering::from_one_based(one_based).unwrap()
    }

    #[test]
    fn symplectic_form_examples() {
        assert_eq!(
            symplectic_form(&[rat(1), rat(0)], &[rat(0), rat(1)]).unwrap(),
            rat(1)
        );
        let x = [rat(3), frac(-1, 2), rat(7), rat(2)];
        assert_eq!(symplectic_form(&x, &x).unwrap(), rat(0));
        let b = example_b();
        assert_eq!(symplectic_form(b.row(0), b.row(3)).unwrap(), rat(1));
        assert!(symplectic_form(&[rat(1)], &[rat(1)]).is_err());
        assert!(symplectic_form(&[rat(1), rat(0)], &[rat(1)]).is_err());
    }

    #[test]
    fn weight_matrix_examples() {
        let w = weight_matrix(&triangle());
        assert_eq!(
            w.matrix(),
            &RatMatrix::from_ints(&[[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
        );
        assert!(w.zero_row_sums());

        // B J Bᵀ by matrix product agrees with the pairwise definition
        let p = HPolytope::with_unit_rhs(example_b()).unwrap();
        let w = weight_matrix(&p);
        assert_eq!(w.matrix(), &example_w_golden());
        let mut j = RatMatrix::zeros(6, 6);
        for i in 0..3 {
            j.set(i, 3 + i, rat(1));
            j.set(3 + i, i, rat(-1));
        }
        let bjbt = example_b()
            .mul(&j)
            .unwrap()
            .mul(&example_b().transpose())
            .unwrap();
        assert_eq!(&bjbt, w.matrix());

        let repeated = RatMatrix::from_ints(&[[1, 2], [1, 2], [1, 2]]);
        let p = HPolytope::with_unit_rhs(repeated).unwrap();
        assert_eq!(weight_matrix(&p).matrix(), &RatMatrix::zeros(3, 3));
    }

    #[test]
    fn order_sum_examples() {
        let w = example_w();
        // direct summation of the strict lower triangle: 0 + 0 - 2 + 0
        assert_eq!(order_sum(&w, &Ordering::identity(7)), rat(-2));
        // the rank assignment x_i -> position σ(i) read as a sequence is
        // (4,2,5,1,6,7,3); its reversal puts every counted arc below the diagonal
        let ranked = ord(&[4, 2, 5, 1, 6, 7, 3]);
        assert_eq!(order_sum(&w, &ranked), rat(-4));
        assert_eq!(order_sum(&w, &ranked.reversed()), rat(4));
        assert_eq!(order_sum(&w, &ord(&[4, 2, 7, 1, 3, 5, 6])), rat(0));
        let one = WeightMatrix::from_skew(RatMatrix::zeros(1, 1)).unwrap();
        assert_eq!(order_sum(&one, &Ordering::identity(1)), rat(0));
    }

    #[test]
    fn hk_objective_examples() {
        let w = example_w();
        let p = HPolytope::with_unit_rhs(example_b()).unwrap();
        let beta = uniform_multiplier(&p).unwrap();
        assert_eq!(beta.values(), &vec![frac(1, 7); 7][..]);
        let best = ord(&[4, 2, 5, 1, 6, 7, 3]).reversed();
        assert_eq!(hk_objective(&w, &best, &beta), frac(4, 49));

        let t = triangle();
        let wt = weight_matrix(&t);
        let beta = polytope::certify_simplex(&t).unwrap().beta;
        assert_eq!(hk_objective(&wt, &ord(&[1, 3, 2]), &beta), frac(1, 9));

        let square =
            HPolytope::with_unit_rhs(RatMatrix::from_ints(&[[1, 0], [-1, 0], [0, 1], [0, -1]]))
                .unwrap();
        let corner =
            MultiplierVector::new(&square, vec![frac(1, 2), frac(1, 2), rat(0), rat(0)]).unwrap();
        let ws = weight_matrix(&square);
        for o in [ord(&[1, 2, 3, 4]), ord(&[3, 1, 4, 2])] {
            assert_eq!(hk_objective(&ws, &o, &corner), rat(0));
        }
    }

    #[test]
    fn triangle_capacity() {
        let r = capacity_simplex(&triangle(), &SearchOptions::default()).unwrap();
        assert_eq!(r.value, frac(9, 2));
        assert_eq!(r.inner_max, frac(1, 9));
        assert_eq!(r.witness, ord(&[1, 3, 2]));
        assert!(r.exact);
    }

    #[test]
    fn example_capacity_pruned_and_unpruned() {
        let p = HPolytope::with_unit_rhs(example_b()).unwrap();
        // the unperturbed normals have rank 5, so only the limiting multiplier applies
        assert!(matches!(
            capacity_simplex(&p, &SearchOptions::default()),
            Err(CapacityError::Polytope(PolytopeError::NotSimplex(_)))
        ));
        let beta = uniform_multiplier(&p).unwrap();
        let full = capacity_with_multiplier(&p, &beta, &SearchOptions::default()).unwrap();
        assert_eq!(full.inner_max, frac(4, 49));
        assert_eq!(full.value, frac(49, 8));
        assert_eq!(full.witness, ord(&[1, 3, 5, 2, 4, 7, 6]));
        let pruned = capacity_with_multiplier(
            &p,
            &beta,
            &SearchOptions {
                prune_cyclic: true,
                threads: Some(3),
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(pruned, full);
        let w = weight_matrix(&p);
        assert_eq!(order_sum(&w, &full.witness), rat(4));
    }

    #[test]
    fn uniform_multiplier_requires_zero_row_sums() {
        let p =
            HPolytope::with_unit_rhs(RatMatrix::from_ints(&[[1, 0], [0, 1], [-1, -2]])).unwrap();
        assert!(uniform_multiplier(&p).is_none());
        assert_eq!(
            uniform_multiplier(&triangle()).unwrap().values(),
            &vec![frac(1, 3); 3][..]
        );
    }

    #[test]
    fn decisions() {
        let opts = SearchOptions::default();
        assert!(decide_capacity_leq(&triangle(), &frac(9, 2), &opts).unwrap());
        assert!(!decide_capacity_leq(&triangle(), &frac(22, 5), &opts).unwrap());
        assert!(!decide_capacity_leq(&triangle(), &rat(-1), &opts).unwrap());
    }

    #[test]
    fn doubling_rhs_scales_capacity_by_four() {
        let t = triangle();
        let doubled = HPolytope::new(t.b().clone(), vec![rat(2); 3]).unwrap();
        let a = capacity_simplex(&t, &SearchOptions::default()).unwrap();
        let b = capacity_simplex(&doubled, &SearchOptions::default()).unwrap();
        assert_eq!(b.inner_max, &a.inner_max / rat(4));
        assert_eq!(b.value, &a.value * rat(4));
    }

    #[test]
    fn weighted_simplex_prunes_without_zero_row_sums() {
        // kernel (1,2,1): rows of B do not sum to zero, but W β = 0
        let p =
            HPolytope::with_unit_rhs(RatMatrix::from_ints(&[[1, 0], [0, 1], [-1, -2]])).unwrap();
        assert!(!weight_matrix(&p).zero_row_sums());
        let pruned = SearchOptions {
            prune_cyclic: true,
            ..SearchOptions::default()
        };
        assert_eq!(
            capacity_simplex(&p, &pruned).unwrap(),
            capacity_simplex(&p, &SearchOptions::default()).unwrap()
        );
    }

    #[test]
    fn limit_and_nonsimplex_errors() {
        let opts = SearchOptions {
            facet_limit: 2,
            ..SearchOptions::default()
        };
        assert!(matches!(
            capacity_simplex(&triangle(), &opts),
            Err(CapacityError::LimitExceeded { k: 3, limit: 2 })
        ));
        let bad =
            HPolytope::with_unit_rhs(RatMatrix::from_ints(&[[1, 0], [0, 1], [1, 1]])).unwrap();
        assert!(matches!(
            capacity_simplex(&bad, &SearchOptions::default()),
            Err(CapacityError::Polytope(
                PolytopeError::NoFeasibleMultiplier(_)
            ))
        ));
    }

    #[test]
    fn ordering_validation() {
        assert!(Ordering::new(vec![0, 0]).is_none());
        assert!(Ordering::new(vec![0, 2]).is_none());
        assert!(Ordering::from_one_based(&[0, 1]).is_none());
        assert_eq!(ord(&[2, 3, 1]).ranks(), vec![2, 0, 1]);
        assert_eq!(ord(&[2, 3, 1]).to_string(), "(2,3,1)");
        assert_eq!(ord(&[1, 2, 3]).rotated(1), ord(&[2, 3, 1]));
    }
}
