//! Feedback arc sets in bipartite tournaments via the capacity of a simplex.
//!
//! A tournament with `|U| = n ≥ m = |V|` becomes the sign matrix `S`, which
//! is perturbed to full rank and embedded in the block matrix
//!
//! ```text
//!       [  I_n     0    ]
//!   B̃ = [   0      S̃    ]
//!       [ -𝟙ᵀ   -𝟙ᵀ S̃  ]
//! ```
//!
//! whose rows sum to zero, so `P(B̃, 𝟙)` is a simplex with `β = 𝟙/(2n+1)`.
//! The nonnegative part of the unperturbed weight matrix is the adjacency
//! matrix of an auxiliary graph: the reversed tournament with `n − m`
//! padding vertices and one extra vertex. Its maximum acyclic subgraph is
//! recovered from the capacity and, after the extra vertex is eliminated,
//! gives the feedback arc set of the tournament.

use num::{BigInt, One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::capacity::search::Scaled;
use crate::capacity::{
    self, next_permutation, CapacityError, CapacityResult, Ordering, SearchOptions, WeightMatrix,
};
use crate::digraph::{
    self, ArcFamily, BipartiteTournament, DirectedMultigraph, Elimination, GraphError,
};
use crate::polytope::{self, HPolytope, PolytopeError};
use crate::ratlinalg::{self, LinalgError, RatMatrix, Rational};

pub const DEFAULT_MAX_N: usize = 5;
pub const DEFAULT_ROUNDING_FULL_LIMIT: usize = 7;
pub const DEFAULT_ROUNDING_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEpsilon(Rational),
    #[error("perturbed matrix has rank {rank}, expected {n}")]
    RankNotRestored { rank: usize, n: usize },
    #[error("unperturbed weight matrix has a non-integer entry {0}")]
    NonIntegerW(Rational),
    #[error("rounded maximum {rounded_max} plus delta {delta} is odd")]
    ParityViolation { rounded_max: i64, delta: i64 },
    #[error("rounding identity fails at ordering {ordering} for epsilon {epsilon}")]
    RoundingIdentityFailed {
        ordering: Ordering,
        epsilon: Rational,
    },
    #[error("certificate has {certificate} arcs, formula gives {formula}")]
    CertificateMismatch { formula: i64, certificate: u64 },
    #[error("n = {n} exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("value {0} does not fit in 64 bits")]
    Overflow(BigInt),
}

/// `S_ij = +1` if `u_i → v_j`, `−1` if `v_j → u_i`, `0` for padding columns
/// `j ≥ m`.
pub fn build_s(t: &BipartiteTournament) -> RatMatrix {
    let n = t.n();
    let mut s = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..t.m() {
            s.set(i, j, Rational::from_integer(t.orientation(i, j).into()));
        }
    }
    s
}

/// Keeps a greedy row basis of `S` and moves each remaining row off the row
/// space by `ε` times its own complement direction.
pub fn perturb(s: &RatMatrix, epsilon: &Rational) -> Result<RatMatrix, ReductionError> {
    if !epsilon.is_positive() {
        return Err(ReductionError::NonpositiveEpsilon(epsilon.clone()));
    }
    let n = s.rows();
    let basis = ratlinalg::select_row_basis(s);
    let basis_rows: Vec<_> = basis.iter().map(|&i| s.row(i).to_vec()).collect();
    let complement = ratlinalg::orth_complement_basis(&basis_rows, s.cols())?;
    let mut out = s.clone();
    let others = (0..n).filter(|i| !basis.contains(i));
    for (i, t) in others.zip(&complement) {
        for (j, tj) in t.iter().enumerate() {
            let v = s.get(i, j) + epsilon * tj;
            out.set(i, j, v);
        }
    }
    let rank = ratlinalg::rank(&out);
    if rank != n {
        return Err(ReductionError::RankNotRestored { rank, n });
    }
    Ok(out)
}

/// `1 / n⁴`.
pub fn default_epsilon(n: usize) -> Rational {
    let n = BigInt::from(n);
    Rational::new(BigInt::one(), &n * &n * &n * &n)
}

/// The `(2n+1) × 2n` block matrix built from an `n × n` matrix.
pub fn block_matrix(s: &RatMatrix) -> RatMatrix {
    let n = s.rows();
    let mut b = RatMatrix::zeros(2 * n + 1, 2 * n);
    for i in 0..n {
        b.set(i, i, Rational::one());
        for j in 0..n {
            b.set(n + i, n + j, s.get(i, j).clone());
        }
    }
    let last = 2 * n;
    for j in 0..n {
        b.set(last, j, -Rational::one());
        let col: Rational = (0..n).map(|i| s.get(i, j)).sum();
        b.set(last, n + j, -col);
    }
    b
}

/// `P(B̃, 𝟙)` for a full-rank `S̃`.
pub fn build_simplex(s_tilde: &RatMatrix) -> Result<HPolytope, ReductionError> {
    let p = HPolytope::with_unit_rhs(block_matrix(s_tilde))?;
    polytope::certify_simplex(&p)?;
    Ok(p)
}

/// Auxiliary graph `D̃` with adjacency `M = max(0, W)` and its constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Auxiliary {
    pub graph: DirectedMultigraph,
    /// `|Ã|`.
    pub total_arcs: u64,
    /// Lower-triangular sum of `M + Mᵀ`, the same for every ordering.
    pub delta: u64,
    /// Arcs leaving the extra vertex `x_{2n+1}`.
    pub extra_outdeg: u64,
}

pub fn build_auxiliary(w: &WeightMatrix) -> Result<Auxiliary, ReductionError> {
    let k = w.size();
    let mut graph = DirectedMultigraph::empty(k);
    for i in 0..k {
        for j in 0..k {
            let x = w.get(i, j);
            if !x.is_integer() {
                return Err(ReductionError::NonIntegerW(x.clone()));
            }
            if x.is_positive() {
                let c = x
                    .to_integer()
                    .to_u32()
                    .ok_or_else(|| ReductionError::Overflow(x.to_integer()))?;
                graph.set_arcs(i, j, c);
            }
        }
    }
    let total_arcs = graph.total_arcs();
    // M + Mᵀ is symmetric with zero diagonal: its strict lower triangle holds
    // every arc exactly once
    let delta = (0..k)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| u64::from(graph.arcs(i, j)) + u64::from(graph.arcs(j, i)))
        .sum();
    let extra_outdeg = if k == 0 { 0 } else { graph.out_degree(k - 1) };
    Ok(Auxiliary {
        graph,
        total_arcs,
        delta,
        extra_outdeg,
    })
}

/// `⌊x + ½⌋`.
pub fn rounding_bridge(x: &Rational) -> BigInt {
    ratlinalg::floor_to_int(&(x + Rational::new(BigInt::one(), BigInt::from(2))))
}

/// `|Ã| − ½(rounded_max + Δ) − |δ_out(x_{2n+1})|`.
pub fn master_formula(
    total_arcs: i64,
    rounded_max: i64,
    delta: i64,
    extra_outdeg: i64,
) -> Result<i64, ReductionError> {
    let sum = rounded_max + delta;
    if sum % 2 != 0 {
        return Err(ReductionError::ParityViolation { rounded_max, delta });
    }
    Ok(total_arcs - sum / 2 - extra_outdeg)
}

/// All intermediate objects of the reduction for one tournament.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionBundle {
    pub tournament: BipartiteTournament,
    pub s: RatMatrix,
    pub epsilon: Rational,
    pub s_tilde: RatMatrix,
    pub b_tilde: RatMatrix,
    pub simplex: HPolytope,
    /// From the unperturbed block matrix.
    pub w: WeightMatrix,
    /// From `B̃`.
    pub w_tilde: WeightMatrix,
    pub aux: Auxiliary,
}

impl ReductionBundle {
    pub fn new(t: &BipartiteTournament, epsilon: Rational) -> Result<Self, ReductionError> {
        let s = build_s(t);
        let s_tilde = perturb(&s, &epsilon)?;
        let simplex = build_simplex(&s_tilde)?;
        let b_tilde = simplex.b().clone();
        let w_tilde = capacity::weight_matrix(&simplex);
        // B itself may not describe a simplex, so W comes straight from ω
        let w = weight_from_rows(&block_matrix(&s));
        let aux = build_auxiliary(&w)?;
        Ok(ReductionBundle {
            tournament: t.clone(),
            s,
            epsilon,
            s_tilde,
            b_tilde,
            simplex,
            w,
            w_tilde,
            aux,
        })
    }

    pub fn n(&self) -> usize {
        self.tournament.n()
    }

    /// Index of `x_{2n+1}` in the auxiliary graph.
    pub fn extra_vertex(&self) -> usize {
        2 * self.n()
    }

    /// Tournament vertex (as numbered by
    /// [`BipartiteTournament::to_digraph`]) identified with auxiliary vertex
    /// `x`; `None` for padding and the extra vertex.
    pub fn tournament_vertex(&self, x: usize) -> Option<usize> {
        let (n, m) = (self.tournament.n(), self.tournament.m());
        if x < m {
            Some(self.tournament.v_vertex(x))
        } else if (n..2 * n).contains(&x) {
            Some(self.tournament.u_vertex(x - n))
        } else {
            None
        }
    }
}

fn weight_from_rows(b: &RatMatrix) -> WeightMatrix {
    let k = b.rows();
    let mut w = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            w.set(
                i,
                j,
                capacity::symplectic_form(b.row(i), b.row(j)).expect("even width"),
            );
        }
    }
    WeightMatrix::from_skew(w).expect("ω is skew")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundingReport {
    pub checked: u64,
    pub exhaustive: bool,
    pub first_violation: Option<Ordering>,
}

impl RoundingReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `⌊Σ_{j<i} W̃_{σ(i)σ(j)} + ½⌋ = Σ_{j<i} W_{σ(i)σ(j)}` for every σ
/// when `k ≤ full_limit`, otherwise for `samples` seeded random orderings.
pub fn verify_rounding_identity(
    bundle: &ReductionBundle,
    full_limit: usize,
    samples: usize,
    seed: u64,
) -> RoundingReport {
    let k = bundle.w.size();
    let mut diff = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            diff.set(i, j, bundle.w_tilde.get(i, j) - bundle.w.get(i, j));
        }
    }
    // the identity at σ says −½ ≤ (W̃ − W)(σ) < ½, i.e. −L ≤ 2·scaled < L
    let scaled = Scaled::new(&diff);
    let limit = scaled.scale.clone();
    let violates = |order: &[usize]| {
        let twice = scaled.order_value(order) * 2;
        twice < -limit.clone() || twice >= limit
    };
    let mut checked = 0u64;
    let mut order: Vec<usize> = (0..k).collect();
    if k <= full_limit {
        loop {
            checked += 1;
            if violates(&order) {
                return RoundingReport {
                    checked,
                    exhaustive: true,
                    first_violation: Ordering::new(order),
                };
            }
            if !next_permutation(&mut order) {
                break;
            }
        }
        return RoundingReport {
            checked,
            exhaustive: true,
            first_violation: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        order.shuffle(&mut rng);
        checked += 1;
        if violates(&order) {
            return RoundingReport {
                checked,
                exhaustive: false,
                first_violation: Ordering::new(order),
            };
        }
    }
    RoundingReport {
        checked,
        exhaustive: false,
        first_violation: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOptions {
    /// Defaults to `1/n⁴`.
    pub epsilon: Option<Rational>,
    pub search: SearchOptions,
    pub max_n: usize,
    pub rounding_full_limit: usize,
    pub rounding_samples: usize,
    pub seed: u64,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            epsilon: None,
            search: SearchOptions {
                prune_cyclic: true,
                ..SearchOptions::default()
            },
            max_n: DEFAULT_MAX_N,
            rounding_full_limit: DEFAULT_ROUNDING_FULL_LIMIT,
            rounding_samples: DEFAULT_ROUNDING_SAMPLES,
            seed: 0,
        }
    }
}

/// Everything produced by one run of the pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FasSolution {
    pub count: u64,
    /// Feedback arc set of the tournament digraph.
    pub certificate: ArcFamily,
    pub bundle: ReductionBundle,
    pub capacity: CapacityResult,
    pub rounded_max: i64,
    pub rounding: RoundingReport,
    /// Backward arcs of `D̃` under the capacity witness.
    pub acyclic_family: ArcFamily,
    pub elimination: Elimination,
}

fn to_i64(x: BigInt) -> Result<i64, ReductionError> {
    x.to_i64().ok_or(ReductionError::Overflow(x))
}

fn count_i64(x: u64) -> Result<i64, ReductionError> {
    i64::try_from(x).map_err(|_| ReductionError::Overflow(BigInt::from(x)))
}

/// Minimum feedback arc set of a bipartite tournament, read off the exact
/// capacity of `P(B̃, 𝟙)`, with an explicit certificate recovered from the
/// capacity witness.
pub fn solve_fas_via_capacity(
    t: &BipartiteTournament,
    opts: &ReductionOptions,
) -> Result<FasSolution, ReductionError> {
    let n = t.n();
    if n > opts.max_n {
        return Err(ReductionError::TooLarge {
            n,
            limit: opts.max_n,
        });
    }
    let epsilon = opts.epsilon.clone().unwrap_or_else(|| default_epsilon(n));
    let bundle = ReductionBundle::new(t, epsilon)?;
    let rounding = verify_rounding_identity(
        &bundle,
        opts.rounding_full_limit,
        opts.rounding_samples,
        opts.seed,
    );
    if let Some(ordering) = &rounding.first_violation {
        return Err(ReductionError::RoundingIdentityFailed {
            ordering: ordering.clone(),
            epsilon: bundle.epsilon.clone(),
        });
    }

    let cap = capacity::capacity_simplex(&bundle.simplex, &opts.search)?;
    let k = BigInt::from(2 * n + 1);
    let scaled_max =
        Rational::from_integer(&k * &k) / (Rational::from_integer(BigInt::from(2)) * &cap.value);
    let rounded_max = to_i64(rounding_bridge(&scaled_max))?;
    let aux = &bundle.aux;
    let formula = master_formula(
        count_i64(aux.total_arcs)?,
        rounded_max,
        count_i64(aux.delta)?,
        count_i64(aux.extra_outdeg)?,
    )?;

    // certificate: witness -> maximum acyclic family of D̃ -> eliminate the
    // extra vertex -> reverse back onto the tournament
    let acyclic_family = digraph::backward_family(&aux.graph, &cap.witness);
    let elimination =
        digraph::eliminate_extra_vertex(&aux.graph, &acyclic_family, bundle.extra_vertex())?;
    let d = t.to_digraph();
    let mut kept = DirectedMultigraph::empty(d.vertex_count());
    for (a, b, c) in elimination.family.graph().arc_list() {
        if a == bundle.extra_vertex() {
            continue;
        }
        let (Some(ta), Some(tb)) = (bundle.tournament_vertex(a), bundle.tournament_vertex(b))
        else {
            unreachable!("padding vertices are isolated and the extra vertex has no in-arcs");
        };
        kept.set_arcs(tb, ta, c);
    }
    let kept = ArcFamily::new_within(&d, kept)?;
    let certificate = kept.complement_in(&d);
    if !digraph::is_acyclic(kept.graph()) || count_i64(certificate.len())? != formula {
        return Err(ReductionError::CertificateMismatch {
            formula,
            certificate: certificate.len(),
        });
    }
    Ok(FasSolution {
        count: certificate.len(),
        certificate,
        bundle,
        capacity: cap,
        rounded_max,
        rounding,
        acyclic_family,
        elimination,
    })
}
