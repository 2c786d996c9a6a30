//! Polytopes `P(B, c) = {x : Bx ≤ c}` in even dimension and the multiplier
//! set `Q = {β ≥ 0 : βᵀB = 0, βᵀc = 1}` over which the capacity objective is
//! maximized.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::ratlinalg::{self, RatMatrix, RatVector, Rational};

pub const DEFAULT_VERTEX_FACET_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("ambient dimension {0} is odd")]
    OddDimension(usize),
    #[error("{k} facets is too few for dimension {dim}; need at least {}", dim + 1)]
    TooFewFacets { k: usize, dim: usize },
    #[error("right-hand side has length {found}, expected {expected}")]
    RhsLength { expected: usize, found: usize },
    #[error("not a simplex: {0}")]
    NotSimplex(String),
    #[error("no feasible multiplier: {0}")]
    NoFeasibleMultiplier(String),
    #[error("multiplier enumeration over {k} facets exceeds the limit of {limit}")]
    LimitExceeded { k: usize, limit: usize },
    #[error("the multiplier set is empty")]
    EmptyFeasibleSet,
}

/// Inequality description `Bx ≤ c` with `B` of size `k × 2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    b: RatMatrix,
    c: RatVector,
}

impl HPolytope {
    pub fn new(b: RatMatrix, c: RatVector) -> Result<Self, PolytopeError> {
        let dim = b.cols();
        if !dim.is_multiple_of(2) {
            return Err(PolytopeError::OddDimension(dim));
        }
        if c.len() != b.rows() {
            return Err(PolytopeError::RhsLength {
                expected: b.rows(),
                found: c.len(),
            });
        }
        if b.rows() < dim + 1 {
            return Err(PolytopeError::TooFewFacets { k: b.rows(), dim });
        }
        Ok(HPolytope { b, c })
    }

    /// `P(B, 𝟙)`.
    pub fn with_unit_rhs(b: RatMatrix) -> Result<Self, PolytopeError> {
        let c = vec![Rational::one(); b.rows()];
        Self::new(b, c)
    }

    pub fn b(&self) -> &RatMatrix {
        &self.b
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// Half of the ambient dimension.
    pub fn n(&self) -> usize {
        self.b.cols() / 2
    }

    /// Number of inequalities.
    pub fn k(&self) -> usize {
        self.b.rows()
    }

    pub fn normal(&self, i: usize) -> &[Rational] {
        self.b.row(i)
    }
}

/// A point of the multiplier set `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiplierVector(RatVector);

impl MultiplierVector {
    /// Checks `β ≥ 0`, `βᵀc = 1` and `βᵀB = 0` exactly.
    pub fn new(p: &HPolytope, beta: RatVector) -> Option<Self> {
        if beta.len() != p.k() || beta.iter().any(Signed::is_negative) {
            return None;
        }
        if ratlinalg::dot(&beta, p.c()) != Rational::one() {
            return None;
        }
        let combo = p.b().left_mul_vec(&beta).ok()?;
        if !combo.iter().all(Zero::is_zero) {
            return None;
        }
        Some(MultiplierVector(beta))
    }

    /// Skips validation; for callers that built `beta` from a certified
    /// solve.
    pub(crate) fn new_unchecked(beta: RatVector) -> Self {
        MultiplierVector(beta)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|&i| !self.0[i].is_zero())
            .collect()
    }

    /// Componentwise mean of two multipliers (still in `Q`, which is convex).
    pub fn midpoint(&self, other: &MultiplierVector) -> MultiplierVector {
        let half = Rational::new(1.into(), 2.into());
        MultiplierVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a + b) * &half)
                .collect(),
        )
    }
}

/// Proof that `P` is a simplex, together with its unique multiplier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexCertificate {
    pub kernel_generator: RatVector,
    pub beta: MultiplierVector,
}

/// Certifies that `P` has `2n + 1` facets whose normals span `ℝ²ⁿ` with a
/// one-dimensional, sign-definite left kernel, and returns the multiplier.
pub fn certify_simplex(p: &HPolytope) -> Result<SimplexCertificate, PolytopeError> {
    let dim = 2 * p.n();
    if p.k() != dim + 1 {
        return Err(PolytopeError::NotSimplex(format!(
            "{} facets, expected {}",
            p.k(),
            dim + 1
        )));
    }
    let r = ratlinalg::rank(p.b());
    if r != dim {
        return Err(PolytopeError::NotSimplex(format!(
            "normals have rank {r}, expected {dim}"
        )));
    }
    let mut kernel = ratlinalg::left_kernel(p.b());
    debug_assert_eq!(kernel.len(), 1);
    let generator = kernel
        .pop()
        .expect("rank 2n leaves a one-dimensional kernel");
    let scale = ratlinalg::dot(&generator, p.c());
    if scale.is_zero() {
        return Err(PolytopeError::NoFeasibleMultiplier(
            "kernel generator is orthogonal to c".into(),
        ));
    }
    let beta: RatVector = generator.iter().map(|g| g / &scale).collect();
    if beta.iter().any(Signed::is_negative) {
        return Err(PolytopeError::NoFeasibleMultiplier(
            "kernel generator has mixed signs".into(),
        ));
    }
    Ok(SimplexCertificate {
        kernel_generator: generator,
        beta: MultiplierVector::new_unchecked(beta),
    })
}

/// All vertices of `Q`, found as basic solutions over supports of size at
/// most `2n + 1`, ordered lexicographically by support.
pub fn multiplier_vertices(
    p: &HPolytope,
    facet_limit: usize,
) -> Result<Vec<MultiplierVector>, PolytopeError> {
    let k = p.k();
    if k > facet_limit {
        return Err(PolytopeError::LimitExceeded {
            k,
            limit: facet_limit,
        });
    }
    // constraint rows: Bᵀ β = 0 and cᵀ β = 1
    let dim = p.b().cols();
    let mut constraints = RatMatrix::zeros(dim + 1, k);
    for i in 0..k {
        for j in 0..dim {
            constraints.set(j, i, p.b().get(i, j).clone());
        }
        constraints.set(dim, i, p.c()[i].clone());
    }
    let mut rhs = vec![Rational::zero(); dim + 1];
    rhs[dim] = Rational::one();

    let max_support = (dim + 1).min(k);
    let mut found: Vec<(Vec<usize>, MultiplierVector)> = Vec::new();
    for size in 1..=max_support {
        for support in combinations(k, size) {
            let sub = constraints.select_cols(&support);
            let Some(x) = ratlinalg::solve_full_column_rank(&sub, &rhs) else {
                continue;
            };
            // strictly positive on the support, so each vertex is met once
            if !x.iter().all(Signed::is_positive) {
                continue;
            }
            let mut beta = vec![Rational::zero(); k];
            for (&i, v) in support.iter().zip(x) {
                beta[i] = v;
            }
            found.push((support, MultiplierVector::new_unchecked(beta)));
        }
    }
    if found.is_empty() {
        return Err(PolytopeError::EmptyFeasibleSet);
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.dedup_by(|a, b| a.1 == b.1);
    Ok(found.into_iter().map(|(_, v)| v).collect())
}

/// True iff the normals positively span: they have full rank and every
/// facet index lies in the support of some vertex of `Q`, so `Q` has a
/// strictly positive point.
pub fn is_bounded_certified(p: &HPolytope, facet_limit: usize) -> Result<bool, PolytopeError> {
    if ratlinalg::rank(p.b()) < p.b().cols() {
        return Ok(false);
    }
    let vertices = multiplier_vertices(p, facet_limit)?;
    let mut covered = vec![false; p.k()];
    for v in &vertices {
        for i in v.support() {
            covered[i] = true;
        }
    }
    Ok(covered.into_iter().all(|c| c))
}

/// `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if size <= n {
        Some((0..size).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let mut c = out.clone();
            let mut i = size;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - size + i {
                    c[i] += 1;
                    for j in i + 1..size {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(c);
                }
            }
        };
        current = next;
        Some(out)
    })
}
