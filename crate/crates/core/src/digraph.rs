//! Directed multigraphs as adjacency-count matrices, bipartite tournaments,
//! and exact feedback-arc-set / maximum-acyclic-subgraph oracles.
//!
//! Orderings follow the lower-triangular convention of the capacity
//! objective: under an ordering, the arcs that count toward an acyclic
//! subgraph are those pointing from a later vertex to an earlier one.

use std::collections::VecDeque;

use thiserror::Error;

use crate::capacity::Ordering;

pub const MAX_ORACLE_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("adjacency matrix row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("loop arc at vertex {0}")]
    LoopArc(usize),
    #[error("{v} vertices exceeds the exact oracle limit of {limit}")]
    TooManyVertices { v: usize, limit: usize },
    #[error("graph has a directed circuit")]
    HasCycle,
    #[error("arc family is not contained in its host graph")]
    NotWithinHost,
    #[error("total arc multiplicity does not fit in 32 bits")]
    ArcCountOverflow,
    #[error("invalid bipartite tournament: {0}")]
    InvalidTournament(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectedMultigraph {
    v: usize,
    adj: Vec<u32>,
}

impl DirectedMultigraph {
    pub fn empty(v: usize) -> Self {
        DirectedMultigraph {
            v,
            adj: vec![0; v * v],
        }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self, GraphError> {
        let v = rows.len();
        let mut g = Self::empty(v);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(GraphError::NotSquare {
                    row: i,
                    expected: v,
                    found: row.len(),
                });
            }
            if row[i] != 0 {
                return Err(GraphError::LoopArc(i));
            }
            g.adj[i * v..(i + 1) * v].copy_from_slice(row);
        }
        Ok(g)
    }

    /// Builds a graph from `(tail, head)` pairs; repeats add multiplicity.
    pub fn from_arcs(v: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(v);
        for &(a, b) in arcs {
            if a == b {
                return Err(GraphError::LoopArc(a));
            }
            g.adj[a * v + b] += 1;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    /// Number of arcs `i → j`.
    pub fn arcs(&self, i: usize, j: usize) -> u32 {
        self.adj[i * self.v + j]
    }

    pub fn set_arcs(&mut self, i: usize, j: usize, count: u32) {
        assert!(i != j || count == 0, "loop arc at vertex {i}");
        self.adj[i * self.v + j] = count;
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.adj
            .chunks(self.v.max(1))
            .take(self.v)
            .map(<[u32]>::to_vec)
            .collect()
    }

    /// Total arc count with multiplicity.
    pub fn total_arcs(&self) -> u64 {
        self.adj.iter().map(|&x| u64::from(x)).sum()
    }

    /// `(tail, head, multiplicity)` for every nonzero entry, row-major.
    pub fn arc_list(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.v {
            for j in 0..self.v {
                let c = self.arcs(i, j);
                if c > 0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    pub fn reverse(&self) -> Self {
        let mut r = Self::empty(self.v);
        for i in 0..self.v {
            for j in 0..self.v {
                r.adj[j * self.v + i] = self.arcs(i, j);
            }
        }
        r
    }

    pub fn out_degree(&self, i: usize) -> u64 {
        (0..self.v).map(|j| u64::from(self.arcs(i, j))).sum()
    }

    pub fn in_degree(&self, i: usize) -> u64 {
        (0..self.v).map(|j| u64::from(self.arcs(j, i))).sum()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.out_degree(i) == 0 && self.in_degree(i) == 0
    }

    /// Removes every arc at `x`, keeping the vertex.
    pub fn without_arcs_at(&self, x: usize) -> Self {
        let mut g = self.clone();
        for j in 0..self.v {
            g.adj[x * self.v + j] = 0;
            g.adj[j * self.v + x] = 0;
        }
        g
    }

    /// Entry `(i, j)` is `adj[σ(i)][σ(j)]`.
    pub fn permuted(&self, sigma: &Ordering) -> Vec<Vec<u32>> {
        let s = sigma.as_slice();
        s.iter()
            .map(|&a| s.iter().map(|&b| self.arcs(a, b)).collect())
            .collect()
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.v).filter(move |&j| self.arcs(i, j) > 0)
    }
}

/// Orientation of the complete bipartite graph between `U = {u_1..u_n}` and
/// `V = {v_1..v_m}`. `+1` at `(i, j)` means `u_i → v_j`, `-1` means
/// `v_j → u_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteTournament {
    n: usize,
    m: usize,
    orient: Vec<i8>,
}

impl BipartiteTournament {
    pub fn new(n: usize, m: usize, orient: Vec<Vec<i8>>) -> Result<Self, GraphError> {
        if m == 0 || n < m {
            return Err(GraphError::InvalidTournament(format!(
                "need n >= m >= 1, got n = {n}, m = {m}"
            )));
        }
        if orient.len() != n || orient.iter().any(|r| r.len() != m) {
            return Err(GraphError::InvalidTournament(format!(
                "orientation must be {n} rows of {m} entries"
            )));
        }
        let flat: Vec<i8> = orient.into_iter().flatten().collect();
        if let Some(bad) = flat.iter().find(|&&x| x != 1 && x != -1) {
            return Err(GraphError::InvalidTournament(format!(
                "orientation entry {bad} is not +1 or -1"
            )));
        }
        Ok(BipartiteTournament { n, m, orient: flat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn orientation(&self, i: usize, j: usize) -> i8 {
        self.orient[i * self.m + j]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        self.orient.chunks(self.m).map(<[i8]>::to_vec).collect()
    }

    /// Vertex index of `u_i` in [`to_digraph`](Self::to_digraph).
    pub fn u_vertex(&self, i: usize) -> usize {
        i
    }

    /// Vertex index of `v_j` in [`to_digraph`](Self::to_digraph).
    pub fn v_vertex(&self, j: usize) -> usize {
        self.n + j
    }

    /// The tournament on `n + m` vertices, `u_1..u_n` then `v_1..v_m`.
    pub fn to_digraph(&self) -> DirectedMultigraph {
        let mut g = DirectedMultigraph::empty(self.n + self.m);
        for i in 0..self.n {
            for j in 0..self.m {
                let (a, b) = if self.orientation(i, j) > 0 {
                    (self.u_vertex(i), self.v_vertex(j))
                } else {
                    (self.v_vertex(j), self.u_vertex(i))
                };
                g.set_arcs(a, b, 1);
            }
        }
        g
    }
}

/// A sub-multiset of a host graph's arcs, stored as counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcFamily {
    counts: DirectedMultigraph,
}

impl ArcFamily {
    pub fn new_within(
        host: &DirectedMultigraph,
        counts: DirectedMultigraph,
    ) -> Result<Self, GraphError> {
        if counts.v != host.v || counts.adj.iter().zip(&host.adj).any(|(c, h)| c > h) {
            return Err(GraphError::NotWithinHost);
        }
        Ok(ArcFamily { counts })
    }

    pub fn empty(v: usize) -> Self {
        ArcFamily {
            counts: DirectedMultigraph::empty(v),
        }
    }

    pub fn full(host: &DirectedMultigraph) -> Self {
        ArcFamily {
            counts: host.clone(),
        }
    }

    pub fn graph(&self) -> &DirectedMultigraph {
        &self.counts
    }

    pub fn len(&self) -> u64 {
        self.counts.total_arcs()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_within(&self, host: &DirectedMultigraph) -> bool {
        self.counts.v == host.v && self.counts.adj.iter().zip(&host.adj).all(|(c, h)| c <= h)
    }

    /// `host` minus this family.
    pub fn complement_in(&self, host: &DirectedMultigraph) -> ArcFamily {
        let mut g = host.clone();
        for (x, c) in g.adj.iter_mut().zip(&self.counts.adj) {
            *x -= c;
        }
        ArcFamily { counts: g }
    }
}

/// Kahn's algorithm; multiplicities do not matter.
pub fn is_acyclic(g: &DirectedMultigraph) -> bool {
    topological_order(g).is_ok()
}

/// Topological ordering that always emits the smallest available vertex.
pub fn topological_order(g: &DirectedMultigraph) -> Result<Ordering, GraphError> {
    let v = g.vertex_count();
    let mut indeg: Vec<usize> = (0..v)
        .map(|i| (0..v).filter(|&j| g.arcs(j, i) > 0).count())
        .collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..v).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(v);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for j in g.successors(i) {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() < v {
        return Err(GraphError::HasCycle);
    }
    Ok(Ordering::new(order).expect("Kahn emits each vertex once"))
}

/// `Σ_{j<i} adj[σ(i)][σ(j)]`: the arcs pointing backward under σ, which always
/// form an acyclic family.
pub fn backward_arc_count(g: &DirectedMultigraph, sigma: &Ordering) -> u64 {
    let s = sigma.as_slice();
    let mut total = 0u64;
    for i in 1..s.len() {
        for j in 0..i {
            total += u64::from(g.arcs(s[i], s[j]));
        }
    }
    total
}

/// The backward arcs under σ as a family.
pub fn backward_family(g: &DirectedMultigraph, sigma: &Ordering) -> ArcFamily {
    let rank = sigma.ranks();
    let mut counts = DirectedMultigraph::empty(g.vertex_count());
    for (a, b, c) in g.arc_list() {
        if rank[a] > rank[b] {
            counts.set_arcs(a, b, c);
        }
    }
    ArcFamily { counts }
}

/// Exact maximum acyclic subfamily size and the lexicographically smallest
/// ordering realizing it, by dynamic programming over vertex subsets.
pub fn max_acyclic_value(g: &DirectedMultigraph) -> Result<(u64, Ordering), GraphError> {
    let v = g.vertex_count();
    if v > MAX_ORACLE_VERTICES {
        return Err(GraphError::TooManyVertices {
            v,
            limit: MAX_ORACLE_VERTICES,
        });
    }
    if g.total_arcs() > u64::from(u32::MAX) {
        return Err(GraphError::ArcCountOverflow);
    }
    if v == 0 {
        return Ok((0, Ordering::identity(0)));
    }
    // gain[w][chunk][byte]: arcs from w into the vertices of one byte of a mask
    let chunks = v.div_ceil(8);
    let mut gain = vec![0u32; v * chunks * 256];
    for w in 0..v {
        for c in 0..chunks {
            for byte in 1..256usize {
                let low = byte.trailing_zeros() as usize;
                let t = c * 8 + low;
                let prev = gain[(w * chunks + c) * 256 + (byte & (byte - 1))];
                let add = if t < v { g.arcs(w, t) } else { 0 };
                gain[(w * chunks + c) * 256 + byte] = prev + add;
            }
        }
    }
    let gain_into = |w: usize, mask: usize| -> u32 {
        (0..chunks)
            .map(|c| gain[(w * chunks + c) * 256 + ((mask >> (8 * c)) & 0xff)])
            .sum()
    };

    // best[T]: most backward arcs obtainable by the vertices outside T placed
    // after the prefix T
    let full = (1usize << v) - 1;
    let mut best = vec![0u32; 1 << v];
    for mask in (0..full).rev() {
        let mut b = 0;
        for w in 0..v {
            if mask & (1 << w) == 0 {
                b = b.max(gain_into(w, mask) + best[mask | (1 << w)]);
            }
        }
        best[mask] = b;
    }
    let mut order = Vec::with_capacity(v);
    let mut mask = 0usize;
    while mask != full {
        let w = (0..v)
            .find(|&w| {
                mask & (1 << w) == 0 && gain_into(w, mask) + best[mask | (1 << w)] == best[mask]
            })
            .expect("some vertex attains the optimum");
        order.push(w);
        mask |= 1 << w;
    }
    let sigma = Ordering::new(order).expect("each vertex placed once");
    debug_assert_eq!(backward_arc_count(g, &sigma), u64::from(best[0]));
    Ok((u64::from(best[0]), sigma))
}

/// Minimum feedback arc set: the forward arcs under an optimal ordering.
pub fn min_fas(g: &DirectedMultigraph) -> Result<(u64, ArcFamily), GraphError> {
    let (acyclic, sigma) = max_acyclic_value(g)?;
    let keep = backward_family(g, &sigma);
    let fas = keep.complement_in(g);
    assert!(is_acyclic(keep.graph()));
    debug_assert_eq!(fas.len(), g.total_arcs() - acyclic);
    Ok((fas.len(), fas))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degree {
    pub indeg: u64,
    pub outdeg: u64,
}

pub fn degree_profile(g: &DirectedMultigraph) -> Vec<Degree> {
    (0..g.vertex_count())
        .map(|i| Degree {
            indeg: g.in_degree(i),
            outdeg: g.out_degree(i),
        })
        .collect()
}

fn reach(g: &DirectedMultigraph, start: usize) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for j in g.successors(i) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// Balanced degrees everywhere and strongly connected once isolated
/// vertices are dropped.
pub fn is_eulerian(g: &DirectedMultigraph) -> bool {
    if degree_profile(g).iter().any(|d| d.indeg != d.outdeg) {
        return false;
    }
    let active: Vec<usize> = (0..g.vertex_count())
        .filter(|&i| !g.is_isolated(i))
        .collect();
    let Some(&s) = active.first() else {
        return true;
    };
    let fwd = reach(g, s);
    let bwd = reach(&g.reverse(), s);
    active.iter().all(|&i| fwd[i] && bwd[i])
}

/// Vertices reachable from `start` along arcs of `family`, sorted.
pub fn reachable_set(family: &ArcFamily, start: usize) -> Vec<usize> {
    let seen = reach(family.graph(), start);
    (0..seen.len()).filter(|&i| seen[i]).collect()
}

/// Outcome of removing all incoming arcs of the extra vertex from a maximum
/// acyclic family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub family: ArcFamily,
    pub reachable: Vec<usize>,
    /// Arcs of the input family entering the reachable set.
    pub removed: ArcFamily,
    /// Host arcs leaving the reachable set.
    pub added: ArcFamily,
}

/// Rewrites a maximum acyclic family so that `extra` has no incoming arcs:
/// with `R` the set reachable from `extra` inside the family, drop the arcs
/// entering `R` and take every host arc leaving `R`.
pub fn eliminate_extra_vertex(
    host: &DirectedMultigraph,
    family: &ArcFamily,
    extra: usize,
) -> Result<Elimination, GraphError> {
    let v = host.vertex_count();
    if extra >= v {
        return Err(GraphError::PreconditionViolated(format!(
            "vertex {extra} out of range"
        )));
    }
    if !family.is_within(host) {
        return Err(GraphError::NotWithinHost);
    }
    if !is_acyclic(family.graph()) {
        return Err(GraphError::PreconditionViolated(
            "family is not acyclic".into(),
        ));
    }
    let (optimum, _) = max_acyclic_value(host)?;
    if family.len() != optimum {
        return Err(GraphError::PreconditionViolated(format!(
            "family has {} arcs, maximum is {optimum}",
            family.len()
        )));
    }
    if !is_eulerian(host) {
        return Err(GraphError::PreconditionViolated(
            "host is not Eulerian".into(),
        ));
    }
    if host.out_degree(extra) == 0 {
        return Ok(Elimination {
            family: family.clone(),
            reachable: vec![extra],
            removed: ArcFamily::empty(v),
            added: ArcFamily::empty(v),
        });
    }

    let reachable = reachable_set(family, extra);
    let mut in_r = vec![false; v];
    for &r in &reachable {
        in_r[r] = true;
    }
    let mut next = family.graph().clone();
    let mut removed = DirectedMultigraph::empty(v);
    let mut added = DirectedMultigraph::empty(v);
    for (a, b, c) in host.arc_list() {
        if !in_r[a] && in_r[b] {
            removed.set_arcs(a, b, family.graph().arcs(a, b));
            next.set_arcs(a, b, 0);
        } else if in_r[a] && !in_r[b] {
            added.set_arcs(a, b, c);
            next.set_arcs(a, b, c);
        }
    }
    let out = ArcFamily { counts: next };
    assert_eq!(out.len(), family.len(), "cardinality changed");
    assert!(is_acyclic(out.graph()), "elimination introduced a circuit");
    assert_eq!(
        out.graph().in_degree(extra),
        0,
        "extra vertex kept an incoming arc"
    );
    assert!(
        (0..v).all(|j| out.graph().arcs(extra, j) == host.arcs(extra, j)),
        "an arc leaving the extra vertex is missing"
    );
    Ok(Elimination {
        family: out,
        reachable,
        removed: ArcFamily { counts: removed },
        added: ArcFamily { counts: added },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Auxiliary graph of the worked example, vertices x_1..x_7 as 0..6.
    pub(crate) fn example_aux() -> DirectedMultigraph {
        DirectedMultigraph::from_rows(&[
            vec![0, 0, 0, 1, 0, 1, 0],
            vec![0, 0, 0, 0, 1, 1, 0],
            vec![0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 2],
            vec![1, 1, 0, 0, 0, 0, 0],
        ])
        .unwrap()
    }

    /// The thick arcs of the example's maximum acyclic subgraph.
    fn example_a_prime(host: &DirectedMultigraph) -> ArcFamily {
        let g = DirectedMultigraph::from_arcs(
            7,
            &[(0, 5), (1, 4), (1, 5), (3, 1), (4, 0), (5, 6), (5, 6)],
        )
        .unwrap();
        ArcFamily::new_within(host, g).unwrap()
    }

    fn example_tournament() -> BipartiteTournament {
        BipartiteTournament::new(3, 2, vec![vec![1, -1], vec![-1, 1], vec![1, 1]]).unwrap()
    }

    /// Independent oracle: try every arc subfamily (multiplicity 0..=c per
    /// entry) and keep the largest acyclic one.
    fn subset_max_acyclic(g: &DirectedMultigraph) -> u64 {
        let arcs = g.arc_list();
        let mut best = 0;
        let mut choice = vec![0u32; arcs.len()];
        loop {
            let mut h = DirectedMultigraph::empty(g.vertex_count());
            for (k, &(a, b, _)) in arcs.iter().enumerate() {
                h.set_arcs(a, b, choice[k]);
            }
            if is_acyclic(&h) {
                best = best.max(h.total_arcs());
            }
            let mut k = 0;
            loop {
                if k == arcs.len() {
                    return best;
                }
                if choice[k] < arcs[k].2 {
                    choice[k] += 1;
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    fn all_orderings(v: usize) -> Vec<Ordering> {
        fn rec(p: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Ordering>) {
            if p.len() == used.len() {
                out.push(Ordering::new(p.clone()).unwrap());
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    p.push(i);
                    rec(p, used, out);
                    p.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; v], &mut out);
        out
    }

    fn ordering_max_acyclic(g: &DirectedMultigraph) -> u64 {
        all_orderings(g.vertex_count())
            .iter()
            .map(|s| backward_arc_count(g, s))
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn acyclicity_examples() {
        let aux = example_aux();
        assert!(!is_acyclic(&aux));
        assert!(is_acyclic(example_a_prime(&aux).graph()));
        assert!(is_acyclic(&DirectedMultigraph::empty(0)));
        assert!(is_acyclic(&DirectedMultigraph::empty(4)));
    }

    #[test]
    fn topological_order_examples() {
        let aux = example_aux();
        let a_prime = example_a_prime(&aux);
        let a_second = eliminate_extra_vertex(&aux, &a_prime, 6).unwrap().family;
        let order = topological_order(a_second.graph()).unwrap();
        // sources of A'' are x_3 (isolated), x_4 and x_7; x_7 precedes
        // everything it reaches
        assert_eq!(order.as_slice(), &[2, 3, 6, 1, 4, 0, 5]);
        let rank = order.ranks();
        for r in reachable_set(&a_second, 6) {
            assert!(rank[6] <= rank[r]);
        }
        let single = DirectedMultigraph::from_arcs(2, &[(0, 1)]).unwrap();
        assert_eq!(topological_order(&single).unwrap().as_slice(), &[0, 1]);
        assert_eq!(
            topological_order(&DirectedMultigraph::empty(2))
                .unwrap()
                .as_slice(),
            &[0, 1]
        );
        assert_eq!(topological_order(&aux), Err(GraphError::HasCycle));
    }

    #[test]
    fn example_max_acyclic_is_seven() {
        let aux = example_aux();
        let (value, sigma) = max_acyclic_value(&aux).unwrap();
        assert_eq!(value, 7);
        assert_eq!(backward_arc_count(&aux, &sigma), 7);
        assert_eq!(subset_max_acyclic(&aux), 7);
    }

    #[test]
    fn example_displayed_permuted_matrix() {
        // the displayed matrix places x_i at position σ(i) for
        // σ = (4,2,7,1,3,5,6); as a sequence that is (4,2,5,1,6,7,3)
        let aux = example_aux();
        let seq = Ordering::from_one_based(&[4, 2, 5, 1, 6, 7, 3]).unwrap();
        let shown = aux.permuted(&seq);
        let expected = vec![
            vec![0, 1, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 1, 0, 0],
            vec![0, 0, 0, 1, 0, 0, 0],
            vec![1, 0, 0, 0, 1, 0, 0],
            vec![0, 0, 0, 0, 0, 2, 0],
            vec![0, 1, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0],
        ];
        assert_eq!(shown, expected);
        let upper: u32 = (0..7)
            .flat_map(|i| (i + 1..7).map(move |j| (i, j)))
            .map(|(i, j)| shown[i][j])
            .sum();
        assert_eq!(upper, 7);
        assert_eq!(backward_arc_count(&aux, &seq.reversed()), 7);
        assert_eq!(
            backward_family(&aux, &seq.reversed()),
            example_a_prime(&aux)
        );
    }

    #[test]
    fn three_cycle() {
        let c3 = DirectedMultigraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(max_acyclic_value(&c3).unwrap().0, 2);
        assert_eq!(min_fas(&c3).unwrap().0, 1);
        assert!(is_eulerian(&c3));
    }

    #[test]
    fn min_fas_examples() {
        let d = example_tournament().to_digraph();
        assert_eq!(d.total_arcs(), 6);
        let (count, fas) = min_fas(&d).unwrap();
        assert_eq!(count, 1);
        assert_eq!(subset_max_acyclic(&d), 5);
        assert!(is_acyclic(fas.complement_in(&d).graph()));

        let (count, fas) = min_fas(&example_aux()).unwrap();
        assert_eq!(count, 3);
        assert_eq!(fas.len(), 3);

        let dag = DirectedMultigraph::from_arcs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let (count, fas) = min_fas(&dag).unwrap();
        assert_eq!(count, 0);
        assert!(fas.is_empty());
    }

    #[test]
    fn oracle_vertex_limit() {
        let big = DirectedMultigraph::empty(25);
        assert_eq!(
            max_acyclic_value(&big),
            Err(GraphError::TooManyVertices { v: 25, limit: 24 })
        );
    }

    #[test]
    fn degree_examples() {
        let d = degree_profile(&example_aux());
        assert_eq!(
            d[6],
            Degree {
                indeg: 2,
                outdeg: 2
            }
        );
        assert_eq!(
            d[5],
            Degree {
                indeg: 2,
                outdeg: 2
            }
        );
        assert_eq!(
            d[2],
            Degree {
                indeg: 0,
                outdeg: 0
            }
        );
    }

    #[test]
    fn eulerian_examples() {
        assert!(is_eulerian(&example_aux()));
        assert!(!is_eulerian(
            &DirectedMultigraph::from_arcs(2, &[(0, 1)]).unwrap()
        ));
        // balanced but two separate circuits
        let split = DirectedMultigraph::from_arcs(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert!(!is_eulerian(&split));
        assert!(is_eulerian(&DirectedMultigraph::empty(3)));
    }

    #[test]
    fn reachability_examples() {
        let aux = example_aux();
        assert_eq!(reachable_set(&example_a_prime(&aux), 6), vec![6]);
        assert_eq!(
            reachable_set(&ArcFamily::full(&aux), 6),
            vec![0, 1, 3, 4, 5, 6]
        );
        assert_eq!(reachable_set(&ArcFamily::empty(7), 3), vec![3]);
    }

    #[test]
    fn example_elimination_trace() {
        let aux = example_aux();
        let e = eliminate_extra_vertex(&aux, &example_a_prime(&aux), 6).unwrap();
        assert_eq!(e.reachable, vec![6]);
        assert_eq!(e.removed.graph().arc_list(), vec![(5, 6, 2)]);
        assert_eq!(e.added.graph().arc_list(), vec![(6, 0, 1), (6, 1, 1)]);
        assert_eq!(e.family.len(), 7);
        let expected = DirectedMultigraph::from_arcs(
            7,
            &[(0, 5), (1, 4), (1, 5), (3, 1), (4, 0), (6, 0), (6, 1)],
        )
        .unwrap();
        assert_eq!(e.family.graph(), &expected);
        // x_4 keeps no incoming arc, so it is the one vertex besides x_3 that
        // x_7 does not reach
        assert_eq!(reachable_set(&e.family, 6), vec![0, 1, 4, 5, 6]);
    }

    #[test]
    fn elimination_reapplied_keeps_postconditions() {
        // a second pass sees a larger reachable set and may move arcs again,
        // but every guarantee still holds
        let aux = example_aux();
        let once = eliminate_extra_vertex(&aux, &example_a_prime(&aux), 6)
            .unwrap()
            .family;
        let again = eliminate_extra_vertex(&aux, &once, 6).unwrap();
        assert_eq!(again.reachable, vec![0, 1, 4, 5, 6]);
        assert_eq!(again.family.len(), 7);
        assert!(is_acyclic(again.family.graph()));
        assert_eq!(again.family.graph().in_degree(6), 0);
        let third = eliminate_extra_vertex(&aux, &again.family, 6).unwrap();
        assert_eq!(third.family, again.family);
    }

    #[test]
    fn elimination_rejects_non_maximum_family() {
        let aux = example_aux();
        let small =
            ArcFamily::new_within(&aux, DirectedMultigraph::from_arcs(7, &[(0, 5)]).unwrap())
                .unwrap();
        assert!(matches!(
            eliminate_extra_vertex(&aux, &small, 6),
            Err(GraphError::PreconditionViolated(_))
        ));
        assert!(matches!(
            eliminate_extra_vertex(&aux, &ArcFamily::full(&aux), 6),
            Err(GraphError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn elimination_skips_isolated_extra() {
        let c3 = DirectedMultigraph::from_arcs(4, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (_, sigma) = max_acyclic_value(&c3).unwrap();
        let fam = backward_family(&c3, &sigma);
        let e = eliminate_extra_vertex(&c3, &fam, 3).unwrap();
        assert_eq!(e.family, fam);
        assert_eq!(e.reachable, vec![3]);
    }

    #[test]
    fn tournament_validation() {
        assert!(BipartiteTournament::new(1, 2, vec![vec![1, 1]]).is_err());
        assert!(BipartiteTournament::new(1, 1, vec![vec![0]]).is_err());
        assert!(BipartiteTournament::new(2, 1, vec![vec![1]]).is_err());
        let t = example_tournament();
        let d = t.to_digraph();
        // u_1 -> v_1 and v_2 -> u_1
        assert_eq!(d.arcs(0, 3), 1);
        assert_eq!(d.arcs(4, 0), 1);
    }

    fn random_graph(v: usize, max_mult: u32) -> impl Strategy<Value = DirectedMultigraph> {
        proptest::collection::vec(0..=max_mult, v * v).prop_map(move |xs| {
            let mut g = DirectedMultigraph::empty(v);
            for i in 0..v {
                for j in 0..v {
                    if i != j {
                        g.set_arcs(i, j, xs[i * v + j]);
                    }
                }
            }
            g
        })
    }

    /// Union of random closed walks through vertex 0 (Eulerian by
    /// construction) on `v` vertices.
    fn random_eulerian(v: usize) -> impl Strategy<Value = DirectedMultigraph> {
        proptest::collection::vec(proptest::collection::vec(1..v, 1..4), 1..4).prop_map(
            move |walks| {
                let mut g = DirectedMultigraph::empty(v);
                for walk in walks {
                    let mut path = vec![0];
                    for x in walk {
                        if *path.last().unwrap() != x {
                            path.push(x);
                        }
                    }
                    if path.len() < 2 {
                        continue;
                    }
                    path.push(0);
                    for w in path.windows(2) {
                        let c = g.arcs(w[0], w[1]);
                        g.set_arcs(w[0], w[1], c + 1);
                    }
                }
                g
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dp_matches_ordering_enumeration(g in (1usize..=6).prop_flat_map(|v| random_graph(v, 2))) {
            let (value, sigma) = max_acyclic_value(&g).unwrap();
            prop_assert_eq!(value, ordering_max_acyclic(&g));
            prop_assert_eq!(backward_arc_count(&g, &sigma), value);
        }

        #[test]
        fn dp_matches_subset_enumeration(g in (1usize..=4).prop_flat_map(|v| random_graph(v, 1))) {
            prop_assert_eq!(max_acyclic_value(&g).unwrap().0, subset_max_acyclic(&g));
        }

        #[test]
        fn complementarity_and_reversal(g in (1usize..=10).prop_flat_map(|v| random_graph(v, 2))) {
            let (fas, family) = min_fas(&g).unwrap();
            let (acyc, _) = max_acyclic_value(&g).unwrap();
            prop_assert_eq!(fas + acyc, g.total_arcs());
            prop_assert!(is_acyclic(family.complement_in(&g).graph()));
            prop_assert_eq!(min_fas(&g.reverse()).unwrap().0, fas);
        }

        #[test]
        fn elimination_postconditions(g in (3usize..=7).prop_flat_map(random_eulerian)) {
            prop_assume!(is_eulerian(&g));
            let (best, sigma) = max_acyclic_value(&g).unwrap();
            for start in [sigma.clone(), sigma.rotated(1), sigma.rotated(2)] {
                // rotations of an optimum stay optimal only sometimes
                if backward_arc_count(&g, &start) != best {
                    continue;
                }
                let fam = backward_family(&g, &start);
                let e = eliminate_extra_vertex(&g, &fam, 0).unwrap();
                prop_assert_eq!(e.family.len(), best);
                prop_assert!(is_acyclic(e.family.graph()));
                prop_assert_eq!(e.family.graph().in_degree(0), 0);
                prop_assert_eq!(e.family.graph().out_degree(0), g.out_degree(0));
                // dropping the extra vertex: optimum on the rest
                let rest = g.without_arcs_at(0);
                let (rest_best, _) = max_acyclic_value(&rest).unwrap();
                let trimmed = e.family.graph().without_arcs_at(0);
                prop_assert!(is_acyclic(&trimmed));
                prop_assert_eq!(trimmed.total_arcs(), best - g.out_degree(0));
                prop_assert_eq!(rest_best, best - g.out_degree(0));
            }
        }
    }
}
