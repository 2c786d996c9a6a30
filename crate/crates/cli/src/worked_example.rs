//! The three-by-two worked example, rebuilt end to end and compared with
//! stored values.

use ehz_core::capacity::{self, Ordering, SearchOptions};
use ehz_core::digraph::{self, BipartiteTournament, DirectedMultigraph};
use ehz_core::polytope::HPolytope;
use ehz_core::ratlinalg::{frac, Rational};
use ehz_core::reduction::{self, ReductionBundle, ReductionOptions};

use crate::{format_arcs, join, Outcome, Report, EXIT_GOLDEN, EXIT_OK};

pub const ORIENTATION: [[i8; 2]; 3] = [[1, -1], [-1, 1], [1, 1]];
pub const S_ROWS: [[i64; 3]; 3] = [[1, -1, 0], [-1, 1, 0], [1, 1, 0]];
pub const M_ROWS: [[u32; 7]; 7] = [
    [0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 2],
    [1, 1, 0, 0, 0, 0, 0],
];
/// The displayed ordering places `x_i` at position `RANKS[i]`.
pub const RANKS: [usize; 7] = [4, 2, 7, 1, 3, 5, 6];
pub const MAX_ACYCLIC: u64 = 7;
pub const TOTAL_ARCS: u64 = 10;
pub const DELTA: u64 = 10;
pub const EXTRA_OUTDEG: u64 = 2;
pub const ROUNDED_MAX: i64 = 4;
pub const FAS: u64 = 1;
/// `x_7` in the auxiliary graph.
pub const EXTRA: usize = 6;
pub const REACHABLE: [usize; 1] = [6];
pub const REMOVED: [(usize, usize, u32); 1] = [(5, 6, 2)];
pub const ADDED: [(usize, usize, u32); 2] = [(6, 0, 1), (6, 1, 1)];

pub fn tournament() -> BipartiteTournament {
    BipartiteTournament::new(3, 2, ORIENTATION.iter().map(|r| r.to_vec()).collect())
        .expect("valid orientation")
}

pub fn auxiliary() -> DirectedMultigraph {
    DirectedMultigraph::from_rows(&M_ROWS.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("square, loop-free")
}

/// The displayed ordering as a sequence, reversed so that its counted arcs
/// run from later to earlier positions.
pub fn displayed_ordering() -> Ordering {
    let mut seq = vec![0; RANKS.len()];
    for (x, &r) in RANKS.iter().enumerate() {
        seq[r - 1] = x;
    }
    Ordering::new(seq)
        .expect("ranks form a permutation")
        .reversed()
}

fn x_name(i: usize) -> String {
    format!("x{}", i + 1)
}

struct Checks {
    report: Report,
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, name: &str, ok: bool) {
        self.report
            .field(&format!("check.{name}"), if ok { "ok" } else { "MISMATCH" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }
}

pub fn cmd_example(epsilon: Option<Rational>, threads: Option<usize>, json: bool) -> Outcome {
    let t = tournament();
    let epsilon = epsilon.unwrap_or_else(|| reduction::default_epsilon(t.n()));
    let mut c = Checks {
        report: Report::new(),
        failed: Vec::new(),
    };
    let search = SearchOptions {
        prune_cyclic: true,
        threads,
        ..SearchOptions::default()
    };

    let s = reduction::build_s(&t);
    c.report.rows("s", (0..s.rows()).map(|i| join(s.row(i))));
    c.check("s", s == ehz_core::ratlinalg::RatMatrix::from_ints(&S_ROWS));

    // unperturbed simplex: rank-deficient, evaluated at β = 𝟙/7
    let unperturbed =
        HPolytope::with_unit_rhs(reduction::block_matrix(&s)).expect("7 x 6 block matrix");
    match capacity::uniform_multiplier(&unperturbed)
        .ok_or_else(|| "normals do not sum to zero".to_string())
        .and_then(|beta| {
            capacity::capacity_with_multiplier(&unperturbed, &beta, &search)
                .map_err(|e| e.to_string())
        }) {
        Ok(cap) => {
            c.report
                .field("unperturbed.inner_max", &cap.inner_max)
                .field("unperturbed.capacity", &cap.value)
                .field("unperturbed.witness", &cap.witness);
            c.check(
                "unperturbed_capacity",
                cap.inner_max == frac(4, 49) && cap.value == frac(49, 8),
            );
        }
        Err(e) => {
            c.report.field("unperturbed.error", e);
            c.check("unperturbed_capacity", false);
        }
    }

    c.report.field("epsilon", &epsilon);
    let bundle = match ReductionBundle::new(&t, epsilon.clone()) {
        Ok(b) => b,
        Err(e) => {
            c.report.field("reduction.error", &e);
            c.check("reduction", false);
            return finish(c, json);
        }
    };
    c.report
        .rows("s_tilde", (0..3).map(|i| join(bundle.s_tilde.row(i))))
        .rows("m", bundle.aux.graph.rows().iter().map(join));
    c.check("m", bundle.aux.graph == auxiliary());

    let aux = &bundle.aux;
    c.report
        .int("total_arcs", aux.total_arcs)
        .int("delta", aux.delta)
        .int("extra_outdeg", aux.extra_outdeg);
    c.check(
        "constants",
        (aux.total_arcs, aux.delta, aux.extra_outdeg) == (TOTAL_ARCS, DELTA, EXTRA_OUTDEG),
    );

    match digraph::max_acyclic_value(&aux.graph) {
        Ok((v, _)) => {
            c.report.int("max_acyclic", v);
            c.check("max_acyclic", v == MAX_ACYCLIC);
        }
        Err(e) => {
            c.report.field("max_acyclic.error", e);
            c.check("max_acyclic", false);
        }
    }

    let sigma = displayed_ordering();
    let family = digraph::backward_family(&aux.graph, &sigma);
    c.report
        .field("displayed_ordering", &sigma)
        .int("displayed_family_size", family.len());
    c.check("displayed_family", family.len() == MAX_ACYCLIC);
    match digraph::eliminate_extra_vertex(&aux.graph, &family, EXTRA) {
        Ok(e) => {
            c.report
                .field(
                    "elimination.reachable",
                    join(e.reachable.iter().map(|&i| x_name(i))),
                )
                .field("elimination.removed", format_arcs(&e.removed, x_name))
                .field("elimination.added", format_arcs(&e.added, x_name));
            c.check(
                "elimination",
                e.reachable == REACHABLE
                    && e.removed.graph().arc_list() == REMOVED
                    && e.added.graph().arc_list() == ADDED,
            );
        }
        Err(e) => {
            c.report.field("elimination.error", e);
            c.check("elimination", false);
        }
    }

    let rounding = reduction::verify_rounding_identity(&bundle, 7, 0, 0);
    c.report.int("rounding.checked", rounding.checked);
    match &rounding.first_violation {
        None => c.report.field("rounding", "holds"),
        Some(o) => c.report.field("rounding", format!("FAILS at {o}")),
    };
    c.check("rounding", rounding.holds());

    let opts = ReductionOptions {
        epsilon: Some(epsilon),
        search,
        ..ReductionOptions::default()
    };
    match reduction::solve_fas_via_capacity(&t, &opts) {
        Ok(sol) => {
            c.report
                .field("capacity", &sol.capacity.value)
                .field("witness", &sol.capacity.witness)
                .int("rounded_max", sol.rounded_max)
                .int("fas", sol.count)
                .field(
                    "certificate",
                    format_arcs(&sol.certificate, |x| crate::tournament_vertex_name(&t, x)),
                );
            c.check("rounded_max", sol.rounded_max == ROUNDED_MAX);
            c.check("fas", sol.count == FAS);
        }
        Err(e) => {
            c.report.field("pipeline.error", e);
            c.check("pipeline", false);
        }
    }
    finish(c, json)
}

fn finish(mut c: Checks, json: bool) -> Outcome {
    let ok = c.failed.is_empty();
    c.report.field(
        "golden",
        if ok {
            "all checks pass".to_string()
        } else {
            format!("mismatch: {}", c.failed.join(", "))
        },
    );
    Outcome::report(if ok { EXIT_OK } else { EXIT_GOLDEN }, &c.report, json)
}
