//! `ehzlab`: capacities of polytopes, decisions against a threshold, and the
//! feedback-arc-set reduction, driven from plain-text files.
//!
//! Every command returns an [`Outcome`] instead of printing, so the binary
//! and the tests share one code path. Exit codes are fixed: 0 success or YES,
//! 1 NO or disagreement, 2 usage or parse error, 3 solver error, 4 golden
//! mismatch.

pub mod report;
pub mod worked_example;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ehz_core::capacity::{
    self, CapacityError, CapacityResult, HeuristicOptions, SearchOptions, DEFAULT_EXACT_FACET_LIMIT,
};
use ehz_core::digraph::{self, ArcFamily, BipartiteTournament};
use ehz_core::formats;
use ehz_core::generate::random_tournament;
use ehz_core::polytope::{self, HPolytope, PolytopeError};
use ehz_core::ratlinalg::{parse_rational, Rational};
use ehz_core::reduction::{self, ReductionBundle, ReductionOptions};

pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_GOLDEN: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "ehzlab",
    version,
    about = "Exact EHZ capacities and the feedback-arc-set reduction"
)]
pub struct Cli {
    /// Print JSON instead of key = value lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for exhaustive searches.
    #[arg(long, global = true, env = "EHZLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Exact search when the input is a simplex, heuristic bound otherwise.
    Auto,
    Exact,
    Heuristic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity of a polytope file.
    Capacity {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long)]
        prune_cyclic: bool,
        #[arg(long)]
        limit_facets: Option<usize>,
        /// Hill-climb restarts per multiplier candidate.
        #[arg(long, default_value_t = 2000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Answer whether the capacity of a simplex is at most GAMMA.
    Decide {
        file: PathBuf,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        gamma: Rational,
        #[arg(long)]
        prune_cyclic: bool,
        #[arg(long)]
        limit_facets: Option<usize>,
    },
    /// Build the simplex and auxiliary graph of a tournament file.
    Reduce {
        file: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Option<Rational>,
        #[arg(long)]
        polytope_out: Option<PathBuf>,
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Minimum feedback arc set of a graph file.
    Fas { file: PathBuf },
    /// Compare the capacity pipeline with the exact oracle on random tournaments.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Option<Rational>,
    },
    /// Rebuild the worked example and check it against the stored values.
    ExamplePaper {
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        epsilon: Option<Rational>,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, report: &Report, json: bool) -> Self {
        Outcome {
            code,
            stdout: report.render(json),
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }

    fn warn(mut self, message: impl Display) -> Self {
        self.stderr.insert_str(0, &format!("warning: {message}\n"));
        self
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let json = cli.json;
    let threads = cli.threads;
    match &cli.command {
        Command::Capacity {
            file,
            mode,
            prune_cyclic,
            limit_facets,
            budget,
            seed,
        } => {
            let p = match read_with(file, formats::parse_polytope) {
                Ok(p) => p,
                Err(o) => return o,
            };
            let search = search_options(*prune_cyclic, *limit_facets, threads);
            let heuristic = HeuristicOptions {
                budget: *budget,
                seed: *seed,
                threads,
                vertex_facet_limit: limit_facets.unwrap_or(polytope::DEFAULT_VERTEX_FACET_LIMIT),
            };
            cmd_capacity(&p, *mode, &search, &heuristic, json)
        }
        Command::Decide {
            file,
            gamma,
            prune_cyclic,
            limit_facets,
        } => match read_with(file, formats::parse_polytope) {
            Ok(p) => cmd_decide(
                &p,
                gamma,
                &search_options(*prune_cyclic, *limit_facets, threads),
                json,
            ),
            Err(o) => o,
        },
        Command::Reduce {
            file,
            epsilon,
            polytope_out,
            graph_out,
        } => match read_with(file, formats::parse_tournament) {
            Ok(t) => cmd_reduce(
                &t,
                epsilon.clone(),
                polytope_out.as_deref(),
                graph_out.as_deref(),
                json,
            ),
            Err(o) => o,
        },
        Command::Fas { file } => match read_with(file, formats::parse_graph) {
            Ok(g) => cmd_fas(&g, json),
            Err(o) => o,
        },
        Command::Verify {
            n,
            m,
            trials,
            seed,
            epsilon,
        } => {
            let opts = ReductionOptions {
                epsilon: epsilon.clone(),
                search: SearchOptions {
                    prune_cyclic: true,
                    threads,
                    ..SearchOptions::default()
                },
                seed: *seed,
                ..ReductionOptions::default()
            };
            cmd_verify(*n, *m, *trials, *seed, &opts, json)
        }
        Command::ExamplePaper { epsilon } => {
            worked_example::cmd_example(epsilon.clone(), threads, json)
        }
    }
}

fn search_options(
    prune_cyclic: bool,
    limit: Option<usize>,
    threads: Option<usize>,
) -> SearchOptions {
    SearchOptions {
        prune_cyclic,
        facet_limit: limit.unwrap_or(DEFAULT_EXACT_FACET_LIMIT),
        threads,
    }
}

fn read_with<T, E: Display>(
    path: &Path,
    parse: impl Fn(&str) -> Result<T, E>,
) -> Result<T, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn capacity_fields(r: &mut Report, c: &CapacityResult) {
    r.field("inner_max", &c.inner_max)
        .field("capacity", &c.value)
        .field("witness", &c.witness)
        .field("beta", join(c.witness_beta.values()))
        .flag("exact", c.exact);
}

/// Exact capacity on simplices. A `2n+1`-facet input whose normals sum to
/// zero but are rank-deficient is the limit of simplices sharing the
/// multiplier `𝟙/Σc`, and is evaluated at that multiplier.
pub fn exact_capacity(
    p: &HPolytope,
    opts: &SearchOptions,
) -> Result<(CapacityResult, bool), CapacityError> {
    match capacity::capacity_simplex(p, opts) {
        Err(CapacityError::Polytope(PolytopeError::NotSimplex(reason)))
            if p.k() == 2 * p.n() + 1 =>
        {
            let beta = capacity::uniform_multiplier(p)
                .ok_or(CapacityError::Polytope(PolytopeError::NotSimplex(reason)))?;
            Ok((capacity::capacity_with_multiplier(p, &beta, opts)?, true))
        }
        other => other.map(|c| (c, false)),
    }
}

pub fn cmd_capacity(
    p: &HPolytope,
    mode: Mode,
    search: &SearchOptions,
    heuristic: &HeuristicOptions,
    json: bool,
) -> Outcome {
    let mut r = Report::new();
    r.int("facets", p.k() as i128)
        .int("dimension", (2 * p.n()) as i128);
    let try_exact = match mode {
        Mode::Exact => true,
        Mode::Heuristic => false,
        Mode::Auto => p.k() == 2 * p.n() + 1,
    };
    if try_exact {
        match exact_capacity(p, search) {
            Ok((c, degenerate)) => {
                r.field("mode", "exact");
                if degenerate {
                    r.field("multiplier", "uniform (normals are rank-deficient)");
                }
                capacity_fields(&mut r, &c);
                return Outcome::report(EXIT_OK, &r, json);
            }
            Err(CapacityError::Polytope(PolytopeError::NotSimplex(_))) if mode == Mode::Auto => {}
            Err(e) => return Outcome::fail(EXIT_SOLVER, e),
        }
    }
    let warning = match polytope::is_bounded_certified(p, heuristic.vertex_facet_limit) {
        Ok(true) => None,
        Ok(false) => {
            Some("boundedness not certified: the facet normals do not positively span".to_string())
        }
        Err(e) => Some(format!("boundedness not certified: {e}")),
    };
    let out = match capacity::capacity_upper_bound(p, heuristic) {
        Ok(c) => {
            r.field("mode", "heuristic");
            capacity_fields(&mut r, &c);
            Outcome::report(EXIT_OK, &r, json)
        }
        Err(e) => Outcome::fail(EXIT_SOLVER, e),
    };
    match warning {
        Some(w) => out.warn(w),
        None => out,
    }
}

pub fn cmd_decide(p: &HPolytope, gamma: &Rational, search: &SearchOptions, json: bool) -> Outcome {
    match exact_capacity(p, search) {
        Ok((c, _)) => {
            let yes = c.value <= *gamma;
            let mut r = Report::new();
            r.field("capacity", &c.value)
                .field("gamma", gamma)
                .field("answer", if yes { "YES" } else { "NO" });
            Outcome::report(if yes { EXIT_OK } else { EXIT_NO }, &r, json)
        }
        Err(e) => Outcome::fail(EXIT_SOLVER, e),
    }
}

pub fn cmd_reduce(
    t: &BipartiteTournament,
    epsilon: Option<Rational>,
    polytope_out: Option<&Path>,
    graph_out: Option<&Path>,
    json: bool,
) -> Outcome {
    let epsilon = epsilon.unwrap_or_else(|| reduction::default_epsilon(t.n()));
    let bundle = match ReductionBundle::new(t, epsilon) {
        Ok(b) => b,
        Err(e) => return Outcome::fail(EXIT_SOLVER, e),
    };
    let mut r = Report::new();
    r.int("n", t.n() as i128)
        .int("m", t.m() as i128)
        .field("epsilon", &bundle.epsilon)
        .int("total_arcs", bundle.aux.total_arcs)
        .int("delta", bundle.aux.delta)
        .int("extra_outdeg", bundle.aux.extra_outdeg);
    let poly_text = formats::write_polytope(&bundle.simplex);
    let graph_text = formats::write_graph(&bundle.aux.graph);
    for (path, text, key) in [
        (polytope_out, &poly_text, "polytope"),
        (graph_out, &graph_text, "graph"),
    ] {
        match path {
            Some(path) => {
                if let Err(e) = fs::write(path, text) {
                    return Outcome::fail(
                        EXIT_SOLVER,
                        format!("cannot write {}: {e}", path.display()),
                    );
                }
                r.field(&format!("{key}_file"), path.display());
            }
            None => {
                r.rows(key, text.lines());
            }
        }
    }
    Outcome::report(EXIT_OK, &r, json)
}

/// `a->b` per arc, with `*c` for multiplicity above one.
pub fn format_arcs(family: &ArcFamily, name: impl Fn(usize) -> String) -> String {
    let parts: Vec<String> = family
        .graph()
        .arc_list()
        .into_iter()
        .map(|(a, b, c)| {
            let arc = format!("{}->{}", name(a), name(b));
            if c > 1 {
                format!("{arc}*{c}")
            } else {
                arc
            }
        })
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(" ")
    }
}

pub fn cmd_fas(g: &digraph::DirectedMultigraph, json: bool) -> Outcome {
    match digraph::min_fas(g) {
        Ok((count, fas)) => {
            let mut r = Report::new();
            r.int("vertices", g.vertex_count() as i128)
                .int("arcs", g.total_arcs())
                .int("fas", count)
                .field("certificate", format_arcs(&fas, |i| (i + 1).to_string()));
            Outcome::report(EXIT_OK, &r, json)
        }
        Err(e) => Outcome::fail(EXIT_SOLVER, e),
    }
}

/// Tournament vertex names: `u1..un` then `v1..vm`.
pub fn tournament_vertex_name(t: &BipartiteTournament, x: usize) -> String {
    if x < t.n() {
        format!("u{}", x + 1)
    } else {
        format!("v{}", x - t.n() + 1)
    }
}

pub fn cmd_verify(
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
    opts: &ReductionOptions,
    json: bool,
) -> Outcome {
    if trials == 0 {
        return Outcome::fail(EXIT_USAGE, "trials must be at least 1");
    }
    if m == 0 || n < m {
        return Outcome::fail(
            EXIT_USAGE,
            format!("need n >= m >= 1, got n = {n}, m = {m}"),
        );
    }
    if n > opts.max_n {
        return Outcome::fail(
            EXIT_SOLVER,
            format!("n = {n} exceeds the limit of {}", opts.max_n),
        );
    }
    let mut agree = 0u64;
    let mut counterexamples = Vec::new();
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial);
        let t = random_tournament(n, m, trial_seed).expect("shape checked");
        let oracle = digraph::min_fas(&t.to_digraph()).map(|(c, _)| c);
        let pipeline = reduction::solve_fas_via_capacity(&t, opts).map(|s| s.count);
        match (&pipeline, &oracle) {
            (Ok(a), Ok(b)) if a == b => agree += 1,
            _ => {
                let show = |x: &Result<u64, _>| match x {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("error ({e})"),
                };
                counterexamples.push(format!(
                    "seed={trial_seed} tournament=[{}] capacity_fas={} oracle_fas={}",
                    t.rows().iter().map(join).collect::<Vec<_>>().join("; "),
                    show(&pipeline),
                    show(&oracle.map_err(reduction::ReductionError::from)),
                ));
            }
        }
    }
    let mut r = Report::new();
    r.int("n", n as i128)
        .int("m", m as i128)
        .int("trials", trials)
        .field("seed", seed)
        .int("agree", agree)
        .field("result", format!("{agree}/{trials} agree"));
    if !counterexamples.is_empty() {
        r.rows("counterexample", &counterexamples);
    }
    Outcome::report(if agree == trials { EXIT_OK } else { EXIT_NO }, &r, json)
}
