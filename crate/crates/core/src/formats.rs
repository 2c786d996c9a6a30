//! Plain-text file formats for polytopes, bipartite tournaments and
//! directed multigraphs. Tokens are whitespace-separated, `#` starts a
//! comment, and blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{BipartiteTournament, DirectedMultigraph, GraphError};
use crate::polytope::{HPolytope, PolytopeError};
use crate::ratlinalg::{parse_rational, RatMatrix, RatVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("ambient dimension {0} is odd")]
    OddDimension(usize),
    #[error("{k} facets is too few for dimension {dim}; need at least {}", dim + 1)]
    TooFewFacets { k: usize, dim: usize },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongRowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("expected {expected} data lines after the header, found {found}")]
    MissingLines { expected: usize, found: usize },
    #[error("line {line}: unexpected trailing data")]
    TrailingData { line: usize },
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line {
                number: i + 1,
                tokens,
            })
        })
        .collect()
}

fn header<const N: usize>(lines: &[Line<'_>], shape: &str) -> Result<[usize; N], ParseError> {
    let Some(first) = lines.first() else {
        return Err(ParseError::MalformedHeader {
            line: 1,
            reason: format!("missing header \"{shape}\""),
        });
    };
    if first.tokens.len() != N {
        return Err(ParseError::MalformedHeader {
            line: first.number,
            reason: format!("expected \"{shape}\""),
        });
    }
    let mut out = [0usize; N];
    for (slot, tok) in out.iter_mut().zip(&first.tokens) {
        *slot = tok.parse().map_err(|_| ParseError::MalformedHeader {
            line: first.number,
            reason: format!("{tok:?} is not a nonnegative integer"),
        })?;
    }
    Ok(out)
}

/// Checks that exactly `count` data lines follow the header, each of
/// `width` tokens.
fn body<'a, 'b>(
    lines: &'b [Line<'a>],
    count: usize,
    width: usize,
) -> Result<&'b [Line<'a>], ParseError> {
    let data = &lines[1..];
    if data.len() < count {
        return Err(ParseError::MissingLines {
            expected: count,
            found: data.len(),
        });
    }
    if let Some(extra) = data.get(count) {
        return Err(ParseError::TrailingData { line: extra.number });
    }
    for l in data {
        if l.tokens.len() != width {
            return Err(ParseError::WrongRowLength {
                line: l.number,
                expected: width,
                found: l.tokens.len(),
            });
        }
    }
    Ok(data)
}

fn rational_row(line: &Line<'_>) -> Result<RatVector, ParseError> {
    line.tokens
        .iter()
        .map(|t| {
            parse_rational(t).map_err(|_| ParseError::BadToken {
                line: line.number,
                token: (*t).to_string(),
            })
        })
        .collect()
}

/// Line 1 `k 2n`, then `k` rows of `B`, then one row holding `c`.
pub fn parse_polytope(text: &str) -> Result<HPolytope, ParseError> {
    let lines = content_lines(text);
    let [k, dim] = header::<2>(&lines, "k 2n")?;
    if dim == 0 {
        return Err(ParseError::MalformedHeader {
            line: lines[0].number,
            reason: "ambient dimension must be positive".into(),
        });
    }
    if !dim.is_multiple_of(2) {
        return Err(ParseError::OddDimension(dim));
    }
    if k < dim + 1 {
        return Err(ParseError::TooFewFacets { k, dim });
    }
    let data = &lines[1..];
    if data.len() < k + 1 {
        return Err(ParseError::MissingLines {
            expected: k + 1,
            found: data.len(),
        });
    }
    if let Some(extra) = data.get(k + 1) {
        return Err(ParseError::TrailingData { line: extra.number });
    }
    let mut rows = Vec::with_capacity(k);
    for l in &data[..k] {
        if l.tokens.len() != dim {
            return Err(ParseError::WrongRowLength {
                line: l.number,
                expected: dim,
                found: l.tokens.len(),
            });
        }
        rows.push(rational_row(l)?);
    }
    let last = &data[k];
    if last.tokens.len() != k {
        return Err(ParseError::WrongRowLength {
            line: last.number,
            expected: k,
            found: last.tokens.len(),
        });
    }
    let c = rational_row(last)?;
    let b = RatMatrix::from_rows(rows, dim).expect("row lengths checked");
    HPolytope::new(b, c).map_err(|e| match e {
        PolytopeError::OddDimension(d) => ParseError::OddDimension(d),
        PolytopeError::TooFewFacets { k, dim } => ParseError::TooFewFacets { k, dim },
        other => ParseError::Invalid {
            line: lines[0].number,
            reason: other.to_string(),
        },
    })
}

pub fn write_polytope(p: &HPolytope) -> String {
    let b = p.b();
    let mut out = format!("{} {}\n", b.rows(), b.cols());
    for i in 0..b.rows() {
        out.push_str(&join(b.row(i)));
        out.push('\n');
    }
    out.push_str(&join(p.c()));
    out.push('\n');
    out
}

/// Line 1 `n m` with `n ≥ m ≥ 1`, then `n` rows of `m` entries from `{1, -1}`.
pub fn parse_tournament(text: &str) -> Result<BipartiteTournament, ParseError> {
    let lines = content_lines(text);
    let [n, m] = header::<2>(&lines, "n m")?;
    if m == 0 || n < m {
        return Err(ParseError::MalformedHeader {
            line: lines[0].number,
            reason: format!("need n >= m >= 1, got n = {n}, m = {m}"),
        });
    }
    let data = body(&lines, n, m)?;
    let mut orient = Vec::with_capacity(n);
    for l in data {
        let row = l
            .tokens
            .iter()
            .map(|t| match *t {
                "1" | "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                _ => Err(ParseError::BadToken {
                    line: l.number,
                    token: (*t).to_string(),
                }),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        orient.push(row);
    }
    BipartiteTournament::new(n, m, orient).map_err(|e| ParseError::Invalid {
        line: lines[0].number,
        reason: e.to_string(),
    })
}

pub fn write_tournament(t: &BipartiteTournament) -> String {
    let mut out = format!("{} {}\n", t.n(), t.m());
    for row in t.rows() {
        out.push_str(&join(&row));
        out.push('\n');
    }
    out
}

/// Line 1 `v`, then `v` rows of `v` nonnegative arc multiplicities.
pub fn parse_graph(text: &str) -> Result<DirectedMultigraph, ParseError> {
    let lines = content_lines(text);
    let [v] = header::<1>(&lines, "v")?;
    let data = body(&lines, v, v)?;
    let mut rows = Vec::with_capacity(v);
    for l in data {
        let row = l
            .tokens
            .iter()
            .map(|t| {
                t.parse::<u32>().map_err(|_| ParseError::BadToken {
                    line: l.number,
                    token: (*t).to_string(),
                })
            })
            .collect::<Result<Vec<u32>, _>>()?;
        rows.push(row);
    }
    DirectedMultigraph::from_rows(&rows).map_err(|e| {
        let line = match e {
            GraphError::LoopArc(i) => data[i].number,
            _ => lines[0].number,
        };
        ParseError::Invalid {
            line,
            reason: e.to_string(),
        }
    })
}

pub fn write_graph(g: &DirectedMultigraph) -> String {
    let mut out = format!("{}\n", g.vertex_count());
    for row in g.rows() {
        out.push_str(&join(&row));
        out.push('\n');
    }
    out
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    let mut s = String::new();
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{x}").expect("writing to a String");
    }
    s
}
