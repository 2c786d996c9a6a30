//! Exact rational tools for the Ekeland–Hofer–Zehnder capacity of polytopes,
//! the feedback-arc-set reduction to simplex capacities, and the text
//! formats and seeded generators used by the command-line front end.

pub mod capacity;
pub mod digraph;
pub mod formats;
pub mod generate;
pub mod polytope;
pub mod ratlinalg;
pub mod reduction;
