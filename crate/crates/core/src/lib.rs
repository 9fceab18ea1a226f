//! Exact Kazhdan-Lusztig and Z-polynomials of matroids.
//!
//! The crate computes KL polynomials by the defining recursion over the
//! lattice of flats, evaluates the closed forms, recurrences and generating
//! functions known for fan, square-of-path, wheel and whirl matroids, and
//! certifies real-rootedness and interlacing with exact Sturm sequences.

pub mod cli;
pub mod graph;
pub mod kl;
pub mod matroid;
pub mod poly;
pub mod realroot;
pub mod series;
