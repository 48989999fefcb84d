//! Minimal surfaces in three-dimensional Minkowski space with the Matsumoto
//! metric F = α²/(α − β), β = b·dx³.

pub mod check;
pub mod cli;
pub mod dual;
pub mod error;
pub mod field;
pub mod graph_pde;
pub mod gridio;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod quadrature;
pub mod solver;
pub mod translation;
pub mod volume;

pub use error::{Error, Result};
