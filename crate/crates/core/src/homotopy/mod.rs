//! Free homotopy classes of loops for vacuum manifolds with finite fundamental
//! group: conjugacy classes, the set-valued class sum and the norm `|σ|_*`.
//!
//! The circle (fundamental group `Z`) is not representable here; its classes
//! are the degrees `d` with closed forms [`circle_emin`] and [`circle_norm`].

mod classes;
mod group;
mod norm;

use thiserror::Error;

pub use classes::{conjugacy_classes, ClassTable, FreeHomotopyClass};
pub use group::{FiniteGroup, GroupFile};
pub use norm::{
    norm_star, verify_sum_properties, EminTable, NormEntry, NormTable, SumPropertyReport,
    SumViolation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("malformed group table: {0}")]
    Structure(String),
    #[error("multiplication is not associative: ({a}·{b})·{c} ≠ {a}·({b}·{c})")]
    NonAssociative { a: String, b: String, c: String },
    #[error("invalid E_min table: {0}")]
    Validation(String),
}

/// Least Dirichlet energy of a degree-`d` loop in the unit circle.
pub fn circle_emin(d: i64) -> f64 {
    std::f64::consts::PI * (d * d) as f64
}

/// Norm of the degree-`d` class: `|d|` copies of degree ±1 loops.
pub fn circle_norm(d: i64) -> f64 {
    std::f64::consts::PI * d.unsigned_abs() as f64
}
