//! Numerical laboratory for Pick interpolation on polydisks and the polynomial
//! extension property of their algebraic subvarieties.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agler;
pub mod balance;
pub mod disk;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod operators;
pub mod pick;
pub mod poly;
pub mod realization;
pub mod variety;

pub use error::{Error, Result};
pub use num_complex::Complex64;
