// `!(x > y)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod error;
pub mod measurement;
pub mod protocol;
pub mod quadrature;
pub mod qutrit;
pub mod rng;
pub mod topo;
pub mod trajectory;

pub use error::{Error, Result};
