//! Exact computation of dynamical Mordell-Lang return sets
//! `{n : Phi^n(alpha) in V}` for self-maps of split tori over `F_p(t)`, the
//! polynomial-exponential equations `u_n = sum c_i p^(k_i n_i)` they reduce
//! to, and generators for instances that realize such equations.

pub mod arith;
pub mod constructions;
pub mod error;
pub mod intalg;
pub mod lrs;
pub mod pexp;
pub mod psets;
pub mod textfmt;
pub mod torus;

pub use error::{Error, Result};
