//! Local points on Atkin-Lehner twists of Shimura curves X^D_0(N).
//!
//! Layers, bottom up: integer arithmetic (`arith`), imaginary quadratic
//! orders (`quad`), optimal embedding numbers (`embed`), Hilbert class
//! polynomials (`classpoly`), point counts and traces (`trace`), and the
//! per-place deciders with certificates (`local`). `json`, `scan` and
//! `cache` serve the command-line front end.

pub mod arith;
pub mod cache;
pub mod classpoly;
pub mod embed;
pub mod error;
pub mod json;
pub mod local;
pub mod quad;
pub mod scan;
pub mod trace;

pub use error::{Error, Result};
