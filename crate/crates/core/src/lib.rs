// SPDX-License-Identifier: Apache-2.0

//! Worst-case throughput analysis for synchronous dataflow (SDF),
//! scenario-aware dataflow (SADF) and parametric-rate / parametric
//! execution-time SADF (PSADF) graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`maxplus`]: exact (max,+) scalars, matrices, the (max,+) automaton
//!   graph and maximum cycle mean.
//! - [`graph`]: the dataflow graph model, validation, symbolic repetition
//!   vectors, quasi-static schedules and binding to concrete SDF graphs.
//! - [`sdf`]: numeric characteristic-matrix extraction by one-iteration
//!   timestamp simulation, plus SADF scenario combination.
//! - [`poly`] and [`symbolic`]: symbolic weights and the recursive,
//!   conflict-splitting characteristic-matrix extraction.
//! - [`paramopt`]: parameter regions, exact feasibility and certified
//!   maximisation of matrix entries, and the end-to-end worst-case pipeline.
//! - [`model`], [`report`] and [`check`]: the text model format, JSON
//!   reports and the symbolic-vs-numeric cross-validation harness.
//!
//! All arithmetic is exact ([`Rational`] is an arbitrary precision fraction).

pub mod check;
pub mod error;
pub mod graph;
pub mod maxplus;
pub mod model;
pub mod paramopt;
pub mod poly;
pub mod rational;
pub mod report;
pub mod sdf;
pub mod symbolic;

pub use error::{Error, Result};
pub use rational::Rational;
