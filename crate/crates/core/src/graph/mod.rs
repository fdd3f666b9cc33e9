// SPDX-License-Identifier: Apache-2.0

//! Dataflow graph model: PSADF graphs with parametric rates and execution
//! times, concrete SDF graphs, and the structural analyses that feed the
//! numeric and symbolic extractors.

mod analysis;
mod bind;
mod expr;

use std::collections::BTreeSet;
use std::fmt;

pub use analysis::{
    dag_decompose, quasi_static_schedule, repetition_vector, validate, DagDecomposition, Diagnostic, DiagnosticKind,
    QuasiStaticSchedule, RepetitionVector, ScheduleEntry,
};
pub use bind::{bind, Binding, SdfActor, SdfChannel, SdfGraph};
pub use expr::{RateExpr, TimeExpr};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modifier {
    pub actor: String,
    pub period: RateExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateParam {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub modifier: Option<Modifier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DurationKind {
    Continuous,
    Integer,
}

impl fmt::Display for DurationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DurationKind::Continuous => "continuous",
            DurationKind::Integer => "integer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationParam {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
    pub kind: DurationKind,
}

/// `Σ c_k · x_k ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub terms: Vec<(String, Rational)>,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(String, Rational)>, bound: Rational) -> Self {
        LinearConstraint { terms, bound }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(n, _)| n.as_str())
    }

    pub fn lhs(&self, point: &crate::poly::Point) -> Option<Rational> {
        let mut acc = Rational::from_integer(0.into());
        for (n, c) in &self.terms {
            acc += c * point.get(n)?;
        }
        Some(acc)
    }

    pub fn holds(&self, point: &crate::poly::Point) -> Option<bool> {
        self.lhs(point).map(|v| v <= self.bound)
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::{One, Signed};
        for (i, (n, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                f.write_str(if i == 0 { "-" } else { " - " })?;
            } else if i > 0 {
                f.write_str(" + ")?;
            }
            if mag.is_one() {
                f.write_str(n)?;
            } else {
                write!(f, "{}*{n}", rational::to_display(&mag))?;
            }
        }
        write!(f, " <= {}", rational::to_display(&self.bound))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub name: String,
    pub exec: TimeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub src: String,
    pub dst: String,
    pub production: RateExpr,
    pub consumption: RateExpr,
    pub initial_tokens: u32,
}

impl Channel {
    pub fn is_self_loop(&self) -> bool {
        self.src == self.dst
    }
}

/// One initial token: channel index, position (1 = oldest) and label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSlot {
    pub channel: usize,
    pub position: u32,
    pub label: String,
}

/// A parametric graph. SDF graphs are the special case without
/// parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PsadfGraph {
    pub name: String,
    pub rate_params: Vec<RateParam>,
    pub duration_params: Vec<DurationParam>,
    pub actors: Vec<Actor>,
    pub channels: Vec<Channel>,
    pub constraints: Vec<LinearConstraint>,
}

impl PsadfGraph {
    pub fn actor_index(&self, name: &str) -> Option<usize> {
        self.actors.iter().position(|a| a.name == name)
    }

    pub fn actor(&self, name: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.name == name)
    }

    pub fn rate_param(&self, name: &str) -> Option<&RateParam> {
        self.rate_params.iter().find(|p| p.name == name)
    }

    pub fn duration_param(&self, name: &str) -> Option<&DurationParam> {
        self.duration_params.iter().find(|p| p.name == name)
    }

    pub fn duration_names(&self) -> BTreeSet<String> {
        self.duration_params.iter().map(|p| p.name.clone()).collect()
    }

    pub fn is_parametric(&self) -> bool {
        !self.rate_params.is_empty() || !self.duration_params.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.channels.iter().map(|c| c.initial_tokens as usize).sum()
    }

    /// Initial tokens labelled `t1 … tn` in channel order, oldest first.
    pub fn token_slots(&self) -> Vec<TokenSlot> {
        let mut out = Vec::new();
        for (ci, ch) in self.channels.iter().enumerate() {
            for pos in 1..=ch.initial_tokens {
                out.push(TokenSlot {
                    channel: ci,
                    position: pos,
                    label: format!("t{}", out.len() + 1),
                });
            }
        }
        out
    }

    pub fn token_labels(&self) -> Vec<String> {
        self.token_slots().into_iter().map(|s| s.label).collect()
    }

    pub fn rate_constraints(&self) -> Vec<&LinearConstraint> {
        self.constraints
            .iter()
            .filter(|c| c.variables().all(|v| self.rate_param(v).is_some()))
            .collect()
    }

    pub fn duration_constraints(&self) -> Vec<&LinearConstraint> {
        self.constraints
            .iter()
            .filter(|c| c.variables().all(|v| self.duration_param(v).is_some()))
            .filter(|c| !c.terms.is_empty())
            .collect()
    }

    /// Multiplies every execution time, duration bound and duration
    /// constraint bound by `c`; models a uniform platform speed change.
    pub fn scale_durations(&self, c: &Rational) -> PsadfGraph {
        let mut g = self.clone();
        // parameter terms scale through the parameter intervals
        for a in &mut g.actors {
            a.exec = TimeExpr::linear(a.exec.terms().clone(), a.exec.constant_term() * c);
        }
        for d in &mut g.duration_params {
            d.lo = &d.lo * c;
            d.hi = &d.hi * c;
        }
        let durations = self.duration_names();
        for k in &mut g.constraints {
            if k.variables().all(|v| durations.contains(v)) {
                k.bound = &k.bound * c;
            }
        }
        g
    }
}
