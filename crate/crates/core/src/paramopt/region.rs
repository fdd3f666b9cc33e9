// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::graph::{DurationKind, LinearConstraint, PsadfGraph};
use crate::poly::{Point, Polynomial};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Ge,
    Le,
}

/// `lhs ≥ rhs` or `lhs ≤ rhs`, recorded when a conflict is resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConflictConstraint {
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    pub relation: Relation,
}

impl ConflictConstraint {
    /// Builds `winner ≥ loser` with common terms cancelled. The
    /// polynomial that sorts first is printed on the left.
    pub fn prefer(winner: &Polynomial, loser: &Polynomial) -> Self {
        let diff = winner - loser;
        let (pos, neg) = diff.split_signs();
        if winner <= loser {
            ConflictConstraint {
                lhs: pos,
                rhs: neg,
                relation: Relation::Ge,
            }
        } else {
            ConflictConstraint {
                lhs: neg,
                rhs: pos,
                relation: Relation::Le,
            }
        }
    }

    /// The polynomial required to be nonnegative.
    pub fn difference(&self) -> Polynomial {
        match self.relation {
            Relation::Ge => &self.lhs - &self.rhs,
            Relation::Le => &self.rhs - &self.lhs,
        }
    }
}

impl fmt::Display for ConflictConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::Ge => ">=",
            Relation::Le => "<=",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RateBound {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DurationBound {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
    pub kind: DurationKind,
}

/// A closed subset of the parameter space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Region {
    pub rate_bounds: Vec<RateBound>,
    pub duration_bounds: Vec<DurationBound>,
    pub rate_constraints: Vec<LinearConstraint>,
    pub duration_constraints: Vec<LinearConstraint>,
    pub conflicts: Vec<ConflictConstraint>,
}

impl Region {
    /// The declared parameter space of a graph.
    pub fn from_graph(g: &PsadfGraph) -> Result<Region> {
        let mut r = Region {
            rate_bounds: g
                .rate_params
                .iter()
                .map(|p| RateBound {
                    name: p.name.clone(),
                    lo: p.lo,
                    hi: p.hi,
                })
                .collect(),
            duration_bounds: g
                .duration_params
                .iter()
                .map(|p| DurationBound {
                    name: p.name.clone(),
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    kind: p.kind,
                })
                .collect(),
            ..Default::default()
        };
        for c in &g.constraints {
            let rates = c.variables().all(|v| g.rate_param(v).is_some());
            let durs = c.variables().all(|v| g.duration_param(v).is_some());
            if rates && !c.terms.is_empty() {
                r.rate_constraints.push(c.clone());
            } else if durs && !c.terms.is_empty() {
                r.duration_constraints.push(c.clone());
            } else {
                return Err(Error::InvalidGraph(format!(
                    "constraint '{c}' must range over rate parameters only or duration parameters only"
                )));
            }
        }
        Ok(r)
    }

    pub fn with_conflict(&self, c: ConflictConstraint) -> Region {
        let mut r = self.clone();
        r.conflicts.push(c);
        r
    }

    pub fn is_rate(&self, name: &str) -> bool {
        self.rate_bounds.iter().any(|b| b.name == name)
    }

    pub fn is_duration(&self, name: &str) -> bool {
        self.duration_bounds.iter().any(|b| b.name == name)
    }

    /// Exact membership test.
    pub fn contains(&self, point: &Point) -> Result<bool> {
        let get = |n: &str| {
            point
                .get(n)
                .ok_or_else(|| Error::Binding(format!("parameter {n} is not assigned")))
        };
        for b in &self.rate_bounds {
            let v = get(&b.name)?;
            if !v.is_integer() || *v < rational::int(b.lo) || *v > rational::int(b.hi) {
                return Ok(false);
            }
        }
        for b in &self.duration_bounds {
            let v = get(&b.name)?;
            if *v < b.lo || *v > b.hi || (b.kind == DurationKind::Integer && !v.is_integer()) {
                return Ok(false);
            }
        }
        for c in self.rate_constraints.iter().chain(&self.duration_constraints) {
            for n in c.variables() {
                get(n)?;
            }
            if c.holds(point) != Some(true) {
                return Ok(false);
            }
        }
        for c in &self.conflicts {
            if c.difference().evaluate(point)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Human-readable constraint lines added by conflict resolution.
    pub fn conflict_lines(&self) -> Vec<String> {
        self.conflicts.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for b in &self.rate_bounds {
            parts.push(format!("{} in [{}, {}]", b.name, b.lo, b.hi));
        }
        for b in &self.duration_bounds {
            parts.push(format!(
                "{} in [{}, {}] {}",
                b.name,
                rational::to_display(&b.lo),
                rational::to_display(&b.hi),
                b.kind
            ));
        }
        for c in self.rate_constraints.iter().chain(&self.duration_constraints) {
            parts.push(c.to_string());
        }
        for c in &self.conflicts {
            parts.push(c.to_string());
        }
        f.write_str(&parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(s: &str) -> Polynomial {
        let d: BTreeSet<String> = ["a", "b", "c", "d", "e"].iter().map(|x| x.to_string()).collect();
        Polynomial::parse(s, &d).unwrap()
    }

    #[test]
    fn conflict_orientation() {
        let x = p("a+b+e+p*q*c");
        let y = p("a+e+s*d");
        assert_eq!(ConflictConstraint::prefer(&x, &y).to_string(), "b+p*q*c >= s*d");
        assert_eq!(ConflictConstraint::prefer(&y, &x).to_string(), "b+p*q*c <= s*d");
        assert_eq!(ConflictConstraint::prefer(&y, &x).difference(), p("s*d-b-p*q*c"));
    }
}
