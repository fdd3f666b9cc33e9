// SPDX-License-Identifier: Apache-2.0

//! Concrete SDF graphs and binding of a parameter point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{repetition_vector, DurationKind, PsadfGraph};
use crate::error::{Error, Result};
use crate::poly::Point;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdfActor {
    pub name: String,
    pub exec: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdfChannel {
    pub src: usize,
    pub dst: usize,
    pub production: u64,
    pub consumption: u64,
    pub initial_tokens: u64,
}

/// A synchronous dataflow graph with constant rates and execution times.
///
/// `iteration` optionally fixes the firing counts of one iteration; it
/// must balance every channel. Without it the minimal repetition vector
/// is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdfGraph {
    pub name: String,
    pub actors: Vec<SdfActor>,
    pub channels: Vec<SdfChannel>,
    pub iteration: Option<Vec<u64>>,
}

impl SdfGraph {
    pub fn token_count(&self) -> usize {
        self.channels.iter().map(|c| c.initial_tokens as usize).sum()
    }

    pub fn token_labels(&self) -> Vec<String> {
        (1..=self.token_count()).map(|i| format!("t{i}")).collect()
    }

    pub fn actor_index(&self, name: &str) -> Option<usize> {
        self.actors.iter().position(|a| a.name == name)
    }

    /// Minimal positive integer solution of the balance equations.
    pub fn repetition_vector(&self) -> Result<Vec<u64>> {
        let n = self.actors.len();
        if n == 0 {
            return Err(Error::EmptyInput("graph has no actors"));
        }
        let mut adj = vec![Vec::new(); n];
        for (ci, c) in self.channels.iter().enumerate() {
            if c.src >= n || c.dst >= n || c.production == 0 || c.consumption == 0 {
                return Err(Error::InvalidGraph(format!("channel {ci} is malformed")));
            }
            adj[c.src].push(ci);
            adj[c.dst].push(ci);
        }
        let mut sol: Vec<Option<Rational>> = vec![None; n];
        sol[0] = Some(Rational::one());
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for &ci in &adj[v] {
                let c = &self.channels[ci];
                let prod = Rational::from_integer(c.production.into());
                let cons = Rational::from_integer(c.consumption.into());
                let cur = sol[v].clone().unwrap();
                let (other, val) = if c.src == v {
                    (c.dst, cur * prod / cons)
                } else {
                    (c.src, cur * cons / prod)
                };
                if sol[other].is_none() {
                    sol[other] = Some(val);
                    stack.push(other);
                }
            }
        }
        if sol.iter().any(Option::is_none) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        let sol: Vec<Rational> = sol.into_iter().map(Option::unwrap).collect();
        let l = sol.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = sol
            .iter()
            .map(|r| (r * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let counts = ints
            .iter()
            .map(|v| {
                (v / &g)
                    .to_u64()
                    .ok_or_else(|| Error::Overflow("repetition vector".into()))
            })
            .collect::<Result<Vec<u64>>>()?;
        self.check_balance(&counts)?;
        Ok(counts)
    }

    fn check_balance(&self, counts: &[u64]) -> Result<()> {
        if counts.len() != self.actors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.actors.len(),
                found: counts.len(),
            });
        }
        for c in &self.channels {
            let lhs = c.production as u128 * counts[c.src] as u128;
            let rhs = c.consumption as u128 * counts[c.dst] as u128;
            if lhs != rhs {
                return Err(Error::Inconsistent(format!(
                    "balance equation fails on channel {}->{}",
                    self.actors[c.src].name, self.actors[c.dst].name
                )));
            }
        }
        Ok(())
    }

    /// Firing counts of the simulated iteration.
    pub fn iteration_counts(&self) -> Result<Vec<u64>> {
        match &self.iteration {
            Some(v) => {
                self.check_balance(v)?;
                Ok(v.clone())
            }
            None => self.repetition_vector(),
        }
    }

    pub fn scale_durations(&self, c: &Rational) -> SdfGraph {
        let mut g = self.clone();
        for a in &mut g.actors {
            a.exec = &a.exec * c;
        }
        g
    }
}

/// Result of binding: the concrete graph plus non-fatal warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub graph: SdfGraph,
    pub warnings: Vec<String>,
}

/// Evaluates every rate and execution time at `point`. The iteration is
/// fixed to the symbolic repetition vector evaluated at the point, so the
/// bound graph's matrix is indexed exactly like the symbolic one.
pub fn bind(g: &PsadfGraph, point: &Point) -> Result<Binding> {
    let mut warnings = Vec::new();
    for p in &g.rate_params {
        let v = point
            .get(&p.name)
            .ok_or_else(|| Error::Binding(format!("rate parameter {} is not assigned", p.name)))?;
        if !v.is_integer() || !v.is_positive() {
            return Err(Error::Binding(format!(
                "rate parameter {} must be a positive integer, got {}",
                p.name,
                rational::to_display(v)
            )));
        }
        let iv = v.to_integer();
        if iv < BigInt::from(p.lo) || iv > BigInt::from(p.hi) {
            warnings.push(format!("{} = {} lies outside [{}, {}]", p.name, iv, p.lo, p.hi));
        }
    }
    for p in &g.duration_params {
        let v = point
            .get(&p.name)
            .ok_or_else(|| Error::Binding(format!("duration parameter {} is not assigned", p.name)))?;
        if v.is_negative() {
            return Err(Error::Binding(format!("duration parameter {} is negative", p.name)));
        }
        if v < &p.lo || v > &p.hi {
            warnings.push(format!(
                "{} = {} lies outside [{}, {}]",
                p.name,
                rational::to_display(v),
                rational::to_display(&p.lo),
                rational::to_display(&p.hi)
            ));
        }
        if p.kind == DurationKind::Integer && !v.is_integer() {
            warnings.push(format!(
                "{} is declared integer but bound to {}",
                p.name,
                rational::to_display(v)
            ));
        }
    }
    for name in point.keys() {
        if g.rate_param(name).is_none() && g.duration_param(name).is_none() {
            warnings.push(format!("{name} is not a parameter of {}", g.name));
        }
    }
    for k in &g.constraints {
        if k.holds(point) == Some(false) {
            warnings.push(format!("constraint {k} is violated"));
        }
    }

    let actors = g
        .actors
        .iter()
        .map(|a| {
            Ok(SdfActor {
                name: a.name.clone(),
                exec: a.exec.evaluate(point)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let channels = g
        .channels
        .iter()
        .map(|c| {
            Ok(SdfChannel {
                src: g
                    .actor_index(&c.src)
                    .ok_or_else(|| Error::InvalidGraph(format!("unknown actor {}", c.src)))?,
                dst: g
                    .actor_index(&c.dst)
                    .ok_or_else(|| Error::InvalidGraph(format!("unknown actor {}", c.dst)))?,
                production: c.production.evaluate(point)?,
                consumption: c.consumption.evaluate(point)?,
                initial_tokens: c.initial_tokens as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rv = repetition_vector(g)?;
    let iteration = rv
        .entries
        .iter()
        .map(|(_, r)| r.evaluate(point))
        .collect::<Result<Vec<u64>>>()?;
    let graph = SdfGraph {
        name: g.name.clone(),
        actors,
        channels,
        iteration: Some(iteration),
    };
    graph.iteration_counts()?;
    Ok(Binding { graph, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn two_actor(prod: u64, cons: u64) -> SdfGraph {
        SdfGraph {
            name: "g".into(),
            actors: vec![
                SdfActor {
                    name: "A".into(),
                    exec: int(1),
                },
                SdfActor {
                    name: "B".into(),
                    exec: int(1),
                },
            ],
            channels: vec![
                SdfChannel {
                    src: 0,
                    dst: 1,
                    production: prod,
                    consumption: cons,
                    initial_tokens: 0,
                },
                SdfChannel {
                    src: 1,
                    dst: 0,
                    production: cons,
                    consumption: prod,
                    initial_tokens: prod * cons,
                },
            ],
            iteration: None,
        }
    }

    #[test]
    fn minimal_repetition_vector() {
        assert_eq!(two_actor(2, 3).repetition_vector().unwrap(), vec![3, 2]);
        assert_eq!(two_actor(4, 6).repetition_vector().unwrap(), vec![3, 2]);
    }

    #[test]
    fn explicit_iteration_must_balance() {
        let mut g = two_actor(2, 3);
        g.iteration = Some(vec![6, 4]);
        assert_eq!(g.iteration_counts().unwrap(), vec![6, 4]);
        g.iteration = Some(vec![6, 5]);
        assert!(g.iteration_counts().is_err());
    }

    #[test]
    fn scaling_multiplies_exec_times() {
        let g = two_actor(1, 1).scale_durations(&frac(1, 5));
        assert_eq!(g.actors[0].exec, frac(1, 5));
    }
}
