// SPDX-License-Identifier: Apache-2.0

//! Structural analyses: validation, symbolic balance equations, DAG
//! decomposition and the quasi-static schedule.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{PsadfGraph, RateExpr};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticKind {
    Structure,
    Grammar,
    Domain,
    Modifier,
    SelfLoop,
    Acyclicity,
    Consistency,
    Liveness,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Structure => "structure",
            DiagnosticKind::Grammar => "grammar",
            DiagnosticKind::Domain => "domain",
            DiagnosticKind::Modifier => "modifier",
            DiagnosticKind::SelfLoop => "self-loop",
            DiagnosticKind::Acyclicity => "acyclicity",
            DiagnosticKind::Consistency => "consistency",
            DiagnosticKind::Liveness => "liveness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub element: String,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, element: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.kind, self.element, self.message)
    }
}

fn channel_name(g: &PsadfGraph, ci: usize) -> String {
    let c = &g.channels[ci];
    format!("{}->{}", c.src, c.dst)
}

/// Runs every structural check and reports all violations.
pub fn validate(g: &PsadfGraph) -> Vec<Diagnostic> {
    use DiagnosticKind::*;
    let mut out = Vec::new();

    if g.actors.is_empty() {
        out.push(Diagnostic::new(Structure, &g.name, "graph has no actors"));
    }
    let mut names = BTreeSet::new();
    for a in &g.actors {
        if !names.insert(a.name.as_str()) {
            out.push(Diagnostic::new(Structure, &a.name, "duplicate actor"));
        }
    }
    let mut params = BTreeSet::new();
    for n in g
        .rate_params
        .iter()
        .map(|p| &p.name)
        .chain(g.duration_params.iter().map(|p| &p.name))
    {
        if !params.insert(n.as_str()) {
            out.push(Diagnostic::new(Structure, n, "duplicate parameter"));
        }
    }
    let mut endpoints_ok = true;
    for (ci, c) in g.channels.iter().enumerate() {
        for end in [&c.src, &c.dst] {
            if g.actor_index(end).is_none() {
                endpoints_ok = false;
                out.push(Diagnostic::new(
                    Structure,
                    channel_name(g, ci),
                    format!("unknown actor {end}"),
                ));
            }
        }
    }
    if g.token_count() == 0 {
        out.push(Diagnostic::new(Structure, &g.name, "graph has no initial tokens"));
    }
    if endpoints_ok && !g.actors.is_empty() && !is_connected(g) {
        out.push(Diagnostic::new(Structure, &g.name, "graph is not connected"));
    }

    // grammar: every identifier refers to a parameter of the right sort
    for (ci, c) in g.channels.iter().enumerate() {
        for r in [&c.production, &c.consumption] {
            for f in r.factors().keys() {
                if g.rate_param(f).is_none() {
                    out.push(Diagnostic::new(
                        Grammar,
                        channel_name(g, ci),
                        format!("{f} is not a declared rate parameter"),
                    ));
                }
            }
        }
    }
    for a in &g.actors {
        for (d, c) in a.exec.terms() {
            if g.duration_param(d).is_none() {
                out.push(Diagnostic::new(
                    Grammar,
                    &a.name,
                    format!("{d} is not a declared duration parameter"),
                ));
            }
            if c.is_negative() {
                out.push(Diagnostic::new(Grammar, &a.name, "negative execution-time coefficient"));
            }
        }
        if a.exec.constant_term().is_negative() {
            out.push(Diagnostic::new(Grammar, &a.name, "negative execution-time constant"));
        }
    }
    for (k, c) in g.constraints.iter().enumerate() {
        let rates = c.variables().filter(|v| g.rate_param(v).is_some()).count();
        let durs = c.variables().filter(|v| g.duration_param(v).is_some()).count();
        let element = format!("constraint {}", k + 1);
        if rates + durs != c.terms.len() {
            out.push(Diagnostic::new(
                Grammar,
                element,
                "constraint mentions an undeclared parameter",
            ));
        } else if rates > 0 && durs > 0 {
            out.push(Diagnostic::new(
                Grammar,
                element,
                "constraint mixes rate and duration parameters",
            ));
        } else if c.terms.is_empty() {
            out.push(Diagnostic::new(Grammar, element, "constraint has no variables"));
        }
    }

    for p in &g.rate_params {
        if p.lo < 1 || p.lo > p.hi {
            out.push(Diagnostic::new(
                Domain,
                &p.name,
                "rate bounds must satisfy 1 <= lo <= hi",
            ));
        }
    }
    for p in &g.duration_params {
        if p.lo.is_negative() || p.lo > p.hi {
            out.push(Diagnostic::new(
                Domain,
                &p.name,
                "duration bounds must satisfy 0 <= lo <= hi",
            ));
        }
    }

    for (ci, c) in g.channels.iter().enumerate() {
        if c.is_self_loop() {
            let ok = c.production == c.consumption && c.consumption.as_constant() == Some(c.initial_tokens as u64);
            if !ok {
                out.push(Diagnostic::new(
                    SelfLoop,
                    channel_name(g, ci),
                    "self-loops need equal constant rates and that many initial tokens",
                ));
            }
        }
    }

    if !endpoints_ok {
        return out;
    }

    let dag = match dag_decompose(g) {
        Ok(d) => Some(d),
        Err(e) => {
            out.push(Diagnostic::new(Acyclicity, &g.name, e.to_string()));
            None
        }
    };
    if let Some(dag) = &dag {
        let mut has_in = vec![false; g.actors.len()];
        let mut has_out = vec![false; g.actors.len()];
        for &ci in &dag.dag {
            let c = &g.channels[ci];
            has_out[g.actor_index(&c.src).unwrap()] = true;
            has_in[g.actor_index(&c.dst).unwrap()] = true;
        }
        for &ci in &dag.removed {
            let c = &g.channels[ci];
            if c.is_self_loop() {
                continue;
            }
            if has_out[g.actor_index(&c.src).unwrap()] {
                out.push(Diagnostic::new(
                    Acyclicity,
                    channel_name(g, ci),
                    format!(
                        "producer {} of a token channel is not a sink of the token-free subgraph",
                        c.src
                    ),
                ));
            }
            if has_in[g.actor_index(&c.dst).unwrap()] {
                out.push(Diagnostic::new(
                    Acyclicity,
                    channel_name(g, ci),
                    format!(
                        "consumer {} of a token channel is not a source of the token-free subgraph",
                        c.dst
                    ),
                ));
            }
        }
    }

    let rv = match repetition_vector(g) {
        Ok(rv) => Some(rv),
        Err(e) => {
            out.push(Diagnostic::new(Consistency, &g.name, e.to_string()));
            None
        }
    };

    for p in &g.rate_params {
        let Some(m) = &p.modifier else { continue };
        if g.actor_index(&m.actor).is_none() {
            out.push(Diagnostic::new(
                Modifier,
                &p.name,
                format!("modifier actor {} does not exist", m.actor),
            ));
            continue;
        }
        for f in m.period.factors().keys() {
            if g.rate_param(f).is_none() {
                out.push(Diagnostic::new(
                    Grammar,
                    &p.name,
                    format!("{f} in change period is not a rate parameter"),
                ));
            }
        }
        if let Some(rv) = &rv {
            if rv.get(&m.actor) != Some(&m.period) {
                out.push(Diagnostic::new(
                    Modifier,
                    &p.name,
                    format!(
                        "#{} = {} differs from change period {}: parameters may only change between iterations",
                        m.actor,
                        rv.get(&m.actor).map(|r| r.to_string()).unwrap_or_default(),
                        m.period
                    ),
                ));
            }
        }
    }

    // local-iteration coverage on token channels, checked at the largest
    // rate point of the declared box
    if let (Some(rv), Some(dag)) = (&rv, &dag) {
        let top: crate::poly::Point = g
            .rate_params
            .iter()
            .map(|p| (p.name.clone(), Rational::from_integer(p.hi.max(1).into())))
            .collect();
        for &ci in &dag.removed {
            let c = &g.channels[ci];
            if c.is_self_loop() {
                continue;
            }
            let need = rv
                .get(&c.dst)
                .and_then(|n| n.checked_mul(&c.consumption))
                .and_then(|r| r.evaluate(&top).ok());
            match need {
                Some(k) if k <= c.initial_tokens as u64 => {}
                _ => out.push(Diagnostic::new(
                    Liveness,
                    channel_name(g, ci),
                    "initial tokens do not cover one iteration of the consumer",
                )),
            }
        }
    }
    out
}

fn is_connected(g: &PsadfGraph) -> bool {
    let n = g.actors.len();
    let mut adj = vec![Vec::new(); n];
    for c in &g.channels {
        let (s, d) = (g.actor_index(&c.src).unwrap(), g.actor_index(&c.dst).unwrap());
        adj[s].push(d);
        adj[d].push(s);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Firing counts per iteration as monomials, in actor declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepetitionVector {
    pub entries: Vec<(String, RateExpr)>,
}

impl RepetitionVector {
    pub fn get(&self, actor: &str) -> Option<&RateExpr> {
        self.entries.iter().find(|(a, _)| a == actor).map(|(_, r)| r)
    }
}

impl fmt::Display for RepetitionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(a, r)| format!("{a}:{r}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Monomial with integer (possibly negative) exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Laurent {
    coef: Rational,
    exps: BTreeMap<String, i64>,
}

impl Laurent {
    fn one() -> Self {
        Laurent {
            coef: Rational::one(),
            exps: BTreeMap::new(),
        }
    }

    fn mul_rate(&self, r: &RateExpr, sign: i64) -> Self {
        let k = Rational::from_integer(r.coefficient().into());
        let coef = if sign > 0 { &self.coef * k } else { &self.coef / k };
        let mut exps = self.exps.clone();
        for (n, e) in r.factors() {
            *exps.entry(n.clone()).or_insert(0) += sign * (*e as i64);
        }
        exps.retain(|_, e| *e != 0);
        Laurent { coef, exps }
    }
}

/// Minimal monomial solution of the balance equations.
pub fn repetition_vector(g: &PsadfGraph) -> Result<RepetitionVector> {
    let n = g.actors.len();
    if n == 0 {
        return Err(Error::EmptyInput("graph has no actors"));
    }
    let idx = |name: &str| {
        g.actor_index(name)
            .ok_or_else(|| Error::InvalidGraph(format!("unknown actor {name}")))
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in g.channels.iter().enumerate() {
        adj[idx(&c.src)?].push(ci);
        adj[idx(&c.dst)?].push(ci);
    }
    let mut sol: Vec<Option<Laurent>> = vec![None; n];
    sol[0] = Some(Laurent::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &ci in &adj[v] {
            let c = &g.channels[ci];
            let (s, d) = (idx(&c.src)?, idx(&c.dst)?);
            // production · #src = consumption · #dst
            let (other, val) = if s == v {
                (
                    d,
                    sol[v]
                        .as_ref()
                        .unwrap()
                        .mul_rate(&c.production, 1)
                        .mul_rate(&c.consumption, -1),
                )
            } else {
                (
                    s,
                    sol[v]
                        .as_ref()
                        .unwrap()
                        .mul_rate(&c.consumption, 1)
                        .mul_rate(&c.production, -1),
                )
            };
            if sol[other].is_none() {
                sol[other] = Some(val);
                queue.push_back(other);
            }
        }
    }
    if sol.iter().any(Option::is_none) {
        return Err(Error::InvalidGraph("graph is not connected".into()));
    }
    let sol: Vec<Laurent> = sol.into_iter().map(Option::unwrap).collect();
    for (ci, c) in g.channels.iter().enumerate() {
        let (s, d) = (idx(&c.src)?, idx(&c.dst)?);
        let lhs = sol[s].mul_rate(&c.production, 1);
        let rhs = sol[d].mul_rate(&c.consumption, 1);
        if lhs != rhs {
            return Err(Error::Inconsistent(format!(
                "balance equation fails on channel {}",
                channel_name(g, ci)
            )));
        }
    }

    let mut min_exp: BTreeMap<String, i64> = BTreeMap::new();
    for s in &sol {
        for name in s.exps.keys() {
            min_exp.insert(name.clone(), 0);
        }
    }
    for s in &sol {
        for (name, m) in min_exp.iter_mut() {
            *m = (*m).min(*s.exps.get(name).unwrap_or(&0));
        }
    }
    let mut denom_lcm = BigInt::one();
    let mut numer_gcd = BigInt::zero();
    for s in &sol {
        denom_lcm = denom_lcm.lcm(s.coef.denom());
    }
    for s in &sol {
        let v = (&s.coef * Rational::from_integer(denom_lcm.clone())).to_integer();
        numer_gcd = numer_gcd.gcd(&v);
    }
    let mut entries = Vec::with_capacity(n);
    for (a, s) in g.actors.iter().zip(&sol) {
        let k = (&s.coef * Rational::from_integer(denom_lcm.clone())).to_integer() / &numer_gcd;
        let k = k
            .to_u64()
            .ok_or_else(|| Error::UnsupportedRateStructure(format!("repetition count of {} overflows", a.name)))?;
        let mut factors = BTreeMap::new();
        for (name, m) in &min_exp {
            let e = s.exps.get(name).unwrap_or(&0) - m;
            if e > 0 {
                factors.insert(name.clone(), e as u32);
            }
        }
        entries.push((a.name.clone(), RateExpr::from_parts(k, factors)));
    }
    Ok(RepetitionVector { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagDecomposition {
    /// Token-free, non-self-loop channels.
    pub dag: Vec<usize>,
    /// Channels carrying initial tokens plus all self-loops.
    pub removed: Vec<usize>,
}

pub fn dag_decompose(g: &PsadfGraph) -> Result<DagDecomposition> {
    let mut dag = Vec::new();
    let mut removed = Vec::new();
    for (ci, c) in g.channels.iter().enumerate() {
        if c.initial_tokens > 0 || c.is_self_loop() {
            removed.push(ci);
        } else {
            dag.push(ci);
        }
    }
    let order = topo_order(g, &dag)?;
    if order.len() < g.actors.len() {
        let placed: BTreeSet<usize> = order.into_iter().collect();
        let stuck: Vec<&str> = (0..g.actors.len())
            .filter(|i| !placed.contains(i))
            .map(|i| g.actors[i].name.as_str())
            .collect();
        return Err(Error::DeadlockedCycle(format!(
            "token-free cycle through {}",
            stuck.join(", ")
        )));
    }
    Ok(DagDecomposition { dag, removed })
}

/// Kahn's algorithm with ties broken by actor name. Returns a partial
/// order if the subgraph is cyclic.
fn topo_order(g: &PsadfGraph, dag: &[usize]) -> Result<Vec<usize>> {
    let n = g.actors.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &ci in dag {
        let c = &g.channels[ci];
        let s = g
            .actor_index(&c.src)
            .ok_or_else(|| Error::InvalidGraph(format!("unknown actor {}", c.src)))?;
        let d = g
            .actor_index(&c.dst)
            .ok_or_else(|| Error::InvalidGraph(format!("unknown actor {}", c.dst)))?;
        succ[s].push(d);
        indeg[d] += 1;
    }
    let mut ready: BTreeSet<(&str, usize)> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| (g.actors[i].name.as_str(), i))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.pop_first() {
        let v = first.1;
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert((g.actors[w].name.as_str(), w));
            }
        }
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub actor: String,
    pub count: RateExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiStaticSchedule {
    pub entries: Vec<ScheduleEntry>,
}

impl fmt::Display for QuasiStaticSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                if e.count.is_one() {
                    e.actor.clone()
                } else {
                    let c = e.count.to_string();
                    if c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                        format!("{}^{c}", e.actor)
                    } else {
                        format!("{}^{{{c}}}", e.actor)
                    }
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Topological order of the token-free subgraph with repetition counts.
pub fn quasi_static_schedule(g: &PsadfGraph) -> Result<QuasiStaticSchedule> {
    let dag = dag_decompose(g)?;
    let rv = repetition_vector(g)?;
    let order = topo_order(g, &dag.dag)?;
    let entries = order
        .into_iter()
        .map(|i| {
            let name = &g.actors[i].name;
            ScheduleEntry {
                actor: name.clone(),
                count: rv.get(name).cloned().expect("every actor has a count"),
            }
        })
        .collect();
    Ok(QuasiStaticSchedule { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Actor, Channel, Modifier, RateParam, TimeExpr};

    fn actor(name: &str) -> Actor {
        Actor {
            name: name.into(),
            exec: TimeExpr::constant(Rational::one()),
        }
    }

    fn chan(src: &str, dst: &str, p: &str, c: &str, init: u32) -> Channel {
        Channel {
            src: src.into(),
            dst: dst.into(),
            production: p.parse().unwrap(),
            consumption: c.parse().unwrap(),
            initial_tokens: init,
        }
    }

    fn rate(name: &str, lo: i64, hi: i64) -> RateParam {
        RateParam {
            name: name.into(),
            lo,
            hi,
            modifier: None,
        }
    }

    /// Topology shared by the worked parametric example.
    fn example() -> PsadfGraph {
        PsadfGraph {
            name: "ex".into(),
            rate_params: vec![rate("p", 10, 2000), rate("q", 10, 15), rate("s", 100, 1500)],
            duration_params: vec![],
            actors: ["A", "B", "C", "D", "E"].iter().map(|n| actor(n)).collect(),
            channels: vec![
                chan("A", "A", "1", "1", 1),
                chan("D", "D", "1", "1", 1),
                chan("C", "C", "1", "1", 1),
                chan("E", "A", "1", "1", 2),
                chan("A", "B", "p", "1", 0),
                chan("B", "C", "q", "1", 0),
                chan("A", "D", "s", "1", 0),
                chan("C", "E", "1", "p*q", 0),
                chan("D", "E", "1", "s", 0),
            ],
            constraints: vec![],
        }
    }

    #[test]
    fn example_validates_clean() {
        assert_eq!(validate(&example()), vec![]);
    }

    #[test]
    fn example_repetition_vector_and_schedule() {
        let g = example();
        assert_eq!(
            repetition_vector(&g).unwrap().to_string(),
            "{A:1, B:p, C:p*q, D:s, E:1}"
        );
        assert_eq!(quasi_static_schedule(&g).unwrap().to_string(), "A B^p C^{p*q} D^s E");
        let d = dag_decompose(&g).unwrap();
        assert_eq!(d.removed, vec![0, 1, 2, 3]);
        assert_eq!(d.dag, vec![4, 5, 6, 7, 8]);
    }

    #[test]
    fn back_edge_into_non_source_is_flagged() {
        let mut g = example();
        g.channels.push(chan("E", "B", "1", "p", 0));
        let diags = validate(&g);
        assert!(diags.iter().any(|d| d.kind == DiagnosticKind::Acyclicity), "{diags:?}");
        // token-free back edge closes a cycle
        assert!(dag_decompose(&g).is_err());
    }

    #[test]
    fn back_edge_with_tokens_to_non_source_is_flagged() {
        let mut g = example();
        g.channels.push(chan("E", "B", "1", "1", 3));
        let diags = validate(&g);
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::Acyclicity && d.message.contains("consumer B")));
    }

    #[test]
    fn modifier_period_matches_repetition_count() {
        let mut g = example();
        g.rate_params[1].modifier = Some(Modifier {
            actor: "B".into(),
            period: RateExpr::param("p"),
        });
        assert_eq!(validate(&g), vec![]);
        g.rate_params[1].modifier = Some(Modifier {
            actor: "B".into(),
            period: RateExpr::one(),
        });
        assert!(validate(&g).iter().any(|d| d.kind == DiagnosticKind::Modifier));
    }

    #[test]
    fn self_loop_pattern() {
        let mut g = example();
        g.channels[0].initial_tokens = 2;
        assert!(validate(&g).iter().any(|d| d.kind == DiagnosticKind::SelfLoop));
    }

    #[test]
    fn gcd_repetition_vector() {
        let g = PsadfGraph {
            name: "r".into(),
            actors: vec![actor("A"), actor("B")],
            channels: vec![chan("A", "B", "2", "3", 0), chan("B", "A", "3", "2", 6)],
            ..Default::default()
        };
        assert_eq!(repetition_vector(&g).unwrap().to_string(), "{A:3, B:2}");
    }

    #[test]
    fn inconsistent_rates() {
        let g = PsadfGraph {
            name: "r".into(),
            actors: vec![actor("A"), actor("B")],
            channels: vec![chan("A", "B", "2", "1", 0), chan("B", "A", "1", "1", 1)],
            ..Default::default()
        };
        assert!(matches!(repetition_vector(&g), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn deadlocked_two_cycle_and_trivial_cases() {
        let g = PsadfGraph {
            name: "r".into(),
            actors: vec![actor("A"), actor("B")],
            channels: vec![chan("A", "B", "1", "1", 0), chan("B", "A", "1", "1", 0)],
            ..Default::default()
        };
        assert!(matches!(dag_decompose(&g), Err(Error::DeadlockedCycle(_))));

        let single = PsadfGraph {
            name: "x".into(),
            actors: vec![actor("X")],
            channels: vec![chan("X", "X", "1", "1", 1)],
            ..Default::default()
        };
        let d = dag_decompose(&single).unwrap();
        assert!(d.dag.is_empty());
        assert_eq!(d.removed, vec![0]);
        assert_eq!(quasi_static_schedule(&single).unwrap().to_string(), "X");
        assert_eq!(
            quasi_static_schedule(&single).unwrap().entries[0].count,
            RateExpr::one()
        );
    }

    #[test]
    fn diamond_breaks_ties_by_name() {
        let g = PsadfGraph {
            name: "d".into(),
            actors: vec![actor("D"), actor("C"), actor("B"), actor("A")],
            channels: vec![
                chan("A", "C", "1", "1", 0),
                chan("A", "B", "1", "1", 0),
                chan("B", "D", "1", "1", 0),
                chan("C", "D", "1", "1", 0),
                chan("D", "A", "1", "1", 1),
            ],
            ..Default::default()
        };
        assert_eq!(quasi_static_schedule(&g).unwrap().to_string(), "A B C D");
    }
}
