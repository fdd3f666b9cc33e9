// SPDX-License-Identifier: Apache-2.0

//! Line-oriented text format for SDF, SADF and parametric graphs.
//!
//! ```text
//! psadf "example"
//! rateparam p in [10, 2000]
//! timeparam ci in [1, 5] continuous
//! actor A exec 30*ci
//! chan A -> B rates p : 1 init 0
//! constraint p + s <= 1400
//! ```
//!
//! SADF files add `scenario <name>` blocks of `actor <id> exec <const>`
//! overrides and an optional `fsm` block of `state <id> scenario <name>`,
//! `initial <id>` and `trans <id> -> <id>` lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{
    Actor, Channel, DurationKind, DurationParam, LinearConstraint, Modifier, PsadfGraph, RateParam, SdfActor,
    SdfChannel, SdfGraph, TimeExpr,
};
use crate::rational::{self, Rational};
use crate::sdf::{Fsm, ScenarioSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Sdf(SdfGraph),
    Sadf { name: String, set: ScenarioSet },
    Psadf(PsadfGraph),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Sdf(_) => "sdf",
            Model::Sadf { .. } => "sadf",
            Model::Psadf(_) => "psadf",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Model::Sdf(g) => &g.name,
            Model::Sadf { name, .. } => name,
            Model::Psadf(g) => &g.name,
        }
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Re-tags an expression error with its line number.
fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { message, .. } => perr(line, message),
        other => perr(line, other.to_string()),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident(line: usize, s: &str, what: &str) -> Result<String> {
    if is_identifier(s) {
        Ok(s.to_string())
    } else {
        Err(perr(line, format!("expected {what} identifier, found '{s}'")))
    }
}

/// Splits `[lo, hi] rest` into its parts.
fn interval(line: usize, s: &str) -> Result<(String, String, String)> {
    let s = s.trim_start();
    let body = s
        .strip_prefix('[')
        .ok_or_else(|| perr(line, "expected '[' to open an interval"))?;
    let (inner, rest) = body
        .split_once(']')
        .ok_or_else(|| perr(line, "expected ']' to close an interval"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| perr(line, "expected ',' inside an interval"))?;
    Ok((lo.trim().to_string(), hi.trim().to_string(), rest.trim().to_string()))
}

fn rational_lit(line: usize, s: &str) -> Result<Rational> {
    rational::parse(s).ok_or_else(|| perr(line, format!("expected a rational number, found '{s}'")))
}

fn int_lit(line: usize, s: &str) -> Result<i64> {
    s.parse()
        .map_err(|_| perr(line, format!("expected an integer, found '{s}'")))
}

/// `Σ ±k*x` with rational coefficients.
fn linear_expr(line: usize, s: &str) -> Result<Vec<(String, Rational)>> {
    let mut terms: Vec<(String, Rational)> = Vec::new();
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut negative = false;
    let mut cur = String::new();
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && !cur.trim().is_empty() && !cur.trim_end().ends_with('*') {
            chunks.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.trim().is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            cur.push(ch);
        }
    }
    chunks.push((negative, cur));
    for (neg, chunk) in chunks {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            return Err(perr(line, format!("empty term in '{s}'")));
        }
        let (coef, name) = match chunk.rsplit_once('*') {
            Some((k, n)) => (rational_lit(line, k.trim())?, n.trim()),
            None => (Rational::one(), chunk),
        };
        let name = ident(line, name, "parameter")?;
        let coef = if neg { -coef } else { coef };
        match terms.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += coef,
            None => terms.push((name, coef)),
        }
    }
    terms.retain(|(_, c)| !c.is_zero());
    if terms.is_empty() {
        return Err(perr(line, format!("constraint '{s}' has no variables")));
    }
    Ok(terms)
}

/// Parses `chan <src> -> <dst> rates <r> : <r> init <n>`.
fn channel(line: usize, rest: &str) -> Result<Channel> {
    let (src, rest) = rest
        .split_once("->")
        .ok_or_else(|| perr(line, "expected '->' in channel"))?;
    let rest = rest.trim();
    let (dst, rest) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| perr(line, "expected 'rates' after the channel destination"))?;
    let rest = rest
        .trim()
        .strip_prefix("rates")
        .ok_or_else(|| perr(line, "expected 'rates' after the channel destination"))?;
    let (rates, init) = rest
        .rsplit_once("init")
        .ok_or_else(|| perr(line, "expected 'init <int>' at the end of the channel"))?;
    let (prod, cons) = rates
        .split_once(':')
        .ok_or_else(|| perr(line, "expected '<production> : <consumption>'"))?;
    let tokens: u32 = init.trim().parse().map_err(|_| {
        perr(
            line,
            format!("expected a nonnegative token count, found '{}'", init.trim()),
        )
    })?;
    Ok(Channel {
        src: ident(line, src.trim(), "actor")?,
        dst: ident(line, dst.trim(), "actor")?,
        production: prod.trim().parse().map_err(at_line(line))?,
        consumption: cons.trim().parse().map_err(at_line(line))?,
        initial_tokens: tokens,
    })
}

#[derive(PartialEq)]
enum Section {
    Graph,
    Scenario,
    Fsm,
}

/// Scenario override: source line, actor, execution time.
type Override = (usize, String, Rational);

pub fn parse(text: &str) -> Result<Model> {
    let mut kind: Option<&str> = None;
    let mut g = PsadfGraph::default();
    let mut scenarios: Vec<(String, Vec<Override>)> = Vec::new();
    let mut fsm: Option<Fsm> = None;
    let mut section = Section::Graph;
    let mut fsm_initial_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (kw, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        if kind.is_none() {
            let k = match kw {
                "sdf" | "sadf" | "psadf" => kw,
                _ => {
                    return Err(perr(
                        line,
                        format!("expected a header 'sdf', 'sadf' or 'psadf', found '{kw}'"),
                    ))
                }
            };
            let name = rest
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or_else(|| perr(line, "expected a quoted model name"))?;
            g.name = name.to_string();
            kind = Some(k);
            continue;
        }
        let k = kind.unwrap();
        match (kw, &section) {
            ("sdf" | "sadf" | "psadf", _) => return Err(perr(line, "duplicate header")),
            ("rateparam", Section::Graph) if k == "psadf" => {
                let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let name = ident(line, name, "parameter")?;
                let rest = rest
                    .trim()
                    .strip_prefix("in")
                    .ok_or_else(|| perr(line, "expected 'in' after the parameter name"))?;
                let (lo, hi, rest) = interval(line, rest)?;
                let modifier = if rest.is_empty() {
                    None
                } else {
                    let m = rest
                        .strip_prefix("modifier")
                        .ok_or_else(|| perr(line, format!("unexpected '{rest}' after the interval")))?;
                    let (actor, period) = m
                        .trim()
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(line, "expected 'modifier <actor> every <rate>'"))?;
                    let period = period
                        .trim()
                        .strip_prefix("every")
                        .ok_or_else(|| perr(line, "expected 'every' in modifier"))?;
                    Some(Modifier {
                        actor: ident(line, actor, "actor")?,
                        period: period.trim().parse().map_err(at_line(line))?,
                    })
                };
                g.rate_params.push(RateParam {
                    name,
                    lo: int_lit(line, &lo)?,
                    hi: int_lit(line, &hi)?,
                    modifier,
                });
            }
            ("timeparam", Section::Graph) if k == "psadf" => {
                let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let name = ident(line, name, "parameter")?;
                let rest = rest
                    .trim()
                    .strip_prefix("in")
                    .ok_or_else(|| perr(line, "expected 'in' after the parameter name"))?;
                let (lo, hi, rest) = interval(line, rest)?;
                let kind = match rest.as_str() {
                    "continuous" => DurationKind::Continuous,
                    "integer" => DurationKind::Integer,
                    other => {
                        return Err(perr(
                            line,
                            format!("expected 'continuous' or 'integer', found '{other}'"),
                        ))
                    }
                };
                g.duration_params.push(DurationParam {
                    name,
                    lo: rational_lit(line, &lo)?,
                    hi: rational_lit(line, &hi)?,
                    kind,
                });
            }
            ("actor", Section::Graph) => {
                let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let name = ident(line, name, "actor")?;
                let exec = rest
                    .trim()
                    .strip_prefix("exec")
                    .ok_or_else(|| perr(line, "expected 'exec <time>' after the actor name"))?;
                let exec: TimeExpr = exec.trim().parse().map_err(at_line(line))?;
                if k != "psadf" && exec.as_constant().is_none() {
                    return Err(perr(line, format!("{k} execution times must be constants")));
                }
                if g.actor(&name).is_some() {
                    return Err(perr(line, format!("actor {name} declared twice")));
                }
                g.actors.push(Actor { name, exec });
            }
            ("chan", Section::Graph) => {
                let ch = channel(line, rest)?;
                for a in [&ch.src, &ch.dst] {
                    if g.actor(a).is_none() {
                        return Err(perr(line, format!("channel refers to undeclared actor {a}")));
                    }
                }
                if k != "psadf" && (ch.production.as_constant().is_none() || ch.consumption.as_constant().is_none()) {
                    return Err(perr(line, format!("{k} rates must be constants")));
                }
                g.channels.push(ch);
            }
            ("constraint", Section::Graph) if k == "psadf" => {
                let (lhs, rhs) = rest
                    .split_once("<=")
                    .ok_or_else(|| perr(line, "expected '<linear-expr> <= <rational>'"))?;
                g.constraints.push(LinearConstraint::new(
                    linear_expr(line, lhs.trim())?,
                    rational_lit(line, rhs.trim())?,
                ));
            }
            ("scenario", Section::Graph | Section::Scenario) if k == "sadf" => {
                let name = ident(line, rest, "scenario")?;
                if scenarios.iter().any(|(n, _)| *n == name) {
                    return Err(perr(line, format!("scenario {name} declared twice")));
                }
                scenarios.push((name, Vec::new()));
                section = Section::Scenario;
            }
            ("actor", Section::Scenario) => {
                let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let name = ident(line, name, "actor")?;
                if g.actor(&name).is_none() {
                    return Err(perr(line, format!("scenario overrides undeclared actor {name}")));
                }
                let exec = rest
                    .trim()
                    .strip_prefix("exec")
                    .ok_or_else(|| perr(line, "expected 'exec <time>' after the actor name"))?;
                let v = rational_lit(line, exec.trim())?;
                scenarios.last_mut().unwrap().1.push((line, name, v));
            }
            ("fsm", Section::Graph | Section::Scenario) if k == "sadf" && rest.is_empty() => {
                if fsm.is_some() {
                    return Err(perr(line, "duplicate fsm block"));
                }
                fsm = Some(Fsm {
                    states: Vec::new(),
                    initial: String::new(),
                    transitions: Vec::new(),
                });
                section = Section::Fsm;
            }
            ("state", Section::Fsm) => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [q, "scenario", sc] = parts.as_slice() else {
                    return Err(perr(line, "expected 'state <id> scenario <name>'"));
                };
                let f = fsm.as_mut().unwrap();
                f.states.push((ident(line, q, "state")?, ident(line, sc, "scenario")?));
            }
            ("initial", Section::Fsm) => {
                if fsm_initial_seen {
                    return Err(perr(line, "duplicate initial state"));
                }
                fsm_initial_seen = true;
                fsm.as_mut().unwrap().initial = ident(line, rest, "state")?;
            }
            ("trans", Section::Fsm) => {
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| perr(line, "expected 'trans <id> -> <id>'"))?;
                let t = (ident(line, a.trim(), "state")?, ident(line, b.trim(), "state")?);
                fsm.as_mut().unwrap().transitions.push(t);
            }
            _ => return Err(perr(line, format!("unexpected '{kw}' in a {k} model"))),
        }
    }
    let Some(kind) = kind else {
        return Err(perr(1, "empty model file"));
    };
    if g.actors.is_empty() {
        return Err(perr(text.lines().count().max(1), "model declares no actors"));
    }
    match kind {
        "psadf" => Ok(Model::Psadf(g)),
        "sdf" => Ok(Model::Sdf(to_sdf(&g, &[])?)),
        _ => {
            if scenarios.is_empty() {
                return Err(perr(text.lines().count().max(1), "sadf model declares no scenarios"));
            }
            if fsm.as_ref().is_some_and(|f| !fsm_initial_seen || f.states.is_empty()) {
                return Err(perr(
                    text.lines().count().max(1),
                    "fsm block needs states and an initial state",
                ));
            }
            let mut set = Vec::with_capacity(scenarios.len());
            for (name, overrides) in &scenarios {
                let mut sg = to_sdf(&g, overrides)?;
                sg.name = name.clone();
                set.push((name.clone(), sg));
            }
            Ok(Model::Sadf {
                name: g.name.clone(),
                set: ScenarioSet { scenarios: set, fsm },
            })
        }
    }
}

fn to_sdf(g: &PsadfGraph, overrides: &[(usize, String, Rational)]) -> Result<SdfGraph> {
    let actors = g
        .actors
        .iter()
        .map(|a| SdfActor {
            name: a.name.clone(),
            exec: overrides
                .iter()
                .rev()
                .find(|(_, n, _)| *n == a.name)
                .map(|(_, _, v)| v.clone())
                .unwrap_or_else(|| a.exec.as_constant().expect("checked while parsing").clone()),
        })
        .collect();
    let channels = g
        .channels
        .iter()
        .map(|c| SdfChannel {
            src: g.actor_index(&c.src).expect("checked while parsing"),
            dst: g.actor_index(&c.dst).expect("checked while parsing"),
            production: c.production.as_constant().expect("checked while parsing"),
            consumption: c.consumption.as_constant().expect("checked while parsing"),
            initial_tokens: c.initial_tokens as u64,
        })
        .collect();
    Ok(SdfGraph {
        name: g.name.clone(),
        actors,
        channels,
        iteration: None,
    })
}

fn print_sdf_body(out: &mut String, g: &SdfGraph) {
    for a in &g.actors {
        let _ = writeln!(out, "actor {} exec {}", a.name, rational::to_display(&a.exec));
    }
    for c in &g.channels {
        let _ = writeln!(
            out,
            "chan {} -> {} rates {} : {} init {}",
            g.actors[c.src].name, g.actors[c.dst].name, c.production, c.consumption, c.initial_tokens
        );
    }
}

/// Canonical text form; `parse(&print(m))` reproduces `m`.
pub fn print(m: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} \"{}\"", m.kind(), m.name());
    match m {
        Model::Sdf(g) => print_sdf_body(&mut out, g),
        Model::Sadf { set, .. } => {
            let base = &set.scenarios[0].1;
            print_sdf_body(&mut out, base);
            for (name, sg) in &set.scenarios {
                let _ = writeln!(out, "scenario {name}");
                for (a, b) in sg.actors.iter().zip(&base.actors) {
                    if a.exec != b.exec {
                        let _ = writeln!(out, "actor {} exec {}", a.name, rational::to_display(&a.exec));
                    }
                }
            }
            if let Some(f) = &set.fsm {
                out.push_str("fsm\n");
                for (q, sc) in &f.states {
                    let _ = writeln!(out, "state {q} scenario {sc}");
                }
                let _ = writeln!(out, "initial {}", f.initial);
                for (a, b) in &f.transitions {
                    let _ = writeln!(out, "trans {a} -> {b}");
                }
            }
        }
        Model::Psadf(g) => {
            for p in &g.rate_params {
                let _ = write!(out, "rateparam {} in [{}, {}]", p.name, p.lo, p.hi);
                if let Some(m) = &p.modifier {
                    let _ = write!(out, " modifier {} every {}", m.actor, m.period);
                }
                out.push('\n');
            }
            for p in &g.duration_params {
                let _ = writeln!(
                    out,
                    "timeparam {} in [{}, {}] {}",
                    p.name,
                    rational::to_display(&p.lo),
                    rational::to_display(&p.hi),
                    p.kind
                );
            }
            for a in &g.actors {
                let _ = writeln!(out, "actor {} exec {}", a.name, a.exec);
            }
            for c in &g.channels {
                let _ = writeln!(
                    out,
                    "chan {} -> {} rates {} : {} init {}",
                    c.src, c.dst, c.production, c.consumption, c.initial_tokens
                );
            }
            for c in &g.constraints {
                let _ = writeln!(out, "constraint {c}");
            }
        }
    }
    out
}

/// Parses `k=v,k=v` parameter assignments.
pub fn parse_point(s: &str) -> Result<crate::poly::Point> {
    let mut point = crate::poly::Point::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| perr(0, format!("expected 'name=value', found '{part}'")))?;
        let k = k.trim();
        if !is_identifier(k) {
            return Err(perr(0, format!("bad parameter name '{k}'")));
        }
        let v = rational::parse(v).ok_or_else(|| perr(0, format!("bad value for {k}: '{}'", v.trim())))?;
        if point.insert(k.to_string(), v).is_some() {
            return Err(perr(0, format!("{k} assigned twice")));
        }
    }
    Ok(point)
}

/// Completes a partial point with duration parameters fixed by equality
/// pairs of linear constraints (`x - k*y <= 0` together with
/// `k*y - x <= 0`). Returns the names still unassigned.
pub fn complete_point(g: &PsadfGraph, point: &mut crate::poly::Point) -> Vec<String> {
    loop {
        let mut progress = false;
        for c in &g.constraints {
            let paired = g.constraints.iter().any(|d| {
                d.bound == -c.bound.clone()
                    && d.terms.len() == c.terms.len()
                    && d.terms
                        .iter()
                        .all(|(n, k)| c.terms.iter().any(|(m, j)| m == n && *j == -k.clone()))
            });
            if !paired {
                continue;
            }
            let missing: Vec<&(String, Rational)> = c.terms.iter().filter(|(n, _)| !point.contains_key(n)).collect();
            if missing.len() != 1 {
                continue;
            }
            let (name, k) = missing[0];
            let known = c
                .terms
                .iter()
                .filter(|(n, _)| n != name)
                .fold(Rational::zero(), |acc, (n, j)| acc + j * &point[n]);
            point.insert(name.clone(), (&c.bound - known) / k);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let declared: BTreeSet<&str> = g
        .rate_params
        .iter()
        .map(|p| p.name.as_str())
        .chain(g.duration_params.iter().map(|p| p.name.as_str()))
        .collect();
    declared
        .into_iter()
        .filter(|n| !point.contains_key(*n))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const SHIPPED: [&str; 5] = [
        include_str!("../../../models/five_actor.sdf"),
        include_str!("../../../models/five_actor.sadf"),
        include_str!("../../../models/dvfs_pipeline.psadf"),
        include_str!("../../../models/dvfs_pipeline_ci1.psadf"),
        include_str!("../../../models/dvfs_pipeline_shrunk.psadf"),
    ];

    fn line_of(text: &str) -> usize {
        match parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn shipped_models_print_to_a_fixed_point() {
        for text in SHIPPED {
            let m = parse(text).unwrap();
            let printed = print(&m);
            let again = parse(&printed).unwrap();
            assert_eq!(again, m);
            assert_eq!(print(&again), printed);
        }
    }

    #[test]
    fn pipeline_declarations() {
        let Model::Psadf(g) = parse(SHIPPED[2]).unwrap() else {
            panic!()
        };
        assert_eq!(g.rate_params.len(), 3);
        assert_eq!(g.duration_params[0].kind, DurationKind::Continuous);
        assert_eq!(g.channels[7].consumption.to_string(), "p*q");
        assert_eq!(g.constraints[0].to_string(), "p + s <= 1400");
        assert_eq!(
            g.constraints[3].terms,
            vec![("ci".to_string(), int(30)), ("a".to_string(), int(-1))]
        );
        assert_eq!(g.token_count(), 5);
    }

    #[test]
    fn scenarios_override_execution_times() {
        let Model::Sadf { set, .. } = parse(SHIPPED[1]).unwrap() else {
            panic!()
        };
        assert_eq!(set.scenarios.len(), 2);
        let execs: Vec<Rational> = set.scenarios[1].1.actors.iter().map(|a| a.exec.clone()).collect();
        assert_eq!(execs, [28, 20, 24, 6, 10].map(int).to_vec());
        assert_eq!(set.fsm.as_ref().unwrap().transitions.len(), 4);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("graph \"x\"\n"), 1);
        assert_eq!(
            line_of("sdf \"x\"\nactor A exec 1\nchan A -> B rates 1 : 1 init 0\n"),
            3
        );
        assert_eq!(line_of("sdf \"x\"\n# note\nactor A exec p\n"), 3);
        assert_eq!(line_of("psadf \"x\"\nrateparam p in [1 2]\n"), 2);
        assert_eq!(line_of("psadf \"x\"\ntimeparam a in [1, 2] fuzzy\n"), 2);
        assert_eq!(line_of("psadf \"x\"\nactor A exec 1\nconstraint 2 <= 3\n"), 3);
        assert_eq!(line_of("sadf \"x\"\nactor A exec 1\nscenario s\nactor B exec 2\n"), 4);
        assert_eq!(line_of("sdf \"x\"\nactor A exec 1\nactor A exec 2\n"), 3);
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn linear_expressions() {
        let t = linear_expr(1, "-a + 3/2*b - 2*a").unwrap();
        assert_eq!(
            t,
            vec![
                ("a".to_string(), int(-3)),
                ("b".to_string(), crate::rational::frac(3, 2))
            ]
        );
        assert!(linear_expr(1, "a - a").is_err());
    }

    #[test]
    fn points_complete_through_equalities() {
        let Model::Psadf(g) = parse(SHIPPED[2]).unwrap() else {
            panic!()
        };
        let mut p = parse_point("p=10, q=10, s=100, ci=2").unwrap();
        assert!(complete_point(&g, &mut p).is_empty());
        assert_eq!(p["a"], int(60));
        assert_eq!(p["e"], int(2));
        let mut p = parse_point("p=10,q=10").unwrap();
        assert_eq!(complete_point(&g, &mut p), vec!["a", "b", "c", "ci", "d", "e", "s"]);
        assert!(parse_point("p=1,p=2").is_err());
        assert!(parse_point("p").is_err());
    }
}
