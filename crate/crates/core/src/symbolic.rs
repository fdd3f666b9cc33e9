// SPDX-License-Identifier: Apache-2.0

//! Symbolic characteristic-matrix extraction.
//!
//! The quasi-static schedule is walked actor by actor. Each actor's
//! completion-time recurrence is solved in closed form as a
//! [`GammaFunction`] whose weights are (max,+) sums of polynomials over
//! the initial tokens. Whenever a weight keeps two or more polynomials
//! that no region constraint orders, the parameter space is split into
//! one closed subregion per candidate maximum and the walk continues in
//! every feasible subregion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{quasi_static_schedule, validate, PsadfGraph, QuasiStaticSchedule, RateExpr};
use crate::maxplus::{MaxPlusMatrix, MaxPlusValue};
use crate::paramopt::{self, ConflictConstraint, Region};
use crate::poly::{Point, Polynomial};
use crate::rational;

/// A (max,+) sum of polynomials; the empty sum is −∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Weight {
    polys: BTreeSet<Polynomial>,
}

impl Weight {
    pub fn neg_inf() -> Self {
        Self::default()
    }

    /// The (max,+) unit: a single zero polynomial.
    pub fn unit() -> Self {
        Self::single(Polynomial::zero())
    }

    pub fn single(p: Polynomial) -> Self {
        Weight {
            polys: BTreeSet::from([p]),
        }
    }

    pub fn from_polys(ps: impl IntoIterator<Item = Polynomial>) -> Self {
        Weight {
            polys: ps.into_iter().collect(),
        }
    }

    pub fn is_neg_inf(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        self.polys.iter()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn as_single(&self) -> Option<&Polynomial> {
        (self.polys.len() == 1).then(|| self.polys.iter().next().unwrap())
    }

    pub fn oplus(&self, other: &Weight) -> Weight {
        Weight {
            polys: self.polys.union(&other.polys).cloned().collect(),
        }
    }

    pub fn otimes(&self, p: &Polynomial) -> Weight {
        Weight {
            polys: self.polys.iter().map(|q| q + p).collect(),
        }
    }

    pub fn evaluate(&self, point: &Point) -> Result<MaxPlusValue> {
        let mut best = MaxPlusValue::NegInf;
        for p in &self.polys {
            best = best.oplus(&MaxPlusValue::Finite(p.evaluate(point)?));
        }
        Ok(best)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polys.len() {
            0 => f.write_str("-inf"),
            1 => write!(f, "{}", self.polys.iter().next().unwrap()),
            _ => {
                let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
                write!(f, "max({})", parts.join(", "))
            }
        }
    }
}

/// Firing index argument of [`index_expr`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Firing {
    /// The symbolic firing index κ.
    Kappa,
    At(RateExpr),
}

/// `⌈(consumption·firing − init) / production⌉` after simplification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexExpr {
    Int(i64),
    Monomial(RateExpr),
    /// `scale·κ − offset`.
    Affine {
        scale: RateExpr,
        offset: i64,
    },
    Ceil {
        consumption: RateExpr,
        firing: Firing,
        init: i64,
        production: RateExpr,
    },
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexExpr::Int(v) => write!(f, "{v}"),
            IndexExpr::Monomial(m) => write!(f, "{m}"),
            IndexExpr::Affine { scale, offset } => {
                if scale.is_one() {
                    f.write_str("k")?;
                } else {
                    write!(f, "{scale}*k")?;
                }
                match offset.cmp(&0) {
                    std::cmp::Ordering::Greater => write!(f, "-{offset}"),
                    std::cmp::Ordering::Less => write!(f, "+{}", -offset),
                    std::cmp::Ordering::Equal => Ok(()),
                }
            }
            IndexExpr::Ceil {
                consumption,
                firing,
                init,
                production,
            } => {
                let k = match firing {
                    Firing::Kappa => "k".to_string(),
                    Firing::At(m) => m.to_string(),
                };
                let num = if *init == 0 {
                    format!("{consumption}*{k}")
                } else {
                    format!("{consumption}*{k}-{init}")
                };
                write!(f, "ceil(({num})/{production})")
            }
        }
    }
}

/// Builds and simplifies the producer firing index read by a consumer.
pub fn index_expr(consumption: &RateExpr, firing: &Firing, init: i64, production: &RateExpr) -> IndexExpr {
    let ceil = || IndexExpr::Ceil {
        consumption: consumption.clone(),
        firing: firing.clone(),
        init,
        production: production.clone(),
    };
    match firing {
        Firing::At(m) => {
            let Some(num) = consumption.checked_mul(m) else {
                return ceil();
            };
            if let (Some(n), Some(p)) = (num.as_constant(), production.as_constant()) {
                let (n, p) = (n as i128 - init as i128, p as i128);
                return IndexExpr::Int(n.div_euclid(p) as i64 + (n.rem_euclid(p) != 0) as i64);
            }
            if init == 0 {
                if let Some(q) = num.checked_div(production) {
                    return match q.as_constant() {
                        Some(c) => IndexExpr::Int(c as i64),
                        None => IndexExpr::Monomial(q),
                    };
                }
            }
            ceil()
        }
        Firing::Kappa => match consumption.checked_div(production) {
            Some(q) if init == 0 || production.is_one() => IndexExpr::Affine {
                scale: q,
                offset: if production.is_one() { init } else { 0 },
            },
            _ => ceil(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaShape {
    /// Every firing completes with the same weights.
    Constant,
    /// Serialised self-loop actor: firing κ completes with
    /// `base ⊗ κ·increment`.
    Accumulating { increment: Polynomial },
}

/// Closed-form completion times of all firings of one actor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaFunction {
    pub actor: String,
    pub count: RateExpr,
    /// One weight per initial token.
    pub base: Vec<Weight>,
    pub shape: GammaShape,
}

impl GammaFunction {
    /// Weights of firing `k`.
    pub fn at(&self, k: &RateExpr) -> Vec<Weight> {
        match &self.shape {
            GammaShape::Constant => self.base.clone(),
            GammaShape::Accumulating { increment } => {
                let shift = increment.mul_rate_monomial(&rational::int(k.coefficient() as i64), k.factors());
                self.base.iter().map(|w| w.otimes(&shift)).collect()
            }
        }
    }

    /// Weights of the last firing of the iteration.
    pub fn final_weights(&self) -> Vec<Weight> {
        self.at(&self.count)
    }
}

/// Solves one actor given its already solved DAG predecessors.
pub fn solve_actor(
    g: &PsadfGraph,
    env: &BTreeMap<String, GammaFunction>,
    actor: &str,
    count: &RateExpr,
    position: usize,
) -> Result<GammaFunction> {
    let unsupported = |detail: String| Error::UnsupportedPattern {
        actor: actor.to_string(),
        position,
        detail,
    };
    let x = g
        .actor(actor)
        .ok_or_else(|| Error::Schedule(format!("actor {actor} is not in the graph")))?;
    let slots = g.token_slots();
    let label_of = |ci: usize, pos: u32| {
        slots
            .iter()
            .position(|s| s.channel == ci && s.position == pos)
            .expect("token slot exists")
    };
    let n = slots.len();
    let mut acc = vec![Weight::neg_inf(); n];
    let mut self_loop = false;
    for (ci, ch) in g.channels.iter().enumerate() {
        if ch.dst != actor {
            continue;
        }
        if ch.is_self_loop() {
            self_loop = true;
            for m in 1..=ch.initial_tokens {
                let i = label_of(ci, m);
                acc[i] = acc[i].oplus(&Weight::unit());
            }
            continue;
        }
        if ch.initial_tokens > 0 {
            let cons = ch.consumption.as_constant().filter(|_| count.is_one()).ok_or_else(|| {
                unsupported(format!(
                    "reads initial tokens of {}->{} with repetition count {} and consumption {}",
                    ch.src, ch.dst, count, ch.consumption
                ))
            })?;
            if cons > ch.initial_tokens as u64 {
                return Err(unsupported(format!(
                    "consumes {cons} tokens from {}->{} which holds only {}",
                    ch.src, ch.dst, ch.initial_tokens
                )));
            }
            for m in 1..=cons as u32 {
                let i = label_of(ci, m);
                acc[i] = acc[i].oplus(&Weight::unit());
            }
            continue;
        }
        let h = env
            .get(&ch.src)
            .ok_or_else(|| Error::Schedule(format!("{actor} reads from {} before it is solved", ch.src)))?;
        let weights = match &h.shape {
            GammaShape::Constant => h.base.clone(),
            GammaShape::Accumulating { .. } if h.count.is_one() => h.at(&RateExpr::one()),
            GammaShape::Accumulating { .. } if count.is_one() => {
                match index_expr(&ch.consumption, &Firing::At(RateExpr::one()), 0, &ch.production) {
                    IndexExpr::Monomial(m) => h.at(&m),
                    IndexExpr::Int(k) if k >= 1 => h.at(&RateExpr::constant(k as u64)),
                    other => {
                        return Err(unsupported(format!(
                            "index {other} into the serialised actor {} does not simplify",
                            h.actor
                        )))
                    }
                }
            }
            GammaShape::Accumulating { .. } => {
                return Err(unsupported(format!(
                    "firing-dependent input from the serialised actor {} (index {})",
                    h.actor,
                    index_expr(&ch.consumption, &Firing::Kappa, 0, &ch.production)
                )))
            }
        };
        for (a, w) in acc.iter_mut().zip(&weights) {
            *a = a.oplus(w);
        }
    }
    let e = x.exec.to_polynomial();
    Ok(if self_loop {
        GammaFunction {
            actor: actor.to_string(),
            count: count.clone(),
            base: acc,
            shape: GammaShape::Accumulating { increment: e },
        }
    } else {
        GammaFunction {
            actor: actor.to_string(),
            count: count.clone(),
            base: acc.iter().map(|w| w.otimes(&e)).collect(),
            shape: GammaShape::Constant,
        }
    })
}

/// Weights of a solution that still hold two or more polynomials,
/// reported at the last firing of the iteration.
pub fn detect_conflicts(g: &GammaFunction, labels: &[String]) -> Vec<(String, Vec<Polynomial>)> {
    g.final_weights()
        .iter()
        .zip(labels)
        .filter(|(w, _)| w.len() >= 2)
        .map(|(w, l)| (l.clone(), w.polys().cloned().collect()))
        .collect()
}

/// Drops polynomials that another member of the same weight dominates on
/// the region. Caches the exact (optimisation-backed) tests.
#[derive(Default)]
pub struct Dominance {
    cache: HashMap<(Polynomial, Region), bool>,
}

impl Dominance {
    /// `q ≥ p` everywhere on `region`.
    pub fn dominates(&mut self, q: &Polynomial, p: &Polynomial, region: &Region) -> Result<bool> {
        let diff = q - p;
        if diff.is_nonnegative() {
            return Ok(true);
        }
        for c in &region.conflicts {
            if (&diff - &c.difference()).is_nonnegative() {
                return Ok(true);
            }
        }
        let key = (diff.clone(), region.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = !paramopt::exceeds_zero(&(p - q), region)?;
        self.cache.insert(key, v);
        Ok(v)
    }

    pub fn normalize(&mut self, w: &Weight, region: &Region) -> Result<Weight> {
        if w.len() < 2 {
            return Ok(w.clone());
        }
        let mut kept: Vec<Polynomial> = w.polys().cloned().collect();
        let mut i = 0;
        while i < kept.len() {
            let mut dominated = false;
            for j in 0..kept.len() {
                if j != i && self.dominates(&kept[j], &kept[i], region)? {
                    dominated = true;
                    break;
                }
            }
            if dominated {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(Weight::from_polys(kept))
    }

    pub fn normalize_gamma(&mut self, g: &GammaFunction, region: &Region) -> Result<GammaFunction> {
        let base = g
            .base
            .iter()
            .map(|w| self.normalize(w, region))
            .collect::<Result<Vec<_>>>()?;
        Ok(GammaFunction { base, ..g.clone() })
    }
}

/// Conflict-free symbolic matrix valid on `region`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicMatrix {
    pub labels: Vec<String>,
    /// `None` is −∞.
    pub entries: Vec<Vec<Option<Polynomial>>>,
    pub region: Region,
}

impl SymbolicMatrix {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.as_ref().map(|p| p.to_string()).unwrap_or_else(|| "-inf".into()))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.entry_strings();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for (label, row) in self.labels.iter().zip(&cells) {
            let parts: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "{label}': [ {} ]", parts.join("  "))?;
        }
        Ok(())
    }
}

pub fn evaluate_symbolic(m: &SymbolicMatrix, point: &Point) -> Result<MaxPlusMatrix> {
    if !m.region.contains(point)? {
        let lines = m.region.conflict_lines();
        return Err(Error::OutsideRegion(if lines.is_empty() {
            "the point violates the declared parameter space".into()
        } else {
            format!("the point violates {}", lines.join(" and "))
        }));
    }
    let rows = m
        .entries
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| match e {
                    None => Ok(MaxPlusValue::NegInf),
                    Some(p) => Ok(MaxPlusValue::Finite(p.evaluate(point)?)),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MaxPlusMatrix::new(m.labels.clone(), rows)
}

struct Extractor<'a> {
    g: &'a PsadfGraph,
    schedule: &'a QuasiStaticSchedule,
    labels: Vec<String>,
    dominance: Dominance,
    out: Vec<SymbolicMatrix>,
}

impl Extractor<'_> {
    fn walk(
        &mut self,
        pos: usize,
        mut env: BTreeMap<String, GammaFunction>,
        pending: Option<GammaFunction>,
        region: Region,
    ) -> Result<()> {
        if pos == self.schedule.entries.len() {
            let m = self.assemble(&env, region)?;
            if !self.out.contains(&m) {
                self.out.push(m);
            }
            return Ok(());
        }
        let entry = &self.schedule.entries[pos];
        let sol = match pending {
            Some(s) => s,
            None => solve_actor(self.g, &env, &entry.actor, &entry.count, pos + 1)?,
        };
        let sol = self.dominance.normalize_gamma(&sol, &region)?;
        let conflicts = detect_conflicts(&sol, &self.labels);
        if let Some((_, polys)) = conflicts.first() {
            for (k, winner) in polys.iter().enumerate() {
                let mut branch = region.clone();
                for (j, loser) in polys.iter().enumerate() {
                    if j != k {
                        branch = branch.with_conflict(ConflictConstraint::prefer(winner, loser));
                    }
                }
                if paramopt::feasible(&branch)?.is_some() {
                    self.walk(pos, env.clone(), Some(sol.clone()), branch)?;
                }
            }
            return Ok(());
        }
        env.insert(entry.actor.clone(), sol);
        self.walk(pos + 1, env, None, region)
    }

    /// Row `j` holds the weights of the token found at initial-token
    /// position `j` after one iteration.
    fn assemble(&self, env: &BTreeMap<String, GammaFunction>, region: Region) -> Result<SymbolicMatrix> {
        let g = self.g;
        let slots = g.token_slots();
        let n = slots.len();
        let mut rows: Vec<Vec<Weight>> = Vec::with_capacity(n);
        let solved = |a: &str| {
            env.get(a)
                .ok_or_else(|| Error::Schedule(format!("actor {a} was never scheduled")))
        };
        for s in &slots {
            let ch = &g.channels[s.channel];
            let h = solved(&ch.src)?;
            if ch.is_self_loop() {
                rows.push(h.final_weights());
                continue;
            }
            let x = solved(&ch.dst)?;
            let moved = ch
                .consumption
                .checked_mul(&x.count)
                .and_then(|k| k.as_constant())
                .filter(|k| *k <= ch.initial_tokens as u64)
                .ok_or_else(|| Error::UnsupportedPattern {
                    actor: ch.dst.clone(),
                    position: 0,
                    detail: format!(
                        "token channel {}->{} is not covered by its initial tokens",
                        ch.src, ch.dst
                    ),
                })?;
            let keep = ch.initial_tokens as u64 - moved;
            if (s.position as u64) <= keep {
                let src = slots
                    .iter()
                    .position(|t| t.channel == s.channel && t.position as u64 == s.position as u64 + moved)
                    .expect("shifted token exists");
                let mut row = vec![Weight::neg_inf(); n];
                row[src] = Weight::unit();
                rows.push(row);
            } else {
                let j = s.position as u64 - keep;
                let prod = ch.production.as_constant().ok_or_else(|| Error::UnsupportedPattern {
                    actor: ch.src.clone(),
                    position: 0,
                    detail: format!("parametric production on token channel {}->{}", ch.src, ch.dst),
                })?;
                let firing = j.div_ceil(prod);
                rows.push(h.at(&RateExpr::constant(firing)));
            }
        }
        let mut entries = Vec::with_capacity(n);
        for (r, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for w in row {
                let w = if w.len() > 1 {
                    let mut d = Dominance::default();
                    d.normalize(w, &region)?
                } else {
                    w.clone()
                };
                match w.len() {
                    0 => out.push(None),
                    1 => out.push(w.as_single().cloned()),
                    _ => {
                        return Err(Error::UnsupportedPattern {
                            actor: slots[r].label.clone(),
                            position: 0,
                            detail: format!("unresolved conflict {w} at assembly"),
                        })
                    }
                }
            }
            entries.push(out);
        }
        Ok(SymbolicMatrix {
            labels: self.labels.clone(),
            entries,
            region,
        })
    }
}

/// All conflict-free symbolic matrices of `g` together with their regions.
pub fn symbolic_extract(g: &PsadfGraph, schedule: &QuasiStaticSchedule, omega: &Region) -> Result<Vec<SymbolicMatrix>> {
    if g.token_count() == 0 {
        return Err(Error::EmptyInput("graph has no initial tokens"));
    }
    let mut ex = Extractor {
        g,
        schedule,
        labels: g.token_labels(),
        dominance: Dominance::default(),
        out: Vec::new(),
    };
    if paramopt::feasible(omega)?.is_none() {
        return Err(Error::Infeasible("the parameter space is empty".into()));
    }
    ex.walk(0, BTreeMap::new(), None, omega.clone())?;
    Ok(ex.out)
}

/// Validates `g`, builds its schedule and parameter space, and extracts.
pub fn extract_graph(g: &PsadfGraph) -> Result<(QuasiStaticSchedule, Vec<SymbolicMatrix>)> {
    let diags = validate(g);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::InvalidGraph(lines.join("; ")));
    }
    let schedule = quasi_static_schedule(g)?;
    let omega = Region::from_graph(g)?;
    let ms = symbolic_extract(g, &schedule, &omega)?;
    Ok((schedule, ms))
}

/// Regions of `ms` that contain `point`.
pub fn regions_containing(ms: &[SymbolicMatrix], point: &Point) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        if m.region.contains(point)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// True if every entry is a single polynomial or −∞ with nonnegative
/// coefficients.
pub fn is_monotone(m: &SymbolicMatrix) -> bool {
    m.entries
        .iter()
        .flatten()
        .flatten()
        .all(|p| p.is_nonnegative() && !p.terms().any(|(_, c)| c.is_zero()))
}
