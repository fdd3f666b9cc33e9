// SPDX-License-Identifier: Apache-2.0

//! Exact (max,+) algebra over the rationals extended with −∞.
//!
//! `a ⊕ b = max(a, b)` and `a ⊗ b = a + b`. Matrices are square and indexed
//! by initial tokens; entry `(i, j)` is the minimal elapsed time from the
//! production of token `j` in one iteration to the production of token `i`
//! in the next, or −∞ when `i` does not depend on `j`.
//!
//! The maximum cycle mean is computed with Karp's recurrence on every
//! strongly connected component of the (max,+) automaton graph. The critical
//! cycle is recovered from the tight-edge subgraph of a longest-path
//! potential, which contains exactly the cycles whose mean is λ.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An element of ℝ ∪ {−∞} with exact rational finite values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MaxPlusValue {
    NegInf,
    Finite(Rational),
}

pub use MaxPlusValue::NegInf as NEG_INF;

impl MaxPlusValue {
    pub fn zero() -> Self {
        MaxPlusValue::Finite(Rational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        MaxPlusValue::Finite(rational::int(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, MaxPlusValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            MaxPlusValue::Finite(v) => Some(v),
            MaxPlusValue::NegInf => None,
        }
    }

    /// `self ⊕ other`
    pub fn oplus(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `self ⊗ other`
    pub fn otimes(&self, other: &Self) -> Self {
        match (self, other) {
            (MaxPlusValue::Finite(a), MaxPlusValue::Finite(b)) => MaxPlusValue::Finite(a + b),
            _ => MaxPlusValue::NegInf,
        }
    }

    pub fn otimes_scalar(&self, d: &Rational) -> Self {
        match self {
            MaxPlusValue::Finite(a) => MaxPlusValue::Finite(a + d),
            MaxPlusValue::NegInf => MaxPlusValue::NegInf,
        }
    }

    /// `"num/den"` or `"-inf"`.
    pub fn to_fraction_string(&self) -> String {
        match self {
            MaxPlusValue::Finite(v) => rational::to_fraction_string(v),
            MaxPlusValue::NegInf => "-inf".to_string(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "-inf" || s == "−∞" {
            Some(MaxPlusValue::NegInf)
        } else {
            rational::parse(s).map(MaxPlusValue::Finite)
        }
    }
}

impl PartialOrd for MaxPlusValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MaxPlusValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MaxPlusValue::NegInf, MaxPlusValue::NegInf) => Ordering::Equal,
            (MaxPlusValue::NegInf, _) => Ordering::Less,
            (_, MaxPlusValue::NegInf) => Ordering::Greater,
            (MaxPlusValue::Finite(a), MaxPlusValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl From<Rational> for MaxPlusValue {
    fn from(v: Rational) -> Self {
        MaxPlusValue::Finite(v)
    }
}

impl fmt::Display for MaxPlusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPlusValue::Finite(v) => f.write_str(&rational::to_display(v)),
            MaxPlusValue::NegInf => f.write_str("-inf"),
        }
    }
}

/// Square (max,+) matrix over initial tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPlusMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<MaxPlusValue>>,
}

impl MaxPlusMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<MaxPlusValue>>) -> Result<Self> {
        let n = labels.len();
        if entries.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.len(),
            });
        }
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidGraph(format!("duplicate token label {l}")));
            }
        }
        Ok(MaxPlusMatrix { labels, entries })
    }

    /// Matrix with default labels `t1 … tn`.
    pub fn from_rows(entries: Vec<Vec<MaxPlusValue>>) -> Result<Self> {
        let labels = default_labels(entries.len());
        Self::new(labels, entries)
    }

    pub fn filled(labels: Vec<String>, value: MaxPlusValue) -> Self {
        let n = labels.len();
        MaxPlusMatrix {
            labels,
            entries: vec![vec![value; n]; n],
        }
    }

    pub fn neg_inf(labels: Vec<String>) -> Self {
        Self::filled(labels, MaxPlusValue::NegInf)
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let mut m = Self::neg_inf(labels);
        for i in 0..m.n() {
            m.entries[i][i] = MaxPlusValue::zero();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> &MaxPlusValue {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: MaxPlusValue) {
        self.entries[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<MaxPlusValue>] {
        &self.entries
    }

    pub fn finite_count(&self) -> usize {
        self.entries.iter().flatten().filter(|v| v.is_finite()).count()
    }

    /// Applies a simultaneous permutation to rows, columns and labels:
    /// new index `k` takes old index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let entries = perm
            .iter()
            .map(|&pi| perm.iter().map(|&pj| self.entries[pi][pj].clone()).collect())
            .collect();
        MaxPlusMatrix { labels, entries }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(())
    }
}

impl fmt::Display for MaxPlusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .chain(self.labels.iter())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
        write!(f, "{:>w$} ", "", w = width)?;
        for l in &self.labels {
            write!(f, " {:>w$}", l, w = width)?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&cells) {
            write!(f, "{:>w$} ", l, w = width)?;
            for c in row {
                write!(f, " {:>w$}", c, w = width)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{i}")).collect()
}

/// `M v`: `result_i = ⊕_j (M_ij ⊗ v_j)`.
pub fn mp_matvec(m: &MaxPlusMatrix, v: &[MaxPlusValue]) -> Result<Vec<MaxPlusValue>> {
    if v.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: v.len(),
        });
    }
    Ok(m.entries
        .iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(MaxPlusValue::NegInf, |acc, (a, b)| acc.oplus(&a.otimes(b)))
        })
        .collect())
}

/// `A B`: `(AB)_ij = ⊕_k (A_ik ⊗ B_kj)`.
pub fn mp_matmul(a: &MaxPlusMatrix, b: &MaxPlusMatrix) -> Result<MaxPlusMatrix> {
    a.check_compatible(b)?;
    let n = a.n();
    let mut entries = vec![vec![MaxPlusValue::NegInf; n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = MaxPlusValue::NegInf;
            for k in 0..n {
                acc = acc.oplus(&a.entries[i][k].otimes(&b.entries[k][j]));
            }
            *cell = acc;
        }
    }
    Ok(MaxPlusMatrix {
        labels: a.labels.clone(),
        entries,
    })
}

/// Entrywise maximum of a nonempty list of matrices.
pub fn elementwise_max(ms: &[MaxPlusMatrix]) -> Result<MaxPlusMatrix> {
    let (first, rest) = ms.split_first().ok_or(Error::EmptyInput("matrix list"))?;
    let mut out = first.clone();
    for m in rest {
        out.check_compatible(m)?;
        for (orow, mrow) in out.entries.iter_mut().zip(&m.entries) {
            for (o, v) in orow.iter_mut().zip(mrow) {
                if v > o {
                    *o = v.clone();
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpagEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Rational,
}

/// (max,+) automaton graph: one node per initial token, an edge `j → i`
/// of weight `g_ij` for each finite entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mpag {
    pub labels: Vec<String>,
    pub edges: Vec<MpagEdge>,
}

impl Mpag {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn from_edges(n: usize, edges: Vec<MpagEdge>) -> Self {
        Mpag {
            labels: default_labels(n),
            edges,
        }
    }
}

pub fn build_mpag(m: &MaxPlusMatrix) -> Mpag {
    let mut edges = Vec::new();
    for (i, row) in m.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if let MaxPlusValue::Finite(w) = v {
                edges.push(MpagEdge {
                    from: j,
                    to: i,
                    weight: w.clone(),
                });
            }
        }
    }
    // deterministic order: by source, then target
    edges.sort_by_key(|e| (e.from, e.to));
    Mpag {
        labels: m.labels.clone(),
        edges,
    }
}

/// Maximum cycle mean and one critical cycle (node indices in traversal
/// order, starting at the smallest index). Acyclic graphs give −∞ and an
/// empty cycle.
pub fn mcm(g: &Mpag) -> (MaxPlusValue, Vec<usize>) {
    let n = g.node_count();
    let mut out_adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for e in &g.edges {
        out_adj[e.from].push((e.to, &e.weight));
    }

    let mut lambda: Option<Rational> = None;
    for comp in strongly_connected_components(n, &out_adj) {
        if let Some(l) = karp_component(&comp, &g.edges) {
            if lambda.as_ref().is_none_or(|cur| l > *cur) {
                lambda = Some(l);
            }
        }
    }
    let Some(lambda) = lambda else {
        return (MaxPlusValue::NegInf, Vec::new());
    };
    let cycle = critical_cycle(n, &g.edges, &lambda);
    (MaxPlusValue::Finite(lambda), cycle)
}

/// `1/λ` of the matrix's automaton graph.
pub fn throughput_from_matrix(m: &MaxPlusMatrix) -> Result<Rational> {
    let (lambda, _) = mcm(&build_mpag(m));
    match lambda {
        MaxPlusValue::NegInf => Err(Error::NoCycle),
        MaxPlusValue::Finite(l) if l.is_positive() => Ok(Rational::one() / l),
        MaxPlusValue::Finite(l) => Err(Error::InvalidGraph(format!(
            "maximum cycle mean {} is not positive",
            rational::to_display(&l)
        ))),
    }
}

fn strongly_connected_components(n: usize, adj: &[Vec<(usize, &Rational)>]) -> Vec<Vec<usize>> {
    // Tarjan, iterative
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next].0;
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort();
    comps
}

/// Karp's maximum mean over the cycles of one strongly connected component.
fn karp_component(comp: &[usize], edges: &[MpagEdge]) -> Option<Rational> {
    let k = comp.len();
    let local = |v: usize| comp.binary_search(&v).ok();
    let inner: Vec<(usize, usize, &Rational)> = edges
        .iter()
        .filter_map(|e| Some((local(e.from)?, local(e.to)?, &e.weight)))
        .collect();
    if inner.is_empty() {
        return None;
    }
    // walks of exactly j edges from local node 0
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; k]; k + 1];
    d[0][0] = Some(Rational::zero());
    for j in 1..=k {
        let (prev, cur) = d.split_at_mut(j);
        let prev = &prev[j - 1];
        let cur = &mut cur[0];
        for &(u, v, w) in &inner {
            if let Some(du) = &prev[u] {
                let cand = du + w;
                if cur[v].as_ref().is_none_or(|c| cand > *c) {
                    cur[v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Rational> = None;
    for v in 0..k {
        let Some(dk) = &d[k][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (j, row) in d.iter().enumerate().take(k) {
            if let Some(dj) = &row[v] {
                let m = (dk - dj) / Rational::from_integer(((k - j) as i64).into());
                if worst.as_ref().is_none_or(|w| m < *w) {
                    worst = Some(m);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().is_none_or(|b| w > *b) {
                best = Some(w);
            }
        }
    }
    best
}

/// Smallest-start, then shortest, cycle made of tight edges under the
/// longest-path potential for weights `w − λ`.
fn critical_cycle(n: usize, edges: &[MpagEdge], lambda: &Rational) -> Vec<usize> {
    let mut pot = vec![Rational::zero(); n];
    for _ in 0..=n {
        let mut changed = false;
        for e in edges {
            let cand = &pot[e.from] + &e.weight - lambda;
            if cand > pot[e.to] {
                pot[e.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut tight: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        if &pot[e.from] + &e.weight - lambda == pot[e.to] {
            tight[e.from].push(e.to);
        }
    }
    for adj in &mut tight {
        adj.sort_unstable();
        adj.dedup();
    }
    for start in 0..n {
        if tight[start].contains(&start) {
            return vec![start];
        }
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &w in &tight[start] {
            if w > start && parent[w] == usize::MAX {
                parent[w] = start;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &tight[v] {
                if w == start {
                    let mut cycle = vec![v];
                    let mut cur = v;
                    while parent[cur] != start {
                        cur = parent[cur];
                        cycle.push(cur);
                    }
                    cycle.push(start);
                    cycle.reverse();
                    return cycle;
                }
                if w > start && parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    Vec::new()
}
