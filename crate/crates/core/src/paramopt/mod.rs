// SPDX-License-Identifier: Apache-2.0

//! Parameter-space regions, feasibility and exact per-entry maximisation.
//!
//! Entries are polynomials that are linear in the duration parameters
//! once the integer lattice point (rate parameters and integer durations)
//! is fixed. Each lattice point therefore reduces to a small exact LP, and
//! the lattice itself is searched either by best-first branch and bound on
//! interval upper bounds or, for certification, by full enumeration.

mod compile;
mod lp;
mod region;
mod search;

use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use lp::{maximize as lp_maximize, LpOutcome};
pub use region::{ConflictConstraint, DurationBound, RateBound, Region, Relation};

use compile::{compile, Compiled};
use search::Goal;

use crate::error::{Error, Result};
use crate::graph::{
    quasi_static_schedule, repetition_vector, validate, PsadfGraph, QuasiStaticSchedule, RepetitionVector,
};
use crate::maxplus::{build_mpag, elementwise_max, mcm, MaxPlusMatrix, MaxPlusValue, Mpag};
use crate::poly::{Point, Polynomial};
use crate::rational::{self, Rational};
use crate::symbolic::{symbolic_extract, SymbolicMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Bound-based pruning; `false` enumerates every lattice point.
    pub prune: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { prune: true }
    }
}

/// Exact maximum of one entry and its lexicographically smallest argmax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryMax {
    pub value: Rational,
    pub argmax: Point,
}

fn point_from(c: &Compiled, z: &[i64], obj: Option<(&compile::LinForm, &Rational)>) -> Result<Point> {
    c.witness(z, obj)
        .ok_or_else(|| Error::Infeasible("witness construction failed at an optimal lattice point".into()))
}

/// Some point of `r`, the lexicographically smallest one, or `None`.
pub fn feasible(r: &Region) -> Result<Option<Point>> {
    let c = compile(r)?;
    match c.best_first(None, Goal::Maximize) {
        None => Ok(None),
        Some((z, _)) => Ok(Some(point_from(&c, &z, None)?)),
    }
}

/// Maximum of `obj` over `r`.
pub fn maximize_entry(obj: &Polynomial, r: &Region, opts: Options) -> Result<EntryMax> {
    Optimizer::new(opts).maximize_entry(obj, r)
}

/// True if `p` is strictly positive somewhere on `r`.
pub fn exceeds_zero(p: &Polynomial, r: &Region) -> Result<bool> {
    let c = compile(r)?;
    let f = c.linform(p)?;
    Ok(c.best_first(Some(&f), Goal::Positive).is_some())
}

/// Draws `n` points of `r`: rate parameters and integer durations
/// uniformly from their boxes, continuous durations on a 1/1000 grid of
/// their presolved box, rejecting points that violate a constraint.
pub fn sample_points(r: &Region, n: usize, seed: u64) -> Result<Vec<Point>> {
    let c = compile(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let budget = 10_000usize.saturating_mul(n.max(1));
    let mut tries = 0usize;
    if c.infeasible {
        return if n == 0 {
            Ok(out)
        } else {
            Err(Error::Infeasible("the parameter space is empty".into()))
        };
    }
    let grid = rational::int(1000);
    while out.len() < n {
        tries += 1;
        if tries > budget {
            return Err(Error::Infeasible(format!(
                "rejection sampling found only {} of {n} points",
                out.len()
            )));
        }
        let z: Vec<i64> = c.lattice.iter().map(|v| rng.gen_range(v.lo..=v.hi)).collect();
        if !c.lattice_rows_hold(&z) {
            continue;
        }
        let y: Vec<Rational> = c
            .cont
            .iter()
            .map(|v| {
                let k = rational::int(rng.gen_range(0..=1000));
                &v.lo + (&v.hi - &v.lo) * k / &grid
            })
            .collect();
        let mut point = Point::new();
        for (i, var) in c.lattice.iter().enumerate() {
            point.insert(var.name.clone(), rational::int(z[i]));
        }
        for (name, form) in &c.durations {
            let (k, k0) = form.eval(&z);
            let v = k.iter().zip(&y).fold(k0, |acc, (a, b)| acc + a * b);
            point.insert(name.clone(), v);
        }
        if r.contains(&point)? {
            out.push(point);
        }
    }
    Ok(out)
}

/// Maximiser with per-region compilation and per-(entry, region) memo.
pub struct Optimizer {
    opts: Options,
    compiled: HashMap<Region, Rc<Compiled>>,
    memo: HashMap<(Polynomial, Region), EntryMax>,
}

impl Optimizer {
    pub fn new(opts: Options) -> Self {
        Optimizer {
            opts,
            compiled: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn compiled(&mut self, r: &Region) -> Result<Rc<Compiled>> {
        if let Some(c) = self.compiled.get(r) {
            return Ok(c.clone());
        }
        let c = Rc::new(compile(r)?);
        self.compiled.insert(r.clone(), c.clone());
        Ok(c)
    }

    pub fn maximize_entry(&mut self, obj: &Polynomial, r: &Region) -> Result<EntryMax> {
        self.maximize_entries(std::slice::from_ref(obj), r)
            .map(|mut v| v.remove(0))
    }

    /// Maximises several entries over one region; with pruning disabled
    /// they share a single enumeration pass.
    pub fn maximize_entries(&mut self, objs: &[Polynomial], r: &Region) -> Result<Vec<EntryMax>> {
        let c = self.compiled(r)?;
        let mut todo: Vec<&Polynomial> = Vec::new();
        for p in objs {
            let key = (p.clone(), r.clone());
            if !self.memo.contains_key(&key) && !todo.contains(&p) {
                todo.push(p);
            }
        }
        let forms = todo.iter().map(|p| c.linform(p)).collect::<Result<Vec<_>>>()?;
        let hits = if self.opts.prune {
            forms.iter().map(|f| c.best_first(Some(f), Goal::Maximize)).collect()
        } else {
            c.enumerate(&forms.iter().collect::<Vec<_>>())
        };
        for ((p, f), hit) in todo.iter().zip(&forms).zip(hits) {
            let (z, value) = hit.ok_or_else(|| Error::Infeasible(format!("region {r} is empty")))?;
            let argmax = point_from(&c, &z, Some((f, &value)))?;
            self.memo.insert(((*p).clone(), r.clone()), EntryMax { value, argmax });
        }
        Ok(objs
            .iter()
            .map(|p| self.memo[&(p.clone(), r.clone())].clone())
            .collect())
    }

    pub fn maximize_matrix(&mut self, m: &SymbolicMatrix) -> Result<MatrixMax> {
        let mut objs: Vec<Polynomial> = Vec::new();
        for p in m.entries.iter().flatten().flatten() {
            if !objs.contains(p) {
                objs.push(p.clone());
            }
        }
        let maxima = self.maximize_entries(&objs, &m.region)?;
        let mut rows = Vec::with_capacity(m.n());
        let mut entries = Vec::new();
        for (i, row) in m.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(m.n());
            for (j, e) in row.iter().enumerate() {
                match e {
                    None => out.push(MaxPlusValue::NegInf),
                    Some(p) => {
                        let k = objs.iter().position(|o| o == p).expect("collected above");
                        out.push(MaxPlusValue::Finite(maxima[k].value.clone()));
                        entries.push(EntryResult {
                            row: i,
                            col: j,
                            polynomial: p.clone(),
                            max: maxima[k].clone(),
                        });
                    }
                }
            }
            rows.push(out);
        }
        Ok(MatrixMax {
            matrix: MaxPlusMatrix::new(m.labels.clone(), rows)?,
            entries,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryResult {
    pub row: usize,
    pub col: usize,
    pub polynomial: Polynomial,
    pub max: EntryMax,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixMax {
    pub matrix: MaxPlusMatrix,
    pub entries: Vec<EntryResult>,
}

/// Entrywise maximum of a symbolic matrix over its region.
pub fn maximize_matrix(m: &SymbolicMatrix, opts: Options) -> Result<MatrixMax> {
    Optimizer::new(opts).maximize_matrix(m)
}

#[derive(Debug, Clone)]
pub struct RegionResult {
    pub symbolic: SymbolicMatrix,
    pub maxima: MatrixMax,
}

/// Full worst-case analysis of a parametric graph.
#[derive(Debug, Clone)]
pub struct WorstCase {
    pub repetition: RepetitionVector,
    pub schedule: QuasiStaticSchedule,
    pub regions: Vec<RegionResult>,
    pub combined: MaxPlusMatrix,
    pub mpag: Mpag,
    pub lambda: Rational,
    /// Token labels along a critical cycle.
    pub critical_cycle: Vec<String>,
    pub throughput: Rational,
}

pub fn worstcase_throughput(g: &PsadfGraph, opts: Options) -> Result<WorstCase> {
    let diags = validate(g);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::InvalidGraph(lines.join("; ")));
    }
    let repetition = repetition_vector(g)?;
    let schedule = quasi_static_schedule(g)?;
    let omega = Region::from_graph(g)?;
    let symbolic = symbolic_extract(g, &schedule, &omega)?;
    let mut opt = Optimizer::new(opts);
    let mut regions = Vec::with_capacity(symbolic.len());
    for m in symbolic {
        let maxima = opt.maximize_matrix(&m)?;
        regions.push(RegionResult { symbolic: m, maxima });
    }
    let mats: Vec<MaxPlusMatrix> = regions.iter().map(|r| r.maxima.matrix.clone()).collect();
    let combined = elementwise_max(&mats)?;
    let mpag = build_mpag(&combined);
    let (lambda, cycle) = mcm(&mpag);
    let lambda = match lambda {
        MaxPlusValue::Finite(v) if v.is_positive() => v,
        MaxPlusValue::Finite(l) => {
            return Err(Error::InvalidGraph(format!(
                "maximum cycle mean {} is not positive",
                rational::to_display(&l)
            )))
        }
        MaxPlusValue::NegInf => return Err(Error::NoCycle),
    };
    let throughput = Rational::one() / &lambda;
    let labels = combined.labels().to_vec();
    Ok(WorstCase {
        repetition,
        schedule,
        regions,
        combined,
        mpag,
        lambda,
        critical_cycle: cycle.iter().map(|&i| labels[i].clone()).collect(),
        throughput,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DurationKind, LinearConstraint};
    use crate::model::{self, Model};
    use crate::rational::{frac, int};
    use num_traits::Zero;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn pipeline() -> PsadfGraph {
        match model::parse(include_str!("../../../../models/dvfs_pipeline.psadf")).unwrap() {
            Model::Psadf(g) => g,
            _ => unreachable!(),
        }
    }

    fn poly(s: &str) -> Polynomial {
        let d: BTreeSet<String> = ["a", "b", "c", "d", "e", "ci", "k", "x"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Polynomial::parse(s, &d).unwrap()
    }

    fn ge_region() -> Region {
        Region::from_graph(&pipeline())
            .unwrap()
            .with_conflict(ConflictConstraint::prefer(&poly("b+p*q*c"), &poly("s*d")))
    }

    fn assert_in(r: &Region, p: &Point) {
        assert!(r.contains(p).unwrap(), "{p:?} not in {r}");
    }

    #[test]
    fn split_region_is_feasible_with_valid_witness() {
        let r = ge_region();
        let w = feasible(&r).unwrap().expect("feasible");
        assert_in(&r, &w);
        let le = Region::from_graph(&pipeline())
            .unwrap()
            .with_conflict(ConflictConstraint::prefer(&poly("s*d"), &poly("b+p*q*c")));
        assert_in(&le, &feasible(&le).unwrap().expect("feasible"));
    }

    #[test]
    fn contradictory_rate_constraint_is_infeasible() {
        let r = Region {
            rate_bounds: vec![RateBound {
                name: "p".into(),
                lo: 10,
                hi: 20,
            }],
            rate_constraints: vec![LinearConstraint::new(vec![("p".into(), int(-1))], int(-30))],
            ..Default::default()
        };
        assert_eq!(feasible(&r).unwrap(), None);
        assert!(matches!(
            maximize_entry(&poly("p"), &r, Options::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn d_branch_cannot_win_on_a_large_pq_box() {
        let mut r = Region::from_graph(&pipeline()).unwrap();
        r.rate_bounds = vec![
            RateBound {
                name: "p".into(),
                lo: 1300,
                hi: 1300,
            },
            RateBound {
                name: "q".into(),
                lo: 15,
                hi: 15,
            },
            RateBound {
                name: "s".into(),
                lo: 100,
                hi: 100,
            },
        ];
        let r = r.with_conflict(ConflictConstraint::prefer(&poly("s*d"), &poly("b+p*q*c")));
        // s*d = 300*ci stays below b + p*q*c = 78020*ci for every ci > 0.
        assert_eq!(feasible(&r).unwrap(), None);
    }

    #[test]
    fn critical_entry_maximum_and_argmax() {
        let r = ge_region();
        for prune in [true, false] {
            if !prune && cfg!(debug_assertions) {
                continue;
            }
            let m = maximize_entry(&poly("p*q*c"), &r, Options { prune }).unwrap();
            assert_eq!(m.value, int(390000));
            for (k, v) in [("p", 1300), ("q", 15), ("s", 100), ("ci", 5), ("c", 20), ("a", 150)] {
                assert_eq!(m.argmax[k], int(v), "{k}");
            }
            assert_in(&r, &m.argmax);
        }
        let m = maximize_entry(&poly("a+b+e+p*q*c"), &r, Options::default()).unwrap();
        // (30 + 20 + 1)*5 + 4*5*1300*15
        assert_eq!(m.value, int(51 * 5 + 4 * 5 * 1300 * 15));
        assert_eq!(
            maximize_entry(&poly("7"), &r, Options::default()).unwrap().value,
            int(7)
        );
    }

    #[test]
    fn one_by_one_matrix() {
        let r = Region {
            rate_bounds: vec![
                RateBound {
                    name: "p".into(),
                    lo: 10,
                    hi: 2000,
                },
                RateBound {
                    name: "s".into(),
                    lo: 100,
                    hi: 1500,
                },
            ],
            rate_constraints: vec![LinearConstraint::new(
                vec![("p".into(), int(1)), ("s".into(), int(1))],
                int(1400),
            )],
            ..Default::default()
        };
        let m = SymbolicMatrix {
            labels: vec!["t1".into()],
            entries: vec![vec![Some(poly("p"))]],
            region: r,
        };
        let out = maximize_matrix(&m, Options::default()).unwrap();
        assert_eq!(out.matrix.get(0, 0), &MaxPlusValue::Finite(int(1300)));
        let m = SymbolicMatrix {
            entries: vec![vec![None]],
            ..m
        };
        assert_eq!(
            maximize_matrix(&m, Options::default()).unwrap().matrix.get(0, 0),
            &MaxPlusValue::NegInf
        );
    }

    #[test]
    fn sampled_points_lie_in_the_region() {
        let r = ge_region();
        let pts = sample_points(&r, 20, 7).unwrap();
        assert_eq!(pts.len(), 20);
        for p in &pts {
            assert_in(&r, p);
        }
        assert_eq!(sample_points(&r, 20, 7).unwrap(), pts);
    }

    /// Random region over rates p, q, an integer duration k and a
    /// continuous duration x, with an optional conflict constraint.
    #[derive(Debug, Clone)]
    struct Case {
        region: Region,
        obj: Polynomial,
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((0i64..4, 0u32..3, 0u32..3, 0usize..3), 1..4).prop_map(|terms| {
            let mut s = Vec::new();
            for (c, ep, eq, d) in terms {
                let mut f = vec![c.to_string()];
                if ep > 0 {
                    f.push(format!("p^{ep}"));
                }
                if eq > 0 {
                    f.push(format!("q^{eq}"));
                }
                match d {
                    1 => f.push("k".into()),
                    2 => f.push("x".into()),
                    _ => {}
                }
                s.push(f.join("*"));
            }
            poly(&s.join("+"))
        })
    }

    fn arb_case() -> impl Strategy<Value = Case> {
        (
            (1i64..8, 0i64..12, 1i64..8, 0i64..12),
            (0i64..4, 0i64..4, 1i64..3, 1i64..4),
            proptest::option::of((0i64..3, 0i64..3, 5i64..40)),
            proptest::option::of((arb_poly(), arb_poly())),
            arb_poly(),
        )
            .prop_map(|((pl, pw, ql, qw), (kl, kw, xl, xw), lin, conflict, obj)| {
                let mut region = Region {
                    rate_bounds: vec![
                        RateBound {
                            name: "p".into(),
                            lo: pl,
                            hi: pl + pw,
                        },
                        RateBound {
                            name: "q".into(),
                            lo: ql,
                            hi: ql + qw,
                        },
                    ],
                    duration_bounds: vec![
                        DurationBound {
                            name: "k".into(),
                            lo: int(kl),
                            hi: int(kl + kw),
                            kind: DurationKind::Integer,
                        },
                        DurationBound {
                            name: "x".into(),
                            lo: frac(xl, 2),
                            hi: frac(xl, 2) + frac(xw, 3),
                            kind: DurationKind::Continuous,
                        },
                    ],
                    ..Default::default()
                };
                if let Some((a, b, c)) = lin {
                    region.rate_constraints.push(LinearConstraint::new(
                        vec![("p".into(), int(a)), ("q".into(), int(b))],
                        int(c),
                    ));
                }
                if let Some((w, l)) = conflict {
                    if w != l {
                        region = region.with_conflict(ConflictConstraint::prefer(&w, &l));
                    }
                }
                Case { region, obj }
            })
    }

    fn at(point: &[(&str, Rational)]) -> Point {
        point.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    /// Exhaustive oracle: lattice points in lexicographic order, and the
    /// feasible x interval computed from the conflict by hand.
    fn brute_force(c: &Case) -> Option<(Rational, Point)> {
        let r = &c.region;
        let (p, q, k, x) = (
            &r.rate_bounds[0],
            &r.rate_bounds[1],
            &r.duration_bounds[0],
            &r.duration_bounds[1],
        );
        let kl = k.lo.to_integer().to_string().parse::<i64>().unwrap();
        let kh = k.hi.to_integer().to_string().parse::<i64>().unwrap();
        let mut best: Option<(Rational, Point)> = None;
        for pv in p.lo..=p.hi {
            for qv in q.lo..=q.hi {
                for kv in kl..=kh {
                    let base = [("p", int(pv)), ("q", int(qv)), ("k", int(kv))];
                    let with = |xv: &Rational| {
                        let mut v = base.to_vec();
                        v.push(("x", xv.clone()));
                        at(&v)
                    };
                    if !r.rate_constraints.iter().all(|l| l.holds(&with(&x.lo)) == Some(true)) {
                        continue;
                    }
                    let (mut lo, mut hi) = (x.lo.clone(), x.hi.clone());
                    for cf in &r.conflicts {
                        // diff(x) = s*x + t on this point
                        let diff = cf.difference();
                        let t = diff.evaluate(&with(&Rational::zero())).unwrap();
                        let s = diff.evaluate(&with(&int(1))).unwrap() - &t;
                        if s.is_zero() {
                            if t.is_negative() {
                                hi = lo.clone() - int(1);
                            }
                        } else if s.is_positive() {
                            lo = lo.max(-&t / &s);
                        } else {
                            hi = hi.min(-&t / &s);
                        }
                    }
                    if lo > hi {
                        continue;
                    }
                    let vlo = c.obj.evaluate(&with(&lo)).unwrap();
                    let vhi = c.obj.evaluate(&with(&hi)).unwrap();
                    let (v, xv) = if vhi > vlo { (vhi, hi) } else { (vlo, lo) };
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, with(&xv)));
                    }
                }
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn maximum_matches_exhaustive_oracle(case in arb_case()) {
            let oracle = brute_force(&case);
            for prune in [true, false] {
                let got = maximize_entry(&case.obj, &case.region, Options { prune });
                match (&oracle, got) {
                    (None, Err(Error::Infeasible(_))) => {}
                    (Some((v, pt)), Ok(m)) => {
                        prop_assert_eq!(&m.value, v);
                        prop_assert_eq!(&m.argmax, pt);
                    }
                    (o, g) => prop_assert!(false, "oracle {:?} vs {:?}", o, g),
                }
            }
        }

        #[test]
        fn feasibility_witness_satisfies_every_constraint(case in arb_case()) {
            match feasible(&case.region).unwrap() {
                Some(w) => prop_assert!(case.region.contains(&w).unwrap()),
                None => prop_assert!(brute_force(&case).is_none()),
            }
        }

        #[test]
        fn maximum_is_monotone_in_the_region(case in arb_case(), cut in 1i64..20) {
            let inner = {
                let mut r = case.region.clone();
                r.rate_constraints.push(LinearConstraint::new(vec![("p".into(), int(1))], int(cut)));
                r
            };
            if let (Ok(a), Ok(b)) = (
                maximize_entry(&case.obj, &inner, Options::default()),
                maximize_entry(&case.obj, &case.region, Options::default()),
            ) {
                prop_assert!(a.value <= b.value);
            }
        }
    }
}
