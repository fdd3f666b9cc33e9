// SPDX-License-Identifier: Apache-2.0

//! Lowering of a [`Region`] into a lattice × polytope problem.
//!
//! Lattice variables are the rate parameters followed by the integer
//! duration parameters. Duration equalities are eliminated first, so the
//! continuous space `y` only holds the continuous durations that survive
//! presolve. Every duration and every polynomial is then a form
//! `Σ_k c_k(z)·y_k + c_0(z)` whose coefficients are polynomials in the
//! lattice point `z`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::region::Region;
use crate::error::{Error, Result};
use crate::graph::DurationKind;
use crate::poly::Polynomial;
use crate::rational::Rational;

/// Polynomial over lattice variables, exponents indexed by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct LatPoly {
    terms: Vec<(Vec<u32>, Rational)>,
}

impl LatPoly {
    fn from_map(m: BTreeMap<Vec<u32>, Rational>) -> Self {
        LatPoly {
            terms: m.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    fn to_map(&self) -> BTreeMap<Vec<u32>, Rational> {
        self.terms.iter().cloned().collect()
    }

    pub fn zero() -> Self {
        LatPoly { terms: Vec::new() }
    }

    pub fn constant(c: Rational, dims: usize) -> Self {
        Self::from_map([(vec![0; dims], c)].into())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(e, c)] if e.iter().all(|x| *x == 0) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &LatPoly) -> LatPoly {
        let mut m = self.to_map();
        for (e, c) in &other.terms {
            *m.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(m)
    }

    pub fn scale(&self, c: &Rational) -> LatPoly {
        Self::from_map(self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect())
    }

    pub fn mul_monomial(&self, c: &Rational, exps: &[u32]) -> LatPoly {
        let mut m = BTreeMap::new();
        for (e, v) in &self.terms {
            let e: Vec<u32> = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            *m.entry(e).or_insert_with(Rational::zero) += v * c;
        }
        Self::from_map(m)
    }

    pub fn eval(&self, z: &[i64]) -> Rational {
        let mut acc = BigInt::zero();
        let mut den = BigInt::one();
        // accumulate as a single fraction to limit normalisations
        for (e, c) in &self.terms {
            let mut t = c.numer().clone();
            for (x, k) in z.iter().zip(e) {
                if *k > 0 {
                    t *= num_traits::pow(BigInt::from(*x), *k as usize);
                }
            }
            if c.denom() == &den {
                acc += t;
            } else {
                let l = den.lcm(c.denom());
                acc = acc * (&l / &den) + t * (&l / c.denom());
                den = l;
            }
        }
        Rational::new(acc, den)
    }

    /// Upper (or lower) bound over the box `[lo, hi]`, all variables
    /// nonnegative.
    pub fn bound(&self, lo: &[i64], hi: &[i64], upper: bool) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let at = if c.is_positive() == upper { hi } else { lo };
            let mut t = c.clone();
            for (x, k) in at.iter().zip(e) {
                if *k > 0 {
                    t *= Rational::from_integer(num_traits::pow(BigInt::from(*x), *k as usize));
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_int(&self, scale: &BigInt) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let v = c * Rational::from_integer(scale.clone());
            if !v.is_integer() {
                return None;
            }
            let vars = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| (i, *k))
                .collect();
            terms.push((v.to_integer().to_i128()?, vars));
        }
        Some(IntPoly { terms })
    }

    pub fn denominators_lcm(&self) -> BigInt {
        self.terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }
}

/// Integer-coefficient polynomial evaluated with overflow checks.
#[derive(Debug, Clone)]
pub(crate) struct IntPoly {
    terms: Vec<(i128, Vec<(usize, u32)>)>,
}

impl IntPoly {
    #[inline]
    pub fn eval(&self, z: &[i64]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(i, k) in vars {
                for _ in 0..k {
                    t = t.checked_mul(z[i] as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }
}

/// `Σ_k coefs[k](z)·y_k + constant(z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct LinForm {
    pub coefs: Vec<LatPoly>,
    pub constant: LatPoly,
}

impl LinForm {
    fn zero(d: usize) -> Self {
        LinForm {
            coefs: vec![LatPoly::zero(); d],
            constant: LatPoly::zero(),
        }
    }

    fn add(&self, o: &LinForm) -> LinForm {
        LinForm {
            coefs: self.coefs.iter().zip(&o.coefs).map(|(a, b)| a.add(b)).collect(),
            constant: self.constant.add(&o.constant),
        }
    }

    fn mul_monomial(&self, c: &Rational, exps: &[u32]) -> LinForm {
        LinForm {
            coefs: self.coefs.iter().map(|p| p.mul_monomial(c, exps)).collect(),
            constant: self.constant.mul_monomial(c, exps),
        }
    }

    pub fn neg(&self) -> LinForm {
        let m1 = -Rational::one();
        LinForm {
            coefs: self.coefs.iter().map(|p| p.scale(&m1)).collect(),
            constant: self.constant.scale(&m1),
        }
    }

    pub fn eval(&self, z: &[i64]) -> (Vec<Rational>, Rational) {
        (self.coefs.iter().map(|p| p.eval(z)).collect(), self.constant.eval(z))
    }
}

/// `a(z) · y ≤ b(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Row {
    pub a: Vec<LatPoly>,
    pub b: LatPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LatVar {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ContVar {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
}

/// Linear constraint over lattice positions, `Σ c_k z_k ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LatticeRow {
    pub terms: Vec<(usize, Rational)>,
    pub bound: Rational,
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub lattice: Vec<LatVar>,
    pub cont: Vec<ContVar>,
    pub lattice_rows: Vec<LatticeRow>,
    pub rows: Vec<Row>,
    /// Every declared duration as a form over (z, y), declaration order.
    pub durations: Vec<(String, LinForm)>,
    /// Names of the rate parameters (a prefix of `lattice`).
    pub rate_count: usize,
    pub infeasible: bool,
}

fn ceil_i64(r: &Rational) -> Result<i64> {
    r.ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow("integer duration bound".into()))
}

fn floor_i64(r: &Rational) -> Result<i64> {
    r.floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow("integer duration bound".into()))
}

/// Dense row over the declared durations: `Σ c_k x_k ≤ b` (or `= b`).
type DenseRow = (Vec<Rational>, Rational);

pub(crate) fn compile(region: &Region) -> Result<Compiled> {
    let nd = region.duration_bounds.len();
    let dur_index: BTreeMap<&str, usize> = region
        .duration_bounds
        .iter()
        .enumerate()
        .map(|(i, b)| (b.name.as_str(), i))
        .collect();
    let continuous: Vec<bool> = region
        .duration_bounds
        .iter()
        .map(|b| b.kind == DurationKind::Continuous)
        .collect();

    let mut infeasible = false;
    let mut dense: Vec<DenseRow> = Vec::new();
    for c in &region.duration_constraints {
        let mut row = vec![Rational::zero(); nd];
        for (n, v) in &c.terms {
            let i = *dur_index
                .get(n.as_str())
                .ok_or_else(|| Error::InvalidGraph(format!("{n} is not a duration parameter")))?;
            row[i] += v;
        }
        dense.push((row, c.bound.clone()));
    }

    // pair up opposite inequalities into equalities
    let mut used = vec![false; dense.len()];
    let mut eqs: Vec<DenseRow> = Vec::new();
    for i in 0..dense.len() {
        if used[i] {
            continue;
        }
        for j in i + 1..dense.len() {
            if used[j] {
                continue;
            }
            let opposite =
                dense[i].0.iter().zip(&dense[j].0).all(|(a, b)| *a == -b.clone()) && dense[i].1 == -dense[j].1.clone();
            if opposite {
                used[i] = true;
                used[j] = true;
                eqs.push(dense[i].clone());
                break;
            }
        }
    }
    let mut ineqs: Vec<DenseRow> = dense
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(r, _)| r.clone())
        .collect();

    // x_p = Σ e_k x_k + e_0 for eliminated p
    let mut exprs: Vec<Option<DenseRow>> = vec![None; nd];
    loop {
        let occurrences = |k: usize, eqs: &[DenseRow], ineqs: &[DenseRow]| {
            eqs.iter().chain(ineqs).filter(|(r, _)| !r[k].is_zero()).count()
        };
        let mut pick: Option<(usize, usize, usize)> = None; // (count, var, eq)
        for (ei, (r, _)) in eqs.iter().enumerate() {
            for k in 0..nd {
                if continuous[k] && !r[k].is_zero() {
                    let cand = (occurrences(k, &eqs, &ineqs), k, ei);
                    if pick.is_none_or(|p| cand < p) {
                        pick = Some(cand);
                    }
                }
            }
        }
        let Some((_, p, ei)) = pick else { break };
        let (r, b) = eqs.remove(ei);
        let cp = r[p].clone();
        let mut e: Vec<Rational> = r.iter().map(|c| -c / &cp).collect();
        e[p] = Rational::zero();
        let e0 = &b / &cp;
        let subst = |row: &mut DenseRow| {
            let f = row.0[p].clone();
            if f.is_zero() {
                return;
            }
            for (v, ek) in row.0.iter_mut().zip(&e).take(nd) {
                *v += &f * ek;
            }
            row.0[p] = Rational::zero();
            row.1 -= &f * &e0;
        };
        for row in eqs.iter_mut().chain(ineqs.iter_mut()) {
            subst(row);
        }
        for x in exprs.iter_mut().flatten() {
            let f = x.0[p].clone();
            if !f.is_zero() {
                for (v, ek) in x.0.iter_mut().zip(&e).take(nd) {
                    *v += &f * ek;
                }
                x.0[p] = Rational::zero();
                x.1 += &f * &e0;
            }
        }
        exprs[p] = Some((e, e0));
    }
    for (r, b) in eqs {
        if r.iter().all(Zero::is_zero) {
            if !b.is_zero() {
                infeasible = true;
            }
        } else {
            ineqs.push((r.iter().map(|c| -c.clone()).collect(), -b.clone()));
            ineqs.push((r, b));
        }
    }

    // variable layout
    let mut lattice = Vec::new();
    for b in &region.rate_bounds {
        lattice.push(LatVar {
            name: b.name.clone(),
            lo: b.lo,
            hi: b.hi,
        });
        if b.lo > b.hi {
            infeasible = true;
        }
    }
    let rate_count = lattice.len();
    let mut cont = Vec::new();
    // position of each kept duration: Ok(lattice index) or Err(y index)
    let mut place: Vec<Option<std::result::Result<usize, usize>>> = vec![None; nd];
    for (k, b) in region.duration_bounds.iter().enumerate() {
        if exprs[k].is_some() {
            continue;
        }
        if continuous[k] {
            place[k] = Some(Err(cont.len()));
            cont.push(ContVar {
                name: b.name.clone(),
                lo: b.lo.clone(),
                hi: b.hi.clone(),
            });
            if b.lo > b.hi {
                infeasible = true;
            }
        } else {
            place[k] = Some(Ok(lattice.len()));
            let (lo, hi) = (ceil_i64(&b.lo)?, floor_i64(&b.hi)?);
            if lo > hi {
                infeasible = true;
            }
            lattice.push(LatVar {
                name: b.name.clone(),
                lo,
                hi,
            });
        }
    }
    let nl = lattice.len();
    let d = cont.len();

    let kept_form = |k: usize| -> LinForm {
        let mut f = LinForm::zero(d);
        match place[k].expect("kept variable") {
            Ok(li) => {
                let mut e = vec![0u32; nl];
                e[li] = 1;
                f.constant = LatPoly::from_map([(e, Rational::one())].into());
            }
            Err(yi) => f.coefs[yi] = LatPoly::constant(Rational::one(), nl),
        }
        f
    };
    let dense_form = |row: &[Rational], c0: &Rational| -> LinForm {
        let mut f = LinForm::zero(d);
        f.constant = LatPoly::constant(c0.clone(), nl);
        for (k, c) in row.iter().enumerate() {
            if !c.is_zero() {
                f = f.add(&kept_form(k).mul_monomial(c, &vec![0; nl]));
            }
        }
        f
    };
    let durations: Vec<(String, LinForm)> = region
        .duration_bounds
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let form = match &exprs[k] {
                Some((e, e0)) => dense_form(e, e0),
                None => kept_form(k),
            };
            (b.name.clone(), form)
        })
        .collect();

    let form_row = |f: &LinForm, bound: &Rational| -> Row {
        // f ≤ bound  ⇔  coefs·y ≤ bound − constant
        Row {
            a: f.coefs.clone(),
            b: LatPoly::constant(bound.clone(), nl).add(&f.constant.scale(&-Rational::one())),
        }
    };
    let mut rows = Vec::new();
    for (r, b) in &ineqs {
        rows.push(form_row(&dense_form(r, &Rational::zero()), b));
    }
    for (k, b) in region.duration_bounds.iter().enumerate() {
        if exprs[k].is_some() {
            let f = &durations[k].1;
            rows.push(form_row(f, &b.hi));
            rows.push(form_row(&f.neg(), &-b.lo.clone()));
        }
    }

    let mut compiled = Compiled {
        lattice,
        cont,
        lattice_rows: Vec::new(),
        rows: Vec::new(),
        durations,
        rate_count,
        infeasible,
    };
    for c in &region.rate_constraints {
        let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
        for (n, v) in &c.terms {
            let i = compiled.lattice[..rate_count]
                .iter()
                .position(|l| &l.name == n)
                .ok_or_else(|| Error::InvalidGraph(format!("{n} is not a rate parameter")))?;
            *terms.entry(i).or_insert_with(Rational::zero) += v;
        }
        compiled.lattice_rows.push(LatticeRow {
            terms: terms.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            bound: c.bound.clone(),
        });
    }
    for c in &region.conflicts {
        // difference ≥ 0  ⇔  −difference ≤ 0
        let f = compiled.linform(&c.difference())?.neg();
        rows.push(form_row(&f, &Rational::zero()));
    }

    // fold rows that only bound a single y by constants into the y box
    for row in rows {
        let consts: Option<Vec<Rational>> = row.a.iter().map(LatPoly::as_constant).collect();
        let (Some(a), Some(b)) = (consts, row.b.as_constant()) else {
            compiled.rows.push(row);
            continue;
        };
        let nz: Vec<usize> = (0..d).filter(|&k| !a[k].is_zero()).collect();
        match nz.as_slice() {
            [] => {
                if b.is_negative() {
                    compiled.infeasible = true;
                }
            }
            [k] => {
                let v = &b / &a[*k];
                let var = &mut compiled.cont[*k];
                if a[*k].is_positive() {
                    if v < var.hi {
                        var.hi = v;
                    }
                } else if v > var.lo {
                    var.lo = v;
                }
                if var.lo > var.hi {
                    compiled.infeasible = true;
                }
            }
            _ => compiled.rows.push(row),
        }
    }
    Ok(compiled)
}

impl Compiled {
    pub fn dims(&self) -> usize {
        self.cont.len()
    }

    /// Lowers a polynomial in rate and duration parameters.
    pub fn linform(&self, p: &Polynomial) -> Result<LinForm> {
        let nl = self.lattice.len();
        let d = self.cont.len();
        let mut out = LinForm::zero(d);
        for (key, c) in p.terms() {
            let mut exps = vec![0u32; nl];
            for (name, e) in &key.rates {
                let i = self.lattice[..self.rate_count]
                    .iter()
                    .position(|l| &l.name == name)
                    .ok_or_else(|| Error::Binding(format!("{name} is not a rate parameter of the region")))?;
                exps[i] += e;
            }
            let base = match &key.duration {
                None => LinForm {
                    coefs: vec![LatPoly::zero(); d],
                    constant: LatPoly::constant(Rational::one(), nl),
                },
                Some(dn) => self
                    .durations
                    .iter()
                    .find(|(n, _)| n == dn)
                    .map(|(_, f)| f.clone())
                    .ok_or_else(|| Error::Binding(format!("{dn} is not a duration parameter of the region")))?,
            };
            out = out.add(&base.mul_monomial(c, &exps));
        }
        Ok(out)
    }

    pub fn lattice_lo(&self) -> Vec<i64> {
        self.lattice.iter().map(|v| v.lo).collect()
    }

    pub fn lattice_hi(&self) -> Vec<i64> {
        self.lattice.iter().map(|v| v.hi).collect()
    }

    /// Tightens `[lo, hi]` with the lattice rows by interval propagation.
    /// Returns false when the box is empty.
    pub fn propagate(&self, lo: &mut [i64], hi: &mut [i64]) -> bool {
        for _ in 0..8 {
            let mut changed = false;
            for row in &self.lattice_rows {
                let mut minsum = Rational::zero();
                let mins: Vec<Rational> = row
                    .terms
                    .iter()
                    .map(|(i, c)| {
                        let at = if c.is_positive() { lo[*i] } else { hi[*i] };
                        c * Rational::from_integer(at.into())
                    })
                    .collect();
                for m in &mins {
                    minsum += m;
                }
                if minsum > row.bound {
                    return false;
                }
                for ((i, c), m) in row.terms.iter().zip(&mins) {
                    let slack = (&row.bound - (&minsum - m)) / c;
                    if c.is_positive() {
                        let v = slack.floor().to_integer().to_i64().unwrap_or(i64::MAX);
                        if v < hi[*i] {
                            hi[*i] = v;
                            changed = true;
                        }
                    } else {
                        let v = slack.ceil().to_integer().to_i64().unwrap_or(i64::MIN);
                        if v > lo[*i] {
                            lo[*i] = v;
                            changed = true;
                        }
                    }
                    if lo[*i] > hi[*i] {
                        return false;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    pub fn lattice_rows_hold(&self, z: &[i64]) -> bool {
        self.lattice_rows.iter().all(|row| {
            let lhs = row.terms.iter().fold(Rational::zero(), |acc, (i, c)| {
                acc + c * Rational::from_integer(z[*i].into())
            });
            lhs <= row.bound
        })
    }
}
