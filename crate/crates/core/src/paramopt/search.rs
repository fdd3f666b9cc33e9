// SPDX-License-Identifier: Apache-2.0

//! Lattice search over compiled regions: exact leaf LPs, best-first
//! branch and bound, full enumeration and lexicographic witnesses.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::compile::{Compiled, IntPoly, LatPoly, LinForm, Row};
use super::lp::{self, LpOutcome};
use crate::poly::Point;
use crate::rational::Rational;

/// Maximises `c·y` over `a y ≤ b`, `lo ≤ y ≤ hi`.
fn lp_box(
    a: &[Vec<Rational>],
    b: &[Rational],
    lo: &[Rational],
    hi: &[Rational],
    c: &[Rational],
) -> Option<(Rational, Vec<Rational>)> {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return None;
    }
    if d == 0 {
        return b
            .iter()
            .all(|v| !v.is_negative())
            .then(|| (Rational::zero(), Vec::new()));
    }
    if d == 1 {
        let (mut l, mut h) = (lo[0].clone(), hi[0].clone());
        for (row, bb) in a.iter().zip(b) {
            let k = &row[0];
            if k.is_zero() {
                if bb.is_negative() {
                    return None;
                }
            } else if k.is_positive() {
                let v = bb / k;
                if v < h {
                    h = v;
                }
            } else {
                let v = bb / k;
                if v > l {
                    l = v;
                }
            }
        }
        if l > h {
            return None;
        }
        let y = if c[0].is_positive() { h } else { l };
        return Some((&c[0] * &y, vec![y]));
    }
    // shift y = lo + u, u ≥ 0, and add the upper bounds as rows
    let mut rows = Vec::with_capacity(a.len() + d);
    let mut rhs = Vec::with_capacity(a.len() + d);
    for (row, bb) in a.iter().zip(b) {
        let shift = row.iter().zip(lo).fold(Rational::zero(), |acc, (x, l)| acc + x * l);
        rows.push(row.clone());
        rhs.push(bb - shift);
    }
    for k in 0..d {
        let mut row = vec![Rational::zero(); d];
        row[k] = Rational::one();
        rows.push(row);
        rhs.push(&hi[k] - &lo[k]);
    }
    match lp::maximize(&rows, &rhs, c) {
        LpOutcome::Optimal { value, x } => {
            let base = c.iter().zip(lo).fold(Rational::zero(), |acc, (x, l)| acc + x * l);
            let y = x.iter().zip(lo).map(|(u, l)| u + l).collect();
            Some((value + base, y))
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("box-bounded problem"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    key: Rational,
    lo: Vec<i64>,
    hi: Vec<i64>,
    exact: bool,
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| other.lo.cmp(&self.lo))
            .then_with(|| self.exact.cmp(&other.exact))
            .then_with(|| other.hi.cmp(&self.hi))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Maximize,
    /// Stop at the first point whose objective is strictly positive.
    Positive,
}

/// Result of a search: lattice point and objective value.
pub(crate) type Hit = (Vec<i64>, Rational);

/// Lattice point, value and the fast-path numerator/denominator if any.
type Candidate = (Vec<i64>, Rational, Option<(i128, i128)>);

impl Compiled {
    fn ylo(&self) -> Vec<Rational> {
        self.cont.iter().map(|v| v.lo.clone()).collect()
    }

    fn yhi(&self) -> Vec<Rational> {
        self.cont.iter().map(|v| v.hi.clone()).collect()
    }

    fn rows_at(&self, z: &[i64]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let a = self
            .rows
            .iter()
            .map(|r| r.a.iter().map(|p| p.eval(z)).collect())
            .collect();
        let b = self.rows.iter().map(|r| r.b.eval(z)).collect();
        (a, b)
    }

    /// Maximum of every objective at the lattice point `z`, or `None` if
    /// the duration polytope is empty there.
    pub(crate) fn leaf_max(&self, z: &[i64], objs: &[&LinForm]) -> Option<Vec<Rational>> {
        if !self.lattice_rows_hold(z) {
            return None;
        }
        let (a, b) = self.rows_at(z);
        let (lo, hi) = (self.ylo(), self.yhi());
        if objs.is_empty() {
            lp_box(&a, &b, &lo, &hi, &vec![Rational::zero(); self.dims()])?;
            return Some(Vec::new());
        }
        let mut out = Vec::with_capacity(objs.len());
        for f in objs {
            let (c, c0) = f.eval(z);
            let (v, _) = lp_box(&a, &b, &lo, &hi, &c)?;
            out.push(v + c0);
        }
        Some(out)
    }

    /// Lexicographically smallest duration assignment at `z` among those
    /// reaching `value` for `obj`, as a full parameter point.
    pub(crate) fn witness(&self, z: &[i64], obj: Option<(&LinForm, &Rational)>) -> Option<Point> {
        let d = self.dims();
        let (mut a, mut b) = self.rows_at(z);
        let (lo, hi) = (self.ylo(), self.yhi());
        if let Some((f, v)) = obj {
            let (c, c0) = f.eval(z);
            a.push(c.iter().map(|x| -x.clone()).collect());
            b.push(c0 - v);
        }
        let mut y: Vec<Rational> = lo.clone();
        let (_, y0) = lp_box(&a, &b, &lo, &hi, &vec![Rational::zero(); d])?;
        if d > 0 {
            y = y0;
        }
        for (_, form) in &self.durations {
            let (c, _) = form.eval(z);
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let neg: Vec<Rational> = c.iter().map(|x| -x.clone()).collect();
            let (v, sol) = lp_box(&a, &b, &lo, &hi, &neg)?;
            let m = -v;
            a.push(c.clone());
            b.push(m.clone());
            a.push(neg);
            b.push(-m);
            y = sol;
        }
        let mut point = Point::new();
        for (i, var) in self.lattice.iter().enumerate() {
            point.insert(var.name.clone(), Rational::from_integer(z[i].into()));
        }
        for (name, form) in &self.durations {
            let (c, c0) = form.eval(z);
            let v = c.iter().zip(&y).fold(c0, |acc, (k, yy)| acc + k * yy);
            point.insert(name.clone(), v);
        }
        Some(point)
    }

    fn poly_bound(&self, p: &LatPoly, lo: &[i64], hi: &[i64], upper: bool) -> Rational {
        p.bound(lo, hi, upper)
    }

    /// Upper bound of a form over the lattice box and the y box.
    pub(crate) fn form_upper(&self, f: &LinForm, lo: &[i64], hi: &[i64]) -> Rational {
        let mut ub = self.poly_bound(&f.constant, lo, hi, true);
        for (k, c) in f.coefs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let u = self.poly_bound(c, lo, hi, true);
            let y = if u.is_negative() {
                &self.cont[k].lo
            } else {
                &self.cont[k].hi
            };
            ub += u * y;
        }
        ub
    }

    fn row_violated(&self, row: &Row, lo: &[i64], hi: &[i64]) -> bool {
        let mut lb = -self.poly_bound(&row.b, lo, hi, true);
        for (k, c) in row.a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = self.poly_bound(c, lo, hi, false);
            let y = if l.is_negative() {
                &self.cont[k].hi
            } else {
                &self.cont[k].lo
            };
            lb += l * y;
        }
        lb.is_positive()
    }

    fn box_alive(&self, lo: &mut [i64], hi: &mut [i64]) -> bool {
        self.propagate(lo, hi) && !self.rows.iter().any(|r| self.row_violated(r, lo, hi))
    }

    /// Best-first branch and bound. With `obj = None` it returns the
    /// lexicographically smallest feasible lattice point.
    pub(crate) fn best_first(&self, obj: Option<&LinForm>, goal: Goal) -> Option<Hit> {
        if self.infeasible {
            return None;
        }
        let (mut lo, mut hi) = (self.lattice_lo(), self.lattice_hi());
        if !self.box_alive(&mut lo, &mut hi) {
            return None;
        }
        let key_of = |lo: &[i64], hi: &[i64]| match obj {
            Some(f) => self.form_upper(f, lo, hi),
            None => Rational::zero(),
        };
        let mut heap = BinaryHeap::new();
        let key = key_of(&lo, &hi);
        if goal == Goal::Positive && !key.is_positive() {
            return None;
        }
        heap.push(Node {
            key,
            lo,
            hi,
            exact: false,
        });
        let objs: Vec<&LinForm> = obj.into_iter().collect();
        while let Some(node) = heap.pop() {
            if node.exact {
                return Some((node.lo, node.key));
            }
            if node.lo == node.hi {
                if let Some(v) = self.leaf_max(&node.lo, &objs) {
                    let v = v.into_iter().next().unwrap_or_else(Rational::zero);
                    if goal == Goal::Positive {
                        if v.is_positive() {
                            return Some((node.lo, v));
                        }
                        continue;
                    }
                    heap.push(Node {
                        key: v,
                        hi: node.lo.clone(),
                        lo: node.lo,
                        exact: true,
                    });
                }
                continue;
            }
            let j = (0..node.lo.len())
                .max_by(|&a, &b| {
                    (node.hi[a] - node.lo[a])
                        .cmp(&(node.hi[b] - node.lo[b]))
                        .then_with(|| b.cmp(&a))
                })
                .expect("non-leaf box has a dimension");
            let mid = node.lo[j] + (node.hi[j] - node.lo[j]).div_euclid(2);
            for (l, h) in [(node.lo[j], mid), (mid + 1, node.hi[j])] {
                let (mut clo, mut chi) = (node.lo.clone(), node.hi.clone());
                clo[j] = l;
                chi[j] = h;
                if !self.box_alive(&mut clo, &mut chi) {
                    continue;
                }
                let key = key_of(&clo, &chi);
                if goal == Goal::Positive && !key.is_positive() {
                    continue;
                }
                heap.push(Node {
                    key,
                    lo: clo,
                    hi: chi,
                    exact: false,
                });
            }
        }
        None
    }

    /// Exhaustive enumeration of the lattice in lexicographic order; every
    /// objective keeps its first (lexicographically smallest) maximiser.
    pub(crate) fn enumerate(&self, objs: &[&LinForm]) -> Vec<Option<Hit>> {
        let mut best: Vec<Option<Candidate>> = vec![None; objs.len()];
        if self.infeasible {
            return vec![None; objs.len()];
        }
        let fast = FastLeaf::new(self, objs);
        let (mut lo, mut hi) = (self.lattice_lo(), self.lattice_hi());
        let mut z = lo.clone();
        self.walk(0, &mut lo, &mut hi, &mut z, &mut |z| {
            let fast_vals = fast.as_ref().and_then(|f| f.eval(z));
            match fast_vals {
                Some(None) => {}
                Some(Some(vals)) => {
                    for (k, (n, d)) in vals.into_iter().enumerate() {
                        let better = match &best[k] {
                            None => true,
                            Some((_, cur, Some((cn, cd)))) => match frac_cmp((n, d), (*cn, *cd)) {
                                Some(o) => o == Ordering::Greater,
                                None => frac_to_rational(n, d) > *cur,
                            },
                            Some((_, cur, None)) => frac_to_rational(n, d) > *cur,
                        };
                        if better {
                            best[k] = Some((z.to_vec(), frac_to_rational(n, d), Some((n, d))));
                        }
                    }
                }
                None => {
                    if let Some(vals) = self.leaf_max(z, objs) {
                        for (k, v) in vals.into_iter().enumerate() {
                            if best[k].as_ref().is_none_or(|(_, cur, _)| v > *cur) {
                                best[k] = Some((z.to_vec(), v, None));
                            }
                        }
                    }
                }
            }
        });
        best.into_iter().map(|b| b.map(|(z, v, _)| (z, v))).collect()
    }

    fn walk(&self, depth: usize, lo: &mut [i64], hi: &mut [i64], z: &mut [i64], leaf: &mut dyn FnMut(&[i64])) {
        if depth == lo.len() {
            leaf(z);
            return;
        }
        let (mut l, mut h) = (lo.to_vec(), hi.to_vec());
        if !self.propagate(&mut l, &mut h) {
            return;
        }
        for v in l[depth]..=h[depth] {
            z[depth] = v;
            let (mut cl, mut ch) = (l.clone(), h.clone());
            cl[depth] = v;
            ch[depth] = v;
            self.walk(depth + 1, &mut cl, &mut ch, z, leaf);
        }
    }
}

fn frac_to_rational(n: i128, d: i128) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Compares `a/b` with `c/d` for positive denominators.
fn frac_cmp((a, b): (i128, i128), (c, d): (i128, i128)) -> Option<Ordering> {
    Some(a.checked_mul(d)?.cmp(&c.checked_mul(b)?))
}

fn rational_to_frac(r: &Rational) -> Option<(i128, i128)> {
    Some((r.numer().to_i128()?, r.denom().to_i128()?))
}

fn scaled(polys: &[&LatPoly]) -> Option<(Vec<IntPoly>, i128)> {
    let l = polys
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(&p.denominators_lcm()));
    let ints = polys.iter().map(|p| p.to_int(&l)).collect::<Option<Vec<_>>>()?;
    Some((ints, l.to_i128()?))
}

/// Integer evaluation of leaves with at most one continuous variable.
struct FastLeaf {
    rows: Vec<(Option<IntPoly>, IntPoly)>,
    lo: (i128, i128),
    hi: (i128, i128),
    objs: Vec<(Option<IntPoly>, IntPoly, i128)>,
}

impl FastLeaf {
    fn new(c: &Compiled, objs: &[&LinForm]) -> Option<FastLeaf> {
        if c.dims() > 1 || !c.lattice_rows.is_empty() && c.lattice_rows.iter().any(|r| r.terms.is_empty()) {
            return None;
        }
        let d1 = c.dims() == 1;
        let mut rows = Vec::new();
        for r in &c.rows {
            let polys: Vec<&LatPoly> = r.a.iter().chain(std::iter::once(&r.b)).collect();
            let (ints, _) = scaled(&polys)?;
            let mut it = ints.into_iter();
            let a = if d1 { Some(it.next()?) } else { None };
            rows.push((a, it.next()?));
        }
        let mut fobjs = Vec::new();
        for f in objs {
            let polys: Vec<&LatPoly> = f.coefs.iter().chain(std::iter::once(&f.constant)).collect();
            let (ints, den) = scaled(&polys)?;
            let mut it = ints.into_iter();
            let a = if d1 { Some(it.next()?) } else { None };
            fobjs.push((a, it.next()?, den));
        }
        let (lo, hi) = if d1 {
            (rational_to_frac(&c.cont[0].lo)?, rational_to_frac(&c.cont[0].hi)?)
        } else {
            ((0, 1), (0, 1))
        };
        Some(FastLeaf {
            rows,
            lo,
            hi,
            objs: fobjs,
        })
    }

    /// `None` on overflow, `Some(None)` when infeasible.
    fn eval(&self, z: &[i64]) -> Option<Option<Vec<(i128, i128)>>> {
        let (mut l, mut h) = (self.lo, self.hi);
        for (a, b) in &self.rows {
            let bv = b.eval(z)?;
            let av = match a {
                Some(a) => a.eval(z)?,
                None => 0,
            };
            match av.cmp(&0) {
                Ordering::Equal => {
                    if bv < 0 {
                        return Some(None);
                    }
                }
                Ordering::Greater => {
                    if frac_cmp((bv, av), h)? == Ordering::Less {
                        h = (bv, av);
                    }
                }
                Ordering::Less => {
                    let v = (bv.checked_neg()?, av.checked_neg()?);
                    if frac_cmp(v, l)? == Ordering::Greater {
                        l = v;
                    }
                }
            }
        }
        if frac_cmp(l, h)? == Ordering::Greater {
            return Some(None);
        }
        let mut out = Vec::with_capacity(self.objs.len());
        for (c, c0, den) in &self.objs {
            let cv = match c {
                Some(c) => c.eval(z)?,
                None => 0,
            };
            let c0v = c0.eval(z)?;
            let (yn, yd) = if cv > 0 { h } else { l };
            let num = cv.checked_mul(yn)?.checked_add(c0v.checked_mul(yd)?)?;
            let d = yd.checked_mul(*den)?;
            out.push((num, d));
        }
        Some(Some(out))
    }
}
