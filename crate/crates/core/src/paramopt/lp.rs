// SPDX-License-Identifier: Apache-2.0

//! Dense two-phase simplex over exact rationals with Bland's rule.
//! Sized for the handful of continuous duration parameters left after
//! presolve.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for j in 0..self.cols {
                if !self.rows[r][j].is_zero() {
                    let d = &f * &self.rows[r][j];
                    self.rows[i][j] -= d;
                }
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Maximises `cost · x` over columns allowed by `allowed`.
    /// Returns false when unbounded.
    fn optimise(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() && !cost[b].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Maximises `c · x` subject to `A x ≤ b`, `x ≥ 0`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let negatives: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let cols = n + m + negatives.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols];
        let neg = b[i].is_negative();
        for j in 0..n {
            row[j] = if neg { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = if neg {
            -Rational::from_integer(1.into())
        } else {
            Rational::from_integer(1.into())
        };
        if neg {
            let k = negatives.iter().position(|&x| x == i).unwrap();
            row[n + m + k] = Rational::from_integer(1.into());
            basis.push(n + m + k);
            rhs.push(-b[i].clone());
        } else {
            basis.push(n + i);
            rhs.push(b[i].clone());
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, rhs, basis, cols };
    let is_art = |j: usize| j >= n + m;

    if !negatives.is_empty() {
        let mut cost = vec![Rational::zero(); cols];
        for v in cost.iter_mut().skip(n + m) {
            *v = -Rational::from_integer(1.into());
        }
        t.optimise(&cost, &|_| true);
        let infeasible = t
            .basis
            .iter()
            .enumerate()
            .any(|(i, &bv)| is_art(bv) && !t.rhs[i].is_zero());
        if infeasible {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if is_art(t.basis[i]) {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    cost[..n].clone_from_slice(c);
    if !t.optimise(&cost, &|j| !is_art(j)) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs[i].clone();
        }
    }
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        int(v)
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let a = vec![vec![q(1), q(0)], vec![q(0), q(2)], vec![q(3), q(2)]];
        let r = maximize(&a, &[q(4), q(12), q(18)], &[q(3), q(5)]);
        assert_eq!(
            r,
            LpOutcome::Optimal {
                value: q(36),
                x: vec![q(2), q(6)]
            }
        );
    }

    #[test]
    fn needs_phase_one() {
        // x + y ≥ 2 (as -x - y ≤ -2), x ≤ 3, y ≤ 1; max -x → x = 1
        let a = vec![vec![q(-1), q(-1)], vec![q(1), q(0)], vec![q(0), q(1)]];
        let r = maximize(&a, &[q(-2), q(3), q(1)], &[q(-1), q(0)]);
        match r {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q(-1));
                assert_eq!(x[0], q(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![q(1)], vec![q(-1)]];
        assert_eq!(maximize(&a, &[q(1), q(-2)], &[q(1)]), LpOutcome::Infeasible);
        let a = vec![vec![q(-1)]];
        assert_eq!(maximize(&a, &[q(0)], &[q(1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn fractional_vertex() {
        // max x + y, 2x + y ≤ 3, x + 3y ≤ 4 → (1, 1)
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let r = maximize(&a, &[q(3), q(4)], &[q(1), q(1)]);
        assert!(matches!(r, LpOutcome::Optimal { ref value, .. } if *value == q(2)));
        let r = maximize(&a, &[q(3), q(4)], &[q(1), q(0)]);
        assert!(matches!(r, LpOutcome::Optimal { ref value, .. } if *value == frac(3, 2)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// Two-variable problems against a vertex enumeration oracle.
        #[test]
        fn matches_vertex_enumeration(
            rows in prop::collection::vec((-5i64..6, -5i64..6, -10i64..20), 1..5),
            c in (-5i64..6, -5i64..6),
        ) {
            let mut a: Vec<Vec<Rational>> = rows.iter().map(|(x, y, _)| vec![q(*x), q(*y)]).collect();
            let mut b: Vec<Rational> = rows.iter().map(|(_, _, r)| q(*r)).collect();
            // bounding box keeps the problem bounded
            a.push(vec![q(1), q(0)]); b.push(q(10));
            a.push(vec![q(0), q(1)]); b.push(q(10));
            let cv = [q(c.0), q(c.1)];
            // all lines, including x = 0 and y = 0
            let mut lines: Vec<(Rational, Rational, Rational)> =
                a.iter().zip(&b).map(|(r, bb)| (r[0].clone(), r[1].clone(), bb.clone())).collect();
            lines.push((q(1), q(0), q(0)));
            lines.push((q(0), q(1), q(0)));
            let feasible = |x: &Rational, y: &Rational| {
                !x.is_negative() && !y.is_negative()
                    && a.iter().zip(&b).all(|(r, bb)| &r[0] * x + &r[1] * y <= *bb)
            };
            let mut best: Option<Rational> = None;
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let (a1, b1, c1) = &lines[i];
                    let (a2, b2, c2) = &lines[j];
                    let det = a1 * b2 - a2 * b1;
                    if det.is_zero() { continue; }
                    let x = (c1 * b2 - c2 * b1) / &det;
                    let y = (a1 * c2 - a2 * c1) / &det;
                    if feasible(&x, &y) {
                        let v = &cv[0] * &x + &cv[1] * &y;
                        if best.as_ref().is_none_or(|bv| v > *bv) { best = Some(v); }
                    }
                }
            }
            match (maximize(&a, &b, &cv), best) {
                (LpOutcome::Optimal { value, x }, Some(bv)) => {
                    prop_assert_eq!(&value, &bv);
                    prop_assert!(feasible(&x[0], &x[1]));
                }
                (LpOutcome::Infeasible, None) => {}
                (r, bv) => prop_assert!(false, "simplex {:?} vs oracle {:?}", r, bv),
            }
        }
    }
}
