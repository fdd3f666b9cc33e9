// SPDX-License-Identifier: Apache-2.0

//! Rate and execution-time expressions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{MonomialKey, Point, Polynomial};
use crate::rational::{self, Rational};

/// A rate monomial `k · Π pr^e` with a positive integer coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RateExpr {
    coefficient: u64,
    factors: BTreeMap<String, u32>,
}

impl RateExpr {
    pub fn constant(k: u64) -> Self {
        assert!(k > 0, "rate coefficients are positive");
        RateExpr {
            coefficient: k,
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn param(name: &str) -> Self {
        RateExpr {
            coefficient: 1,
            factors: [(name.to_string(), 1)].into(),
        }
    }

    pub fn from_parts(coefficient: u64, factors: BTreeMap<String, u32>) -> Self {
        assert!(coefficient > 0, "rate coefficients are positive");
        let factors = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        RateExpr { coefficient, factors }
    }

    pub fn coefficient(&self) -> u64 {
        self.coefficient
    }

    pub fn factors(&self) -> &BTreeMap<String, u32> {
        &self.factors
    }

    pub fn as_constant(&self) -> Option<u64> {
        self.factors.is_empty().then_some(self.coefficient)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1)
    }

    pub fn checked_mul(&self, other: &RateExpr) -> Option<RateExpr> {
        let mut factors = self.factors.clone();
        for (k, e) in &other.factors {
            *factors.entry(k.clone()).or_insert(0) += e;
        }
        Some(RateExpr {
            coefficient: self.coefficient.checked_mul(other.coefficient)?,
            factors,
        })
    }

    /// Exact quotient when `other` divides `self` as a monomial.
    pub fn checked_div(&self, other: &RateExpr) -> Option<RateExpr> {
        if !self.coefficient.is_multiple_of(other.coefficient) {
            return None;
        }
        let mut factors = self.factors.clone();
        for (k, e) in &other.factors {
            let have = factors.get_mut(k)?;
            if *have < *e {
                return None;
            }
            *have -= e;
        }
        Some(RateExpr::from_parts(self.coefficient / other.coefficient, factors))
    }

    pub fn evaluate(&self, point: &Point) -> Result<u64> {
        let mut v = self.coefficient;
        for (name, e) in &self.factors {
            let r = point
                .get(name)
                .ok_or_else(|| Error::Binding(format!("rate parameter {name} is not assigned")))?;
            if !r.is_integer() || r <= &Rational::zero() {
                return Err(Error::Binding(format!(
                    "rate parameter {name} must be a positive integer, got {}",
                    rational::to_display(r)
                )));
            }
            let base = r
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::Overflow(format!("rate parameter {name}")))?;
            for _ in 0..*e {
                v = v
                    .checked_mul(base)
                    .ok_or_else(|| Error::Overflow(format!("rate {self} at the given point")))?;
            }
        }
        Ok(v)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::rate_monomial(Rational::from_integer(self.coefficient.into()), self.factors.clone())
    }
}

impl fmt::Display for RateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coefficient != 1 || self.factors.is_empty() {
            parts.push(self.coefficient.to_string());
        }
        for (k, e) in &self.factors {
            if *e == 1 {
                parts.push(k.clone());
            } else {
                parts.push(format!("{k}^{e}"));
            }
        }
        f.write_str(&parts.join("*"))
    }
}

impl FromStr for RateExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |m: String| Error::Parse { line: 0, message: m };
        let mut coefficient: u64 = 1;
        let mut factors = BTreeMap::new();
        for factor in s.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(err(format!("empty factor in rate '{s}'")));
            }
            if factor.chars().all(|c| c.is_ascii_digit()) {
                let k: u64 = factor
                    .parse()
                    .map_err(|_| err(format!("bad rate constant '{factor}'")))?;
                if k == 0 {
                    return Err(err("rate constants must be positive".into()));
                }
                coefficient = coefficient
                    .checked_mul(k)
                    .ok_or_else(|| err(format!("rate constant overflow in '{s}'")))?;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (
                    n.trim(),
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| err(format!("bad exponent '{factor}'")))?,
                ),
                None => (factor, 1),
            };
            if !is_identifier(name) {
                return Err(err(format!("bad rate factor '{factor}'")));
            }
            *factors.entry(name.to_string()).or_insert(0) += exp;
        }
        Ok(RateExpr::from_parts(coefficient, factors))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Execution time `Σ c_k · d_k + c_0`, linear in duration parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TimeExpr {
    terms: BTreeMap<String, Rational>,
    constant: Rational,
}

impl TimeExpr {
    pub fn constant(c: Rational) -> Self {
        TimeExpr {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn param(name: &str) -> Self {
        Self::linear([(name.to_string(), Rational::one())].into(), Rational::zero())
    }

    pub fn linear(terms: BTreeMap<String, Rational>, constant: Rational) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        TimeExpr { terms, constant }
    }

    pub fn terms(&self) -> &BTreeMap<String, Rational> {
        &self.terms
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.terms.is_empty().then_some(&self.constant)
    }

    pub fn evaluate(&self, point: &Point) -> Result<Rational> {
        let mut v = self.constant.clone();
        for (name, c) in &self.terms {
            let x = point
                .get(name)
                .ok_or_else(|| Error::Binding(format!("duration parameter {name} is not assigned")))?;
            v += c * x;
        }
        Ok(v)
    }

    pub fn scale(&self, c: &Rational) -> TimeExpr {
        TimeExpr::linear(
            self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            &self.constant * c,
        )
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::constant(self.constant.clone());
        for (name, c) in &self.terms {
            p.add_term(MonomialKey::duration(name), c.clone());
        }
        p
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            if c.is_one() {
                parts.push(k.clone());
            } else {
                parts.push(format!("{}*{k}", rational::to_display(c)));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(rational::to_display(&self.constant));
        }
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for TimeExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |m: String| Error::Parse { line: 0, message: m };
        let mut terms: BTreeMap<String, Rational> = BTreeMap::new();
        let mut constant = Rational::zero();
        for term in s.split('+').map(str::trim) {
            let mut coef = Rational::one();
            let mut name: Option<&str> = None;
            for factor in term.split('*').map(str::trim) {
                if let Some(v) = rational::parse(factor) {
                    coef *= v;
                } else if is_identifier(factor) && name.is_none() {
                    name = Some(factor);
                } else {
                    return Err(err(format!("bad execution-time term '{term}'")));
                }
            }
            match name {
                Some(n) => *terms.entry(n.to_string()).or_insert_with(Rational::zero) += coef,
                None => constant += coef,
            }
        }
        Ok(TimeExpr::linear(terms, constant))
    }
}
