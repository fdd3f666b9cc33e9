// SPDX-License-Identifier: Apache-2.0

//! Multivariate polynomials over exact rationals.
//!
//! A monomial is a product of rate parameters (any nonnegative exponents)
//! and at most one duration parameter. Weights of the symbolic engine are
//! coefficient-nonnegative polynomials; differences used as region
//! constraints may carry negative coefficients.
//!
//! Canonical order: ascending rate exponent vector (variables in
//! alphabetical order), then the duration factor (none first).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Parameter valuation. Rate parameters carry integral values.
pub type Point = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialKey {
    pub rates: BTreeMap<String, u32>,
    pub duration: Option<String>,
}

impl MonomialKey {
    pub fn constant() -> Self {
        Self::default()
    }

    pub fn duration(name: &str) -> Self {
        MonomialKey {
            rates: BTreeMap::new(),
            duration: Some(name.to_string()),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.rates.is_empty() && self.duration.is_none()
    }

    fn compare_rates(a: &BTreeMap<String, u32>, b: &BTreeMap<String, u32>) -> Ordering {
        let mut ia = a.iter().peekable();
        let mut ib = b.iter().peekable();
        loop {
            match (ia.peek(), ib.peek()) {
                (None, None) => return Ordering::Equal,
                // a has a variable b lacks: a's exponent is larger
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((na, ea)), Some((nb, eb))) => match na.cmp(nb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(eb) {
                            Ordering::Equal => {}
                            o => return o,
                        }
                        ia.next();
                        ib.next();
                    }
                },
            }
        }
    }
}

impl Ord for MonomialKey {
    fn cmp(&self, other: &Self) -> Ordering {
        Self::compare_rates(&self.rates, &other.rates).then_with(|| self.duration.cmp(&other.duration))
    }
}

impl PartialOrd for MonomialKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonomialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in &self.rates {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if let Some(d) = &self.duration {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(d)?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A single term `coefficient · key`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: Rational,
    pub key: MonomialKey,
}

/// A conventional sum of monomials in normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    terms: BTreeMap<MonomialKey, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, MonomialKey::constant())
    }

    pub fn term(c: Rational, key: MonomialKey) -> Self {
        let mut p = Self::zero();
        p.add_term(key, c);
        p
    }

    pub fn duration(name: &str) -> Self {
        Self::term(Rational::one(), MonomialKey::duration(name))
    }

    pub fn rate_monomial(c: Rational, rates: BTreeMap<String, u32>) -> Self {
        Self::term(c, MonomialKey { rates, duration: None })
    }

    pub fn add_term(&mut self, key: MonomialKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Rational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(k, c)| Monomial {
                coefficient: c.clone(),
                key: k.clone(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &MonomialKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Every coefficient of `self − other` is ≥ 0, which implies
    /// `self ≥ other` wherever all parameters are nonnegative.
    pub fn dominates_coefficientwise(&self, other: &Polynomial) -> bool {
        (self - other).is_nonnegative()
    }

    pub fn duration_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.duration.is_some() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for k in self.terms.keys() {
            out.extend(k.rates.keys().cloned());
            out.extend(k.duration.iter().cloned());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// Multiplies by `c · Π rates`; never touches duration factors.
    pub fn mul_rate_monomial(&self, c: &Rational, rates: &BTreeMap<String, u32>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, v) in &self.terms {
            let mut key = k.clone();
            for (name, e) in rates {
                *key.rates.entry(name.clone()).or_insert(0) += e;
            }
            out.add_term(key, v * c);
        }
        out
    }

    pub fn evaluate(&self, point: &Point) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (name, e) in &k.rates {
                let v = point
                    .get(name)
                    .ok_or_else(|| Error::Binding(format!("parameter {name} is not assigned")))?;
                t *= num_traits::pow(v.clone(), *e as usize);
            }
            if let Some(d) = &k.duration {
                let v = point
                    .get(d)
                    .ok_or_else(|| Error::Binding(format!("parameter {d} is not assigned")))?;
                t *= v;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Splits into (positive part, magnitude of negative part) so that
    /// `self = pos − neg`.
    pub fn split_signs(&self) -> (Polynomial, Polynomial) {
        let mut pos = Polynomial::zero();
        let mut neg = Polynomial::zero();
        for (k, c) in &self.terms {
            if c.is_negative() {
                neg.add_term(k.clone(), -c);
            } else {
                pos.add_term(k.clone(), c.clone());
            }
        }
        (pos, neg)
    }

    /// Parses the canonical textual form, e.g. `a+b+4*p*q*ci`. Identifiers
    /// listed in `durations` are duration parameters, everything else is a
    /// rate parameter.
    pub fn parse(s: &str, durations: &BTreeSet<String>) -> Result<Polynomial> {
        let err = |m: String| Error::Parse { line: 0, message: m };
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty polynomial".into()));
        }
        let mut out = Polynomial::zero();
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && !(i > 0 && s[..i].ends_with('^')) {
                if i > 0 {
                    terms.push((negative, std::mem::take(&mut cur)));
                }
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        terms.push((negative, cur));
        for (neg, t) in terms {
            if t.is_empty() {
                return Err(err(format!("empty term in '{s}'")));
            }
            let mut coef = Rational::one();
            let mut key = MonomialKey::constant();
            for factor in t.split('*') {
                if factor.starts_with(|c: char| c.is_ascii_digit()) {
                    coef *= rational::parse(factor).ok_or_else(|| err(format!("bad number '{factor}'")))?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>()
                            .map_err(|_| err(format!("bad exponent in '{factor}'")))?,
                    ),
                    None => (factor, 1),
                };
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(err(format!("bad factor '{factor}'")));
                }
                if durations.contains(name) {
                    if exp != 1 || key.duration.is_some() {
                        return Err(err(format!("term '{t}' is not linear in durations")));
                    }
                    key.duration = Some(name.to_string());
                } else if exp > 0 {
                    *key.rates.entry(name.to_string()).or_insert(0) += exp;
                }
            }
            out.add_term(key, if neg { -coef } else { coef });
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if idx > 0 {
                f.write_str("+")?;
            }
            if k.is_constant() {
                f.write_str(&rational::to_display(&mag))?;
            } else if mag.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "{}*{}", rational::to_display(&mag), k)?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}
