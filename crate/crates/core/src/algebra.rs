//! The commutative algebra `C[x(-1), x(-2), ...]` of negative modes of the root
//! vector, bigraded by weight (`wt x(-d) = d`) and charge (`x(-d)` has charge 1).
//!
//! Monomials are stored as partitions (descending part sequences), which is
//! both canonical and sparse. The subalgebra generated by modes `x(-d)` with
//! `d >= 2` is represented by the same types; membership is a property of the
//! parts.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("shifting part {part} by {shift} leaves the negative modes")]
    ShiftBelowOne { part: u32, shift: i64 },
}

/// A monomial `x(-d_1) x(-d_2) ... x(-d_r)` with `d_1 >= d_2 >= ... >= d_r >= 1`.
///
/// Monomials are ordered by weight, then charge, then reverse-lexicographically
/// on the part sequence (so `x(-3)x(-1)` precedes `x(-2)^2`). This order fixes
/// the column indexing of every graded piece.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    parts: Vec<u32>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial { parts: Vec::new() }
    }

    /// Builds a monomial from parts in any order. Panics on a zero part.
    pub fn new(parts: impl IntoIterator<Item = u32>) -> Self {
        let mut parts: Vec<u32> = parts.into_iter().collect();
        assert!(
            parts.iter().all(|&d| d >= 1),
            "monomial parts must be positive"
        );
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Monomial { parts }
    }

    /// `x(-d)^e`.
    pub fn power(d: u32, e: usize) -> Self {
        Monomial::new(std::iter::repeat_n(d, e))
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn charge(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn is_unit(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min_part(&self) -> Option<u32> {
        self.parts.last().copied()
    }

    /// Number of factors equal to `x(-d)`.
    pub fn multiplicity(&self, d: u32) -> usize {
        self.parts.iter().filter(|&&p| p == d).count()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut parts = Vec::with_capacity(self.parts.len() + other.parts.len());
        let (mut a, mut b) = (self.parts.iter().peekable(), other.parts.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x >= y {
                        parts.push(x);
                        a.next();
                    } else {
                        parts.push(y);
                        b.next();
                    }
                }
                (Some(_), None) => parts.extend(a.by_ref().copied()),
                (None, Some(_)) => parts.extend(b.by_ref().copied()),
                (None, None) => break,
            }
        }
        Monomial { parts }
    }

    /// Applies `tau^s`, i.e. `x(-d) -> x(-(d + s))` on every factor.
    pub fn shift(&self, s: i64) -> Result<Monomial, AlgebraError> {
        let parts = self
            .parts
            .iter()
            .map(|&d| {
                let shifted = d as i64 + s;
                if shifted < 1 {
                    Err(AlgebraError::ShiftBelowOne { part: d, shift: s })
                } else {
                    Ok(shifted as u32)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Monomial { parts })
    }

    /// Removes the largest factor, returning it with the remaining monomial.
    pub fn split_first(&self) -> Option<(u32, Monomial)> {
        let (&first, rest) = self.parts.split_first()?;
        Some((
            first,
            Monomial {
                parts: rest.to_vec(),
            },
        ))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.parts.len().cmp(&other.parts.len()))
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut idx = 0;
        while idx < self.parts.len() {
            let d = self.parts[idx];
            let run = self.parts[idx..].iter().take_while(|&&p| p == d).count();
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if run == 1 {
                write!(f, "x(-{d})")?;
            } else {
                write!(f, "x(-{d})^{run}")?;
            }
            idx += run;
        }
        Ok(())
    }
}

/// All partitions of `weight` into exactly `charge` parts, each at least
/// `min_part`, listed in the global monomial order.
pub fn enumerate_monomials(weight: u32, charge: u32, min_part: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(charge as usize);
    fill_partitions(
        weight,
        charge,
        weight,
        min_part.max(1),
        &mut current,
        &mut out,
    );
    out
}

fn fill_partitions(
    remaining: u32,
    slots: u32,
    max_part: u32,
    min_part: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(Monomial {
                parts: current.clone(),
            });
        }
        return;
    }
    if remaining < slots * min_part {
        return;
    }
    // the first part must leave room for slots - 1 further parts >= min_part
    let hi = max_part.min(remaining - (slots - 1) * min_part);
    // and cannot be below the average
    let lo = min_part.max(remaining.div_ceil(slots));
    for d in (lo..=hi).rev() {
        current.push(d);
        fill_partitions(remaining - d, slots - 1, d, min_part, current, out);
        current.pop();
    }
}

/// A finite linear combination of monomials with exact coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::unit())
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(T::one(), m)
    }

    pub fn term(coeff: T, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    /// Adds `coeff * m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c.clone()))
                .collect(),
        }
    }

    /// The common `(weight, charge)` of all terms, if there is one. The zero
    /// polynomial has none.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let deg = (first.weight(), first.charge());
        it.all(|m| (m.weight(), m.charge()) == deg).then_some(deg)
    }

    pub fn is_doubly_homogeneous(&self) -> bool {
        self.bidegree().is_some()
    }

    /// Smallest part over all monomials, `None` for constants and zero.
    pub fn min_part(&self) -> Option<u32> {
        self.terms.keys().filter_map(Monomial::min_part).min()
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = *c < T::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_unit() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// `tau^s`: shifts every mode `x(m) -> x(m - s)`, i.e. every part by `+s`.
pub fn tau_power<T: Scalar>(p: &Polynomial<T>, s: i64) -> Result<Polynomial<T>, AlgebraError> {
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        out.add_term(m.shift(s)?, c.clone());
    }
    Ok(out)
}

/// Projection onto the subalgebra generated by `x(-d)`, `d >= 2`, along the
/// ideal generated by `x(-1)`.
pub fn rho<T: Scalar>(p: &Polynomial<T>) -> Polynomial<T> {
    Polynomial {
        terms: p
            .terms()
            .filter(|(m, _)| m.multiplicity(1) == 0)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    }
}

/// Which truncation of the level-`k` relation to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truncation {
    /// All modes `<= -1`.
    Negative,
    /// All modes `<= -2`.
    BelowMinusOne,
}

impl Truncation {
    pub fn min_part(self) -> u32 {
        match self {
            Truncation::Negative => 1,
            Truncation::BelowMinusOne => 2,
        }
    }

    pub fn from_variant(variant: u8) -> Option<Self> {
        match variant {
            0 => Some(Truncation::Negative),
            1 => Some(Truncation::BelowMinusOne),
            _ => None,
        }
    }
}

/// The truncated relation of weight `t` at level `k`: the sum over ordered
/// `(k+1)`-tuples of modes with the given bound and total `-t`, collected into
/// commutative form. A monomial with part multiplicities `mu_d` appears with
/// coefficient `(k+1)! / prod mu_d!`.
pub fn r_generator<T: Scalar>(k: u32, t: u32, truncation: Truncation) -> Polynomial<T> {
    assert!(k >= 1, "level must be positive");
    let mut out = Polynomial::zero();
    for m in enumerate_monomials(t, k + 1, truncation.min_part()) {
        out.add_term(m.clone(), multinomial_coefficient::<T>(&m));
    }
    out
}

/// Number of distinct orderings of the parts of `m`.
pub fn multinomial_coefficient<T: Scalar>(m: &Monomial) -> T {
    let mut denom = T::one();
    let parts = m.parts();
    let mut idx = 0;
    while idx < parts.len() {
        let run = parts[idx..]
            .iter()
            .take_while(|&&p| p == parts[idx])
            .count();
        denom = denom * T::factorial(run as u32);
        idx += run;
    }
    T::factorial(parts.len() as u32) / denom
}
