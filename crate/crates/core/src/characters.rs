//! Truncated q-series, fermionic sums, and difference-two partition counts.
//!
//! These give three independent descriptions of the bigraded dimensions of
//! the principal subspaces: the exact kernel computation
//! ([`dimension_table`]), a combinatorial basis count
//! ([`difference_two_table`]) and a multi-sum q-series ([`fermionic_sum`]).
//!
//! Coefficients are plain `i64` counts. Every arithmetic step is checked and
//! overflow panics rather than wrapping, which cannot happen below order ~400.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::ideal::{bigrades, Engine};
use crate::lattice::ModuleConfig;
use crate::scalar::Scalar;

/// A power series in `q` known up to and including `q^order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<i64>,
}

fn checked(v: Option<i64>) -> i64 {
    v.expect("series coefficient overflow")
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![0; order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, 1, order)
    }

    /// `coeff * q^power`, which is zero if `power > order`.
    pub fn monomial(power: usize, coeff: i64, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = coeff;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        QSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coefficient(&self, power: usize) -> i64 {
        self.coeffs.get(power).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        QSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| checked(self.coeffs[n].checked_add(other.coeffs[n])))
            .collect();
        QSeries { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (a, &x) in self.coeffs[..=order]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
        {
            for (b, &y) in other.coeffs[..=order - a].iter().enumerate() {
                out.coeffs[a + b] =
                    checked(out.coeffs[a + b].checked_add(checked(x.checked_mul(y))));
            }
        }
        out
    }

    /// Multiplication by `q^s`.
    pub fn shift(&self, s: usize) -> Self {
        let mut out = Self::zero(self.order());
        for n in s..=self.order() {
            out.coeffs[n] = self.coeffs[n - s];
        }
        out
    }

    /// Division by `1 - q^j` for `j >= 1`.
    fn div_one_minus(&self, j: usize) -> Self {
        let mut out = self.clone();
        for n in j..=self.order() {
            out.coeffs[n] = checked(out.coeffs[n].checked_add(out.coeffs[n - j]));
        }
        out
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (n, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "q")?,
                (1, _) => write!(f, "{a}*q")?,
                (_, 1) => write!(f, "q^{n}")?,
                _ => write!(f, "{a}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// `(q; q)_n = (1 - q)(1 - q^2)...(1 - q^n)` truncated at `q^order`.
pub fn q_pochhammer(n: usize, order: usize) -> QSeries {
    let mut s = QSeries::one(order);
    for j in 1..=n.min(order) {
        s = s.add(&s.shift(j).mul(&QSeries::monomial(0, -1, order)));
    }
    s
}

/// `1 / (q; q)_n`: partitions into parts of size at most `n`.
pub fn inverse_q_pochhammer(n: usize, order: usize) -> QSeries {
    (1..=n.min(order)).fold(QSeries::one(order), |s, j| s.div_one_minus(j))
}

/// A polynomial in the charge variable `x` with [`QSeries`] coefficients.
/// Zero coefficients are never stored, so equal series compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateSeries {
    order: usize,
    terms: BTreeMap<u32, QSeries>,
}

impl BivariateSeries {
    pub fn zero(order: usize) -> Self {
        BivariateSeries {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add_term(&mut self, charge: u32, s: &QSeries) {
        let s = s.truncate(self.order);
        let entry = self
            .terms
            .entry(charge)
            .or_insert_with(|| QSeries::zero(self.order));
        *entry = entry.add(&s);
        if entry.is_zero() {
            self.terms.remove(&charge);
        }
    }

    pub fn add_coefficient(&mut self, charge: u32, power: usize, coeff: i64) {
        self.add_term(charge, &QSeries::monomial(power, coeff, self.order));
    }

    pub fn coefficient(&self, charge: u32, power: usize) -> i64 {
        self.terms.get(&charge).map_or(0, |s| s.coefficient(power))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &QSeries)> {
        self.terms.iter().map(|(&r, s)| (r, s))
    }

    /// Specialization `x = 1`.
    pub fn charge_summed(&self) -> QSeries {
        self.terms
            .values()
            .fold(QSeries::zero(self.order), |acc, s| acc.add(s))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::zero(order);
        for (r, s) in self.terms() {
            out.add_term(r, &s.truncate(order));
        }
        out
    }
}

impl Serialize for BivariateSeries {
    /// `[[r, [c0, c1, ...]], ...]`, sorted by charge.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (r, s) in self.terms() {
            seq.serialize_element(&(r, s.coeffs()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BivariateSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<(u32, Vec<i64>)> = Deserialize::deserialize(deserializer)?;
        let order = rows.first().map_or(0, |(_, c)| c.len().saturating_sub(1));
        if rows.iter().any(|(_, c)| c.len() != order + 1) {
            return Err(serde::de::Error::custom("rows of unequal length"));
        }
        let mut out = BivariateSeries::zero(order);
        for (r, c) in rows {
            out.add_term(r, &QSeries::from_coeffs(c));
        }
        Ok(out)
    }
}

/// Which partial sum of `N_1 >= ... >= N_k` enters the exponent of `q` in
/// [`fermionic_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearTerm {
    /// `N_{k-i+1} + ... + N_k`
    LastI,
    /// `N_{i+1} + ... + N_k`
    FromIPlusOne,
    /// `N_1 + ... + N_i`
    FirstI,
}

impl LinearTerm {
    pub const ALL: [LinearTerm; 3] = [
        LinearTerm::LastI,
        LinearTerm::FromIPlusOne,
        LinearTerm::FirstI,
    ];

    /// Value for `big_n = [N_1, ..., N_k]`.
    pub fn value(self, i: u32, big_n: &[u32]) -> u32 {
        let k = big_n.len();
        let i = i as usize;
        let range = match self {
            LinearTerm::LastI => k - i..k,
            LinearTerm::FromIPlusOne => i..k,
            LinearTerm::FirstI => 0..i,
        };
        big_n[range].iter().sum()
    }
}

impl Default for LinearTerm {
    /// The convention matching the kernel computation for every `(k, i)`.
    fn default() -> Self {
        LinearTerm::LastI
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearTerm::LastI => "last-i",
            LinearTerm::FromIPlusOne => "from-i-plus-one",
            LinearTerm::FirstI => "first-i",
        })
    }
}

impl std::str::FromStr for LinearTerm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LinearTerm::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| {
                format!("unknown convention `{s}` (expected last-i, from-i-plus-one or first-i)")
            })
    }
}

/// `sum x^{N_1+...+N_k} q^{N_1^2+...+N_k^2 + L(N)} / ((q)_{n_1} ... (q)_{n_k})`
/// over `n_j >= 0`, where `N_j = n_j + ... + n_k`.
pub fn fermionic_sum(k: u32, i: u32, order: usize, linear: LinearTerm) -> BivariateSeries {
    assert!(k >= 1 && i <= k, "need 1 <= k and i <= k");
    let inverse: Vec<QSeries> = (0..=order)
        .map(|n| inverse_q_pochhammer(n, order))
        .collect();
    let mut out = BivariateSeries::zero(order);
    let mut big_n = Vec::with_capacity(k as usize);
    fermionic_terms(
        k as usize, i, order, linear, &inverse, &mut big_n, 0, &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn fermionic_terms(
    k: usize,
    i: u32,
    order: usize,
    linear: LinearTerm,
    inverse: &[QSeries],
    big_n: &mut Vec<u32>,
    squares: usize,
    out: &mut BivariateSeries,
) {
    if big_n.len() == k {
        let exponent = squares + linear.value(i, big_n) as usize;
        if exponent > order {
            return;
        }
        let mut s = QSeries::monomial(exponent, 1, order);
        for j in 0..k {
            let n_j = big_n[j] - big_n.get(j + 1).copied().unwrap_or(0);
            s = s.mul(&inverse[(n_j as usize).min(order)]);
        }
        out.add_term(big_n.iter().sum(), &s);
        return;
    }
    let cap = big_n.last().copied().unwrap_or(u32::MAX);
    let mut m = 0u32;
    while m <= cap && squares + (m as usize).pow(2) <= order {
        big_n.push(m);
        fermionic_terms(
            k,
            i,
            order,
            linear,
            inverse,
            big_n,
            squares + (m as usize).pow(2),
            out,
        );
        big_n.pop();
        m += 1;
    }
}

/// Table of partitions `d_1 >= ... >= d_c >= 1` of weight `n <= order` with
/// `d_j >= d_{j+k} + 2` and at most `k - i` parts equal to 1, as
/// `sum count * x^c q^n`.
pub fn difference_two_table(k: u32, i: u32, order: usize) -> BivariateSeries {
    assert!(k >= 1 && i <= k, "need 1 <= k and i <= k");
    let mut counts = vec![vec![0i64; order + 1]; order + 1];
    let mut parts = Vec::new();
    difference_two_walk(
        k as usize,
        (k - i) as usize,
        order,
        &mut parts,
        0,
        &mut counts,
    );
    let mut out = BivariateSeries::zero(order);
    for (c, row) in counts.into_iter().enumerate() {
        out.add_term(c as u32, &QSeries::from_coeffs(row));
    }
    out
}

fn difference_two_walk(
    k: usize,
    max_ones: usize,
    order: usize,
    parts: &mut Vec<u32>,
    sum: usize,
    counts: &mut [Vec<i64>],
) {
    counts[parts.len()][sum] += 1;
    let largest = parts.last().map_or(order, |&p| p as usize).min(order - sum);
    let ones = parts.iter().filter(|&&p| p == 1).count();
    for p in 1..=largest {
        if p == 1 && ones >= max_ones {
            continue;
        }
        if parts.len() >= k && (parts[parts.len() - k] as usize) < p + 2 {
            continue;
        }
        parts.push(p as u32);
        difference_two_walk(k, max_ones, order, parts, sum + p, counts);
        parts.pop();
    }
}

/// Number of difference-two partitions of `n` with `c` parts; see
/// [`difference_two_table`].
pub fn difference_two_count(k: u32, i: u32, n: u32, c: u32) -> i64 {
    difference_two_table(k, i, n as usize).coefficient(c, n as usize)
}

/// Bigraded dimensions of the principal subspace `W(Lambda_{k,i})` up to
/// weight `order`, from exact kernels of the evaluation map.
pub fn dimension_table<T: Scalar>(
    engine: &Engine<T>,
    k: u32,
    i: u32,
    order: usize,
) -> BivariateSeries {
    let cfg = ModuleConfig::new(k, i).expect("valid level and index");
    let mut out = BivariateSeries::zero(order);
    let dims: Vec<_> = bigrades(order as u32, order as u32)
        .into_par_iter()
        .map(|(n, c)| (n, c, engine.quotient_dimension(&cfg, n, c)))
        .collect();
    for (n, c, d) in dims {
        out.add_coefficient(c, n as usize, d as i64);
    }
    out
}

/// Outcome of [`compare`]; a mismatch names the first differing coefficient
/// in (power, charge) order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Comparison {
    Equal,
    Mismatch {
        charge: u32,
        power: usize,
        left: i64,
        right: i64,
    },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        *self == Comparison::Equal
    }
}

/// Coefficientwise comparison of `a` and `b` up to `q^order`, all charges.
pub fn compare(a: &BivariateSeries, b: &BivariateSeries, order: usize) -> Comparison {
    assert!(
        order <= a.order() && order <= b.order(),
        "comparison beyond truncation"
    );
    let charges: std::collections::BTreeSet<u32> =
        a.terms.keys().chain(b.terms.keys()).copied().collect();
    for power in 0..=order {
        for &charge in &charges {
            let (left, right) = (a.coefficient(charge, power), b.coefficient(charge, power));
            if left != right {
                return Comparison::Mismatch {
                    charge,
                    power,
                    left,
                    right,
                };
            }
        }
    }
    Comparison::Equal
}
