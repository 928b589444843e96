//! The lattice realization of the level-one modules and their tensor powers.
//!
//! `V_P` has basis `alpha(-n_1) ... alpha(-n_s) (x) e^{l alpha}` with `l` a
//! half-integer. The level-one vacuum module sits at integral `l`, the other
//! level-one module at `l` in `1/2 + Z`. Lattice coordinates are stored doubled
//! (`lattice2 = 2 l`) so everything stays integral.
//!
//! The root-vector modes come from the vertex operator of `e^alpha`:
//!
//! ```text
//! Y(e^alpha, x) = exp(sum_n alpha(-n) x^n / n) exp(-sum_n alpha(n) x^-n / n) e^alpha x^alpha
//! x_alpha(m) = coefficient of x^(-m-1)
//! ```
//!
//! with the trivial cocycle. On a level-`k` tensor power the modes act
//! diagonally.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_integer::Roots;
use num_rational::Ratio;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Monomial, Polynomial};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("index {index} out of range for level {level}")]
    IndexOutOfRange { level: u32, index: u32 },
    #[error("pattern entries must be 0 or 1, got {0}")]
    PatternEntry(u8),
}

/// A basis vector `alpha(-n_1)...alpha(-n_s) (x) e^{l alpha}` of `V_P`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FockBasis {
    lattice2: i32,
    heis: Vec<u32>,
}

impl FockBasis {
    /// `heis` in any order; `lattice2` is twice the lattice coordinate.
    pub fn new(heis: impl IntoIterator<Item = u32>, lattice2: i32) -> Self {
        let mut heis: Vec<u32> = heis.into_iter().collect();
        assert!(
            heis.iter().all(|&n| n >= 1),
            "Heisenberg parts must be positive"
        );
        heis.sort_unstable_by(|a, b| b.cmp(a));
        FockBasis { lattice2, heis }
    }

    pub fn vacuum(lattice2: i32) -> Self {
        FockBasis {
            lattice2,
            heis: Vec::new(),
        }
    }

    pub fn heis(&self) -> &[u32] {
        &self.heis
    }

    pub fn lattice2(&self) -> i32 {
        self.lattice2
    }

    /// Conformal weight `sum n_j + l^2`, doubled-coordinate form `4 * weight`.
    fn weight4(&self) -> i64 {
        4 * self.heis.iter().map(|&n| n as i64).sum::<i64>()
            + (self.lattice2 as i64) * (self.lattice2 as i64)
    }

    fn with_lattice_shift(&self, delta2: i32) -> Self {
        FockBasis {
            lattice2: self.lattice2 + delta2,
            heis: self.heis.clone(),
        }
    }
}

impl fmt::Display for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.heis.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}|", parts.join(","))?;
        if self.lattice2 % 2 == 0 {
            write!(f, "{}]", self.lattice2 / 2)
        } else {
            write!(f, "{}/2]", self.lattice2)
        }
    }
}

/// A pure tensor of `k` Fock basis vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TensorBasis(Vec<FockBasis>);

impl TensorBasis {
    pub fn new(factors: Vec<FockBasis>) -> Self {
        TensorBasis(factors)
    }

    pub fn factors(&self) -> &[FockBasis] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for TensorBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, b) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A finite linear combination of basis vectors of type `B`.
#[derive(Clone, PartialEq, Debug)]
pub struct Combination<B: Ord, T> {
    terms: BTreeMap<B, T>,
}

pub type FockVector<T> = Combination<FockBasis, T>;
pub type TensorVector<T> = Combination<TensorBasis, T>;

impl<B: Ord + Clone, T: Scalar> Default for Combination<B, T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<B: Ord + Clone, T: Scalar> Combination<B, T> {
    pub fn zero() -> Self {
        Combination {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(b: B) -> Self {
        let mut out = Self::zero();
        out.add_term(b, T::one());
        out
    }

    pub fn add_term(&mut self, b: B, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(b) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&B, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, b: &B) -> T {
        self.terms.get(b).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b.clone(), c.clone());
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
        Combination {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }
}

impl<B: Ord + Clone + fmt::Display, T: Scalar> fmt::Display for Combination<B, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (b, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{b}")?;
            } else {
                write!(f, "({c})*{b}")?;
            }
        }
        Ok(())
    }
}

/// Which standard module `L(Lambda_{k,i})` is realized, and through which
/// embedding into the `k`-th tensor power.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ModuleConfig {
    level: u32,
    index: u32,
    pattern: Vec<u8>,
}

impl ModuleConfig {
    /// The canonical embedding: `i` ones followed by `k - i` zeros.
    pub fn new(level: u32, index: u32) -> Result<Self, LatticeError> {
        if level == 0 {
            return Err(LatticeError::ZeroLevel);
        }
        if index > level {
            return Err(LatticeError::IndexOutOfRange { level, index });
        }
        let pattern = (0..level).map(|j| u8::from(j < index)).collect();
        Ok(ModuleConfig {
            level,
            index,
            pattern,
        })
    }

    pub fn with_pattern(pattern: Vec<u8>) -> Result<Self, LatticeError> {
        if pattern.is_empty() {
            return Err(LatticeError::ZeroLevel);
        }
        if let Some(&bad) = pattern.iter().find(|&&j| j > 1) {
            return Err(LatticeError::PatternEntry(bad));
        }
        let index = pattern.iter().map(|&j| j as u32).sum();
        Ok(ModuleConfig {
            level: pattern.len() as u32,
            index,
            pattern,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    /// The embedding of `L(Lambda_{k,k-i})` with every pattern entry flipped.
    pub fn complement(&self) -> Self {
        ModuleConfig {
            level: self.level,
            index: self.level - self.index,
            pattern: self.pattern.iter().map(|&j| 1 - j).collect(),
        }
    }

    /// Absolute conformal weight `(i^2 + 2i) / (4(k + 2))` of the highest
    /// weight vector. All gradings used here are relative to it.
    pub fn conformal_offset(&self) -> Ratio<i64> {
        let (k, i) = (self.level as i64, self.index as i64);
        Ratio::new(i * i + 2 * i, 4 * (k + 2))
    }

    /// Absolute charge `i / 2` of the highest weight vector.
    pub fn charge_offset(&self) -> Ratio<i64> {
        Ratio::new(self.index as i64, 2)
    }

    /// `(weight, charge)` of a tensor basis vector relative to the highest
    /// weight vector, or `None` if it is not in the lattice cosets of this
    /// embedding.
    pub fn relative_bidegree(&self, b: &TensorBasis) -> Option<(i64, i64)> {
        if b.level() != self.level as usize {
            return None;
        }
        let mut weight4 = 0i64;
        let mut lattice2 = 0i64;
        for (f, &j) in b.factors().iter().zip(&self.pattern) {
            if (f.lattice2 - j as i32).rem_euclid(2) != 0 {
                return None;
            }
            weight4 += f.weight4() - (j as i64) * (j as i64);
            lattice2 += f.lattice2 as i64;
        }
        let charge2 = lattice2 - self.index as i64;
        Some((weight4 / 4, charge2 / 2))
    }
}

impl fmt::Display for ModuleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pattern: Vec<String> = self.pattern.iter().map(|j| j.to_string()).collect();
        write!(
            f,
            "L(Λ_{{{},{}}}) via ({})",
            self.level,
            self.index,
            pattern.join(",")
        )
    }
}

/// `alpha(n)` on `V_P`: creation for `n < 0`, annihilation for `n > 0`
/// (`[alpha(m), alpha(n)] = 2 m delta_{m+n,0}`), and `2l` for `n = 0`.
pub fn heis_action<T: Scalar>(n: i32, v: &FockVector<T>) -> FockVector<T> {
    let mut out = FockVector::zero();
    for (b, c) in v.terms() {
        match n.cmp(&0) {
            std::cmp::Ordering::Less => {
                let mut heis = b.heis.clone();
                heis.push(n.unsigned_abs());
                out.add_term(FockBasis::new(heis, b.lattice2), c.clone());
            }
            std::cmp::Ordering::Equal => {
                out.add_term(b.clone(), c.clone() * T::from_i64(b.lattice2 as i64));
            }
            std::cmp::Ordering::Greater => {
                let part = n as u32;
                let mult = b.heis.iter().filter(|&&p| p == part).count();
                if mult == 0 {
                    continue;
                }
                let pos = b.heis.iter().position(|&p| p == part).unwrap();
                let mut heis = b.heis.clone();
                heis.remove(pos);
                let factor = T::from_i64(2 * n as i64 * mult as i64);
                out.add_term(
                    FockBasis {
                        lattice2: b.lattice2,
                        heis,
                    },
                    c.clone() * factor,
                );
            }
        }
    }
    out
}

/// Partitions of one degree with their coefficients `1 / z_lambda`.
type CreationTable<T> = Arc<Vec<(Vec<u32>, T)>>;

/// Coefficient tables for the exponential of the creation operators:
/// `exp(sum_n alpha(-n) x^n / n) = sum_lambda alpha(-lambda) x^|lambda| / z_lambda`.
/// Filled lazily and shared between threads.
pub struct VertexOperator<T> {
    creation: RwLock<Vec<CreationTable<T>>>,
}

impl<T: Scalar> Default for VertexOperator<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> VertexOperator<T> {
    pub fn new() -> Self {
        VertexOperator {
            creation: RwLock::new(Vec::new()),
        }
    }

    /// All `(lambda, 1/z_lambda)` with `|lambda| = degree`.
    pub fn creation_terms(&self, degree: usize) -> CreationTable<T> {
        if let Some(t) = self.creation.read().unwrap().get(degree) {
            return t.clone();
        }
        let mut tables = self.creation.write().unwrap();
        while tables.len() <= degree {
            let d = tables.len() as u32;
            let mut terms = Vec::new();
            for c in 0..=d {
                for m in crate::algebra::enumerate_monomials(d, c, 1) {
                    let z = centralizer_order::<T>(m.parts());
                    terms.push((m.parts().to_vec(), z.inv()));
                }
            }
            tables.push(Arc::new(terms));
        }
        tables[degree].clone()
    }

    /// `x_alpha(m)` applied to a single basis vector.
    pub fn apply_mode(&self, m: i64, b: &FockBasis) -> Vec<(FockBasis, T)> {
        // creation degree minus annihilation degree needed to hit x^(-m-1)
        let excess = -m - 1 - b.lattice2 as i64;
        let mut out: BTreeMap<FockBasis, T> = BTreeMap::new();
        // distinct parts with multiplicities
        let mut groups: Vec<(u32, usize)> = Vec::new();
        for &p in &b.heis {
            match groups.last_mut() {
                Some((q, mult)) if *q == p => *mult += 1,
                _ => groups.push((p, 1)),
            }
        }
        let mut removed = vec![0usize; groups.len()];
        loop {
            let annihilated: i64 = groups
                .iter()
                .zip(&removed)
                .map(|((p, _), &j)| *p as i64 * j as i64)
                .sum();
            let degree = excess + annihilated;
            if degree >= 0 {
                let mut coeff = T::one();
                let mut rest: Vec<u32> = Vec::with_capacity(b.heis.len());
                for ((p, mult), &j) in groups.iter().zip(&removed) {
                    coeff = coeff * T::from_i64(binomial(*mult, j) * (-2i64).pow(j as u32));
                    rest.extend(std::iter::repeat_n(*p, mult - j));
                }
                for (lambda, inv_z) in self.creation_terms(degree as usize).iter() {
                    let heis = merge_desc(&rest, lambda);
                    let target = FockBasis {
                        lattice2: b.lattice2 + 2,
                        heis,
                    };
                    let c = coeff.clone() * inv_z.clone();
                    let entry = out.entry(target).or_insert_with(T::zero);
                    *entry = entry.clone() + c;
                }
            }
            // odometer over removal counts
            let mut idx = 0;
            loop {
                if idx == groups.len() {
                    return out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
                if removed[idx] < groups[idx].1 {
                    removed[idx] += 1;
                    break;
                }
                removed[idx] = 0;
                idx += 1;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// `z_lambda = prod_n n^{m_n} m_n!`.
fn centralizer_order<T: Scalar>(parts: &[u32]) -> T {
    let mut z = T::one();
    let mut idx = 0;
    while idx < parts.len() {
        let p = parts[idx];
        let run = parts[idx..].iter().take_while(|&&q| q == p).count();
        z = z * T::factorial(run as u32);
        for _ in 0..run {
            z = z * T::from_i64(p as i64);
        }
        idx += run;
    }
    z
}

fn merge_desc(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] >= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `x_alpha(m)` on a vector of `V_P`.
pub fn xalpha_mode<T: Scalar>(m: i64, v: &FockVector<T>) -> FockVector<T> {
    xalpha_mode_with(&VertexOperator::new(), m, v)
}

pub fn xalpha_mode_with<T: Scalar>(
    vo: &VertexOperator<T>,
    m: i64,
    v: &FockVector<T>,
) -> FockVector<T> {
    let mut out = FockVector::zero();
    for (b, c) in v.terms() {
        for (target, coeff) in vo.apply_mode(m, b) {
            out.add_term(target, coeff * c.clone());
        }
    }
    out
}

/// `v_{j_1} (x) ... (x) v_{j_k}` with `v_0 = 1 (x) e^0`, `v_1 = 1 (x) e^{alpha/2}`.
pub fn highest_weight_vector<T: Scalar>(cfg: &ModuleConfig) -> TensorVector<T> {
    TensorVector::basis(highest_weight_basis(cfg))
}

fn highest_weight_basis(cfg: &ModuleConfig) -> TensorBasis {
    TensorBasis(
        cfg.pattern
            .iter()
            .map(|&j| FockBasis::vacuum(j as i32))
            .collect(),
    )
}

/// `x_alpha(m)` on `V_P^{(x) k}` through the coproduct: the sum over slots.
pub fn diagonal_mode<T: Scalar>(m: i64, w: &TensorVector<T>) -> TensorVector<T> {
    diagonal_mode_with(&VertexOperator::new(), m, w)
}

pub fn diagonal_mode_with<T: Scalar>(
    vo: &VertexOperator<T>,
    m: i64,
    w: &TensorVector<T>,
) -> TensorVector<T> {
    let mut out = TensorVector::zero();
    for (b, c) in w.terms() {
        for slot in 0..b.level() {
            for (target, coeff) in vo.apply_mode(m, &b.0[slot]) {
                let mut factors = b.0.clone();
                factors[slot] = target;
                out.add_term(TensorBasis(factors), coeff * c.clone());
            }
        }
    }
    out
}

/// `f(a) = a . v_{Lambda_{k,i}}`.
pub fn evaluate<T: Scalar>(a: &Polynomial<T>, cfg: &ModuleConfig) -> TensorVector<T> {
    Evaluator::new(cfg.clone()).evaluate(a)
}

/// `e^{alpha/2}` on every tensor factor.
pub fn ealpha_half<T: Scalar>(w: &TensorVector<T>) -> TensorVector<T> {
    let mut out = TensorVector::zero();
    for (b, c) in w.terms() {
        out.add_term(
            TensorBasis(b.0.iter().map(|f| f.with_lattice_shift(1)).collect()),
            c.clone(),
        );
    }
    out
}

/// All tensor basis vectors of the given relative bidegree lying in the
/// lattice cosets of `cfg`, in sorted order.
pub fn graded_basis(cfg: &ModuleConfig, weight: u32, charge: u32) -> Vec<TensorBasis> {
    let target_lattice2 = 2 * charge as i64 + cfg.index as i64;
    let mut out = Vec::new();
    let mut factors = Vec::with_capacity(cfg.level as usize);
    fill_graded(
        cfg.pattern(),
        weight as i64,
        target_lattice2,
        &mut factors,
        &mut out,
    );
    out.sort();
    out
}

fn fill_graded(
    pattern: &[u8],
    weight_left: i64,
    lattice2_left: i64,
    factors: &mut Vec<FockBasis>,
    out: &mut Vec<TensorBasis>,
) {
    let Some((&j, rest)) = pattern.split_first() else {
        if weight_left == 0 && lattice2_left == 0 {
            out.push(TensorBasis(factors.clone()));
        }
        return;
    };
    let j = j as i64;
    // (l2^2 - j^2) / 4 <= weight_left bounds |l2|
    let bound = (4 * weight_left + j * j).sqrt() + 1;
    let mut l2 = -bound;
    if (l2 - j).rem_euclid(2) != 0 {
        l2 += 1;
    }
    while l2 <= bound {
        let lattice_weight = (l2 * l2 - j * j) / 4;
        if lattice_weight <= weight_left {
            let heis_budget = weight_left - lattice_weight;
            for h in 0..=heis_budget {
                for c in 0..=h {
                    for m in crate::algebra::enumerate_monomials(h as u32, c as u32, 1) {
                        factors.push(FockBasis {
                            lattice2: l2 as i32,
                            heis: m.parts().to_vec(),
                        });
                        fill_graded(rest, heis_budget - h, lattice2_left - l2, factors, out);
                        factors.pop();
                    }
                }
            }
        }
        l2 += 2;
    }
}

/// Evaluation of monomials on one highest weight vector, memoized by monomial.
///
/// `image(x(-d_1) ... x(-d_r)) = x(-d_1) . image(x(-d_2) ... x(-d_r))`; the
/// cache is safe to share between worker threads.
pub struct Evaluator<T> {
    cfg: ModuleConfig,
    vertex: VertexOperator<T>,
    cache: RwLock<HashMap<Monomial, Arc<TensorVector<T>>>>,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(cfg: ModuleConfig) -> Self {
        Evaluator {
            cfg,
            vertex: VertexOperator::new(),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &ModuleConfig {
        &self.cfg
    }

    pub fn vertex(&self) -> &VertexOperator<T> {
        &self.vertex
    }

    pub fn image(&self, m: &Monomial) -> Arc<TensorVector<T>> {
        if let Some(v) = self.cache.read().unwrap().get(m) {
            return v.clone();
        }
        let v = match m.split_first() {
            None => Arc::new(highest_weight_vector(&self.cfg)),
            Some((d, rest)) => {
                let tail = self.image(&rest);
                if tail.is_zero() {
                    tail
                } else {
                    Arc::new(diagonal_mode_with(&self.vertex, -(d as i64), &tail))
                }
            }
        };
        self.cache.write().unwrap().insert(m.clone(), v.clone());
        v
    }

    pub fn evaluate(&self, a: &Polynomial<T>) -> TensorVector<T> {
        let mut out = TensorVector::zero();
        for (m, c) in a.terms() {
            for (b, v) in self.image(m).terms() {
                out.add_term(b.clone(), v.clone() * c.clone());
            }
        }
        out
    }

    pub fn cached_monomials(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}
