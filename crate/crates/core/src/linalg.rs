//! Exact sparse linear algebra over a [`Scalar`] field.
//!
//! The central type is [`Subspace`], a subspace of `T^n` stored as the rows
//! of its reduced row echelon form. RREF is unique, so two subspaces are equal
//! iff their stored rows are identical, and membership is decided by reducing
//! against the pivots.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("column {col} out of range for dimension {dim}")]
    ColumnOutOfRange { col: usize, dim: usize },
}

/// A sparse vector: entries sorted by column, no explicit zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseVector<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> Default for SparseVector<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> SparseVector<T> {
    pub fn zero() -> Self {
        SparseVector {
            entries: Vec::new(),
        }
    }

    /// Builds a vector from `(column, value)` pairs in any order; repeated
    /// columns are summed.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, T)>) -> Self {
        let mut entries: Vec<(usize, T)> = entries.into_iter().collect();
        entries.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv = lv.clone() + v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        SparseVector { entries: merged }
    }

    pub fn from_dense(values: &[T]) -> Self {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone()))
                .collect(),
        }
    }

    pub fn unit(col: usize) -> Self {
        SparseVector {
            entries: vec![(col, T::one())],
        }
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<(usize, &T)> {
        self.entries.first().map(|(c, v)| (*c, v))
    }

    pub fn max_col(&self) -> Option<usize> {
        self.entries.last().map(|(c, _)| *c)
    }

    pub fn get(&self, col: usize) -> T {
        match self.entries.binary_search_by_key(&col, |(c, _)| *c) {
            Ok(idx) => self.entries[idx].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| (*c, v.clone() * s.clone()))
                .collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: &T, other: &Self) -> Self {
        if s.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i);
            let b = other.entries.get(j);
            match (a, b) {
                (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                    let v = va.clone() + s.clone() * vb.clone();
                    if !v.is_zero() {
                        out.push((*ca, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((ca, va)), Some((cb, _))) if ca < cb => {
                    out.push((*ca, va.clone()));
                    i += 1;
                }
                (Some((ca, va)), None) => {
                    out.push((*ca, va.clone()));
                    i += 1;
                }
                (_, Some((cb, vb))) => {
                    out.push((*cb, s.clone() * vb.clone()));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SparseVector { entries: out }
    }

    pub fn dot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ca, va) = &self.entries[i];
            let (cb, vb) = &other.entries[j];
            if ca == cb {
                acc = acc + va.clone() * vb.clone();
                i += 1;
                j += 1;
            } else if ca < cb {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    pub fn to_dense(&self, dim: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        for (c, v) in &self.entries {
            out[*c] = v.clone();
        }
        out
    }
}

/// Row-major sparse matrix with a fixed column count.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseMatrix<T> {
    cols: usize,
    rows: Vec<SparseVector<T>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn new(cols: usize) -> Self {
        SparseMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_dense(cols: usize, rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let mut m = Self::new(cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    left: cols,
                    right: row.len(),
                });
            }
            m.rows.push(SparseVector::from_dense(row));
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: SparseVector<T>) -> Result<(), LinalgError> {
        if let Some(col) = row.max_col().filter(|&c| c >= self.cols) {
            return Err(LinalgError::ColumnOutOfRange {
                col,
                dim: self.cols,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[SparseVector<T>] {
        &self.rows
    }

    pub fn mul_vec(&self, v: &SparseVector<T>) -> SparseVector<T> {
        SparseVector::from_entries(self.rows.iter().enumerate().map(|(r, row)| (r, row.dot(v))))
    }
}

/// A subspace of `T^ambient` in reduced row echelon form.
///
/// Invariants: pivots strictly increase, each pivot entry is one, and every
/// pivot column is zero in all other rows.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace<T> {
    ambient: usize,
    rows: Vec<SparseVector<T>>,
    pivots: Vec<usize>,
}

impl<T: Scalar> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: (0..ambient).map(SparseVector::unit).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors. Rows are inserted sparsest-first within each
    /// leading column to limit fill-in and coefficient growth.
    pub fn span(
        ambient: usize,
        vectors: impl IntoIterator<Item = SparseVector<T>>,
    ) -> Result<Self, LinalgError> {
        let mut vectors: Vec<SparseVector<T>> =
            vectors.into_iter().filter(|v| !v.is_zero()).collect();
        if let Some(col) = vectors
            .iter()
            .filter_map(|v| v.max_col())
            .max()
            .filter(|&c| c >= ambient)
        {
            return Err(LinalgError::ColumnOutOfRange { col, dim: ambient });
        }
        vectors.sort_by_key(|v| (v.leading().map(|(c, _)| c), v.nnz()));
        let mut out = Self::zero(ambient);
        for v in vectors {
            out.insert_unchecked(v);
            if out.dim() == ambient {
                break;
            }
        }
        Ok(out)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[SparseVector<T>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the pivots; the result is zero iff `v` lies in the
    /// subspace.
    pub fn reduce(&self, v: &SparseVector<T>) -> SparseVector<T> {
        // Rows vanish on all foreign pivot columns, so the coefficients to
        // eliminate can be read off `v` up front.
        let mut out = v.clone();
        for (c, val) in v.entries() {
            if let Ok(idx) = self.pivots.binary_search(c) {
                out = out.add_scaled(&-val.clone(), &self.rows[idx]);
            }
        }
        out
    }

    fn check_vector(&self, v: &SparseVector<T>) -> Result<(), LinalgError> {
        match v.max_col() {
            Some(col) if col >= self.ambient => Err(LinalgError::ColumnOutOfRange {
                col,
                dim: self.ambient,
            }),
            _ => Ok(()),
        }
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Adds `v` to the spanning set. Returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVector<T>) -> Result<bool, LinalgError> {
        self.check_vector(&v)?;
        Ok(self.insert_unchecked(v))
    }

    fn insert_unchecked(&mut self, v: SparseVector<T>) -> bool {
        let r = self.reduce(&v);
        let Some((pivot, lead)) = r.leading() else {
            return false;
        };
        let r = r.scale(&lead.inv());
        for row in &mut self.rows {
            let c = row.get(pivot);
            if !c.is_zero() {
                *row = row.add_scaled(&-c, &r);
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, r);
        true
    }

    pub fn contains(&self, v: &SparseVector<T>) -> Result<bool, LinalgError> {
        self.check_vector(v)?;
        Ok(self.reduce(v).is_zero())
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        Ok(self.rows.iter().all(|r| other.reduce(r).is_zero()))
    }

    pub fn equals(&self, other: &Self) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.pivots == other.pivots && self.rows == other.rows)
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for r in &other.rows {
            out.insert_unchecked(r.clone());
        }
        Ok(out)
    }

    /// First basis vector of `self` not contained in `other`, if any.
    pub fn witness_outside(&self, other: &Self) -> Result<Option<SparseVector<T>>, LinalgError> {
        self.check_ambient(other)?;
        Ok(self
            .rows
            .iter()
            .find(|r| !other.reduce(r).is_zero())
            .cloned())
    }
}

impl<T: Scalar> fmt::Display for Subspace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {} in {}", self.dim(), self.ambient)?;
        for r in &self.rows {
            let dense: Vec<String> = r
                .to_dense(self.ambient)
                .iter()
                .map(|v| v.to_string())
                .collect();
            writeln!(f, "[{}]", dense.join(", "))?;
        }
        Ok(())
    }
}

/// The row space of `m` in canonical form.
pub fn rref<T: Scalar>(m: &SparseMatrix<T>) -> Subspace<T> {
    Subspace::span(m.cols(), m.rows().iter().cloned())
        .expect("matrix rows are bounded by its column count")
}

/// The null space `{ v : m v = 0 }` as a subspace of `T^cols`.
pub fn kernel<T: Scalar>(m: &SparseMatrix<T>) -> Subspace<T> {
    let echelon = rref(m);
    let pivots = echelon.pivots();
    let mut basis = Vec::with_capacity(m.cols() - pivots.len());
    for free in (0..m.cols()).filter(|c| pivots.binary_search(c).is_err()) {
        let mut entries = vec![(free, T::one())];
        for (row, &p) in echelon.basis().iter().zip(pivots) {
            let c = row.get(free);
            if !c.is_zero() {
                entries.push((p, -c));
            }
        }
        basis.push(SparseVector::from_entries(entries));
    }
    Subspace::span(m.cols(), basis).expect("kernel vectors live in the domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn dense(rows: &[&[i64]]) -> SparseMatrix<Q> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| q(v)).collect())
            .collect();
        SparseMatrix::from_dense(cols, &rows).unwrap()
    }

    fn vec_of(values: &[i64]) -> SparseVector<Q> {
        SparseVector::from_dense(&values.iter().map(|&v| q(v)).collect::<Vec<_>>())
    }

    #[test]
    fn rref_identity() {
        let s = rref(&dense(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(s.dim(), 3);
        assert!(s.equals(&Subspace::full(3)).unwrap());
    }

    #[test]
    fn rref_dependent_rows() {
        let s = rref(&dense(&[&[1, 2], &[2, 4]]));
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis()[0], vec_of(&[1, 2]));
    }

    #[test]
    fn rref_zero_matrix() {
        assert_eq!(rref(&dense(&[&[0, 0], &[0, 0]])).dim(), 0);
    }

    #[test]
    fn rref_normalizes_and_back_substitutes() {
        let s = rref(&dense(&[&[0, 2, 4], &[3, 3, 3]]));
        assert_eq!(s.pivots(), &[0, 1]);
        assert_eq!(s.basis()[0], vec_of(&[1, 0, -1]));
        assert_eq!(s.basis()[1], vec_of(&[0, 1, 2]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&dense(&[&[1, 0], &[0, 1]])).dim(), 0);
        let k = kernel(&dense(&[&[1, -1]]));
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis()[0], vec_of(&[1, 1]));
        assert_eq!(kernel(&dense(&[&[0, 0, 0], &[0, 0, 0]])).dim(), 3);
    }

    #[test]
    fn subspace_relations() {
        let x = Subspace::span(2, [vec_of(&[1, 0])]).unwrap();
        let y = Subspace::span(2, [vec_of(&[0, 1])]).unwrap();
        let diag = Subspace::span(2, [vec_of(&[1, 1])]).unwrap();
        assert!(x.contains(&vec_of(&[2, 0])).unwrap());
        assert!(!x.contains(&vec_of(&[1, 1])).unwrap());
        assert!(diag.is_subspace_of(&Subspace::full(2)).unwrap());
        let plane = x.sum(&y).unwrap();
        assert_eq!(plane.dim(), 2);
        assert!(plane.equals(&Subspace::full(2)).unwrap());
        assert!(!diag.is_subspace_of(&x).unwrap());
        assert_eq!(diag.witness_outside(&x).unwrap(), Some(vec_of(&[1, 1])));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::<Q>::zero(2);
        let b = Subspace::<Q>::zero(3);
        assert_eq!(
            a.is_subspace_of(&b),
            Err(LinalgError::DimensionMismatch { left: 2, right: 3 })
        );
        assert!(a.contains(&vec_of(&[0, 0, 1])).is_err());
        let mut m = SparseMatrix::<Q>::new(2);
        assert!(m.push_row(vec_of(&[0, 0, 1])).is_err());
    }

    #[test]
    fn fixed_width_ratios_work_too() {
        use num_rational::Ratio;
        let rows: Vec<Vec<Ratio<i64>>> = vec![
            vec![Ratio::from_integer(2), Ratio::from_integer(1)],
            vec![Ratio::from_integer(4), Ratio::from_integer(2)],
        ];
        let m = SparseMatrix::from_dense(2, &rows).unwrap();
        let k = kernel(&m);
        assert_eq!(k.dim(), 1);
        assert_eq!(
            k.basis()[0].to_dense(2),
            vec![Ratio::from_integer(1), Ratio::from_integer(-2)]
        );
    }

    fn matrix_with_cols(cols: usize) -> impl Strategy<Value = SparseMatrix<Q>> {
        (1usize..7).prop_flat_map(move |rows| {
            prop::collection::vec(
                prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..5], cols),
                rows,
            )
            .prop_map(move |data| {
                let rows: Vec<Vec<Q>> = data
                    .into_iter()
                    .map(|r| r.into_iter().map(q).collect())
                    .collect();
                SparseMatrix::from_dense(cols, &rows).unwrap()
            })
        })
    }

    fn sparse_matrix() -> impl Strategy<Value = SparseMatrix<Q>> {
        (1usize..9).prop_flat_map(matrix_with_cols)
    }

    fn matrix_pair() -> impl Strategy<Value = (SparseMatrix<Q>, SparseMatrix<Q>)> {
        (1usize..6).prop_flat_map(|cols| (matrix_with_cols(cols), matrix_with_cols(cols)))
    }

    proptest! {
        #[test]
        fn rank_nullity(m in sparse_matrix()) {
            let rank = rref(&m).dim();
            let null = kernel(&m);
            prop_assert_eq!(rank + null.dim(), m.cols());
            for v in null.basis() {
                prop_assert!(m.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn rref_is_idempotent(m in sparse_matrix()) {
            let once = rref(&m);
            let again = Subspace::span(m.cols(), once.basis().iter().cloned()).unwrap();
            prop_assert_eq!(&once, &again);
            for w in once.pivots().windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for (row, &p) in once.basis().iter().zip(once.pivots()) {
                prop_assert!(row.get(p).is_one());
                for (other, &p2) in once.basis().iter().zip(once.pivots()) {
                    if p2 != p {
                        prop_assert!(other.get(p).is_zero());
                    }
                }
            }
        }

        #[test]
        fn equality_is_mutual_inclusion((a, b) in matrix_pair()) {
            let (sa, sb) = (rref(&a), rref(&b));
            let both = sa.is_subspace_of(&sb).unwrap() && sb.is_subspace_of(&sa).unwrap();
            prop_assert_eq!(sa.equals(&sb).unwrap(), both);
            let s = sa.sum(&sb).unwrap();
            prop_assert!(sa.is_subspace_of(&s).unwrap() && sb.is_subspace_of(&s).unwrap());
        }
    }
}
