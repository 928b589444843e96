//! Exact, graded computations for principal subspaces of the standard
//! level-`k` modules `L(Lambda_{k,i})` of affine `sl(2)`.
//!
//! The principal subspace `W(Lambda_{k,i})` is the image of the commutative
//! polynomial algebra `U(n_-) = C[x(-1), x(-2), ...]` acting on a highest
//! weight vector. This crate checks, one bigrade `(weight, charge)` at a time,
//! that the kernel of that action is the ideal generated by the truncated
//! relations `R^0_{k,t}` and `x(-1)^{k-i+1}`.
//!
//! * [`algebra`]: monomials, polynomials, `tau`, `rho` and the generators.
//! * [`linalg`]: sparse exact row reduction and subspace comparison.
//! * [`lattice`]: the realization inside tensor powers of the lattice vertex
//!   operator algebra, where the highest weight vectors live.
//! * [`ideal`]: graded pieces of ideals and kernels, and the checks.
//! * [`characters`]: q-series cross-checks of the graded dimensions.
//!
//! All algorithms are generic over [`Scalar`]; the aliases below fix the
//! arbitrary-precision rationals used by default.

pub mod algebra;
pub mod characters;
pub mod ideal;
pub mod lattice;
pub mod linalg;
pub mod scalar;

pub use scalar::Scalar;

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
pub type Polynomial = algebra::Polynomial<Rational>;
pub type Subspace = linalg::Subspace<Rational>;
pub type SparseVector = linalg::SparseVector<Rational>;
pub type TensorVector = lattice::TensorVector<Rational>;
pub type Evaluator = lattice::Evaluator<Rational>;
pub type Engine = ideal::Engine<Rational>;
