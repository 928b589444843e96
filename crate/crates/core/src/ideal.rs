//! Graded pieces of the relation ideals and of the kernels of the evaluation
//! maps, and the checks comparing them.
//!
//! Everything here works one bigrade `(weight n, charge c)` at a time. A piece
//! of `U(n_-)` is coordinatized by `enumerate_monomials(n, c, 1)` (or
//! `min_part = 2` for the primed subalgebra), and ideals and kernels are
//! [`Subspace`]s of that coordinate space.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    enumerate_monomials, multinomial_coefficient, r_generator, rho, tau_power, Monomial,
    Polynomial, Truncation,
};
use crate::lattice::{diagonal_mode, highest_weight_vector, Evaluator, ModuleConfig};
use crate::linalg::{kernel, SparseMatrix, SparseVector, Subspace};
use crate::scalar::Scalar;

/// Ordered monomial basis of one bigraded piece.
#[derive(Clone, Debug)]
pub struct PieceBasis {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl PieceBasis {
    pub fn new(weight: u32, charge: u32, min_part: u32) -> Self {
        let monomials = enumerate_monomials(weight, charge, min_part);
        let index = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        PieceBasis { monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of `p`; `None` if some term lies outside this piece.
    pub fn coordinates<T: Scalar>(&self, p: &Polynomial<T>) -> Option<SparseVector<T>> {
        let mut entries = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            entries.push((self.position(m)?, c.clone()));
        }
        Some(SparseVector::from_entries(entries))
    }

    pub fn polynomial<T: Scalar>(&self, v: &SparseVector<T>) -> Polynomial<T> {
        let mut p = Polynomial::zero();
        for (idx, c) in v.entries() {
            p.add_term(self.monomials[*idx].clone(), c.clone());
        }
        p
    }
}

/// The bigrades `(n, c)` with `n <= n_max` and `c <= min(n, c_max)` that can
/// carry monomials: `(0, 0)` and `1 <= c <= n`.
pub fn bigrades(n_max: u32, c_max: u32) -> Vec<(u32, u32)> {
    let mut out = vec![(0, 0)];
    for n in 1..=n_max {
        for c in 1..=n.min(c_max) {
            out.push((n, c));
        }
    }
    out
}

/// Piece at `(n, c)` of `I_{Lambda_{k,i}}` (or of `I'_{Lambda_{k,k}}` when
/// `primed`), spanned by all cofactor multiples of the generators landing in
/// that bigrade.
pub fn ideal_piece<T: Scalar>(k: u32, i: u32, n: u32, c: u32, primed: bool) -> Subspace<T> {
    assert!(i <= k, "index exceeds level");
    assert!(
        !primed || i == k,
        "the primed ideal is only defined for i = k"
    );
    let min_part = if primed { 2 } else { 1 };
    let basis = PieceBasis::new(n, c, min_part);
    let mut rows = Vec::new();
    let truncation = if primed {
        Truncation::BelowMinusOne
    } else {
        Truncation::Negative
    };
    let t_min = (k + 1) * min_part;
    if c > k {
        for t in t_min..=n {
            let generator = r_generator::<T>(k, t, truncation);
            for cofactor in enumerate_monomials(n - t, c - (k + 1), min_part) {
                rows.push(
                    basis
                        .coordinates(&generator.mul_monomial(&cofactor))
                        .expect("products stay in the piece"),
                );
            }
        }
    }
    let power = k - i + 1;
    if !primed && c >= power && n >= power {
        let generator = Monomial::power(1, power as usize);
        for cofactor in enumerate_monomials(n - power, c - power, 1) {
            let idx = basis
                .position(&cofactor.mul(&generator))
                .expect("product in piece");
            rows.push(SparseVector::unit(idx));
        }
    }
    Subspace::span(basis.dim(), rows).expect("rows are piece coordinates")
}

/// Kernel of the evaluation matrix whose columns are the images of `monomials`.
fn evaluation_kernel<T: Scalar>(ev: &Evaluator<T>, monomials: &[Monomial]) -> Subspace<T> {
    let mut rows: BTreeMap<_, Vec<(usize, T)>> = BTreeMap::new();
    let images: Vec<_> = monomials.iter().map(|m| ev.image(m)).collect();
    for (col, image) in images.iter().enumerate() {
        for (b, v) in image.terms() {
            rows.entry(b).or_default().push((col, v.clone()));
        }
    }
    let mut matrix = SparseMatrix::new(monomials.len());
    for (_, entries) in rows {
        matrix
            .push_row(SparseVector::from_entries(entries))
            .expect("column in range");
    }
    kernel(&matrix)
}

/// Piece at `(n, c)` of `Ker f_{Lambda_{k,i}}` for the embedding in `cfg`.
pub fn kernel_piece<T: Scalar>(cfg: &ModuleConfig, n: u32, c: u32) -> Subspace<T> {
    Engine::new().kernel_piece(cfg, n, c)
}

/// One row of a presentation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedPieceReport {
    pub k: u32,
    pub i: u32,
    pub weight: u32,
    pub charge: u32,
    pub primed: bool,
    pub dim_monomials: usize,
    pub dim_ideal: usize,
    pub dim_kernel: usize,
    pub ideal_in_kernel: bool,
    pub kernel_in_ideal: bool,
    pub equal: bool,
    /// An element of one side missing from the other, as polynomial text.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub weight: u32,
    pub charge: u32,
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Outcome of one inclusion or identity check over a range of bigrades.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    pub cases_checked: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    fn new(check: &str, k: u32, i: Option<u32>) -> Self {
        CheckReport {
            check: check.to_string(),
            k,
            i,
            cases_checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(
        &mut self,
        weight: u32,
        charge: u32,
        ok: bool,
        claim: impl FnOnce() -> (String, Option<String>),
    ) {
        self.cases_checked += 1;
        if !ok {
            let (claim, witness) = claim();
            self.failures.push(CheckFailure {
                weight,
                charge,
                claim,
                witness,
            });
        }
    }
}

type IdealKey = (u32, u32, u32, u32, bool);
type KernelKey = (ModuleConfig, u32, u32, bool);

/// Shared caches for a verification run: one [`Evaluator`] per embedding and
/// memoized ideal and kernel pieces. Safe to use from rayon workers.
pub struct Engine<T> {
    evaluators: RwLock<HashMap<ModuleConfig, Arc<Evaluator<T>>>>,
    ideals: RwLock<HashMap<IdealKey, Arc<Subspace<T>>>>,
    kernels: RwLock<HashMap<KernelKey, Arc<Subspace<T>>>>,
}

impl<T: Scalar> Default for Engine<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Engine<T> {
    pub fn new() -> Self {
        Engine {
            evaluators: RwLock::new(HashMap::new()),
            ideals: RwLock::new(HashMap::new()),
            kernels: RwLock::new(HashMap::new()),
        }
    }

    pub fn evaluator(&self, cfg: &ModuleConfig) -> Arc<Evaluator<T>> {
        if let Some(ev) = self.evaluators.read().unwrap().get(cfg) {
            return ev.clone();
        }
        self.evaluators
            .write()
            .unwrap()
            .entry(cfg.clone())
            .or_insert_with(|| Arc::new(Evaluator::new(cfg.clone())))
            .clone()
    }

    pub fn ideal_piece(&self, k: u32, i: u32, n: u32, c: u32, primed: bool) -> Arc<Subspace<T>> {
        let key = (k, i, n, c, primed);
        if let Some(s) = self.ideals.read().unwrap().get(&key) {
            return s.clone();
        }
        let s = Arc::new(ideal_piece(k, i, n, c, primed));
        self.ideals.write().unwrap().insert(key, s.clone());
        s
    }

    fn kernel_cached(&self, cfg: &ModuleConfig, n: u32, c: u32, primed: bool) -> Arc<Subspace<T>> {
        let key = (cfg.clone(), n, c, primed);
        if let Some(s) = self.kernels.read().unwrap().get(&key) {
            return s.clone();
        }
        let basis = PieceBasis::new(n, c, if primed { 2 } else { 1 });
        let s = Arc::new(evaluation_kernel(&self.evaluator(cfg), basis.monomials()));
        self.kernels.write().unwrap().insert(key, s.clone());
        s
    }

    /// Piece of `Ker f_{Lambda_{k,i}}` in the coordinates of `PieceBasis::new(n, c, 1)`.
    pub fn kernel_piece(&self, cfg: &ModuleConfig, n: u32, c: u32) -> Subspace<T> {
        (*self.kernel_cached(cfg, n, c, false)).clone()
    }

    /// Piece of `Ker f'_{Lambda_{k,k}}` in the coordinates of `PieceBasis::new(n, c, 2)`.
    pub fn primed_kernel_piece(&self, k: u32, n: u32, c: u32) -> Subspace<T> {
        let cfg = ModuleConfig::new(k, k).expect("valid level");
        (*self.kernel_cached(&cfg, n, c, true)).clone()
    }

    /// Dimension of the `(n, c)` piece of the principal subspace.
    pub fn quotient_dimension(&self, cfg: &ModuleConfig, n: u32, c: u32) -> usize {
        let kernel = self.kernel_cached(cfg, n, c, false);
        kernel.ambient() - kernel.dim()
    }

    fn compare_row(
        &self,
        k: u32,
        i: u32,
        (n, c): (u32, u32),
        primed: bool,
        ideal: &Subspace<T>,
        kernel: &Subspace<T>,
    ) -> GradedPieceReport {
        let basis = PieceBasis::new(n, c, if primed { 2 } else { 1 });
        let ideal_in_kernel = ideal.is_subspace_of(kernel).expect("same piece");
        let kernel_in_ideal = kernel.is_subspace_of(ideal).expect("same piece");
        let witness = if !kernel_in_ideal {
            kernel.witness_outside(ideal).unwrap()
        } else if !ideal_in_kernel {
            ideal.witness_outside(kernel).unwrap()
        } else {
            None
        };
        GradedPieceReport {
            k,
            i,
            weight: n,
            charge: c,
            primed,
            dim_monomials: basis.dim(),
            dim_ideal: ideal.dim(),
            dim_kernel: kernel.dim(),
            ideal_in_kernel,
            kernel_in_ideal,
            equal: ideal_in_kernel && kernel_in_ideal,
            witness: witness.map(|w| basis.polynomial(&w).to_string()),
        }
    }

    /// `Ker f_{Lambda_{k,i}} = I_{Lambda_{k,i}}` piece by piece.
    pub fn verify_presentation(
        &self,
        k: u32,
        i: u32,
        n_max: u32,
        c_max: u32,
    ) -> Vec<GradedPieceReport> {
        let cfg = ModuleConfig::new(k, i).expect("valid level and index");
        bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let ideal = self.ideal_piece(k, i, n, c, false);
                let kernel = self.kernel_cached(&cfg, n, c, false);
                self.compare_row(k, i, (n, c), false, &ideal, &kernel)
            })
            .collect()
    }

    /// `Ker f'_{Lambda_{k,k}} = I'_{Lambda_{k,k}}`, with the primed kernel
    /// computed on `U(n_{<=-2})` directly. A row is only marked equal if the
    /// primed kernel also matches `rho` of the unprimed `Ker f_{Lambda_{k,k}}`
    /// piece, which is what the decomposition `I = I' + U(n_-) x(-1)` predicts.
    pub fn verify_primed_presentation(
        &self,
        k: u32,
        n_max: u32,
        c_max: u32,
    ) -> Vec<GradedPieceReport> {
        let cfg = ModuleConfig::new(k, k).expect("valid level");
        bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let ideal = self.ideal_piece(k, k, n, c, true);
                let kernel = self.kernel_cached(&cfg, n, c, true);
                let mut row = self.compare_row(k, k, (n, c), true, &ideal, &kernel);
                let full = self.kernel_cached(&cfg, n, c, false);
                let projected = project_rho(&full, n, c);
                if !projected.equals(&kernel).unwrap() {
                    row.equal = false;
                    row.witness
                        .get_or_insert_with(|| "rho(Ker f) differs from Ker f'".to_string());
                }
                row
            })
            .collect()
    }

    /// Inclusions among the ideals: the chain in `i`, `I_i = I_0 + U x(-1)^{k-i+1}`,
    /// `rho(I_k) = I'_k` and `I_k = I'_k (+) U x(-1)`.
    pub fn verify_ideal_relations(&self, k: u32, n_max: u32, c_max: u32) -> CheckReport {
        let parts: Vec<CheckReport> = bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let mut report = CheckReport::new("ideals", k, None);
                let basis = PieceBasis::new(n, c, 1);
                let ideals: Vec<_> = (0..=k)
                    .map(|i| self.ideal_piece(k, i, n, c, false))
                    .collect();
                for i in 0..k {
                    let ok = ideals[i as usize]
                        .is_subspace_of(&ideals[i as usize + 1])
                        .unwrap();
                    report.record(n, c, ok, || {
                        let w = ideals[i as usize]
                            .witness_outside(&ideals[i as usize + 1])
                            .unwrap();
                        (
                            format!("I_{{{k},{i}}} ⊂ I_{{{k},{}}}", i + 1),
                            w.map(|w| basis.polynomial(&w).to_string()),
                        )
                    });
                }
                for i in 0..=k {
                    let power = x1_power_multiples(&basis, (k - i + 1) as usize);
                    let sum = ideals[0].sum(&power).unwrap();
                    let ok = sum.equals(&ideals[i as usize]).unwrap();
                    report.record(n, c, ok, || {
                        (
                            format!("I_{{{k},{i}}} = I_{{{k},0}} + U·x(-1)^{}", k - i + 1),
                            None,
                        )
                    });
                }
                let primed = self.ideal_piece(k, k, n, c, true);
                let projected = project_rho(&ideals[k as usize], n, c);
                let ok = projected.equals(&primed).unwrap();
                report.record(n, c, ok, || {
                    (format!("ρ(I_{{{k},{k}}}) = I'_{{{k},{k}}}"), None)
                });
                // I'_k embedded in U(n_-) coordinates, plus U(n_-) x(-1)
                let embedded = embed_primed(&primed, n, c);
                let multiples = x1_power_multiples(&basis, 1);
                let sum = embedded.sum(&multiples).unwrap();
                let direct = sum.dim() == embedded.dim() + multiples.dim();
                let ok = direct && sum.equals(&ideals[k as usize]).unwrap();
                report.record(n, c, ok, || {
                    (format!("I_{{{k},{k}}} = I'_{{{k},{k}}} ⊕ U·x(-1)"), None)
                });
                report
            })
            .collect();
        merge_reports("ideals", k, None, parts)
    }

    /// The lifting of `e^{alpha/2}` maps `I_{Lambda_{k,i}}` into
    /// `I_{Lambda_{k,k-i}}`: `tau(a) x(-1)^i` lies in the ideal for every basis
    /// element `a`. Also checks the coefficient of `x(-2)^{k-i+1} x(-1)^i` in
    /// `R^0_{k,2k-i+2}` and that it is the only term with at most `i` factors
    /// `x(-1)`.
    pub fn verify_lifting(&self, k: u32, i: u32, n_max: u32, c_max: u32) -> CheckReport {
        let mut report = CheckReport::new("lifting", k, Some(i));
        let (coeff_ok, unique_ok) = multinomial_identity::<T>(k, i);
        let t = 2 * k - i + 2;
        report.record(t, k + 1, coeff_ok, || {
            (
                format!(
                    "coefficient of x(-2)^{}x(-1)^{i} in R0_{{{k},{t}}}",
                    k - i + 1
                ),
                None,
            )
        });
        report.record(t, k + 1, unique_ok, || {
            (
                format!("R0_{{{k},{t}}} has no other term with ≤ {i} factors x(-1)"),
                None,
            )
        });
        let x1i = Polynomial::<T>::monomial(Monomial::power(1, i as usize));
        let parts: Vec<CheckReport> = bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let mut part = CheckReport::new("lifting", k, Some(i));
                let basis = PieceBasis::new(n, c, 1);
                let ideal = self.ideal_piece(k, i, n, c, false);
                let (tn, tc) = (n + c + i, c + i);
                let target = self.ideal_piece(k, k - i, tn, tc, false);
                let target_basis = PieceBasis::new(tn, tc, 1);
                for v in ideal.basis() {
                    let a = basis.polynomial(v);
                    let image = tau_power(&a, 1).expect("positive shift").mul(&x1i);
                    let coords = target_basis.coordinates(&image).expect("bidegree shifts");
                    let ok = target.contains(&coords).unwrap();
                    part.record(n, c, ok, || {
                        (
                            format!("τ(a)x(-1)^{i} ∈ I_{{{k},{}}}", k - i),
                            Some(a.to_string()),
                        )
                    });
                }
                part
            })
            .collect();
        let merged = merge_reports("lifting", k, Some(i), parts);
        report.cases_checked += merged.cases_checked;
        report.failures.extend(merged.failures);
        report
    }

    /// `tau(I_{Lambda_{k,0}}) ⊂ I_{Lambda_{k,k}}`.
    pub fn verify_tau_inclusion(&self, k: u32, n_max: u32, c_max: u32) -> CheckReport {
        let parts: Vec<CheckReport> = bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let mut part = CheckReport::new("tau", k, None);
                let basis = PieceBasis::new(n, c, 1);
                let source = self.ideal_piece(k, 0, n, c, false);
                let target = self.ideal_piece(k, k, n + c, c, false);
                let target_basis = PieceBasis::new(n + c, c, 1);
                for v in source.basis() {
                    let a = basis.polynomial(v);
                    let image = tau_power(&a, 1).expect("positive shift");
                    let ok = target
                        .contains(&target_basis.coordinates(&image).unwrap())
                        .unwrap();
                    part.record(n, c, ok, || {
                        (format!("τ(a) ∈ I_{{{k},{k}}}"), Some(a.to_string()))
                    });
                }
                part
            })
            .collect();
        merge_reports("tau", k, None, parts)
    }

    /// `Ker f_{Lambda_{k,0}} ⊂ Ker f_{Lambda_{k,1}} ⊂ ... ⊂ Ker f_{Lambda_{k,k}}`.
    pub fn verify_kernel_chain(&self, k: u32, n_max: u32, c_max: u32) -> CheckReport {
        let cfgs: Vec<_> = (0..=k).map(|i| ModuleConfig::new(k, i).unwrap()).collect();
        let parts: Vec<CheckReport> = bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let mut part = CheckReport::new("chain", k, None);
                let basis = PieceBasis::new(n, c, 1);
                let kernels: Vec<_> = cfgs
                    .iter()
                    .map(|cfg| self.kernel_cached(cfg, n, c, false))
                    .collect();
                for i in 0..k as usize {
                    let ok = kernels[i].is_subspace_of(&kernels[i + 1]).unwrap();
                    part.record(n, c, ok, || {
                        let w = kernels[i].witness_outside(&kernels[i + 1]).unwrap();
                        (
                            format!("Ker f_{{{k},{i}}} ⊂ Ker f_{{{k},{}}}", i + 1),
                            w.map(|w| basis.polynomial(&w).to_string()),
                        )
                    });
                }
                part
            })
            .collect();
        merge_reports("chain", k, None, parts)
    }

    /// The relations kill every highest weight vector: `R^0_{k,t} v = 0` for
    /// `k+1 <= t <= t_max`, `x(-1)^{k-i+1} v = 0`, and `x_alpha(m) v = 0` for
    /// `0 <= m <= 3`.
    pub fn verify_annihilation(&self, k: u32, t_max: u32) -> CheckReport {
        let parts: Vec<CheckReport> = (0..=k)
            .into_par_iter()
            .map(|i| {
                let mut part = CheckReport::new("annihilation", k, Some(i));
                let cfg = ModuleConfig::new(k, i).unwrap();
                let ev = self.evaluator(&cfg);
                for t in k + 1..=t_max {
                    let r0 = r_generator::<T>(k, t, Truncation::Negative);
                    let ok = ev.evaluate(&r0).is_zero();
                    part.record(t, k + 1, ok, || {
                        (format!("R0_{{{k},{t}}}·v_{{{k},{i}}} = 0"), None)
                    });
                }
                let power = k - i + 1;
                let ok = ev
                    .evaluate(&Polynomial::monomial(Monomial::power(1, power as usize)))
                    .is_zero();
                part.record(power, power, ok, || {
                    (format!("x(-1)^{power}·v_{{{k},{i}}} = 0"), None)
                });
                let v = highest_weight_vector::<T>(&cfg);
                for m in 0..=3 {
                    let ok = diagonal_mode(m, &v).is_zero();
                    part.record(0, 1, ok, || (format!("x({m})·v_{{{k},{i}}} = 0"), None));
                }
                part
            })
            .collect();
        merge_reports("annihilation", k, None, parts)
    }

    /// For `i = 0`: no nonzero kernel element has charge `<= k`, and the
    /// charge-`(k+1)` kernel pieces are at most one-dimensional, spanned by
    /// `R^0_{k,n}`.
    pub fn verify_charge_bound(&self, k: u32, n_max: u32) -> CheckReport {
        let cfg = ModuleConfig::new(k, 0).unwrap();
        let parts: Vec<CheckReport> = bigrades(n_max, k + 1)
            .into_par_iter()
            .map(|(n, c)| {
                let mut part = CheckReport::new("charge-bound", k, Some(0));
                let kernel = self.kernel_cached(&cfg, n, c, false);
                let basis = PieceBasis::new(n, c, 1);
                if c <= k {
                    part.record(n, c, kernel.dim() == 0, || {
                        (
                            format!("Ker f_{{{k},0}} has no charge-{c} elements"),
                            kernel
                                .basis()
                                .first()
                                .map(|w| basis.polynomial(w).to_string()),
                        )
                    });
                } else {
                    let r0 = r_generator::<T>(k, n, Truncation::Negative);
                    let spanned = r0.is_zero() && kernel.dim() == 0
                        || kernel.dim() == 1
                            && kernel.contains(&basis.coordinates(&r0).unwrap()).unwrap();
                    part.record(n, c, spanned, || {
                        (
                            format!("charge-{c} kernel piece is spanned by R0_{{{k},{n}}}"),
                            None,
                        )
                    });
                }
                part
            })
            .collect();
        merge_reports("charge-bound", k, Some(0), parts)
    }

    /// Kernel pieces do not depend on which tensor slots carry `e^{alpha/2}`.
    pub fn verify_pattern_independence(
        &self,
        k: u32,
        i: u32,
        n_max: u32,
        c_max: u32,
    ) -> CheckReport {
        let patterns: Vec<ModuleConfig> = (0u32..1 << k)
            .filter(|bits| bits.count_ones() == i)
            .map(|bits| {
                ModuleConfig::with_pattern((0..k).map(|j| ((bits >> j) & 1) as u8).collect())
                    .unwrap()
            })
            .collect();
        let parts: Vec<CheckReport> = bigrades(n_max, c_max)
            .into_par_iter()
            .map(|(n, c)| {
                let mut part = CheckReport::new("pattern", k, Some(i));
                let reference = self.kernel_cached(&patterns[0], n, c, false);
                for cfg in &patterns[1..] {
                    let ok = self
                        .kernel_cached(cfg, n, c, false)
                        .equals(&reference)
                        .unwrap();
                    part.record(n, c, ok, || {
                        (format!("kernel for {cfg} matches {}", patterns[0]), None)
                    });
                }
                part
            })
            .collect();
        merge_reports("pattern", k, Some(i), parts)
    }
}

fn merge_reports(check: &str, k: u32, i: Option<u32>, parts: Vec<CheckReport>) -> CheckReport {
    let mut out = CheckReport::new(check, k, i);
    for p in parts {
        out.cases_checked += p.cases_checked;
        out.failures.extend(p.failures);
    }
    out
}

/// Span of the monomials with at least `power` factors `x(-1)`: the piece of
/// the ideal `U(n_-) x(-1)^power`.
fn x1_power_multiples<T: Scalar>(basis: &PieceBasis, power: usize) -> Subspace<T> {
    let rows = basis
        .monomials()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.multiplicity(1) >= power)
        .map(|(idx, _)| SparseVector::unit(idx));
    Subspace::span(basis.dim(), rows).unwrap()
}

/// `rho` applied to a piece of `U(n_-)`, landing in `U(n_{<=-2})` coordinates.
fn project_rho<T: Scalar>(s: &Subspace<T>, n: u32, c: u32) -> Subspace<T> {
    let full = PieceBasis::new(n, c, 1);
    let primed = PieceBasis::new(n, c, 2);
    let rows = s.basis().iter().map(|v| {
        primed
            .coordinates(&rho(&full.polynomial(v)))
            .expect("rho lands in the primed piece")
    });
    Subspace::span(primed.dim(), rows).unwrap()
}

/// A piece of `U(n_{<=-2})` viewed inside `U(n_-)`.
fn embed_primed<T: Scalar>(s: &Subspace<T>, n: u32, c: u32) -> Subspace<T> {
    let full = PieceBasis::new(n, c, 1);
    let primed = PieceBasis::new(n, c, 2);
    let rows = s
        .basis()
        .iter()
        .map(|v| full.coordinates(&primed.polynomial(v)).unwrap());
    Subspace::span(full.dim(), rows).unwrap()
}

/// `(coefficient matches (k+1)!/((k-i+1)! i!), unique term with <= i factors x(-1))`
/// for `R^0_{k,2k-i+2}`.
pub fn multinomial_identity<T: Scalar>(k: u32, i: u32) -> (bool, bool) {
    let t = 2 * k - i + 2;
    let r0 = r_generator::<T>(k, t, Truncation::Negative);
    let special = Monomial::power(2, (k - i + 1) as usize).mul(&Monomial::power(1, i as usize));
    let expected = T::factorial(k + 1) / (T::factorial(k - i + 1) * T::factorial(i));
    let coeff_ok =
        r0.coefficient(&special) == expected && multinomial_coefficient::<T>(&special) == expected;
    let unique_ok = r0
        .terms()
        .filter(|(m, _)| m.multiplicity(1) <= i as usize)
        .map(|(m, _)| m)
        .eq(std::iter::once(&special));
    (coeff_ok, unique_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn mono(parts: &[u32]) -> Monomial {
        Monomial::new(parts.iter().copied())
    }

    fn span_of(n: u32, c: u32, polys: &[Polynomial<Q>]) -> Subspace<Q> {
        let basis = PieceBasis::new(n, c, 1);
        Subspace::span(
            basis.dim(),
            polys.iter().map(|p| basis.coordinates(p).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn ideal_piece_examples() {
        let s = ideal_piece::<Q>(1, 0, 2, 2, false);
        assert!(s
            .equals(&span_of(2, 2, &[Polynomial::monomial(mono(&[1, 1]))]))
            .unwrap());
        let s = ideal_piece::<Q>(1, 1, 1, 1, false);
        assert!(s
            .equals(&span_of(1, 1, &[Polynomial::monomial(mono(&[1]))]))
            .unwrap());
        assert_eq!(ideal_piece::<Q>(1, 0, 2, 1, false).dim(), 0);
        assert_eq!(ideal_piece::<Q>(2, 1, 0, 0, false).dim(), 0);
        // primed at (4, 2): only R1_{1,4} = x(-2)^2
        let s = ideal_piece::<Q>(1, 1, 4, 2, true);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.ambient(), 1);
    }

    #[test]
    fn kernel_piece_examples() {
        let cfg = ModuleConfig::new(1, 0).unwrap();
        let k = kernel_piece::<Q>(&cfg, 2, 2);
        assert!(k
            .equals(&span_of(2, 2, &[Polynomial::monomial(mono(&[1, 1]))]))
            .unwrap());
        assert_eq!(kernel_piece::<Q>(&cfg, 1, 1).dim(), 0);
        assert_eq!(
            kernel_piece::<Q>(&ModuleConfig::new(2, 0).unwrap(), 2, 2).dim(),
            0
        );
        assert_eq!(kernel_piece::<Q>(&cfg, 0, 0).dim(), 0);
    }

    #[test]
    fn small_presentations() {
        let engine = Engine::<Q>::new();
        for (k, i) in [(1, 0), (1, 1), (2, 1)] {
            let rows = engine.verify_presentation(k, i, 6, 6);
            assert!(rows.iter().all(|r| r.equal), "{rows:?}");
        }
        let rows = engine.verify_presentation(1, 1, 1, 1);
        let row = rows
            .iter()
            .find(|r| (r.weight, r.charge) == (1, 1))
            .unwrap();
        assert_eq!((row.dim_ideal, row.dim_kernel), (1, 1));
        let origin = &rows[0];
        assert_eq!(
            (
                origin.weight,
                origin.charge,
                origin.dim_ideal,
                origin.dim_kernel
            ),
            (0, 0, 0, 0)
        );
    }

    #[test]
    fn rho_image_example() {
        let projected = project_rho(&ideal_piece::<Q>(1, 1, 4, 2, false), 4, 2);
        let primed = PieceBasis::new(4, 2, 2);
        assert_eq!(primed.monomials(), &[mono(&[2, 2])]);
        assert_eq!(projected.dim(), 1);
    }

    #[test]
    fn lifting_examples() {
        // tau(x(-1)^2) = x(-2)^2 = R0_{1,4} - 2 x(-3)x(-1)
        let target = ideal_piece::<Q>(1, 1, 4, 2, false);
        let basis = PieceBasis::new(4, 2, 1);
        assert!(target
            .contains(
                &basis
                    .coordinates(&Polynomial::monomial(mono(&[2, 2])))
                    .unwrap()
            )
            .unwrap());
        assert_eq!(multinomial_identity::<Q>(1, 0), (true, true));
        for k in 1..=4 {
            for i in 0..=k {
                assert_eq!(multinomial_identity::<Q>(k, i), (true, true));
            }
        }
        // i = k: tau(x(-1)) x(-1)^k = x(-2) x(-1)^k lies in I_{k,0}
        for k in 1..=3 {
            let a = Polynomial::<Q>::monomial(mono(&[2]).mul(&Monomial::power(1, k as usize)));
            let basis = PieceBasis::new(k + 2, k + 1, 1);
            assert!(ideal_piece::<Q>(k, 0, k + 2, k + 1, false)
                .contains(&basis.coordinates(&a).unwrap())
                .unwrap());
        }
    }

    #[test]
    fn tau_example_level_two() {
        // tau(R0_{2,3}) = x(-2)^3 in the I_{2,2} piece at (6, 3)
        let image = tau_power(&r_generator::<Q>(2, 3, Truncation::Negative), 1).unwrap();
        assert_eq!(image, Polynomial::monomial(mono(&[2, 2, 2])));
        let basis = PieceBasis::new(6, 3, 1);
        assert!(ideal_piece::<Q>(2, 2, 6, 3, false)
            .contains(&basis.coordinates(&image).unwrap())
            .unwrap());
    }

    #[test]
    fn inclusion_checks_pass_at_small_weight() {
        let engine = Engine::<Q>::new();
        assert!(engine.verify_ideal_relations(2, 6, 6).passed());
        assert!(engine.verify_tau_inclusion(2, 6, 6).passed());
        assert!(engine.verify_kernel_chain(2, 6, 6).passed());
        assert!(engine.verify_lifting(2, 1, 5, 5).passed());
        assert!(engine.verify_annihilation(2, 6).passed());
        assert!(engine.verify_charge_bound(2, 7).passed());
        assert!(engine.verify_pattern_independence(2, 1, 6, 6).passed());
        assert!(engine
            .verify_primed_presentation(1, 6, 6)
            .iter()
            .all(|r| r.equal));
    }

    #[test]
    fn deliberately_wrong_ideal_is_caught() {
        // I_{1,1} is strictly larger than Ker f_{1,0} at (1, 1)
        let engine = Engine::<Q>::new();
        let cfg = ModuleConfig::new(1, 0).unwrap();
        let kernel = engine.kernel_piece(&cfg, 1, 1);
        let ideal = engine.ideal_piece(1, 1, 1, 1, false);
        let row = engine.compare_row(1, 0, (1, 1), false, &ideal, &kernel);
        assert!(!row.equal && row.kernel_in_ideal && !row.ideal_in_kernel);
        assert_eq!(row.witness.as_deref(), Some("x(-1)"));
    }
}
