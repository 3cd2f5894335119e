//! Symbolic Pauli-basis expansions.
//!
//! [`PauliMap`] accumulates complex coefficients over phase-normalized Pauli
//! strings (a `BTreeMap` keyed by bit patterns, so iteration order and hence
//! floating-point accumulation order are deterministic). [`SymbolicOperator`]
//! is the validated real-coefficient view used for Hermitian expansions such
//! as powers of a Hamiltonian.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{DenseOperator, PauliKey, PauliString};
use crate::scalar::{r64, Real};
use crate::summation::KahanSum;

/// Coefficients with magnitude below this are removed after a combine.
pub const SYMBOLIC_DROP_TOL: f64 = 1e-13;

/// Caps on symbolic expansion work. A multiply of a map with `E` entries by
/// an `L`-term Hamiltonian costs `E * L` elementary products.
#[derive(Clone, Copy, Debug)]
pub struct SymbolicBudget {
    pub max_entries: usize,
    pub max_products: u64,
}

impl Default for SymbolicBudget {
    fn default() -> Self {
        SymbolicBudget { max_entries: 5_000_000, max_products: 1_000_000_000 }
    }
}

/// Map from phase-normalized Pauli strings to complex coefficients.
#[derive(Clone, Debug)]
pub struct PauliMap<R: Real> {
    n_qubits: usize,
    entries: BTreeMap<PauliKey, Complex<R>>,
}

impl<R: Real> PauliMap<R> {
    pub fn new(n_qubits: usize) -> Self {
        PauliMap { n_qubits, entries: BTreeMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &Complex<R>)> {
        self.entries.iter()
    }

    /// Add `coeff * P`, folding the string's phase into the coefficient.
    pub fn accumulate(&mut self, p: &PauliString, coeff: Complex<R>) {
        let phased = coeff * crate::pauli::i_power::<R>(p.phase_exp() as u32);
        *self
            .entries
            .entry(p.key())
            .or_insert_with(|| Complex::new(R::zero(), R::zero())) += phased;
    }

    /// The signed-coefficient expansion of a Hamiltonian.
    pub fn from_hamiltonian(h: &Hamiltonian<R>) -> Self {
        let mut m = PauliMap::new(h.n_qubits());
        for t in h.terms() {
            m.accumulate(&t.operator, Complex::new(t.signed(), R::zero()));
        }
        m
    }

    /// The map `{I: 1}`.
    pub fn identity(n_qubits: usize) -> Self {
        let mut m = PauliMap::new(n_qubits);
        m.accumulate(&PauliString::identity(n_qubits), Complex::new(R::one(), R::zero()));
        m
    }

    pub fn get(&self, key: &PauliKey) -> Option<Complex<R>> {
        self.entries.get(key).copied()
    }

    pub fn scale(&mut self, factor: Complex<R>) {
        for v in self.entries.values_mut() {
            *v *= factor;
        }
    }

    /// `self += factor * other` (entrywise, deterministic order).
    pub fn add_scaled(&mut self, other: &PauliMap<R>, factor: Complex<R>) {
        for (k, v) in &other.entries {
            *self
                .entries
                .entry(k.clone())
                .or_insert_with(|| Complex::new(R::zero(), R::zero())) += *v * factor;
        }
    }

    /// Remove entries with |coeff| below `tol`.
    pub fn prune(&mut self, tol: R) {
        self.entries.retain(|_, v| (v.re * v.re + v.im * v.im).sqrt() >= tol);
    }

    /// Sum of coefficient magnitudes.
    pub fn l1(&self) -> R {
        KahanSum::sum_iter(self.entries.values().map(|v| (v.re * v.re + v.im * v.im).sqrt()))
    }

    /// Right-multiply by a Hamiltonian: `self * H`.
    ///
    /// The entry list is split into fixed chunks processed in parallel; chunk
    /// partial maps merge in chunk order so accumulation order is independent
    /// of the thread count.
    pub fn mul_hamiltonian(&self, h: &Hamiltonian<R>, budget: &SymbolicBudget) -> Result<PauliMap<R>> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::WidthMismatch(self.n_qubits, h.n_qubits()));
        }
        let products = self.entries.len() as u64 * h.len() as u64;
        if products > budget.max_products {
            return Err(Error::BudgetExceeded(format!(
                "symbolic multiply needs {products} products (cap {})",
                budget.max_products
            )));
        }
        let items: Vec<(&PauliKey, &Complex<R>)> = self.entries.iter().collect();
        let chunk = crate::summation::CHUNK.max(1);
        let partials: Vec<BTreeMap<PauliKey, Complex<R>>> = items
            .par_chunks(chunk)
            .map(|slice| {
                let mut local: BTreeMap<PauliKey, Complex<R>> = BTreeMap::new();
                for (key, coeff) in slice {
                    let p = PauliString::from_key(self.n_qubits, key);
                    for t in h.terms() {
                        let prod = p
                            .multiply(&t.operator)
                            .expect("width checked above");
                        let phased = **coeff
                            * crate::pauli::i_power::<R>(prod.phase_exp() as u32)
                            * Complex::new(t.signed(), R::zero());
                        *local
                            .entry(prod.key())
                            .or_insert_with(|| Complex::new(R::zero(), R::zero())) += phased;
                    }
                }
                local
            })
            .collect();
        let mut out = PauliMap::new(self.n_qubits);
        for partial in partials {
            for (k, v) in partial {
                *out
                    .entries
                    .entry(k)
                    .or_insert_with(|| Complex::new(R::zero(), R::zero())) += v;
            }
        }
        if out.entries.len() > budget.max_entries {
            return Err(Error::BudgetExceeded(format!(
                "symbolic map holds {} entries (cap {})",
                out.entries.len(),
                budget.max_entries
            )));
        }
        Ok(out)
    }

    /// General product `self * other` (serial, deterministic).
    pub fn mul_map(&self, other: &PauliMap<R>, budget: &SymbolicBudget) -> Result<PauliMap<R>> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::WidthMismatch(self.n_qubits, other.n_qubits));
        }
        let products = self.entries.len() as u64 * other.entries.len() as u64;
        if products > budget.max_products {
            return Err(Error::BudgetExceeded(format!(
                "symbolic multiply needs {products} products (cap {})",
                budget.max_products
            )));
        }
        let mut out = PauliMap::new(self.n_qubits);
        for (ka, va) in &self.entries {
            let pa = PauliString::from_key(self.n_qubits, ka);
            for (kb, vb) in &other.entries {
                let pb = PauliString::from_key(self.n_qubits, kb);
                let prod = pa.multiply(&pb).expect("width checked above");
                let phased =
                    *va * *vb * crate::pauli::i_power::<R>(prod.phase_exp() as u32);
                *out
                    .entries
                    .entry(prod.key())
                    .or_insert_with(|| Complex::new(R::zero(), R::zero())) += phased;
            }
        }
        if out.entries.len() > budget.max_entries {
            return Err(Error::BudgetExceeded(format!(
                "symbolic map holds {} entries (cap {})",
                out.entries.len(),
                budget.max_entries
            )));
        }
        Ok(out)
    }

    /// Validate that all coefficients are real (residual imaginary part below
    /// `imag_tol`) and return the real view, dropping magnitudes below
    /// `drop_tol`.
    pub fn into_real(self, imag_tol: R, drop_tol: R) -> Result<SymbolicOperator<R>> {
        let mut entries = BTreeMap::new();
        for (k, v) in self.entries {
            if v.im.abs() > imag_tol {
                let term = PauliString::from_key(self.n_qubits, &k).to_string();
                return Err(Error::NonHermitian {
                    term: if term.is_empty() { "I".into() } else { term },
                    residual: v.im.abs().to_f64().unwrap_or(f64::NAN),
                });
            }
            if v.re.abs() >= drop_tol {
                entries.insert(k, v.re);
            }
        }
        Ok(SymbolicOperator { n_qubits: self.n_qubits, entries })
    }

    /// Dense matrix of the expansion.
    pub fn to_dense(&self, cap: usize) -> Result<DenseOperator<R>> {
        if self.n_qubits > cap {
            return Err(Error::DenseCap { n: self.n_qubits, cap });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DenseOperator::<R>::zeros(dim, dim);
        for (k, v) in &self.entries {
            let p = PauliString::from_key(self.n_qubits, k);
            m += p.to_dense::<R>(cap)? * *v;
        }
        Ok(m)
    }
}

/// Real-coefficient symbolic operator (Hermitian expansions).
#[derive(Clone, Debug)]
pub struct SymbolicOperator<R: Real> {
    n_qubits: usize,
    entries: BTreeMap<PauliKey, R>,
}

impl<R: Real> SymbolicOperator<R> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &R)> {
        self.entries.iter()
    }

    pub fn coefficient(&self, key: &PauliKey) -> Option<R> {
        self.entries.get(key).copied()
    }

    /// Coefficient 1-norm; an upper bound on the spectral norm.
    pub fn l1(&self) -> R {
        KahanSum::sum_iter(self.entries.values().map(|v| v.abs()))
    }

    /// Coefficient of the identity string, if present.
    pub fn identity_coefficient(&self) -> Option<R> {
        let id = PauliString::identity(self.n_qubits).key();
        self.entries.get(&id).copied()
    }

    /// True when the only surviving entry is the identity (or nothing at all,
    /// treating coefficients below `tol` as zero).
    pub fn is_identity_multiple(&self, tol: R) -> bool {
        let id = PauliString::identity(self.n_qubits).key();
        self.entries.iter().all(|(k, v)| *k == id || v.abs() <= tol)
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseOperator<R>> {
        if self.n_qubits > cap {
            return Err(Error::DenseCap { n: self.n_qubits, cap });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DenseOperator::<R>::zeros(dim, dim);
        for (k, v) in &self.entries {
            let p = PauliString::from_key(self.n_qubits, k);
            m += p.to_dense::<R>(cap)? * num_complex::Complex::new(*v, R::zero());
        }
        Ok(m)
    }
}

/// Exact Pauli-basis expansion of `H^m` with budget enforcement.
///
/// `H^m` is Hermitian, so imaginary residuals are floating-point noise; they
/// are validated against a tolerance proportional to the accumulated mass and
/// the real view is returned with sub-1e-13 coefficients dropped.
pub fn symbolic_power<R: Real>(
    h: &Hamiltonian<R>,
    m: usize,
    budget: &SymbolicBudget,
) -> Result<SymbolicOperator<R>> {
    if m == 0 || m > 12 {
        return Err(Error::Domain(format!("symbolic power {m} out of supported range 1..=12")));
    }
    let base = PauliMap::from_hamiltonian(h);
    let mut acc = base.clone();
    for _ in 1..m {
        acc = acc.mul_hamiltonian(h, budget)?;
    }
    let scale = {
        let alpha = h.alpha();
        let mut mass = R::one();
        for _ in 0..m {
            mass *= alpha;
        }
        if mass > R::one() {
            mass
        } else {
            R::one()
        }
    };
    let imag_tol = r64::<R>(1e-10) * scale;
    acc.into_real(imag_tol, r64(SYMBOLIC_DROP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    fn h(text: &str) -> Hamiltonian<f64> {
        Hamiltonian::parse(text, "t").unwrap()
    }

    #[test]
    fn square_of_x_plus_z_is_twice_identity() {
        let sq = symbolic_power(&h("1.0 X0\n1.0 Z0\n"), 2, &SymbolicBudget::default()).unwrap();
        assert_eq!(sq.len(), 1);
        assert!((sq.identity_coefficient().unwrap() - 2.0).abs() < 1e-14);
        assert!(sq.is_identity_multiple(1e-12));
    }

    #[test]
    fn square_of_commuting_pair_keeps_cross_terms() {
        let sq = symbolic_power(&h("1.0 Z0\n1.0 Z1\n"), 2, &SymbolicBudget::default()).unwrap();
        // Z0^2 + Z1^2 + 2 Z0 Z1 = 2 I + 2 Z0Z1
        assert_eq!(sq.len(), 2);
        assert!((sq.l1() - 4.0).abs() < 1e-14);
        let zz = PauliString::from_factors(2, &[(Axis::Z, 0), (Axis::Z, 1)]).unwrap();
        assert!((sq.coefficient(&zz.key()).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cube_matches_dense_oracle() {
        let ham = h("0.7 X0 Z1\n-0.4 Y1 Z2\n0.9 Z0\n0.2 X2\n");
        let cube = symbolic_power(&ham, 3, &SymbolicBudget::default()).unwrap();
        let dense_h = ham.to_dense(8).unwrap();
        let direct = &dense_h * &dense_h * &dense_h;
        let diff = (cube.to_dense(8).unwrap() - direct).norm();
        assert!(diff < 1e-10, "symbolic cube deviates from dense cube by {diff}");
    }

    #[test]
    fn signed_coefficients_respected() {
        let sq = symbolic_power(&h("-1.0 X0\n2.0 Z0\n"), 2, &SymbolicBudget::default()).unwrap();
        // (-X + 2Z)^2 = I + 4I + (-2)(XZ + ZX) = 5I (anticommuting cross cancels)
        assert_eq!(sq.len(), 1);
        assert!((sq.identity_coefficient().unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn budget_exceeded_reported() {
        let tight = SymbolicBudget { max_entries: 2, max_products: 1_000 };
        let err = symbolic_power(&h("1.0 X0\n1.0 Z1\n1.0 Y2\n"), 2, &tight);
        assert!(matches!(err, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn map_product_agrees_with_hamiltonian_multiply() {
        let ham = h("0.7 X0 Z1\n-0.4 Y1\n0.2 Z0\n");
        let m = PauliMap::from_hamiltonian(&ham);
        let via_h = m.mul_hamiltonian(&ham, &SymbolicBudget::default()).unwrap();
        let via_map = m.mul_map(&m, &SymbolicBudget::default()).unwrap();
        assert_eq!(via_h.len(), via_map.len());
        for (k, v) in via_h.iter() {
            assert!((via_map.get(k).unwrap() - *v).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_map_is_multiplicative_unit() {
        let ham = h("0.7 X0 Z1\n-0.4 Y1\n");
        let m = PauliMap::from_hamiltonian(&ham);
        let prod = PauliMap::identity(2).mul_map(&m, &SymbolicBudget::default()).unwrap();
        assert_eq!(prod.len(), m.len());
        for (k, v) in m.iter() {
            assert_eq!(prod.get(k).unwrap(), *v);
        }
    }

    #[test]
    fn parallel_multiply_deterministic() {
        let ham = h("0.3 X0\n0.5 Z0 Z1\n-0.2 Y1\n0.7 X1 Z2\n");
        let run = || {
            symbolic_power(&ham, 4, &SymbolicBudget::default())
                .unwrap()
                .iter()
                .map(|(_, v)| v.to_bits())
                .collect::<Vec<_>>()
        };
        let wide = run();
        let narrow = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(wide, narrow);
    }
}
