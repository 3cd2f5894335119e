//! Dense reference implementations used to verify every bound and plan.
//!
//! Everything here is small-register brute force: exact exponentials via
//! Taylor scaling and squaring, spectral norms via SVD (power iteration on
//! `M^H M` past the SVD size cutoff), explicit product formulas, and literal
//! `select`/`prepare` mixing-matrix constructions. Deterministic by
//! construction: the only randomness is a fixed-seed start vector for power
//! iteration.

use nalgebra::DVector;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::DenseOperator;
use crate::scalar::{r64, Real};
use crate::summation::KahanSum;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Dense operators refuse registers wider than this.
    pub n_max: usize,
    /// Largest dimension sent to full SVD; beyond it, power iteration.
    pub svd_dim_max: usize,
    /// Relative convergence tolerance for power iteration.
    pub power_iter_tol: f64,
    pub power_iter_max: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n_max: 12, svd_dim_max: 600, power_iter_tol: 1e-11, power_iter_max: 5000 }
    }
}

/// Kronecker product, first factor on the high-order index bits.
pub fn kron<R: Real>(a: &DenseOperator<R>, b: &DenseOperator<R>) -> DenseOperator<R> {
    a.kronecker(b)
}

pub fn hamiltonian_dense<R: Real>(h: &Hamiltonian<R>, cfg: &OracleConfig) -> Result<DenseOperator<R>> {
    h.to_dense(cfg.n_max)
}

/// `exp(-i M t)` for Hermitian `M`, by scaling and squaring of the Taylor
/// series.
///
/// The eigendecomposition route can lose seven digits on degenerate spectra,
/// so the reference exponential avoids it: scale the exponent until its
/// row-sum norm is at most 1/4 (the row-sum norm dominates the spectral
/// norm), sum 20 Taylor terms (tail under (1/4)^21/21!, far below eps), then
/// square back. Each squaring of a near-unitary at most doubles the error,
/// leaving ~2^s eps total.
pub fn expm_minus_i_t<R: Real>(m: &DenseOperator<R>, t: R) -> DenseOperator<R> {
    debug_assert!(
        (m - m.adjoint()).norm() <= r64::<R>(1e-10) * (R::one() + m.norm()),
        "expm_minus_i_t needs a Hermitian matrix"
    );
    let dim = m.nrows();
    let mut a = m * Complex::new(R::zero(), -t);
    let mut row_norm = R::zero();
    for r in 0..dim {
        let mut sum = R::zero();
        for c in 0..dim {
            let e = a[(r, c)];
            sum += (e.re * e.re + e.im * e.im).sqrt();
        }
        row_norm = row_norm.max(sum);
    }
    let quarter = r64::<R>(0.25);
    let half = r64::<R>(0.5);
    let mut squarings = 0u32;
    let mut scaled = row_norm;
    while scaled > quarter && squarings < 64 {
        scaled *= half;
        squarings += 1;
    }
    if squarings > 0 {
        a *= Complex::new(half.powi(squarings as i32), R::zero());
    }
    let mut acc = DenseOperator::<R>::identity(dim, dim);
    let mut term = DenseOperator::<R>::identity(dim, dim);
    for j in 1..=20usize {
        term = (&term * &a) * Complex::new(R::one() / r64::<R>(j as f64), R::zero());
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Largest singular value.
pub fn spectral_norm<R: Real>(m: &DenseOperator<R>, cfg: &OracleConfig) -> R {
    let dim = m.nrows().max(m.ncols());
    if dim == 0 {
        return R::zero();
    }
    if dim <= cfg.svd_dim_max {
        if let Some(svd) = m.clone().try_svd(false, false, R::default_epsilon(), 10_000) {
            return svd
                .singular_values
                .iter()
                .fold(R::zero(), |a, b| if *b > a { *b } else { a });
        }
    }
    power_iteration_norm(m, cfg)
}

fn power_iteration_norm<R: Real>(m: &DenseOperator<R>, cfg: &OracleConfig) -> R {
    let dim = m.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A11CE);
    let mut v: DVector<Complex<R>> = DVector::from_fn(dim, |_, _| {
        Complex::new(r64(rng.gen_range(-1.0..1.0)), r64(rng.gen_range(-1.0..1.0)))
    });
    let nv = v.norm();
    if nv == R::zero() {
        return R::zero();
    }
    v /= Complex::new(nv, R::zero());
    let adj = m.adjoint();
    let tol = r64::<R>(cfg.power_iter_tol);
    let mut sigma_prev = R::zero();
    for it in 0..cfg.power_iter_max {
        let u = m * &v;
        let sigma = u.norm();
        let w = &adj * u;
        let nw = w.norm();
        if nw == R::zero() {
            return R::zero();
        }
        v = w / Complex::new(nw, R::zero());
        if it > 2 && (sigma - sigma_prev).abs() <= tol * sigma.max(R::one()) {
            return sigma;
        }
        sigma_prev = sigma;
    }
    sigma_prev
}

/// Degree-`k` Taylor polynomial of `exp(-i M t)`.
pub fn truncated_taylor_dense<R: Real>(m: &DenseOperator<R>, t: R, k: usize) -> DenseOperator<R> {
    let dim = m.nrows();
    let mut acc = DenseOperator::<R>::identity(dim, dim);
    let mut term = DenseOperator::<R>::identity(dim, dim);
    for j in 1..=k {
        let factor = Complex::new(R::zero(), -t / r64::<R>(j as f64));
        term = (&term * m) * factor;
        acc += &term;
    }
    acc
}

/// First-order product formula `[prod_l exp(-i c_l P_l t/r)]^r`, with term 1
/// applied first (rightmost factor in each cycle).
///
/// Single-string exponentials are exact: `exp(-i c P tau) = cos(c tau) I -
/// i sin(c tau) P` since `P^2 = I`.
pub fn pf1_product<R: Real>(
    h: &Hamiltonian<R>,
    t: R,
    r: usize,
    cfg: &OracleConfig,
) -> Result<DenseOperator<R>> {
    if r == 0 {
        return Err(Error::Domain("product formula needs r >= 1".into()));
    }
    if h.n_qubits() > cfg.n_max {
        return Err(Error::DenseCap { n: h.n_qubits(), cap: cfg.n_max });
    }
    let dim = 1usize << h.n_qubits();
    let tau = t / r64::<R>(r as f64);
    let mut cycle = DenseOperator::<R>::identity(dim, dim);
    for term in h.terms() {
        let p = term.operator.to_dense::<R>(cfg.n_max)?;
        let angle = term.signed() * tau;
        let cos = Complex::new(angle.cos(), R::zero());
        let msin = Complex::new(R::zero(), -angle.sin());
        let exp_term = DenseOperator::<R>::identity(dim, dim) * cos + p * msin;
        cycle = exp_term * cycle;
    }
    let mut out = DenseOperator::<R>::identity(dim, dim);
    for _ in 0..r {
        out = &cycle * out;
    }
    Ok(out)
}

/// A concrete mixing decomposition `A = sum_i c_i U_i`, `c_i > 0`.
#[derive(Clone, Debug)]
pub struct LcuDecomposition<R: Real> {
    coeffs: Vec<R>,
    unitaries: Vec<DenseOperator<R>>,
    dim: usize,
}

impl<R: Real> LcuDecomposition<R> {
    pub fn new(coeffs: Vec<R>, unitaries: Vec<DenseOperator<R>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != unitaries.len() {
            return Err(Error::Domain("mixing decomposition needs matched nonempty lists".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite() || *c <= R::zero()) {
            return Err(Error::Domain("mixing coefficients must be positive".into()));
        }
        let dim = unitaries[0].nrows();
        for u in &unitaries {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::Domain("mixing unitaries must share a square dimension".into()));
            }
        }
        Ok(LcuDecomposition { coeffs, unitaries, dim })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Mixing 1-norm `s`.
    pub fn s(&self) -> R {
        KahanSum::sum_iter(self.coeffs.iter().copied())
    }

    /// The encoded operator `A = sum_i c_i U_i`.
    pub fn target(&self) -> DenseOperator<R> {
        let mut acc = DenseOperator::<R>::zeros(self.dim, self.dim);
        for (c, u) in self.coeffs.iter().zip(&self.unitaries) {
            acc += u * Complex::new(*c, R::zero());
        }
        acc
    }

    /// Check every `U_i` is unitary to within `tol` (spectral residual).
    pub fn validate_unitaries(&self, tol: R, cfg: &OracleConfig) -> Result<()> {
        let id = DenseOperator::<R>::identity(self.dim, self.dim);
        for (i, u) in self.unitaries.iter().enumerate() {
            let res = spectral_norm(&(u.adjoint() * u - &id), cfg);
            if res > tol {
                return Err(Error::Domain(format!(
                    "mixing unitary {i} deviates from unitarity by {res:e}"
                )));
            }
        }
        Ok(())
    }

    /// Pad with a `+I, -I` pair so the mixing norm becomes exactly 2.
    /// The encoded operator is unchanged. Errors when `s > 2` already.
    pub fn boosted_to_two(&self) -> Result<LcuDecomposition<R>> {
        let s = self.s();
        let two = r64::<R>(2.0);
        if s > two + r64(1e-9) {
            return Err(Error::Domain(format!(
                "mixing norm {s} exceeds 2; cannot boost",
            )));
        }
        if s >= two {
            return Ok(self.clone());
        }
        let pad = (two - s) / two;
        let mut coeffs = self.coeffs.clone();
        let mut unitaries = self.unitaries.clone();
        let id = DenseOperator::<R>::identity(self.dim, self.dim);
        coeffs.push(pad);
        unitaries.push(id.clone());
        coeffs.push(pad);
        unitaries.push(id * Complex::new(-R::one(), R::zero()));
        LcuDecomposition::new(coeffs, unitaries)
    }

    fn padded_len(&self) -> usize {
        self.coeffs.len().next_power_of_two()
    }

    /// The state-preparation matrix `G`: a real Householder reflection (or
    /// identity) mapping `e_0` to `(sqrt(c_i / s))_i` on the padded ancilla
    /// space.
    pub fn prepare(&self) -> DenseOperator<R> {
        let d = self.padded_len();
        let s = self.s();
        let mut v = DVector::<R>::zeros(d);
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i] = (*c / s).sqrt();
        }
        // w = e0 - v; G = I - 2 w w^T / (w^T w) swaps e0 and v.
        let mut w = -v.clone();
        w[0] += R::one();
        let norm_sq = w.dot(&w);
        let mut g = DenseOperator::<R>::identity(d, d);
        if norm_sq > r64(1e-28) {
            let scale = r64::<R>(2.0) / norm_sq;
            for i in 0..d {
                for j in 0..d {
                    let delta = -scale * w[i] * w[j];
                    g[(i, j)] += Complex::new(delta, R::zero());
                }
            }
        }
        g
    }

    /// `select = sum_i |i><i| (x) U_i`, identity on padding slots.
    pub fn select(&self) -> DenseOperator<R> {
        let d = self.padded_len();
        let full = d * self.dim;
        let mut m = DenseOperator::<R>::zeros(full, full);
        let id = DenseOperator::<R>::identity(self.dim, self.dim);
        for slot in 0..d {
            let u = self.unitaries.get(slot).unwrap_or(&id);
            let base = slot * self.dim;
            for r in 0..self.dim {
                for c in 0..self.dim {
                    m[(base + r, base + c)] = u[(r, c)];
                }
            }
        }
        m
    }

    /// `W = (G^H (x) I) select (G (x) I)`; its top-left system block is
    /// `A / s`.
    pub fn w_matrix(&self) -> DenseOperator<R> {
        let g = self.prepare();
        let id = DenseOperator::<R>::identity(self.dim, self.dim);
        let g_full = kron(&g, &id);
        g_full.adjoint() * self.select() * g_full
    }
}

/// Top-left `dim x dim` system block (`<0|_anc W |0>_anc`).
pub fn block<R: Real>(w: &DenseOperator<R>, dim: usize) -> DenseOperator<R> {
    DenseOperator::from_fn(dim, dim, |r, c| w[(r, c)])
}

/// One round of oblivious amplification: `-W R W^H R W` with
/// `R = I - 2 P_0`, `P_0` the ancilla-zero projector. Its system block is
/// `3 B - 4 B B^H B` where `B` is the block of `W`.
pub fn amplified<R: Real>(w: &DenseOperator<R>, dim: usize) -> DenseOperator<R> {
    let full = w.nrows();
    let mut refl = DenseOperator::<R>::identity(full, full);
    let minus2 = Complex::new(-r64::<R>(2.0), R::zero());
    for i in 0..dim {
        refl[(i, i)] += minus2;
    }
    -(w * &refl * w.adjoint() * &refl * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn pauli_dense(s: &str, n: usize) -> DenseOperator<f64> {
        let p: PauliString = s.parse().unwrap();
        let p = PauliString::from_factors(
            n,
            &(0..p.n_qubits())
                .filter_map(|q| p.factor(q).map(|a| (a, q)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        p.to_dense(12).unwrap()
    }

    #[test]
    fn kron_convention() {
        let z = pauli_dense("Z0", 1);
        let x = pauli_dense("X0", 1);
        let zx = kron(&z, &x);
        let direct = pauli_dense("Z0 X1", 2);
        assert!((zx - direct).norm() < 1e-15);
    }

    #[test]
    fn expm_of_single_axis() {
        let ham = Hamiltonian::<f64>::parse("1.0 Z0\n", "z").unwrap();
        let u = expm_minus_i_t(&ham.to_dense(4).unwrap(), 0.8);
        assert!((u[(0, 0)] - Complex::new(0.8f64.cos(), -(0.8f64.sin()))).norm() < 1e-13);
        assert!((u[(1, 1)] - Complex::new(0.8f64.cos(), 0.8f64.sin())).norm() < 1e-13);
        assert!(u[(0, 1)].norm() < 1e-13);

        let hx = Hamiltonian::<f64>::parse("1.0 X0\n", "x").unwrap();
        let ux = expm_minus_i_t(&hx.to_dense(4).unwrap(), 0.8);
        assert!((ux[(0, 0)] - Complex::new(0.8f64.cos(), 0.0)).norm() < 1e-13);
        assert!((ux[(0, 1)] - Complex::new(0.0, -(0.8f64.sin()))).norm() < 1e-13);
    }

    #[test]
    fn expm_is_unitary_and_composes() {
        let ham = Hamiltonian::<f64>::parse("0.4 X0 Z1\n-0.7 Y1\n0.2 Z0\n", "t").unwrap();
        let m = ham.to_dense(4).unwrap();
        let u = expm_minus_i_t(&m, 0.9);
        let id = DenseOperator::<f64>::identity(4, 4);
        assert!((u.adjoint() * &u - &id).norm() < 1e-12);
        let u2 = expm_minus_i_t(&m, 0.45);
        assert!(((&u2 * &u2) - &u).norm() < 1e-12);
    }

    #[test]
    fn spectral_norm_known_values() {
        let mut m = DenseOperator::<f64>::zeros(3, 3);
        m[(0, 0)] = Complex::new(0.0, 2.5);
        m[(1, 2)] = Complex::new(-1.0, 0.0);
        assert!((spectral_norm(&m, &cfg()) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = DenseOperator::<f64>::from_fn(24, 24, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let exact = spectral_norm(&m, &cfg());
        let forced = OracleConfig { svd_dim_max: 4, ..cfg() };
        let iterated = spectral_norm(&m, &forced);
        assert!(
            (exact - iterated).abs() < 1e-8 * exact,
            "svd {exact} vs power {iterated}"
        );
    }

    #[test]
    fn truncated_taylor_matches_exp_for_large_k() {
        let ham = Hamiltonian::<f64>::parse("0.4 X0 Z1\n-0.7 Y1\n", "t").unwrap();
        let m = ham.to_dense(4).unwrap();
        let exact = expm_minus_i_t(&m, 0.6);
        let poly = truncated_taylor_dense(&m, 0.6, 30);
        assert!((exact - poly).norm() < 1e-14);
    }

    #[test]
    fn pf1_term_order_is_first_term_rightmost() {
        let ham = Hamiltonian::<f64>::parse("0.9 X0\n0.5 Z0\n", "t").unwrap();
        let got = pf1_product(&ham, 0.7, 1, &cfg()).unwrap();
        let ux = expm_minus_i_t(&(pauli_dense("X0", 1) * Complex::new(0.9, 0.0)), 0.7);
        let uz = expm_minus_i_t(&(pauli_dense("Z0", 1) * Complex::new(0.5, 0.0)), 0.7);
        let expected = uz * ux; // X term applied first
        assert!((got - expected).norm() < 1e-13);
    }

    #[test]
    fn pf1_converges_to_exact() {
        let ham = Hamiltonian::<f64>::parse("0.9 X0\n0.5 Z0\n", "t").unwrap();
        let m = ham.to_dense(4).unwrap();
        let exact = expm_minus_i_t(&m, 0.7);
        let err =
            |r: usize| spectral_norm(&(pf1_product(&ham, 0.7, r, &cfg()).unwrap() - &exact), &cfg());
        assert!(err(64) < err(8) && err(8) < err(1));
        // Leading error is t^2 ||[0.9X, 0.5Z]|| / (2r) = 0.49 * 0.9 / 128.
        assert!(err(64) < 3.5e-3);
    }

    #[test]
    fn mixing_block_encodes_target() {
        let x = pauli_dense("X0", 1);
        let z = pauli_dense("Z0", 1);
        let d = LcuDecomposition::new(vec![0.3, 0.7], vec![x, z]).unwrap();
        assert!((d.s() - 1.0).abs() < 1e-15);
        d.validate_unitaries(1e-12, &cfg()).unwrap();
        let w = d.w_matrix();
        let id = DenseOperator::<f64>::identity(4, 4);
        assert!((w.adjoint() * &w - id).norm() < 1e-12, "W not unitary");
        let b = block(&w, 2);
        let target = d.target();
        assert!((b * Complex::new(d.s(), 0.0) - target).norm() < 1e-12);
    }

    #[test]
    fn boost_pads_to_two_without_changing_target() {
        let x = pauli_dense("X0", 1);
        let z = pauli_dense("Z0", 1);
        let d = LcuDecomposition::new(vec![0.3, 0.7], vec![x, z]).unwrap();
        let boosted = d.boosted_to_two().unwrap();
        assert!((boosted.s() - 2.0).abs() < 1e-14);
        assert!((boosted.target() - d.target()).norm() < 1e-13);
        let b = block(&boosted.w_matrix(), 2);
        assert!((b * Complex::new(2.0, 0.0) - d.target()).norm() < 1e-12);
    }

    #[test]
    fn amplification_identity() {
        // For any unitary W, block(-W R W^H R W) = 3B - 4 B B^H B.
        let ham = Hamiltonian::<f64>::parse("0.4 X0\n0.3 Z0\n0.2 Y0\n", "t").unwrap();
        let d = LcuDecomposition::new(
            vec![0.4, 0.3, 0.2],
            ham.terms().iter().map(|t| t.operator.to_dense(4).unwrap()).collect(),
        )
        .unwrap();
        let w = d.w_matrix();
        let amp = amplified(&w, 2);
        let b = block(&w, 2);
        let expected = &b * Complex::new(3.0, 0.0)
            - &b * b.adjoint() * &b * Complex::new(4.0, 0.0);
        assert!((block(&amp, 2) - expected).norm() < 1e-12);
    }

    #[test]
    fn amplified_block_is_near_target_at_s_two() {
        // A unitary target encoded at s = 2 amplifies to (nearly) itself.
        let ham = Hamiltonian::<f64>::parse("1.0 X0\n", "x").unwrap();
        let a = expm_minus_i_t(&ham.to_dense(4).unwrap(), 0.3);
        let d = LcuDecomposition::new(vec![1.0, 0.5, 0.5], vec![
            a.clone(),
            DenseOperator::<f64>::identity(2, 2),
            DenseOperator::<f64>::identity(2, 2) * Complex::new(-1.0, 0.0),
        ])
        .unwrap();
        assert!((d.s() - 2.0).abs() < 1e-15);
        let amp = amplified(&d.w_matrix(), 2);
        // 3(A/2) - 4(A/2)(A/2)^H(A/2) = (3/2)A - (1/2)A = A for unitary A.
        assert!((block(&amp, 2) - a).norm() < 1e-12);
    }
}
