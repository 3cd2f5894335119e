//! Mixing (select/prepare) plans for truncated-Taylor segment unitaries.
//!
//! A plan describes one evolution segment as `A = sum_i beta_i V_i` with
//! `beta_i > 0` and `V_i` a phased Pauli string. Rather than enumerating the
//! `L^K` raw term products of the Taylor polynomial, the polynomial is
//! collapsed symbolically to at most `4^n` distinct strings; by construction
//! its mixing norm `s_symbolic` never exceeds the textbook
//! `s_analytic = sum_{j<=K} (t alpha)^j / j!`, and strict anticommutation
//! cancellation shows up as `s_symbolic < s_analytic`.
//!
//! Two polynomial families are supported: the plain degree-`K` truncation,
//! and the modified truncation that additionally captures the dominant
//! `H^{K+1}` (pair groups) and `H^{K+2}` (repeated-index cube) contributions
//! through a degree-3 bracket applied after `H^{K-1}`.

use num_complex::Complex;

use crate::bounds::{self, BoundInputs, Scheme};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::oracle::LcuDecomposition;
use crate::pauli::{DenseOperator, PauliString};
use crate::scalar::{r64, Real};
use crate::structure::{self, CancellationReport};
use crate::summation::KahanSum;
use crate::symbolic::{PauliMap, SymbolicBudget};

/// One mixing slot: `coefficient * phase * operator`, with `coefficient > 0`
/// and `|phase| = 1`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PlanTerm<R: Real> {
    pub coefficient: R,
    pub phase: Complex<R>,
    pub operator: PauliString,
}

impl<R: Real> PlanTerm<R> {
    pub fn unitary(&self, cap: usize) -> Result<DenseOperator<R>> {
        Ok(self.operator.to_dense::<R>(cap)? * self.phase)
    }
}

/// A symbolic segment polynomial ready for mixing.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SegmentExpansion<R: Real> {
    pub k: usize,
    pub t: R,
    pub terms: Vec<PlanTerm<R>>,
    /// Mixing norm of the collapsed polynomial.
    pub s_symbolic: R,
    /// Closed-form mixing norm of the uncollapsed construction.
    pub s_analytic: R,
}

fn terms_from_map<R: Real>(map: &PauliMap<R>) -> (Vec<PlanTerm<R>>, R) {
    let l1 = map.l1();
    let drop = r64::<R>(1e-16) * l1.max(R::one());
    let mut terms = Vec::new();
    let mut s = KahanSum::new();
    for (key, coeff) in map.iter() {
        let mag = (coeff.re * coeff.re + coeff.im * coeff.im).sqrt();
        if mag < drop {
            continue;
        }
        let inv = Complex::new(coeff.re / mag, coeff.im / mag);
        terms.push(PlanTerm {
            coefficient: mag,
            phase: inv,
            operator: PauliString::from_key(map.n_qubits(), key),
        });
        s.add(mag);
    }
    (terms, s.value())
}

/// Collapse `sum_{j<=k} (-it)^j H^j / j!` into distinct-string slots.
pub fn build_truncated<R: Real>(
    h: &Hamiltonian<R>,
    t: R,
    k: usize,
    budget: &SymbolicBudget,
) -> Result<SegmentExpansion<R>> {
    let mut acc = PauliMap::identity(h.n_qubits());
    let mut cur = PauliMap::identity(h.n_qubits());
    let mut analytic = KahanSum::new();
    let mut x_pow = R::one();
    analytic.add(R::one());
    let x = t * h.alpha();
    for j in 1..=k {
        cur = cur.mul_hamiltonian(h, budget)?;
        cur.scale(Complex::new(R::zero(), -t / r64::<R>(j as f64)));
        acc.add_scaled(&cur, Complex::new(R::one(), R::zero()));
        x_pow = x_pow * x / r64::<R>(j as f64);
        analytic.add(x_pow);
    }
    let (terms, s_symbolic) = terms_from_map(&acc);
    Ok(SegmentExpansion { k, t, terms, s_symbolic, s_analytic: analytic.value() })
}

/// Modified expansion plus the selection data its error bound depends on.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ModifiedExpansion<R: Real> {
    pub expansion: SegmentExpansion<R>,
    /// Residual pair mass left uncaptured by the chosen groups.
    pub e_epsilon: R,
    /// Extra-unitary groups actually captured on dedicated slots.
    pub captured: usize,
}

/// Build the modified polynomial
///
/// `M = sum_{j<=K-2} (-it)^j H^j/j! + (-it)^{K-1} H^{K-1}/(K-1)! * B`
///
/// with the degree-3 bracket
///
/// `B = [1 - t^2 beta0 / (K(K+1))] I
///    + sum_l (-i)[c_l t/K - t^3 s_l beta_l / (K(K+1)(K+2))] H_l
///    - t^2/(K(K+1)) sum_captured c_R R`.
///
/// Expanding `H^{K-1} B` reproduces the Taylor terms of orders `K-1` and `K`
/// exactly, plus the captured pair-group part of order `K+1` and the
/// repeated-index part of order `K+2`; the leftovers are exactly the three
/// pieces `modified_delta` charges for.
pub fn build_modified<R: Real>(
    h: &Hamiltonian<R>,
    t: R,
    k: usize,
    e: usize,
    budget: &SymbolicBudget,
) -> Result<ModifiedExpansion<R>> {
    if k < 2 {
        return Err(Error::Domain("modified expansion needs k >= 2".into()));
    }
    let s = structure::analyze(h);
    let order3 = structure::cancellation_order3(h, &s);
    let selection = structure::select_extra_unitaries(h, &s, e);

    let kf = r64::<R>(k as f64);
    let k1f = r64::<R>((k + 1) as f64);
    let k2f = r64::<R>((k + 2) as f64);
    let n = h.n_qubits();

    let mut bracket = PauliMap::identity(n);
    bracket.scale(Complex::new(
        R::one() - t * t * selection.beta0 / (kf * k1f),
        R::zero(),
    ));
    for (term, beta_l) in h.terms().iter().zip(&order3.beta) {
        // coeff = c_l t/K - t^3 s_l beta_l / (K(K+1)(K+2)); beta_l is
        // unsigned, so the term's sign rides on both pieces.
        let signed_beta = if term.negated { -*beta_l } else { *beta_l };
        let coeff = term.signed() * t / kf - t * t * t * signed_beta / (kf * k1f * k2f);
        bracket.accumulate(&term.operator, Complex::new(R::zero(), -coeff));
    }
    let pair_scale = -(t * t) / (kf * k1f);
    for group in selection.chosen.iter().chain(selection.absorbed.iter()) {
        bracket.accumulate(&group.operator, Complex::new(pair_scale * group.coefficient, R::zero()));
    }

    let mut acc = PauliMap::identity(n);
    let mut cur = PauliMap::identity(n);
    let mut analytic = KahanSum::new();
    analytic.add(R::one());
    let x = t * h.alpha();
    let mut x_pow = R::one();
    for j in 1..=(k - 1) {
        cur = cur.mul_hamiltonian(h, budget)?;
        cur.scale(Complex::new(R::zero(), -t / r64::<R>(j as f64)));
        if j <= k - 2 {
            acc.add_scaled(&cur, Complex::new(R::one(), R::zero()));
            x_pow = x_pow * x / r64::<R>(j as f64);
            analytic.add(x_pow);
        }
    }
    // cur now holds (-it)^{K-1} H^{K-1} / (K-1)!.
    let tail = cur.mul_map(&bracket, budget)?;
    acc.add_scaled(&tail, Complex::new(R::one(), R::zero()));

    // closed-form mixing norm of the construction: the bracket's own 1-norm
    // times the order-(K-1) prefactor mass.
    x_pow = x_pow * x / r64::<R>((k - 1) as f64);
    let s_analytic = analytic.value() + x_pow * bracket.l1();

    let (terms, s_symbolic) = terms_from_map(&acc);
    Ok(ModifiedExpansion {
        expansion: SegmentExpansion { k, t, terms, s_symbolic, s_analytic },
        e_epsilon: selection.e_epsilon,
        captured: selection.chosen.len(),
    })
}

/// Select-register width and leading-order gate counts for one segment walk.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct GateCost {
    /// Select-register width `w = ceil(log2 max(L, 4))`.
    pub select_width: usize,
    /// `15 * 2^{w-1} + 6w - 26` controlled-nots per select call.
    pub cnot_per_select: u64,
    /// Two fewer T gates than controlled-nots.
    pub t_per_select: u64,
    /// Whether `extra` captured groups plus one pad slot fit in the unused
    /// select codes (`L + extra + 1 <= 2^w`); if not, the model under-counts
    /// by one register doubling.
    pub extra_unitaries_fit: bool,
    /// `r * K * L * (D + w)` with `D` the largest Pauli weight.
    pub complexity_estimate: u128,
}

pub fn gate_cost(l: usize, extra: usize, r: usize, k: usize, max_weight: usize) -> GateCost {
    let padded = l.max(4);
    let w = usize::BITS as usize - (padded - 1).leading_zeros() as usize;
    let slots = 1u64 << w;
    let cnot = 15 * (slots / 2) + 6 * w as u64 - 26;
    GateCost {
        select_width: w,
        cnot_per_select: cnot,
        t_per_select: cnot - 2,
        extra_unitaries_fit: (l + extra + 1) as u64 <= slots,
        complexity_estimate: r as u128 * k as u128 * l as u128 * (max_weight + w) as u128,
    }
}

/// A fully assembled segment plan.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LcuPlan<R: Real> {
    pub label: String,
    pub scheme: Scheme,
    pub k: usize,
    pub t_segment: R,
    /// Number of identical segments covering the requested time.
    pub r: usize,
    /// Scheme truncation bound at `(t_segment, k)`.
    pub delta_segment: R,
    /// `r * envelope(delta_segment)`; at most the requested accuracy.
    pub epsilon_total: R,
    pub s_analytic: R,
    pub s_symbolic: R,
    /// `+I/-I` padding added so the realized mixing norm is exactly 2.
    pub boosted: bool,
    /// Realized mixing norm is at most 2, so one amplification round applies.
    pub amplifiable: bool,
    pub terms: Vec<PlanTerm<R>>,
    pub gate_cost: GateCost,
}

impl<R: Real> LcuPlan<R> {
    /// Realized mixing norm (including any padding).
    pub fn s(&self) -> R {
        KahanSum::sum_iter(self.terms.iter().map(|t| t.coefficient))
    }

    /// The encoded polynomial as a coefficient map.
    pub fn target_map(&self, n_qubits: usize) -> PauliMap<R> {
        let mut m = PauliMap::new(n_qubits);
        for term in &self.terms {
            m.accumulate(&term.operator, term.phase * Complex::new(term.coefficient, R::zero()));
        }
        m
    }

    /// Dense mixing decomposition for oracle verification.
    pub fn to_decomposition(&self, cap: usize) -> Result<LcuDecomposition<R>> {
        let mut coeffs = Vec::with_capacity(self.terms.len());
        let mut unitaries = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            coeffs.push(t.coefficient);
            unitaries.push(t.unitary(cap)?);
        }
        LcuDecomposition::new(coeffs, unitaries)
    }
}

/// Pad a slot list with a `+I/-I` pair up to mixing norm 2.
/// Returns true when padding was added; errors if the norm already exceeds
/// 2 by more than rounding.
pub fn boost_terms<R: Real>(terms: &mut Vec<PlanTerm<R>>, n_qubits: usize) -> Result<bool> {
    let s = KahanSum::sum_iter(terms.iter().map(|t| t.coefficient));
    let two = r64::<R>(2.0);
    if s > two + r64(1e-9) {
        return Err(Error::Domain(format!("mixing norm {s} exceeds 2; cannot pad")));
    }
    if s >= two {
        return Ok(false);
    }
    let pad = (two - s) / two;
    let id = PauliString::identity(n_qubits);
    terms.push(PlanTerm {
        coefficient: pad,
        phase: Complex::new(R::one(), R::zero()),
        operator: id.clone(),
    });
    terms.push(PlanTerm {
        coefficient: pad,
        phase: Complex::new(-R::one(), R::zero()),
        operator: id,
    });
    Ok(true)
}

/// Build the complete plan for target accuracy `eps` over evolution time `t`.
///
/// Chooses `r` and the smallest feasible `k` from the scheme's bound, builds
/// the segment polynomial at the per-segment duration, pads the mixing norm
/// to 2 when it falls short, and attaches gate costs. `e` is the
/// extra-unitary budget (modified scheme only; it also enters the bound
/// through `e_epsilon`).
pub fn assemble_plan<R: Real>(
    h: &Hamiltonian<R>,
    scheme: Scheme,
    t: R,
    eps: R,
    e: usize,
    budget: &SymbolicBudget,
) -> Result<LcuPlan<R>> {
    let s = structure::analyze(h);
    let report = CancellationReport::compute(h, &s, e, budget);
    let inputs = BoundInputs::from_report(&report);
    let mut mk = bounds::min_k(scheme, &inputs, t, eps)?;
    if scheme == Scheme::Modified && mk.k < 2 {
        let delta = bounds::scheme_delta(scheme, &inputs, mk.tau, 2);
        mk.k = 2;
        mk.delta = delta;
        mk.envelope = bounds::amplification_envelope(delta);
    }

    let (mut expansion, captured) = match scheme {
        Scheme::Modified => {
            let m = build_modified(h, mk.tau, mk.k, e, budget)?;
            (m.expansion, m.captured)
        }
        _ => (build_truncated(h, mk.tau, mk.k, budget)?, 0),
    };
    let boosted = boost_terms(&mut expansion.terms, h.n_qubits())?;
    let realized = KahanSum::sum_iter(expansion.terms.iter().map(|t| t.coefficient));
    let amplifiable = realized <= r64::<R>(2.0) + r64(1e-9);
    let cost = gate_cost(h.len(), captured, mk.r, mk.k, h.max_weight());
    Ok(LcuPlan {
        label: h.label().to_string(),
        scheme,
        k: mk.k,
        t_segment: mk.tau,
        r: mk.r,
        delta_segment: mk.delta,
        epsilon_total: r64::<R>(mk.r as f64) * mk.envelope,
        s_analytic: expansion.s_analytic,
        s_symbolic: expansion.s_symbolic,
        boosted,
        amplifiable,
        terms: expansion.terms,
        gate_cost: cost,
    })
}
