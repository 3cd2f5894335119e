//! Exact evolution of pairwise-anticommuting Pauli sums.
//!
//! When every distinct pair of terms anticommutes, `H^2 = beta_s^2 I` with
//! `beta_s = sqrt(sum_l c_l^2)` (cross terms cancel in `{H_a, H_b} = 0`
//! pairs), so the evolution closes after one power:
//!
//! `exp(-iHt) = cos(t beta_s) I + sum_l (c_l / beta_s) sin(t beta_s) (-i H_l)`
//!
//! This is a finite mixing-coefficient decomposition — no Taylor truncation —
//! whose 1-norm `s(t) = |cos| + (alpha/beta_s)|sin|` stays in
//! `[1, sqrt(1 + c^2)]`, `c = alpha/beta_s <= sqrt(L)`. Amplitude
//! amplification wants `s = 2` exactly; [`schedule`] carves the evolution
//! into segments that hit that value whenever `c^2 >= 3` makes it reachable.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{Axis, PauliString};
use crate::scalar::{r64, Real};
use crate::summation::KahanSum;
use crate::symbolic::{symbolic_power, SymbolicBudget};

/// Anticommutation profile of a term list.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct AnticommutingProfile<R: Real> {
    /// True when every distinct pair anticommutes.
    pub pairwise: bool,
    pub alpha: R,
    pub beta_s: R,
    /// `alpha / beta_s`, in `[1, sqrt(L)]`.
    pub c_ratio: R,
    /// Distinct commuting-pair mass `sum_{a != b, comm} alpha_a alpha_b`;
    /// zero exactly when `pairwise` holds, and an upper bound on
    /// `||H^2 - beta_s^2 I||` otherwise.
    pub violation_mass: R,
}

pub fn profile<R: Real>(h: &Hamiltonian<R>) -> AnticommutingProfile<R> {
    let terms = h.terms();
    let l = terms.len();
    let mut pairwise = true;
    let mut violation = KahanSum::new();
    for a in 0..l {
        for b in (a + 1)..l {
            let commutes = terms[a]
                .operator
                .commutes(&terms[b].operator)
                .expect("uniform width within a Hamiltonian");
            if commutes {
                pairwise = false;
                violation.add(r64::<R>(2.0) * terms[a].coefficient * terms[b].coefficient);
            }
        }
    }
    let alpha = h.alpha();
    let beta_s = h.beta_s();
    AnticommutingProfile {
        pairwise,
        alpha,
        beta_s,
        c_ratio: alpha / beta_s,
        violation_mass: violation.value(),
    }
}

/// The closed-form mixing coefficients of `exp(-iHt)`.
///
/// Convention: `exp(-iHt) = gamma0 * I + sum_l gamma_l * (-i H_l)` with all
/// gammas real; the `-i` lives in the unitary, keeping coefficients signed
/// reals whose magnitudes sum to `s_value`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ExactDecomposition<R: Real> {
    pub beta_s: R,
    /// `cos(t beta_s)`.
    pub gamma0: R,
    /// `(c_l / beta_s) sin(t beta_s)` per term, signed.
    pub gammas: Vec<R>,
    /// `|gamma0| + sum_l |gamma_l|`.
    pub s_value: R,
}

pub fn exact_coefficients<R: Real>(h: &Hamiltonian<R>, t: R) -> Result<ExactDecomposition<R>> {
    if !profile(h).pairwise {
        return Err(Error::NotAnticommuting);
    }
    let beta_s = h.beta_s();
    let theta = t * beta_s;
    let (sin, cos) = (theta.sin(), theta.cos());
    let gammas: Vec<R> = h.terms().iter().map(|term| term.signed() / beta_s * sin).collect();
    let mut s = KahanSum::new();
    s.add(cos.abs());
    for g in &gammas {
        s.add(g.abs());
    }
    Ok(ExactDecomposition { beta_s, gamma0: cos, gammas, s_value: s.value() })
}

/// Mixing-coefficient 1-norm at duration `t` without building the vectors.
pub fn s_value<R: Real>(alpha: R, beta_s: R, t: R) -> R {
    let theta = t * beta_s;
    theta.cos().abs() + alpha / beta_s * theta.sin().abs()
}

/// One amplification segment of an anticommuting evolution.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ScheduleSegment<R: Real> {
    pub duration: R,
    pub s_value: R,
    /// Segment needs identity padding to reach `s = 2`.
    pub needs_boost: bool,
}

/// Segment plan for `exp(-iHt)` of a pairwise-anticommuting sum.
///
/// `exp(-iH k pi / beta_s) = (-1)^k I`, so whole half-periods are free; the
/// remainder is cut into pieces of duration `theta_star / beta_s` where
/// `theta_star` solves `cos(theta) + c sin(theta) = 2` (first crossing), each
/// amplifiable without padding. The final partial piece (or, when
/// `c^2 < 3` keeps `s` below 2 everywhere, the whole remainder) is padded up.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AnticommutingSchedule<R: Real> {
    pub beta_s: R,
    pub c_ratio: R,
    pub t_total: R,
    /// Leading `floor(t beta_s / pi) * pi / beta_s` stretch: a global phase.
    pub t_free: R,
    /// True when the free stretch contributes a `(-1)` phase.
    pub free_negates: bool,
    /// First `s = 2` crossing angle, present when `c^2 >= 3`.
    pub theta_star: Option<R>,
    pub segments: Vec<ScheduleSegment<R>>,
}

impl<R: Real> AnticommutingSchedule<R> {
    pub fn needs_boost(&self) -> bool {
        self.segments.iter().any(|s| s.needs_boost)
    }

    /// Sum of free and segment durations; equals `t_total` up to rounding.
    pub fn covered(&self) -> R {
        let mut acc = KahanSum::new();
        acc.add(self.t_free);
        for s in &self.segments {
            acc.add(s.duration);
        }
        acc.value()
    }
}

/// Solve `cos(theta) + c sin(theta) = 2` for the first crossing.
///
/// Closed form from the quadratic in `sin(theta)`; a bisection on
/// `[0, atan(c)]` (where `s` is strictly increasing from 1 to
/// `sqrt(1 + c^2)`) backs it up if the evaluated `s` drifts.
fn first_s2_crossing<R: Real>(c: R) -> R {
    let three = r64::<R>(3.0);
    let two = r64::<R>(2.0);
    // Callers guarantee c^2 >= 3; the clamp absorbs last-ulp rounding at the
    // boundary (c = sqrt(3) squares to just under 3).
    let disc = (c * c - three).max(R::zero());
    let sin_theta = (two * c - disc.sqrt()) / (R::one() + c * c);
    let mut theta = sin_theta.asin();
    let s_at = |th: R| th.cos() + c * th.sin();
    if (s_at(theta) - two).abs() > r64(1e-12) {
        let mut lo = R::zero();
        let mut hi = c.atan();
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if s_at(mid) < two {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < r64::<R>(1e-16) * hi.max(R::one()) {
                break;
            }
        }
        theta = (lo + hi) / two;
    }
    theta
}

pub fn schedule<R: Real>(h: &Hamiltonian<R>, t: R) -> Result<AnticommutingSchedule<R>> {
    if t < R::zero() {
        return Err(Error::Domain("schedule needs t >= 0".into()));
    }
    let prof = profile(h);
    if !prof.pairwise {
        return Err(Error::NotAnticommuting);
    }
    let beta_s = prof.beta_s;
    let c = prof.c_ratio;
    let pi = R::pi();
    let theta_total = t * beta_s;
    let half_periods = (theta_total / pi).floor();
    let k = half_periods.to_f64().map(|v| v as u64).unwrap_or(0);
    let t_free = half_periods * pi / beta_s;
    let mut theta_rem = theta_total - half_periods * pi;
    if theta_rem < R::zero() {
        theta_rem = R::zero();
    }

    let two = r64::<R>(2.0);
    let tiny = r64::<R>(1e-14) * (R::one() + theta_total);
    let mut segments = Vec::new();
    let theta_star = if c * c >= r64(3.0) { Some(first_s2_crossing(c)) } else { None };
    if theta_rem > tiny {
        match theta_star {
            Some(star) => {
                let mut left = theta_rem;
                while left > star + tiny {
                    let s = s_value(prof.alpha, beta_s, star / beta_s);
                    segments.push(ScheduleSegment {
                        duration: star / beta_s,
                        s_value: s,
                        needs_boost: s + r64(1e-9) < two,
                    });
                    left -= star;
                }
                if left > tiny {
                    let s = s_value(prof.alpha, beta_s, left / beta_s);
                    segments.push(ScheduleSegment {
                        duration: left / beta_s,
                        s_value: s,
                        needs_boost: s + r64(1e-9) < two,
                    });
                }
            }
            None => {
                let s = s_value(prof.alpha, beta_s, theta_rem / beta_s);
                segments.push(ScheduleSegment {
                    duration: theta_rem / beta_s,
                    s_value: s,
                    needs_boost: true,
                });
            }
        }
    }
    Ok(AnticommutingSchedule {
        beta_s,
        c_ratio: c,
        t_total: t,
        t_free,
        free_negates: k % 2 == 1,
        theta_star,
        segments,
    })
}

/// A pairwise-anticommuting family of `l` strings on `max(l, 1)` qubits:
///
/// `X0, Z0 Z1, Z0 X1 Z2, Z0 X1 X2 Z3, ...`
///
/// Term `j >= 1` is `Z0 X1 .. X_{j-1} Z_j`; any two terms overlap
/// anticommutingly on exactly one qubit. All coefficients are 1, so
/// `alpha = l`, `beta_s = sqrt(l)`, and the 1-norm ratio is `c = sqrt(l)`.
pub fn generate_family<R: Real>(l: usize) -> Result<Hamiltonian<R>> {
    if l == 0 {
        return Err(Error::EmptyHamiltonian);
    }
    let n_qubits = if l == 1 { 1 } else { l };
    let mut entries = Vec::with_capacity(l);
    entries.push((R::one(), PauliString::from_factors(n_qubits, &[(Axis::X, 0)])?));
    for j in 1..l {
        let mut factors = vec![(Axis::Z, 0)];
        for u in 1..j {
            factors.push((Axis::X, u));
        }
        factors.push((Axis::Z, j));
        entries.push((R::one(), PauliString::from_factors(n_qubits, &factors)?));
    }
    Hamiltonian::from_terms(format!("anticommuting-family-{l}"), n_qubits, entries)
}

/// Smallest `m <= cap` with `H^m = gamma I` (symbolically exact up to
/// floating-point residue), if any.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PowerReduction<R: Real> {
    pub m: usize,
    pub gamma: R,
}

pub fn power_reduction<R: Real>(
    h: &Hamiltonian<R>,
    cap: usize,
    budget: &SymbolicBudget,
) -> Result<Option<PowerReduction<R>>> {
    let alpha = h.alpha();
    let mut mass = R::one();
    for m in 1..=cap.min(12) {
        mass *= alpha;
        let tol = r64::<R>(1e-10) * mass.max(R::one());
        let power = symbolic_power(h, m, budget)?;
        if power.is_identity_multiple(tol) {
            let gamma = power.identity_coefficient().unwrap_or(R::zero());
            return Ok(Some(PowerReduction { m, gamma }));
        }
    }
    Ok(None)
}

impl<R: Real> PowerReduction<R> {
    /// Coefficients `c_k(t)` of `exp(-iHt) = sum_{k<m} c_k(t) H^k`, found by
    /// collapsing `H^{k + jm} = gamma^j H^k` in the Taylor series:
    ///
    /// `c_k(t) = sum_{j>=0} (-it)^{k+jm} gamma^j / (k+jm)!`
    pub fn series_coefficients(&self, t: R) -> Vec<Complex<R>> {
        let m = self.m;
        let minus_it = Complex::new(R::zero(), -t);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            // term_0 = (-it)^k / k!
            let mut term = Complex::new(R::one(), R::zero());
            for u in 1..=k {
                term = term * minus_it / Complex::new(r64::<R>(u as f64), R::zero());
            }
            let mut acc = term;
            let mut power = k;
            for _ in 0..5_000 {
                // term *= (-it)^m gamma / ((power+1) .. (power+m))
                let mut step = Complex::new(self.gamma, R::zero());
                for u in 1..=m {
                    step = step * minus_it / Complex::new(r64::<R>((power + u) as f64), R::zero());
                }
                term *= step;
                acc += term;
                power += m;
                let mag = (term.re * term.re + term.im * term.im).sqrt();
                let total = (acc.re * acc.re + acc.im * acc.im).sqrt();
                if mag <= r64::<R>(1e-22) * (R::one() + total) {
                    break;
                }
            }
            out.push(acc);
        }
        out
    }
}

/// Error of treating a nearly-anticommuting sum as exactly anticommuting.
///
/// With `eps_a >= ||H^2 - beta_s^2 I||` and `B = sqrt(beta_s^2 + eps_a)`,
/// comparing the power series of `exp(-iHt)` against the closed form
/// majorant-by-majorant gives
///
/// `|| exp(-iHt) - D(t) || <= [cosh(tB) - cosh(t beta_s)]
///                          + [(alpha/B) sinh(tB) - (alpha/beta_s) sinh(t beta_s)]`
///
/// where `D(t)` is the exact-anticommuting decomposition. Both brackets are
/// nonnegative (each is an even series with positive coefficients in
/// `B^2 - beta_s^2`).
pub fn near_anticommuting_bound<R: Real>(t: R, alpha: R, beta_s: R, eps_a: R) -> R {
    if eps_a <= R::zero() {
        return R::zero();
    }
    let t = t.abs();
    let b = (beta_s * beta_s + eps_a).sqrt();
    let even = (t * b).cosh() - (t * beta_s).cosh();
    let odd = alpha / b * (t * b).sinh() - alpha / beta_s * (t * beta_s).sinh();
    (even + odd).max(R::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure;

    #[test]
    fn family_is_pairwise_anticommuting() {
        for l in 1..=9usize {
            let h: Hamiltonian<f64> = generate_family(l).unwrap();
            assert_eq!(h.len(), l);
            let s = structure::analyze(&h);
            assert!(s.is_pairwise_anticommuting(), "family size {l}");
            assert_eq!(s.alpha, l as f64);
            assert_eq!(s.alpha_comm, l as f64); // diagonal only
            let prof = profile(&h);
            assert!(prof.pairwise);
            assert_eq!(prof.violation_mass, 0.0);
        }
    }

    #[test]
    fn family_q_is_exactly_sqrt_l_for_perfect_squares() {
        for l in [4usize, 9, 16] {
            let h: Hamiltonian<f64> = generate_family(l).unwrap();
            let s = structure::analyze(&h);
            assert_eq!(s.q2, (l as f64).sqrt());
        }
    }

    #[test]
    fn exact_coefficients_shape() {
        let h: Hamiltonian<f64> = generate_family(4).unwrap();
        let d = exact_coefficients(&h, 0.7).unwrap();
        assert_eq!(d.beta_s, 2.0);
        assert!((d.gamma0 - (1.4f64).cos()).abs() < 1e-15);
        for g in &d.gammas {
            assert!((g - (1.4f64).sin() / 2.0).abs() < 1e-15);
        }
        let s = s_value(4.0, 2.0, 0.7);
        assert!((d.s_value - s).abs() < 1e-14);
        assert!(s >= 1.0 && s <= (1.0f64 + 4.0).sqrt() + 1e-15);
    }

    #[test]
    fn exact_coefficients_reject_commuting_input() {
        let h = Hamiltonian::<f64>::parse("1.0 Z0\n1.0 Z1\n", "t").unwrap();
        assert!(matches!(exact_coefficients(&h, 0.5), Err(Error::NotAnticommuting)));
    }

    #[test]
    fn closed_form_matches_power_recurrence_series() {
        // H^m = g0_m I + k_m H with g0_{m+1} = k_m beta^2, k_{m+1} = g0_m.
        let h = Hamiltonian::<f64>::parse("0.8 X0\n-0.6 Z0\n1.1 Y0\n", "t").unwrap();
        assert!(profile(&h).pairwise);
        let beta = h.beta_s();
        let t = 0.9;
        let mut g0 = 1.0f64;
        let mut kappa = 0.0f64;
        let mut z = Complex::new(1.0f64, 0.0);
        let minus_it = Complex::new(0.0, -t);
        let mut acc_i = Complex::new(0.0f64, 0.0);
        let mut acc_h = Complex::new(0.0f64, 0.0);
        for m in 0..60 {
            acc_i += z * g0;
            acc_h += z * kappa;
            let next_g0 = kappa * beta * beta;
            let next_kappa = g0;
            g0 = next_g0;
            kappa = next_kappa;
            z = z * minus_it / Complex::new((m + 1) as f64, 0.0);
        }
        let expect_i = Complex::new((t * beta).cos(), 0.0);
        let expect_h = Complex::new(0.0, -(t * beta).sin() / beta);
        assert!((acc_i - expect_i).norm() < 1e-13);
        assert!((acc_h - expect_h).norm() < 1e-13);
        // and the closed-form decomposition agrees term by term
        let d = exact_coefficients(&h, t).unwrap();
        for (term, g) in h.terms().iter().zip(&d.gammas) {
            let from_series = (expect_h * Complex::new(0.0, 1.0)).re * term.signed();
            assert!((g - from_series).abs() < 1e-13);
        }
    }

    #[test]
    fn power_reduction_finds_square() {
        let h = Hamiltonian::<f64>::parse("0.8 X0\n-0.6 Z0\n1.1 Y0\n", "t").unwrap();
        let red = power_reduction(&h, 8, &SymbolicBudget::default()).unwrap().unwrap();
        assert_eq!(red.m, 2);
        let beta = h.beta_s();
        assert!((red.gamma - beta * beta).abs() < 1e-12);
        let coeffs = red.series_coefficients(1.3);
        let expect0 = Complex::new((1.3 * beta).cos(), 0.0);
        let expect1 = Complex::new(0.0, -(1.3 * beta).sin() / beta);
        assert!((coeffs[0] - expect0).norm() < 1e-13);
        assert!((coeffs[1] - expect1).norm() < 1e-13);
    }

    #[test]
    fn power_reduction_none_for_generic_sum() {
        let h = Hamiltonian::<f64>::parse("1.0 Z0\n1.0 Z0 Z1\n", "t").unwrap();
        assert!(power_reduction(&h, 6, &SymbolicBudget::default()).unwrap().is_none());
    }

    #[test]
    fn schedule_hits_s_two_when_reachable() {
        let h: Hamiltonian<f64> = generate_family(4).unwrap(); // c = 2 >= sqrt(3)
        let sched = schedule(&h, 3.0).unwrap();
        assert_eq!(sched.beta_s, 2.0);
        assert!((sched.covered() - 3.0).abs() < 1e-12);
        // theta_total = 6, one half-period of pi fits
        assert!((sched.t_free - std::f64::consts::PI / 2.0).abs() < 1e-14);
        assert!(sched.free_negates);
        assert!(!sched.segments.is_empty());
        for (i, seg) in sched.segments.iter().enumerate() {
            assert!(seg.s_value <= 2.0 + 1e-9, "segment {i} has s {}", seg.s_value);
            if i + 1 < sched.segments.len() {
                assert!((seg.s_value - 2.0).abs() < 1e-9, "full segment {i} off s=2");
                assert!(!seg.needs_boost);
            }
        }
    }

    #[test]
    fn schedule_flags_boost_when_s_two_unreachable() {
        let h: Hamiltonian<f64> = generate_family(2).unwrap(); // c = sqrt(2), c^2 < 3
        let sched = schedule(&h, 0.4).unwrap();
        assert!(sched.theta_star.is_none());
        assert_eq!(sched.segments.len(), 1);
        assert!(sched.needs_boost());
        assert!(sched.segments[0].s_value < 2.0);
        assert!((sched.covered() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn schedule_zero_time() {
        let h: Hamiltonian<f64> = generate_family(3).unwrap();
        let sched = schedule(&h, 0.0).unwrap();
        assert!(sched.segments.is_empty());
        assert_eq!(sched.t_free, 0.0);
        assert!(!sched.free_negates);
    }

    #[test]
    fn near_bound_zero_at_zero_violation_and_monotone() {
        assert_eq!(near_anticommuting_bound(0.7f64, 3.0, 1.5, 0.0), 0.0);
        let b1 = near_anticommuting_bound(0.7f64, 3.0, 1.5, 0.1);
        let b2 = near_anticommuting_bound(0.7f64, 3.0, 1.5, 0.4);
        assert!(b1 > 0.0 && b2 > b1);
    }

    #[test]
    fn first_crossing_at_boundary_ratio() {
        // c = sqrt(3): crossing at theta = pi/3 where s = 1/2 + 3/2 = 2.
        let theta = first_s2_crossing(3f64.sqrt());
        assert!((theta - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    }
}
