//! Truncation error bounds for the truncated-Taylor simulation of
//! `exp(-iHt)`.
//!
//! All bounds control `delta = || exp(-iHt) - U_K(t) ||` where `U_K` is the
//! degree-`K` Taylor polynomial, by bounding the tail
//! `sum_{k>K} t^k ||H^k|| / k!`. The schemes differ only in the power-norm
//! estimate they feed into the tail:
//!
//! * original:  `||H^k|| <= alpha^k`
//! * refined2:  `||H^k|| <= A^k q^{k mod 2}`, `A = sqrt(alpha_comm)`, `q = alpha/A`
//! * refined3/4: same shape with `A = alpha_m^{1/m}`, `q = alpha/A`, exponent
//!   `k mod m`
//! * modified:  the degree-`K` polynomial itself is adjusted to absorb the
//!   dominant `k = K+1, K+2` contributions, leaving only small residues plus
//!   the `k >= K+3` refined tail.
//!
//! Every scheme's tail term is dominated term-by-term by the original's, so
//! the refined bounds can never exceed the original one.

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, r64, Real};
use crate::structure::CancellationReport;
use crate::summation::KahanSum;

/// `x^m / m!` evaluated in log space so large `m` neither overflows nor
/// loses the factorial cancellation.
pub fn pow_over_factorial<R: Real>(x: R, m: usize) -> R {
    if x <= R::zero() {
        return R::zero();
    }
    (r64::<R>(m as f64) * x.ln() - ln_factorial::<R>(m)).exp()
}

/// Taylor tail bound `sum_{k>=m} y^k w_k / k!` with `y = x/q` and parity
/// weight `w_k = q^{k mod 2}`, compressed with `(m+j)! >= m! j!`:
///
/// `tail <= y^m/m! * (cosh(y) + q sinh(y))`  for even `m`,
/// `tail <= y^m/m! * (sinh(y) + q cosh(y))`  for odd `m`.
///
/// At `q = 1` the bracket collapses to `e^x`, recovering the unrefined bound,
/// through the very same code path (so the two are bit-identical).
pub fn tail_with_q<R: Real>(x: R, q: R, m: usize) -> R {
    assert!(m >= 1, "tail order must be positive");
    if x <= R::zero() {
        return R::zero();
    }
    let q = if q > R::one() { q } else { R::one() };
    let y = x / q;
    let bracket = if m.is_multiple_of(2) {
        y.cosh() + q * y.sinh()
    } else {
        y.sinh() + q * y.cosh()
    };
    pow_over_factorial(y, m) * bracket
}

/// Unrefined truncation bound `(t alpha)^{K+1}/(K+1)! e^{t alpha}`.
pub fn original_delta<R: Real>(t: R, alpha: R, k: usize) -> R {
    tail_with_q(t * alpha, R::one(), k + 1)
}

/// Second-order refined bound driven by `q2 = alpha / sqrt(alpha_comm)`.
pub fn refined2_delta<R: Real>(t: R, alpha: R, q2: R, k: usize) -> R {
    tail_with_q(t * alpha, q2, k + 1)
}

/// Residue-class exponential sums `S_j(x) = sum_{k = j mod m} x^k / k!` for
/// `j = 0..m`. Direct series; all terms are positive so the partial sums are
/// monotone and the stop test is safe.
pub fn residue_sums<R: Real>(x: R, m: usize) -> Vec<R> {
    assert!(m >= 1);
    let mut buckets = vec![KahanSum::<R>::new(); m];
    let mut term = R::one();
    let mut total = R::one();
    buckets[0].add(term);
    let eps = r64::<R>(1e-20);
    let mut k = 1usize;
    while k < 10_000 {
        term = term * x / r64::<R>(k as f64);
        buckets[k % m].add(term);
        total += term;
        if r64::<R>(k as f64) > x && term < total * eps {
            break;
        }
        k += 1;
    }
    buckets.into_iter().map(|b| b.value()).collect()
}

/// Order-`m` refined bound from the cancellation parameter
/// `alpha_m >= max_s ||H^{ms}||^{1/s}` (so `||H^k|| <= A^k q^{k mod m}` with
/// `A = alpha_m^{1/m}`, `q = alpha/A`):
///
/// `delta <= (tA)^{K+1}/(K+1)! * sum_{j=0}^{m-1} q^{(K+1+j) mod m} S_j(tA)`.
pub fn refined_m_delta<R: Real>(t: R, alpha: R, alpha_m: R, m: usize, k: usize) -> R {
    assert!(m >= 2);
    if t <= R::zero() || alpha <= R::zero() {
        return R::zero();
    }
    let capped = alpha_m.min(alpha.powi(m as i32)).max(R::zero());
    let a = capped.powf(R::one() / r64(m as f64));
    if a <= R::zero() {
        return R::zero();
    }
    let q = {
        let raw = alpha / a;
        if raw > R::one() {
            raw
        } else {
            R::one()
        }
    };
    let x = t * a;
    let s = residue_sums(x, m);
    let mut bracket = KahanSum::new();
    for (j, sj) in s.iter().enumerate() {
        bracket.add(q.powi(((k + 1 + j) % m) as i32) * *sj);
    }
    pow_over_factorial(x, k + 1) * bracket.value()
}

/// `||H^m|| <= alpha_comm^{m/2}` (even) or `alpha alpha_comm^{(m-1)/2}` (odd).
pub fn even_odd_power_bound<R: Real>(alpha: R, alpha_comm: R, m: usize) -> R {
    if m.is_multiple_of(2) {
        alpha_comm.powi((m / 2) as i32)
    } else {
        alpha * alpha_comm.powi(((m - 1) / 2) as i32)
    }
}

/// Error bound for the modified truncated series.
///
/// The modified polynomial captures the distinct commuting-pair mass of
/// `H^{K+1}` up to the selection residue `e_epsilon` and the fully-commuting
/// triple mass `alpha3_r` of `H^{K+2}`; everything from `K+3` on is bounded
/// by the second-order refined tail:
///
/// `delta <= t^{K+1} N e_eps /(K+1)! + t^{K+2} N alpha3_r /(K+2)!
///           + tail_with_q(t alpha, q2, K+3)`
///
/// with `N = even_odd_power_bound(alpha, alpha_comm, K-1)` bounding the
/// untouched `H^{K-1}` factor.
#[allow(clippy::too_many_arguments)]
pub fn modified_delta<R: Real>(
    t: R,
    alpha: R,
    alpha_comm: R,
    q2: R,
    e_epsilon: R,
    alpha3_r: R,
    k: usize,
) -> R {
    assert!(k >= 1, "modified scheme needs k >= 1");
    let n = even_odd_power_bound(alpha, alpha_comm, k - 1);
    let head = pow_over_factorial(t, k + 1) * n * e_epsilon
        + pow_over_factorial(t, k + 2) * n * alpha3_r;
    head + tail_with_q(t * alpha, q2, k + 3)
}

/// Which truncation bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Scheme {
    Original,
    Refined2,
    Refined3,
    Refined4,
    Modified,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Original,
        Scheme::Refined2,
        Scheme::Refined3,
        Scheme::Refined4,
        Scheme::Modified,
    ];
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::Original => "original",
            Scheme::Refined2 => "refined2",
            Scheme::Refined3 => "refined3",
            Scheme::Refined4 => "refined4",
            Scheme::Modified => "modified",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Scheme::Original),
            "refined2" => Ok(Scheme::Refined2),
            "refined3" => Ok(Scheme::Refined3),
            "refined4" => Ok(Scheme::Refined4),
            "modified" => Ok(Scheme::Modified),
            other => Err(Error::Domain(format!(
                "unknown scheme '{other}' (expected original|refined2|refined3|refined4|modified)"
            ))),
        }
    }
}

/// Cancellation parameters needed to evaluate any scheme.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BoundInputs<R: Real> {
    pub alpha: R,
    pub alpha_comm: R,
    pub q2: R,
    pub alpha3: R,
    pub alpha4: R,
    pub alpha3_r: R,
    pub e_epsilon: R,
}

impl<R: Real> BoundInputs<R> {
    pub fn from_report(r: &CancellationReport<R>) -> Self {
        BoundInputs {
            alpha: r.alpha,
            alpha_comm: r.alpha_comm,
            q2: r.q2,
            alpha3: r.alpha3,
            alpha4: r.alpha4,
            alpha3_r: r.alpha3_r,
            e_epsilon: r.e_epsilon,
        }
    }

    /// Inputs that reduce every scheme to the unrefined bound (`q = 1`,
    /// nothing captured).
    pub fn unrefined(alpha: R) -> Self {
        BoundInputs {
            alpha,
            alpha_comm: alpha * alpha,
            q2: R::one(),
            alpha3: alpha * alpha * alpha,
            alpha4: alpha * alpha * alpha * alpha,
            alpha3_r: R::zero(),
            e_epsilon: R::zero(),
        }
    }
}

/// Evaluate one scheme's truncation bound at evolution time `t`, order `k`.
pub fn scheme_delta<R: Real>(scheme: Scheme, inputs: &BoundInputs<R>, t: R, k: usize) -> R {
    assert!(k >= 1, "truncation order must be at least 1");
    match scheme {
        Scheme::Original => original_delta(t, inputs.alpha, k),
        Scheme::Refined2 => refined2_delta(t, inputs.alpha, inputs.q2, k),
        Scheme::Refined3 => refined_m_delta(t, inputs.alpha, inputs.alpha3, 3, k),
        Scheme::Refined4 => refined_m_delta(t, inputs.alpha, inputs.alpha4, 4, k),
        Scheme::Modified => modified_delta(
            t,
            inputs.alpha,
            inputs.alpha_comm,
            inputs.q2,
            inputs.e_epsilon,
            inputs.alpha3_r,
            k,
        ),
    }
}

/// Final-state error after oblivious amplitude amplification of a segment
/// whose block-encoding error is `delta`:
///
/// `epsilon(delta) = delta (delta^2 + 3 delta + 4) / 2`.
pub fn amplification_envelope<R: Real>(delta: R) -> R {
    let three = r64::<R>(3.0);
    let four = r64::<R>(4.0);
    delta * (delta * delta + three * delta + four) / r64::<R>(2.0)
}

/// First-order product formula error bound `t^2 alpha_anti / (2r)`.
///
/// Commuting pairs drop out of the leading commutator sum entirely, so only
/// the anticommuting mass survives (each anticommuting `{l1,l2}` contributes
/// `||[c2 P2, c1 P1]|| = 2 alpha_1 alpha_2`, and the ordered mass already
/// counts each unordered pair twice).
pub fn pf1_analytic_bound<R: Real>(t: R, r: usize, alpha_anti: R) -> R {
    t * t * alpha_anti / (r64::<R>(2.0) * r64::<R>(r as f64))
}

pub const MAX_TRUNCATION_ORDER: usize = 200;

/// Segmentation and smallest feasible truncation order for target error
/// `eps`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct MinK<R: Real> {
    pub scheme: Scheme,
    pub k: usize,
    pub r: usize,
    /// Per-segment duration `ln 2 / alpha` the bound is evaluated at.
    pub tau: R,
    /// Scheme bound at `(tau, k)`.
    pub delta: R,
    /// Amplified per-segment error; `r * envelope <= eps` holds.
    pub envelope: R,
}

/// Pick `r = ceil(alpha t / ln 2)` segments of duration at most
/// `tau = ln 2 / alpha`, then the smallest `k` whose amplified per-segment
/// error fits within `eps / r`.
pub fn min_k<R: Real>(scheme: Scheme, inputs: &BoundInputs<R>, t: R, eps: R) -> Result<MinK<R>> {
    if t <= R::zero() || eps <= R::zero() || inputs.alpha <= R::zero() {
        return Err(Error::Domain(
            "min_k needs positive t, eps, and alpha".into(),
        ));
    }
    let ln2 = r64::<R>(std::f64::consts::LN_2);
    let r_real = (inputs.alpha * t / ln2).ceil();
    let r = r_real.to_f64().map(|v| v as usize).unwrap_or(1).max(1);
    let tau = ln2 / inputs.alpha;
    let budget = eps / r64::<R>(r as f64);
    for k in 1..=MAX_TRUNCATION_ORDER {
        let delta = scheme_delta(scheme, inputs, tau, k);
        let envelope = amplification_envelope(delta);
        if envelope <= budget {
            return Ok(MinK { scheme, k, r, tau, delta, envelope });
        }
    }
    Err(Error::NoFeasibleK(MAX_TRUNCATION_ORDER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn original_at_half_life_segment() {
        // tau = ln2/alpha makes t*alpha = ln2 and e^{ln2} = 2 exactly:
        // delta = 2 (ln2)^11 / 11! for K = 10, independent of alpha.
        for alpha in [0.37, 1.0, 5.25] {
            let tau = LN_2 / alpha;
            let got = original_delta(tau, alpha, 10);
            let mut reference = 2.0 * LN_2.powi(11);
            for k in 2..=11u32 {
                reference /= k as f64;
            }
            assert!(
                (got - reference).abs() <= 1e-13 * reference,
                "alpha={alpha}: {got:e} vs {reference:e}"
            );
            assert!((reference - 8.891e-10).abs() < 1e-12);
        }
    }

    #[test]
    fn refined2_with_unit_q_is_bitwise_original() {
        for (t, alpha, k) in [(0.5f64, 1.3, 4), (2.0, 0.9, 12), (0.01, 40.0, 1)] {
            let a = original_delta(t, alpha, k);
            let b = refined2_delta(t, alpha, 1.0, k);
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn refined2_never_exceeds_original() {
        for q in [1.0, 1.0001, 1.5, 3.0, 25.0] {
            for t in [0.05, 0.4, 1.7] {
                for k in [1usize, 3, 7, 20] {
                    let alpha = 2.0;
                    let orig = original_delta(t, alpha, k);
                    let refi = refined2_delta(t, alpha, q, k);
                    assert!(refi <= orig * (1.0 + 1e-14), "q={q} t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn residue_sums_partition_the_exponential() {
        for x in [0.3, 1.0, 4.7, 12.0] {
            for m in [2usize, 3, 4, 5] {
                let s = residue_sums::<f64>(x, m);
                let total: f64 = s.iter().sum();
                assert!((total - x.exp()).abs() <= 1e-12 * x.exp(), "x={x} m={m}");
                assert!(s.iter().all(|v| *v >= 0.0));
            }
        }
    }

    #[test]
    fn residue_sums_match_closed_forms() {
        // mod 3: S_j = (e^x + 2 e^{-x/2} cos(sqrt(3)x/2 - 2 pi j/3)) / 3
        // mod 4: S_j = (e^x + (-1)^j e^{-x} + 2 cos(x - j pi/2)) / 4
        for x in [0.25f64, 1.1, 3.9] {
            let s3 = residue_sums::<f64>(x, 3);
            for (j, sj) in s3.iter().enumerate() {
                let angle = 3f64.sqrt() * x / 2.0 - 2.0 * std::f64::consts::PI * j as f64 / 3.0;
                let closed = (x.exp() + 2.0 * (-x / 2.0).exp() * angle.cos()) / 3.0;
                assert!((sj - closed).abs() < 1e-12 * x.exp(), "m=3 j={j} x={x}");
            }
            let s4 = residue_sums::<f64>(x, 4);
            for (j, sj) in s4.iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let closed = (x.exp()
                    + sign * (-x).exp()
                    + 2.0 * (x - j as f64 * std::f64::consts::FRAC_PI_2).cos())
                    / 4.0;
                assert!((sj - closed).abs() < 1e-12 * x.exp(), "m=4 j={j} x={x}");
            }
        }
    }

    #[test]
    fn refined_m_collapses_to_original_without_cancellation() {
        for (t, alpha, k) in [(0.4f64, 1.6, 5), (1.3, 0.8, 9)] {
            let orig = original_delta(t, alpha, k);
            for m in [2usize, 3, 4] {
                let got = refined_m_delta(t, alpha, alpha.powi(m as i32), m, k);
                assert!(
                    (got - orig).abs() <= 1e-12 * orig,
                    "m={m}: {got:e} vs {orig:e}"
                );
            }
        }
    }

    #[test]
    fn refined_m_never_exceeds_original() {
        for frac in [1.0, 0.9, 0.5, 0.1, 0.01] {
            for (t, alpha, k) in [(0.3f64, 2.0, 4), (0.9, 1.1, 11)] {
                let orig = original_delta(t, alpha, k);
                for m in [3usize, 4] {
                    let alpha_m = frac * alpha.powi(m as i32);
                    let got = refined_m_delta(t, alpha, alpha_m, m, k);
                    assert!(got <= orig * (1.0 + 1e-13), "m={m} frac={frac}");
                }
            }
        }
    }

    #[test]
    fn refined_m_order2_matches_refined2() {
        for (t, alpha, q, k) in [(0.5f64, 1.9, 1.4, 6), (1.1, 0.7, 2.5, 3)] {
            let alpha_comm = (alpha / q) * (alpha / q);
            let via_residues = refined_m_delta(t, alpha, alpha_comm, 2, k);
            let via_bracket = refined2_delta(t, alpha, q, k);
            assert!(
                (via_residues - via_bracket).abs() <= 1e-12 * via_bracket,
                "{via_residues:e} vs {via_bracket:e}"
            );
        }
    }

    #[test]
    fn modified_reduces_to_tail_when_everything_captured() {
        let t = 0.4;
        let (alpha, alpha_comm, q2) = (2.0, 2.5, 2.0 / 2.5f64.sqrt());
        let k = 5;
        let full = modified_delta(t, alpha, alpha_comm, q2, 0.0, 0.0, k);
        let tail = tail_with_q(t * alpha, q2, k + 3);
        assert_eq!(full.to_bits(), tail.to_bits());
        let with_residue = modified_delta(t, alpha, alpha_comm, q2, 0.3, 0.2, k);
        assert!(with_residue > full);
    }

    #[test]
    fn envelope_values() {
        assert_eq!(amplification_envelope(0.0f64), 0.0);
        assert_eq!(amplification_envelope(1.0f64), 4.0);
        // Leading term is 2 delta; the quadratic correction is 1.5 delta^2.
        let small = amplification_envelope(1e-8f64);
        assert!((small - 2e-8).abs() < 2e-16);
        assert!(amplification_envelope(0.2f64) < amplification_envelope(0.3f64));
    }

    #[test]
    fn tail_ratio_frozen_points() {
        // At t*alpha = ln2 the original/refined2 ratio collapses to
        // 2 q^{K+1} / (sinh(ln2/q) + q cosh(ln2/q)), a function of q alone.
        // Frozen reference points, 1% tolerance.
        let ln2 = std::f64::consts::LN_2;
        let ratio = |q: f64, k: usize| original_delta(ln2, 1.0, k) / refined2_delta(ln2, 1.0, q, k);
        for (q, k, expect) in [
            (1.0582, 10, 1.866),
            (1.0630, 10, 1.962),
            (1.0644, 10, 1.990),
            (1.0582, 20, 3.285),
            (1.0582, 30, 5.782),
            (1.0582, 40, 10.177),
        ] {
            let got = ratio(q, k);
            assert!(
                (got - expect).abs() <= 0.01 * expect,
                "q={q} K={k}: ratio {got:.4} vs {expect}"
            );
        }
    }

    #[test]
    fn min_k_finds_boundary() {
        let inputs = BoundInputs::unrefined(1.0f64);
        let res = min_k(Scheme::Original, &inputs, 1.0, 1e-3).unwrap();
        assert_eq!(res.r, 2); // ceil(1/ln2)
        assert!(res.envelope <= 1e-3 / 2.0);
        if res.k > 1 {
            let below = scheme_delta(Scheme::Original, &inputs, res.tau, res.k - 1);
            assert!(amplification_envelope(below) > 1e-3 / 2.0);
        }
        assert!(min_k(Scheme::Original, &inputs, 0.0, 1e-3).is_err());
    }

    #[test]
    fn min_k_refined_needs_no_larger_order() {
        let mut inputs = BoundInputs::unrefined(4.0f64);
        inputs.alpha_comm = 4.0; // strong anticommutation: q = 2
        inputs.q2 = 2.0;
        let orig = min_k(Scheme::Original, &inputs, 3.0, 1e-8).unwrap();
        let refi = min_k(Scheme::Refined2, &inputs, 3.0, 1e-8).unwrap();
        assert!(refi.k <= orig.k);
        assert!(refi.k < orig.k, "q=2 should strictly reduce the order");
    }

    #[test]
    fn scheme_round_trip_strings() {
        for s in Scheme::ALL {
            let parsed: Scheme = s.to_string().parse().unwrap();
            assert_eq!(parsed, s);
        }
        assert!("orig".parse::<Scheme>().is_err());
    }

    #[test]
    fn pf1_scaling() {
        let b1 = pf1_analytic_bound(0.8f64, 1, 3.0);
        let b4 = pf1_analytic_bound(0.8f64, 4, 3.0);
        assert!((b1 / b4 - 4.0).abs() < 1e-12);
        assert_eq!(pf1_analytic_bound(0.8f64, 1, 0.0), 0.0);
    }
}
