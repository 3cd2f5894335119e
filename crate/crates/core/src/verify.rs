//! Self-verification: every claimed bound is checked against dense
//! brute-force evolution on seeded random and structured inputs.
//!
//! The suite is deterministic (seeded generators, fixed case lists) and
//! shared between the command-line `verify` subcommand and the integration
//! tests. `corrupt_bounds` is a negative control: it scales every claimed
//! bound down by 1e6 before comparison, which must make the suite fail —
//! proving the checks can actually detect a violated bound.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anticommuting;
use crate::bounds::{self, BoundInputs, Scheme};
use crate::hamiltonian::Hamiltonian;
use crate::lcu;
use crate::oracle::{self, OracleConfig};
use crate::pauli::{Axis, DenseOperator, PauliString};
use crate::scalar::{r64, Real};
use crate::structure::{self, CancellationReport};
use crate::symbolic::SymbolicBudget;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub oracle: OracleConfig,
    pub budget: SymbolicBudget,
    /// Negative control: shrink all claimed bounds so checks must fail.
    pub corrupt_bounds: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 20_240_817,
            oracle: OracleConfig::default(),
            budget: SymbolicBudget::default(),
            corrupt_bounds: false,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                if c.passed {
                    format!("PASS {}", c.name)
                } else {
                    format!("FAIL {}: {}", c.name, c.details)
                }
            })
            .collect()
    }
}

fn check(name: impl Into<String>, passed: bool, details: String) -> CheckResult {
    CheckResult { name: name.into(), passed, details }
}

fn bound_scale<R: Real>(cfg: &VerifyConfig) -> R {
    if cfg.corrupt_bounds {
        r64(1e-6)
    } else {
        R::one()
    }
}

/// Random Hamiltonian with `l` distinct strings on `n_qubits` qubits, signed
/// coefficients scaled to `alpha_target`.
pub fn random_hamiltonian<R: Real>(
    rng: &mut ChaCha8Rng,
    n_qubits: usize,
    l: usize,
    alpha_target: f64,
) -> Hamiltonian<R> {
    let mut keys = std::collections::BTreeSet::new();
    let mut ops = Vec::new();
    let mut guard = 0;
    while ops.len() < l {
        guard += 1;
        assert!(guard < 10_000, "string sampling stuck");
        let mut factors = Vec::new();
        for q in 0..n_qubits {
            match rng.gen_range(0..4u8) {
                1 => factors.push((Axis::X, q)),
                2 => factors.push((Axis::Y, q)),
                3 => factors.push((Axis::Z, q)),
                _ => {}
            }
        }
        if factors.is_empty() {
            continue;
        }
        let p = PauliString::from_factors(n_qubits, &factors).unwrap();
        if keys.insert(p.key()) {
            ops.push(p);
        }
    }
    let mut coeffs: Vec<f64> = (0..l)
        .map(|_| rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 })
        .collect();
    let mass: f64 = coeffs.iter().map(|c| c.abs()).sum();
    for c in &mut coeffs {
        *c *= alpha_target / mass;
    }
    Hamiltonian::from_terms(
        format!("random-{n_qubits}q-{l}t"),
        n_qubits,
        coeffs.into_iter().map(r64).zip(ops),
    )
    .unwrap()
}

fn bound_cases<R: Real>(cfg: &VerifyConfig) -> Vec<Hamiltonian<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = vec![
        Hamiltonian::parse("1.0 X0\n1.0 Z0\n", "xz-pair").unwrap(),
        Hamiltonian::parse("0.7 Z0\n0.5 Z1\n0.3 Z0 Z1\n", "commuting-trio").unwrap(),
        anticommuting::generate_family(4).unwrap(),
    ];
    out.push(random_hamiltonian(&mut rng, 2, 4, 1.6));
    out.push(random_hamiltonian(&mut rng, 3, 6, 1.9));
    out
}

fn truncation_bound_suite<R: Real>(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let scale = bound_scale::<R>(cfg);
    let mut checks = Vec::new();
    for h in bound_cases::<R>(cfg) {
        let s = structure::analyze(&h);
        let report = CancellationReport::compute(&h, &s, 8, &cfg.budget);
        let inputs = BoundInputs::from_report(&report);
        let dense = match h.to_dense(cfg.oracle.n_max) {
            Ok(d) => d,
            Err(e) => {
                checks.push(check(
                    format!("dense:{}", h.label()),
                    false,
                    format!("cannot densify: {e}"),
                ));
                continue;
            }
        };
        let ln2 = r64::<R>(std::f64::consts::LN_2);
        for (ti, t) in [ln2 / s.alpha, r64::<R>(1.2) / s.alpha].into_iter().enumerate() {
            let exact = oracle::expm_minus_i_t(&dense, t);
            for k in [2usize, 3, 5] {
                let poly = oracle::truncated_taylor_dense(&dense, t, k);
                let err = oracle::spectral_norm(&(&exact - &poly), &cfg.oracle);
                for scheme in [Scheme::Original, Scheme::Refined2, Scheme::Refined3, Scheme::Refined4] {
                    let bound = bounds::scheme_delta(scheme, &inputs, t, k) * scale;
                    let ok = err <= bound * (R::one() + r64(1e-10)) + r64(1e-13);
                    checks.push(check(
                        format!("truncation:{}:{scheme}:t{ti}:k{k}", h.label()),
                        ok,
                        format!("oracle error {err:e} vs bound {bound:e}"),
                    ));
                }
                // the modified polynomial has its own bound
                if k >= 2 {
                    match lcu::build_modified(&h, t, k, 8, &cfg.budget) {
                        Ok(m) => {
                            let mut rebuilt =
                                DenseOperator::<R>::zeros(dense.nrows(), dense.ncols());
                            let mut build_err = None;
                            for term in &m.expansion.terms {
                                match term.unitary(cfg.oracle.n_max) {
                                    Ok(u) => rebuilt += u * Complex::new(term.coefficient, R::zero()),
                                    Err(e) => build_err = Some(e),
                                }
                            }
                            if let Some(e) = build_err {
                                checks.push(check(
                                    format!("modified:{}:t{ti}:k{k}", h.label()),
                                    false,
                                    format!("term densify failed: {e}"),
                                ));
                                continue;
                            }
                            let err_m = oracle::spectral_norm(&(&exact - &rebuilt), &cfg.oracle);
                            let bound = bounds::modified_delta(
                                t,
                                s.alpha,
                                s.alpha_comm,
                                s.q2,
                                m.e_epsilon,
                                report.alpha3_r,
                                k,
                            ) * scale;
                            let ok = err_m <= bound * (R::one() + r64(1e-10)) + r64(1e-13);
                            checks.push(check(
                                format!("modified:{}:t{ti}:k{k}", h.label()),
                                ok,
                                format!("oracle error {err_m:e} vs bound {bound:e}"),
                            ));
                        }
                        Err(e) => checks.push(check(
                            format!("modified:{}:t{ti}:k{k}", h.label()),
                            false,
                            format!("build failed: {e}"),
                        )),
                    }
                }
                // refinement hierarchy (uncorrupted: a structural identity)
                let orig = bounds::scheme_delta(Scheme::Original, &inputs, t, k);
                for scheme in [Scheme::Refined2, Scheme::Refined3, Scheme::Refined4] {
                    let refi = bounds::scheme_delta(scheme, &inputs, t, k);
                    checks.push(check(
                        format!("hierarchy:{}:{scheme}:t{ti}:k{k}", h.label()),
                        refi <= orig * (R::one() + r64(1e-12)),
                        format!("{scheme} {refi:e} exceeds original {orig:e}"),
                    ));
                }
            }
        }
        // aggregate partition identity
        let alpha_sq = s.alpha * s.alpha;
        let gap = (s.alpha_comm + s.alpha_anti - alpha_sq).abs();
        checks.push(check(
            format!("partition:{}", h.label()),
            gap <= r64::<R>(1e-12) * alpha_sq.max(R::one()),
            format!("alpha_comm + alpha_anti misses alpha^2 by {gap:e}"),
        ));
    }
    checks
}

fn plan_suite<R: Real>(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let scale = bound_scale::<R>(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
    let mut checks = Vec::new();
    let cases: Vec<Hamiltonian<R>> = vec![
        random_hamiltonian(&mut rng, 2, 4, 1.5),
        Hamiltonian::parse("0.9 X0\n0.7 Z0\n0.4 Y0\n", "single-qubit-trio").unwrap(),
    ];
    for h in cases {
        let eps = r64::<R>(1e-5);
        let plan = match lcu::assemble_plan(&h, Scheme::Refined2, R::one(), eps, 0, &cfg.budget) {
            Ok(p) => p,
            Err(e) => {
                checks.push(check(
                    format!("plan:{}", h.label()),
                    false,
                    format!("assembly failed: {e}"),
                ));
                continue;
            }
        };
        checks.push(check(
            format!("plan-budget:{}", h.label()),
            plan.epsilon_total <= eps,
            format!("epsilon_total {:e} vs requested {eps:e}", plan.epsilon_total),
        ));
        let dim = 1usize << h.n_qubits();
        let decomposition = plan.to_decomposition(cfg.oracle.n_max).unwrap();
        let target = plan.target_map(h.n_qubits()).to_dense(cfg.oracle.n_max).unwrap();
        let w = decomposition.w_matrix();
        let encoded = oracle::block(&w, dim) * Complex::new(decomposition.s(), R::zero());
        let enc_err = oracle::spectral_norm(&(&encoded - &target), &cfg.oracle);
        checks.push(check(
            format!("plan-encoding:{}", h.label()),
            enc_err <= r64(1e-10),
            format!("block mismatch {enc_err:e}"),
        ));
        let dense = h.to_dense(cfg.oracle.n_max).unwrap();
        let seg_u = oracle::expm_minus_i_t(&dense, plan.t_segment);
        let amp_block = oracle::block(&oracle::amplified(&w, dim), dim);
        let amp_err = oracle::spectral_norm(&(&amp_block - &seg_u), &cfg.oracle);
        let claimed = bounds::amplification_envelope(plan.delta_segment * scale);
        checks.push(check(
            format!("plan-amplified:{}", h.label()),
            amp_err <= claimed * (R::one() + r64(1e-10)) + r64(1e-12),
            format!("amplified error {amp_err:e} vs envelope {claimed:e}"),
        ));
    }
    checks
}

fn anticommuting_suite<R: Real>(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let scale = bound_scale::<R>(cfg);
    let mut checks = Vec::new();
    let h: Hamiltonian<R> = anticommuting::generate_family(4).unwrap();
    let dense = h.to_dense(cfg.oracle.n_max).unwrap();
    let dim = dense.nrows();
    let t = r64::<R>(0.9);

    let d = anticommuting::exact_coefficients(&h, t).unwrap();
    let mut rebuilt = DenseOperator::<R>::identity(dim, dim) * Complex::new(d.gamma0, R::zero());
    for (term, g) in h.terms().iter().zip(&d.gammas) {
        let u = term.operator.to_dense::<R>(cfg.oracle.n_max).unwrap();
        rebuilt += u * Complex::new(R::zero(), -*g);
    }
    let exact = oracle::expm_minus_i_t(&dense, t);
    let errd = oracle::spectral_norm(&(&exact - &rebuilt), &cfg.oracle);
    checks.push(check(
        "anticommuting-closed-form",
        errd <= r64(1e-12),
        format!("closed form deviates by {errd:e}"),
    ));

    let sched = anticommuting::schedule(&h, r64(2.3)).unwrap();
    let mut product = DenseOperator::<R>::identity(dim, dim);
    if sched.free_negates {
        product *= Complex::new(-R::one(), R::zero());
    }
    for seg in &sched.segments {
        product = oracle::expm_minus_i_t(&dense, seg.duration) * product;
    }
    let full = oracle::expm_minus_i_t(&dense, sched.t_total);
    let errs = oracle::spectral_norm(&(&full - &product), &cfg.oracle);
    checks.push(check(
        "anticommuting-schedule-composition",
        errs <= r64(1e-11),
        format!("segment composition deviates by {errs:e}"),
    ));
    checks.push(check(
        "anticommuting-schedule-norms",
        sched.segments.iter().all(|sg| sg.s_value <= r64::<R>(2.0) + r64(1e-9)),
        "a segment mixing norm exceeds 2".into(),
    ));

    // near-anticommuting: perturb the family with a commuting term
    let mut entries: Vec<(R, PauliString)> = h
        .terms()
        .iter()
        .map(|term| (term.signed(), term.operator.clone()))
        .collect();
    entries.push((
        r64(0.05),
        PauliString::from_factors(h.n_qubits(), &[(Axis::Z, 0), (Axis::X, 1)]).unwrap(),
    ));
    let hp = Hamiltonian::from_terms("near-anticommuting", h.n_qubits(), entries).unwrap();
    let prof = anticommuting::profile(&hp);
    if prof.pairwise {
        checks.push(check(
            "near-anticommuting-setup",
            false,
            "perturbation unexpectedly anticommutes".into(),
        ));
    } else {
        let dense_p = hp.to_dense(cfg.oracle.n_max).unwrap();
        let beta = hp.beta_s();
        let theta = t * beta;
        let mut closed =
            DenseOperator::<R>::identity(dim, dim) * Complex::new(theta.cos(), R::zero());
        closed += &dense_p * Complex::new(R::zero(), -theta.sin() / beta);
        let exact_p = oracle::expm_minus_i_t(&dense_p, t);
        let err = oracle::spectral_norm(&(&exact_p - &closed), &cfg.oracle);
        let bound =
            anticommuting::near_anticommuting_bound(t, prof.alpha, beta, prof.violation_mass)
                * scale;
        checks.push(check(
            "near-anticommuting-bound",
            err <= bound * (R::one() + r64(1e-10)) + r64(1e-13),
            format!("closed-form error {err:e} vs bound {bound:e}"),
        ));
    }
    checks
}

fn pf1_suite<R: Real>(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let scale = bound_scale::<R>(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51f1_5eed);
    let mut checks = Vec::new();
    let h: Hamiltonian<R> = random_hamiltonian(&mut rng, 2, 4, 1.5);
    let s = structure::analyze(&h);
    let dense = h.to_dense(cfg.oracle.n_max).unwrap();
    let t = r64::<R>(0.9);
    let exact = oracle::expm_minus_i_t(&dense, t);
    let mut points = Vec::new();
    for r in [1usize, 2, 4, 8, 16] {
        let prod = oracle::pf1_product(&h, t, r, &cfg.oracle).unwrap();
        let err = oracle::spectral_norm(&(&prod - &exact), &cfg.oracle);
        let bound = bounds::pf1_analytic_bound(t, r, s.alpha_anti) * scale;
        checks.push(check(
            format!("pf1-bound:r{r}"),
            err <= bound * (R::one() + r64(1e-10)) + r64(1e-13),
            format!("pf1 error {err:e} vs bound {bound:e}"),
        ));
        points.push((
            (r as f64).ln(),
            err.to_f64().unwrap_or(f64::NAN).max(1e-300).ln(),
        ));
    }
    let n = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum::<f64>()
        / points.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum::<f64>();
    checks.push(check(
        "pf1-slope",
        (slope + 1.0).abs() <= 0.1,
        format!("log-log slope {slope:.4} not within -1 +/- 0.1"),
    ));
    checks
}

pub fn run_verification<R: Real>(cfg: &VerifyConfig) -> VerifyReport {
    let mut checks = Vec::new();
    checks.extend(truncation_bound_suite::<R>(cfg));
    checks.extend(plan_suite::<R>(cfg));
    checks.extend(anticommuting_suite::<R>(cfg));
    checks.extend(pf1_suite::<R>(cfg));
    VerifyReport { checks }
}
