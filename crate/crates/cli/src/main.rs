//! Command-line surface over the analysis library.
//!
//! Subcommands: `analyze` (structure and cancellation CSV), `ratios`
//! (bound-ratio tables across truncation orders, with gnuplot-ready data
//! files), `mink` (smallest truncation order per scheme for each accuracy
//! target), `schedule` (anticommuting profile and segment plan as JSON),
//! `verify` (dense-oracle suites), `generate-family`, and `jw` (fermionic
//! integrals to a Pauli term list).
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 work
//! budget exceeded. Identical inputs and flags produce byte-identical
//! output; every float is printed in shortest round-trip scientific form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use anticomm::anticommuting::{self, AnticommutingProfile, AnticommutingSchedule, ExactDecomposition};
use anticomm::bounds::{self, BoundInputs, Scheme, MAX_TRUNCATION_ORDER};
use anticomm::hamiltonian::Hamiltonian;
use anticomm::jordan_wigner::{self, FermionIntegrals};
use anticomm::lcu;
use anticomm::oracle::OracleConfig;
use anticomm::structure::{self, CancellationReport};
use anticomm::symbolic::SymbolicBudget;
use anticomm::verify::{run_verification, VerifyConfig};
use anticomm::Error;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(
    name = "anticomm",
    version,
    about = "Commutation structure, cancellation-aware truncation bounds, and mixing plans for Pauli-sum Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structure and cancellation parameters, one CSV row per input
    Analyze(AnalyzeArgs),
    /// Bound-ratio table swept over truncation orders
    Ratios(RatiosArgs),
    /// Smallest truncation order per scheme for each accuracy target
    Mink(MinkArgs),
    /// Anticommuting profile, exact mixing coefficients, and segment plan
    Schedule(ScheduleArgs),
    /// Dense-oracle verification suites
    Verify(VerifyArgs),
    /// Emit a pairwise anticommuting family as a term list
    GenerateFamily(GenerateFamilyArgs),
    /// Map fermionic integrals to a Pauli term list
    Jw(JwArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Term-list (.txt) or fermionic-integrals (.json) files
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Output directory; print to stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TMode {
    /// One segment of duration ln 2 / alpha
    Tau,
    /// Evolution time equal to the qubit count
    N,
    /// Evolution time from --t
    Explicit,
}

#[derive(Args)]
struct TimeArgs {
    /// How the evolution time is chosen per Hamiltonian
    #[arg(long, value_enum, default_value_t = TMode::Tau)]
    t_mode: TMode,
    /// Evolution time for --t-mode explicit
    #[arg(long)]
    t: Option<f64>,
}

/// Extra-unitary budget: a count, or `max` for the cost-parity value
/// `2^w - L - 1` that fills the select register.
#[derive(Clone, Copy, Debug)]
enum ExtraBudget {
    Max,
    Count(usize),
}

fn parse_extra_budget(s: &str) -> Result<ExtraBudget, String> {
    if s == "max" {
        return Ok(ExtraBudget::Max);
    }
    s.parse::<usize>()
        .map(ExtraBudget::Count)
        .map_err(|_| format!("expected 'max' or a count, got '{s}'"))
}

// Whole-grid flags use newtype wrappers so clap applies the parser to the
// single flag value instead of treating Vec fields as repeated occurrences.
#[derive(Clone, Debug)]
struct KGrid(Vec<usize>);

#[derive(Clone, Debug)]
struct EpsGrid(Vec<f64>);

#[derive(Clone, Debug)]
struct SchemeSet(Vec<Scheme>);

fn parse_k_grid(s: &str) -> Result<KGrid, String> {
    let values: Vec<usize> = if let Some((a, b)) = s.split_once(':') {
        let lo: usize = a.trim().parse().map_err(|_| format!("bad K '{a}'"))?;
        let hi: usize = b.trim().parse().map_err(|_| format!("bad K '{b}'"))?;
        if lo > hi {
            return Err(format!("empty K range {lo}:{hi}"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|tok| tok.trim().parse().map_err(|_| format!("bad K '{tok}'")))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err("K grid must be nonempty with K >= 1".into());
    }
    Ok(KGrid(values))
}

fn parse_eps_grid(s: &str) -> Result<EpsGrid, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|tok| tok.trim().parse().map_err(|_| format!("bad epsilon '{tok}'")))
        .collect::<Result<_, _>>()?;
    if values.is_empty() || values.iter().any(|&e| !e.is_finite() || e <= 0.0) {
        return Err("epsilon grid must be nonempty and positive".into());
    }
    Ok(EpsGrid(values))
}

fn parse_schemes(s: &str) -> Result<SchemeSet, String> {
    if s == "all" {
        return Ok(SchemeSet(Scheme::ALL.to_vec()));
    }
    s.split(',')
        .map(|tok| tok.trim().parse::<Scheme>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(SchemeSet)
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Extra-unitary budget entering e_epsilon: a count or 'max'
    #[arg(long, value_parser = parse_extra_budget, default_value = "max")]
    extra_unitaries: ExtraBudget,
}

#[derive(Args)]
struct RatiosArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    time: TimeArgs,
    /// Comma list of truncation orders, or an inclusive lo:hi range
    #[arg(long, value_parser = parse_k_grid, default_value = "1:25")]
    k_grid: KGrid,
    /// Comma list of schemes, or 'all'
    #[arg(long, value_parser = parse_schemes, default_value = "all")]
    scheme: SchemeSet,
    #[arg(long, value_parser = parse_extra_budget, default_value = "max")]
    extra_unitaries: ExtraBudget,
}

#[derive(Args)]
struct MinkArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    time: TimeArgs,
    /// Comma list of accuracy targets
    #[arg(
        long,
        value_parser = parse_eps_grid,
        default_value = "1e-6,1e-7,1e-8,1e-9,1e-10,1e-11,1e-12,1e-13,1e-14,1e-15,1e-16,1e-17,1e-18,1e-19,1e-20"
    )]
    eps_grid: EpsGrid,
    /// Comma list of schemes, or 'all'
    #[arg(long, value_parser = parse_schemes, default_value = "original,refined2,modified")]
    scheme: SchemeSet,
    #[arg(long, value_parser = parse_extra_budget, default_value = "max")]
    extra_unitaries: ExtraBudget,
}

#[derive(Args)]
struct ScheduleArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    time: TimeArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the randomized suites
    #[arg(long, default_value_t = 20_240_817)]
    seed: u64,
    /// Dense-oracle qubit cap
    #[arg(long, default_value_t = 12)]
    dense_cap: usize,
    /// Write the full report as JSON into this directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Negative control: shrink every claimed bound so checks must fail
    #[arg(long, hide = true)]
    corrupt_bounds: bool,
}

#[derive(Args)]
struct GenerateFamilyArgs {
    /// Number of pairwise anticommuting terms
    #[arg(long)]
    size: usize,
    /// Output directory; print to stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JwArgs {
    #[command(flatten)]
    io: IoArgs,
}

/// Failure channel carrying the process exit code.
enum Failure {
    Verification(usize),
    Input(String),
    Budget(String),
}

impl Failure {
    fn from_err(e: Error, ctx: &str) -> Failure {
        match e {
            Error::BudgetExceeded(_) | Error::NoFeasibleK(_) => {
                Failure::Budget(format!("{ctx}: {e}"))
            }
            _ => Failure::Input(format!("{ctx}: {e}")),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Verification(n) => format!("verification failed: {n} checks"),
            Failure::Input(m) | Failure::Budget(m) => m.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Ratios(a) => cmd_ratios(a),
        Cmd::Mink(a) => cmd_mink(a),
        Cmd::Schedule(a) => cmd_schedule(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::GenerateFamily(a) => cmd_generate_family(a),
        Cmd::Jw(a) => cmd_jw(a),
    }
}

fn load_input(path: &Path) -> Result<Hamiltonian<f64>, Failure> {
    let ctx = path.display().to_string();
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{ctx}: {e}")))?;
        let ints: FermionIntegrals = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("{ctx}: {e}")))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "integrals".into());
        jordan_wigner::jordan_wigner(&ints, label).map_err(|e| Failure::from_err(e, &ctx))
    } else {
        Hamiltonian::from_path(path).map_err(|e| Failure::from_err(e, &ctx))
    }
}

fn load_inputs(paths: &[PathBuf]) -> Result<Vec<Hamiltonian<f64>>, Failure> {
    paths.iter().map(|p| load_input(p)).collect()
}

/// Write `name` under the output directory, or print to stdout without one.
fn emit(out: &Option<PathBuf>, name: &str, content: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
            let path = dir.join(name);
            std::fs::write(&path, content)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_t(time: &TimeArgs, h: &Hamiltonian<f64>) -> Result<f64, Failure> {
    let t = match time.t_mode {
        TMode::Explicit => time
            .t
            .ok_or_else(|| Failure::Input("--t-mode explicit requires --t".into()))?,
        TMode::Tau => LN_2 / h.alpha(),
        TMode::N => h.n_qubits() as f64,
    };
    if !t.is_finite() || t <= 0.0 {
        return Err(Failure::Input(format!("evolution time must be positive, got {t}")));
    }
    Ok(t)
}

fn resolve_extra(mode: ExtraBudget, h: &Hamiltonian<f64>) -> usize {
    match mode {
        ExtraBudget::Count(n) => n,
        ExtraBudget::Max => {
            let w = lcu::gate_cost(h.len(), 0, 1, 1, h.max_weight()).select_width;
            (1usize << w).saturating_sub(h.len() + 1)
        }
    }
}

/// `r = ceil(alpha t / ln 2)` segments, each bounded at `tau = ln 2 / alpha`.
fn segmentation(alpha: f64, t: f64) -> (usize, f64) {
    let r = ((alpha * t / LN_2).ceil() as usize).max(1);
    (r, LN_2 / alpha)
}

const ANALYZE_HEADER: &str = "label,n_qubits,terms,max_weight,alpha,alpha_comm,alpha_anti,q2,q3,q4,alpha3,alpha3_method,alpha3_r,alpha4,alpha4_method,e_epsilon,extra_unitaries,eps_a,pairwise_anticommuting\n";

fn cmd_analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let hams = load_inputs(&a.io.input)?;
    let budget = SymbolicBudget::default();
    let mut csv = String::from(ANALYZE_HEADER);
    for h in &hams {
        let s = structure::analyze(h);
        let e = resolve_extra(a.extra_unitaries, h);
        let rep = CancellationReport::compute(h, &s, e, &budget);
        let prof = anticommuting::profile(h);
        writeln!(
            csv,
            "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e},{},{:e},{},{:e},{}",
            h.label(),
            h.n_qubits(),
            h.len(),
            h.max_weight(),
            rep.alpha,
            rep.alpha_comm,
            rep.alpha_anti,
            rep.q2,
            rep.q3,
            rep.q4,
            rep.alpha3,
            rep.alpha3_method,
            rep.alpha3_r,
            rep.alpha4,
            rep.alpha4_method,
            rep.e_epsilon,
            rep.extra_unitaries,
            prof.violation_mass,
            prof.pairwise,
        )
        .unwrap();
    }
    emit(&a.io.out, "analyze.csv", &csv)
}

const RATIOS_HEADER: &str = "molecule_label,scheme,K,t,r,delta,epsilon,ratio_vs_original\n";

fn cmd_ratios(a: RatiosArgs) -> Result<(), Failure> {
    let hams = load_inputs(&a.io.input)?;
    let budget = SymbolicBudget::default();
    let mut csv = String::from(RATIOS_HEADER);
    for h in &hams {
        let s = structure::analyze(h);
        let e = resolve_extra(a.extra_unitaries, h);
        let rep = CancellationReport::compute(h, &s, e, &budget);
        let inputs = BoundInputs::from_report(&rep);
        let t = resolve_t(&a.time, h)?;
        let (r, tau) = segmentation(s.alpha, t);
        for &scheme in &a.scheme.0 {
            let mut dat = String::new();
            for &k in &a.k_grid.0 {
                let delta = bounds::scheme_delta(scheme, &inputs, tau, k);
                let eps = r as f64 * bounds::amplification_envelope(delta);
                let delta_o = bounds::original_delta(tau, s.alpha, k);
                let eps_o = r as f64 * bounds::amplification_envelope(delta_o);
                // Both tails underflow to zero at very large K; call that even.
                let ratio = if eps == 0.0 && eps_o == 0.0 { 1.0 } else { eps_o / eps };
                writeln!(
                    csv,
                    "{},{scheme},{k},{:e},{r},{delta:e},{eps:e},{ratio:e}",
                    h.label(),
                    t
                )
                .unwrap();
                writeln!(dat, "{k} {ratio:e}").unwrap();
            }
            if a.io.out.is_some() {
                emit(&a.io.out, &format!("{}-{scheme}.dat", h.label()), &dat)?;
            }
        }
    }
    emit(&a.io.out, "ratios.csv", &csv)
}

fn cmd_mink(a: MinkArgs) -> Result<(), Failure> {
    let hams = load_inputs(&a.io.input)?;
    let budget = SymbolicBudget::default();
    let mut csv = String::from("label,t,r,eps");
    for scheme in &a.scheme.0 {
        write!(csv, ",k_{scheme}").unwrap();
    }
    csv.push('\n');
    for h in &hams {
        let s = structure::analyze(h);
        let e = resolve_extra(a.extra_unitaries, h);
        let rep = CancellationReport::compute(h, &s, e, &budget);
        let inputs = BoundInputs::from_report(&rep);
        let t = resolve_t(&a.time, h)?;
        let (r, tau) = segmentation(s.alpha, t);
        for &eps in &a.eps_grid.0 {
            let per_segment = eps / r as f64;
            write!(csv, "{},{t:e},{r},{eps:e}", h.label()).unwrap();
            for &scheme in &a.scheme.0 {
                let k = (1..=MAX_TRUNCATION_ORDER)
                    .find(|&k| bounds::scheme_delta(scheme, &inputs, tau, k) <= per_segment)
                    .ok_or_else(|| {
                        Failure::Budget(format!(
                            "{}: no K <= {MAX_TRUNCATION_ORDER} reaches {eps:e} under {scheme}",
                            h.label()
                        ))
                    })?;
                write!(csv, ",{k}").unwrap();
            }
            csv.push('\n');
        }
    }
    emit(&a.io.out, "mink.csv", &csv)
}

#[derive(serde::Serialize)]
struct ScheduleOut<'a> {
    label: &'a str,
    t: f64,
    profile: AnticommutingProfile<f64>,
    /// Closed-form mixing coefficients at `t`; pairwise case only.
    exact: Option<ExactDecomposition<f64>>,
    /// Segment plan; pairwise case only.
    schedule: Option<AnticommutingSchedule<f64>>,
}

fn cmd_schedule(a: ScheduleArgs) -> Result<(), Failure> {
    let hams = load_inputs(&a.io.input)?;
    for h in &hams {
        let t = resolve_t(&a.time, h)?;
        let prof = anticommuting::profile(h);
        let (exact, schedule) = if prof.pairwise {
            let d = anticommuting::exact_coefficients(h, t)
                .map_err(|e| Failure::from_err(e, h.label()))?;
            let sched = anticommuting::schedule(h, t)
                .map_err(|e| Failure::from_err(e, h.label()))?;
            (Some(d), Some(sched))
        } else {
            (None, None)
        };
        let out = ScheduleOut { label: h.label(), t, profile: prof, exact, schedule };
        let mut json = serde_json::to_string_pretty(&out)
            .map_err(|e| Failure::Input(format!("{}: {e}", h.label())))?;
        json.push('\n');
        emit(&a.io.out, &format!("{}-schedule.json", h.label()), &json)?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        seed: a.seed,
        oracle: OracleConfig { n_max: a.dense_cap, ..OracleConfig::default() },
        budget: SymbolicBudget::default(),
        corrupt_bounds: a.corrupt_bounds,
    };
    let report = run_verification::<f64>(&cfg);
    for line in report.summary_lines() {
        println!("{line}");
    }
    if a.out.is_some() {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure::Input(e.to_string()))?;
        emit(&a.out, "verify.json", &(json + "\n"))?;
    }
    let failures = report.failures();
    if failures > 0 {
        return Err(Failure::Verification(failures));
    }
    println!("all {} checks passed", report.checks.len());
    Ok(())
}

fn cmd_generate_family(a: GenerateFamilyArgs) -> Result<(), Failure> {
    let h: Hamiltonian<f64> =
        anticommuting::generate_family(a.size).map_err(|e| Failure::from_err(e, "family"))?;
    emit(&a.out, &format!("{}.txt", h.label()), &h.serialize_text())
}

fn cmd_jw(a: JwArgs) -> Result<(), Failure> {
    for path in &a.io.input {
        let h = load_input(path)?;
        emit(&a.io.out, &format!("{}.txt", h.label()), &h.serialize_text())?;
    }
    Ok(())
}
