use std::fmt::Write as _;
use std::path::Path;

use mqwitness::decompose::{self, Scheme};
use mqwitness::io::{self, PsmqFile, StateFile, WitnessFile};
use mqwitness::smq;
use mqwitness::states::{self, Bipartition, LocalOperatorChain, NamedState, PureState};
use mqwitness::symmetric::{self, PsmqVerdict};
use mqwitness::witness::{self, BuildOptions, Witness};
use mqwitness::{oracle, transform, Error};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{NamedWitness, SchemeArg, EXIT_NOT_DETECTED, EXIT_SEPARABLE, EXIT_USAGE};

/// Rendered result of a command: JSON for `--json`, plain lines otherwise.
pub struct Outcome {
    pub json: String,
    pub text: String,
}

impl Outcome {
    fn new<T: Serialize>(report: &T, text: String) -> Result<Self, CliError> {
        let json = io::to_json_string(report).map_err(CliError::Library)?;
        Ok(Self { json, text: text.trim_end().to_string() })
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Separable input; carries the factorization report.
    Separable(Value),
    NotDetected(Value),
    Library(Error),
    Failed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(msg) | Self::Failed(msg) => f.write_str(msg),
            Self::Separable(_) => f.write_str("input state is not genuinely entangled"),
            Self::NotDetected(report) => write!(f, "witness does not detect the state (Tr[W rho] = {})", report["trace_on_target"]),
            Self::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Separable(sep) => Self::Separable(json!({ "genuinely_entangled": false, "separation": sep })),
            Error::NotGenuinelyEntangled => Self::Separable(json!({ "genuinely_entangled": false })),
            Error::NotDetected(t) => Self::NotDetected(json!({ "detected": false, "trace_on_target": t })),
            Error::Parameter(_) | Error::BOutOfRange { .. } | Error::Dimension { .. } => Self::Usage(e.to_string()),
            other => Self::Library(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Separable(_) => EXIT_SEPARABLE,
            Self::NotDetected(_) => EXIT_NOT_DETECTED,
            Self::Library(_) | Self::Failed(_) => 1,
        }
    }

    /// Refusals still print their report.
    pub fn into_outcome(self) -> Option<Outcome> {
        match self {
            Self::Separable(report) | Self::NotDetected(report) => {
                let text = report.to_string();
                Outcome::new(&report, text).ok()
            }
            _ => None,
        }
    }
}

pub fn parse_b(raw: &str) -> Result<Option<f64>, CliError> {
    if raw == "auto" {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(b) if b > 0.0 && b.is_finite() => Ok(Some(b)),
        _ => Err(CliError::Usage(format!("--b expects `auto` or a positive number, got {raw:?}"))),
    }
}

fn check_cap(cfg: &RunConfig, n: usize) -> Result<(), CliError> {
    if n > cfg.n_cap {
        return Err(CliError::Library(Error::Resource(n, cfg.n_cap)));
    }
    Ok(())
}

fn named_n(named: &NamedState) -> usize {
    match named {
        NamedState::Ghz { n } | NamedState::W { n } | NamedState::Dicke { n, .. } => *n,
        NamedState::Cluster4 | NamedState::Psi4 => 4,
        NamedState::TwoQubitTheta { .. } => 2,
        NamedState::PseudoW { coeffs } => coeffs.len(),
    }
}

/// Reads a state file, enforcing `n_cap` before any `2^N` allocation.
fn load_state(cfg: &RunConfig, path: &Path) -> Result<PureState, CliError> {
    let file: StateFile = io::read_json(path)?;
    let n = match &file {
        StateFile::Amplitudes { n, .. } => *n,
        StateFile::Named(named) => named_n(named),
    };
    check_cap(cfg, n)?;
    Ok(file.to_state()?.normalized()?)
}

fn load_witness(cfg: &RunConfig, path: &Path) -> Result<Witness, CliError> {
    let file: WitnessFile = io::read_json(path)?;
    check_cap(cfg, file.n)?;
    Ok(file.to_witness()?)
}

pub fn classify(cfg: &RunConfig, path: &Path) -> Result<Outcome, CliError> {
    let state = load_state(cfg, path)?;
    let n = state.n_qubits();
    let mut ranks = Vec::new();
    for cut in Bipartition::all_canonical(n) {
        let rank = states::schmidt_rank(&state, &cut, cfg.tol_rank)?;
        ranks.push(json!({ "subset": cut.subset(), "rank": rank }));
    }
    let genuinely_entangled = n >= 2 && ranks.iter().all(|r| r["rank"].as_u64() >= Some(2));
    let smq = match smq::classify_smq(&state, cfg.eps_zero) {
        Ok(coeffs) => json!({ "accepted": true, "coefficients": coeffs }),
        Err(rejection) => json!({ "accepted": false, "rejection": rejection }),
    };

    let mut text = format!("qubits: {n}\ngenuinely entangled: {genuinely_entangled}\n");
    match smq::classify_smq(&state, cfg.eps_zero) {
        Ok(_) => text.push_str("smq form: accepted\n"),
        Err(r) => writeln!(text, "smq form: rejected ({r})").unwrap(),
    }
    for r in &ranks {
        writeln!(text, "  cut {} | rank {}", r["subset"], r["rank"]).unwrap();
    }
    let report = json!({
        "n": n,
        "genuinely_entangled": genuinely_entangled,
        "smq": smq,
        "bipartition_ranks": ranks,
    });
    Outcome::new(&report, text)
}

fn write_witness(w: &Witness, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(out) = out {
        io::write_json(out, &WitnessFile::from_witness(w))?;
    }
    Ok(())
}

pub fn build_from_state(cfg: &RunConfig, path: &Path, b: Option<f64>, out: Option<&Path>) -> Result<Outcome, CliError> {
    let state = load_state(cfg, path)?;
    let options = BuildOptions { b, eps_zero: cfg.eps_zero, seed: cfg.sub_seed("build.transform"), ..Default::default() };
    let built = match witness::build_witness_for_state(&state, &options) {
        Ok(built) => built,
        Err(Error::Inconclusive(tries)) => {
            return Err(CliError::Failed(format!(
                "no local operators to SMQ form found after {tries} tries; this is not a separability verdict"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    if built.expectation >= 0.0 {
        return Err(CliError::NotDetected(json!({ "detected": false, "trace_on_target": built.expectation })));
    }
    write_witness(&built.witness, out)?;

    let b_upper = built.report.b_upper;
    let text = format!(
        "route: {}\nb: {}\nb_upper: {}\nexpectation on target: {}\n",
        serde_json::to_value(&built.route).unwrap()["route"].as_str().unwrap_or("?"),
        built.b,
        if b_upper.is_finite() { b_upper.to_string() } else { "inf".into() },
        built.expectation,
    );
    let report = json!({
        "n": state.n_qubits(),
        "route": built.route,
        "b": built.b,
        "inequality": built.report,
        "smq_coefficients": built.coefficients,
        "chain": built.chain,
        "expectation": built.expectation,
        "provenance": built.witness.provenance(),
    });
    Outcome::new(&report, text)
}

pub fn build_named(
    cfg: &RunConfig,
    named: NamedWitness,
    n: Option<usize>,
    b: Option<f64>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let need_n = || n.ok_or_else(|| CliError::Usage("this witness needs --n".into()));
    let (w, target, b_used) = match named {
        NamedWitness::Dicke24 => {
            if n.is_some_and(|n| n != 4) || b.is_some() {
                return Err(CliError::Usage("dicke24 is fixed at 4 qubits and takes no b".into()));
            }
            (witness::dicke24_witness()?, states::dicke(2, 4)?, None)
        }
        NamedWitness::WN => {
            if b.is_some() {
                return Err(CliError::Usage("w_n takes no b".into()));
            }
            let n = need_n()?;
            check_cap(cfg, n)?;
            (witness::w_n_witness(n)?, states::make_named(&NamedState::W { n })?, None)
        }
        NamedWitness::WPrime => {
            let n = need_n()?;
            check_cap(cfg, n)?;
            let b = b.unwrap_or_else(|| smq::pseudo_w_default_b(n));
            (witness::w_prime_witness(n, b)?, states::make_named(&NamedState::W { n })?, Some(b))
        }
    };
    let expectation = w.expectation(&target)?;
    write_witness(&w, out)?;
    let mut text = format!("witness: {:?}\nqubits: {}\n", w.provenance(), w.n_qubits());
    if let Some(b) = b_used {
        writeln!(text, "b: {b}").unwrap();
    }
    writeln!(text, "expectation on target: {expectation}").unwrap();
    let report = json!({
        "n": w.n_qubits(),
        "provenance": w.provenance(),
        "b": b_used,
        "expectation": expectation,
    });
    Outcome::new(&report, text)
}

pub fn decompose(cfg: &RunConfig, path: &Path, scheme: SchemeArg, out: Option<&Path>) -> Result<Outcome, CliError> {
    let w = load_witness(cfg, path)?;
    let scheme = match scheme {
        SchemeArg::Universal => Scheme::Universal,
        SchemeArg::W3opt => Scheme::W3opt,
        SchemeArg::W4improved => Scheme::W4improved,
    };
    let dec = decompose::decompose_witness(&w, scheme)?;
    let residual = dec.residual(&w)?;
    if residual > cfg.tol_reconstruct {
        return Err(CliError::Failed(format!(
            "reconstruction residual {residual:e} exceeds tol_reconstruct {:e}",
            cfg.tol_reconstruct
        )));
    }
    if let Some(out) = out {
        io::write_json(out, &dec)?;
    }
    let text = format!(
        "scheme: {scheme:?}\nsettings: {}\nresidual: {residual:e}\northonormal bases: {}\n",
        dec.count(),
        dec.is_realizable()
    );
    let report = json!({
        "scheme": scheme,
        "count": dec.count(),
        "residual": residual,
        "realizable": dec.is_realizable(),
    });
    Outcome::new(&report, text)
}

pub fn tolerance(cfg: &RunConfig, witness_path: &Path, state_path: &Path, optimize_b: bool) -> Result<Outcome, CliError> {
    let w = load_witness(cfg, witness_path)?;
    let state = load_state(cfg, state_path)?;
    if state.n_qubits() != w.n_qubits() {
        return Err(CliError::Usage(format!(
            "state has {} qubits, witness has {}",
            state.n_qubits(),
            w.n_qubits()
        )));
    }
    let (b_star, report) = if optimize_b {
        let chain = w.params().chain.clone().unwrap_or_else(|| LocalOperatorChain::identity(w.n_qubits()));
        let (chain, coeffs) = witness::prepare_smq(&state, &chain, cfg.eps_zero).map_err(|e| match e {
            Error::NotSmq(msg) => CliError::Failed(format!("the witness chain does not take this state to SMQ form: {msg}")),
            other => other.into(),
        })?;
        let (b, r) = witness::optimize_b_tolerance(&coeffs, &state, &chain)?;
        (Some(b), r)
    } else {
        (None, witness::white_noise_tolerance(&w, &state.density())?)
    };
    let mut text = format!("p_max: {}\n", report.p_max);
    if let Some(b) = b_star {
        writeln!(text, "b*: {b}").unwrap();
    }
    writeln!(text, "Tr[W rho]: {}", report.trace_on_target).unwrap();
    let report = json!({
        "detected": true,
        "p_max": report.p_max,
        "trace_on_target": report.trace_on_target,
        "trace_of_witness": report.trace_of_witness,
        "b_star": b_star,
    });
    Outcome::new(&report, text)
}

pub fn symmetric(cfg: &RunConfig, path: &Path) -> Result<Outcome, CliError> {
    let file: PsmqFile = io::read_json(path)?;
    check_cap(cfg, file.n)?;
    let coeffs = file.to_coefficients()?;
    let verdict = symmetric::psmq_classify(&coeffs, symmetric::DEFAULT_FIT_TOL);
    let ratio = match &verdict {
        PsmqVerdict::FullySeparable { a, b } if a.norm() > 0.0 => Some(b / a),
        _ => None,
    };
    let mut text = match &verdict {
        PsmqVerdict::FullyEntangled => "verdict: fully entangled\n".to_string(),
        PsmqVerdict::FullySeparable { a, b } => format!("verdict: fully separable\na: {a}\nb: {b}\n"),
    };
    if let Some(r) = ratio {
        writeln!(text, "b/a: {r}").unwrap();
    }
    let report = json!({
        "n": coeffs.n_qubits(),
        "classification": verdict,
        "ratio": ratio.map(|r| [r.re, r.im]),
    });
    Outcome::new(&report, text)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    value: f64,
}

pub fn selftest(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let injective = transform::exponent_injectivity_selftest(5, 3, 12);
    checks.push(Check { name: "powers_of_five_injective", pass: injective, value: f64::from(u8::from(injective)) });

    let w3 = states::make_named(&NamedState::W { n: 3 })?;
    let c = states::max_schmidt_coefficient_sq(&w3)?;
    checks.push(Check { name: "w3_schmidt_bound", pass: (c - 2.0 / 3.0).abs() <= 1e-12, value: c });

    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let dec = decompose::universal_w_decomposition(n)?;
        worst = worst.max(dec.residual(&witness::w_n_witness(n)?)?);
    }
    checks.push(Check { name: "universal_reconstruction", pass: worst <= cfg.tol_reconstruct, value: worst });

    let tol = witness::white_noise_tolerance(&witness::dicke24_witness()?, &states::dicke(2, 4)?.density())?;
    checks.push(Check { name: "dicke24_tolerance", pass: (tol.p_max - 2.0 / 9.0).abs() <= 1e-9, value: tol.p_max });

    let ghz = states::make_named(&NamedState::Ghz { n: 3 })?;
    let options = BuildOptions { eps_zero: cfg.eps_zero, seed: cfg.sub_seed("selftest.transform"), ..Default::default() };
    let built = witness::build_witness_for_state(&ghz, &options)?;
    checks.push(Check { name: "ghz3_detected", pass: built.expectation < -1e-10, value: built.expectation });
    let min = oracle::min_over_product_states(&built.witness, cfg.restarts, cfg.sub_seed("selftest.oracle")).minimum;
    checks.push(Check { name: "ghz3_product_minimum", pass: min >= -1e-7, value: min });

    let passed = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        writeln!(text, "{} {} ({:e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value).unwrap();
    }
    let report = json!({ "passed": passed, "checks": checks });
    let outcome = Outcome::new(&report, text)?;
    if passed {
        Ok(outcome)
    } else {
        Err(CliError::Failed(format!("selftest failed\n{}", outcome.text)))
    }
}
