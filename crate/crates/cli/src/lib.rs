//! Command dispatch for the `robust-risk` binary.
//!
//! Every command loads a scenario file, runs one analysis and emits a report
//! (JSON by default). Exit codes: 0 success, 1 a checked property failed,
//! 2 bad input, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use robust_risk::axioms::{claim1_witness, hull_contains, run_axiom_battery, AxiomStatus};
use robust_risk::market::{check_arbitrage, superreplication_price, valuation_bound, ArbitrageVerdict};
use robust_risk::portfolio::{equivalence_report, prudence_check, solve_program1, VALUE_TOL};
use robust_risk::risk::{acceptance_cone, maxmin_utility, rho_crm};
use robust_risk::scenario::ScenarioFile;
use robust_risk::shortfall::{shortfall_risk, LossFunction, DEFAULT_BISECTION_TOL};
use robust_risk::{ErrorClass, Payoff, ProbabilityVector};

mod report;

pub use report::{Check, Report, Summary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DUALITY_TOL: f64 = 1e-6;
const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "robust-risk", version, about = "Maxmin utility, coherent risk and super-replication on finite state spaces")]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Run the command on every `*.json` scenario in a directory.
    #[arg(long, global = true, conflicts_with = "scenario")]
    pub scenario_dir: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Numerical tolerance (bisection width, representation checks).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Arbitrage test with a state-price certificate or a witness portfolio.
    CheckArbitrage,
    /// Super-replication price and valuation bound of a target payoff.
    Price {
        #[arg(long)]
        target: PathBuf,
    },
    /// Maxmin utility and coherent risk of a position.
    Risk {
        #[arg(long)]
        position: PathBuf,
    },
    /// Shortfall risk of a position (needs an `sr` section).
    Sr {
        #[arg(long)]
        position: PathBuf,
    },
    /// Maxmin portfolio selection under the super-replication budget.
    Optimize,
    /// Constant-position optimality under the full simplex.
    Prudence,
    /// Utility form against risk form of the portfolio problem.
    Equivalence,
    /// Randomized axiom battery for the scenario's maxmin preference.
    Axioms {
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Defaults to the scenario's seed, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Position the expected-value preference under `pihat` accepts but the
    /// scenario's acceptance set rejects.
    Claim1 {
        /// Comma-separated probability vector.
        #[arg(long)]
        pihat: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckArbitrage => "check-arbitrage",
            Command::Price { .. } => "price",
            Command::Risk { .. } => "risk",
            Command::Sr { .. } => "sr",
            Command::Optimize => "optimize",
            Command::Prudence => "prudence",
            Command::Equivalence => "equivalence",
            Command::Axioms { .. } => "axioms",
            Command::Claim1 { .. } => "claim1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<robust_risk::Error> for Failure {
    fn from(e: robust_risk::Error) -> Self {
        match e.class() {
            ErrorClass::Input => Failure::Input(e.to_string()),
            ErrorClass::Numerical => Failure::Numerical(e.to_string()),
        }
    }
}

/// What the binary prints and returns.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(f: &Failure) -> Self {
        Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Outcome::fail(&Failure::Input(format!("invalid --tol: {tol} is not a positive finite number")));
        }
    }

    let (code, rendered) = match (&cli.scenario, &cli.scenario_dir) {
        (Some(path), _) => match execute(&cli, path, &echo) {
            Ok(report) => (report.exit_code(), report.render(cli.format)),
            Err(f) => return Outcome::fail(&f),
        },
        (None, Some(dir)) => match run_batch(&cli, dir, &echo) {
            Ok(r) => r,
            Err(f) => return Outcome::fail(&f),
        },
        (None, None) => {
            return Outcome::fail(&Failure::Input(
                "missing --scenario (or --scenario-dir)".into(),
            ))
        }
    };

    match &cli.out {
        Some(out) => match fs::write(out, &rendered) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome::fail(&Failure::Input(format!("cannot write --out {}: {e}", out.display()))),
        },
        None => Outcome {
            code,
            stdout: rendered,
            stderr: String::new(),
        },
    }
}

fn run_batch(cli: &Cli, dir: &Path, echo: &[String]) -> Result<(i32, String), Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::Input(format!("cannot read --scenario-dir {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();

    let results: Vec<Result<Report, Failure>> = files.par_iter().map(|f| execute(cli, f, echo)).collect();

    let mut code = EXIT_OK;
    let mut entries = Vec::new();
    let mut text = String::new();
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(report) => {
                code = code.max(report.exit_code());
                if cli.format == Format::Text {
                    text.push_str(&report.render(Format::Text));
                    text.push('\n');
                }
                entries.push(serde_json::to_value(&report).expect("report serializes"));
            }
            Err(f) => {
                code = code.max(f.code());
                if cli.format == Format::Text {
                    text.push_str(&format!("{}: error: {}\n\n", path.display(), f.message()));
                }
                entries.push(json!({
                    "scenario": path.display().to_string(),
                    "error": f.message(),
                    "exit_code": f.code(),
                }));
            }
        }
    }
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&entries).expect("reports serialize") + "\n",
        Format::Text => text,
    };
    Ok((code, rendered))
}

fn read_scenario(path: &Path) -> Result<ScenarioFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read scenario {}: {e}", path.display())))?;
    ScenarioFile::parse(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_payoff(flag: &str, path: &Path, states: usize) -> Result<Payoff, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {flag} {}: {e}", path.display())))?;
    let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
        Failure::Input(format!("{flag} {}: expected a JSON array of numbers: {e}", path.display()))
    })?;
    if values.len() != states {
        return Err(Failure::Input(format!(
            "{flag} {}: dimension mismatch, expected {states} states, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(Payoff::new(values)?)
}

fn parse_vector(flag: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("{flag}[{i}]: cannot parse {:?} as a number", s.trim())))
        })
        .collect()
}

fn combined_digest(scenario: &str, aux: &Payoff) -> String {
    let mut h = Sha256::new();
    h.update(scenario.as_bytes());
    h.update(serde_json::to_vec(aux).expect("payoff serializes"));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

/// Runs the command on one scenario file.
pub fn execute(cli: &Cli, path: &Path, echo: &[String]) -> Result<Report, Failure> {
    let file = read_scenario(path)?;
    let tol = cli.tol.or(file.tol);
    let mut digest = file.digest();
    let ambiguity = file.ambiguity_set()?;
    let n = file.states;
    let mut checks = Vec::new();

    let results = match &cli.command {
        Command::CheckArbitrage => {
            let verdict = check_arbitrage(&file.market()?)?;
            if let ArbitrageVerdict::NoArbitrage(cert) = &verdict {
                checks.push(Check::new("certificate", cert.certifies_no_arbitrage()));
            }
            value(&verdict)
        }
        Command::Price { target } => {
            let market = file.market()?;
            let target = read_payoff("--target", target, n)?;
            digest = combined_digest(&digest, &target);
            let sup = superreplication_price(&market, &target)?;
            let bound = valuation_bound(&market, &target)?;
            let gap = (sup.price - bound).abs();
            checks.push(Check::new("duality", gap <= DUALITY_TOL * sup.price.abs().max(1.0)));
            json!({
                "target": target,
                "superreplication_price": sup.price,
                "portfolio": sup.portfolio,
                "valuation_bound": bound,
            })
        }
        Command::Risk { position } => {
            let x = read_payoff("--position", position, n)?;
            digest = combined_digest(&digest, &x);
            let report = maxmin_utility(&ambiguity, &x)?;
            let rho = rho_crm(&acceptance_cone(&ambiguity), &x)?;
            let tol = tol.unwrap_or(VALUE_TOL);
            checks.push(Check::new("representation", (rho - report.value).abs() <= tol));
            json!({
                "position": x,
                "utility": report.utility,
                "risk": report.value,
                "rho_crm": rho,
                "argmin_vertex": report.argmin_vertex,
                "acceptable": report.acceptable,
            })
        }
        Command::Sr { position } => {
            let spec = file
                .sr_spec()?
                .ok_or_else(|| Failure::Input("sr: the scenario has no `sr` section".into()))?;
            let x = read_payoff("--position", position, n)?;
            digest = combined_digest(&digest, &x);
            let sr = shortfall_risk(&spec, &x, tol.unwrap_or(DEFAULT_BISECTION_TOL))?;
            let rho = rho_crm(&acceptance_cone(&ambiguity), &x)?;
            if spec.loss == LossFunction::Identity && spec.threshold == 0.0 {
                checks.push(Check::new("matches_rho", (sr - rho).abs() <= DUALITY_TOL));
            }
            let mut r = json!({
                "position": x,
                "shortfall_risk": sr,
                "rho_crm": rho,
                "loss": spec.loss,
                "lambda": spec.threshold,
                "strictly_increasing_loss": spec.loss.is_strictly_increasing(),
            });
            if !spec.loss.is_strictly_increasing() {
                r["note"] = json!("loss is only non-decreasing; the reported value is the left endpoint of the acceptance interval");
            }
            r
        }
        Command::Optimize => {
            let r = solve_program1(&file.scenario()?)?;
            checks.push(Check::new("autarky_bound", r.utility >= r.autarky_utility - VALUE_TOL));
            value(&r)
        }
        Command::Prudence => {
            let r = prudence_check(&file.scenario()?)?;
            checks.push(Check::new("constant_feasible", r.constant_feasible));
            checks.push(Check::new("constant_optimal", r.constant_optimal));
            value(&r)
        }
        Command::Equivalence => {
            let r = equivalence_report(&file.scenario()?)?;
            checks.push(Check::new("negation", r.passed));
            value(&r)
        }
        Command::Axioms { trials, seed } => {
            if *trials == 0 {
                return Err(Failure::Input("--trials must be at least 1".into()));
            }
            let seed = seed.or(file.seed).unwrap_or(0);
            let r = run_axiom_battery(&ambiguity, n, *trials, seed)?;
            for o in &r.outcomes {
                checks.push(Check::new(o.axiom.label(), o.status != AxiomStatus::Fail));
            }
            value(&r)
        }
        Command::Claim1 { pihat } => {
            let pi = ProbabilityVector::new(parse_vector("--pihat", pihat)?)
                .map_err(|e| Failure::Input(format!("--pihat: {e}")))?;
            if pi.len() != n {
                return Err(Failure::Input(format!(
                    "--pihat: dimension mismatch, expected {n} states, found {}",
                    pi.len()
                )));
            }
            if hull_contains(&ambiguity, &pi)? {
                checks.push(Check::new("pi_hat_outside_hull", false));
                json!({ "pi_hat": pi, "in_hull": true, "witness": null })
            } else {
                let w = claim1_witness(&ambiguity, &pi)?;
                checks.push(Check::new("pi_hat_outside_hull", true));
                checks.push(Check::new(
                    "witness_verified",
                    w.pi_hat_expectation >= 0.0 && w.worst_expectation <= -1.0,
                ));
                json!({ "pi_hat": pi, "in_hull": false, "witness": w })
            }
        }
    };

    Ok(Report::new(
        cli.command.name(),
        echo.to_vec(),
        path.display().to_string(),
        digest,
        results,
        checks,
    ))
}
