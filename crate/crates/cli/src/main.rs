//! Command-line front end: build parameter states, certify elements
//! against them, and inspect the certified prime ledger.

mod parse;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use rtau_core::{
    build_justprimes, build_main, build_sparse, check_s, r0_prime_oracle, sf_primes, Certainty,
    Error as CoreError, TauState,
};

#[derive(Parser)]
#[command(
    name = "rtau",
    version,
    about = "Discretely ordered subrings of Q[x]: builders and certifiers"
)]
struct Cli {
    /// Emit reports as JSON instead of line-oriented text
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state whose certified primes sit alone in their integer shift class
    BuildSparse {
        #[arg(long)]
        stages: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a state realizing prime progressions for the given difference tuples
    BuildMain {
        /// Semicolon-separated tuples, e.g. "2;6,12"
        #[arg(long)]
        diffs: String,
        #[arg(long)]
        stages: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a state with exact integer coordinates and no non-standard primes
    BuildJustprimes {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        quota: usize,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify membership, unit and primality of one element
    Certify {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        poly: String,
    },
    /// List the certified primes of a state
    Primes {
        #[arg(long)]
        tau: PathBuf,
        /// Only list realized progressions
        #[arg(long)]
        progressions_only: bool,
    },
    /// Test difference tuples for the residue-cover condition
    CheckS {
        #[arg(long)]
        diffs: String,
    },
    /// List the primes below a bound modulo which a polynomial has a root
    Sf {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 100)]
        limit: u64,
    },
    /// Closed-form primality in the all-zero-coordinate ring
    OracleR0 {
        #[arg(long)]
        poly: String,
    },
    /// Summarize a serialized state
    Show {
        #[arg(long)]
        tau: PathBuf,
    },
}

enum CliError {
    Parse(String),
    Core(CoreError),
    Io(String),
}

impl CliError {
    /// 2 parse, 3 precondition, 4 search cap, 5 ledger violation.
    fn category(&self) -> (&'static str, u8) {
        match self {
            CliError::Parse(_) => ("parse", 2),
            CliError::Io(_) => ("precondition", 3),
            CliError::Core(e) => match e {
                CoreError::ValuationUnresolvable { .. }
                | CoreError::QuotaUnmet { .. }
                | CoreError::ExhaustedPrimes
                | CoreError::NoResidue { .. }
                | CoreError::LefschetzSearchExhausted => ("search-cap", 4),
                CoreError::LedgerViolation(_) | CoreError::Internal(_) => ("ledger", 5),
                _ => ("precondition", 3),
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<parse::ParseError> for CliError {
    fn from(e: parse::ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

fn read_state(path: &PathBuf) -> Result<TauState, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(TauState::from_json(&text)?)
}

fn write_state(path: &PathBuf, tau: &TauState) -> Result<(), CliError> {
    fs::write(path, tau.to_json())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn built_report(machine: bool, path: &PathBuf, tau: &TauState) {
    if machine {
        println!(
            "{}",
            json!({
                "out": path.display().to_string(),
                "builder_kind": tau.builder_kind().as_str(),
                "stages": tau.stage(),
                "s_m": tau.s_m(),
                "components": tau.components().len(),
                "ledger": tau.ledger().len(),
            })
        );
    } else {
        println!(
            "wrote {} (kind={} stages={} s_m={} components={} ledger={})",
            path.display(),
            tau.builder_kind().as_str(),
            tau.stage(),
            tau.s_m(),
            tau.components().len(),
            tau.ledger().len()
        );
    }
}

fn certainty_json(c: Certainty) -> serde_json::Value {
    match c {
        Certainty::Unknown(p) => json!({"verdict": "Unknown", "needs": p}),
        other => json!({ "verdict": format!("{other}") }),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let machine = cli.machine;
    match cli.command {
        Command::BuildSparse { stages, seed, out } => {
            let tau = build_sparse(stages, seed)?;
            write_state(&out, &tau)?;
            built_report(machine, &out, &tau);
        }
        Command::BuildMain {
            diffs,
            stages,
            seed,
            out,
        } => {
            let diffs = parse::parse_diffs(&diffs)?;
            let tau = build_main(&diffs, stages, seed)?;
            write_state(&out, &tau)?;
            built_report(machine, &out, &tau);
        }
        Command::BuildJustprimes {
            count,
            quota,
            bound,
            out,
        } => {
            let tau = build_justprimes(count, quota, bound)?;
            write_state(&out, &tau)?;
            built_report(machine, &out, &tau);
        }
        Command::Certify { tau, poly } => {
            let mut state = read_state(&tau)?;
            let f = parse::parse_poly(&poly)?;
            let cert = state.certify(&f)?;
            if machine {
                println!(
                    "{}",
                    json!({
                        "element": f.to_string(),
                        "membership": certainty_json(cert.membership),
                        "unit": certainty_json(cert.unit),
                        "prime": certainty_json(cert.prime),
                        "evidence": cert.evidence.iter().map(|e| json!({
                            "p": e.p,
                            "valuation": e.valuation,
                            "required": e.required,
                        })).collect::<Vec<_>>(),
                        "promise": cert.promise.as_ref().map(|p| json!({
                            "ledger_index": p.ledger_index,
                            "poly": p.poly.to_string(),
                            "n": p.n.to_string(),
                        })),
                    })
                );
            } else {
                println!("element: {f}");
                println!("membership: {}", cert.membership);
                println!("unit: {}", cert.unit);
                println!("prime: {}", cert.prime);
                if !cert.evidence.is_empty() {
                    println!("evidence:");
                    for e in &cert.evidence {
                        println!(
                            "  p = {}: v(num) = {}, v(den) = {}",
                            e.p, e.valuation, e.required
                        );
                    }
                }
                match &cert.promise {
                    Some(p) => println!(
                        "promise: ledger[{}] covers {} with n = {}",
                        p.ledger_index, p.poly, p.n
                    ),
                    None => {
                        if matches!(cert.unit, Certainty::Unknown(_)) {
                            println!("promise: none (element untracked)");
                        }
                    }
                }
            }
        }
        Command::Primes {
            tau,
            progressions_only,
        } => {
            let state = read_state(&tau)?;
            let progressions = state.progressions();
            if machine {
                let plain: Vec<_> = state
                    .ledger()
                    .iter()
                    .filter(|e| e.progression.is_none())
                    .map(|e| {
                        json!({
                            "prime": e.normalized().to_string(),
                            "stage": e.stage,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "progressions": progressions.iter().map(|p| json!({
                            "diffs": p.diffs,
                            "degree": p.degree,
                            "members": p.members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                            "witness_primes": p.witness_primes,
                            "r": p.r,
                            "a": p.a.to_string(),
                            "k": p.k.to_string(),
                        })).collect::<Vec<_>>(),
                        "plain": if progressions_only { Vec::new() } else { plain },
                    })
                );
            } else {
                for p in &progressions {
                    let diffs: Vec<String> = p.diffs.iter().map(|d| d.to_string()).collect();
                    println!(
                        "progression (diffs {}; degree {}; witnesses {:?}):",
                        diffs.join(","),
                        p.degree,
                        p.witness_primes
                    );
                    for m in &p.members {
                        println!("  {m}");
                    }
                }
                if !progressions_only {
                    for e in state.ledger().iter().filter(|e| e.progression.is_none()) {
                        println!("{}  [stage {}]", e.normalized(), e.stage);
                    }
                }
            }
        }
        Command::CheckS { diffs } => {
            let diffs = parse::parse_diffs(&diffs)?;
            if machine {
                let rows: Vec<_> = diffs
                    .iter()
                    .map(|d| json!({"diffs": d.entries(), "in_s": check_s(d)}))
                    .collect();
                println!("{}", json!(rows));
            } else {
                for d in &diffs {
                    println!("{d} in S: {}", check_s(d));
                }
            }
        }
        Command::Sf { poly, limit } => {
            let f = parse::parse_poly(&poly)?;
            if !f.den().eq(&1u32.into()) {
                return Err(CoreError::Precondition(
                    "root-prime scans take integer polynomials".into(),
                )
                .into());
            }
            let primes = sf_primes(f.num(), limit)?;
            if machine {
                println!("{}", json!({"poly": f.to_string(), "limit": limit, "primes": primes}));
            } else {
                let list: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
                println!("primes p <= {limit} with a root of {f}: {}", list.join(", "));
            }
        }
        Command::OracleR0 { poly } => {
            let f = parse::parse_poly(&poly)?;
            let prime = r0_prime_oracle(&f)?;
            if machine {
                println!("{}", json!({"element": f.to_string(), "prime_in_r0": prime}));
            } else {
                println!("{f} prime in R_0: {prime}");
            }
        }
        Command::Show { tau } => {
            let state = read_state(&tau)?;
            if machine {
                print!("{}", state.to_json());
            } else {
                println!("builder_kind: {}", state.builder_kind().as_str());
                println!("seed: {}", state.seed());
                println!("stage: {}", state.stage());
                println!("s_m: {}", state.s_m());
                println!("components: {}", state.components().len());
                println!("ledger entries: {}", state.ledger().len());
                let progressions = state.progressions();
                println!("progressions: {}", progressions.len());
                if state.builder_kind().as_str() != "exact"
                    && state.builder_kind().as_str() != "justprimes"
                {
                    match state.pid_report() {
                        Ok(report) => {
                            println!("support report: {} entries, no violations", report.entries.len())
                        }
                        Err(e) => println!("support report: VIOLATION: {e}"),
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let machine = cli.machine;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (category, code) = e.category();
            if machine {
                eprintln!("{}", json!({"error": category, "message": e.message()}));
            } else {
                eprintln!("error[{category}]: {}", e.message());
            }
            ExitCode::from(code)
        }
    }
}
