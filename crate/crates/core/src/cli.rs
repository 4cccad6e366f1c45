//! Command-line front end. Every subcommand is a thin adapter over the
//! library.
//!
//! Exit codes: 0 success, 1 domain-negative result (certificate rejected,
//! word not primitive, coset budget exceeded, search budget exhausted),
//! 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::abelianization::invariant_factors;
use crate::census::{run_pipeline, sweep, StageConfig, DEFAULT_COSET_BUDGET};
use crate::gasearch::{evolve, GaConfig, SearchMode, SearchStatus, SweepSettings};
use crate::presentation::{Certificate, CertificateError, Presentation};
use crate::report::write_report;
use crate::toddcoxeter::{enumerate_cosets, Outcome};
use crate::whitehead::is_primitive;
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the default search seed when `--seed` is absent.
pub const SEED_ENV: &str = "AC_SEED";

#[derive(Debug, Parser)]
#[command(name = "ac-census", version, about = "Andrews-Curtis census of balanced two-generator presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Trivialize,
    Equiv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the census pipeline and write records and a report to --out.
    Census {
        #[arg(long, default_value_t = 12)]
        max_total: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Last stage to run (1-5).
        #[arg(long, default_value_t = 5)]
        stage: usize,
        #[arg(long, default_value_t = DEFAULT_COSET_BUDGET)]
        max_cosets: usize,
        /// Enumerate cyclically reduced relators only.
        #[arg(long)]
        cyclically_reduced: bool,
        /// Count each unordered pair of relators once.
        #[arg(long)]
        unordered: bool,
        /// Afterwards, search the trivial list (stage 6).
        #[arg(long)]
        sweep: bool,
        /// Longest presentation the sweep attempts.
        #[arg(long, default_value_t = 10)]
        sweep_max_total: usize,
        /// Per-presentation search budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, default_value_t = 20_000)]
        generations: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Skip the equivalence searches after failed trivializations.
        #[arg(long)]
        no_equivalence: bool,
    },
    /// Order of the presented group by coset enumeration.
    Order {
        presentation: String,
        #[arg(long, default_value_t = DEFAULT_COSET_BUDGET)]
        max_cosets: usize,
    },
    /// Decide whether a rank-2 word is primitive.
    Primitive { word: String },
    /// Invariant factors of the abelianization.
    Abel { presentation: String },
    /// Genetic search for a trivialization or an equivalence.
    Search {
        presentation: String,
        #[arg(long, value_enum, default_value_t = Mode::Trivialize)]
        mode: Mode,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 30.0)]
        budget: f64,
        /// Generation cap; results are reproducible when this binds.
        #[arg(long)]
        generations: Option<u64>,
        #[arg(long, default_value_t = 1)]
        islands: usize,
        /// Where to write the certificate on success.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Replay a certificate file.
    Verify { cert: PathBuf },
    /// Regenerate report.txt and report.json from a census directory.
    Report { dir: PathBuf },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn default_seed(seed: Option<u64>) -> Result<u64, String> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got {v:?}")),
        Err(_) => Ok(0),
    }
}

fn parse_presentation(text: &str) -> Result<Presentation, String> {
    Presentation::parse(text).map_err(|e| format!("bad presentation {text:?}: {e}"))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Census {
            max_total,
            out: dir,
            shards,
            stage,
            max_cosets,
            cyclically_reduced,
            unordered,
            sweep: do_sweep,
            sweep_max_total,
            budget,
            generations,
            seed,
            no_equivalence,
        } => {
            let cfg = StageConfig {
                max_total_length: max_total,
                relators_cyclically_reduced: cyclically_reduced,
                ordered_pairs: !unordered,
                coset_budget: max_cosets,
                shard_count: shards,
                last_stage: stage,
                output_path: Some(dir.clone()),
                ..StageConfig::default()
            };
            cfg.validate().map_err(|e| e.to_string())?;
            if do_sweep && stage < 5 {
                return Err("--sweep needs --stage 5".into());
            }
            if !(budget > 0.0 && budget.is_finite()) {
                return Err("--budget must be positive".into());
            }
            let seed = default_seed(seed)?;
            let mut report = run_pipeline(&cfg).map_err(|e| e.to_string())?;
            if do_sweep {
                let settings = SweepSettings {
                    max_total_length: sweep_max_total,
                    budget_secs: budget,
                    max_generations: generations,
                    rng_seed: seed,
                    try_equivalence: !no_equivalence,
                };
                report = sweep(&dir, &settings).map_err(|e| e.to_string())?;
            }
            write!(out, "{}", report.to_text()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Order {
            presentation,
            max_cosets,
        } => {
            let p = parse_presentation(&presentation)?;
            if max_cosets == 0 {
                return Err("--max-cosets must be positive".into());
            }
            match enumerate_cosets(&p, max_cosets).outcome {
                Outcome::Finite(n) => {
                    writeln!(out, "{n}").map_err(io)?;
                    Ok(EXIT_OK)
                }
                Outcome::Exceeded(n) => {
                    writeln!(out, "exceeded ({n} cosets)").map_err(io)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Primitive { word } => {
            let w: Word = Word::parse(&word, 2).map_err(|e| format!("bad word {word:?}: {e}"))?;
            if is_primitive(&w) {
                writeln!(out, "primitive").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "not primitive").map_err(io)?;
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Abel { presentation } => {
            let p = parse_presentation(&presentation)?;
            let factors: Vec<String> = invariant_factors(&p).iter().map(i64::to_string).collect();
            writeln!(out, "({})", factors.join(",")).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Search {
            presentation,
            mode,
            target,
            seed,
            budget,
            generations,
            islands,
            cert,
        } => {
            let p = parse_presentation(&presentation)?;
            let mode = match (mode, target) {
                (Mode::Trivialize, None) => SearchMode::Trivialize,
                (Mode::Trivialize, Some(_)) => return Err("--target only applies to --mode equiv".into()),
                (Mode::Equiv, Some(t)) => SearchMode::Equivalence(parse_presentation(&t)?),
                (Mode::Equiv, None) => return Err("--mode equiv needs --target".into()),
            };
            if !(budget > 0.0 && budget.is_finite()) {
                return Err("--budget must be positive".into());
            }
            let cfg = GaConfig {
                rng_seed: default_seed(seed)?,
                wall_clock_budget: Duration::from_secs_f64(budget),
                max_generations: generations.unwrap_or(u64::MAX),
                islands,
                ..GaConfig::default()
            };
            let outcome = evolve(&p, &mode, &cfg).map_err(|e| e.to_string())?;
            match outcome.status {
                SearchStatus::Success(c) => {
                    writeln!(
                        out,
                        "success: {} moves after {} generations",
                        c.moves.len(),
                        outcome.generations_used
                    )
                    .map_err(io)?;
                    match cert {
                        Some(path) => c.write(&path).map_err(|e| format!("{}: {e}", path.display()))?,
                        None => write!(out, "{}", c.to_text()).map_err(io)?,
                    }
                    Ok(EXIT_OK)
                }
                SearchStatus::BudgetExhausted => {
                    writeln!(
                        out,
                        "budget exhausted after {} generations; best fitness {}",
                        outcome.generations_used,
                        outcome
                            .best_fitness_trace
                            .iter()
                            .min()
                            .map_or("n/a".to_string(), |f| f.to_string())
                    )
                    .map_err(io)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Verify { cert } => {
            let c = Certificate::read(&cert).map_err(|e| format!("{}: {e}", cert.display()))?;
            match c.verify() {
                Ok(true) => {
                    writeln!(out, "valid: {} moves from {} to {}", c.moves.len(), c.base, c.target).map_err(io)?;
                    Ok(EXIT_OK)
                }
                Ok(false) => {
                    let end = c.base.apply_moves(&c.moves).map_err(|e| e.to_string())?;
                    writeln!(out, "invalid: moves end at {end}, not {}", c.target).map_err(io)?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e @ CertificateError::InvalidMove { .. }) => {
                    writeln!(out, "invalid: {e}").map_err(io)?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Report { dir } => {
            let report = write_report(&dir).map_err(|e| e.to_string())?;
            write!(out, "{}", report.to_text()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ac-census").chain(args.iter().copied());
        let code = run_command(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn order_and_abel() {
        assert_eq!(run(&["order", "yxyXX xyxYYYY"]), (0, "120\n".into(), String::new()));
        assert_eq!(run(&["abel", "xxYYY xyxYXY"]).1, "(1,1)\n");
        assert_eq!(run(&["order", "xyXY 1", "--max-cosets", "100"]).0, EXIT_NEGATIVE);
    }

    #[test]
    fn primitive_exit_codes() {
        assert_eq!(run(&["primitive", "xxy"]).0, EXIT_OK);
        assert_eq!(run(&["primitive", "xyXY"]).0, EXIT_NEGATIVE);
        assert_eq!(run(&["primitive", "xq"]).0, EXIT_USAGE);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&[]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["search", "xy y", "--mode", "equiv"]).0, EXIT_USAGE);
        assert_eq!(run(&["order", "x"]).0, EXIT_OK);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn search_and_verify_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cert = dir.path().join("c.cert");
        let cert_arg = cert.to_str().unwrap();
        let (code, out, _) = run(&["search", "xy y", "--seed", "4", "--cert", cert_arg]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(run(&["verify", cert_arg]).0, EXIT_OK);
        let text = std::fs::read_to_string(&cert).unwrap();
        std::fs::write(&cert, text.replace("target: x y", "target: x Y")).unwrap();
        assert_eq!(run(&["verify", cert_arg]).0, EXIT_NEGATIVE);
        std::fs::write(&cert, "base: xy y\ntarget: x y\nmul 1 7\n").unwrap();
        let (code, out, _) = run(&["verify", cert_arg]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert!(out.contains("move 1 is malformed"), "{out}");
        assert_eq!(run(&["verify", dir.path().join("missing").to_str().unwrap()]).0, EXIT_USAGE);
    }

    #[test]
    fn report_on_empty_dir_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run(&["report", dir.path().to_str().unwrap()]).0, EXIT_USAGE);
    }
}
