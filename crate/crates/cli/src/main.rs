//! `circulattice`: command-line front end for the search harness and the
//! individual building blocks.
//!
//! Every option can also come from a flat `key=value` file given with
//! `--config`; keys are option names without the leading dashes. Values on
//! the command line win.
//!
//! Exit codes: 0 on success, 2 when a budget ran out (partial output is still
//! written when there is any), 1 for a failing lemma suite and every other
//! error.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use circulattice::counting::{ball_count_report, moment_bound};
use circulattice::dcode::DoubleCirculantCode;
use circulattice::harness::{self, Mode, SearchConfig, Status};
use circulattice::lattice::{construction_a, density};
use circulattice::strategy::{census_strategies, min_norm_strategies, prime_selectors};
use circulattice::{Error, Params, DEFAULT_BUDGET};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "circulattice", version, about = "Double circulant codes and the lattices they give")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on exhaustive enumerations.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value file supplying defaults for any option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search double circulant codes exhaustively or at random.
    Search {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        /// How to choose p when it is not given.
        #[arg(long)]
        prime_method: Option<String>,
        /// exhaustive or random.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
        /// Target squared radius.
        #[arg(long)]
        w2: Option<u64>,
        /// Minimum-norm algorithm.
        #[arg(long)]
        strategy: Option<String>,
        /// Per-code cap on words visited.
        #[arg(long)]
        word_budget: Option<u64>,
        /// Visit every first row instead of one per orbit.
        #[arg(long)]
        no_reduce: bool,
        #[arg(long)]
        progress_every: Option<u64>,
        /// Also write the d^2 histogram as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Choose p with p mod q a primitive root.
    SelectPrime {
        #[arg(long)]
        q: Option<usize>,
        /// direct or linnik.
        #[arg(long)]
        method: Option<String>,
    },
    /// Minimum norm of one double circulant code.
    MinNorm {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        /// First row, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Lattice points of the centered ball in F_p^n.
    CountBall {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d2: Option<u64>,
    },
    /// First-moment bound at one radius.
    MomentBound {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        w2: Option<u64>,
    },
    /// Construction A basis and density for one code.
    BuildLattice {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        /// Include the Hermite normal form.
        #[arg(long)]
        hnf: bool,
        /// Include the Gram matrix.
        #[arg(long)]
        gram: bool,
    },
    /// Orbit lengths of the vectors in a ball.
    OrbitCensus {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        w2: Option<u64>,
        /// sweep or ball; chosen from the budget when absent.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Run the lemma suite.
    VerifyLemmas {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
    },
}

#[derive(Debug)]
enum Failure {
    Budget(String),
    Invariant(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

/// Option values merged from the command line and the config file.
struct Settings {
    file: HashMap<String, String>,
}

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self, Failure> {
        let mut file = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Other(format!("reading {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Failure::Other(format!("{}:{}: expected key=value", path.display(), lineno + 1))
                })?;
                file.insert(k.trim().replace('_', "-"), v.trim().to_string());
            }
        }
        Ok(Settings { file })
    }

    fn get<T: FromStr>(&self, key: &str, cli: Option<T>) -> Result<Option<T>, Failure> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Failure::Other(format!("config value {key}={raw} does not parse"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str, cli: Option<T>) -> Result<T, Failure> {
        self.get(key, cli)?
            .ok_or_else(|| Failure::Other(format!("--{key} is required")))
    }

    fn flag(&self, key: &str, cli: bool) -> Result<bool, Failure> {
        Ok(cli || self.get::<bool>(key, None)?.unwrap_or(false))
    }
}

fn parse_row(raw: &str) -> Result<Vec<i64>, Failure> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Failure::Other(format!("bad entry {t:?} in first row")))
        })
        .collect()
}

/// A JSON report plus whether it is partial.
struct Output {
    value: Value,
    partial: bool,
    failed: bool,
}

impl Output {
    fn done(value: Value) -> Self {
        Output {
            value,
            partial: false,
            failed: false,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let s = Settings::load(cli.global.config.as_ref())?;
    let budget = s.get("budget", cli.global.budget)?.unwrap_or(DEFAULT_BUDGET);
    let seed = s.get("seed", cli.global.seed)?.unwrap_or(0);
    let workers = s.get("workers", cli.global.workers)?.unwrap_or(0);

    match cli.command {
        Command::Search {
            q,
            p,
            prime_method,
            mode,
            samples,
            w2,
            strategy,
            word_budget,
            no_reduce,
            progress_every,
            csv,
        } => {
            let mut config = SearchConfig::new(s.require("q", q)?);
            config.p = s.get("p", p)?;
            if let Some(m) = s.get("prime-method", prime_method)? {
                config.prime_method = m;
            }
            if let Some(m) = s.get::<String>("mode", mode)? {
                config.mode = m.parse::<Mode>()?;
            }
            if let Some(n) = s.get("samples", samples)? {
                config.samples = n;
            }
            config.w_sq = s.get("w2", w2)?;
            if let Some(name) = s.get("strategy", strategy)? {
                config.strategy = name;
            }
            config.seed = seed;
            config.budget = budget;
            config.word_budget = s.get("word-budget", word_budget)?.unwrap_or(budget);
            config.workers = workers;
            config.reduce_codes = !s.flag("no-reduce", no_reduce)?;
            config.progress_every = s.get("progress-every", progress_every)?.unwrap_or(0);
            let result = harness::search(&config)?;
            if let Some(path) = s.get("csv", csv)? {
                fs::write(&path, result.histogram_csv())
                    .map_err(|e| Failure::Other(format!("writing {}: {e}", path.display())))?;
            }
            info!(
                "best d^2 = {} at a = {:?} over {} codes",
                result.best_d_sq, result.best_a, result.codes_total
            );
            Ok(Output {
                value: to_value(&result),
                partial: result.partial,
                failed: false,
            })
        }
        Command::SelectPrime { q, method } => {
            let q = s.require("q", q)?;
            let method = s.get("method", method)?.unwrap_or_else(|| "direct".into());
            let selection = prime_selectors().get(&method)?.select(q)?;
            selection.verify()?;
            Ok(Output::done(to_value(&selection)))
        }
        Command::MinNorm { q, p, a, strategy } => {
            let params = Params::new(s.require("q", q)?, s.require("p", p)?)?;
            let a = parse_row(&s.require::<String>("a", a)?)?;
            let name = s.get("strategy", strategy)?.unwrap_or_else(|| "full".into());
            let code = DoubleCirculantCode::new(params, &a)?;
            let m = min_norm_strategies().get(&name)?.min_norm(&code, budget)?;
            Ok(Output::done(json!({
                "q": params.q(),
                "p": params.p(),
                "a": code.first_row(),
                "strategy": name,
                "d2": m.d_sq,
                "witness": m.witness.coords(),
                "words_visited": m.words_visited,
            })))
        }
        Command::CountBall { n, p, d2 } => {
            let report = ball_count_report(s.require("n", n)?, s.require("p", p)?, s.require("d2", d2)?)?;
            Ok(Output::done(to_value(&report)))
        }
        Command::MomentBound { q, p, w2 } => {
            let params = Params::new(s.require("q", q)?, s.require("p", p)?)?;
            let bound = moment_bound(params, s.require("w2", w2)?)?;
            Ok(Output::done(to_value(&bound)))
        }
        Command::BuildLattice { q, p, a, hnf, gram } => {
            let params = Params::new(s.require("q", q)?, s.require("p", p)?)?;
            let a = parse_row(&s.require::<String>("a", a)?)?;
            let code = DoubleCirculantCode::new(params, &a)?;
            let d_sq = code.min_norm_sq(budget)?.d_sq;
            let lattice = construction_a(&code, d_sq)?;
            let report = density(&lattice);
            let mut value = json!({
                "q": params.q(),
                "p": params.p(),
                "a": code.first_row(),
                "basis": lattice.basis,
                "det": lattice.det_abs.to_string(),
                "mu": lattice.mu,
                "d2": d_sq,
                "delta": report.delta,
                "log2_delta": report.log2_delta,
                "delta_lb": report.delta_lb,
                "ratio_minkowski": report.ratio_minkowski,
                "ratio_cn": report.ratio_cn,
            });
            if s.flag("hnf", hnf)? {
                value["hnf"] = to_value(&lattice.hermite_normal_form());
            }
            if s.flag("gram", gram)? {
                value["gram"] = to_value(&lattice.gram());
            }
            Ok(Output::done(value))
        }
        Command::OrbitCensus { q, p, w2, strategy } => {
            let params = Params::new(s.require("q", q)?, s.require("p", p)?)?;
            let w_sq = s.get("w2", w2)?.unwrap_or(params.max_norm_sq());
            let census = match s.get::<String>("strategy", strategy)? {
                Some(name) => census_strategies().get(&name)?.census(params, w_sq, budget)?,
                None => circulattice::group::orbit_census(params, w_sq, budget)?,
            };
            Ok(Output::done(to_value(&census)))
        }
        Command::VerifyLemmas { q, p } => {
            let params = Params::new(s.require("q", q)?, s.require("p", p)?)?;
            let report = harness::verify_lemmas(params, budget);
            Ok(Output {
                value: to_value(&report),
                partial: report.status == Status::Skipped,
                failed: report.status == Status::Fail,
            })
        }
    }
}

fn emit(value: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Other(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.global.out.clone();
    let result = run(cli).and_then(|o| {
        emit(&o.value, out.as_ref())?;
        Ok(o)
    });
    match result {
        Ok(o) if o.failed => {
            eprintln!("error: lemma suite failed");
            ExitCode::from(1)
        }
        Ok(o) if o.partial => {
            eprintln!("warning: budget exhausted, output is partial");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(m)) | Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
