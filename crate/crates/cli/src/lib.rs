//! Argument parsing and dispatch for the `mwlab` binary.
//!
//! [`parse_args`] turns argv into a validated [`RunConfig`]; [`run`] executes
//! it and returns the exit code together with the report text. Keeping both
//! pure lets the tests drive the CLI without spawning processes.

use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mwlab::dependence::{
    detect_dependence, recover_exponent, CertificateStatus, ConclusionOracle, Recovery,
    DEFAULT_SEARCH_BOUND,
};
use mwlab::experiment::{run_experiment, ExperimentConfig, Suite};
use mwlab::primesearch::{
    find_pattern_primes, pattern_density, replay_step1, replay_step2_lcm, ValuationPattern,
};
use mwlab::support::{scan_condition, verify_witness, Condition};
use mwlab::{Backend, ConditionReport, MordellWeil, PrimeRange, ScanOptions, Verdict, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "MWLAB_WORKERS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub message: String,
    /// `--help` or `--version`: print the message and exit successfully.
    pub informational: bool,
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        message: message.into(),
        informational: false,
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SupportCondition {
    /// Support unions of natural numbers (multiplicative backend only).
    Erdos,
    /// `∃i nPᵢ ≡ 0 ⇔ ∃j nQⱼ ≡ 0` for points of any backend.
    Cor22,
    /// `nP ≡ 0 ⇒ ∃i nQᵢ ≡ 0`; `--xs` holds the single point `P`.
    Thm2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    SupportCheck {
        condition: SupportCondition,
        xs: Vec<String>,
        ys: Vec<String>,
    },
    CsCheck {
        x: String,
        y: String,
    },
    FindPrimes {
        points: Vec<String>,
        l: u64,
        ks: Vec<u32>,
        max_hits: usize,
        density: bool,
    },
    Replay {
        p: String,
        qs: Vec<String>,
        l: u64,
    },
    ReplayLcm {
        orders: Vec<u64>,
        divisors: Vec<u64>,
    },
    Detect {
        points: Vec<String>,
        lambda: Vec<String>,
        bound: u32,
    },
    Recover {
        p: String,
        q: String,
    },
    Experiment {
        suite: Suite,
        trials: u32,
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SupportCheck { .. } => "support-check",
            Command::CsCheck { .. } => "cs-check",
            Command::FindPrimes { .. } => "find-primes",
            Command::Replay { .. } | Command::ReplayLcm { .. } => "replay",
            Command::Detect { .. } => "detect",
            Command::Recover { .. } => "recover",
            Command::Experiment { .. } => "experiment",
        }
    }
}

/// A validated invocation. Equal configs produce byte-identical reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub backend: Backend,
    pub scan: PrimeRange,
    pub format: Format,
    pub workers: usize,
    /// Re-verify this `(v, n)` witness instead of scanning.
    pub verify: Option<(u64, u64)>,
    /// Text output shows witnesses with `n` above the cap as `n>cap`.
    pub n_cap: Option<u64>,
}

#[derive(Parser, Debug)]
#[command(
    name = "mwlab",
    version,
    about = "Local-global checks for Q* and elliptic curves over Q"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// `mult`, `S={2,3}` or `ec:a1,a2,a3,a4,a6`.
    #[arg(long, default_value = "mult")]
    backend: String,
    /// Prime window `lo..hi`; defaults to 3..10000 (multiplicative) or 3..2000 (elliptic).
    #[arg(long)]
    primes: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; falls back to $MWLAB_WORKERS, then 1.
    #[arg(long)]
    workers: Option<usize>,
    /// Re-verify a witness `v:n` instead of scanning.
    #[arg(long, value_name = "V:N")]
    verify: Option<String>,
    #[arg(long)]
    n_cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a support condition on a prime window.
    SupportCheck {
        #[arg(long)]
        xs: String,
        #[arg(long)]
        ys: String,
        #[arg(long, value_enum)]
        condition: Option<SupportCondition>,
        #[command(flatten)]
        common: Common,
    },
    /// Check `xⁿ ≡ 1 ⇒ yⁿ ≡ 1` on a prime window.
    CsCheck {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        common: Common,
    },
    /// Find primes realizing an l-adic valuation pattern on orders.
    FindPrimes {
        #[arg(long)]
        points: String,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        ks: String,
        #[arg(long, default_value_t = 10)]
        max_hits: usize,
        /// Report the hit density over the window instead of the hits.
        #[arg(long)]
        density: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Replay the witness-prime construction, or the lcm step with --orders.
    Replay {
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        qs: Option<String>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long, conflicts_with_all = ["p", "qs", "l"])]
        orders: Option<String>,
        #[arg(long, requires = "orders")]
        divisors: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Detect dependence of points on a subgroup by reduction.
    Detect {
        #[arg(long)]
        points: String,
        #[arg(long)]
        lambda: String,
        /// Coefficient bound for the elliptic certificate search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        bound: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Recover d with Q = dP.
    Recover {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded randomized suite against its exact oracle.
    Experiment {
        #[arg(long, default_value = "erdos")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Splits on commas outside parentheses, so `(0,0),(1,0)` gives two items.
pub fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' | ';' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn numbers<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, UsageError> {
    split_list(s)
        .iter()
        .map(|x| {
            x.parse()
                .map_err(|_| usage(format!("--{flag}: cannot parse `{x}`")))
        })
        .collect()
}

fn check_points(backend: &Backend, flag: &str, items: &[String]) -> Result<(), UsageError> {
    if items.is_empty() || items.iter().any(|s| s.is_empty()) {
        return Err(usage(format!("--{flag}: expected a nonempty list")));
    }
    for s in items {
        let parsed = match backend {
            Backend::Multiplicative(g) => g.parse_point(s).map(|_| ()),
            Backend::Elliptic(e) => e.parse_point(s).map(|_| ()),
        };
        parsed.map_err(|e| usage(format!("--{flag}: {e}")))?;
    }
    Ok(())
}

fn workers_from_env() -> Result<Option<usize>, UsageError> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{WORKERS_ENV}: cannot parse `{s}`"))),
        Err(_) => Ok(None),
    }
}

/// Parses `argv` (without the program name) into a validated config.
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<RunConfig, UsageError> {
    let cli = Cli::try_parse_from(std::iter::once("mwlab").chain(argv.iter().map(|s| s.as_ref())))
        .map_err(|e| UsageError {
            message: e.render().to_string(),
            informational: matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp
                    | clap::error::ErrorKind::DisplayVersion
                    | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ),
        })?;
    let (command, common, experiment_scan) = match cli.command {
        Cmd::SupportCheck {
            xs,
            ys,
            condition,
            common,
        } => {
            let (xs, ys) = (split_list(&xs), split_list(&ys));
            (
                Command::SupportCheck {
                    condition: condition.unwrap_or(SupportCondition::Erdos),
                    xs,
                    ys,
                },
                common,
                None,
            )
        }
        Cmd::CsCheck { x, y, common } => (Command::CsCheck { x, y }, common, None),
        Cmd::FindPrimes {
            points,
            l,
            ks,
            max_hits,
            density,
            common,
        } => {
            let ks = numbers("ks", &ks)?;
            (
                Command::FindPrimes {
                    points: split_list(&points),
                    l,
                    ks,
                    max_hits,
                    density,
                },
                common,
                None,
            )
        }
        Cmd::Replay {
            p,
            qs,
            l,
            orders,
            divisors,
            common,
        } => match orders {
            Some(orders) => {
                let orders = numbers("orders", &orders)?;
                let divisors = match divisors {
                    Some(d) => numbers("divisors", &d)?,
                    None => vec![1; orders.len()],
                };
                (Command::ReplayLcm { orders, divisors }, common, None)
            }
            None => {
                let p = p.ok_or_else(|| usage("--p is required"))?;
                let qs = qs.ok_or_else(|| usage("--qs is required"))?;
                let l = l.ok_or_else(|| usage("--l is required"))?;
                (
                    Command::Replay {
                        p,
                        qs: split_list(&qs),
                        l,
                    },
                    common,
                    None,
                )
            }
        },
        Cmd::Detect {
            points,
            lambda,
            bound,
            common,
        } => (
            Command::Detect {
                points: split_list(&points),
                lambda: split_list(&lambda),
                bound,
            },
            common,
            None,
        ),
        Cmd::Recover { p, q, common } => (Command::Recover { p, q }, common, None),
        Cmd::Experiment {
            suite,
            trials,
            seed,
            common,
        } => {
            let suite: Suite = suite.parse().map_err(|e| usage(format!("--suite: {e}")))?;
            (
                Command::Experiment {
                    suite,
                    trials,
                    seed,
                },
                common,
                Some(suite.default_scan()),
            )
        }
    };
    let backend: Backend = common
        .backend
        .parse()
        .map_err(|e| usage(format!("--backend: {e}")))?;
    let scan = match &common.primes {
        Some(s) => s.parse().map_err(|e| usage(format!("--primes: {e}")))?,
        None => experiment_scan.unwrap_or_else(|| match backend {
            Backend::Multiplicative(_) => PrimeRange::new(3, 10_000).expect("valid"),
            Backend::Elliptic(_) => PrimeRange::new(3, 2000).expect("valid"),
        }),
    };
    let workers = match common.workers {
        Some(w) => w,
        None => workers_from_env()?.unwrap_or(1),
    };
    if workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let verify = match &common.verify {
        None => None,
        Some(s) => {
            let (v, n) = s
                .split_once(':')
                .and_then(|(v, n)| Some((v.trim().parse().ok()?, n.trim().parse().ok()?)))
                .ok_or_else(|| usage(format!("--verify: expected V:N, got `{s}`")))?;
            Some((v, n))
        }
    };
    match &command {
        Command::SupportCheck { condition, xs, ys } => {
            check_points(&backend, "xs", xs)?;
            check_points(&backend, "ys", ys)?;
            match condition {
                SupportCondition::Erdos => {
                    let Backend::Multiplicative(g) = &backend else {
                        return Err(usage("--condition erdos needs the multiplicative backend"));
                    };
                    for s in xs.iter().chain(ys) {
                        let x = g.parse_point(s).map_err(|e| usage(e.to_string()))?;
                        if !x.is_natural() || x.is_one() {
                            return Err(usage(format!(
                                "--condition erdos takes naturals >= 2, got `{s}`"
                            )));
                        }
                    }
                }
                SupportCondition::Thm2 if xs.len() != 1 => {
                    return Err(usage("--condition thm2 takes exactly one point in --xs"));
                }
                _ => {}
            }
        }
        Command::CsCheck { x, y } => check_points(&backend, "x", &[x.clone(), y.clone()])?,
        Command::FindPrimes { points, ks, .. } => {
            check_points(&backend, "points", points)?;
            if ks.len() != points.len() {
                return Err(usage("--ks must have one entry per point"));
            }
        }
        Command::Replay { p, qs, .. } => {
            check_points(&backend, "p", std::slice::from_ref(p))?;
            check_points(&backend, "qs", qs)?;
        }
        Command::Detect { points, lambda, .. } => {
            check_points(&backend, "points", points)?;
            check_points(&backend, "lambda", lambda)?;
        }
        Command::Recover { p, q } => check_points(&backend, "p", &[p.clone(), q.clone()])?,
        Command::ReplayLcm { .. } | Command::Experiment { .. } => {}
    }
    if verify.is_some()
        && !matches!(
            command,
            Command::SupportCheck { .. } | Command::CsCheck { .. } | Command::Detect { .. }
        )
    {
        return Err(usage(format!(
            "--verify is not supported by {}",
            command.name()
        )));
    }
    Ok(RunConfig {
        command,
        backend,
        scan,
        format: common.format,
        workers,
        verify,
        n_cap: common.n_cap,
    })
}

/// Exit code plus the report to print on stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub report: String,
}

impl RunOutput {
    fn internal(msg: impl fmt::Display) -> Self {
        RunOutput {
            exit_code: EXIT_INTERNAL,
            report: format!("error: {msg}"),
        }
    }
}

pub fn run(config: &RunConfig) -> RunOutput {
    let result = match &config.backend {
        Backend::Multiplicative(g) => dispatch(g, config),
        Backend::Elliptic(e) => dispatch(e, config),
    };
    result.unwrap_or_else(RunOutput::internal)
}

fn parse_all<G: MordellWeil>(group: &G, items: &[String]) -> mwlab::Result<Vec<G::Point>> {
    items.iter().map(|s| group.parse_point(s)).collect()
}

fn dispatch<G: ConclusionOracle>(group: &G, cfg: &RunConfig) -> mwlab::Result<RunOutput> {
    let opts = ScanOptions::with_workers(cfg.workers);
    match &cfg.command {
        Command::SupportCheck { condition, xs, ys } => {
            let (xs, ys) = (parse_all(group, xs)?, parse_all(group, ys)?);
            let cond = match condition {
                SupportCondition::Erdos => Condition::ErdosUnion { xs, ys },
                SupportCondition::Cor22 => Condition::Cor22 { ps: xs, qs: ys },
                SupportCondition::Thm2 => Condition::Thm2 {
                    p: xs[0].clone(),
                    qs: ys,
                },
            };
            condition_output(group, &cond, cfg, &opts)
        }
        Command::CsCheck { x, y } => {
            let cond = Condition::CorralesSchoof {
                x: group.parse_point(x)?,
                y: group.parse_point(y)?,
            };
            condition_output(group, &cond, cfg, &opts)
        }
        Command::FindPrimes {
            points,
            l,
            ks,
            max_hits,
            density,
        } => {
            let points = parse_all(group, points)?;
            let pattern = ValuationPattern::new(*l, ks.clone())?;
            if *density {
                let d = pattern_density(group, &points, &pattern, cfg.scan, &opts)?;
                let report = match cfg.format {
                    Format::Json => serde_json::to_string_pretty(&d).expect("serializes"),
                    Format::Csv => format!(
                        "hits,scanned_good_primes,ratio,inconclusive\n{},{},{},{}",
                        d.hits, d.scanned_good_primes, d.ratio, d.inconclusive
                    ),
                    Format::Text => format!(
                        "{} hits among {} good primes in {} (ratio {:.6}){}",
                        d.hits,
                        d.scanned_good_primes,
                        cfg.scan,
                        d.ratio,
                        if d.inconclusive { ", inconclusive" } else { "" }
                    ),
                };
                let exit_code = if d.inconclusive {
                    EXIT_INCONCLUSIVE
                } else {
                    EXIT_OK
                };
                return Ok(RunOutput { exit_code, report });
            }
            let hits = find_pattern_primes(group, &points, &pattern, cfg.scan, *max_hits, &opts)?;
            let report =
                match cfg.format {
                    Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                        "pattern": pattern,
                        "scanned": cfg.scan,
                        "hits": hits,
                    }))
                    .expect("serializes"),
                    Format::Csv => std::iter::once("v,orders,verified".to_string())
                        .chain(hits.iter().map(|h| {
                            format!("{},\"{}\",{}", h.v, join(&h.orders, ";"), h.verified)
                        }))
                        .collect::<Vec<_>>()
                        .join("\n"),
                    Format::Text => {
                        if hits.is_empty() {
                            format!("no prime in {} realizes the pattern", cfg.scan)
                        } else {
                            hits.iter()
                                .map(|h| {
                                    format!(
                                        "v={} orders=({}) verified={}",
                                        h.v,
                                        join(&h.orders, ", "),
                                        h.verified
                                    )
                                })
                                .collect::<Vec<_>>()
                                .join("\n")
                        }
                    }
                };
            let exit_code = if hits.is_empty() {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(RunOutput { exit_code, report })
        }
        Command::Replay { p, qs, l } => {
            let p = group.parse_point(p)?;
            let qs = parse_all(group, qs)?;
            let w = replay_step1(group, &p, &qs, *l, cfg.scan, &opts)?;
            let report = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "scanned": cfg.scan,
                    "witness": w,
                }))
                .expect("serializes"),
                Format::Csv => match &w {
                    Some(w) => format!(
                        "v,n,order_p,orders_q\n{},{},{},\"{}\"",
                        w.v,
                        w.n,
                        w.order_p,
                        join(&w.orders_q, ";")
                    ),
                    None => "v,n,order_p,orders_q".into(),
                },
                Format::Text => match &w {
                    Some(w) => format!(
                        "witness v={} n={}: ord_v P = {}, ord_v Q = ({})",
                        w.v,
                        w.n,
                        w.order_p,
                        join(&w.orders_q, ", ")
                    ),
                    None => format!("no witness prime in {}", cfg.scan),
                },
            };
            let exit_code = if w.is_some() {
                EXIT_VIOLATED
            } else {
                EXIT_INCONCLUSIVE
            };
            Ok(RunOutput { exit_code, report })
        }
        Command::ReplayLcm { orders, divisors } => {
            let n = replay_step2_lcm(orders, divisors)?;
            let report = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "orders": orders,
                    "divisors": divisors,
                    "n": n,
                }))
                .expect("serializes"),
                Format::Csv => format!("n\n{n}"),
                Format::Text => format!("n = {n}"),
            };
            Ok(RunOutput {
                exit_code: EXIT_OK,
                report,
            })
        }
        Command::Detect {
            points,
            lambda,
            bound,
        } => {
            let (ps, gens) = (parse_all(group, points)?, parse_all(group, lambda)?);
            if cfg.verify.is_some() {
                let cond = Condition::Detect { ps, lambda: gens };
                return condition_output(group, &cond, cfg, &opts);
            }
            let det = detect_dependence(group, &ps, &gens, cfg.scan, &opts, *bound)?;
            let report = match cfg.format {
                Format::Json => det.to_json(),
                Format::Csv => format!(
                    "{},certificate_status\n{},{}",
                    ConditionReport::CSV_HEADER,
                    det.report.to_csv_row(),
                    status_str(det.certificate_status)
                ),
                Format::Text => {
                    let mut s = condition_text(&det.report, cfg.n_cap);
                    s.push_str(&format!(
                        "\n  certificate: {}",
                        status_str(det.certificate_status)
                    ));
                    if let Some(c) = &det.certificate {
                        s.push_str(&format!(
                            " {}",
                            serde_json::to_string(c).expect("serializes")
                        ));
                    }
                    s
                }
            };
            let exit_code = match det.certificate_status {
                CertificateStatus::Certified => EXIT_OK,
                CertificateStatus::Refuted | CertificateStatus::NotAttempted => EXIT_VIOLATED,
                CertificateStatus::Inconclusive => EXIT_INCONCLUSIVE,
            };
            Ok(RunOutput { exit_code, report })
        }
        Command::Recover { p, q } => {
            let (p, q) = (group.parse_point(p)?, group.parse_point(q)?);
            let rec = recover_exponent(group, &p, &q, cfg.scan)?;
            let report = match cfg.format {
                Format::Json => rec.to_json(),
                Format::Csv => format!(
                    "outcome,d\n{},{}",
                    recovery_str(&rec),
                    rec.d().map(|d| d.to_string()).unwrap_or_default()
                ),
                Format::Text => format!("{rec:?}"),
            };
            let exit_code = match rec {
                Recovery::Recovered { .. } => EXIT_OK,
                Recovery::NotInSubgroup { .. } | Recovery::Inconsistent { .. } => EXIT_VIOLATED,
                Recovery::Unverified { .. } | Recovery::Exhausted { .. } => EXIT_INCONCLUSIVE,
            };
            Ok(RunOutput { exit_code, report })
        }
        Command::Experiment {
            suite,
            trials,
            seed,
        } => {
            let mut ec = ExperimentConfig::new(*suite, *trials, *seed);
            ec.scan = cfg.scan;
            let r = run_experiment(&ec, &opts)?;
            let report = match cfg.format {
                Format::Json => r.to_json(),
                Format::Csv => std::iter::once(
                    "trial,label,verdict,v,n,oracle,agrees,theorem_violation".to_string(),
                )
                .chain(r.details.iter().map(|c| {
                    format!(
                        "{},{},{},{},{},\"{}\",{},{}",
                        c.trial,
                        c.label,
                        c.verdict.map(verdict_str).unwrap_or(""),
                        c.witness
                            .as_ref()
                            .map(|w| w.v.to_string())
                            .unwrap_or_default(),
                        c.witness
                            .as_ref()
                            .map(|w| w.n.to_string())
                            .unwrap_or_default(),
                        c.oracle.replace('"', "\"\""),
                        c.agrees,
                        c.theorem_violation
                    )
                }))
                .collect::<Vec<_>>()
                .join("\n"),
                Format::Text => format!(
                    "suite {} seed {}: {} cases, {} agree, {} disagree, {} theorem violations",
                    r.suite.as_str(),
                    r.seed,
                    r.cases,
                    r.agreements,
                    r.disagreements,
                    r.theorem_violations
                ),
            };
            let exit_code = if r.disagreements == 0 && r.theorem_violations == 0 {
                EXIT_OK
            } else {
                EXIT_VIOLATED
            };
            Ok(RunOutput { exit_code, report })
        }
    }
}

fn condition_output<G: MordellWeil>(
    group: &G,
    cond: &Condition<G::Point>,
    cfg: &RunConfig,
    opts: &ScanOptions,
) -> mwlab::Result<RunOutput> {
    if let Some((v, n)) = cfg.verify {
        let witness = Witness {
            v,
            n,
            detail: String::new(),
        };
        let verified = verify_witness(group, cond, &witness)?;
        let id = cond.id().as_str();
        let report = match cfg.format {
            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                "condition_id": id,
                "witness": { "v": v, "n": n },
                "verified": verified,
            }))
            .expect("serializes"),
            Format::Csv => format!("condition_id,v,n,verified\n{id},{v},{n},{verified}"),
            Format::Text => format!(
                "{id}: witness v={v} n={n} {}",
                if verified {
                    "verified"
                } else {
                    "does NOT verify"
                }
            ),
        };
        let exit_code = if verified { EXIT_VIOLATED } else { EXIT_OK };
        return Ok(RunOutput { exit_code, report });
    }
    let report = scan_condition(group, cond, cfg.scan, opts)?;
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => format!("{}\n{}", ConditionReport::CSV_HEADER, report.to_csv_row()),
        Format::Text => condition_text(&report, cfg.n_cap),
    };
    let exit_code = match report.verdict {
        Verdict::HoldsOnScan => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
    };
    Ok(RunOutput {
        exit_code,
        report: text,
    })
}

fn condition_text(report: &ConditionReport, n_cap: Option<u64>) -> String {
    let text = report.to_text();
    match (n_cap, &report.witness) {
        (Some(cap), Some(w)) if w.n > cap => text.replace(
            &format!("v={} n={}:", w.v, w.n),
            &format!("v={} n>{cap}:", w.v),
        ),
        _ => text,
    }
}

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsOnScan => "holds_on_scan",
        Verdict::Violated => "violated",
    }
}

fn status_str(s: CertificateStatus) -> &'static str {
    match s {
        CertificateStatus::Certified => "certified",
        CertificateStatus::Refuted => "refuted",
        CertificateStatus::Inconclusive => "inconclusive",
        CertificateStatus::NotAttempted => "not_attempted",
    }
}

fn recovery_str(r: &Recovery) -> &'static str {
    match r {
        Recovery::Recovered { .. } => "recovered",
        Recovery::NotInSubgroup { .. } => "not_in_subgroup",
        Recovery::Inconsistent { .. } => "inconsistent",
        Recovery::Unverified { .. } => "unverified",
        Recovery::Exhausted { .. } => "exhausted",
    }
}
