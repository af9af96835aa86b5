//! `efd`: validation, distances, solving, proof checking, transcript replay
//! and the session server from the command line.
//!
//! Exit status: 0 on success, 1 on a negative verdict under `--fail-on-no`,
//! 2 on unreadable or malformed input.

mod play;

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use efd_core::bnf::{CanonicalPosition, PseudoDistance, DEFAULT_CLOSURE_DEPTH};
use efd_core::clocks::{ClockOrder, Rank};
use efd_core::game::{replay, Game, GameConfig, Player, Transcript, TRANSCRIPT_SCHEMA};
use efd_core::lang::{MetricLanguage, WeakModulus};
use efd_core::proofs::{check_proof, t0_axioms, FiniteCategory, ProofSequence};
use efd_core::structure::FiniteStructure;
use efd_core::{Error, Rational};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "efd", version, about = "Metric Ehrenfeucht-Fraisse games on finite structures")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when the verdict is negative.
    #[arg(long, global = true)]
    fail_on_no: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Metric {
    /// Weak modulus: `default`, a list `1,2,3` whose last entry repeats, or `affine:SLOPE,INTERCEPT`.
    #[arg(long, default_value = "default")]
    omega: String,
    /// Function-closure depth for quantifier-free atoms.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_DEPTH)]
    depth: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check a language file, and optionally a structure over it.
    Validate { language: PathBuf, structure: Option<PathBuf> },
    /// The back-and-forth distance r_alpha and its stabilization rank.
    Distance {
        /// A natural number, or `w` for the stabilized value.
        #[arg(long, default_value = "w")]
        alpha: String,
        #[command(flatten)]
        metric: Metric,
        /// Pledged pair `a=b` by element id; repeatable.
        #[arg(long = "pledge")]
        pledges: Vec<String>,
        a: PathBuf,
        b: PathBuf,
    },
    /// Decide the game and optionally write the winner's certificate.
    Solve {
        /// `3`, `0`, a CNF ordinal such as `w*2+1`, or `w*`.
        #[arg(long)]
        clock: String,
        #[arg(long, required_unless_present = "epsilon_sweep")]
        epsilon: Option<String>,
        /// `FROM,TO,STEP`: solve for each epsilon and report where the winner flips.
        #[arg(long, conflicts_with = "epsilon")]
        epsilon_sweep: Option<String>,
        #[command(flatten)]
        metric: Metric,
        #[arg(long)]
        strategy: Option<PathBuf>,
        a: PathBuf,
        b: PathBuf,
    },
    /// Whether r_alpha vanishes at the empty position.
    Equiv {
        #[arg(long, default_value = "w")]
        alpha: String,
        #[command(flatten)]
        metric: Metric,
        a: PathBuf,
        b: PathBuf,
    },
    /// Play against the engine on the terminal.
    Play {
        #[arg(long)]
        clock: String,
        #[arg(long)]
        epsilon: String,
        /// The player you take: `I` (spoiler) or `II` (duplicator).
        #[arg(long, default_value = "I")]
        human: String,
        #[command(flatten)]
        metric: Metric,
        /// Write the finished transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
        a: PathBuf,
        b: PathBuf,
    },
    /// Check a proof against the presentation theory of a finite category.
    ProveCheck { category: PathBuf, proof: PathBuf },
    /// Replay a transcript and compare with its recorded verdict.
    Replay { transcript: PathBuf },
    /// Run the HTTP session server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for per-session JSON-lines transcripts.
        #[arg(long)]
        transcripts: Option<PathBuf>,
    },
}

/// Text and JSON renderings of a result, and whether it is positive.
struct Outcome {
    text: String,
    json: Value,
    positive: bool,
}

type CmdResult = Result<Outcome, Error>;

fn rational(s: &str) -> Result<Rational, Error> {
    Rational::parse_lenient(s)
}

fn rank(s: &str) -> Result<Rank, Error> {
    match s.trim() {
        "w" | "inf" | "stab" => Ok(Rank::Infinite),
        n => n.parse().map(Rank::Finite).map_err(|_| Error::Parse(format!("malformed rank {n:?}"))),
    }
}

fn load_pair(a: &Path, b: &Path) -> Result<(FiniteStructure, FiniteStructure), Error> {
    Ok((FiniteStructure::load(a)?, FiniteStructure::load(b)?))
}

fn config(a: &Path, b: &Path, clock: &str, eps: Rational, metric: &Metric) -> Result<GameConfig, Error> {
    let (a, b) = load_pair(a, b)?;
    let mut cfg = GameConfig::new(a, b, ClockOrder::parse(clock)?, eps);
    cfg.omega = WeakModulus::parse_spec(&metric.omega)?;
    cfg.closure_depth = metric.depth;
    Ok(cfg)
}

fn validate(language: &Path, structure: Option<&Path>) -> CmdResult {
    let lang = MetricLanguage::load(language)?;
    let mut report = lang.validate();
    if let (Some(path), true) = (structure, report.is_ok()) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let s = FiniteStructure::from_value_with(&serde_json::from_str(&text)?, Arc::new(lang))?;
        report = s.validate();
    }
    Ok(Outcome {
        text: report.to_string(),
        json: json!({"schema": TRANSCRIPT_SCHEMA, "ok": report.is_ok(), "defects": report.defects}),
        positive: report.is_ok(),
    })
}

fn distance(alpha: &str, metric: &Metric, pledges: &[String], a: &Path, b: &Path) -> CmdResult {
    let (a, b) = load_pair(a, b)?;
    let ids = pledges
        .iter()
        .map(|p| p.split_once('=').map(|(x, y)| (x.to_string(), y.to_string())))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Parse("pledges are written a=b".into()))?;
    let p = CanonicalPosition::from_ids(&a, &b, &ids)?;
    let d = PseudoDistance::new(&a, &b, &WeakModulus::parse_spec(&metric.omega)?, metric.depth)?;
    let r = d.r(rank(alpha)?, &p)?;
    let star = d.alpha_star();
    let text = match star {
        Some(k) => format!("r = {r}, stabilized at {k}"),
        None => format!("r = {r}, stabilization rank not tabulated"),
    };
    Ok(Outcome { text, json: json!({"schema": TRANSCRIPT_SCHEMA, "r": r, "alpha_star": star}), positive: r.is_zero() })
}

fn solve_one(cfg: GameConfig) -> Result<(Game, efd_core::game::SolveResult), Error> {
    let game = Game::new(cfg)?;
    let r = game.solve()?;
    Ok((game, r))
}

fn solve(clock: &str, eps: &str, metric: &Metric, strategy: Option<&Path>, a: &Path, b: &Path) -> CmdResult {
    let (_, r) = solve_one(config(a, b, clock, rational(eps)?, metric)?)?;
    if let Some(path) = strategy {
        std::fs::write(path, r.certificate.to_json() + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let mut text = format!("winner: {}\ndeciding value: {}", r.winner, r.deciding_value);
    if let Some(k) = r.stabilization_rank {
        text += &format!("\nstabilization rank: {k}");
    }
    Ok(Outcome {
        text,
        json: json!({
            "schema": TRANSCRIPT_SCHEMA,
            "winner": r.winner,
            "deciding_value": r.deciding_value,
            "stabilization_rank": r.stabilization_rank,
        }),
        positive: r.winner == Player::II,
    })
}

/// The duplicator wins exactly when the deciding value is below epsilon, so
/// the sweep reports the least swept epsilon at which II wins.
fn sweep(clock: &str, spec: &str, metric: &Metric, a: &Path, b: &Path) -> CmdResult {
    let parts = spec.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
    let [from, to, step] = parts.as_slice() else {
        return Err(Error::Parse("sweep is FROM,TO,STEP".into()));
    };
    if !step.is_positive() || !from.is_positive() {
        return Err(Error::Invalid("sweep needs a positive start and step".into()));
    }
    let base = config(a, b, clock, from.clone(), metric)?;
    let mut rows = Vec::new();
    let mut eps = from.clone();
    while &eps <= to {
        let mut cfg = base.clone();
        cfg.epsilon = eps.clone();
        let (_, r) = solve_one(cfg)?;
        rows.push((eps.clone(), r.winner));
        eps = &eps + step;
    }
    let threshold = rows.iter().find(|(_, w)| *w == Player::II).map(|(e, _)| e.clone());
    let mut text: Vec<String> = rows.iter().map(|(e, w)| format!("epsilon {e}: winner {w}")).collect();
    text.push(match &threshold {
        Some(e) => format!("threshold: II wins from epsilon {e}"),
        None => "threshold: I wins throughout".into(),
    });
    Ok(Outcome {
        text: text.join("\n"),
        json: json!({
            "schema": TRANSCRIPT_SCHEMA,
            "sweep": rows.iter().map(|(e, w)| json!({"epsilon": e, "winner": w})).collect::<Vec<_>>(),
            "threshold": threshold,
        }),
        positive: threshold.is_some(),
    })
}

fn equiv(alpha: &str, metric: &Metric, a: &Path, b: &Path) -> CmdResult {
    let (a, b) = load_pair(a, b)?;
    let d = PseudoDistance::new(&a, &b, &WeakModulus::parse_spec(&metric.omega)?, metric.depth)?;
    let yes = d.r(rank(alpha)?, &CanonicalPosition::empty())?.is_zero();
    let text = if yes { "yes" } else { "no" };
    Ok(Outcome { text: text.into(), json: json!({"schema": TRANSCRIPT_SCHEMA, "equivalent": yes}), positive: yes })
}

fn prove_check(category: &Path, proof: &Path) -> CmdResult {
    let cat = FiniteCategory::load(category)?;
    let report = cat.validate();
    if !report.is_ok() {
        return Err(Error::Invalid(format!("category: {}", report.defects.join("; "))));
    }
    let proof = ProofSequence::load(proof, &cat)?;
    let v = check_proof(&cat, &t0_axioms(&cat), &proof);
    let text = match (&v.invalid_at, &v.reason) {
        (Some(i), Some(reason)) => format!("invalid at line {i}: {reason}"),
        _ => format!("valid ({} lines)", proof.lines.len()),
    };
    Ok(Outcome {
        text,
        json: json!({"schema": TRANSCRIPT_SCHEMA, "valid": v.valid, "invalid_at": v.invalid_at, "reason": v.reason, "lines": proof.lines.len()}),
        positive: v.valid,
    })
}

fn replay_cmd(path: &Path) -> CmdResult {
    let t = Transcript::load(path)?;
    let (_, verdict) = replay(&t)?;
    let matches = t.verdict.as_ref().is_none_or(|v| *v == verdict);
    let mut text = match verdict.winner {
        Some(w) => format!("finished after {} rounds: winner {w}, r0 = {}", verdict.rounds, verdict.r0),
        None => format!("in progress after {} rounds, r0 = {}", verdict.rounds, verdict.r0),
    };
    text += if t.verdict.is_none() {
        "\nno recorded verdict"
    } else if matches {
        "\nmatches recorded verdict"
    } else {
        "\ndiffers from recorded verdict"
    };
    Ok(Outcome {
        text,
        json: json!({"schema": TRANSCRIPT_SCHEMA, "verdict": verdict, "matches_recorded": matches}),
        positive: matches,
    })
}

fn serve(port: u16, transcripts: Option<PathBuf>) -> Result<(), Error> {
    if let Some(dir) = &transcripts {
        std::fs::create_dir_all(dir)?;
    }
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let runtime = tokio::runtime::Runtime::new()?;
    eprintln!("listening on http://{addr}");
    runtime.block_on(efd_server::serve(addr, Arc::new(efd_server::AppState::new(transcripts))))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Option<Outcome>, Error> {
    let out = match &cli.command {
        Command::Validate { language, structure } => validate(language, structure.as_deref())?,
        Command::Distance { alpha, metric, pledges, a, b } => distance(alpha, metric, pledges, a, b)?,
        Command::Solve { clock, epsilon: Some(eps), metric, strategy, a, b, .. } => solve(clock, eps, metric, strategy.as_deref(), a, b)?,
        Command::Solve { clock, epsilon_sweep: Some(spec), metric, a, b, .. } => sweep(clock, spec, metric, a, b)?,
        Command::Solve { .. } => return Err(Error::Parse("give --epsilon or --epsilon-sweep".into())),
        Command::Equiv { alpha, metric, a, b } => equiv(alpha, metric, a, b)?,
        Command::Play { clock, epsilon, human, metric, transcript, a, b } => {
            let human: Player = serde_json::from_value(json!(human)).map_err(|_| Error::Parse(format!("unknown player {human:?}")))?;
            let cfg = config(a, b, clock, rational(epsilon)?, metric)?;
            let stdin = std::io::stdin();
            let out = play::run(cfg, human, &mut stdin.lock(), &mut std::io::stdout(), transcript.as_deref())?;
            return Ok(Some(out));
        }
        Command::ProveCheck { category, proof } => prove_check(category, proof)?,
        Command::Replay { transcript } => replay_cmd(transcript)?,
        Command::Serve { port, transcripts } => {
            serve(*port, transcripts.clone())?;
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(out)) => {
            let mut stdout = std::io::stdout();
            if cli.json {
                let _ = writeln!(stdout, "{}", serde_json::to_string(&out.json).expect("json"));
            } else if !out.text.is_empty() {
                let _ = writeln!(stdout, "{}", out.text);
            }
            if cli.fail_on_no && !out.positive {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
