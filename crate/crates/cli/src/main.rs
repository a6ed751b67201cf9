//! Command-line surface for the dp-condorcet crate: tallying, exact winner
//! distributions, sampling, exhaustive audits and bound-curve emission.
//!
//! Every emitted artifact embeds the tool version and a config echo (the seed
//! included where one is used); re-running a command with the echoed config
//! reproduces the output byte for byte. JSON numbers are rounded to 12
//! significant digits; probabilities carry their log score alongside.
//!
//! Exit codes: 0 success or measurement, 1 usage or I/O error, 2 axiom
//! violation found.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dp_condorcet::audit;
use dp_condorcet::ballots::{self, ParsedBallots};
use dp_condorcet::bounds;
use dp_condorcet::distribution::{cw_existence_prob, expected_rounds, winner_distribution};
use dp_condorcet::mechanisms::{
    edge_probs, rejection_sample_winner, Mechanism, NoiseSpec, DEFAULT_MAX_ITERS,
};
use dp_condorcet::tally::{condorcet_winner, margins, pairwise_tally, umg};
use dp_condorcet::{AxiomId, OrderConvention, Verdict};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "dp-condorcet",
    version,
    about = "Differentially private Condorcet voting: tally, winner distributions, sampling, audits, bound curves",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tally a ballot file: pairwise counts, margins, majority graph, winner
    Tally(TallyArgs),
    /// Exact winner distribution of the noisy rule on a ballot file
    WinnerDist(WinnerDistArgs),
    /// Draw winners, by closed-form sampling or the literal rejection loop
    Sample(SampleArgs),
    /// Exhaustive audits over small ballot spaces
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Closed-form bound curves over a lambda grid
    Curves(CurvesArgs),
}

#[derive(Subcommand)]
enum AuditCommand {
    /// Measure the exact privacy budget over all neighboring profiles
    Edp(AuditEdpArgs),
    /// Check one voting axiom over the whole ballot space
    Axiom(AuditAxiomArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_mechanism(s: &str) -> Result<Mechanism, String> {
    Mechanism::from_str(s).map_err(|e| e.to_string())
}

fn parse_axiom(s: &str) -> Result<AxiomId, String> {
    AxiomId::from_str(s)
}

fn parse_convention(s: &str) -> Result<OrderConvention, String> {
    match s {
        "truthful" => Ok(OrderConvention::Truthful),
        "def8" => Ok(OrderConvention::Reported),
        other => Err(format!(
            "unknown order convention {other:?}, expected truthful or def8"
        )),
    }
}

/// A lambda grid parsed from `start:stop:step`, inclusive of `stop` up to
/// rounding.
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid {s:?} is not start:stop:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("bad grid value {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start > 0.0 && step > 0.0 && stop >= start) {
        return Err(format!("grid {s:?} needs 0 < start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok(Grid((0..count).map(|i| start + i as f64 * step).collect()))
}

#[derive(Args)]
struct TallyArgs {
    /// Ballot file path
    #[arg(long)]
    ballots: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct WinnerDistArgs {
    #[arg(long)]
    ballots: PathBuf,
    /// Noise mechanism: lap, exp or rr
    #[arg(long, value_parser = parse_mechanism)]
    mech: Mechanism,
    /// Noise level (> 0)
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    ballots: PathBuf,
    #[arg(long, value_parser = parse_mechanism)]
    mech: Mechanism,
    #[arg(long)]
    lambda: f64,
    /// RNG seed; mandatory so runs are reproducible
    #[arg(long)]
    seed: u64,
    /// Number of winners to draw
    #[arg(long, default_value_t = 1)]
    draws: u64,
    /// closed: sample the exact distribution; rejection: run the noisy-graph loop
    #[arg(long, default_value = "closed")]
    method: SampleMethod,
    /// Rejection budget per draw
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleMethod {
    Closed,
    Rejection,
}

#[derive(Args)]
struct AuditEdpArgs {
    #[arg(long, value_parser = parse_mechanism)]
    mech: Mechanism,
    #[arg(long)]
    lambda: f64,
    /// Number of alternatives (2..=4)
    #[arg(long)]
    m: usize,
    /// Number of voters (1..=3)
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct AuditAxiomArgs {
    /// One of: p-condorcet, alpha-p-condorcet, p-pareto, a-monotonicity,
    /// alpha-sd-sp, lexi-participation, strong-lexi-participation
    #[arg(long, value_parser = parse_axiom)]
    id: AxiomId,
    #[arg(long, value_parser = parse_mechanism)]
    mech: Mechanism,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Level for the alpha-parameterized axioms
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// truthful: the voter's true ranking indexes both sums; def8: the
    /// misreport indexes the replaced side
    #[arg(long, value_parser = parse_convention, default_value = "truthful")]
    order_convention: OrderConvention,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CurvesArgs {
    /// Comma-separated mechanisms, e.g. lap,exp,rr
    #[arg(long, default_value = "lap,exp,rr")]
    mechs: String,
    /// Lambda grid as start:stop:step
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Number of alternatives
    #[arg(long)]
    m: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Tally(args) => cmd_tally(args),
        Command::WinnerDist(args) => cmd_winner_dist(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Audit(AuditCommand::Edp(args)) => cmd_audit_edp(args),
        Command::Audit(AuditCommand::Axiom(args)) => cmd_audit_axiom(args),
        Command::Curves(args) => cmd_curves(args),
    }
}

fn load_ballots(path: &PathBuf) -> anyhow::Result<ParsedBallots> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading ballot file {}", path.display()))?;
    ballots::parse_profile(&text)
        .with_context(|| format!("parsing ballot file {}", path.display()))
}

fn noise_spec(mech: Mechanism, lambda: f64) -> anyhow::Result<NoiseSpec> {
    NoiseSpec::new(mech, lambda).context("invalid noise spec")
}

/// Rounds every fractional JSON number to 12 significant digits, in place.
fn round_sig12(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                    if let Some(number) = serde_json::Number::from_f64(rounded) {
                        *value = Value::Number(number);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_sig12),
        Value::Object(map) => map.values_mut().for_each(round_sig12),
        _ => {}
    }
}

fn print_json(mut value: Value) -> anyhow::Result<()> {
    round_sig12(&mut value);
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn cmd_tally(args: TallyArgs) -> anyhow::Result<i32> {
    let parsed = load_ballots(&args.ballots)?;
    let tally = pairwise_tally(&parsed.profile);
    let w = margins(&tally);
    let graph = umg(&w);
    let winner = condorcet_winner(&graph);
    let labels = parsed.alternatives.labels();
    let winner_label = winner.map(|a| labels[a].clone());

    match args.format {
        Format::Json => {
            print_json(json!({
                "version": VERSION,
                "command": "tally",
                "config": { "ballots": args.ballots.display().to_string(), "format": "json" },
                "labels": labels,
                "m": parsed.profile.m(),
                "n": parsed.profile.n(),
                "pairwise": tally.rows(),
                "margins": w.rows(),
                "umg": graph.rows(),
                "condorcet_winner": winner_label,
            }))?;
        }
        Format::Text => {
            println!("# dp-condorcet {VERSION} tally {}", args.ballots.display());
            println!("alternatives: {}", labels.join(", "));
            println!("voters: {}", parsed.profile.n());
            println!("pairwise counts (row beats column):");
            for (a, row) in tally.rows().iter().enumerate() {
                println!("  {:>8} {row:?}", labels[a]);
            }
            println!("majority margins:");
            for (a, row) in w.rows().iter().enumerate() {
                println!("  {:>8} {row:?}", labels[a]);
            }
            println!(
                "condorcet winner: {}",
                winner_label.as_deref().unwrap_or("none")
            );
        }
        Format::Csv => bail!("tally has no csv form; use json or text"),
    }
    Ok(0)
}

fn cmd_winner_dist(args: WinnerDistArgs) -> anyhow::Result<i32> {
    let parsed = load_ballots(&args.ballots)?;
    let spec = noise_spec(args.mech, args.lambda)?;
    let dist = winner_distribution(spec, &parsed.profile);
    let ep = edge_probs(spec, &dp_condorcet::tally::MajorityMargins::of(&parsed.profile));
    let cw_prob = cw_existence_prob(&ep);
    let labels = parsed.alternatives.labels();

    match args.format {
        Format::Json => {
            print_json(json!({
                "version": VERSION,
                "command": "winner-dist",
                "config": {
                    "ballots": args.ballots.display().to_string(),
                    "mechanism": args.mech.as_str(),
                    "lambda": args.lambda,
                    "format": "json",
                },
                "mechanism": args.mech.as_str(),
                "lambda": args.lambda,
                "labels": labels,
                "probs": dist.probs(),
                "log_scores": dist.log_scores(),
                "cw_exists_prob": cw_prob,
                "expected_rounds": expected_rounds(&ep),
            }))?;
        }
        Format::Text => {
            println!(
                "# dp-condorcet {VERSION} winner-dist {} mech={} lambda={}",
                args.ballots.display(),
                args.mech,
                args.lambda
            );
            for (a, label) in labels.iter().enumerate() {
                println!(
                    "  {label:>8}  p = {:.9}  log score = {:.9}",
                    dist.prob(a),
                    dist.log_score(a)
                );
            }
            println!("P[draw has a winner] = {cw_prob:.9}");
            println!("expected rejection rounds = {:.6}", 1.0 / cw_prob);
        }
        Format::Csv => bail!("winner-dist has no csv form; use json or text"),
    }
    Ok(0)
}

fn cmd_sample(args: SampleArgs) -> anyhow::Result<i32> {
    if args.draws == 0 {
        bail!("--draws must be at least 1");
    }
    if args.max_iters == 0 {
        bail!("--max-iters must be at least 1");
    }
    let parsed = load_ballots(&args.ballots)?;
    let spec = noise_spec(args.mech, args.lambda)?;
    let labels = parsed.alternatives.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let mut winners = Vec::with_capacity(args.draws as usize);
    let mut counts = vec![0u64; parsed.profile.m()];
    let mut rounds_total = 0u64;
    let mut rounds_max = 0u64;
    match args.method {
        SampleMethod::Closed => {
            let dist = winner_distribution(spec, &parsed.profile);
            for _ in 0..args.draws {
                let a = dp_condorcet::distribution::sample_winner(&dist, &mut rng);
                counts[a] += 1;
                winners.push(a);
            }
        }
        SampleMethod::Rejection => {
            for draw in 0..args.draws {
                let (a, iters) =
                    rejection_sample_winner(spec, &parsed.profile, &mut rng, args.max_iters)
                        .with_context(|| format!("draw {draw}"))?;
                counts[a] += 1;
                rounds_total += iters;
                rounds_max = rounds_max.max(iters);
                winners.push(a);
            }
        }
    }

    let winner_labels: Vec<&str> = winners.iter().map(|&a| labels[a].as_str()).collect();
    let mean_rounds = match args.method {
        SampleMethod::Closed => None,
        SampleMethod::Rejection => Some(rounds_total as f64 / args.draws as f64),
    };
    let method = match args.method {
        SampleMethod::Closed => "closed",
        SampleMethod::Rejection => "rejection",
    };

    match args.format {
        Format::Json => {
            print_json(json!({
                "version": VERSION,
                "command": "sample",
                "config": {
                    "ballots": args.ballots.display().to_string(),
                    "mechanism": args.mech.as_str(),
                    "lambda": args.lambda,
                    "seed": args.seed,
                    "draws": args.draws,
                    "method": method,
                    "max_iters": args.max_iters,
                    "format": "json",
                },
                "winners": winner_labels,
                "counts": labels.iter().zip(&counts).map(|(l, c)| json!({"label": l, "count": c})).collect::<Vec<_>>(),
                "mean_rounds": mean_rounds,
                "max_rounds": if mean_rounds.is_some() { Some(rounds_max) } else { None },
            }))?;
        }
        Format::Text => {
            println!(
                "# dp-condorcet {VERSION} sample {} mech={} lambda={} seed={} draws={} method={method}",
                args.ballots.display(),
                args.mech,
                args.lambda,
                args.seed,
                args.draws
            );
            for (label, count) in labels.iter().zip(&counts) {
                println!("  {label:>8}  {count}");
            }
            if let Some(mean) = mean_rounds {
                println!("mean rounds = {mean:.4}, max rounds = {rounds_max}");
            }
        }
        Format::Csv => bail!("sample has no csv form; use json or text"),
    }
    Ok(0)
}

fn cmd_audit_edp(args: AuditEdpArgs) -> anyhow::Result<i32> {
    let spec = noise_spec(args.mech, args.lambda)?;
    let report = audit::audit_edp(spec, args.m, args.n)?;
    match args.format {
        Format::Json => {
            print_json(json!({
                "version": VERSION,
                "command": "audit edp",
                "config": {
                    "mechanism": args.mech.as_str(),
                    "lambda": args.lambda,
                    "m": args.m,
                    "n": args.n,
                    "format": "json",
                },
                "kind": "edp",
                "report": serde_json::to_value(&report)?,
            }))?;
        }
        Format::Text => {
            println!(
                "# dp-condorcet {VERSION} audit edp mech={} lambda={} m={} n={}",
                args.mech, args.lambda, args.m, args.n
            );
            println!("eps_exact = {:.9}", report.eps_exact);
            println!(
                "claimed bracket = [{:.9}, {:.9}]",
                report.eps_lower_claimed, report.eps_upper_claimed
            );
            println!(
                "witness: voter {} swaps to {:?} on:\n{}",
                report.witness.voter,
                report.witness.replacement,
                ballots::format_ballots(
                    &report.witness.profile,
                    &ballots::Alternatives::default_for(args.m)
                )
            );
        }
        Format::Csv => bail!("audit reports have no csv form; use json or text"),
    }
    Ok(0)
}

fn cmd_audit_axiom(args: AuditAxiomArgs) -> anyhow::Result<i32> {
    let spec = noise_spec(args.mech, args.lambda)?;
    let report = match args.id {
        AxiomId::PCondorcet | AxiomId::AlphaPCondorcet => {
            audit::check_p_condorcet(spec, args.m, args.n, args.alpha)?
        }
        AxiomId::PPareto => audit::check_p_pareto(spec, args.m, args.n)?,
        AxiomId::AMonotonicity => audit::check_a_monotonicity(spec, args.m, args.n)?,
        AxiomId::AlphaSdSp => {
            audit::check_sd_sp(spec, args.m, args.n, args.alpha, args.order_convention)?
        }
        AxiomId::LexiParticipation => {
            audit::check_lexi_participation(spec, args.m, args.n, false)?
        }
        AxiomId::StrongLexiParticipation => {
            audit::check_lexi_participation(spec, args.m, args.n, true)?
        }
    };

    match args.format {
        Format::Json => {
            print_json(json!({
                "version": VERSION,
                "command": "audit axiom",
                "config": {
                    "id": args.id.as_str(),
                    "mechanism": args.mech.as_str(),
                    "lambda": args.lambda,
                    "m": args.m,
                    "n": args.n,
                    "alpha": args.alpha,
                    "order_convention": match args.order_convention {
                        OrderConvention::Truthful => "truthful",
                        OrderConvention::Reported => "def8",
                    },
                    "format": "json",
                },
                "kind": "axiom",
                "report": serde_json::to_value(&report)?,
            }))?;
        }
        Format::Text => {
            println!(
                "# dp-condorcet {VERSION} audit axiom id={} mech={} lambda={} m={} n={}",
                report.axiom, args.mech, args.lambda, args.m, args.n
            );
            println!(
                "verdict: {}",
                if report.verdict == Verdict::Pass { "pass" } else { "fail" }
            );
            if let Some(alpha) = report.measured_alpha {
                println!("measured alpha = {alpha:.9}");
            }
            if let Some(witness) = &report.witness {
                println!("witness: {}", serde_json::to_string(witness)?);
            }
            println!("cases checked: {}", report.cases_checked);
        }
        Format::Csv => bail!("audit reports have no csv form; use json or text"),
    }
    Ok(if report.verdict == Verdict::Fail { 2 } else { 0 })
}

fn cmd_curves(args: CurvesArgs) -> anyhow::Result<i32> {
    let mechs: Vec<Mechanism> = args
        .mechs
        .split(',')
        .map(|s| parse_mechanism(s.trim()).map_err(anyhow::Error::msg))
        .collect::<Result<_, _>>()?;
    let grid = &args.grid.0;
    let table = bounds::emit_curves(&mechs, grid, args.m)?;

    let body = match args.format {
        Format::Csv => {
            let mut out = format!(
                "# dp-condorcet {VERSION} curves m={} mechs={} grid={}..{}x{}\n",
                args.m,
                args.mechs,
                grid.first().unwrap(),
                grid.last().unwrap(),
                grid.len()
            );
            out.push_str(&table.to_csv());
            out
        }
        Format::Json => {
            let mut value = json!({
                "version": VERSION,
                "command": "curves",
                "config": { "mechs": args.mechs, "m": args.m, "grid": grid, "format": "json" },
                "table": serde_json::to_value(&table)?,
            });
            round_sig12(&mut value);
            format!("{}\n", serde_json::to_string_pretty(&value)?)
        }
        Format::Text => bail!("curves emit csv or json"),
    };

    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            file.write_all(body.as_bytes())?;
        }
        None => print!("{body}"),
    }
    Ok(0)
}
