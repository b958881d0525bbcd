use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use revdetect::campaign::{
    emit, run_campaign_with, summarize, CampaignConfig, Emittable, Execution, OutputFormat,
};
use revdetect::circuit::{random_circuit, Circuit, GatePolicy, PolarityMode};
use revdetect::faults::{
    inject, random_injection_plan, support, ErrorKind, InjectionRecord, RandomErrorPolicy,
};
use revdetect::oracle::{
    and_cascade_demo, exact_detection_probability, worst_case_composition, Wire, MASKING_FLIP,
};
use revdetect::realfmt::{content_digest, parse_real, write_real, write_real_named};
use revdetect::rng::RngStream;
use revdetect::stimuli::{
    check_equivalence, default_max_trials, failure_probability_bounds, required_inputs,
    ConfidenceSpec,
};

/// Exit status: equivalent or completed.
const EXIT_OK: u8 = 0;
/// Exit status: `check` found a differing input.
const EXIT_DETECTED: u8 = 1;
/// Exit status: invalid command line.
const EXIT_USAGE: u8 = 2;
/// Exit status: parse, I/O, capacity or sampling failure.
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "revdetect",
    version,
    about = "Random-stimuli equivalence checking for reversible circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random MCT circuit as a .real file.
    Gen(GenArgs),
    /// Compare two circuits on random inputs until they differ.
    Check(CheckArgs),
    /// Inject errors into a circuit, or replay a saved injection record.
    Inject(InjectArgs),
    /// Exact probability that a uniform input tells two circuits apart.
    Oracle(OracleArgs),
    /// Number of random inputs needed to catch a size-k error with confidence 1 - delta.
    Bound(BoundArgs),
    /// Run a Monte-Carlo campaign described by a JSON config.
    Campaign(CampaignArgs),
    /// Built-in worked examples.
    Demo(DemoArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of lines.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=64))]
    lines: u8,
    /// Number of gates.
    #[arg(long)]
    gates: usize,
    #[arg(long)]
    seed: u64,
    /// Fewest controls per gate [default: 0].
    #[arg(long)]
    min_controls: Option<usize>,
    /// Most controls per gate [default: min(4, lines - 1)].
    #[arg(long)]
    max_controls: Option<usize>,
    #[arg(long, value_enum, default_value_t = PolarityArg::Positive)]
    polarity: PolarityArg,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    Positive,
    Mixed,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    golden: PathBuf,
    #[arg(long)]
    candidate: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Trial budget [default: min(2^n, 2^20)].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_trials: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InjectArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Error size: lines in each error window.
    #[arg(long, required_unless_present = "replay", value_parser = clap::value_parser!(u8).range(1..=64))]
    k: Option<u8>,
    #[arg(long, value_enum, default_value_t = KindArg::Worst)]
    kind: KindArg,
    /// Number of errors.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, required_unless_present = "replay")]
    seed: Option<u64>,
    /// Re-apply the errors of a saved record instead of drawing new ones.
    #[arg(long, conflicts_with_all = ["k", "seed", "record"])]
    replay: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Where to write the injection record (JSON).
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Worst,
    Random,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    golden: PathBuf,
    #[arg(long)]
    candidate: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=63))]
    k: u32,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-repetition results.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write per-group summary statistics here (same format).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Run repetitions on one thread. Results are identical either way.
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct DemoArgs {
    #[command(subcommand)]
    which: DemoCommand,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Flip one wire of an 8-input AND cascade and count inputs that expose it.
    Masking {
        /// Layer of the flipped wire (0 = inputs, 3 = output).
        #[arg(long, requires = "index")]
        layer: Option<usize>,
        #[arg(long, requires = "layer")]
        index: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Two NOT gates around a full MCT: the worst case for a single error.
    Worstcase {
        /// Number of lines; the effective error spans all but line 0.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=17))]
        lines: u32,
        #[arg(long)]
        json: bool,
    },
}

/// Failure classified by exit status.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<revdetect::Error> for Failure {
    fn from(e: revdetect::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a),
        Command::Inject(a) => cmd_inject(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Demo(a) => cmd_demo(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Parsed circuit plus its variable names, so rewritten files keep them.
fn load_circuit(path: &Path) -> anyhow::Result<(Circuit, Vec<String>)> {
    let text = read_text(path)?;
    let doc = parse_real(&text).with_context(|| format!("parsing {}", path.display()))?;
    let circuit = doc
        .to_circuit()
        .with_context(|| format!("loading {}", path.display()))?;
    Ok((circuit, doc.variables))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let n = a.lines as usize;
    let default = GatePolicy::default_for(n);
    let policy = GatePolicy {
        min_controls: a.min_controls.unwrap_or(default.min_controls),
        max_controls: a.max_controls.unwrap_or(default.max_controls),
        polarity: match a.polarity {
            PolarityArg::Positive => PolarityMode::PositiveOnly,
            PolarityArg::Mixed => PolarityMode::Mixed,
        },
    };
    policy
        .validate(n)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let circuit = random_circuit(n, a.gates, &mut RngStream::derive(a.seed, 0), &policy)?;
    write_text(&a.output, &write_real(&circuit))?;
    if a.json {
        print_json(&json!({
            "lines": n,
            "gates": a.gates,
            "seed": a.seed,
            "digest": content_digest(&circuit),
        }))?;
    }
    Ok(EXIT_OK)
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let (golden, _) = load_circuit(&a.golden)?;
    let (candidate, _) = load_circuit(&a.candidate)?;
    if golden.width() != candidate.width() {
        return Err(anyhow!(
            "circuits have different widths: {} vs {}",
            golden.width(),
            candidate.width()
        )
        .into());
    }
    let max_trials = a
        .max_trials
        .unwrap_or_else(|| default_max_trials(golden.width()));
    let outcome = check_equivalence(
        &golden,
        &candidate,
        &mut RngStream::derive(a.seed, 0),
        max_trials,
    )?;
    if a.json {
        print_json(&serde_json::to_value(outcome).map_err(anyhow::Error::from)?)?;
    } else if let Some(w) = &outcome.witness {
        println!(
            "detected: outputs differ on input {w} after {} trials",
            outcome.trials_used
        );
    } else {
        println!("exhausted: no difference in {} trials", outcome.trials_used);
    }
    Ok(if outcome.detected() {
        EXIT_DETECTED
    } else {
        EXIT_OK
    })
}

fn cmd_inject(a: InjectArgs) -> Outcome {
    let (circuit, names) = load_circuit(&a.circuit)?;
    let (corrupted, record) = match &a.replay {
        Some(path) => {
            let record = InjectionRecord::from_json(&read_text(path)?)
                .with_context(|| format!("loading record {}", path.display()))?;
            (record.apply(&circuit)?, record)
        }
        None => {
            let k = a.k.expect("required by clap") as usize;
            let seed = a.seed.expect("required by clap");
            let n = circuit.width();
            if k > n {
                return Err(Failure::Usage(format!(
                    "--k {k} exceeds the circuit's {n} lines"
                )));
            }
            let kind = match a.kind {
                KindArg::Worst => ErrorKind::WorstCase,
                KindArg::Random => ErrorKind::Random(RandomErrorPolicy::default()),
            };
            let mut stream = RngStream::derive(seed, 0);
            let plan = if a.count == 0 {
                Vec::new()
            } else {
                random_injection_plan(circuit.len(), n, a.count, k, kind, &mut stream)?
            };
            inject(&circuit, &plan, &mut stream)?
        }
    };
    write_text(&a.output, &write_real_named(&corrupted, &names)?)?;
    if let Some(path) = &a.record {
        write_text(path, &record.to_json())?;
    }
    if a.json {
        let value: serde_json::Value =
            serde_json::from_str(&record.to_json()).map_err(anyhow::Error::from)?;
        print_json(&value)?;
    } else {
        for e in &record.injections {
            println!(
                "{} error on lines {}..{} before gate {} ({} gates)",
                e.kind,
                e.window_start,
                e.window_start + e.k,
                e.position,
                e.error.len()
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(a: OracleArgs) -> Outcome {
    let (golden, _) = load_circuit(&a.golden)?;
    let (candidate, _) = load_circuit(&a.candidate)?;
    let p = exact_detection_probability(&golden, &candidate)?;
    if a.json {
        print_json(&serde_json::to_value(p).map_err(anyhow::Error::from)?)?;
    } else {
        println!("{p}");
    }
    Ok(EXIT_OK)
}

fn cmd_bound(a: BoundArgs) -> Outcome {
    let spec = ConfidenceSpec::new(a.k, a.delta).map_err(|e| Failure::Usage(e.to_string()))?;
    let n = required_inputs(&spec);
    if a.json {
        let bounds = failure_probability_bounds(a.k, n)?;
        print_json(&json!({
            "k": a.k,
            "delta": a.delta,
            "required_inputs": n,
            "exact_worst_case": bounds.exact_worst_case,
            "exp_bound": bounds.exp_bound,
        }))?;
    } else {
        println!("{n}");
    }
    Ok(EXIT_OK)
}

fn cmd_campaign(a: CampaignArgs) -> Outcome {
    let config = CampaignConfig::from_json(&read_text(&a.config)?)
        .with_context(|| format!("loading config {}", a.config.display()))?;
    let execution = if a.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let table = run_campaign_with(&config, execution)?;
    let format = match a.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    emit(Emittable::Table(&table), format, &a.output)?;
    let stats = summarize(&table)?;
    if let Some(path) = &a.summary {
        emit(Emittable::Summary(&stats), format, path)?;
    }
    if a.json {
        let value: serde_json::Value =
            serde_json::from_str(&stats.to_json()).map_err(anyhow::Error::from)?;
        print_json(&value)?;
    } else {
        for g in &stats.groups {
            let mean = g.mean.map_or("-".to_string(), |m| format!("{m:.3}"));
            println!(
                "n={} g={} k={} l={} {}: mean {mean} over {} runs, {} undetected",
                g.n,
                g.g,
                g.k,
                g.l,
                g.error_kind.as_str(),
                g.samples,
                g.undetected
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_demo(a: DemoArgs) -> Outcome {
    match a.which {
        DemoCommand::Masking { layer, index, json } => {
            let wire = match (layer, index) {
                (Some(l), Some(i)) => Wire::new(l, i).map_err(|e| Failure::Usage(e.to_string()))?,
                _ => MASKING_FLIP,
            };
            let (hits, total) = and_cascade_demo(Some(wire))?;
            if json {
                print_json(&json!({
                    "demo": "masking",
                    "layer": wire.layer,
                    "index": wire.index,
                    "detecting_inputs": hits,
                    "total_inputs": total,
                }))?;
            } else {
                println!("{hits} / {total}");
            }
        }
        DemoCommand::Worstcase { lines, json } => {
            let w = worst_case_composition(lines as usize)?;
            let p = exact_detection_probability(&w.ideal, &w.corrupted)?;
            let window = (1, lines as usize - 1);
            let supp: Vec<usize> = support(&w.effective_error, window)?.into_iter().collect();
            if json {
                print_json(&json!({
                    "demo": "worstcase",
                    "lines": lines,
                    "detecting_inputs": p.numerator(),
                    "total_inputs": p.denominator(),
                    "support": supp,
                    "effective_error": w.effective_error.gates().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                }))?;
            } else {
                println!("{} / {}", p.numerator(), p.denominator());
                let lines: Vec<String> = supp.iter().map(|l| l.to_string()).collect();
                println!("effective error support: {{{}}}", lines.join(", "));
            }
        }
    }
    Ok(EXIT_OK)
}
