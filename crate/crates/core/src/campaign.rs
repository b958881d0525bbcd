//! Seeded Monte-Carlo campaigns over random circuits with injected errors.
//!
//! Repetition `r` draws from three streams of the master seed: `3r` for the
//! random circuit, `3r + 1` for the injection plan and any random error
//! gates, `3r + 2` for the stimuli. Each group of `(n, k, l)` re-derives the
//! streams, so swapping the error model leaves circuits and stimuli intact.
//! Rows are produced in a canonical order whatever the parallelism.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{default_gate_count, random_circuit, Circuit, GatePolicy};
use crate::error::{Error, Result};
use crate::faults::{
    inject, random_injection_plan, ErrorKind, ErrorSpec, InjectionRecord, RandomErrorPolicy,
    Spliced,
};
use crate::rng::RngStream;
use crate::stimuli::{best_case_expected_trials, check_with, default_max_trials};

pub const CODE_VERSION: &str = concat!("revdetect ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// One error per circuit; `l_values` must be `[1]`.
    SingleErrorScaling,
    MultiError,
    /// Same as `multi_error`; run once per error kind with a shared seed to
    /// compare trial-count distributions.
    CdfComparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKindName {
    WorstCase,
    Random,
}

impl Experiment {
    /// Name as written in configs and CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::SingleErrorScaling => "single_error_scaling",
            Experiment::MultiError => "multi_error",
            Experiment::CdfComparison => "cdf_comparison",
        }
    }
}

impl ErrorKindName {
    /// Name as written in configs and CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKindName::WorstCase => "worst_case",
            ErrorKindName::Random => "random",
        }
    }
}

/// A declarative experiment, usually read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub experiment: Experiment,
    pub n_values: Vec<usize>,
    /// Gates per random circuit; `None` means `10 n^2`.
    #[serde(default)]
    pub gate_count: Option<usize>,
    pub k_values: Vec<usize>,
    #[serde(default = "default_l_values")]
    pub l_values: Vec<usize>,
    pub error_kind: ErrorKindName,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub master_seed: u64,
    /// Per-check trial cap; `None` means `min(2^n, 2^20)`.
    #[serde(default)]
    pub max_trials: Option<u64>,
    /// Circuit gate distribution; `None` means the default for each `n`.
    #[serde(default)]
    pub gate_policy: Option<GatePolicy>,
    #[serde(default)]
    pub random_error: RandomErrorPolicy,
}

fn default_l_values() -> Vec<usize> {
    vec![1]
}

fn default_repetitions() -> usize {
    10_000
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::format("campaign config", msg));
        if self.n_values.is_empty() || self.k_values.is_empty() || self.l_values.is_empty() {
            return bad("n_values, k_values and l_values must be non-empty".into());
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| !(1..=64).contains(&n)) {
            return bad(format!("n = {n} is outside 1..=64"));
        }
        let min_n = *self.n_values.iter().min().expect("non-empty");
        if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k > min_n) {
            return bad(format!("k = {k} must lie in 1..={min_n}"));
        }
        if self.l_values.contains(&0) {
            return bad("l values must be at least 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.max_trials == Some(0) {
            return bad("max_trials must be at least 1".into());
        }
        if self.experiment == Experiment::SingleErrorScaling && self.l_values != [1] {
            return bad("single_error_scaling requires l_values = [1]".into());
        }
        if let Some(policy) = &self.gate_policy {
            for &n in &self.n_values {
                policy
                    .validate(n)
                    .or_else(|e| bad(format!("gate_policy for n = {n}: {e}")))?;
            }
        }
        if self.error_kind == ErrorKindName::Random {
            if let Some(&k) = self
                .k_values
                .iter()
                .find(|&&k| k > crate::faults::MAX_SUPPORT_WINDOW)
            {
                return bad(format!("random errors are limited to k <= 16, got {k}"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig =
            serde_json::from_str(text).map_err(|e| Error::format("campaign config", e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn gates_for(&self, n: usize) -> usize {
        self.gate_count.unwrap_or_else(|| default_gate_count(n))
    }

    pub fn trials_for(&self, n: usize) -> u64 {
        self.max_trials.unwrap_or_else(|| default_max_trials(n))
    }

    fn error_kind(&self) -> ErrorKind {
        match self.error_kind {
            ErrorKindName::WorstCase => ErrorKind::WorstCase,
            ErrorKindName::Random => ErrorKind::Random(self.random_error),
        }
    }

    fn groups(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.n_values {
            for &k in &self.k_values {
                for &l in &self.l_values {
                    out.push((n, k, l));
                }
            }
        }
        out
    }
}

/// One repetition of one `(n, k, l)` group. Field order is the CSV column
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: Experiment,
    pub n: usize,
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub error_kind: ErrorKindName,
    pub repetition: usize,
    pub trials_used: u64,
    pub detected: bool,
}

pub const CSV_COLUMNS: [&str; 9] = [
    "experiment",
    "n",
    "g",
    "k",
    "l",
    "error_kind",
    "repetition",
    "trials_used",
    "detected",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultsTable {
    pub code_version: String,
    /// Absent when the table was read back from CSV.
    #[serde(default)]
    pub config: Option<CampaignConfig>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

pub fn run_campaign(config: &CampaignConfig) -> Result<ResultsTable> {
    run_campaign_with(config, Execution::Parallel)
}

pub fn run_campaign_with(config: &CampaignConfig, execution: Execution) -> Result<ResultsTable> {
    config.validate()?;
    let groups = config.groups();
    let per_rep = |r: usize| run_repetition(config, &groups, r);
    let by_rep: Vec<Vec<Row>> = match execution {
        Execution::Serial => (0..config.repetitions)
            .map(per_rep)
            .collect::<Result<_>>()?,
        Execution::Parallel => (0..config.repetitions)
            .into_par_iter()
            .map(per_rep)
            .collect::<Result<_>>()?,
    };
    // Transpose repetition-major results into group-major order.
    let mut rows = Vec::with_capacity(groups.len() * config.repetitions);
    for gi in 0..groups.len() {
        rows.extend(by_rep.iter().map(|reps| reps[gi].clone()));
    }
    Ok(ResultsTable {
        code_version: CODE_VERSION.to_string(),
        config: Some(config.clone()),
        rows,
    })
}

// Per repetition `r`, three streams: `3r` draws the ideal circuit (shared by
// every group with the same `n`), `3r + 1` the injection plan and any random
// errors, `3r + 2` the stimuli. Each group re-derives its streams, so a row
// depends only on `(master_seed, n, g, k, l, r)` and the policies.

fn ideal_circuit(config: &CampaignConfig, n: usize, r: usize) -> Result<Circuit> {
    let policy = config
        .gate_policy
        .unwrap_or_else(|| GatePolicy::default_for(n));
    let mut stream = RngStream::derive(config.master_seed, 3 * r as u64);
    random_circuit(n, config.gates_for(n), &mut stream, &policy)
}

/// The placement plan, sorted by position, and the stream positioned to
/// realize the errors in that order.
fn injection_plan(
    config: &CampaignConfig,
    n: usize,
    k: usize,
    l: usize,
    r: usize,
) -> Result<(Vec<(usize, ErrorSpec)>, RngStream)> {
    let mut stream = RngStream::derive(config.master_seed, 3 * r as u64 + 1);
    let mut plan = random_injection_plan(
        config.gates_for(n),
        n,
        l,
        k,
        config.error_kind(),
        &mut stream,
    )?;
    plan.sort_by_key(|(p, _)| *p);
    Ok((plan, stream))
}

fn stimulus_stream(config: &CampaignConfig, r: usize) -> RngStream {
    RngStream::derive(config.master_seed, 3 * r as u64 + 2)
}

fn run_repetition(
    config: &CampaignConfig,
    groups: &[(usize, usize, usize)],
    r: usize,
) -> Result<Vec<Row>> {
    let mut rows = Vec::with_capacity(groups.len());
    let mut cached: Option<(usize, Circuit)> = None;
    for &(n, k, l) in groups {
        let context = || format!("n={n} k={k} l={l} repetition={r}");
        if cached.as_ref().is_none_or(|(cn, _)| *cn != n) {
            cached = Some((
                n,
                ideal_circuit(config, n, r).map_err(|e| e.context(context()))?,
            ));
        }
        let circuit = &cached.as_ref().expect("just filled").1;

        let (plan, mut error_stream) =
            injection_plan(config, n, k, l, r).map_err(|e| e.context(context()))?;
        let errors = plan
            .iter()
            .map(|(p, spec)| Ok((*p, spec.realize(n, &mut error_stream)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.context(context()))?;
        let refs: Vec<(usize, &Circuit)> = errors.iter().map(|(p, e)| (*p, e)).collect();
        let corrupted = Spliced::new(circuit, &refs)?;

        // Same outcome as simulating both circuits in full; see
        // `Spliced::differs_from_ideal`.
        let outcome = check_with(
            n,
            &mut stimulus_stream(config, r),
            config.trials_for(n),
            |x| corrupted.differs_from_ideal(x),
        )?;
        rows.push(Row {
            experiment: config.experiment,
            n,
            g: config.gates_for(n),
            k,
            l,
            error_kind: config.error_kind,
            repetition: r,
            trials_used: outcome.trials_used,
            detected: outcome.detected(),
        });
    }
    Ok(rows)
}

/// Everything needed to re-examine one campaign row.
#[derive(Debug, Clone)]
pub struct Replay {
    pub ideal: Circuit,
    pub corrupted: Circuit,
    pub record: InjectionRecord,
    /// Stream the row's stimuli were drawn from, at its start.
    pub stimuli: RngStream,
    pub max_trials: u64,
}

/// Rebuilds the circuits behind `row`. Running
/// `check_equivalence(&ideal, &corrupted, &mut stimuli, max_trials)` on the
/// result reproduces the row's `trials_used` and `detected`.
pub fn replay_row(config: &CampaignConfig, row: &Row) -> Result<Replay> {
    config.validate()?;
    let known = config.n_values.contains(&row.n)
        && config.k_values.contains(&row.k)
        && config.l_values.contains(&row.l)
        && row.repetition < config.repetitions
        && row.g == config.gates_for(row.n)
        && row.error_kind == config.error_kind
        && row.experiment == config.experiment;
    if !known {
        return Err(Error::invalid(format!(
            "row n={} k={} l={} repetition={} is not part of this campaign",
            row.n, row.k, row.l, row.repetition
        )));
    }
    let ideal = ideal_circuit(config, row.n, row.repetition)?;
    let (plan, mut stream) = injection_plan(config, row.n, row.k, row.l, row.repetition)?;
    let (corrupted, record) = inject(&ideal, &plan, &mut stream)?;
    Ok(Replay {
        ideal,
        corrupted,
        record,
        stimuli: stimulus_stream(config, row.repetition),
        max_trials: config.trials_for(row.n),
    })
}

/// Statistics for one `(experiment, n, g, k, l, error_kind)` group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub experiment: Experiment,
    pub n: usize,
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub error_kind: ErrorKindName,
    pub samples: usize,
    /// Rows that ran out of trials; excluded from `mean` and `median`.
    pub undetected: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// `(x, fraction of all samples detected within x trials)` at every
    /// distinct detected trial count.
    pub cdf: Vec<(u64, f64)>,
    /// Expected trials for `l` independent worst-case errors of size `k`.
    pub best_case: f64,
}

impl GroupSummary {
    /// Empirical cdf evaluated at `x`.
    pub fn cdf_at(&self, x: u64) -> f64 {
        match self.cdf.partition_point(|&(t, _)| t <= x) {
            0 => 0.0,
            i => self.cdf[i - 1].1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub groups: Vec<GroupSummary>,
}

impl SummaryStats {
    pub fn group(&self, n: usize, k: usize, l: usize) -> Option<&GroupSummary> {
        self.groups
            .iter()
            .find(|s| s.n == n && s.k == k && s.l == l)
    }
}

type GroupKey = (Experiment, usize, usize, usize, usize, ErrorKindName);

pub fn summarize(table: &ResultsTable) -> Result<SummaryStats> {
    if table.rows.is_empty() {
        return Err(Error::invalid("cannot summarize an empty table"));
    }
    let mut grouped: BTreeMap<GroupKey, Vec<&Row>> = BTreeMap::new();
    for row in &table.rows {
        grouped
            .entry((row.experiment, row.n, row.g, row.k, row.l, row.error_kind))
            .or_default()
            .push(row);
    }
    let groups = grouped
        .into_iter()
        .map(|((experiment, n, g, k, l, error_kind), rows)| {
            let mut hits: Vec<u64> = rows
                .iter()
                .filter(|r| r.detected)
                .map(|r| r.trials_used)
                .collect();
            hits.sort_unstable();
            let samples = rows.len();
            let mean = (!hits.is_empty())
                .then(|| hits.iter().map(|&t| t as f64).sum::<f64>() / hits.len() as f64);
            let median = (!hits.is_empty()).then(|| {
                let m = hits.len() / 2;
                if hits.len() % 2 == 1 {
                    hits[m] as f64
                } else {
                    (hits[m - 1] + hits[m]) as f64 / 2.0
                }
            });
            let mut cdf: Vec<(u64, f64)> = Vec::new();
            for (i, &t) in hits.iter().enumerate() {
                let frac = (i + 1) as f64 / samples as f64;
                match cdf.last_mut() {
                    Some(last) if last.0 == t => last.1 = frac,
                    _ => cdf.push((t, frac)),
                }
            }
            Ok(GroupSummary {
                experiment,
                n,
                g,
                k,
                l,
                error_kind,
                samples,
                undetected: samples - hits.len(),
                mean,
                median,
                cdf,
                best_case: best_case_expected_trials(k as u32, l as u32)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SummaryStats { groups })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl ResultsTable {
    /// Writes the rows as CSV: mandatory header, LF line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for row in &self.rows {
            w.serialize(row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads back rows written by [`ResultsTable::write_csv`].
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers().map_err(csv_err)?;
        if header.iter().ne(CSV_COLUMNS) {
            return Err(Error::format("results csv", "unexpected header"));
        }
        let rows = r
            .deserialize::<Row>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        Ok(ResultsTable {
            code_version: CODE_VERSION.to_string(),
            config: None,
            rows,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("results json", e))
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::format("results csv", format!("{other:?}")),
    }
}

pub const SUMMARY_CSV_COLUMNS: [&str; 11] = [
    "experiment",
    "n",
    "g",
    "k",
    "l",
    "error_kind",
    "samples",
    "undetected",
    "mean",
    "median",
    "best_case",
];

impl SummaryStats {
    /// One line per group; the cdf is only in the JSON form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(SUMMARY_CSV_COLUMNS).map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for s in &self.groups {
            let experiment = serde_json::to_value(s.experiment).expect("enum serializes");
            let kind = serde_json::to_value(s.error_kind).expect("enum serializes");
            w.write_record([
                experiment.as_str().unwrap_or_default().to_string(),
                s.n.to_string(),
                s.g.to_string(),
                s.k.to_string(),
                s.l.to_string(),
                kind.as_str().unwrap_or_default().to_string(),
                s.samples.to_string(),
                s.undetected.to_string(),
                opt(s.mean),
                opt(s.median),
                s.best_case.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Anything [`emit`] can write.
pub enum Emittable<'a> {
    Table(&'a ResultsTable),
    Summary(&'a SummaryStats),
}

struct Counting<W> {
    inner: W,
    written: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.written += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Writes a table or summary to `out`, returning the byte count.
pub fn emit_to<W: Write>(what: Emittable<'_>, format: OutputFormat, out: W) -> Result<u64> {
    let mut out = Counting {
        inner: out,
        written: 0,
    };
    match (what, format) {
        (Emittable::Table(t), OutputFormat::Csv) => t.write_csv(&mut out)?,
        (Emittable::Summary(s), OutputFormat::Csv) => s.write_csv(&mut out)?,
        (Emittable::Table(t), OutputFormat::Json) => writeln!(out, "{}", t.to_json())?,
        (Emittable::Summary(s), OutputFormat::Json) => writeln!(out, "{}", s.to_json())?,
    }
    out.flush()?;
    Ok(out.written)
}

/// Writes a table or summary to a file.
pub fn emit(what: Emittable<'_>, format: OutputFormat, destination: &Path) -> Result<u64> {
    let file = File::create(destination)
        .map_err(|e| Error::from(e).context(format!("creating {}", destination.display())))?;
    emit_to(what, format, BufWriter::new(file))
}
