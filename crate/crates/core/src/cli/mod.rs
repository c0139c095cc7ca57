// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! The `molbench` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---:|---|
//! | 0 | success |
//! | 2 | usage error (bad flags, unknown dataset or generator) |
//! | 3 | invalid configuration |
//! | 4 | input or output failure |
//! | 5 | adapter protocol error |
//! | 6 | adapter timeout |
//! | 7 | adapter failed to start or exited |
//! | 8 | scoring failure |

mod report;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::descriptors::{describe, normalize, ParameterTables};
use crate::harness::{
    self, AdapterError, BuiltinGenerator, BuiltinKind, Dataset, DatasetError, HarnessError, RunConfig,
};
use crate::metrics::{property_metrics, GenerationBatch, Metric, MetricReport};
use crate::smiles::{canonicalize, parse_molecule};

pub use report::{stat_cells, Cell, Format, ReportDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PROTOCOL: i32 = 5;
pub const EXIT_TIMEOUT: i32 = 6;
pub const EXIT_ADAPTER: i32 = 7;
pub const EXIT_METRIC: i32 = 8;

#[derive(Debug, Parser)]
#[command(name = "molbench", version, about = "Score molecule generators and datasets")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory holding `params/`, `qm9/` and `zinc/`.
    #[arg(long, global = true, env = harness::DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the sampling and reconstruction processes against a generator.
    Evaluate(EvaluateArgs),
    /// Property scores of a dataset.
    ScoreDataset(ScoreDatasetArgs),
    /// Canonical SMILES per input line.
    Canonicalize(StreamArgs),
    /// Raw and normalized descriptors per input line.
    Descriptors(StreamArgs),
    /// Serve a builtin generator over the adapter protocol on stdin/stdout.
    #[command(hide = true)]
    Adapter(AdapterArgs),
}

#[derive(Debug, Args, Default)]
pub struct EvaluateArgs {
    /// `qm9`, `zinc` or a path to a SMILES file.
    #[arg(long)]
    pub dataset: Option<String>,
    /// `builtin:<replay|random_chars|ngram|echo>` or `exec:<command>`.
    #[arg(long)]
    pub generator: Option<String>,
    /// Number of samples to request.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples_per_input: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Seconds to wait for each adapter message.
    #[arg(long)]
    pub timeout: Option<u64>,
    /// Reconstruct only the first this many test molecules.
    #[arg(long)]
    pub reconstruction_limit: Option<usize>,
    #[arg(long)]
    pub diversity_k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SplitChoice {
    #[default]
    All,
    Train,
    Test,
}

#[derive(Debug, Args, Default)]
pub struct ScoreDatasetArgs {
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_enum)]
    pub split: Option<SplitChoice>,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Input file, one SMILES per line (default: stdin).
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdapterArgs {
    pub kind: String,
    #[arg(long)]
    pub dataset: Option<String>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub dataset: Option<String>,
    pub generator: Option<String>,
    pub split: Option<SplitChoice>,
    pub run: RunConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, #[source] io::Error),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(..) => EXIT_IO,
            CliError::Harness(h) => match h {
                HarnessError::Config(_) => EXIT_CONFIG,
                HarnessError::UnknownDataset(_) => EXIT_USAGE,
                HarnessError::Dataset(_) | HarnessError::Tables(_) => EXIT_IO,
                HarnessError::Metric(_) => EXIT_METRIC,
                HarnessError::Adapter(a) => match a {
                    AdapterError::Protocol(_) | AdapterError::Unsupported(_) => EXIT_PROTOCOL,
                    AdapterError::Timeout(_) => EXIT_TIMEOUT,
                    AdapterError::Spawn { .. } | AdapterError::Exited { .. } => EXIT_ADAPTER,
                    AdapterError::EmptyTrainingSet => EXIT_CONFIG,
                },
            },
        }
    }

    /// Short machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self.exit_code() {
            EXIT_USAGE => "usage",
            EXIT_CONFIG => "config",
            EXIT_IO => "io",
            EXIT_PROTOCOL => "protocol",
            EXIT_TIMEOUT => "timeout",
            EXIT_ADAPTER => "adapter",
            _ => "metric",
        }
    }
}

/// Flags merged over the config file.
struct Settings {
    format: Format,
    out: Option<PathBuf>,
    data_dir: PathBuf,
    file: FileConfig,
}

impl Settings {
    fn tables(&self) -> Result<ParameterTables, CliError> {
        Ok(harness::load_tables(&self.data_dir)?)
    }

    fn dataset(&self, name: Option<&String>) -> Result<Dataset, CliError> {
        let name = name.or(self.file.dataset.as_ref()).ok_or_else(|| CliError::Usage("missing --dataset".into()))?;
        if !matches!(name.as_str(), "qm9" | "zinc") && !Path::new(name).is_file() {
            return Err(CliError::Usage(format!("dataset {name:?} is neither qm9, zinc nor an existing file")));
        }
        Ok(harness::load_named_dataset(name, &self.data_dir)?)
    }

    fn emit(&self, doc: &ReportDocument, stdout: &mut Vec<u8>) -> Result<(), CliError> {
        let text = doc.render(self.format);
        match &self.out {
            Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.clone(), e)),
            None => {
                stdout.extend_from_slice(text.as_bytes());
                Ok(())
            }
        }
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "molbench: {e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> std::process::ExitCode {
    let stdin = io::stdin();
    let code = run(std::env::args_os(), &mut stdin.lock(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::ExitCode::from(code as u8)
}

fn dispatch(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads);
    let settings = Settings {
        format: cli.format.or(file.format).unwrap_or_default(),
        out: cli.out.clone().or(file.out.clone()),
        data_dir: cli.data_dir.clone().or(file.data_dir.clone()).unwrap_or_else(harness::data_dir),
        file,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    match threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => builder = builder.num_threads(n),
        None => {}
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    if let Command::Adapter(a) = &cli.command {
        let mut generator = pool.install(|| adapter_generator(&settings, a))?;
        harness::serve(&mut generator, stdin, stdout).map_err(HarnessError::from)?;
        return Ok(());
    }
    let input = match &cli.command {
        Command::Canonicalize(a) | Command::Descriptors(a) => read_lines(&a.input, stdin)?,
        _ => Vec::new(),
    };
    let mut buf = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(&settings, a, &mut buf),
        Command::ScoreDataset(a) => cmd_score_dataset(&settings, a, &mut buf),
        Command::Canonicalize(_) => cmd_canonicalize(&input, &mut buf),
        Command::Descriptors(_) => cmd_descriptors(&settings, &input, &mut buf),
        Command::Adapter(_) => unreachable!("handled above"),
    });
    stdout.write_all(&buf).and_then(|_| stdout.flush()).map_err(|e| CliError::Io("<stdout>".into(), e))?;
    result
}

fn run_config(settings: &Settings, a: &EvaluateArgs) -> RunConfig {
    let mut cfg = settings.file.run.clone();
    if let Some(n) = a.n {
        cfg.n_samples = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(k) = a.samples_per_input {
        cfg.samples_per_input = k;
    }
    if let Some(r) = a.repeats {
        cfg.repeats = r;
    }
    if let Some(t) = a.timeout {
        cfg.timeout_secs = t;
    }
    if let Some(l) = a.reconstruction_limit {
        cfg.reconstruction_limit = Some(l);
    }
    if let Some(k) = a.diversity_k {
        cfg.metrics.diversity_k = k;
    }
    cfg
}

fn dataset_meta(d: &Dataset) -> serde_json::Value {
    json!({
        "name": d.name.to_string(),
        "path": d.provenance.path,
        "sha256": d.provenance.sha256,
        "split_path": d.provenance.split_path,
        "split_sha256": d.provenance.split_sha256,
        "molecules": d.len(),
        "train": d.split.train.len(),
        "test": d.split.test.len(),
        "rejected": d.report.rejected,
        "over_atom_limit": d.report.oversized.len(),
    })
}

fn metric_columns(repeats: usize) -> Vec<&'static str> {
    if repeats > 1 {
        vec!["run", "metric", "mean", "std"]
    } else {
        vec!["metric", "mean", "std"]
    }
}

fn cmd_evaluate(settings: &Settings, a: &EvaluateArgs, stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = run_config(settings, a);
    cfg.validate()?;
    let spec = a
        .generator
        .as_ref()
        .or(settings.file.generator.as_ref())
        .ok_or_else(|| CliError::Usage("missing --generator".into()))?
        .clone();
    if !spec.starts_with("builtin:") && !spec.starts_with("exec:") {
        return Err(CliError::Usage(format!("generator {spec:?} must start with builtin: or exec:")));
    }
    let tables = settings.tables()?;
    let dataset = settings.dataset(a.dataset.as_ref())?;
    let refs = harness::reference_sets(&dataset, &cfg.metrics);

    let mut doc = ReportDocument::new("Generator evaluation", &metric_columns(cfg.repeats));
    doc.meta("command", "evaluate");
    doc.meta("generator", &spec);
    doc.meta("config", &cfg);
    doc.meta("dataset", dataset_meta(&dataset));
    doc.meta("table_hashes", tables.hashes());

    let outcome = harness::open_generator(&spec, &dataset, cfg.timeout()).and_then(|mut adapter| {
        doc.meta("adapter", json!({ "identity": adapter.identity(), "capabilities": adapter.capabilities() }));
        harness::evaluate(&mut adapter, &cfg, &dataset, &refs, &tables)
    });
    let result = match outcome {
        Ok(runs) => {
            for (r, report) in runs.iter().enumerate() {
                doc.push_metrics(report, (cfg.repeats > 1).then_some(r));
            }
            doc.meta("counts", runs.iter().map(|r| &r.counts).collect::<Vec<_>>());
            Ok(())
        }
        Err(e) => {
            let err = CliError::Harness(e);
            let empty = MetricReport::empty(crate::metrics::ConfigSnapshot {
                metrics: cfg.metrics.clone(),
                table_hashes: tables.hashes().clone(),
            });
            doc.push_metrics(&empty, (cfg.repeats > 1).then_some(0));
            doc.meta(
                "error",
                json!({ "class": err.class(), "exit_code": err.exit_code(), "message": err.to_string() }),
            );
            Err(err)
        }
    };
    doc.meta("wall_clock_secs", (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0);
    settings.emit(&doc, stdout)?;
    result
}

fn cmd_score_dataset(settings: &Settings, a: &ScoreDatasetArgs, stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = settings.file.run.metrics.normalization;
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let tables = settings.tables()?;
    let dataset = settings.dataset(a.dataset.as_ref())?;
    let split = a.split.or(settings.file.split).unwrap_or_default();
    let indices: Vec<usize> = match split {
        SplitChoice::All => (0..dataset.len()).collect(),
        SplitChoice::Train => dataset.split.train.clone(),
        SplitChoice::Test => dataset.split.test.clone(),
    };
    let batch = GenerationBatch::from_molecules(indices.iter().filter_map(|&i| {
        let e = &dataset.entries[i];
        e.molecule.as_ref().map(|(m, c)| (e.raw.clone(), m.clone(), c.clone()))
    }));
    let p = property_metrics(&batch, &tables, &spec).map_err(|e| HarnessError::Metric(e.into()))?;
    let mut doc = ReportDocument::new(format!("Dataset properties: {}", dataset.name), &["metric", "mean", "std"]);
    for (m, s) in [(Metric::Np, p.np), (Metric::Sol, p.sol), (Metric::Sas, p.sas), (Metric::Qed, p.qed)] {
        let [mean, std] = stat_cells(s);
        doc.push(vec![Cell::text(m.label()), mean, std]);
    }
    doc.meta("command", "score-dataset");
    doc.meta("split", split);
    doc.meta("scored", batch.len());
    doc.meta("dataset", dataset_meta(&dataset));
    doc.meta("normalization", spec);
    doc.meta("table_hashes", tables.hashes());
    doc.meta("wall_clock_secs", (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0);
    settings.emit(&doc, stdout)
}

fn read_lines(input: &Option<PathBuf>, stdin: &mut dyn BufRead) -> Result<Vec<String>, CliError> {
    match input {
        Some(p) if p.as_os_str() != "-" => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
            Ok(text.lines().map(str::to_string).collect())
        }
        _ => stdin.lines().collect::<Result<_, _>>().map_err(|e| CliError::Io("<stdin>".into(), e)),
    }
}

fn cmd_canonicalize(lines: &[String], stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let out: Vec<String> = lines
        .par_iter()
        .map(|l| match canonicalize(l.trim()) {
            Ok(c) => c.into_string(),
            Err(e) => format!("INVALID {}", e.reason()),
        })
        .collect();
    for line in out {
        stdout.extend_from_slice(line.as_bytes());
        stdout.push(b'\n');
    }
    Ok(())
}

const DESCRIPTOR_COLUMNS: [&str; 18] = [
    "smiles",
    "status",
    "logp",
    "tpsa",
    "mw",
    "hbd",
    "hba",
    "rot_bonds",
    "aromatic_rings",
    "alerts",
    "sa",
    "qed",
    "np",
    "np_pct",
    "sol_pct",
    "sas_pct",
    "qed_pct",
    "untyped_atoms",
];

fn cmd_descriptors(settings: &Settings, lines: &[String], stdout: &mut Vec<u8>) -> Result<(), CliError> {
    let spec = settings.file.run.metrics.normalization;
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let tables = settings.tables()?;
    let rows: Vec<Vec<Cell>> = lines
        .par_iter()
        .map(|line| {
            let smiles = line.split_whitespace().next().unwrap_or("");
            let raw = parse_molecule(smiles)
                .map_err(|e| e.reason())
                .and_then(|m| describe(&m, &tables).map_err(|e| e.to_string()));
            let mut row = vec![Cell::text(smiles)];
            match raw {
                Ok(d) => {
                    let p = normalize(&d, &spec);
                    let f = |v: f64| Cell::fixed(Some(v), 4);
                    let i = |v: u32| Cell::Integer(v as i64);
                    row.extend([
                        Cell::text("ok"),
                        f(d.logp),
                        f(d.tpsa),
                        f(d.mw),
                        i(d.hbd),
                        i(d.hba),
                        i(d.rot_bonds),
                        i(d.aromatic_rings),
                        i(d.alerts),
                        f(d.sa_raw),
                        f(d.qed_raw),
                        f(d.np_raw),
                        Cell::percent(Some(p.np)),
                        Cell::percent(Some(p.sol)),
                        Cell::percent(Some(p.sas)),
                        Cell::percent(Some(p.qed)),
                        i(d.untyped_atoms),
                    ]);
                }
                Err(reason) => {
                    row.push(Cell::text(format!("INVALID {reason}")));
                    row.extend(std::iter::repeat_n(Cell::Na, DESCRIPTOR_COLUMNS.len() - 2));
                }
            }
            row
        })
        .collect();
    let mut doc = ReportDocument::new("Descriptors", &DESCRIPTOR_COLUMNS);
    doc.rows = rows;
    doc.meta("command", "descriptors");
    doc.meta("normalization", spec);
    doc.meta("table_hashes", tables.hashes());
    settings.emit(&doc, stdout)
}

fn adapter_generator(settings: &Settings, a: &AdapterArgs) -> Result<BuiltinGenerator, CliError> {
    let kind: BuiltinKind = a.kind.parse().map_err(CliError::Usage)?;
    let dataset = settings.dataset(a.dataset.as_ref())?;
    Ok(BuiltinGenerator::new(kind, dataset.smiles(&dataset.split.train)).map_err(HarnessError::from)?)
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Harness(e.into())
    }
}
