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

//! Datasets, generator adapters and the sampling and reconstruction
//! evaluation processes.
//!
//! # Adapter protocol
//!
//! A subprocess adapter reads one JSON request per line on stdin and
//! answers on stdout:
//!
//! ```text
//! > {"cmd":"capabilities"}
//! < {"capabilities":{"sample":true,"reconstruct":true},"name":"my-model","version":"0.3"}
//! > {"cmd":"sample","n":2,"seed":7}
//! < {"smiles":"CCO"}
//! < {"smiles":"c1ccccc1"}
//! < {"done":true}
//! > {"cmd":"reconstruct","smiles":["CCO"],"samples_per_input":20,"seed":7}
//! < {"index":0,"outputs":["CCO","CCO",...]}
//! < {"done":true}
//! ```
//!
//! Latent sampling is the adapter's job: the harness asks for counts and
//! passes a seed. For reconstruction the harness sends one test molecule
//! per request and the adapter encodes it `samples_per_input` times. A
//! `done` that arrives before `n` samples marks the batch short; the
//! report is computed over what arrived.

mod adapter;
mod builtin;
mod dataset;
mod subprocess;

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{ParameterTables, TableError};
use crate::metrics::{
    reconstruction, score_samples, ConfigSnapshot, GenerationBatch, Metric, MetricConfig, MetricError, MetricReport,
    ReferenceSets,
};
use crate::smiles::CanonicalSmiles;

pub use adapter::{
    wire, AdapterError, AdapterIdentity, AdapterKind, Capabilities, Generator, GeneratorAdapter, SampleOutcome,
};
pub use builtin::{BuiltinGenerator, BuiltinKind, NgramModel, NGRAM_ORDER};
pub use dataset::{
    Dataset, DatasetEntry, DatasetError, DatasetName, LoadReport, Provenance, Rejection, Split, SplitError,
};
pub use subprocess::{serve, SubprocessGenerator};

/// Environment variable naming the data directory.
pub const DATA_DIR_ENV: &str = "MOLBENCH_DATA_DIR";

const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_samples: usize,
    pub samples_per_input: usize,
    pub seed: u64,
    pub metrics: MetricConfig,
    pub timeout_secs: u64,
    /// Use only the first this many test molecules for reconstruction.
    pub reconstruction_limit: Option<usize>,
    /// Independent runs with seeds `seed`, `seed + 1`, ...
    pub repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_samples: 20_000,
            samples_per_input: 20,
            seed: 0,
            metrics: MetricConfig::default(),
            timeout_secs: 600,
            reconstruction_limit: None,
            repeats: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |what: &str| Err(HarnessError::Config(format!("{what} must be at least 1")));
        if self.n_samples == 0 {
            return bad("n_samples");
        }
        if self.samples_per_input == 0 {
            return bad("samples_per_input");
        }
        if self.repeats == 0 {
            return bad("repeats");
        }
        if self.timeout_secs == 0 {
            return bad("timeout_secs");
        }
        self.metrics.normalization.validate().map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Tables(#[from] TableError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("unknown dataset {0:?} (expected qm9, zinc or a path)")]
    UnknownDataset(String),
}

/// The data directory: `$MOLBENCH_DATA_DIR`, else `./data`, else the
/// `data` directory of the source checkout.
pub fn data_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        return PathBuf::from(dir);
    }
    let local = PathBuf::from("data");
    if local.join("params").is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Descriptor tables from `<data>/params`.
pub fn load_tables(data: &Path) -> Result<ParameterTables, HarnessError> {
    Ok(ParameterTables::load(data.join("params"))?)
}

/// Resolve `qm9`, `zinc` or a path to a SMILES file. A path `x.smi` uses
/// `x.split` next to it when present.
pub fn load_named_dataset(name: &str, data: &Path) -> Result<Dataset, HarnessError> {
    let (kind, smi, split) = match name {
        "qm9" => (DatasetName::Qm9, data.join("qm9/qm9.smi"), Some(data.join("qm9/qm9.split"))),
        "zinc" => {
            (DatasetName::Zinc, data.join("zinc/zinc_moses_25k.smi"), Some(data.join("zinc/zinc_moses_25k.split")))
        }
        other => {
            let path = PathBuf::from(other);
            if path.extension().is_none() && !path.exists() {
                return Err(HarnessError::UnknownDataset(other.to_string()));
            }
            let split = path.with_extension("split");
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (DatasetName::Custom(stem), path.clone(), split.is_file().then_some(split))
        }
    };
    Ok(Dataset::load(kind, smi, split.as_deref())?)
}

/// Novelty keys and diversity fingerprints over the training split.
pub fn reference_sets(dataset: &Dataset, cfg: &MetricConfig) -> ReferenceSets {
    ReferenceSets::from_training(dataset.train().map(|(m, c)| (c, m)), cfg.fingerprint)
}

fn snapshot(tables: &ParameterTables, cfg: &RunConfig) -> ConfigSnapshot {
    ConfigSnapshot { metrics: cfg.metrics.clone(), table_hashes: tables.hashes().clone() }
}

/// Request `cfg.n_samples` samples and score them. Items are parsed in
/// the background while the adapter is still producing.
pub fn run_sampling_process(
    adapter: &mut GeneratorAdapter,
    cfg: &RunConfig,
    refs: &ReferenceSets,
    tables: &ParameterTables,
) -> Result<MetricReport, HarnessError> {
    cfg.validate()?;
    if !adapter.capabilities().can_sample {
        return Err(AdapterError::Unsupported("sample").into());
    }
    let n = cfg.n_samples;
    let (outcome, batch) = thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<Vec<String>>();
        let worker = scope.spawn(move || {
            let mut batch = GenerationBatch::new(Vec::new());
            for chunk in rx {
                batch.extend(GenerationBatch::new(chunk));
            }
            batch
        });
        let mut chunk = Vec::with_capacity(CHUNK);
        let outcome = adapter.sample(n, cfg.seed, &mut |s| {
            chunk.push(s);
            if chunk.len() == CHUNK {
                let _ = tx.send(std::mem::replace(&mut chunk, Vec::with_capacity(CHUNK)));
            }
        });
        if !chunk.is_empty() {
            let _ = tx.send(chunk);
        }
        drop(tx);
        (outcome, worker.join().expect("parser thread"))
    });
    let outcome = outcome?;
    let mut report = score_samples(&batch, refs, tables, &cfg.metrics)?;
    report.counts.n_requested = Some(n);
    report.counts.short_batch = outcome.short || batch.len() < n;
    Ok(report)
}

/// Reconstruction over the valid test molecules, one request each. An
/// adapter without an encoder yields a report whose reconstruction is
/// `NA`.
pub fn run_reconstruction_process(
    adapter: &mut GeneratorAdapter,
    cfg: &RunConfig,
    dataset: &Dataset,
    tables: &ParameterTables,
) -> Result<MetricReport, HarnessError> {
    cfg.validate()?;
    let mut report = MetricReport::empty(snapshot(tables, cfg));
    if !adapter.capabilities().can_reconstruct {
        return Ok(report);
    }
    let limit = cfg.reconstruction_limit.unwrap_or(usize::MAX);
    let tests: Vec<(&str, &CanonicalSmiles)> = dataset
        .split
        .test
        .iter()
        .filter_map(|&i| dataset.entries[i].molecule.as_ref().map(|(_, c)| (dataset.entries[i].raw.as_str(), c)))
        .take(limit)
        .collect();
    let mut outputs = Vec::with_capacity(tests.len());
    for (i, (raw, _)) in tests.iter().enumerate() {
        let mut outs =
            adapter.reconstruct(&[raw.to_string()], cfg.samples_per_input, cfg.seed.wrapping_add(i as u64))?;
        outputs.push(outs.pop().unwrap_or_default());
    }
    let inputs: Vec<CanonicalSmiles> = tests.iter().map(|(_, c)| (*c).clone()).collect();
    let r = reconstruction(&inputs, &outputs)?;
    report.set(Metric::Reconstruction, r.stat);
    report.counts.n_reconstruction_pairs = r.pairs;
    Ok(report)
}

/// Both processes for each repeat. The sampling report gains the
/// reconstruction value; repeats use seeds `seed`, `seed + 1`, ...
pub fn evaluate(
    adapter: &mut GeneratorAdapter,
    cfg: &RunConfig,
    dataset: &Dataset,
    refs: &ReferenceSets,
    tables: &ParameterTables,
) -> Result<Vec<MetricReport>, HarnessError> {
    cfg.validate()?;
    let mut runs = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats {
        let cfg = RunConfig { seed: cfg.seed.wrapping_add(r as u64), ..cfg.clone() };
        let mut report = run_sampling_process(adapter, &cfg, refs, tables)?;
        let rec = run_reconstruction_process(adapter, &cfg, dataset, tables)?;
        report.set(Metric::Reconstruction, rec.get(Metric::Reconstruction));
        report.counts.n_reconstruction_pairs = rec.counts.n_reconstruction_pairs;
        runs.push(report);
    }
    Ok(runs)
}

/// Build a generator from `builtin:<kind>` or `exec:<command>`. Builtins
/// are fitted on the training split of `dataset`.
pub fn open_generator(spec: &str, dataset: &Dataset, timeout: Duration) -> Result<GeneratorAdapter, HarnessError> {
    let inner: Box<dyn Generator> = if let Some(kind) = spec.strip_prefix("builtin:") {
        let kind: BuiltinKind = kind.parse().map_err(HarnessError::Config)?;
        Box::new(BuiltinGenerator::new(kind, dataset.smiles(&dataset.split.train))?)
    } else if let Some(cmd) = spec.strip_prefix("exec:") {
        Box::new(SubprocessGenerator::spawn(cmd, timeout)?)
    } else {
        return Err(HarnessError::Config(format!("generator {spec:?} must start with builtin: or exec:")));
    };
    Ok(GeneratorAdapter::handshake(inner)?)
}
