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

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::descriptors::{NormalizationSpec, ParameterTables};

use super::{
    diversity, novelty_flags, property_metrics, unique_count, uniqueness, validity, FingerprintParams, GenerationBatch,
    MetricError, ReferenceSets, Stat,
};

/// The nine reported metrics in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Reconstruction,
    Validity,
    Novelty,
    Uniqueness,
    Diversity,
    Np,
    Sol,
    Sas,
    Qed,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Reconstruction,
        Metric::Validity,
        Metric::Novelty,
        Metric::Uniqueness,
        Metric::Diversity,
        Metric::Np,
        Metric::Sol,
        Metric::Sas,
        Metric::Qed,
    ];

    pub const PROPERTIES: [Metric; 4] = [Metric::Np, Metric::Sol, Metric::Sas, Metric::Qed];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Reconstruction => "Reconstruction",
            Metric::Validity => "Validity",
            Metric::Novelty => "Novelty",
            Metric::Uniqueness => "Uniqueness",
            Metric::Diversity => "Diversity",
            Metric::Np => "NP",
            Metric::Sol => "Sol.",
            Metric::Sas => "SAS",
            Metric::Qed => "QED",
        }
    }

    /// Whether larger values are better.
    pub fn higher_is_better(self) -> bool {
        self != Metric::Sas
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub fingerprint: FingerprintParams,
    pub diversity_k: usize,
    pub diversity_seed: u64,
    pub normalization: NormalizationSpec,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            fingerprint: FingerprintParams::default(),
            diversity_k: 100,
            diversity_seed: 0,
            normalization: NormalizationSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub n_requested: Option<usize>,
    pub n_generated: usize,
    pub n_valid: usize,
    pub n_unique: usize,
    pub n_novel: usize,
    pub n_reconstruction_pairs: usize,
    /// Fewer items arrived than were requested.
    pub short_batch: bool,
}

/// Settings and table versions a report was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub metrics: MetricConfig,
    pub table_hashes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub values: BTreeMap<Metric, Option<Stat>>,
    pub counts: Counts,
    pub config: ConfigSnapshot,
}

impl MetricReport {
    /// A report with every metric `NA`.
    pub fn empty(config: ConfigSnapshot) -> MetricReport {
        MetricReport { values: Metric::ALL.iter().map(|&m| (m, None)).collect(), counts: Counts::default(), config }
    }

    pub fn get(&self, m: Metric) -> Option<Stat> {
        self.values.get(&m).copied().flatten()
    }

    pub fn set(&mut self, m: Metric, v: Option<Stat>) {
        self.values.insert(m, v);
    }

    /// All nine metrics in table order.
    pub fn rows(&self) -> Vec<(Metric, Option<Stat>)> {
        Metric::ALL.iter().map(|&m| (m, self.get(m))).collect()
    }
}

/// Every metric except reconstruction over one batch of samples.
/// Diversity is `NA` when `refs` has no fingerprint pool.
pub fn score_samples(
    batch: &GenerationBatch,
    refs: &ReferenceSets,
    tables: &ParameterTables,
    cfg: &MetricConfig,
) -> Result<MetricReport, MetricError> {
    cfg.normalization.validate()?;
    let mut report =
        MetricReport::empty(ConfigSnapshot { metrics: cfg.clone(), table_hashes: tables.hashes().clone() });
    let v = validity(batch);
    let novel = novelty_flags(batch, refs);
    let n_novel = novel.iter().filter(|&&f| f).count();
    report.set(Metric::Validity, v.stat);
    report.set(Metric::Novelty, super::indicator_stat(n_novel, novel.len()));
    report.set(Metric::Uniqueness, uniqueness(batch));
    let div = if refs.pool().is_empty() { None } else { diversity(batch, refs, cfg.diversity_k, cfg.diversity_seed)? };
    report.set(Metric::Diversity, div);
    let p = property_metrics(batch, tables, &cfg.normalization)?;
    report.set(Metric::Np, p.np);
    report.set(Metric::Sol, p.sol);
    report.set(Metric::Sas, p.sas);
    report.set(Metric::Qed, p.qed);
    report.counts = Counts {
        n_requested: None,
        n_generated: batch.len(),
        n_valid: batch.valid_count(),
        n_unique: unique_count(batch),
        n_novel,
        n_reconstruction_pairs: 0,
        short_batch: false,
    };
    Ok(report)
}
