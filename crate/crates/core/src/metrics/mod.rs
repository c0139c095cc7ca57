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

//! The nine generation metrics and their aggregation.
//!
//! Every metric is a mean over per-item values with a population standard
//! deviation, reported in percent. A metric with no items to average over
//! is `None` and renders as `NA`.

mod batch;
mod diversity;
mod properties;
mod report;
mod sets;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{DescriptorError, NormalizationError};
use crate::matching::FingerprintError;

pub use batch::GenerationBatch;
pub use diversity::{diversity, diversity_scores, FingerprintParams, ReferenceSets};
pub use properties::{property_metrics, PropertyMetrics};
pub use report::{score_samples, ConfigSnapshot, Counts, Metric, MetricConfig, MetricReport};
pub use sets::{novelty, novelty_flags, reconstruction, unique_count, uniqueness, validity, Reconstruction, Validity};

/// Mean and optional population standard deviation, both in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: Option<f64>,
}

impl Stat {
    pub fn mean_only(mean: f64) -> Stat {
        Stat { mean, std: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("diversity needs a non-empty training fingerprint pool")]
    EmptyPool,
    #[error("{inputs} reconstruction inputs but {outputs} output lists")]
    LengthMismatch { inputs: usize, outputs: usize },
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Normalization(#[from] NormalizationError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}

/// Population statistics of `values`, which are already in percent. The
/// result does not depend on the order of `values`.
pub fn population_stat(values: &[f64]) -> Option<Stat> {
    if values.is_empty() {
        return None;
    }
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some(Stat { mean, std: Some(var.sqrt()) })
}

/// Percent of `hits` among `n` 0/1 indicators with its Bernoulli std.
pub fn indicator_stat(hits: usize, n: usize) -> Option<Stat> {
    if n == 0 {
        return None;
    }
    let p = hits as f64 / n as f64;
    Some(Stat { mean: 100.0 * p, std: Some(100.0 * (p * (1.0 - p)).max(0.0).sqrt()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_std() {
        let s = indicator_stat(3, 4).unwrap();
        assert_eq!(s.mean, 75.0);
        assert!((s.std.unwrap() - 100.0 * (0.75f64 * 0.25).sqrt()).abs() < 1e-12);
        assert_eq!(indicator_stat(0, 0), None);
        assert_eq!(indicator_stat(5, 5).unwrap().std, Some(0.0));
    }

    #[test]
    fn population_not_sample() {
        let s = population_stat(&[0.0, 100.0]).unwrap();
        assert_eq!((s.mean, s.std), (50.0, Some(50.0)));
        assert_eq!(population_stat(&[42.0]).unwrap().std, Some(0.0));
    }
}
