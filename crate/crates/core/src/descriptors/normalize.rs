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

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RawDescriptors;

/// Linear map of a raw value onto 0..100, with `a` at 0 and `b` at 100.
/// `b < a` inverts the direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub a: f64,
    pub b: f64,
}

impl Range {
    pub const fn new(a: f64, b: f64) -> Range {
        Range { a, b }
    }

    pub fn percent(&self, raw: f64) -> f64 {
        100.0 * ((raw - self.a) / (self.b - self.a)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("normalization range for {property} has equal endpoints ({value})")]
pub struct NormalizationError {
    pub property: &'static str,
    pub value: f64,
}

/// Percentage mapping for each reported property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationSpec {
    /// Over the natural-product likeness score.
    pub np: Range,
    /// Over Crippen logP.
    pub sol: Range,
    /// Over the raw synthetic accessibility score.
    pub sas: Range,
    pub qed: Range,
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        NormalizationSpec {
            np: Range::new(-3.0, 1.0),
            sol: Range::new(-2.12178879609, 6.0429063424),
            sas: Range::new(5.0, 1.5),
            qed: Range::new(0.0, 1.0),
        }
    }
}

impl NormalizationSpec {
    pub fn validate(&self) -> Result<(), NormalizationError> {
        for (property, r) in [("np", self.np), ("sol", self.sol), ("sas", self.sas), ("qed", self.qed)] {
            if r.a == r.b || !r.a.is_finite() || !r.b.is_finite() {
                return Err(NormalizationError { property, value: r.a });
            }
        }
        Ok(())
    }
}

/// The four reported property scores, each in [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyPercentages {
    pub np: f64,
    pub sol: f64,
    pub sas: f64,
    pub qed: f64,
}

pub fn normalize(raw: &RawDescriptors, spec: &NormalizationSpec) -> PropertyPercentages {
    PropertyPercentages {
        np: spec.np.percent(raw.np_raw),
        sol: spec.sol.percent(raw.logp),
        sas: spec.sas.percent(raw.sa_raw),
        qed: spec.qed.percent(raw.qed_raw),
    }
}
