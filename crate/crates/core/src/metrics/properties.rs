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

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptors::{
    describe, normalize, DescriptorError, NormalizationSpec, ParameterTables, PropertyPercentages,
};

use super::{population_stat, GenerationBatch, Stat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyMetrics {
    pub np: Option<Stat>,
    pub sol: Option<Stat>,
    pub sas: Option<Stat>,
    pub qed: Option<Stat>,
}

/// Mean and spread of each normalized property over the valid items.
pub fn property_metrics(
    batch: &GenerationBatch,
    tables: &ParameterTables,
    spec: &NormalizationSpec,
) -> Result<PropertyMetrics, DescriptorError> {
    let mols: Vec<_> = batch.valid().map(|(_, m, _)| m).collect();
    let pcts: Vec<PropertyPercentages> =
        mols.par_iter().map(|m| describe(m, tables).map(|raw| normalize(&raw, spec))).collect::<Result<_, _>>()?;
    let column = |f: fn(&PropertyPercentages) -> f64| population_stat(&pcts.iter().map(f).collect::<Vec<_>>());
    Ok(PropertyMetrics { np: column(|p| p.np), sol: column(|p| p.sol), sas: column(|p| p.sas), qed: column(|p| p.qed) })
}
