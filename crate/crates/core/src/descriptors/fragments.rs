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

use crate::matching::environment_counts;
use crate::molgraph::{possible_stereocenters, Molecule};

use super::{DescriptorError, ParameterTables};

const SA_UNKNOWN_FRAGMENT: f64 = -4.0;
const SA_RAW_MIN: f64 = -4.0;
const SA_RAW_MAX: f64 = 2.5;

/// The parts of the synthetic accessibility score before rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaTerms {
    pub fragment: f64,
    pub size_penalty: f64,
    pub stereo_penalty: f64,
    pub spiro_penalty: f64,
    pub bridge_penalty: f64,
    pub macrocycle_penalty: f64,
    pub density_correction: f64,
}

impl SaTerms {
    pub fn raw(&self) -> f64 {
        self.fragment
            - self.size_penalty
            - self.stereo_penalty
            - self.spiro_penalty
            - self.bridge_penalty
            - self.macrocycle_penalty
            + self.density_correction
    }

    /// Map the raw sum onto 1 (easy) to 10 (hard).
    pub fn score(&self) -> f64 {
        let mut s = 11.0 - (self.raw() - SA_RAW_MIN + 1.0) / (SA_RAW_MAX - SA_RAW_MIN) * 9.0;
        if s > 8.0 {
            s = 8.0 + (s - 8.0).ln();
        }
        s.clamp(1.0, 10.0)
    }
}

pub fn sa_terms(mol: &Molecule, t: &ParameterTables) -> Result<SaTerms, DescriptorError> {
    let table = t.sa_fragments.as_ref().ok_or(DescriptorError::MissingTable("sa_fragments"))?;
    let n = mol.atom_count();
    if n == 0 {
        return Err(DescriptorError::EmptyMolecule);
    }
    let env = environment_counts(mol, 2);
    let mut total = 0.0;
    let mut count = 0u32;
    for (id, &c) in &env {
        total += table.get(id).copied().unwrap_or(SA_UNKNOWN_FRAGMENT) * c as f64;
        count += c;
    }
    let ring = mol.ring_info();
    let nf = n as f64;
    let macrocycle = ring.rings().iter().any(|r| r.len() > 8);
    let bits = env.len() as f64;
    Ok(SaTerms {
        fragment: total / count as f64,
        size_penalty: nf.powf(1.005) - nf,
        stereo_penalty: ((possible_stereocenters(mol).len() + 1) as f64).log10(),
        spiro_penalty: ((ring.spiro_atoms().len() + 1) as f64).log10(),
        bridge_penalty: ((ring.bridgehead_atoms(mol).len() + 1) as f64).log10(),
        macrocycle_penalty: if macrocycle { 2f64.log10() } else { 0.0 },
        density_correction: if nf > bits { 0.5 * (nf / bits).ln() } else { 0.0 },
    })
}

/// Synthetic accessibility in [1, 10].
pub fn sa_score(mol: &Molecule, t: &ParameterTables) -> Result<f64, DescriptorError> {
    Ok(sa_terms(mol, t)?.score())
}

/// Natural-product likeness, squashed logarithmically beyond +/-4.
pub fn np_score(mol: &Molecule, t: &ParameterTables) -> Result<f64, DescriptorError> {
    let table = t.np_fragments.as_ref().ok_or(DescriptorError::MissingTable("np_fragments"))?;
    let n = mol.atom_count();
    if n == 0 {
        return Err(DescriptorError::EmptyMolecule);
    }
    let env = environment_counts(mol, 2);
    let sum: f64 = env.keys().filter_map(|id| table.get(id)).sum();
    let s = sum / n as f64;
    let squashed = if s > 4.0 {
        4.0 + (s - 3.0).log10()
    } else if s < -4.0 {
        -4.0 - (-s - 3.0).log10()
    } else {
        s
    };
    Ok(squashed.clamp(-5.0, 5.0))
}
