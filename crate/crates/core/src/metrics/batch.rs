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

use crate::molgraph::Molecule;
use crate::smiles::{canonical_smiles, parse_molecule, CanonicalSmiles, InvalidMolecule};

/// Generator outputs with their parse outcome and, when valid, their
/// canonical key.
#[derive(Debug, Clone)]
pub struct GenerationBatch {
    raw: Vec<String>,
    parsed: Vec<Result<Molecule, InvalidMolecule>>,
    canonical: Vec<Option<CanonicalSmiles>>,
}

impl GenerationBatch {
    pub fn new(raw: Vec<String>) -> GenerationBatch {
        let parsed: Vec<Result<Molecule, InvalidMolecule>> = raw.par_iter().map(|s| parse_molecule(s.trim())).collect();
        let canonical = parsed.par_iter().map(|p| p.as_ref().ok().map(canonical_smiles)).collect();
        GenerationBatch { raw, parsed, canonical }
    }

    pub fn from_strs<S: AsRef<str>>(raw: &[S]) -> GenerationBatch {
        GenerationBatch::new(raw.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// Items already parsed elsewhere, all valid.
    pub fn from_molecules(items: impl IntoIterator<Item = (String, Molecule, CanonicalSmiles)>) -> GenerationBatch {
        let mut batch = GenerationBatch::new(Vec::new());
        for (raw, m, c) in items {
            batch.raw.push(raw);
            batch.parsed.push(Ok(m));
            batch.canonical.push(Some(c));
        }
        batch
    }

    /// Append another batch, keeping item order.
    pub fn extend(&mut self, other: GenerationBatch) {
        self.raw.extend(other.raw);
        self.parsed.extend(other.parsed);
        self.canonical.extend(other.canonical);
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw_outputs(&self) -> &[String] {
        &self.raw
    }

    pub fn parsed(&self) -> &[Result<Molecule, InvalidMolecule>] {
        &self.parsed
    }

    /// Canonical key per item; `None` exactly on invalid items.
    pub fn canonical(&self) -> &[Option<CanonicalSmiles>] {
        &self.canonical
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.parsed[i].is_ok()
    }

    pub fn valid_count(&self) -> usize {
        self.parsed.iter().filter(|p| p.is_ok()).count()
    }

    /// Valid items in batch order as (index, molecule, key).
    pub fn valid(&self) -> impl Iterator<Item = (usize, &Molecule, &CanonicalSmiles)> {
        self.parsed.iter().zip(&self.canonical).enumerate().filter_map(|(i, (p, c))| match (p, c) {
            (Ok(m), Some(c)) => Some((i, m, c)),
            _ => None,
        })
    }
}
