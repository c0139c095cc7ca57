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

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::matching::{morgan_fingerprint, tanimoto, Fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
use crate::molgraph::Molecule;
use crate::smiles::CanonicalSmiles;

use super::{population_stat, GenerationBatch, MetricError, Stat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintParams {
    pub radius: u32,
    pub width: usize,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        FingerprintParams { radius: DEFAULT_RADIUS, width: DEFAULT_WIDTH }
    }
}

impl FingerprintParams {
    pub fn fingerprint(&self, mol: &Molecule) -> Fingerprint {
        morgan_fingerprint(mol, self.radius, self.width)
    }
}

/// What generated molecules are compared against: the training keys for
/// novelty and training fingerprints for diversity.
#[derive(Debug, Clone, Default)]
pub struct ReferenceSets {
    training: HashSet<CanonicalSmiles>,
    pool: Vec<Fingerprint>,
    params: FingerprintParams,
}

impl ReferenceSets {
    pub fn from_training<'a>(
        items: impl IntoIterator<Item = (&'a CanonicalSmiles, &'a Molecule)>,
        params: FingerprintParams,
    ) -> ReferenceSets {
        let items: Vec<(&CanonicalSmiles, &Molecule)> = items.into_iter().collect();
        let pool = items.par_iter().map(|(_, m)| params.fingerprint(m)).collect();
        let training = items.iter().map(|(c, _)| (*c).clone()).collect();
        ReferenceSets { training, pool, params }
    }

    /// Novelty keys only; diversity fails on these sets.
    pub fn keys_only(training: impl IntoIterator<Item = CanonicalSmiles>) -> ReferenceSets {
        ReferenceSets { training: training.into_iter().collect(), ..ReferenceSets::default() }
    }

    pub fn contains(&self, key: &CanonicalSmiles) -> bool {
        self.training.contains(key)
    }

    pub fn training_len(&self) -> usize {
        self.training.len()
    }

    pub fn pool(&self) -> &[Fingerprint] {
        &self.pool
    }

    pub fn params(&self) -> FingerprintParams {
        self.params
    }
}

/// Seed for one molecule, so scores do not depend on batch order.
fn molecule_seed(seed: u64, key: &CanonicalSmiles) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key.as_str().as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

/// Per valid item: 100 times the mean Tanimoto distance to `k` training
/// fingerprints drawn with replacement.
pub fn diversity_scores(
    batch: &GenerationBatch,
    refs: &ReferenceSets,
    k: usize,
    seed: u64,
) -> Result<Vec<f64>, MetricError> {
    if refs.pool.is_empty() || k == 0 {
        return Err(MetricError::EmptyPool);
    }
    let valid: Vec<(&Molecule, &CanonicalSmiles)> = batch.valid().map(|(_, m, c)| (m, c)).collect();
    valid
        .par_iter()
        .map(|(m, c)| {
            let fp = refs.params.fingerprint(m);
            let mut rng = ChaCha8Rng::seed_from_u64(molecule_seed(seed, c));
            let mut total = 0.0;
            for _ in 0..k {
                let other = &refs.pool[rng.gen_range(0..refs.pool.len())];
                total += 1.0 - tanimoto(&fp, other)?;
            }
            Ok(100.0 * total / k as f64)
        })
        .collect()
}

pub fn diversity(
    batch: &GenerationBatch,
    refs: &ReferenceSets,
    k: usize,
    seed: u64,
) -> Result<Option<Stat>, MetricError> {
    Ok(population_stat(&diversity_scores(batch, refs, k, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::{canonical_smiles, parse_molecule};

    fn refs(smiles: &[&str]) -> ReferenceSets {
        let mols: Vec<(CanonicalSmiles, Molecule)> = smiles
            .iter()
            .map(|s| {
                let m = parse_molecule(s).unwrap();
                (canonical_smiles(&m), m)
            })
            .collect();
        ReferenceSets::from_training(mols.iter().map(|(c, m)| (c, m)), FingerprintParams::default())
    }

    #[test]
    fn identical_and_disjoint() {
        let r = refs(&["CCO"]);
        let same = diversity(&GenerationBatch::from_strs(&["OCC"]), &r, 1, 3).unwrap().unwrap();
        assert_eq!(same.mean, 0.0);
        let r = refs(&["CCCCCCCC"]);
        let far = diversity(&GenerationBatch::from_strs(&["FC(F)(F)Cl"]), &r, 5, 3).unwrap().unwrap();
        assert_eq!(far.mean, 100.0);
    }

    #[test]
    fn seeded_and_order_free() {
        let r = refs(&["CCO", "c1ccccc1", "CC(=O)O", "CCN", "C1CCCCC1"]);
        let a = GenerationBatch::from_strs(&["CCCO", "c1ccncc1", "CCOC"]);
        let b = GenerationBatch::from_strs(&["CCOC", "CCCO", "c1ccncc1"]);
        let sa = diversity(&a, &r, 10, 11).unwrap();
        assert_eq!(sa, diversity(&a, &r, 10, 11).unwrap());
        assert_eq!(sa, diversity(&b, &r, 10, 11).unwrap());
        assert!(diversity(&a, &ReferenceSets::default(), 10, 11).is_err());
    }
}
