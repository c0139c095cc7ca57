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

use rayon::prelude::*;

use crate::smiles::{canonicalize, CanonicalSmiles};

use super::{indicator_stat, GenerationBatch, MetricError, ReferenceSets, Stat};

#[derive(Debug, Clone, PartialEq)]
pub struct Validity {
    pub flags: Vec<bool>,
    pub stat: Option<Stat>,
}

/// An item is valid when it parses and sanitizes.
pub fn validity(batch: &GenerationBatch) -> Validity {
    let flags: Vec<bool> = (0..batch.len()).map(|i| batch.is_valid(i)).collect();
    let hits = flags.iter().filter(|&&f| f).count();
    Validity { stat: indicator_stat(hits, flags.len()), flags }
}

/// Per valid item in batch order: not among the training molecules.
pub fn novelty_flags(batch: &GenerationBatch, refs: &ReferenceSets) -> Vec<bool> {
    batch.valid().map(|(_, _, c)| !refs.contains(c)).collect()
}

pub fn novelty(batch: &GenerationBatch, refs: &ReferenceSets) -> Option<Stat> {
    let flags = novelty_flags(batch, refs);
    indicator_stat(flags.iter().filter(|&&f| f).count(), flags.len())
}

pub fn unique_count(batch: &GenerationBatch) -> usize {
    batch.valid().map(|(_, _, c)| c).collect::<HashSet<_>>().len()
}

/// Distinct valid molecules over valid molecules; a single ratio without
/// a spread.
pub fn uniqueness(batch: &GenerationBatch) -> Option<Stat> {
    let n = batch.valid_count();
    if n == 0 {
        return None;
    }
    Some(Stat::mean_only(100.0 * unique_count(batch) as f64 / n as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub stat: Option<Stat>,
    pub pairs: usize,
    pub matched: usize,
}

/// Share of (input, output) pairs whose output is valid and canonically
/// equal to its input.
pub fn reconstruction(inputs: &[CanonicalSmiles], outputs: &[Vec<String>]) -> Result<Reconstruction, MetricError> {
    if inputs.len() != outputs.len() {
        return Err(MetricError::LengthMismatch { inputs: inputs.len(), outputs: outputs.len() });
    }
    let pairs: Vec<(&CanonicalSmiles, &String)> =
        inputs.iter().zip(outputs).flat_map(|(i, outs)| outs.iter().map(move |o| (i, o))).collect();
    let matched = pairs.par_iter().filter(|(input, out)| canonicalize(out.trim()).is_ok_and(|c| &c == *input)).count();
    Ok(Reconstruction { stat: indicator_stat(matched, pairs.len()), pairs: pairs.len(), matched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity_examples() {
        let v = validity(&GenerationBatch::from_strs(&["C", "C(", "CO"]));
        assert!((v.stat.unwrap().mean - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(v.flags, vec![true, false, true]);
        let v = validity(&GenerationBatch::from_strs(&["C", "C", "C", "C(C)(C)(C)(C)C"]));
        let s = v.stat.unwrap();
        assert_eq!(s.mean, 75.0);
        assert!((s.std.unwrap() - 43.30127).abs() < 1e-4);
        assert_eq!(validity(&GenerationBatch::from_strs::<&str>(&[])).stat, None);
    }

    #[test]
    fn uniqueness_examples() {
        assert!(
            (uniqueness(&GenerationBatch::from_strs(&["CCO", "OCC", "C"])).unwrap().mean - 200.0 / 3.0).abs() < 1e-9
        );
        assert_eq!(uniqueness(&GenerationBatch::from_strs(&["C"; 4])).unwrap().mean, 25.0);
        assert_eq!(uniqueness(&GenerationBatch::from_strs(&["C", "CC", "CCC"])).unwrap(), Stat::mean_only(100.0));
        assert_eq!(uniqueness(&GenerationBatch::from_strs(&["C("])), None);
    }

    #[test]
    fn reconstruction_examples() {
        let inputs = vec![canonicalize("CCO").unwrap()];
        let echo = reconstruction(&inputs, &[vec!["OCC".to_string(); 20]]).unwrap();
        assert_eq!(echo.stat.unwrap().mean, 100.0);
        let bad = reconstruction(&inputs, &[vec!["C(".to_string(); 20]]).unwrap();
        assert_eq!(bad.stat.unwrap().mean, 0.0);
        let mut one = vec!["C".to_string(); 19];
        one.push("CCO".to_string());
        assert_eq!(reconstruction(&inputs, &[one]).unwrap().stat.unwrap().mean, 5.0);
        assert!(reconstruction(&inputs, &[]).is_err());
    }
}
