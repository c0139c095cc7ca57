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

mod common;

use molbench::metrics::*;
use molbench::smiles::{canonicalize, parse_molecule};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn set_metrics_match_naive_scans() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..300 {
        let b = common::fuzz_batch(&mut rng);
        if let Err(e) = common::check_fuzz_batch(&b) {
            panic!("case {case}: {e}");
        }
    }
}

fn training_refs() -> &'static ReferenceSets {
    static R: std::sync::OnceLock<ReferenceSets> = std::sync::OnceLock::new();
    R.get_or_init(|| {
        let mols: Vec<_> = common::qm9_head(400)
            .iter()
            .map(|s| {
                let m = parse_molecule(s).unwrap();
                (molbench::smiles::canonical_smiles(&m), m)
            })
            .collect();
        ReferenceSets::from_training(mols.iter().map(|(c, m)| (c, m)), FingerprintParams::default())
    })
}

fn alphabet() -> Vec<String> {
    let mut v: Vec<String> = common::CANNED.iter().flat_map(|g| g.iter().map(|s| s.to_string())).collect();
    v.extend(common::INVALID.iter().map(|s| s.to_string()));
    v.extend(common::qm9_head(30));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn shuffling_changes_nothing(picks in proptest::collection::vec(0usize..200, 1..120), seed in any::<u64>()) {
        let a = alphabet();
        let items: Vec<String> = picks.iter().map(|&i| a[i % a.len()].clone()).collect();
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cfg = MetricConfig::default();
        let r1 = score_samples(&GenerationBatch::new(items), training_refs(), common::tables(), &cfg).unwrap();
        let r2 = score_samples(&GenerationBatch::new(shuffled), training_refs(), common::tables(), &cfg).unwrap();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn training_molecules_never_raise_novelty(picks in proptest::collection::vec(0usize..200, 1..100), extra in 0usize..400) {
        let a = alphabet();
        let items: Vec<String> = picks.iter().map(|&i| a[i % a.len()].clone()).collect();
        let before = novelty(&GenerationBatch::from_strs(&items), training_refs()).map_or(0.0, |s| s.mean);
        let mut more = items.clone();
        more.push(common::qm9_head(400)[extra].clone());
        let after = novelty(&GenerationBatch::from_strs(&more), training_refs()).unwrap().mean;
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn valid_count_accounting(picks in proptest::collection::vec(0usize..200, 0..150)) {
        let a = alphabet();
        let items: Vec<String> = picks.iter().map(|&i| a[i % a.len()].clone()).collect();
        let batch = GenerationBatch::from_strs(&items);
        let r = score_samples(&batch, training_refs(), common::tables(), &MetricConfig::default()).unwrap();
        prop_assert_eq!(r.counts.n_generated, items.len());
        if let Some(v) = r.get(Metric::Validity) {
            prop_assert_eq!((v.mean * items.len() as f64 / 100.0).round() as usize, r.counts.n_valid);
        } else {
            prop_assert_eq!(items.len(), 0);
        }
    }
}

#[test]
fn uniqueness_has_no_spread() {
    let r = score_samples(
        &GenerationBatch::from_strs(&["CCO", "OCC", "C"]),
        training_refs(),
        common::tables(),
        &MetricConfig::default(),
    )
    .unwrap();
    assert_eq!(r.get(Metric::Uniqueness).unwrap().std, None);
    assert!(r.get(Metric::Validity).unwrap().std.is_some());
}

#[test]
fn empty_batch_is_all_na() {
    let r = score_samples(&GenerationBatch::new(vec![]), training_refs(), common::tables(), &MetricConfig::default())
        .unwrap();
    assert!(r.rows().iter().all(|(_, s)| s.is_none()));
}

#[test]
fn diversity_of_training_copies_is_below_random_strings() {
    let cfg = MetricConfig::default();
    let same: Vec<String> = common::qm9_head(50);
    let d_same = diversity(&GenerationBatch::from_strs(&same), training_refs(), cfg.diversity_k, 0).unwrap().unwrap();
    let far = GenerationBatch::from_strs(&common::zinc_head(50));
    let d_far = diversity(&far, training_refs(), cfg.diversity_k, 0).unwrap().unwrap();
    assert!(d_far.mean > d_same.mean, "{d_far:?} vs {d_same:?}");
    assert!(diversity(&far, &ReferenceSets::keys_only([canonicalize("C").unwrap()]), 10, 0).is_err());
}
