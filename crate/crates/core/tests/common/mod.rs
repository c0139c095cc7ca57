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

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use molbench::descriptors::ParameterTables;
use molbench::harness::{load_named_dataset, Dataset};

pub fn data_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

pub fn tables() -> &'static ParameterTables {
    static T: OnceLock<ParameterTables> = OnceLock::new();
    T.get_or_init(|| molbench::harness::load_tables(&data_dir()).unwrap())
}

pub fn qm9() -> &'static Dataset {
    static D: OnceLock<Dataset> = OnceLock::new();
    D.get_or_init(|| load_named_dataset("qm9", &data_dir()).unwrap())
}

pub fn zinc() -> &'static Dataset {
    static D: OnceLock<Dataset> = OnceLock::new();
    D.get_or_init(|| load_named_dataset("zinc", &data_dir()).unwrap())
}

/// First `n` lines of a dataset file without loading the whole set.
pub fn head_smiles(rel: &str, n: usize) -> Vec<String> {
    let text = std::fs::read_to_string(data_dir().join(rel)).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .take(n)
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect()
}

pub fn zinc_head(n: usize) -> Vec<String> {
    head_smiles("zinc/zinc_moses_25k.smi", n)
}

pub fn qm9_head(n: usize) -> Vec<String> {
    head_smiles("qm9/qm9.smi", n)
}

/// Canned molecules grouped by identity: every spelling in a group is the
/// same constitution, different groups are different molecules.
pub const CANNED: &[&[&str]] = &[
    &["C"],
    &["CC"],
    &["CCO", "OCC", "C(C)O", "[CH3][CH2][OH]"],
    &["COC"],
    &["CCC", "C(C)C"],
    &["CC(C)C", "C(C)(C)C"],
    &["CCCC"],
    &["c1ccccc1", "C1=CC=CC=C1", "C1C=CC=CC=1"],
    &["Cc1ccccc1", "c1ccccc1C", "CC1=CC=CC=C1"],
    &["Oc1ccccc1", "c1ccc(O)cc1"],
    &["CC(=O)O", "OC(C)=O", "CC(O)=O"],
    &["CC(=O)Oc1ccccc1C(=O)O", "OC(=O)c1ccccc1OC(C)=O"],
    &["C1CC1"],
    &["C1CCC1"],
    &["C1CCCCC1", "C1CCCCC1"],
    &["c1ccncc1", "n1ccccc1"],
    &["c1cc[nH]c1", "[nH]1cccc1"],
    &["c1ccoc1", "o1cccc1"],
    &["C#N"],
    &["CC#N", "N#CC"],
    &["O=C=O"],
    &["N"],
    &["O"],
    &["CN", "NC"],
    &["CCN(CC)CC"],
    &["C[N+](C)(C)C", "C[N+](C)(C)C"],
    &["CC(=O)[O-]", "[O-]C(C)=O"],
    &["FC(F)(F)F"],
    &["ClC(Cl)Cl", "C(Cl)(Cl)Cl"],
    &["c1ccc2ccccc2c1", "c1cccc2c1cccc2"],
    &["C=C"],
    &["C=CC=C"],
    &["OCCO"],
    &["NCC(=O)O", "OC(=O)CN"],
    &["CO", "OC"],
    &["C=O", "O=C"],
    &["CC=O", "O=CC"],
    &["CC(C)=O", "CC(=O)C"],
    &["CS(C)=O", "O=S(C)C"],
    &["c1ccsc1", "s1cccc1"],
    &["c1cnc[nH]1", "[nH]1ccnc1"],
    &["NC(N)=O", "O=C(N)N"],
    &["C1CCOC1", "O1CCCC1"],
    &["C1CCNCC1", "N1CCCCC1"],
    &["Brc1ccccc1", "c1ccc(Br)cc1"],
    &["OC(=O)C(=O)O", "O=C(O)C(O)=O"],
    &["CCCCCC"],
    &["C1=CCC=C1", "C1C=CC=C1"],
    &["[NH4+]"],
    &["CCC(=O)O", "OC(=O)CC"],
];

/// Strings that must be rejected.
pub const INVALID: &[&str] =
    &["C(", "c1cc", "[Xx]", "C1CC", "CC)", "", "C=", "N(C)(C)(C)(C)C", "c1ccccc", "Cl(C)C", "C%1", "[C+5]", "cc"];

/// A random batch over the canned alphabet with its ground truth: the
/// group of every item, `None` for invalid strings.
pub struct FuzzBatch {
    pub items: Vec<String>,
    pub groups: Vec<Option<usize>>,
    pub training: Vec<String>,
    pub training_groups: Vec<usize>,
    pub rec_inputs: Vec<(String, usize)>,
    pub rec_outputs: Vec<Vec<(String, Option<usize>)>>,
}

fn draw(rng: &mut impl rand::Rng, invalid_rate: f64) -> (String, Option<usize>) {
    use rand::seq::SliceRandom;
    if rng.gen_bool(invalid_rate) {
        (INVALID.choose(rng).unwrap().to_string(), None)
    } else {
        let g = rng.gen_range(0..CANNED.len());
        (CANNED[g].choose(rng).unwrap().to_string(), Some(g))
    }
}

pub fn fuzz_batch(rng: &mut impl rand::Rng) -> FuzzBatch {
    use rand::seq::SliceRandom;
    let n = rng.gen_range(0..=200);
    let rate = rng.gen_range(0.0..0.5);
    let (items, groups) = (0..n).map(|_| draw(rng, rate)).unzip();
    let k = rng.gen_range(0..CANNED.len());
    let mut training_groups: Vec<usize> = (0..CANNED.len()).collect();
    training_groups.shuffle(rng);
    training_groups.truncate(k);
    let training = training_groups.iter().map(|&g| CANNED[g].choose(rng).unwrap().to_string()).collect();
    let m = rng.gen_range(0..20);
    let mut rec_inputs = Vec::new();
    let mut rec_outputs = Vec::new();
    for _ in 0..m {
        let g = rng.gen_range(0..CANNED.len());
        rec_inputs.push((CANNED[g].choose(rng).unwrap().to_string(), g));
        let outs = (0..rng.gen_range(0..6))
            .map(|_| {
                if rng.gen_bool(0.5) {
                    (CANNED[g].choose(rng).unwrap().to_string(), Some(g))
                } else {
                    draw(rng, rate)
                }
            })
            .collect();
        rec_outputs.push(outs);
    }
    FuzzBatch { items, groups, training, training_groups, rec_inputs, rec_outputs }
}

/// Reference values by direct scans over the ground truth.
#[derive(Debug, PartialEq)]
pub struct NaiveMetrics {
    pub n_valid: usize,
    pub n_unique: usize,
    pub n_novel: usize,
    pub rec_pairs: usize,
    pub rec_matched: usize,
}

pub fn naive_metrics(b: &FuzzBatch) -> NaiveMetrics {
    let valid: Vec<usize> = b.groups.iter().flatten().copied().collect();
    let mut n_unique = 0;
    for i in 0..valid.len() {
        if !(0..i).any(|j| valid[j] == valid[i]) {
            n_unique += 1;
        }
    }
    let n_novel = valid.iter().filter(|g| !b.training_groups.iter().any(|t| t == *g)).count();
    let mut rec_pairs = 0;
    let mut rec_matched = 0;
    for ((_, g), outs) in b.rec_inputs.iter().zip(&b.rec_outputs) {
        for (_, og) in outs {
            rec_pairs += 1;
            if *og == Some(*g) {
                rec_matched += 1;
            }
        }
    }
    NaiveMetrics { n_valid: valid.len(), n_unique, n_novel, rec_pairs, rec_matched }
}

/// Mean and population std of 0/100 indicators, computed term by term.
pub fn naive_indicator(hits: usize, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return None;
    }
    let values: Vec<f64> = (0..n).map(|i| if i < hits { 100.0 } else { 0.0 }).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Some((mean, var.sqrt()))
}

/// Compare one fuzz batch against the library; `Err` describes the first
/// disagreement.
pub fn check_fuzz_batch(b: &FuzzBatch) -> Result<(), String> {
    use molbench::metrics::*;
    use molbench::smiles::canonicalize;
    let naive = naive_metrics(b);
    let batch = GenerationBatch::from_strs(&b.items);
    let refs = ReferenceSets::keys_only(b.training.iter().map(|s| canonicalize(s).unwrap()));
    let close = |a: Option<Stat>, e: Option<(f64, f64)>, what: &str| -> Result<(), String> {
        match (a, e) {
            (None, None) => Ok(()),
            (Some(s), Some((m, sd))) if (s.mean - m).abs() < 1e-9 && s.std.is_some_and(|x| (x - sd).abs() < 1e-9) => {
                Ok(())
            }
            other => Err(format!("{what}: {other:?}")),
        }
    };
    let n = b.items.len();
    if batch.valid_count() != naive.n_valid {
        return Err(format!("valid count {} vs {}", batch.valid_count(), naive.n_valid));
    }
    close(validity(&batch).stat, naive_indicator(naive.n_valid, n), "validity")?;
    if unique_count(&batch) != naive.n_unique {
        return Err(format!("unique {} vs {}", unique_count(&batch), naive.n_unique));
    }
    let u = uniqueness(&batch);
    let expected_u = (naive.n_valid > 0).then(|| 100.0 * naive.n_unique as f64 / naive.n_valid as f64);
    match (u, expected_u) {
        (None, None) => {}
        (Some(s), Some(e)) if (s.mean - e).abs() < 1e-9 && s.std.is_none() => {}
        other => return Err(format!("uniqueness {other:?}")),
    }
    let novel = novelty_flags(&batch, &refs).iter().filter(|&&f| f).count();
    if novel != naive.n_novel {
        return Err(format!("novel {novel} vs {}", naive.n_novel));
    }
    close(novelty(&batch, &refs), naive_indicator(naive.n_novel, naive.n_valid), "novelty")?;
    let inputs: Vec<_> = b.rec_inputs.iter().map(|(s, _)| canonicalize(s).unwrap()).collect();
    let outputs: Vec<Vec<String>> = b.rec_outputs.iter().map(|o| o.iter().map(|(s, _)| s.clone()).collect()).collect();
    let r = reconstruction(&inputs, &outputs).map_err(|e| e.to_string())?;
    if (r.pairs, r.matched) != (naive.rec_pairs, naive.rec_matched) {
        return Err(format!("reconstruction {}/{} vs {}/{}", r.matched, r.pairs, naive.rec_matched, naive.rec_pairs));
    }
    close(r.stat, naive_indicator(naive.rec_matched, naive.rec_pairs), "reconstruction")
}
