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

//! All metrics except reconstruction over a hand-written batch.

use molbench::harness::{data_dir, load_tables};
use molbench::metrics::{score_samples, GenerationBatch, MetricConfig, ReferenceSets};
use molbench::smiles::parse_molecule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = load_tables(&data_dir())?;
    let training: Vec<_> = ["CCO", "CCN", "c1ccccc1", "CC(=O)O"]
        .iter()
        .map(|s| {
            let m = parse_molecule(s).unwrap();
            (molbench::smiles::canonical_smiles(&m), m)
        })
        .collect();
    let cfg = MetricConfig::default();
    let refs = ReferenceSets::from_training(training.iter().map(|(c, m)| (c, m)), cfg.fingerprint);
    let batch = GenerationBatch::from_strs(&["OCC", "CCCl", "c1ccncc1", "C(", "CCCl", "CC(C)(C)O"]);
    let report = score_samples(&batch, &refs, &tables, &cfg)?;
    for (m, s) in report.rows() {
        match s {
            Some(s) => println!(
                "{:<15} {:>7.2} {}",
                m.label(),
                s.mean,
                s.std.map(|v| format!("{v:.2}")).unwrap_or("NA".into())
            ),
            None => println!("{:<15} NA", m.label()),
        }
    }
    println!("{:?}", report.counts);
    Ok(())
}
