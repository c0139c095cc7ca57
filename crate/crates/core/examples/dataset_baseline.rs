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

//! Property scores of a whole dataset.
//!
//! `cargo run --release --example dataset_baseline -- qm9`

use molbench::harness::{data_dir, load_named_dataset, load_tables};
use molbench::metrics::{property_metrics, GenerationBatch};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "zinc".into());
    let dir = data_dir();
    let tables = load_tables(&dir)?;
    let dataset = load_named_dataset(&name, &dir)?;
    println!("{}: {} molecules, {} rejected", dataset.name, dataset.len(), dataset.report.rejected.len());
    let batch = GenerationBatch::from_molecules(
        dataset.entries.iter().filter_map(|e| e.molecule.clone().map(|(m, c)| (e.raw.clone(), m, c))),
    );
    let p = property_metrics(&batch, &tables, &Default::default())?;
    for (label, s) in [("NP", p.np), ("Sol.", p.sol), ("SAS", p.sas), ("QED", p.qed)] {
        let s = s.expect("non-empty dataset");
        println!("{label:<5} {:>6.2} ± {:.2}", s.mean, s.std.unwrap_or(0.0));
    }
    Ok(())
}
