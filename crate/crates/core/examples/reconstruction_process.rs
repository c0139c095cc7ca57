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

//! The reconstruction process: an echo generator reaches 100% and a
//! generator without an encoder reports NA.

use molbench::harness::{
    data_dir, load_named_dataset, load_tables, run_reconstruction_process, BuiltinGenerator, BuiltinKind,
    GeneratorAdapter, RunConfig,
};
use molbench::metrics::Metric;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = data_dir();
    let tables = load_tables(&dir)?;
    let dataset = load_named_dataset("zinc", &dir)?;
    let cfg = RunConfig { reconstruction_limit: Some(200), ..RunConfig::default() };
    for kind in [BuiltinKind::Echo, BuiltinKind::Replay] {
        let generator = BuiltinGenerator::new(kind, dataset.smiles(&dataset.split.train))?;
        let mut adapter = GeneratorAdapter::handshake(Box::new(generator))?;
        let report = run_reconstruction_process(&mut adapter, &cfg, &dataset, &tables)?;
        match report.get(Metric::Reconstruction) {
            Some(s) => {
                println!("{:<7} {:.2}% over {} pairs", kind.name(), s.mean, report.counts.n_reconstruction_pairs)
            }
            None => println!("{:<7} NA", kind.name()),
        }
    }
    Ok(())
}
