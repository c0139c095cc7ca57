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

//! The sampling process with the builtin generators on QM9.

use molbench::harness::{
    data_dir, load_named_dataset, load_tables, reference_sets, run_sampling_process, BuiltinGenerator, BuiltinKind,
    GeneratorAdapter, RunConfig,
};
use molbench::metrics::Metric;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = data_dir();
    let tables = load_tables(&dir)?;
    let dataset = load_named_dataset("qm9", &dir)?;
    let cfg = RunConfig { n_samples: 2000, seed: 1, ..RunConfig::default() };
    let refs = reference_sets(&dataset, &cfg.metrics);
    let training = dataset.smiles(&dataset.split.train);
    for kind in [BuiltinKind::Replay, BuiltinKind::Ngram, BuiltinKind::RandomChars] {
        let mut adapter = GeneratorAdapter::handshake(Box::new(BuiltinGenerator::new(kind, training.clone())?))?;
        let report = run_sampling_process(&mut adapter, &cfg, &refs, &tables)?;
        let show = |m| report.get(m).map(|s| format!("{:.2}", s.mean)).unwrap_or_else(|| "NA".into());
        println!(
            "{:<13} validity {:>6}  novelty {:>6}  uniqueness {:>6}  diversity {:>6}",
            kind.name(),
            show(Metric::Validity),
            show(Metric::Novelty),
            show(Metric::Uniqueness),
            show(Metric::Diversity)
        );
    }
    Ok(())
}
