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

//! Plugging in a generator written in Rust by implementing `Generator`.

use molbench::harness::{
    data_dir, evaluate, load_named_dataset, load_tables, reference_sets, AdapterError, AdapterIdentity, AdapterKind,
    Capabilities, Generator, GeneratorAdapter, RunConfig, SampleOutcome,
};

/// Emits linear alkanes of growing length and "decodes" every input to
/// ethanol.
struct Alkanes;

impl Generator for Alkanes {
    fn handshake(&mut self) -> Result<(AdapterIdentity, Capabilities), AdapterError> {
        let id = AdapterIdentity { kind: AdapterKind::Builtin, name: "alkanes".into(), version: "1".into() };
        Ok((id, Capabilities { can_sample: true, can_reconstruct: true }))
    }

    fn sample(&mut self, n: usize, _seed: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError> {
        for i in 0..n {
            sink("C".repeat(1 + i % 12));
        }
        Ok(SampleOutcome { received: n, short: false })
    }

    fn reconstruct(
        &mut self,
        smiles: &[String],
        k: usize,
        _seed: u64,
        sink: &mut dyn FnMut(usize, Vec<String>),
    ) -> Result<(), AdapterError> {
        for i in 0..smiles.len() {
            sink(i, vec!["CCO".into(); k]);
        }
        Ok(())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = data_dir();
    let tables = load_tables(&dir)?;
    let dataset = load_named_dataset("qm9", &dir)?;
    let cfg = RunConfig { n_samples: 500, reconstruction_limit: Some(100), ..RunConfig::default() };
    let refs = reference_sets(&dataset, &cfg.metrics);
    let mut adapter = GeneratorAdapter::handshake(Box::new(Alkanes))?;
    let runs = evaluate(&mut adapter, &cfg, &dataset, &refs, &tables)?;
    for (m, s) in runs[0].rows() {
        println!("{:<15} {}", m.label(), s.map(|s| format!("{:.2}", s.mean)).unwrap_or_else(|| "NA".into()));
    }
    Ok(())
}
