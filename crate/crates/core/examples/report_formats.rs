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

//! One evaluation rendered as CSV, JSON and Markdown.

use molbench::cli::{Format, ReportDocument};
use molbench::harness::{
    data_dir, load_named_dataset, load_tables, reference_sets, run_sampling_process, BuiltinGenerator, BuiltinKind,
    GeneratorAdapter, RunConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = data_dir();
    let tables = load_tables(&dir)?;
    let dataset = load_named_dataset("qm9", &dir)?;
    let cfg = RunConfig { n_samples: 1000, seed: 3, ..RunConfig::default() };
    let refs = reference_sets(&dataset, &cfg.metrics);
    let generator = BuiltinGenerator::new(BuiltinKind::Ngram, dataset.smiles(&dataset.split.train))?;
    let mut adapter = GeneratorAdapter::handshake(Box::new(generator))?;
    let report = run_sampling_process(&mut adapter, &cfg, &refs, &tables)?;

    let mut doc = ReportDocument::new("ngram on qm9", &["metric", "mean", "std"]);
    doc.push_metrics(&report, None);
    doc.meta("seed", cfg.seed);
    for f in [Format::Markdown, Format::Csv, Format::Json] {
        println!("{}", doc.render(f));
    }
    Ok(())
}
