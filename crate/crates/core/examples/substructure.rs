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

//! SMARTS substructure search.
//!
//! `cargo run --example substructure -- '[CX3](=O)[OX2H1]' 'CC(=O)O'`

use molbench::matching::{find_matches, parse_smarts};
use molbench::smiles::parse_molecule;

fn main() {
    let mut args = std::env::args().skip(1);
    let pattern = args.next().unwrap_or_else(|| "c1ccccc1".into());
    let target = args.next().unwrap_or_else(|| "c1ccc2ccccc2c1".into());
    let pattern = match parse_smarts(&pattern) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("bad pattern: {e}");
            std::process::exit(2);
        }
    };
    let mol = parse_molecule(&target).expect("target parses");
    let hits = find_matches(&pattern, &mol);
    println!("{} match(es) of {} in {target}", hits.len(), pattern.source());
    for h in hits {
        println!("  {h:?}");
    }
}
