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

//! Morgan fingerprints and Tanimoto similarity.

use molbench::matching::{morgan_fingerprint, tanimoto, DEFAULT_RADIUS, DEFAULT_WIDTH};
use molbench::smiles::parse_molecule;

fn main() {
    let names = ["CCO", "CCCO", "c1ccccc1O", "c1ccccc1N"];
    let fps: Vec<_> =
        names.iter().map(|s| morgan_fingerprint(&parse_molecule(s).unwrap(), DEFAULT_RADIUS, DEFAULT_WIDTH)).collect();
    print!("{:>10}", "");
    for n in &names {
        print!("{n:>10}");
    }
    println!();
    for (i, a) in fps.iter().enumerate() {
        print!("{:>10}", names[i]);
        for b in &fps {
            print!("{:>10.3}", tanimoto(a, b).unwrap());
        }
        println!();
    }
}
