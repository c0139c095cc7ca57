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

//! Canonical identity keys: equal keys mean the same constitution.
//!
//! `cargo run --example canonicalize -- 'OCC' 'C(C)O' 'c1ccccc1'`

use molbench::smiles::canonicalize;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs =
        if args.is_empty() { vec!["OCC".into(), "C(C)O".into(), "C1=CC=CC=C1".into(), "C(".into()] } else { args };
    for s in inputs {
        match canonicalize(&s) {
            Ok(c) => println!("{s:<20} {c}"),
            Err(e) => println!("{s:<20} INVALID {}", e.reason()),
        }
    }
}
