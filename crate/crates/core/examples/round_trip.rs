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

//! Parse, relabel and write a molecule, then check the canonical key is
//! unchanged.

use molbench::smiles::{canonical_smiles, parse_molecule, write};

fn main() {
    let mol = parse_molecule("CC(=O)Oc1ccccc1C(=O)O").expect("aspirin parses");
    println!("atoms {}  bonds {}  rings {}", mol.atom_count(), mol.bond_count(), mol.ring_info().num_rings());
    println!("weight {:.3}", mol.molecular_weight());

    let reversed: Vec<usize> = (0..mol.atom_count()).rev().collect();
    let relabeled = mol.permuted(&reversed);
    let text = write(&relabeled);
    let back = parse_molecule(&text).expect("writer output parses");
    println!("written  {text}");
    println!("original {}", canonical_smiles(&mol));
    println!("reparsed {}", canonical_smiles(&back));
    assert_eq!(canonical_smiles(&mol), canonical_smiles(&back));
}
