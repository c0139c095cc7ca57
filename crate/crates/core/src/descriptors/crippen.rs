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

use crate::matching::{root_matches_among, MatchTarget};
use crate::molgraph::Molecule;

use super::{stable_sum, ParameterTables};

/// Crippen logP with per-atom detail.
#[derive(Debug, Clone, PartialEq)]
pub struct CrippenResult {
    pub logp: f64,
    /// Contribution of each molecule atom, its hydrogens included.
    pub atom_contributions: Vec<f64>,
    /// Atoms (hydrogens included) that no table row matched; they
    /// contribute nothing.
    pub untyped: usize,
}

/// Type every atom of the hydrogen-expanded graph by the first table row
/// whose pattern can place its first atom there.
pub fn crippen(mol: &Molecule, t: &ParameterTables) -> CrippenResult {
    let target = MatchTarget::with_explicit_hydrogens(mol);
    let n = target.atom_count();
    let mut open = vec![true; n];
    let mut value = vec![0.0; n];
    for ty in &t.crippen {
        let hits = root_matches_among(&ty.pattern, &target, &open);
        for (i, hit) in hits.into_iter().enumerate() {
            if hit {
                open[i] = false;
                value[i] = ty.contribution;
            }
        }
        if !open.iter().any(|&o| o) {
            break;
        }
    }
    let untyped = open.iter().filter(|&&o| o).count();

    let heavy = target.molecule_atom_count();
    let mut atom_contributions = value[..heavy].to_vec();
    for (h, v) in value.iter().enumerate().skip(heavy) {
        let parent = target.neighbors(h).next().expect("hydrogen node has a parent");
        atom_contributions[parent] += v;
    }
    CrippenResult { logp: stable_sum(value), atom_contributions, untyped }
}

pub fn crippen_logp(mol: &Molecule, t: &ParameterTables) -> f64 {
    crippen(mol, t).logp
}
