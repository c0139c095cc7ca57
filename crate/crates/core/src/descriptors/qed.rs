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

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::matching::{count_matches, has_match, parse_smarts, root_matches, MatchTarget, SmartsPattern};
use crate::molgraph::{cycle_rank, Molecule};

use super::{crippen_logp, tpsa, ParameterTables};

/// Donor atoms: NH, charged NH, OH, SH and aromatic nH.
pub const HBD_SMARTS: &str = "[$([N;!H0;v3]),$([N;!H0;+1;v4]),$([O,S;H1;+0]),$([n;H1;+0])]";

/// Acyclic single or aromatic bonds between non-terminal atoms, excluding
/// triple-bond atoms, trihalomethyl and tert-butyl groups, and amide-like
/// C-N, C-O and C-S bonds.
pub const ROTATABLE_SMARTS: &str = "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])&!$([CD3](=[N+])-!@[#7!D1])&!$([#7!D1]-!@[CD3]=[N+])]-,:;!@[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])]";

/// Ring atoms removed before counting aromatic rings.
pub const ALIPHATIC_RING_ATOM_SMARTS: &str = "[$([A;R][!a])]";

struct Patterns {
    hbd: SmartsPattern,
    rotatable: SmartsPattern,
    aliphatic_ring_atom: SmartsPattern,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        hbd: parse_smarts(HBD_SMARTS).expect("valid donor pattern"),
        rotatable: parse_smarts(ROTATABLE_SMARTS).expect("valid rotatable bond pattern"),
        aliphatic_ring_atom: parse_smarts(ALIPHATIC_RING_ATOM_SMARTS).expect("valid ring atom pattern"),
    })
}

/// The counted QED inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub hbd: u32,
    pub hba: u32,
    pub rot_bonds: u32,
    pub aromatic_rings: u32,
    pub alerts: u32,
    pub mw: f64,
}

pub fn count_features(mol: &Molecule, t: &ParameterTables) -> Features {
    let target = MatchTarget::new(mol);
    let p = patterns();
    let hba = t.acceptors.iter().map(|a| count_matches(a, &target)).sum::<usize>();
    let alerts = t.alerts.iter().filter(|a| has_match(a, &target)).count();
    Features {
        hbd: count_matches(&p.hbd, &target) as u32,
        hba: hba as u32,
        rot_bonds: count_matches(&p.rotatable, &target) as u32,
        aromatic_rings: aromatic_ring_count(mol, &target),
        alerts: alerts as u32,
        mw: mol.molecular_weight(),
    }
}

/// Cycle rank of what is left after deleting aliphatic ring atoms bonded
/// to a non-aromatic neighbor.
fn aromatic_ring_count(mol: &Molecule, target: &MatchTarget) -> u32 {
    let removed = root_matches(&patterns().aliphatic_ring_atom, target);
    let mut index = vec![usize::MAX; mol.atom_count()];
    let mut n = 0;
    for i in 0..mol.atom_count() {
        if !removed[i] {
            index[i] = n;
            n += 1;
        }
    }
    let edges: Vec<(usize, usize)> =
        mol.bonds().iter().filter(|b| !removed[b.a] && !removed[b.b]).map(|b| (index[b.a], index[b.b])).collect();
    cycle_rank(n, &edges) as u32
}

/// Weighted geometric mean of desirabilities; zero weights drop out.
pub fn qed_from_desirabilities(d: &[f64; 8], weights: &[f64; 8]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut t = 0.0;
    for (&di, &wi) in d.iter().zip(weights) {
        if wi == 0.0 {
            continue;
        }
        if di <= 0.0 {
            return 0.0;
        }
        t += wi * di.ln();
    }
    (t / total).exp().clamp(0.0, 1.0)
}

/// Desirability of each QED property for the given inputs.
pub fn desirabilities(t: &ParameterTables, f: &Features, logp: f64, tpsa: f64) -> [f64; 8] {
    let x =
        [f.mw, logp, f.hba as f64, f.hbd as f64, tpsa, f.rot_bonds as f64, f.aromatic_rings as f64, f.alerts as f64];
    let mut d = [0.0; 8];
    for k in 0..8 {
        d[k] = t.qed.curves[k].eval(x[k]);
    }
    d
}

pub fn qed_weights(t: &ParameterTables) -> [f64; 8] {
    t.qed.curves.map(|c| c.weight)
}

pub fn qed(mol: &Molecule, t: &ParameterTables) -> f64 {
    let f = count_features(mol, t);
    let d = desirabilities(t, &f, crippen_logp(mol, t), tpsa(mol, t));
    qed_from_desirabilities(&d, &qed_weights(t))
}
