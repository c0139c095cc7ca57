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

use super::{BondOrder, Element, Molecule};

fn bond_code(order: BondOrder) -> u32 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

/// Per-atom starting invariant used for symmetry and canonical ranking.
pub(crate) fn initial_invariants(mol: &Molecule) -> Vec<u64> {
    let ring = mol.ring_info();
    (0..mol.atom_count())
        .map(|i| {
            let a = mol.atom(i);
            let mut v = a.element.atomic_number() as u64;
            v = v << 8 | (a.formal_charge as i64 + 8) as u64;
            v = v << 8 | mol.degree(i) as u64;
            v = v << 8 | mol.total_h(i) as u64;
            v = v << 1 | ring.atom_in_ring(i) as u64;
            v = v << 1 | a.aromatic as u64;
            v
        })
        .collect()
}

/// Dense ranks of `keys`, equal keys sharing a rank.
pub(crate) fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut r = 0;
    for k in 0..idx.len() {
        if k > 0 && keys[idx[k]] != keys[idx[k - 1]] {
            r += 1;
        }
        ranks[idx[k]] = r;
    }
    ranks
}

fn class_count(ranks: &[u32]) -> usize {
    ranks.iter().copied().max().map_or(0, |m| m as usize + 1)
}

/// Iterated neighborhood refinement until the partition stops splitting.
pub(crate) fn refine(mol: &Molecule, mut ranks: Vec<u32>) -> Vec<u32> {
    let mut count = class_count(&ranks);
    loop {
        let keys: Vec<(u32, Vec<(u32, u32)>)> = (0..mol.atom_count())
            .map(|i| {
                let mut env: Vec<(u32, u32)> =
                    mol.neighbors(i).iter().map(|&(w, b)| (bond_code(mol.bond(b).order), ranks[w])).collect();
                env.sort_unstable();
                (ranks[i], env)
            })
            .collect();
        let next = dense_ranks(&keys);
        let next_count = class_count(&next);
        ranks = next;
        if next_count == count {
            return ranks;
        }
        count = next_count;
    }
}

/// Graph symmetry classes: atoms share a class when no refinement of
/// element, charge, connectivity, hydrogens and ring flags separates them.
pub fn symmetry_classes(mol: &Molecule) -> Vec<u32> {
    let init = dense_ranks(&initial_invariants(mol));
    refine(mol, init)
}

fn conjugated(mol: &Molecule, i: usize) -> bool {
    mol.neighbors(i).iter().any(|&(w, _)| {
        mol.atom(w).aromatic || mol.neighbors(w).iter().any(|&(_, b)| mol.bond(b).order != BondOrder::Single)
    })
}

/// Atoms that could carry tetrahedral stereo: four distinct substituents,
/// or three plus a lone pair on P, As, S, Se and on saturated nitrogen in a
/// three-membered ring or at a bridgehead.
pub fn possible_stereocenters(mol: &Molecule) -> Vec<usize> {
    let classes = symmetry_classes(mol);
    let ring = mol.ring_info();
    let bridgeheads = ring.bridgehead_atoms(mol);
    let mut out = Vec::new();
    for i in 0..mol.atom_count() {
        let a = mol.atom(i);
        let h = mol.total_h(i) as usize;
        let deg = mol.degree(i);
        let eligible = match (deg + h, h) {
            (4, 0) | (4, 1) => true,
            (3, 0) => match a.element {
                Element::P | Element::As | Element::S | Element::Se => true,
                Element::N => {
                    a.formal_charge == 0
                        && !conjugated(mol, i)
                        && (ring.atom_in_ring_of_size(i, 3) || bridgeheads.contains(&i))
                }
                _ => false,
            },
            _ => false,
        };
        if !eligible || a.aromatic {
            continue;
        }
        let mut seen: Vec<u32> = mol.neighbors(i).iter().map(|&(w, _)| classes[w]).collect();
        seen.sort_unstable();
        let before = seen.len();
        seen.dedup();
        if seen.len() == before {
            out.push(i);
        }
    }
    out
}
