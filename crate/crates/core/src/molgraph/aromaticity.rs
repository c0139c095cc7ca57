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

use super::{Atom, BondOrder, Element, Molecule, RingInfo};

/// How many pi electrons an atom contributes to a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DonorType {
    /// Cannot take part in an aromatic ring.
    None,
    /// Empty p orbital.
    Vacant,
    One,
    Two,
}

impl DonorType {
    fn electrons(self) -> u32 {
        match self {
            DonorType::None | DonorType::Vacant => 0,
            DonorType::One => 1,
            DonorType::Two => 2,
        }
    }
}

/// Donor classification of one atom over the kekulé form of `mol`.
pub fn donor_type(mol: &Molecule, atom: usize) -> DonorType {
    let kekule: Vec<BondOrder> = (0..mol.bond_count()).map(|b| mol.kekule_order(b)).collect();
    let hydrogens: Vec<u8> = (0..mol.atom_count()).map(|i| mol.total_h(i) as u8).collect();
    classify(mol, atom, &kekule, &hydrogens, mol.ring_info())
}

fn classify(mol: &Molecule, i: usize, kekule: &[BondOrder], hydrogens: &[u8], ring: &RingInfo) -> DonorType {
    let atom = mol.atom(i);
    let el = atom.element;
    if !el.can_be_aromatic() {
        return DonorType::None;
    }
    let degree = mol.degree(i) as i32;
    let total_degree = degree + hydrogens[i] as i32;
    if total_degree > 3 {
        return DonorType::None;
    }
    let mut multiple = 0;
    let mut bond_sum = 0;
    let mut exocyclic_partner = None;
    let mut cyclic_multiple = false;
    for &(w, b) in mol.neighbors(i) {
        let o = kekule[b];
        bond_sum += o.valence_contribution() as i32;
        if matches!(o, BondOrder::Double | BondOrder::Triple) {
            multiple += 1;
            if ring.bond_in_ring(b) {
                cyclic_multiple = true;
            } else {
                exocyclic_partner = Some(w);
            }
        }
    }
    if multiple > 1 {
        return DonorType::None;
    }
    let charge = atom.formal_charge as i32;
    let Some(&iso_default) = el.allowed_valences(charge).first() else {
        return DonorType::None;
    };
    if bond_sum + hydrogens[i] as i32 > iso_default as i32 {
        return DonorType::None;
    }

    let dv = el.default_valence();
    if dv <= 1 {
        return DonorType::None;
    }
    let lone = (el.outer_electrons() - dv - charge).max(0);
    let mut nelec = dv - total_degree + lone;
    if nelec > 1 && bond_sum - degree > 1 {
        nelec = 1;
    }
    match nelec {
        n if n < 0 => DonorType::None,
        0 => {
            if exocyclic_partner.is_some() {
                DonorType::Vacant
            } else if cyclic_multiple {
                DonorType::One
            } else {
                DonorType::None
            }
        }
        1 => {
            if let Some(w) = exocyclic_partner {
                if mol.atom(w).element.electronegativity() > el.electronegativity() {
                    DonorType::Vacant
                } else {
                    DonorType::One
                }
            } else if cyclic_multiple {
                DonorType::One
            } else if charge == 1 {
                DonorType::Vacant
            } else {
                DonorType::None
            }
        }
        _ => {
            if multiple > 0 {
                DonorType::One
            } else {
                DonorType::Two
            }
        }
    }
}

/// An O or S lone pair is the only non-pi contribution to a ring larger than
/// five atoms.
fn lone_chalcogen_in_large_ring(mol: &Molecule, ring: &[usize], donors: &[DonorType]) -> bool {
    if ring.len() <= 5 {
        return false;
    }
    let mut chalcogen = 0;
    for &a in ring {
        match donors[a] {
            DonorType::One => {}
            DonorType::Two if matches!(mol.atom(a).element, Element::O | Element::S) => chalcogen += 1,
            _ => return false,
        }
    }
    chalcogen == 1
}

fn huckel(electrons: u32) -> bool {
    electrons >= 2 && (electrons - 2).is_multiple_of(4)
}

/// Aromatic atom and bond flags over a kekulé assignment.
pub(crate) fn perceive(
    mol: &Molecule,
    kekule: &[BondOrder],
    hydrogens: &[u8],
    ring: &RingInfo,
) -> (Vec<bool>, Vec<bool>) {
    let mut atom_arom = vec![false; mol.atom_count()];
    let mut bond_arom = vec![false; mol.bond_count()];
    if ring.num_rings() == 0 {
        return (atom_arom, bond_arom);
    }
    let donors: Vec<DonorType> = (0..mol.atom_count())
        .map(|i| if ring.atom_in_ring(i) { classify(mol, i, kekule, hydrogens, ring) } else { DonorType::None })
        .collect();

    let rings = ring.rings();
    let bond_rings = ring.bond_rings();
    let eligible: Vec<bool> = rings.iter().map(|r| r.iter().all(|&a| donors[a] != DonorType::None)).collect();
    let mut aromatic_ring = vec![false; rings.len()];

    let mark = |ri: usize, atom_arom: &mut [bool], bond_arom: &mut [bool]| {
        for &a in &rings[ri] {
            atom_arom[a] = true;
        }
        for &b in &bond_rings[ri] {
            bond_arom[b] = true;
        }
    };

    for ri in 0..rings.len() {
        if !eligible[ri] {
            continue;
        }
        let e: u32 = rings[ri].iter().map(|&a| donors[a].electrons()).sum();
        if huckel(e) && !lone_chalcogen_in_large_ring(mol, &rings[ri], &donors) {
            aromatic_ring[ri] = true;
            mark(ri, &mut atom_arom, &mut bond_arom);
        }
    }

    for ri in 0..rings.len() {
        if !eligible[ri] {
            continue;
        }
        for rj in ri + 1..rings.len() {
            if !eligible[rj] || (aromatic_ring[ri] && aromatic_ring[rj]) {
                continue;
            }
            let shared = bond_rings[ri].iter().filter(|b| bond_rings[rj].contains(b)).count();
            if shared != 1 {
                continue;
            }
            let mut atoms: Vec<usize> = rings[ri].iter().chain(rings[rj].iter()).copied().collect();
            atoms.sort_unstable();
            atoms.dedup();
            let e: u32 = atoms.iter().map(|&a| donors[a].electrons()).sum();
            if huckel(e) {
                // The fusion bond stays as it is unless a ring on its own
                // already made it aromatic.
                for &a in &atoms {
                    atom_arom[a] = true;
                }
                for &b in bond_rings[ri].iter().chain(bond_rings[rj].iter()) {
                    if !(bond_rings[ri].contains(&b) && bond_rings[rj].contains(&b)) {
                        bond_arom[b] = true;
                    }
                }
            }
        }
    }
    (atom_arom, bond_arom)
}

/// Re-derive aromatic flags from the kekulé form of `mol`. Hydrogen counts
/// are pinned on the returned atoms.
pub fn perceive_aromaticity(mol: &Molecule) -> Molecule {
    if !mol.is_sanitized() && mol.bonds().iter().any(|b| b.order == BondOrder::Aromatic) {
        if let Ok(k) = super::kekulize(mol) {
            return perceive_aromaticity(&k);
        }
    }
    let kekule: Vec<BondOrder> = (0..mol.bond_count()).map(|b| mol.kekule_order(b)).collect();
    let hydrogens: Vec<u8> = (0..mol.atom_count()).map(|i| mol.total_h(i) as u8).collect();
    let (atom_arom, bond_arom) = perceive(mol, &kekule, &hydrogens, mol.ring_info());
    let mut out = Molecule::new();
    for (i, atom) in mol.atoms().iter().enumerate() {
        out.add_atom(Atom { aromatic: atom_arom[i], explicit_h: Some(hydrogens[i]), ..atom.clone() });
    }
    for (bi, b) in mol.bonds().iter().enumerate() {
        let order = if bond_arom[bi] { BondOrder::Aromatic } else { kekule[bi] };
        out.add_bond_with_stereo(b.a, b.b, order, b.stereo).expect("copy of a simple graph");
    }
    out
}
