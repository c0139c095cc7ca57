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

use crate::molgraph::{BondOrder, Element, Molecule};

/// Per-atom facts a pattern can test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TargetAtom {
    pub atomic_number: u8,
    pub aromatic: bool,
    pub charge: i8,
    pub isotope: Option<u16>,
    /// Hydrogens attached, implicit or as explicit neighbor atoms.
    pub total_h: u8,
    /// Neighbors present as graph nodes.
    pub degree: u8,
    /// Neighbors including implicit hydrogens.
    pub total_degree: u8,
    pub valence: u8,
    pub ring_count: u8,
    /// Smallest ring through the atom, 0 when acyclic.
    pub min_ring: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TargetBond {
    pub order: BondOrder,
    pub in_ring: bool,
}

/// A molecule prepared for pattern matching, optionally with every
/// hydrogen present as its own node.
#[derive(Debug, Clone)]
pub struct MatchTarget {
    pub(crate) atoms: Vec<TargetAtom>,
    pub(crate) bonds: Vec<TargetBond>,
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    heavy: usize,
}

impl MatchTarget {
    pub fn new(mol: &Molecule) -> MatchTarget {
        Self::build(mol, false)
    }

    /// Implicit hydrogens become explicit `H` nodes appended after the
    /// molecule's own atoms.
    pub fn with_explicit_hydrogens(mol: &Molecule) -> MatchTarget {
        Self::build(mol, true)
    }

    fn build(mol: &Molecule, expand: bool) -> MatchTarget {
        let ring = mol.ring_info();
        let mut ring_count = vec![0u8; mol.atom_count()];
        for r in ring.relevant_rings() {
            for &a in r {
                ring_count[a] = ring_count[a].saturating_add(1);
            }
        }
        let mut atoms = Vec::with_capacity(mol.atom_count());
        for (i, &rings) in ring_count.iter().enumerate() {
            let a = mol.atom(i);
            let h_nbrs = mol.neighbors(i).iter().filter(|&&(w, _)| mol.atom(w).element == Element::H).count();
            let implicit = mol.total_h(i) as usize;
            let degree = mol.degree(i) + if expand { implicit } else { 0 };
            atoms.push(TargetAtom {
                atomic_number: a.element.atomic_number(),
                aromatic: a.aromatic,
                charge: a.formal_charge,
                isotope: a.isotope,
                total_h: (implicit + h_nbrs) as u8,
                degree: degree as u8,
                total_degree: (mol.degree(i) + implicit) as u8,
                valence: mol.total_valence(i) as u8,
                ring_count: rings,
                min_ring: ring.smallest_ring_size(i) as u16,
            });
        }
        let mut adjacency: Vec<Vec<(usize, usize)>> =
            (0..mol.atom_count()).map(|i| mol.neighbors(i).to_vec()).collect();
        let mut bonds: Vec<TargetBond> = (0..mol.bond_count())
            .map(|b| TargetBond { order: mol.bond(b).order, in_ring: ring.bond_in_ring(b) })
            .collect();
        if expand {
            for i in 0..mol.atom_count() {
                for _ in 0..mol.total_h(i) {
                    let h = atoms.len();
                    atoms.push(TargetAtom {
                        atomic_number: 1,
                        aromatic: false,
                        charge: 0,
                        isotope: None,
                        total_h: 0,
                        degree: 1,
                        total_degree: 1,
                        valence: 1,
                        ring_count: 0,
                        min_ring: 0,
                    });
                    let b = bonds.len();
                    bonds.push(TargetBond { order: BondOrder::Single, in_ring: false });
                    adjacency[i].push((h, b));
                    adjacency.push(vec![(i, b)]);
                }
            }
        }
        MatchTarget { atoms, bonds, adjacency, heavy: mol.atom_count() }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Adjacent node indices.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[node].iter().map(|&(w, _)| w)
    }

    /// Number of nodes that come from the molecule itself.
    pub fn molecule_atom_count(&self) -> usize {
        self.heavy
    }
}
