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

//! Molecular graphs: atoms, bonds, hydrogens, rings and aromaticity.
//!
//! A [`Molecule`] is built unsanitized (usually by the SMILES parser) and
//! turned into an immutable, chemically checked graph by
//! [`Molecule::sanitize`]. Sanitization resolves hydrogens, kekulizes
//! aromatic input, validates valences and re-perceives aromaticity.

mod aromaticity;
mod element;
mod kekulize;
mod rings;
mod symmetry;

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

pub use aromaticity::{donor_type, perceive_aromaticity, DonorType};
pub use element::{atomic_number_of_symbol, Element, ALL_ELEMENTS, PERIODIC_SYMBOLS};
pub use kekulize::{kekulize, KekulizationError};
pub use rings::{cycle_rank, minimum_cycle_basis, RingInfo};
pub(crate) use symmetry::{dense_ranks, refine};
pub use symmetry::{possible_stereocenters, symmetry_classes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Integer bond order; aromatic bonds count as 1 here.
    pub fn valence_contribution(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    /// `@`
    CounterClockwise,
    /// `@@`
    Clockwise,
}

impl Chirality {
    pub fn inverted(self) -> Chirality {
        match self {
            Chirality::CounterClockwise => Chirality::Clockwise,
            Chirality::Clockwise => Chirality::CounterClockwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondStereo {
    /// `/` when read from the first endpoint to the second.
    Up,
    /// `\` when read from the first endpoint to the second.
    Down,
}

impl BondStereo {
    pub fn flipped(self) -> BondStereo {
        match self {
            BondStereo::Up => BondStereo::Down,
            BondStereo::Down => BondStereo::Up,
        }
    }
}

/// One slot in the neighbor ordering that a tetrahedral marker refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StereoRef {
    Atom(usize),
    ImplicitH,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    /// Hydrogen count given in brackets; `None` for organic-subset atoms.
    pub explicit_h: Option<u8>,
    pub isotope: Option<u16>,
    pub aromatic: bool,
    pub chirality: Option<Chirality>,
    /// Neighbor order the chirality marker is expressed against.
    pub stereo_refs: Vec<StereoRef>,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            formal_charge: 0,
            explicit_h: None,
            isotope: None,
            aromatic: false,
            chirality: None,
            stereo_refs: Vec::new(),
        }
    }

    pub fn aromatic(element: Element) -> Atom {
        Atom { aromatic: true, ..Atom::new(element) }
    }

    pub fn bracket(element: Element, hydrogens: u8, charge: i8) -> Atom {
        Atom { explicit_h: Some(hydrogens), formal_charge: charge, ..Atom::new(element) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub stereo: Option<BondStereo>,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("bond from atom {0} to itself")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are already bonded")]
    DuplicateBond(usize, usize),
    #[error("atom index {0} out of range")]
    BadIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceViolation {
    pub atom: usize,
    pub element: Element,
    pub charge: i8,
    pub valence: u32,
}

impl fmt::Display for ValenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "valence {} on atom {} ({}", self.valence, self.atom, self.element)?;
        if self.charge != 0 {
            write!(f, "{:+}", self.charge)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SanitizeError {
    #[error("bad valence: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
    Valence(Vec<ValenceViolation>),
    #[error(transparent)]
    Kekulization(#[from] KekulizationError),
    #[error("non-ring atom {0} marked aromatic")]
    AromaticOutsideRing(usize),
}

#[derive(Debug, Clone, Default)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    hydrogens: Vec<u8>,
    kekule: Vec<BondOrder>,
    sanitized: bool,
    rings: OnceLock<RingInfo>,
}

impl PartialEq for Molecule {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
            && self.bonds == other.bonds
            && self.hydrogens == other.hydrogens
            && self.kekule == other.kekule
            && self.sanitized == other.sanitized
    }
}

impl Molecule {
    pub fn new() -> Molecule {
        Molecule::default()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        assert!(!self.sanitized, "sanitized molecules are immutable");
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<usize, GraphError> {
        self.add_bond_with_stereo(a, b, order, None)
    }

    pub fn add_bond_with_stereo(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        stereo: Option<BondStereo>,
    ) -> Result<usize, GraphError> {
        assert!(!self.sanitized, "sanitized molecules are immutable");
        let n = self.atoms.len();
        if a >= n {
            return Err(GraphError::BadIndex(a));
        }
        if b >= n {
            return Err(GraphError::BadIndex(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a, b));
        }
        let idx = self.bonds.len();
        self.bonds.push(Bond { a, b, order, stereo });
        self.adjacency[a].push((b, idx));
        self.adjacency[b].push((a, idx));
        Ok(idx)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        assert!(!self.sanitized, "sanitized molecules are immutable");
        &mut self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    /// `(neighbor, bond index)` pairs in insertion order.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency.get(a)?.iter().find(|(n, _)| *n == b).map(|&(_, bi)| bi)
    }

    pub fn is_sanitized(&self) -> bool {
        self.sanitized
    }

    /// Total hydrogen count of an atom (bracket count or implicit).
    pub fn total_h(&self, atom: usize) -> u32 {
        if self.sanitized {
            self.hydrogens[atom] as u32
        } else {
            implicit_hydrogen_count(atom, self)
        }
    }

    /// Alternating single/double orders for aromatic bonds; other bonds as
    /// stored. Only meaningful once sanitized.
    pub fn kekule_order(&self, bond: usize) -> BondOrder {
        if self.sanitized {
            self.kekule[bond]
        } else {
            self.bonds[bond].order
        }
    }

    /// Sum of integer bond orders over the kekulé form.
    pub fn explicit_valence(&self, atom: usize) -> u32 {
        self.adjacency[atom].iter().map(|&(_, b)| self.kekule_order(b).valence_contribution()).sum()
    }

    pub fn total_valence(&self, atom: usize) -> u32 {
        self.explicit_valence(atom) + self.total_h(atom)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.element != Element::H).count()
    }

    pub fn ring_info(&self) -> &RingInfo {
        self.rings.get_or_init(|| RingInfo::new(self))
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        self.components().iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Component label per atom, numbered by first appearance.
    pub fn components(&self) -> Vec<usize> {
        let n = self.atoms.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn molecular_weight(&self) -> f64 {
        let h = Element::H.atomic_weight();
        let mut parts: Vec<f64> = (0..self.atoms.len())
            .map(|i| {
                let a = &self.atoms[i];
                let w = match a.isotope {
                    Some(iso) => iso as f64,
                    None => a.element.atomic_weight(),
                };
                w + h * self.total_h(i) as f64
            })
            .collect();
        parts.sort_by(f64::total_cmp);
        parts.iter().sum()
    }

    /// Relabel atoms; `order[k]` is the old index placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> Molecule {
        assert_eq!(order.len(), self.atoms.len());
        let mut new_index = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let mut out = Molecule::new();
        for &old in order {
            let mut atom = self.atoms[old].clone();
            for r in atom.stereo_refs.iter_mut() {
                if let StereoRef::Atom(x) = r {
                    *x = new_index[*x];
                }
            }
            out.add_atom(atom);
        }
        let mut bond_order: Vec<usize> = (0..self.bonds.len()).collect();
        bond_order.sort_by_key(|&b| {
            let bd = &self.bonds[b];
            let (x, y) = (new_index[bd.a], new_index[bd.b]);
            (x.min(y), x.max(y))
        });
        for b in bond_order {
            let bd = &self.bonds[b];
            out.add_bond_with_stereo(new_index[bd.a], new_index[bd.b], bd.order, bd.stereo)
                .expect("permutation preserves a simple graph");
        }
        if self.sanitized {
            out.hydrogens = order.iter().map(|&o| self.hydrogens[o]).collect();
            out.kekule = out
                .bonds
                .iter()
                .map(|bd| {
                    let old = self.bond_between(order[bd.a], order[bd.b]).unwrap();
                    self.kekule[old]
                })
                .collect();
            out.sanitized = true;
        }
        out
    }

    /// Resolve hydrogens, kekulize, check valences and perceive aromaticity.
    pub fn sanitize(self) -> Result<Molecule, SanitizeError> {
        if self.sanitized {
            return Ok(self);
        }
        let mut mol = self.collapse_hydrogens();
        mol.charge_separate_nitro();
        mol.hydrogens = (0..mol.atoms.len()).map(|i| implicit_hydrogen_count(i, &mol) as u8).collect();

        let ring = RingInfo::new(&mol);
        for (i, atom) in mol.atoms.iter().enumerate() {
            if atom.aromatic && !ring.atom_in_ring(i) {
                return Err(SanitizeError::AromaticOutsideRing(i));
            }
        }
        for (bi, bond) in mol.bonds.iter_mut().enumerate() {
            if bond.order == BondOrder::Aromatic && !ring.bond_in_ring(bi) {
                bond.order = BondOrder::Single;
            }
        }
        mol.kekule = kekulize::assign_kekule(&mol)?;

        let violations = valence_violations(&mol, &mol.kekule, &mol.hydrogens);
        if !violations.is_empty() {
            return Err(SanitizeError::Valence(violations));
        }

        let (atom_arom, bond_arom) = aromaticity::perceive(&mol, &mol.kekule, &mol.hydrogens, &ring);
        let unperceived: Vec<usize> =
            (0..mol.atoms.len()).filter(|&i| mol.atoms[i].aromatic && !atom_arom[i]).collect();
        if !unperceived.is_empty() {
            return Err(KekulizationError { atoms: unperceived }.into());
        }
        for (i, atom) in mol.atoms.iter_mut().enumerate() {
            atom.aromatic = atom_arom[i];
        }
        for (bi, bond) in mol.bonds.iter_mut().enumerate() {
            bond.order = if bond_arom[bi] { BondOrder::Aromatic } else { mol.kekule[bi] };
        }
        mol.sanitized = true;
        let _ = mol.rings.set(ring);
        Ok(mol)
    }

    /// Rewrite pentavalent nitrogen `N(=O)` groups as `[N+][O-]`.
    fn charge_separate_nitro(&mut self) {
        for i in 0..self.atoms.len() {
            let a = &self.atoms[i];
            if a.element != Element::N || a.formal_charge != 0 || a.aromatic || a.explicit_h.unwrap_or(0) != 0 {
                continue;
            }
            let sum: u32 = self.adjacency[i].iter().map(|&(_, b)| self.bonds[b].order.valence_contribution()).sum();
            if sum != 5 || self.adjacency[i].iter().any(|&(_, b)| self.bonds[b].order == BondOrder::Aromatic) {
                continue;
            }
            let oxo = self.adjacency[i].iter().copied().find(|&(w, b)| {
                let o = &self.atoms[w];
                o.element == Element::O
                    && o.formal_charge == 0
                    && self.adjacency[w].len() == 1
                    && self.bonds[b].order == BondOrder::Double
            });
            if let Some((w, b)) = oxo {
                self.atoms[i].formal_charge = 1;
                self.atoms[w].formal_charge = -1;
                self.bonds[b].order = BondOrder::Single;
            }
        }
    }

    /// Fold plain `[H]` atoms attached to one heavy atom into that atom's
    /// hydrogen count.
    fn collapse_hydrogens(self) -> Molecule {
        let removable: Vec<bool> = (0..self.atoms.len())
            .map(|i| {
                let a = &self.atoms[i];
                a.element == Element::H
                    && a.isotope.is_none()
                    && a.formal_charge == 0
                    && a.explicit_h.unwrap_or(0) == 0
                    && self.adjacency[i].len() == 1
                    && {
                        let (n, b) = self.adjacency[i][0];
                        self.atoms[n].element != Element::H && self.bonds[b].order == BondOrder::Single
                    }
            })
            .collect();
        if !removable.iter().any(|&r| r) {
            return self;
        }
        let implicit: Vec<u32> = (0..self.atoms.len()).map(|i| implicit_hydrogen_count(i, &self)).collect();
        let mut new_index = vec![usize::MAX; self.atoms.len()];
        let mut out = Molecule::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if removable[i] {
                continue;
            }
            let mut atom = atom.clone();
            let extra = self.adjacency[i].iter().filter(|(n, _)| removable[*n]).count() as u8;
            if extra > 0 {
                atom.explicit_h = Some(implicit[i] as u8 + extra);
            }
            new_index[i] = out.add_atom(atom);
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if removable[i] || atom.stereo_refs.is_empty() {
                continue;
            }
            let refs = &mut out.atoms[new_index[i]].stereo_refs;
            for r in refs.iter_mut() {
                if let StereoRef::Atom(x) = *r {
                    *r = if removable[x] { StereoRef::ImplicitH } else { StereoRef::Atom(new_index[x]) };
                }
            }
        }
        for bond in &self.bonds {
            if removable[bond.a] || removable[bond.b] {
                continue;
            }
            out.add_bond_with_stereo(new_index[bond.a], new_index[bond.b], bond.order, bond.stereo)
                .expect("subgraph of a simple graph");
        }
        out
    }
}

/// Hydrogen count of an atom: the bracket count if given, otherwise the
/// gap between the current bond-order sum and the smallest allowed valence
/// that accommodates it.
pub fn implicit_hydrogen_count(atom_index: usize, mol: &Molecule) -> u32 {
    if mol.sanitized {
        return mol.hydrogens[atom_index] as u32;
    }
    let atom = &mol.atoms[atom_index];
    if let Some(h) = atom.explicit_h {
        return h as u32;
    }
    let mut sum = 0;
    let mut n_arom = 0;
    for &(_, b) in mol.neighbors(atom_index) {
        match mol.bonds[b].order {
            BondOrder::Aromatic => n_arom += 1,
            o => sum += o.valence_contribution(),
        }
    }
    inferred_hydrogens(atom.element, atom.formal_charge as i32, sum, n_arom, atom.aromatic)
}

/// Hydrogens implied by a bond-order sum. Aromatic bonds count one each; an
/// aromatic atom whose sum is not already a legal valence is assumed to
/// carry one extra pi bond.
pub(crate) fn inferred_hydrogens(element: Element, charge: i32, sum: u32, n_arom: u32, aromatic: bool) -> u32 {
    let allowed = element.allowed_valences(charge);
    let mut used = sum + n_arom;
    if aromatic && n_arom > 0 && !allowed.iter().any(|&v| v as u32 == used) {
        used += 1;
    }
    allowed.iter().map(|&v| v as u32).find(|&v| v >= used).map_or(0, |v| v - used)
}

fn valence_violations(mol: &Molecule, orders: &[BondOrder], hydrogens: &[u8]) -> Vec<ValenceViolation> {
    let mut out = Vec::new();
    for (i, atom) in mol.atoms.iter().enumerate() {
        let bonds: u32 = mol.adjacency[i].iter().map(|&(_, b)| orders[b].valence_contribution()).sum();
        let valence = bonds + hydrogens[i] as u32;
        let allowed = atom.element.allowed_valences(atom.formal_charge as i32);
        if !allowed.iter().any(|&v| v as u32 == valence) {
            out.push(ValenceViolation { atom: i, element: atom.element, charge: atom.formal_charge, valence });
        }
    }
    out
}

/// Valence check on resolved bond orders. Aromatic input is kekulized
/// first when possible; otherwise aromatic bonds count as single.
pub fn validate_valences(mol: &Molecule) -> Vec<ValenceViolation> {
    if mol.sanitized {
        return valence_violations(mol, &mol.kekule, &mol.hydrogens);
    }
    let hydrogens: Vec<u8> = (0..mol.atoms.len()).map(|i| implicit_hydrogen_count(i, mol) as u8).collect();
    let mut probe = mol.clone();
    probe.hydrogens = hydrogens.clone();
    let orders = kekulize::assign_kekule(&probe).unwrap_or_else(|_| mol.bonds.iter().map(|b| b.order).collect());
    valence_violations(mol, &orders, &hydrogens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Molecule {
        let mut m = Molecule::new();
        for _ in 0..n {
            m.add_atom(Atom::new(Element::C));
        }
        for i in 1..n {
            m.add_bond(i - 1, i, BondOrder::Single).unwrap();
        }
        m
    }

    #[test]
    fn methane_has_four_hydrogens() {
        let m = chain(1);
        assert_eq!(implicit_hydrogen_count(0, &m), 4);
    }

    #[test]
    fn bracket_count_wins() {
        let mut m = Molecule::new();
        m.add_atom(Atom::bracket(Element::N, 4, 1));
        assert_eq!(implicit_hydrogen_count(0, &m), 4);
        assert!(m.sanitize().is_ok());
    }

    #[test]
    fn rejects_self_loops_and_parallel_bonds() {
        let mut m = chain(2);
        assert_eq!(m.add_bond(0, 0, BondOrder::Single), Err(GraphError::SelfLoop(0)));
        assert_eq!(m.add_bond(1, 0, BondOrder::Double), Err(GraphError::DuplicateBond(1, 0)));
    }

    #[test]
    fn pentavalent_carbon_is_flagged() {
        let mut m = chain(1);
        for _ in 0..5 {
            let c = m.add_atom(Atom::new(Element::C));
            m.add_bond(0, c, BondOrder::Single).unwrap();
        }
        let v = validate_valences(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].atom, 0);
        assert_eq!(v[0].valence, 5);
    }

    #[test]
    fn methane_weight() {
        let m = chain(1).sanitize().unwrap();
        assert!((m.molecular_weight() - 16.043).abs() < 0.01);
    }

    #[test]
    fn explicit_hydrogen_atoms_collapse() {
        let mut m = chain(1);
        for _ in 0..4 {
            let h = m.add_atom(Atom::bracket(Element::H, 0, 0));
            m.add_bond(0, h, BondOrder::Single).unwrap();
        }
        let m = m.sanitize().unwrap();
        assert_eq!(m.atom_count(), 1);
        assert_eq!(m.total_h(0), 4);
    }

    #[test]
    fn charge_shifts_allowed_valence() {
        assert_eq!(Element::N.allowed_valences(1), &[4]);
        assert_eq!(Element::O.allowed_valences(-1), &[1]);
        assert_eq!(Element::C.allowed_valences(1), &[3]);
        assert_eq!(Element::S.allowed_valences(1), &[3, 5]);
    }
}
