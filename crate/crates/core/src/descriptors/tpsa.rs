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

use super::tables::{Slot, TpsaTable};
use super::{stable_sum, ParameterTables};

/// Bond environment of one polar atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Environment {
    neighbors: i32,
    hydrogens: i32,
    single: i32,
    double: i32,
    triple: i32,
    aromatic: i32,
    charge: i32,
    in_three_ring: bool,
}

fn environment(mol: &Molecule, i: usize) -> Environment {
    let mut env = Environment {
        neighbors: 0,
        hydrogens: mol.total_h(i) as i32,
        single: 0,
        double: 0,
        triple: 0,
        aromatic: 0,
        charge: mol.atom(i).formal_charge as i32,
        in_three_ring: mol.ring_info().atom_in_ring_of_size(i, 3),
    };
    for &(w, b) in mol.neighbors(i) {
        if mol.atom(w).element == Element::H {
            env.hydrogens += 1;
            continue;
        }
        env.neighbors += 1;
        match mol.bond(b).order {
            BondOrder::Single => env.single += 1,
            BondOrder::Double => env.double += 1,
            BondOrder::Triple => env.triple += 1,
            BondOrder::Aromatic => env.aromatic += 1,
        }
    }
    env
}

fn fits(slot: Slot, v: i32) -> bool {
    slot.is_none_or(|s| s == v)
}

fn contribution(table: &TpsaTable, element: Element, env: &Environment) -> Option<f64> {
    let rule = table.rules.iter().find(|r| {
        r.element == element
            && fits(r.neighbors, env.neighbors)
            && fits(r.hydrogens, env.hydrogens)
            && fits(r.single, env.single)
            && fits(r.double, env.double)
            && fits(r.triple, env.triple)
            && fits(r.aromatic, env.aromatic)
            && fits(r.charge, env.charge)
            && r.in_three_ring.is_none_or(|y| y == env.in_three_ring)
    });
    if let Some(r) = rule {
        return Some(r.value);
    }
    let d = table.defaults.iter().find(|d| d.element == element)?;
    Some((d.base - d.per_neighbor * env.neighbors as f64 + d.per_h * env.hydrogens as f64).max(0.0))
}

/// Polar surface contribution of each atom; zero for elements the table
/// does not cover.
pub fn tpsa_contributions(mol: &Molecule, t: &ParameterTables) -> Vec<f64> {
    (0..mol.atom_count())
        .map(|i| contribution(&t.tpsa, mol.atom(i).element, &environment(mol, i)).unwrap_or(0.0))
        .collect()
}

/// Topological polar surface area in square angstroms.
pub fn tpsa(mol: &Molecule, t: &ParameterTables) -> f64 {
    stable_sum(tpsa_contributions(mol, t))
}
