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

use thiserror::Error;

use super::{implicit_hydrogen_count, Atom, BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("can't kekulize aromatic system, unmatched atoms {atoms:?}")]
pub struct KekulizationError {
    pub atoms: Vec<usize>,
}

const SEARCH_LIMIT: usize = 2_000_000;

/// Replace aromatic bonds by an alternating single/double assignment.
pub fn kekulize(mol: &Molecule) -> Result<Molecule, KekulizationError> {
    let orders = if mol.sanitized {
        mol.kekule.clone()
    } else {
        let mut probe = mol.clone();
        probe.hydrogens = (0..mol.atom_count()).map(|i| implicit_hydrogen_count(i, mol) as u8).collect();
        assign_kekule(&probe)?
    };
    let mut out = Molecule::new();
    for (i, atom) in mol.atoms().iter().enumerate() {
        let h = mol.total_h(i) as u8;
        out.add_atom(Atom { aromatic: false, explicit_h: Some(h), ..atom.clone() });
    }
    for (bi, b) in mol.bonds().iter().enumerate() {
        out.add_bond_with_stereo(b.a, b.b, orders[bi], b.stereo).expect("copy of a simple graph");
    }
    Ok(out)
}

/// Kekulé orders for every bond. `mol.hydrogens` must be populated.
pub(crate) fn assign_kekule(mol: &Molecule) -> Result<Vec<BondOrder>, KekulizationError> {
    let n = mol.atom_count();
    let mut orders: Vec<BondOrder> = mol.bonds().iter().map(|b| b.order).collect();
    if !orders.contains(&BondOrder::Aromatic) {
        return Ok(orders);
    }

    let mut needs = vec![false; n];
    for (i, need) in needs.iter_mut().enumerate() {
        let mut used = mol.hydrogens[i] as u32;
        let mut n_arom = 0;
        for &(_, b) in mol.neighbors(i) {
            match orders[b] {
                BondOrder::Aromatic => n_arom += 1,
                o => used += o.valence_contribution(),
            }
        }
        if n_arom == 0 {
            continue;
        }
        used += n_arom;
        let atom = mol.atom(i);
        let target =
            atom.element.allowed_valences(atom.formal_charge as i32).iter().map(|&v| v as u32).find(|&v| v >= used);
        *need = matches!(target, Some(v) if v > used);
    }

    // Candidate partners: aromatic bonds whose both ends need a double.
    let partners: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            if !needs[i] {
                return Vec::new();
            }
            mol.neighbors(i).iter().copied().filter(|&(w, b)| orders[b] == BondOrder::Aromatic && needs[w]).collect()
        })
        .collect();

    let mut mate = vec![usize::MAX; n];
    let mut mate_bond = vec![usize::MAX; n];
    let mut steps = 0;
    if !search(&partners, &needs, &mut mate, &mut mate_bond, &mut steps) {
        let unmatched: Vec<usize> = (0..n).filter(|&i| needs[i]).collect();
        return Err(KekulizationError { atoms: unmatched });
    }
    for o in orders.iter_mut() {
        if *o == BondOrder::Aromatic {
            *o = BondOrder::Single;
        }
    }
    for i in 0..n {
        if mate_bond[i] != usize::MAX {
            orders[mate_bond[i]] = BondOrder::Double;
        }
    }
    Ok(orders)
}

/// Perfect matching on the needing atoms by most-constrained-first
/// backtracking.
fn search(
    partners: &[Vec<(usize, usize)>],
    needs: &[bool],
    mate: &mut [usize],
    mate_bond: &mut [usize],
    steps: &mut usize,
) -> bool {
    *steps += 1;
    if *steps > SEARCH_LIMIT {
        return false;
    }
    let mut best: Option<(usize, usize)> = None;
    for i in 0..needs.len() {
        if !needs[i] || mate[i] != usize::MAX {
            continue;
        }
        let free = partners[i].iter().filter(|(w, _)| mate[*w] == usize::MAX).count();
        if free == 0 {
            return false;
        }
        if best.is_none_or(|(_, f)| free < f) {
            best = Some((i, free));
            if free == 1 {
                break;
            }
        }
    }
    let Some((v, _)) = best else { return true };
    for k in 0..partners[v].len() {
        let (w, b) = partners[v][k];
        if mate[w] != usize::MAX {
            continue;
        }
        mate[v] = w;
        mate[w] = v;
        mate_bond[v] = b;
        mate_bond[w] = usize::MAX;
        if search(partners, needs, mate, mate_bond, steps) {
            return true;
        }
        mate[v] = usize::MAX;
        mate[w] = usize::MAX;
        mate_bond[v] = usize::MAX;
    }
    false
}
