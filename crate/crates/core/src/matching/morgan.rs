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

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{BondOrder, Molecule};

fn hash_combine(seed: u32, value: u32) -> u32 {
    seed ^ value.wrapping_add(0x9e37_79b9).wrapping_add(seed << 6).wrapping_add(seed >> 2)
}

fn hash_values(values: &[u32]) -> u32 {
    values.iter().fold(0, |s, &v| hash_combine(s, v))
}

fn bond_type_code(order: BondOrder) -> u32 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 12,
    }
}

fn atom_invariant(mol: &Molecule, i: usize) -> u32 {
    let a = mol.atom(i);
    let h_nbrs = mol.neighbors(i).iter().filter(|&&(w, _)| mol.atom(w).element == crate::molgraph::Element::H).count();
    let total_h = mol.total_h(i) as usize + h_nbrs;
    let total_degree = mol.degree(i) + mol.total_h(i) as usize;
    let mass_delta = a.isotope.map_or(0, |m| (m as f64 - a.element.atomic_weight()) as i32);
    let mut values = vec![
        a.element.atomic_number() as u32,
        total_degree as u32,
        total_h as u32,
        a.formal_charge as i32 as u32,
        mass_delta as u32,
    ];
    if mol.ring_info().atom_in_ring(i) {
        values.push(1);
    }
    hash_values(&values)
}

/// Compare bond sets as binary numbers, highest bond index first.
fn cmp_bitset(a: &[u64], b: &[u64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// Circular environment identifiers up to `radius` with their
/// multiplicities; structurally repeated environments are counted once per
/// distinct bond set.
pub fn environment_counts(mol: &Molecule, radius: u32) -> BTreeMap<u32, u32> {
    let n = mol.atom_count();
    let words = mol.bond_count().div_ceil(64).max(1);
    let mut current: Vec<u32> = (0..n).map(|i| atom_invariant(mol, i)).collect();
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &id in &current {
        *counts.entry(id).or_default() += 1;
    }
    let mut neighborhood: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    let mut dead = vec![false; n];
    let mut seen: Vec<Vec<u64>> = Vec::new();
    for layer in 0..radius {
        let mut round: Vec<(Vec<u64>, u32, usize)> = Vec::new();
        let mut next_hood = neighborhood.clone();
        let mut next = current.clone();
        for i in 0..n {
            if dead[i] {
                continue;
            }
            if mol.degree(i) == 0 {
                dead[i] = true;
                continue;
            }
            let mut nbrs: Vec<(u32, u32)> = Vec::with_capacity(mol.degree(i));
            for &(w, b) in mol.neighbors(i) {
                next_hood[i][b / 64] |= 1 << (b % 64);
                for (x, y) in next_hood[i].iter_mut().zip(&neighborhood[w]) {
                    *x |= y;
                }
                nbrs.push((bond_type_code(mol.bond(b).order), current[w]));
            }
            nbrs.sort_unstable();
            let mut inv = hash_combine(layer, current[i]);
            for (bt, id) in nbrs {
                inv = hash_combine(inv, hash_combine(hash_combine(0, bt), id));
            }
            next[i] = inv;
            round.push((next_hood[i].clone(), inv, i));
        }
        round.sort_by(|a, b| cmp_bitset(&a.0, &b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        for (bits, inv, i) in round {
            if seen.contains(&bits) {
                dead[i] = true;
            } else {
                *counts.entry(inv).or_default() += 1;
                seen.push(bits);
            }
        }
        current = next;
        neighborhood = next_hood;
    }
    counts
}

/// Folded circular fingerprint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    bits: Vec<u64>,
    width: usize,
    radius: u32,
    on_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("fingerprint widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("fingerprint radii differ ({0} vs {1})")]
    RadiusMismatch(u32, u32),
}

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_WIDTH: usize = 2048;

const FOLD_SEED: u64 = 0x6d6f_6c62_656e_6368;

/// splitmix64 finalizer; pinned so folded bits never change between builds.
fn fold_hash(id: u32) -> u64 {
    let mut z = (id as u64) ^ FOLD_SEED;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Fingerprint {
    pub fn from_environments(ids: impl IntoIterator<Item = u32>, radius: u32, width: usize) -> Fingerprint {
        assert!(width > 0, "fingerprint width must be positive");
        let mut bits = vec![0u64; width.div_ceil(64)];
        for id in ids {
            let bit = (fold_hash(id) % width as u64) as usize;
            bits[bit / 64] |= 1 << (bit % 64);
        }
        let on_count = bits.iter().map(|w| w.count_ones()).sum();
        Fingerprint { bits, width, radius, on_count }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn on_count(&self) -> u32 {
        self.on_count
    }

    pub fn is_set(&self, bit: usize) -> bool {
        bit < self.width && self.bits[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Indices of set bits in increasing order.
    pub fn on_bits(&self) -> Vec<usize> {
        (0..self.width).filter(|&b| self.is_set(b)).collect()
    }
}

pub fn morgan_fingerprint(mol: &Molecule, radius: u32, width: usize) -> Fingerprint {
    Fingerprint::from_environments(environment_counts(mol, radius).into_keys(), radius, width)
}

/// Shared on-bits over the union of on-bits; 1.0 for two empty prints.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.width != b.width {
        return Err(FingerprintError::WidthMismatch(a.width, b.width));
    }
    if a.radius != b.radius {
        return Err(FingerprintError::RadiusMismatch(a.radius, b.radius));
    }
    let (mut inter, mut union) = (0u32, 0u32);
    for (x, y) in a.bits.iter().zip(&b.bits) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}
