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

use std::collections::{HashSet, VecDeque};

use super::Molecule;

/// Smallest set of smallest rings plus per-atom and per-bond membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInfo {
    rings: Vec<Vec<usize>>,
    bond_rings: Vec<Vec<usize>>,
    atom_membership: Vec<u8>,
    bond_membership: Vec<u8>,
    atom_min_size: Vec<u16>,
    extended: Vec<Vec<usize>>,
    extended_bonds: Vec<Vec<usize>>,
}

impl RingInfo {
    pub fn new(mol: &Molecule) -> RingInfo {
        let edges: Vec<(usize, usize)> = mol.bonds().iter().map(|b| (b.a, b.b)).collect();
        let rings = minimum_cycle_basis(mol.atom_count(), &edges);
        let mut bond_rings = Vec::with_capacity(rings.len());
        let mut atom_membership = vec![0u8; mol.atom_count()];
        let mut bond_membership = vec![0u8; mol.bond_count()];
        let mut atom_min_size = vec![0u16; mol.atom_count()];
        for ring in &rings {
            let mut bonds = Vec::with_capacity(ring.len());
            for k in 0..ring.len() {
                let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                let bi = mol.bond_between(a, b).expect("ring edge is a bond");
                bonds.push(bi);
                bond_membership[bi] = bond_membership[bi].saturating_add(1);
                atom_membership[a] = atom_membership[a].saturating_add(1);
                let size = ring.len() as u16;
                if atom_min_size[a] == 0 || size < atom_min_size[a] {
                    atom_min_size[a] = size;
                }
            }
            bond_rings.push(bonds);
        }
        let (extended, extended_bonds) = if rings.len() < 2 {
            (rings.clone(), bond_rings.clone())
        } else {
            let max_len = rings.iter().map(Vec::len).max().unwrap_or(0);
            let cycles = relevant_cycles(mol.atom_count(), &edges, max_len).unwrap_or_else(|| rings.clone());
            let bonds = cycles
                .iter()
                .map(|c| (0..c.len()).map(|k| mol.bond_between(c[k], c[(k + 1) % c.len()]).unwrap()).collect())
                .collect();
            (cycles, bonds)
        };
        RingInfo { rings, bond_rings, atom_membership, bond_membership, atom_min_size, extended, extended_bonds }
    }

    /// Rings as ordered atom cycles.
    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    /// Rings as bond index lists, parallel to [`rings`](Self::rings).
    pub fn bond_rings(&self) -> &[Vec<usize>] {
        &self.bond_rings
    }

    pub fn num_rings(&self) -> usize {
        self.rings.len()
    }

    pub fn atom_in_ring(&self, atom: usize) -> bool {
        self.atom_membership[atom] > 0
    }

    pub fn bond_in_ring(&self, bond: usize) -> bool {
        self.bond_membership[bond] > 0
    }

    pub fn atom_ring_count(&self, atom: usize) -> usize {
        self.atom_membership[atom] as usize
    }

    pub fn bond_ring_count(&self, bond: usize) -> usize {
        self.bond_membership[bond] as usize
    }

    /// Size of the smallest ring containing the atom, 0 if acyclic.
    pub fn smallest_ring_size(&self, atom: usize) -> usize {
        self.atom_min_size[atom] as usize
    }

    pub fn atom_in_ring_of_size(&self, atom: usize, size: usize) -> bool {
        self.rings.iter().any(|r| r.len() == size && r.contains(&atom))
    }

    /// Every cycle that is not a sum of shorter cycles. Equal to
    /// [`rings`](Self::rings) unless symmetric alternatives exist, as in cages.
    pub fn relevant_rings(&self) -> &[Vec<usize>] {
        &self.extended
    }

    /// Atoms at the ends of a path of two or more bonds shared by a pair of
    /// rings.
    pub fn bridgehead_atoms(&self, mol: &Molecule) -> Vec<usize> {
        let mut flag = vec![false; mol.atom_count()];
        for i in 0..self.extended_bonds.len() {
            for j in i + 1..self.extended_bonds.len() {
                let shared: Vec<usize> =
                    self.extended_bonds[i].iter().copied().filter(|b| self.extended_bonds[j].contains(b)).collect();
                if shared.len() < 2 {
                    continue;
                }
                let mut count = vec![0u8; mol.atom_count()];
                for &b in &shared {
                    let bond = mol.bond(b);
                    count[bond.a] += 1;
                    count[bond.b] += 1;
                }
                for (a, &c) in count.iter().enumerate() {
                    if c == 1 {
                        flag[a] = true;
                    }
                }
            }
        }
        (0..flag.len()).filter(|&a| flag[a]).collect()
    }

    /// Atoms that are the only common atom of some pair of rings.
    pub fn spiro_atoms(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.extended.len() {
            for j in i + 1..self.extended.len() {
                let shared: Vec<usize> =
                    self.extended[i].iter().copied().filter(|a| self.extended[j].contains(a)).collect();
                if shared.len() == 1 {
                    out.push(shared[0]);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `E - V + C` for an undirected simple graph.
pub fn cycle_rank(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    let mut forest_edges = 0;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
        if ra != rb {
            dsu[ra] = rb;
            forest_edges += 1;
        }
    }
    edges.len() - forest_edges
}

/// A minimum cycle basis, each cycle as an ordered atom list.
///
/// Candidates are Horton cycles built from breadth-first shortest-path
/// trees; a greedy pass over GF(2) edge-incidence vectors keeps the
/// shortest independent ones.
pub fn minimum_cycle_basis(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let rank = cycle_rank(n, edges);
    if rank == 0 {
        return Vec::new();
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }

    // Trim acyclic branches; they never lie on a cycle.
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &(w, _) in &adj[v] {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    queue.push_back(w);
                }
            }
        }
    }

    let words = edges.len().div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut candidates: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    for root in (0..n).filter(|&v| alive[v]) {
        parent.fill(usize::MAX);
        parent_edge.fill(usize::MAX);
        dist.fill(usize::MAX);
        dist[root] = 0;
        let mut bfs = VecDeque::from([root]);
        let mut order = Vec::new();
        while let Some(v) = bfs.pop_front() {
            order.push(v);
            for &(w, e) in &adj[v] {
                if alive[w] && dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    parent_edge[w] = e;
                    bfs.push_back(w);
                }
            }
        }
        let path = |mut v: usize| {
            let mut p = vec![v];
            while v != root {
                v = parent[v];
                p.push(v);
            }
            p
        };
        for (e, &(x, y)) in edges.iter().enumerate() {
            if !alive[x] || !alive[y] || dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            if parent_edge[x] == e || parent_edge[y] == e || dist[x].abs_diff(dist[y]) > 1 {
                continue;
            }
            let px = path(x);
            let py = path(y);
            let sx: HashSet<usize> = px[..px.len() - 1].iter().copied().collect();
            if py[..py.len() - 1].iter().any(|v| sx.contains(v)) {
                continue;
            }
            let mut cycle: Vec<usize> = px.iter().rev().copied().collect();
            cycle.extend(py[..py.len() - 1].iter().copied());
            let mut bits = vec![0u64; words];
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                let ei = adj[a].iter().find(|(w, _)| *w == b).unwrap().1;
                bits[ei / 64] |= 1 << (ei % 64);
            }
            if seen.insert(bits.clone()) {
                candidates.push((bits, cycle));
            }
        }
    }
    candidates.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.0.cmp(&b.0)));

    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (bits, cycle) in candidates {
        let mut v = bits;
        for (pivot, row) in &basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x ^= r;
                }
            }
        }
        let Some(pivot) = first_bit(&v) else { continue };
        for (_, row) in basis.iter_mut() {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (r, x) in row.iter_mut().zip(&v) {
                    *r ^= x;
                }
            }
        }
        basis.push((pivot, v));
        chosen.push(canonical_rotation(cycle));
        if chosen.len() == rank {
            break;
        }
    }
    chosen
}

/// Relevant cycles no longer than `max_len`, or `None` when the simple
/// cycle enumeration exceeds its step budget.
fn relevant_cycles(n: usize, edges: &[(usize, usize)], max_len: usize) -> Option<Vec<Vec<usize>>> {
    const STEP_LIMIT: usize = 200_000;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let words = edges.len().div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut cycles: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
    let mut steps = 0usize;
    let mut on_path = vec![false; n];
    for start in 0..n {
        // Paths through vertices above `start` only, so each cycle is found
        // from its lowest vertex.
        let mut path = vec![start];
        let mut path_edges: Vec<usize> = Vec::new();
        let mut cursor = vec![0usize];
        on_path[start] = true;
        while let Some(c) = cursor.last_mut() {
            let v = *path.last().unwrap();
            if *c >= adj[v].len() {
                cursor.pop();
                on_path[v] = false;
                path.pop();
                path_edges.pop();
                continue;
            }
            let (w, e) = adj[v][*c];
            *c += 1;
            steps += 1;
            if steps > STEP_LIMIT {
                return None;
            }
            if w == start && path.len() >= 3 && path_edges.first() != Some(&e) {
                let mut bits = vec![0u64; words];
                for &pe in path_edges.iter().chain(std::iter::once(&e)) {
                    bits[pe / 64] |= 1 << (pe % 64);
                }
                if seen.insert(bits.clone()) {
                    cycles.push((bits, path.clone()));
                }
                continue;
            }
            if w <= start || on_path[w] || path.len() >= max_len {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            path_edges.push(e);
            cursor.push(0);
        }
    }
    cycles.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.0.cmp(&b.0)));

    let reduce = |basis: &[(usize, Vec<u64>)], bits: &[u64]| {
        let mut v = bits.to_vec();
        for (pivot, row) in basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x ^= r;
                }
            }
        }
        v
    };
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cycles.len() {
        let len = cycles[k].1.len();
        let end = k + cycles[k..].iter().take_while(|c| c.1.len() == len).count();
        for (bits, cycle) in &cycles[k..end] {
            if first_bit(&reduce(&basis, bits)).is_some() {
                out.push(canonical_rotation(cycle.clone()));
            }
        }
        for (bits, _) in &cycles[k..end] {
            let v = reduce(&basis, bits);
            let Some(pivot) = first_bit(&v) else { continue };
            for (_, row) in basis.iter_mut() {
                if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                    for (r, x) in row.iter_mut().zip(&v) {
                        *r ^= x;
                    }
                }
            }
            basis.push((pivot, v));
        }
        k = end;
    }
    Some(out)
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Start at the lowest index and walk toward its smaller neighbor.
fn canonical_rotation(mut cycle: Vec<usize>) -> Vec<usize> {
    let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
    cycle.rotate_left(start);
    if cycle.len() > 2 && cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_sizes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut s: Vec<usize> = minimum_cycle_basis(n, edges).iter().map(|r| r.len()).collect();
        s.sort();
        s
    }

    #[test]
    fn cyclohexane() {
        let e: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(ring_sizes(6, &e), vec![6]);
    }

    #[test]
    fn naphthalene_skeleton() {
        let e = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (4, 6), (6, 7), (7, 8), (8, 9), (9, 3)];
        assert_eq!(ring_sizes(10, &e), vec![6, 6]);
    }

    #[test]
    fn cubane_has_five_four_rings() {
        let e = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
        assert_eq!(ring_sizes(8, &e), vec![4; 5]);
    }

    #[test]
    fn bridge_between_rings_is_skipped() {
        let mut e: Vec<_> = (0..3).map(|i| (i, (i + 1) % 3)).collect();
        e.extend((3..6).map(|i| (i, if i == 5 { 3 } else { i + 1 })));
        e.push((0, 3));
        assert_eq!(ring_sizes(6, &e), vec![3, 3]);
    }

    #[test]
    fn rotation_is_normalized() {
        assert_eq!(canonical_rotation(vec![5, 3, 9, 1]), vec![1, 5, 3, 9]);
        assert_eq!(canonical_rotation(vec![2, 0, 7]), vec![0, 2, 7]);
    }
}
