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

use std::fmt::Write as _;

use crate::molgraph::{inferred_hydrogens, BondOrder, BondStereo, Chirality, Element, Molecule, StereoRef};

#[derive(Debug, Clone, Copy)]
pub(crate) struct WriteOptions {
    pub isotopes: bool,
    pub stereo: bool,
}

/// Emit SMILES visiting atoms in ascending `rank` order. Each component
/// starts from its lowest-ranked atom; components are returned separately.
pub(crate) fn write_components(mol: &Molecule, rank: &[u32], opts: WriteOptions) -> Vec<String> {
    let n = mol.atom_count();
    let sorted_nbrs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            let mut v = mol.neighbors(i).to_vec();
            v.sort_by_key(|&(w, _)| rank[w]);
            v
        })
        .collect();

    let mut visited = vec![false; n];
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&i| rank[i]);
    let mut out = Vec::new();
    for root in roots {
        if visited[root] {
            continue;
        }
        let tree = build_tree(mol, root, &sorted_nbrs, &mut visited);
        out.push(emit(mol, &tree, opts));
    }
    out
}

struct Tree {
    /// Atoms in output order.
    preorder: Vec<usize>,
    position: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    children: Vec<Vec<(usize, usize)>>,
    /// Ring-closure bonds per atom as `(partner, bond)`.
    closures: Vec<Vec<(usize, usize)>>,
}

fn build_tree(mol: &Molecule, root: usize, nbrs: &[Vec<(usize, usize)>], visited: &mut [bool]) -> Tree {
    let n = mol.atom_count();
    let mut tree = Tree {
        preorder: Vec::new(),
        position: vec![usize::MAX; n],
        parent: vec![None; n],
        children: vec![Vec::new(); n],
        closures: vec![Vec::new(); n],
    };
    let mut used_bond = vec![false; mol.bond_count()];
    // Explicit stack of (atom, next neighbor cursor).
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    visited[root] = true;
    tree.position[root] = 0;
    tree.preorder.push(root);
    while let Some(&mut (v, ref mut cursor)) = stack.last_mut() {
        if *cursor >= nbrs[v].len() {
            stack.pop();
            continue;
        }
        let (w, b) = nbrs[v][*cursor];
        *cursor += 1;
        if used_bond[b] {
            continue;
        }
        used_bond[b] = true;
        if visited[w] {
            tree.closures[v].push((w, b));
            tree.closures[w].push((v, b));
        } else {
            visited[w] = true;
            tree.position[w] = tree.preorder.len();
            tree.preorder.push(w);
            tree.parent[w] = Some((v, b));
            tree.children[v].push((w, b));
            stack.push((w, 0));
        }
    }
    tree
}

fn bond_token(mol: &Molecule, b: usize, from: usize, opts: WriteOptions) -> &'static str {
    let bond = mol.bond(b);
    let (x, y) = (mol.atom(bond.a), mol.atom(bond.b));
    if opts.stereo {
        if let Some(st) = bond.stereo {
            let st = if bond.a == from { st } else { st.flipped() };
            return match st {
                BondStereo::Up => "/",
                BondStereo::Down => "\\",
            };
        }
    }
    match bond.order {
        BondOrder::Single => {
            if x.aromatic && y.aromatic {
                "-"
            } else {
                ""
            }
        }
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => {
            if x.aromatic && y.aromatic {
                ""
            } else {
                ":"
            }
        }
    }
}

fn ring_label(d: usize) -> String {
    if d < 10 {
        d.to_string()
    } else {
        format!("%{d}")
    }
}

/// Hydrogens the parser will infer for an unbracketed atom here.
fn default_hydrogens(mol: &Molecule, i: usize) -> u32 {
    let atom = mol.atom(i);
    let mut sum = 0;
    let mut n_arom = 0;
    for &(_, b) in mol.neighbors(i) {
        match mol.bond(b).order {
            BondOrder::Aromatic => n_arom += 1,
            o => sum += o.valence_contribution(),
        }
    }
    inferred_hydrogens(atom.element, 0, sum, n_arom, atom.aromatic)
}

fn aromatic_symbol(e: Element) -> &'static str {
    match e {
        Element::B => "b",
        Element::C => "c",
        Element::N => "n",
        Element::O => "o",
        Element::P => "p",
        Element::S => "s",
        Element::As => "as",
        Element::Se => "se",
        other => other.symbol(),
    }
}

fn atom_token(mol: &Molecule, i: usize, chirality: Option<Chirality>, opts: WriteOptions) -> String {
    let atom = mol.atom(i);
    let h = mol.total_h(i);
    let isotope = atom.isotope.filter(|_| opts.isotopes);
    let symbol = if atom.aromatic { aromatic_symbol(atom.element) } else { atom.element.symbol() };
    let bare_ok = atom.element.is_organic_subset()
        && atom.formal_charge == 0
        && isotope.is_none()
        && chirality.is_none()
        && default_hydrogens(mol, i) == h;
    if bare_ok {
        return symbol.to_string();
    }
    let mut s = String::from("[");
    if let Some(iso) = isotope {
        let _ = write!(s, "{iso}");
    }
    s.push_str(symbol);
    match chirality {
        Some(Chirality::CounterClockwise) => s.push('@'),
        Some(Chirality::Clockwise) => s.push_str("@@"),
        None => {}
    }
    match h {
        0 => {}
        1 => s.push('H'),
        n => {
            let _ = write!(s, "H{n}");
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        q => {
            let _ = write!(s, "{q:+}");
        }
    }
    s.push(']');
    s
}

fn permutation_parity(a: &[StereoRef], b: &[StereoRef]) -> Option<bool> {
    if a.len() != b.len() {
        return None;
    }
    let mut perm = Vec::with_capacity(a.len());
    for x in a {
        perm.push(b.iter().position(|y| y == x)?);
    }
    let mut odd = false;
    let mut seen = vec![false; perm.len()];
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    Some(odd)
}

fn emit(mol: &Molecule, tree: &Tree, opts: WriteOptions) -> String {
    let n = mol.atom_count();
    // Ring digits: opened at the earlier atom, closed at the later one.
    let mut digit_of_bond = vec![usize::MAX; mol.bond_count()];
    let mut in_use = [false; 100];
    let mut ring_tokens: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for &v in &tree.preorder {
        let mut closing: Vec<(usize, usize)> =
            tree.closures[v].iter().copied().filter(|&(w, _)| tree.position[w] < tree.position[v]).collect();
        closing.sort_by_key(|&(w, b)| (tree.position[w], b));
        let mut tokens = Vec::new();
        for &(w, b) in &closing {
            let d = digit_of_bond[b];
            in_use[d] = false;
            tokens.push((w, b, false));
        }
        let mut opening: Vec<(usize, usize)> =
            tree.closures[v].iter().copied().filter(|&(w, _)| tree.position[w] > tree.position[v]).collect();
        opening.sort_by_key(|&(w, b)| (tree.position[w], b));
        for &(w, b) in &opening {
            let d = (1..100).find(|&d| !in_use[d]).expect("fewer than 100 open rings");
            in_use[d] = true;
            digit_of_bond[b] = d;
            tokens.push((w, b, true));
        }
        ring_tokens[v] = tokens;
    }

    let mut out = String::new();
    // Stack of actions: atom to write, or a closing parenthesis.
    enum Step {
        Atom(usize, Option<usize>),
        Open,
        Close,
    }
    let mut steps = vec![Step::Atom(tree.preorder[0], None)];
    while let Some(step) = steps.pop() {
        match step {
            Step::Close => out.push(')'),
            Step::Atom(v, via) => {
                if let Some(b) = via {
                    let parent = tree.parent[v].unwrap().0;
                    out.push_str(bond_token(mol, b, parent, opts));
                }
                let chirality = if opts.stereo { output_chirality(mol, tree, &ring_tokens, v) } else { None };
                out.push_str(&atom_token(mol, v, chirality, opts));
                for &(_, b, opening) in &ring_tokens[v] {
                    if opening {
                        out.push_str(bond_token(mol, b, v, opts));
                    }
                    out.push_str(&ring_label(digit_of_bond[b]));
                }
                let kids = &tree.children[v];
                for (k, &(w, b)) in kids.iter().enumerate().rev() {
                    if k + 1 == kids.len() {
                        steps.push(Step::Atom(w, Some(b)));
                    } else {
                        steps.push(Step::Close);
                        steps.push(Step::Atom(w, Some(b)));
                        steps.push(Step::Open);
                    }
                }
            }
            Step::Open => out.push('('),
        }
    }
    out
}

fn output_chirality(
    mol: &Molecule,
    tree: &Tree,
    ring_tokens: &[Vec<(usize, usize, bool)>],
    v: usize,
) -> Option<Chirality> {
    let atom = mol.atom(v);
    let chirality = atom.chirality?;
    let mut order = Vec::new();
    if let Some((p, _)) = tree.parent[v] {
        order.push(StereoRef::Atom(p));
    }
    if mol.total_h(v) > 0 {
        order.push(StereoRef::ImplicitH);
    }
    order.extend(ring_tokens[v].iter().map(|&(w, _, _)| StereoRef::Atom(w)));
    order.extend(tree.children[v].iter().map(|&(w, _)| StereoRef::Atom(w)));
    match permutation_parity(&atom.stereo_refs, &order) {
        Some(false) => Some(chirality),
        Some(true) => Some(chirality.inverted()),
        None => None,
    }
}
