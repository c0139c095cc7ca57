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

//! VF2-style subgraph monomorphism search.

use std::ops::ControlFlow;

/// Adjacency lists of `(neighbor, edge id)`.
pub(crate) type Adjacency = [Vec<(usize, usize)>];

/// Enumerate injective maps from pattern nodes to target nodes that keep
/// every pattern edge. `visit` receives each complete mapping indexed by
/// pattern node and may stop the search.
pub(crate) fn search<N, E, V>(
    pattern: &Adjacency,
    target: &Adjacency,
    node_ok: N,
    edge_ok: E,
    root: Option<usize>,
    mut visit: V,
) where
    N: Fn(usize, usize) -> bool,
    E: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]) -> ControlFlow<()>,
{
    let np = pattern.len();
    if np == 0 || np > target.len() {
        return;
    }
    let (order, anchor) = visit_order(pattern);
    let mut state = State {
        pattern,
        target,
        order,
        anchor,
        map: vec![usize::MAX; np],
        used: vec![false; target.len()],
        pattern_depth: vec![usize::MAX; np],
    };
    for (d, &p) in state.order.iter().enumerate() {
        state.pattern_depth[p] = d;
    }
    let _ = state.extend(0, &node_ok, &edge_ok, root, &mut visit);
}

/// Breadth-first order over each pattern component, with the already
/// ordered neighbor (and edge) through which each node is reached.
fn visit_order(pattern: &Adjacency) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
    let n = pattern.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut anchor = vec![None; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, e) in &pattern[v] {
                if !seen[w] {
                    seen[w] = true;
                    anchor[w] = Some((v, e));
                    order.push(w);
                }
            }
        }
    }
    let anchor = order.iter().map(|&p| anchor[p]).collect();
    (order, anchor)
}

struct State<'a> {
    pattern: &'a Adjacency,
    target: &'a Adjacency,
    order: Vec<usize>,
    anchor: Vec<Option<(usize, usize)>>,
    map: Vec<usize>,
    used: Vec<bool>,
    pattern_depth: Vec<usize>,
}

impl State<'_> {
    fn extend<N, E, V>(
        &mut self,
        depth: usize,
        node_ok: &N,
        edge_ok: &E,
        root: Option<usize>,
        visit: &mut V,
    ) -> ControlFlow<()>
    where
        N: Fn(usize, usize) -> bool,
        E: Fn(usize, usize) -> bool,
        V: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let p = self.order[depth];
        let candidates: Vec<usize> = match (depth, root, self.anchor[depth]) {
            (0, Some(r), _) => vec![r],
            (_, _, Some((q, _))) => {
                self.target[self.map[q]].iter().map(|&(t, _)| t).filter(|&t| !self.used[t]).collect()
            }
            _ => (0..self.target.len()).filter(|&t| !self.used[t]).collect(),
        };
        for t in candidates {
            if !node_ok(p, t) || !self.feasible(p, t, depth, edge_ok) {
                continue;
            }
            self.map[p] = t;
            self.used[t] = true;
            let flow = self.extend(depth + 1, node_ok, edge_ok, root, visit);
            self.map[p] = usize::MAX;
            self.used[t] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn feasible<E: Fn(usize, usize) -> bool>(&self, p: usize, t: usize, depth: usize, edge_ok: &E) -> bool {
        if self.pattern[p].len() > self.target[t].len() {
            return false;
        }
        let mut pattern_free = 0;
        for &(q, pe) in &self.pattern[p] {
            if self.pattern_depth[q] < depth {
                let image = self.map[q];
                match self.target[t].iter().find(|&&(w, _)| w == image) {
                    Some(&(_, te)) if edge_ok(pe, te) => {}
                    _ => return false,
                }
            } else {
                pattern_free += 1;
            }
        }
        let target_free = self.target[t].iter().filter(|&&(w, _)| !self.used[w]).count();
        pattern_free <= target_free
    }
}
