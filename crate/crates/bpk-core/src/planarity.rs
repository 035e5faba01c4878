//! Left-right planarity test.
//!
//! Boolean-only variant: orientation DFS computes lowpoints and nesting
//! order, testing DFS maintains a stack of conflict pairs of return-edge
//! intervals. A graph is planar iff no interval pair ever conflicts on
//! both sides.

use crate::graph::Graph;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Default)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    fn new() -> Self {
        Interval { low: NONE, high: NONE }
    }

    fn is_empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Clone, Copy)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn new() -> Self {
        ConflictPair { left: Interval::new(), right: Interval::new() }
    }

    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct Lr<'a> {
    g: &'a Graph,
    // per vertex
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    // per directed edge (2*e + orientation bit)
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<usize>,
    refer: Vec<usize>,
    lowpt_edge: Vec<usize>,
    stack_bottom: Vec<usize>,
    oriented: Vec<bool>,
    stack: Vec<ConflictPair>,
}

impl<'a> Lr<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.n();
        let dm = 2 * g.m();
        Lr {
            g,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            out_edges: vec![Vec::new(); n],
            lowpt: vec![NONE; dm],
            lowpt2: vec![NONE; dm],
            nesting: vec![0; dm],
            refer: vec![NONE; dm],
            lowpt_edge: vec![NONE; dm],
            stack_bottom: vec![0; dm],
            oriented: vec![false; g.m()],
            stack: Vec::new(),
        }
    }

    fn directed(&self, e: usize, from: usize) -> usize {
        let (u, _) = self.g.endpoints(e);
        2 * e + usize::from(from != u)
    }

    fn target(&self, de: usize) -> usize {
        let (u, v) = self.g.endpoints(de / 2);
        if de % 2 == 0 {
            v
        } else {
            u
        }
    }

    fn source(&self, de: usize) -> usize {
        let (u, v) = self.g.endpoints(de / 2);
        if de % 2 == 0 {
            u
        } else {
            v
        }
    }

    fn orientation_dfs(&mut self, v: usize) {
        let e = self.parent_edge[v];
        for &w in self.g.neighbours(v) {
            let eid = self.g.edge_id(v, w).unwrap();
            if self.oriented[eid] {
                continue;
            }
            self.oriented[eid] = true;
            let vw = self.directed(eid, v);
            self.out_edges[v].push(vw);
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == NONE {
                // tree edge
                self.parent_edge[w] = vw;
                self.height[w] = self.height[v] + 1;
                self.orientation_dfs(w);
            } else {
                // back edge
                self.lowpt[vw] = self.height[w];
            }
            self.nesting[vw] = 2 * self.lowpt[vw];
            if self.lowpt2[vw] < self.height[v] {
                // chordal: nest inside
                self.nesting[vw] += 1;
            }
            if e != NONE {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.is_empty() && self.lowpt[i.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low];
        }
        self.lowpt[p.left.low].min(self.lowpt[p.right.low])
    }

    fn testing_dfs(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let out = self.out_edges[v].clone();
        for (idx, &ei) in out.iter().enumerate() {
            self.stack_bottom[ei] = self.stack.len();
            let w = self.target(ei);
            if self.parent_edge[w] == ei {
                if !self.testing_dfs(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                let mut p = ConflictPair::new();
                p.right = Interval { low: ei, high: ei };
                self.stack.push(p);
            }
            if self.lowpt[ei] < self.height[v] {
                // ei has a return edge below v
                if idx == 0 {
                    if e != NONE {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    }
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            let u = self.source(e);
            self.trim_back_edges(u);
            if self.lowpt[e] < self.height[u] {
                if let Some(top) = self.stack.last() {
                    let hl = top.left.high;
                    let hr = top.right.high;
                    if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                        self.refer[e] = hl;
                    } else {
                        self.refer[e] = hr;
                    }
                }
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let bottom = self.stack_bottom[ei];
        let mut p = ConflictPair::new();
        // merge return edges of ei into p.right
        while self.stack.len() > bottom {
            let mut q = self.stack.pop().unwrap();
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right.high = q.right.high;
                } else {
                    self.refer[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                // align the lowest return edge with e
                self.refer[q.right.low] = self.lowpt_edge[e];
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            // interval below lowpt(ei) continues p.right
            if p.right.low != NONE {
                self.refer[p.right.low] = q.right.high;
            }
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left.high = q.left.high;
            } else {
                self.refer[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn trim_back_edges(&mut self, u: usize) {
        // drop conflict pairs whose lowest return lands exactly on u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) == self.height[u] {
                self.stack.pop();
            } else {
                break;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while p.left.high != NONE && self.target(p.left.high) == u {
                p.left.high = self.refer[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.refer[p.left.low] = p.right.low;
                p.left.low = NONE;
            }
            while p.right.high != NONE && self.target(p.right.high) == u {
                p.right.high = self.refer[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.refer[p.right.low] = p.left.low;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
    }
}

pub fn is_planar(g: &Graph) -> bool {
    let n = g.n();
    let m = g.m();
    if n <= 4 {
        return true;
    }
    if m > 3 * n - 6 {
        return false;
    }
    let mut lr = Lr::new(g);
    let mut roots = Vec::new();
    for v in 0..n {
        if lr.height[v] == NONE {
            lr.height[v] = 0;
            roots.push(v);
            lr.orientation_dfs(v);
        }
    }
    for v in 0..n {
        lr.out_edges[v].sort_by_key(|&de| lr.nesting[de]);
    }
    roots.into_iter().all(|r| lr.testing_dfs(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, pairs).unwrap()
    }

    /// Subdivides every edge once.
    fn subdivide(g: &Graph) -> Graph {
        let mut h = Graph::new(g.n() + g.m());
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            let mid = g.n() + i;
            h.add_edge(u, mid).unwrap();
            h.add_edge(mid, v).unwrap();
        }
        h
    }

    #[test]
    fn planar_families() {
        assert!(is_planar(&Graph::path(10)));
        assert!(is_planar(&Graph::cycle(12)));
        assert!(is_planar(&Graph::grid(5, 7)));
        assert!(is_planar(&Graph::complete(4)));
        assert!(is_planar(&Graph::complete_bipartite(2, 9)));
        // octahedron
        assert!(is_planar(&from_pairs(
            6,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 1),
                (5, 1),
                (5, 2),
                (5, 3),
                (5, 4)
            ]
        )));
        // Goldner-Harary, a maximal planar graph
        assert!(is_planar(&from_pairs(
            12,
            &[
                (1, 2),
                (1, 3),
                (1, 4),
                (1, 5),
                (1, 7),
                (1, 8),
                (1, 10),
                (1, 11),
                (2, 3),
                (2, 4),
                (2, 6),
                (2, 7),
                (2, 9),
                (2, 10),
                (2, 11),
                (3, 4),
                (4, 5),
                (4, 6),
                (4, 7),
                (5, 7),
                (6, 7),
                (7, 8),
                (7, 9),
                (7, 10),
                (8, 10),
                (9, 10),
                (10, 11)
            ]
        )));
    }

    #[test]
    fn nonplanar_families() {
        assert!(!is_planar(&Graph::complete(5)));
        assert!(!is_planar(&Graph::complete(6)));
        assert!(!is_planar(&Graph::complete_bipartite(3, 3)));
        assert!(!is_planar(&Graph::complete_bipartite(3, 4)));
        let petersen = from_pairs(
            10,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (5, 7),
                (7, 9),
                (9, 6),
                (6, 8),
                (8, 5),
                (0, 5),
                (1, 6),
                (2, 7),
                (3, 8),
                (4, 9),
            ],
        );
        assert!(!is_planar(&petersen));
    }

    #[test]
    fn subdivisions_preserve_planarity() {
        assert!(!is_planar(&subdivide(&Graph::complete(5))));
        assert!(!is_planar(&subdivide(&Graph::complete_bipartite(3, 3))));
        assert!(!is_planar(&subdivide(&subdivide(&Graph::complete(5)))));
        assert!(is_planar(&subdivide(&Graph::complete(4))));
    }

    #[test]
    fn deleting_one_edge_saves_kuratowski_graphs() {
        for base in [Graph::complete(5), Graph::complete_bipartite(3, 3)] {
            for drop in 0..base.m() {
                let keep: Vec<usize> = (0..base.m()).filter(|&e| e != drop).collect();
                let sub = base.edge_subgraph(&keep);
                assert!(is_planar(&sub));
            }
        }
    }

    #[test]
    fn mixed_instances() {
        // planar despite looking tangled
        assert!(is_planar(&from_pairs(
            14,
            &[
                (3, 10),
                (2, 13),
                (1, 13),
                (7, 11),
                (0, 8),
                (8, 13),
                (0, 2),
                (0, 7),
                (0, 10),
                (1, 7)
            ]
        )));
        // no K5 or K33 subgraph directly, still nonplanar
        assert!(!is_planar(&from_pairs(
            8,
            &[
                (1, 5),
                (1, 6),
                (1, 7),
                (2, 6),
                (2, 3),
                (3, 5),
                (3, 7),
                (4, 5),
                (4, 6),
                (4, 7)
            ]
        )));
        assert!(!is_planar(&from_pairs(
            14,
            &[
                (1, 2),
                (4, 13),
                (0, 13),
                (4, 5),
                (7, 10),
                (1, 7),
                (0, 3),
                (2, 6),
                (5, 6),
                (7, 13),
                (4, 8),
                (0, 8),
                (0, 9),
                (2, 13),
                (6, 7),
                (3, 6),
                (2, 8)
            ]
        )));
        // disjoint union: nonplanar part dominates
        let mut both = Vec::new();
        for (u, v) in
            [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        {
            both.push((u, v));
        }
        both.extend([(6, 7), (7, 8), (8, 6)]);
        assert!(!is_planar(&from_pairs(9, &both)));
    }

    #[test]
    fn k5_on_a_stick_and_dense_rejection() {
        // attach a pendant path to K5: still nonplanar
        let mut edges =
            vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
        edges.extend([(4, 5), (5, 6), (6, 7)]);
        assert!(!is_planar(&from_pairs(8, &edges)));
        assert!(!is_planar(&Graph::complete(8)));
    }
}
