use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Default vertex cap for the exact treewidth subset DP. Overridable per call
/// (CLI: --cap-tw or BPK_CAP_TW).
pub const DEFAULT_TW_CAP: usize = 20;

/// Hard limit of the DP table (2^n bytes).
const HARD_TW_LIMIT: usize = 26;

#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    /// Tree on bag indices.
    pub tree: Graph,
    pub bags: Vec<BTreeSet<VertexId>>,
}

impl TreeDecomposition {
    /// Max bag size minus one (0 for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Single-bag decomposition containing all of V(g).
    pub fn trivial(g: &Graph) -> TreeDecomposition {
        TreeDecomposition { tree: Graph::new(1), bags: vec![(0..g.n()).collect()] }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    fn from(violations: Vec<String>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }
}

/// Checks the three tree-decomposition axioms plus tree-ness. Reports all
/// violations instead of failing on the first.
pub fn validate_tree_decomposition(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let mut v = Vec::new();
    let t = &td.tree;
    if td.bags.len() != t.n() {
        v.push(format!("bag count {} != tree node count {}", td.bags.len(), t.n()));
        return ValidationReport::from(v);
    }
    if t.n() == 0 {
        v.push("decomposition has no nodes".into());
        return ValidationReport::from(v);
    }
    if !t.is_connected() || t.m() != t.n() - 1 {
        v.push(format!("tree is not a tree ({} nodes, {} edges)", t.n(), t.m()));
    }
    for vert in 0..g.n() {
        let nodes: Vec<usize> =
            (0..t.n()).filter(|&i| td.bags[i].contains(&vert)).collect();
        if nodes.is_empty() {
            v.push(format!("vertex {vert} is in no bag"));
            continue;
        }
        // Subtree connectivity: BFS inside the node set.
        let mut seen = BTreeSet::from([nodes[0]]);
        let mut queue = std::collections::VecDeque::from([nodes[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in t.neighbours(x) {
                if nodes.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != nodes.len() {
            v.push(format!("bags containing vertex {vert} do not form a subtree"));
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if !td.bags.iter().any(|bag| bag.contains(&a) && bag.contains(&b)) {
            v.push(format!("edge {e} ({a}-{b}) is covered by no bag"));
        }
    }
    ValidationReport::from(v)
}

/// Exact treewidth with a witness decomposition, via the elimination-order
/// subset DP: TW(S) = min over v in S of max(TW(S \ v), |Q(S \ v, v)|) where
/// Q(S, v) counts vertices outside S reachable from v through S.
pub fn exact_treewidth(g: &Graph, cap: usize) -> Result<(usize, TreeDecomposition)> {
    let n = g.n();
    if n > cap || n > HARD_TW_LIMIT {
        return Err(Error::CapExceeded { n, cap: cap.min(HARD_TW_LIMIT) });
    }
    if n == 0 {
        return Ok((0, TreeDecomposition { tree: Graph::new(1), bags: vec![BTreeSet::new()] }));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let full: usize = (1usize << n) - 1;
    let mut tw = vec![u8::MAX; 1usize << n];
    tw[0] = 0;
    let mut comps: Vec<(u32, u32)> = Vec::with_capacity(n);
    for t in 0..=full {
        let cur = tw[t];
        if cur == u8::MAX {
            continue;
        }
        let tm = t as u32;
        comps.clear();
        let mut rem = tm;
        while rem != 0 {
            let start = rem & rem.wrapping_neg();
            let mut comp = start;
            let mut nbrs = 0u32;
            let mut frontier = start;
            while frontier != 0 {
                let mut grow = 0u32;
                let mut bits = frontier;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    grow |= adj[i];
                    bits &= bits - 1;
                }
                nbrs |= grow;
                frontier = grow & tm & !comp;
                comp |= frontier;
            }
            comps.push((comp, nbrs & !tm));
            rem &= !comp;
        }
        let mut outside = !tm & (full as u32);
        while outside != 0 {
            let v = outside.trailing_zeros() as usize;
            outside &= outside - 1;
            let vb = 1u32 << v;
            let mut q = adj[v] & !tm;
            for &(comp, nbrs) in &comps {
                if adj[v] & comp != 0 {
                    q |= nbrs;
                }
            }
            q &= !vb;
            let cost = (q.count_ones() as u8).max(cur);
            let next = t | (vb as usize);
            if cost < tw[next] {
                tw[next] = cost;
            }
        }
    }
    let width = tw[full] as usize;

    // Recover an elimination order by peeling the last-eliminated vertex.
    let mut order_rev = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let mut found = false;
        for v in 0..n {
            let vb = 1usize << v;
            if s & vb == 0 {
                continue;
            }
            let t = s & !vb;
            if tw[t] == u8::MAX {
                continue;
            }
            let q = q_set(&adj, t as u32, v, full as u32);
            if tw[t].max(q.count_ones() as u8) == tw[s] {
                order_rev.push(v);
                s = t;
                found = true;
                break;
            }
        }
        assert!(found, "treewidth DP backtrack failed");
    }
    order_rev.reverse();
    let td = decomposition_from_elimination(g, &order_rev, &adj, full as u32);
    debug_assert!(validate_tree_decomposition(g, &td).ok);
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}

fn q_set(adj: &[u32], t: u32, v: usize, full: u32) -> u32 {
    let vb = 1u32 << v;
    let mut out = adj[v] & !t;
    let mut comp = adj[v] & t;
    let mut frontier = comp;
    while frontier != 0 {
        let mut grow = 0u32;
        let mut bits = frontier;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            grow |= adj[i];
            bits &= bits - 1;
        }
        out |= grow & !t;
        frontier = grow & t & !comp;
        comp |= frontier;
    }
    out & !vb & full
}

/// Bags from an elimination order: bag(v) = {v} + Q at elimination time; node
/// parents follow the earliest-eliminated bag member, roots chained at the end.
fn decomposition_from_elimination(
    g: &Graph,
    order: &[usize],
    adj: &[u32],
    full: u32,
) -> TreeDecomposition {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags: Vec<BTreeSet<VertexId>> = Vec::with_capacity(n);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut s: u32 = 0;
    for (i, &v) in order.iter().enumerate() {
        let q = q_set(adj, s, v, full);
        let mut bag = BTreeSet::from([v]);
        let mut earliest: Option<usize> = None;
        let mut bits = q;
        while bits != 0 {
            let w = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            bag.insert(w);
            earliest = Some(earliest.map_or(pos[w], |e: usize| e.min(pos[w])));
        }
        parent[i] = earliest;
        bags.push(bag);
        s |= 1 << v;
    }
    let mut tree = Graph::new(n);
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            tree.add_edge(i, *p).unwrap();
        }
    }
    // Chain the roots so the decomposition is a single tree.
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        tree.add_edge(w[0], w[1]).unwrap();
    }
    let _ = g;
    TreeDecomposition { tree, bags }
}

/// Lifts a decomposition of g to one of g (x) K_t by replacing each bag B with
/// B x V(K_t), using the strong-product vertex ids (a * t + i).
pub fn lift_over_clique(td: &TreeDecomposition, t: usize) -> TreeDecomposition {
    let bags = td
        .bags
        .iter()
        .map(|b| b.iter().flat_map(|&a| (0..t).map(move |i| a * t + i)).collect())
        .collect();
    TreeDecomposition { tree: td.tree.clone(), bags }
}

#[derive(Debug, Clone)]
pub struct Layering {
    pub layers: Vec<Vec<VertexId>>,
}

impl Layering {
    pub fn layer_of(&self, n: usize) -> Vec<usize> {
        let mut idx = vec![usize::MAX; n];
        for (i, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                idx[v] = i;
            }
        }
        idx
    }
}

/// Layering axioms: layers partition V(g) and every edge joins the same or
/// adjacent layers.
pub fn validate_layering(g: &Graph, l: &Layering) -> ValidationReport {
    let mut v = Vec::new();
    let mut idx = vec![usize::MAX; g.n()];
    for (i, layer) in l.layers.iter().enumerate() {
        for &x in layer {
            if x >= g.n() {
                v.push(format!("layer {i} contains unknown vertex {x}"));
            } else if idx[x] != usize::MAX {
                v.push(format!("vertex {x} appears in layers {} and {i}", idx[x]));
            } else {
                idx[x] = i;
            }
        }
    }
    for x in 0..g.n() {
        if idx[x] == usize::MAX {
            v.push(format!("vertex {x} is in no layer"));
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if idx[a] != usize::MAX && idx[b] != usize::MAX && idx[a].abs_diff(idx[b]) > 1 {
            v.push(format!("edge {e} ({a}-{b}) spans layers {} and {}", idx[a], idx[b]));
        }
    }
    ValidationReport::from(v)
}

/// BFS layering from a root; the graph must be connected.
pub fn bfs_layering(g: &Graph, root: VertexId) -> Result<Layering> {
    let dist = g.bfs_distances(root);
    if dist.iter().any(|&d| d == usize::MAX) {
        return Err(Error::Disconnected);
    }
    let max = dist.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); max + 1];
    for (v, &d) in dist.iter().enumerate() {
        layers[d].push(v);
    }
    Ok(Layering { layers })
}

/// BFS layering per component, each rooted at its lowest vertex id. Valid for
/// disconnected graphs; coincides with bfs_layering(g, 0) when connected.
pub fn component_bfs_layering(g: &Graph) -> Layering {
    let mut layer = vec![usize::MAX; g.n()];
    let mut max = 0usize;
    for comp in g.components() {
        let dist = g.bfs_distances(comp[0]);
        for &v in &comp {
            layer[v] = dist[v];
            max = max.max(dist[v]);
        }
    }
    let mut layers = vec![Vec::new(); if g.n() == 0 { 1 } else { max + 1 }];
    for (v, &d) in layer.iter().enumerate() {
        layers[d].push(v);
    }
    Layering { layers }
}

#[derive(Debug, Clone)]
pub struct LayeredDecomposition {
    pub td: TreeDecomposition,
    pub layering: Layering,
}

impl LayeredDecomposition {
    /// Max over bags and layers of the intersection size.
    pub fn layered_width(&self, n: usize) -> usize {
        let idx = self.layering.layer_of(n);
        let mut best = 0;
        for bag in &self.td.bags {
            let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
            for &v in bag {
                *counts.entry(idx[v]).or_insert(0) += 1;
            }
            best = best.max(counts.values().copied().max().unwrap_or(0));
        }
        best
    }
}

/// PACE-style .td text: "s td <#bags> <width+1> <n>", bag lines, tree edges.
/// Vertices and bag ids are 1-based.
pub fn to_td_format(g: &Graph, td: &TreeDecomposition) -> String {
    let width_plus = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), width_plus, g.n());
    for (i, bag) in td.bags.iter().enumerate() {
        let verts: Vec<String> = bag.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&format!("b {} {}\n", i + 1, verts.join(" ")).replace(" \n", "\n"));
    }
    for &(a, b) in td.tree.edges() {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

pub fn from_td_format(s: &str) -> Result<TreeDecomposition> {
    let mut bags: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut declared = None;
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("s") => {
                if it.next() != Some("td") {
                    return Err(Error::InvalidInput("bad td header".into()));
                }
                let nb: usize = it
                    .next()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::InvalidInput("bad td header".into()))?;
                declared = Some(nb);
                bags = vec![BTreeSet::new(); nb];
            }
            Some("b") => {
                let id: usize = it
                    .next()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::InvalidInput("bad bag line".into()))?;
                if id == 0 || id > bags.len() {
                    return Err(Error::InvalidInput(format!("bag id {id} out of range")));
                }
                for tok in it {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad vertex '{tok}'")))?;
                    bags[id - 1].insert(v - 1);
                }
            }
            Some(a) => {
                let a: usize =
                    a.parse().map_err(|_| Error::InvalidInput(format!("bad edge line")))?;
                let b: usize = it
                    .next()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::InvalidInput("bad edge line".into()))?;
                edges.push((a - 1, b - 1));
            }
            None => {}
        }
    }
    let nb = declared.ok_or_else(|| Error::InvalidInput("missing s td header".into()))?;
    let mut tree = Graph::new(nb);
    for (a, b) in edges {
        tree.add_edge(a, b)?;
    }
    Ok(TreeDecomposition { tree, bags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Elimination width by brute force over all n! orders (DFS with pruning-free
    /// exact enumeration). Independent of the subset DP.
    pub fn elimination_width_oracle(g: &Graph) -> usize {
        let n = g.n();
        let adj: Vec<u32> = (0..n)
            .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | (1 << u)))
            .collect();
        fn rec(adj: &[u32], alive: u32, width_so_far: u32, best: &mut u32) {
            if alive == 0 {
                *best = (*best).min(width_so_far);
                return;
            }
            if width_so_far >= *best {
                return;
            }
            let mut bits = alive;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let nbrs = adj[v] & alive & !(1 << v);
                let deg = nbrs.count_ones();
                // Eliminate v: neighbours become a clique.
                let mut next = adj.to_vec();
                let mut nb = nbrs;
                while nb != 0 {
                    let u = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    next[u] |= nbrs & !(1 << u);
                }
                rec(&next, alive & !(1 << v), width_so_far.max(deg), best);
            }
        }
        let mut best = n as u32;
        rec(&adj, (1u32 << n) - 1, 0, &mut best);
        best as usize
    }

    #[test]
    fn grids_small() {
        for n in 2..=4 {
            let g = Graph::grid(n, n);
            let (w, td) = exact_treewidth(&g, 25).unwrap();
            assert_eq!(w, n, "tw of {n}x{n} grid");
            assert!(validate_tree_decomposition(&g, &td).ok);
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(exact_treewidth(&Graph::complete(6), 20).unwrap().0, 5);
        assert_eq!(exact_treewidth(&Graph::path(7), 20).unwrap().0, 1);
        assert_eq!(exact_treewidth(&Graph::cycle(8), 20).unwrap().0, 2);
        assert_eq!(exact_treewidth(&Graph::complete_bipartite(2, 5), 20).unwrap().0, 2);
        assert_eq!(exact_treewidth(&Graph::new(3), 20).unwrap().0, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::grid(5, 5);
        match exact_treewidth(&g, 20) {
            Err(crate::error::Error::CapExceeded { n: 25, cap: 20 }) => {}
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn agrees_with_elimination_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x517c_c1b7);
        for _ in 0..25 {
            let g = crate::matching::tests::random_graph(&mut rng, 8, 0.35);
            let (w, td) = exact_treewidth(&g, 20).unwrap();
            assert_eq!(w, elimination_width_oracle(&g));
            assert!(validate_tree_decomposition(&g, &td).ok);
        }
    }

    #[test]
    fn monotone_under_subgraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabcd_1234);
        for _ in 0..10 {
            let g = crate::matching::tests::random_graph(&mut rng, 9, 0.5);
            let (w, _) = exact_treewidth(&g, 20).unwrap();
            let keep: Vec<usize> = (0..g.m()).filter(|_| rng.gen_bool(0.6)).collect();
            let sub = g.edge_subgraph(&keep);
            let (ws, _) = exact_treewidth(&sub, 20).unwrap();
            assert!(ws <= w);
        }
    }

    #[test]
    fn lifted_product_decomposition_is_valid() {
        for c in 1..=3 {
            let g = Graph::grid(3, 3);
            let (w, td) = exact_treewidth(&g, 20).unwrap();
            let prod = crate::graph::strong_product(&g, &Graph::complete(c));
            let lifted = lift_over_clique(&td, c);
            assert!(validate_tree_decomposition(&prod, &lifted).ok);
            assert_eq!(lifted.width(), (w + 1) * c - 1);
        }
    }

    #[test]
    fn layering_roundtrip() {
        let g = Graph::grid(3, 4);
        let l = bfs_layering(&g, 0).unwrap();
        assert!(validate_layering(&g, &l).ok);
        assert!(bfs_layering(&Graph::new(2), 0).is_err());
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let cl = component_bfs_layering(&two);
        assert!(validate_layering(&two, &cl).ok);
    }

    #[test]
    fn td_format_roundtrip() {
        let g = Graph::cycle(5);
        let (_, td) = exact_treewidth(&g, 20).unwrap();
        let text = to_td_format(&g, &td);
        assert!(text.starts_with(&format!("s td {} 3 5\n", td.bags.len())));
        let back = from_td_format(&text).unwrap();
        assert!(validate_tree_decomposition(&g, &back).ok);
        assert_eq!(back.width(), td.width());
    }

    #[test]
    fn layered_width_measured() {
        let g = Graph::grid(3, 3);
        let (_, td) = exact_treewidth(&g, 20).unwrap();
        let l = bfs_layering(&g, 0).unwrap();
        let ld = LayeredDecomposition { td, layering: l };
        let lw = ld.layered_width(g.n());
        assert!(lw >= 1 && lw <= 4);
    }
}
