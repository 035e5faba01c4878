use std::collections::BTreeMap;

use crate::graph::{EdgeId, Graph, VertexId};

const NONE: usize = usize::MAX;

/// Maximum matching of an edge subset by augmenting paths with blossom
/// contraction. Returns the matching number and a witness set of edge ids.
pub fn max_matching(g: &Graph, edges: &[EdgeId]) -> (usize, Vec<EdgeId>) {
    let n = g.n();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut ids: Vec<EdgeId> = edges.to_vec();
    ids.sort_unstable();
    ids.dedup();
    for &e in &ids {
        let (u, v) = g.endpoints(e);
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }

    let mut mate = vec![NONE; n];
    for v in 0..n {
        if mate[v] == NONE && !adj[v].is_empty() {
            augment_from(&adj, &mut mate, v);
        }
    }

    let mut witness = Vec::new();
    for v in 0..n {
        if mate[v] != NONE && v < mate[v] {
            witness.push(g.edge_id(v, mate[v]).unwrap());
        }
    }
    witness.sort_unstable();
    (witness.len(), witness)
}

fn augment_from(adj: &[Vec<VertexId>], mate: &mut [usize], root: usize) -> bool {
    let n = adj.len();
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    used[root] = true;
    queue.push_back(root);

    let lca = |mate: &[usize], parent: &[usize], base: &[usize], a: usize, b: usize| -> usize {
        let mut seen = vec![false; n];
        let mut a = base[a];
        loop {
            seen[a] = true;
            if mate[a] == NONE {
                break;
            }
            a = base[parent[mate[a]]];
        }
        let mut b = base[b];
        loop {
            if seen[b] {
                return b;
            }
            b = base[parent[mate[b]]];
        }
    };

    // Walks the even-level path from v down to the blossom base, marking bases.
    fn mark_path(
        mate: &[usize],
        base: &[usize],
        parent: &mut [usize],
        blossom: &mut [bool],
        mut v: usize,
        b: usize,
        mut child: usize,
    ) {
        while base[v] != b {
            blossom[base[v]] = true;
            blossom[base[mate[v]]] = true;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if base[v] == base[u] || mate[v] == u {
                continue;
            }
            if u == root || (mate[u] != NONE && parent[mate[u]] != NONE) {
                // Odd cycle: contract the blossom around the common base.
                let cur = lca(mate, &parent, &base, v, u);
                let mut blossom = vec![false; n];
                mark_path(mate, &base, &mut parent, &mut blossom, v, cur, u);
                mark_path(mate, &base, &mut parent, &mut blossom, u, cur, v);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[u] == NONE {
                parent[u] = v;
                if mate[u] == NONE {
                    // Augment: flip matched status along the alternating path.
                    let mut u = u;
                    while u != NONE {
                        let pv = parent[u];
                        let ppv = mate[pv];
                        mate[u] = pv;
                        mate[pv] = u;
                        u = ppv;
                    }
                    return true;
                } else {
                    used[mate[u]] = true;
                    queue.push_back(mate[u]);
                }
            }
        }
    }
    false
}

/// Minimum vertex cover of an edge subset, exact. Branches on a maximum-degree
/// vertex; components of maximum degree <= 2 are solved directly. Returns the
/// cover number and a witness vertex set.
pub fn min_vertex_cover(g: &Graph, edges: &[EdgeId]) -> (usize, Vec<VertexId>) {
    let mut pairs: Vec<(VertexId, VertexId)> = {
        let mut ids: Vec<EdgeId> = edges.to_vec();
        ids.sort_unstable();
        ids.dedup();
        ids.iter().map(|&e| g.endpoints(e)).collect()
    };
    pairs.sort_unstable();
    let mut best: Option<Vec<VertexId>> = None;
    let mut chosen = Vec::new();
    branch(&pairs, &mut chosen, &mut best);
    let mut cover = best.unwrap_or_default();
    cover.sort_unstable();
    (cover.len(), cover)
}

fn branch(pairs: &[(VertexId, VertexId)], chosen: &mut Vec<VertexId>, best: &mut Option<Vec<VertexId>>) {
    if pairs.is_empty() {
        if best.as_ref().map_or(true, |b| chosen.len() < b.len()) {
            *best = Some(chosen.clone());
        }
        return;
    }
    // Matching number lower-bounds the remaining cover size.
    if let Some(b) = best {
        if chosen.len() + greedy_matching_size(pairs) >= b.len() {
            return;
        }
    }
    let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &(u, v) in pairs {
        *deg.entry(u).or_insert(0) += 1;
        *deg.entry(v).or_insert(0) += 1;
    }
    let (&v, &d) = deg.iter().max_by_key(|&(&v, &d)| (d, std::cmp::Reverse(v))).unwrap();
    if d <= 2 {
        let extra = cover_paths_and_cycles(pairs);
        if best.as_ref().map_or(true, |b| chosen.len() + extra.len() < b.len()) {
            let mut full = chosen.clone();
            full.extend(extra);
            *best = Some(full);
        }
        return;
    }
    // Either v is in the cover, or all of its neighbours are.
    let without_v: Vec<_> = pairs.iter().copied().filter(|&(a, b)| a != v && b != v).collect();
    chosen.push(v);
    branch(&without_v, chosen, best);
    chosen.pop();

    let nbrs: Vec<VertexId> = pairs
        .iter()
        .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .collect();
    let keep: Vec<_> = pairs
        .iter()
        .copied()
        .filter(|&(a, b)| a != v && b != v && !nbrs.contains(&a) && !nbrs.contains(&b))
        .collect();
    let len_before = chosen.len();
    chosen.extend(nbrs.iter().copied());
    branch(&keep, chosen, best);
    chosen.truncate(len_before);
}

fn greedy_matching_size(pairs: &[(VertexId, VertexId)]) -> usize {
    let mut used = std::collections::BTreeSet::new();
    let mut size = 0;
    for &(u, v) in pairs {
        if !used.contains(&u) && !used.contains(&v) {
            used.insert(u);
            used.insert(v);
            size += 1;
        }
    }
    size
}

/// Exact cover for a set of edges whose vertices all have degree <= 2:
/// a disjoint union of paths and cycles.
fn cover_paths_and_cycles(pairs: &[(VertexId, VertexId)]) -> Vec<VertexId> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(u, v) in pairs {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut cover = Vec::new();
    // Paths first: walk from each degree-1 endpoint, covering odd positions.
    let endpoints: Vec<VertexId> =
        adj.iter().filter(|(_, ns)| ns.len() == 1).map(|(&v, _)| v).collect();
    for start in endpoints {
        if seen.contains(&start) {
            continue;
        }
        let walk = walk_from(&adj, start, &mut seen);
        for (i, &w) in walk.iter().enumerate() {
            if i % 2 == 1 {
                cover.push(w);
            }
        }
    }
    // Remaining components are cycles.
    let cycle_starts: Vec<VertexId> = adj.keys().copied().collect();
    for start in cycle_starts {
        if seen.contains(&start) {
            continue;
        }
        let walk = walk_from(&adj, start, &mut seen);
        let len = walk.len();
        if len % 2 == 0 {
            for (i, &w) in walk.iter().enumerate() {
                if i % 2 == 1 {
                    cover.push(w);
                }
            }
        } else {
            // odd cycle: the start vertex plus every odd position
            cover.push(walk[0]);
            for (i, &w) in walk.iter().enumerate() {
                if i % 2 == 1 {
                    cover.push(w);
                }
            }
        }
    }
    cover
}

fn walk_from(
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    start: VertexId,
    seen: &mut std::collections::BTreeSet<VertexId>,
) -> Vec<VertexId> {
    let mut walk = vec![start];
    seen.insert(start);
    let mut cur = start;
    loop {
        let next = adj[&cur].iter().find(|&&u| !seen.contains(&u));
        match next {
            Some(&u) => {
                seen.insert(u);
                walk.push(u);
                cur = u;
            }
            None => break,
        }
    }
    walk
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force matching number over all 2^|E| subsets.
    pub fn matching_oracle(g: &Graph, edges: &[EdgeId]) -> usize {
        let m = edges.len();
        let mut best = 0;
        'outer: for mask in 0u32..(1 << m) {
            let mut used = std::collections::BTreeSet::new();
            let mut size = 0;
            for (i, &e) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    let (u, v) = g.endpoints(e);
                    if !used.insert(u) || !used.insert(v) {
                        continue 'outer;
                    }
                    size += 1;
                }
            }
            best = best.max(size);
        }
        best
    }

    /// Exhaustive cover number: every minimal cover picks an endpoint per edge.
    pub fn cover_oracle(g: &Graph, edges: &[EdgeId]) -> usize {
        let m = edges.len();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << m) {
            let mut verts = std::collections::BTreeSet::new();
            for (i, &e) in edges.iter().enumerate() {
                let (u, v) = g.endpoints(e);
                verts.insert(if mask & (1 << i) != 0 { u } else { v });
            }
            best = best.min(verts.len());
        }
        if m == 0 {
            0
        } else {
            best
        }
    }

    fn check_witnesses(g: &Graph, edges: &[EdgeId]) {
        let (mu, matching) = max_matching(g, edges);
        assert_eq!(matching.len(), mu);
        let mut used = std::collections::BTreeSet::new();
        for &e in &matching {
            assert!(edges.contains(&e));
            let (u, v) = g.endpoints(e);
            assert!(used.insert(u) && used.insert(v), "witness is not a matching");
        }
        let (tau, cover) = min_vertex_cover(g, edges);
        assert_eq!(cover.len(), tau);
        for &e in edges {
            let (u, v) = g.endpoints(e);
            assert!(cover.contains(&u) || cover.contains(&v), "edge {e} uncovered");
        }
        // mu <= tau <= 2 mu
        assert!(mu <= tau && tau <= 2 * mu);
    }

    #[test]
    fn petersen_has_perfect_matching() {
        // Petersen graph: outer C5, inner 5-star polygon, spokes.
        let mut g = Graph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5).unwrap();
            g.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
            g.add_edge(i, 5 + i).unwrap();
        }
        let all: Vec<EdgeId> = (0..g.m()).collect();
        let (mu, _) = max_matching(&g, &all);
        assert_eq!(mu, 5);
        let (tau, _) = min_vertex_cover(&g, &all);
        assert_eq!(tau, 6);
    }

    #[test]
    fn odd_cycles_and_cliques() {
        let c7 = Graph::cycle(7);
        let all: Vec<EdgeId> = (0..c7.m()).collect();
        assert_eq!(max_matching(&c7, &all).0, 3);
        assert_eq!(min_vertex_cover(&c7, &all).0, 4);
        let k5 = Graph::complete(5);
        let all: Vec<EdgeId> = (0..k5.m()).collect();
        assert_eq!(max_matching(&k5, &all).0, 2);
        assert_eq!(min_vertex_cover(&k5, &all).0, 4);
    }

    #[test]
    fn matches_oracles_on_random_edge_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9d2c_5681);
        for _ in 0..120 {
            let n = rng.gen_range(4..12);
            let g = random_graph(&mut rng, n, 0.5);
            let all: Vec<EdgeId> = (0..g.m()).collect();
            let sample: Vec<EdgeId> =
                all.choose_multiple(&mut rng, all.len().min(11)).copied().collect();
            assert_eq!(max_matching(&g, &sample).0, matching_oracle(&g, &sample));
            assert_eq!(min_vertex_cover(&g, &sample).0, cover_oracle(&g, &sample));
            check_witnesses(&g, &sample);
        }
    }

    pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }
}
