use std::collections::BTreeMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Simple undirected graph with dense vertex ids 0..n and stable edge ids in
/// insertion order. Neighbour lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
    edge_ids: BTreeMap<(VertexId, VertexId), EdgeId>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], edges: Vec::new(), edge_ids: BTreeMap::new() }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds edge uv and returns its id. Loops and parallel edges are rejected.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidInput(format!("edge {u}-{v} out of range (n = {})", self.n)));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("loop at vertex {u}")));
        }
        let key = (u.min(v), u.max(v));
        if self.edge_ids.contains_key(&key) {
            return Err(Error::InvalidInput(format!("parallel edge {}-{}", key.0, key.1)));
        }
        let id = self.edges.len();
        self.edges.push(key);
        self.edge_ids.insert(key, id);
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_ids.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_ids.get(&(u.min(v), u.max(v))).copied()
    }

    /// Endpoints of edge e, lower id first.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_ids_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.adj[v].iter().map(|&u| self.edge_id(u, v).unwrap()).collect()
    }

    /// BFS distances from source; usize::MAX marks unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// BFS distances from a set of sources.
    pub fn multi_bfs_distances(&self, sources: &[VertexId]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced on `keep` (sorted, deduped internally); returns the
    /// graph plus the map from new ids to old ids.
    pub fn induced(&self, keep: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut verts: Vec<VertexId> = keep.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut back = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            back[v] = i;
        }
        let mut g = Graph::new(verts.len());
        for &(u, v) in &self.edges {
            if back[u] != usize::MAX && back[v] != usize::MAX {
                g.add_edge(back[u], back[v]).unwrap();
            }
        }
        (g, verts)
    }

    /// Spanning subgraph on the same vertex set keeping only the given edges.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Graph {
        let mut g = Graph::new(self.n);
        let mut ids: Vec<EdgeId> = edges.to_vec();
        ids.sort_unstable();
        ids.dedup();
        for e in ids {
            let (u, v) = self.edges[e];
            g.add_edge(u, v).unwrap();
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).unwrap();
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in 0..b {
                g.add_edge(u, a + v).unwrap();
            }
        }
        g
    }

    /// The (rows x cols)-grid; vertex (r, c) has id r*cols + c.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut g = Graph::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).unwrap();
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).unwrap();
                }
            }
        }
        g
    }
}

/// Strong product. Vertex (a, b) of g (x) h gets id a * h.n() + b.
pub fn strong_product(g: &Graph, h: &Graph) -> Graph {
    let hn = h.n();
    let mut out = Graph::new(g.n() * hn);
    let idx = |a: usize, b: usize| a * hn + b;
    for a in 0..g.n() {
        for &(b1, b2) in h.edges() {
            out.add_edge(idx(a, b1), idx(a, b2)).unwrap();
        }
    }
    for &(a1, a2) in g.edges() {
        for b in 0..hn {
            out.add_edge(idx(a1, b), idx(a2, b)).unwrap();
        }
        for &(b1, b2) in h.edges() {
            out.add_edge(idx(a1, b1), idx(a2, b2)).unwrap();
            out.add_edge(idx(a1, b2), idx(a2, b1)).unwrap();
        }
    }
    out
}

/// t-th power: edge uv whenever 1 <= dist_g(u, v) <= t.
pub fn graph_power(g: &Graph, t: usize) -> Graph {
    let mut out = Graph::new(g.n());
    for u in 0..g.n() {
        let dist = g.bfs_distances(u);
        for v in u + 1..g.n() {
            if dist[v] >= 1 && dist[v] <= t {
                out.add_edge(u, v).unwrap();
            }
        }
    }
    out
}

/// JSON form: {"n": ..., "edges": [[u, v], ...]}. Edge ids are the list order.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphJson { n: self.n, edges: self.edges.clone() }).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let gj: GraphJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("graph json: {e}")))?;
        Graph::from_edges(gj.n, &gj.edges)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph g {\n");
        for v in 0..self.n {
            out.push_str(&format!("  {v};\n"));
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// DOT with one label per vertex (e.g. level annotations).
    pub fn to_dot_labelled(&self, labels: &[String]) -> String {
        let mut out = String::from("graph g {\n");
        for v in 0..self.n {
            out.push_str(&format!("  {v} [label=\"{}\"];\n", labels[v]));
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_graphml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <graph id=\"g\" edgedefault=\"undirected\">\n");
        for v in 0..self.n {
            out.push_str(&format!("    <node id=\"n{v}\"/>\n"));
        }
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            out.push_str(&format!("    <edge id=\"e{e}\" source=\"n{u}\" target=\"n{v}\"/>\n"));
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_parallel_edges() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        assert!(g.add_edge(1, 0).is_err());
        assert!(g.add_edge(2, 2).is_err());
    }

    #[test]
    fn strong_product_edge_count() {
        // |E(G x K_c)| = c|E| + |V| C(c,2) + 2|E| C(c,2)
        for (g, c) in [(Graph::path(4), 3), (Graph::cycle(5), 2), (Graph::complete(4), 3)] {
            let p = strong_product(&g, &Graph::complete(c));
            let choose2 = c * (c - 1) / 2;
            assert_eq!(p.m(), c * g.m() + g.n() * choose2 + 2 * g.m() * choose2);
        }
    }

    #[test]
    fn power_of_path() {
        let p = graph_power(&Graph::path(6), 2);
        assert_eq!(p.m(), 5 + 4);
    }

    #[test]
    fn json_roundtrip() {
        let g = Graph::complete_bipartite(2, 3);
        let g2 = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn components_and_connectivity() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 4)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
