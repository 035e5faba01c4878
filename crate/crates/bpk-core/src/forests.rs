use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::treewidth::ValidationReport;

/// Degeneracy order (repeated minimum-degree removal, lowest id first), the
/// degeneracy d, and a partition of E into at most d forests: each vertex
/// hands its back-edges (to later vertices in the order) to distinct forests.
pub fn degeneracy_decomposition(g: &Graph) -> (Vec<VertexId>, usize, Vec<Vec<EdgeId>>) {
    let n = g.n();
    let mut removed = vec![false; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut d = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .unwrap();
        d = d.max(deg[v]);
        removed[v] = true;
        order.push(v);
        for &u in g.neighbours(v) {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut forests: Vec<Vec<EdgeId>> = vec![Vec::new(); d];
    for &v in &order {
        let mut slot = 0;
        for &u in g.neighbours(v) {
            if pos[u] > pos[v] {
                forests[slot].push(g.edge_id(u, v).unwrap());
                slot += 1;
            }
        }
    }
    forests.retain(|f| !f.is_empty());
    for f in forests.iter_mut() {
        f.sort_unstable();
    }
    (order, d, forests)
}

/// Returns Some(witness vertex on a cycle) when the edge set is not a forest.
pub fn find_cycle(g: &Graph, edges: &[EdgeId]) -> Option<VertexId> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in edges {
        let (u, v) = g.endpoints(e);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            return Some(u);
        }
        parent[ru] = rv;
    }
    None
}

#[derive(Debug, Clone)]
pub struct StarComponent {
    pub centre: VertexId,
    pub edges: Vec<EdgeId>,
}

/// Star forest: vertex-disjoint stars with designated centres. Centres of
/// single-edge stars are the lowest endpoint id.
#[derive(Debug, Clone, Default)]
pub struct StarForest {
    pub components: Vec<StarComponent>,
}

impl StarForest {
    pub fn edge_ids(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> =
            self.components.iter().flat_map(|c| c.edges.iter().copied()).collect();
        out.sort_unstable();
        out
    }

    /// Star centre owning edge e, if any.
    pub fn centre_of_edge(&self, e: EdgeId) -> Option<VertexId> {
        self.components.iter().find(|c| c.edges.contains(&e)).map(|c| c.centre)
    }

    /// Component index per edge id.
    pub fn component_of_edge(&self) -> BTreeMap<EdgeId, usize> {
        let mut out = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            for &e in &c.edges {
                out.insert(e, i);
            }
        }
        out
    }
}

/// Groups an edge set into a StarForest, checking that every component is a
/// star. Centre = the unique vertex of degree >= 2, or the lowest id.
pub fn star_forest_from_edges(g: &Graph, edges: &[EdgeId]) -> Result<StarForest> {
    let sub = g.edge_subgraph(edges);
    let mut components = Vec::new();
    for comp in sub.components() {
        let comp_edges: Vec<EdgeId> = {
            let mut out = Vec::new();
            for &v in &comp {
                for &u in sub.neighbours(v) {
                    if v < u {
                        out.push(g.edge_id(v, u).unwrap());
                    }
                }
            }
            out.sort_unstable();
            out
        };
        if comp_edges.is_empty() {
            continue;
        }
        let big: Vec<VertexId> = comp.iter().copied().filter(|&v| sub.degree(v) >= 2).collect();
        // A star has at most one vertex of degree >= 2.
        let centre = match big.len() {
            0 => comp[0],
            1 => big[0],
            _ => return Err(Error::NotStarForest { vertex: big[1] }),
        };
        if comp_edges.len() != comp.len() - 1 {
            return Err(Error::NotStarForest { vertex: comp[0] });
        }
        components.push(StarComponent { centre, edges: comp_edges });
    }
    Ok(StarForest { components })
}

pub fn validate_star_forest(g: &Graph, sf: &StarForest) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen_vertices = std::collections::BTreeSet::new();
    for (i, comp) in sf.components.iter().enumerate() {
        let mut verts = std::collections::BTreeSet::new();
        for &e in &comp.edges {
            let (u, v) = g.endpoints(e);
            verts.insert(u);
            verts.insert(v);
            if u != comp.centre && v != comp.centre {
                violations.push(format!("component {i}: edge {e} misses its centre {}", comp.centre));
            }
        }
        if comp.edges.is_empty() {
            violations.push(format!("component {i} is empty"));
        }
        for &v in &verts {
            if !seen_vertices.insert(v) {
                violations.push(format!("vertex {v} appears in two components"));
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Splits a forest into two star forests: root each tree at its lowest vertex,
/// then separate edges by the parity of the parent's depth.
pub fn star_forest_split(g: &Graph, forest: &[EdgeId]) -> Result<(StarForest, StarForest)> {
    if let Some(v) = find_cycle(g, forest) {
        return Err(Error::NotAForest { vertex: v });
    }
    let sub = g.edge_subgraph(forest);
    // parts[0]: edges whose parent has even depth; parts[1]: odd depth.
    let mut parts: [BTreeMap<VertexId, Vec<EdgeId>>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for comp in sub.components() {
        let root = comp[0];
        let mut depth = BTreeMap::from([(root, 0usize)]);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let dv = depth[&v];
            for &u in sub.neighbours(v) {
                if !depth.contains_key(&u) {
                    depth.insert(u, dv + 1);
                    parts[dv % 2].entry(v).or_default().push(g.edge_id(u, v).unwrap());
                    queue.push_back(u);
                }
            }
        }
    }
    let build = |stars: &BTreeMap<VertexId, Vec<EdgeId>>| -> StarForest {
        let mut components = Vec::new();
        for (&parent, edges) in stars {
            let mut edges = edges.clone();
            edges.sort_unstable();
            let centre = if edges.len() >= 2 {
                parent
            } else {
                let (u, v) = g.endpoints(edges[0]);
                u.min(v)
            };
            components.push(StarComponent { centre, edges });
        }
        StarForest { components }
    };
    Ok((build(&parts[0]), build(&parts[1])))
}
