use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::treewidth::{TreeDecomposition, ValidationReport};

/// Tree with a chosen root and parent pointers.
#[derive(Debug, Clone)]
pub struct RootedTree {
    pub tree: Graph,
    pub root: VertexId,
    pub parent: Vec<Option<VertexId>>,
    pub depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(tree: Graph, root: VertexId) -> Result<Self> {
        let n = tree.n();
        if n == 0 || root >= n {
            return Err(Error::InvalidInput("bad root".into()));
        }
        if !tree.is_connected() || tree.m() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "not a tree: {} vertices, {} edges, connected = {}",
                n,
                tree.m(),
                tree.is_connected()
            )));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0usize; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in tree.neighbours(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        Ok(RootedTree { tree, root, parent, depth })
    }

    /// True when a is a strict ancestor of b.
    pub fn is_strict_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        let mut cur = b;
        while let Some(p) = self.parent[cur] {
            if p == a {
                return true;
            }
            cur = p;
        }
        false
    }

    /// Eccentricity of the root within the tree.
    pub fn root_eccentricity(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Radius of the underlying tree (min eccentricity over all vertices).
    pub fn radius(&self) -> usize {
        (0..self.tree.n())
            .map(|v| self.tree.bfs_distances(v).into_iter().max().unwrap())
            .min()
            .unwrap_or(0)
    }
}

/// BFS spanning tree rooted at a vertex of minimum eccentricity, so the tree
/// radius matches the graph radius.
pub fn bfs_spanning_tree(g: &Graph) -> Result<RootedTree> {
    if g.n() == 0 {
        return Err(Error::InvalidInput("empty graph has no spanning tree".into()));
    }
    let mut root = 0;
    let mut best = usize::MAX;
    for v in 0..g.n() {
        let dist = g.bfs_distances(v);
        let ecc = dist.iter().copied().max().unwrap();
        if ecc == usize::MAX {
            return Err(Error::Disconnected);
        }
        if ecc < best {
            best = ecc;
            root = v;
        }
    }
    let mut edges = Vec::with_capacity(g.n() - 1);
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbours(v) {
            if !seen[u] {
                seen[u] = true;
                edges.push((v, u));
                queue.push_back(u);
            }
        }
    }
    RootedTree::new(Graph::from_edges(g.n(), &edges)?, root)
}

/// Tree decomposition of a spanning subgraph h of the closure of t: the bag of
/// v is {v} plus every strict ancestor w of v with an h-edge into v's subtree.
pub fn closure_decomposition(t: &RootedTree, h: &Graph) -> Result<TreeDecomposition> {
    let n = t.tree.n();
    if h.n() != n {
        return Err(Error::InvalidInput(format!("tree has {} vertices, graph has {}", n, h.n())));
    }
    for &(u, v) in h.edges() {
        if !(t.is_strict_ancestor(u, v) || t.is_strict_ancestor(v, u)) {
            return Err(Error::NotInClosure { u, v });
        }
    }
    let mut bags: Vec<BTreeSet<VertexId>> = (0..n).map(|v| BTreeSet::from([v])).collect();
    // For each h-edge (w above x), add w to the bag of every vertex on the
    // tree path from x up to but excluding w: exactly the v with x in their
    // subtree and w a strict ancestor of v.
    for &(u, v) in h.edges() {
        let (w, x) = if t.is_strict_ancestor(u, v) { (u, v) } else { (v, u) };
        let mut cur = x;
        while cur != w {
            bags[cur].insert(w);
            cur = t.parent[cur].expect("walk passed the root before reaching the ancestor");
        }
    }
    Ok(TreeDecomposition { tree: t.tree.clone(), bags })
}

/// Minor model: branch_sets[v] is the host branch set of minor vertex v.
#[derive(Debug, Clone)]
pub struct MinorModel {
    pub branch_sets: Vec<Vec<VertexId>>,
}

/// Model axioms: branch sets non-empty, pairwise disjoint, connected in the
/// host, and every minor edge realised by a host edge.
pub fn validate_model(minor: &Graph, host: &Graph, model: &MinorModel) -> ValidationReport {
    let mut violations = Vec::new();
    if model.branch_sets.len() != minor.n() {
        violations.push(format!(
            "model has {} branch sets for {} minor vertices",
            model.branch_sets.len(),
            minor.n()
        ));
        return ValidationReport { ok: false, violations };
    }
    let mut owner = vec![usize::MAX; host.n()];
    for (v, set) in model.branch_sets.iter().enumerate() {
        if set.is_empty() {
            violations.push(format!("branch set of {v} is empty"));
            continue;
        }
        for &x in set {
            if x >= host.n() {
                violations.push(format!("branch set of {v} mentions unknown host vertex {x}"));
            } else if owner[x] != usize::MAX {
                violations.push(format!("host vertex {x} is in branch sets {} and {v}", owner[x]));
            } else {
                owner[x] = v;
            }
        }
        // Connectivity inside the host.
        let inset: BTreeSet<VertexId> = set.iter().copied().collect();
        let mut seen = BTreeSet::from([set[0]]);
        let mut queue = std::collections::VecDeque::from([set[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in host.neighbours(x) {
                if inset.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != inset.len() {
            violations.push(format!("branch set of {v} is not connected in the host"));
        }
    }
    for (e, &(a, b)) in minor.edges().iter().enumerate() {
        let hit = model.branch_sets[a].iter().any(|&x| {
            host.neighbours(x).iter().any(|&y| model.branch_sets[b].contains(&y))
        });
        if !hit {
            violations.push(format!("minor edge {e} ({a}-{b}) has no host edge between branch sets"));
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Weak radius of a vertex set: the smallest r such that some host vertex
/// (the origin, not necessarily in the set) reaches every member within r.
/// Returns (r, lowest-id origin attaining it).
pub fn weak_radius(host: &Graph, set: &[VertexId]) -> Result<(usize, VertexId)> {
    if set.is_empty() {
        return Ok((0, 0));
    }
    let mut best: Option<(usize, VertexId)> = None;
    for origin in 0..host.n() {
        let dist = host.bfs_distances(origin);
        let ecc = set.iter().map(|&a| dist[a]).max().unwrap();
        if ecc == usize::MAX {
            continue;
        }
        if best.map_or(true, |(r, _)| ecc < r) {
            best = Some((ecc, origin));
        }
    }
    best.ok_or(Error::Unreachable { vertex: set[0] })
}
