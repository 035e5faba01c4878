//! Transparent edge colourings: a colouring is transparent when no two
//! edges of the same colour cross. Colour order is semantically meaningful
//! downstream (lower colours are contracted more aggressively), so every
//! producer returns an ordered colouring.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::drawing::{crossing_graph, matching_planarity, TopologicalDrawing};
use crate::error::{Error, Result};
use crate::forests::{
    degeneracy_decomposition, star_forest_split, StarComponent, StarForest,
};
use crate::graph::{EdgeId, Graph};
use crate::treewidth::ValidationReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransparentColouring {
    /// Edge id to colour in 1..=c. May cover only a subset of the edges
    /// (star-forest restricted colourings); the main producers are total.
    pub colours: BTreeMap<EdgeId, usize>,
    pub c: usize,
    pub ordered: bool,
}

impl TransparentColouring {
    pub fn colour(&self, e: EdgeId) -> Option<usize> {
        self.colours.get(&e).copied()
    }

    pub fn is_total(&self, d: &TopologicalDrawing) -> bool {
        (0..d.m()).all(|e| self.colours.contains_key(&e))
    }

    /// Edges per colour, ascending colour.
    pub fn classes(&self) -> BTreeMap<usize, Vec<EdgeId>> {
        let mut out: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
        for (&e, &c) in &self.colours {
            out.entry(c).or_default().push(e);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("colouring serialises")
    }

    pub fn from_json(s: &str) -> Result<TransparentColouring> {
        let tc: TransparentColouring =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        for (&e, &col) in &tc.colours {
            if col == 0 || col > tc.c {
                return Err(Error::InvalidInput(format!(
                    "edge {e} has colour {col} outside 1..={}",
                    tc.c
                )));
            }
        }
        Ok(tc)
    }
}

/// Checks that no two edges of equal colour cross. Uncoloured edges are
/// ignored, so restricted colourings can be verified on the full drawing.
pub fn verify_transparent(d: &TopologicalDrawing, tc: &TransparentColouring) -> ValidationReport {
    let mut violations = Vec::new();
    for (&e, &col) in &tc.colours {
        if e >= d.m() {
            violations.push(format!("colouring mentions unknown edge {e}"));
        } else if col == 0 || col > tc.c {
            violations.push(format!("edge {e} has colour {col} outside 1..={}", tc.c));
        }
    }
    for (&(e, f), _) in d.pair_counts().iter() {
        if let (Some(a), Some(b)) = (tc.colour(e), tc.colour(f)) {
            if a == b {
                violations.push(format!("edges {e} and {f} of colour {a} cross"));
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Greedy colouring in reverse degeneracy order; uses at most
/// degeneracy + 1 colours. Returns 1-based colours and the count.
fn greedy_reverse_degeneracy(g: &Graph) -> (Vec<usize>, usize) {
    let (order, _, _) = degeneracy_decomposition(g);
    let mut colour = vec![0usize; g.n()];
    for &v in order.iter().rev() {
        let used: BTreeSet<usize> =
            g.neighbours(v).iter().map(|&u| colour[u]).filter(|&c| c > 0).collect();
        let mut c = 1;
        while used.contains(&c) {
            c += 1;
        }
        colour[v] = c;
    }
    let cmax = colour.iter().copied().max().unwrap_or(0);
    (colour, cmax)
}

/// Transparent colouring by greedy colouring of the crossing graph.
pub fn greedy_transparent(d: &TopologicalDrawing) -> TransparentColouring {
    let x = crossing_graph(d);
    let (col, cmax) = greedy_reverse_degeneracy(&x);
    TransparentColouring {
        colours: (0..d.m()).map(|e| (e, col[e])).collect(),
        c: cmax.max(1),
        ordered: true,
    }
}

/// Per-vertex edge colourings where monochromatic edges at the vertex do
/// not cross; s is the largest count any vertex needs. An edge gets one
/// colour at each endpoint.
#[derive(Debug, Clone)]
pub struct FanColouring {
    pub at_vertex: Vec<BTreeMap<EdgeId, usize>>,
    pub s: usize,
}

pub fn fan_colouring(d: &TopologicalDrawing) -> FanColouring {
    let g = d.base();
    let pairs = d.pair_counts();
    let cross = |e: EdgeId, f: EdgeId| pairs.contains_key(&(e.min(f), e.max(f)));
    let mut at_vertex: Vec<BTreeMap<EdgeId, usize>> = vec![BTreeMap::new(); g.n()];
    let mut s = 1;
    for v in 0..g.n() {
        for e in g.edge_ids_at(v) {
            let used: BTreeSet<usize> = at_vertex[v]
                .iter()
                .filter(|&(&f, _)| cross(e, f))
                .map(|(_, &q)| q)
                .collect();
            let mut q = 1;
            while used.contains(&q) {
                q += 1;
            }
            at_vertex[v].insert(e, q);
            s = s.max(q);
        }
    }
    FanColouring { at_vertex, s }
}

fn check_star_forest(g: &Graph, sf: &StarForest) -> Result<()> {
    let mut seen_vertices = BTreeSet::new();
    let mut seen_edges = BTreeSet::new();
    for comp in &sf.components {
        let mut verts = BTreeSet::new();
        for &e in &comp.edges {
            if e >= g.m() || !seen_edges.insert(e) {
                return Err(Error::NotStarForest { vertex: comp.centre });
            }
            let (u, v) = g.endpoints(e);
            if u != comp.centre && v != comp.centre {
                return Err(Error::NotStarForest { vertex: comp.centre });
            }
            verts.insert(u);
            verts.insert(v);
        }
        for &v in &verts {
            if !seen_vertices.insert(v) {
                return Err(Error::NotStarForest { vertex: v });
            }
        }
    }
    Ok(())
}

/// H: one vertex per star-component, adjacent iff some edge of one crosses
/// some edge of the other. Requires that no two of the star-forest's edges
/// sharing a vertex cross (in particular same-star edges never cross).
pub fn star_component_crossing_graph(
    d: &TopologicalDrawing,
    sf: &StarForest,
) -> Result<Graph> {
    let g = d.base();
    check_star_forest(g, sf)?;
    let comp_of = sf.component_of_edge();
    let mut h = Graph::new(sf.components.len());
    for (&(e, f), _) in d.pair_counts().iter() {
        let (Some(&ce), Some(&cf)) = (comp_of.get(&e), comp_of.get(&f)) else {
            continue;
        };
        let (a, b) = g.endpoints(e);
        let (x, y) = g.endpoints(f);
        if a == x || a == y || b == x || b == y {
            return Err(Error::AdjacentCrossing { a: e, b: f });
        }
        // distinct components: same-star edges share the centre
        let _ = h.add_edge(ce, cf);
    }
    Ok(h)
}

/// Colours a star-forest's edges transparently: star-components are greedily
/// coloured along the degeneracy order of their crossing graph and each edge
/// inherits its component's colour.
pub fn starforest_transparent(
    d: &TopologicalDrawing,
    sf: &StarForest,
) -> Result<TransparentColouring> {
    let h = star_component_crossing_graph(d, sf)?;
    let (col, cmax) = greedy_reverse_degeneracy(&h);
    let mut colours = BTreeMap::new();
    for (i, comp) in sf.components.iter().enumerate() {
        for &e in &comp.edges {
            colours.insert(e, col[i]);
        }
    }
    Ok(TransparentColouring { colours, c: cmax.max(1), ordered: true })
}

/// Star-forest refinement of a transparent colouring: each colour class i
/// is partitioned into star-forests (i,1)..(i,s_i) with recorded centres
/// (the dominant endpoints). s is the largest s_i.
#[derive(Debug, Clone)]
pub struct StarForestCover {
    pub classes: BTreeMap<usize, Vec<StarForest>>,
    pub refined: BTreeMap<EdgeId, (usize, usize)>,
    pub s: usize,
}

pub fn validate_cover(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
    cover: &StarForestCover,
) -> ValidationReport {
    let g = d.base();
    let mut violations = Vec::new();
    let mut covered: BTreeMap<EdgeId, (usize, usize)> = BTreeMap::new();
    for (&i, forests) in &cover.classes {
        if forests.len() > cover.s {
            violations.push(format!("colour {i} has {} star-forests, s = {}", forests.len(), cover.s));
        }
        for (j0, sf) in forests.iter().enumerate() {
            let j = j0 + 1;
            if let Err(e) = check_star_forest(g, sf) {
                violations.push(format!("class ({i},{j}) is not a star-forest: {e}"));
                continue;
            }
            for e in sf.edge_ids() {
                if covered.insert(e, (i, j)).is_some() {
                    violations.push(format!("edge {e} appears in two classes"));
                }
                if tc.colour(e) != Some(i) {
                    violations.push(format!("edge {e} in class ({i},{j}) has colour {:?}", tc.colour(e)));
                }
            }
        }
    }
    for (&e, &c) in &tc.colours {
        if !covered.contains_key(&e) {
            violations.push(format!("edge {e} of colour {c} is in no class"));
        }
    }
    if covered != cover.refined {
        violations.push("refined colour map disagrees with the class lists".into());
    }
    // no two edges of one refined class that share a vertex may cross
    for (&(e, f), _) in d.pair_counts().iter() {
        if let (Some(&ce), Some(&cf)) = (covered.get(&e), covered.get(&f)) {
            if ce == cf {
                let (a, b) = g.endpoints(e);
                let (x, y) = g.endpoints(f);
                if a == x || a == y || b == x || b == y {
                    violations.push(format!("adjacent edges {e}, {f} of class {ce:?} cross"));
                }
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Product colouring: degeneracy forests are split into star halves, each
/// half refined by the fan colour at its star centres, each refined class
/// coloured through its star-component crossing graph, and the (class,
/// component-colour) pairs flattened into final colours with class groups
/// in descending order. Crossing-free drawings collapse to one colour.
pub fn product_transparent(d: &TopologicalDrawing) -> (TransparentColouring, StarForestCover) {
    let g = d.base();
    let fan = fan_colouring(d);
    let (_, _, forests) = degeneracy_decomposition(g);
    let mut classes: Vec<StarForest> = Vec::new();
    for forest in &forests {
        let (a, b) = star_forest_split(g, forest).expect("degeneracy forests are acyclic");
        for half in [a, b] {
            let mut by_q: BTreeMap<usize, Vec<StarComponent>> = BTreeMap::new();
            for comp in half.components {
                let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
                for &e in &comp.edges {
                    groups.entry(fan.at_vertex[comp.centre][&e]).or_default().push(e);
                }
                for (q, edges) in groups {
                    by_q.entry(q)
                        .or_default()
                        .push(StarComponent { centre: comp.centre, edges });
                }
            }
            for (_, components) in by_q {
                classes.push(StarForest { components });
            }
        }
    }

    if d.crossing_count() == 0 {
        // one colour suffices; the cover keeps the star-forest partition
        let colours = (0..d.m()).map(|e| (e, 1)).collect();
        let mut refined = BTreeMap::new();
        for (j0, sf) in classes.iter().enumerate() {
            for e in sf.edge_ids() {
                refined.insert(e, (1, j0 + 1));
            }
        }
        let s = classes.len().max(1);
        let mut class_map = BTreeMap::new();
        if !classes.is_empty() {
            class_map.insert(1, classes);
        }
        let tc = TransparentColouring { colours, c: 1, ordered: true };
        return (tc, StarForestCover { classes: class_map, refined, s });
    }

    let coloured: Vec<(Vec<usize>, usize)> = classes
        .iter()
        .map(|sf| {
            let h = star_component_crossing_graph(d, sf)
                .expect("classes have no crossing at shared vertices");
            greedy_reverse_degeneracy(&h)
        })
        .collect();

    let mut colours = BTreeMap::new();
    let mut refined = BTreeMap::new();
    let mut class_map = BTreeMap::new();
    let mut next = 1;
    for k in (0..classes.len()).rev() {
        let (comp_colour, cmax) = &coloured[k];
        for j in 1..=*cmax {
            let components: Vec<StarComponent> = classes[k]
                .components
                .iter()
                .enumerate()
                .filter(|&(i, _)| comp_colour[i] == j)
                .map(|(_, comp)| comp.clone())
                .collect();
            let sf = StarForest { components };
            for e in sf.edge_ids() {
                colours.insert(e, next);
                refined.insert(e, (next, 1));
            }
            class_map.insert(next, vec![sf]);
            next += 1;
        }
    }
    let tc = TransparentColouring { colours, c: (next - 1).max(1), ordered: true };
    (tc, StarForestCover { classes: class_map, refined, s: 1 })
}

/// Star-forest refinement of an arbitrary transparent colouring: each colour
/// class is cut along its degeneracy forests and every forest is split into
/// two star halves. Same-class edges never cross (they share a colour), so
/// the result is always a valid cover; s is whatever the splits produce.
pub fn refine_to_cover(g: &Graph, tc: &TransparentColouring) -> Result<StarForestCover> {
    let mut classes: BTreeMap<usize, Vec<StarForest>> = BTreeMap::new();
    let mut refined = BTreeMap::new();
    let mut s = 1usize;
    for (i, edges) in tc.classes() {
        let sub = g.edge_subgraph(&edges);
        let (_, _, forests) = degeneracy_decomposition(&sub);
        let mut sfs: Vec<StarForest> = Vec::new();
        for forest in &forests {
            if forest.is_empty() {
                continue;
            }
            let (a, b) = star_forest_split(&sub, forest)?;
            for half in [a, b] {
                if half.components.is_empty() {
                    continue;
                }
                // sub edge k is the k-th smallest of the class's edge ids
                let components = half
                    .components
                    .into_iter()
                    .map(|comp| StarComponent {
                        centre: comp.centre,
                        edges: comp.edges.into_iter().map(|k| edges[k]).collect(),
                    })
                    .collect();
                sfs.push(StarForest { components });
            }
        }
        for (j0, sf) in sfs.iter().enumerate() {
            for e in sf.edge_ids() {
                refined.insert(e, (i, j0 + 1));
            }
        }
        s = s.max(sfs.len());
        classes.insert(i, sfs);
    }
    Ok(StarForestCover { classes, refined, s })
}

/// Edge-density threshold 3(k+1)^{k+1} / k^k, with the k = 0 case read as 3.
pub fn density_threshold(k: usize) -> BigRational {
    let num = BigInt::from(3) * BigInt::from(k as u64 + 1).pow(k as u32 + 1);
    let den = if k == 0 { BigInt::one() } else { BigInt::from(k as u64).pow(k as u32) };
    BigRational::new(num, den)
}

/// |E| <= threshold(2k) * |V|, evaluated exactly.
pub fn density_check(d: &TopologicalDrawing, k: usize) -> bool {
    let m = BigRational::from_integer(BigInt::from(d.m() as u64));
    let n = BigRational::from_integer(BigInt::from(d.n() as u64));
    m <= density_threshold(2 * k) * n
}

pub fn max_clique_size(g: &Graph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    let mut adj = vec![vec![false; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let cand: Vec<usize> = (0..g.n()).collect();
    let mut best = 0;
    crate::drawing::max_clique(&adj, &cand, 0, &mut best);
    best
}

const BICLIQUE_CAP: usize = 20;

/// Largest m with a (not necessarily induced) complete bipartite K_{m,m}
/// between two disjoint vertex sets. Exact subset enumeration.
pub fn max_balanced_biclique(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > BICLIQUE_CAP {
        return Err(Error::CapExceeded { n, cap: BICLIQUE_CAP });
    }
    let adj: Vec<u32> =
        (0..n).map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let mut best = 0;
    for a in 1u32..1 << n {
        if (a.count_ones() as usize) <= best {
            continue;
        }
        let mut common = (1u32 << n) - 1;
        for v in 0..n {
            if a >> v & 1 == 1 {
                common &= adj[v];
            }
        }
        let score = (a.count_ones() as usize).min((common & !a).count_ones() as usize);
        best = best.max(score);
    }
    Ok(best)
}

const FREENESS_COMPONENT_CAP: usize = 15;

/// Exact clique and balanced-biclique sizes of a star-forest's component
/// crossing graph, against the bounds 12k^2+3k+1 and 16k^2+3k where k is
/// the matching planarity of the sub-drawing on the star-forest's edges.
#[derive(Debug, Clone, Serialize)]
pub struct FreenessReport {
    pub components: usize,
    pub k: usize,
    pub omega: usize,
    pub omega_bound: usize,
    pub biclique: usize,
    pub biclique_bound: usize,
    pub ok: bool,
}

pub fn star_forest_freeness(d: &TopologicalDrawing, sf: &StarForest) -> Result<FreenessReport> {
    let h = star_component_crossing_graph(d, sf)?;
    if h.n() > FREENESS_COMPONENT_CAP {
        return Err(Error::CapExceeded { n: h.n(), cap: FREENESS_COMPONENT_CAP });
    }
    let (sub, _) = d.restrict_to_edges(&sf.edge_ids())?;
    let k = matching_planarity(&sub);
    let omega = max_clique_size(&h);
    let biclique = max_balanced_biclique(&h)?;
    let omega_bound = 12 * k * k + 3 * k + 1;
    let biclique_bound = 16 * k * k + 3 * k;
    Ok(FreenessReport {
        components: h.n(),
        k,
        omega,
        omega_bound,
        biclique,
        biclique_bound,
        ok: omega <= omega_bound && biclique <= biclique_bound,
    })
}
