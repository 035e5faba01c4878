//! Planarisation and its coloured contraction.
//!
//! The planarisation replaces every crossing with a degree-4 dummy vertex,
//! turning each edge e into a path L_e. Under an ordered transparent
//! colouring, the crossings of e with lower-coloured edges split L_e into
//! fragments; the interiors of fragments with three or more vertices are
//! the sections. Contracting every section yields the coloured
//! planarisation together with the projection psi and, per edge, the walk
//! W_e = psi(L_e) with consecutive duplicates merged.

use std::collections::{BTreeMap, BTreeSet};

use crate::colouring::TransparentColouring;
use crate::drawing::TopologicalDrawing;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::matching::{max_matching, min_vertex_cover};

#[derive(Debug, Clone)]
pub struct Planarisation {
    pub gprime: Graph,
    pub n_original: usize,
    /// L_e per edge: endpoints plus the dummies in crossing order. Dummy
    /// for crossing c has id n_original + c.
    pub paths: Vec<Vec<VertexId>>,
    /// The two crossed edges per crossing, lower id first.
    pub crossing_edges: Vec<(EdgeId, EdgeId)>,
    /// Total path steps, sum of |L_e| - 1. Equals |E| + 2 * crossings; the
    /// simple graph may hold fewer edges when two paths share a step.
    pub steps: usize,
}

impl Planarisation {
    pub fn is_dummy(&self, v: VertexId) -> bool {
        v >= self.n_original
    }

    pub fn crossing_of(&self, v: VertexId) -> Option<usize> {
        self.is_dummy(v).then(|| v - self.n_original)
    }
}

pub fn planarise(d: &TopologicalDrawing) -> Planarisation {
    let n = d.n();
    let mut gprime = Graph::new(n + d.crossing_count());
    let mut paths = Vec::with_capacity(d.m());
    let mut steps = 0;
    for e in 0..d.m() {
        let (u, v) = d.base().endpoints(e);
        let mut path = Vec::with_capacity(d.seq(e).len() + 2);
        path.push(u);
        path.extend(d.seq(e).iter().map(|&c| n + c));
        path.push(v);
        steps += path.len() - 1;
        for w in path.windows(2) {
            let _ = gprime.add_edge(w[0], w[1]); // parallel arcs collapse
        }
        paths.push(path);
    }
    let crossing_edges = d.crossings().iter().map(|c| (c.edge_a, c.edge_b)).collect();
    Planarisation { gprime, n_original: n, paths, crossing_edges, steps }
}

fn total_colour(p: &Planarisation, tc: &TransparentColouring, e: EdgeId) -> Result<usize> {
    let _ = p;
    tc.colour(e).ok_or_else(|| Error::InvalidInput(format!("edge {e} has no colour")))
}

/// Levels on V(G'): originals 0, a dummy the smaller of its two edge
/// colours. Fragments per edge as inclusive index ranges into L_e, split
/// at dummies of level below the edge's colour.
pub fn levels_and_fragments(
    p: &Planarisation,
    tc: &TransparentColouring,
) -> Result<(Vec<usize>, Vec<Vec<(usize, usize)>>)> {
    if !tc.ordered {
        return Err(Error::InvalidInput("colour order must be meaningful (ordered = true)".into()));
    }
    let mut levels = vec![0usize; p.gprime.n()];
    for (ci, &(ea, eb)) in p.crossing_edges.iter().enumerate() {
        let (ca, cb) = (total_colour(p, tc, ea)?, total_colour(p, tc, eb)?);
        if ca == cb {
            return Err(Error::NotTransparent { a: ea, b: eb, colour: ca });
        }
        levels[p.n_original + ci] = ca.min(cb);
    }
    let mut fragments = Vec::with_capacity(p.paths.len());
    for (e, path) in p.paths.iter().enumerate() {
        let colour = total_colour(p, tc, e)?;
        let mut frags = Vec::new();
        let mut start = 0;
        for (i, &v) in path.iter().enumerate().skip(1) {
            if (p.is_dummy(v) && levels[v] < colour) || i == path.len() - 1 {
                frags.push((start, i));
                start = i;
            }
        }
        fragments.push(frags);
    }
    Ok((levels, fragments))
}

/// Interior of one fragment: indices lo..=hi into L_edge, all dummies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub edge: EdgeId,
    pub lo: usize,
    pub hi: usize,
}

/// Sections in canonical order (edge, then position along it), checked
/// pairwise disjoint.
pub fn sections(p: &Planarisation, fragments: &[Vec<(usize, usize)>]) -> Vec<Section> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for (e, frags) in fragments.iter().enumerate() {
        for &(start, end) in frags {
            if end - start >= 2 {
                let s = Section { edge: e, lo: start + 1, hi: end - 1 };
                for i in s.lo..=s.hi {
                    assert!(seen.insert(p.paths[e][i]), "sections must be pairwise disjoint");
                }
                out.push(s);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ColouredPlanarisation {
    pub base: Graph,
    pub plan: Planarisation,
    pub phi: Vec<usize>,
    pub c: usize,
    pub levels_prime: Vec<usize>,
    pub fragments: Vec<Vec<(usize, usize)>>,
    pub sections: Vec<Section>,
    pub gphi: Graph,
    /// V(G') -> V(G^phi). Identity on originals; a dummy maps to
    /// n_original + index of its section.
    pub psi: Vec<VertexId>,
    /// Level per vertex of G^phi.
    pub level: Vec<usize>,
    /// W_e per edge, consecutive duplicates merged.
    pub walks: Vec<Vec<VertexId>>,
}

pub fn coloured_planarisation(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
) -> Result<ColouredPlanarisation> {
    let plan = planarise(d);
    let (levels_prime, fragments) = levels_and_fragments(&plan, tc)?;
    let secs = sections(&plan, &fragments);
    let n = plan.n_original;

    let mut psi = vec![usize::MAX; plan.gprime.n()];
    for (v, slot) in psi.iter_mut().enumerate().take(n) {
        *slot = v;
    }
    for (si, s) in secs.iter().enumerate() {
        for i in s.lo..=s.hi {
            psi[plan.paths[s.edge][i]] = n + si;
        }
    }
    assert!(psi.iter().all(|&x| x != usize::MAX), "every dummy lies in exactly one section");

    let nphi = n + secs.len();
    let mut gphi = Graph::new(nphi);
    for &(u, v) in plan.gprime.edges() {
        if psi[u] != psi[v] {
            let _ = gphi.add_edge(psi[u], psi[v]);
        }
    }

    let phi: Vec<usize> = (0..d.m())
        .map(|e| tc.colour(e).expect("levels_and_fragments checked totality"))
        .collect();
    let mut level = vec![0usize; nphi];
    for (si, s) in secs.iter().enumerate() {
        level[n + si] = phi[s.edge];
        debug_assert!((s.lo..=s.hi).all(|i| levels_prime[plan.paths[s.edge][i]] == phi[s.edge]));
    }

    let mut walks = Vec::with_capacity(d.m());
    for path in &plan.paths {
        let mut w: Vec<VertexId> = Vec::new();
        for &v in path {
            if w.last() != Some(&psi[v]) {
                w.push(psi[v]);
            }
        }
        walks.push(w);
    }

    Ok(ColouredPlanarisation {
        base: d.base().clone(),
        plan,
        phi,
        c: tc.c,
        levels_prime,
        fragments,
        sections: secs,
        gphi,
        psi,
        level,
        walks,
    })
}

impl ColouredPlanarisation {
    pub fn n_original(&self) -> usize {
        self.plan.n_original
    }

    /// Edges crossing the fragment of `edge` whose interior is the given
    /// section, with the crossing dummies all inside the fragment.
    fn fragment_crossers(&self, s: &Section) -> BTreeSet<EdgeId> {
        (s.lo..=s.hi)
            .map(|i| {
                let c = self.plan.crossing_of(self.plan.paths[s.edge][i]).unwrap();
                let (ea, eb) = self.plan.crossing_edges[c];
                if ea == s.edge {
                    eb
                } else {
                    ea
                }
            })
            .collect()
    }

    /// Lower-coloured crossing count per edge (incidences, not distinct
    /// edges): the number of fragment splits.
    pub fn lower_crossing_count(&self, e: EdgeId) -> usize {
        self.fragments[e].len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct WalkLemmaReport {
    pub checks: Vec<LemmaCheck>,
    pub ok: bool,
}

/// Exhaustively checks the seven structural facts about walks in the
/// coloured planarisation; any failure carries a witness.
pub fn verify_walk_lemmas(cp: &ColouredPlanarisation) -> WalkLemmaReport {
    let n = cp.n_original();
    let m = cp.walks.len();
    let mut checks = Vec::new();
    let mut push = |name: &'static str, witness: Option<String>| {
        checks.push(LemmaCheck { name, pass: witness.is_none(), witness });
    };

    // interior walk vertices are never original
    let mut w1 = None;
    'l1: for (e, w) in cp.walks.iter().enumerate() {
        for &x in &w[1..w.len().saturating_sub(1)] {
            if x < n {
                w1 = Some(format!("walk of edge {e} passes original vertex {x}"));
                break 'l1;
            }
        }
    }
    push("interior_vertices_not_original", w1);

    // level along W_e at most phi(e)
    let mut w2 = None;
    'l2: for (e, w) in cp.walks.iter().enumerate() {
        for &x in w {
            if cp.level[x] > cp.phi[e] {
                w2 = Some(format!(
                    "walk of edge {e} (colour {}) reaches level {} at vertex {x}",
                    cp.phi[e], cp.level[x]
                ));
                break 'l2;
            }
        }
    }
    push("walk_level_bounded_by_colour", w2);

    // walk length at most 2 (lower crossings + 1)
    let mut w3 = None;
    for (e, w) in cp.walks.iter().enumerate() {
        let bound = 2 * (cp.lower_crossing_count(e) + 1);
        if w.len() - 1 > bound {
            w3 = Some(format!("walk of edge {e} has length {} > {bound}", w.len() - 1));
            break;
        }
    }
    push("walk_length_bound", w3);

    // each contracted vertex lies on exactly one walk of its own level,
    // and its section belongs to that edge
    let mut w4 = None;
    let mut owner = vec![usize::MAX; cp.gphi.n()];
    for (si, s) in cp.sections.iter().enumerate() {
        owner[n + si] = s.edge;
    }
    for x in n..cp.gphi.n() {
        let holders: Vec<EdgeId> = (0..m)
            .filter(|&e| cp.phi[e] == cp.level[x] && cp.walks[e].contains(&x))
            .collect();
        if holders != vec![owner[x]] {
            w4 = Some(format!(
                "vertex {x} of level {} lies on walks {holders:?}, expected exactly its section's edge {}",
                cp.level[x], owner[x]
            ));
            break;
        }
    }
    push("unique_edge_per_level", w4);

    // membership in a higher-coloured walk happens exactly through a
    // crossing of the owning fragment, which is also a crossing with e
    let mut w5 = None;
    'l5: for (si, s) in cp.sections.iter().enumerate() {
        let x = n + si;
        let crossers = cp.fragment_crossers(s);
        for g in 0..m {
            if cp.phi[g] <= cp.level[x] {
                continue;
            }
            let on_walk = cp.walks[g].contains(&x);
            if on_walk != crossers.contains(&g) {
                w5 = Some(format!(
                    "vertex {x}: edge {g} {} the fragment but {} its walk",
                    if crossers.contains(&g) { "crosses" } else { "misses" },
                    if on_walk { "contains" } else { "misses" }
                ));
                break 'l5;
            }
            if on_walk {
                let crossing_pair = cp.plan.crossing_edges.iter().any(|&(a, b)| {
                    (a, b) == (s.edge.min(g), s.edge.max(g))
                });
                if !crossing_pair {
                    w5 = Some(format!("edges {} and {g} share vertex {x} but never cross", s.edge));
                    break 'l5;
                }
            }
        }
    }
    push("walk_membership_is_fragment_crossing", w5);

    // no two consecutive walk vertices at the edge's own colour
    let mut w6 = None;
    'l6: for (e, w) in cp.walks.iter().enumerate() {
        for pair in w.windows(2) {
            if cp.level[pair[0]] == cp.phi[e] && cp.level[pair[1]] == cp.phi[e] {
                w6 = Some(format!(
                    "walk of edge {e} has consecutive vertices {} and {} at its own colour",
                    pair[0], pair[1]
                ));
                break 'l6;
            }
        }
    }
    push("no_consecutive_top_level", w6);

    // every vertex within distance c - 1 of an original vertex
    let mut w7 = None;
    if cp.gphi.n() > 0 {
        let roots: Vec<VertexId> = (0..n).collect();
        let dist = cp.gphi.multi_bfs_distances(&roots);
        for x in 0..cp.gphi.n() {
            if dist[x] > cp.c - 1 {
                w7 = Some(format!(
                    "vertex {x} is at distance {} from the original vertices, bound {}",
                    dist[x], cp.c - 1
                ));
                break;
            }
        }
    }
    push("all_vertices_near_originals", w7);

    let ok = checks.iter().all(|c| c.pass);
    WalkLemmaReport { checks, ok }
}

/// Largest matching number over (edge e, fragment of e, higher colour j)
/// of the colour-j edges crossing that fragment.
pub fn measure_m(cp: &ColouredPlanarisation) -> usize {
    let mut best = 0;
    for (e, frags) in cp.fragments.iter().enumerate() {
        for &(start, end) in frags {
            if end - start < 2 {
                continue;
            }
            let s = Section { edge: e, lo: start + 1, hi: end - 1 };
            let mut by_colour: BTreeMap<usize, BTreeSet<EdgeId>> = BTreeMap::new();
            for g in cp.fragment_crossers(&s) {
                debug_assert!(cp.phi[g] > cp.phi[e]);
                by_colour.entry(cp.phi[g]).or_default().insert(g);
            }
            for set in by_colour.values() {
                let edges: Vec<EdgeId> = set.iter().copied().collect();
                best = best.max(max_matching(&cp.base, &edges).0);
            }
        }
    }
    best
}

/// Largest vertex cover number over edges e of the lower-coloured edges
/// crossing e.
pub fn measure_k_lower(cp: &ColouredPlanarisation) -> usize {
    let mut best = 0;
    for (e, path) in cp.plan.paths.iter().enumerate() {
        let mut lower: BTreeSet<EdgeId> = BTreeSet::new();
        for &v in &path[1..path.len() - 1] {
            let c = cp.plan.crossing_of(v).unwrap();
            let (ea, eb) = cp.plan.crossing_edges[c];
            let g = if ea == e { eb } else { ea };
            if cp.phi[g] < cp.phi[e] {
                lower.insert(g);
            }
        }
        let edges: Vec<EdgeId> = lower.into_iter().collect();
        best = best.max(min_vertex_cover(&cp.base, &edges).0);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{greedy_transparent, product_transparent};
    use crate::drawing::{Crossing, TopologicalDrawing};
    use crate::families::{
        crossing_stars, grid_apex, k3n, k_2k2_n, pairwise_crossing_fan, random_circular,
        random_segments,
    };
    use crate::planarity::is_planar;

    fn instances(extra_seeds: std::ops::Range<u64>) -> Vec<TopologicalDrawing> {
        let mut out = vec![
            crossing_stars(3).unwrap(),
            k3n(4).unwrap(),
            k_2k2_n(2, 4).unwrap(),
            grid_apex(3).unwrap(),
            pairwise_crossing_fan(),
        ];
        for seed in extra_seeds {
            out.push(random_segments(9, 15, seed).unwrap());
            out.push(random_circular(10, 0.45, seed).unwrap());
        }
        out
    }

    #[test]
    fn planarisation_counts_and_planarity() {
        for d in instances(0..6) {
            let p = planarise(&d);
            assert_eq!(p.gprime.n(), d.n() + d.crossing_count());
            assert_eq!(p.steps, d.m() + 2 * d.crossing_count());
            for (e, path) in p.paths.iter().enumerate() {
                let (u, v) = d.base().endpoints(e);
                assert_eq!((path[0], *path.last().unwrap()), (u, v));
                assert_eq!(path.len(), d.seq(e).len() + 2);
            }
            // dummies carry four path incidences; as graph degree that is 4
            // unless incident path steps coincide
            for c in 0..d.crossing_count() {
                let v = d.n() + c;
                assert!((2..=4).contains(&p.gprime.degree(v)));
            }
            if d.geometry.is_some() {
                assert!(is_planar(&p.gprime));
            }
        }
        // straight-line segment instances never share path steps
        let d = crossing_stars(4).unwrap();
        let p = planarise(&d);
        assert!((0..d.crossing_count()).all(|c| p.gprime.degree(d.n() + c) == 4));
        assert_eq!(p.gprime.m(), d.m() + 2 * d.crossing_count());
    }

    #[test]
    fn fragment_counts_match_lower_crossings() {
        for d in instances(0..6) {
            let tc = greedy_transparent(&d);
            let p = planarise(&d);
            let (levels, fragments) = levels_and_fragments(&p, &tc).unwrap();
            for (e, path) in p.paths.iter().enumerate() {
                let lower = path[1..path.len() - 1]
                    .iter()
                    .filter(|&&v| levels[v] < tc.colour(e).unwrap())
                    .count();
                assert_eq!(fragments[e].len(), lower + 1);
                // fragments tile the path
                assert_eq!(fragments[e][0].0, 0);
                assert_eq!(fragments[e].last().unwrap().1, path.len() - 1);
                for w in fragments[e].windows(2) {
                    assert_eq!(w[0].1, w[1].0);
                }
            }
        }
    }

    #[test]
    fn non_transparent_colouring_is_rejected() {
        let d = crossing_stars(2).unwrap();
        let mut tc = greedy_transparent(&d);
        let (e, f) = { (0, *d.edges_crossing(0).first().unwrap()) };
        let col = tc.colour(e).unwrap();
        tc.colours.insert(f, col);
        let p = planarise(&d);
        assert!(matches!(
            levels_and_fragments(&p, &tc),
            Err(Error::NotTransparent { .. })
        ));
    }

    #[test]
    fn contraction_agrees_with_union_find_oracle() {
        for d in instances(0..8) {
            let tc = greedy_transparent(&d);
            let cp = coloured_planarisation(&d, &tc).unwrap();

            // oracle: union-find over section vertices, then canonical ids
            let p = &cp.plan;
            let mut parent: Vec<usize> = (0..p.gprime.n()).collect();
            fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            for s in &cp.sections {
                for i in s.lo..s.hi {
                    let (a, b) = (p.paths[s.edge][i], p.paths[s.edge][i + 1]);
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
            let mut rep_to_id: BTreeMap<usize, usize> = BTreeMap::new();
            for v in 0..p.n_original {
                rep_to_id.insert(find(&mut parent, v), v);
            }
            for (si, s) in cp.sections.iter().enumerate() {
                rep_to_id.insert(find(&mut parent, p.paths[s.edge][s.lo]), p.n_original + si);
            }
            let mut oracle_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
            for &(u, v) in p.gprime.edges() {
                let (a, b) = (rep_to_id[&find(&mut parent, u)], rep_to_id[&find(&mut parent, v)]);
                if a != b {
                    oracle_edges.insert((a.min(b), a.max(b)));
                }
            }
            let got: BTreeSet<(usize, usize)> = cp.gphi.edges().iter().copied().collect();
            assert_eq!(got, oracle_edges);

            // psi is the identity on originals and partitions V(G')
            assert!((0..p.n_original).all(|v| cp.psi[v] == v));
            let mut classes: BTreeMap<usize, usize> = BTreeMap::new();
            for &x in &cp.psi {
                *classes.entry(x).or_default() += 1;
            }
            assert_eq!(classes.len(), cp.gphi.n());
            assert_eq!(cp.gphi.n(), p.n_original + cp.sections.len());
        }
    }

    #[test]
    fn walk_lemmas_hold_on_greedy_and_product_colourings() {
        for d in instances(0..10) {
            for tc in [greedy_transparent(&d), product_transparent(&d).0] {
                let cp = coloured_planarisation(&d, &tc).unwrap();
                let report = verify_walk_lemmas(&cp);
                assert!(
                    report.ok,
                    "failed: {:?}",
                    report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn two_colour_bipartite_instance_has_all_dummies_at_level_one() {
        let d = k3n(5).unwrap();
        let tc = greedy_transparent(&d);
        assert_eq!(tc.c, 2);
        let cp = coloured_planarisation(&d, &tc).unwrap();
        for x in cp.n_original()..cp.gphi.n() {
            assert_eq!(cp.level[x], 1);
        }
        let report = verify_walk_lemmas(&cp);
        assert!(report.ok);
    }

    #[test]
    fn planar_instance_collapses_to_the_base_graph() {
        let d = k_2k2_n(0, 5).unwrap();
        let tc = greedy_transparent(&d);
        assert_eq!(tc.c, 1);
        let cp = coloured_planarisation(&d, &tc).unwrap();
        assert_eq!(cp.gphi.n(), d.n());
        assert_eq!(
            cp.gphi.edges().iter().copied().collect::<BTreeSet<_>>(),
            d.base().edges().iter().copied().collect::<BTreeSet<_>>()
        );
        assert_eq!((measure_m(&cp), measure_k_lower(&cp)), (0, 0));
        assert!(verify_walk_lemmas(&cp).ok);
    }

    #[test]
    fn measures_on_named_instances() {
        // grid with apex: grid edges colour 1, apex edges colour 2
        let n = 3;
        let d = grid_apex(n).unwrap();
        let grid_edges = 2 * n * (n - 1);
        let mut colours = BTreeMap::new();
        for e in 0..d.m() {
            colours.insert(e, if e < grid_edges { 1 } else { 2 });
        }
        let tc = TransparentColouring { colours, c: 2, ordered: true };
        assert!(crate::colouring::verify_transparent(&d, &tc).ok);
        let cp = coloured_planarisation(&d, &tc).unwrap();
        assert_eq!(measure_m(&cp), 1); // crossers of a grid fragment share the apex
        assert!(verify_walk_lemmas(&cp).ok);

        // measure_m never exceeds the matching planarity of the drawing
        for d in instances(0..6) {
            let tc = greedy_transparent(&d);
            let cp = coloured_planarisation(&d, &tc).unwrap();
            assert!(measure_m(&cp) <= crate::drawing::matching_planarity(&d));
        }
    }

    #[test]
    fn contraction_is_invariant_under_crossing_relabelling() {
        let d = random_segments(9, 16, 2).unwrap();
        let tc = greedy_transparent(&d);
        let cp = coloured_planarisation(&d, &tc).unwrap();

        // rebuild the drawing with crossings listed in reverse order
        let mut rev: Vec<Crossing> = d.crossings().to_vec();
        rev.reverse();
        let d2 = TopologicalDrawing::new(d.base().clone(), rev).unwrap();
        let cp2 = coloured_planarisation(&d2, &tc).unwrap();

        assert_eq!(cp.gphi.edges(), cp2.gphi.edges());
        assert_eq!(cp.level, cp2.level);
        assert_eq!(cp.walks, cp2.walks);
    }
}
