//! Topological drawings: combinatorial crossing data, exact geometric
//! ingestion, and the beyond-planar parameters measured on them.
//!
//! A drawing stores, per edge, the ordered sequence of its crossings from
//! the lower-id endpoint. That order is load-bearing: planarisation splits
//! edges along it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rat_from_str, rat_to_string, segment_intersection, Point, Rat, SegCross};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::matching::{max_matching, min_vertex_cover};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub edge_a: EdgeId,
    pub pos_a: usize,
    pub edge_b: EdgeId,
    pub pos_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    pub coords: Vec<Point>,
    /// Full polyline per edge, endpoints included, from the lower-id endpoint.
    pub polylines: Vec<Vec<Point>>,
}

/// Exact straight-line or polyline input. Bend lists follow the edge
/// orientation as written in `edges`.
#[derive(Debug, Clone)]
pub struct GeometricInput {
    pub coords: Vec<Point>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub bends: Vec<Vec<Point>>,
}

impl GeometricInput {
    pub fn straight(coords: Vec<Point>, edges: Vec<(VertexId, VertexId)>) -> Self {
        let bends = vec![Vec::new(); edges.len()];
        GeometricInput { coords, edges, bends }
    }
}

#[derive(Debug, Clone)]
pub struct TopologicalDrawing {
    base: Graph,
    crossings: Vec<Crossing>,
    seq: Vec<Vec<usize>>,
    pub geometry: Option<Geometry>,
    pub circular_order: Option<Vec<VertexId>>,
}

impl TopologicalDrawing {
    /// Builds from combinatorial crossing records, checking that both
    /// position claims of every crossing are consistent.
    pub fn new(base: Graph, crossings: Vec<Crossing>) -> Result<Self> {
        let m = base.m();
        let mut counts = vec![0usize; m];
        for (id, c) in crossings.iter().enumerate() {
            if c.edge_a >= m || c.edge_b >= m {
                return Err(Error::InvalidInput(format!("crossing {id} names a missing edge")));
            }
            if c.edge_a == c.edge_b {
                return Err(Error::InvalidInput(format!("crossing {id} pairs an edge with itself")));
            }
            counts[c.edge_a] += 1;
            counts[c.edge_b] += 1;
        }
        const FREE: usize = usize::MAX;
        let mut seq: Vec<Vec<usize>> = counts.iter().map(|&k| vec![FREE; k]).collect();
        for (id, c) in crossings.iter().enumerate() {
            for (e, pos) in [(c.edge_a, c.pos_a), (c.edge_b, c.pos_b)] {
                if pos >= seq[e].len() {
                    return Err(Error::InvalidInput(format!(
                        "crossing {id} claims position {pos} on edge {e} with only {} crossings",
                        seq[e].len()
                    )));
                }
                if seq[e][pos] != FREE {
                    return Err(Error::InvalidInput(format!(
                        "edge {e} position {pos} claimed by crossings {} and {id}",
                        seq[e][pos]
                    )));
                }
                seq[e][pos] = id;
            }
        }
        Ok(TopologicalDrawing { base, crossings, seq, geometry: None, circular_order: None })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Crossing ids along edge e, ordered from its lower-id endpoint.
    pub fn seq(&self, e: EdgeId) -> &[usize] {
        &self.seq[e]
    }

    pub fn other_edge(&self, crossing: usize, e: EdgeId) -> EdgeId {
        let c = &self.crossings[crossing];
        if c.edge_a == e {
            c.edge_b
        } else {
            debug_assert_eq!(c.edge_b, e);
            c.edge_a
        }
    }

    /// Distinct edges crossing e, ascending.
    pub fn edges_crossing(&self, e: EdgeId) -> Vec<EdgeId> {
        let set: BTreeSet<EdgeId> = self.seq[e].iter().map(|&c| self.other_edge(c, e)).collect();
        set.into_iter().collect()
    }

    /// Crossing multiplicity per unordered edge pair.
    pub fn pair_counts(&self) -> BTreeMap<(EdgeId, EdgeId), usize> {
        let mut out = BTreeMap::new();
        for c in &self.crossings {
            *out.entry((c.edge_a, c.edge_b)).or_insert(0) += 1;
        }
        out
    }

    /// Sub-drawing on an edge subset. New edge ids follow ascending old ids;
    /// returns the old id of each new edge.
    pub fn restrict_to_edges(&self, keep: &[EdgeId]) -> Result<(TopologicalDrawing, Vec<EdgeId>)> {
        let kept: BTreeSet<EdgeId> = keep.iter().copied().collect();
        for &e in &kept {
            if e >= self.m() {
                return Err(Error::InvalidInput(format!("edge {e} out of range")));
            }
        }
        let old_ids: Vec<EdgeId> = kept.iter().copied().collect();
        let mut new_id = BTreeMap::new();
        let mut base = Graph::new(self.n());
        for (i, &e) in old_ids.iter().enumerate() {
            let (u, v) = self.base.endpoints(e);
            base.add_edge(u, v)?;
            new_id.insert(e, i);
        }
        // new position = rank among surviving crossings of that edge
        let mut new_pos: BTreeMap<(EdgeId, usize), usize> = BTreeMap::new();
        for &e in &old_ids {
            let mut rank = 0;
            for (pos, &c) in self.seq[e].iter().enumerate() {
                if kept.contains(&self.other_edge(c, e)) {
                    new_pos.insert((e, pos), rank);
                    rank += 1;
                }
            }
        }
        let mut events: Vec<Crossing> = Vec::new();
        for c in &self.crossings {
            if kept.contains(&c.edge_a) && kept.contains(&c.edge_b) {
                events.push(Crossing {
                    edge_a: new_id[&c.edge_a],
                    pos_a: new_pos[&(c.edge_a, c.pos_a)],
                    edge_b: new_id[&c.edge_b],
                    pos_b: new_pos[&(c.edge_b, c.pos_b)],
                });
            }
        }
        events.sort_by_key(|c| (c.edge_a, c.pos_a));
        let mut d = TopologicalDrawing::new(base, events)?;
        if let Some(g) = &self.geometry {
            d.geometry = Some(Geometry {
                coords: g.coords.clone(),
                polylines: old_ids.iter().map(|&e| g.polylines[e].clone()).collect(),
            });
        }
        d.circular_order = self.circular_order.clone();
        Ok((d, old_ids))
    }
}

fn degenerate(reason: &str, ids: Vec<usize>) -> Error {
    Error::DegeneratePosition { reason: reason.to_string(), ids }
}

/// Exact param of a crossing along one edge: segment index, then position
/// within the segment.
type EdgeParam = (usize, Rat);

struct Event {
    e: EdgeId,
    f: EdgeId,
    pe: EdgeParam,
    pf: EdgeParam,
    point: Point,
}

pub fn from_polylines(gi: &GeometricInput) -> Result<TopologicalDrawing> {
    let n = gi.coords.len();
    let base = Graph::from_edges(n, &gi.edges)?;
    if gi.bends.len() != gi.edges.len() {
        return Err(Error::InvalidInput("one bend list per edge required".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if gi.coords[i] == gi.coords[j] {
                return Err(degenerate("coincident vertex points", vec![i, j]));
            }
        }
    }
    let mut polylines: Vec<Vec<Point>> = Vec::with_capacity(gi.edges.len());
    for (e, &(u, v)) in gi.edges.iter().enumerate() {
        let mut pts = Vec::with_capacity(gi.bends[e].len() + 2);
        pts.push(gi.coords[u].clone());
        pts.extend(gi.bends[e].iter().cloned());
        pts.push(gi.coords[v].clone());
        if u > v {
            pts.reverse();
        }
        polylines.push(pts);
    }
    for (e, poly) in polylines.iter().enumerate() {
        for w in poly.windows(2) {
            if w[0] == w[1] {
                return Err(degenerate("zero-length polyline segment", vec![e]));
            }
        }
        let s = poly.len() - 1;
        for i in 0..s {
            for j in i + 1..s {
                let hit = segment_intersection(&poly[i], &poly[i + 1], &poly[j], &poly[j + 1]);
                if j == i + 1 {
                    if hit == SegCross::Overlap {
                        return Err(degenerate("polyline backtracks over itself", vec![e]));
                    }
                } else if hit != SegCross::None {
                    return Err(degenerate("self-intersecting edge", vec![e]));
                }
            }
        }
    }
    for (e, poly) in polylines.iter().enumerate() {
        let (u, v) = base.endpoints(e);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            for seg in poly.windows(2) {
                if crate::geometry::point_on_segment(&gi.coords[w], &seg[0], &seg[1]) {
                    return Err(degenerate(&format!("vertex {w} lies on edge"), vec![e]));
                }
            }
        }
    }
    let mut events: Vec<Event> = Vec::new();
    for e in 0..base.m() {
        for f in e + 1..base.m() {
            let (ue, ve) = base.endpoints(e);
            let (uf, vf) = base.endpoints(f);
            let shared: Option<VertexId> =
                [ue, ve].into_iter().find(|x| *x == uf || *x == vf);
            for (i, se) in polylines[e].windows(2).enumerate() {
                for (j, sf) in polylines[f].windows(2).enumerate() {
                    match segment_intersection(&se[0], &se[1], &sf[0], &sf[1]) {
                        SegCross::None => {}
                        SegCross::Overlap => {
                            return Err(degenerate("edges overlap along a segment", vec![e, f]))
                        }
                        SegCross::Proper { point, s, t } => {
                            events.push(Event { e, f, pe: (i, s), pf: (j, t), point });
                        }
                        SegCross::Touch(p) => match shared {
                            Some(w) if p == gi.coords[w] => {}
                            _ => {
                                return Err(degenerate(
                                    "edges touch without crossing",
                                    vec![e, f],
                                ))
                            }
                        },
                    }
                }
            }
        }
    }
    // No three edges through one interior point: all crossing points distinct.
    let mut by_point: Vec<(Point, usize, usize)> =
        events.iter().map(|ev| (ev.point.clone(), ev.e, ev.f)).collect();
    by_point.sort();
    for w in by_point.windows(2) {
        if w[0].0 == w[1].0 {
            let mut ids = vec![w[0].1, w[0].2, w[1].1, w[1].2];
            ids.sort_unstable();
            ids.dedup();
            return Err(degenerate("three edges through a common point", ids));
        }
    }
    events.sort_by(|a, b| (a.e, &a.pe).cmp(&(b.e, &b.pe)));
    let mut per_edge: Vec<Vec<(EdgeParam, usize)>> = vec![Vec::new(); base.m()];
    for (id, ev) in events.iter().enumerate() {
        per_edge[ev.e].push((ev.pe.clone(), id));
        per_edge[ev.f].push((ev.pf.clone(), id));
    }
    let mut pos: Vec<BTreeMap<EdgeId, usize>> = vec![BTreeMap::new(); events.len()];
    for (e, list) in per_edge.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        for (rank, (_, id)) in list.iter().enumerate() {
            pos[*id].insert(e, rank);
        }
    }
    let crossings: Vec<Crossing> = events
        .iter()
        .enumerate()
        .map(|(id, ev)| Crossing {
            edge_a: ev.e,
            pos_a: pos[id][&ev.e],
            edge_b: ev.f,
            pos_b: pos[id][&ev.f],
        })
        .collect();
    let mut d = TopologicalDrawing::new(base, crossings)?;
    d.geometry = Some(Geometry { coords: gi.coords.clone(), polylines });
    Ok(d)
}

/// Places vertex i at the rational circle point with tangent-half-angle
/// parameter i, so every chord intersection is rational, then draws chords
/// as straight segments.
pub fn circular_drawing(n: usize, chords: &[(VertexId, VertexId)]) -> Result<TopologicalDrawing> {
    if n == 0 {
        return Err(Error::InvalidInput("circle needs at least one vertex".into()));
    }
    let mut seen = BTreeSet::new();
    for &(u, v) in chords {
        if u >= n || v >= n {
            return Err(Error::InvalidInput(format!("chord endpoint out of range: ({u},{v})")));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("chord ({u},{v}) is a loop")));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::DuplicateChord { u: key.0, v: key.1 });
        }
    }
    let coords: Vec<Point> = (0..n)
        .map(|i| {
            let t = Rat::from_integer((i as i64).into());
            let denom = Rat::from_integer(1.into()) + &t * &t;
            Point::new((Rat::from_integer(1.into()) - &t * &t) / &denom, (&t + &t) / denom)
        })
        .collect();
    let mut d = from_polylines(&GeometricInput::straight(coords, chords.to_vec()))?;
    d.circular_order = Some((0..n).collect());
    Ok(d)
}

/// Chords {a,b} and {c,d} of an n-cycle cross iff their endpoints strictly
/// interleave in cyclic order.
pub fn chords_interleave(n: usize, a: (usize, usize), b: (usize, usize)) -> bool {
    let (p, q) = a;
    let (c, d) = b;
    if p == c || p == d || q == c || q == d {
        return false;
    }
    let between = |x: usize| (x + n - p) % n < (q + n - p) % n && x != p;
    between(c) != between(d)
}

/// X_G: one vertex per edge of the drawing, adjacent iff the edges cross.
pub fn crossing_graph(d: &TopologicalDrawing) -> Graph {
    let mut g = Graph::new(d.m());
    for (e, f) in d.pair_counts().keys() {
        let _ = g.add_edge(*e, *f);
    }
    g
}

/// Max over edges e of the matching number of the edges crossing e,
/// with the maximising edge and its matching.
pub fn matching_planarity_witness(d: &TopologicalDrawing) -> (usize, Option<(EdgeId, Vec<EdgeId>)>) {
    let mut best = 0;
    let mut witness = None;
    for e in 0..d.m() {
        let crossers = d.edges_crossing(e);
        let (mu, mat) = max_matching(d.base(), &crossers);
        if witness.is_none() || mu > best {
            best = mu;
            witness = Some((e, mat));
        }
    }
    (best, witness)
}

pub fn matching_planarity(d: &TopologicalDrawing) -> usize {
    matching_planarity_witness(d).0
}

/// Max over edges e of the vertex cover number of the edges crossing e.
pub fn cover_planarity_witness(d: &TopologicalDrawing) -> (usize, Option<(EdgeId, Vec<VertexId>)>) {
    let mut best = 0;
    let mut witness = None;
    for e in 0..d.m() {
        let crossers = d.edges_crossing(e);
        let (tau, cov) = min_vertex_cover(d.base(), &crossers);
        if tau > best || witness.is_none() {
            best = tau;
            witness = Some((e, cov));
        }
    }
    (best, witness)
}

pub fn cover_planarity(d: &TopologicalDrawing) -> usize {
    cover_planarity_witness(d).0
}

pub(crate) fn max_clique(adj: &[Vec<bool>], cand: &[usize], depth: usize, best: &mut usize) {
    if depth + cand.len() <= *best {
        return;
    }
    if cand.is_empty() {
        *best = (*best).max(depth);
        return;
    }
    let v = cand[0];
    let with_v: Vec<usize> = cand[1..].iter().copied().filter(|&u| adj[v][u]).collect();
    max_clique(adj, &with_v, depth + 1, best);
    max_clique(adj, &cand[1..], depth, best);
}

/// Largest pairwise-crossing set of edges sharing an endpoint, and the
/// smallest forbidden fan size t = largest + 1.
pub fn largest_crossing_fan(d: &TopologicalDrawing) -> usize {
    let pairs = d.pair_counts();
    let mut best = usize::from(d.m() > 0);
    for v in 0..d.n() {
        let inc = d.base().edge_ids_at(v);
        if inc.len() <= best {
            continue;
        }
        let mut adj = vec![vec![false; inc.len()]; inc.len()];
        for (i, &e) in inc.iter().enumerate() {
            for (j, &f) in inc.iter().enumerate().skip(i + 1) {
                if pairs.contains_key(&(e.min(f), e.max(f))) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        let cand: Vec<usize> = (0..inc.len()).collect();
        max_clique(&adj, &cand, 0, &mut best);
    }
    best
}

pub fn max_crossing_fan(d: &TopologicalDrawing) -> usize {
    largest_crossing_fan(d) + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrawingProfile {
    pub simple: bool,
    pub max_crossings_per_edge: usize,
    pub per_pair_max: usize,
    pub min_k_planar: usize,
    pub matching_k: usize,
    pub cover_k: usize,
    pub fan_t: usize,
}

pub fn drawing_profile(d: &TopologicalDrawing) -> DrawingProfile {
    let pairs = d.pair_counts();
    let per_pair_max = pairs.values().copied().max().unwrap_or(0);
    let max_crossings_per_edge = (0..d.m()).map(|e| d.seq(e).len()).max().unwrap_or(0);
    let mut adjacent_crossing = false;
    for (&(e, f), _) in &pairs {
        let (ue, ve) = d.base().endpoints(e);
        let (uf, vf) = d.base().endpoints(f);
        if ue == uf || ue == vf || ve == uf || ve == vf {
            adjacent_crossing = true;
        }
    }
    let min_k_planar = pairs
        .keys()
        .map(|&(e, f)| d.seq(e).len().min(d.seq(f).len()))
        .max()
        .unwrap_or(0);
    DrawingProfile {
        simple: per_pair_max <= 1 && !adjacent_crossing,
        max_crossings_per_edge,
        per_pair_max,
        min_k_planar,
        matching_k: matching_planarity(d),
        cover_k: cover_planarity(d),
        fan_t: max_crossing_fan(d),
    }
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    u: usize,
    v: usize,
    crossings: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CrossingJson {
    id: usize,
    ea: usize,
    pa: usize,
    eb: usize,
    pb: usize,
}

#[derive(Serialize, Deserialize)]
struct GeometryJson {
    coords: Vec<[String; 2]>,
    polylines: Vec<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct DrawingJson {
    vertices: Vec<usize>,
    edges: Vec<EdgeJson>,
    crossings: Vec<CrossingJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    geometry: Option<GeometryJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    circular_order: Option<Vec<usize>>,
}

fn point_to_json(p: &Point) -> [String; 2] {
    [rat_to_string(&p.x), rat_to_string(&p.y)]
}

fn point_from_json(p: &[String; 2]) -> Result<Point> {
    Ok(Point::new(rat_from_str(&p[0])?, rat_from_str(&p[1])?))
}

impl TopologicalDrawing {
    pub fn to_json(&self) -> String {
        let dj = DrawingJson {
            vertices: (0..self.n()).collect(),
            edges: (0..self.m())
                .map(|e| {
                    let (u, v) = self.base.endpoints(e);
                    EdgeJson { id: e, u, v, crossings: self.seq[e].clone() }
                })
                .collect(),
            crossings: self
                .crossings
                .iter()
                .enumerate()
                .map(|(id, c)| CrossingJson {
                    id,
                    ea: c.edge_a,
                    pa: c.pos_a,
                    eb: c.edge_b,
                    pb: c.pos_b,
                })
                .collect(),
            geometry: self.geometry.as_ref().map(|g| GeometryJson {
                coords: g.coords.iter().map(point_to_json).collect(),
                polylines: g
                    .polylines
                    .iter()
                    .map(|poly| poly.iter().map(point_to_json).collect())
                    .collect(),
            }),
            circular_order: self.circular_order.clone(),
        };
        serde_json::to_string_pretty(&dj).expect("drawing serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dj: DrawingJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
        let n = dj.vertices.len();
        if dj.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidInput("vertices must be 0..n-1 in order".into()));
        }
        let mut base = Graph::new(n);
        for (i, e) in dj.edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::InvalidInput("edge ids must be 0..m-1 in order".into()));
            }
            base.add_edge(e.u, e.v)?;
        }
        let mut recs = vec![None; dj.crossings.len()];
        for c in &dj.crossings {
            if c.id >= recs.len() || recs[c.id].is_some() {
                return Err(Error::InvalidInput("crossing ids must be 0..k-1, unique".into()));
            }
            recs[c.id] =
                Some(Crossing { edge_a: c.ea, pos_a: c.pa, edge_b: c.eb, pos_b: c.pb });
        }
        let crossings: Vec<Crossing> = recs.into_iter().map(|c| c.unwrap()).collect();
        let mut d = TopologicalDrawing::new(base, crossings)?;
        for (e, ej) in dj.edges.iter().enumerate() {
            if ej.crossings != d.seq[e] {
                return Err(Error::InvalidInput(format!(
                    "edge {e} crossing list disagrees with crossing positions"
                )));
            }
        }
        if let Some(gj) = &dj.geometry {
            if gj.coords.len() != n || gj.polylines.len() != d.m() {
                return Err(Error::InvalidInput("geometry size mismatch".into()));
            }
            let coords: Result<Vec<Point>> = gj.coords.iter().map(point_from_json).collect();
            let coords = coords?;
            let mut edges = Vec::new();
            let mut bends = Vec::new();
            for (e, poly) in gj.polylines.iter().enumerate() {
                let pts: Result<Vec<Point>> = poly.iter().map(point_from_json).collect();
                let pts = pts?;
                let (u, v) = d.base.endpoints(e);
                if pts.len() < 2 || pts[0] != coords[u] || pts[pts.len() - 1] != coords[v] {
                    return Err(Error::InvalidInput(format!(
                        "edge {e} polyline does not join its endpoints"
                    )));
                }
                edges.push((u, v));
                bends.push(pts[1..pts.len() - 1].to_vec());
            }
            let rebuilt = from_polylines(&GeometricInput { coords, edges, bends })?;
            if rebuilt.crossings != d.crossings {
                return Err(Error::InvalidInput(
                    "geometry does not reproduce the stated crossings".into(),
                ));
            }
            d.geometry = rebuilt.geometry;
        }
        if let Some(order) = dj.circular_order {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted.iter().enumerate().any(|(i, &v)| i != v) || order.len() != n {
                return Err(Error::InvalidInput("circular order must permute the vertices".into()));
            }
            d.circular_order = Some(order);
        }
        Ok(d)
    }
}
