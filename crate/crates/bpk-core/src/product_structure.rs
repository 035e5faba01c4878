//! Minor models into strong products G^phi (x) K_t, the distance and weak
//! shallow-minor machinery on top of them, and the treewidth / layered
//! treewidth bound pipelines with re-checkable certificates.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::colouring::{
    product_transparent, refine_to_cover, StarForestCover, TransparentColouring,
};
use crate::drawing::{matching_planarity, TopologicalDrawing};
use crate::error::{Error, Result};
use crate::graph::{strong_product, Graph, VertexId};
use crate::minors::{validate_model, MinorModel, RootedTree};
use crate::planarise::{
    coloured_planarisation, measure_k_lower, measure_m, verify_walk_lemmas,
    ColouredPlanarisation,
};
use crate::treewidth::{
    component_bfs_layering, exact_treewidth, lift_over_clique, validate_layering,
    validate_tree_decomposition, LayeredDecomposition, Layering, TreeDecomposition,
    ValidationReport,
};

/// Model of the drawn graph in G^phi (x) K_t. Product vertex (x, i) has id
/// x * t + (i - 1); the injection at x sends b_sets[x][j] to j + 1, so the
/// branch set of v is { x * t + rank(v in b_sets[x]) : v in b_sets[x] } and
/// always contains (v, 1).
#[derive(Debug, Clone)]
pub struct CplModel {
    pub host: Graph,
    pub t: usize,
    pub mu: MinorModel,
    /// Dominant-endpoint sets per product-base vertex, sorted ascending.
    pub b_sets: Vec<Vec<VertexId>>,
    pub s: usize,
    pub m: usize,
    pub c: usize,
}

impl CplModel {
    /// 1-based injection value of v at x, when v lies in B_x.
    pub fn lambda(&self, x: VertexId, v: VertexId) -> Option<usize> {
        self.b_sets[x].binary_search(&v).ok().map(|j| j + 1)
    }
}

/// Builds the model: B_v = {v} for originals; a contracted vertex x collects
/// the dominant endpoints (the cover's star centres) of every edge whose walk
/// passes x at colour >= level(x). t = max |B_x|, and the branch set of v
/// takes the injection slot of v at each x holding it.
pub fn cpl_model(cp: &ColouredPlanarisation, cover: &StarForestCover) -> Result<CplModel> {
    let n = cp.n_original();
    let m_edges = cp.base.m();

    let mut dominant = vec![usize::MAX; m_edges];
    for (e, slot) in dominant.iter_mut().enumerate() {
        let &(i, j) = cover.refined.get(&e).ok_or(Error::CoverMismatch { edge: e })?;
        if i != cp.phi[e] {
            return Err(Error::CoverMismatch { edge: e });
        }
        let sf = cover
            .classes
            .get(&i)
            .and_then(|forests| forests.get(j.wrapping_sub(1)))
            .ok_or(Error::CoverMismatch { edge: e })?;
        *slot = sf.centre_of_edge(e).ok_or(Error::CoverMismatch { edge: e })?;
    }

    let nphi = cp.gphi.n();
    let mut b_sets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); nphi];
    for (v, set) in b_sets.iter_mut().enumerate().take(n) {
        set.insert(v);
    }
    for e in 0..m_edges {
        for &x in &cp.walks[e] {
            if x >= n && cp.phi[e] >= cp.level[x] {
                b_sets[x].insert(dominant[e]);
            }
        }
    }
    let t = b_sets.iter().map(|b| b.len()).max().unwrap_or(1).max(1);
    let b_sets: Vec<Vec<VertexId>> = b_sets.into_iter().map(|b| b.into_iter().collect()).collect();

    let m = measure_m(cp);
    assert!(
        t <= 1 + cover.s * (cp.c - 1) * m,
        "t = {t} exceeds 1 + s(c-1)m = {}",
        1 + cover.s * (cp.c - 1) * m
    );

    let host = strong_product(&cp.gphi, &Graph::complete(t));
    let mut branch_sets: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for (x, bx) in b_sets.iter().enumerate() {
        for (j, &v) in bx.iter().enumerate() {
            branch_sets[v].push(x * t + j);
        }
    }
    let mu = MinorModel { branch_sets };
    let rep = validate_model(&cp.base, &host, &mu);
    if !rep.ok {
        return Err(Error::InvalidInput(format!(
            "constructed model fails validation: {}",
            rep.violations.join("; ")
        )));
    }
    Ok(CplModel { host, t, mu, b_sets, s: cover.s, m, c: cp.c })
}

/// Every (x, i) in the branch set of v must have x = v or x interior to the
/// walk of an edge at v.
pub fn check_branch_sets_on_walks(
    model: &CplModel,
    cp: &ColouredPlanarisation,
) -> ValidationReport {
    let t = model.t;
    let mut violations = Vec::new();
    for (v, set) in model.mu.branch_sets.iter().enumerate() {
        for &p in set {
            let x = p / t;
            if x == v {
                continue;
            }
            let witnessed = cp.base.edge_ids_at(v).into_iter().any(|e| {
                let (a, b) = cp.base.endpoints(e);
                x != a && x != b && cp.walks[e].contains(&x)
            });
            if !witnessed {
                violations.push(format!(
                    "({x}, {}) in the branch set of {v} lies on no walk of an edge at {v}",
                    p % t + 1
                ));
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// h(c) = (2^{c+1} k^c - 2k - 1) / (2k - 1), via the recurrence h(1) = 1,
/// h(i) = 2k(h(i-1) + 1) + 1. Undefined at k = 0.
pub fn distance_bound(c: usize, k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::KZero);
    }
    if c == 0 {
        return Err(Error::BadParams("colour count must be at least 1".into()));
    }
    let two_k = BigUint::from(2 * k);
    let mut h = BigUint::one();
    for _ in 2..=c {
        h = &two_k * (h + BigUint::one()) + BigUint::one();
    }
    debug_assert_eq!(
        h,
        ((BigUint::one() << (c + 1)) * BigUint::from(k).pow(c as u32) - &two_k - BigUint::one())
            / (two_k - BigUint::one())
    );
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub max_observed: usize,
    pub bound: BigUint,
    /// k = 0 degenerates: no walk has lower-coloured interruptions, so every
    /// interior vertex is adjacent to both endpoints and the bound is 1.
    pub k_zero: bool,
    pub pass: bool,
}

/// BFS from both endpoints of every edge: interior walk vertices must stay
/// within h(c) of each endpoint in G^phi.
pub fn distance_check(cp: &ColouredPlanarisation, k: usize) -> DistanceReport {
    let mut max_observed = 0usize;
    let mut cache: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for e in 0..cp.base.m() {
        let (u, w) = cp.base.endpoints(e);
        for root in [u, w] {
            let dist =
                cache.entry(root).or_insert_with(|| cp.gphi.bfs_distances(root));
            for &x in &cp.walks[e] {
                if x != u && x != w {
                    max_observed = max_observed.max(dist[x]);
                }
            }
        }
    }
    let (bound, k_zero) = match distance_bound(cp.c, k) {
        Ok(b) => (b, false),
        Err(_) => (BigUint::one(), true),
    };
    let pass = BigUint::from(max_observed) <= bound;
    DistanceReport { max_observed, bound, k_zero, pass }
}

/// Minor model whose branch sets each stay within host distance r of a
/// designated origin (paths may leave the branch set).
#[derive(Debug, Clone)]
pub struct WeakShallowModel {
    pub mu: MinorModel,
    pub r: usize,
    pub origins: Vec<VertexId>,
    /// Largest origin-to-member distance actually seen.
    pub measured_max: usize,
}

/// r is taken as h(c) at k = measure_k_lower (0 when there are no crossings)
/// and every branch set is verified against it by BFS from its origin (v, 1);
/// a violation would contradict the distance argument, so it is an error.
pub fn weak_shallow_from_cpl(
    model: &CplModel,
    cp: &ColouredPlanarisation,
) -> Result<WeakShallowModel> {
    let k = measure_k_lower(cp);
    let r = match distance_bound(model.c, k) {
        Ok(b) => b.to_usize().unwrap_or(usize::MAX),
        Err(_) => 0,
    };
    let t = model.t;
    let origins: Vec<VertexId> = (0..model.mu.branch_sets.len()).map(|v| v * t).collect();
    let mut measured_max = 0usize;
    for (v, set) in model.mu.branch_sets.iter().enumerate() {
        let dist = model.host.bfs_distances(origins[v]);
        for &p in set {
            if dist[p] > r {
                return Err(Error::RadiusExceeded { vertex: p, bound: r, dist: dist[p] });
            }
            measured_max = measured_max.max(dist[p]);
        }
    }
    Ok(WeakShallowModel { mu: model.mu.clone(), r, origins, measured_max })
}

/// Carries a layered decomposition across a weak r-shallow model: each host
/// bag keeps the branch-set owners of its members, and the layers of g group
/// the origins' host layers into blocks of 2r + 1 (empty blocks dropped).
/// The output passes both validators and its layered width is checked
/// against (4r + 1) times the host's.
pub fn ltw_transfer(
    g: &Graph,
    host: &Graph,
    host_ld: &LayeredDecomposition,
    wsm: &WeakShallowModel,
) -> Result<LayeredDecomposition> {
    if wsm.mu.branch_sets.len() != g.n() || wsm.origins.len() != g.n() {
        return Err(Error::ModelHostMismatch(format!(
            "{} branch sets and {} origins for {} vertices",
            wsm.mu.branch_sets.len(),
            wsm.origins.len(),
            g.n()
        )));
    }
    let mut owner = vec![usize::MAX; host.n()];
    for (v, set) in wsm.mu.branch_sets.iter().enumerate() {
        for &x in set {
            if x >= host.n() {
                return Err(Error::ModelHostMismatch(format!(
                    "branch set of {v} mentions host vertex {x} of {}",
                    host.n()
                )));
            }
            if owner[x] != usize::MAX {
                return Err(Error::ModelHostMismatch(format!(
                    "host vertex {x} lies in two branch sets"
                )));
            }
            owner[x] = v;
        }
    }

    let bags: Vec<BTreeSet<VertexId>> = host_ld
        .td
        .bags
        .iter()
        .map(|bag| bag.iter().map(|&x| owner[x]).filter(|&v| v != usize::MAX).collect())
        .collect();
    let td = TreeDecomposition { tree: host_ld.td.tree.clone(), bags };

    let host_layer = host_ld.layering.layer_of(host.n());
    let block = wsm.r.saturating_mul(2).saturating_add(1);
    let mut by_block: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for v in 0..g.n() {
        let hl = host_layer[wsm.origins[v]];
        if hl == usize::MAX {
            return Err(Error::ModelHostMismatch(format!("origin of {v} is in no host layer")));
        }
        by_block.entry(hl / block).or_default().push(v);
    }
    let layering = Layering { layers: by_block.into_values().collect() };

    let tv = validate_tree_decomposition(g, &td);
    let lv = validate_layering(g, &layering);
    if !tv.ok || !lv.ok {
        let all: Vec<String> =
            tv.violations.into_iter().chain(lv.violations).collect();
        return Err(Error::InvalidInput(format!(
            "transferred decomposition fails validation: {}",
            all.join("; ")
        )));
    }
    let out = LayeredDecomposition { td, layering };
    let bound = (4usize.saturating_mul(wsm.r).saturating_add(1))
        .saturating_mul(host_ld.layered_width(host.n()));
    let width = out.layered_width(g.n());
    if width > bound {
        return Err(Error::InvalidInput(format!(
            "transferred layered width {width} exceeds (4r + 1) * host width = {bound}"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

/// Inequality-by-inequality report for one instance. Numeric values are kept
/// as strings so arbitrarily large bounds serialise unchanged.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub instance: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    fn new(instance: &str) -> Self {
        BoundReport { instance: instance.into(), params: BTreeMap::new(), checks: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    fn check_le(&mut self, name: &str, lhs: usize, rhs: usize) {
        self.checks.push(BoundCheck {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass: lhs <= rhs,
        });
    }

    fn check_le_big(&mut self, name: &str, lhs: &BigUint, rhs: &BigUint) {
        self.checks.push(BoundCheck {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass: lhs <= rhs,
        });
    }

    fn check_report(&mut self, name: &str, rep: &ValidationReport) {
        self.checks.push(BoundCheck {
            name: name.into(),
            lhs: format!("{} violations", rep.violations.len()),
            rhs: "0 violations".into(),
            pass: rep.ok,
        });
    }
}

fn try_tw(g: &Graph, cap: usize) -> Option<usize> {
    exact_treewidth(g, cap).ok().map(|(w, _)| w)
}

fn graph_radius(g: &Graph) -> usize {
    (0..g.n())
        .map(|v| g.bfs_distances(v).into_iter().max().unwrap_or(0))
        .min()
        .unwrap_or(0)
}

/// Largest distance from any vertex of G^phi to the original vertices; the
/// outerplanarity surrogate needs this at most c - 1.
fn max_dist_to_originals(cp: &ColouredPlanarisation) -> usize {
    let roots: Vec<VertexId> = (0..cp.n_original()).collect();
    if roots.is_empty() {
        return 0;
    }
    cp.gphi.multi_bfs_distances(&roots).into_iter().max().unwrap_or(0)
}

/// 2(k+1)log2(k+1) + 2(k+1)log2(log2(k+1)) + 10k + 10, the colour count the
/// matching-planar colouring theorem guarantees; meaningful for k >= 1.
pub fn davies_colour_count(k: usize) -> Option<f64> {
    if k == 0 {
        return None;
    }
    let kp = (k + 1) as f64;
    let inner = kp.log2();
    Some(2.0 * kp * inner + 2.0 * kp * inner.log2().max(0.0) + 10.0 * k as f64 + 10.0)
}

fn rtw_closed_form(r: &BigUint, t: &BigUint) -> String {
    match r.to_usize() {
        Some(ru) if ru <= 400 => {
            let seven = BigUint::from(7u32).pow((30 * ru + 6) as u32);
            let inner = (BigUint::from(2u32) * (BigUint::from(8u32) * r + BigUint::one()) * t
                + BigUint::from(3u32))
                * seven
                - BigUint::one();
            ((BigUint::from(4u32) * r + BigUint::one()) * t * inner - BigUint::one()).to_string()
        }
        // past that the tower is printed symbolically rather than expanded
        _ => format!("(4*{r}+1)*{t}*((2*(8*{r}+1)*{t}+3)*7^(30*{r}+6)-1)-1"),
    }
}

fn ltw_closed_form(r: &BigUint, t: &BigUint) -> BigUint {
    BigUint::from(3u32) * t * (BigUint::from(4u32) * r + BigUint::one())
}

/// Treewidth bounds for circular drawings: tw(G) <= 9mc(c-1) + 3c - 1 with
/// the worst-case star-forest count 3, and (tw(G^phi)+1)t - 1 <=
/// 3smc(c-1) + 3c - 1 with the achieved count s. Exact treewidths are
/// measured within cap.
pub fn circular_tw_bound(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
    cap: usize,
    instance: &str,
) -> Result<BoundReport> {
    if d.circular_order.is_none() {
        return Err(Error::NotCircular);
    }
    let cp = coloured_planarisation(d, tc)?;
    let cover = refine_to_cover(&cp.base, tc)?;
    let model = cpl_model(&cp, &cover)?;
    let (m, c, s, t) = (model.m, model.c, model.s, model.t);

    let mut rep = BoundReport::new(instance);
    rep.param("n", cp.base.n());
    rep.param("edges", cp.base.m());
    rep.param("c", c);
    rep.param("m", m);
    rep.param("s", s);
    rep.param("t", t);
    let worst_case_bound = 9 * m * c * (c - 1) + 3 * c - 1;
    let achieved_bound = 3 * s * m * c * (c - 1) + 3 * c - 1;
    rep.param("worst_case_bound", worst_case_bound);
    rep.param("achieved_bound", achieved_bound);
    if let Some(dc) = davies_colour_count(matching_planarity(d)) {
        rep.param("davies_c", format!("{dc:.2}"));
    }

    rep.check_le("gphi_within_c_minus_1_of_originals", max_dist_to_originals(&cp), c - 1);
    rep.check_le("t_le_achieved_form", t, 1 + s * (c - 1) * m);
    if s <= 3 {
        rep.check_le("t_le_three_forest_form", t, 1 + 3 * (c - 1) * m);
    } else {
        rep.param("three_forest_t_form", 1 + 3 * (c - 1) * m);
    }

    let tw_g = try_tw(&cp.base, cap);
    let tw_gphi = try_tw(&cp.gphi, cap);
    match tw_g {
        Some(w) => rep.param("tw_exact", w),
        None => rep.param("tw_exact", "skipped (cap)"),
    }
    match tw_gphi {
        Some(w) => rep.param("tw_gphi_exact", w),
        None => rep.param("tw_gphi_exact", "skipped (cap)"),
    }
    if let Some(w) = tw_gphi {
        rep.check_le("tw_gphi_le_3c_minus_1", w, 3 * c - 1);
        rep.check_le("chain_le_achieved_bound", (w + 1) * t - 1, achieved_bound);
        if let Some(wg) = tw_g {
            rep.check_le("tw_le_chain", wg, (w + 1) * t - 1);
        }
    }
    if let Some(wg) = tw_g {
        rep.check_le("tw_le_worst_case_bound", wg, worst_case_bound);
    }
    Ok(rep)
}

/// Treewidth bound from a spanning tree: with r the tree radius and t the
/// worst lower-colour crossing count over tree edges,
/// tw(G) <= (6(t+1)r + 3c - 1)(1 + 5(c-1)m) - 1, with the achieved
/// star-forest count replacing 5 when it differs. The intermediate radius
/// claims are measured as their own checks.
pub fn radius_tw_bound(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
    tree: &RootedTree,
    cap: usize,
    instance: &str,
) -> Result<BoundReport> {
    let g = d.base();
    if tree.tree.n() != g.n() {
        return Err(Error::NotSpanning(format!(
            "tree has {} vertices, graph has {}",
            tree.tree.n(),
            g.n()
        )));
    }
    let mut tree_edges = Vec::with_capacity(tree.tree.m());
    for &(u, v) in tree.tree.edges() {
        match g.edge_id(u, v) {
            Some(e) => tree_edges.push(e),
            None => {
                return Err(Error::NotSpanning(format!("tree edge {u}-{v} is not a graph edge")))
            }
        }
    }

    let cp = coloured_planarisation(d, tc)?;
    let cover = refine_to_cover(&cp.base, tc)?;
    let model = cpl_model(&cp, &cover)?;
    let (m, c, s, t_cpl) = (model.m, model.c, model.s, model.t);
    let t = tree_edges.iter().map(|&e| cp.lower_crossing_count(e)).max().unwrap_or(0);
    let r = tree.radius();

    let mut rep = BoundReport::new(instance);
    rep.param("n", g.n());
    rep.param("edges", g.m());
    rep.param("c", c);
    rep.param("m", m);
    rep.param("s", s);
    rep.param("t_tree", t);
    rep.param("t_model", t_cpl);
    rep.param("tree_radius", r);
    let radius_bound = 2 * (t + 1) * r + c - 1;
    let worst_case_bound = (6 * (t + 1) * r + 3 * c - 1) * (1 + 5 * (c - 1) * m) - 1;
    let achieved_bound = (6 * (t + 1) * r + 3 * c - 1) * (1 + s * (c - 1) * m) - 1;
    rep.param("worst_case_bound", worst_case_bound);
    rep.param("achieved_bound", achieved_bound);

    // subgraph of G^phi spanned by the walks of tree edges
    let mut gt = Graph::new(cp.gphi.n());
    let mut members: BTreeSet<VertexId> = BTreeSet::new();
    for &e in &tree_edges {
        let w = &cp.walks[e];
        for pair in w.windows(2) {
            let _ = gt.add_edge(pair[0], pair[1]);
        }
        members.extend(w.iter().copied());
    }
    let gt_radius = members
        .iter()
        .map(|&v| {
            let dist = gt.bfs_distances(v);
            members.iter().map(|&u| dist[u]).max().unwrap_or(0)
        })
        .min()
        .unwrap_or(0);
    rep.check_le("walk_tree_radius_le_2t1r", gt_radius, 2 * (t + 1) * r);
    let gphi_radius = graph_radius(&cp.gphi);
    rep.param("gphi_radius", gphi_radius);
    rep.check_le("gphi_radius_le_2t1r_plus_c_minus_1", gphi_radius, radius_bound);
    rep.check_le("t_model_le_achieved_form", t_cpl, 1 + s * (c - 1) * m);

    let tw_g = try_tw(g, cap);
    let tw_gphi = try_tw(&cp.gphi, cap);
    match tw_g {
        Some(w) => rep.param("tw_exact", w),
        None => rep.param("tw_exact", "skipped (cap)"),
    }
    match tw_gphi {
        Some(w) => rep.param("tw_gphi_exact", w),
        None => rep.param("tw_gphi_exact", "skipped (cap)"),
    }
    if let Some(w) = tw_gphi {
        rep.check_le("tw_gphi_le_3radius_plus_1", w, 3 * gphi_radius + 1);
        rep.check_le("tw_gphi_le_6t1r_plus_3c_minus_2", w, 6 * (t + 1) * r + 3 * c - 2);
        if let Some(wg) = tw_g {
            rep.check_le("tw_le_chain", wg, (w + 1) * t_cpl - 1);
        }
    }
    if let Some(wg) = tw_g {
        rep.check_le("tw_le_achieved_bound", wg, achieved_bound);
        rep.check_le("tw_le_worst_case_bound", wg, worst_case_bound);
    }
    Ok(rep)
}

/// End-to-end layered-treewidth pipeline: product colouring, coloured
/// planarisation, model into G^phi (x) K_t, distance and weak-radius
/// verification, and the layered-decomposition transfer. The host layered
/// decomposition is computed (exact treewidth of G^phi lifted over K_t plus
/// a BFS layering), so every transferred bound is stated against a measured
/// host width rather than the external planar constant 3. Returns the report
/// and the transferred certificate.
pub fn pipeline_report(
    d: &TopologicalDrawing,
    cap: usize,
    instance: &str,
) -> Result<(BoundReport, LayeredDecomposition)> {
    let (tc, cover) = product_transparent(d);
    pipeline_report_with(d, &tc, &cover, cap, instance)
}

/// Same pipeline over a caller-supplied colouring and its refinement.
pub fn pipeline_report_with(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
    cover: &StarForestCover,
    cap: usize,
    instance: &str,
) -> Result<(BoundReport, LayeredDecomposition)> {
    let cp = coloured_planarisation(d, tc)?;
    let model = cpl_model(&cp, cover)?;
    let k = measure_k_lower(&cp);
    let (m, c, s, t) = (model.m, model.c, model.s, model.t);

    let mut rep = BoundReport::new(instance);
    rep.param("n", cp.base.n());
    rep.param("edges", cp.base.m());
    rep.param("k", k);
    rep.param("c", c);
    rep.param("m", m);
    rep.param("s", s);
    rep.param("t", t);

    let walks = verify_walk_lemmas(&cp);
    rep.checks.push(BoundCheck {
        name: "walk_lemmas".into(),
        lhs: format!("{} checks", walks.checks.len()),
        rhs: "all pass".into(),
        pass: walks.ok,
    });
    rep.check_report("model_valid", &validate_model(&cp.base, &model.host, &model.mu));
    rep.check_report("branch_sets_on_walks", &check_branch_sets_on_walks(&model, &cp));
    rep.check_le("t_le_achieved_form", t, 1 + s * (c - 1) * m);

    let dist = distance_check(&cp, k);
    rep.param("distance_max", dist.max_observed);
    rep.param("distance_bound", &dist.bound);
    rep.param("k_zero", dist.k_zero);
    rep.check_le_big(
        "distance_le_h_c",
        &BigUint::from(dist.max_observed),
        &dist.bound,
    );

    let wsm = weak_shallow_from_cpl(&model, &cp)?;
    rep.param("r", wsm.r);
    rep.check_le("weak_radius_le_r", wsm.measured_max, wsm.r);

    let (tw_gphi, td_gphi) = exact_treewidth(&cp.gphi, cap)?;
    rep.param("tw_gphi_exact", tw_gphi);
    let td_host = lift_over_clique(&td_gphi, t);
    let lay_gphi = component_bfs_layering(&cp.gphi);
    let layers: Vec<Vec<VertexId>> = lay_gphi
        .layers
        .iter()
        .map(|layer| {
            layer.iter().flat_map(|&x| (0..t).map(move |i| x * t + i)).collect()
        })
        .collect();
    let host_ld = LayeredDecomposition { td: td_host, layering: Layering { layers } };
    rep.check_report(
        "host_decomposition_valid",
        &validate_tree_decomposition(&model.host, &host_ld.td),
    );
    rep.check_report("host_layering_valid", &validate_layering(&model.host, &host_ld.layering));
    let host_width = host_ld.layered_width(model.host.n());
    rep.param("host_layered_width", host_width);

    let out = ltw_transfer(&cp.base, &model.host, &host_ld, &wsm)?;
    let width = out.layered_width(cp.base.n());
    rep.param("ltw_certificate_width", width);
    rep.check_report(
        "transferred_decomposition_valid",
        &validate_tree_decomposition(&cp.base, &out.td),
    );
    rep.check_report("transferred_layering_valid", &validate_layering(&cp.base, &out.layering));
    rep.check_le(
        "ltw_le_4r1_host_width",
        width,
        (4usize.saturating_mul(wsm.r).saturating_add(1)).saturating_mul(host_width),
    );

    // closed forms at the measured parameters, for comparison only
    if let Ok(h) = distance_bound(c, k) {
        let worst_t = BigUint::from(1 + 5 * (c - 1) * m);
        rep.param("ltw_worst_case_form", ltw_closed_form(&h, &worst_t));
        rep.param("rtw_worst_case_form", rtw_closed_form(&h, &worst_t));
    } else {
        let (r0, t1) = (BigUint::from(0u32), BigUint::one());
        rep.param("ltw_worst_case_form", ltw_closed_form(&r0, &t1));
        rep.param("rtw_worst_case_form", rtw_closed_form(&r0, &t1));
    }
    if let Some(dc) = davies_colour_count(k) {
        rep.param("davies_c", format!("{dc:.2}"));
    }
    Ok((rep, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{greedy_transparent, validate_cover};
    use crate::drawing::circular_drawing;
    use crate::families;
    use crate::minors::weak_radius;
    use crate::treewidth::DEFAULT_TW_CAP;

    fn small_instances() -> Vec<(String, TopologicalDrawing)> {
        let mut out = vec![
            ("crossing_stars_2".into(), families::crossing_stars(2).unwrap()),
            ("crossing_stars_3".into(), families::crossing_stars(3).unwrap()),
            ("k3n_4".into(), families::k3n(4).unwrap()),
            ("k3n_5".into(), families::k3n(5).unwrap()),
            ("fan".into(), families::pairwise_crossing_fan()),
            ("circ_k25".into(), families::circular_complete_bipartite(2, 5).unwrap()),
        ];
        for seed in [1, 2, 3, 7] {
            out.push((
                format!("random_circular_{seed}"),
                families::random_circular(9, 0.45, seed).unwrap(),
            ));
        }
        for seed in [1, 5] {
            out.push((
                format!("random_segments_{seed}"),
                families::random_segments(7, 11, seed).unwrap(),
            ));
        }
        out
    }

    fn model_for(
        d: &TopologicalDrawing,
    ) -> (ColouredPlanarisation, StarForestCover, CplModel) {
        let (tc, cover) = product_transparent(d);
        let cp = coloured_planarisation(d, &tc).unwrap();
        let model = cpl_model(&cp, &cover).unwrap();
        (cp, cover, model)
    }

    #[test]
    fn models_validate_on_families() {
        for (name, d) in small_instances() {
            let (cp, cover, model) = model_for(&d);
            assert!(validate_cover(&d, &product_transparent(&d).0, &cover).ok, "{name}");
            assert!(validate_model(&cp.base, &model.host, &model.mu).ok, "{name}");
            assert!(check_branch_sets_on_walks(&model, &cp).ok, "{name}");
            // (v, 1) always sits in the branch set of v
            for v in 0..cp.base.n() {
                assert!(model.mu.branch_sets[v].contains(&(v * model.t)), "{name}: vertex {v}");
                assert_eq!(model.lambda(v, v), Some(1), "{name}");
            }
        }
    }

    #[test]
    fn models_validate_with_greedy_refinement() {
        for (name, d) in small_instances() {
            let tc = greedy_transparent(&d);
            let cover = refine_to_cover(d.base(), &tc).unwrap();
            assert!(validate_cover(&d, &tc, &cover).ok, "{name}");
            let cp = coloured_planarisation(&d, &tc).unwrap();
            let model = cpl_model(&cp, &cover).unwrap();
            assert!(validate_model(&cp.base, &model.host, &model.mu).ok, "{name}");
            assert!(check_branch_sets_on_walks(&model, &cp).ok, "{name}");
        }
    }

    #[test]
    fn planar_input_collapses_to_identity_model() {
        let d = families::grid_apex(3).unwrap();
        let keep: Vec<usize> = (0..2 * 3 * (3 - 1)).collect();
        let (grid_only, _) = d.restrict_to_edges(&keep).unwrap();
        assert_eq!(grid_only.crossing_count(), 0);
        let (cp, _, model) = model_for(&grid_only);
        assert_eq!(model.t, 1);
        assert_eq!(model.host.n(), cp.gphi.n());
        assert_eq!(model.host.m(), cp.gphi.m());
        for v in 0..cp.base.n() {
            assert_eq!(model.mu.branch_sets[v], vec![v]);
        }
    }

    #[test]
    fn cover_mismatch_is_rejected() {
        let d = families::k3n(4).unwrap();
        let (tc, _) = product_transparent(&d);
        let other = greedy_transparent(&d);
        let cover = refine_to_cover(d.base(), &other).unwrap();
        let cp = coloured_planarisation(&d, &tc).unwrap();
        if tc.colours != other.colours {
            assert!(matches!(cpl_model(&cp, &cover), Err(Error::CoverMismatch { .. })));
        }
    }

    #[test]
    fn distance_bound_formula() {
        assert_eq!(distance_bound(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(distance_bound(1, 7).unwrap(), BigUint::from(1u32));
        assert_eq!(distance_bound(2, 1).unwrap(), BigUint::from(5u32));
        assert_eq!(distance_bound(3, 2).unwrap(), BigUint::from(41u32));
        assert_eq!(distance_bound(4, 3).unwrap(), BigUint::from(517u32));
        assert!(matches!(distance_bound(2, 0), Err(Error::KZero)));
        // recurrence h(i) = 2k(h(i-1) + 1) + 1 agrees with the closed form
        for c in 1..=6 {
            for k in 1..=4 {
                let h = distance_bound(c, k).unwrap();
                if c > 1 {
                    let prev = distance_bound(c - 1, k).unwrap();
                    assert_eq!(h, BigUint::from(2 * k) * (prev + 1u32) + 1u32);
                }
            }
        }
    }

    #[test]
    fn distances_stay_under_h_c() {
        for (name, d) in small_instances() {
            let (cp, _, _) = model_for(&d);
            let k = measure_k_lower(&cp);
            let report = distance_check(&cp, k);
            assert!(report.pass, "{name}: {} > {}", report.max_observed, report.bound);
            assert_eq!(report.k_zero, k == 0, "{name}");
        }
    }

    #[test]
    fn weak_shallow_models_verify() {
        for (name, d) in small_instances() {
            let (cp, _, model) = model_for(&d);
            let wsm = weak_shallow_from_cpl(&model, &cp).unwrap();
            assert!(wsm.measured_max <= wsm.r, "{name}");
            if measure_k_lower(&cp) == 0 {
                assert_eq!(wsm.r, 0, "{name}");
            }
            // minimal weak radius (any origin) can only be smaller
            for set in wsm.mu.branch_sets.iter().take(4) {
                let (r_min, _) = weak_radius(&model.host, set).unwrap();
                assert!(r_min <= wsm.r, "{name}");
            }
        }
    }

    #[test]
    fn transfer_with_zero_radius_keeps_host_width() {
        // identity model of a grid in itself: r = 0, blocks of one layer
        let g = Graph::grid(3, 3);
        let (_, td) = exact_treewidth(&g, DEFAULT_TW_CAP).unwrap();
        let ld = LayeredDecomposition {
            td,
            layering: crate::treewidth::bfs_layering(&g, 0).unwrap(),
        };
        let wsm = WeakShallowModel {
            mu: MinorModel { branch_sets: (0..g.n()).map(|v| vec![v]).collect() },
            r: 0,
            origins: (0..g.n()).collect(),
            measured_max: 0,
        };
        let out = ltw_transfer(&g, &g, &ld, &wsm).unwrap();
        assert_eq!(out.layered_width(g.n()), ld.layered_width(g.n()));
    }

    #[test]
    fn transfer_rejects_foreign_hosts() {
        let g = Graph::path(4);
        let host = Graph::path(3);
        let (_, td) = exact_treewidth(&host, DEFAULT_TW_CAP).unwrap();
        let ld = LayeredDecomposition {
            td,
            layering: crate::treewidth::bfs_layering(&host, 0).unwrap(),
        };
        let wsm = WeakShallowModel {
            mu: MinorModel { branch_sets: (0..g.n()).map(|v| vec![v]).collect() },
            r: 0,
            origins: (0..g.n()).collect(),
            measured_max: 0,
        };
        assert!(matches!(
            ltw_transfer(&g, &host, &ld, &wsm),
            Err(Error::ModelHostMismatch(_))
        ));
    }

    #[test]
    fn circular_k25_matches_worked_example() {
        let d = families::circular_complete_bipartite(2, 5).unwrap();
        // edges at the first part vertex get colour 1, at the second colour 2
        let g = d.base();
        let colours = (0..d.m())
            .map(|e| {
                let (u, v) = g.endpoints(e);
                (e, if u == 0 || v == 0 { 1 } else { 2 })
            })
            .collect();
        let tc = TransparentColouring { colours, c: 2, ordered: true };
        let rep = circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, "k25").unwrap();
        assert_eq!(rep.params["m"], "1");
        assert_eq!(rep.params["c"], "2");
        assert_eq!(rep.params["worst_case_bound"], "23");
        assert_eq!(rep.params["tw_exact"], "2");
        assert!(rep.all_pass(), "{:?}", rep.failed());
    }

    #[test]
    fn circular_planar_collapses() {
        let d = circular_drawing(6, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        assert_eq!(d.crossing_count(), 0);
        let tc = greedy_transparent(&d);
        let rep = circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, "planar").unwrap();
        assert_eq!(rep.params["m"], "0");
        assert_eq!(rep.params["worst_case_bound"], (3 * tc.c - 1).to_string());
        assert!(rep.all_pass(), "{:?}", rep.failed());
    }

    #[test]
    fn circular_bound_requires_circular_input() {
        let d = families::crossing_stars(2).unwrap();
        let tc = greedy_transparent(&d);
        assert!(matches!(
            circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, "x"),
            Err(Error::NotCircular)
        ));
    }

    #[test]
    fn circular_random_instances_pass() {
        for seed in 0..12 {
            let d = families::random_circular(10, 0.4, seed).unwrap();
            let tc = greedy_transparent(&d);
            let rep =
                circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, &format!("seed{seed}")).unwrap();
            assert!(rep.all_pass(), "seed {seed}: {:?}", rep.failed());
        }
    }

    #[test]
    fn radius_bound_on_grid_apex() {
        let n = 3;
        let d = families::grid_apex(n).unwrap();
        let g = d.base();
        let apex = n * n;
        // grid edges colour 1, apex edges colour 2
        let colours = (0..d.m())
            .map(|e| {
                let (u, v) = g.endpoints(e);
                (e, if u == apex || v == apex { 2 } else { 1 })
            })
            .collect();
        let tc = TransparentColouring { colours, c: 2, ordered: true };
        // spanning star at the apex
        let mut star = Graph::new(g.n());
        for v in 0..apex {
            star.add_edge(apex, v).unwrap();
        }
        let tree = RootedTree::new(star, apex).unwrap();
        assert_eq!(tree.radius(), 1);
        let rep = radius_tw_bound(&d, &tc, &tree, DEFAULT_TW_CAP, "grid_apex").unwrap();
        assert_eq!(rep.params["tw_exact"], (n + 1).to_string());
        assert!(rep.all_pass(), "{:?}", rep.failed());
    }

    #[test]
    fn radius_bound_rejects_non_spanning_trees() {
        let d = families::k3n(4).unwrap();
        let tc = greedy_transparent(&d);
        let tree = RootedTree::new(Graph::path(3), 0).unwrap();
        assert!(matches!(
            radius_tw_bound(&d, &tc, &tree, DEFAULT_TW_CAP, "x"),
            Err(Error::NotSpanning(_))
        ));
        // spanning vertex count but a non-edge in the tree
        let g = d.base();
        let mut bad = Graph::new(g.n());
        let mut prev = 0;
        for v in 1..g.n() {
            bad.add_edge(prev, v).unwrap();
            prev = v;
        }
        let tree = RootedTree::new(bad, 0).unwrap();
        if tree.tree.edges().iter().any(|&(u, v)| g.edge_id(u, v).is_none()) {
            assert!(matches!(
                radius_tw_bound(&d, &tc, &tree, DEFAULT_TW_CAP, "x"),
                Err(Error::NotSpanning(_))
            ));
        }
    }

    #[test]
    fn radius_bound_planar_collapse() {
        use crate::drawing::{from_polylines, GeometricInput};
        use crate::geometry::Point;
        let coords = vec![
            Point::of_ints(0, 0),
            Point::of_ints(1, 0),
            Point::of_ints(1, 1),
            Point::of_ints(0, 1),
        ];
        let square = from_polylines(&GeometricInput::straight(
            coords,
            vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        ))
        .unwrap();
        assert_eq!(square.crossing_count(), 0);
        let tc = greedy_transparent(&square);
        let mut tree = Graph::new(4);
        tree.add_edge(0, 1).unwrap();
        tree.add_edge(0, 3).unwrap();
        tree.add_edge(1, 2).unwrap();
        let tree = RootedTree::new(tree, 0).unwrap();
        let rep = radius_tw_bound(&square, &tc, &tree, DEFAULT_TW_CAP, "planar").unwrap();
        assert_eq!(rep.params["m"], "0");
        assert!(rep.all_pass(), "{:?}", rep.failed());
    }

    #[test]
    fn pipeline_produces_valid_certificates() {
        let mut ran = 0;
        for (name, d) in small_instances() {
            // the exact DP runs on G^phi, so stay under its hard limit
            let nphi = {
                let (tc, _) = product_transparent(&d);
                coloured_planarisation(&d, &tc).unwrap().gphi.n()
            };
            if nphi > 24 {
                continue;
            }
            let (rep, ld) = pipeline_report(&d, 24, &name).unwrap();
            assert!(rep.all_pass(), "{name}: {:?}", rep.failed());
            let width: usize = rep.params["ltw_certificate_width"].parse().unwrap();
            assert_eq!(width, ld.layered_width(d.base().n()), "{name}");
            ran += 1;
        }
        assert!(ran >= 4, "only {ran} instances fit the treewidth cap");
    }

    #[test]
    fn pipeline_planar_matches_host_width() {
        let d = families::grid_apex(3).unwrap();
        let keep: Vec<usize> = (0..2 * 3 * (3 - 1)).collect();
        let (grid_only, _) = d.restrict_to_edges(&keep).unwrap();
        let (rep, _) = pipeline_report(&grid_only, DEFAULT_TW_CAP, "grid").unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failed());
        assert_eq!(rep.params["ltw_certificate_width"], rep.params["host_layered_width"]);
        assert_eq!(rep.params["r"], "0");
        assert_eq!(rep.params["t"], "1");
    }

    #[test]
    fn closed_forms_evaluate_and_go_symbolic() {
        let r5 = BigUint::from(5u32);
        let t6 = BigUint::from(6u32);
        assert_eq!(ltw_closed_form(&r5, &t6), BigUint::from(3u32 * 6 * 21));
        let rtw = rtw_closed_form(&r5, &t6);
        assert!(rtw.chars().all(|c| c.is_ascii_digit()));
        // at r = 0, t = 1 the form reads (2 + 3) * 7^6 - 1, minus the outer 1
        let small = rtw_closed_form(&BigUint::from(0u32), &BigUint::from(1u32));
        let expected =
            (BigUint::from(5u32) * BigUint::from(7u32).pow(6) - 1u32 - 1u32).to_string();
        assert_eq!(small, expected);
        let big = rtw_closed_form(&BigUint::from(517u32), &t6);
        assert!(big.contains("7^(30*517+6)"), "{big}");
        assert_eq!(davies_colour_count(0), None);
        assert_eq!(davies_colour_count(1), Some(24.0));
    }

    #[test]
    fn reports_serialise_deterministically() {
        let d = families::circular_complete_bipartite(2, 4).unwrap();
        let tc = greedy_transparent(&d);
        let a = circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, "k24").unwrap().to_json();
        let b = circular_tw_bound(&d, &tc, DEFAULT_TW_CAP, "k24").unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"instance\": \"k24\""));
    }
}
