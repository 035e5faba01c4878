//! Built-in drawing families. Generators place vertices at explicit exact
//! coordinates, build the drawing through the same validation path as user
//! input, and assert the family's documented parameters on the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drawing::{
    self, drawing_profile, from_polylines, GeometricInput, TopologicalDrawing,
};
use crate::error::{Error, Result};
use crate::geometry::Point;

fn pt(x: i64, y: i64) -> Point {
    Point::of_ints(x, y)
}

/// Two n-leaf stars whose edge bundles cross completely: every a-edge
/// crosses every b-edge exactly once, so each edge has n crossings while
/// the crossers of any edge form a single fan.
pub fn crossing_stars(n: usize) -> Result<TopologicalDrawing> {
    if n == 0 {
        return Err(Error::BadParams("crossing_stars needs n >= 1".into()));
    }
    let mut coords = vec![pt(-1, 0)];
    coords.extend((1..=n as i64).map(|i| pt(2, i)));
    coords.push(pt(1, 0));
    coords.extend((1..=n as i64).map(|i| pt(-2, i)));
    let b = n + 1;
    let mut edges: Vec<(usize, usize)> = (1..=n).map(|i| (0, i)).collect();
    edges.extend((1..=n).map(|i| (b, b + i)));
    let d = from_polylines(&GeometricInput::straight(coords, edges))?;
    assert_eq!(d.crossing_count(), n * n);
    let p = drawing_profile(&d);
    assert_eq!((p.max_crossings_per_edge, p.matching_k, p.cover_k), (n, 1, 1));
    Ok(d)
}

/// K_{3,n} drawn with the three part vertices on the y-axis and the other
/// part on the x-axis: the edge bundle from the top vertex to y_j crosses
/// the middle bundle's edges to y_i exactly when i > j.
pub fn k3n(n: usize) -> Result<TopologicalDrawing> {
    if n == 0 {
        return Err(Error::BadParams("k3n needs n >= 1".into()));
    }
    let mut coords = vec![pt(0, 1), pt(0, -1), pt(0, 2)];
    coords.extend((1..=n as i64).map(|i| pt(i, 0)));
    let mut edges = Vec::with_capacity(3 * n);
    for x in 0..3 {
        for i in 1..=n {
            edges.push((x, 2 + i));
        }
    }
    let d = from_polylines(&GeometricInput::straight(coords, edges))?;
    assert_eq!(d.crossing_count(), n * (n - 1) / 2);
    let p = drawing_profile(&d);
    assert_eq!((p.matching_k, p.cover_k), (1, 1));
    Ok(d)
}

fn fan_heights(k: usize) -> Vec<Vec<i64>> {
    let lin: Vec<i64> = (1..=k as i64 + 1).collect();
    let pow2: Vec<i64> = (0..=k as u32).map(|i| 1i64 << i).collect();
    let pow3: Vec<i64> = (0..=k as u32).map(|i| 3i64.pow(i)).collect();
    let steep: Vec<i64> = (0..=k as u32).map(|i| 1i64 << (i * i).min(40)).collect();
    vec![lin, pow2, pow3, steep]
}

/// K_{2k+2,n} with k+1 part vertices stacked above the x-axis, k+1 mirrored
/// below, and the n-part on the axis. Every edge's crossers are covered by
/// the other k apexes on its side, so the drawing is k-cover-planar.
pub fn k_2k2_n(k: usize, n: usize) -> Result<TopologicalDrawing> {
    if n == 0 {
        return Err(Error::BadParams("k_2k2_n needs n >= 1".into()));
    }
    let mut last = None;
    for heights in fan_heights(k) {
        let mut coords: Vec<Point> = heights.iter().map(|&h| pt(0, h)).collect();
        coords.extend(heights.iter().map(|&h| pt(0, -h)));
        coords.extend((1..=n as i64).map(|j| pt(j, 0)));
        let axis = 2 * (k + 1);
        let mut edges = Vec::with_capacity(2 * (k + 1) * n);
        for x in 0..2 * (k + 1) {
            for j in 0..n {
                edges.push((x, axis + j));
            }
        }
        match from_polylines(&GeometricInput::straight(coords, edges)) {
            Ok(d) => {
                let p = drawing_profile(&d);
                assert!(p.cover_k <= k);
                if n > k {
                    assert_eq!((p.matching_k, p.cover_k), (k, k));
                }
                return Ok(d);
            }
            Err(e @ Error::DegeneratePosition { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Complete bipartite circular drawing: one a-part vertex at position 0,
/// the whole b-part next, then the remaining a-part vertices.
pub fn circular_complete_bipartite(a: usize, b: usize) -> Result<TopologicalDrawing> {
    if a == 0 || b == 0 {
        return Err(Error::BadParams("both parts need at least one vertex".into()));
    }
    let mut part_a = vec![0];
    part_a.extend(b + 1..a + b);
    let mut chords = Vec::with_capacity(a * b);
    for &u in &part_a {
        for w in 1..=b {
            chords.push((u, w));
        }
    }
    drawing::circular_drawing(a + b, &chords)
}

const APEX_CANDIDATES: &[(i64, i64, i64, i64)] =
    &[(-5, 7, -3, 11), (-13, 17, -19, 23), (-29, 31, -37, 41)];

/// n x n grid plus an apex joined to every grid vertex by a straight
/// segment from outside the grid's corner.
pub fn grid_apex(n: usize) -> Result<TopologicalDrawing> {
    if n < 2 {
        return Err(Error::BadParams("grid_apex needs n >= 2".into()));
    }
    let grid = crate::graph::Graph::grid(n, n);
    let mut last = None;
    for &(xn, xd, yn, yd) in APEX_CANDIDATES {
        let mut coords: Vec<Point> = (0..n * n)
            .map(|v| pt((v % n) as i64, (v / n) as i64))
            .collect();
        coords.push(Point::new(
            crate::geometry::rat(xn, xd),
            crate::geometry::rat(yn, yd),
        ));
        let apex = n * n;
        let mut edges = grid.edges().to_vec();
        edges.extend((0..n * n).map(|v| (v, apex)));
        match from_polylines(&GeometricInput::straight(coords, edges)) {
            Ok(d) => {
                assert_eq!(d.m(), 2 * n * (n - 1) + n * n);
                let grid_ids: Vec<usize> = (0..2 * n * (n - 1)).collect();
                let (grid_part, _) = d.restrict_to_edges(&grid_ids)?;
                assert_eq!(grid_part.crossing_count(), 0);
                return Ok(d);
            }
            Err(e @ Error::DegeneratePosition { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Random chord system on n circle vertices; each pair becomes a chord with
/// probability p. Chord triples that happen to pass through a common point
/// are resolved by dropping the highest offending chord.
pub fn random_circular(n: usize, p: f64, seed: u64) -> Result<TopologicalDrawing> {
    if n < 2 {
        return Err(Error::BadParams("random_circular needs n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams("probability must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chords = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                chords.push((u, v));
            }
        }
    }
    loop {
        match drawing::circular_drawing(n, &chords) {
            Ok(d) => return Ok(d),
            Err(Error::DegeneratePosition { ids, .. }) => {
                let drop = ids.into_iter().max().unwrap();
                chords.remove(drop);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Random straight-line drawing: n distinct integer points, m distinct
/// segments. Degenerate accidents are resolved by dropping the highest
/// offending edge, so the result can have fewer than m edges.
pub fn random_segments(n: usize, m: usize, seed: u64) -> Result<TopologicalDrawing> {
    if n < 2 {
        return Err(Error::BadParams("random_segments needs n >= 2".into()));
    }
    if m > n * (n - 1) / 2 {
        return Err(Error::BadParams(format!("at most {} edges on {n} vertices", n * (n - 1) / 2)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 10 * n as i64;
    'fresh: loop {
        let mut coords: Vec<Point> = Vec::new();
        while coords.len() < n {
            let p = pt(rng.gen_range(0..span), rng.gen_range(0..span));
            if !coords.contains(&p) {
                coords.push(p);
            }
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        while edges.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v));
            }
        }
        loop {
            match from_polylines(&GeometricInput::straight(coords.clone(), edges.clone())) {
                Ok(d) => return Ok(d),
                Err(Error::DegeneratePosition { ids, .. }) => {
                    let drop = ids.into_iter().max().unwrap();
                    if drop >= edges.len() {
                        continue 'fresh; // defect among the points themselves
                    }
                    edges.remove(drop);
                    if edges.is_empty() {
                        continue 'fresh;
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Three polyline edges at a shared vertex that pairwise cross: the fan
/// leaves in one vertical order and arrives in the opposite one.
pub fn pairwise_crossing_fan() -> TopologicalDrawing {
    let gi = GeometricInput {
        coords: vec![pt(0, 0), pt(10, 9), pt(10, 6), pt(10, 2)],
        edges: vec![(0, 1), (0, 2), (0, 3)],
        bends: vec![vec![pt(5, 1)], vec![pt(5, 2)], vec![pt(5, 3)]],
    };
    let d = from_polylines(&gi).expect("fixture is in general position");
    assert_eq!(d.crossing_count(), 3);
    d
}

/// Name-based dispatcher used by the command line.
pub fn gen_family(name: &str, params: &[String]) -> Result<TopologicalDrawing> {
    fn count(params: &[String], k: usize, name: &str) -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::BadParams(format!("{name} takes {k} parameter(s)")))
        }
    }
    fn int(s: &str) -> Result<usize> {
        s.parse().map_err(|_| Error::BadParams(format!("bad integer '{s}'")))
    }
    fn num(s: &str) -> Result<f64> {
        s.parse().map_err(|_| Error::BadParams(format!("bad number '{s}'")))
    }
    fn seed(s: &str) -> Result<u64> {
        s.parse().map_err(|_| Error::BadParams(format!("bad seed '{s}'")))
    }
    match name {
        "crossing_stars" => {
            count(params, 1, name)?;
            crossing_stars(int(&params[0])?)
        }
        "k3n" => {
            count(params, 1, name)?;
            k3n(int(&params[0])?)
        }
        "k2k2n" => {
            count(params, 2, name)?;
            k_2k2_n(int(&params[0])?, int(&params[1])?)
        }
        "circular_complete_bipartite" => {
            count(params, 2, name)?;
            circular_complete_bipartite(int(&params[0])?, int(&params[1])?)
        }
        "grid_apex" => {
            count(params, 1, name)?;
            grid_apex(int(&params[0])?)
        }
        "random_circular" => {
            count(params, 3, name)?;
            random_circular(int(&params[0])?, num(&params[1])?, seed(&params[2])?)
        }
        "random_segments" => {
            count(params, 3, name)?;
            random_segments(int(&params[0])?, int(&params[1])?, seed(&params[2])?)
        }
        _ => Err(Error::BadParams(format!("unknown family '{name}'"))),
    }
}

pub const FAMILY_NAMES: &[&str] = &[
    "crossing_stars",
    "k3n",
    "k2k2n",
    "circular_complete_bipartite",
    "grid_apex",
    "random_circular",
    "random_segments",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{crossing_graph, largest_crossing_fan};
    use crate::treewidth::exact_treewidth;

    #[test]
    fn crossing_stars_profile_and_crossing_graph() {
        for n in 2..=5 {
            let d = crossing_stars(n).unwrap();
            let x = crossing_graph(&d);
            assert_eq!(x.n(), 2 * n);
            assert_eq!(x.m(), n * n);
            // complete bipartite between the two bundles
            for e in 0..n {
                for f in n..2 * n {
                    assert!(x.has_edge(e, f));
                }
            }
        }
    }

    #[test]
    fn k3n_crossing_pattern_is_upper_triangular() {
        for n in 3..=8 {
            let d = k3n(n).unwrap();
            let mut want = std::collections::BTreeSet::new();
            for j in 1..=n {
                for i in j + 1..=n {
                    // top-bundle edge to y_j crosses middle-bundle edge to y_i
                    want.insert((i - 1, 2 * n + j - 1));
                }
            }
            let got: std::collections::BTreeSet<(usize, usize)> =
                d.pair_counts().keys().copied().collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn k_2k2_n_reaches_its_cover_bound() {
        for k in 0..=3 {
            let d = k_2k2_n(k, k + 2).unwrap();
            let p = drawing_profile(&d);
            assert_eq!((p.matching_k, p.cover_k), (k, k));
            if k == 0 {
                assert_eq!(d.crossing_count(), 0);
            }
        }
    }

    #[test]
    fn circular_bipartite_crossing_claim() {
        // order a, v1..v5, b: edge a-v5 crosses b-v1..b-v4
        let d = circular_complete_bipartite(2, 5).unwrap();
        let a_v5 = 4; // edges (0,1)..(0,5) then (6,1)..(6,5)
        let crossers = d.edges_crossing(a_v5);
        assert_eq!(crossers, vec![5, 6, 7, 8]);
        assert_eq!(d.crossing_count(), 10);
        assert!(circular_complete_bipartite(3, 4).is_ok());
    }

    #[test]
    fn grid_apex_has_planar_grid_and_right_treewidth() {
        for n in 2..=3 {
            let d = grid_apex(n).unwrap();
            let (tw, _) = exact_treewidth(d.base(), 20).unwrap();
            assert_eq!(tw, n + 1);
        }
    }

    #[test]
    fn random_families_are_deterministic() {
        let a = random_circular(10, 0.4, 7).unwrap();
        let b = random_circular(10, 0.4, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = random_segments(9, 12, 3).unwrap();
        let d = random_segments(9, 12, 3).unwrap();
        assert_eq!(c.to_json(), d.to_json());
        assert_ne!(
            random_circular(10, 0.4, 8).unwrap().to_json(),
            a.to_json()
        );
    }

    #[test]
    fn fan_fixture_has_three_pairwise_crossing_edges() {
        let d = pairwise_crossing_fan();
        assert_eq!(largest_crossing_fan(&d), 3);
        assert!(!drawing_profile(&d).simple);
    }

    #[test]
    fn dispatcher_parses_and_rejects() {
        assert!(gen_family("k3n", &["4".into()]).is_ok());
        assert!(matches!(
            gen_family("k3n", &[]),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            gen_family("no_such_family", &[]),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            gen_family("random_circular", &["10".into(), "2.0".into(), "1".into()]),
            Err(Error::BadParams(_))
        ));
    }
}
