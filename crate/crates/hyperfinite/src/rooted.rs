//! Rooted and marked balls, and the local metric on rooted graphs.
//!
//! A ball is the subgraph *induced* on the vertices within a given
//! distance of the root (or of a marked set), so chords between shell
//! vertices are kept. Local vertex ids follow multi-source BFS discovery
//! order, which makes extraction deterministic and puts the root at
//! local id 0 (and a marked set at local ids 0..|K|).

use crate::canon::canonical_code_rooted;
use crate::error::{domain, Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug)]
pub struct RootedBall {
    pub graph: Graph,
    /// Local id of the root (always 0 for extracted balls).
    pub root: u32,
    pub radius: u32,
    /// Local id -> id in the host graph.
    pub original_ids: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct MarkedBall {
    pub graph: Graph,
    /// Local ids of the marked set (always 0..|K| for extracted balls).
    pub marked: Vec<u32>,
    pub radius: u32,
    /// Local id -> id in the host graph.
    pub original_ids: Vec<u32>,
}

/// Extract vertices within `radius` of the sorted source set, in BFS
/// discovery order, together with the induced adjacency.
fn extract(g: &Graph, sources: &[u32], radius: u32) -> (Vec<u32>, Vec<(u32, u32)>) {
    let mut local_of = vec![u32::MAX; g.vertex_count()];
    let mut order: Vec<u32> = Vec::new();
    for &s in sources {
        if local_of[s as usize] == u32::MAX {
            local_of[s as usize] = order.len() as u32;
            order.push(s);
        }
    }
    let mut level_start = 0;
    for _ in 0..radius {
        let level_end = order.len();
        if level_start == level_end {
            break;
        }
        for i in level_start..level_end {
            let u = order[i];
            for &w in g.neighbors(u) {
                if local_of[w as usize] == u32::MAX {
                    local_of[w as usize] = order.len() as u32;
                    order.push(w);
                }
            }
        }
        level_start = level_end;
    }
    let mut edges = Vec::new();
    for (lu, &u) in order.iter().enumerate() {
        for &w in g.neighbors(u) {
            let lw = local_of[w as usize];
            if lw != u32::MAX && (lu as u32) < lw {
                edges.push((lu as u32, lw));
            }
        }
    }
    (order, edges)
}

/// Ball of the given radius around `root`, as a rooted graph.
pub fn ball(g: &Graph, root: u32, radius: u32) -> Result<RootedBall> {
    if root as usize >= g.vertex_count() {
        return Err(Error::VertexOutOfRange { v: root, n: g.vertex_count() });
    }
    let (original_ids, edges) = extract(g, std::slice::from_ref(&root), radius);
    let graph = Graph::new(original_ids.len(), &edges, Some(g.degree_bound()))?;
    Ok(RootedBall { graph, root: 0, radius, original_ids })
}

/// Union of radius-`radius` balls around a nonempty connected vertex
/// set, with the set carried over as the marked vertices.
pub fn neighborhood_of_set(g: &Graph, set: &[u32], radius: u32) -> Result<MarkedBall> {
    if set.is_empty() {
        return Err(domain("marked set must be nonempty"));
    }
    let mut sorted: Vec<u32> = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(domain("marked set contains duplicate vertices"));
    }
    for &v in &sorted {
        if v as usize >= g.vertex_count() {
            return Err(Error::VertexOutOfRange { v, n: g.vertex_count() });
        }
    }
    if !is_connected_subset(g, &sorted) {
        return Err(domain("marked set must induce a connected subgraph"));
    }
    let (original_ids, edges) = extract(g, &sorted, radius);
    let graph = Graph::new(original_ids.len(), &edges, Some(g.degree_bound()))?;
    let marked = (0..sorted.len() as u32).collect();
    Ok(MarkedBall { graph, marked, radius, original_ids })
}

pub(crate) fn is_connected_subset(g: &Graph, sorted_set: &[u32]) -> bool {
    if sorted_set.is_empty() {
        return false;
    }
    let mut seen = vec![false; sorted_set.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &w in g.neighbors(sorted_set[i]) {
            if let Ok(j) = sorted_set.binary_search(&w) {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
    }
    count == sorted_set.len()
}

/// Distance between two rooted graphs in the local metric: 1/r where r
/// is the largest radius at which the rooted balls are isomorphic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootedDistance {
    /// The rooted components are isomorphic.
    Zero,
    /// Balls agree up to radius r and differ at r+1; the distance is
    /// 1/r, taken as +infinity when r = 0.
    Reciprocal(u32),
    /// Balls agree at every probed radius but neither component was
    /// exhausted: the distance is at most 1/r_max.
    AtMostReciprocal(u32),
}

impl RootedDistance {
    /// Numeric value; for `AtMostReciprocal(r)` this is the upper bound 1/r.
    pub fn value(&self) -> f64 {
        match *self {
            RootedDistance::Zero => 0.0,
            RootedDistance::Reciprocal(0) => f64::INFINITY,
            RootedDistance::Reciprocal(r) => 1.0 / r as f64,
            RootedDistance::AtMostReciprocal(r) => 1.0 / r as f64,
        }
    }
}

/// Compare `(g1, root1)` and `(g2, root2)` by growing balls radius by
/// radius up to `r_max`. Radius-0 balls always agree.
pub fn rooted_distance(
    g1: &Graph,
    root1: u32,
    g2: &Graph,
    root2: u32,
    r_max: u32,
) -> Result<RootedDistance> {
    for (g, o) in [(g1, root1), (g2, root2)] {
        if o as usize >= g.vertex_count() {
            return Err(Error::VertexOutOfRange { v: o, n: g.vertex_count() });
        }
    }
    let comp1 = component_size(g1, root1);
    let comp2 = component_size(g2, root2);
    for r in 0..=r_max {
        let b1 = ball(g1, root1, r)?;
        let b2 = ball(g2, root2, r)?;
        if canonical_code_rooted(&b1)? != canonical_code_rooted(&b2)? {
            // r >= 1 here: radius-0 balls are single vertices.
            return Ok(RootedDistance::Reciprocal(r - 1));
        }
        if b1.graph.vertex_count() == comp1 && b2.graph.vertex_count() == comp2 {
            return Ok(RootedDistance::Zero);
        }
    }
    Ok(RootedDistance::AtMostReciprocal(r_max))
}

fn component_size(g: &Graph, v: u32) -> usize {
    g.distances_within(v, u32::MAX)
        .iter()
        .filter(|d| d.is_some())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path};

    #[test]
    fn radius_zero_ball_is_single_vertex() {
        let g = cycle(6).unwrap();
        let b = ball(&g, 2, 0).unwrap();
        assert_eq!(b.graph.vertex_count(), 1);
        assert_eq!(b.graph.edge_count(), 0);
        assert_eq!(b.root, 0);
        assert_eq!(b.original_ids, vec![2]);
    }

    #[test]
    fn radius_one_ball_of_path_end_is_an_edge() {
        let g = path(3).unwrap(); // a - b - c
        let b = ball(&g, 0, 1).unwrap();
        assert_eq!(b.graph.vertex_count(), 2);
        assert_eq!(b.graph.edge_count(), 1);
    }

    #[test]
    fn radius_three_ball_covers_c6_with_its_cycle_edges() {
        let g = cycle(6).unwrap();
        let b = ball(&g, 4, 3).unwrap();
        assert_eq!(b.graph.vertex_count(), 6);
        assert_eq!(b.graph.edge_count(), 6); // induced: the wrap edge is kept
    }

    #[test]
    fn ball_keeps_chords_between_shells() {
        // Triangle plus a pendant: ball of radius 1 at the pendant's
        // neighbor contains the triangle edge between the two shell
        // vertices.
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 0), (0, 3)], None).unwrap();
        let b = ball(&g, 0, 1).unwrap();
        assert_eq!(b.graph.vertex_count(), 4);
        assert_eq!(b.graph.edge_count(), 4);
    }

    #[test]
    fn neighborhood_of_middle_three_of_path7() {
        let g = path(7).unwrap();
        let nb = neighborhood_of_set(&g, &[2, 3, 4], 1).unwrap();
        assert_eq!(nb.graph.vertex_count(), 5);
        assert_eq!(nb.graph.edge_count(), 4);
        assert_eq!(nb.marked, vec![0, 1, 2]);
        let mut originals = nb.original_ids.clone();
        originals.sort_unstable();
        assert_eq!(originals, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn neighborhood_of_singleton_matches_ball_vertex_set() {
        let g = cycle(8).unwrap();
        let nb = neighborhood_of_set(&g, &[3], 2).unwrap();
        let b = ball(&g, 3, 2).unwrap();
        let mut a = nb.original_ids.clone();
        let mut c = b.original_ids.clone();
        a.sort_unstable();
        c.sort_unstable();
        assert_eq!(a, c);
    }

    #[test]
    fn neighborhood_rejects_bad_sets() {
        let g = path(5).unwrap();
        assert!(neighborhood_of_set(&g, &[], 1).is_err());
        assert!(neighborhood_of_set(&g, &[0, 2], 1).is_err()); // disconnected
        assert!(neighborhood_of_set(&g, &[1, 1], 1).is_err());
        assert!(neighborhood_of_set(&g, &[9], 1).is_err());
    }

    #[test]
    fn distance_of_identical_rooted_graphs_is_zero() {
        let g = cycle(9).unwrap();
        assert_eq!(rooted_distance(&g, 1, &g, 5, 32).unwrap(), RootedDistance::Zero);
        let p = path(4).unwrap();
        assert_eq!(rooted_distance(&p, 0, &p, 3, 32).unwrap(), RootedDistance::Zero);
    }

    #[test]
    fn c5_vs_c6_distance_is_one() {
        let a = cycle(5).unwrap();
        let b = cycle(6).unwrap();
        let d = rooted_distance(&a, 0, &b, 0, 16).unwrap();
        assert_eq!(d, RootedDistance::Reciprocal(1));
        assert_eq!(d.value(), 1.0);
    }

    #[test]
    fn c100_vs_c200_distance_is_one_over_49() {
        let a = cycle(100).unwrap();
        let b = cycle(200).unwrap();
        let d = rooted_distance(&a, 17, &b, 90, 128).unwrap();
        assert_eq!(d, RootedDistance::Reciprocal(49));
        assert!((d.value() - 1.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn different_degree_roots_are_infinitely_far() {
        let p = path(2).unwrap();
        let q = path(1).unwrap();
        let d = rooted_distance(&p, 0, &q, 0, 8).unwrap();
        assert_eq!(d, RootedDistance::Reciprocal(0));
        assert_eq!(d.value(), f64::INFINITY);
    }

    #[test]
    fn unresolved_when_budget_too_small() {
        let a = cycle(100).unwrap();
        let b = cycle(200).unwrap();
        let d = rooted_distance(&a, 0, &b, 0, 10).unwrap();
        assert_eq!(d, RootedDistance::AtMostReciprocal(10));
    }

    #[test]
    fn distance_is_symmetric() {
        let a = cycle(5).unwrap();
        let b = path(9).unwrap();
        let d1 = rooted_distance(&a, 2, &b, 4, 16).unwrap();
        let d2 = rooted_distance(&b, 4, &a, 2, 16).unwrap();
        assert_eq!(d1, d2);
    }
}
