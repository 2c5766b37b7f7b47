//! Deterministic graph families used as sources, targets, and fixtures.

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::KeyedRng;

/// Path on `n` vertices (n ≥ 1).
pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(domain("path needs at least one vertex"));
    }
    let edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
    Graph::new(n, &edges, Some(2))
}

/// Cycle on `n` vertices (n ≥ 3).
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(domain("cycle needs at least three vertices"));
    }
    let mut edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, n as u32 - 1));
    Graph::new(n, &edges, Some(2))
}

/// side×side torus grid: vertex (r, c) is id r·side + c, wrap-around in
/// both directions, 4-regular with 2·side² edges. Needs side ≥ 3, else
/// the wrap edges degenerate into loops or duplicates.
pub fn torus(side: usize) -> Result<Graph> {
    if side < 3 {
        return Err(domain("torus needs side >= 3 to stay a simple graph"));
    }
    let s = side as u32;
    let mut edges = Vec::with_capacity(2 * side * side);
    for r in 0..s {
        for c in 0..s {
            let v = r * s + c;
            edges.push((v, r * s + (c + 1) % s));
            edges.push((v, (r + 1) % s * s + c));
        }
    }
    Graph::new(side * side, &edges, Some(4))
}

/// Complete binary tree of the given depth (depth 0 = single root).
/// Vertex v has children 2v+1 and 2v+2.
pub fn binary_tree(depth: u32) -> Result<Graph> {
    if depth > 20 {
        return Err(domain("binary tree depth > 20 not supported"));
    }
    let n = (1usize << (depth + 1)) - 1;
    let edges: Vec<_> = (1..n as u32).map(|v| ((v - 1) / 2, v)).collect();
    Graph::new(n, &edges, Some(3))
}

/// Random d-regular graph via the configuration model with rejection:
/// pair stubs uniformly, reject pairings with loops or duplicate edges,
/// and retry with a fresh derived stream. Deterministic in `seed`.
pub fn random_regular(d: u32, n: usize, seed: u64) -> Result<Graph> {
    if d as usize >= n {
        return Err(domain("random_regular needs d < n"));
    }
    if (d as usize * n) % 2 != 0 {
        return Err(domain("random_regular needs d*n even"));
    }
    if d == 0 {
        return Graph::new(n, &[], Some(1));
    }
    let stubs_base: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, d as usize)).collect();
    for attempt in 0..10_000u64 {
        let mut stubs = stubs_base.clone();
        KeyedRng::new(seed, "config_model", &[attempt]).shuffle(&mut stubs);
        if let Some(edges) = pair_stubs(&stubs) {
            return Graph::new(n, &edges, Some(d));
        }
    }
    Err(domain("configuration model failed to produce a simple graph"))
}

fn pair_stubs(stubs: &[u32]) -> Option<Vec<(u32, u32)>> {
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            return None;
        }
        edges.push((u, v));
    }
    Some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_cycle_counts() {
        let p = path(7).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (7, 6));
        let c = cycle(6).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (6, 6));
        assert!(c.has_edge(0, 5));
        assert!(path(1).unwrap().edges().is_empty());
        assert!(cycle(2).is_err());
    }

    #[test]
    fn torus_is_4_regular_with_expected_counts() {
        let t = torus(4).unwrap();
        assert_eq!(t.vertex_count(), 16);
        assert_eq!(t.edge_count(), 32);
        assert!((0..16).all(|v| t.degree(v) == 4));
        assert!(t.has_edge(0, 3)); // row wrap
        assert!(t.has_edge(0, 12)); // column wrap
        assert!(torus(2).is_err());
    }

    #[test]
    fn binary_tree_counts() {
        let t = binary_tree(3).unwrap();
        assert_eq!(t.vertex_count(), 15);
        assert_eq!(t.edge_count(), 14);
        assert_eq!(t.degree(0), 2);
        assert!((0..15).all(|v| t.degree(v) <= 3));
    }

    #[test]
    fn random_regular_is_regular_simple_and_reproducible() {
        let g = random_regular(3, 20, 42).unwrap();
        assert!((0..20).all(|v| g.degree(v) == 3));
        let h = random_regular(3, 20, 42).unwrap();
        assert_eq!(g, h);
        let other = random_regular(3, 20, 43).unwrap();
        assert_ne!(g, other);
    }

    #[test]
    fn random_regular_rejects_bad_parameters() {
        assert!(random_regular(3, 5, 1).is_err()); // odd product
        assert!(random_regular(5, 5, 1).is_err()); // d >= n
    }

    #[test]
    fn random_regular_larger_instance() {
        let g = random_regular(4, 100, 7).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 4));
        assert_eq!(g.edge_count(), 200);
    }
}
