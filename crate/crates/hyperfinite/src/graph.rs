//! Simple undirected graphs with an explicit degree bound.
//!
//! Vertices are `0..n`. Adjacency lists are kept sorted, so membership
//! tests are binary searches and iteration order is deterministic. The
//! degree bound `M` travels with the graph: it is a promise about the
//! family the graph was drawn from, not just the observed max degree.

use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    degree_bound: u32,
}

impl Graph {
    /// Build a graph from an edge list. No self-loops, no duplicate
    /// edges, all degrees within `degree_bound` (defaults to the
    /// observed maximum degree, or 1 for edgeless graphs).
    pub fn new(n: usize, edges: &[(u32, u32)], degree_bound: Option<u32>) -> Result<Graph> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { v: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                let dup = nbrs.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                let (a, b) = (v as u32, dup);
                return Err(Error::DuplicateEdge { u: a.min(b), v: a.max(b) });
            }
        }
        let observed = adjacency.iter().map(Vec::len).max().unwrap_or(0) as u32;
        let bound = degree_bound.unwrap_or(observed.max(1));
        if observed > bound {
            let v = adjacency.iter().position(|a| a.len() as u32 == observed).unwrap();
            return Err(Error::DegreeBound {
                v: v as u32,
                degree: observed as usize,
                bound,
            });
        }
        Ok(Graph { adjacency, degree_bound: bound })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The declared degree bound M.
    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency
            .get(u as usize)
            .is_some_and(|a| a.binary_search(&v).is_ok())
    }

    /// Edges as (min, max) pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            let u = u as u32;
            out.extend(nbrs.iter().copied().filter(|&v| u < v).map(|v| (u, v)));
        }
        out
    }

    /// BFS distances from `src`, capped at `radius` (`None` beyond).
    pub fn distances_within(&self, src: u32, radius: u32) -> Vec<Option<u32>> {
        self.multi_source_distances(std::slice::from_ref(&src), radius)
    }

    /// BFS distances from a set of sources, capped at `radius`.
    pub fn multi_source_distances(&self, sources: &[u32], radius: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut frontier: Vec<u32> = Vec::new();
        for &s in sources {
            if dist[s as usize].is_none() {
                dist[s as usize] = Some(0);
                frontier.push(s);
            }
        }
        let mut d = 0;
        while !frontier.is_empty() && d < radius {
            d += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in self.neighbors(u) {
                    if dist[w as usize].is_none() {
                        dist[w as usize] = Some(d);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut comp = vec![start];
            seen[start as usize] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Parse the plain text edge-list format: one "u v" pair per line,
    /// `#` starts a comment, and the optional headers `# M=<d>` /
    /// `# n=<count>` declare the degree bound and vertex count.
    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        let mut edges = Vec::new();
        let mut declared_m: Option<u32> = None;
        let mut declared_n: Option<usize> = None;
        let mut max_id: Option<u32> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let c = comment.trim();
                if let Some(v) = c.strip_prefix("M=") {
                    declared_m = Some(v.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad degree bound {v:?}"),
                    })?);
                } else if let Some(v) = c.strip_prefix("n=") {
                    declared_n = Some(v.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad vertex count {v:?}"),
                    })?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = (it.next(), it.next());
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected exactly two vertex ids".into(),
                });
            }
            match (a, b) {
                (Some(a), Some(b)) => {
                    let u: u32 = a.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad vertex id {a:?}"),
                    })?;
                    let v: u32 = b.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad vertex id {b:?}"),
                    })?;
                    max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
                    edges.push((u, v));
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected exactly two vertex ids".into(),
                    })
                }
            }
        }
        let n = match (declared_n, max_id) {
            (Some(n), _) => n,
            (None, Some(m)) => m as usize + 1,
            (None, None) => 0,
        };
        Graph::new(n, &edges, declared_m).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => domain(format!("invalid edge list: {other}")),
        })
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut s = format!(
            "# n={}\n# M={}\n",
            self.vertex_count(),
            self.degree_bound
        );
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn read_edge_list(path: &std::path::Path) -> Result<Graph> {
        Graph::from_edge_list_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_edge_list_string())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2), (0, 2)], None).unwrap()
    }

    #[test]
    fn basic_accessors() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree_bound(), 2);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(!g.has_edge(0, 0));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Graph::new(2, &[(0, 0)], None),
            Err(Error::SelfLoop { v: 0 })
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1), (1, 0)], None),
            Err(Error::DuplicateEdge { u: 0, v: 1 })
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 2)], None),
            Err(Error::VertexOutOfRange { v: 2, n: 2 })
        ));
        assert!(matches!(
            Graph::new(3, &[(0, 1), (0, 2)], Some(1)),
            Err(Error::DegreeBound { .. })
        ));
    }

    #[test]
    fn distances_and_components() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (3, 4)], None).unwrap();
        let d = g.distances_within(0, 10);
        assert_eq!(d[0], Some(0));
        assert_eq!(d[2], Some(2));
        assert_eq!(d[4], None);
        let capped = g.distances_within(0, 1);
        assert_eq!(capped[2], None);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (3, 4)], Some(4)).unwrap();
        let text = g.to_edge_list_string();
        let h = Graph::from_edge_list_str(&text).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn round_trip_keeps_isolated_vertices() {
        let g = Graph::new(4, &[(0, 1)], None).unwrap();
        let h = Graph::from_edge_list_str(&g.to_edge_list_string()).unwrap();
        assert_eq!(h.vertex_count(), 4);
    }

    #[test]
    fn parses_spec_format_without_headers() {
        let g = Graph::from_edge_list_str("# a comment\n0 1\n1 2\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree_bound(), 2);
        let with_m = Graph::from_edge_list_str("# M=5\n0 1\n").unwrap();
        assert_eq!(with_m.degree_bound(), 5);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Graph::from_edge_list_str("0 1\nx y\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = Graph::from_edge_list_str("0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
