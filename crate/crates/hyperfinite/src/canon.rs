//! Complete canonical codes for rooted and marked graphs.
//!
//! Two balls get equal codes exactly when an isomorphism maps one onto
//! the other carrying root to root (marked set to marked set). The code
//! is computed by ordered-partition color refinement seeded with the
//! invariant (distance to the distinguished set, degree), followed by
//! individualization backtracking; the code is the lexicographic
//! minimum of the serialized adjacency over all refinement leaves.
//! Every leaf is an actual labeling, the leaf set is isomorphism-
//! invariant, and the serialized form reconstructs the graph, so the
//! minimum is a complete invariant.
//!
//! The search prunes with discovered automorphisms: two leaves that
//! serialize identically exhibit an automorphism of the ball, and at
//! any branch node, individualizing two vertices related by an
//! automorphism that fixes the already-individualized prefix pointwise
//! yields subtrees with identical code sets, so one is skipped. This
//! keeps the minimum intact while collapsing the factorial blowup on
//! interchangeable branches (regular trees, repeated pendant
//! structures).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::rooted::{MarkedBall, RootedBall};

/// Default cap on canonicalizable ball size.
pub const DEFAULT_SIZE_LIMIT: usize = 512;

/// Backtracking safety valve; far beyond anything the supported graph
/// families produce, but keeps adversarial inputs from hanging.
const MAX_LEAVES: usize = 4_000_000;

const TAG_ROOTED: u8 = b'R';
const TAG_MARKED: u8 = b'K';

/// Byte string identifying a rooted/marked graph up to isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Box<[u8]>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<CanonicalCode> {
        let bytes = hex::decode(s).map_err(|e| domain(format!("bad code hex: {e}")))?;
        Ok(CanonicalCode(bytes.into_boxed_slice()))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub fn canonical_code_rooted(ball: &RootedBall) -> Result<CanonicalCode> {
    canonical_code_rooted_with_limit(ball, DEFAULT_SIZE_LIMIT)
}

pub fn canonical_code_rooted_with_limit(
    ball: &RootedBall,
    limit: usize,
) -> Result<CanonicalCode> {
    if ball.root as usize >= ball.graph.vertex_count() {
        return Err(Error::VertexOutOfRange {
            v: ball.root,
            n: ball.graph.vertex_count(),
        });
    }
    canonize(&ball.graph, &[ball.root], TAG_ROOTED, limit)
}

pub fn canonical_code_marked(ball: &MarkedBall) -> Result<CanonicalCode> {
    canonical_code_marked_with_limit(ball, DEFAULT_SIZE_LIMIT)
}

pub fn canonical_code_marked_with_limit(
    ball: &MarkedBall,
    limit: usize,
) -> Result<CanonicalCode> {
    if ball.marked.is_empty() {
        return Err(domain("marked set must be nonempty"));
    }
    let mut marked = ball.marked.clone();
    marked.sort_unstable();
    marked.dedup();
    if marked.len() != ball.marked.len() {
        return Err(domain("marked set contains duplicate vertices"));
    }
    for &v in &marked {
        if v as usize >= ball.graph.vertex_count() {
            return Err(Error::VertexOutOfRange {
                v,
                n: ball.graph.vertex_count(),
            });
        }
    }
    canonize(&ball.graph, &marked, TAG_MARKED, limit)
}

fn canonize(graph: &Graph, distinguished: &[u32], tag: u8, limit: usize) -> Result<CanonicalCode> {
    let n = graph.vertex_count();
    let limit = limit.min(u16::MAX as usize);
    if n > limit {
        return Err(Error::SizeLimit { size: n, limit });
    }

    // Initial invariant coloring: (distance to the distinguished set,
    // degree), cells ordered by that key. The distinguished vertices are
    // exactly the distance-0 cells, so they always occupy the first
    // canonical indices.
    let dist = graph.multi_source_distances(distinguished, u32::MAX);
    let mut groups: BTreeMap<(u32, usize), Vec<u32>> = BTreeMap::new();
    for v in 0..n as u32 {
        let d = dist[v as usize].unwrap_or(u32::MAX);
        groups.entry((d, graph.degree(v))).or_default().push(v);
    }
    let cells: Vec<Vec<u32>> = groups.into_values().collect();

    let mut ctx = Search {
        graph,
        tag,
        marked_count: distinguished.len() as u16,
        best: None,
        best_labeling: Vec::new(),
        generators: Vec::new(),
        prefix: Vec::new(),
        leaves: 0,
    };
    ctx.explore(cells)?;
    Ok(CanonicalCode(ctx.best.unwrap().into_boxed_slice()))
}

struct Search<'a> {
    graph: &'a Graph,
    tag: u8,
    marked_count: u16,
    best: Option<Vec<u8>>,
    /// Vertex -> canonical index of the leaf that produced `best`.
    best_labeling: Vec<u16>,
    /// Automorphisms of the ball discovered from pairs of leaves with
    /// equal serializations (vertex -> vertex).
    generators: Vec<Vec<u32>>,
    /// Vertices individualized along the current search path.
    prefix: Vec<u32>,
    leaves: usize,
}

impl Search<'_> {
    fn explore(&mut self, mut cells: Vec<Vec<u32>>) -> Result<()> {
        refine(self.graph, &mut cells);
        match cells.iter().position(|c| c.len() > 1) {
            None => self.record_leaf(&cells),
            Some(i) => {
                // Individualize each vertex of the first non-singleton
                // cell in turn; trying all of them keeps the leaf set
                // an isomorphism invariant. Members in one orbit of an
                // automorphism fixing the prefix pointwise generate
                // subtrees with identical code sets, so only the first
                // of each orbit is explored.
                let target = std::mem::take(&mut cells[i]);
                let mut tried: Vec<u32> = Vec::new();
                for &v in &target {
                    if self.known_equivalent(v, &tried) {
                        continue;
                    }
                    let mut child = cells.clone();
                    child[i] = vec![v];
                    let rest: Vec<u32> = target.iter().copied().filter(|&w| w != v).collect();
                    child.insert(i + 1, rest);
                    self.prefix.push(v);
                    let outcome = self.explore(child);
                    self.prefix.pop();
                    outcome?;
                    tried.push(v);
                }
                Ok(())
            }
        }
    }

    /// Serialize the finished labeling, keep it if minimal, and mine an
    /// automorphism when it ties the current minimum.
    fn record_leaf(&mut self, cells: &[Vec<u32>]) -> Result<()> {
        self.leaves += 1;
        if self.leaves > MAX_LEAVES {
            return Err(Error::InstanceTooLarge {
                op: "canonical_code",
                detail: format!("more than {MAX_LEAVES} refinement leaves"),
            });
        }
        let n = self.graph.vertex_count();
        let mut canon_of = vec![0u16; n];
        for (idx, cell) in cells.iter().enumerate() {
            canon_of[cell[0] as usize] = idx as u16;
        }
        let code = self.serialize(&canon_of);
        let ordering = self.best.as_ref().map(|b| code.cmp(b));
        match ordering {
            Some(std::cmp::Ordering::Equal) => {
                // Equal serializations: mapping each vertex through
                // this labeling and back through the best one is an
                // automorphism carrying the distinguished set to
                // itself.
                let mut best_inv = vec![0u32; n];
                for v in 0..n {
                    best_inv[self.best_labeling[v] as usize] = v as u32;
                }
                let perm: Vec<u32> =
                    (0..n).map(|v| best_inv[canon_of[v] as usize]).collect();
                if perm.iter().enumerate().any(|(v, &p)| p != v as u32) {
                    self.generators.push(perm);
                }
            }
            Some(std::cmp::Ordering::Less) | None => {
                self.best = Some(code);
                self.best_labeling = canon_of;
            }
            Some(std::cmp::Ordering::Greater) => {}
        }
        Ok(())
    }

    /// Is `v` in the orbit of an already-tried sibling under the
    /// subgroup of discovered automorphisms fixing the prefix?
    fn known_equivalent(&self, v: u32, tried: &[u32]) -> bool {
        if tried.is_empty() || self.generators.is_empty() {
            return false;
        }
        let n = self.graph.vertex_count();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut any = false;
        for g in &self.generators {
            if self.prefix.iter().any(|&p| g[p as usize] != p) {
                continue;
            }
            any = true;
            for u in 0..n as u32 {
                let (a, b) = (find(&mut parent, u), find(&mut parent, g[u as usize]));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&w| find(&mut parent, w) == rv)
    }

    /// Serialize a complete labeling: header (tag, n, marked count),
    /// then the edge pairs under the canonical labeling, sorted.
    fn serialize(&self, canon_of: &[u16]) -> Vec<u8> {
        let n = self.graph.vertex_count();
        let mut edges: Vec<(u16, u16)> = Vec::with_capacity(self.graph.edge_count());
        for (u, v) in self.graph.edges() {
            let (a, b) = (canon_of[u as usize], canon_of[v as usize]);
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        let mut out = Vec::with_capacity(5 + 4 * edges.len());
        out.push(self.tag);
        out.extend_from_slice(&(n as u16).to_be_bytes());
        out.extend_from_slice(&self.marked_count.to_be_bytes());
        for (a, b) in edges {
            out.extend_from_slice(&a.to_be_bytes());
            out.extend_from_slice(&b.to_be_bytes());
        }
        out
    }
}

/// Iterated equitable refinement of an ordered partition. Each pass
/// splits every cell by the multiset of neighbor colors (computed
/// against the coloring at the start of the pass); split parts replace
/// their parent in signature order, so the cell order stays an
/// isomorphism invariant.
fn refine(graph: &Graph, cells: &mut Vec<Vec<u32>>) {
    let n = graph.vertex_count();
    let mut color = vec![0u32; n];
    loop {
        for (idx, cell) in cells.iter().enumerate() {
            for &v in cell {
                color[v as usize] = idx as u32;
            }
        }
        let mut next: Vec<Vec<u32>> = Vec::with_capacity(cells.len());
        let mut changed = false;
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut by_sig: BTreeMap<Vec<(u32, u32)>, Vec<u32>> = BTreeMap::new();
            for &v in cell {
                let mut nbr_colors: Vec<u32> = graph
                    .neighbors(v)
                    .iter()
                    .map(|&w| color[w as usize])
                    .collect();
                nbr_colors.sort_unstable();
                let mut sig: Vec<(u32, u32)> = Vec::new();
                for c in nbr_colors {
                    match sig.last_mut() {
                        Some(last) if last.0 == c => last.1 += 1,
                        _ => sig.push((c, 1)),
                    }
                }
                by_sig.entry(sig).or_default().push(v);
            }
            if by_sig.len() > 1 {
                changed = true;
            }
            next.extend(by_sig.into_values());
        }
        *cells = next;
        if !changed {
            return;
        }
    }
}

/// Memoizes codes by the raw local structure of extracted balls. Two
/// extractions with identical local adjacency (common when patterns
/// repeat across a transitive graph) share one canonicalization; misses
/// are merely slower, never wrong.
pub struct CodeCache {
    map: HashMap<Vec<u32>, CanonicalCode>,
    capacity: usize,
    pub hits: u64,
    pub misses: u64,
}

impl Default for CodeCache {
    fn default() -> Self {
        CodeCache::new()
    }
}

impl CodeCache {
    pub fn new() -> Self {
        CodeCache {
            map: HashMap::new(),
            capacity: 1 << 20,
            hits: 0,
            misses: 0,
        }
    }

    pub fn rooted(&mut self, ball: &RootedBall) -> Result<CanonicalCode> {
        let key = Self::key(TAG_ROOTED, &ball.graph, std::slice::from_ref(&ball.root));
        if let Some(code) = self.map.get(&key) {
            self.hits += 1;
            return Ok(code.clone());
        }
        self.misses += 1;
        let code = canonical_code_rooted(ball)?;
        if self.map.len() < self.capacity {
            self.map.insert(key, code.clone());
        }
        Ok(code)
    }

    pub fn marked(&mut self, ball: &MarkedBall) -> Result<CanonicalCode> {
        let key = Self::key(TAG_MARKED, &ball.graph, &ball.marked);
        if let Some(code) = self.map.get(&key) {
            self.hits += 1;
            return Ok(code.clone());
        }
        self.misses += 1;
        let code = canonical_code_marked(ball)?;
        if self.map.len() < self.capacity {
            self.map.insert(key, code.clone());
        }
        Ok(code)
    }

    fn key(tag: u8, graph: &Graph, marked: &[u32]) -> Vec<u32> {
        let n = graph.vertex_count();
        let mut key = Vec::with_capacity(3 + marked.len() + n + 2 * graph.edge_count());
        key.push(tag as u32);
        key.push(n as u32);
        key.push(marked.len() as u32);
        key.extend_from_slice(marked);
        for v in 0..n as u32 {
            let nbrs = graph.neighbors(v);
            key.push(nbrs.len() as u32);
            key.extend_from_slice(nbrs);
        }
        key
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path};
    use crate::rooted::{ball, neighborhood_of_set};
    use proptest::prelude::*;

    fn rooted(graph: Graph, root: u32) -> RootedBall {
        let n = graph.vertex_count() as u32;
        RootedBall {
            graph,
            root,
            radius: u32::MAX,
            original_ids: (0..n).collect(),
        }
    }

    #[test]
    fn single_vertices_share_a_code() {
        let a = canonical_code_rooted(&ball(&path(5).unwrap(), 2, 0).unwrap()).unwrap();
        let b = canonical_code_rooted(&ball(&cycle(9).unwrap(), 0, 0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn root_position_matters() {
        let g = path(3).unwrap();
        let end = canonical_code_rooted(&rooted(g.clone(), 0)).unwrap();
        let center = canonical_code_rooted(&rooted(g.clone(), 1)).unwrap();
        let other_end = canonical_code_rooted(&rooted(g, 2)).unwrap();
        assert_ne!(end, center);
        assert_eq!(end, other_end);
    }

    #[test]
    fn distinguishes_near_twins() {
        // Star with three leaves vs path of four, rooted at a leaf /
        // end: same size, same degree sequence seen from distance 1.
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap();
        let p4 = path(4).unwrap();
        let a = canonical_code_rooted(&rooted(star, 1)).unwrap();
        let b = canonical_code_rooted(&rooted(p4, 0)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn code_does_not_depend_on_declared_radius() {
        let g = cycle(6).unwrap();
        let b3 = ball(&g, 0, 3).unwrap();
        let b9 = ball(&g, 0, 9).unwrap();
        assert_eq!(
            canonical_code_rooted(&b3).unwrap(),
            canonical_code_rooted(&b9).unwrap()
        );
    }

    #[test]
    fn marked_codes_distinguish_orbit_position() {
        let g = path(3).unwrap();
        let end = neighborhood_of_set(&g, &[0], 2).unwrap();
        let mid = neighborhood_of_set(&g, &[1], 2).unwrap();
        assert_ne!(
            canonical_code_marked(&end).unwrap(),
            canonical_code_marked(&mid).unwrap()
        );
        let left = neighborhood_of_set(&g, &[0, 1], 2).unwrap();
        let right = neighborhood_of_set(&g, &[1, 2], 2).unwrap();
        assert_eq!(
            canonical_code_marked(&left).unwrap(),
            canonical_code_marked(&right).unwrap()
        );
    }

    #[test]
    fn rooted_and_marked_singleton_codes_are_distinct_namespaces() {
        let g = cycle(5).unwrap();
        let r = canonical_code_rooted(&ball(&g, 0, 2).unwrap()).unwrap();
        let m = canonical_code_marked(&neighborhood_of_set(&g, &[0], 2).unwrap()).unwrap();
        assert_ne!(r, m);
    }

    #[test]
    fn size_limit_is_enforced() {
        let g = cycle(40).unwrap();
        let b = ball(&g, 0, 20).unwrap();
        assert!(matches!(
            canonical_code_rooted_with_limit(&b, 16),
            Err(Error::SizeLimit { size: 40, limit: 16 })
        ));
        assert!(canonical_code_rooted_with_limit(&b, 40).is_ok());
    }

    #[test]
    fn complete_graph_roots_canonicalize() {
        // Fully symmetric instance: exercises the backtracking search.
        let mut edges = Vec::new();
        for u in 0..8u32 {
            for v in u + 1..8 {
                edges.push((u, v));
            }
        }
        let k8 = Graph::new(8, &edges, None).unwrap();
        let c = canonical_code_rooted(&rooted(k8.clone(), 3)).unwrap();
        let d = canonical_code_rooted(&rooted(k8, 6)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn hex_round_trip() {
        let g = path(4).unwrap();
        let code = canonical_code_rooted(&rooted(g, 1)).unwrap();
        let back = CanonicalCode::from_hex(&code.to_hex()).unwrap();
        assert_eq!(code, back);
    }

    #[test]
    fn cache_agrees_with_direct_computation() {
        let g = cycle(12).unwrap();
        let mut cache = CodeCache::new();
        for v in 0..12 {
            let b = ball(&g, v, 3).unwrap();
            assert_eq!(cache.rooted(&b).unwrap(), canonical_code_rooted(&b).unwrap());
        }
        assert!(cache.hits > 0);
    }

    fn permuted(g: &Graph, perm: &[u32]) -> Graph {
        let edges: Vec<(u32, u32)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        Graph::new(g.vertex_count(), &edges, Some(g.degree_bound())).unwrap()
    }

    proptest! {
        #[test]
        fn codes_are_relabeling_invariant(
            n in 2usize..9,
            edge_bits in proptest::collection::vec(any::<bool>(), 36),
            root_pick in any::<u32>(),
            perm_seed in any::<u64>(),
        ) {
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if edge_bits[idx % edge_bits.len()] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            let g = Graph::new(n, &edges, None).unwrap();
            let root = root_pick % n as u32;
            let mut perm: Vec<u32> = (0..n as u32).collect();
            crate::rng::KeyedRng::new(perm_seed, "perm", &[]).shuffle(&mut perm);
            let h = permuted(&g, &perm);
            let a = canonical_code_rooted(&rooted(g, root)).unwrap();
            let b = canonical_code_rooted(&rooted(h, perm[root as usize])).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn marked_codes_are_relabeling_invariant(
            seed in any::<u64>(),
        ) {
            // Random connected graph on 7 vertices via a random spanning
            // tree plus random extra edges, random connected marked set.
            let mut rng = crate::rng::KeyedRng::new(seed, "mk", &[]);
            let n = 7u32;
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.next_below(v as u64) as u32, v));
            }
            for _ in 0..4 {
                let u = rng.next_below(n as u64) as u32;
                let v = rng.next_below(n as u64) as u32;
                if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                    edges.push((u.min(v), u.max(v)));
                }
            }
            let g = Graph::new(n as usize, &edges, None).unwrap();
            // Connected marked set: a vertex plus some of its neighbors.
            let anchor = rng.next_below(n as u64) as u32;
            let mut marked = vec![anchor];
            if let Some(&first) = g.neighbors(anchor).first() {
                marked.push(first);
            }
            marked.sort_unstable();
            let mb = neighborhood_of_set(&g, &marked, 2).unwrap();

            let mut perm: Vec<u32> = (0..n).collect();
            rng.shuffle(&mut perm);
            let h = permuted(&g, &perm);
            let mut marked_h: Vec<u32> = marked.iter().map(|&v| perm[v as usize]).collect();
            marked_h.sort_unstable();
            let mbh = neighborhood_of_set(&h, &marked_h, 2).unwrap();

            prop_assert_eq!(
                canonical_code_marked(&mb).unwrap(),
                canonical_code_marked(&mbh).unwrap()
            );
        }
    }
}
