//! Edge cuts that break a graph into components of bounded size.
//!
//! A cut is valid for bound `k` when every component left after
//! removing its edges has at most `k` vertices. The quality of a cut is
//! its size relative to the vertex count; the mean number of removed
//! edges incident to a vertex is exactly twice that fraction.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{rat, rat_from_f64, to_f64, Rat};
use crate::graph::Graph;
use crate::rng::{derive_seed, KeyedRng};

/// A set of undirected edges, stored as normalized `(min, max)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeCut {
    edges: BTreeSet<(u32, u32)>,
}

impl EdgeCut {
    pub fn empty() -> EdgeCut {
        EdgeCut::default()
    }

    pub fn new(edges: impl IntoIterator<Item = (u32, u32)>) -> Result<EdgeCut> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(EdgeCut { edges: set })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<(u32, u32)> {
        self.edges.iter().copied().collect()
    }

    pub fn insert(&mut self, u: u32, v: u32) {
        debug_assert_ne!(u, v);
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn union_with(&mut self, other: &EdgeCut) {
        self.edges.extend(other.edges.iter().copied());
    }

    /// Every edge of the cut must be an edge of `g`.
    pub fn validate_against(&self, g: &Graph) -> Result<()> {
        for &(u, v) in &self.edges {
            let n = g.vertex_count();
            if u as usize >= n || v as usize >= n {
                return Err(Error::VertexOutOfRange { v: u.max(v), n });
            }
            if !g.has_edge(u, v) {
                return Err(Error::NotAnEdge { u, v });
            }
        }
        Ok(())
    }

    /// The edges with both endpoints inside `vertices`.
    pub fn restricted_to(&self, vertices: &HashSet<u32>) -> EdgeCut {
        EdgeCut {
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(u, v)| vertices.contains(&u) && vertices.contains(&v))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# edges={}\n", self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<EdgeCut> {
        let mut edges = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |s: &str| -> Result<u32> {
                s.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("expected a vertex id, got {s:?}"),
                })
            };
            let mut parts = line.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (parse(a)?, parse(b)?),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("expected \"u v\", got {line:?}"),
                    })
                }
            };
            if a == b {
                return Err(Error::SelfLoop { v: a });
            }
            edges.insert((a.min(b), a.max(b)));
        }
        Ok(EdgeCut { edges })
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<EdgeCut> {
        EdgeCut::parse_text(&std::fs::read_to_string(path)?)
    }
}

/// Connected components of `g` after deleting the cut edges, each
/// sorted, listed by smallest member.
pub fn components_after_removal(g: &Graph, cut: &EdgeCut) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut comp = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &v in g.neighbors(u) {
                if !seen[v as usize] && !cut.contains(u, v) {
                    seen[v as usize] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

pub fn max_component_after_removal(g: &Graph, cut: &EdgeCut) -> usize {
    components_after_removal(g, cut)
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(0)
}

/// Measured quality of a cut against a component-size bound.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PartitionQuality {
    pub k: usize,
    pub k_max: usize,
    pub cut_size: usize,
    pub vertex_count: usize,
    pub cut_fraction: f64,
    /// Mean over vertices of the number of incident removed edges;
    /// equals `2 * cut_fraction` by edge double counting.
    pub boundary_degree_mean: f64,
    pub valid: bool,
}

impl PartitionQuality {
    pub fn cut_fraction_exact(&self) -> Rat {
        rat(self.cut_size as i128, self.vertex_count as i128)
    }
}

/// Check a cut against `g` and measure it: component bound, fraction of
/// removed edges per vertex, and the per-vertex boundary degree mean
/// (counted incidence by incidence rather than assumed).
pub fn verify_partition(g: &Graph, cut: &EdgeCut, k: usize) -> Result<PartitionQuality> {
    if k == 0 {
        return Err(domain("component bound k must be positive"));
    }
    cut.validate_against(g)?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(domain("cannot verify a cut on the empty graph"));
    }
    let k_max = max_component_after_removal(g, cut);
    let mut incidences = 0usize;
    for (u, v) in cut.iter() {
        debug_assert!((u as usize) < n && (v as usize) < n);
        incidences += 2;
    }
    Ok(PartitionQuality {
        k,
        k_max,
        cut_size: cut.len(),
        vertex_count: n,
        cut_fraction: cut.len() as f64 / n as f64,
        boundary_degree_mean: incidences as f64 / n as f64,
        valid: k_max <= k,
    })
}

// --- exact oracle ---------------------------------------------------------

const ORACLE_EDGE_LIMIT: usize = 20;
const ORACLE_VERTEX_LIMIT: usize = 16;

/// Smallest cut whose removal leaves components of at most `k`
/// vertices. Exhaustive over edge subsets when the graph has at most
/// 20 edges (ties broken toward the lexicographically least edge
/// list); otherwise a subset dynamic program over vertex blocks when
/// the graph has at most 16 vertices (minimal size, deterministic
/// block choice); otherwise the instance is refused.
pub fn brute_force_optimal_cut(g: &Graph, k: usize) -> Result<EdgeCut> {
    if k == 0 {
        return Err(domain("component bound k must be positive"));
    }
    if g.vertex_count() == 0 {
        return Err(domain("cannot cut the empty graph"));
    }
    if g.edge_count() <= ORACLE_EDGE_LIMIT {
        return Ok(exhaustive_optimal_cut(g, k));
    }
    if g.vertex_count() <= ORACLE_VERTEX_LIMIT {
        return Ok(block_dp_optimal_cut(g, k));
    }
    Err(Error::InstanceTooLarge {
        op: "optimal cut".into(),
        detail: format!(
            "needs at most {ORACLE_EDGE_LIMIT} edges or {ORACLE_VERTEX_LIMIT} vertices, got {} edges on {} vertices",
            g.edge_count(),
            g.vertex_count()
        ),
    })
}

/// First valid subset in (size, lexicographic) order over the sorted
/// edge list — the unique minimum cut under that order.
pub(crate) fn exhaustive_optimal_cut(g: &Graph, k: usize) -> EdgeCut {
    let edges = g.edges();
    let m = edges.len();
    for size in 0..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let cut = EdgeCut::new(combo.iter().map(|&i| edges[i]))
                .expect("graph edges have no self loops");
            if max_component_after_removal(g, &cut) <= k {
                return cut;
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    // Unreachable: removing every edge leaves singletons, and k >= 1.
    EdgeCut::new(edges).expect("graph edges have no self loops")
}

/// Advance `combo` (strictly increasing indices below `m`) to its lex
/// successor of the same length; false once exhausted.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let size = combo.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if combo[i] < i + m - size {
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimal cross-edge count over partitions of the vertices into blocks
/// of at most `k`, via a subset dynamic program that maximizes
/// within-block edges.
pub(crate) fn block_dp_optimal_cut(g: &Graph, k: usize) -> EdgeCut {
    let n = g.vertex_count();
    debug_assert!(n <= ORACLE_VERTEX_LIMIT && n > 0);
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let nbr: Vec<u32> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();

    // intra[mask]: number of edges with both endpoints in mask.
    let mut intra = vec![0u32; (full as usize) + 1];
    for mask in 1..=full {
        let v = mask.trailing_zeros();
        let rest = mask & (mask - 1);
        intra[mask as usize] = intra[rest as usize] + (nbr[v as usize] & rest).count_ones();
    }

    // best[mask]: max intra-block edges over block partitions of mask.
    let mut best = vec![0u32; (full as usize) + 1];
    for mask in 1..=full {
        let v_bit = mask & mask.wrapping_neg();
        let mut score = 0u32;
        let mut sub = mask;
        while sub != 0 {
            if sub & v_bit != 0 && sub.count_ones() as usize <= k {
                let candidate = intra[sub as usize] + best[(mask & !sub) as usize];
                if candidate > score {
                    score = candidate;
                }
            }
            sub = (sub - 1) & mask;
        }
        best[mask as usize] = score;
    }

    // Recover one maximizing partition (first block found in the same
    // enumeration order at every level) and emit the cross edges.
    let mut block_of = vec![0u32; n];
    let mut mask = full;
    let mut block_id = 0u32;
    while mask != 0 {
        let v_bit = mask & mask.wrapping_neg();
        let mut sub = mask;
        loop {
            debug_assert_ne!(sub, 0, "some block always attains the optimum");
            if sub & v_bit != 0
                && sub.count_ones() as usize <= k
                && intra[sub as usize] + best[(mask & !sub) as usize] == best[mask as usize]
            {
                break;
            }
            sub = (sub - 1) & mask;
        }
        for v in 0..n as u32 {
            if sub & (1 << v) != 0 {
                block_of[v as usize] = block_id;
            }
        }
        block_id += 1;
        mask &= !sub;
    }

    let cross = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| block_of[u as usize] != block_of[v as usize]);
    EdgeCut::new(cross).expect("graph edges have no self loops")
}

// --- practical partitioners -----------------------------------------------

/// Deterministic greedy cover: repeatedly grow a piece of up to `k`
/// vertices by breadth-first search from the smallest unassigned
/// vertex, then cut every edge between distinct pieces.
pub fn greedy_ball_partition(g: &Graph, k: usize) -> Result<EdgeCut> {
    if k == 0 {
        return Err(domain("component bound k must be positive"));
    }
    let n = g.vertex_count();
    let mut piece = vec![u32::MAX; n];
    let mut next_piece = 0u32;
    for seed in 0..n as u32 {
        if piece[seed as usize] != u32::MAX {
            continue;
        }
        let mut members = vec![seed];
        piece[seed as usize] = next_piece;
        let mut head = 0;
        'grow: while head < members.len() && members.len() < k {
            let u = members[head];
            head += 1;
            for &v in g.neighbors(u) {
                if piece[v as usize] == u32::MAX {
                    piece[v as usize] = next_piece;
                    members.push(v);
                    if members.len() == k {
                        break 'grow;
                    }
                }
            }
        }
        next_piece += 1;
    }
    let cross = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| piece[u as usize] != piece[v as usize]);
    EdgeCut::new(cross)
}

/// Keyed randomized cover: seeds are visited in a seeded random order
/// and each piece grows by uniformly random frontier picks, so
/// different seeds shift the piece boundaries. Bit-stable per seed.
pub fn random_shifted_partition(g: &Graph, k: usize, seed: u64) -> Result<EdgeCut> {
    if k == 0 {
        return Err(domain("component bound k must be positive"));
    }
    let n = g.vertex_count();
    let mut order: Vec<u32> = (0..n as u32).collect();
    KeyedRng::new(seed, "order", &[]).shuffle(&mut order);

    let mut piece = vec![u32::MAX; n];
    let mut next_piece = 0u32;
    for &start in &order {
        if piece[start as usize] != u32::MAX {
            continue;
        }
        let mut rng = KeyedRng::new(seed, "piece", &[start as u64]);
        let mut members = vec![start];
        piece[start as usize] = next_piece;
        let mut frontier: Vec<u32> = g
            .neighbors(start)
            .iter()
            .copied()
            .filter(|&v| piece[v as usize] == u32::MAX)
            .collect();
        while members.len() < k && !frontier.is_empty() {
            let pick = rng.next_below(frontier.len() as u64) as usize;
            let v = frontier.swap_remove(pick);
            if piece[v as usize] != u32::MAX {
                continue;
            }
            piece[v as usize] = next_piece;
            members.push(v);
            for &w in g.neighbors(v) {
                if piece[w as usize] == u32::MAX {
                    frontier.push(w);
                }
            }
        }
        next_piece += 1;
    }
    let cross = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| piece[u as usize] != piece[v as usize]);
    EdgeCut::new(cross)
}

/// Axis-aligned `block`-by-`block` cut of the square torus with
/// vertices `row * side + col`. Requires `block` to divide `side`.
/// With `block == side` the whole torus is a single block and the cut
/// is empty; otherwise the cut has `2 * side^2 / block` edges and
/// leaves `block^2`-vertex square components.
pub fn grid_block_cut(side: u32, block: u32) -> Result<EdgeCut> {
    if side < 3 {
        return Err(domain("torus side must be at least 3"));
    }
    if block == 0 || side % block != 0 {
        return Err(domain(format!("block {block} must divide side {side}")));
    }
    if block == side {
        return Ok(EdgeCut::empty());
    }
    let id = |r: u32, c: u32| r * side + c;
    let mut cut = EdgeCut::empty();
    for r in 0..side {
        for c in 0..side {
            if (c + 1) % block == 0 {
                cut.insert(id(r, c), id(r, (c + 1) % side));
            }
            if (r + 1) % block == 0 {
                cut.insert(id(r, c), id((r + 1) % side, c));
            }
        }
    }
    Ok(cut)
}

// --- weighted ensembles -----------------------------------------------------

/// A cut together with a positive rational weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCut {
    pub cut: EdgeCut,
    pub weight: Rat,
}

/// A finite weighted family of cuts for one component bound. Weights
/// are positive and sum to one exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct CutEnsemble {
    k: usize,
    samples: Vec<WeightedCut>,
}

impl CutEnsemble {
    pub fn new(k: usize, samples: Vec<WeightedCut>) -> Result<CutEnsemble> {
        if k == 0 {
            return Err(domain("component bound k must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let zero = rat(0, 1);
        let mut total = zero;
        for s in &samples {
            if s.weight <= zero {
                return Err(domain("ensemble weights must be positive"));
            }
            total += s.weight;
        }
        if total != rat(1, 1) {
            return Err(domain(format!("ensemble weights sum to {total}, not 1")));
        }
        Ok(CutEnsemble { k, samples })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn samples(&self) -> &[WeightedCut] {
        &self.samples
    }

    /// Every sample must be a valid bound-`k` cut of `g`.
    pub fn validate_against(&self, g: &Graph) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            let q = verify_partition(g, &s.cut, self.k)?;
            if !q.valid {
                return Err(domain(format!(
                    "ensemble sample {i} leaves a component of {} > {} vertices",
                    q.k_max, self.k
                )));
            }
        }
        Ok(())
    }

    /// Weighted mean of `|cut| / n`.
    pub fn mean_cut_fraction(&self, vertex_count: usize) -> Rat {
        let mut acc = rat(0, 1);
        for s in &self.samples {
            acc += s.weight * rat(s.cut.len() as i128, vertex_count as i128);
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<EnsembleSampleJson> = self
            .samples
            .iter()
            .map(|s| EnsembleSampleJson {
                weight_num: Some(*s.weight.numer()),
                weight_den: Some(*s.weight.denom()),
                weight: to_f64(&s.weight),
                edges: s.cut.to_vec(),
            })
            .collect();
        serde_json::to_value(EnsembleJson { k: self.k, samples })
            .expect("ensemble serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<CutEnsemble> {
        let raw: EnsembleJson = serde_json::from_value(value.clone())?;
        let mut samples = Vec::with_capacity(raw.samples.len());
        for s in raw.samples {
            let weight = match (s.weight_num, s.weight_den) {
                (Some(num), Some(den)) => {
                    if den <= 0 {
                        return Err(domain("weight_den must be positive"));
                    }
                    rat(num, den)
                }
                // Files written elsewhere may carry only the float
                // weight; every f64 is an exact dyadic rational.
                _ => rat_from_f64(s.weight)
                    .ok_or_else(|| domain(format!("unusable weight {}", s.weight)))?,
            };
            samples.push(WeightedCut { cut: EdgeCut::new(s.edges)?, weight });
        }
        CutEnsemble::new(raw.k, samples)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<CutEnsemble> {
        let text = std::fs::read_to_string(path)?;
        CutEnsemble::from_json(&serde_json::from_str(&text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    k: usize,
    samples: Vec<EnsembleSampleJson>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleSampleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_num: Option<i128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_den: Option<i128>,
    /// Exact value is `weight_num/weight_den` when present; otherwise
    /// this float is taken literally (it is itself a rational).
    weight: f64,
    edges: Vec<(u32, u32)>,
}

/// Uniformly weighted ensemble of keyed randomized covers of `g`.
pub fn build_ensemble(g: &Graph, k: usize, n_samples: usize, seed: u64) -> Result<CutEnsemble> {
    if n_samples == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let weight = rat(1, n_samples as i128);
    let samples = (0..n_samples)
        .map(|i| {
            Ok(WeightedCut {
                cut: random_shifted_partition(g, k, derive_seed(seed, "ens", i as u64))?,
                weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CutEnsemble::new(k, samples)
}

/// Collapse an ensemble to a single cut of `host` no larger than the
/// ensemble's weighted mean size: per connected component, keep the
/// sample whose restriction to that component is smallest (ties to the
/// lexicographically least edge list), then take the union.
pub fn derandomize_cut(host: &Graph, ensemble: &CutEnsemble) -> Result<EdgeCut> {
    ensemble.validate_against(host)?;
    let mut chosen = EdgeCut::empty();
    for comp in host.components() {
        let members: HashSet<u32> = comp.iter().copied().collect();
        let best = ensemble
            .samples()
            .iter()
            .map(|s| s.cut.restricted_to(&members))
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .expect("ensembles are nonempty");
        chosen.union_with(&best);
    }
    Ok(chosen)
}
