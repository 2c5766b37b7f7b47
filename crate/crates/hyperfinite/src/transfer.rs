//! Transfer of partition statistics onto a target graph through local
//! randomness.
//!
//! The pipeline learns, from a weighted ensemble of cuts on a source
//! graph, the conditional probability that a small connected vertex set
//! is a realized component, indexed by the canonical code of the set's
//! radius-R neighborhood. On a target graph it then enumerates every
//! connected set of at most `k` vertices, fires each independently with
//! probability `min(2·ln(1/eps0)·ptilde, 1)` keyed by the set's sorted
//! vertex ids, removes the boundary edges of fired sets, and isolates
//! any vertex left uncovered. The resulting cut always leaves
//! components of at most `k` vertices, whatever the statistics; the
//! statistics only control how many edges are spent.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canon::{CanonicalCode, CodeCache};
use crate::error::{domain, Error, Result};
use crate::exact::{rat, rat_from_f64, rat_int, to_f64, Rat};
use crate::graph::Graph;
use crate::partition::{
    build_ensemble, components_after_removal, verify_partition, CutEnsemble, EdgeCut,
    PartitionQuality,
};
use crate::rng::{derive_seed, keyed_unit, KeyedRng};
use crate::rooted::neighborhood_of_set;

/// Default ceiling on enumerated connected sets per operation. Bounded
/// degree keeps |sets per vertex| finite but exponential in `k`; the
/// budget turns an over-ambitious instance into a clean error instead
/// of an open-ended run.
pub const DEFAULT_SET_BUDGET: u64 = 20_000_000;

/// Counts enumerated sets and fails once a limit is crossed.
#[derive(Clone, Debug)]
pub struct SetBudget {
    limit: u64,
    used: u64,
}

impl SetBudget {
    pub fn new(limit: u64) -> SetBudget {
        SetBudget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::EnumerationBudget { budget: self.limit });
        }
        Ok(())
    }
}

impl Default for SetBudget {
    fn default() -> SetBudget {
        SetBudget::new(DEFAULT_SET_BUDGET)
    }
}

// --- connected-set enumeration ---------------------------------------------

struct SetEnumerator<'a, F> {
    g: &'a Graph,
    k: usize,
    /// Vertices below this id are invisible to the walk.
    floor: u32,
    budget: &'a mut SetBudget,
    visit: F,
    set: Vec<u32>,
    in_set: Vec<bool>,
    banned: Vec<bool>,
}

impl<F: FnMut(&[u32]) -> Result<()>> SetEnumerator<'_, F> {
    /// Each connected superset of the current set (within the floor)
    /// is reached exactly once: extension candidates are tried in
    /// ascending order and banned for the remaining branches.
    fn recurse(&mut self) -> Result<()> {
        self.budget.tick()?;
        (self.visit)(&self.set)?;
        if self.set.len() == self.k {
            return Ok(());
        }
        let mut ext: Vec<u32> = Vec::new();
        for &u in &self.set {
            for &w in self.g.neighbors(u) {
                if w >= self.floor && !self.in_set[w as usize] && !self.banned[w as usize] {
                    ext.push(w);
                }
            }
        }
        ext.sort_unstable();
        ext.dedup();
        for i in 0..ext.len() {
            let u = ext[i];
            self.set.push(u);
            self.in_set[u as usize] = true;
            self.recurse()?;
            self.set.pop();
            self.in_set[u as usize] = false;
            self.banned[u as usize] = true;
        }
        for &u in &ext {
            self.banned[u as usize] = false;
        }
        Ok(())
    }
}

fn visit_anchored_sets(
    g: &Graph,
    anchor: u32,
    k: usize,
    floor: u32,
    budget: &mut SetBudget,
    visit: impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    let n = g.vertex_count();
    if anchor as usize >= n {
        return Err(Error::VertexOutOfRange { v: anchor, n });
    }
    if k == 0 {
        return Err(domain("size bound k must be positive"));
    }
    let mut in_set = vec![false; n];
    in_set[anchor as usize] = true;
    let mut e = SetEnumerator {
        g,
        k,
        floor,
        budget,
        visit,
        set: vec![anchor],
        in_set,
        banned: vec![false; n],
    };
    e.recurse()
}

/// All connected vertex sets of size at most `k` containing `v`, each
/// exactly once, as sorted lists in lexicographic order.
pub fn enumerate_connected_sets(g: &Graph, v: u32, k: usize) -> Result<Vec<Vec<u32>>> {
    let mut budget = SetBudget::default();
    let mut out: Vec<Vec<u32>> = Vec::new();
    visit_anchored_sets(g, v, k, 0, &mut budget, |set| {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        out.push(sorted);
        Ok(())
    })?;
    out.sort_unstable();
    Ok(out)
}

/// Visit every connected set of size at most `k` in the graph exactly
/// once (each set is walked from its smallest vertex). `visit` receives
/// the set sorted ascending.
fn visit_all_sets(
    g: &Graph,
    k: usize,
    budget: &mut SetBudget,
    mut visit: impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    let mut sorted: Vec<u32> = Vec::with_capacity(k);
    for anchor in 0..g.vertex_count() as u32 {
        visit_anchored_sets(g, anchor, k, anchor, budget, |set| {
            sorted.clear();
            sorted.extend_from_slice(set);
            sorted.sort_unstable();
            visit(&sorted)
        })?;
    }
    Ok(())
}

/// The component of `v` after removing the cut edges.
pub fn component_of(g: &Graph, cut: &EdgeCut, v: u32) -> Result<Vec<u32>> {
    let n = g.vertex_count();
    if v as usize >= n {
        return Err(Error::VertexOutOfRange { v, n });
    }
    let mut seen = vec![false; n];
    seen[v as usize] = true;
    let mut comp = vec![v];
    let mut head = 0;
    while head < comp.len() {
        let u = comp[head];
        head += 1;
        for &w in g.neighbors(u) {
            if !seen[w as usize] && !cut.contains(u, w) {
                seen[w as usize] = true;
                comp.push(w);
            }
        }
    }
    comp.sort_unstable();
    Ok(comp)
}

// --- pattern statistics -----------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct PatternEntry {
    /// Estimated probability that a set with this neighborhood code is
    /// the realized component of a root it contains. Exact rational.
    pub ptilde: Rat,
    /// Total pattern occurrences at sampled roots (the estimator's
    /// denominator mass).
    pub occurrences: u64,
}

/// Conditional component probabilities indexed by the canonical code
/// of a marked `radius`-neighborhood. Codes absent from the table read
/// as probability exactly 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStats {
    k: usize,
    radius: u32,
    table: BTreeMap<CanonicalCode, PatternEntry>,
}

impl ComponentStats {
    pub fn new(
        k: usize,
        radius: u32,
        entries: impl IntoIterator<Item = (CanonicalCode, PatternEntry)>,
    ) -> Result<ComponentStats> {
        if k == 0 {
            return Err(domain("component bound k must be positive"));
        }
        let mut table = BTreeMap::new();
        for (code, entry) in entries {
            if entry.ptilde < rat_int(0) || entry.ptilde > rat_int(1) {
                return Err(domain(format!("ptilde {} outside [0,1]", entry.ptilde)));
            }
            if table.insert(code, entry).is_some() {
                return Err(domain("duplicate code in stats table"));
            }
        }
        Ok(ComponentStats { k, radius, table })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored probability, or exactly 1 for unseen codes.
    pub fn lookup(&self, code: &CanonicalCode) -> Rat {
        self.table.get(code).map_or_else(|| rat_int(1), |e| e.ptilde)
    }

    pub fn entry(&self, code: &CanonicalCode) -> Option<&PatternEntry> {
        self.table.get(code)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalCode, &PatternEntry)> {
        self.table.iter()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<StatsEntryJson> = self
            .table
            .iter()
            .map(|(code, e)| StatsEntryJson {
                code: code.to_hex(),
                ptilde: to_f64(&e.ptilde),
                ptilde_num: i64::try_from(*e.ptilde.numer()).ok(),
                ptilde_den: i64::try_from(*e.ptilde.denom()).ok(),
                occurrences: e.occurrences,
            })
            .collect();
        serde_json::to_value(StatsJson {
            k: self.k,
            r: self.radius,
            default: 1.0,
            entries,
        })
        .expect("stats serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<ComponentStats> {
        let raw: StatsJson = serde_json::from_value(value.clone())?;
        if raw.default != 1.0 {
            return Err(domain("stats default must be 1.0"));
        }
        let entries = raw
            .entries
            .into_iter()
            .map(|e| {
                let ptilde = match (e.ptilde_num, e.ptilde_den) {
                    (Some(num), Some(den)) if den > 0 => rat(num as i128, den as i128),
                    _ => rat_from_f64(e.ptilde)
                        .ok_or_else(|| domain(format!("unusable ptilde {}", e.ptilde)))?,
                };
                Ok((
                    CanonicalCode::from_hex(&e.code)?,
                    PatternEntry { ptilde, occurrences: e.occurrences },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        ComponentStats::new(raw.k, raw.r, entries)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<ComponentStats> {
        let text = std::fs::read_to_string(path)?;
        ComponentStats::from_json(&serde_json::from_str(&text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct StatsJson {
    k: usize,
    #[serde(rename = "R")]
    r: u32,
    default: f64,
    entries: Vec<StatsEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct StatsEntryJson {
    code: String,
    ptilde: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ptilde_num: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ptilde_den: Option<i64>,
    occurrences: u64,
}

/// Multiplicities of `n_roots` uniform root draws over `0..n`.
pub fn root_multiplicities(n: usize, n_roots: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(domain("cannot sample roots of the empty graph"));
    }
    if n_roots == 0 {
        return Err(domain("n_roots must be positive"));
    }
    let mut rng = KeyedRng::new(seed, "roots", &[]);
    let mut mult = vec![0u64; n];
    for _ in 0..n_roots {
        mult[rng.next_below(n as u64) as usize] += 1;
    }
    Ok(mult)
}

/// Estimate pattern probabilities from an ensemble: over sampled roots
/// `o`, the weighted frequency with which each pattern code is realized
/// as the actual component of `o`, divided by the number of times the
/// pattern occurs as a candidate set at `o`.
pub fn estimate_ptilde(
    g: &Graph,
    ensemble: &CutEnsemble,
    radius: u32,
    n_roots: u64,
    seed: u64,
) -> Result<ComponentStats> {
    let mult = root_multiplicities(g.vertex_count(), n_roots, seed)?;
    let mut cache = CodeCache::new();
    let mut budget = SetBudget::default();
    estimate_ptilde_with(g, ensemble, radius, &mult, &mut cache, &mut budget)
}

/// [`estimate_ptilde`] against explicit root multiplicities, sharing a
/// code cache and an enumeration budget with the rest of a pipeline.
pub fn estimate_ptilde_with(
    g: &Graph,
    ensemble: &CutEnsemble,
    radius: u32,
    mult: &[u64],
    cache: &mut CodeCache,
    budget: &mut SetBudget,
) -> Result<ComponentStats> {
    if mult.len() != g.vertex_count() {
        return Err(domain("root multiplicities must cover every vertex"));
    }
    ensemble.validate_against(g)?;
    let k = ensemble.k();

    // Denominator: candidate-pattern mass. Each connected set counts
    // once per sampled root it contains.
    let mut den: BTreeMap<CanonicalCode, u64> = BTreeMap::new();
    visit_all_sets(g, k, budget, |set| {
        let mass: u64 = set.iter().map(|&v| mult[v as usize]).sum();
        if mass > 0 {
            let code = cache.marked(&neighborhood_of_set(g, set, radius)?)?;
            *den.entry(code).or_insert(0) += mass;
        }
        Ok(())
    })?;

    // Numerator: realized-component mass, weighted by sample weight.
    let mut num: BTreeMap<CanonicalCode, Rat> = BTreeMap::new();
    for sample in ensemble.samples() {
        for piece in components_after_removal(g, &sample.cut) {
            let mass: u64 = piece.iter().map(|&v| mult[v as usize]).sum();
            if mass == 0 {
                continue;
            }
            let code = cache.marked(&neighborhood_of_set(g, &piece, radius)?)?;
            *num.entry(code).or_insert_with(|| rat_int(0)) += sample.weight * rat_int(mass as i128);
        }
    }

    let mut entries = Vec::with_capacity(den.len());
    for (code, d) in den {
        let raw = num.remove(&code).unwrap_or_else(|| rat_int(0)) / rat_int(d as i128);
        let ptilde = raw.clamp(rat_int(0), rat_int(1));
        entries.push((code, PatternEntry { ptilde, occurrences: d }));
    }
    if !num.is_empty() {
        // Impossible for a valid ensemble: every realized piece is
        // itself a candidate set at each root it contains.
        return Err(domain("realized pattern missing from candidate enumeration"));
    }
    ComponentStats::new(k, radius, entries)
}

// --- stabilization radius ----------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RadiusStep {
    pub radius: u32,
    /// Mean over sampled roots of the total per-candidate probability
    /// shift between this radius and the next (double precision; used
    /// only as a stopping diagnostic).
    pub discrepancy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RadiusSelection {
    pub radius: u32,
    /// False when the search hit `r_max` without the discrepancy
    /// dropping below the threshold.
    pub stabilized: bool,
    /// True when the radius was imposed rather than searched.
    pub forced: bool,
    pub history: Vec<RadiusStep>,
}

/// Pick the smallest radius in `(k, r_max]` at which the estimated
/// pattern probabilities stop moving: the first `R` whose successive
/// discrepancy falls below `eps0`. Falls back to `r_max` (flagged
/// unstabilized) if none qualifies.
pub fn choose_r(
    g: &Graph,
    ensemble: &CutEnsemble,
    eps0: &Rat,
    r_max: u32,
    n_roots: u64,
    seed: u64,
) -> Result<RadiusSelection> {
    let mult = root_multiplicities(g.vertex_count(), n_roots, seed)?;
    let mut cache = CodeCache::new();
    let mut budget = SetBudget::default();
    Ok(choose_r_with(g, ensemble, eps0, r_max, &mult, &mut cache, &mut budget)?.0)
}

/// [`choose_r`] with explicit roots, cache, and budget; also returns
/// the stats table at the selected radius so callers need not
/// recompute it.
pub fn choose_r_with(
    g: &Graph,
    ensemble: &CutEnsemble,
    eps0: &Rat,
    r_max: u32,
    mult: &[u64],
    cache: &mut CodeCache,
    budget: &mut SetBudget,
) -> Result<(RadiusSelection, ComponentStats)> {
    let k = ensemble.k() as u32;
    if r_max <= k {
        return Err(domain(format!("r_max {r_max} must exceed the component bound {k}")));
    }
    if *eps0 <= rat_int(0) || *eps0 >= rat(1, 2) {
        return Err(domain(format!("eps0 {eps0} must lie in (0, 1/2)")));
    }
    let total: u64 = mult.iter().sum();
    if total == 0 {
        return Err(domain("root multiplicities are all zero"));
    }
    let eps0_f = to_f64(eps0);

    let mut stats: BTreeMap<u32, ComponentStats> = BTreeMap::new();
    let mut history = Vec::new();
    for r in k + 1..=r_max {
        for radius in [r, r + 1] {
            if !stats.contains_key(&radius) {
                let s = estimate_ptilde_with(g, ensemble, radius, mult, cache, budget)?;
                stats.insert(radius, s);
            }
        }
        let coarse = &stats[&r];
        let fine = &stats[&(r + 1)];
        let mut acc = 0.0f64;
        visit_all_sets(g, ensemble.k(), budget, |set| {
            let mass: u64 = set.iter().map(|&v| mult[v as usize]).sum();
            if mass > 0 {
                let a = coarse.lookup(&cache.marked(&neighborhood_of_set(g, set, r)?)?);
                let b = fine.lookup(&cache.marked(&neighborhood_of_set(g, set, r + 1)?)?);
                acc += to_f64(&(a - b)).abs() * mass as f64;
            }
            Ok(())
        })?;
        let discrepancy = acc / total as f64;
        history.push(RadiusStep { radius: r, discrepancy });
        if discrepancy < eps0_f {
            let selection = RadiusSelection { radius: r, stabilized: true, forced: false, history };
            return Ok((selection, stats.remove(&r).expect("stats at r computed")));
        }
    }
    let selection =
        RadiusSelection { radius: r_max, stabilized: false, forced: false, history };
    let table = stats.remove(&r_max).expect("stats at r_max computed");
    Ok((selection, table))
}

// --- the local cut ------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct LocalCutOutcome {
    pub cut: EdgeCut,
    /// Vertices covered by no fired set; all their edges were removed.
    pub uncovered: Vec<u32>,
    /// Number of sets that fired.
    pub fired: u64,
    /// Number of candidate sets examined.
    pub examined: u64,
}

impl LocalCutOutcome {
    pub fn uncovered_fraction(&self, vertex_count: usize) -> f64 {
        self.uncovered.len() as f64 / vertex_count as f64
    }
}

/// Build a cut on `g` from pattern statistics alone: fire each
/// connected set `K` of at most `k` vertices independently with
/// probability `min(2·ln(1/eps0)·ptilde(code(K)), 1)`, keyed by
/// `(seed, sorted ids of K)`; remove the boundaries of fired sets and
/// every edge at an uncovered vertex. Components of the result never
/// exceed `k` vertices, regardless of the statistics.
pub fn local_partition(
    g: &Graph,
    stats: &ComponentStats,
    eps0: &Rat,
    seed: u64,
) -> Result<LocalCutOutcome> {
    let mut cache = CodeCache::new();
    let mut budget = SetBudget::default();
    local_partition_seeded(g, stats, eps0, seed, &mut cache, &mut budget)
}

/// Seeded draw with explicit cache and budget.
pub fn local_partition_seeded(
    g: &Graph,
    stats: &ComponentStats,
    eps0: &Rat,
    seed: u64,
    cache: &mut CodeCache,
    budget: &mut SetBudget,
) -> Result<LocalCutOutcome> {
    let mut key = Vec::with_capacity(stats.k());
    local_partition_with(g, stats, eps0, cache, budget, |set, p| {
        key.clear();
        key.extend(set.iter().map(|&v| v as u64));
        keyed_unit(seed, "fire", &key) < p
    })
}

/// Core of [`local_partition`] with the Bernoulli draw injected:
/// `draw(sorted_set, p)` decides whether the set fires. Exposed so the
/// keying scheme itself can be swapped (e.g. to verify relabeling
/// equivariance) without touching the construction.
pub fn local_partition_with(
    g: &Graph,
    stats: &ComponentStats,
    eps0: &Rat,
    cache: &mut CodeCache,
    budget: &mut SetBudget,
    mut draw: impl FnMut(&[u32], f64) -> bool,
) -> Result<LocalCutOutcome> {
    if *eps0 <= rat_int(0) || *eps0 >= rat(1, 2) {
        return Err(domain(format!("eps0 {eps0} must lie in (0, 1/2)")));
    }
    let n = g.vertex_count();
    let factor = 2.0 * (1.0 / to_f64(eps0)).ln();
    let mut covered = vec![false; n];
    let mut cut = EdgeCut::empty();
    let mut fired = 0u64;
    let mut examined = 0u64;
    visit_all_sets(g, stats.k(), budget, |set| {
        examined += 1;
        // An empty table means every code reads as 1; skip the
        // neighborhood work entirely in that case.
        let ptilde = if stats.is_empty() {
            rat_int(1)
        } else {
            stats.lookup(&cache.marked(&neighborhood_of_set(g, set, stats.radius())?)?)
        };
        let p = (factor * to_f64(&ptilde)).min(1.0);
        if p > 0.0 && draw(set, p) {
            fired += 1;
            for &v in set {
                covered[v as usize] = true;
                for &w in g.neighbors(v) {
                    if set.binary_search(&w).is_err() {
                        cut.insert(v, w);
                    }
                }
            }
        }
        Ok(())
    })?;
    let mut uncovered = Vec::new();
    for v in 0..n as u32 {
        if !covered[v as usize] {
            uncovered.push(v);
            for &w in g.neighbors(v) {
                cut.insert(v, w);
            }
        }
    }
    Ok(LocalCutOutcome { cut, uncovered, fired, examined })
}

// --- quality bounds -----------------------------------------------------------

/// The guaranteed cut-fraction degradation of a transferred partition:
/// `3·ln(2M/eps)·eps` for a source cut fraction `eps` under degree
/// bound `M`.
pub fn epsilon_tilde(eps: f64, m: u32) -> Result<f64> {
    if m < 1 {
        return Err(domain("degree bound must be at least 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps {eps} must lie in (0, 1)")));
    }
    Ok(3.0 * (2.0 * m as f64 / eps).ln() * eps)
}

/// The unsimplified expectation bound `4·ln(1/eps0)·eps + 3·eps0·M`
/// with `eps0 = eps/(2M)`, i.e. `4·ln(2M/eps)·eps + 1.5·eps`. At most
/// twice [`epsilon_tilde`] whenever `2M/eps ≥ e^(3/4)`.
pub fn raw_transfer_bound(eps: f64, m: u32) -> Result<f64> {
    if m < 1 {
        return Err(domain("degree bound must be at least 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps {eps} must lie in (0, 1)")));
    }
    Ok(4.0 * (2.0 * m as f64 / eps).ln() * eps + 1.5 * eps)
}

// --- end-to-end experiment ------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferConfig {
    pub k: usize,
    pub n_samples: usize,
    pub r_max: u32,
    pub n_roots: u64,
    pub seed: u64,
    /// Skip the stabilization search and use this radius.
    pub forced_radius: Option<u32>,
    pub set_budget: u64,
}

impl TransferConfig {
    pub fn new(k: usize, n_samples: usize, r_max: u32, n_roots: u64, seed: u64) -> TransferConfig {
        TransferConfig {
            k,
            n_samples,
            r_max,
            n_roots,
            seed,
            forced_radius: None,
            set_budget: DEFAULT_SET_BUDGET,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub config: TransferConfig,
    /// Degree bound `M` of the source, which the target must respect.
    pub degree_bound: u32,
    /// Measured mean cut fraction of the source ensemble.
    pub eps_base: Rat,
    pub eps0: Rat,
    pub radius: RadiusSelection,
    /// `epsilon_tilde(eps_base, M)`; absent when `eps_base` leaves its
    /// domain (degenerate or ≥ 1).
    pub bound: Option<f64>,
    pub raw_bound: Option<f64>,
    pub cut: EdgeCut,
    pub quality: PartitionQuality,
    pub uncovered_fraction: f64,
    pub fired: u64,
    pub examined: u64,
}

impl TransferReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            "degree_bound": self.degree_bound,
            "eps_base": rat_json(&self.eps_base),
            "eps0": rat_json(&self.eps0),
            "radius": serde_json::to_value(&self.radius).expect("selection serializes"),
            "bound": self.bound,
            "raw_bound": self.raw_bound,
            "cut_size": self.cut.len(),
            "cut_edges": self.cut.to_vec(),
            "quality": serde_json::to_value(&self.quality).expect("quality serializes"),
            "uncovered_fraction": self.uncovered_fraction,
            "fired": self.fired,
            "examined": self.examined,
        })
    }
}

fn rat_json(r: &Rat) -> serde_json::Value {
    serde_json::json!({
        "num": i64::try_from(*r.numer()).ok(),
        "den": i64::try_from(*r.denom()).ok(),
        "value": to_f64(r),
    })
}

/// Run the whole pipeline: build an ensemble on the source, measure its
/// cut fraction, pick a pattern radius, estimate pattern probabilities,
/// and replay them on the target; verify the result and report it next
/// to the theoretical bound.
pub fn transfer_experiment(
    source: &Graph,
    target: &Graph,
    config: &TransferConfig,
) -> Result<TransferReport> {
    let m = source.degree_bound();
    let target_max_deg = (0..target.vertex_count() as u32)
        .map(|v| target.degree(v))
        .max()
        .unwrap_or(0);
    if target_max_deg > m as usize {
        return Err(domain(format!(
            "target has degree {target_max_deg}, above the source bound {m}"
        )));
    }
    if let Some(r) = config.forced_radius {
        if r as usize <= config.k {
            return Err(domain(format!("forced radius {r} must exceed k {}", config.k)));
        }
    }

    let ensemble = build_ensemble(
        source,
        config.k,
        config.n_samples,
        derive_seed(config.seed, "ensemble", 0),
    )?;
    let eps_base = ensemble.mean_cut_fraction(source.vertex_count());

    if eps_base == rat_int(0) {
        // The source needs no cutting at this k. There is nothing to
        // learn; the only faithful transfer is the empty cut, which is
        // valid exactly when the target is already that small.
        let cut = EdgeCut::empty();
        let quality = verify_partition(target, &cut, config.k)?;
        if !quality.valid {
            return Err(domain(format!(
                "source ensemble cuts nothing, but the target has a component of {} > {} vertices",
                quality.k_max, config.k
            )));
        }
        let radius = config.forced_radius.unwrap_or(config.k as u32 + 1);
        return Ok(TransferReport {
            config: config.clone(),
            degree_bound: m,
            eps_base,
            eps0: rat_int(0),
            radius: RadiusSelection {
                radius,
                stabilized: true,
                forced: config.forced_radius.is_some(),
                history: vec![],
            },
            bound: None,
            raw_bound: None,
            cut,
            quality,
            uncovered_fraction: 0.0,
            fired: 0,
            examined: 0,
        });
    }

    let eps0 = eps_base / rat_int(2 * m as i128);
    let mult = root_multiplicities(
        source.vertex_count(),
        config.n_roots,
        derive_seed(config.seed, "roots", 0),
    )?;
    let mut cache = CodeCache::new();
    let mut budget = SetBudget::new(config.set_budget);

    let (selection, stats) = match config.forced_radius {
        Some(r) => {
            let stats = estimate_ptilde_with(source, &ensemble, r, &mult, &mut cache, &mut budget)?;
            let selection =
                RadiusSelection { radius: r, stabilized: true, forced: true, history: vec![] };
            (selection, stats)
        }
        None => choose_r_with(
            source,
            &ensemble,
            &eps0,
            config.r_max,
            &mult,
            &mut cache,
            &mut budget,
        )?,
    };

    let outcome = local_partition_seeded(
        target,
        &stats,
        &eps0,
        derive_seed(config.seed, "partition", 0),
        &mut cache,
        &mut budget,
    )?;
    let quality = verify_partition(target, &outcome.cut, config.k)?;
    let eps_f = to_f64(&eps_base);
    Ok(TransferReport {
        config: config.clone(),
        degree_bound: m,
        eps_base,
        eps0,
        radius: selection,
        bound: epsilon_tilde(eps_f, m).ok(),
        raw_bound: raw_transfer_bound(eps_f, m).ok(),
        uncovered_fraction: outcome.uncovered_fraction(target.vertex_count()),
        cut: outcome.cut,
        quality,
        fired: outcome.fired,
        examined: outcome.examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path, random_regular, torus};
    use crate::partition::WeightedCut;

    #[test]
    fn enumeration_frozen_counts() {
        let c4 = cycle(4).unwrap();
        let sets = enumerate_connected_sets(&c4, 0, 4).unwrap();
        assert_eq!(
            sets,
            vec![
                vec![0],
                vec![0, 1],
                vec![0, 1, 2],
                vec![0, 1, 2, 3],
                vec![0, 1, 3],
                vec![0, 2, 3],
                vec![0, 3],
            ]
        );
        let p5 = path(5).unwrap();
        let sets = enumerate_connected_sets(&p5, 2, 2).unwrap();
        assert_eq!(sets, vec![vec![1, 2], vec![2], vec![2, 3]]);
        assert_eq!(enumerate_connected_sets(&p5, 4, 1).unwrap(), vec![vec![4]]);
    }

    /// Bitmask reference: all connected subsets of size ≤ k containing v.
    fn brute_sets(g: &Graph, v: u32, k: usize) -> Vec<Vec<u32>> {
        let n = g.vertex_count();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            if mask & (1 << v) == 0 || mask.count_ones() as usize > k {
                continue;
            }
            let members: Vec<u32> = (0..n as u32).filter(|&u| mask & (1 << u) != 0).collect();
            if crate::rooted::is_connected_subset(g, &members) {
                out.push(members);
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn enumeration_matches_bitmask_reference() {
        for seed in 0..20u64 {
            let mut rng = KeyedRng::new(seed, "enumtest", &[]);
            let n = 4 + rng.next_below(6) as usize;
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for w in u + 1..n as u32 {
                    if rng.next_f64() < 0.35 {
                        edges.push((u, w));
                    }
                }
            }
            let g = Graph::new(n, &edges, None).unwrap();
            let v = rng.next_below(n as u64) as u32;
            let k = 1 + rng.next_below(4) as usize;
            assert_eq!(
                enumerate_connected_sets(&g, v, k).unwrap(),
                brute_sets(&g, v, k),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn global_enumeration_is_exact_and_duplicate_free() {
        for seed in 0..10u64 {
            let g = random_regular(3, 12, seed).unwrap();
            let k = 3;
            let mut seen = Vec::new();
            let mut budget = SetBudget::default();
            visit_all_sets(&g, k, &mut budget, |set| {
                seen.push(set.to_vec());
                Ok(())
            })
            .unwrap();
            let mut expected = Vec::new();
            for v in 0..12u32 {
                for s in brute_sets(&g, v, k) {
                    if s[0] == v {
                        expected.push(s);
                    }
                }
            }
            let mut seen_sorted = seen.clone();
            seen_sorted.sort_unstable();
            seen_sorted.dedup();
            assert_eq!(seen_sorted.len(), seen.len(), "duplicate set emitted");
            expected.sort_unstable();
            assert_eq!(seen_sorted, expected);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = torus(5).unwrap();
        let mut budget = SetBudget::new(10);
        let err = visit_all_sets(&g, 4, &mut budget, |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { budget: 10 }));
    }

    #[test]
    fn component_of_examples() {
        let c6 = cycle(6).unwrap();
        let cut = EdgeCut::new([(0, 1), (3, 4)]).unwrap();
        assert_eq!(component_of(&c6, &cut, 2).unwrap(), vec![1, 2, 3]);
        assert_eq!(component_of(&c6, &cut, 5).unwrap(), vec![0, 4, 5]);
        let all = EdgeCut::new(c6.edges()).unwrap();
        assert_eq!(component_of(&c6, &all, 3).unwrap(), vec![3]);
        assert_eq!(
            component_of(&c6, &EdgeCut::empty(), 0).unwrap(),
            vec![0, 1, 2, 3, 4, 5]
        );
    }

    fn two_sample_c4() -> (Graph, CutEnsemble) {
        let g = cycle(4).unwrap();
        let a = EdgeCut::new([(0, 1), (2, 3)]).unwrap();
        let b = EdgeCut::new([(1, 2), (0, 3)]).unwrap();
        let ens = CutEnsemble::new(
            2,
            vec![
                WeightedCut { cut: a, weight: rat(1, 2) },
                WeightedCut { cut: b, weight: rat(1, 2) },
            ],
        )
        .unwrap();
        (g, ens)
    }

    #[test]
    fn estimator_half_on_symmetric_two_sample_ensemble() {
        let (g, ens) = two_sample_c4();
        let stats = estimate_ptilde(&g, &ens, 3, 200, 7).unwrap();
        // Two codes: the singleton pattern (never a realized piece)
        // and the edge pattern (realized in exactly one of the two
        // samples at every occurrence).
        assert_eq!(stats.len(), 2);
        let values: Vec<Rat> = stats.iter().map(|(_, e)| e.ptilde).collect();
        assert!(values.contains(&rat(1, 2)));
        assert!(values.contains(&rat_int(0)));
    }

    #[test]
    fn estimator_one_when_every_occurrence_is_realized() {
        // Three disjoint edges, uncut: each edge pattern occurs once
        // per root and is always the realized component.
        let g = Graph::new(6, &[(0, 1), (2, 3), (4, 5)], None).unwrap();
        let ens = CutEnsemble::new(
            2,
            vec![WeightedCut { cut: EdgeCut::empty(), weight: rat_int(1) }],
        )
        .unwrap();
        let stats = estimate_ptilde(&g, &ens, 2, 100, 3).unwrap();
        let mut cache = CodeCache::new();
        let edge_code = cache.marked(&neighborhood_of_set(&g, &[0, 1], 2).unwrap()).unwrap();
        let single_code = cache.marked(&neighborhood_of_set(&g, &[0], 2).unwrap()).unwrap();
        assert_eq!(stats.lookup(&edge_code), rat_int(1));
        assert_eq!(stats.lookup(&single_code), rat_int(0));
        // Unseen codes read as 1.
        let foreign = cache
            .marked(&neighborhood_of_set(&cycle(5).unwrap(), &[0, 1, 2], 1).unwrap())
            .unwrap();
        assert_eq!(stats.entry(&foreign), None);
        assert_eq!(stats.lookup(&foreign), rat_int(1));
    }

    #[test]
    fn estimator_is_seed_deterministic() {
        let (g, ens) = two_sample_c4();
        let a = estimate_ptilde(&g, &ens, 3, 64, 5).unwrap();
        let b = estimate_ptilde(&g, &ens, 3, 64, 5).unwrap();
        assert_eq!(a, b);
    }

    fn block_ensemble_c8() -> (Graph, CutEnsemble) {
        let g = cycle(8).unwrap();
        let a = EdgeCut::new([(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let b = EdgeCut::new([(1, 2), (3, 4), (5, 6), (0, 7)]).unwrap();
        let ens = CutEnsemble::new(
            2,
            vec![
                WeightedCut { cut: a, weight: rat(1, 2) },
                WeightedCut { cut: b, weight: rat(1, 2) },
            ],
        )
        .unwrap();
        (g, ens)
    }

    #[test]
    fn radius_search_stabilizes_immediately_on_homogeneous_ensemble() {
        let (g, ens) = block_ensemble_c8();
        let sel = choose_r(&g, &ens, &rat(1, 10), 5, 128, 2).unwrap();
        assert_eq!(sel.radius, 3);
        assert!(sel.stabilized);
        assert!(!sel.forced);
        assert_eq!(sel.history.len(), 1);
        assert_eq!(sel.history[0].discrepancy, 0.0);
    }

    #[test]
    fn radius_search_rejects_empty_range() {
        let (g, ens) = block_ensemble_c8();
        assert!(choose_r(&g, &ens, &rat(1, 10), 2, 32, 2).is_err());
        assert!(choose_r(&g, &ens, &rat(1, 2), 5, 32, 2).is_err());
    }

    #[test]
    fn empty_table_fires_everything_with_k1() {
        // All-default statistics at k=1: every singleton fires, so the
        // cut is the whole edge set and every component is a singleton.
        let g = torus(4).unwrap();
        let stats = ComponentStats::new(1, 2, []).unwrap();
        let out = local_partition(&g, &stats, &rat(1, 10), 9).unwrap();
        assert_eq!(out.cut.len(), g.edge_count());
        assert!(out.uncovered.is_empty());
        assert_eq!(out.fired, 16);
        assert_eq!(out.examined, 16);
        let q = verify_partition(&g, &out.cut, 1).unwrap();
        assert!(q.valid);
        assert_eq!(q.k_max, 1);
    }

    #[test]
    fn zero_ptilde_everywhere_isolates_every_vertex() {
        // A table that assigns 0 to every pattern of the graph: no set
        // fires, everything is uncovered, all edges land in the cut.
        let g = cycle(6).unwrap();
        let mut cache = CodeCache::new();
        let mut entries = Vec::new();
        let mut budget = SetBudget::default();
        visit_all_sets(&g, 2, &mut budget, |set| {
            let code = cache.marked(&neighborhood_of_set(&g, set, 2).unwrap()).unwrap();
            entries.push((code, PatternEntry { ptilde: rat_int(0), occurrences: 1 }));
            Ok(())
        })
        .unwrap();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        let stats = ComponentStats::new(2, 2, entries).unwrap();
        let out = local_partition(&g, &stats, &rat(1, 10), 4).unwrap();
        assert_eq!(out.fired, 0);
        assert_eq!(out.uncovered, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(out.cut.len(), 6);
    }

    #[test]
    fn hard_component_bound_holds_under_random_stats() {
        for seed in 0..12u64 {
            let g = random_regular(3, 24, seed).unwrap();
            let mut cache = CodeCache::new();
            let mut rng = KeyedRng::new(seed, "fuzzstats", &[]);
            let mut entries: Vec<(CanonicalCode, PatternEntry)> = Vec::new();
            let mut budget = SetBudget::default();
            let k = 1 + (seed % 4) as usize;
            visit_all_sets(&g, k, &mut budget, |set| {
                let code = cache.marked(&neighborhood_of_set(&g, set, k as u32 + 1)?)?;
                let p = rat(rng.next_below(5) as i128, 4);
                entries.push((code, PatternEntry { ptilde: p, occurrences: 1 }));
                Ok(())
            })
            .unwrap();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            entries.dedup_by(|a, b| a.0 == b.0);
            let stats = ComponentStats::new(k, k as u32 + 1, entries).unwrap();
            let out = local_partition(&g, &stats, &rat(1, 8), seed).unwrap();
            let q = verify_partition(&g, &out.cut, k).unwrap();
            assert!(q.valid, "seed {seed}: k_max {} > k {k}", q.k_max);
        }
    }

    #[test]
    fn keyed_draws_are_equivariant_under_relabeling() {
        let g = cycle(6).unwrap();
        // Relabel i -> (5*i + 2) mod 6, a graph automorphism-free
        // permutation of ids.
        let perm: Vec<u32> = (0..6).map(|i| ((5 * i + 2) % 6) as u32).collect();
        let edges: Vec<(u32, u32)> = g
            .edges()
            .into_iter()
            .map(|(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        let h = Graph::new(6, &edges, None).unwrap();
        let stats = ComponentStats::new(2, 3, []).unwrap();
        let eps0 = rat(1, 5);
        let seed = 77;

        let mut cache_g = CodeCache::new();
        let mut budget_g = SetBudget::default();
        let base = local_partition_with(&g, &stats, &eps0, &mut cache_g, &mut budget_g, |set, p| {
            let key: Vec<u64> = set.iter().map(|&v| v as u64).collect();
            keyed_unit(seed, "fire", &key) < p
        })
        .unwrap();

        // On the relabeled graph, key each draw by the preimage ids:
        // the same coins land on corresponding sets.
        let inv = {
            let mut inv = vec![0u32; 6];
            for (i, &p) in perm.iter().enumerate() {
                inv[p as usize] = i as u32;
            }
            inv
        };
        let mut cache_h = CodeCache::new();
        let mut budget_h = SetBudget::default();
        let image = local_partition_with(&h, &stats, &eps0, &mut cache_h, &mut budget_h, |set, p| {
            let mut key: Vec<u64> = set.iter().map(|&v| inv[v as usize] as u64).collect();
            key.sort_unstable();
            keyed_unit(seed, "fire", &key) < p
        })
        .unwrap();

        let mapped = EdgeCut::new(
            base.cut.iter().map(|(u, v)| (perm[u as usize], perm[v as usize])),
        )
        .unwrap();
        assert_eq!(image.cut, mapped);
        assert_eq!(image.fired, base.fired);
    }

    #[test]
    fn quality_bound_values() {
        let v = epsilon_tilde(0.1, 4).unwrap();
        assert!((v - 1.31461).abs() < 1e-4, "got {v}");
        // With 2M/eps = e the logarithm is 1 and the bound is 3·eps.
        let eps = 2.0 / std::f64::consts::E;
        let v = epsilon_tilde(eps, 1).unwrap();
        assert!((v - 3.0 * eps).abs() < 1e-12);
        assert!(epsilon_tilde(0.0, 4).is_err());
        assert!(epsilon_tilde(1.0, 4).is_err());
        assert!(epsilon_tilde(1.5, 4).is_err());
        assert!(epsilon_tilde(0.5, 0).is_err());
    }

    #[test]
    fn raw_bound_versus_tilde() {
        // 2M/eps = 80 ≥ e^(3/4): the raw bound stays within 2x.
        let raw = raw_transfer_bound(0.1, 4).unwrap();
        let tilde = epsilon_tilde(0.1, 4).unwrap();
        assert!((raw - (4.0 * (80.0f64).ln() * 0.1 + 0.15)).abs() < 1e-12);
        assert!(raw <= 2.0 * tilde);
        // 2M/eps = 2/0.98 < e^(3/4): the factor-2 relation flips.
        let raw = raw_transfer_bound(0.98, 1).unwrap();
        let tilde = epsilon_tilde(0.98, 1).unwrap();
        assert!(raw > 2.0 * tilde);
    }

    #[test]
    fn transfer_small_torus_end_to_end() {
        let src = torus(5).unwrap();
        let tgt = torus(5).unwrap();
        let cfg = TransferConfig::new(3, 6, 5, 400, 11);
        let report = transfer_experiment(&src, &tgt, &cfg).unwrap();
        assert!(report.quality.valid);
        assert!(report.quality.k_max <= 3);
        assert_eq!(report.degree_bound, 4);
        assert!(report.eps_base > rat_int(0));
        assert_eq!(report.eps0, report.eps_base / rat_int(8));
        assert!(report.radius.radius > 3);
        // Determinism: the full report reproduces bit-for-bit.
        let again = transfer_experiment(&src, &tgt, &cfg).unwrap();
        assert_eq!(report.to_json(), again.to_json());
        // A different seed changes the draws.
        let mut other_cfg = cfg.clone();
        other_cfg.seed = 12;
        let other = transfer_experiment(&src, &tgt, &other_cfg).unwrap();
        assert!(other.quality.valid);
        assert_ne!(report.to_json(), other.to_json());
    }

    #[test]
    fn transfer_degenerate_source() {
        let src = path(3).unwrap();
        let small = path(4).unwrap();
        let cfg = TransferConfig::new(5, 3, 7, 50, 1);
        let report = transfer_experiment(&src, &small, &cfg).unwrap();
        assert!(report.cut.is_empty());
        assert_eq!(report.eps_base, rat_int(0));
        assert!(report.bound.is_none());
        let big = path(10).unwrap();
        assert!(transfer_experiment(&src, &big, &cfg).is_err());
    }

    #[test]
    fn transfer_rejects_overweight_target() {
        let src = cycle(6).unwrap();
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap();
        let cfg = TransferConfig::new(2, 3, 4, 50, 1);
        assert!(transfer_experiment(&src, &star, &cfg).is_err());
    }

    #[test]
    fn transfer_respects_budget() {
        let src = torus(6).unwrap();
        let mut cfg = TransferConfig::new(4, 4, 6, 200, 3);
        cfg.set_budget = 50;
        let err = transfer_experiment(&src, &src, &cfg).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { budget: 50 }));
    }

    #[test]
    fn forced_radius_skips_search() {
        let src = torus(5).unwrap();
        let mut cfg = TransferConfig::new(3, 4, 8, 300, 21);
        cfg.forced_radius = Some(4);
        let report = transfer_experiment(&src, &src, &cfg).unwrap();
        assert_eq!(report.radius.radius, 4);
        assert!(report.radius.forced);
        assert!(report.radius.history.is_empty());
        assert!(report.quality.valid);
        cfg.forced_radius = Some(3);
        assert!(transfer_experiment(&src, &src, &cfg).is_err());
    }

    #[test]
    fn stats_json_round_trip_and_spec_shape() {
        let (g, ens) = two_sample_c4();
        let stats = estimate_ptilde(&g, &ens, 3, 100, 5).unwrap();
        let v = stats.to_json();
        assert_eq!(v["k"], serde_json::json!(2));
        assert_eq!(v["R"], serde_json::json!(3));
        assert_eq!(v["default"], serde_json::json!(1.0));
        assert!(v["entries"][0]["code"].is_string());
        assert!(v["entries"][0]["ptilde"].is_number());
        assert!(v["entries"][0]["occurrences"].is_number());
        let back = ComponentStats::from_json(&v).unwrap();
        assert_eq!(stats, back);
        // Plain float entries (external files) are also accepted.
        let mut plain = v.clone();
        for e in plain["entries"].as_array_mut().unwrap() {
            e.as_object_mut().unwrap().remove("ptilde_num");
            e.as_object_mut().unwrap().remove("ptilde_den");
        }
        let from_float = ComponentStats::from_json(&plain).unwrap();
        assert_eq!(from_float.len(), stats.len());
        assert!(ComponentStats::from_json(&serde_json::json!({
            "k": 2, "R": 3, "default": 0.5, "entries": []
        }))
        .is_err());
    }

    #[test]
    fn stats_table_validates_probabilities() {
        let mut cache = CodeCache::new();
        let g = path(3).unwrap();
        let code = cache.marked(&neighborhood_of_set(&g, &[0], 1).unwrap()).unwrap();
        assert!(ComponentStats::new(
            2,
            1,
            [(code, PatternEntry { ptilde: rat(3, 2), occurrences: 1 })]
        )
        .is_err());
    }
}
