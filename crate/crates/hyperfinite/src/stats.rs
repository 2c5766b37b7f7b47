//! Root-neighborhood statistics and mass-transport checks.
//!
//! The local statistic of a graph at radius r is the distribution of
//! the canonical code of the radius-r ball at a uniform random root.
//! Distributions store raw counts, so masses are exact rationals and
//! total-variation distances come out exact as well.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::{CanonicalCode, CodeCache};
use crate::error::{domain, Error, Result};
use crate::exact::{rat, to_f64, Rat};
use crate::graph::Graph;
use crate::rng::KeyedRng;
use crate::rooted::ball;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodDistribution {
    radius: u32,
    counts: BTreeMap<CanonicalCode, u64>,
    total: u64,
}

impl NeighborhoodDistribution {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Number of root draws behind the distribution.
    pub fn sample_count(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, code: &CanonicalCode) -> u64 {
        self.counts.get(code).copied().unwrap_or(0)
    }

    pub fn mass(&self, code: &CanonicalCode) -> Rat {
        rat(self.count(code) as i128, self.total as i128)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalCode, u64)> {
        self.counts.iter().map(|(c, &n)| (c, n))
    }
}

/// Exact local statistic: the ball code distribution over all roots.
pub fn psi(g: &Graph, radius: u32) -> Result<NeighborhoodDistribution> {
    psi_over_roots(g, radius, 0..g.vertex_count() as u32)
}

/// Local statistic over an explicit multiset of roots (the exhaustive
/// mode `0..n` reproduces [`psi`] exactly).
pub fn psi_over_roots(
    g: &Graph,
    radius: u32,
    roots: impl IntoIterator<Item = u32>,
) -> Result<NeighborhoodDistribution> {
    let mut cache = CodeCache::new();
    let mut counts: BTreeMap<CanonicalCode, u64> = BTreeMap::new();
    let mut total = 0u64;
    for o in roots {
        let b = ball(g, o, radius)?;
        *counts.entry(cache.rooted(&b)?).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return Err(domain("statistic needs at least one root"));
    }
    Ok(NeighborhoodDistribution { radius, counts, total })
}

/// Monte-Carlo local statistic from `n_samples` uniform roots drawn
/// with the given seed.
pub fn sample_psi(
    g: &Graph,
    radius: u32,
    n_samples: u64,
    seed: u64,
) -> Result<NeighborhoodDistribution> {
    let n = g.vertex_count() as u64;
    if n == 0 {
        return Err(domain("statistic needs at least one root"));
    }
    if n_samples == 0 {
        return Err(domain("n_samples must be positive"));
    }
    let mut rng = KeyedRng::new(seed, "sample_psi", &[]);
    let roots = (0..n_samples).map(move |_| rng.next_below(n) as u32);
    psi_over_roots(g, radius, roots)
}

/// Total variation distance between two statistics of equal radius.
pub fn tv_distance_exact(
    a: &NeighborhoodDistribution,
    b: &NeighborhoodDistribution,
) -> Result<Rat> {
    if a.radius != b.radius {
        return Err(Error::RadiusMismatch { a: a.radius, b: b.radius });
    }
    let mut acc = Rat::from_integer(0);
    let keys = a.counts.keys().chain(b.counts.keys());
    let mut prev: Option<&CanonicalCode> = None;
    let mut sorted: Vec<&CanonicalCode> = keys.collect();
    sorted.sort_unstable();
    for code in sorted {
        if prev == Some(code) {
            continue;
        }
        prev = Some(code);
        let d = a.mass(code) - b.mass(code);
        acc += if d < Rat::from_integer(0) { -d } else { d };
    }
    Ok(acc / Rat::from_integer(2))
}

pub fn tv_distance(a: &NeighborhoodDistribution, b: &NeighborhoodDistribution) -> Result<f64> {
    Ok(to_f64(&tv_distance_exact(a, b)?))
}

/// The closed catalog of local pair functions. Every member is
/// nonnegative, integer-valued, and vanishes beyond its declared radius
/// (at most 3), so sums over a component reduce to sums over a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalFunction {
    /// 1 when x and y are adjacent.
    Edge,
    /// deg(x) when x and y are adjacent.
    DegEdge,
    /// 1 when dist(x, y) equals the band (1..=3).
    DistBand(u32),
    /// Number of triangles through the edge {x, y}.
    TriEdge,
}

impl LocalFunction {
    pub const CATALOG: [LocalFunction; 6] = [
        LocalFunction::Edge,
        LocalFunction::DegEdge,
        LocalFunction::DistBand(1),
        LocalFunction::DistBand(2),
        LocalFunction::DistBand(3),
        LocalFunction::TriEdge,
    ];

    /// Pairs farther apart than this evaluate to 0.
    pub fn radius(self) -> u32 {
        match self {
            LocalFunction::Edge | LocalFunction::DegEdge | LocalFunction::TriEdge => 1,
            LocalFunction::DistBand(d) => d,
        }
    }

    pub fn eval(self, g: &Graph, x: u32, y: u32) -> u64 {
        if x == y {
            return 0;
        }
        let dist = g.distances_within(x, self.radius())[y as usize];
        match dist {
            Some(d) => self.eval_at_distance(g, x, y, d),
            None => 0,
        }
    }

    fn eval_at_distance(self, g: &Graph, x: u32, y: u32, dist: u32) -> u64 {
        match self {
            LocalFunction::Edge => (dist == 1) as u64,
            LocalFunction::DegEdge => {
                if dist == 1 {
                    g.degree(x) as u64
                } else {
                    0
                }
            }
            LocalFunction::DistBand(b) => (b >= 1 && dist == b) as u64,
            LocalFunction::TriEdge => {
                if dist == 1 {
                    common_neighbors(g, x, y)
                } else {
                    0
                }
            }
        }
    }
}

fn common_neighbors(g: &Graph, x: u32, y: u32) -> u64 {
    let (a, b) = (g.neighbors(x), g.neighbors(y));
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

impl std::str::FromStr for LocalFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<LocalFunction> {
        match s {
            "edge" => Ok(LocalFunction::Edge),
            "deg_edge" => Ok(LocalFunction::DegEdge),
            "tri_edge" => Ok(LocalFunction::TriEdge),
            other => {
                if let Some(band) = other.strip_prefix("dist_band:") {
                    let b: u32 = band
                        .parse()
                        .map_err(|_| domain(format!("bad distance band {band:?}")))?;
                    if !(1..=3).contains(&b) {
                        return Err(domain("distance band must be in 1..=3"));
                    }
                    Ok(LocalFunction::DistBand(b))
                } else {
                    Err(domain(format!(
                        "unknown function {other:?}; expected edge, deg_edge, dist_band:<r>, or tri_edge"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for LocalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalFunction::Edge => f.write_str("edge"),
            LocalFunction::DegEdge => f.write_str("deg_edge"),
            LocalFunction::DistBand(b) => write!(f, "dist_band:{b}"),
            LocalFunction::TriEdge => f.write_str("tri_edge"),
        }
    }
}

/// Both sides of the mass-transport identity, accumulated exactly. For
/// a finite graph the two sides agree edge-for-edge by double counting;
/// `discrepancy` is therefore a correctness probe, not an estimate.
#[derive(Clone, Debug)]
pub struct MtpReport {
    pub function: LocalFunction,
    pub vertex_count: usize,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl MtpReport {
    pub fn discrepancy(&self) -> Rat {
        let d = self.lhs - self.rhs;
        if d < Rat::from_integer(0) {
            -d
        } else {
            d
        }
    }

    pub fn lhs_f64(&self) -> f64 {
        to_f64(&self.lhs)
    }

    pub fn rhs_f64(&self) -> f64 {
        to_f64(&self.rhs)
    }
}

/// Evaluate both sides of the mass-transport identity for `f`:
/// the expected outgoing mass (1/n)·Σ_o Σ_x f(x, o) against the
/// expected incoming mass (1/n)·Σ_o Σ_y f(o, y), each sum ranging over
/// the root's component (equivalently its radius-r ball, since f
/// vanishes farther out).
pub fn mtp_check(g: &Graph, f: LocalFunction) -> Result<MtpReport> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(domain("mass transport needs at least one vertex"));
    }
    let radius = f.radius();
    let mut lhs_sum: i128 = 0;
    let mut rhs_sum: i128 = 0;
    for o in 0..n as u32 {
        let dist = g.distances_within(o, radius);
        for x in 0..n as u32 {
            if x == o {
                continue;
            }
            if let Some(d) = dist[x as usize] {
                lhs_sum += f.eval_at_distance(g, x, o, d) as i128;
                rhs_sum += f.eval_at_distance(g, o, x, d) as i128;
            }
        }
    }
    Ok(MtpReport {
        function: f,
        vertex_count: n,
        lhs: rat(lhs_sum, n as i128),
        rhs: rat(rhs_sum, n as i128),
    })
}

// --- serialization -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    radius: u32,
    sample_count: u64,
    entries: Vec<DistributionEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct DistributionEntryJson {
    code: String,
    mass_num: u64,
    mass_den: u64,
}

impl NeighborhoodDistribution {
    pub fn to_json(&self) -> serde_json::Value {
        let entries = self
            .counts
            .iter()
            .map(|(code, &count)| {
                let m = rat(count as i128, self.total as i128);
                DistributionEntryJson {
                    code: code.to_hex(),
                    mass_num: *m.numer() as u64,
                    mass_den: *m.denom() as u64,
                }
            })
            .collect();
        serde_json::to_value(DistributionJson {
            radius: self.radius,
            sample_count: self.total,
            entries,
        })
        .expect("distribution serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<NeighborhoodDistribution> {
        let raw: DistributionJson = serde_json::from_value(value.clone())?;
        if raw.sample_count == 0 {
            return Err(domain("sample_count must be positive"));
        }
        let mut counts = BTreeMap::new();
        let mut total_mass = rat(0, 1);
        for e in &raw.entries {
            if e.mass_den == 0 {
                return Err(domain("mass_den must be positive"));
            }
            let num = e.mass_num as u128 * raw.sample_count as u128;
            if num % e.mass_den as u128 != 0 {
                return Err(domain(format!(
                    "mass {}/{} is not a multiple of 1/{}",
                    e.mass_num, e.mass_den, raw.sample_count
                )));
            }
            let count = (num / e.mass_den as u128) as u64;
            let code = CanonicalCode::from_hex(&e.code)?;
            if counts.insert(code, count).is_some() {
                return Err(domain("duplicate code in distribution"));
            }
            total_mass += rat(e.mass_num as i128, e.mass_den as i128);
        }
        if total_mass != rat(1, 1) {
            return Err(domain("distribution masses must sum to 1"));
        }
        Ok(NeighborhoodDistribution {
            radius: raw.radius,
            counts,
            total: raw.sample_count,
        })
    }
}
