//! Brute-force ground truth at desk scale.
//!
//! A pair `(F, G)` is cross t-intersecting iff `G` lies inside the closure
//! `F' = {y : |x cap y| >= t for all x in F}`. Maximal pairs are closed
//! (`G = F'`, `F = G'`), so the uniform search runs Close-by-One over closed
//! sets with a product bound, and the cube search walks the up-sets, which
//! contain every closed set.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{ratstr, Rational};
use crate::hamming::BiasedCube;
use crate::johnson::UniformGround;

/// Largest vertex count the bitset searches accept.
pub const ORACLE_CAP: usize = 128;
/// Largest cube dimension for up-set enumeration.
pub const MEASURE_MAX_N: u32 = 5;

pub type VertexSet = u128;

/// Compatibility between two copies of one vertex set: `x ~ y` iff `|x cap y| >= t`.
#[derive(Clone, Debug)]
pub struct ConflictGraph {
    vertices: Vec<u64>,
    compat: Vec<VertexSet>,
    t: u32,
}

impl ConflictGraph {
    pub fn new(vertices: Vec<u64>, t: u32) -> Result<Self> {
        if vertices.len() > ORACLE_CAP {
            return Err(Error::CapExceeded {
                size: vertices.len(),
                cap: ORACLE_CAP,
            });
        }
        let compat = vertices
            .iter()
            .map(|&x| {
                vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, &y)| (x & y).count_ones() >= t)
                    .fold(0, |m, (i, _)| m | (1 << i))
            })
            .collect();
        Ok(ConflictGraph { vertices, compat, t })
    }

    pub fn uniform(n: u32, k: u32, t: u32) -> Result<Self> {
        let ground = UniformGround::new(n, k, ORACLE_CAP)?;
        Self::new(ground.subsets().to_vec(), t)
    }

    pub fn cube(n: u32, t: u32) -> Result<Self> {
        if n > 7 {
            return Err(Error::CapExceeded {
                size: 1usize << n.min(63),
                cap: ORACLE_CAP,
            });
        }
        Self::new((0..1u64 << n).collect(), t)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn compat(&self, v: usize) -> VertexSet {
        self.compat[v]
    }

    pub fn full(&self) -> VertexSet {
        if self.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.len()) - 1
        }
    }

    /// The vertices compatible with every member of `f`; the full set for `f = {}`.
    pub fn closure(&self, f: VertexSet) -> VertexSet {
        members(f).fold(self.full(), |acc, v| acc & self.compat[v])
    }

    pub fn masks(&self, s: VertexSet) -> Vec<u64> {
        members(s).map(|v| self.vertices[v]).collect()
    }

    pub fn set_of(&self, masks: &[u64]) -> VertexSet {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, x)| masks.contains(x))
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn is_cross_intersecting(&self, f: VertexSet, g: VertexSet) -> bool {
        g & !self.closure(f) == 0
    }
}

pub fn members(s: VertexSet) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(v)
    })
}

fn below(v: usize) -> VertexSet {
    (1u128 << v) - 1
}

/// A pair of families as vertex sets of one [`ConflictGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyPair {
    pub f: VertexSet,
    pub g: VertexSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    /// `F = G = {A : T subset A}` for a t-set `T`.
    StarPair(u64),
    /// `F = G = {A : |A cap T'| >= 3}` for a 4-set `T'`.
    KneserType(u64),
    Other,
}

impl Classification {
    pub fn kind(&self) -> &'static str {
        match self {
            Classification::StarPair(_) => "star_pair",
            Classification::KneserType(_) => "kneser_type",
            Classification::Other => "other",
        }
    }

    pub fn witness(&self) -> Option<u64> {
        match self {
            Classification::StarPair(t) | Classification::KneserType(t) => Some(*t),
            Classification::Other => None,
        }
    }
}

/// Subsets of `[n]` with exactly `r` elements, as masks.
fn r_subsets(n: u32, r: u32) -> impl Iterator<Item = u64> {
    (0..1u64 << n).filter(move |m| m.count_ones() == r)
}

/// Matches a pair against the star and `|A cap T'| >= 3` templates.
pub fn classify(graph: &ConflictGraph, n: u32, pair: &FamilyPair) -> Classification {
    if pair.f != pair.g {
        return Classification::Other;
    }
    let family_where = |pred: &dyn Fn(u64) -> bool| {
        graph
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, &x)| pred(x))
            .fold(0u128, |m, (i, _)| m | (1 << i))
    };
    if let Some(t) = r_subsets(n, graph.t).find(|&t| family_where(&|x| x & t == t) == pair.f) {
        return Classification::StarPair(t);
    }
    if graph.t == 2 && n >= 4 {
        if let Some(t) =
            r_subsets(n, 4).find(|&t| family_where(&|x| (x & t).count_ones() >= 3) == pair.f)
        {
            return Classification::KneserType(t);
        }
    }
    Classification::Other
}

/// One row of the classification summary.
#[derive(Clone, Debug, Serialize)]
pub struct ClassCount {
    #[serde(rename = "type")]
    pub kind: &'static str,
    /// 1-based elements of `T` or `T'`.
    pub witness_set: Option<Vec<u32>>,
    pub count: usize,
}

pub fn elements(mask: u64) -> Vec<u32> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// The exact optimum with every optimal pair and its classification.
#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub setting: &'static str,
    pub n: u32,
    pub k: Option<u32>,
    pub p: Option<Rational>,
    pub t: u32,
    pub optimum: Rational,
    pub graph: ConflictGraph,
    pub pairs: Vec<FamilyPair>,
    pub classes: Vec<Classification>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    setting: &'a str,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", with = "ratstr::option")]
    p: Option<Rational>,
    t: u32,
    #[serde(with = "ratstr")]
    optimum: Rational,
    pair_count: usize,
    all_f_equals_g: bool,
    classes: Vec<ClassCount>,
}

impl ExtremalReport {
    fn new(
        setting: &'static str,
        n: u32,
        k: Option<u32>,
        p: Option<Rational>,
        optimum: Rational,
        graph: ConflictGraph,
        mut pairs: Vec<FamilyPair>,
    ) -> Self {
        pairs.sort();
        pairs.dedup();
        let classes = pairs.iter().map(|pr| classify(&graph, n, pr)).collect();
        ExtremalReport {
            setting,
            n,
            k,
            p,
            t: graph.t,
            optimum,
            graph,
            pairs,
            classes,
        }
    }

    pub fn count(&self, kind: &str) -> usize {
        self.classes.iter().filter(|c| c.kind() == kind).count()
    }

    pub fn all_f_equals_g(&self) -> bool {
        self.pairs.iter().all(|p| p.f == p.g)
    }

    pub fn family_masks(&self, pair: &FamilyPair) -> (Vec<u64>, Vec<u64>) {
        (self.graph.masks(pair.f), self.graph.masks(pair.g))
    }

    pub fn class_counts(&self) -> Vec<ClassCount> {
        let mut by: BTreeMap<(u8, Option<u64>), (&'static str, usize)> = BTreeMap::new();
        for c in &self.classes {
            let order = match c {
                Classification::StarPair(_) => 0,
                Classification::KneserType(_) => 1,
                Classification::Other => 2,
            };
            by.entry((order, c.witness())).or_insert((c.kind(), 0)).1 += 1;
        }
        by.into_iter()
            .map(|((_, w), (kind, count))| ClassCount {
                kind,
                witness_set: w.map(elements),
                count,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            setting: self.setting,
            n: self.n,
            k: self.k,
            p: self.p.clone(),
            t: self.t,
            optimum: self.optimum.clone(),
            pair_count: self.pairs.len(),
            all_f_equals_g: self.all_f_equals_g(),
            classes: self.class_counts(),
        })
        .expect("report serializes")
    }
}

struct Cbo<'a> {
    graph: &'a ConflictGraph,
    best: &'a AtomicU64,
}

impl Cbo<'_> {
    fn visit(&self, f: VertexSet, g: VertexSet, start: usize, out: &mut Vec<(u64, FamilyPair)>) {
        let product = f.count_ones() as u64 * g.count_ones() as u64;
        let best = self.best.fetch_max(product, Ordering::Relaxed).max(product);
        if product == best {
            out.push((product, FamilyPair { f, g }));
        }
        let candidates = self.graph.full() & !below(start) & !f;
        if candidates == 0 {
            return;
        }
        let max_g = members(candidates)
            .map(|v| (g & self.graph.compat[v]).count_ones())
            .max()
            .unwrap_or(0) as u64;
        let bound = (f.count_ones() + candidates.count_ones()) as u64 * max_g;
        if bound < self.best.load(Ordering::Relaxed) {
            return;
        }
        for v in members(candidates) {
            self.branch(f, g, v, out);
        }
    }

    fn branch(&self, f: VertexSet, g: VertexSet, v: usize, out: &mut Vec<(u64, FamilyPair)>) {
        let g2 = g & self.graph.compat[v];
        let f2 = self.graph.closure(g2);
        if f2 & below(v) == f & below(v) {
            self.visit(f2, g2, v + 1, out);
        }
    }
}

/// Every closed pair reachable under the product bound, collected in parallel.
fn closed_pair_maxima(graph: &ConflictGraph) -> (u64, Vec<FamilyPair>) {
    let best = AtomicU64::new(0);
    // seed with the closed pairs generated by single vertices
    for v in 0..graph.len() {
        let g = graph.compat[v];
        let f = graph.closure(g);
        best.fetch_max(f.count_ones() as u64 * g.count_ones() as u64, Ordering::Relaxed);
    }
    let search = Cbo { graph, best: &best };
    let g0 = graph.full();
    let f0 = graph.closure(g0);
    let mut found: Vec<(u64, FamilyPair)> = Vec::new();
    let product = f0.count_ones() as u64 * g0.count_ones() as u64;
    best.fetch_max(product, Ordering::Relaxed);
    found.push((product, FamilyPair { f: f0, g: g0 }));
    let children: Vec<usize> = members(graph.full() & !f0).collect();
    let batches: Vec<Vec<(u64, FamilyPair)>> = children
        .par_iter()
        .map(|&v| {
            let mut out = Vec::new();
            search.branch(f0, g0, v, &mut out);
            out
        })
        .collect();
    found.extend(batches.into_iter().flatten());
    let top = best.load(Ordering::Relaxed);
    let pairs = found
        .into_iter()
        .filter(|(p, _)| *p == top)
        .map(|(_, pr)| pr)
        .collect();
    (top, pairs)
}

/// Exact maximum of `|F||G|` over cross t-intersecting `F, G` of k-subsets of `[n]`.
pub fn max_product_uniform(n: u32, k: u32, t: u32) -> Result<ExtremalReport> {
    if k > n || k == 0 {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let graph = ConflictGraph::uniform(n, k, t)?;
    let (top, pairs) = closed_pair_maxima(&graph);
    Ok(ExtremalReport::new(
        "uniform",
        n,
        Some(k),
        None,
        Rational::from_integer(top.into()),
        graph,
        pairs,
    ))
}

/// All up-sets of `2^[n]` as vertex sets over masks `0..2^n`.
pub fn up_sets(n: u32) -> Vec<VertexSet> {
    let mut order: Vec<u64> = (0..1u64 << n).collect();
    order.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut out = Vec::new();
    fn walk(n: u32, order: &[u64], i: usize, cur: VertexSet, out: &mut Vec<VertexSet>) {
        let Some(&x) = order.get(i) else {
            out.push(cur);
            return;
        };
        walk(n, order, i + 1, cur, out);
        let supersets_in = (0..n)
            .filter(|b| x >> b & 1 == 0)
            .all(|b| cur >> (x | 1 << b) & 1 == 1);
        if supersets_in {
            walk(n, order, i + 1, cur | 1 << x, out);
        }
    }
    walk(n, &order, 0, 0, &mut out);
    out
}

/// The smallest up-set containing `family`.
pub fn up_closure(n: u32, family: &[u64]) -> Vec<u64> {
    (0..1u64 << n)
        .filter(|&y| family.iter().any(|&x| x & !y == 0))
        .collect()
}

/// Exact maximum of `mu_p(F) mu_p(G)` over cross t-intersecting families in `2^[n]`.
pub fn max_product_measure(n: u32, p: &Rational, t: u32) -> Result<ExtremalReport> {
    if n == 0 || n > MEASURE_MAX_N {
        return Err(Error::OutOfRange(format!(
            "up-set enumeration needs 1 <= n <= {MEASURE_MAX_N}, got {n}"
        )));
    }
    let cube = BiasedCube::new(n, p.clone())?;
    let graph = ConflictGraph::cube(n, t)?;
    let measure = |s: VertexSet| -> Rational { members(s).map(|v| cube.weight(v as u64).clone()).sum() };
    let scored: Vec<(Rational, FamilyPair)> = up_sets(n)
        .into_par_iter()
        .map(|f| {
            let g = graph.closure(f);
            (measure(f) * measure(g), FamilyPair { f, g })
        })
        .collect();
    let top = scored
        .iter()
        .map(|(v, _)| v.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let pairs = scored
        .into_iter()
        .filter(|(v, _)| v == &top)
        .map(|(_, pr)| pr)
        .collect();
    Ok(ExtremalReport::new("measure", n, None, Some(p.clone()), top, graph, pairs))
}

/// Largest t-intersecting family of k-sets and all families attaining it.
pub fn max_single_family(n: u32, k: u32, t: u32) -> Result<(usize, Vec<Vec<u64>>, Vec<Classification>)> {
    let graph = ConflictGraph::uniform(n, k, t)?;
    let adj: Vec<VertexSet> = (0..graph.len())
        .map(|v| graph.compat[v] & !(1u128 << v))
        .collect();
    // a set x only belongs to a t-intersecting family if |x| >= t
    let allowed = (0..graph.len())
        .filter(|&v| graph.compat[v] >> v & 1 == 1)
        .fold(0u128, |m, v| m | 1 << v);
    let mut best = 0usize;
    let mut cliques: Vec<VertexSet> = Vec::new();
    bron_kerbosch(&adj, 0, allowed, 0, &mut best, &mut cliques);
    let classes = cliques
        .iter()
        .map(|&c| classify(&graph, n, &FamilyPair { f: c, g: c }))
        .collect();
    let families = cliques.iter().map(|&c| graph.masks(c)).collect();
    Ok((best, families, classes))
}

fn bron_kerbosch(
    adj: &[VertexSet],
    r: VertexSet,
    p: VertexSet,
    x: VertexSet,
    best: &mut usize,
    out: &mut Vec<VertexSet>,
) {
    if p == 0 && x == 0 {
        let size = r.count_ones() as usize;
        if size > *best {
            *best = size;
            out.clear();
        }
        if size == *best {
            out.push(r);
        }
        return;
    }
    if ((r.count_ones() + p.count_ones()) as usize) < *best {
        return;
    }
    let pivot = members(p | x)
        .max_by_key(|&u| (p & adj[u]).count_ones())
        .expect("p | x nonempty");
    let (mut p, mut x) = (p, x);
    for v in members(p & !adj[pivot]) {
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], best, out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}
