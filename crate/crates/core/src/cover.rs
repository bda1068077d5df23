//! Hypergraph vertex covers: the greedy algorithm and its harmonic-number
//! guarantee, exhaustive packing/cover numbers for tiny instances, and the
//! `T_k` families used by the matching protocol.
//!
//! `T_k` is a set of `k`-subsets `X ⊆ [n]` such that every matching of size
//! `k` in `K_n` crosses some member (each matching edge has exactly one end
//! in `X`). It is a vertex cover of the hypergraph whose vertices are the
//! `k`-subsets and whose edges are the `k`-matchings, with `X ∈ M` when `M`
//! crosses `X`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combi::{matchings, subsets, Graph, Matching, SubsetFilter, SubsetMask};
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::{ln_bounds, Rational};

/// Hypergraph given by its edges as sorted lists of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    edges: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertex_labels: Vec<String>, edge_labels: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Self> {
        if edge_labels.len() != edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} edge labels for {} edges",
                edge_labels.len(),
                edges.len()
            )));
        }
        let nv = vertex_labels.len();
        let mut incident = vec![Vec::new(); nv];
        let mut sorted = Vec::with_capacity(edges.len());
        for (e, mut verts) in edges.into_iter().enumerate() {
            verts.sort_unstable();
            verts.dedup();
            if let Some(&v) = verts.iter().find(|&&v| v >= nv) {
                return Err(out_of_range("vertex", v, format!("0..{nv}")));
            }
            for &v in &verts {
                incident[v].push(e);
            }
            sorted.push(verts);
        }
        Ok(Hypergraph {
            vertex_labels,
            edge_labels,
            edges: sorted,
            incident,
        })
    }

    /// Like [`Hypergraph::new`] but rejects repeated rows or columns of the
    /// incidence matrix.
    pub fn new_simple(vertex_labels: Vec<String>, edge_labels: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Self> {
        let h = Self::new(vertex_labels, edge_labels, edges)?;
        if !h.is_simple() {
            return Err(Error::Invalid("hypergraph has repeated incidence rows or columns".into()));
        }
        Ok(h)
    }

    /// Unlabelled hypergraph on vertices `0..nv`.
    pub fn from_edges(nv: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let ne = edges.len();
        Self::new(
            (0..nv).map(|v| v.to_string()).collect(),
            (0..ne).map(|e| format!("e{e}")).collect(),
            edges,
        )
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn edge_labels(&self) -> &[String] {
        &self.edge_labels
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Δ, the largest vertex degree.
    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        let rows: HashSet<&Vec<usize>> = self.incident.iter().collect();
        let cols: HashSet<&Vec<usize>> = self.edges.iter().collect();
        rows.len() == self.incident.len() && cols.len() == self.edges.len()
    }

    pub fn covers(&self, picked: &[usize]) -> bool {
        let chosen: HashSet<usize> = picked.iter().copied().collect();
        self.edges.iter().all(|e| e.iter().any(|v| chosen.contains(v)))
    }
}

/// Trace of the greedy algorithm: `degrees[j]` edges were newly covered by
/// `picked[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub picked: Vec<usize>,
    pub degrees: Vec<usize>,
}

impl CoverResult {
    pub fn size(&self) -> usize {
        self.picked.len()
    }

    /// `t[k]` = number of steps that covered exactly `k` new edges.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let max = self.degrees.iter().copied().max().unwrap_or(0);
        let mut t = vec![0; max + 1];
        for &d in &self.degrees {
            t[d] += 1;
        }
        t
    }
}

/// Repeatedly picks the vertex covering the most uncovered edges, lowest
/// index first on ties.
pub fn greedy_cover(h: &Hypergraph) -> Result<CoverResult> {
    if let Some(e) = h.edges.iter().position(Vec::is_empty) {
        return Err(Error::EmptyEdge(h.edge_labels[e].clone()));
    }
    let mut live: Vec<usize> = h.incident.iter().map(Vec::len).collect();
    let mut covered = vec![false; h.num_edges()];
    let mut remaining = h.num_edges();
    let mut result = CoverResult {
        picked: Vec::new(),
        degrees: Vec::new(),
    };
    while remaining > 0 {
        let (v, &d) = live
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty edge implies a vertex");
        for &e in &h.incident[v] {
            if !covered[e] {
                covered[e] = true;
                for &w in &h.edges[e] {
                    live[w] -= 1;
                }
            }
        }
        remaining -= d;
        result.picked.push(v);
        result.degrees.push(d);
    }
    Ok(result)
}

/// `1 + 1/2 + … + 1/d`.
pub fn harmonic(d: usize) -> Rational {
    (1..=d as i64).map(|i| Rational::new(1, i).expect("positive")).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicCheck {
    pub cover_size: usize,
    pub max_degree: usize,
    pub harmonic: Rational,
    pub fractional_cost: Rational,
    pub holds: bool,
}

/// Checks `|T| ≤ H(Δ)·Σ_v t_v` for the greedy cover `T` and a fractional
/// cover `t`, which is verified feasible first.
pub fn harmonic_check(h: &Hypergraph, cover: &CoverResult, fractional: &[Rational]) -> Result<HarmonicCheck> {
    if fractional.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} vertices",
            fractional.len(),
            h.num_vertices()
        )));
    }
    if let Some(v) = fractional.iter().position(Rational::is_negative) {
        return Err(Error::InfeasibleCover(format!("negative weight on vertex {}", h.vertex_labels[v])));
    }
    for (e, verts) in h.edges.iter().enumerate() {
        let total: Rational = verts.iter().map(|&v| &fractional[v]).sum();
        if total < Rational::one() {
            return Err(Error::InfeasibleCover(h.edge_labels[e].clone()));
        }
    }
    if !h.covers(&cover.picked) {
        return Err(Error::Invalid("greedy result is not a cover".into()));
    }
    let fractional_cost: Rational = fractional.iter().sum();
    let max_degree = h.max_degree();
    let harmonic = harmonic(max_degree);
    let holds = Rational::from(cover.size()) <= &harmonic * &fractional_cost;
    Ok(HarmonicCheck {
        cover_size: cover.size(),
        max_degree,
        harmonic,
        fractional_cost,
        holds,
    })
}

pub const MAX_BRUTE: usize = 20;

/// Exact matching number ν and cover number τ by exhaustive search.
pub fn brute_nu_tau(h: &Hypergraph) -> Result<(usize, usize)> {
    let (nv, ne) = (h.num_vertices(), h.num_edges());
    if nv > MAX_BRUTE {
        return Err(out_of_range("vertices", nv, format!("0..={MAX_BRUTE}")));
    }
    if ne > MAX_BRUTE {
        return Err(out_of_range("edges", ne, format!("0..={MAX_BRUTE}")));
    }
    if let Some(e) = h.edges.iter().position(Vec::is_empty) {
        return Err(Error::EmptyEdge(h.edge_labels[e].clone()));
    }
    let masks: Vec<u32> = h
        .edges
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();

    fn packing(masks: &[u32], start: usize, used: u32) -> usize {
        (start..masks.len())
            .filter(|&e| masks[e] & used == 0)
            .map(|e| 1 + packing(masks, e + 1, used | masks[e]))
            .max()
            .unwrap_or(0)
    }
    let nu = packing(&masks, 0, 0);

    let tau = (0u32..1 << nv)
        .filter(|c| masks.iter().all(|m| m & c != 0))
        .map(u32::count_ones)
        .min()
        .expect("the full vertex set is a cover") as usize;
    if nu > tau {
        return Err(Error::Internal(format!("packing {nu} exceeds cover {tau}")));
    }
    Ok((nu, tau))
}

pub const MAX_TK_N: usize = 12;

/// The compatibility hypergraph: `k`-subsets of `[n]` against `k`-matchings
/// of `K_n`.
pub fn compatibility_hypergraph(n: usize, k: usize) -> Result<Hypergraph> {
    check_tk_range(n, k)?;
    let sets = subsets(n, SubsetFilter::FixedSize(k))?;
    let index: std::collections::HashMap<u32, usize> = sets.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();
    let ms = matchings(&Graph::complete(n), Some(k));
    let edges = ms.iter().map(|m| crossing_sets(m).map(|b| index[&b]).collect()).collect();
    Hypergraph::new(
        sets.iter().map(SubsetMask::label).collect(),
        ms.iter().map(Matching::label).collect(),
        edges,
    )
}

/// Bitmasks of the `2^k` sets with exactly one end of every edge of `m`.
fn crossing_sets(m: &Matching) -> impl Iterator<Item = u32> + '_ {
    let k = m.size();
    (0u32..1 << k).map(move |choice| {
        m.edges()
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &(u, v))| acc | 1 << ((if choice >> i & 1 == 1 { v } else { u }) - 1))
    })
}

fn check_tk_range(n: usize, k: usize) -> Result<()> {
    if n > MAX_TK_N {
        return Err(out_of_range("n", n, format!("2..={MAX_TK_N}")));
    }
    if k == 0 || k > n / 2 {
        return Err(out_of_range("k", k, format!("1..={}", n / 2)));
    }
    Ok(())
}

/// A family `T_k` with its greedy trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TkFamily {
    pub n: usize,
    pub k: usize,
    #[serde(with = "sets_as_lists")]
    pub sets: Vec<SubsetMask>,
}

mod sets_as_lists {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use crate::combi::SubsetMask;

    pub fn serialize<S: Serializer>(sets: &[SubsetMask], s: S) -> Result<S::Ok, S::Error> {
        let lists: Vec<Vec<usize>> = sets.iter().map(SubsetMask::to_vec).collect();
        lists.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SubsetMask>, D::Error> {
        let lists = Vec::<Vec<usize>>::deserialize(d)?;
        // the ground set size is checked again in TkFamily::from_json
        lists
            .iter()
            .map(|l| SubsetMask::from_elements(31, l).map_err(D::Error::custom))
            .collect()
    }
}

impl TkFamily {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TkFamily = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let sets = raw
            .sets
            .iter()
            .map(|s| {
                let set = SubsetMask::from_elements(raw.n, &s.to_vec())?;
                if set.len() != raw.k {
                    return Err(Error::Invalid(format!("{} does not have {} elements", set.label(), raw.k)));
                }
                Ok(set)
            })
            .collect::<Result<_>>()?;
        Ok(TkFamily { sets, ..raw })
    }

    /// First matching of size `k` in `g` that crosses no member, if any.
    pub fn first_uncovered(&self, g: &Graph) -> Option<Matching> {
        let ms = matchings(g, Some(self.k));
        ms.into_par_iter()
            .find_first(|m| !self.sets.iter().any(|x| m.crosses(*x)))
    }

    pub fn ensure_covers(&self, g: &Graph) -> Result<()> {
        match self.first_uncovered(g) {
            None => Ok(()),
            Some(m) => Err(Error::UncoveredMatching {
                k: self.k,
                matching: m.label(),
            }),
        }
    }

    /// Least index of a member crossed by `m`.
    pub fn first_compatible(&self, m: &Matching) -> Option<usize> {
        self.sets.iter().position(|x| m.crosses(*x))
    }
}

/// `(1 + k·ln n)·2^{−k}·C(n,k)` evaluated at a rational value of `ln n`.
pub fn tk_bound(n: usize, k: usize, ln_n: &Rational) -> Rational {
    let binom = (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1));
    (Rational::one() + Rational::from(k) * ln_n) * Rational::new(binom, 1i64 << k).expect("positive")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TkResult {
    pub family: TkFamily,
    pub trace: CoverResult,
    /// Bound evaluated at a certified lower bound of `ln n`, so
    /// `size ≤ bound` certifies the bound at the true logarithm.
    pub bound: Rational,
}

/// Greedy `T_k`, verified to cover every `k`-matching of `K_n` and checked
/// against the size bound.
pub fn build_tk(n: usize, k: usize) -> Result<TkResult> {
    let h = compatibility_hypergraph(n, k)?;
    let trace = greedy_cover(&h)?;
    let all = subsets(n, SubsetFilter::FixedSize(k))?;
    let family = TkFamily {
        n,
        k,
        sets: trace.picked.iter().map(|&v| all[v]).collect(),
    };
    family.ensure_covers(&Graph::complete(n))?;
    let (ln_lo, _) = ln_bounds(n as u64)?;
    let bound = tk_bound(n, k, &ln_lo);
    if Rational::from(family.sets.len()) > bound {
        return Err(Error::Internal(format!(
            "|T_{k}| = {} exceeds {bound}",
            family.sets.len()
        )));
    }
    Ok(TkResult { family, trace, bound })
}

/// `T_1, …, T_{⌊n/2⌋}` for `K_n`; index 0 holds the empty family.
pub fn build_all_tk(n: usize) -> Result<Vec<TkFamily>> {
    let mut out = vec![TkFamily { n, k: 0, sets: vec![] }];
    for k in 1..=n / 2 {
        out.push(build_tk(n, k)?.family);
    }
    Ok(out)
}
