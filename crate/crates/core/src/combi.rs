//! Permutations, vertex subsets, graphs, matchings and spanning trees.
//!
//! Vertices and positions are 1-based everywhere; a subset of `[n]` is a
//! bitmask with vertex `i` on bit `i - 1`. Enumeration orders are fixed
//! because they decide the row and column order of every slack matrix:
//!
//! * permutations: lexicographic by one-line word;
//! * subsets: by cardinality, then by mask value;
//! * matchings: by size, then lexicographically by sorted edge list;
//! * spanning trees: lexicographically by sorted edge list.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{out_of_range, Error, Result};

pub const MAX_PERM_N: usize = 10;
pub const MAX_SUBSET_N: usize = 24;

/// A permutation of `[n]` in one-line notation: `word[i] = σ(i + 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    word: Vec<usize>,
}

impl Perm {
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n || seen[v] {
                return Err(Error::Invalid(format!("{word:?} is not a permutation of 1..{n}")));
            }
            seen[v] = true;
        }
        Ok(Perm { word })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            word: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// σ(i) for 1-based `i`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// σ(J) = Σ_{j ∈ J} σ(j).
    pub fn subset_sum(&self, set: SubsetMask) -> i64 {
        set.elements().map(|j| self.at(j) as i64).sum()
    }

    /// σ ∘ τ_{i,j}: the word with positions `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Perm {
        let mut word = self.word.clone();
        word.swap(i - 1, j - 1);
        Perm { word }
    }

    pub fn label(&self) -> String {
        let sep = if self.n() > 9 { " " } else { "" };
        self.word
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn parse(label: &str) -> Result<Self> {
        let word: Vec<usize> = if label.contains(' ') {
            label
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad permutation {label:?}"))))
                .collect::<Result<_>>()?
        } else {
            label
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad permutation {label:?}")))
                })
                .collect::<Result<_>>()?
        };
        Perm::new(word)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.label())
    }
}

/// A subset `J ⊆ [n]` stored as a bitmask (vertex `i` ↦ bit `i - 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    n: usize,
    bits: u32,
}

impl SubsetMask {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        if n > 31 {
            return Err(out_of_range("n", n, "0..=31"));
        }
        if bits >= 1u32 << n {
            return Err(Error::Invalid(format!("mask {bits:#b} exceeds ground set of size {n}")));
        }
        Ok(SubsetMask { n, bits })
    }

    pub(crate) fn from_bits_unchecked(n: usize, bits: u32) -> Self {
        debug_assert!(n <= 31 && bits < 1u32 << n);
        SubsetMask { n, bits }
    }

    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > n {
                return Err(out_of_range("element", e, format!("1..={n}")));
            }
            bits |= 1 << (e - 1);
        }
        Self::new(n, bits)
    }

    pub fn empty(n: usize) -> Self {
        SubsetMask { n, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        SubsetMask {
            n,
            bits: ((1u64 << n) - 1) as u32,
        }
    }

    /// `{1, …, k}`.
    pub fn prefix(n: usize, k: usize) -> Self {
        SubsetMask {
            n,
            bits: ((1u64 << k) - 1) as u32,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n && self.bits & (1 << (i - 1)) != 0
    }

    pub fn with(&self, i: usize) -> Self {
        SubsetMask {
            n: self.n,
            bits: self.bits | (1 << (i - 1)),
        }
    }

    pub fn without(&self, i: usize) -> Self {
        SubsetMask {
            n: self.n,
            bits: self.bits & !(1 << (i - 1)),
        }
    }

    pub fn complement(&self) -> Self {
        SubsetMask {
            n: self.n,
            bits: Self::full(self.n).bits & !self.bits,
        }
    }

    pub fn intersection(&self, other: &SubsetMask) -> Self {
        SubsetMask {
            n: self.n,
            bits: self.bits & other.bits,
        }
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    /// Elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (1..=self.n).filter(move |i| bits & (1 << (i - 1)) != 0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements().collect()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.elements().map(|e| e.to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn edge_label(u: usize, v: usize) -> String {
    format!("{{{u},{v}}}")
}

fn edge_list_label(edges: &[(usize, usize)]) -> String {
    let parts: Vec<String> = edges.iter().map(|&(u, v)| edge_label(u, v)).collect();
    format!("{{{}}}", parts.join(","))
}

/// Simple undirected graph on vertices `1..=n` with sorted edges `u < v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > 31 {
            return Err(out_of_range("n", n, "0..=31"));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Invalid(format!("loop at vertex {a}")));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(out_of_range("vertex", v, format!("1..={n}")));
                }
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("duplicate edge {}", edge_label(w[0].0, w[0].1))));
        }
        Ok(Graph { n, edges: list })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// Parses the edge-list format: first line `n m`, then `m` lines `u v`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums = parse_usizes(header)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse(format!("expected `n m`, got {header:?}")));
        };
        let mut edges = Vec::with_capacity(m);
        for line in lines.by_ref().take(m) {
            let uv = parse_usizes(line)?;
            let [u, v] = uv[..] else {
                return Err(Error::Parse(format!("expected `u v`, got {line:?}")));
            };
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("expected {m} edges, found {}", edges.len())));
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after edge list".into()));
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// |E(U)|: edges with both ends in `set`.
    pub fn induced_edge_count(&self, set: SubsetMask) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) && set.contains(v))
            .count()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = adjacency(self.n, &self.edges);
        bfs_distances(&adj, 1).iter().skip(1).all(|d| d.is_some())
    }
}

fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
        .collect()
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

// Index 0 unused.
fn bfs_distances(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn check_vertex(n: usize, v: usize) -> Result<()> {
    if v == 0 || v > n {
        Err(out_of_range("vertex", v, format!("1..={n}")))
    } else {
        Ok(())
    }
}

/// Set of pairwise vertex-disjoint edges on `1..=n`; may be empty.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matching {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let g = Graph::new(n, edges)?;
        let mut used = 0u64;
        for &(u, v) in &g.edges {
            let m = (1u64 << u) | (1u64 << v);
            if used & m != 0 {
                return Err(Error::Invalid(format!(
                    "edges of {} are not vertex-disjoint",
                    edge_list_label(&g.edges)
                )));
            }
            used |= m;
        }
        Ok(Matching { n, edges: g.edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// M(u), or `None` when `u` is unmatched.
    pub fn partner(&self, u: usize) -> Result<Option<usize>> {
        check_vertex(self.n, u)?;
        Ok(self.edges.iter().find_map(|&(a, b)| {
            if a == u {
                Some(b)
            } else if b == u {
                Some(a)
            } else {
                None
            }
        }))
    }

    /// |M ∩ δ(v)|, which is 0 or 1.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// |M ∩ E(U)|.
    pub fn induced_count(&self, set: SubsetMask) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) && set.contains(v))
            .count()
    }

    /// True when every edge of M has exactly one end in `set`, i.e. M ⊆ δ(X).
    pub fn crosses(&self, set: SubsetMask) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| set.contains(u) != set.contains(v))
    }

    pub fn label(&self) -> String {
        edge_list_label(&self.edges)
    }
}

/// Spanning tree of a graph on `1..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SpanningTree {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let g = Graph::new(n, edges)?;
        if n == 0 || g.edges.len() != n - 1 || !g.is_connected() {
            return Err(Error::Invalid(format!(
                "{} is not a spanning tree on {n} vertices",
                edge_list_label(&g.edges)
            )));
        }
        let adj = adjacency(n, &g.edges);
        Ok(SpanningTree {
            n,
            edges: g.edges,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// |T ∩ E(U)|.
    pub fn induced_count(&self, set: SubsetMask) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) && set.contains(v))
            .count()
    }

    /// Tree distances from `root`; index 0 unused.
    pub fn distances_from(&self, root: usize) -> Result<Vec<usize>> {
        check_vertex(self.n, root)?;
        Ok(bfs_distances(&self.adj, root)
            .into_iter()
            .map(|d| d.unwrap_or(0))
            .collect())
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        check_vertex(self.n, v)?;
        Ok(self.distances_from(u)?[v])
    }

    /// Every tree edge directed `(tail, head)` with the head strictly closer
    /// to `root`, in edge order.
    pub fn orient_toward(&self, root: usize) -> Result<Vec<(usize, usize)>> {
        let d = self.distances_from(root)?;
        Ok(self
            .edges
            .iter()
            .map(|&(u, v)| if d[u] > d[v] { (u, v) } else { (v, u) })
            .collect())
    }

    pub fn label(&self) -> String {
        edge_list_label(&self.edges)
    }
}

/// Which subsets of `[n]` to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetFilter {
    All,
    /// Nonempty and not the whole ground set.
    ProperNonempty,
    /// Odd cardinality, at least 3.
    OddAtLeast3,
    FixedSize(usize),
}

pub fn permutations(n: usize) -> Result<Vec<Perm>> {
    if n == 0 || n > MAX_PERM_N {
        return Err(out_of_range("n", n, format!("1..={MAX_PERM_N}")));
    }
    let mut word: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Perm { word: word.clone() });
        // next lexicographic permutation
        let Some(i) = (0..n - 1).rev().find(|&i| word[i] < word[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| word[j] > word[i]).unwrap();
        word.swap(i, j);
        word[i + 1..].reverse();
    }
    Ok(out)
}

pub fn subsets(n: usize, filter: SubsetFilter) -> Result<Vec<SubsetMask>> {
    if n > MAX_SUBSET_N {
        return Err(out_of_range("n", n, format!("0..={MAX_SUBSET_N}")));
    }
    let keep = |k: usize| match filter {
        SubsetFilter::All => true,
        SubsetFilter::ProperNonempty => k >= 1 && k < n,
        SubsetFilter::OddAtLeast3 => k >= 3 && k % 2 == 1,
        SubsetFilter::FixedSize(s) => k == s,
    };
    let mut out = Vec::new();
    for k in (0..=n).filter(|&k| keep(k)) {
        out.extend(
            (0..1u32 << n)
                .filter(|b| b.count_ones() as usize == k)
                .map(|bits| SubsetMask { n, bits }),
        );
    }
    Ok(out)
}

/// Matchings of `g`, optionally restricted to one size, including the
/// empty matching when size 0 is allowed.
pub fn matchings(g: &Graph, size: Option<usize>) -> Vec<Matching> {
    fn extend(
        g: &Graph,
        start: usize,
        used: u64,
        current: &mut Vec<(usize, usize)>,
        target: Option<usize>,
        out: &mut Vec<Matching>,
    ) {
        if target.is_none_or(|t| t == current.len()) {
            out.push(Matching {
                n: g.n,
                edges: current.clone(),
            });
        }
        if target.is_some_and(|t| current.len() >= t) {
            return;
        }
        for idx in start..g.edges.len() {
            let (u, v) = g.edges[idx];
            let m = (1u64 << u) | (1u64 << v);
            if used & m == 0 {
                current.push((u, v));
                extend(g, idx + 1, used | m, current, target, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(g, 0, 0, &mut Vec::new(), size, &mut out);
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.edges.cmp(&b.edges)));
    out
}

pub const MAX_TREE_N: usize = 9;

pub fn spanning_trees(g: &Graph) -> Result<Vec<SpanningTree>> {
    let n = g.n;
    if n == 0 || n > MAX_TREE_N {
        return Err(out_of_range("n", n, format!("1..={MAX_TREE_N}")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        r
    }
    let m = g.edges.len();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = (0..n - 1).collect();
    if n - 1 > m {
        return Ok(out);
    }
    loop {
        let mut parent: Vec<usize> = (0..=n).collect();
        let acyclic = chosen.iter().all(|&e| {
            let (u, v) = g.edges[e];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
            ru != rv
        });
        if acyclic {
            let edges: Vec<_> = chosen.iter().map(|&e| g.edges[e]).collect();
            out.push(SpanningTree {
                n,
                adj: adjacency(n, &edges),
                edges,
            });
        }
        // next combination of n-1 edge indices, lexicographic
        let k = chosen.len();
        let Some(i) = (0..k).rev().find(|&i| chosen[i] < m - k + i) else {
            break;
        };
        chosen[i] += 1;
        for t in i + 1..k {
            chosen[t] = chosen[t - 1] + 1;
        }
        if k == 0 {
            break;
        }
    }
    Ok(out)
}
