//! Comparator networks.
//!
//! A comparator `(i, j)` with `i < j` acts forward by putting the smaller
//! value at `i` and the larger at `j`, and in reverse by putting the larger
//! value at `i`. A sequence is a sorting network when the forward action
//! sorts every input ascending; by the 0-1 principle it suffices to sort the
//! `2ⁿ` indicator vectors. On indicator vectors the reverse action sends
//! `J` to `{1, …, |J|}` exactly when the forward action sorts, and
//! `reverse(Jᶜ) = forward(J)ᶜ` for every `J`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::combi::{Perm, SubsetMask};
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparator {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComparatorSeq {
    n: usize,
    comps: Vec<Comparator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

pub const MAX_NET_N: usize = 24;

impl ComparatorSeq {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_NET_N {
            return Err(out_of_range("n", n, format!("1..={MAX_NET_N}")));
        }
        let comps = pairs
            .into_iter()
            .map(|(i, j)| {
                if i == 0 || i >= j || j > n {
                    Err(Error::Invalid(format!("comparator ({i},{j}) needs 1 <= i < j <= {n}")))
                } else {
                    Ok(Comparator { i, j })
                }
            })
            .collect::<Result<_>>()?;
        Ok(ComparatorSeq { n, comps })
    }

    /// Reads the network format: `n q` on the first line, then `q` lines `i j`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let nums = |line: &str| -> Result<Vec<usize>> {
            line.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
                .collect()
        };
        let header = lines.next().ok_or_else(|| Error::Parse("empty network file".into()))?;
        let [n, q] = nums(header)?[..] else {
            return Err(Error::Parse(format!("expected `n q`, got {header:?}")));
        };
        let mut pairs = Vec::with_capacity(q);
        for line in lines.by_ref().take(q) {
            let [i, j] = nums(line)?[..] else {
                return Err(Error::Parse(format!("expected `i j`, got {line:?}")));
            };
            pairs.push((i, j));
        }
        if pairs.len() != q {
            return Err(Error::Parse(format!("expected {q} comparators, found {}", pairs.len())));
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after comparators".into()));
        }
        Self::new(n, pairs)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.comps.len());
        for c in &self.comps {
            out.push_str(&format!("{} {}\n", c.i, c.j));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> &[Comparator] {
        &self.comps
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.comps.iter().position(|c| (c.i, c.j) == (i, j))
    }

    /// The sequence with the comparators at `indices` deleted.
    pub fn without(&self, indices: &[usize]) -> ComparatorSeq {
        let drop: HashSet<usize> = indices.iter().copied().collect();
        ComparatorSeq {
            n: self.n,
            comps: self
                .comps
                .iter()
                .enumerate()
                .filter(|(k, _)| !drop.contains(k))
                .map(|(_, c)| *c)
                .collect(),
        }
    }

    pub fn with_appended(&self, i: usize, j: usize) -> Result<ComparatorSeq> {
        let mut pairs: Vec<(usize, usize)> = self.comps.iter().map(|c| (c.i, c.j)).collect();
        pairs.push((i, j));
        Self::new(self.n, pairs)
    }
}

fn compare<T: Ord>(x: &mut [T], c: Comparator, dir: Direction) {
    let (a, b) = (c.i - 1, c.j - 1);
    let out_of_order = match dir {
        Direction::Forward => x[a] > x[b],
        Direction::Reverse => x[a] < x[b],
    };
    if out_of_order {
        x.swap(a, b);
    }
}

/// Runs every comparator in order on a copy of `x`.
pub fn apply_network<T: Ord + Clone>(seq: &ComparatorSeq, x: &[T], dir: Direction) -> Result<Vec<T>> {
    if x.len() != seq.n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a network on {} wires",
            x.len(),
            seq.n
        )));
    }
    let mut y = x.to_vec();
    for &c in &seq.comps {
        compare(&mut y, c, dir);
    }
    Ok(y)
}

/// One comparator acting on an indicator bitmask.
pub fn apply_comparator_mask(bits: u32, c: Comparator, dir: Direction) -> u32 {
    let (bi, bj) = (1u32 << (c.i - 1), 1u32 << (c.j - 1));
    let (has_i, has_j) = (bits & bi != 0, bits & bj != 0);
    let swap = match dir {
        Direction::Forward => has_i && !has_j,
        Direction::Reverse => has_j && !has_i,
    };
    if swap {
        bits ^ bi ^ bj
    } else {
        bits
    }
}

pub fn apply_mask(seq: &ComparatorSeq, bits: u32, dir: Direction) -> u32 {
    seq.comps
        .iter()
        .fold(bits, |b, &c| apply_comparator_mask(b, c, dir))
}

/// Where a set of size `k` must end up: the top `k` wires going forward,
/// the bottom `k` wires in reverse.
pub fn sorted_mask(n: usize, k: usize, dir: Direction) -> u32 {
    let low = ((1u64 << k) - 1) as u32;
    match dir {
        Direction::Forward => low << (n - k),
        Direction::Reverse => low,
    }
}

/// Validity over all `2ⁿ` indicator vectors.
pub fn is_sorting_network(seq: &ComparatorSeq, dir: Direction) -> bool {
    let n = seq.n;
    (0u32..1 << n)
        .into_par_iter()
        .all(|bits| apply_mask(seq, bits, dir) == sorted_mask(n, bits.count_ones() as usize, dir))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualityReport {
    pub forward: bool,
    pub reverse: bool,
    /// `reverse(Jᶜ) = forward(J)ᶜ` for every `J`.
    pub complement_identity: bool,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.forward == self.reverse && self.complement_identity
    }
}

pub const MAX_DUALITY_N: usize = 20;

pub fn duality_check(seq: &ComparatorSeq) -> Result<DualityReport> {
    let n = seq.n;
    if n > MAX_DUALITY_N {
        return Err(out_of_range("n", n, format!("1..={MAX_DUALITY_N}")));
    }
    let full = ((1u64 << n) - 1) as u32;
    let complement_identity = (0u32..1 << n).into_par_iter().all(|bits| {
        apply_mask(seq, full & !bits, Direction::Reverse) == full & !apply_mask(seq, bits, Direction::Forward)
    });
    Ok(DualityReport {
        forward: is_sorting_network(seq, Direction::Forward),
        reverse: is_sorting_network(seq, Direction::Reverse),
        complement_identity,
    })
}

/// `σ ↦ σ∘τ_{i,j}` when `σ(i) > σ(j)`, else `σ`.
pub fn sigma_plus(c: Comparator, sigma: &Perm) -> Perm {
    if sigma.at(c.i) > sigma.at(c.j) {
        sigma.swapped(c.i, c.j)
    } else {
        sigma.clone()
    }
}

/// Moves `j` to `i` when `j ∈ J` and `i ∉ J`.
pub fn sigma_minus(c: Comparator, set: SubsetMask) -> SubsetMask {
    SubsetMask::from_bits_unchecked(set.n(), apply_comparator_mask(set.bits(), c, Direction::Reverse))
}

/// Decrease of `σ(J)` caused by one comparator acting on both sides.
///
/// Computed as `σ(J) − σ⁺(σ)(σ⁻(J))` and as
/// `1[j∈J, i∉J]·(σ(j)−σ(i))₊ + 1[i∈J, j∉J]·(σ(i)−σ(j))₊`; the two must agree.
pub fn delta(c: Comparator, sigma: &Perm, set: SubsetMask) -> Result<Rational> {
    if c.j > sigma.n() || set.n() != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "comparator {c} with permutation of {} and subset of [{}]",
            sigma.n(),
            set.n()
        )));
    }
    let definitional = sigma.subset_sum(set) - sigma_plus(c, sigma).subset_sum(sigma_minus(c, set));
    let (si, sj) = (sigma.at(c.i) as i64, sigma.at(c.j) as i64);
    let (has_i, has_j) = (set.contains(c.i), set.contains(c.j));
    let closed = i64::from(has_j && !has_i) * (sj - si).max(0) + i64::from(has_i && !has_j) * (si - sj).max(0);
    if definitional != closed {
        return Err(Error::Internal(format!(
            "delta mismatch at {c}, sigma={}, J={}: {definitional} vs {closed}",
            sigma.label(),
            set.label()
        )));
    }
    Ok(Rational::from(closed))
}

/// Color of a comparator against the current set: `+1` if it moves an
/// element of `J` down from `j` to `i`, `−1` if `i ∈ J` and `j ∉ J`, else 0.
pub fn color(c: Comparator, set: SubsetMask) -> i8 {
    let (has_i, has_j) = (set.contains(c.i), set.contains(c.j));
    i8::from(has_j && !has_i) - i8::from(has_i && !has_j)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JTrace {
    /// `J_0, …, J_q` under the reverse action.
    pub sets: Vec<SubsetMask>,
    pub colors: Vec<i8>,
}

impl JTrace {
    /// Sizes of the color classes `−1`, `0`, `+1`.
    pub fn partition_sizes(&self) -> [usize; 3] {
        let mut s = [0; 3];
        for &c in &self.colors {
            s[(c + 1) as usize] += 1;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTrace {
    /// `σ_0, …, σ_q` under the forward action.
    pub perms: Vec<Perm>,
    /// `w_l = σ_l(j_l) − σ_l(i_l)`.
    pub w: Vec<i64>,
}

fn check_ground(seq: &ComparatorSeq, n: usize) -> Result<()> {
    if n != seq.n {
        return Err(Error::DimensionMismatch(format!("input on {n} wires, network on {}", seq.n)));
    }
    Ok(())
}

pub fn trace(seq: &ComparatorSeq, set: SubsetMask) -> Result<JTrace> {
    check_ground(seq, set.n())?;
    let mut sets = vec![set];
    let mut colors = Vec::with_capacity(seq.len());
    let mut cur = set;
    for &c in &seq.comps {
        colors.push(color(c, cur));
        cur = sigma_minus(c, cur);
        sets.push(cur);
    }
    Ok(JTrace { sets, colors })
}

/// Colors only, keeping just the current set.
pub fn colors(seq: &ComparatorSeq, set: SubsetMask) -> Result<Vec<i8>> {
    check_ground(seq, set.n())?;
    let mut cur = set;
    Ok(seq
        .comps
        .iter()
        .map(|&c| {
            let e = color(c, cur);
            cur = sigma_minus(c, cur);
            e
        })
        .collect())
}

pub fn trace_sigma(seq: &ComparatorSeq, sigma: &Perm) -> Result<SigmaTrace> {
    check_ground(seq, sigma.n())?;
    let mut perms = vec![sigma.clone()];
    let mut w = Vec::with_capacity(seq.len());
    for &c in &seq.comps {
        let cur = perms.last().unwrap();
        w.push(cur.at(c.j) as i64 - cur.at(c.i) as i64);
        let next = sigma_plus(c, cur);
        perms.push(next);
    }
    Ok(SigmaTrace { perms, w })
}

/// The weights `w_l` only.
pub fn weights(seq: &ComparatorSeq, sigma: &Perm) -> Result<Vec<i64>> {
    check_ground(seq, sigma.n())?;
    let mut word: Vec<i64> = sigma.word().iter().map(|&v| v as i64).collect();
    Ok(seq
        .comps
        .iter()
        .map(|&c| {
            let w = word[c.j - 1] - word[c.i - 1];
            compare(&mut word, c, Direction::Forward);
            w
        })
        .collect())
}

/// `Σ_l δ(c_l, σ_l, J_l)` along the forward σ-trace and the reverse J-trace.
/// Equals `σ(J) − |J|(|J|+1)/2` when the sequence sorts.
pub fn telescoped_delta_sum(seq: &ComparatorSeq, sigma: &Perm, set: SubsetMask) -> Result<Rational> {
    let sets = trace(seq, set)?.sets;
    let perms = trace_sigma(seq, sigma)?.perms;
    seq.comps
        .iter()
        .enumerate()
        .map(|(l, &c)| delta(c, &perms[l], sets[l]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    Quadratic,
    OddEvenTransposition,
    Batcher,
}

impl std::str::FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(NetworkKind::Quadratic),
            "oddeven" | "odd-even" | "oddeven_transposition" => Ok(NetworkKind::OddEvenTransposition),
            "batcher" => Ok(NetworkKind::Batcher),
            other => Err(Error::Parse(format!("unknown network kind {other:?}"))),
        }
    }
}

/// `(1,n), (1,n−1), …, (1,2), (2,n), …, (n−1,n)`.
pub fn quadratic(n: usize) -> Result<ComparatorSeq> {
    ComparatorSeq::new(n, (1..n).flat_map(|i| (i + 1..=n).rev().map(move |j| (i, j))))
}

/// `n` rounds of adjacent comparators, alternating odd and even positions.
pub fn oddeven_transposition(n: usize) -> Result<ComparatorSeq> {
    ComparatorSeq::new(
        n,
        (0..n).flat_map(|round| ((1 + round % 2)..n).step_by(2).map(|i| (i, i + 1))),
    )
}

/// Batcher's merge-exchange network.
pub fn batcher(n: usize) -> Result<ComparatorSeq> {
    let mut pairs = Vec::new();
    if n >= 2 {
        let t = usize::BITS - (n - 1).leading_zeros();
        let mut p = 1usize << (t - 1);
        while p > 0 {
            let (mut q, mut r, mut d) = (1usize << (t - 1), 0usize, p);
            loop {
                for i in 0..n - d {
                    if i & p == r {
                        pairs.push((i + 1, i + d + 1));
                    }
                }
                if q == p {
                    break;
                }
                d = q - p;
                q >>= 1;
                r = p;
            }
            p >>= 1;
        }
    }
    ComparatorSeq::new(n, pairs)
}

pub fn generate(kind: NetworkKind, n: usize) -> Result<ComparatorSeq> {
    if n < 2 {
        return Err(out_of_range("n", n, format!("2..={MAX_NET_N}")));
    }
    match kind {
        NetworkKind::Quadratic => quadratic(n),
        NetworkKind::OddEvenTransposition => oddeven_transposition(n),
        NetworkKind::Batcher => batcher(n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalityMode {
    /// Delete one comparator at a time; a necessary condition only, since
    /// deleting several comparators can sort when no single deletion does.
    OneRemoval,
    /// Search every proper subsequence.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    /// Indices of comparators whose deletion leaves a sorting network.
    Redundant(Vec<usize>),
}

pub const MAX_EXHAUSTIVE_Q: usize = 22;

pub fn minimality(seq: &ComparatorSeq, mode: MinimalityMode) -> Result<Minimality> {
    if !is_sorting_network(seq, Direction::Forward) {
        return Err(Error::NotSortingNetwork);
    }
    match mode {
        MinimalityMode::OneRemoval => Ok((0..seq.len())
            .find(|&k| is_sorting_network(&seq.without(&[k]), Direction::Forward))
            .map_or(Minimality::Minimal, |k| Minimality::Redundant(vec![k]))),
        MinimalityMode::Exhaustive => {
            if seq.len() > MAX_EXHAUSTIVE_Q {
                return Err(out_of_range("q", seq.len(), format!("0..={MAX_EXHAUSTIVE_Q}")));
            }
            let states: Vec<u32> = (0u32..1 << seq.n).collect();
            let mut search = SubsetSearch {
                seq,
                failed: HashMap::new(),
            };
            let mut removed = Vec::new();
            Ok(if search.run(0, states, &mut removed) {
                Minimality::Redundant(removed)
            } else {
                Minimality::Minimal
            })
        }
    }
}

/// Depth-first search over keep/delete choices carrying the set of
/// distinct indicator vectors reachable so far.
struct SubsetSearch<'a> {
    seq: &'a ComparatorSeq,
    failed: HashMap<(usize, bool), HashSet<Vec<u32>>>,
}

impl SubsetSearch<'_> {
    fn all_sorted(&self, states: &[u32]) -> bool {
        let n = self.seq.n;
        states
            .iter()
            .all(|&b| b == sorted_mask(n, b.count_ones() as usize, Direction::Forward))
    }

    fn run(&mut self, depth: usize, states: Vec<u32>, removed: &mut Vec<usize>) -> bool {
        let q = self.seq.len();
        if self.all_sorted(&states) {
            // drop everything that is left
            if depth < q || !removed.is_empty() {
                removed.extend(depth..q);
                return true;
            }
            return false;
        }
        if depth == q {
            return false;
        }
        let key = (depth, !removed.is_empty());
        if self.failed.get(&key).is_some_and(|s| s.contains(&states)) {
            return false;
        }
        let c = self.seq.comps[depth];
        let mut next: Vec<u32> = states
            .iter()
            .map(|&b| apply_comparator_mask(b, c, Direction::Forward))
            .collect();
        next.sort_unstable();
        next.dedup();
        let noop = next == states;
        removed.push(depth);
        if self.run(depth + 1, states.clone(), removed) {
            return true;
        }
        removed.pop();
        if !noop && self.run(depth + 1, next, removed) {
            return true;
        }
        self.failed.entry(key).or_default().insert(states);
        false
    }
}

/// `[k−1] ∪ {k+u}`: after deleting `(k, k+u)` from the quadratic network,
/// the reverse action no longer brings this set to `[k]`.
pub fn quadratic_deletion_witness(n: usize, k: usize, u: usize) -> Result<SubsetMask> {
    let mut elems: Vec<usize> = (1..k).collect();
    elems.push(k + u);
    SubsetMask::from_elements(n, &elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn pairs(seq: &ComparatorSeq) -> Vec<(usize, usize)> {
        seq.comps().iter().map(|c| (c.i, c.j)).collect()
    }

    #[test]
    fn quadratic_examples() {
        let q3 = quadratic(3).unwrap();
        assert_eq!(pairs(&q3), [(1, 3), (1, 2), (2, 3)]);
        for n in 2..=9 {
            assert_eq!(quadratic(n).unwrap().len(), n * (n - 1) / 2);
        }
        let x = [int(3), int(2), int(1)];
        assert_eq!(apply_network(&q3, &x, Direction::Forward).unwrap(), [int(1), int(2), int(3)]);
        let e3 = SubsetMask::from_elements(3, &[3]).unwrap();
        assert_eq!(apply_mask(&q3, e3.bits(), Direction::Reverse), 0b001);
        assert!(apply_network(&q3, &[1, 2], Direction::Forward).is_err());
    }

    #[test]
    fn validity_examples() {
        assert!(is_sorting_network(&quadratic(3).unwrap(), Direction::Forward));
        assert!(!is_sorting_network(&ComparatorSeq::new(2, []).unwrap(), Direction::Forward));
        assert!(is_sorting_network(&ComparatorSeq::new(1, []).unwrap(), Direction::Forward));
        let b4 = batcher(4).unwrap();
        assert_eq!(b4.len(), 5);
        assert!(is_sorting_network(&b4, Direction::Forward));
        for n in 2..=12 {
            for kind in [NetworkKind::Quadratic, NetworkKind::OddEvenTransposition, NetworkKind::Batcher] {
                assert!(is_sorting_network(&generate(kind, n).unwrap(), Direction::Forward), "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn duality_examples() {
        assert!(duality_check(&quadratic(4).unwrap()).unwrap().holds());
        let single = ComparatorSeq::new(2, [(1, 2)]).unwrap();
        let r = duality_check(&single).unwrap();
        assert!(r.holds() && r.forward && r.reverse);
        let broken = ComparatorSeq::new(4, [(1, 2), (3, 4)]).unwrap();
        let r = duality_check(&broken).unwrap();
        assert!(r.holds() && !r.forward);
    }

    #[test]
    fn delta_examples() {
        let id = Perm::identity(3);
        let c = Comparator { i: 1, j: 2 };
        assert_eq!(delta(c, &id, SubsetMask::from_elements(3, &[2]).unwrap()).unwrap(), int(1));
        assert_eq!(delta(c, &id, SubsetMask::from_elements(3, &[1, 2]).unwrap()).unwrap(), int(0));
        assert_eq!(delta(c, &id, SubsetMask::from_elements(3, &[3]).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn trace_examples() {
        let q3 = quadratic(3).unwrap();
        let t = trace(&q3, SubsetMask::from_elements(3, &[3]).unwrap()).unwrap();
        assert_eq!(t.colors, [1, -1, 0]);
        assert_eq!(t.sets.last().unwrap().label(), "{1}");
        assert_eq!(t.partition_sizes(), [1, 1, 1]);
        assert_eq!(colors(&q3, t.sets[0]).unwrap(), t.colors);
        let prefix = SubsetMask::prefix(3, 2);
        assert_eq!(trace(&q3, prefix).unwrap().sets.last(), Some(&prefix));
        let s = trace_sigma(&q3, &Perm::identity(3)).unwrap();
        assert_eq!(s.w, [2, 1, 1]);
        assert!(s.perms.iter().all(Perm::is_identity));
        let p = Perm::new(vec![3, 1, 2]).unwrap();
        assert_eq!(trace_sigma(&q3, &p).unwrap().w, weights(&q3, &p).unwrap());
        assert!(trace_sigma(&q3, &p).unwrap().perms.last().unwrap().is_identity());
    }

    #[test]
    fn minimality_examples() {
        assert_eq!(minimality(&quadratic(4).unwrap(), MinimalityMode::OneRemoval).unwrap(), Minimality::Minimal);
        assert_eq!(minimality(&quadratic(4).unwrap(), MinimalityMode::Exhaustive).unwrap(), Minimality::Minimal);
        let dup = quadratic(3).unwrap().with_appended(2, 3).unwrap();
        for mode in [MinimalityMode::OneRemoval, MinimalityMode::Exhaustive] {
            let Minimality::Redundant(removed) = minimality(&dup, mode).unwrap() else {
                panic!("duplicate comparator not detected");
            };
            assert!(is_sorting_network(&dup.without(&removed), Direction::Forward));
        }
        let single = ComparatorSeq::new(2, [(1, 2)]).unwrap();
        assert_eq!(minimality(&single, MinimalityMode::Exhaustive).unwrap(), Minimality::Minimal);
        assert_eq!(
            minimality(&ComparatorSeq::new(2, []).unwrap(), MinimalityMode::OneRemoval),
            Err(Error::NotSortingNetwork)
        );
    }

    fn brute_has_proper_sorting_subset(seq: &ComparatorSeq) -> bool {
        let q = seq.len();
        (0u32..(1 << q) - 1).any(|keep| {
            let removed: Vec<usize> = (0..q).filter(|k| keep & (1 << k) == 0).collect();
            is_sorting_network(&seq.without(&removed), Direction::Forward)
        })
    }

    #[test]
    fn exhaustive_matches_subset_oracle() {
        let b4 = batcher(4).unwrap();
        let padded = ComparatorSeq::new(4, [(1, 2), (3, 4)].into_iter().chain(pairs(&b4))).unwrap();
        let cases = [
            quadratic(4).unwrap(),
            oddeven_transposition(4).unwrap(),
            oddeven_transposition(5).unwrap(),
            b4,
            batcher(5).unwrap(),
            padded,
            quadratic(4).unwrap().with_appended(1, 4).unwrap(),
        ];
        for seq in cases {
            let expected = brute_has_proper_sorting_subset(&seq);
            match minimality(&seq, MinimalityMode::Exhaustive).unwrap() {
                Minimality::Minimal => assert!(!expected, "{}", seq.to_text()),
                Minimality::Redundant(removed) => {
                    assert!(expected);
                    assert!(!removed.is_empty());
                    assert!(is_sorting_network(&seq.without(&removed), Direction::Forward));
                }
            }
        }
    }

    #[test]
    fn quadratic_deletion_witnesses() {
        for n in 2..=7 {
            let q = quadratic(n).unwrap();
            for k in 1..n {
                for u in 1..=n - k {
                    let broken = q.without(&[q.position(k, k + u).unwrap()]);
                    let j = quadratic_deletion_witness(n, k, u).unwrap();
                    let reverse = apply_mask(&broken, j.bits(), Direction::Reverse);
                    assert_ne!(reverse, sorted_mask(n, k, Direction::Reverse), "n={n} k={k} u={u}");
                    let forward = apply_mask(&broken, j.complement().bits(), Direction::Forward);
                    assert_ne!(forward, sorted_mask(n, n - k, Direction::Forward));
                }
            }
        }
    }

    #[test]
    fn network_file_round_trip() {
        let q = quadratic(4).unwrap();
        assert_eq!(ComparatorSeq::parse(&q.to_text()).unwrap(), q);
        assert!(ComparatorSeq::parse("3 1\n2 1\n").is_err());
        assert!(ComparatorSeq::parse("3 2\n1 2\n").is_err());
        assert!(ComparatorSeq::parse("3 1\n1 4\n").is_err());
    }
}
