//! Explicit nonnegative factorization of the matching-polytope slack matrix.
//!
//! Edge and vertex rows are routed through one path each. For an odd set
//! `U` against a matching `M` of size `k`, Bob announces the least index `j`
//! such that `M` crosses `X_j ∈ T_k`. Alice takes `Z = X_j` when
//! `|U ∩ X_j| ≤ (|U|−1)/2` and `Z = [n] ∖ X_j` otherwise, so that
//! `1 ≤ |Z ∩ U| ≤ (|U|−1)/2` or `Z ∩ U = ∅`. In the empty case no matching
//! edge lies inside `U` and she claims `(|U|−1)/2` outright. Otherwise she
//! sends a uniform `u ∈ Z ∩ U`; Bob answers `u' = M(u)`, or `u' = u` when `u`
//! is unmatched; Alice claims `(|U|−1)/2 − |Z ∩ U|` if `u' ∈ U ∖ {u}` and
//! `(|U|−1)/2` otherwise. Every edge of `M ∩ E(U)` has exactly one end in
//! `Z ∩ U`, which makes the average claim `(|U|−1)/2 − |M ∩ E(U)|`.
//!
//! Inner index labels:
//! `e{u,v}`, `v3`, `stop(0,0)` (empty matching), `stop(k,j)` and
//! `pair(k,j,u,u')` with `j` the 1-based position in `T_k`.

use std::collections::BTreeMap;

use crate::combi::{edge_label, matchings, Graph, Matching, SubsetMask};
use crate::cover::TkFamily;
use crate::error::{Error, Result};
use crate::exactnum::{ln_bounds, RatMatrix, Rational};
use crate::protocol::Factorization;
use crate::slack::{match_rows, odd_set_bound, MatchRow, MAX_MATCH_SLACK_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchPath {
    Edge(usize, usize),
    Vertex(usize),
    Stop { k: usize, j: usize },
    Pair { k: usize, j: usize, u: usize, reply: usize },
}

impl MatchPath {
    pub fn label(&self) -> String {
        match *self {
            MatchPath::Edge(u, v) => format!("e{}", edge_label(u, v)),
            MatchPath::Vertex(v) => format!("v{v}"),
            MatchPath::Stop { k, j } => format!("stop({k},{j})"),
            MatchPath::Pair { k, j, u, reply } => format!("pair({k},{j},{u},{reply})"),
        }
    }
}

/// Alice's half-set: `X` or its complement, whichever meets `U` in at most
/// `(|U|−1)/2` elements.
pub fn choose_side(odd_set: SubsetMask, x: SubsetMask) -> SubsetMask {
    let c = odd_set.intersection(&x).len();
    if 2 * c < odd_set.len() {
        x
    } else {
        x.complement()
    }
}

/// Alice's first message on odd set `U` given `X`: `None` when she stops,
/// otherwise the uniform distribution on `Z ∩ U`.
pub fn first_message(odd_set: SubsetMask, x: SubsetMask) -> Option<BTreeMap<usize, Rational>> {
    let zu = choose_side(odd_set, x).intersection(&odd_set);
    if zu.is_empty() {
        return None;
    }
    let p = Rational::new(1, zu.len() as i64).expect("nonempty");
    Some(zu.elements().map(|u| (u, p.clone())).collect())
}

/// Bob's reply: the partner of `u`, or `u` itself when unmatched.
pub fn reply(m: &Matching, u: usize) -> usize {
    m.partner(u).ok().flatten().unwrap_or(u)
}

/// Alice's claim after sending `u` and receiving `reply`.
pub fn claim(odd_set: SubsetMask, x: SubsetMask, u: usize, reply: usize) -> Rational {
    let zu = choose_side(odd_set, x).intersection(&odd_set);
    let base = odd_set_bound(odd_set);
    if reply != u && odd_set.contains(reply) {
        base - Rational::from(zu.len())
    } else {
        base
    }
}

/// Average claim on `(U, M)` once the index of `x` has been announced;
/// `m` must cross `x`.
pub fn conditional_claim(odd_set: SubsetMask, m: &Matching, x: SubsetMask) -> Rational {
    match first_message(odd_set, x) {
        None => odd_set_bound(odd_set),
        Some(dist) => dist
            .iter()
            .map(|(&u, p)| p * claim(odd_set, x, u, reply(m, u)))
            .sum(),
    }
}

fn families_by_size<'a>(g: &Graph, tks: &'a [TkFamily]) -> Result<BTreeMap<usize, &'a TkFamily>> {
    let mut by_k = BTreeMap::new();
    for fam in tks.iter().filter(|f| f.k > 0) {
        if fam.n != g.n() {
            return Err(Error::Invalid(format!("T_{} is over {} vertices, graph has {}", fam.k, fam.n, g.n())));
        }
        by_k.insert(fam.k, fam);
    }
    let max_k = matchings(g, None).last().map_or(0, Matching::size);
    for k in 1..=max_k {
        let fam = by_k.get(&k).ok_or_else(|| Error::Invalid(format!("missing T_{k}")))?;
        fam.ensure_covers(g)?;
    }
    Ok(by_k)
}

/// Builds `A` (constraint rows × paths) and `B` (paths × matchings), with
/// all-zero paths dropped.
pub fn match_factorization(g: &Graph, tks: &[TkFamily]) -> Result<Factorization> {
    if g.n() > MAX_MATCH_SLACK_N {
        return Err(crate::error::out_of_range("n", g.n(), format!("0..={MAX_MATCH_SLACK_N}")));
    }
    let by_k = families_by_size(g, tks)?;
    let rows = match_rows(g)?;
    let cols = matchings(g, None);
    let n = g.n();

    let mut paths: Vec<MatchPath> = g.edges().iter().map(|&(u, v)| MatchPath::Edge(u, v)).collect();
    paths.extend((1..=n).map(MatchPath::Vertex));
    paths.push(MatchPath::Stop { k: 0, j: 0 });
    for (&k, fam) in &by_k {
        for j in 1..=fam.sets.len() {
            paths.push(MatchPath::Stop { k, j });
            for u in 1..=n {
                for r in 1..=n {
                    paths.push(MatchPath::Pair { k, j, u, reply: r });
                }
            }
        }
    }

    // Bob's announced index per matching, 1-based; 0 for the empty matching.
    let announced: Vec<Option<usize>> = cols
        .iter()
        .map(|m| {
            if m.size() == 0 {
                Some(0)
            } else {
                by_k.get(&m.size()).and_then(|f| f.first_compatible(m)).map(|j| j + 1)
            }
        })
        .collect();
    if let Some(c) = announced.iter().position(Option::is_none) {
        return Err(Error::UncoveredMatching {
            k: cols[c].size(),
            matching: cols[c].label(),
        });
    }

    let x_of = |k: usize, j: usize| by_k[&k].sets[j - 1];
    let a = RatMatrix::from_fn(
        rows.iter().map(MatchRow::label).collect(),
        paths.iter().map(MatchPath::label).collect(),
        |r, p| match (rows[r], paths[p]) {
            (MatchRow::Edge(a, b), MatchPath::Edge(c, d)) if (a, b) == (c, d) => Rational::one(),
            (MatchRow::Vertex(v), MatchPath::Vertex(w)) if v == w => Rational::one(),
            (MatchRow::OddSet(u), MatchPath::Stop { k: 0, .. }) => odd_set_bound(u),
            (MatchRow::OddSet(u), MatchPath::Stop { k, j }) => {
                if first_message(u, x_of(k, j)).is_none() {
                    odd_set_bound(u)
                } else {
                    Rational::zero()
                }
            }
            (MatchRow::OddSet(set), MatchPath::Pair { k, j, u, reply }) => {
                let x = x_of(k, j);
                match first_message(set, x).and_then(|d| d.get(&u).cloned()) {
                    Some(p) => p * claim(set, x, u, reply),
                    None => Rational::zero(),
                }
            }
            _ => Rational::zero(),
        },
    )?;
    let b = RatMatrix::from_fn(
        paths.iter().map(MatchPath::label).collect(),
        cols.iter().map(Matching::label).collect(),
        |p, c| {
            let m = &cols[c];
            let hit = match paths[p] {
                MatchPath::Edge(u, v) => m.contains_edge(u, v),
                MatchPath::Vertex(v) => m.degree(v) == 0,
                MatchPath::Stop { k, j } => m.size() == k && announced[c] == Some(j),
                MatchPath::Pair { k, j, u, reply: r } => {
                    m.size() == k && announced[c] == Some(j) && reply(m, u) == r
                }
            };
            Rational::from(i64::from(hit))
        },
    )?;
    Factorization::new(a, b)?.pruned()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub width: usize,
    /// `|E| + |V| + n(n−1)·Σ_k |T_k|`, the path count without stop and
    /// unmatched-reply paths.
    pub path_count_bound: usize,
    /// `n³·ln(n)·1.5ⁿ` with `ln n` replaced by a certified lower bound.
    pub bound: Rational,
    pub within: bool,
}

pub fn match_width_report(g: &Graph, tks: &[TkFamily], f: &Factorization) -> Result<WidthReport> {
    let n = g.n();
    let (ln_lo, _) = ln_bounds(n.max(1) as u64)?;
    let bound = Rational::from(n * n * n) * ln_lo * Rational::new(3, 2)?.pow(n as u32);
    let sets: usize = tks.iter().filter(|t| t.k > 0).map(|t| t.sets.len()).sum();
    let width = f.size();
    Ok(WidthReport {
        width,
        path_count_bound: g.edges().len() + n + n * n.saturating_sub(1) * sets,
        within: Rational::from(width) <= bound,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combi::{subsets, SubsetFilter};
    use crate::cover::build_all_tk;
    use crate::exactnum::int;
    use crate::slack::slack_match;

    fn s(n: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, e).unwrap()
    }

    #[test]
    fn k4_hand_traces() {
        let g = Graph::complete(4);
        let tks = build_all_tk(4).unwrap();
        let f = match_factorization(&g, &tks).unwrap();
        let prod = crate::exactnum::mat_mul(&f.a, &f.b).unwrap();
        assert_eq!(prod.get_by_label("{1,2,3}", "{{1,4}}").unwrap(), &int(1));
        assert_eq!(prod.get_by_label("{1,2,3}", "{{1,2}}").unwrap(), &int(0));
        assert_eq!(prod.get_by_label("{1,2}", "{{1,2}}").unwrap(), &int(1));
        assert!(f.verify(&slack_match(&g).unwrap().matrix).unwrap().is_equal());
    }

    #[test]
    fn single_steps_match_hand_trace() {
        let u = s(4, &[1, 2, 3]);
        let x = s(4, &[1]);
        assert_eq!(choose_side(u, x), x);
        let m = Matching::new(4, [(1, 4)]).unwrap();
        assert_eq!(reply(&m, 1), 4);
        assert_eq!(claim(u, x, 1, 4), int(1));
        let m = Matching::new(4, [(1, 2)]).unwrap();
        assert_eq!(claim(u, x, 1, reply(&m, 1)), int(0));
    }

    #[test]
    fn conditional_claims_equal_slack_for_every_compatible_set() {
        for n in [4, 5, 6] {
            let g = Graph::complete(n);
            for m in matchings(&g, None).into_iter().filter(|m| m.size() > 0) {
                for x in subsets(n, SubsetFilter::FixedSize(m.size())).unwrap() {
                    if !m.crosses(x) {
                        continue;
                    }
                    for u in subsets(n, SubsetFilter::OddAtLeast3).unwrap() {
                        let slack = MatchRow::OddSet(u).slack(&m);
                        assert_eq!(conditional_claim(u, &m, x), slack, "U={u:?} M={} X={x:?}", m.label());
                        if let Some(d) = first_message(u, x) {
                            assert_eq!(d.values().sum::<Rational>(), Rational::one());
                        }
                        for a in 1..=n {
                            for b in 1..=n {
                                assert!(!claim(u, x, a, b).is_negative());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_graph_width_is_vertex_count() {
        let g = Graph::new(4, []).unwrap();
        let f = match_factorization(&g, &[]).unwrap();
        assert!(f.verify(&slack_match(&g).unwrap().matrix).unwrap().is_equal());
        let r = match_width_report(&g, &[], &f).unwrap();
        assert_eq!(r.width, 4);
        assert!(r.within);
    }

    #[test]
    fn incomplete_family_is_rejected() {
        let g = Graph::complete(4);
        let mut tks = build_all_tk(4).unwrap();
        tks[1].sets.truncate(1);
        assert!(matches!(
            match_factorization(&g, &tks),
            Err(Error::UncoveredMatching { k: 1, .. })
        ));
        tks.truncate(1);
        assert!(match_factorization(&g, &tks).is_err());
    }
}
