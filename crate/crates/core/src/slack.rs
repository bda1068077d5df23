//! Exact slack matrices of the permutahedron, the spanning-tree polytope and
//! the matching polytope.
//!
//! Rows are constraints `⟨a, x⟩ ≤ b` (or `≥`), columns are vertices, and each
//! entry is the nonnegative gap between the two sides.

use crate::combi::{
    matchings, permutations, spanning_trees, subsets, Graph, Matching, Perm, SpanningTree,
    SubsetFilter, SubsetMask,
};
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::{frac, RatMatrix, Rational};

pub const MAX_PERM_SLACK_N: usize = 8;
pub const MAX_SPT_SLACK_N: usize = 7;
pub const MAX_MATCH_SLACK_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Polytope {
    Perm { n: usize },
    SpanningTree { n: usize, edges: usize },
    Matching { n: usize, edges: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Nonnegativity `x_e ≥ 0`.
    Edge,
    /// Degree bound `x(δ(v)) ≤ 1`.
    Vertex,
    /// Odd-set bound `x(E(U)) ≤ (|U|-1)/2`.
    OddSet,
    /// Subset bound: `x(J) ≥ |J|(|J|+1)/2` or `x(E(U)) ≤ |U|-1`.
    Subset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackMatrix {
    pub matrix: RatMatrix,
    pub polytope: Polytope,
    pub row_kinds: Vec<RowKind>,
}

impl SlackMatrix {
    fn build(matrix: RatMatrix, polytope: Polytope, row_kinds: Vec<RowKind>) -> Result<Self> {
        matrix.ensure_nonnegative()?;
        Ok(SlackMatrix {
            matrix,
            polytope,
            row_kinds,
        })
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// `|J|(|J|+1)/2`, the least value of `x(J)` over the permutahedron.
pub fn prefix_sum(k: usize) -> i64 {
    (k * (k + 1) / 2) as i64
}

/// Slack of the subset inequality `x(J) ≥ |J|(|J|+1)/2` at `x_σ`.
pub fn perm_slack_entry(set: SubsetMask, sigma: &Perm) -> i64 {
    sigma.subset_sum(set) - prefix_sum(set.len())
}

/// Rows: proper nonempty `J ⊂ [n]`; columns: permutations.
pub fn slack_perm(n: usize) -> Result<SlackMatrix> {
    if !(2..=MAX_PERM_SLACK_N).contains(&n) {
        return Err(out_of_range("n", n, format!("2..={MAX_PERM_SLACK_N}")));
    }
    let rows = subsets(n, SubsetFilter::ProperNonempty)?;
    let cols = permutations(n)?;
    let matrix = RatMatrix::from_fn(
        rows.iter().map(SubsetMask::label).collect(),
        cols.iter().map(Perm::label).collect(),
        |r, c| Rational::from_integer(perm_slack_entry(rows[r], &cols[c])),
    )?;
    SlackMatrix::build(matrix, Polytope::Perm { n }, vec![RowKind::Subset; rows.len()])
}

/// Rows of the spanning-tree slack matrix: `U ⊊ V` with `|U| ≥ 2` and `E(U) ≠ ∅`.
pub fn spt_rows(g: &Graph) -> Result<Vec<SubsetMask>> {
    Ok(subsets(g.n(), SubsetFilter::All)?
        .into_iter()
        .filter(|u| u.len() >= 2 && u.len() < g.n() && g.induced_edge_count(*u) > 0)
        .collect())
}

pub fn spt_slack_entry(set: SubsetMask, tree: &SpanningTree) -> i64 {
    set.len() as i64 - 1 - tree.induced_count(set) as i64
}

/// Label of the optional nonnegativity row for edge `{u,v}`.
pub fn edge_row_label(u: usize, v: usize) -> String {
    format!("e{{{u},{v}}}")
}

/// Spanning-tree slack matrix. With `nonnegativity`, the rows `x_e ≥ 0`
/// (labelled `e{u,v}`) come first.
pub fn slack_spt(g: &Graph, nonnegativity: bool) -> Result<SlackMatrix> {
    if g.n() > MAX_SPT_SLACK_N {
        return Err(out_of_range("n", g.n(), format!("1..={MAX_SPT_SLACK_N}")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let trees = spanning_trees(g)?;
    let sets = spt_rows(g)?;
    let edge_rows: &[(usize, usize)] = if nonnegativity { g.edges() } else { &[] };
    let mut labels: Vec<String> = edge_rows.iter().map(|&(u, v)| edge_row_label(u, v)).collect();
    labels.extend(sets.iter().map(SubsetMask::label));
    let mut kinds = vec![RowKind::Edge; edge_rows.len()];
    kinds.extend(std::iter::repeat_n(RowKind::Subset, sets.len()));
    let ne = edge_rows.len();
    let matrix = RatMatrix::from_fn(labels, trees.iter().map(SpanningTree::label).collect(), |r, c| {
        let t = &trees[c];
        let value = if r < ne {
            let (u, v) = edge_rows[r];
            i64::from(t.contains_edge(u, v))
        } else {
            spt_slack_entry(sets[r - ne], t)
        };
        Rational::from_integer(value)
    })?;
    SlackMatrix::build(
        matrix,
        Polytope::SpanningTree {
            n: g.n(),
            edges: g.edges().len(),
        },
        kinds,
    )
}

/// A constraint row of the matching polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchRow {
    Edge(usize, usize),
    Vertex(usize),
    OddSet(SubsetMask),
}

impl MatchRow {
    pub fn label(&self) -> String {
        match self {
            MatchRow::Edge(u, v) => crate::combi::edge_label(*u, *v),
            MatchRow::Vertex(v) => format!("v{v}"),
            MatchRow::OddSet(s) => s.label(),
        }
    }

    pub fn kind(&self) -> RowKind {
        match self {
            MatchRow::Edge(..) => RowKind::Edge,
            MatchRow::Vertex(_) => RowKind::Vertex,
            MatchRow::OddSet(_) => RowKind::OddSet,
        }
    }

    pub fn slack(&self, m: &Matching) -> Rational {
        match *self {
            MatchRow::Edge(u, v) => Rational::from_integer(i64::from(m.contains_edge(u, v))),
            MatchRow::Vertex(v) => Rational::from_integer(1 - m.degree(v) as i64),
            MatchRow::OddSet(s) => odd_set_bound(s) - Rational::from_integer(m.induced_count(s) as i64),
        }
    }
}

/// `(|U|-1)/2`.
pub fn odd_set_bound(set: SubsetMask) -> Rational {
    frac(set.len() as i64 - 1, 2)
}

/// Edges, then vertices, then odd sets `|U| ≥ 3` with `E(U) ≠ ∅`.
pub fn match_rows(g: &Graph) -> Result<Vec<MatchRow>> {
    let mut rows: Vec<MatchRow> = g.edges().iter().map(|&(u, v)| MatchRow::Edge(u, v)).collect();
    rows.extend((1..=g.n()).map(MatchRow::Vertex));
    rows.extend(
        subsets(g.n(), SubsetFilter::OddAtLeast3)?
            .into_iter()
            .filter(|u| g.induced_edge_count(*u) > 0)
            .map(MatchRow::OddSet),
    );
    Ok(rows)
}

/// Matching-polytope slack matrix; columns are all matchings of `g`, the
/// empty matching first.
pub fn slack_match(g: &Graph) -> Result<SlackMatrix> {
    if g.n() > MAX_MATCH_SLACK_N {
        return Err(out_of_range("n", g.n(), format!("0..={MAX_MATCH_SLACK_N}")));
    }
    let rows = match_rows(g)?;
    let cols = matchings(g, None);
    let matrix = RatMatrix::from_fn(
        rows.iter().map(MatchRow::label).collect(),
        cols.iter().map(Matching::label).collect(),
        |r, c| rows[r].slack(&cols[c]),
    )?;
    SlackMatrix::build(
        matrix,
        Polytope::Matching {
            n: g.n(),
            edges: g.edges().len(),
        },
        rows.iter().map(MatchRow::kind).collect(),
    )
}

/// Multiplies the permutation matrix of `σ` (row `i` has its one in column
/// `σ(i)`) by `(1, …, n)ᵀ` and checks the result is `x_σ`.
pub fn birkhoff_project(sigma: &Perm) -> Result<Vec<i64>> {
    let n = sigma.n();
    let weights: Vec<i64> = (1..=n as i64).collect();
    let projected: Vec<i64> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| i64::from(sigma.at(i) == j) * weights[j - 1])
                .sum()
        })
        .collect();
    let expected: Vec<i64> = sigma.word().iter().map(|&v| v as i64).collect();
    if projected != expected {
        return Err(Error::Internal(format!(
            "projection {projected:?} differs from {expected:?}"
        )));
    }
    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn perm_examples() {
        let s = slack_perm(3).unwrap();
        assert_eq!(s.nrows(), 6);
        assert_eq!(s.ncols(), 6);
        assert_eq!(s.matrix.get_by_label("{3}", "123").unwrap(), &int(2));
        assert_eq!(s.matrix.get_by_label("{1,2}", "123").unwrap(), &int(0));
        let two = slack_perm(2).unwrap();
        assert_eq!(two.matrix.row_labels(), ["{1}", "{2}"]);
        assert_eq!(two.matrix.col_labels(), ["12", "21"]);
        assert_eq!(two.matrix.row(0), [int(0), int(1)]);
        assert_eq!(two.matrix.row(1), [int(1), int(0)]);
        assert!(slack_perm(1).is_err());
        assert!(slack_perm(9).is_err());
    }

    #[test]
    fn perm_column_sums_constant() {
        for n in 2..=5 {
            let s = slack_perm(n).unwrap();
            let sums: Vec<Rational> = (0..s.ncols())
                .map(|c| (0..s.nrows()).map(|r| s.matrix.get(r, c)).sum())
                .collect();
            assert!(sums.iter().all(|x| x == &sums[0]), "n={n}");
        }
    }

    #[test]
    fn spt_examples() {
        let s = slack_spt(&Graph::complete(3), false).unwrap();
        assert_eq!(s.matrix.row_labels(), ["{1,2}", "{1,3}", "{2,3}"]);
        assert_eq!(s.matrix.get_by_label("{1,2}", "{{1,2},{2,3}}").unwrap(), &int(0));
        assert_eq!(s.matrix.get_by_label("{1,3}", "{{1,2},{2,3}}").unwrap(), &int(1));
        let with_edges = slack_spt(&Graph::complete(3), true).unwrap();
        assert_eq!(with_edges.nrows(), 6);
        assert_eq!(with_edges.matrix.get_by_label("e{1,3}", "{{1,2},{2,3}}").unwrap(), &int(0));
        let disconnected = Graph::new(4, [(1, 2), (3, 4)]).unwrap();
        assert_eq!(slack_spt(&disconnected, false), Err(Error::Disconnected));
    }

    #[test]
    fn match_examples() {
        let s = slack_match(&Graph::complete(4)).unwrap();
        assert_eq!(s.matrix.get_by_label("{1,2,3}", "{{1,2}}").unwrap(), &int(0));
        assert_eq!(s.matrix.get_by_label("{1,2,3}", "{{1,4}}").unwrap(), &int(1));
        assert_eq!(s.matrix.get_by_label("{1,2}", "{{1,2}}").unwrap(), &int(1));
        assert_eq!(s.matrix.get_by_label("{1,2,3}", "{}").unwrap(), &int(1));
        assert_eq!(s.matrix.get_by_label("v1", "{{1,2}}").unwrap(), &int(0));
        assert_eq!(s.nrows(), 6 + 4 + 4);
        assert_eq!(s.ncols(), 10);
    }

    #[test]
    fn every_facet_row_has_a_tight_vertex() {
        for n in 3..=5 {
            let g = Graph::complete(n);
            for s in [slack_perm(n).unwrap(), slack_spt(&g, false).unwrap(), slack_match(&g).unwrap()] {
                for r in 0..s.nrows() {
                    assert!(s.matrix.row(r).iter().any(Rational::is_zero), "{:?} row {r}", s.polytope);
                }
            }
        }
    }

    #[test]
    fn birkhoff_examples() {
        for (w, want) in [
            (vec![1, 2, 3], vec![1, 2, 3]),
            (vec![2, 1, 3], vec![2, 1, 3]),
            (vec![3, 1, 2], vec![3, 1, 2]),
        ] {
            assert_eq!(birkhoff_project(&Perm::new(w).unwrap()).unwrap(), want);
        }
        for p in permutations(5).unwrap() {
            birkhoff_project(&p).unwrap();
        }
    }
}
