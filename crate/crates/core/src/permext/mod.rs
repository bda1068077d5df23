//! Permutahedron extensions built from a sorting network.
//!
//! For a subset `J` the reverse network carries `J` to `{1, …, |J|}` and
//! colors each comparator; for a permutation `σ` the forward network sorts
//! `σ` and records the gap `w_l` at each comparator. The slack of `(J, σ)`
//! is `Σ_l (ε_l(J)·w_l(σ))₊`, which gives a nonnegative factorization with
//! `2q` inner columns and a one-round protocol of the same width.

mod fooling;
mod goemans;

use std::collections::BTreeMap;

pub use fooling::{fooling_verify, quadratic_fooling_set, quadratic_position, FoolingCheck, FoolingSet};
pub use goemans::{
    edmonds_membership, goemans_build, goemans_verify, lift_sigma, mk_monotone, prefix_minima,
    random_lift_combination, tilde_lift, tilde_project, tilde_roundtrip, GoemansConstraint, GoemansReport,
    GoemansSystem,
};

use crate::combi::{permutations, subsets, Perm, SubsetFilter, SubsetMask};
use crate::error::{Error, Result};
use crate::exactnum::{frac, RatMatrix, Rational};
use crate::protocol::{Dist, Factorization, LayeredBP, MarkovianProtocol, Party, ProtocolParts};
use crate::slack::MAX_PERM_SLACK_N;
use crate::sortnet::{colors, is_sorting_network, weights, ComparatorSeq, Direction};

/// Inner index label for comparator `l` (0-based) with color `ε`.
pub fn color_label(l: usize, eps: i8) -> String {
    match eps {
        1 => format!("({l},+1)"),
        -1 => format!("({l},-1)"),
        _ => format!("({l},0)"),
    }
}

fn check_network(seq: &ComparatorSeq) -> Result<()> {
    if !(2..=MAX_PERM_SLACK_N).contains(&seq.n()) {
        return Err(crate::error::out_of_range("n", seq.n(), format!("2..={MAX_PERM_SLACK_N}")));
    }
    if !is_sorting_network(seq, Direction::Forward) {
        return Err(Error::NotSortingNetwork);
    }
    Ok(())
}

fn domains(n: usize) -> Result<(Vec<SubsetMask>, Vec<Perm>)> {
    Ok((subsets(n, SubsetFilter::ProperNonempty)?, permutations(n)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermFactorization {
    pub seq: ComparatorSeq,
    pub factorization: Factorization,
}

impl PermFactorization {
    pub fn a(&self) -> &RatMatrix {
        &self.factorization.a
    }

    pub fn b(&self) -> &RatMatrix {
        &self.factorization.b
    }

    pub fn size(&self) -> usize {
        self.factorization.size()
    }
}

fn inner_index(q: usize) -> (Vec<(usize, i8)>, Vec<String>) {
    let inner: Vec<(usize, i8)> = (0..q).flat_map(|l| [(l, 1), (l, -1)]).collect();
    let labels = inner.iter().map(|&(l, e)| color_label(l, e)).collect();
    (inner, labels)
}

/// `A[J][(l,ε)] = 1[ε_l(J) = ε]` over proper nonempty `J` and `ε = ±1`.
pub fn color_matrix(seq: &ComparatorSeq) -> Result<RatMatrix> {
    check_network(seq)?;
    let sets = subsets(seq.n(), SubsetFilter::ProperNonempty)?;
    let (inner, labels) = inner_index(seq.len());
    let set_colors = sets.iter().map(|&j| colors(seq, j)).collect::<Result<Vec<_>>>()?;
    RatMatrix::from_fn(sets.iter().map(SubsetMask::label).collect(), labels, |r, c| {
        let (l, e) = inner[c];
        Rational::from(i64::from(set_colors[r][l] == e))
    })
}

/// `A` from [`color_matrix`] and `B[(l,ε)][σ] = (ε·w_l(σ))₊`.
pub fn perm_factorization(seq: &ComparatorSeq) -> Result<PermFactorization> {
    let a = color_matrix(seq)?;
    let perms = permutations(seq.n())?;
    let (inner, labels) = inner_index(seq.len());
    let perm_weights = perms.iter().map(|p| weights(seq, p)).collect::<Result<Vec<_>>>()?;
    let b = RatMatrix::from_fn(labels, perms.iter().map(Perm::label).collect(), |r, c| {
        let (l, e) = inner[r];
        Rational::from((i64::from(e) * perm_weights[c][l]).max(0))
    })?;
    Ok(PermFactorization {
        seq: seq.clone(),
        factorization: Factorization::new(a, b)?,
    })
}

/// Alice (holding `J`) picks a comparator `l` uniformly and sends it with
/// its color; Bob (holding `σ`) claims `(q·ε·w_l(σ))₊`.
pub fn one_round_protocol(seq: &ComparatorSeq) -> Result<MarkovianProtocol> {
    check_network(seq)?;
    let (sets, perms) = domains(seq.n())?;
    let q = seq.len();
    if q == 0 {
        return Err(Error::Invalid("a protocol needs at least one comparator".into()));
    }
    let node = |l: usize, e: i8| 3 * l + (1 - e) as usize;
    let nodes: Vec<String> = (0..q).flat_map(|l| [1, 0, -1].map(|e| color_label(l, e))).collect();
    let p = frac(1, q as i64);
    let init = sets
        .iter()
        .map(|&j| {
            Ok(colors(seq, j)?
                .into_iter()
                .enumerate()
                .map(|(l, e)| (node(l, e), p.clone()))
                .collect::<Dist>())
        })
        .collect::<Result<Vec<_>>>()?;
    let qi = q as i64;
    let outputs = perms
        .iter()
        .map(|s| {
            let w = weights(seq, s)?;
            Ok((0..q)
                .flat_map(|l| [1i64, 0, -1].map(|e| Rational::from((qi * e * w[l]).max(0))))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    MarkovianProtocol::new(ProtocolParts {
        bp: LayeredBP::new(vec![nodes])?,
        x_domain: sets.iter().map(SubsetMask::label).collect(),
        y_domain: perms.iter().map(Perm::label).collect(),
        first_speaker: Party::Alice,
        claimer: Party::Bob,
        init,
        kernels: vec![],
        outputs,
    })
}

pub const HALT_LABEL: &str = "halt";

/// Alice picks `l` uniformly among the `k` comparators with nonzero color
/// (or halts when there are none); Bob replies `w_l(σ)`; Alice claims
/// `(k·ε_l(J)·w)₊`.
pub fn two_round_protocol(seq: &ComparatorSeq) -> Result<MarkovianProtocol> {
    check_network(seq)?;
    let n = seq.n() as i64;
    let (sets, perms) = domains(seq.n())?;
    let q = seq.len();
    let gaps: Vec<i64> = (-(n - 1)..n).filter(|&w| w != 0).collect();
    let halt1 = q;
    let halt2 = q * gaps.len();
    let reply = |l: usize, w: i64| l * gaps.len() + gaps.iter().position(|&g| g == w).expect("gap in range");

    let mut first: Vec<String> = (0..q).map(|l| l.to_string()).collect();
    first.push(HALT_LABEL.into());
    let mut second: Vec<String> = (0..q)
        .flat_map(|l| gaps.iter().map(move |w| format!("({l},{w})")))
        .collect();
    second.push(HALT_LABEL.into());

    let set_colors = sets.iter().map(|&j| colors(seq, j)).collect::<Result<Vec<_>>>()?;
    let init = set_colors
        .iter()
        .map(|cs| {
            let live: Vec<usize> = (0..q).filter(|&l| cs[l] != 0).collect();
            if live.is_empty() {
                return Dist::from([(halt1, Rational::one())]);
            }
            let p = frac(1, live.len() as i64);
            live.into_iter().map(|l| (l, p.clone())).collect()
        })
        .collect();

    let mut kernel = BTreeMap::new();
    for (y, s) in perms.iter().enumerate() {
        let w = weights(seq, s)?;
        for l in 0..q {
            kernel.insert((y, l), Dist::from([(reply(l, w[l]), Rational::one())]));
        }
        kernel.insert((y, halt1), Dist::from([(halt2, Rational::one())]));
    }

    let outputs = set_colors
        .iter()
        .map(|cs| {
            let k = cs.iter().filter(|&&e| e != 0).count() as i64;
            let mut row: Vec<Rational> = (0..q)
                .flat_map(|l| gaps.iter().map(move |&w| Rational::from((k * i64::from(cs[l]) * w).max(0))))
                .collect();
            row.push(Rational::zero());
            row
        })
        .collect();

    MarkovianProtocol::new(ProtocolParts {
        bp: LayeredBP::new(vec![first, second])?,
        x_domain: sets.iter().map(SubsetMask::label).collect(),
        y_domain: perms.iter().map(Perm::label).collect(),
        first_speaker: Party::Alice,
        claimer: Party::Alice,
        init,
        kernels: vec![kernel],
        outputs,
    })
}
