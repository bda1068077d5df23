//! Fooling sets: lower bounds on the rectangle covering number of a
//! nonnegative matrix, hence on its nonnegative rank.

use serde::{Deserialize, Serialize};

use crate::combi::SubsetMask;
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::RatMatrix;
use crate::sortnet::{quadratic, MAX_NET_N};

use super::color_label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingSet {
    /// `(row label, column label)` pairs.
    pub pairs: Vec<(String, String)>,
}

impl FoolingSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoolingCheck {
    Valid,
    /// The entry at pair `index` is not positive.
    ZeroPair { index: usize },
    /// Both cross entries of pairs `first` and `second` are positive.
    CrossPositive { first: usize, second: usize },
}

impl FoolingCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, FoolingCheck::Valid)
    }
}

pub fn fooling_verify(m: &RatMatrix, f: &FoolingSet) -> Result<FoolingCheck> {
    let rows = m.row_lookup();
    let cols = m.col_lookup();
    let idx = f
        .pairs
        .iter()
        .map(|(r, c)| {
            let r = *rows.get(r.as_str()).ok_or_else(|| Error::UnknownLabel(r.clone()))?;
            let c = *cols.get(c.as_str()).ok_or_else(|| Error::UnknownLabel(c.clone()))?;
            Ok((r, c))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(index) = idx.iter().position(|&(r, c)| !m.get(r, c).is_positive()) {
        return Ok(FoolingCheck::ZeroPair { index });
    }
    for (a, &(ra, ca)) in idx.iter().enumerate() {
        for (b, &(rb, cb)) in idx.iter().enumerate().skip(a + 1) {
            if m.get(ra, cb).is_positive() && m.get(rb, ca).is_positive() {
                return Ok(FoolingCheck::CrossPositive { first: a, second: b });
            }
        }
    }
    Ok(FoolingCheck::Valid)
}

/// 0-based position of comparator `(i, j)` in the quadratic network on `n` wires.
pub fn quadratic_position(n: usize, i: usize, j: usize) -> usize {
    i * (n - i) + i * (i + 1) / 2 - j
}

/// `n(n−1)` pairs against the color matrix of the quadratic network:
/// `[j] ∖ {i}` with `(l, +1)`, and `[i−1] ∪ {j+1}` (or `[i]` when `j = n`)
/// with `(l, −1)`, where `l` is the position of `(i, j)`.
pub fn quadratic_fooling_set(n: usize) -> Result<FoolingSet> {
    if !(2..=MAX_NET_N).contains(&n) {
        return Err(out_of_range("n", n, format!("2..={MAX_NET_N}")));
    }
    let seq = quadratic(n)?;
    let mut pairs = Vec::with_capacity(n * (n - 1));
    for i in 1..n {
        for j in i + 1..=n {
            let l = seq
                .position(i, j)
                .ok_or_else(|| Error::Internal(format!("({i},{j}) missing from the quadratic network")))?;
            if l != quadratic_position(n, i, j) {
                return Err(Error::Internal(format!(
                    "({i},{j}) sits at {l}, position formula gives {}",
                    quadratic_position(n, i, j)
                )));
            }
            let plus: Vec<usize> = (1..=j).filter(|&e| e != i).collect();
            let minus: Vec<usize> = if j < n {
                (1..i).chain([j + 1]).collect()
            } else {
                (1..=i).collect()
            };
            pairs.push((SubsetMask::from_elements(n, &plus)?.label(), color_label(l, 1)));
            pairs.push((SubsetMask::from_elements(n, &minus)?.label(), color_label(l, -1)));
        }
    }
    Ok(FoolingSet { pairs })
}
