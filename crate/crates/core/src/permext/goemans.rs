//! Goemans' extension of the permutahedron and its compact form.
//!
//! A point is `(y_0, …, y_q)` flattened into `n(q+1)` rationals. For
//! comparator `k = (i, j)`:
//! `y_{k+1}` agrees with `y_k` off `{i, j}`, the pair sums agree, and
//! `y_{k+1}[j] − y_{k+1}[i] ≥ |y_k[j] − y_k[i]|` (two linear inequalities).
//! Finally `y_q = (1, 2, …, n)`. The compact form keeps `y_0` and only the
//! two rewritten coordinates `(a_k, b_k)` of each later block.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combi::{permutations, Perm};
use crate::error::{out_of_range, Error, Result};
use crate::exactnum::Rational;
use crate::sortnet::{is_sorting_network, ComparatorSeq, Direction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoemansConstraint {
    /// `y_q[coord] = coord`.
    Terminal { coord: usize },
    /// `y_{k+1}[coord] = y_k[coord]` for a coordinate the comparator does not touch.
    Untouched { k: usize, coord: usize },
    /// `y_{k+1}[i] + y_{k+1}[j] = y_k[i] + y_k[j]`.
    PairSum { k: usize },
    /// `(y_{k+1} + y_k)[j] − (y_{k+1} + y_k)[i] ≥ 0`.
    PlusSide { k: usize },
    /// `(y_{k+1} − y_k)[j] − (y_{k+1} − y_k)[i] ≥ 0`.
    MinusSide { k: usize },
}

impl fmt::Display for GoemansConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoemansConstraint::Terminal { coord } => write!(f, "terminal block, coordinate {coord}"),
            GoemansConstraint::Untouched { k, coord } => write!(f, "comparator {k}, untouched coordinate {coord}"),
            GoemansConstraint::PairSum { k } => write!(f, "comparator {k}, pair sum"),
            GoemansConstraint::PlusSide { k } => write!(f, "comparator {k}, y_(k+1) + y_k inequality"),
            GoemansConstraint::MinusSide { k } => write!(f, "comparator {k}, y_(k+1) - y_k inequality"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoemansSystem {
    pub seq: ComparatorSeq,
}

pub const MAX_GOEMANS_N: usize = 12;

pub fn goemans_build(seq: &ComparatorSeq) -> Result<GoemansSystem> {
    if seq.n() > MAX_GOEMANS_N {
        return Err(out_of_range("n", seq.n(), format!("1..={MAX_GOEMANS_N}")));
    }
    if !is_sorting_network(seq, Direction::Forward) {
        return Err(Error::NotSortingNetwork);
    }
    Ok(GoemansSystem { seq: seq.clone() })
}

impl GoemansSystem {
    pub fn n(&self) -> usize {
        self.seq.n()
    }

    pub fn q(&self) -> usize {
        self.seq.len()
    }

    pub fn dimension(&self) -> usize {
        self.n() * (self.q() + 1)
    }

    pub fn compact_dimension(&self) -> usize {
        self.n() + 2 * self.q()
    }

    pub fn equality_count(&self) -> usize {
        self.n() + self.q() * (self.n() - 1)
    }

    pub fn inequality_count(&self) -> usize {
        2 * self.q()
    }

    fn check_len(&self, w: &[Rational]) -> Result<()> {
        if w.len() != self.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for dimension {}",
                w.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// The first constraint `w` violates, in the order terminal block, then
    /// per comparator: untouched coordinates, pair sum, the two inequalities.
    pub fn first_violation(&self, w: &[Rational]) -> Result<Option<GoemansConstraint>> {
        self.check_len(w)?;
        let n = self.n();
        let y = |k: usize, coord: usize| &w[k * n + coord - 1];
        let q = self.q();
        if let Some(coord) = (1..=n).find(|&c| *y(q, c) != Rational::from(c)) {
            return Ok(Some(GoemansConstraint::Terminal { coord }));
        }
        for (k, c) in self.seq.comps().iter().enumerate() {
            if let Some(coord) = (1..=n).find(|&l| l != c.i && l != c.j && y(k + 1, l) != y(k, l)) {
                return Ok(Some(GoemansConstraint::Untouched { k, coord }));
            }
            if y(k + 1, c.i) + y(k + 1, c.j) != y(k, c.i) + y(k, c.j) {
                return Ok(Some(GoemansConstraint::PairSum { k }));
            }
            let next = y(k + 1, c.j) - y(k + 1, c.i);
            let cur = y(k, c.j) - y(k, c.i);
            if (&next + &cur).is_negative() {
                return Ok(Some(GoemansConstraint::PlusSide { k }));
            }
            if (next - cur).is_negative() {
                return Ok(Some(GoemansConstraint::MinusSide { k }));
            }
        }
        Ok(None)
    }

    pub fn is_feasible(&self, w: &[Rational]) -> Result<bool> {
        Ok(self.first_violation(w)?.is_none())
    }

    pub fn project(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(w)?;
        Ok(w[..self.n()].to_vec())
    }

    pub fn block<'a>(&self, w: &'a [Rational], k: usize) -> &'a [Rational] {
        &w[k * self.n()..(k + 1) * self.n()]
    }
}

/// `(x⁽⁰⁾, …, x⁽q⁾)` with `x⁽⁰⁾ = (σ(1), …, σ(n))` pushed through the
/// forward network.
pub fn lift_sigma(seq: &ComparatorSeq, sigma: &Perm) -> Result<Vec<Rational>> {
    if sigma.n() != seq.n() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of {} for a network on {} wires",
            sigma.n(),
            seq.n()
        )));
    }
    let mut x: Vec<Rational> = sigma.word().iter().map(|&v| Rational::from(v)).collect();
    let mut out = x.clone();
    for c in seq.comps() {
        if x[c.i - 1] > x[c.j - 1] {
            x.swap(c.i - 1, c.j - 1);
        }
        out.extend(x.iter().cloned());
    }
    Ok(out)
}

/// `x([n]) = n(n+1)/2` and `x(J) ≥ |J|(|J|+1)/2` for every proper nonempty `J`.
pub fn edmonds_membership(x: &[Rational]) -> Result<bool> {
    let n = x.len();
    if !(1..=MAX_GOEMANS_N).contains(&n) {
        return Err(out_of_range("n", n, format!("1..={MAX_GOEMANS_N}")));
    }
    let target = |k: usize| Rational::from((k * (k + 1) / 2) as i64);
    let total: Rational = x.iter().sum();
    if total != target(n) {
        return Ok(false);
    }
    Ok((1u32..(1 << n) - 1).into_par_iter().all(|bits| {
        let sum: Rational = (0..n).filter(|b| bits & (1 << b) != 0).map(|b| &x[b]).sum();
        sum >= target(bits.count_ones() as usize)
    }))
}

/// `m_k(y)`: the least `y(J)` over `|J| = k`, for `k = 1..=n`.
pub fn prefix_minima(y: &[Rational]) -> Vec<Rational> {
    let mut sorted = y.to_vec();
    sorted.sort();
    sorted
        .iter()
        .scan(Rational::zero(), |acc, v| {
            *acc += v;
            Some(acc.clone())
        })
        .collect()
}

/// Whether every `m_k(y_j)` is non-increasing in `j`.
pub fn mk_monotone(system: &GoemansSystem, w: &[Rational]) -> Result<bool> {
    system.check_len(w)?;
    let minima: Vec<Vec<Rational>> = (0..=system.q()).map(|k| prefix_minima(system.block(w, k))).collect();
    Ok(minima.windows(2).all(|p| p[0].iter().zip(&p[1]).all(|(a, b)| a >= b)))
}

/// `(y_0, a_1, b_1, …, a_q, b_q)` with `(a_k, b_k) = (y_k[i], y_k[j])` for
/// the `k`-th comparator `(i, j)`.
pub fn tilde_project(system: &GoemansSystem, w: &[Rational]) -> Result<Vec<Rational>> {
    system.check_len(w)?;
    let mut out = system.block(w, 0).to_vec();
    for (k, c) in system.seq.comps().iter().enumerate() {
        let y = system.block(w, k + 1);
        out.push(y[c.i - 1].clone());
        out.push(y[c.j - 1].clone());
    }
    Ok(out)
}

/// Rebuilds `(y_0, z_1, …, z_q)` from the compact point by rewriting two
/// coordinates per comparator.
pub fn tilde_lift(system: &GoemansSystem, compact: &[Rational]) -> Result<Vec<Rational>> {
    let n = system.n();
    if compact.len() != system.compact_dimension() {
        return Err(Error::DimensionMismatch(format!(
            "compact point of length {} for dimension {}",
            compact.len(),
            system.compact_dimension()
        )));
    }
    let mut z = compact[..n].to_vec();
    let mut out = z.clone();
    for (k, c) in system.seq.comps().iter().enumerate() {
        z[c.i - 1] = compact[n + 2 * k].clone();
        z[c.j - 1] = compact[n + 2 * k + 1].clone();
        out.extend(z.iter().cloned());
    }
    Ok(out)
}

/// The compact constraints: `z_q = (1, …, n)`, `a_k + b_k = α_k + β_k` and
/// `b_k ≥ max(α_k, β_k)` where `(α_k, β_k)` are the old coordinates.
fn compact_feasible(system: &GoemansSystem, compact: &[Rational]) -> Result<bool> {
    let n = system.n();
    let mut z = compact[..n].to_vec();
    for (k, c) in system.seq.comps().iter().enumerate() {
        let (a, b) = (&compact[n + 2 * k], &compact[n + 2 * k + 1]);
        let (alpha, beta) = (&z[c.i - 1], &z[c.j - 1]);
        if a + b != alpha + beta || b < alpha || b < beta {
            return Ok(false);
        }
        z[c.i - 1] = a.clone();
        z[c.j - 1] = b.clone();
    }
    Ok(z.iter().enumerate().all(|(l, v)| *v == Rational::from(l + 1)))
}

/// Projects a feasible point to the compact form, checks the compact
/// constraints there, and confirms that lifting back returns the point.
pub fn tilde_roundtrip(system: &GoemansSystem, w: &[Rational]) -> Result<bool> {
    if let Some(v) = system.first_violation(w)? {
        return Err(Error::Infeasible(v.to_string()));
    }
    let compact = tilde_project(system, w)?;
    Ok(compact_feasible(system, &compact)? && tilde_lift(system, &compact)? == w)
}

/// A convex combination of `terms` lifts of uniformly random permutations
/// with random positive integer weights.
pub fn random_lift_combination<R: Rng>(system: &GoemansSystem, rng: &mut R, terms: usize) -> Result<Vec<Rational>> {
    let n = system.n();
    let mut acc = vec![Rational::zero(); system.dimension()];
    let mut total = 0i64;
    for _ in 0..terms.max(1) {
        let mut word: Vec<usize> = (1..=n).collect();
        word.shuffle(rng);
        let weight: i64 = rng.random_range(1..=100);
        total += weight;
        let lift = lift_sigma(&system.seq, &Perm::new(word)?)?;
        let weight = Rational::from(weight);
        for (a, v) in acc.iter_mut().zip(lift) {
            *a += &(v * &weight);
        }
    }
    let total = Rational::from(total);
    acc.into_iter().map(|v| v.checked_div(&total)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoemansReport {
    pub n: usize,
    pub q: usize,
    pub lifts: usize,
    pub samples: usize,
    /// Description of the first check that failed, if any.
    pub failure: Option<String>,
}

impl GoemansReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub const MAX_ALL_LIFTS_N: usize = 8;

/// Checks every lift (feasible, projects to its vertex, compact round trip,
/// monotone prefix minima), then `samples` seeded convex combinations
/// (feasible, projection inside the permutahedron, round trip, monotone).
pub fn goemans_verify(seq: &ComparatorSeq, samples: usize, seed: u64) -> Result<GoemansReport> {
    let system = goemans_build(seq)?;
    let n = system.n();
    let perms = if n <= MAX_ALL_LIFTS_N { permutations(n)? } else { vec![] };
    let check_point = |w: &[Rational], what: &str| -> Result<Option<String>> {
        if let Some(v) = system.first_violation(w)? {
            return Ok(Some(format!("{what}: violates {v}")));
        }
        if !tilde_roundtrip(&system, w)? {
            return Ok(Some(format!("{what}: compact round trip differs")));
        }
        if !mk_monotone(&system, w)? {
            return Ok(Some(format!("{what}: prefix minima increase")));
        }
        Ok(None)
    };
    let lift_failure = perms
        .par_iter()
        .map(|sigma| {
            let w = lift_sigma(seq, sigma)?;
            let what = format!("lift of {}", sigma.label());
            if let Some(f) = check_point(&w, &what)? {
                return Ok(Some(f));
            }
            let x: Vec<Rational> = sigma.word().iter().map(|&v| Rational::from(v)).collect();
            Ok((system.project(&w)? != x).then(|| format!("{what}: projection differs")))
        })
        .find_map_first(|r: Result<Option<String>>| r.transpose());
    let mut failure = lift_failure.transpose()?;
    if failure.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in 0..samples {
            let terms = rng.random_range(2..=4);
            let w = random_lift_combination(&system, &mut rng, terms)?;
            let what = format!("sample {s}");
            if let Some(f) = check_point(&w, &what)? {
                failure = Some(f);
                break;
            }
            if !edmonds_membership(&system.project(&w)?)? {
                failure = Some(format!("{what}: projection outside the permutahedron"));
                break;
            }
        }
    }
    Ok(GoemansReport {
        n,
        q: system.q(),
        lifts: perms.len(),
        samples,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{frac, int};
    use crate::sortnet::quadratic;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn lift_example() {
        let seq = quadratic(3).unwrap();
        let sys = goemans_build(&seq).unwrap();
        let w = lift_sigma(&seq, &Perm::new(vec![2, 1, 3]).unwrap()).unwrap();
        assert_eq!(w, ints(&[2, 1, 3, 2, 1, 3, 1, 2, 3, 1, 2, 3]));
        assert!(sys.is_feasible(&w).unwrap());
        assert_eq!(sys.project(&w).unwrap(), ints(&[2, 1, 3]));
        assert_eq!(sys.inequality_count(), 6);
        assert_eq!(sys.compact_dimension(), 9);
        assert!(tilde_roundtrip(&sys, &w).unwrap());
        let id = lift_sigma(&seq, &Perm::identity(3)).unwrap();
        assert_eq!(id, ints(&[1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3]));
        assert!(tilde_roundtrip(&sys, &id).unwrap());
        let mid: Vec<Rational> = w.iter().zip(&id).map(|(a, b)| (a + b) * frac(1, 2)).collect();
        assert!(tilde_roundtrip(&sys, &mid).unwrap());
    }

    #[test]
    fn infeasible_points() {
        let seq = quadratic(3).unwrap();
        let sys = goemans_build(&seq).unwrap();
        let mut w = lift_sigma(&seq, &Perm::new(vec![2, 1, 3]).unwrap()).unwrap();
        w[3] = int(3);
        w[5] = int(2);
        assert_eq!(sys.first_violation(&w).unwrap(), Some(GoemansConstraint::MinusSide { k: 0 }));
        assert!(matches!(tilde_roundtrip(&sys, &w), Err(Error::Infeasible(_))));
        let mut w = lift_sigma(&seq, &Perm::identity(3)).unwrap();
        w[11] = int(4);
        assert_eq!(sys.first_violation(&w).unwrap(), Some(GoemansConstraint::Terminal { coord: 3 }));
    }

    #[test]
    fn edmonds_examples() {
        assert!(edmonds_membership(&ints(&[2, 1, 3])).unwrap());
        assert!(!edmonds_membership(&ints(&[0, 0, 6])).unwrap());
        assert!(edmonds_membership(&ints(&[2, 2, 2])).unwrap());
        assert!(!edmonds_membership(&ints(&[1, 2, 4])).unwrap());
    }

    #[test]
    fn verify_small() {
        for n in 3..=4 {
            let r = goemans_verify(&quadratic(n).unwrap(), 50, 7).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.lifts, (1..=n).product::<usize>());
        }
    }

    #[test]
    fn prefix_minima_example() {
        assert_eq!(prefix_minima(&ints(&[3, 1, 2])), ints(&[1, 3, 6]));
    }
}
