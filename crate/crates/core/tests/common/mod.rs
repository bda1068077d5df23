//! Brute-force reference implementations, written independently of the
//! library so integration tests do not check code against itself.

#![allow(dead_code)]

use liftlab_core::protocol::MarkovianProtocol;
use liftlab_core::sortnet::ComparatorSeq;
use liftlab_core::{RatMatrix, Rational};
use rand::Rng;

/// All permutations of `1..=n` by Heap's algorithm.
pub fn all_words(n: usize) -> Vec<Vec<usize>> {
    let mut word: Vec<usize> = (1..=n).collect();
    let mut out = vec![word.clone()];
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            let k = if i % 2 == 0 { 0 } else { c[i] };
            word.swap(k, i);
            out.push(word.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Sorting check against every permutation, with a hand-rolled
/// compare-exchange.
pub fn sorts_every_permutation(seq: &ComparatorSeq) -> bool {
    all_words(seq.n()).into_iter().all(|mut w| {
        for c in seq.comps() {
            let (a, b) = (c.i - 1, c.j - 1);
            if w[a] > w[b] {
                let t = w[a];
                w[a] = w[b];
                w[b] = t;
            }
        }
        w.windows(2).all(|p| p[0] <= p[1])
    })
}

/// `Σ_{j∈J} σ(j) − |J|(|J|+1)/2`, with `J` given as 1-based elements.
pub fn perm_slack(set: &[usize], word: &[usize]) -> i64 {
    let s: usize = set.iter().map(|&j| word[j - 1]).sum();
    let k = set.len();
    s as i64 - (k * (k + 1) / 2) as i64
}

pub fn random_seq<R: Rng>(rng: &mut R, n: usize, max_q: usize) -> ComparatorSeq {
    let q = rng.random_range(0..=max_q);
    let pairs: Vec<(usize, usize)> = (0..q)
        .map(|_| {
            let i = rng.random_range(1..n);
            let j = rng.random_range(i + 1..=n);
            (i, j)
        })
        .collect();
    ComparatorSeq::new(n, pairs).expect("valid comparators")
}

/// Row-by-column products, no parallelism.
pub fn naive_product(a: &RatMatrix, b: &RatMatrix) -> Vec<Vec<Rational>> {
    (0..a.nrows())
        .map(|i| {
            (0..b.ncols())
                .map(|j| (0..a.ncols()).map(|k| a.get(i, k) * b.get(k, j)).sum())
                .collect()
        })
        .collect()
}

/// Expectation by listing every full path and multiplying probabilities
/// along it.
pub fn path_sum_expectation(p: &MarkovianProtocol, x: usize, y: usize) -> Rational {
    let input = |party: liftlab_core::protocol::Party| match party {
        liftlab_core::protocol::Party::Alice => x,
        liftlab_core::protocol::Party::Bob => y,
    };
    let mut frontier: Vec<(usize, Rational)> = p
        .init(input(p.first_speaker()))
        .iter()
        .map(|(&u, pr)| (u, pr.clone()))
        .collect();
    for j in 1..p.rounds() {
        let speaker = input(p.speaker(j));
        let mut next = Vec::new();
        for (u, pr) in frontier {
            let kernel = p.kernel(j - 1, speaker, u).expect("kernel on live node");
            for (&v, q) in kernel {
                next.push((v, &pr * q));
            }
        }
        frontier = next;
    }
    let claimer = input(p.claimer());
    frontier.iter().map(|(u, pr)| pr * p.output(claimer, *u)).sum()
}

pub fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(rng.random_range(0..=max_num), rng.random_range(1..=max_den)).expect("positive denominator")
}
