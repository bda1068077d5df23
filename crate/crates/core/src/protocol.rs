//! Markovian two-party protocols on layered branching programs.
//!
//! Alice holds a row input `x`, Bob a column input `y`. The first speaker
//! draws a node of layer 1 from a distribution depending on their input;
//! afterwards speakers alternate, each drawing a node of the next layer from
//! a kernel that sees only their input and the previous node. The claimer
//! then outputs a nonnegative number depending on their input and the final
//! node. A protocol is correct for a nonnegative matrix `S` when the
//! expected output on `(x, y)` is exactly `S[x][y]`.
//!
//! Splitting each path probability into the factors contributed by Alice
//! and by Bob turns a correct protocol into a nonnegative factorization
//! `S = A·B` whose inner dimension is the number of live paths, and every
//! nonnegative factorization comes back as a one-round protocol.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{mat_mul_eq, MatMulCheck, RatMatrix, Rational};

/// Probability distribution over the nodes of one layer, by node index.
/// Only positive entries are stored.
pub type Dist = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "A",
            Party::Bob => "B",
        })
    }
}

/// Layers `V_1, …, V_k` of node labels; source and sink are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredBP {
    layers: Vec<Vec<String>>,
}

impl LayeredBP {
    pub fn new(layers: Vec<Vec<String>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::IllFormedProtocol("no layers".into()));
        }
        for (j, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::IllFormedProtocol(format!("layer {} is empty", j + 1)));
            }
            let mut seen = std::collections::HashSet::new();
            for label in layer {
                if label.contains('|') {
                    return Err(Error::IllFormedProtocol(format!("node label {label:?} contains '|'")));
                }
                if !seen.insert(label) {
                    return Err(Error::DuplicateLabel {
                        axis: "layer",
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(LayeredBP { layers })
    }

    pub fn rounds(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, j: usize) -> &[String] {
        &self.layers[j]
    }

    pub fn layers(&self) -> &[Vec<String>] {
        &self.layers
    }

    pub fn path_label(&self, path: &[usize]) -> String {
        path.iter()
            .enumerate()
            .map(|(j, &u)| self.layers[j][u].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Raw ingredients of a protocol, validated by [`MarkovianProtocol::new`].
///
/// `init[i]` is the layer-1 distribution of the first speaker on input `i`.
/// `kernels[j]` moves from layer `j + 1` to layer `j + 2` (1-based layers)
/// and is keyed by `(speaker input, node of the earlier layer)`.
/// `outputs[i][u]` is the claim on claimer input `i` at last-layer node `u`.
#[derive(Debug, Clone)]
pub struct ProtocolParts {
    pub bp: LayeredBP,
    pub x_domain: Vec<String>,
    pub y_domain: Vec<String>,
    pub first_speaker: Party,
    pub claimer: Party,
    pub init: Vec<Dist>,
    pub kernels: Vec<BTreeMap<(usize, usize), Dist>>,
    pub outputs: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone)]
pub struct MarkovianProtocol {
    bp: LayeredBP,
    x_domain: Vec<String>,
    y_domain: Vec<String>,
    first_speaker: Party,
    claimer: Party,
    init: Vec<Dist>,
    kernels: Vec<BTreeMap<(usize, usize), Dist>>,
    outputs: Vec<Vec<Rational>>,
}

fn check_dist(dist: &Dist, layer_len: usize, what: impl Fn() -> String) -> Result<()> {
    let mut total = Rational::zero();
    for (&u, p) in dist {
        if u >= layer_len {
            return Err(Error::IllFormedProtocol(format!("{}: node index {u} out of range", what())));
        }
        if p.is_negative() {
            return Err(Error::IllFormedProtocol(format!("{}: negative probability {p}", what())));
        }
        total += p;
    }
    if !total.is_one() {
        return Err(Error::IllFormedProtocol(format!("{}: probabilities sum to {total}", what())));
    }
    Ok(())
}

fn check_unique(labels: &[String], axis: &'static str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

fn strip_zeros(dist: Dist) -> Dist {
    dist.into_iter().filter(|(_, p)| !p.is_zero()).collect()
}

impl MarkovianProtocol {
    pub fn new(parts: ProtocolParts) -> Result<Self> {
        let ProtocolParts {
            bp,
            x_domain,
            y_domain,
            first_speaker,
            claimer,
            init,
            kernels,
            outputs,
        } = parts;
        check_unique(&x_domain, "x domain")?;
        check_unique(&y_domain, "y domain")?;
        let k = bp.rounds();
        if kernels.len() != k - 1 {
            return Err(Error::IllFormedProtocol(format!(
                "{k} layers need {} kernels, got {}",
                k - 1,
                kernels.len()
            )));
        }
        let domain_len = |p: Party| match p {
            Party::Alice => x_domain.len(),
            Party::Bob => y_domain.len(),
        };
        if init.len() != domain_len(first_speaker) {
            return Err(Error::IllFormedProtocol(format!(
                "expected {} initial distributions, got {}",
                domain_len(first_speaker),
                init.len()
            )));
        }
        let init: Vec<Dist> = init.into_iter().map(strip_zeros).collect();
        for (i, d) in init.iter().enumerate() {
            check_dist(d, bp.layer(0).len(), || format!("initial distribution {i}"))?;
        }
        let mut cleaned = Vec::with_capacity(kernels.len());
        for (j, kernel) in kernels.into_iter().enumerate() {
            let speaker = speaker_of(first_speaker, j + 1);
            let mut map = BTreeMap::new();
            for ((input, node), d) in kernel {
                if input >= domain_len(speaker) || node >= bp.layer(j).len() {
                    return Err(Error::IllFormedProtocol(format!(
                        "kernel {}: key ({input}, {node}) out of range",
                        j + 1
                    )));
                }
                let d = strip_zeros(d);
                check_dist(&d, bp.layer(j + 1).len(), || format!("kernel {} at ({input}, {node})", j + 1))?;
                map.insert((input, node), d);
            }
            cleaned.push(map);
        }
        let last = bp.layer(k - 1).len();
        if outputs.len() != domain_len(claimer) || outputs.iter().any(|row| row.len() != last) {
            return Err(Error::IllFormedProtocol(format!(
                "outputs must be {} x {last}",
                domain_len(claimer)
            )));
        }
        for (i, row) in outputs.iter().enumerate() {
            if let Some((u, v)) = row.iter().enumerate().find(|(_, v)| v.is_negative()) {
                return Err(Error::IllFormedProtocol(format!("negative output {v} at input {i}, node {u}")));
            }
        }
        Ok(MarkovianProtocol {
            bp,
            x_domain,
            y_domain,
            first_speaker,
            claimer,
            init,
            kernels: cleaned,
            outputs,
        })
    }

    pub fn bp(&self) -> &LayeredBP {
        &self.bp
    }

    pub fn rounds(&self) -> usize {
        self.bp.rounds()
    }

    pub fn x_domain(&self) -> &[String] {
        &self.x_domain
    }

    pub fn y_domain(&self) -> &[String] {
        &self.y_domain
    }

    pub fn first_speaker(&self) -> Party {
        self.first_speaker
    }

    pub fn claimer(&self) -> Party {
        self.claimer
    }

    /// Who draws the node of 0-based layer `j`.
    pub fn speaker(&self, j: usize) -> Party {
        speaker_of(self.first_speaker, j)
    }

    pub fn init(&self, input: usize) -> &Dist {
        &self.init[input]
    }

    /// Transition out of 0-based layer `j` at `node`, for the speaker's input.
    pub fn kernel(&self, j: usize, input: usize, node: usize) -> Option<&Dist> {
        self.kernels[j].get(&(input, node))
    }

    pub fn output(&self, input: usize, node: usize) -> &Rational {
        &self.outputs[input][node]
    }

    /// Replaces the initial distributions (used to condition on the first node).
    pub fn with_init(&self, init: Vec<Dist>) -> Result<Self> {
        MarkovianProtocol::new(ProtocolParts {
            bp: self.bp.clone(),
            x_domain: self.x_domain.clone(),
            y_domain: self.y_domain.clone(),
            first_speaker: self.first_speaker,
            claimer: self.claimer,
            init,
            kernels: self.kernels.clone(),
            outputs: self.outputs.clone(),
        })
    }

    fn input_of(&self, party: Party, x: usize, y: usize) -> usize {
        match party {
            Party::Alice => x,
            Party::Bob => y,
        }
    }

    fn check_inputs(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.x_domain.len() || y >= self.y_domain.len() {
            return Err(Error::IllFormedProtocol(format!("input pair ({x}, {y}) out of range")));
        }
        Ok(())
    }

    fn step(&self, j: usize, x: usize, y: usize, mass: &BTreeMap<usize, Rational>) -> Result<BTreeMap<usize, Rational>> {
        let input = self.input_of(self.speaker(j + 1), x, y);
        let mut next = BTreeMap::new();
        for (&u, m) in mass {
            let d = self.kernel(j, input, u).ok_or_else(|| {
                Error::IllFormedProtocol(format!(
                    "no transition from layer {} node {:?} for input {input}",
                    j + 1,
                    self.bp.layer(j)[u]
                ))
            })?;
            for (&v, p) in d {
                *next.entry(v).or_insert_with(Rational::zero) += m * p;
            }
        }
        Ok(next)
    }

    fn finish(&self, x: usize, y: usize, mass: &BTreeMap<usize, Rational>) -> Rational {
        let out = &self.outputs[self.input_of(self.claimer, x, y)];
        mass.iter().map(|(&u, m)| m * &out[u]).sum()
    }

    /// Exact expected output on input indices `(x, y)`.
    pub fn exact_expectation(&self, x: usize, y: usize) -> Result<Rational> {
        self.check_inputs(x, y)?;
        let mut mass = self.init[self.input_of(self.first_speaker, x, y)].clone();
        for j in 0..self.rounds() - 1 {
            mass = self.step(j, x, y, &mass)?;
        }
        Ok(self.finish(x, y, &mass))
    }

    pub fn expectation_by_label(&self, x: &str, y: &str) -> Result<Rational> {
        let xi = label_index(&self.x_domain, x)?;
        let yi = label_index(&self.y_domain, y)?;
        self.exact_expectation(xi, yi)
    }

    /// Expected output when the walk is started at `node` of 0-based layer `j`.
    pub fn expectation_from(&self, x: usize, y: usize, j: usize, node: usize) -> Result<Rational> {
        self.check_inputs(x, y)?;
        let mut mass = BTreeMap::from([(node, Rational::one())]);
        for jj in j..self.rounds() - 1 {
            mass = self.step(jj, x, y, &mass)?;
        }
        Ok(self.finish(x, y, &mass))
    }

    /// Probability that the walk on `(x, y)` begins with `prefix`.
    pub fn prefix_probability(&self, x: usize, y: usize, prefix: &[usize]) -> Result<Rational> {
        self.check_inputs(x, y)?;
        let Some(&first) = prefix.first() else {
            return Ok(Rational::one());
        };
        let mut p = self.init[self.input_of(self.first_speaker, x, y)]
            .get(&first)
            .cloned()
            .unwrap_or_else(Rational::zero);
        for (j, w) in prefix.windows(2).enumerate() {
            if p.is_zero() {
                break;
            }
            let input = self.input_of(self.speaker(j + 1), x, y);
            p *= self
                .kernel(j, input, w[0])
                .and_then(|d| d.get(&w[1]))
                .cloned()
                .unwrap_or_else(Rational::zero);
        }
        Ok(p)
    }

    /// Expected output conditioned on the walk beginning with `prefix`, or
    /// `None` when that prefix has probability zero.
    pub fn conditional_expectation(&self, x: usize, y: usize, prefix: &[usize]) -> Result<Option<Rational>> {
        let p = self.prefix_probability(x, y, prefix)?;
        if p.is_zero() {
            return Ok(None);
        }
        match prefix.last() {
            None => self.exact_expectation(x, y).map(Some),
            Some(&u) => self.expectation_from(x, y, prefix.len() - 1, u).map(Some),
        }
    }

    /// Product of the factors `party` contributes along `path`: their message
    /// probabilities, times the output when they are the claimer.
    pub fn path_weight(&self, party: Party, input: usize, path: &[usize]) -> Rational {
        let mut w = Rational::one();
        for (j, &u) in path.iter().enumerate() {
            if self.speaker(j) != party {
                continue;
            }
            let p = if j == 0 {
                self.init[input].get(&u)
            } else {
                self.kernel(j - 1, input, path[j - 1]).and_then(|d| d.get(&u))
            };
            match p {
                Some(p) => w *= p,
                None => return Rational::zero(),
            }
        }
        if self.claimer == party {
            w *= &self.outputs[input][*path.last().unwrap()];
        }
        w
    }

    /// Paths `γ` such that some `x` gives positive Alice weight and some `y`
    /// gives positive Bob weight, in lexicographic order of node indices.
    pub fn gamma_width(&self) -> GammaWidth {
        let k = self.rounds();
        let mut paths = Vec::new();
        let mut path = Vec::with_capacity(k);
        let alive_a: Vec<usize> = (0..self.x_domain.len()).collect();
        let alive_b: Vec<usize> = (0..self.y_domain.len()).collect();
        self.extend_paths(&mut path, alive_a, alive_b, &mut paths);
        let labels = paths.iter().map(|p| self.bp.path_label(p)).collect();
        GammaWidth { paths, labels }
    }

    fn extend_paths(&self, path: &mut Vec<usize>, alive_a: Vec<usize>, alive_b: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let j = path.len();
        if j == self.rounds() {
            let last = *path.last().unwrap();
            let claimers = match self.claimer {
                Party::Alice => &alive_a,
                Party::Bob => &alive_b,
            };
            if claimers.iter().any(|&i| self.outputs[i][last].is_positive()) {
                out.push(path.clone());
            }
            return;
        }
        let speaker = self.speaker(j);
        let speakers = match speaker {
            Party::Alice => &alive_a,
            Party::Bob => &alive_b,
        };
        let prev = path.last().copied();
        let dist_of = |i: usize| -> Option<&Dist> {
            match prev {
                None => Some(&self.init[i]),
                Some(u) => self.kernel(j - 1, i, u),
            }
        };
        let mut candidates = std::collections::BTreeSet::new();
        for &i in speakers {
            if let Some(d) = dist_of(i) {
                candidates.extend(d.keys().copied());
            }
        }
        for v in candidates {
            let keep: Vec<usize> = speakers
                .iter()
                .copied()
                .filter(|&i| dist_of(i).is_some_and(|d| d.contains_key(&v)))
                .collect();
            let (a, b) = match speaker {
                Party::Alice => (keep, alive_b.clone()),
                Party::Bob => (alive_a.clone(), keep),
            };
            path.push(v);
            self.extend_paths(path, a, b, out);
            path.pop();
        }
    }

    /// Exhaustively compares expectations against `s`, whose rows and
    /// columns must be labelled by the x and y domains.
    pub fn check_correct(&self, s: &RatMatrix) -> Result<Correctness> {
        if s.row_labels() != self.x_domain.as_slice() || s.col_labels() != self.y_domain.as_slice() {
            return Err(Error::LabelMismatch(
                "matrix labels differ from the protocol's input domains".into(),
            ));
        }
        for (i, row) in self.outputs.iter().enumerate() {
            if let Some(v) = row.iter().find(|v| v.is_negative()) {
                return Err(Error::IllFormedProtocol(format!("negative output {v} for input {i}")));
            }
        }
        let ncols = s.ncols();
        let found = (0..s.nrows() * ncols)
            .into_par_iter()
            .map(|idx| {
                let (x, y) = (idx / ncols, idx % ncols);
                let got = self.exact_expectation(x, y)?;
                let want = s.get(x, y);
                Ok((&got != want).then(|| Correctness::Counterexample {
                    x: self.x_domain[x].clone(),
                    y: self.y_domain[y].clone(),
                    got,
                    want: want.clone(),
                }))
            })
            .find_map_first(|r: Result<Option<Correctness>>| match r {
                Ok(None) => None,
                Ok(Some(c)) => Some(Ok(c)),
                Err(e) => Some(Err(e)),
            });
        match found {
            None => Ok(Correctness::Correct),
            Some(r) => r,
        }
    }

    /// Splits every live path probability into Alice's and Bob's factors.
    pub fn compile_factorization(&self) -> Result<Factorization> {
        let gw = self.gamma_width();
        let a = RatMatrix::from_fn(self.x_domain.clone(), gw.labels.clone(), |x, g| {
            self.path_weight(Party::Alice, x, &gw.paths[g])
        })?;
        let b = RatMatrix::from_fn(gw.labels.clone(), self.y_domain.clone(), |g, y| {
            self.path_weight(Party::Bob, y, &gw.paths[g])
        })?;
        Factorization::new(a, b)
    }

    /// Seeded Monte Carlo estimate of the expectation on `(x, y)`.
    ///
    /// Trial `t` draws from a ChaCha8 generator seeded with `seed` on stream
    /// `t`, so results do not depend on thread scheduling. Sampling is exact:
    /// each distribution is scaled to integer weights over the common
    /// denominator of its probabilities.
    pub fn simulate(&self, x: usize, y: usize, trials: u64, seed: u64) -> Result<SimulationResult> {
        self.check_inputs(x, y)?;
        if trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        let first = Sampler::new(&self.init[self.input_of(self.first_speaker, x, y)]);
        let mut steps: Vec<Vec<Option<Sampler>>> = Vec::new();
        for j in 0..self.rounds() - 1 {
            let input = self.input_of(self.speaker(j + 1), x, y);
            steps.push(
                (0..self.bp.layer(j).len())
                    .map(|u| self.kernel(j, input, u).map(Sampler::new))
                    .collect(),
            );
        }
        let last_len = self.bp.layer(self.rounds() - 1).len();
        let counts = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<Vec<u64>> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let mut u = first.sample(&mut rng);
                for (j, layer) in steps.iter().enumerate() {
                    let s = layer[u].as_ref().ok_or_else(|| {
                        Error::IllFormedProtocol(format!("no transition from layer {} node {u}", j + 1))
                    })?;
                    u = s.sample(&mut rng);
                }
                let mut c = vec![0u64; last_len];
                c[u] = 1;
                Ok(c)
            })
            .try_reduce(
                || vec![0u64; last_len],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )?;
        let out = &self.outputs[self.input_of(self.claimer, x, y)];
        let n = Rational::from(trials as i64);
        let mut sum = Rational::zero();
        let mut sum_sq = Rational::zero();
        for (u, &c) in counts.iter().enumerate() {
            if c > 0 {
                let c = Rational::from(c as i64);
                sum += &c * &out[u];
                sum_sq += &c * &out[u] * &out[u];
            }
        }
        let mean = sum.checked_div(&n)?;
        let variance = if trials > 1 {
            (sum_sq - &n * &mean * &mean).checked_div(&(&n - Rational::one()))?
        } else {
            Rational::zero()
        };
        let count_nonneg = counts
            .iter()
            .enumerate()
            .filter(|(u, _)| !out[*u].is_negative())
            .map(|(_, c)| c)
            .sum();
        Ok(SimulationResult {
            mean,
            variance,
            count_nonneg,
            trials,
        })
    }
}

fn speaker_of(first: Party, j: usize) -> Party {
    if j % 2 == 0 {
        first
    } else {
        first.other()
    }
}

fn label_index(domain: &[String], label: &str) -> Result<usize> {
    domain
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// Live paths of a protocol and their labels (node labels joined by `|`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaWidth {
    pub paths: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

impl GammaWidth {
    pub fn width(&self) -> usize {
        self.paths.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Correctness {
    Correct,
    Counterexample {
        x: String,
        y: String,
        got: Rational,
        want: Rational,
    },
}

impl Correctness {
    pub fn is_correct(&self) -> bool {
        matches!(self, Correctness::Correct)
    }
}

impl fmt::Display for Correctness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correctness::Correct => f.write_str("correct"),
            Correctness::Counterexample { x, y, got, want } => {
                write!(f, "counterexample at x={x} y={y}: expectation {got}, expected {want}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationResult {
    pub mean: Rational,
    /// Unbiased sample variance of the sampled outputs.
    pub variance: Rational,
    pub count_nonneg: u64,
    pub trials: u64,
}

enum Weights {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

/// Exact sampler over a finite rational distribution.
struct Sampler {
    nodes: Vec<usize>,
    cumulative: Weights,
}

impl Sampler {
    fn new(dist: &Dist) -> Sampler {
        let lcm = dist
            .values()
            .fold(num_bigint::BigInt::one(), |acc, p| acc.lcm(&p.denom()));
        let mut running = num_bigint::BigInt::zero();
        let mut cumulative = Vec::with_capacity(dist.len());
        for p in dist.values() {
            running += p.numer() * (&lcm / p.denom());
            cumulative.push(running.to_biguint().expect("probabilities are nonnegative"));
        }
        let small: Option<Vec<u128>> = cumulative.iter().map(|c| c.to_u128()).collect();
        Sampler {
            nodes: dist.keys().copied().collect(),
            cumulative: match small {
                Some(v) => Weights::Small(v),
                None => Weights::Big(cumulative),
            },
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let idx = match &self.cumulative {
            Weights::Small(c) => {
                let r = rng.random_range(0..*c.last().unwrap());
                c.partition_point(|&x| x <= r)
            }
            Weights::Big(c) => {
                let total = c.last().unwrap();
                let bits = total.bits();
                let bytes = bits.div_ceil(8) as usize;
                let r = loop {
                    let mut buf = vec![0u8; bytes];
                    rng.fill(&mut buf[..]);
                    if bits % 8 != 0 {
                        buf[bytes - 1] &= (1u8 << (bits % 8)) - 1;
                    }
                    let r = BigUint::from_bytes_le(&buf);
                    if &r < total {
                        break r;
                    }
                };
                c.partition_point(|x| x <= &r)
            }
        };
        self.nodes[idx]
    }
}

/// Nonnegative `A` (rows × Γ) and `B` (Γ × columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub a: RatMatrix,
    pub b: RatMatrix,
}

impl Factorization {
    pub fn new(a: RatMatrix, b: RatMatrix) -> Result<Self> {
        if a.col_labels() != b.row_labels() {
            return Err(Error::LabelMismatch(
                "columns of A must match rows of B".into(),
            ));
        }
        a.ensure_nonnegative()?;
        b.ensure_nonnegative()?;
        Ok(Factorization { a, b })
    }

    pub fn size(&self) -> usize {
        self.a.ncols()
    }

    pub fn gamma(&self) -> &[String] {
        self.a.col_labels()
    }

    /// Drops inner indices whose A column or B row is entirely zero.
    pub fn pruned(&self) -> Result<Factorization> {
        let keep: Vec<usize> = (0..self.size())
            .filter(|&g| {
                (0..self.a.nrows()).any(|r| !self.a.get(r, g).is_zero())
                    && self.b.row(g).iter().any(|v| !v.is_zero())
            })
            .collect();
        Factorization::new(self.a.select_cols(&keep)?, self.b.select_rows(&keep)?)
    }

    pub fn verify(&self, s: &RatMatrix) -> Result<MatMulCheck> {
        mat_mul_eq(&self.a, &self.b, s)
    }
}

/// Label of the sink node added by [`factorization_to_protocol`].
pub const SINK_LABEL: &str = "0";

/// One-round protocol realizing `A·B`: Alice scales row `i` of `A` so the
/// largest row sum is 1, sends inner index `k` (labelled `k + 1`) with that
/// probability and the sink `0` with the remainder; Bob claims the
/// correspondingly rescaled `B[k][j]`, and 0 at the sink.
pub fn factorization_to_protocol(a: &RatMatrix, b: &RatMatrix) -> Result<MarkovianProtocol> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    a.ensure_nonnegative()?;
    b.ensure_nonnegative()?;
    let r = a.ncols();
    let row_sums: Vec<Rational> = (0..a.nrows()).map(|i| a.row(i).iter().sum()).collect();
    let lambda = row_sums
        .iter()
        .max()
        .filter(|m| m.is_positive())
        .cloned()
        .unwrap_or_else(Rational::one);
    let mut nodes = vec![SINK_LABEL.to_string()];
    nodes.extend((1..=r).map(|k| k.to_string()));
    let init = (0..a.nrows())
        .map(|i| {
            let mut d = Dist::new();
            for k in 0..r {
                d.insert(k + 1, a.get(i, k).checked_div(&lambda)?);
            }
            d.insert(0, Rational::one() - row_sums[i].checked_div(&lambda)?);
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = (0..b.ncols())
        .map(|j| {
            let mut row = vec![Rational::zero()];
            row.extend((0..r).map(|k| b.get(k, j) * &lambda));
            row
        })
        .collect();
    MarkovianProtocol::new(ProtocolParts {
        bp: LayeredBP::new(vec![nodes])?,
        x_domain: a.row_labels().to_vec(),
        y_domain: b.col_labels().to_vec(),
        first_speaker: Party::Alice,
        claimer: Party::Bob,
        init,
        kernels: Vec::new(),
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{frac, int, mat_mul};

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn constant(c: Rational) -> MarkovianProtocol {
        // Alice picks a node at random, Bob replies, Alice claims c.
        let bp = LayeredBP::new(vec![labels("a", 2), labels("b", 3)]).unwrap();
        let init = vec![Dist::from([(0, frac(1, 3)), (1, frac(2, 3))]), Dist::from([(1, int(1))])];
        let mut kernel = BTreeMap::new();
        for y in 0..2 {
            for u in 0..2 {
                kernel.insert((y, u), Dist::from([(u, frac(1, 2)), (2, frac(1, 2))]));
            }
        }
        MarkovianProtocol::new(ProtocolParts {
            bp,
            x_domain: labels("x", 2),
            y_domain: labels("y", 2),
            first_speaker: Party::Alice,
            claimer: Party::Alice,
            init,
            kernels: vec![kernel],
            outputs: vec![vec![c.clone(); 3]; 2],
        })
        .unwrap()
    }

    #[test]
    fn constant_output_expectation_and_simulation() {
        let p = constant(frac(7, 3));
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(p.exact_expectation(x, y).unwrap(), frac(7, 3));
                let sim = p.simulate(x, y, 500, 99).unwrap();
                assert_eq!(sim.mean, frac(7, 3));
                assert_eq!(sim.variance, Rational::zero());
                assert_eq!(sim.count_nonneg, 500);
            }
        }
    }

    #[test]
    fn zero_outputs_have_no_live_paths() {
        let p = constant(Rational::zero());
        assert_eq!(p.gamma_width().width(), 0);
        let f = p.compile_factorization().unwrap();
        assert_eq!(f.size(), 0);
        assert_eq!(f.verify(&RatMatrix::zeros(labels("x", 2), labels("y", 2)).unwrap()).unwrap(), MatMulCheck::Equal);
    }

    #[test]
    fn single_node_protocol_has_width_one() {
        let p = MarkovianProtocol::new(ProtocolParts {
            bp: LayeredBP::new(vec![vec!["u".into()]]).unwrap(),
            x_domain: labels("x", 1),
            y_domain: labels("y", 1),
            first_speaker: Party::Alice,
            claimer: Party::Bob,
            init: vec![Dist::from([(0, int(1))])],
            kernels: vec![],
            outputs: vec![vec![int(5)]],
        })
        .unwrap();
        assert_eq!(p.gamma_width().width(), 1);
        assert_eq!(p.gamma_width().labels, ["u"]);
    }

    #[test]
    fn validation_rejects_bad_distributions() {
        let bp = LayeredBP::new(vec![labels("a", 2)]).unwrap();
        let parts = |init: Dist, out: Rational| ProtocolParts {
            bp: bp.clone(),
            x_domain: labels("x", 1),
            y_domain: labels("y", 1),
            first_speaker: Party::Alice,
            claimer: Party::Bob,
            init: vec![init],
            kernels: vec![],
            outputs: vec![vec![out.clone(), out]],
        };
        assert!(MarkovianProtocol::new(parts(Dist::from([(0, frac(1, 2))]), int(1))).is_err());
        assert!(MarkovianProtocol::new(parts(Dist::from([(0, frac(3, 2)), (1, frac(-1, 2))]), int(1))).is_err());
        assert!(MarkovianProtocol::new(parts(Dist::from([(5, int(1))]), int(1))).is_err());
        assert!(MarkovianProtocol::new(parts(Dist::from([(0, int(1))]), int(-1))).is_err());
        assert!(MarkovianProtocol::new(parts(Dist::from([(0, int(1))]), int(1))).is_ok());
    }

    #[test]
    fn missing_transition_is_reported() {
        let p = MarkovianProtocol::new(ProtocolParts {
            bp: LayeredBP::new(vec![labels("a", 1), labels("b", 1)]).unwrap(),
            x_domain: labels("x", 1),
            y_domain: labels("y", 1),
            first_speaker: Party::Alice,
            claimer: Party::Alice,
            init: vec![Dist::from([(0, int(1))])],
            kernels: vec![BTreeMap::new()],
            outputs: vec![vec![int(1)]],
        })
        .unwrap();
        assert!(matches!(p.exact_expectation(0, 0), Err(Error::IllFormedProtocol(_))));
    }

    #[test]
    fn swap_matrix_round_trip() {
        let a = RatMatrix::identity(2);
        let b = RatMatrix::from_grid(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let p = factorization_to_protocol(&a, &b).unwrap();
        assert_eq!(p.gamma_width().width(), 2);
        for (x, y, want) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)] {
            assert_eq!(p.exact_expectation(x, y).unwrap(), int(want));
        }
        let f = p.compile_factorization().unwrap();
        assert!(f.verify(&mat_mul(&a, &b).unwrap()).unwrap().is_equal());
        assert!(p.check_correct(&b).unwrap().is_correct());
    }

    #[test]
    fn rank_one_round_trip() {
        let a = RatMatrix::from_grid(vec![vec![int(1)]; 3]).unwrap();
        let b = RatMatrix::from_grid(vec![vec![int(1); 4]]).unwrap();
        let p = factorization_to_protocol(&a, &b).unwrap();
        assert_eq!(p.gamma_width().width(), 1);
        for x in 0..3 {
            for y in 0..4 {
                assert_eq!(p.exact_expectation(x, y).unwrap(), int(1));
            }
        }
    }

    #[test]
    fn scaling_uses_the_largest_row_sum() {
        let a = RatMatrix::from_grid(vec![vec![int(2), int(1)], vec![frac(1, 2), int(0)]]).unwrap();
        let b = RatMatrix::from_grid(vec![vec![int(1), int(3)], vec![frac(1, 5), int(0)]]).unwrap();
        let p = factorization_to_protocol(&a, &b).unwrap();
        assert_eq!(p.init(0).get(&0), None);
        assert_eq!(p.init(1).get(&0), Some(&frac(5, 6)));
        let prod = mat_mul(&a, &b).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(&p.exact_expectation(x, y).unwrap(), prod.get(x, y));
            }
        }
        assert!(factorization_to_protocol(&a, &a.transpose().scale(&int(-1))).is_err());
    }

    #[test]
    fn counterexample_reports_first_cell() {
        let a = RatMatrix::identity(2);
        let b = RatMatrix::identity(2);
        let p = factorization_to_protocol(&a, &b).unwrap();
        let wrong = RatMatrix::from_grid(vec![vec![int(1), int(0)], vec![int(0), int(2)]]).unwrap();
        assert_eq!(
            p.check_correct(&wrong).unwrap(),
            Correctness::Counterexample {
                x: "1".into(),
                y: "1".into(),
                got: int(1),
                want: int(2)
            }
        );
        let relabeled = RatMatrix::from_rows(labels("r", 2), labels("c", 2), vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        assert!(matches!(p.check_correct(&relabeled), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = RatMatrix::from_grid(vec![vec![frac(1, 3), frac(1, 3)]]).unwrap();
        let b = RatMatrix::from_grid(vec![vec![int(3)], vec![int(6)]]).unwrap();
        let p = factorization_to_protocol(&a, &b).unwrap();
        let first = p.simulate(0, 0, 2000, 7).unwrap();
        assert_eq!(first, p.simulate(0, 0, 2000, 7).unwrap());
        assert_ne!(first.mean, p.simulate(0, 0, 2000, 8).unwrap().mean);
    }
}
