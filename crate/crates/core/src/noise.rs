//! Binary additive noise models.
//!
//! Two processes are supported: the memoryless binary symmetric channel and a
//! two-state Markov chain whose state *is* the emitted noise bit (a burst
//! noise model). Both expose exact sequence log-probabilities (base 2) and an
//! enumeration of all length-`n` noise effects in non-increasing likelihood
//! order. The rank of an effect in that enumeration is its guesswork: the
//! number of queries a likelihood-ordered guesser spends before hitting it.
//!
//! Ties (equal-probability sequences) are broken deterministically by the
//! value of the sequence read as a little-endian integer, ascending. For the
//! BSC this coincides with enumerating each Hamming-weight class in
//! colexicographic order of the flipped-position sets.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use thiserror::Error;

use crate::bits::Bits;

/// Largest block length accepted by the brute-force distribution oracle.
pub const GUESSWORK_ORACLE_MAX_N: usize = 20;

/// Default cap on the best-first enumeration heap for Markov noise.
pub const DEFAULT_HEAP_CAP: usize = 1 << 22;

/// Safety margin added to heap completion bounds so that accumulated
/// rounding can never make a bound undercut a true completion probability.
const BOUND_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("bit-flip probability must lie strictly inside (0, 0.5), got {0}")]
    InvalidFlipProbability(f64),
    #[error("transition matrix row {row} must be a distribution (sums to {sum})")]
    InvalidTransitionRow { row: usize, sum: f64 },
    #[error("transition matrix entry ({row},{col}) = {value} outside [0, 1]")]
    InvalidTransitionEntry { row: usize, col: usize, value: f64 },
    #[error("initial distribution sums to {sum}, expected 1")]
    InvalidInitialDistribution { sum: f64 },
    #[error("initial distribution entry {index} = {value} outside [0, 1]")]
    InvalidInitialEntry { index: usize, value: f64 },
    #[error("enumeration budget exhausted: ordering heap exceeded {cap} entries")]
    EnumerationBudget { cap: usize },
    #[error("block length {n} exceeds the brute-force oracle limit {max}")]
    OracleScale { n: usize, max: usize },
}

/// Memoryless bit-flip noise with flip probability `p` in (0, 0.5).
///
/// The open interval is deliberate: `p = 0` makes the ordering trivial and
/// `p >= 0.5` inverts or degenerates it, while `p < 0.5` keeps "larger
/// Hamming weight" equivalent to "less likely".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BscNoise {
    p: f64,
}

impl BscNoise {
    pub fn new(p: f64) -> Result<Self, NoiseError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(NoiseError::InvalidFlipProbability(p));
        }
        Ok(BscNoise { p })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Two-state Markov noise. State 0 is quiet, state 1 is a burst, and the
/// emitted noise bit equals the state (the emission map is the identity in
/// this version; the field is kept for a future hidden-Markov extension).
///
/// An initial state is drawn from `pi0` and does not emit; the bits are the
/// states after each of the `n` transitions, so
/// `P(z) = sum_s pi0[s] * t[s][z_1] * t[z_1][z_2] * ... * t[z_{n-1}][z_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovNoise {
    t: [[f64; 2]; 2],
    pi0: [f64; 2],
    emission: [f64; 2],
}

impl MarkovNoise {
    pub fn new(t: [[f64; 2]; 2], pi0: [f64; 2]) -> Result<Self, NoiseError> {
        for (row, r) in t.iter().enumerate() {
            for (col, &value) in r.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) || value.is_nan() {
                    return Err(NoiseError::InvalidTransitionEntry { row, col, value });
                }
            }
            let sum = r[0] + r[1];
            if (sum - 1.0).abs() > 1e-12 {
                return Err(NoiseError::InvalidTransitionRow { row, sum });
            }
        }
        for (index, &value) in pi0.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(NoiseError::InvalidInitialEntry { index, value });
            }
        }
        let sum = pi0[0] + pi0[1];
        if (sum - 1.0).abs() > 1e-12 {
            return Err(NoiseError::InvalidInitialDistribution { sum });
        }
        Ok(MarkovNoise {
            t,
            pi0,
            emission: [0.0, 0.0],
        })
    }

    #[inline]
    pub fn transition(&self) -> &[[f64; 2]; 2] {
        &self.t
    }

    #[inline]
    pub fn initial(&self) -> &[f64; 2] {
        &self.pi0
    }

    /// Per-state probability of emitting the opposite of the state value.
    /// Fixed to zero (identity emission) in this version.
    #[inline]
    pub fn emission_flip(&self) -> &[f64; 2] {
        &self.emission
    }

    /// Marginal distribution of the first emitted bit: `pi0 * t`.
    #[inline]
    fn first_bit_prob(&self, bit: usize) -> f64 {
        self.pi0[0] * self.t[0][bit] + self.pi0[1] * self.t[1][bit]
    }
}

/// A binary additive noise process.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Bsc(BscNoise),
    Markov(MarkovNoise),
}

impl From<BscNoise> for NoiseModel {
    fn from(m: BscNoise) -> Self {
        NoiseModel::Bsc(m)
    }
}

impl From<MarkovNoise> for NoiseModel {
    fn from(m: MarkovNoise) -> Self {
        NoiseModel::Markov(m)
    }
}

/// One noise realization together with its exact base-2 log probability.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseEffect {
    pub bits: Bits,
    pub log2_prob: f64,
}

impl NoiseModel {
    /// Draws one length-`n` realization. Identical model, length and stream
    /// state always reproduce the same bits.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Bits {
        assert!(n >= 1, "noise length must be at least 1");
        let mut out = Bits::zeros(n);
        match self {
            NoiseModel::Bsc(m) => {
                for i in 0..n {
                    if rng.gen_bool(m.p) {
                        out.set(i, true);
                    }
                }
            }
            NoiseModel::Markov(m) => {
                let mut state = usize::from(rng.gen_bool(m.pi0[1]));
                for i in 0..n {
                    let bit = usize::from(rng.gen_bool(m.t[state][1]));
                    if bit == 1 {
                        out.set(i, true);
                    }
                    state = bit;
                }
            }
        }
        out
    }

    /// Exact `log2 P(N^n = z)`.
    ///
    /// Panics if `z` is empty.
    pub fn log2_likelihood(&self, z: &Bits) -> f64 {
        assert!(!z.is_empty(), "noise sequence must be nonempty");
        match self {
            NoiseModel::Bsc(m) => {
                let w = z.weight() as f64;
                let n = z.len() as f64;
                w * m.p.log2() + (n - w) * (1.0 - m.p).log2()
            }
            NoiseModel::Markov(m) => {
                // Accumulated left to right; the ordered enumerator mirrors
                // this exactly so equal-probability ties compare bit-equal.
                let mut acc = m.first_bit_prob(usize::from(z.get(0))).log2();
                let mut prev = usize::from(z.get(0));
                for i in 1..z.len() {
                    let bit = usize::from(z.get(i));
                    acc += m.t[prev][bit].log2();
                    prev = bit;
                }
                acc
            }
        }
    }

    /// Enumerates all `2^n` noise effects in non-increasing probability with
    /// the deterministic tie-break described in the module docs. The j-th
    /// yielded effect (1-based) has guesswork rank j.
    pub fn ordered_effects(&self, n: usize) -> OrderedEffects {
        self.ordered_effects_capped(n, DEFAULT_HEAP_CAP)
    }

    /// Like [`ordered_effects`](Self::ordered_effects) with an explicit heap
    /// budget for the Markov path. Exceeding the budget yields one
    /// [`NoiseError::EnumerationBudget`] item and then fuses.
    pub fn ordered_effects_capped(&self, n: usize, heap_cap: usize) -> OrderedEffects {
        assert!(n >= 1, "noise length must be at least 1");
        match self {
            NoiseModel::Bsc(m) => OrderedEffects::Bsc(BscOrdered::new(m, n)),
            NoiseModel::Markov(m) => OrderedEffects::Markov(MarkovOrdered::new(m, n, heap_cap)),
        }
    }

    /// All `2^n` sequence probabilities in non-increasing order. Brute-force
    /// oracle, limited to `n <= 20`.
    pub fn guesswork_distribution(&self, n: usize) -> Result<Vec<f64>, NoiseError> {
        assert!(n >= 1, "noise length must be at least 1");
        if n > GUESSWORK_ORACLE_MAX_N {
            return Err(NoiseError::OracleScale {
                n,
                max: GUESSWORK_ORACLE_MAX_N,
            });
        }
        match self {
            NoiseModel::Bsc(m) => {
                let mut out = Vec::with_capacity(1usize << n);
                for w in 0..=n {
                    let prob = (1.0 - m.p).powi((n - w) as i32) * m.p.powi(w as i32);
                    let count = binomial(n, w);
                    out.extend(std::iter::repeat_n(prob, count));
                }
                Ok(out)
            }
            NoiseModel::Markov(m) => {
                let mut out = Vec::with_capacity(1usize << n);
                for v in 0u64..(1u64 << n) {
                    let mut p = m.first_bit_prob((v & 1) as usize);
                    let mut prev = (v & 1) as usize;
                    for i in 1..n {
                        let bit = (v >> i & 1) as usize;
                        p *= m.t[prev][bit];
                        prev = bit;
                    }
                    out.push(p);
                }
                out.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
                Ok(out)
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Advances a sorted w-subset of `{0, .., n-1}` to its colexicographic
/// successor in place. Returns the highest index that changed, or `None`
/// once the enumeration is exhausted. Starting from `{0, .., w-1}` this
/// visits every w-subset exactly once, in ascending order of the subset's
/// characteristic integer.
pub fn next_colex_subset(positions: &mut [usize], n: usize) -> Option<usize> {
    let w = positions.len();
    if w == 0 {
        return None;
    }
    let mut j = 0;
    while j + 1 < w && positions[j] + 1 == positions[j + 1] {
        j += 1;
    }
    if positions[j] + 1 >= n {
        return None;
    }
    positions[j] += 1;
    for (i, p) in positions.iter_mut().enumerate().take(j) {
        *p = i;
    }
    Some(j)
}

/// Likelihood-ordered stream of noise effects.
pub enum OrderedEffects {
    Bsc(BscOrdered),
    Markov(MarkovOrdered),
}

impl Iterator for OrderedEffects {
    type Item = Result<NoiseEffect, NoiseError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            OrderedEffects::Bsc(it) => it.next().map(Ok),
            OrderedEffects::Markov(it) => it.next(),
        }
    }
}

/// BSC enumeration: weight classes in increasing weight, colex within each
/// class. Streaming, O(1) amortized work per pattern.
pub struct BscOrdered {
    n: usize,
    log2_p: f64,
    log2_q: f64,
    weight: usize,
    positions: Vec<usize>,
    class_fresh: bool,
    done: bool,
}

impl BscOrdered {
    fn new(m: &BscNoise, n: usize) -> Self {
        BscOrdered {
            n,
            log2_p: m.p.log2(),
            log2_q: (1.0 - m.p).log2(),
            weight: 0,
            positions: Vec::new(),
            class_fresh: true,
            done: false,
        }
    }

    fn emit(&self) -> NoiseEffect {
        let mut bits = Bits::zeros(self.n);
        for &p in &self.positions {
            bits.set(p, true);
        }
        let w = self.weight as f64;
        NoiseEffect {
            bits,
            log2_prob: w * self.log2_p + (self.n as f64 - w) * self.log2_q,
        }
    }
}

impl Iterator for BscOrdered {
    type Item = NoiseEffect;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.class_fresh {
            self.class_fresh = false;
            return Some(self.emit());
        }
        if next_colex_subset(&mut self.positions, self.n).is_some() {
            return Some(self.emit());
        }
        if self.weight == self.n {
            self.done = true;
            return None;
        }
        self.weight += 1;
        self.positions = (0..self.weight).collect();
        Some(self.emit())
    }
}

struct HeapEntry {
    /// Upper bound on the log2 probability of any completion; exact log2
    /// probability once `len == n`.
    key: f64,
    logp: f64,
    len: usize,
    last: usize,
    words: Vec<u64>,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: higher bound first, then smaller little-endian value.
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.words.iter().rev().cmp(self.words.iter().rev()))
    }
}

/// Generic likelihood-ordered enumeration for Markov noise: best-first
/// expansion of the prefix tree with an exact max-completion bound per
/// prefix. The heap size is capped; thresholded guessing in practice stays
/// far below the cap.
pub struct MarkovOrdered {
    n: usize,
    step_log2: [[f64; 2]; 2],
    first_log2: [f64; 2],
    /// `tail[m][s]`: best log2 probability of m further transitions from
    /// state s, plus the rounding margin (zero at m = 0).
    tail: Vec<[f64; 2]>,
    heap: BinaryHeap<HeapEntry>,
    cap: usize,
    failed: bool,
}

impl MarkovOrdered {
    fn new(model: &MarkovNoise, n: usize, cap: usize) -> Self {
        let step_log2 = [
            [model.t[0][0].log2(), model.t[0][1].log2()],
            [model.t[1][0].log2(), model.t[1][1].log2()],
        ];
        let first_log2 = [
            model.first_bit_prob(0).log2(),
            model.first_bit_prob(1).log2(),
        ];
        let mut tail = vec![[0.0f64; 2]; n];
        for m in 1..n {
            for s in 0..2 {
                let best = (step_log2[s][0] + tail[m - 1][0])
                    .max(step_log2[s][1] + tail[m - 1][1]);
                tail[m][s] = best + BOUND_MARGIN;
            }
        }
        let mut it = MarkovOrdered {
            n,
            step_log2,
            first_log2,
            tail,
            heap: BinaryHeap::new(),
            cap,
            failed: false,
        };
        for bit in 0..2usize {
            let logp = it.first_log2[bit];
            let mut words = vec![0u64; n.div_ceil(64)];
            if bit == 1 {
                words[0] = 1;
            }
            it.push_entry(logp, 1, bit, words);
        }
        it
    }

    fn push_entry(&mut self, logp: f64, len: usize, last: usize, words: Vec<u64>) {
        let key = if len == self.n {
            logp
        } else {
            logp + self.tail[self.n - len][last]
        };
        self.heap.push(HeapEntry {
            key,
            logp,
            len,
            last,
            words,
        });
    }

    fn next(&mut self) -> Option<Result<NoiseEffect, NoiseError>> {
        if self.failed {
            return None;
        }
        loop {
            let entry = self.heap.pop()?;
            if entry.len == self.n {
                return Some(Ok(NoiseEffect {
                    bits: Bits::from_words(entry.words, self.n),
                    log2_prob: entry.logp,
                }));
            }
            if self.heap.len() + 2 > self.cap {
                self.failed = true;
                return Some(Err(NoiseError::EnumerationBudget { cap: self.cap }));
            }
            for bit in 0..2usize {
                let mut words = entry.words.clone();
                if bit == 1 {
                    words[entry.len / 64] |= 1u64 << (entry.len % 64);
                }
                self.push_entry(
                    entry.logp + self.step_log2[entry.last][bit],
                    entry.len + 1,
                    bit,
                    words,
                );
            }
        }
    }
}
