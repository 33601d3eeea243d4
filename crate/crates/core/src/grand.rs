//! Hard-detection GRAND decoding with optional abandonment.
//!
//! The decoder walks putative noise effects in decreasing likelihood order,
//! strips each from the received word and asks whether the remainder is a
//! codeword. The first hit is a maximum-likelihood decoding. Capping the
//! number of queries turns unpromising decodings into erasures instead.
//!
//! Query counting includes the successful query, so the query count of a
//! decoded result equals the guesswork rank of its noise effect. With a cap
//! of `m`, exactly `m` failed membership tests are performed before the
//! decoder abandons.

use thiserror::Error;

use crate::bits::Bits;
use crate::code::{CodeError, LinearCode};
use crate::noise::{NoiseError, NoiseModel};

/// Codewords explored by the exhaustive ML oracle are capped at `2^k` for
/// `k` up to this limit.
pub const ML_ORACLE_MAX_K: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrandError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("code dimension {k} exceeds the exhaustive oracle limit {max}")]
    OracleScale { k: usize, max: usize },
}

/// Outcome of one decode attempt.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodeOutcome {
    Decoded {
        codeword: Bits,
        /// The stripped pattern, `received XOR codeword`.
        noise_effect: Bits,
    },
    Abandoned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub outcome: DecodeOutcome,
    /// Number of code-book membership tests performed.
    pub queries: u64,
}

impl DecodeResult {
    pub fn is_decoded(&self) -> bool {
        matches!(self.outcome, DecodeOutcome::Decoded { .. })
    }

    pub fn codeword(&self) -> Option<&Bits> {
        match &self.outcome {
            DecodeOutcome::Decoded { codeword, .. } => Some(codeword),
            DecodeOutcome::Abandoned => None,
        }
    }
}

/// ML decoding found by exhaustive search over all codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct MlDecoding {
    pub codeword: Bits,
    /// `log2 P(noise = received XOR codeword)`, the maximum over the book.
    pub noise_log2_likelihood: f64,
}

/// GRAND decode of `y`, testing at most `max_queries` patterns
/// (`None` = unbounded; some codeword is always reached because stripping
/// `y` itself yields the zero codeword).
pub fn grand_decode(
    code: &LinearCode,
    model: &NoiseModel,
    y: &Bits,
    max_queries: Option<u64>,
) -> Result<DecodeResult, GrandError> {
    if y.len() != code.n() {
        return Err(CodeError::LengthMismatch {
            expected: code.n(),
            got: y.len(),
        }
        .into());
    }
    if let Some(cap) = max_queries {
        assert!(cap >= 1, "query cap must be at least 1");
    }
    match model {
        NoiseModel::Bsc(_) => bsc_decode(code, y, max_queries),
        NoiseModel::Markov(_) => generic_decode(code, model, y, max_queries),
    }
}

/// Weight-ordered fast path: error patterns by increasing Hamming weight,
/// colexicographic within a weight class, with the syndrome updated
/// incrementally per changed position.
fn bsc_decode(
    code: &LinearCode,
    y: &Bits,
    max_queries: Option<u64>,
) -> Result<DecodeResult, GrandError> {
    let n = code.n();
    let budget = max_queries.unwrap_or(u64::MAX);
    let base = code.syndrome(y)?;
    let mut queries = 0u64;

    // weight 0
    queries += 1;
    if base.is_zero() {
        return Ok(DecodeResult {
            outcome: DecodeOutcome::Decoded {
                codeword: y.clone(),
                noise_effect: Bits::zeros(n),
            },
            queries,
        });
    }
    if queries == budget {
        return Ok(DecodeResult {
            outcome: DecodeOutcome::Abandoned,
            queries,
        });
    }

    let mut positions: Vec<usize> = Vec::with_capacity(n);
    let mut syn = base.clone();
    for w in 1..=n {
        positions.clear();
        positions.extend(0..w);
        syn.clone_from(&base);
        for pos in 0..w {
            syn.xor_assign(code.parity_column(pos));
        }
        loop {
            queries += 1;
            if syn.is_zero() {
                let mut noise_effect = Bits::zeros(n);
                for &p in &positions {
                    noise_effect.set(p, true);
                }
                let codeword = y.xor(&noise_effect);
                return Ok(DecodeResult {
                    outcome: DecodeOutcome::Decoded {
                        codeword,
                        noise_effect,
                    },
                    queries,
                });
            }
            if queries == budget {
                return Ok(DecodeResult {
                    outcome: DecodeOutcome::Abandoned,
                    queries,
                });
            }
            if !advance_colex_with_syndrome(&mut positions, n, code, &mut syn) {
                break;
            }
        }
    }
    unreachable!("stripping y itself always yields the zero codeword");
}

/// Colex successor that also applies the syndrome delta of every changed
/// position. Returns false when the weight class is exhausted.
#[inline]
fn advance_colex_with_syndrome(
    positions: &mut [usize],
    n: usize,
    code: &LinearCode,
    syn: &mut Bits,
) -> bool {
    let w = positions.len();
    let mut j = 0;
    while j + 1 < w && positions[j] + 1 == positions[j + 1] {
        j += 1;
    }
    let old = positions[j];
    if old + 1 >= n {
        return false;
    }
    // positions[0..=j] form the run start..=old; it becomes 0..j plus old+1
    let run_start = positions[0];
    if run_start != 0 {
        for i in 0..j {
            syn.xor_assign(code.parity_column(run_start + i));
            syn.xor_assign(code.parity_column(i));
            positions[i] = i;
        }
    }
    syn.xor_assign(code.parity_column(old));
    syn.xor_assign(code.parity_column(old + 1));
    positions[j] = old + 1;
    true
}

/// Likelihood-ordered path for models with memory; used whenever no closed
/// weight ordering applies.
fn generic_decode(
    code: &LinearCode,
    model: &NoiseModel,
    y: &Bits,
    max_queries: Option<u64>,
) -> Result<DecodeResult, GrandError> {
    let budget = max_queries.unwrap_or(u64::MAX);
    let base = code.syndrome(y)?;
    let mut queries = 0u64;
    let mut scratch = Bits::zeros(code.redundancy());
    for effect in model.ordered_effects(y.len()) {
        let effect = effect?;
        queries += 1;
        scratch.clone_from(&base);
        for pos in effect.bits.iter_ones() {
            scratch.xor_assign(code.parity_column(pos));
        }
        if scratch.is_zero() {
            let codeword = y.xor(&effect.bits);
            return Ok(DecodeResult {
                outcome: DecodeOutcome::Decoded {
                    codeword,
                    noise_effect: effect.bits,
                },
                queries,
            });
        }
        if queries == budget {
            return Ok(DecodeResult {
                outcome: DecodeOutcome::Abandoned,
                queries,
            });
        }
    }
    unreachable!("enumeration covers all patterns, including y itself");
}

/// Exhaustive ML decoding: scans all `2^k` codewords and returns one that
/// maximizes the noise likelihood of `y XOR codeword`. Likelihood ties are
/// broken exactly like the ordered enumeration ranks its patterns, by the
/// little-endian value of the noise effect.
pub fn ml_decode_exhaustive(
    code: &LinearCode,
    model: &NoiseModel,
    y: &Bits,
) -> Result<MlDecoding, GrandError> {
    if code.k() > ML_ORACLE_MAX_K {
        return Err(GrandError::OracleScale {
            k: code.k(),
            max: ML_ORACLE_MAX_K,
        });
    }
    if y.len() != code.n() {
        return Err(CodeError::LengthMismatch {
            expected: code.n(),
            got: y.len(),
        }
        .into());
    }
    // Gray-code walk over messages: one generator-row XOR per codeword.
    let mut codeword = Bits::zeros(code.n());
    let mut effect = y.clone();
    let mut best_cw = codeword.clone();
    let mut best_effect = effect.clone();
    let mut best_ll = model.log2_likelihood(&effect);
    for m in 1u64..(1u64 << code.k()) {
        let row = m.trailing_zeros() as usize;
        codeword.xor_assign(&code.generator_rows()[row]);
        effect.xor_assign(&code.generator_rows()[row]);
        let ll = model.log2_likelihood(&effect);
        if ll > best_ll
            || (ll == best_ll && effect.value_cmp(&best_effect) == std::cmp::Ordering::Less)
        {
            best_ll = ll;
            best_cw.clone_from(&codeword);
            best_effect.clone_from(&effect);
        }
    }
    Ok(MlDecoding {
        codeword: best_cw,
        noise_log2_likelihood: best_ll,
    })
}
