//! Eavesdropper-side analysis of binary additive-noise channels.
//!
//! An error-correcting code whose rate exceeds the channel capacity cannot
//! be decoded reliably, but a maximum-likelihood decoding still succeeds
//! with probability about `2^(-n I(1-R))`, and a guess-bounded decoder can
//! tell *which* of its decodings to trust. This crate provides
//!
//! * [`noise`]: BSC and two-state Markov noise models with exact sequence
//!   likelihoods and likelihood-ordered effect enumeration,
//! * [`exponents`]: Renyi entropy rates, the guesswork SCGF, its
//!   Legendre-Fenchel transform, and the derived success-probability and
//!   confident-query exponents,
//! * [`code`]: random linear codes over GF(2) with syndrome membership,
//! * [`grand`]: GRAND decoding with abandonment plus an exhaustive ML
//!   oracle,
//! * [`sim`]: reproducible Monte Carlo sweeps of block error rate, success
//!   probability and query counts across channel conditions.

pub mod bits;
pub mod code;
pub mod exponents;
pub mod grand;
pub mod noise;
pub mod sim;

pub use bits::Bits;
pub use code::LinearCode;
pub use grand::{grand_decode, ml_decode_exhaustive, DecodeOutcome, DecodeResult};
pub use noise::{BscNoise, MarkovNoise, NoiseEffect, NoiseModel};
pub use sim::{Abandonment, NoiseKind, PointAggregate, SweepConfig};

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
