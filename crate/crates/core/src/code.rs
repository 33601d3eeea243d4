//! Random linear codes over GF(2) in systematic form.
//!
//! A code is built as `G = [I_k | P]` with `P` uniformly random, which
//! guarantees rank k, and `H = [P^T | I_{n-k}]` so that `G H^T = 0`.
//! Membership is a syndrome test. Columns of `H` are precomputed so a
//! decoder can update a syndrome in O(1) words per flipped position.

use rand::Rng;
use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("code dimensions must satisfy 1 <= k < n, got n={n}, k={k}")]
    InvalidDimensions { n: usize, k: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parity part must be {k} rows of length {expected}")]
    InvalidParityPart { k: usize, expected: usize },
    #[error("generator import failed at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("imported generator is not in systematic [I|P] form (row {row})")]
    NotSystematic { row: usize },
}

/// An `[n, k]` binary linear code with systematic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    g_rows: Vec<Bits>,
    h_rows: Vec<Bits>,
    h_cols: Vec<Bits>,
}

impl LinearCode {
    /// Samples a random linear code: `P` uniform over k x (n-k) binary
    /// matrices. Deterministic given the stream state.
    pub fn sample_rlc<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self, CodeError> {
        if k == 0 || k >= n {
            return Err(CodeError::InvalidDimensions { n, k });
        }
        let p_rows: Vec<Bits> = (0..k).map(|_| Bits::random(n - k, rng)).collect();
        Self::from_parity_part(n, k, &p_rows)
    }

    /// Builds the code from an explicit parity part `P` (k rows of n-k bits).
    pub fn from_parity_part(n: usize, k: usize, p_rows: &[Bits]) -> Result<Self, CodeError> {
        if k == 0 || k >= n {
            return Err(CodeError::InvalidDimensions { n, k });
        }
        if p_rows.len() != k || p_rows.iter().any(|r| r.len() != n - k) {
            return Err(CodeError::InvalidParityPart { k, expected: n - k });
        }
        let r = n - k;
        let mut g_rows = Vec::with_capacity(k);
        for (i, p) in p_rows.iter().enumerate() {
            let mut row = Bits::zeros(n);
            row.set(i, true);
            for j in p.iter_ones() {
                row.set(k + j, true);
            }
            g_rows.push(row);
        }
        let mut h_rows = Vec::with_capacity(r);
        for j in 0..r {
            let mut row = Bits::zeros(n);
            for (i, p) in p_rows.iter().enumerate() {
                if p.get(j) {
                    row.set(i, true);
                }
            }
            row.set(k + j, true);
            h_rows.push(row);
        }
        let h_cols = (0..n)
            .map(|c| {
                let mut col = Bits::zeros(r);
                for (j, row) in h_rows.iter().enumerate() {
                    if row.get(c) {
                        col.set(j, true);
                    }
                }
                col
            })
            .collect();
        Ok(LinearCode {
            n,
            k,
            g_rows,
            h_rows,
            h_cols,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity bits, n - k.
    #[inline]
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    #[inline]
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    #[inline]
    pub fn generator_rows(&self) -> &[Bits] {
        &self.g_rows
    }

    #[inline]
    pub fn parity_rows(&self) -> &[Bits] {
        &self.h_rows
    }

    /// Column `j` of the parity-check matrix, as an (n-k)-bit vector.
    #[inline]
    pub fn parity_column(&self, j: usize) -> &Bits {
        &self.h_cols[j]
    }

    /// Encodes a k-bit message; the first k bits of the output equal `u`.
    pub fn encode(&self, u: &Bits) -> Result<Bits, CodeError> {
        if u.len() != self.k {
            return Err(CodeError::LengthMismatch {
                expected: self.k,
                got: u.len(),
            });
        }
        let mut x = Bits::zeros(self.n);
        for i in u.iter_ones() {
            x.xor_assign(&self.g_rows[i]);
        }
        Ok(x)
    }

    /// Syndrome `H v^T`; zero iff `v` is a codeword.
    pub fn syndrome(&self, v: &Bits) -> Result<Bits, CodeError> {
        if v.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut s = Bits::zeros(self.redundancy());
        for (j, row) in self.h_rows.iter().enumerate() {
            if row.dot(v) {
                s.set(j, true);
            }
        }
        Ok(s)
    }

    pub fn is_codeword(&self, v: &Bits) -> Result<bool, CodeError> {
        Ok(self.syndrome(v)?.is_zero())
    }

    /// Plain-text export: first line "n k", then the k generator rows as
    /// 0/1 characters.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k);
        for row in &self.g_rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format. Only systematic
    /// generators (`G = [I|P]`) are accepted.
    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| CodeError::Parse {
            line: 1,
            reason: "empty input".into(),
        })?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse {
                line: 1,
                reason: "header must be \"n k\"".into(),
            })?;
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse {
                line: 1,
                reason: "header must be \"n k\"".into(),
            })?;
        if k == 0 || k >= n {
            return Err(CodeError::InvalidDimensions { n, k });
        }
        let mut g_rows = Vec::with_capacity(k);
        for _ in 0..k {
            let (idx, line) = lines.next().ok_or_else(|| CodeError::Parse {
                line: k + 1,
                reason: format!("expected {k} generator rows"),
            })?;
            let row: Bits = line.trim().parse().map_err(|e| CodeError::Parse {
                line: idx + 1,
                reason: format!("{e}"),
            })?;
            if row.len() != n {
                return Err(CodeError::Parse {
                    line: idx + 1,
                    reason: format!("row length {} != n = {n}", row.len()),
                });
            }
            g_rows.push(row);
        }
        // verify the identity prefix, then strip P
        let mut p_rows = Vec::with_capacity(k);
        for (i, row) in g_rows.iter().enumerate() {
            for c in 0..k {
                if row.get(c) != (c == i) {
                    return Err(CodeError::NotSystematic { row: i });
                }
            }
            let mut p = Bits::zeros(n - k);
            for j in 0..n - k {
                if row.get(k + j) {
                    p.set(j, true);
                }
            }
            p_rows.push(p);
        }
        Self::from_parity_part(n, k, &p_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn repetition2() -> LinearCode {
        let p: Bits = "1".parse().unwrap();
        LinearCode::from_parity_part(2, 1, &[p]).unwrap()
    }

    #[test]
    fn repetition_code_instance() {
        let code = repetition2();
        assert_eq!(code.generator_rows()[0].to_string(), "11");
        assert_eq!(code.parity_rows()[0].to_string(), "11");
        let one: Bits = "1".parse().unwrap();
        assert_eq!(code.encode(&one).unwrap().to_string(), "11");
        let zero: Bits = "0".parse().unwrap();
        assert_eq!(code.encode(&zero).unwrap().to_string(), "00");
        let v: Bits = "10".parse().unwrap();
        assert_eq!(code.syndrome(&v).unwrap().to_string(), "1");
        assert!(!code.is_codeword(&v).unwrap());
    }

    #[test]
    fn invalid_dimensions_rejected() {
        assert!(LinearCode::sample_rlc(4, 0, &mut rng(0)).is_err());
        assert!(LinearCode::sample_rlc(4, 4, &mut rng(0)).is_err());
        assert!(LinearCode::sample_rlc(4, 5, &mut rng(0)).is_err());
    }

    #[test]
    fn generator_annihilates_parity_check() {
        for seed in 0..5 {
            let code = LinearCode::sample_rlc(24, 15, &mut rng(seed)).unwrap();
            for g in code.generator_rows() {
                for h in code.parity_rows() {
                    assert!(!g.dot(h));
                }
            }
        }
    }

    #[test]
    fn paper_scale_codes_construct() {
        let a = LinearCode::sample_rlc(128, 116, &mut rng(1)).unwrap();
        let b = LinearCode::sample_rlc(192, 174, &mut rng(1)).unwrap();
        assert!((a.rate() - 0.90625).abs() < 1e-12);
        assert!((b.rate() - 0.90625).abs() < 1e-12);
    }

    #[test]
    fn encoded_words_are_codewords() {
        let code = LinearCode::sample_rlc(40, 23, &mut rng(2)).unwrap();
        let mut r = rng(3);
        for _ in 0..10_000 {
            let u = Bits::random(23, &mut r);
            let x = code.encode(&u).unwrap();
            assert!(code.is_codeword(&x).unwrap());
            // systematic prefix
            for i in 0..23 {
                assert_eq!(x.get(i), u.get(i));
            }
        }
        let wrong = Bits::zeros(22);
        assert!(code.encode(&wrong).is_err());
    }

    #[test]
    fn syndrome_is_linear() {
        let code = LinearCode::sample_rlc(31, 17, &mut rng(4)).unwrap();
        let mut r = rng(5);
        for _ in 0..1000 {
            let v = Bits::random(31, &mut r);
            let w = Bits::random(31, &mut r);
            let sv = code.syndrome(&v).unwrap();
            let sw = code.syndrome(&w).unwrap();
            let sboth = code.syndrome(&v.xor(&w)).unwrap();
            assert_eq!(sboth, sv.xor(&sw));
        }
    }

    #[test]
    fn exhaustive_membership_count() {
        for (n, k) in [(8usize, 4usize), (12, 5), (10, 7)] {
            let code = LinearCode::sample_rlc(n, k, &mut rng(6)).unwrap();
            let mut count = 0usize;
            for v in 0u64..(1 << n) {
                let mut bits = Bits::zeros(n);
                for i in 0..n {
                    if v >> i & 1 == 1 {
                        bits.set(i, true);
                    }
                }
                if code.is_codeword(&bits).unwrap() {
                    count += 1;
                }
            }
            assert_eq!(count, 1 << k, "[{n},{k}]");
        }
    }

    #[test]
    fn corrupted_codeword_detected() {
        let code = LinearCode::sample_rlc(16, 9, &mut rng(7)).unwrap();
        let mut r = rng(8);
        for _ in 0..200 {
            let u = Bits::random(9, &mut r);
            let x = code.encode(&u).unwrap();
            let mut e = Bits::zeros(16);
            e.set(r.gen_range(0..16), true);
            if !code.syndrome(&e).unwrap().is_zero() {
                assert!(!code.is_codeword(&x.xor(&e)).unwrap());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = LinearCode::sample_rlc(64, 50, &mut rng(11)).unwrap();
        let b = LinearCode::sample_rlc(64, 50, &mut rng(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incremental_syndrome_matches_recomputation() {
        let code = LinearCode::sample_rlc(48, 36, &mut rng(12)).unwrap();
        let mut r = rng(13);
        for _ in 0..1000 {
            let mut v = Bits::random(48, &mut r);
            let mut s = code.syndrome(&v).unwrap();
            let pos = r.gen_range(0..48);
            v.flip(pos);
            s.xor_assign(code.parity_column(pos));
            assert_eq!(s, code.syndrome(&v).unwrap());
        }
    }

    #[test]
    fn text_roundtrip_and_rejections() {
        let code = LinearCode::sample_rlc(20, 11, &mut rng(14)).unwrap();
        let text = code.to_text();
        let back = LinearCode::from_text(&text).unwrap();
        assert_eq!(code, back);

        assert!(matches!(
            LinearCode::from_text("4 2\n0110\n0101\n"),
            Err(CodeError::NotSystematic { row: 0 })
        ));
        assert!(LinearCode::from_text("").is_err());
        assert!(LinearCode::from_text("4 2\n10x0\n0101\n").is_err());
        assert!(LinearCode::from_text("4 2\n1010\n").is_err());
        assert!(LinearCode::from_text("2 4\n").is_err());
    }
}
