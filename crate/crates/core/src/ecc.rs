//! Eavesdropper information on a target parity bit when parities of
//! substrings (error-correction data) have been announced.
//!
//! A linear code is described by r independent parity strings with
//! announced values, plus a target substring whose parity is the secret
//! bit. Restricted to strings obeying the announcements, the two
//! 2^n-dimensional parity density matrices become block diagonal over the
//! cosets of the span of all r+1 strings: 2^{n-r-1} blocks of size
//! 2^{r+1}, each of rank one, so each block is a two-pure-state channel.
//! Summing the per-block optimal information weighted by the block
//! probabilities gives the exact optimum I_total.
//!
//! Everything here works from closed-form block entries; no dense
//! 2^n-dimensional matrix is ever materialized. Dense reconstructions
//! live in the tests as independent oracles.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::bsc_info_from_deviation;
use crate::info::TwoStateSource;
use crate::num::binomial;
use crate::parity::{coherent_info, ParityModel};

/// Cap on the number of coset blocks (2^{n-r-1}).
pub const BLOCK_COUNT_CAP: usize = 1 << 20;
/// Cap on the size of one coset block (2^{r+1}).
pub const BLOCK_SIZE_CAP: usize = 1 << 10;

// ---------------------------------------------------------------------------
// Bit strings over GF(2)
// ---------------------------------------------------------------------------

/// Fixed-length bit string over GF(2), at most 63 bits. Displayed and
/// parsed most-significant-bit first, matching the convention that bit 0
/// is the leftmost character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: u64,
    len: usize,
}

impl BitString {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > 63 {
            return Err(Error::param(format!(
                "bit-string length {len} outside 1..=63"
            )));
        }
        if bits >> len != 0 {
            return Err(Error::param(format!(
                "value {bits:#x} does not fit in {len} bits"
            )));
        }
        Ok(BitString { bits, len })
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new((1u64 << len) - 1, len)
    }

    /// Parse an MSB-first string of '0'/'1' characters.
    pub fn parse_msb(s: &str) -> Result<Self> {
        let len = s.len();
        if len == 0 || len > 63 {
            return Err(Error::param(format!(
                "bit-string length {len} outside 1..=63"
            )));
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::param(format!("invalid bit character {ch:?}"))),
            }
        }
        Ok(BitString { bits, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_u64(&self) -> u64 {
        self.bits
    }

    /// Hamming weight (number of ones).
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Parity: weight mod 2.
    pub fn parity(&self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }

    /// Bit at position `i`, counting from the most significant (leftmost).
    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.bits >> (self.len - 1 - i)) & 1) as u8
    }

    pub fn xor(&self, rhs: &BitString) -> BitString {
        debug_assert_eq!(self.len, rhs.len);
        BitString {
            bits: self.bits ^ rhs.bits,
            len: self.len,
        }
    }

    pub fn and(&self, rhs: &BitString) -> BitString {
        debug_assert_eq!(self.len, rhs.len);
        BitString {
            bits: self.bits & rhs.bits,
            len: self.len,
        }
    }

    /// Flip the bit at MSB-first position `i`.
    pub fn flip(&self, i: usize) -> BitString {
        BitString {
            bits: self.bits ^ (1u64 << (self.len - 1 - i)),
            len: self.len,
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

/// Rank of a set of GF(2) vectors (Gaussian elimination).
fn gf2_rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

// ---------------------------------------------------------------------------
// Parity codes
// ---------------------------------------------------------------------------

/// r announced parity substrings plus the target substring whose parity
/// is the secret bit. The r+1 strings must be linearly independent.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCode {
    n: usize,
    rows: Vec<BitString>,
    values: Vec<u8>,
    target: BitString,
    target_parity: u8,
}

/// Serialized form of a [`ParityCode`]; bit strings are written
/// most-significant-bit first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub rows: Vec<String>,
    pub values: Vec<u8>,
    pub target: String,
    pub target_parity: u8,
}

impl ParityCode {
    pub fn new(
        rows: Vec<BitString>,
        values: Vec<u8>,
        target: BitString,
        target_parity: u8,
    ) -> Result<Self> {
        let n = target.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param(
                "parity strings must all have the target's length",
            ));
        }
        if rows.len() != values.len() {
            return Err(Error::param(
                "one announced value per parity string required",
            ));
        }
        if values.iter().chain([&target_parity]).any(|&v| v > 1) {
            return Err(Error::param("announced parities must be 0 or 1"));
        }
        if rows.len() + 1 > n {
            return Err(Error::param(format!(
                "r + 1 = {} independent strings cannot fit in length {n}",
                rows.len() + 1
            )));
        }
        let mut vs: Vec<u64> = rows.iter().map(|r| r.as_u64()).collect();
        vs.push(target.as_u64());
        if gf2_rank(&vs) != vs.len() {
            return Err(Error::DependentRows);
        }
        Ok(ParityCode {
            n,
            rows,
            values,
            target,
            target_parity,
        })
    }

    /// Same strings, different announced values / target hypothesis.
    pub fn with_announced(&self, values: Vec<u8>, target_parity: u8) -> Result<Self> {
        ParityCode::new(self.rows.clone(), values, self.target, target_parity)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of announced parity strings.
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn target(&self) -> BitString {
        self.target
    }

    pub fn target_parity(&self) -> u8 {
        self.target_parity
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            n: self.n,
            rows: self.rows.iter().map(|r| r.to_string()).collect(),
            values: self.values.clone(),
            target: self.target.to_string(),
            target_parity: self.target_parity,
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let rows = file
            .rows
            .iter()
            .map(|s| BitString::parse_msb(s))
            .collect::<Result<Vec<_>>>()?;
        let target = BitString::parse_msb(&file.target)?;
        if target.len() != file.n || rows.iter().any(|r| r.len() != file.n) {
            return Err(Error::param("bit-string lengths disagree with n"));
        }
        ParityCode::new(rows, file.values.clone(), target, file.target_parity)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// The standard single-error-correcting Hamming code H_r of length
/// 2^r - 1, posed as announced parity substrings, with the all-ones
/// target. For r = 3 the rows are the classic (1110100; 1101010; 0111001).
pub fn hamming_code(r_param: usize) -> Result<ParityCode> {
    if !(2..=5).contains(&r_param) {
        return Err(Error::param(format!(
            "Hamming construction supported for r in 2..=5, got {r_param}"
        )));
    }
    let n = (1usize << r_param) - 1;
    let rows: Vec<BitString> = if r_param == 3 {
        ["1110100", "1101010", "0111001"]
            .iter()
            .map(|s| BitString::parse_msb(s).expect("static"))
            .collect()
    } else {
        // Systematic parity-check rows [A | I_r] whose data columns run
        // over all r-bit patterns of weight >= 2 in descending order.
        let data_cols: Vec<u64> = (0..(1u64 << r_param))
            .rev()
            .filter(|c| c.count_ones() >= 2)
            .collect();
        (0..r_param)
            .map(|l| {
                let mut bits = 0u64;
                for &c in &data_cols {
                    bits <<= 1;
                    bits |= (c >> (r_param - 1 - l)) & 1;
                }
                // parity (identity) part
                bits <<= r_param;
                bits |= 1 << (r_param - 1 - l);
                BitString::new(bits, n).expect("fits")
            })
            .collect()
    };
    ParityCode::new(rows, vec![0; r_param], BitString::ones(n)?, 0)
}

// ---------------------------------------------------------------------------
// Span closure and zero pattern
// ---------------------------------------------------------------------------

/// One linear combination in the span of the code's r+1 strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanElement {
    pub string: BitString,
    /// Parity induced by the announced row values alone.
    pub base_parity: u8,
    /// Whether the combination includes the target string.
    pub uses_target: bool,
    /// Induced parity under the code's target-parity hypothesis.
    pub parity: u8,
}

/// All 2^{r+1} linear combinations of the rows and the target, with their
/// induced parities. Element 0 is the zero string.
pub fn span_closure(code: &ParityCode) -> Vec<SpanElement> {
    let r = code.r();
    let mut out = Vec::with_capacity(1 << (r + 1));
    for mask in 0u32..(1u32 << (r + 1)) {
        let mut s = BitString::zero(code.n()).expect("n >= 1");
        let mut base = 0u8;
        for (l, row) in code.rows().iter().enumerate() {
            if (mask >> l) & 1 == 1 {
                s = s.xor(row);
                base ^= code.values()[l];
            }
        }
        let uses_target = (mask >> r) & 1 == 1;
        if uses_target {
            s = s.xor(&code.target());
        }
        let parity = base ^ if uses_target { code.target_parity() } else { 0 };
        out.push(SpanElement {
            string: s,
            base_parity: base,
            uses_target,
            parity,
        });
    }
    out
}

/// Predicate describing every entry of the code-conditioned parity
/// density matrix without building it: entry (j, k) vanishes unless
/// j XOR k lies in the span, in which case its sign is fixed by the
/// induced parity and its magnitude by the Hamming weights of j and k.
#[derive(Debug, Clone)]
pub struct ZeroPattern {
    n: usize,
    c_pow: Vec<f64>,
    s_pow: Vec<f64>,
    /// span string -> (base parity, uses_target)
    span: HashMap<u64, (u8, bool)>,
}

/// A single predicted matrix entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixEntry {
    Zero,
    /// sign in {-1, +1} and magnitude
    /// c^{2n - weight(j) - weight(k)} s^{weight(j) + weight(k)}.
    Value { sign: f64, magnitude: f64 },
}

impl MatrixEntry {
    pub fn value(&self) -> f64 {
        match self {
            MatrixEntry::Zero => 0.0,
            MatrixEntry::Value { sign, magnitude } => sign * magnitude,
        }
    }
}

impl ZeroPattern {
    pub fn new(code: &ParityCode, alpha: f64) -> Self {
        let n = code.n();
        let (c, s) = (alpha.cos(), alpha.sin());
        let mut c_pow = vec![1.0; 2 * n + 1];
        let mut s_pow = vec![1.0; 2 * n + 1];
        for i in 1..=2 * n {
            c_pow[i] = c_pow[i - 1] * c;
            s_pow[i] = s_pow[i - 1] * s;
        }
        let span = span_closure(code)
            .into_iter()
            .map(|e| (e.string.as_u64(), (e.base_parity, e.uses_target)))
            .collect();
        ZeroPattern {
            n,
            c_pow,
            s_pow,
            span,
        }
    }

    /// Entry (j, k) of the matrix conditioned on target parity `parity`.
    pub fn entry(&self, j: u64, k: u64, parity: u8) -> MatrixEntry {
        match self.span.get(&(j ^ k)) {
            None => MatrixEntry::Zero,
            Some(&(base, uses_target)) => {
                let induced = base ^ if uses_target { parity } else { 0 };
                let sign = if induced == 0 { 1.0 } else { -1.0 };
                let w = (j.count_ones() + k.count_ones()) as usize;
                MatrixEntry::Value {
                    sign,
                    magnitude: self.c_pow[2 * self.n - w] * self.s_pow[w],
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Coset blocks and exact information
// ---------------------------------------------------------------------------

/// One coset block of the code-conditioned parity matrices: a rank-one
/// pair of sub-states with weight `weight` and two-pure-state error
/// probability `error_probability`.
#[derive(Debug, Clone)]
pub struct CosetBlock {
    /// Basis indices of the coset, in span order (g, g ^ v_1, ...).
    pub indices: Vec<u64>,
    /// Tr of either parity's block.
    pub weight: f64,
    /// Unit vector of the parity-0 pure state restricted to the block.
    pub u0: Vec<f64>,
    /// Unit vector of the parity-1 pure state.
    pub u1: Vec<f64>,
    /// Deviation of the block channel from a useless one:
    /// p = 1/2 - deviation.
    pub deviation: f64,
    /// Two-pure-state optimal error probability (1 - sin 2 beta)/2.
    pub error_probability: f64,
}

fn check_caps(code: &ParityCode) -> Result<(usize, usize)> {
    let block_size = 1usize << (code.r() + 1);
    if block_size > BLOCK_SIZE_CAP {
        return Err(Error::BlockCap(format!(
            "block size {block_size} exceeds {BLOCK_SIZE_CAP}"
        )));
    }
    let block_count = 1usize << (code.n() - code.r() - 1);
    if block_count > BLOCK_COUNT_CAP {
        return Err(Error::BlockCap(format!(
            "block count {block_count} exceeds {BLOCK_COUNT_CAP}"
        )));
    }
    Ok((block_count, block_size))
}

/// Shared coset walk: calls `sink` once per block with
/// (representative, total weight a, weight of target-using members).
fn for_each_block(
    code: &ParityCode,
    alpha: f64,
    mut sink: impl FnMut(u64, f64, f64),
) -> Result<()> {
    let (block_count, block_size) = check_caps(code)?;
    let n = code.n();
    let dim = block_count * block_size; // 2^n
    let members: Vec<(u64, bool)> = span_closure(code)
        .iter()
        .map(|e| (e.string.as_u64(), e.uses_target))
        .collect();
    let (c, s) = (alpha.cos(), alpha.sin());
    let mut c_pow = vec![1.0f64; n + 1];
    let mut s_pow = vec![1.0f64; n + 1];
    for i in 1..=n {
        c_pow[i] = c_pow[i - 1] * (c * c);
        s_pow[i] = s_pow[i - 1] * (s * s);
    }
    let mut visited = vec![false; dim];
    for g in 0..dim as u64 {
        if visited[g as usize] {
            continue;
        }
        let mut a = 0.0f64;
        let mut target_weight = 0.0f64;
        for &(v, uses) in &members {
            let m = g ^ v;
            visited[m as usize] = true;
            let w = m.count_ones() as usize;
            let mag2 = c_pow[n - w] * s_pow[w];
            a += mag2;
            if uses {
                target_weight += mag2;
            }
        }
        sink(g, a, target_weight);
    }
    Ok(())
}

fn block_deviation(a: f64, target_weight: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let sd = target_weight.clamp(0.0, a);
    (sd * (a - sd)).sqrt() / a
}

/// Enumerate the coset blocks explicitly, including the per-parity pure
/// vectors. For large codes prefer [`exact_total_info`], which avoids
/// materializing the vectors.
pub fn code_blocks(code: &ParityCode, alpha: f64) -> Result<Vec<CosetBlock>> {
    let (block_count, block_size) = check_caps(code)?;
    let span = span_closure(code);
    let n = code.n();
    let (c, s) = (alpha.cos(), alpha.sin());
    let mut blocks = Vec::with_capacity(block_count);
    for_each_block(code, alpha, |g, a, target_weight| {
        let mut indices = Vec::with_capacity(block_size);
        let mut u0 = Vec::with_capacity(block_size);
        let mut u1 = Vec::with_capacity(block_size);
        let scale = if a > 0.0 { a.sqrt().recip() } else { 0.0 };
        for e in &span {
            let m = g ^ e.string.as_u64();
            indices.push(m);
            let w = m.count_ones() as i32;
            let mag = c.powi(n as i32 - w) * s.powi(w);
            let sign0 = if e.base_parity == 0 { 1.0 } else { -1.0 };
            let sign1 = if e.base_parity ^ u8::from(e.uses_target) == 0 {
                1.0
            } else {
                -1.0
            };
            u0.push(sign0 * mag * scale);
            u1.push(sign1 * mag * scale);
        }
        let deviation = block_deviation(a, target_weight);
        blocks.push(CosetBlock {
            indices,
            weight: a,
            u0,
            u1,
            deviation,
            error_probability: 0.5 - deviation,
        });
    })?;
    Ok(blocks)
}

/// Exact optimal information on the target parity given the announced
/// code data: sum over coset blocks of weight times the two-pure-state
/// channel information. Deterministic summation in ascending coset
/// representative order.
pub fn exact_total_info(code: &ParityCode, alpha: f64) -> Result<f64> {
    let mut acc = 0.0f64;
    for_each_block(code, alpha, |_, a, target_weight| {
        if a > 0.0 {
            acc += a * bsc_info_from_deviation(block_deviation(a, target_weight));
        }
    })?;
    Ok(acc)
}

/// Evaluation mode for [`sum_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumBoundMode {
    /// Leading-order term c binom(2k, k) alpha^{2k} per word at distance
    /// 2k or 2k-1 (c = 1 even, 1/ln 2 odd).
    LeadingOrder,
    /// Exact parity-channel information at each word's distance.
    ExactPerWord,
}

/// Conjectured upper bound on [`exact_total_info`]: the sum over all 2^r
/// words of the announced span (including the zero word) of the optimal
/// parity information at Hamming distance d = weight(word XOR target).
pub fn sum_bound(code: &ParityCode, alpha: f64, mode: SumBoundMode) -> Result<f64> {
    let r = code.r();
    let mut acc = 0.0f64;
    for mask in 0u32..(1u32 << r) {
        let mut w = BitString::zero(code.n())?;
        for (l, row) in code.rows().iter().enumerate() {
            if (mask >> l) & 1 == 1 {
                w = w.xor(row);
            }
        }
        let d = w.xor(&code.target()).weight() as usize;
        debug_assert!(d >= 1, "independence guarantees distance >= 1");
        let term = match mode {
            SumBoundMode::LeadingOrder => {
                let k = d.div_ceil(2);
                let c = if d.is_multiple_of(2) {
                    1.0
                } else {
                    1.0 / std::f64::consts::LN_2
                };
                c * binomial(2 * k, k) * alpha.powi(2 * k as i32)
            }
            SumBoundMode::ExactPerWord => {
                coherent_info(&ParityModel::new(d, TwoStateSource::pure(alpha)?)?)
            }
        };
        acc += term;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Decoding and reliability
// ---------------------------------------------------------------------------

/// Correct up to one error in `word` against the announced parities of a
/// Hamming-structured code. Returns the corrected word and whether a
/// correction was applied. Two-error inputs miscorrect by design; they
/// are only flagged as corrected.
pub fn syndrome_decode(word: &BitString, code: &ParityCode) -> Result<(BitString, bool)> {
    let n = code.n();
    let r = code.r();
    if word.len() != n {
        return Err(Error::param("word length does not match the code"));
    }
    // Column table: the syndrome produced by a single error at position i.
    let mut columns = vec![0u32; n];
    for (l, row) in code.rows().iter().enumerate() {
        for (i, col) in columns.iter_mut().enumerate() {
            *col |= u32::from(row.bit(i)) << (r - 1 - l);
        }
    }
    {
        let mut sorted = columns.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n || columns.contains(&0) {
            return Err(Error::param(
                "code is not Hamming-structured (columns not distinct and nonzero)",
            ));
        }
    }
    let mut syndrome = 0u32;
    for (l, row) in code.rows().iter().enumerate() {
        let s = word.and(row).parity() ^ code.values()[l];
        syndrome |= u32::from(s) << (r - 1 - l);
    }
    if syndrome == 0 {
        return Ok((*word, false));
    }
    let pos = columns
        .iter()
        .position(|&c| c == syndrome)
        .expect("all nonzero syndromes are columns of a Hamming code");
    Ok((word.flip(pos), true))
}

/// Leading-order failure probability of single-error correction over
/// `n` bits with normalized per-bit error `p_norm`:
/// p_f = n (n - 1) / 2 * p_norm^2.
pub fn reliability_estimate(n: usize, p_norm: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_norm) {
        return Err(Error::BadProbability(p_norm));
    }
    Ok((n * (n - 1)) as f64 / 2.0 * p_norm * p_norm)
}

/// Closed-form small-angle bound C(n) (2 alpha)^{(n+1)/2} on the
/// eavesdropper's information about the final parity bit when a
/// Hamming-style code of length n is announced, with
/// C(n) = sqrt(n+1) * 2 / (ln 2 sqrt(pi)).
pub fn security_bound(n: usize, alpha: f64) -> f64 {
    bound_coefficient(n) * (2.0 * alpha).powf((n as f64 + 1.0) / 2.0)
}

/// The same bound as a function of the induced error rate of the
/// translucent attack on the two-state scheme with angle `theta`:
/// C(n) (16 p_e tan^2 2 theta)^{(n+1)/8}.
pub fn security_bound_error(n: usize, p_e: f64, theta: f64) -> f64 {
    let t = (2.0 * theta).tan();
    bound_coefficient(n) * (16.0 * p_e * t * t).powf((n as f64 + 1.0) / 8.0)
}

fn bound_coefficient(n: usize) -> f64 {
    ((n + 1) as f64).sqrt() * 2.0 / (std::f64::consts::LN_2 * std::f64::consts::PI.sqrt())
}

// ---------------------------------------------------------------------------
// Conjecture audit
// ---------------------------------------------------------------------------

/// A random valid parity code with n in 3..=max_n and r in 0..=3 (capped
/// by n - 2), used by the conjecture audit and the dense-oracle tests.
pub fn random_code<R: rand::Rng + ?Sized>(rng: &mut R, max_n: usize) -> ParityCode {
    let max_n = max_n.clamp(3, 16);
    loop {
        let n = rng.random_range(3..=max_n);
        let r = rng.random_range(0..=3usize.min(n - 2));
        let mask = (1u64 << n) - 1;
        let mut strings: Vec<u64> = Vec::new();
        let mut guard = 0;
        while strings.len() < r + 1 {
            guard += 1;
            if guard > 1000 {
                break;
            }
            let cand = rng.random::<u64>() & mask;
            if cand == 0 {
                continue;
            }
            let mut trial = strings.clone();
            trial.push(cand);
            if gf2_rank(&trial) == trial.len() {
                strings.push(cand);
            }
        }
        if strings.len() < r + 1 {
            continue;
        }
        let target = BitString::new(strings.pop().unwrap(), n).unwrap();
        let rows: Vec<BitString> = strings
            .into_iter()
            .map(|b| BitString::new(b, n).unwrap())
            .collect();
        let values: Vec<u8> = (0..rows.len()).map(|_| rng.random_range(0..=1)).collect();
        let target_parity = rng.random_range(0..=1);
        if let Ok(code) = ParityCode::new(rows, values, target, target_parity) {
            return code;
        }
    }
}

/// One audited case where the conjectured sum bound failed to dominate
/// the exact information.
#[derive(Debug, Clone, Serialize)]
pub struct AuditFinding {
    pub code: CodeFile,
    pub alpha: f64,
    pub exact: f64,
    pub bound: f64,
}

/// Outcome of a randomized audit of the conjecture
/// exact_total_info <= sum_bound(exact-per-word).
#[derive(Debug, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub checked: usize,
    /// Smallest bound-minus-exact margin observed, in bits.
    pub min_margin: f64,
    pub violations: Vec<AuditFinding>,
}

/// Audit the conjecture on `count` seeded random codes with n <= max_n
/// and alpha <= alpha_max. Violations beyond a 1e-12 numerical allowance
/// are reported, not asserted.
pub fn audit_conjecture(
    seed: u64,
    count: usize,
    max_n: usize,
    alpha_max: f64,
) -> Result<AuditReport> {
    let mut rng = crate::rng::SeededStreams::new(seed).stream(0);
    let mut report = AuditReport {
        seed,
        checked: 0,
        min_margin: f64::INFINITY,
        violations: Vec::new(),
    };
    for _ in 0..count {
        let code = random_code(&mut rng, max_n);
        let alpha: f64 = rand::Rng::random_range(&mut rng, 0.005..=alpha_max);
        let exact = exact_total_info(&code, alpha)?;
        let bound = sum_bound(&code, alpha, SumBoundMode::ExactPerWord)?;
        let margin = bound - exact;
        report.min_margin = report.min_margin.min(margin);
        report.checked += 1;
        if margin < -1e-12 {
            report.violations.push(AuditFinding {
                code: code.to_file(),
                alpha,
                exact,
                bound,
            });
        }
    }
    Ok(report)
}
