//! Information carried by the parity bit of an n-bit string of quantum
//! signals.
//!
//! For a source emitting (cos a, +-sin a) per bit (possibly mixed with
//! equal determinants), the two parity density matrices over the
//! 2^n-dimensional space decompose, after a basis permutation, into 2x2
//! blocks indexed by the Hamming weight k of the basis labels. Each block
//! is a binary symmetric subchannel with weight
//! q_k = c^{2(n-k)} s^{2k} + c^{2k} s^{2(n-k)} and error probability
//! p_k = 1/2 - a2^n / q_k, where a2 = sin a cos a - r_mix.
//!
//! Three figures of merit are computed from the spectrum:
//! I_M (optimal coherent measurement), I_S (optimal bitwise measurement),
//! and I_D (optimal conclusive measurement, pure sources only).
//!
//! Two computation paths exist on purpose: the closed-form spectrum in
//! log space works for any n, while dense matrices (n <= 12, brute-force
//! string averages n <= 8) validate it in tests.

use crate::error::{Error, Result};
use crate::hilbert::DensityOperator;
use crate::info::{bsc_info_from_deviation, TwoStateSource};
use crate::linalg::Matrix;
use crate::num::{binomial, ln_add_exp, ln_binomial};

/// Maximum string length for the dense-matrix path (2^12 = 4096 dims).
pub const DENSE_N_CAP: usize = 12;

/// An n-bit parity channel fed by a two-state source.
#[derive(Debug, Clone, Copy)]
pub struct ParityModel {
    pub n: usize,
    pub source: TwoStateSource,
}

impl ParityModel {
    pub fn new(n: usize, source: TwoStateSource) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("string length must be at least 1"));
        }
        Ok(ParityModel { n, source })
    }
}

/// One group of identical 2x2 blocks in the block-diagonalized parity
/// matrices.
#[derive(Debug, Clone, Copy)]
pub struct BlockEntry {
    /// Hamming-weight label, 0 <= k <= n/2.
    pub k: usize,
    /// Number of blocks in the group (binom(n, k), halved at k = n/2
    /// for even n).
    pub multiplicity: f64,
    /// Probability weight q_k of one block.
    pub weight: f64,
    /// ln(q_k), kept for underflow-free aggregation.
    pub ln_weight: f64,
    /// Subchannel error probability p_k = 1/2 - deviation.
    pub error_probability: f64,
    /// Deviation a2^n / q_k from a half; the numerically meaningful form
    /// of p_k when the subchannel is almost useless.
    pub deviation: f64,
}

/// The block spectrum of a parity channel.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub n: usize,
    pub entries: Vec<BlockEntry>,
}

impl BlockSpectrum {
    /// Sum of multiplicity * weight; equals 1 for a well-formed spectrum.
    pub fn total_weight(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.multiplicity * e.weight)
            .sum()
    }
}

fn count_times_ln(count: usize, ln_val: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_val
    }
}

/// Closed-form block spectrum; valid for any n >= 1.
pub fn block_spectrum(model: &ParityModel) -> BlockSpectrum {
    let n = model.n;
    let alpha = model.source.alpha();
    let (c, s) = (alpha.cos(), alpha.sin());
    let a2 = model.source.off_diagonal();
    let ln_c2 = 2.0 * c.ln();
    let ln_s2 = if s == 0.0 { f64::NEG_INFINITY } else { 2.0 * s.ln() };
    let ln_a2n = if a2 == 0.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * a2.ln()
    };

    let mut entries = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let halved = n.is_multiple_of(2) && k == n / 2;
        let multiplicity = if halved {
            binomial(n, k) / 2.0
        } else {
            binomial(n, k)
        };
        let ln_qa = count_times_ln(n - k, ln_c2) + count_times_ln(k, ln_s2);
        let ln_qb = count_times_ln(k, ln_c2) + count_times_ln(n - k, ln_s2);
        let ln_q = ln_add_exp(ln_qa, ln_qb);
        let (weight, deviation) = if ln_q == f64::NEG_INFINITY {
            (0.0, 0.0)
        } else {
            // AM-GM gives a2^n <= sqrt(qa qb) <= q/2, so the deviation
            // never exceeds 1/2; the clamp only shaves roundoff.
            let d = (ln_a2n - ln_q).exp().min(0.5);
            (ln_q.exp(), d)
        };
        entries.push(BlockEntry {
            k,
            multiplicity,
            weight,
            ln_weight: ln_q,
            error_probability: 0.5 - deviation,
            deviation,
        });
    }
    BlockSpectrum { n, entries }
}

/// Optimal mutual information I_M on the parity bit, from a coherent
/// measurement over all n signals. Terms are accumulated in ascending k
/// for reproducibility.
pub fn coherent_info(model: &ParityModel) -> f64 {
    let spectrum = block_spectrum(model);
    let mut acc = 0.0;
    for e in &spectrum.entries {
        if e.weight == 0.0 {
            continue;
        }
        let ln_mult = if e.multiplicity == binomial(spectrum.n, e.k) {
            ln_binomial(spectrum.n, e.k)
        } else {
            ln_binomial(spectrum.n, e.k) - std::f64::consts::LN_2
        };
        let term = (ln_mult + e.ln_weight).exp() * bsc_info_from_deviation(e.deviation);
        acc += term;
    }
    acc
}

/// Information I_S from the optimal measurement on each signal
/// separately, classically combined: I_2 of the odd-number-of-errors
/// probability 1/2 - (2 a2)^n / 2.
pub fn individual_info(model: &ParityModel) -> f64 {
    let a2 = model.source.off_diagonal();
    if a2 == 0.0 {
        return 0.0;
    }
    let ln_delta = model.n as f64 * (2.0 * a2).ln() - std::f64::consts::LN_2;
    bsc_info_from_deviation(ln_delta.exp().min(0.5))
}

/// Optimal deterministic (conclusive) information I_D on the parity bit.
/// Defined for pure sources only: the per-block conclusive measurement
/// needs pure block states.
pub fn deterministic_info(model: &ParityModel) -> Result<f64> {
    if !model.source.is_pure() {
        return Err(Error::MixedSourceUnsupported);
    }
    let n = model.n;
    let alpha = model.source.alpha();
    let (c, s) = (alpha.cos(), alpha.sin());
    let ln_c2 = 2.0 * c.ln();
    let ln_s2 = if s == 0.0 { f64::NEG_INFINITY } else { 2.0 * s.ln() };
    let mut acc = 0.0;
    for k in 0..=n / 2 {
        if n.is_multiple_of(2) && k == n / 2 {
            // Symmetric block: conclusive with certainty. Weight
            // (1/2) binom(n, n/2) * 2 (cs)^n = binom(n, n/2) (cs)^n.
            let ln_q_half = count_times_ln(n, ln_c2 + ln_s2) / 2.0 + std::f64::consts::LN_2;
            let ln_mult = ln_binomial(n, k) - std::f64::consts::LN_2;
            if ln_q_half > f64::NEG_INFINITY {
                acc += (ln_mult + ln_q_half).exp();
            }
        } else {
            // q_k (1 - p?_k) = 2 c^{2k} s^{2(n-k)}.
            let ln_qb = count_times_ln(k, ln_c2) + count_times_ln(n - k, ln_s2);
            if ln_qb > f64::NEG_INFINITY {
                acc += (ln_binomial(n, k) + std::f64::consts::LN_2 + ln_qb).exp();
            }
        }
    }
    Ok(acc)
}

/// Small-angle upper bound (2a)^n / sqrt(pi n / 2) on I_M for pure
/// sources. Meaningful for a up to roughly 0.2.
pub fn asymptotic_bound(model: &ParityModel) -> f64 {
    let alpha = model.source.alpha();
    (2.0 * alpha).powi(model.n as i32) / (std::f64::consts::PI * model.n as f64 / 2.0).sqrt()
}

// ---------------------------------------------------------------------------
// Dense path
// ---------------------------------------------------------------------------

/// The two parity density matrices over 2^n dimensions, built densely as
/// rho^(x)n +- Delta^(x)n. Capped at n = 12.
pub fn parity_densities(model: &ParityModel) -> Result<(DensityOperator, DensityOperator)> {
    let n = model.n;
    if n > DENSE_N_CAP {
        return Err(Error::BlockCap(format!(
            "dense parity matrices capped at n = {DENSE_N_CAP}, got {n}"
        )));
    }
    let alpha = model.source.alpha();
    let (c, s) = (alpha.cos(), alpha.sin());
    let a2 = model.source.off_diagonal();
    let rho1 = Matrix::from_real(2, &[c * c, 0.0, 0.0, s * s]);
    let delta1 = Matrix::from_real(2, &[0.0, a2, a2, 0.0]);
    let mut rho = rho1.clone();
    let mut delta = delta1.clone();
    for _ in 1..n {
        rho = rho.kron(&rho1);
        delta = delta.kron(&delta1);
    }
    let rho0 = DensityOperator::new(rho.add(&delta))?;
    let rho1 = DensityOperator::new(rho.sub(&delta))?;
    Ok((rho0, rho1))
}

/// Basis permutation that block-diagonalizes the parity matrices: new
/// index 2t maps to old index t, new index 2t+1 to the bitwise
/// complement of t. Returns `perm` with `perm[new] = old`.
pub fn block_permutation(n: usize) -> Vec<usize> {
    let dim = 1usize << n;
    (0..dim)
        .map(|i| if i % 2 == 0 { i / 2 } else { dim - i.div_ceil(2) })
        .collect()
}

/// Apply an index permutation to both sides of a matrix:
/// out[i][j] = m[perm[i]][perm[j]].
pub fn permute_matrix(m: &Matrix, perm: &[usize]) -> Matrix {
    Matrix::from_fn(m.dim(), |i, j| m[(perm[i], perm[j])])
}
