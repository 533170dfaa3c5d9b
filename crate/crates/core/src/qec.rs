//! Quantum error reduction with repetition-based codes.
//!
//! Error *reduction* replaces the majority vote of a repetition code by a
//! unanimous decision: disagreeing blocks are thrown away instead of
//! corrected. The price is a success probability Q below one; the prize
//! is a remainder error P far below what correction achieves at the same
//! length.
//!
//! The quantum variant encodes one qubit as n blocks of n qubits each
//! (repetition in z, basis rotation, repetition again); decoding projects
//! onto the two-dimensional code subspace and discards failures. For the
//! 4-qubit case the remainder error under general bounded per-qubit
//! unitaries is measured by Monte Carlo and scales as the fourth power of
//! the angle bound, with success deficit at the second power.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::linalg::Matrix;
use crate::num::binomial;

// ---------------------------------------------------------------------------
// Classical repetition statistics
// ---------------------------------------------------------------------------

/// Majority-vote failure probability of the 1 -> n repetition code
/// (odd n >= 3) at per-bit error probability p <= 1/2. For n = 3 this is
/// 3p^2 - 2p^3.
pub fn classical_correction_stats(n_rep: usize, p: f64) -> Result<f64> {
    if n_rep < 3 || n_rep.is_multiple_of(2) {
        return Err(Error::param(format!(
            "correction needs odd n >= 3, got {n_rep}"
        )));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let mut acc = 0.0;
    for l in (n_rep / 2 + 1)..=n_rep {
        acc += binomial(n_rep, l) * p.powi(l as i32) * (1.0 - p).powi((n_rep - l) as i32);
    }
    Ok(acc)
}

/// Unanimous-decision statistics of the 1 -> n repetition code (n >= 2):
/// success probability Q = (1-p)^n + p^n and remainder error P = p^n / Q.
pub fn classical_reduction_stats(n_rep: usize, p: f64) -> Result<(f64, f64)> {
    if n_rep < 2 {
        return Err(Error::param(format!("reduction needs n >= 2, got {n_rep}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let q = (1.0 - p).powi(n_rep as i32) + p.powi(n_rep as i32);
    let big_p = if q > 0.0 { p.powi(n_rep as i32) / q } else { 0.0 };
    Ok((big_p, q))
}

/// Combined mode for the classical repetition code n = 2t + 1: correct up
/// to `t_prime` disagreeing bits (0 <= t_prime <= t), discard otherwise.
/// t_prime = 0 reduces to pure reduction, t_prime = t to pure correction.
pub fn combined_reduction_correction(
    n_rep: usize,
    t_prime: usize,
    p: f64,
) -> Result<(f64, f64)> {
    if n_rep < 3 || n_rep.is_multiple_of(2) {
        return Err(Error::param(format!(
            "combined mode needs odd n >= 3, got {n_rep}"
        )));
    }
    if t_prime > n_rep / 2 {
        return Err(Error::param(format!(
            "t' = {t_prime} exceeds the correction radius {}",
            n_rep / 2
        )));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let b = |l: usize| binomial(n_rep, l) * p.powi(l as i32) * (1.0 - p).powi((n_rep - l) as i32);
    let good: f64 = (0..=t_prime).map(b).sum();
    let bad: f64 = ((n_rep - t_prime)..=n_rep).map(b).sum();
    let q = good + bad;
    Ok((if q > 0.0 { bad / q } else { 0.0 }, q))
}

/// Zeno chain: `stations` intermediate projections cut the per-segment
/// error to p / M^2. Per segment the unanimous decision applies; segment
/// outcomes compose like independent bit flips.
pub fn zeno_stats(n_rep: usize, p: f64, stations: usize) -> Result<(f64, f64)> {
    if stations == 0 {
        return Err(Error::param("station count must be at least 1"));
    }
    let m = stations as f64;
    let p_seg = p / (m * m);
    let (p_one, q_one) = classical_reduction_stats(n_rep, p_seg)?;
    let p_eff = 0.5 * (1.0 - (1.0 - 2.0 * p_one).powi(stations as i32));
    let q_eff = q_one.powi(stations as i32);
    Ok((p_eff, q_eff))
}

// ---------------------------------------------------------------------------
// The n^2-qubit code
// ---------------------------------------------------------------------------

/// Repetition / rotation / repetition code on n^2 qubits: n blocks of n
/// qubits, each block in (|0...0> +- |1...1>)/sqrt(2).
#[derive(Debug, Clone)]
pub struct RurCode {
    n: usize,
    logical0: StateVector,
    logical1: StateVector,
}

impl RurCode {
    /// Inner repetition length n; state-vector simulation caps at n = 3
    /// (512 dimensions).
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::param(format!(
                "state-vector simulation supports n in 1..=3, got {n}"
            )));
        }
        let block = |sign: f64| {
            let dim = 1usize << n;
            let mut amps = vec![Complex64::ZERO; dim];
            amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[dim - 1] = Complex64::new(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0);
            StateVector::new(amps).expect("normalized")
        };
        let mut logical0 = block(1.0);
        let mut logical1 = block(-1.0);
        for _ in 1..n {
            logical0 = logical0.tensor(&block(1.0))?;
            logical1 = logical1.tensor(&block(-1.0))?;
        }
        Ok(RurCode {
            n,
            logical0,
            logical1,
        })
    }

    pub fn inner_length(&self) -> usize {
        self.n
    }

    pub fn total_qubits(&self) -> usize {
        self.n * self.n
    }

    pub fn dim(&self) -> usize {
        1 << (self.n * self.n)
    }

    pub fn logical_zero(&self) -> &StateVector {
        &self.logical0
    }

    pub fn logical_one(&self) -> &StateVector {
        &self.logical1
    }
}

/// Encode a logical qubit (alpha, beta) into the code space.
pub fn encode_rur(code: &RurCode, logical: &StateVector) -> Result<StateVector> {
    if logical.dim() != 2 {
        return Err(Error::DimensionMismatch(logical.dim(), 2));
    }
    let amps: Vec<Complex64> = code
        .logical0
        .amps()
        .iter()
        .zip(code.logical1.amps())
        .map(|(a, b)| logical.amp(0) * a + logical.amp(1) * b)
        .collect();
    StateVector::new(amps)
}

/// Result of projecting a disturbed code state onto the code subspace.
#[derive(Debug, Clone)]
pub struct ProjectionOutcome {
    /// False when the projection has (numerically) zero norm.
    pub success: bool,
    /// Squared norm of the projection; the probability that the
    /// projective decision accepts.
    pub probability: f64,
    /// Recovered logical qubit, normalized; None on failure.
    pub logical: Option<StateVector>,
}

/// Project onto span{logical 0, logical 1}. A zero-norm projection is a
/// failure outcome, not an error.
pub fn project_code_subspace(state: &StateVector, code: &RurCode) -> Result<ProjectionOutcome> {
    if state.dim() != code.dim() {
        return Err(Error::DimensionMismatch(state.dim(), code.dim()));
    }
    let a0 = code.logical0.inner(state);
    let a1 = code.logical1.inner(state);
    // Roundoff can push the squared norm a few ulps past one.
    let probability = (a0.norm_sqr() + a1.norm_sqr()).min(1.0);
    if probability <= 1e-28 {
        return Ok(ProjectionOutcome {
            success: false,
            probability: 0.0,
            logical: None,
        });
    }
    let logical = StateVector::normalized(vec![a0, a1])?;
    Ok(ProjectionOutcome {
        success: true,
        probability,
        logical: Some(logical),
    })
}

// ---------------------------------------------------------------------------
// Bounded random disturbances
// ---------------------------------------------------------------------------

/// General one-qubit unitary with all three angles drawn uniformly from
/// [-chi, chi]:
///
/// ```text
/// [ cos t            sin t e^{i phi}        ]
/// [ -sin t e^{i eta}  cos t e^{i (phi+eta)} ]
/// ```
#[derive(Debug, Clone, Copy)]
pub struct BoundedNoise {
    pub chi: f64,
}

impl BoundedNoise {
    pub fn new(chi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&chi) {
            return Err(Error::param(format!("angle bound {chi} outside [0, pi]")));
        }
        Ok(BoundedNoise { chi })
    }

    pub fn sample_unitary<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        if self.chi == 0.0 {
            return Matrix::identity(2);
        }
        let theta = rng.random_range(-self.chi..=self.chi);
        let phi = rng.random_range(-self.chi..=self.chi);
        let eta = rng.random_range(-self.chi..=self.chi);
        let (ct, st) = (theta.cos(), theta.sin());
        let mut m = Matrix::zeros(2);
        m[(0, 0)] = Complex64::new(ct, 0.0);
        m[(0, 1)] = Complex64::from_polar(st, phi);
        m[(1, 0)] = -Complex64::from_polar(st, eta);
        m[(1, 1)] = Complex64::from_polar(ct, phi + eta);
        m
    }
}

/// Default generic logical input (cos pi/8, sin pi/8); far from any
/// symmetry axis of the code.
pub fn default_logical_input() -> StateVector {
    StateVector::real_qubit(std::f64::consts::FRAC_PI_8)
}

/// Monte Carlo estimate of remainder error and success probability at
/// one angle bound.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RemainderEstimate {
    pub chi: f64,
    pub trials: usize,
    /// Post-selected infidelity 1 - |<expected|recovered>|^2, averaged
    /// with the per-trial acceptance probabilities as weights.
    pub p_hat: f64,
    /// Mean acceptance probability.
    pub q_hat: f64,
    pub p_stderr: f64,
    pub q_stderr: f64,
}

/// Estimate (P, Q) for one chi: per trial, draw an independent bounded
/// unitary for each code qubit, apply, project. Acceptance probabilities
/// are averaged rather than sampled, which removes the projection's
/// sampling noise from the estimates.
pub fn remainder_error_estimate<R: Rng + ?Sized>(
    code: &RurCode,
    noise: &BoundedNoise,
    trials: usize,
    logical: &StateVector,
    rng: &mut R,
) -> Result<RemainderEstimate> {
    if trials == 0 {
        return Err(Error::param("at least one trial required"));
    }
    let encoded = encode_rur(code, logical)?;
    let mut q_sum = 0.0f64;
    let mut q_sq = 0.0f64;
    let mut pq_sum = 0.0f64;
    let mut infidelities = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut state = encoded.clone();
        for q in 0..code.total_qubits() {
            let u = noise.sample_unitary(rng);
            state = state.apply_single_qubit(q, &u)?;
        }
        let outcome = project_code_subspace(&state, code)?;
        let q_trial = outcome.probability;
        q_sum += q_trial;
        q_sq += q_trial * q_trial;
        let infid = match &outcome.logical {
            Some(rec) => (1.0 - rec.inner(logical).norm_sqr()).max(0.0),
            None => 0.0,
        };
        pq_sum += q_trial * infid;
        infidelities.push((q_trial, infid));
    }
    let q_hat = q_sum / trials as f64;
    let p_hat = if q_sum > 0.0 { pq_sum / q_sum } else { 0.0 };
    let q_var = (q_sq / trials as f64 - q_hat * q_hat).max(0.0);
    let q_stderr = (q_var / trials as f64).sqrt();
    let p_var = if q_sum > 0.0 {
        infidelities
            .iter()
            .map(|(q, i)| q * (i - p_hat) * (i - p_hat))
            .sum::<f64>()
            / q_sum
    } else {
        0.0
    };
    let p_stderr = (p_var / trials as f64).sqrt();
    Ok(RemainderEstimate {
        chi: noise.chi,
        trials,
        p_hat,
        q_hat,
        p_stderr,
        q_stderr,
    })
}

/// A remainder-error sweep over angle bounds with log-log exponent fits.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RemainderSweep {
    pub points: Vec<RemainderEstimate>,
    /// Fitted slope of ln P against ln chi.
    pub p_exponent: f64,
    /// Fitted slope of ln (1 - Q) against ln chi.
    pub q_exponent: f64,
}

/// Sweep `chis`, estimate (P, Q) at each, and fit the scaling exponents.
/// Requires at least two positive angle bounds and a trial count large
/// enough for a meaningful fit.
pub fn monte_carlo_remainder<R: Rng + ?Sized>(
    code: &RurCode,
    chis: &[f64],
    trials: usize,
    logical: &StateVector,
    rng: &mut R,
) -> Result<RemainderSweep> {
    if trials < 10_000 {
        return Err(Error::param(format!(
            "exponent fit needs at least 10000 trials per point, got {trials}"
        )));
    }
    if chis.len() < 2 || chis.iter().any(|&c| c <= 0.0) {
        return Err(Error::param(
            "exponent fit needs at least two positive angle bounds",
        ));
    }
    let mut points = Vec::with_capacity(chis.len());
    for &chi in chis {
        let noise = BoundedNoise::new(chi)?;
        points.push(remainder_error_estimate(code, &noise, trials, logical, rng)?);
    }
    let p_exponent = fit_log_log_slope(points.iter().map(|e| (e.chi, e.p_hat)))?;
    let q_exponent = fit_log_log_slope(points.iter().map(|e| (e.chi, 1.0 - e.q_hat)))?;
    Ok(RemainderSweep {
        points,
        p_exponent,
        q_exponent,
    })
}

/// Least-squares slope of ln y against ln x; both coordinates must be
/// positive.
pub fn fit_log_log_slope(points: impl Iterator<Item = (f64, f64)>) -> Result<f64> {
    let data: Vec<(f64, f64)> = points
        .map(|(x, y)| {
            if x <= 0.0 || y <= 0.0 {
                Err(Error::param(
                    "nonpositive value in log-log fit; increase trials",
                ))
            } else {
                Ok((x.ln(), y.ln()))
            }
        })
        .collect::<Result<_>>()?;
    let n = data.len() as f64;
    let mx = data.iter().map(|d| d.0).sum::<f64>() / n;
    let my = data.iter().map(|d| d.1).sum::<f64>() / n;
    let sxx: f64 = data.iter().map(|d| (d.0 - mx) * (d.0 - mx)).sum();
    let sxy: f64 = data.iter().map(|d| (d.0 - mx) * (d.1 - my)).sum();
    Ok(sxy / sxx)
}
