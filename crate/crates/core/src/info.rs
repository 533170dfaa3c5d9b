//! Classical and two-state quantum information quantities.
//!
//! Entropy and the mutual information of the binary symmetric and binary
//! erasure channels, plus optimal discrimination of two pure or
//! equal-determinant mixed qubit states: the symmetric projective
//! measurement (optimal under Levitin's claim for the mixed case) and the
//! two conclusive POVMs.
//!
//! Logarithms are base 2 throughout; angles are radians.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::hilbert::{PovmElement, StateVector};
use crate::Tolerances;

/// Shannon entropy of a binary alphabet, in bits. H(0) = H(1) = 0 by the
/// continuity convention 0 log 0 = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-(p * p.log2() + (1.0 - p) * (1.0 - p).log2()))
}

/// Mutual information of a binary symmetric channel with error
/// probability `p_e`: I_2(p_e) = 1 - H(p_e).
pub fn bsc_info(p_e: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(p_e)?)
}

/// I_2(1/2 - delta), numerically stable for tiny deviations from a
/// half. `delta` must lie in [0, 1/2].
///
/// Near p = 1/2 the direct formula cancels catastrophically; the series
/// I_2(1/2 - d) = (1/ln 2) [ (2d)^2/2 + (2d)^4/12 + (2d)^6/30 + ... ]
/// converges fast and keeps full relative accuracy.
pub fn bsc_info_from_deviation(delta: f64) -> f64 {
    debug_assert!((0.0..=0.5 + 1e-12).contains(&delta));
    let delta = delta.clamp(0.0, 0.5);
    if delta > 1e-3 {
        return 1.0 - binary_entropy(0.5 - delta).expect("in range");
    }
    let t = 4.0 * delta * delta; // (2d)^2
    (t / 2.0 + t * t / 12.0 + t * t * t / 30.0) / LN_2
}

/// Mutual information of a binary erasure channel with inconclusive
/// probability `p_q`: 1 - p_q.
pub fn bec_info(p_q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_q) {
        return Err(Error::BadProbability(p_q));
    }
    Ok(1.0 - p_q)
}

/// Mutual information between two classical variables from their joint
/// distribution (rows: first variable). Zero-probability cells follow the
/// continuity convention.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let rows = joint.len();
    let cols = joint.first().map_or(0, |r| r.len());
    let mut px = vec![0.0; rows];
    let mut py = vec![0.0; cols];
    for (i, row) in joint.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            px[i] += p;
            py[j] += p;
        }
    }
    let mut acc = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p * (p / (px[i] * py[j])).log2();
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Two-state sources
// ---------------------------------------------------------------------------

/// A source emitting one of two equiprobable signal states
/// (cos a, +-sin a), possibly mixed: the off-diagonal of each density
/// matrix is reduced from sin a cos a to sin a cos a - r_mix, which keeps
/// the two determinants equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateSource {
    alpha: f64,
    r_mix: f64,
}

impl TwoStateSource {
    /// Pure source at half-angle `alpha`, 0 <= alpha <= pi/4.
    pub fn pure(alpha: f64) -> Result<Self> {
        Self::mixed(alpha, 0.0)
    }

    /// Mixed source; requires 0 <= r_mix < sin(alpha) cos(alpha) except at
    /// alpha = 0 where only r_mix = 0 is allowed.
    pub fn mixed(alpha: f64, r_mix: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&alpha) {
            return Err(Error::param(format!(
                "half-angle {alpha} outside [0, pi/4]"
            )));
        }
        let sc = alpha.sin() * alpha.cos();
        let ok = if sc == 0.0 { r_mix == 0.0 } else { (0.0..sc).contains(&r_mix) };
        if !ok {
            return Err(Error::param(format!(
                "r_mix {r_mix} outside [0, sin a cos a = {sc})"
            )));
        }
        Ok(TwoStateSource { alpha, r_mix })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r_mix(&self) -> f64 {
        self.r_mix
    }

    pub fn is_pure(&self) -> bool {
        self.r_mix == 0.0
    }

    /// Pure-state overlap C = cos 2a.
    pub fn overlap(&self) -> f64 {
        (2.0 * self.alpha).cos()
    }

    /// Off-diagonal magnitude a2 = sin a cos a - r_mix; the single
    /// number the optimal mutual information depends on.
    pub fn off_diagonal(&self) -> f64 {
        self.alpha.sin() * self.alpha.cos() - self.r_mix
    }

    /// The two signal density matrices.
    pub fn density_pair(&self) -> (crate::hilbert::DensityOperator, crate::hilbert::DensityOperator) {
        use crate::linalg::Matrix;
        let (c, s) = (self.alpha.cos(), self.alpha.sin());
        let a2 = self.off_diagonal();
        let m0 = Matrix::from_real(2, &[c * c, a2, a2, s * s]);
        let m1 = Matrix::from_real(2, &[c * c, -a2, -a2, s * s]);
        (
            crate::hilbert::DensityOperator::new(m0).expect("valid by construction"),
            crate::hilbert::DensityOperator::new(m1).expect("valid by construction"),
        )
    }
}

/// Result of the optimal (symmetric-basis) discrimination of the two
/// source states. For mixed sources this is optimal under Levitin's
/// unproven claim that a standard measurement is optimal for two
/// equal-determinant density matrices.
#[derive(Debug, Clone, Copy)]
pub struct PairDiscrimination {
    /// Error probability 1/2 - a2.
    pub error: f64,
    /// Mutual information I_2(error), bits.
    pub info: f64,
}

/// Optimal single-pair discrimination; for a pure source the error is
/// (1 - sin 2a)/2.
pub fn optimal_pair_info(src: &TwoStateSource) -> PairDiscrimination {
    let a2 = src.off_diagonal();
    PairDiscrimination {
        error: 0.5 - a2,
        info: bsc_info_from_deviation(a2),
    }
}

/// A three-outcome conclusive measurement: element 0 identifies the
/// "minus" state, element 1 identifies the "plus" state, element 2 is
/// inconclusive.
#[derive(Debug, Clone)]
pub struct ConclusiveMeasurement {
    pub elements: [PovmElement; 3],
    /// Probability of the inconclusive outcome on either input.
    pub inconclusive_probability: f64,
    /// Deterministic (erasure-channel) information, bits.
    pub info: f64,
}

/// The optimal conclusive POVM for the pure pair (cos a, +-sin a):
/// inconclusive probability C = cos 2a, deterministic information 1 - C.
/// Rejects a = 0 (identical states) and requires a < pi/4.
pub fn conclusive_povm(alpha: f64) -> Result<ConclusiveMeasurement> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_4 + 1e-15) {
        return Err(Error::param(format!(
            "conclusive POVM needs 0 < alpha <= pi/4, got {alpha}"
        )));
    }
    let c2a = (2.0 * alpha).cos();
    let scale = 1.0 / (1.0 + c2a);
    // States orthogonal to the plus/minus inputs.
    let orth_plus = StateVector::new(vec![
        (-alpha.sin()).into(),
        alpha.cos().into(),
    ])?;
    let orth_minus = StateVector::new(vec![alpha.sin().into(), alpha.cos().into()])?;
    let w = StateVector::basis(2, 0)?;
    let elements = [
        PovmElement::scaled_projector(&orth_plus, scale)?,
        PovmElement::scaled_projector(&orth_minus, scale)?,
        PovmElement::scaled_projector(&w, 2.0 * c2a * scale)?,
    ];
    crate::hilbert::verify_complete(&elements, &Tolerances::default())?;
    Ok(ConclusiveMeasurement {
        elements,
        inconclusive_probability: c2a,
        info: 1.0 - c2a,
    })
}

/// The simpler conclusive measurement that picks one of the two input
/// bases at random. Its elements give inconclusive probability
/// (1 + C^2)/2 on either input, so the deterministic information is
/// 1 - (1 + C^2)/2 = (1 - C^2)/2.
pub fn simple_povm(alpha: f64) -> Result<ConclusiveMeasurement> {
    if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&alpha) {
        return Err(Error::param(format!(
            "simple POVM needs 0 <= alpha <= pi/4, got {alpha}"
        )));
    }
    let plus = StateVector::real_qubit(alpha);
    let minus = StateVector::real_qubit(-alpha);
    let orth_plus = StateVector::new(vec![(-alpha.sin()).into(), alpha.cos().into()])?;
    let orth_minus = StateVector::new(vec![alpha.sin().into(), alpha.cos().into()])?;
    let elements = [
        PovmElement::scaled_projector(&orth_plus, 0.5)?,
        PovmElement::scaled_projector(&orth_minus, 0.5)?,
        PovmElement::from_projector_sum(&[(0.5, plus), (0.5, minus)])?,
    ];
    crate::hilbert::verify_complete(&elements, &Tolerances::default())?;
    let c2a = (2.0 * alpha).cos();
    let p_inc = 0.5 * (1.0 + c2a * c2a);
    Ok(ConclusiveMeasurement {
        elements,
        inconclusive_probability: p_inc,
        info: 1.0 - p_inc,
    })
}
