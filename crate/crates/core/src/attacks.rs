//! Collective-attack gate models and their assessment.
//!
//! Each attack couples a two-dimensional probe (prepared in (1, 0)) to
//! one transmitted signal qubit through a fixed 4x4 unitary; the probe is
//! kept in a quantum memory and measured only after all classical data is
//! announced. Three gates are modeled:
//!
//! - the EHPP translucent gate, which forwards the two-state signals at a
//!   shrunken angle while the probe picks up angle alpha;
//! - the weak spin-exchange (swap) gate, a rotation between probe and
//!   signal that becomes a full swap at gamma = pi/2;
//! - the weak measurement gate, which at gamma = pi/4 reduces to a
//!   standard-measurement gate in its basis.
//!
//! `assess` produces the induced error rate, the eavesdropper's
//! information-dependent reduced states (conditioned on the announced
//! classical data through an operator-valued trace), and the pure-state
//! half-angle that bounds her information on any parity of the data.
//!
//! The probe occupies the most significant qubit of the joint space
//! throughout, so a full swap moves the signal into the probe slot.

use num_complex::Complex64;

use crate::ecc::security_bound;
use crate::error::{Error, Result};
use crate::hilbert::{DensityOperator, PovmElement, StateVector, UnitaryOperator};
use crate::info::bsc_info_from_deviation;
use crate::linalg::Matrix;

/// Measurement basis selector for the weak-measurement gate: the two
/// equatorial bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureBasis {
    X,
    Y,
}

/// Attack family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackKind {
    /// Translucent attack on the two-state scheme: signals at angle
    /// `theta` are forwarded at `theta_prime`, the probe acquires
    /// `probe_angle` (solved from the unitarity condition).
    Ehpp {
        theta: f64,
        theta_prime: f64,
        probe_angle: f64,
    },
    /// Weak spin exchange by angle `gamma`.
    WeakSwap { gamma: f64 },
    /// Weak measurement by angle `gamma` in the given equatorial basis.
    WeakMeasure { gamma: f64, basis: MeasureBasis },
}

/// A probe state plus the joint unitary acting on probe (x) signal.
#[derive(Debug, Clone)]
pub struct ProbeAttack {
    pub kind: AttackKind,
    pub probe_init: StateVector,
    pub joint: UnitaryOperator,
}

impl ProbeAttack {
    pub fn label(&self) -> String {
        match self.kind {
            AttackKind::Ehpp { theta_prime, .. } => format!("ehpp:{theta_prime}"),
            AttackKind::WeakSwap { gamma } => format!("weak-swap:{gamma}"),
            AttackKind::WeakMeasure { gamma, basis } => {
                let b = if basis == MeasureBasis::X { "x" } else { "y" };
                format!("weak-measure-{b}:{gamma}")
            }
        }
    }

    /// Joint probe-signal state after the interaction.
    pub fn apply(&self, signal: &StateVector) -> Result<StateVector> {
        if signal.dim() != 2 {
            return Err(Error::DimensionMismatch(signal.dim(), 2));
        }
        self.probe_init.tensor(signal)?.apply_unitary(&self.joint)
    }
}

/// The EHPP translucent gate. Requires 0 < theta_prime <= theta < pi/4;
/// the probe angle follows from cos 2 theta = cos 2 theta' cos 2 alpha.
pub fn ehpp_attack(theta: f64, theta_prime: f64) -> Result<ProbeAttack> {
    if !(0.0 < theta_prime && theta_prime <= theta && theta < std::f64::consts::FRAC_PI_4) {
        return Err(Error::param(format!(
            "need 0 < theta' <= theta < pi/4, got theta={theta}, theta'={theta_prime}"
        )));
    }
    let ratio = (2.0 * theta).cos() / (2.0 * theta_prime).cos();
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::param(format!(
            "no real probe angle for theta={theta}, theta'={theta_prime}"
        )));
    }
    let alpha = 0.5 * ratio.acos();
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let (ct, st) = (theta.cos(), theta.sin());
    let (cp, sp) = (theta_prime.cos(), theta_prime.sin());
    let m = Matrix::from_real(
        4,
        &[
            ca * cp / ct, 0.0,          0.0,           -sa * sp / ct,
            0.0,          ca * sp / st, -sa * cp / st, 0.0,
            0.0,          sa * cp / st, ca * sp / st,  0.0,
            sa * sp / ct, 0.0,          0.0,           ca * cp / ct,
        ],
    );
    Ok(ProbeAttack {
        kind: AttackKind::Ehpp {
            theta,
            theta_prime,
            probe_angle: alpha,
        },
        probe_init: StateVector::basis(2, 0)?,
        joint: UnitaryOperator::new(m)?,
    })
}

/// The weak spin-exchange gate; a full swap at gamma = pi/2.
pub fn weak_swap(gamma: f64) -> Result<ProbeAttack> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&gamma) {
        return Err(Error::param(format!("gamma {gamma} outside [0, pi/2]")));
    }
    let (c, s) = (gamma.cos(), gamma.sin());
    let m = Matrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0,
            0.0, c,   -s,  0.0,
            0.0, s,   c,   0.0,
            0.0, 0.0, 0.0, 1.0,
        ],
    );
    Ok(ProbeAttack {
        kind: AttackKind::WeakSwap { gamma },
        probe_init: StateVector::basis(2, 0)?,
        joint: UnitaryOperator::new(m)?,
    })
}

/// The weak measurement gate in the x or y equatorial basis; gamma =
/// pi/4 reproduces the standard-measurement gate.
pub fn weak_measure(gamma: f64, basis: MeasureBasis) -> Result<ProbeAttack> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&gamma) {
        return Err(Error::param(format!("gamma {gamma} outside [0, pi/2]")));
    }
    let (c, s) = (gamma.cos(), gamma.sin());
    let x_gate = Matrix::from_real(
        4,
        &[
            c,   0.0, 0.0, -s,
            0.0, c,   -s,  0.0,
            0.0, s,   c,   0.0,
            s,   0.0, 0.0, c,
        ],
    );
    let m = match basis {
        MeasureBasis::X => x_gate,
        MeasureBasis::Y => {
            // Conjugate the signal side with the x -> y basis change
            // diag(1, i).
            let mut t = Matrix::identity(4);
            t[(1, 1)] = Complex64::new(0.0, 1.0);
            t[(3, 3)] = Complex64::new(0.0, 1.0);
            t.mul(&x_gate).mul(&t.adjoint())
        }
    };
    Ok(ProbeAttack {
        kind: AttackKind::WeakMeasure { gamma, basis },
        probe_init: StateVector::basis(2, 0)?,
        joint: UnitaryOperator::new(m)?,
    })
}

// ---------------------------------------------------------------------------
// Bounding constructions
// ---------------------------------------------------------------------------

/// The two ways of dominating a symmetric mixed pair by a pure pair
/// mixed with a common anchor state, reported as pure-state half-angles.
#[derive(Debug, Clone, Copy)]
pub struct PureBoundPair {
    /// Anchor at the completely mixed state: the pure pair keeps the
    /// mixed pair's own half-angle, tan 2 beta = x / z.
    pub mixed_anchor: f64,
    /// Anchor at the south pole (spin down): tan beta = x / (z + 1).
    pub pole_anchor: f64,
}

/// Which construction a bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundConstruction {
    MixedAnchor,
    PoleAnchor,
}

impl PureBoundPair {
    /// The construction used downstream: the mixed-state anchor when the
    /// pair's half-angle is small (below pi/8), the pole anchor
    /// otherwise.
    pub fn selected(&self) -> (f64, BoundConstruction) {
        if self.mixed_anchor < std::f64::consts::FRAC_PI_8 {
            (self.mixed_anchor, BoundConstruction::MixedAnchor)
        } else {
            (self.pole_anchor, BoundConstruction::PoleAnchor)
        }
    }
}

/// Bloch components of a symmetric pair: equal z, mirrored transverse
/// component of magnitude x.
fn symmetric_bloch(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<(f64, f64)> {
    let a = rho0.to_bloch()?;
    let b = rho1.to_bloch()?;
    let tol = 1e-9;
    if (a.z - b.z).abs() > tol || (a.x + b.x).abs() > tol || (a.y + b.y).abs() > tol {
        return Err(Error::param(
            "states are not a symmetric (mirrored) pair".to_string(),
        ));
    }
    Ok((a.x.hypot(a.y), a.z))
}

/// Bound a symmetric mixed pair by pure pairs via both anchor
/// constructions. The pair must share z and carry opposite transverse
/// components.
pub fn pure_bound(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<PureBoundPair> {
    let (x, z) = symmetric_bloch(rho0, rho1)?;
    Ok(PureBoundPair {
        mixed_anchor: 0.5 * x.atan2(z),
        pole_anchor: (x / (z + 1.0)).atan(),
    })
}

/// Optimal single-bit information carried by a symmetric pair:
/// I_2(1/2 - x/2) with x the transverse Bloch distance from the mirror
/// axis.
pub fn symmetric_pair_info(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    let (x, _) = symmetric_bloch(rho0, rho1)?;
    Ok(bsc_info_from_deviation((x / 2.0).min(0.5)))
}

// ---------------------------------------------------------------------------
// Assessment
// ---------------------------------------------------------------------------

/// Protocol the attack is aimed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Four equatorial states in two conjugate bases.
    FourState,
    /// Two states (cos theta, +-sin theta) with conclusive detection.
    TwoState { theta: f64 },
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::FourState => "four-state".into(),
            Scheme::TwoState { theta } => format!("two-state:{theta}"),
        }
    }
}

/// Assessment of one classical announcement branch (e.g. one announced
/// basis).
#[derive(Debug, Clone)]
pub struct BranchAssessment {
    pub label: String,
    /// Probability of this branch arising.
    pub probability: f64,
    /// Error rate induced on Bob within this branch.
    pub error_rate: f64,
    /// Eve's information-dependent reduced states for bit 0 / bit 1.
    pub eve_states: (DensityOperator, DensityOperator),
    /// Optimal single-bit information carried by the pair.
    pub eve_bit_info: f64,
    /// Pure-state bounding half-angles for the pair.
    pub bound: PureBoundPair,
}

/// Full assessment of an attack against a scheme.
#[derive(Debug, Clone)]
pub struct AttackAssessment {
    pub attack: String,
    pub scheme: String,
    /// Probability-weighted average error rate.
    pub error_rate: f64,
    /// Bounding half-angle: the worst branch's selected construction.
    pub beta: f64,
    pub branches: Vec<BranchAssessment>,
}

impl AttackAssessment {
    /// Information bound on the parity of an n-bit key under this
    /// attack, from the bounding half-angle.
    pub fn bound_for(&self, n: usize) -> f64 {
        security_bound(n, self.beta)
    }
}

/// Assess an attack against a scheme: Bob's induced error rate from his
/// reduced states, and Eve's reduced states conditioned on the announced
/// classical data (basis announcements for the four-state scheme, the
/// conclusive-detection operator for the two-state scheme).
pub fn assess(attack: &ProbeAttack, scheme: &Scheme) -> Result<AttackAssessment> {
    match scheme {
        Scheme::FourState => assess_four_state(attack),
        Scheme::TwoState { theta } => assess_two_state(attack, *theta),
    }
}

fn assess_four_state(attack: &ProbeAttack) -> Result<AttackAssessment> {
    let mut branches = Vec::new();
    // Announced basis x: states m = 0 (bit 0) and m = 2 (bit 1);
    // announced basis y: m = 1 and m = 3.
    for (label, m0, m1) in [("basis-x", 0u8, 2u8), ("basis-y", 1, 3)] {
        let s0 = StateVector::equatorial(m0);
        let s1 = StateVector::equatorial(m1);
        let j0 = attack.apply(&s0)?;
        let j1 = attack.apply(&s1)?;
        let b0 = j0.to_density().partial_trace(&[1])?;
        let b1 = j1.to_density().partial_trace(&[1])?;
        // Wrong-identification probability in the used basis.
        let p0 = b0.expect(PovmElement::projector(&s1).matrix());
        let p1 = b1.expect(PovmElement::projector(&s0).matrix());
        let error_rate = 0.5 * (p0 + p1);
        // Basis announcement carries no state condition: plain trace.
        let e0 = j0.to_density().partial_trace(&[0])?;
        let e1 = j1.to_density().partial_trace(&[0])?;
        let eve_bit_info = symmetric_pair_info(&e0, &e1)?;
        let bound = pure_bound(&e0, &e1)?;
        branches.push(BranchAssessment {
            label: label.into(),
            probability: 0.5,
            error_rate,
            eve_states: (e0, e1),
            eve_bit_info,
            bound,
        });
    }
    Ok(summarize(attack, "four-state".into(), branches))
}

fn assess_two_state(attack: &ProbeAttack, theta: f64) -> Result<AttackAssessment> {
    if !(0.0 < theta && theta < std::f64::consts::FRAC_PI_4) {
        return Err(Error::param(format!("theta {theta} outside (0, pi/4)")));
    }
    if let AttackKind::Ehpp { theta: t, .. } = attack.kind {
        if (t - theta).abs() > 1e-12 {
            return Err(Error::IncompatibleAttack(format!(
                "translucent gate built for theta = {t}, scheme uses {theta}"
            )));
        }
    }
    let s0 = StateVector::real_qubit(theta);
    let s1 = StateVector::real_qubit(-theta);
    // States orthogonal to the signals; a conclusive detection of
    // orth(s_p) identifies the other bit.
    let orth0 = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(-theta.cos(), 0.0),
    ])?;
    let orth1 = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(theta.cos(), 0.0),
    ])?;
    let j0 = attack.apply(&s0)?;
    let j1 = attack.apply(&s1)?;
    let b0 = j0.to_density().partial_trace(&[1])?;
    let b1 = j1.to_density().partial_trace(&[1])?;
    // Wrong identification: Bob sees orth(s_p) while s_p was sent (the
    // test capable of that error is chosen with probability 1/2, but the
    // rate is quoted per wrong-capable test).
    let p0 = b0.expect(PovmElement::projector(&orth0).matrix());
    let p1 = b1.expect(PovmElement::projector(&orth1).matrix());
    let error_rate = 0.5 * (p0 + p1);
    // Eve's states conditioned on "Bob announced a conclusive result":
    // trace against (|orth0><orth0| + |orth1><orth1|) / 2.
    let announce = PovmElement::from_projector_sum(&[(0.5, orth0), (0.5, orth1)])?;
    let w0 = j0.to_density().conditioned_trace(&[0], &announce)?;
    let w1 = j1.to_density().conditioned_trace(&[0], &announce)?;
    let e0 = w0.normalized()?;
    let e1 = w1.normalized()?;
    let eve_bit_info = symmetric_pair_info(&e0, &e1)?;
    let bound = pure_bound(&e0, &e1)?;
    let branches = vec![BranchAssessment {
        label: "conclusive".into(),
        probability: 1.0,
        error_rate,
        eve_states: (e0, e1),
        eve_bit_info,
        bound,
    }];
    Ok(summarize(
        attack,
        format!("two-state:{theta}"),
        branches,
    ))
}

fn summarize(
    attack: &ProbeAttack,
    scheme: String,
    branches: Vec<BranchAssessment>,
) -> AttackAssessment {
    let error_rate = branches
        .iter()
        .map(|b| b.probability * b.error_rate)
        .sum::<f64>()
        / branches.iter().map(|b| b.probability).sum::<f64>();
    let beta = branches
        .iter()
        .map(|b| b.bound.selected().0)
        .fold(0.0f64, f64::max);
    AttackAssessment {
        attack: attack.label(),
        scheme,
        error_rate,
        beta,
        branches,
    }
}

/// Error rate induced on a verification signal (1, 0) inserted into the
/// channel; exposes attacks (like the translucent gate) that are tuned
/// to the protocol states.
pub fn verification_error(attack: &ProbeAttack) -> Result<f64> {
    let joint = attack.apply(&StateVector::basis(2, 0)?)?;
    let bob = joint.to_density().partial_trace(&[1])?;
    Ok(bob.entry(1, 1).re)
}

/// Per-conclusive-bit rates of the two-state receiver under the
/// translucent gate and their normalized error rate
/// wrong / (correct + wrong). The correct-conclusive rate is the squared
/// overlap sin^2(theta + theta'); written without the square it would
/// not be a probability. Note that with both rates normalized the same
/// way the small-angle limit is p_e / sin^2(2 theta); quoting the
/// correct rate unsquared (or folding the receiver's test choice into
/// only one of the two rates) doubles it.
#[derive(Debug, Clone, Copy)]
pub struct ConclusiveRates {
    /// Correct conclusive detection per wrong-capable test.
    pub correct: f64,
    /// Wrong conclusive detection, sin^2(theta - theta').
    pub wrong: f64,
    /// wrong / (correct + wrong); the error rate of the raw data.
    pub normalized_error: f64,
}

pub fn ehpp_conclusive_rates(attack: &ProbeAttack) -> Result<ConclusiveRates> {
    let AttackKind::Ehpp { theta, .. } = attack.kind else {
        return Err(Error::IncompatibleAttack(
            "conclusive rates are defined for the translucent gate".into(),
        ));
    };
    // Born probabilities on Bob's forwarded state.
    let joint = attack.apply(&StateVector::real_qubit(theta))?;
    let bob = joint.to_density().partial_trace(&[1])?;
    let orth_own = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(-theta.cos(), 0.0),
    ])?;
    let orth_other = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(theta.cos(), 0.0),
    ])?;
    let wrong = bob.expect(PovmElement::projector(&orth_own).matrix());
    let correct = bob.expect(PovmElement::projector(&orth_other).matrix());
    Ok(ConclusiveRates {
        correct,
        wrong,
        normalized_error: wrong / (correct + wrong),
    })
}

// ---------------------------------------------------------------------------
// Bound curves
// ---------------------------------------------------------------------------

/// Attack family selector for [`bound_curve`], where the gate parameter
/// is solved from the requested error rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackFamily {
    Ehpp,
    WeakSwap,
    WeakMeasure,
}

impl AttackFamily {
    pub fn label(&self) -> &'static str {
        match self {
            AttackFamily::Ehpp => "ehpp",
            AttackFamily::WeakSwap => "weak-swap",
            AttackFamily::WeakMeasure => "weak-measure",
        }
    }
}

/// One point of an information-vs-disturbance curve.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub p_e: f64,
    /// Gate parameter realizing this error rate.
    pub parameter: f64,
    /// Bounding pure half-angle.
    pub beta: f64,
    /// Information bound on the n-bit parity key.
    pub bound: f64,
}

fn build_attack(family: AttackFamily, scheme: &Scheme, parameter: f64) -> Result<ProbeAttack> {
    match family {
        AttackFamily::WeakSwap => weak_swap(parameter),
        AttackFamily::WeakMeasure => weak_measure(parameter, MeasureBasis::X),
        AttackFamily::Ehpp => match scheme {
            Scheme::TwoState { theta } => ehpp_attack(*theta, parameter),
            Scheme::FourState => Err(Error::IncompatibleAttack(
                "the translucent gate is defined for the two-state scheme".into(),
            )),
        },
    }
}

fn attack_error_rate(family: AttackFamily, scheme: &Scheme, parameter: f64) -> Result<f64> {
    Ok(assess(&build_attack(family, scheme, parameter)?, scheme)?.error_rate)
}

/// Invert the attack's error-rate map and evaluate the closed-form
/// security bound at each requested error rate, for a final key taken as
/// the parity of n bits.
pub fn bound_curve(
    family: AttackFamily,
    scheme: &Scheme,
    n: usize,
    p_e_grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    // Parameter search interval and its reachable error-rate range.
    let (lo, hi) = match (family, scheme) {
        (AttackFamily::Ehpp, Scheme::TwoState { theta }) => (1e-9, *theta),
        (AttackFamily::Ehpp, Scheme::FourState) => {
            return Err(Error::IncompatibleAttack(
                "the translucent gate is defined for the two-state scheme".into(),
            ))
        }
        _ => (0.0, std::f64::consts::FRAC_PI_2),
    };
    // For the translucent gate the parameter is theta' and the error
    // DEcreases with it; for the others it increases with gamma.
    let (p_lo, p_hi) = {
        let a = attack_error_rate(family, scheme, lo)?;
        let b = attack_error_rate(family, scheme, hi.min(std::f64::consts::FRAC_PI_2))?;
        (a.min(b), a.max(b))
    };
    let mut out = Vec::with_capacity(p_e_grid.len());
    for &p_e in p_e_grid {
        if !(p_lo - 1e-12..=p_hi + 1e-12).contains(&p_e) {
            return Err(Error::UnreachableErrorRate(p_e));
        }
        // Deterministic bisection on the monotone error-rate map.
        let increasing = attack_error_rate(family, scheme, hi)? >= attack_error_rate(family, scheme, lo)?;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let v = attack_error_rate(family, scheme, mid)?;
            let go_right = if increasing { v < p_e } else { v > p_e };
            if go_right {
                a = mid;
            } else {
                b = mid;
            }
        }
        let parameter = 0.5 * (a + b);
        let assessment = assess(&build_attack(family, scheme, parameter)?, scheme)?;
        out.push(CurvePoint {
            p_e,
            parameter,
            beta: assessment.beta,
            bound: security_bound(n, assessment.beta),
        });
    }
    Ok(out)
}

/// Intercept-resend on a fraction eta of the four-state transmissions:
/// induced error eta/4, information eta/2.
pub fn intercept_resend_stats(eta: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::BadProbability(eta));
    }
    Ok((eta / 4.0, eta / 2.0))
}
