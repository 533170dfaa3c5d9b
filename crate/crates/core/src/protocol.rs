//! Seeded Monte Carlo runs of full key-distribution sessions.
//!
//! Four schemes share one pipeline: transmit qubits (optionally through
//! an eavesdropper and a depolarizing channel), sift, estimate the error
//! rate on a sacrificial subset, correct errors in 7-bit groups with the
//! Hamming H3 code after a seeded permutation, and distill the final key
//! as parities of masked substrings. Every random draw comes from a
//! substream derived from the session seed, so a transcript is
//! bit-identical across reruns regardless of host or thread count.
//!
//! Conventions:
//! - The four-state scheme stores its signals as the four equatorial
//!   states (|0> + i^m |1>)/sqrt(2). The two conjugate bases are the
//!   m = {0,2} pair (called Z here) and the m = {1,3} pair (X). This is
//!   unitarily equivalent to any other choice and makes the probe-gate
//!   attacks act symmetrically on both bases.
//! - The EPR-type schemes use the computational z/x convention in which
//!   the Bell states are written.
//! - Losses are not modeled as a separate channel; for the two-state
//!   scheme they are folded into the error rate.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{assess, ProbeAttack, Scheme};
use crate::ecc::{hamming_code, security_bound, syndrome_decode, BitString};
use crate::error::{Error, Result};
use crate::hilbert::{
    bell_states, measure_povm, BellOutcome, DensityOperator, PovmElement, StateVector,
};
use crate::qec::{encode_rur, project_code_subspace, BoundedNoise, RurCode};
use crate::rng::{SeededStreams, Stream};

// Substream allocation per session seed.
const STREAM_ALICE: u64 = 0;
const STREAM_EVE: u64 = 1;
const STREAM_BOB: u64 = 2;
const STREAM_NOISE: u64 = 3;
const STREAM_PIPELINE: u64 = 4;
const STREAM_PROJECTION: u64 = 5;

/// Eavesdropping model applied per transmitted qubit.
#[derive(Debug, Clone)]
pub enum EveModel {
    None,
    /// Measure a fraction eta of the qubits in a random protocol basis
    /// and resend the outcome eigenstate.
    InterceptResend { eta: f64 },
    /// Couple every qubit to a fresh probe through the gate.
    ProbeChannel(ProbeAttack),
}

impl EveModel {
    pub fn label(&self) -> String {
        match self {
            EveModel::None => "none".into(),
            EveModel::InterceptResend { eta } => format!("intercept:{eta}"),
            EveModel::ProbeChannel(attack) => attack.label(),
        }
    }
}

/// Configuration of one session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Number of transmissions (pairs, for the EPR-type schemes).
    pub qubit_count: usize,
    /// Two-state signal angle, 0 < theta < pi/4.
    pub theta: f64,
    pub eve: EveModel,
    /// Independent per-qubit depolarizing probability.
    pub depolarizing: f64,
    /// Fraction of the sifted bits sacrificed for error estimation.
    pub estimation_fraction: f64,
    /// Per-qubit bounded-unitary angle for the error-reduction-coded
    /// variant; ignored elsewhere.
    pub coded_noise: f64,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(qubit_count: usize, seed: u64) -> Result<Self> {
        let config = SessionConfig {
            qubit_count,
            theta: 0.4,
            eve: EveModel::None,
            depolarizing: 0.0,
            estimation_fraction: 0.25,
            coded_noise: 0.0,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubit_count < 8 {
            return Err(Error::param(format!(
                "a useful session needs at least 8 qubits, got {}",
                self.qubit_count
            )));
        }
        if !(0.0 < self.theta && self.theta < std::f64::consts::FRAC_PI_4) {
            return Err(Error::param(format!(
                "two-state angle {} outside (0, pi/4)",
                self.theta
            )));
        }
        for (p, name) in [
            (self.depolarizing, "depolarizing"),
            (self.estimation_fraction, "estimation fraction"),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("{name} {p} outside [0, 1]")));
            }
        }
        if let EveModel::InterceptResend { eta } = self.eve {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::BadProbability(eta));
            }
        }
        Ok(())
    }
}

/// Protocol basis label. For the four-state scheme Z is the m = {0,2}
/// equatorial pair and X the m = {1,3} pair; for EPR-type schemes they
/// are the computational z and x bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// Which conclusive test Bob ran on a two-state transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum B92Test {
    /// Distinguish the bit-0 signal from its orthogonal complement; a
    /// hit on the complement identifies bit 1.
    IdentifyOne,
    /// Mirror image: a conclusive hit identifies bit 0.
    IdentifyZero,
}

/// Eve's recorded action at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EveAction {
    None,
    Intercept { basis: Basis, outcome: u8 },
    Probe,
}

/// Per-position record of a session.
#[derive(Debug, Clone, Serialize)]
pub struct PositionRecord {
    pub index: usize,
    pub alice_basis: Option<Basis>,
    pub alice_bit: u8,
    pub bob_basis: Option<Basis>,
    pub b92_test: Option<B92Test>,
    pub eve: EveAction,
    /// Center outcome for the time-reversed scheme.
    pub bell_outcome: Option<BellOutcome>,
    /// Bob's value aligned to Alice's convention (correlation rules
    /// already applied); None when inconclusive or discarded.
    pub bob_value: Option<u8>,
    /// Two-state scheme: whether the test was conclusive.
    pub conclusive: bool,
    /// Coded sessions: code-subspace projection failed.
    pub projection_discarded: bool,
    pub sifted: bool,
    pub estimation: bool,
    pub error: Option<bool>,
}

impl PositionRecord {
    fn new(index: usize) -> Self {
        PositionRecord {
            index,
            alice_basis: None,
            alice_bit: 0,
            bob_basis: None,
            b92_test: None,
            eve: EveAction::None,
            bell_outcome: None,
            bob_value: None,
            conclusive: false,
            projection_discarded: false,
            sifted: false,
            estimation: false,
            error: None,
        }
    }
}

/// Classical data announced in public during the session.
#[derive(Debug, Clone, Serialize)]
pub struct AnnouncedData {
    pub estimation_indices: Vec<usize>,
    /// Order in which the surviving sifted positions feed the 7-bit
    /// correction groups.
    pub permutation: Vec<usize>,
    /// Per group, the three Hamming parities of Alice's bits.
    pub syndromes: Vec<Vec<u8>>,
    /// Privacy-amplification masks (index lists into the corrected
    /// string).
    pub masks: Vec<Vec<usize>>,
}

/// Session summary, also used for sweep CSV rows.
#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub scheme: String,
    pub eve: String,
    pub seed: u64,
    pub qubit_count: usize,
    pub sifted_count: usize,
    pub sift_fraction: f64,
    pub estimation_count: usize,
    pub observed_error_rate: f64,
    pub projection_discards: usize,
    /// Sifted positions beyond the estimation subset that did not fill a
    /// complete 7-bit group.
    pub leftover_count: usize,
    /// Length of the error-corrected key material (7 times the group
    /// count); satisfies sifted - estimation - leftover = corrected.
    pub corrected_length: usize,
    pub syndrome_bits: usize,
    pub key_length: usize,
    pub final_key_alice: Vec<u8>,
    pub final_key_bob: Vec<u8>,
    pub keys_match: bool,
    /// Closed-form bound on Eve's information about a parity of the
    /// corrected material, when the model provides one.
    pub eve_info_bound: Option<f64>,
}

/// Full record of one Monte Carlo session.
#[derive(Debug, Clone, Serialize)]
pub struct SessionTranscript {
    pub positions: Vec<PositionRecord>,
    pub announced: AnnouncedData,
    pub summary: SessionSummary,
}

impl SessionTranscript {
    /// One JSON object per position, then the announced data, then the
    /// summary.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.positions {
            serde_json::to_writer(&mut w, p)?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut w, &serde_json::json!({ "announced": &self.announced }))?;
        writeln!(w)?;
        serde_json::to_writer(&mut w, &serde_json::json!({ "summary": &self.summary }))?;
        writeln!(w)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Channel building blocks
// ---------------------------------------------------------------------------

fn maximally_mixed() -> DensityOperator {
    DensityOperator::from_bloch(crate::hilbert::BlochVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    })
    .expect("valid")
}

/// Four-state signal: basis Z holds m = {0, 2}, basis X holds m = {1, 3}.
fn four_state_signal(basis: Basis, bit: u8) -> StateVector {
    let m = match basis {
        Basis::Z => 2 * bit,
        Basis::X => 1 + 2 * bit,
    };
    StateVector::equatorial(m)
}

fn four_state_projectors(basis: Basis) -> [PovmElement; 2] {
    [
        PovmElement::projector(&four_state_signal(basis, 0)),
        PovmElement::projector(&four_state_signal(basis, 1)),
    ]
}

/// EPR-side signal states in the computational z/x convention
/// (bit 0 = up/left, bit 1 = down/right).
fn zx_signal(basis: Basis, bit: u8) -> StateVector {
    match (basis, bit) {
        (Basis::Z, 0) => StateVector::basis(2, 0).expect("fits"),
        (Basis::Z, _) => StateVector::basis(2, 1).expect("fits"),
        (Basis::X, 0) => StateVector::new(vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .expect("normalized"),
        (Basis::X, _) => StateVector::new(vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .expect("normalized"),
    }
}

fn zx_projectors(basis: Basis) -> [PovmElement; 2] {
    [
        PovmElement::projector(&zx_signal(basis, 0)),
        PovmElement::projector(&zx_signal(basis, 1)),
    ]
}

fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> Basis {
    if rng.random_bool(0.5) {
        Basis::Z
    } else {
        Basis::X
    }
}

/// Apply the eavesdropper and the depolarizing channel to a pure signal,
/// in the stated basis convention, returning Bob's received state.
fn channel_four_state(
    signal: &StateVector,
    eve: &EveModel,
    depolarizing: f64,
    eve_rng: &mut Stream,
    noise_rng: &mut Stream,
    record: &mut PositionRecord,
) -> Result<DensityOperator> {
    let mut rho = channel_eve(
        signal,
        eve,
        eve_rng,
        record,
        four_state_projectors,
        four_state_signal,
    )?;
    if depolarizing > 0.0 && noise_rng.random_bool(depolarizing) {
        rho = maximally_mixed();
    }
    Ok(rho)
}

fn channel_zx(
    signal: &StateVector,
    eve: &EveModel,
    depolarizing: f64,
    eve_rng: &mut Stream,
    noise_rng: &mut Stream,
    record: &mut PositionRecord,
) -> Result<DensityOperator> {
    let mut rho = channel_eve(signal, eve, eve_rng, record, zx_projectors, zx_signal)?;
    if depolarizing > 0.0 && noise_rng.random_bool(depolarizing) {
        rho = maximally_mixed();
    }
    Ok(rho)
}

fn channel_eve(
    signal: &StateVector,
    eve: &EveModel,
    eve_rng: &mut Stream,
    record: &mut PositionRecord,
    projectors: fn(Basis) -> [PovmElement; 2],
    eigenstate: fn(Basis, u8) -> StateVector,
) -> Result<DensityOperator> {
    match eve {
        EveModel::None => Ok(signal.to_density()),
        EveModel::InterceptResend { eta } => {
            if *eta > 0.0 && eve_rng.random_bool(*eta) {
                let basis = random_basis(eve_rng);
                let (outcome, _) =
                    measure_povm(&signal.to_density(), &projectors(basis), eve_rng)?;
                record.eve = EveAction::Intercept {
                    basis,
                    outcome: outcome as u8,
                };
                Ok(eigenstate(basis, outcome as u8).to_density())
            } else {
                Ok(signal.to_density())
            }
        }
        EveModel::ProbeChannel(attack) => {
            record.eve = EveAction::Probe;
            let joint = attack.apply(signal)?;
            joint.to_density().partial_trace(&[1])
        }
    }
}

// ---------------------------------------------------------------------------
// The classical pipeline
// ---------------------------------------------------------------------------

struct PipelineResult {
    announced: AnnouncedData,
    estimation_count: usize,
    observed_error_rate: f64,
    leftover_count: usize,
    corrected_length: usize,
    syndrome_bits: usize,
    key_alice: Vec<u8>,
    key_bob: Vec<u8>,
}

/// Error estimation, Hamming H3 correction on permuted 7-bit groups, and
/// parity privacy amplification (one key bit: the parity of the
/// corrected string).
fn run_pipeline(
    positions: &mut [PositionRecord],
    estimation_fraction: f64,
    rng: &mut Stream,
) -> Result<PipelineResult> {
    let sifted: Vec<usize> = positions
        .iter()
        .filter(|p| p.sifted)
        .map(|p| p.index)
        .collect();
    let est_count = ((sifted.len() as f64) * estimation_fraction).round() as usize;

    // Sample the estimation subset without replacement.
    let mut pool = sifted.clone();
    for i in 0..est_count {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut estimation: Vec<usize> = pool[..est_count].to_vec();
    estimation.sort_unstable();
    let mut errors = 0usize;
    for &idx in &estimation {
        positions[idx].estimation = true;
        if positions[idx].error == Some(true) {
            errors += 1;
        }
    }
    let observed_error_rate = if est_count > 0 {
        errors as f64 / est_count as f64
    } else {
        0.0
    };

    // Remaining key material, in a fresh random order.
    let mut remaining: Vec<usize> = sifted
        .iter()
        .copied()
        .filter(|idx| !positions[*idx].estimation)
        .collect();
    for i in (1..remaining.len()).rev() {
        let j = rng.random_range(0..=i);
        remaining.swap(i, j);
    }
    let groups = remaining.len() / 7;
    if groups == 0 {
        return Err(Error::InsufficientBits(format!(
            "{} sifted bits remain after estimation; a 7-bit group is required",
            remaining.len()
        )));
    }
    let leftover_count = remaining.len() - 7 * groups;
    let permutation: Vec<usize> = remaining[..7 * groups].to_vec();

    let h3 = hamming_code(3)?;
    let mut syndromes = Vec::with_capacity(groups);
    let mut key_alice = Vec::with_capacity(7 * groups);
    let mut key_bob = Vec::with_capacity(7 * groups);
    for g in 0..groups {
        let idxs = &permutation[7 * g..7 * (g + 1)];
        let mut alice_word = 0u64;
        let mut bob_word = 0u64;
        for &i in idxs {
            alice_word = (alice_word << 1) | u64::from(positions[i].alice_bit);
            let bob_bit = positions[i].bob_value.ok_or_else(|| {
                Error::param("sifted position lacks a received value".to_string())
            })?;
            bob_word = (bob_word << 1) | u64::from(bob_bit);
        }
        let alice_bits = BitString::new(alice_word, 7)?;
        let bob_bits = BitString::new(bob_word, 7)?;
        let announced: Vec<u8> = h3
            .rows()
            .iter()
            .map(|row| alice_bits.and(row).parity())
            .collect();
        let code = h3.with_announced(announced.clone(), 0)?;
        let (corrected, _) = syndrome_decode(&bob_bits, &code)?;
        syndromes.push(announced);
        for i in 0..7 {
            key_alice.push(alice_bits.bit(i));
            key_bob.push(corrected.bit(i));
        }
    }

    let corrected_length = 7 * groups;
    debug_assert_eq!(
        sifted.len() - est_count - leftover_count,
        corrected_length,
        "pipeline arithmetic"
    );
    let masks = vec![(0..corrected_length).collect::<Vec<usize>>()];
    let final_alice = privacy_amplify(&key_alice, &masks)?;
    let final_bob = privacy_amplify(&key_bob, &masks)?;
    Ok(PipelineResult {
        announced: AnnouncedData {
            estimation_indices: estimation,
            permutation,
            syndromes,
            masks,
        },
        estimation_count: est_count,
        observed_error_rate,
        leftover_count,
        corrected_length,
        syndrome_bits: 3 * groups,
        key_alice: final_alice,
        key_bob: final_bob,
    })
}

/// Key bits as parities of masked substrings of the raw string.
pub fn privacy_amplify(bits: &[u8], masks: &[Vec<usize>]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(masks.len());
    for mask in masks {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        let mut acc = 0u8;
        for &i in mask {
            let bit = bits
                .get(i)
                .ok_or_else(|| Error::param(format!("mask index {i} out of range")))?;
            acc ^= bit & 1;
        }
        out.push(acc);
    }
    Ok(out)
}

fn finish_session(
    scheme: &str,
    config: &SessionConfig,
    attack_scheme: Option<Scheme>,
    mut positions: Vec<PositionRecord>,
    pipeline_rng: &mut Stream,
) -> Result<SessionTranscript> {
    let pipeline = run_pipeline(&mut positions, config.estimation_fraction, pipeline_rng)?;
    let sifted_count = positions.iter().filter(|p| p.sifted).count();
    let projection_discards = positions.iter().filter(|p| p.projection_discarded).count();
    let eve_info_bound = match (&config.eve, attack_scheme) {
        (EveModel::None, _) => Some(0.0),
        (EveModel::InterceptResend { eta }, _) => Some(eta / 2.0),
        (EveModel::ProbeChannel(attack), Some(scheme)) => {
            let beta = assess(attack, &scheme)?.beta;
            Some(security_bound(pipeline.corrected_length.max(1), beta))
        }
        (EveModel::ProbeChannel(_), None) => None,
    };
    let summary = SessionSummary {
        scheme: scheme.to_string(),
        eve: config.eve.label(),
        seed: config.seed,
        qubit_count: config.qubit_count,
        sifted_count,
        sift_fraction: sifted_count as f64 / config.qubit_count as f64,
        estimation_count: pipeline.estimation_count,
        observed_error_rate: pipeline.observed_error_rate,
        projection_discards,
        leftover_count: pipeline.leftover_count,
        corrected_length: pipeline.corrected_length,
        syndrome_bits: pipeline.syndrome_bits,
        key_length: pipeline.key_alice.len(),
        keys_match: pipeline.key_alice == pipeline.key_bob,
        final_key_alice: pipeline.key_alice,
        final_key_bob: pipeline.key_bob,
        eve_info_bound,
    };
    Ok(SessionTranscript {
        positions,
        announced: pipeline.announced,
        summary,
    })
}

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

/// Four-state prepare-and-measure session.
pub fn run_bb84(config: &SessionConfig) -> Result<SessionTranscript> {
    config.validate()?;
    let streams = SeededStreams::new(config.seed);
    let mut alice_rng = streams.stream(STREAM_ALICE);
    let mut eve_rng = streams.stream(STREAM_EVE);
    let mut bob_rng = streams.stream(STREAM_BOB);
    let mut noise_rng = streams.stream(STREAM_NOISE);
    let mut pipeline_rng = streams.stream(STREAM_PIPELINE);

    let mut positions = Vec::with_capacity(config.qubit_count);
    for index in 0..config.qubit_count {
        let mut rec = PositionRecord::new(index);
        let basis = random_basis(&mut alice_rng);
        let bit = u8::from(alice_rng.random_bool(0.5));
        rec.alice_basis = Some(basis);
        rec.alice_bit = bit;
        let signal = four_state_signal(basis, bit);
        let rho = channel_four_state(
            &signal,
            &config.eve,
            config.depolarizing,
            &mut eve_rng,
            &mut noise_rng,
            &mut rec,
        )?;
        let bob_basis = random_basis(&mut bob_rng);
        let (outcome, _) = measure_povm(&rho, &four_state_projectors(bob_basis), &mut bob_rng)?;
        rec.bob_basis = Some(bob_basis);
        rec.conclusive = true;
        rec.sifted = bob_basis == basis;
        if rec.sifted {
            rec.bob_value = Some(outcome as u8);
            rec.error = Some(outcome as u8 != bit);
        }
        positions.push(rec);
    }
    finish_session(
        "bb84",
        config,
        Some(Scheme::FourState),
        positions,
        &mut pipeline_rng,
    )
}

/// Two-state session with the two-measurement conclusive receiver.
pub fn run_b92(config: &SessionConfig) -> Result<SessionTranscript> {
    config.validate()?;
    let theta = config.theta;
    let streams = SeededStreams::new(config.seed);
    let mut alice_rng = streams.stream(STREAM_ALICE);
    let mut eve_rng = streams.stream(STREAM_EVE);
    let mut bob_rng = streams.stream(STREAM_BOB);
    let mut noise_rng = streams.stream(STREAM_NOISE);
    let mut pipeline_rng = streams.stream(STREAM_PIPELINE);

    let signal0 = StateVector::real_qubit(theta);
    let signal1 = StateVector::real_qubit(-theta);
    let orth0 = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(-theta.cos(), 0.0),
    ])?;
    let orth1 = StateVector::new(vec![
        Complex64::new(theta.sin(), 0.0),
        Complex64::new(theta.cos(), 0.0),
    ])?;
    // Eve's intercept-resend measures in the symmetric (optimal
    // discrimination) basis and resends the outcome eigenstate.
    let sym_plus = StateVector::equatorial(0);
    let sym_minus = StateVector::equatorial(2);

    let mut positions = Vec::with_capacity(config.qubit_count);
    for index in 0..config.qubit_count {
        let mut rec = PositionRecord::new(index);
        let bit = u8::from(alice_rng.random_bool(0.5));
        rec.alice_bit = bit;
        let signal = if bit == 0 { &signal0 } else { &signal1 };

        let mut rho = match &config.eve {
            EveModel::None => signal.to_density(),
            EveModel::InterceptResend { eta } => {
                if *eta > 0.0 && eve_rng.random_bool(*eta) {
                    let elems = [
                        PovmElement::projector(&sym_plus),
                        PovmElement::projector(&sym_minus),
                    ];
                    let (outcome, _) = measure_povm(&signal.to_density(), &elems, &mut eve_rng)?;
                    rec.eve = EveAction::Intercept {
                        basis: Basis::Z,
                        outcome: outcome as u8,
                    };
                    if outcome == 0 {
                        sym_plus.to_density()
                    } else {
                        sym_minus.to_density()
                    }
                } else {
                    signal.to_density()
                }
            }
            EveModel::ProbeChannel(attack) => {
                rec.eve = EveAction::Probe;
                attack.apply(signal)?.to_density().partial_trace(&[1])?
            }
        };
        if config.depolarizing > 0.0 && noise_rng.random_bool(config.depolarizing) {
            rho = maximally_mixed();
        }

        // Bob picks one of the two conclusive tests at random.
        let test = if bob_rng.random_bool(0.5) {
            B92Test::IdentifyOne
        } else {
            B92Test::IdentifyZero
        };
        rec.b92_test = Some(test);
        let (keep, conclusive_bit) = match test {
            B92Test::IdentifyOne => (&orth0, 1u8),
            B92Test::IdentifyZero => (&orth1, 0u8),
        };
        let conclusive = PovmElement::projector(keep);
        let inconclusive = PovmElement::new(
            crate::linalg::Matrix::identity(2).sub(conclusive.matrix()),
        )?;
        let (outcome, _) = measure_povm(&rho, &[conclusive, inconclusive], &mut bob_rng)?;
        if outcome == 0 {
            rec.conclusive = true;
            rec.sifted = true;
            rec.bob_value = Some(conclusive_bit);
            rec.error = Some(conclusive_bit != bit);
        }
        positions.push(rec);
    }
    finish_session(
        "b92",
        config,
        Some(Scheme::TwoState { theta }),
        positions,
        &mut pipeline_rng,
    )
}

/// Project out the first qubit of a two-qubit pure state onto `outcome`,
/// returning the (renormalized) state left for the second qubit and the
/// outcome probability.
fn collapse_first_qubit(pair: &StateVector, outcome: &StateVector) -> Result<(f64, StateVector)> {
    if pair.dim() != 4 || outcome.dim() != 2 {
        return Err(Error::DimensionMismatch(pair.dim(), 4));
    }
    let mut rest = vec![Complex64::ZERO; 2];
    for (j, r) in rest.iter_mut().enumerate() {
        for i in 0..2 {
            *r += outcome.amp(i).conj() * pair.amp(2 * i + j);
        }
    }
    let prob: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
    if prob <= 1e-28 {
        return Err(Error::ZeroNorm);
    }
    Ok((prob, StateVector::normalized(rest)?))
}

/// EPR session: a singlet source feeds both parties; matched bases are
/// anticorrelated. The eavesdropper and channel noise act on Bob's
/// particle in transit.
pub fn run_epr(config: &SessionConfig) -> Result<SessionTranscript> {
    config.validate()?;
    let streams = SeededStreams::new(config.seed);
    let mut alice_rng = streams.stream(STREAM_ALICE);
    let mut eve_rng = streams.stream(STREAM_EVE);
    let mut bob_rng = streams.stream(STREAM_BOB);
    let mut noise_rng = streams.stream(STREAM_NOISE);
    let mut pipeline_rng = streams.stream(STREAM_PIPELINE);

    let singlet = bell_states()[0].clone();
    let mut positions = Vec::with_capacity(config.qubit_count);
    for index in 0..config.qubit_count {
        let mut rec = PositionRecord::new(index);
        let alice_basis = random_basis(&mut alice_rng);
        // Alice measures her half.
        let proj = zx_projectors(alice_basis);
        let p0 = singlet
            .to_density()
            .partial_trace(&[0])?
            .expect(proj[0].matrix());
        let alice_bit = u8::from(!alice_rng.random_bool(p0.clamp(0.0, 1.0)));
        let (_, bob_state) =
            collapse_first_qubit(&singlet, &zx_signal(alice_basis, alice_bit))?;
        rec.alice_basis = Some(alice_basis);
        rec.alice_bit = alice_bit;

        let rho = channel_zx(
            &bob_state,
            &config.eve,
            config.depolarizing,
            &mut eve_rng,
            &mut noise_rng,
            &mut rec,
        )?;
        let bob_basis = random_basis(&mut bob_rng);
        let (outcome, _) = measure_povm(&rho, &zx_projectors(bob_basis), &mut bob_rng)?;
        rec.bob_basis = Some(bob_basis);
        rec.conclusive = true;
        rec.sifted = bob_basis == alice_basis;
        if rec.sifted {
            // Anticorrelation: Bob's aligned value flips his outcome.
            let aligned = 1 - outcome as u8;
            rec.bob_value = Some(aligned);
            rec.error = Some(aligned != alice_bit);
        }
        positions.push(rec);
    }
    finish_session("epr", config, None, positions, &mut pipeline_rng)
}

/// Sifting mode of the time-reversed EPR scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReversedMode {
    /// Keep only singlet outcomes at the center.
    SingletOnly,
    /// Keep all four Bell outcomes and apply the per-outcome
    /// correlation rule.
    BellOperator,
}

impl ReversedMode {
    pub fn label(&self) -> &'static str {
        match self {
            ReversedMode::SingletOnly => "reversed-epr-singlet",
            ReversedMode::BellOperator => "reversed-epr-bell",
        }
    }
}

/// Is a Bell outcome correlated (true) or anticorrelated (false) in the
/// given basis, for the z/x signal convention?
fn bell_correlated(outcome: BellOutcome, basis: Basis) -> bool {
    match (outcome, basis) {
        (BellOutcome::PsiMinus, _) => false,
        (BellOutcome::PsiPlus, Basis::Z) => false,
        (BellOutcome::PsiPlus, Basis::X) => true,
        (BellOutcome::PhiPlus, _) => true,
        (BellOutcome::PhiMinus, Basis::Z) => true,
        (BellOutcome::PhiMinus, Basis::X) => false,
    }
}

/// Time-reversed EPR session: both users send states to a center that
/// projects each pair onto the Bell basis and announces the outcome.
/// The center is honest here; an eavesdropper model is not supported.
pub fn run_reversed_epr(config: &SessionConfig, mode: ReversedMode) -> Result<SessionTranscript> {
    config.validate()?;
    if !matches!(config.eve, EveModel::None) {
        return Err(Error::IncompatibleAttack(
            "the time-reversed scheme models an honest center without a separate eavesdropper"
                .into(),
        ));
    }
    let streams = SeededStreams::new(config.seed);
    let mut alice_rng = streams.stream(STREAM_ALICE);
    let mut center_rng = streams.stream(STREAM_EVE);
    let mut bob_rng = streams.stream(STREAM_BOB);
    let mut noise_rng = streams.stream(STREAM_NOISE);
    let mut pipeline_rng = streams.stream(STREAM_PIPELINE);

    let bell_projectors: Vec<PovmElement> = bell_states()
        .iter()
        .map(PovmElement::projector)
        .collect();

    let mut positions = Vec::with_capacity(config.qubit_count);
    for index in 0..config.qubit_count {
        let mut rec = PositionRecord::new(index);
        let alice_basis = random_basis(&mut alice_rng);
        let alice_bit = u8::from(alice_rng.random_bool(0.5));
        let bob_basis = random_basis(&mut bob_rng);
        let bob_bit = u8::from(bob_rng.random_bool(0.5));
        rec.alice_basis = Some(alice_basis);
        rec.alice_bit = alice_bit;
        rec.bob_basis = Some(bob_basis);

        let mut rho_a = zx_signal(alice_basis, alice_bit).to_density();
        let mut rho_b = zx_signal(bob_basis, bob_bit).to_density();
        if config.depolarizing > 0.0 {
            if noise_rng.random_bool(config.depolarizing) {
                rho_a = maximally_mixed();
            }
            if noise_rng.random_bool(config.depolarizing) {
                rho_b = maximally_mixed();
            }
        }
        let pair = rho_a.tensor(&rho_b)?;
        let (outcome_idx, _) = measure_povm(&pair, &bell_projectors, &mut center_rng)?;
        let outcome = BellOutcome::ALL[outcome_idx];
        rec.bell_outcome = Some(outcome);
        rec.conclusive = true;

        let same_basis = alice_basis == bob_basis;
        let kept = match mode {
            ReversedMode::SingletOnly => same_basis && outcome == BellOutcome::PsiMinus,
            ReversedMode::BellOperator => same_basis,
        };
        rec.sifted = kept;
        if kept {
            let aligned = if bell_correlated(outcome, alice_basis) {
                bob_bit
            } else {
                1 - bob_bit
            };
            rec.bob_value = Some(aligned);
            rec.error = Some(aligned != alice_bit);
        }
        positions.push(rec);
    }
    finish_session(mode.label(), config, None, positions, &mut pipeline_rng)
}

/// Four-state session in which every qubit is encoded with the
/// n-squared-qubit error-reduction code, passed through per-qubit
/// bounded random unitaries (angle bound `config.coded_noise`), and
/// projected back at the receiver; failed projections are discarded.
pub fn qec_qpa_session(config: &SessionConfig, rur_n: usize) -> Result<SessionTranscript> {
    config.validate()?;
    if !(2..=3).contains(&rur_n) {
        return Err(Error::param(format!(
            "coded sessions support inner length 2 or 3, got {rur_n}"
        )));
    }
    if !matches!(config.eve, EveModel::None) {
        return Err(Error::IncompatibleAttack(
            "the coded session models channel disturbance only".into(),
        ));
    }
    let code = RurCode::new(rur_n)?;
    let noise = BoundedNoise::new(config.coded_noise)?;
    let streams = SeededStreams::new(config.seed);
    let mut alice_rng = streams.stream(STREAM_ALICE);
    let mut bob_rng = streams.stream(STREAM_BOB);
    let mut noise_rng = streams.stream(STREAM_NOISE);
    let mut pipeline_rng = streams.stream(STREAM_PIPELINE);
    let mut projection_rng = streams.stream(STREAM_PROJECTION);

    let mut positions = Vec::with_capacity(config.qubit_count);
    for index in 0..config.qubit_count {
        let mut rec = PositionRecord::new(index);
        let basis = random_basis(&mut alice_rng);
        let bit = u8::from(alice_rng.random_bool(0.5));
        rec.alice_basis = Some(basis);
        rec.alice_bit = bit;

        let logical = four_state_signal(basis, bit);
        let mut state = encode_rur(&code, &logical)?;
        for q in 0..code.total_qubits() {
            let u = noise.sample_unitary(&mut noise_rng);
            state = state.apply_single_qubit(q, &u)?;
        }
        let projected = project_code_subspace(&state, &code)?;
        let accepted =
            projected.success && projection_rng.random_bool(projected.probability.clamp(0.0, 1.0));
        if !accepted {
            rec.projection_discarded = true;
            positions.push(rec);
            continue;
        }
        let recovered = projected.logical.expect("successful projection");
        let bob_basis = random_basis(&mut bob_rng);
        let (outcome, _) = measure_povm(
            &recovered.to_density(),
            &four_state_projectors(bob_basis),
            &mut bob_rng,
        )?;
        rec.bob_basis = Some(bob_basis);
        rec.conclusive = true;
        rec.sifted = bob_basis == basis;
        if rec.sifted {
            rec.bob_value = Some(outcome as u8);
            rec.error = Some(outcome as u8 != bit);
        }
        positions.push(rec);
    }
    finish_session(
        &format!("qec-bb84:r{rur_n}ur{rur_n}"),
        config,
        None,
        positions,
        &mut pipeline_rng,
    )
}

// ---------------------------------------------------------------------------

/// Batch helper: run `count` sessions with consecutive derived seeds by
/// calling `run` once per seed. Sessions are independent; callers may
/// parallelize across them as long as results are reassembled in seed
/// order.
pub fn derived_seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{weak_swap, MeasureBasis};

    fn config(qubits: usize, seed: u64) -> SessionConfig {
        SessionConfig::new(qubits, seed).unwrap()
    }

    fn five_sigma(p: f64, n: usize) -> f64 {
        5.0 * (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn bb84_honest_statistics() {
        let transcript = run_bb84(&config(4096, 11)).unwrap();
        let s = &transcript.summary;
        // Sift fraction about a half.
        assert!((s.sift_fraction - 0.5).abs() < five_sigma(0.5, 4096));
        // No errors anywhere.
        assert_eq!(s.observed_error_rate, 0.0);
        assert!(transcript
            .positions
            .iter()
            .all(|p| p.error != Some(true)));
        assert!(s.keys_match);
        assert_eq!(s.key_length, 1);
        // Pipeline arithmetic.
        assert_eq!(
            s.sifted_count - s.estimation_count - s.leftover_count,
            s.corrected_length
        );
        assert_eq!(s.syndrome_bits, 3 * (s.corrected_length / 7));
        assert_eq!(s.eve_info_bound, Some(0.0));
    }

    #[test]
    fn bb84_intercept_resend_quarter_errors() {
        let qubits = 8192;
        let mut cfg = config(qubits, 17);
        cfg.eve = EveModel::InterceptResend { eta: 1.0 };
        let transcript = run_bb84(&cfg).unwrap();
        // Error rate over ALL sifted positions (not only the estimation
        // subset) for better statistics.
        let (mut sifted, mut wrong) = (0usize, 0usize);
        for p in &transcript.positions {
            if p.sifted {
                sifted += 1;
                if p.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let rate = wrong as f64 / sifted as f64;
        assert!(
            (rate - 0.25).abs() < five_sigma(0.25, sifted),
            "rate={rate}"
        );
        assert_eq!(transcript.summary.eve_info_bound, Some(0.5));
    }

    #[test]
    fn bb84_weak_swap_error_rate() {
        let gamma = 0.6f64;
        let mut cfg = config(8192, 23);
        cfg.eve = EveModel::ProbeChannel(weak_swap(gamma).unwrap());
        let transcript = run_bb84(&cfg).unwrap();
        let expect = (gamma / 2.0).sin().powi(2);
        let (mut sifted, mut wrong) = (0usize, 0usize);
        for p in &transcript.positions {
            if p.sifted {
                sifted += 1;
                if p.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let rate = wrong as f64 / sifted as f64;
        assert!(
            (rate - expect).abs() < five_sigma(expect, sifted),
            "rate {rate} vs {expect}"
        );
        assert!(transcript.summary.eve_info_bound.unwrap() > 0.0);
    }

    #[test]
    fn bb84_depolarizing_linear_response() {
        let p = 0.2f64;
        let mut cfg = config(8192, 31);
        cfg.depolarizing = p;
        let transcript = run_bb84(&cfg).unwrap();
        let (mut sifted, mut wrong) = (0usize, 0usize);
        for rec in &transcript.positions {
            if rec.sifted {
                sifted += 1;
                if rec.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let rate = wrong as f64 / sifted as f64;
        assert!((rate - p / 2.0).abs() < five_sigma(p / 2.0, sifted));
    }

    #[test]
    fn b92_honest_statistics() {
        let theta = 0.4f64;
        let mut cfg = config(8192, 5);
        cfg.theta = theta;
        let transcript = run_b92(&cfg).unwrap();
        // Zero errors among conclusive results.
        assert!(transcript.positions.iter().all(|p| p.error != Some(true)));
        // Conclusive probability per sent bit: sin^2(2 theta) / 2.
        let expect = (2.0 * theta).sin().powi(2) / 2.0;
        let frac = transcript.summary.sift_fraction;
        assert!(
            (frac - expect).abs() < five_sigma(expect, 8192),
            "conclusive fraction {frac} vs {expect}"
        );
        assert!(transcript.summary.keys_match);
    }

    #[test]
    fn b92_ehpp_conclusive_wrong_rate() {
        let (theta, theta_prime) = (0.5f64, 0.35f64);
        let mut cfg = config(16384, 7);
        cfg.theta = theta;
        cfg.eve = EveModel::ProbeChannel(crate::attacks::ehpp_attack(theta, theta_prime).unwrap());
        let transcript = run_b92(&cfg).unwrap();
        // Among positions where Bob ran the test capable of
        // misidentifying Alice's bit, the conclusive (= wrong) fraction
        // is sin^2(theta - theta').
        let (mut capable, mut wrong) = (0usize, 0usize);
        for p in &transcript.positions {
            let wrong_capable = matches!(
                (p.alice_bit, p.b92_test),
                (0, Some(B92Test::IdentifyOne)) | (1, Some(B92Test::IdentifyZero))
            );
            if wrong_capable {
                capable += 1;
                if p.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let expect = (theta - theta_prime).sin().powi(2);
        let rate = wrong as f64 / capable as f64;
        assert!(
            (rate - expect).abs() < five_sigma(expect, capable),
            "rate {rate} vs {expect}"
        );
    }

    #[test]
    fn epr_honest_anticorrelation() {
        let transcript = run_epr(&config(4096, 13)).unwrap();
        assert!(transcript.positions.iter().all(|p| p.error != Some(true)));
        let s = &transcript.summary;
        assert!((s.sift_fraction - 0.5).abs() < five_sigma(0.5, 4096));
        assert!(s.keys_match);
    }

    #[test]
    fn epr_noise_linear_response() {
        let p = 0.3f64;
        let mut cfg = config(8192, 19);
        cfg.depolarizing = p;
        let transcript = run_epr(&cfg).unwrap();
        let (mut sifted, mut wrong) = (0usize, 0usize);
        for rec in &transcript.positions {
            if rec.sifted {
                sifted += 1;
                if rec.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let rate = wrong as f64 / sifted as f64;
        assert!((rate - p / 2.0).abs() < five_sigma(p / 2.0, sifted));
    }

    #[test]
    fn reversed_epr_singlet_only() {
        let transcript =
            run_reversed_epr(&config(16384, 3), ReversedMode::SingletOnly).unwrap();
        assert!(transcript.positions.iter().all(|p| p.error != Some(true)));
        let frac = transcript.summary.sift_fraction;
        assert!(
            (frac - 0.125).abs() < five_sigma(0.125, 16384),
            "usable fraction {frac}"
        );
        // Same prepared states never produce the singlet.
        for p in &transcript.positions {
            if p.bell_outcome == Some(BellOutcome::PsiMinus)
                && p.alice_basis == p.bob_basis
            {
                // Aligned value exists and is the anticorrelated one, so
                // same-state pairs cannot be here with zero errors.
                assert_eq!(p.error, Some(false));
            }
        }
    }

    #[test]
    fn reversed_epr_bell_mode() {
        let transcript =
            run_reversed_epr(&config(16384, 29), ReversedMode::BellOperator).unwrap();
        assert!(transcript.positions.iter().all(|p| p.error != Some(true)));
        let frac = transcript.summary.sift_fraction;
        assert!(
            (frac - 0.5).abs() < five_sigma(0.5, 16384),
            "usable fraction {frac}"
        );
        // All four outcomes appear among the used pairs.
        for outcome in BellOutcome::ALL {
            assert!(transcript
                .positions
                .iter()
                .any(|p| p.sifted && p.bell_outcome == Some(outcome)));
        }
        // An eavesdropper model is rejected.
        let mut cfg = config(1024, 1);
        cfg.eve = EveModel::InterceptResend { eta: 0.5 };
        assert!(run_reversed_epr(&cfg, ReversedMode::BellOperator).is_err());
    }

    #[test]
    fn qec_session_noiseless_matches_plain() {
        let transcript = qec_qpa_session(&config(2048, 37), 2).unwrap();
        assert_eq!(transcript.summary.projection_discards, 0);
        assert!(transcript.positions.iter().all(|p| p.error != Some(true)));
        assert!((transcript.summary.sift_fraction - 0.5).abs() < five_sigma(0.5, 2048));
        assert!(transcript.summary.keys_match);
    }

    #[test]
    fn qec_session_discard_fraction_tracks_success_probability() {
        let chi = 0.25f64;
        let mut cfg = config(4096, 41);
        cfg.coded_noise = chi;
        let transcript = qec_qpa_session(&cfg, 2).unwrap();
        let discard = transcript.summary.projection_discards as f64 / 4096.0;
        // Compare with the Monte Carlo success probability of the same
        // code and noise.
        let code = RurCode::new(2).unwrap();
        let noise = BoundedNoise::new(chi).unwrap();
        let mut rng = SeededStreams::new(999).stream(0);
        let est = crate::qec::remainder_error_estimate(
            &code,
            &noise,
            4000,
            &crate::qec::default_logical_input(),
            &mut rng,
        )
        .unwrap();
        let expect = 1.0 - est.q_hat;
        assert!(
            (discard - expect).abs() < five_sigma(expect, 4096) + 0.01,
            "discard {discard} vs {expect}"
        );
        // Post-decode errors stay far below the per-qubit disturbance
        // scale chi^2.
        let (mut sifted, mut wrong) = (0usize, 0usize);
        for rec in &transcript.positions {
            if rec.sifted {
                sifted += 1;
                if rec.error == Some(true) {
                    wrong += 1;
                }
            }
        }
        let rate = wrong as f64 / sifted as f64;
        assert!(rate < chi * chi, "rate {rate}");
        assert!(qec_qpa_session(&cfg, 4).is_err());
    }

    #[test]
    fn transcripts_are_reproducible() {
        let mut cfg = config(512, 77);
        cfg.eve = EveModel::InterceptResend { eta: 0.3 };
        let a = run_bb84(&cfg).unwrap();
        let b = run_bb84(&cfg).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        // A different seed changes the transcript.
        cfg.seed = 78;
        let c = run_bb84(&cfg).unwrap();
        assert_ne!(ja, serde_json::to_string(&c).unwrap());
    }

    #[test]
    fn estimation_and_key_material_disjoint() {
        let transcript = run_bb84(&config(1024, 53)).unwrap();
        let est: std::collections::HashSet<usize> = transcript
            .announced
            .estimation_indices
            .iter()
            .copied()
            .collect();
        for idx in &transcript.announced.permutation {
            assert!(!est.contains(idx));
        }
        // Permutation covers only sifted, non-estimation positions.
        for &idx in &transcript.announced.permutation {
            let p = &transcript.positions[idx];
            assert!(p.sifted && !p.estimation);
        }
    }

    #[test]
    fn privacy_amplification_properties() {
        let bits = [1u8, 0, 1, 1, 0, 1, 0, 0];
        // Full-string mask gives the parity bit.
        let full: Vec<usize> = (0..bits.len()).collect();
        let key = privacy_amplify(&bits, &[full]).unwrap();
        assert_eq!(key, vec![0]);
        // Single-bit mask extracts that bit.
        assert_eq!(privacy_amplify(&bits, &[vec![2]]).unwrap(), vec![1]);
        // Linearity over GF(2): key(x ^ y) = key(x) ^ key(y).
        let x = [1u8, 1, 0, 1, 0, 0, 1, 0];
        let y = [0u8, 1, 1, 1, 1, 0, 0, 1];
        let xy: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
        let masks = vec![vec![0, 2, 5], vec![1, 3, 4, 6], vec![7, 0]];
        let kx = privacy_amplify(&x, &masks).unwrap();
        let ky = privacy_amplify(&y, &masks).unwrap();
        let kxy = privacy_amplify(&xy, &masks).unwrap();
        for i in 0..masks.len() {
            assert_eq!(kxy[i], kx[i] ^ ky[i]);
        }
        // Errors.
        assert!(privacy_amplify(&bits, &[vec![]]).is_err());
        assert!(privacy_amplify(&bits, &[vec![99]]).is_err());
    }

    #[test]
    fn insufficient_bits_is_an_error() {
        // 8 qubits cannot fill a 7-bit group after sifting/estimation.
        let result = run_bb84(&config(8, 2));
        assert!(matches!(result, Err(Error::InsufficientBits(_))));
    }

    #[test]
    fn b92_weak_measure_channel_runs() {
        let mut cfg = config(2048, 61);
        cfg.eve = EveModel::ProbeChannel(
            crate::attacks::weak_measure(0.2, MeasureBasis::X).unwrap(),
        );
        let transcript = run_b92(&cfg).unwrap();
        assert!(transcript.summary.sifted_count > 0);
    }
}
