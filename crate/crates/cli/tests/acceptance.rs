//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with the measured numbers. Tolerances are pinned in the
//! assertions.

use std::process::Command;

use qkdlab_core::attacks::{assess, ehpp_attack, weak_measure, weak_swap, MeasureBasis, Scheme};
use qkdlab_core::ecc::{
    audit_conjecture, random_code, BitString, ZeroPattern,
};
use qkdlab_core::hilbert::{PovmElement, StateVector};
use qkdlab_core::info::{bsc_info, TwoStateSource};
use qkdlab_core::linalg::Matrix;
use qkdlab_core::parity::{
    asymptotic_bound, coherent_info, deterministic_info, individual_info, parity_densities,
    ParityModel,
};
use qkdlab_core::protocol::{
    run_b92, run_bb84, run_epr, run_reversed_epr, EveModel, ReversedMode, SessionConfig,
};
use qkdlab_core::qec::{
    classical_correction_stats, classical_reduction_stats, default_logical_input,
    monte_carlo_remainder, RurCode,
};
use qkdlab_core::rng::SeededStreams;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qkdlab"))
}

fn run_cli(args: &[&str]) -> String {
    let output = binary().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "qkdlab {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf8")
}

/// Data rows of a CSV payload (strip comments and the column header).
fn csv_rows(payload: &str) -> Vec<Vec<String>> {
    payload
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn acceptance_01_hamming_h3_coefficient() {
    let start = std::time::Instant::now();
    let out = run_cli(&["ecc-info", "--code", "hamming:3", "--alpha", "0.01"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let i_total: f64 = rows[0][3].parse().unwrap();
    let coeff = i_total / 0.01f64.powi(4);
    assert!(
        (60.0..=61.2).contains(&coeff),
        "I_total/alpha^4 = {coeff} outside [60.0, 61.2]"
    );
    println!(
        "PASS criterion 1: hamming:3 at alpha=0.01 gives I_total/alpha^4 = {coeff:.3} in [60.0, 61.2] ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_02_n2_parity_closed_form() {
    let mut worst = 0.0f64;
    for i in 1..=50 {
        let alpha = std::f64::consts::FRAC_PI_4 * i as f64 / 50.0;
        let model = ParityModel::new(2, TwoStateSource::pure(alpha).unwrap()).unwrap();
        let big_c = (2.0 * alpha).cos();
        let big_s = (2.0 * alpha).sin();
        let expect = 0.5 * (1.0 + big_c * big_c) * bsc_info(big_c * big_c / (1.0 + big_c * big_c)).unwrap()
            + big_s * big_s / 2.0;
        let got = coherent_info(&model);
        worst = worst.max((got - expect).abs());
    }
    assert!(worst < 1e-12, "worst deviation {worst:.3e}");
    println!("PASS criterion 2: n=2 closed form matches over 50 angles (worst |diff| = {worst:.2e})");
}

/// Independent oracle: average the projectors of every code-obeying
/// signal string.
fn dense_code_matrix(code: &qkdlab_core::ecc::ParityCode, alpha: f64, parity: u8) -> Matrix {
    let n = code.n();
    let dim = 1usize << n;
    let (c, s) = (alpha.cos(), alpha.sin());
    let mut m = Matrix::zeros(dim);
    let mut count = 0usize;
    for x in 0..dim as u64 {
        let xs = BitString::new(x, n).unwrap();
        let obeys = code
            .rows()
            .iter()
            .zip(code.values())
            .all(|(row, &v)| xs.and(row).parity() == v)
            && xs.and(&code.target()).parity() == parity;
        if !obeys {
            continue;
        }
        count += 1;
        let amp = |j: u64| {
            let w = j.count_ones() as i32;
            let sign = if (x & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * c.powi(n as i32 - w) * s.powi(w)
        };
        for j in 0..dim as u64 {
            let aj = amp(j);
            for k in 0..dim as u64 {
                m[(j as usize, k as usize)] +=
                    num_complex::Complex64::new(aj * amp(k), 0.0);
            }
        }
    }
    m.scale(num_complex::Complex64::new(1.0 / count as f64, 0.0))
}

#[test]
fn acceptance_03_brute_force_equivalence() {
    let start = std::time::Instant::now();
    // Parity matrices against the string-average oracle.
    let mut worst = 0.0f64;
    for n in 1..=8usize {
        for &(alpha, r_mix) in &[(0.1f64, 0.0f64), (0.45, 0.0), (std::f64::consts::FRAC_PI_4, 0.0), (0.3, 0.05)] {
            let model =
                ParityModel::new(n, TwoStateSource::mixed(alpha, r_mix).unwrap()).unwrap();
            let (r0, r1) = parity_densities(&model).unwrap();
            let (b0, b1) = brute_force_parity(&model);
            worst = worst
                .max(r0.matrix().max_abs_diff(&b0))
                .max(r1.matrix().max_abs_diff(&b1));
        }
    }
    assert!(worst < 1e-12, "parity dense vs brute force: {worst:.3e}");

    // Zero-pattern predictions against dense averages on 50 random codes.
    let mut rng = SeededStreams::new(40_000).stream(0);
    let mut worst_code = 0.0f64;
    for _ in 0..50 {
        let code = random_code(&mut rng, 8);
        let alpha = 0.35f64;
        let pattern = ZeroPattern::new(&code, alpha);
        for parity in [0u8, 1] {
            let dense = dense_code_matrix(&code, alpha, parity);
            let dim = 1usize << code.n();
            for j in 0..dim as u64 {
                for k in 0..dim as u64 {
                    let predicted = pattern.entry(j, k, parity).value();
                    let got = dense[(j as usize, k as usize)].re;
                    worst_code = worst_code.max((predicted - got).abs());
                }
            }
        }
    }
    assert!(worst_code < 1e-12, "zero pattern vs dense: {worst_code:.3e}");
    println!(
        "PASS criterion 3: dense oracles agree (parity {worst:.2e}, codes {worst_code:.2e}) in {:?}",
        start.elapsed()
    );
}

fn brute_force_parity(model: &ParityModel) -> (Matrix, Matrix) {
    let n = model.n;
    let (r0, r1) = model.source.density_pair();
    let dim = 1usize << n;
    let mut m0 = Matrix::zeros(dim);
    let mut m1 = Matrix::zeros(dim);
    for x in 0..(1usize << n) {
        let mut acc = if x & (1 << (n - 1)) == 0 {
            r0.matrix().clone()
        } else {
            r1.matrix().clone()
        };
        for q in 1..n {
            let bit = (x >> (n - 1 - q)) & 1;
            acc = acc.kron(if bit == 0 { r0.matrix() } else { r1.matrix() });
        }
        if (x.count_ones() as usize).is_multiple_of(2) {
            m0 = m0.add(&acc);
        } else {
            m1 = m1.add(&acc);
        }
    }
    let w = num_complex::Complex64::new(1.0 / (dim / 2) as f64, 0.0);
    (m0.scale(w), m1.scale(w))
}

#[test]
fn acceptance_04_ordering_and_bounds() {
    for &alpha in &[0.02f64, 0.05, 0.1] {
        for n in 2..=12usize {
            let model = ParityModel::new(n, TwoStateSource::pure(alpha).unwrap()).unwrap();
            let im = coherent_info(&model);
            let is = individual_info(&model);
            let id = deterministic_info(&model).unwrap();
            let bound = asymptotic_bound(&model).min(1.0);
            assert!(is <= im + 1e-12, "I_S <= I_M at n={n} alpha={alpha}");
            assert!(id <= im + 1e-12, "I_D <= I_M at n={n} alpha={alpha}");
            assert!(im <= bound + 1e-12, "I_M <= bound at n={n} alpha={alpha}");
        }
    }
    let model = ParityModel::new(10, TwoStateSource::pure(0.02).unwrap()).unwrap();
    let ratio = coherent_info(&model).ln() / individual_info(&model).ln();
    assert!(
        (0.45..=0.6).contains(&ratio),
        "log I_M / log I_S = {ratio}"
    );
    println!("PASS criterion 4: information ordering and bounds hold (log ratio {ratio:.4})");
}

#[test]
fn acceptance_05_conjecture_audit() {
    let start = std::time::Instant::now();
    let report = audit_conjecture(9_000, 100, 8, 0.2).unwrap();
    assert_eq!(report.checked, 100, "audit must complete all cases");
    // Emit the report; findings are reported, never asserted away.
    let json = serde_json::to_string_pretty(&report).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("conjecture-audit.json");
    std::fs::write(&path, &json).unwrap();
    for v in &report.violations {
        println!(
            "FINDING: conjecture violated at alpha={} exact={} bound={} code={:?}",
            v.alpha, v.exact, v.bound, v.code
        );
    }
    println!(
        "PASS criterion 5: audit of 100 random codes completed in {:?}; {} violation(s); min margin {:.3e}; report at {}",
        start.elapsed(),
        report.violations.len(),
        report.min_margin,
        path.display()
    );
}

#[test]
fn acceptance_06_attack_closed_forms() {
    // Weak swap on the four-state scheme: p_e = sin^2(gamma/2).
    for &gamma in &[0.1f64, 0.3, 0.7] {
        let a = assess(&weak_swap(gamma).unwrap(), &Scheme::FourState).unwrap();
        assert!(
            (a.error_rate - (gamma / 2.0).sin().powi(2)).abs() < 1e-12,
            "gamma={gamma}"
        );
    }
    // Translucent gate: unitarity and overlap preservation.
    for &(theta, theta_prime) in &[(0.5f64, 0.35f64), (0.3, 0.28)] {
        let attack = ehpp_attack(theta, theta_prime).unwrap();
        let defect = attack
            .joint
            .matrix()
            .adjoint()
            .mul(attack.joint.matrix())
            .max_abs_diff(&Matrix::identity(4));
        assert!(defect < 1e-12);
        let j0 = attack.apply(&StateVector::real_qubit(theta)).unwrap();
        let j1 = attack.apply(&StateVector::real_qubit(-theta)).unwrap();
        assert!((j0.inner(&j1).re - (2.0 * theta).cos()).abs() < 1e-12);
    }
    // Two-state weak swap: Eve's conditioned state matches the symbolic
    // substitution entrywise.
    let (theta, gamma) = (0.5f64, 0.1f64);
    let attack = weak_swap(gamma).unwrap();
    let (ct, st) = (theta.cos(), theta.sin());
    let (cg, sg) = (gamma.cos(), gamma.sin());
    let orth0 = StateVector::normalized(vec![(st).into(), (-ct).into()]).unwrap();
    let orth1 = StateVector::normalized(vec![(st).into(), (ct).into()]).unwrap();
    let announce = PovmElement::from_projector_sum(&[(0.5, orth0), (0.5, orth1)]).unwrap();
    for sign in [1.0f64, -1.0] {
        let joint = attack
            .apply(&StateVector::real_qubit(sign * theta))
            .unwrap();
        let w = joint
            .to_density()
            .conditioned_trace(&[0], &announce)
            .unwrap();
        let expect = [
            st * st * ct * ct * (1.0 + cg * cg),
            sign * ct * st.powi(3) * sg,
            sign * ct * st.powi(3) * sg,
            st.powi(4) * sg * sg,
        ];
        for (i, e) in expect.iter().enumerate() {
            let got = w.entry(i / 2, i % 2).re;
            assert!((got - e).abs() < 1e-12, "entry {i}: {got} vs {e}");
        }
    }
    // Weak measurement, mismatched basis: zero information.
    let a = assess(
        &weak_measure(0.25, MeasureBasis::X).unwrap(),
        &Scheme::FourState,
    )
    .unwrap();
    assert!(a.branches[1].eve_bit_info.abs() < 1e-12);
    println!("PASS criterion 6: gate closed forms reproduced to 1e-12");
}

#[test]
fn acceptance_07_protocol_monte_carlo() {
    let start = std::time::Instant::now();
    // Intercept-resend at full strength: error rate 0.25 over at least
    // 1e5 sifted bits.
    let mut cfg = SessionConfig::new(220_000, 2025).unwrap();
    cfg.eve = EveModel::InterceptResend { eta: 1.0 };
    let transcript = run_bb84(&cfg).unwrap();
    let (mut sifted, mut wrong) = (0usize, 0usize);
    for p in &transcript.positions {
        if p.sifted {
            sifted += 1;
            if p.error == Some(true) {
                wrong += 1;
            }
        }
    }
    assert!(sifted >= 100_000, "need 1e5 sifted bits, got {sifted}");
    let rate = wrong as f64 / sifted as f64;
    let sigma = (0.25f64 * 0.75 / sifted as f64).sqrt();
    assert!((rate - 0.25).abs() <= 5.0 * sigma, "rate {rate}");

    // Honest runs of all four schemes: zero post-sift errors.
    let honest = SessionConfig::new(4096, 99).unwrap();
    let transcripts = vec![
        run_bb84(&honest).unwrap(),
        run_b92(&honest).unwrap(),
        run_epr(&honest).unwrap(),
        run_reversed_epr(&SessionConfig::new(16384, 99).unwrap(), ReversedMode::SingletOnly)
            .unwrap(),
        run_reversed_epr(&SessionConfig::new(4096, 99).unwrap(), ReversedMode::BellOperator)
            .unwrap(),
    ];
    for t in &transcripts {
        assert!(
            t.positions.iter().all(|p| p.error != Some(true)),
            "honest errors in {}",
            t.summary.scheme
        );
        assert!(t.summary.keys_match);
    }

    // Time-reversed usable fractions over 1e5 pairs.
    let pairs = 100_000;
    let singlet = run_reversed_epr(
        &SessionConfig::new(pairs, 7).unwrap(),
        ReversedMode::SingletOnly,
    )
    .unwrap();
    let frac = singlet.summary.sift_fraction;
    let sigma = (0.125f64 * 0.875 / pairs as f64).sqrt();
    assert!((frac - 0.125).abs() <= 5.0 * sigma, "singlet fraction {frac}");
    let bell = run_reversed_epr(
        &SessionConfig::new(pairs, 8).unwrap(),
        ReversedMode::BellOperator,
    )
    .unwrap();
    let frac_bell = bell.summary.sift_fraction;
    let sigma_bell = (0.5f64 * 0.5 / pairs as f64).sqrt();
    assert!(
        (frac_bell - 0.5).abs() <= 5.0 * sigma_bell,
        "bell fraction {frac_bell}"
    );
    println!(
        "PASS criterion 7: intercept-resend rate {rate:.4}, usable fractions {frac:.4}/{frac_bell:.4} ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_08_rur_scaling() {
    let start = std::time::Instant::now();
    let code = RurCode::new(2).unwrap();
    let mut rng = SeededStreams::new(808).stream(0);
    let sweep = monte_carlo_remainder(
        &code,
        &[0.02, 0.04, 0.06, 0.08, 0.1],
        100_000,
        &default_logical_input(),
        &mut rng,
    )
    .unwrap();
    assert!(
        (sweep.p_exponent - 4.0).abs() <= 0.5,
        "P exponent {}",
        sweep.p_exponent
    );
    assert!(
        (sweep.q_exponent - 2.0).abs() <= 0.5,
        "1-Q exponent {}",
        sweep.q_exponent
    );
    println!(
        "PASS criterion 8: fitted exponents P {:.3}, 1-Q {:.3} ({:?})",
        sweep.p_exponent,
        sweep.q_exponent,
        start.elapsed()
    );
}

#[test]
fn acceptance_09_classical_repetition_formulas() {
    let trials = 300_000usize;
    let mut rng = SeededStreams::new(909).stream(0);
    for &p in &[0.01f64, 0.05, 0.1] {
        // Correction: majority vote over 3 bits.
        let expect = classical_correction_stats(3, p).unwrap();
        assert!((expect - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-15);
        let mut fails = 0usize;
        for _ in 0..trials {
            let flips: usize = (0..3).filter(|_| rand::Rng::random_bool(&mut rng, p)).count();
            if flips >= 2 {
                fails += 1;
            }
        }
        let obs = fails as f64 / trials as f64;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((obs - expect).abs() <= 5.0 * sigma.max(1e-7), "correction p={p}");

        // Reduction: unanimous decision over 3 bits.
        let (expect_p, expect_q) = classical_reduction_stats(3, p).unwrap();
        assert!(
            (expect_p - p.powi(3) / (p.powi(3) + (1.0 - p).powi(3))).abs() < 1e-15
        );
        let (mut kept, mut wrong) = (0usize, 0usize);
        for _ in 0..trials {
            let flips: usize = (0..3).filter(|_| rand::Rng::random_bool(&mut rng, p)).count();
            if flips == 0 || flips == 3 {
                kept += 1;
                if flips == 3 {
                    wrong += 1;
                }
            }
        }
        let q_obs = kept as f64 / trials as f64;
        let q_sigma = (expect_q * (1.0 - expect_q) / trials as f64).sqrt();
        assert!((q_obs - expect_q).abs() <= 5.0 * q_sigma, "reduction Q p={p}");
        let p_obs = wrong as f64 / kept as f64;
        let p_sigma = ((expect_p * (1.0 - expect_p)).max(1e-12) / kept as f64).sqrt();
        assert!(
            (p_obs - expect_p).abs() <= 5.0 * p_sigma.max(2e-6),
            "reduction P p={p}: {p_obs} vs {expect_p}"
        );
    }
    println!("PASS criterion 9: repetition formulas agree with Monte Carlo at p = 0.01, 0.05, 0.1");
}

#[test]
fn acceptance_10_cli_determinism() {
    let start = std::time::Instant::now();
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "parity-info",
            "--n",
            "2:10:5",
            "--alpha",
            "log:1e-3:1e-1:7",
            "--seed",
            "5",
        ],
        vec![
            "protocol-sim",
            "--scheme",
            "bb84",
            "--qubits",
            "2048",
            "--eve",
            "intercept:0:1:3",
            "--seed",
            "5",
        ],
        vec![
            "qec-sim",
            "--chi",
            "0.05:0.1:2",
            "--trials",
            "10000",
            "--seed",
            "5",
        ],
    ];
    for case in &cases {
        let mut payloads = Vec::new();
        for workers in ["1", "4"] {
            for _ in 0..2 {
                let mut args = case.clone();
                args.extend(["--workers", workers]);
                payloads.push(run_cli(&args));
            }
        }
        for p in &payloads[1..] {
            assert_eq!(&payloads[0], p, "payload differs for {case:?}");
        }
    }
    println!(
        "PASS criterion 10: seeded CLI runs byte-identical across reruns and worker counts ({:?})",
        start.elapsed()
    );
}
