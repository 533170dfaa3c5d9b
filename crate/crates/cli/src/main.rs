//! Command-line surface of the key-distribution laboratory: parameter
//! sweeps over the information measures, attack curves, Monte Carlo
//! protocol sessions, and error-reduction scaling fits, all emitted as
//! CSV or JSON with a reproducibility header.

mod output;
mod sweep;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use output::{parallel_map_ordered, render_csv, render_json, write_artifact, Cell, Meta, Table};
use qkdlab_core::attacks::{
    bound_curve, ehpp_attack, weak_measure, weak_swap, AttackFamily, MeasureBasis, Scheme,
};
use qkdlab_core::ecc::{
    exact_total_info, hamming_code, security_bound, sum_bound, ParityCode, SumBoundMode,
};
use qkdlab_core::info::TwoStateSource;
use qkdlab_core::parity::{
    asymptotic_bound, coherent_info, deterministic_info, individual_info, ParityModel,
};
use qkdlab_core::protocol::{
    qec_qpa_session, run_b92, run_bb84, run_epr, run_reversed_epr, EveModel, ReversedMode,
    SessionConfig, SessionTranscript,
};
use qkdlab_core::qec::{
    default_logical_input, fit_log_log_slope, remainder_error_estimate, BoundedNoise,
    RurCode,
};
use qkdlab_core::rng::SeededStreams;

#[derive(Parser)]
#[command(
    name = "qkdlab",
    version,
    about = "Numerical laboratory for key-distribution security analysis"
)]
struct Cli {
    /// Output file. Defaults to $QKDLAB_OUT/<subcommand>.<ext> when the
    /// variable is set, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed recorded in the artifact header and driving all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Interpret angular inputs (alpha, theta, chi, gate parameters) as
    /// degrees.
    #[arg(long, global = true)]
    degrees: bool,

    /// Worker threads for sweeps; the output is identical for any count.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parity-bit information measures over an (n, alpha) grid.
    ParityInfo {
        /// String length sweep (integer), e.g. "2:12:6".
        #[arg(long)]
        n: String,
        /// Signal half-angle sweep, e.g. "0.01:0.2:20" or "log:...".
        #[arg(long)]
        alpha: String,
        /// Off-diagonal reduction of a mixed source (0 = pure).
        #[arg(long, default_value_t = 0.0)]
        mix: f64,
        #[arg(long, value_enum, default_value_t = ParityMode::All)]
        mode: ParityMode,
    },
    /// Code-conditioned information for an announced parity code.
    EccInfo {
        /// "hamming:R" or a path to a code JSON file.
        #[arg(long)]
        code: String,
        #[arg(long)]
        alpha: String,
    },
    /// Information-vs-disturbance bound curve for a gate attack.
    AttackCurve {
        /// four-state | two-state
        #[arg(long)]
        scheme: String,
        /// weak-swap | weak-measure | ehpp
        #[arg(long)]
        attack: String,
        /// Length of the string whose parity is the final key.
        #[arg(long)]
        n: usize,
        /// Error-rate sweep.
        #[arg(long)]
        pe: String,
        /// Two-state signal angle.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Monte Carlo protocol sessions; sweeps run one session per grid
    /// point with consecutive seeds.
    ProtocolSim {
        /// bb84 | b92 | epr | reversed-epr-singlet | reversed-epr-bell |
        /// qec-bb84
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        qubits: usize,
        /// none | intercept:S | weak-swap:S | weak-measure:S | ehpp:S
        /// where S may be a sweep.
        #[arg(long, default_value = "none")]
        eve: String,
        #[arg(long)]
        theta: Option<f64>,
        /// Per-qubit depolarizing probability.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.25)]
        estimation_fraction: f64,
        /// Bounded-noise angle for qec-bb84.
        #[arg(long, default_value_t = 0.0)]
        chi: f64,
        /// Inner repetition length for qec-bb84.
        #[arg(long, default_value_t = 2)]
        rur_n: usize,
        /// Also write a JSON-lines transcript (single-point runs only).
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Error-reduction Monte Carlo sweep with scaling fits.
    QecSim {
        #[arg(long, default_value_t = 2)]
        rur_n: usize,
        /// Angle-bound sweep, e.g. "0.02:0.1:5".
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Half-angle of the logical input state.
        #[arg(long)]
        logical_angle: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ParityMode {
    All,
    Coherent,
    Individual,
    Deterministic,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let to_radians = if cli.degrees {
        std::f64::consts::PI / 180.0
    } else {
        1.0
    };
    let (meta, table, subcommand) = match &cli.command {
        Command::ParityInfo { n, alpha, mix, mode } => {
            let table = cmd_parity_info(&cli, n, alpha, *mix, *mode, to_radians)?;
            let meta = Meta {
                subcommand: "parity-info".into(),
                params: vec![
                    ("n".into(), n.clone()),
                    ("alpha".into(), alpha.clone()),
                    ("mix".into(), mix.to_string()),
                    ("mode".into(), format!("{:?}", mode).to_lowercase()),
                    ("degrees".into(), cli.degrees.to_string()),
                ],
                seed: cli.seed,
            };
            (meta, table, "parity-info")
        }
        Command::EccInfo { code, alpha } => {
            let table = cmd_ecc_info(&cli, code, alpha, to_radians)?;
            let meta = Meta {
                subcommand: "ecc-info".into(),
                params: vec![
                    ("code".into(), code.clone()),
                    ("alpha".into(), alpha.clone()),
                    ("degrees".into(), cli.degrees.to_string()),
                ],
                seed: cli.seed,
            };
            (meta, table, "ecc-info")
        }
        Command::AttackCurve {
            scheme,
            attack,
            n,
            pe,
            theta,
        } => {
            let table = cmd_attack_curve(&cli, scheme, attack, *n, pe, *theta, to_radians)?;
            let meta = Meta {
                subcommand: "attack-curve".into(),
                params: vec![
                    ("scheme".into(), scheme.clone()),
                    ("attack".into(), attack.clone()),
                    ("n".into(), n.to_string()),
                    ("pe".into(), pe.clone()),
                    ("theta".into(), theta.map_or("default".into(), |t| t.to_string())),
                    ("degrees".into(), cli.degrees.to_string()),
                ],
                seed: cli.seed,
            };
            (meta, table, "attack-curve")
        }
        Command::ProtocolSim {
            scheme,
            qubits,
            eve,
            theta,
            noise,
            estimation_fraction,
            chi,
            rur_n,
            transcript,
        } => {
            let table = cmd_protocol_sim(
                &cli,
                scheme,
                *qubits,
                eve,
                *theta,
                *noise,
                *estimation_fraction,
                *chi,
                *rur_n,
                transcript,
                to_radians,
            )?;
            let meta = Meta {
                subcommand: "protocol-sim".into(),
                params: vec![
                    ("scheme".into(), scheme.clone()),
                    ("qubits".into(), qubits.to_string()),
                    ("eve".into(), eve.clone()),
                    ("theta".into(), theta.map_or("default".into(), |t| t.to_string())),
                    ("noise".into(), noise.to_string()),
                    ("estimation_fraction".into(), estimation_fraction.to_string()),
                    ("chi".into(), chi.to_string()),
                    ("rur_n".into(), rur_n.to_string()),
                    ("degrees".into(), cli.degrees.to_string()),
                ],
                seed: cli.seed,
            };
            (meta, table, "protocol-sim")
        }
        Command::QecSim {
            rur_n,
            chi,
            trials,
            logical_angle,
        } => {
            let table = cmd_qec_sim(&cli, *rur_n, chi, *trials, *logical_angle, to_radians)?;
            let meta = Meta {
                subcommand: "qec-sim".into(),
                params: vec![
                    ("rur_n".into(), rur_n.to_string()),
                    ("chi".into(), chi.clone()),
                    ("trials".into(), trials.to_string()),
                    (
                        "logical_angle".into(),
                        logical_angle.map_or("default".into(), |a| a.to_string()),
                    ),
                    ("degrees".into(), cli.degrees.to_string()),
                ],
                seed: cli.seed,
            };
            (meta, table, "qec-sim")
        }
    };
    let (content, ext) = match cli.format {
        Format::Csv => (render_csv(&meta, &table), "csv"),
        Format::Json => (render_json(&meta, &table), "json"),
    };
    write_artifact(&cli.out, subcommand, ext, &content)
}

fn cmd_parity_info(
    cli: &Cli,
    n_spec: &str,
    alpha_spec: &str,
    mix: f64,
    mode: ParityMode,
    to_radians: f64,
) -> Result<Table> {
    let ns = sweep::parse_int_sweep(n_spec)?;
    let alphas: Vec<f64> = sweep::parse_sweep(alpha_spec)?
        .into_iter()
        .map(|a| a * to_radians)
        .collect();
    if mix > 0.0 && mode == ParityMode::Deterministic {
        bail!("deterministic information is defined for pure sources only");
    }
    let grid: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| alphas.iter().map(move |&a| (n, a)))
        .collect();
    let rows = parallel_map_ordered(&grid, cli.workers, |_, &(n, alpha)| -> Result<Vec<Cell>> {
        let source = TwoStateSource::mixed(alpha, mix)?;
        let model = ParityModel::new(n, source)?;
        let mut row = vec![
            Cell::Int(n as i64),
            Cell::Float(alpha),
            Cell::Float(mix),
        ];
        row.push(match mode {
            ParityMode::All | ParityMode::Coherent => Cell::Float(coherent_info(&model)),
            _ => Cell::Empty,
        });
        row.push(match mode {
            ParityMode::All | ParityMode::Individual => Cell::Float(individual_info(&model)),
            _ => Cell::Empty,
        });
        row.push(match mode {
            ParityMode::All | ParityMode::Deterministic if mix == 0.0 => {
                Cell::Float(deterministic_info(&model)?)
            }
            _ => Cell::Empty,
        });
        row.push(if mix == 0.0 {
            Cell::Float(asymptotic_bound(&model))
        } else {
            Cell::Empty
        });
        Ok(row)
    });
    let mut table = Table::new(vec![
        "n",
        "alpha",
        "mix",
        "i_coherent",
        "i_individual",
        "i_deterministic",
        "asymptotic_bound",
    ]);
    for row in rows {
        table.rows.push(row?);
    }
    Ok(table)
}

fn load_code(spec: &str) -> Result<ParityCode> {
    if let Some(r) = spec.strip_prefix("hamming:") {
        let r: usize = r.parse().with_context(|| format!("invalid rank {r:?}"))?;
        return Ok(hamming_code(r)?);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    Ok(ParityCode::from_json(&text)?)
}

fn cmd_ecc_info(cli: &Cli, code_spec: &str, alpha_spec: &str, to_radians: f64) -> Result<Table> {
    let code = load_code(code_spec)?;
    let alphas: Vec<f64> = sweep::parse_sweep(alpha_spec)?
        .into_iter()
        .map(|a| a * to_radians)
        .collect();
    let rows = parallel_map_ordered(&alphas, cli.workers, |_, &alpha| -> Result<Vec<Cell>> {
        Ok(vec![
            Cell::Int(code.n() as i64),
            Cell::Int(code.r() as i64),
            Cell::Float(alpha),
            Cell::Float(exact_total_info(&code, alpha)?),
            Cell::Float(sum_bound(&code, alpha, SumBoundMode::ExactPerWord)?),
            Cell::Float(sum_bound(&code, alpha, SumBoundMode::LeadingOrder)?),
            Cell::Float(security_bound(code.n(), alpha)),
        ])
    });
    let mut table = Table::new(vec![
        "n",
        "r",
        "alpha",
        "i_total",
        "i_sum_exact",
        "i_sum_leading",
        "security_bound",
    ]);
    for row in rows {
        table.rows.push(row?);
    }
    Ok(table)
}

fn cmd_attack_curve(
    cli: &Cli,
    scheme_spec: &str,
    attack_spec: &str,
    n: usize,
    pe_spec: &str,
    theta: Option<f64>,
    to_radians: f64,
) -> Result<Table> {
    let theta = theta.map(|t| t * to_radians).unwrap_or(0.4);
    let scheme = match scheme_spec {
        "four-state" => Scheme::FourState,
        "two-state" => Scheme::TwoState { theta },
        other => bail!("unknown scheme {other:?} (four-state | two-state)"),
    };
    let family = match attack_spec {
        "weak-swap" => AttackFamily::WeakSwap,
        "weak-measure" => AttackFamily::WeakMeasure,
        "ehpp" => AttackFamily::Ehpp,
        other => bail!("unknown attack {other:?} (weak-swap | weak-measure | ehpp)"),
    };
    let grid = sweep::parse_sweep(pe_spec)?;
    let points = bound_curve(family, &scheme, n, &grid)?;
    let mut table = Table::new(vec![
        "scheme", "attack", "n", "p_e", "parameter", "beta", "bound",
    ]);
    let _ = cli;
    for pt in points {
        table.rows.push(vec![
            Cell::Text(scheme.label()),
            Cell::Text(family.label().to_string()),
            Cell::Int(n as i64),
            Cell::Float(pt.p_e),
            Cell::Float(pt.parameter),
            Cell::Float(pt.beta),
            Cell::Float(pt.bound),
        ]);
    }
    Ok(table)
}

/// Eavesdropper specification: model name plus an optional swept
/// parameter.
fn parse_eve_spec(spec: &str, to_radians: f64) -> Result<(String, Vec<f64>)> {
    if spec == "none" {
        return Ok(("none".into(), vec![0.0]));
    }
    let (name, value) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("eve spec {spec:?} needs a parameter, e.g. intercept:0.5"))?;
    let mut values = sweep::parse_sweep(value)?;
    if name != "intercept" {
        for v in &mut values {
            *v *= to_radians;
        }
    }
    Ok((name.into(), values))
}

fn build_eve(name: &str, value: f64, theta: f64) -> Result<EveModel> {
    Ok(match name {
        "none" => EveModel::None,
        "intercept" => EveModel::InterceptResend { eta: value },
        "weak-swap" => EveModel::ProbeChannel(weak_swap(value)?),
        "weak-measure" => EveModel::ProbeChannel(weak_measure(value, MeasureBasis::X)?),
        "ehpp" => EveModel::ProbeChannel(ehpp_attack(theta, value)?),
        other => bail!("unknown eavesdropper {other:?}"),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_protocol_sim(
    cli: &Cli,
    scheme: &str,
    qubits: usize,
    eve_spec: &str,
    theta: Option<f64>,
    noise: f64,
    estimation_fraction: f64,
    chi: f64,
    rur_n: usize,
    transcript_path: &Option<PathBuf>,
    to_radians: f64,
) -> Result<Table> {
    let theta = theta.map(|t| t * to_radians).unwrap_or(0.4);
    let chi = chi * to_radians;
    let (eve_name, eve_values) = parse_eve_spec(eve_spec, to_radians)?;
    let run_point = |i: usize, &value: &f64| -> Result<SessionTranscript> {
        let mut config = SessionConfig::new(qubits, cli.seed.wrapping_add(i as u64))?;
        config.theta = theta;
        config.depolarizing = noise;
        config.estimation_fraction = estimation_fraction;
        config.coded_noise = chi;
        config.eve = build_eve(&eve_name, value, theta)?;
        Ok(match scheme {
            "bb84" => run_bb84(&config)?,
            "b92" => run_b92(&config)?,
            "epr" => run_epr(&config)?,
            "reversed-epr-singlet" => run_reversed_epr(&config, ReversedMode::SingletOnly)?,
            "reversed-epr-bell" => run_reversed_epr(&config, ReversedMode::BellOperator)?,
            "qec-bb84" => qec_qpa_session(&config, rur_n)?,
            other => bail!("unknown scheme {other:?}"),
        })
    };
    let transcripts = parallel_map_ordered(&eve_values, cli.workers, run_point);
    let mut table = Table::new(vec![
        "scheme",
        "param",
        "p_e_observed",
        "sift_fraction",
        "key_len",
        "eve_bound",
    ]);
    let mut collected = Vec::new();
    for t in transcripts {
        collected.push(t?);
    }
    for (value, t) in eve_values.iter().zip(&collected) {
        let s = &t.summary;
        table.rows.push(vec![
            Cell::Text(s.scheme.clone()),
            Cell::Float(*value),
            Cell::Float(s.observed_error_rate),
            Cell::Float(s.sift_fraction),
            Cell::Int(s.corrected_length as i64),
            match s.eve_info_bound {
                Some(b) => Cell::Float(b),
                None => Cell::Empty,
            },
        ]);
    }
    if let Some(path) = transcript_path {
        if collected.len() != 1 {
            bail!("--transcript requires a single-point run, got {} points", collected.len());
        }
        let mut buf = Vec::new();
        collected[0].write_json_lines(&mut buf)?;
        std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote transcript {}", path.display());
    }
    Ok(table)
}

fn cmd_qec_sim(
    cli: &Cli,
    rur_n: usize,
    chi_spec: &str,
    trials: usize,
    logical_angle: Option<f64>,
    to_radians: f64,
) -> Result<Table> {
    if trials < 10_000 {
        bail!("meaningful estimates need at least 10000 trials per point, got {trials}");
    }
    let code = RurCode::new(rur_n)?;
    let chis: Vec<f64> = sweep::parse_sweep(chi_spec)?
        .into_iter()
        .map(|c| c * to_radians)
        .collect();
    let logical = match logical_angle {
        Some(a) => qkdlab_core::hilbert::StateVector::real_qubit(a * to_radians),
        None => default_logical_input(),
    };
    let streams = SeededStreams::new(cli.seed);
    let estimates = parallel_map_ordered(&chis, cli.workers, |i, &chi| {
        let noise = BoundedNoise::new(chi)?;
        let mut rng = streams.stream(i as u64);
        remainder_error_estimate(
            &code, &noise, trials, &logical, &mut rng,
        )
    });
    let mut table = Table::new(vec![
        "chi",
        "trials",
        "p_hat",
        "q_hat",
        "p_stderr",
        "q_stderr",
        "p_classical",
        "q_classical",
    ]);
    let mut fit_points = Vec::new();
    for est in estimates {
        let est = est?;
        // Classical analog: the repetition code of the inner length at
        // the per-qubit flip probability of the same disturbance,
        // E[sin^2 t] over t uniform in [-chi, chi].
        let p_single = if est.chi == 0.0 {
            0.0
        } else {
            0.5 - (2.0 * est.chi).sin() / (4.0 * est.chi)
        };
        let (p_classical, q_classical) =
            qkdlab_core::qec::classical_reduction_stats(rur_n.max(2), p_single)?;
        if est.chi > 0.0 {
            fit_points.push((est.chi, est.p_hat, est.q_hat));
        }
        table.rows.push(vec![
            Cell::Float(est.chi),
            Cell::Int(est.trials as i64),
            Cell::Float(est.p_hat),
            Cell::Float(est.q_hat),
            Cell::Float(est.p_stderr),
            Cell::Float(est.q_stderr),
            Cell::Float(p_classical),
            Cell::Float(q_classical),
        ]);
    }
    if fit_points.len() >= 2 {
        let p_exp = fit_log_log_slope(fit_points.iter().map(|&(c, p, _)| (c, p)))?;
        let q_exp = fit_log_log_slope(fit_points.iter().map(|&(c, _, q)| (c, 1.0 - q)))?;
        table
            .trailing
            .push(("fit_p_exponent".into(), format!("{p_exp:.6}")));
        table
            .trailing
            .push(("fit_q_exponent".into(), format!("{q_exp:.6}")));
    }
    Ok(table)
}
