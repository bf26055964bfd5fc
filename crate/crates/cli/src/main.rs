use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use bbshift::algebra::{build_check_matrices, catalog, catalog_entry, logical_basis, CodeSpec};
use bbshift::circuit::{self, build_experiment, Basis, Circuit, Instruction, Op};
use bbshift::decode::{estimate_circuit_distance, BpSchedule, BpVariant, Decoder, DecoderConfig};
use bbshift::gf2::{BitMatrix, Bits};
use bbshift::harness::{
    curve_to_csv, fit_failure_spectrum, prediction_curve, run_monte_carlo, sample_failure_spectrum, ErrorType,
    FailureSpectrumFit, SpectrumPoint,
};
use bbshift::noise::{annotate_detectors, compile_noisy, count_faults, discover_detectors, DetectorErrorModel, NoiseParams};
use bbshift::schedule::{
    count_boundary_variants, enumerate_candidate_schedules, Boundary, Direction, DirectionConvention, ShiftKind,
};
use bbshift::tableau::{check_codespace_preservation, logical_action_of_shift, run_deterministic};

#[derive(Parser)]
#[command(name = "bbshift", version, about = "Bivariate-bicycle shift circuits: build, verify, decode, estimate")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the built-in codes as JSON specs.
    Catalog,
    /// Enumerate valid syndrome-cycle schedules.
    SearchSchedules {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 7)]
        depth: usize,
        /// Keep schedules whose first X class points this way (e, n, w, s).
        #[arg(long)]
        start_x: Option<String>,
        #[arg(long)]
        start_z: Option<String>,
        /// Interchange the w and s labels.
        #[arg(long)]
        swapped_ws: bool,
    },
    /// Write an experiment circuit in text form.
    EmitCircuit {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Noiseless determinism and codespace checks.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        code: Option<String>,
    },
    /// Logical action of a shift automorphism.
    LogicalAction {
        #[arg(long)]
        code: String,
        #[arg(long)]
        shift: String,
    },
    /// Build a detector error model under SI1000 noise.
    BuildDem {
        /// Circuit text file; otherwise the experiment flags are used.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        exp: OptionalExperiment,
        #[arg(long, default_value_t = 1e-3)]
        p: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decode syndromes (one 0/1 row per shot) into observable predictions.
    Decode {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        syndromes: PathBuf,
        #[command(flatten)]
        dec: DecoderArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Upper bound on the circuit distance.
    Distance {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Direct Monte Carlo estimate of the logical error rate.
    Sample {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ErrorKind::BitFlip)]
        error_type: ErrorKind,
        #[command(flatten)]
        dec: DecoderArgs,
    },
    /// Fixed-weight failure spectrum.
    Spectrum {
        #[arg(long)]
        dem: PathBuf,
        /// Inclusive range `a..b` or comma list.
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        dec: DecoderArgs,
    },
    /// Fit the failure-spectrum ansatz.
    Fit {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        w0: usize,
        #[arg(long)]
        k: usize,
        /// Total fault count N; read from the spectrum file when omitted.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Prediction curve as CSV.
    Predict {
        #[arg(long)]
        fit: PathBuf,
        /// `lo:hi:steps`
        #[arg(long)]
        p_range: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    #[arg(long)]
    code: String,
    #[arg(long, value_enum, default_value_t = InstructionKind::Memory)]
    instruction: InstructionKind,
    /// Shift monomial (x, y, x^2y^-1, ...) or kind such as A21 / B32.
    #[arg(long)]
    shift: Option<String>,
    #[arg(long, default_value_t = 6)]
    rounds: usize,
    #[arg(long, default_value = "z")]
    basis: String,
}

#[derive(Args, Clone)]
struct OptionalExperiment {
    #[arg(long)]
    code: Option<String>,
    #[arg(long, value_enum, default_value_t = InstructionKind::Memory)]
    instruction: InstructionKind,
    #[arg(long)]
    shift: Option<String>,
    #[arg(long, default_value_t = 6)]
    rounds: usize,
    #[arg(long, default_value = "z")]
    basis: String,
}

#[derive(Args, Clone)]
struct DecoderArgs {
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 20)]
    osd_order: usize,
    /// Min-sum with this scale instead of product-sum.
    #[arg(long)]
    min_sum: Option<f64>,
    #[arg(long)]
    serial: bool,
}

impl DecoderArgs {
    fn config(&self) -> DecoderConfig {
        DecoderConfig {
            max_iterations: self.max_iterations,
            osd_order: self.osd_order,
            bp_variant: self.min_sum.map_or(BpVariant::ProductSum, |scale| BpVariant::MinSum { scale }),
            schedule: if self.serial { BpSchedule::Serial } else { BpSchedule::Parallel },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InstructionKind {
    Memory,
    SwapShift,
    ShiftCircuit,
    SteppingShift,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorKind {
    BitFlip,
    PhaseFlip,
}

fn code(name: &str) -> Result<CodeSpec> {
    if Path::new(name).exists() {
        let text = fs::read_to_string(name)?;
        return serde_json::from_str(&text).with_context(|| format!("parsing code spec {name}"));
    }
    Ok(catalog_entry(name)?.spec)
}

fn parse_kind(spec: &CodeSpec, s: &str) -> Result<ShiftKind> {
    let t = s.trim();
    let b = t.as_bytes();
    if b.len() == 3 && (b[0] == b'A' || b[0] == b'B') && b[1].is_ascii_digit() && b[2].is_ascii_digit() {
        let (i, j) = ((b[1] - b'0') as usize, (b[2] - b'0') as usize);
        let k = if b[0] == b'A' { ShiftKind::AType(i, j) } else { ShiftKind::BType(i, j) };
        k.validate()?;
        return Ok(k);
    }
    let m = spec.params.parse_monomial(t).ok_or_else(|| anyhow!("cannot parse shift {t:?}"))?;
    ShiftKind::realizing(spec, m)
        .into_iter()
        .next()
        .ok_or_else(|| anyhow!("{t} is not of the form A_i Ā_j or B_i B̄_j for {}", spec.name))
}

fn experiment(spec: &CodeSpec, kind: InstructionKind, shift: Option<&str>, rounds: usize, basis: &str) -> Result<Circuit> {
    let basis = Basis::parse(basis).ok_or_else(|| anyhow!("basis must be z or x"))?;
    let need = || -> Result<ShiftKind> { parse_kind(spec, shift.ok_or_else(|| anyhow!("--shift is required"))?) };
    let instr = match kind {
        InstructionKind::Memory => Instruction::Memory,
        InstructionKind::SwapShift => Instruction::SwapShift(need()?),
        InstructionKind::ShiftCircuit => Instruction::ShiftCircuit(need()?),
        InstructionKind::SteppingShift => Instruction::SteppingShift(need()?),
    };
    Ok(build_experiment(spec, instr, rounds, basis)?)
}

/// Stdout writer that treats a closed pipe as success.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit_json(v: &impl Serialize) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => emit(text),
    }
}

/// Ops strictly between the noisy markers, annotations dropped.
fn noisy_segment(c: &Circuit) -> Circuit {
    let mut b = Circuit::new(c.num_qubits);
    let mut inside = false;
    for op in &c.without_annotations().ops {
        match op {
            Op::NoisyBegin => inside = true,
            Op::NoisyEnd => inside = false,
            _ if inside => b.ops.push(op.clone()),
            _ => {}
        }
    }
    b
}

fn report(inputs: Value, result: impl Serialize) -> Result<()> {
    let v = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "result": result,
    });
    emit_json(&v)
}

fn read_dem(path: &Path) -> Result<DetectorErrorModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(DetectorErrorModel::parse(&text)?)
}

fn matrix_json(m: &BitMatrix) -> Vec<Vec<u8>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m.get(r, c) as u8).collect()).collect()
}

fn parse_weights(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse()?;
        let b: usize = b.trim().trim_start_matches('=').parse()?;
        if b < a {
            bail!("empty weight range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(Into::into)).collect()
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Catalog => {
            let entries: Vec<Value> = catalog()
                .into_iter()
                .map(|e| json!({"spec": e.spec, "n": e.n, "k": e.k, "d": e.d, "d_circ": e.d_circ, "aliases": e.aliases}))
                .collect();
            emit_json(&entries)?;
        }
        Cmd::SearchSchedules { code: name, depth, start_x, start_z, swapped_ws } => {
            let spec = code(&name)?;
            let conv = if swapped_ws { DirectionConvention::SwappedWS } else { DirectionConvention::Standard };
            let mut found: Vec<_> = enumerate_candidate_schedules(&spec, depth)
                .into_iter()
                .filter(|s| circuit::schedule_measures_checks(&spec, s))
                .collect();
            if start_x.is_some() || start_z.is_some() {
                let dir = |s: &Option<String>| -> Result<Option<Direction>> {
                    s.as_deref().map(|d| Direction::parse(d).ok_or_else(|| anyhow!("unknown direction {d}"))).transpose()
                };
                let (dx, dz) = (dir(&start_x)?, dir(&start_z)?);
                found.retain(|s| {
                    let one = std::slice::from_ref(s);
                    Direction::LOCAL.iter().any(|&x| {
                        Direction::LOCAL.iter().any(|&z| {
                            dx.is_none_or(|d| d == x)
                                && dz.is_none_or(|d| d == z)
                                && count_boundary_variants(&spec, one, x, z, Boundary::Start, conv) == 1
                        })
                    })
                });
            }
            emit_json(&found)?;
        }
        Cmd::EmitCircuit { exp, output } => {
            let spec = code(&exp.code)?;
            let c = experiment(&spec, exp.instruction, exp.shift.as_deref(), exp.rounds, &exp.basis)?;
            let c = annotate_detectors(&c, Some(&spec))?;
            write_out(output.as_ref(), &circuit::serialize(&c))?;
        }
        Cmd::Verify { circuit: path, code: name } => {
            let c = circuit::parse(&fs::read_to_string(&path)?)?;
            let recs = run_deterministic(&c.without_annotations());
            let dets = c.detectors();
            let det_ok = dets.iter().chain(c.observables().iter()).all(|ms| {
                let mut acc = Bits::zeros(recs.first().map_or(1, |r| r.expr.len()));
                for &m in ms {
                    acc.xor_assign(&recs[m].expr);
                }
                acc.set(0, false);
                acc.is_zero()
            });
            let deterministic = det_ok && (!dets.is_empty() || discover_detectors(&c, None).is_ok());
            let codespace = match name {
                Some(n) => {
                    let has_markers = c.ops.iter().any(|op| matches!(op, Op::NoisyBegin));
                    let block = if has_markers { noisy_segment(&c) } else { c.without_annotations() };
                    // Text circuits carry no frame: accept any translation.
                    let spec = code(&n)?;
                    let ok = spec.params.elements().any(|f| {
                        let mut b = block.clone();
                        b.frame = f;
                        check_codespace_preservation(&spec, &b)
                    });
                    Some(ok)
                }
                None => None,
            };
            emit_json(&json!({"deterministic": deterministic, "codespace_preserved": codespace}))?;
        }
        Cmd::LogicalAction { code: name, shift } => {
            let spec = code(&name)?;
            let s = spec.params.parse_monomial(&shift).ok_or_else(|| anyhow!("cannot parse shift {shift:?}"))?;
            let basis = logical_basis(&build_check_matrices(&spec)?);
            let act = logical_action_of_shift(&spec, &basis, s);
            emit_json(&json!({
                "code": spec.name,
                "shift": spec.params.format(s),
                "a_z": matrix_json(&act.a_z),
                "a_x": matrix_json(&act.a_x),
                "symplectic": act.is_symplectic(),
            }))?;
        }
        Cmd::BuildDem { circuit: path, exp, p, output } => {
            let spec = exp.code.as_deref().map(code).transpose()?;
            let c = match (&path, &spec) {
                (Some(f), _) => circuit::parse(&fs::read_to_string(f)?)?,
                (None, Some(s)) => experiment(s, exp.instruction, exp.shift.as_deref(), exp.rounds, &exp.basis)?,
                (None, None) => bail!("give --circuit FILE or --code NAME"),
            };
            let (noisy, dem) = compile_noisy(spec.as_ref(), &c, &NoiseParams::si1000(p))?;
            let counts = count_faults(&noisy, p);
            eprintln!(
                "{} detectors, {} observables, {} mechanisms; fault counts: {} components, {:.0} weighted, {:.0} gate+measure",
                dem.num_detectors,
                dem.num_observables,
                dem.num_mechanisms(),
                counts.components,
                counts.weighted,
                counts.gate_and_measure
            );
            write_out(output.as_ref(), &dem.to_text())?;
        }
        Cmd::Decode { dem, syndromes, dec, output } => {
            let dem = read_dem(&dem)?;
            let d = Decoder::new(&dem, dec.config())?;
            let mut out = String::new();
            for (ln, line) in fs::read_to_string(&syndromes)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                if line.len() != dem.num_detectors {
                    bail!("line {}: {} bits, expected {}", ln + 1, line.len(), dem.num_detectors);
                }
                let mut s = Bits::zeros(dem.num_detectors);
                for (k, ch) in line.chars().enumerate() {
                    match ch {
                        '1' => s.set(k, true),
                        '0' => {}
                        _ => bail!("line {}: unexpected {ch:?}", ln + 1),
                    }
                }
                let r = d.decode(&s)?;
                out.extend((0..dem.num_observables).map(|k| if r.observable_flips.get(k) { '1' } else { '0' }));
                out.push('\n');
            }
            write_out(output.as_ref(), &out)?;
        }
        Cmd::Distance { dem: path, trials, seed } => {
            let dem = read_dem(&path)?;
            let est = estimate_circuit_distance(&dem, &DecoderConfig::default(), trials, seed)?;
            report(
                json!({"dem": path, "trials": trials, "seed": seed}),
                json!({"upper_bound": est.upper_bound, "observable": est.observable, "witness": est.witness}),
            )?;
        }
        Cmd::Sample { dem: path, shots, seed, error_type, dec } => {
            let dem = read_dem(&path)?;
            let et = match error_type {
                ErrorKind::BitFlip => ErrorType::BitFlip,
                ErrorKind::PhaseFlip => ErrorType::PhaseFlip,
            };
            let cfg = dec.config();
            let r = run_monte_carlo(&dem, &cfg, shots, seed, et)?;
            report(json!({"dem": path, "shots": shots, "seed": seed, "decoder": cfg}), r)?;
        }
        Cmd::Spectrum { dem: path, weights, samples, seed, dec } => {
            let dem = read_dem(&path)?;
            let ws = parse_weights(&weights)?;
            let cfg = dec.config();
            let pts = sample_failure_spectrum(&dem, &cfg, &ws, samples, seed)?;
            let n = bbshift::harness::FaultUnits::of(&dem).total;
            report(
                json!({"dem": path, "weights": ws, "samples": samples, "seed": seed, "decoder": cfg, "n_faults": n}),
                pts,
            )?;
        }
        Cmd::Fit { spectrum, w0, k, n } => {
            let v: Value = serde_json::from_str(&fs::read_to_string(&spectrum)?)?;
            let pts: Vec<SpectrumPoint> = serde_json::from_value(v.get("result").cloned().unwrap_or(v.clone()))?;
            let n = match n {
                Some(n) => n,
                None => v
                    .pointer("/inputs/n_faults")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| anyhow!("spectrum file has no n_faults; pass --n"))?,
            };
            let fit = fit_failure_spectrum(&pts, w0, k, n)?;
            report(json!({"spectrum": spectrum, "w0": w0, "k": k, "n": n, "ln_f0": fit.ln_f0()}), fit)?;
        }
        Cmd::Predict { fit, p_range, output } => {
            let v: Value = serde_json::from_str(&fs::read_to_string(&fit)?)?;
            let fit: FailureSpectrumFit = serde_json::from_value(v.get("result").cloned().unwrap_or(v))?;
            let parts: Vec<&str> = p_range.split(':').collect();
            let [lo, hi, steps] = parts[..] else { bail!("--p-range must be lo:hi:steps") };
            let curve = prediction_curve(&fit, lo.parse()?, hi.parse()?, steps.parse()?);
            write_out(output.as_ref(), &curve_to_csv(&curve))?;
        }
    }
    Ok(())
}
