//! Acceptance suite. Prints one `criterion N: PASS|FAIL ...` line per
//! criterion. Criteria 1-5 and 10 are correctness properties and make the
//! run fail; 6-9 compare against reference figures and only report.
//!
//! `BBSHIFT_CRITERIA=1,3,7` runs a subset.

use std::time::{Duration, Instant};

use bbshift::algebra::{
    build_check_matrices, catalog, catalog_entry, catalog_lookup, estimate_code_distance, logical_basis,
    logical_dimension, CodeSpec, DistanceEffort, Monomial, Poly, Role,
};
use bbshift::circuit::{
    build_experiment, build_shift_circuit, build_swap_shift_round, build_syndrome_cycle, build_unmerged_shift,
    default_memory_schedule, default_shift_pair, describe_steps, Basis, Circuit, Instruction, StepEntry,
};
use bbshift::decode::{estimate_circuit_distance, Decoder, DecoderConfig};
use bbshift::gf2::BitMatrix;
use bbshift::harness::{
    fit_failure_spectrum, predict_logical_error, predict_with_band, run_monte_carlo, sample_failure_spectrum,
    ErrorType, FailureSpectrumFit, FaultUnits, MonteCarloResult,
};
use bbshift::noise::{annotate_detectors, apply_noise, compile_noisy, count_faults, DetectorErrorModel, FrameProgram, NoiseParams};
use bbshift::schedule::{
    boundary_count_matrix, enumerate_candidate_schedules, reference_memory_schedule, reference_shift_schedule,
    Boundary, DirectionConvention, ShiftKind,
};
use bbshift::tableau::{codespace_report, equivalence_report, extract_logical_action, find_similarity};

const A_TYPE: ShiftKind = ShiftKind::AType(2, 1);
const MC_SHOTS: u64 = 1_000_000;
const SPECTRUM_SAMPLES: u64 = 10_000;
const SPOT_SHOTS: u64 = 10_000;
const DISTANCE_TRIALS: usize = 32;

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: String) -> Verdict {
    Verdict { pass, summary }
}

fn dem(spec: &CodeSpec, instr: Instruction, rounds: usize, p: f64) -> DetectorErrorModel {
    let c = build_experiment(spec, instr, rounds, Basis::Z).expect("experiment");
    compile_noisy(Some(spec), &c, &NoiseParams::si1000(p)).expect("error model").1
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

// ---------------------------------------------------------------- 1

fn code_parameters() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for e in catalog() {
        let cm = build_check_matrices(&e.spec).expect("matrices");
        let (n, k) = (cm.num_data(), logical_dimension(&cm));
        ok &= n == e.n && k == e.k;
        notes.push(format!("{} [[{n},{k}]]", e.spec.name));
    }
    let cm = build_check_matrices(&catalog_lookup("bb-72").unwrap()).unwrap();
    let est = estimate_code_distance(&cm, DistanceEffort { exhaustive_weight: 5, isd_iterations: 2000, seed: 1 }).unwrap();
    let (commute, stabs) = if est.witness_is_z { (&cm.hx, &cm.hz) } else { (&cm.hz, &cm.hx) };
    let witness_ok = est.witness.count_ones() == 6
        && commute.mul_vec(&est.witness).is_zero()
        && !stabs.row_space_contains(&est.witness);
    ok &= est.d_upper == 6 && est.exact && witness_ok && within(t.elapsed(), 600);
    verdict(
        ok,
        format!(
            "{}; bb-72 d={} exhaustive={} weight-6 witness valid={witness_ok}; {:.1?}",
            notes.join(", "),
            est.d_upper,
            est.exact,
            t.elapsed()
        ),
    )
}

// ---------------------------------------------------------------- 2

fn schedule_search() -> Verdict {
    let t = Instant::now();
    let spec = catalog_lookup("gross").unwrap();
    let measures = |s: &bbshift::schedule::Schedule| bbshift::circuit::schedule_measures_checks(&spec, s);
    let depth6 = enumerate_candidate_schedules(&spec, 6).into_iter().filter(|s| measures(s)).count();
    let depth7: Vec<_> = enumerate_candidate_schedules(&spec, 7).into_iter().filter(|s| measures(s)).collect();
    let has_reference = depth7.contains(&reference_memory_schedule());
    let staggered: Vec<_> = depth7.iter().filter(|s| s.is_staggered()).cloned().collect();
    let conv = DirectionConvention::SwappedWS;
    let start = boundary_count_matrix(&spec, &staggered, Boundary::Start, conv);
    let finish = boundary_count_matrix(&spec, &staggered, Boundary::Finish, conv);
    let want = [[72, 4, 4, 0], [4, 72, 0, 4], [4, 0, 72, 4], [0, 4, 4, 72]];
    let ok = depth6 == 0 && has_reference && start == want && finish == want && within(t.elapsed(), 3600);
    verdict(
        ok,
        format!(
            "depth-6 {depth6}; depth-7 {} (staggered {} vs 936); reference ordering found={has_reference}; \
             start counts {start:?}; finish counts {finish:?}; {:.1?}",
            depth7.len(),
            staggered.len(),
            t.elapsed()
        ),
    )
}

// ---------------------------------------------------------------- 3

fn role(s: &str) -> Role {
    match s {
        "R" => Role::R,
        "L" => Role::L,
        "X" => Role::X,
        "Z" => Role::Z,
        _ => panic!("role {s}"),
    }
}

/// `ROLE` or `ROLE:TERM`, TERM one of A1..B3 or Ab1..Bb3 (conjugate).
fn site(spec: &CodeSpec, s: &str) -> (Role, Monomial) {
    match s.split_once(':') {
        None => (role(s), Monomial::IDENTITY),
        Some((r, t)) => {
            let poly = if t.starts_with('A') { Poly::A } else { Poly::B };
            let k: usize = t[t.len() - 1..].parse().unwrap();
            let m = spec.term(poly, k);
            (role(r), if t.contains('b') { spec.params.inv(m) } else { m })
        }
    }
}

fn steps(spec: &CodeSpec, rows: &[&str]) -> Vec<Vec<StepEntry>> {
    rows.iter()
        .map(|row| {
            let mut v: Vec<StepEntry> = row
                .split(',')
                .map(str::trim)
                .map(|e| match e.split_once(' ') {
                    Some((op, r)) => {
                        let b = op.chars().nth(1).unwrap();
                        if op.starts_with('R') {
                            StepEntry::Reset(b, role(r))
                        } else {
                            StepEntry::Measure(b, role(r))
                        }
                    }
                    None => {
                        let (c, t) = e.split_once('>').unwrap();
                        StepEntry::Cnot { control: site(spec, c), target: site(spec, t) }
                    }
                })
                .collect();
            v.sort();
            v
        })
        .collect()
}

const MEMORY_ROWS: [&str; 9] = [
    "RX X, RZ Z",
    "R:Bb3>Z",
    "R:Bb2>Z, X>L:B1",
    "L:Ab3>Z, X>R:A1",
    "L:Ab1>Z, X>R:A3",
    "L:Ab2>Z, X>R:A2",
    "R:Bb1>Z, X>L:B3",
    "X>L:B2",
    "MX X, MZ Z",
];

const A_SHIFT_ROWS: [&str; 19] = [
    "RX X, RZ Z",
    "L:Ab2>Z",
    "L:Ab3>Z, X>R:A1",
    "R:Bb3>Z, X>L:B3",
    "R:Bb1>Z, X>L:B2",
    "R:Bb2>Z, X>L:B1",
    "Z>L:Ab1, X>R:A3",
    "L:Ab1>Z, R:A2>X",
    "X>R:A2",
    "MX R, MZ L",
    "RX R, RZ L",
    "Z>L:Ab2",
    "L:Ab3>Z, R:A1>X",
    "R:Bb3>Z, X>L:B3",
    "R:Bb1>Z, X>L:B2",
    "R:Bb2>Z, X>L:B1",
    "L:Ab1>Z, X>R:A3",
    "X>R:A2",
    "MX X, MZ Z",
];

const B_SHIFT_ROWS: [&str; 19] = [
    "RX X, RZ Z",
    "R:Bb2>Z",
    "R:Bb3>Z, X>L:B1",
    "L:Ab2>Z, X>R:A1",
    "L:Ab1>Z, X>R:A2",
    "L:Ab3>Z, X>R:A3",
    "Z>R:Bb1, X>L:B3",
    "R:Bb1>Z, L:B2>X",
    "X>L:B2",
    "MX L, MZ R",
    "RX L, RZ R",
    "Z>R:Bb2",
    "R:Bb3>Z, L:B1>X",
    "L:Ab2>Z, X>R:A1",
    "L:Ab1>Z, X>R:A2",
    "L:Ab3>Z, X>R:A3",
    "R:Bb1>Z, X>L:B3",
    "X>L:B2",
    "MX X, MZ Z",
];

const NONLOCAL_ROWS: [&str; 19] = [
    "RX X, RZ Z",
    "R:Bb3>Z",
    "R:Bb1>Z, X>L:B2",
    "L:Ab3>Z, X>R:A3",
    "L:Ab2>Z, X>R:A1",
    "L:Ab1>Z, X>R:A2",
    "Z>R:Bb2, X>L:B1",
    "R:Bb2>Z, L:B3>X",
    "X>L:B3",
    "MX L, MZ R",
    "RX L, RZ R",
    "Z>R:Bb3",
    "R:Bb1>Z, L:B2>X",
    "L:Ab3>Z, X>R:A3",
    "L:Ab2>Z, X>R:A1",
    "L:Ab1>Z, X>R:A2",
    "R:Bb2>Z, X>L:B1",
    "X>L:B3",
    "MX X, MZ Z",
];

fn golden_circuits() -> Verdict {
    let spec = catalog_lookup("gross").unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    let memory = build_syndrome_cycle(&spec, &reference_memory_schedule()).unwrap();
    let m_ok = describe_steps(&spec, &memory) == steps(&spec, &MEMORY_ROWS) && memory.timesteps() == 9;
    ok &= m_ok;
    notes.push(format!("memory cycle {} steps match={m_ok}", memory.timesteps()));
    for (name, kind, rows) in [
        ("A-type", A_TYPE, &A_SHIFT_ROWS),
        ("B-type", ShiftKind::BType(2, 1), &B_SHIFT_ROWS),
        ("non-local", ShiftKind::BType(3, 2), &NONLOCAL_ROWS),
    ] {
        let s = reference_shift_schedule(kind).unwrap();
        let c = build_shift_circuit(&spec, kind, &(s.clone(), s)).unwrap();
        let m = describe_steps(&spec, &c) == steps(&spec, rows) && c.timesteps() == 19;
        ok &= m;
        notes.push(format!("{name} shift {} steps match={m}", c.timesteps()));
    }
    let swap = build_swap_shift_round(&spec, A_TYPE, &reference_memory_schedule()).unwrap();
    ok &= swap.timesteps() == 15;
    notes.push(format!("SWAP round {} steps", swap.timesteps()));
    verdict(ok, notes.join("; "))
}

// ---------------------------------------------------------------- 4

fn correctness() -> Verdict {
    let mut ok = true;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut check = |what: String, r: Result<(), String>| {
        checked += 1;
        if let Err(e) = r {
            ok = false;
            failures.push(format!("{what}: {e}"));
        }
    };
    for e in catalog() {
        let spec = &e.spec;
        let name = &spec.name;
        let cycle = bbshift::circuit::build_syndrome_cycle(spec, &default_memory_schedule(spec)).unwrap();
        check(format!("{name} cycle"), codespace_report(spec, &cycle).map_err(|e| e.to_string()));
        let mut kinds = vec![A_TYPE];
        if name == "gross" {
            kinds.extend([ShiftKind::BType(2, 1), ShiftKind::BType(3, 2)]);
        }
        for kind in kinds {
            match default_shift_pair(spec, kind) {
                Ok(pair) => {
                    let c = build_shift_circuit(spec, kind, &pair).unwrap();
                    check(format!("{name} {kind:?} shift"), codespace_report(spec, &c).map_err(|e| e.to_string()));
                }
                Err(e) => check(format!("{name} {kind:?} pair"), Err(e.to_string())),
            }
        }
        let swap = build_swap_shift_round(spec, A_TYPE, &default_memory_schedule(spec)).unwrap();
        check(format!("{name} SWAP round"), codespace_report(spec, &swap).map_err(|e| e.to_string()));
        for instr in [Instruction::Memory, Instruction::ShiftCircuit(A_TYPE), Instruction::SwapShift(A_TYPE)] {
            for basis in [Basis::Z, Basis::X] {
                let c = build_experiment(spec, instr, 2, basis).unwrap();
                let r = annotate_detectors(&c, Some(spec)).map(|_| ()).map_err(|e| e.to_string());
                check(format!("{name} {} {basis:?} determinism", instr.name()), r);
            }
        }
    }
    let spec = catalog_lookup("bb-72").unwrap();
    let pair = default_shift_pair(&spec, A_TYPE).unwrap();
    let merged = build_shift_circuit(&spec, A_TYPE, &pair).unwrap();
    let plain = build_unmerged_shift(&spec, A_TYPE, &pair).unwrap();
    let identity: Vec<usize> = (0..spec.num_qubits()).collect();
    check("bb-72 merged vs SWAP layers + two cycles".into(), equivalence_report(&spec, &merged, &plain, &identity));
    let summary = if failures.is_empty() {
        format!("{checked} checks over all catalog codes; bb-72 merged shift circuit equivalent to SWAP layers plus two cycles")
    } else {
        failures.join("; ")
    };
    verdict(ok, summary)
}

// ---------------------------------------------------------------- 5

const AZ_GROSS: [[u8; 6]; 6] = [
    [0, 1, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 1, 1, 0, 0],
    [1, 1, 0, 1, 1, 0],
    [0, 1, 0, 0, 1, 0],
    [1, 1, 1, 1, 0, 1],
];

const AX_GROSS: [[u8; 6]; 6] = [
    [0, 1, 0, 0, 1, 1],
    [1, 1, 1, 1, 1, 0],
    [1, 1, 0, 1, 1, 1],
    [0, 1, 1, 1, 1, 1],
    [0, 1, 1, 1, 0, 1],
    [1, 1, 1, 1, 1, 1],
];

fn dense(m: &[[u8; 6]; 6]) -> BitMatrix {
    BitMatrix::from_dense(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn logical_action() -> Verdict {
    let t = Instant::now();
    let spec = catalog_lookup("gross").unwrap();
    let shift_is_x = A_TYPE.shift(&spec) == spec.params.x();
    let basis = logical_basis(&build_check_matrices(&spec).unwrap());
    let pair = default_shift_pair(&spec, A_TYPE).unwrap();
    let c: Circuit = build_shift_circuit(&spec, A_TYPE, &pair).unwrap();
    let act = extract_logical_action(&spec, &c, &basis).unwrap();
    let symplectic = act.is_symplectic();
    let order = act.a_z.pow(12).is_identity();
    let (az, ax) = (dense(&AZ_GROSS), dense(&AX_GROSS));
    let sim_z = find_similarity(&act.a_z, &az.direct_sum(&az), 4000, 1).is_some();
    let sim_x = find_similarity(&act.a_x, &ax.direct_sum(&ax), 4000, 2).is_some();
    let ok = shift_is_x && symplectic && order && sim_z && sim_x;
    verdict(
        ok,
        format!(
            "s=x {shift_is_x}; a_x^T a_z = I {symplectic}; a_z^12 = I {order}; similar to reference A_z {sim_z}, A_x {sim_x}; {:.1?}",
            t.elapsed()
        ),
    )
}

// ---------------------------------------------------------------- 6

fn fault_counts() -> Verdict {
    let p = 1e-3;
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, rounds, reference) in [("bb-72", 6, [142560.0, 148716.0, 439956.0]), ("gross", 10, [475200.0, 495720.0, 1466280.0])] {
        let spec = catalog_lookup(name).unwrap();
        let n = |instr| {
            let c = build_experiment(&spec, instr, rounds, Basis::Z).unwrap();
            count_faults(&apply_noise(&c, &NoiseParams::si1000(p)).unwrap(), p)
        };
        let counts = [n(Instruction::Memory), n(Instruction::ShiftCircuit(A_TYPE)), n(Instruction::SwapShift(A_TYPE))];
        let g: Vec<f64> = counts.iter().map(|c| c.gate_and_measure).collect();
        let (r_shift, r_swap) = (g[1] / g[0], g[2] / g[0]);
        ok &= (r_shift - 1.043).abs() <= 0.005 && (r_swap - 3.09).abs() <= 0.05;
        notes.push(format!(
            "{name}: N gate+measure memory/shift/swap {:.0}/{:.0}/{:.0} (reference {:.0}/{:.0}/{:.0}), all-channel {:.0}/{:.0}/{:.0}, \
             shift ratio {r_shift:.4}, swap ratio {r_swap:.3}",
            g[0], g[1], g[2], reference[0], reference[1], reference[2], counts[0].weighted, counts[1].weighted, counts[2].weighted
        ));
    }
    verdict(ok, notes.join("; "))
}

// ---------------------------------------------------------------- 7

fn circuit_distance() -> Verdict {
    let t = Instant::now();
    let cfg = DecoderConfig { max_iterations: 200, osd_order: 60, ..DecoderConfig::sampling() };
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, target) in [("bb-72", 6), ("tt-120", 10), ("gross", 10), ("tt-170", 10)] {
        let spec = catalog_lookup(name).unwrap();
        let rounds = catalog_entry(name).unwrap().d_circ;
        let mut bounds = Vec::new();
        for instr in [Instruction::Memory, Instruction::ShiftCircuit(A_TYPE)] {
            let d = dem(&spec, instr, rounds, 1e-3);
            let est = estimate_circuit_distance(&d, &cfg, DISTANCE_TRIALS, 17).unwrap();
            let dec = Decoder::new(&d, cfg).unwrap();
            let genuine = dec.syndrome_of(&est.witness).is_zero() && !dec.observables_of(&est.witness).is_zero();
            ok &= genuine;
            bounds.push(est.upper_bound);
        }
        ok &= bounds[0] <= target && bounds[1] == bounds[0];
        notes.push(format!("{name} memory <= {} shift <= {} (target <= {target})", bounds[0], bounds[1]));
    }
    ok &= within(t.elapsed(), 7200);
    verdict(ok, format!("{}; {:.1?}", notes.join(", "), t.elapsed()))
}

// ---------------------------------------------------------------- 8

fn suppression_runs() -> Vec<(&'static str, MonteCarloResult, Duration)> {
    let spec = catalog_lookup("bb-72").unwrap();
    let cfg = DecoderConfig::sampling();
    [("memory", Instruction::Memory), ("shift", Instruction::ShiftCircuit(A_TYPE)), ("swap", Instruction::SwapShift(A_TYPE))]
        .into_iter()
        .enumerate()
        .map(|(i, (name, instr))| {
            let t = Instant::now();
            let d = dem(&spec, instr, 6, 1e-3);
            let r = run_monte_carlo(&d, &cfg, MC_SHOTS, 100 + i as u64, ErrorType::BitFlip).unwrap();
            (name, r, t.elapsed())
        })
        .collect()
}

fn suppression(runs: &[(&str, MonteCarloResult, Duration)]) -> Verdict {
    let p: Vec<f64> = runs.iter().map(|r| r.1.p_l_estimate).collect();
    let (mem, shift, swap) = (p[0], p[1], p[2]);
    let ordered = mem <= shift && shift < swap;
    let r1 = shift / mem;
    let r2 = swap / shift;
    let ok = ordered && (0.675..=2.025).contains(&r1) && (7.5..=30.0).contains(&r2);
    let detail: Vec<String> = runs
        .iter()
        .map(|(n, r, t)| format!("{n} {}/{} = {:.3e} [{:.2e}, {:.2e}] in {:.0?}", r.failures, r.shots, r.p_l_estimate, r.ci99.0, r.ci99.1, t))
        .collect();
    verdict(ok, format!("{}; shift/memory {r1:.2} (1.35 +-50%), swap/shift {r2:.2} (15, factor 2)", detail.join(", ")))
}

// ---------------------------------------------------------------- 9

fn gross_spectrum() -> Verdict {
    let t = Instant::now();
    let spec = catalog_lookup("gross").unwrap();
    let cfg = DecoderConfig::sampling();
    let d = dem(&spec, Instruction::Memory, 10, 1e-3);
    let w0 = 5;
    let weights: Vec<usize> = (w0..=w0 + 10).collect();
    let points = sample_failure_spectrum(&d, &cfg, &weights, SPECTRUM_SAMPLES, 23).unwrap();
    let n = FaultUnits::of(&d).total;
    let fit = match fit_failure_spectrum(&points, w0, 12, n) {
        Ok(f) => f,
        Err(e) => return verdict(false, format!("fit failed: {e}")),
    };
    let reference = FailureSpectrumFit::new(-14.97, 5.58, 5, 475200, 12);
    let grid: Vec<f64> = (0..=10).map(|i| 5e-4 * (6f64).powf(i as f64 / 10.0)).collect();
    let ratios: Vec<f64> = grid.iter().map(|&p| predict_logical_error(&fit, p) / predict_logical_error(&reference, p)).collect();
    let curve_ok = ratios.iter().all(|r| (1.0 / 3.0..=3.0).contains(r));
    let band = predict_with_band(&fit, 3e-3, 0.99, 400, 29);
    let d3 = dem(&spec, Instruction::Memory, 10, 3e-3);
    let mc = run_monte_carlo(&d3, &cfg, SPOT_SHOTS, 31, ErrorType::BitFlip).unwrap();
    let spot_ok = mc.ci99.0 <= band.ci_hi && mc.ci99.1 >= band.ci_lo;
    let spectrum: Vec<String> = points.iter().map(|p| format!("{}:{:.3}", p.weight, p.f_hat)).collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0f64), |(a, b), &r| (a.min(r), b.max(r)));
    verdict(
        curve_ok && spot_ok,
        format!(
            "f(w) {}; fit ln f0 {:.2} gamma {:.2} N {n}; ratio to reference curve over [5e-4, 3e-3] in [{lo:.2}, {hi:.2}]; \
             spot p=3e-3 MC {}/{} = {:.3e} [{:.2e}, {:.2e}] vs band {:.3e} [{:.2e}, {:.2e}]; {:.0?}",
            spectrum.join(" "),
            fit.ln_f0(),
            fit.gamma,
            mc.failures,
            mc.shots,
            mc.p_l_estimate,
            mc.ci99.0,
            mc.ci99.1,
            band.p_l,
            band.ci_lo,
            band.ci_hi,
            t.elapsed()
        ),
    )
}

// ---------------------------------------------------------------- 10

fn property_suites(runs: &[(&str, MonteCarloResult, Duration)]) -> Verdict {
    let cfg = DecoderConfig::sampling();
    let syndromes: u64 = runs.iter().map(|r| r.1.shots).sum();
    let invalid: u64 = runs.iter().map(|r| r.1.invalid_corrections).sum();
    let validity_ok = syndromes >= 1_000_000 && invalid == 0;

    let bb = catalog_lookup("bb-72").unwrap();
    let small = sample_failure_spectrum(&dem(&bb, Instruction::Memory, 6, 1e-3), &cfg, &[1, 2], 10_000, 41).unwrap();
    let gross = catalog_lookup("gross").unwrap();
    let large = sample_failure_spectrum(&dem(&gross, Instruction::Memory, 10, 1e-3), &cfg, &[1, 2, 3, 4], 5_000, 43).unwrap();
    let silent = |pts: &[bbshift::harness::SpectrumPoint]| pts.iter().all(|p| p.failures == 0.0);
    let injection_ok = silent(&small) && silent(&large) && small[0].exhaustive && large[0].exhaustive;

    let mut noiseless_ok = true;
    for (spec, instr) in [(&bb, Instruction::Memory), (&bb, Instruction::ShiftCircuit(A_TYPE)), (&bb, Instruction::SwapShift(A_TYPE)), (&gross, Instruction::Memory)] {
        for basis in [Basis::Z, Basis::X] {
            let c = annotate_detectors(&build_experiment(spec, instr, 2, basis).unwrap(), Some(spec)).unwrap();
            let (dets, obs) = FrameProgram::new(&c).sample(500, 47);
            noiseless_ok &= dets.iter().chain(obs.iter()).all(|r| r.is_zero());
        }
    }
    let describe = |pts: &[bbshift::harness::SpectrumPoint]| {
        pts.iter().map(|p| format!("w{} {}{}", p.weight, p.failures, if p.exhaustive { " (exhaustive)" } else { "" })).collect::<Vec<_>>().join(", ")
    };
    verdict(
        validity_ok && injection_ok && noiseless_ok,
        format!(
            "invalid corrections {invalid}/{syndromes}; bb-72 failures {}; gross failures {}; noiseless detection events all zero {noiseless_ok}",
            describe(&small),
            describe(&large)
        ),
    )
}

// ----------------------------------------------------------------

fn main() {
    let wanted: Vec<usize> = std::env::var("BBSHIFT_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_else(|| (1..=10).collect());
    let run = |k: usize| wanted.contains(&k);
    let mut results: Vec<(usize, Verdict)> = Vec::new();
    let mut record = |k: usize, v: Verdict| {
        println!("criterion {k}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
        results.push((k, v));
    };
    let singles: [(usize, fn() -> Verdict); 7] = [
        (1, code_parameters),
        (2, schedule_search),
        (3, golden_circuits),
        (4, correctness),
        (5, logical_action),
        (6, fault_counts),
        (7, circuit_distance),
    ];
    for (k, f) in singles {
        if run(k) {
            record(k, f());
        }
    }
    let runs = if run(8) || run(10) { suppression_runs() } else { Vec::new() };
    if run(8) {
        record(8, suppression(&runs));
    }
    if run(9) {
        record(9, gross_spectrum());
    }
    if run(10) {
        record(10, property_suites(&runs));
    }
    let passed = results.iter().filter(|(_, v)| v.pass).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    let hard: Vec<usize> = results.iter().filter(|(k, v)| !v.pass && matches!(k, 1..=5 | 10)).map(|(k, _)| *k).collect();
    if !hard.is_empty() {
        eprintln!("correctness criteria failed: {hard:?}");
        std::process::exit(1);
    }
}
