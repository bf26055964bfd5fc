use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::catalog_lookup;
use crate::circuit::{build_experiment, parse, Basis, Instruction};
use crate::schedule::ShiftKind;
use crate::tableau::StabilizerTableau;

fn bb72_memory(rounds: usize, basis: Basis) -> (crate::algebra::CodeSpec, Circuit) {
    let spec = catalog_lookup("bb-72").unwrap();
    let c = build_experiment(&spec, Instruction::Memory, rounds, basis).unwrap();
    (spec, c)
}

fn check_redundancy(spec: &crate::algebra::CodeSpec) -> usize {
    let cm = crate::algebra::build_check_matrices(spec).unwrap();
    spec.cells() - cm.hx.rank()
}

#[test]
fn zero_rate_leaves_circuit_unchanged() {
    let (_, c) = bb72_memory(2, Basis::Z);
    assert_eq!(apply_noise(&c, &NoiseParams::si1000(0.0)).unwrap(), c);
}

#[test]
fn cnot_layer_channel_table() {
    let mut c = parse("NOISY_BEGIN\nCNOT 0 1 2 3\nNOISY_END\n").unwrap();
    c.num_qubits = 6;
    let n = apply_noise(&c, &NoiseParams::si1000(0.01)).unwrap();
    let noise: Vec<_> = n.ops.iter().filter(|o| matches!(o, Op::Noise { .. })).cloned().collect();
    assert_eq!(
        noise,
        vec![
            Op::Noise { channel: Channel::Dep2, p: 0.01, targets: vec![0, 1, 2, 3] },
            Op::Noise { channel: Channel::Dep1, p: 0.01 * 0.1, targets: vec![4, 5] },
        ]
    );
}

#[test]
fn reset_and_measure_channels() {
    let mut c = parse("RZ 0\nNOISY_BEGIN\nTICK\nRX 1\nTICK\nMZ 0\nNOISY_END\nTICK\nMX 1\n").unwrap();
    c.num_qubits = 3;
    let n = apply_noise(&c, &NoiseParams::si1000(0.01)).unwrap();
    let text = crate::circuit::serialize(&n);
    assert_eq!(
        text,
        "RZ 0\nNOISY_BEGIN\nTICK\nRX 1\nZERR(0.02) 1\nDEP1(0.02) 0 2\nTICK\nMZ 0\nFLIP(0.05) 0\nDEP1(0.02) 1 2\nNOISY_END\nTICK\nMX 1\n"
    );
}

#[test]
fn invalid_rate_rejected() {
    let (_, c) = bb72_memory(2, Basis::Z);
    assert!(apply_noise(&c, &NoiseParams::si1000(0.2)).is_err());
}

#[test]
fn merged_probability() {
    assert!((combine_probability(0.1, 0.1) - 0.18).abs() < 1e-12);
}

#[test]
fn empty_circuit_gives_empty_dem() {
    let dem = build_dem(&Circuit::new(0)).unwrap();
    assert_eq!(dem, DetectorErrorModel::empty());
}

#[test]
fn undetectable_logical_fault_is_reported() {
    let c = parse("RZ 0\nNOISY_BEGIN\nXERR(0.1) 0\nNOISY_END\nMZ 0\nOBSERVABLE 0 0\n").unwrap();
    assert!(matches!(build_dem(&c), Err(NoiseError::UndetectableLogicalFault { .. })));
}

#[test]
fn memory_detectors_come_from_labels() {
    for basis in [Basis::Z, Basis::X] {
        let (spec, c) = bb72_memory(3, basis);
        let (dets, stats) = discover_detectors(&c, Some(&spec)).unwrap();
        // Products of the other basis's first-round checks over the
        // redundant check relations are deterministic too.
        assert_eq!(stats.from_nullspace, 0);
        assert_eq!(dets.len() + 12, stats.deterministic_dim);
        assert_eq!(dets.len(), 36 + 2 * 72 + 36);
        let long = dets.iter().filter(|d| d.len() > 7).count();
        assert_eq!(long, check_redundancy(&spec));
    }
}

#[test]
fn shift_experiments_have_label_detectors() {
    let spec = catalog_lookup("bb-72").unwrap();
    let k = ShiftKind::AType(2, 1);
    for instr in [Instruction::ShiftCircuit(k), Instruction::SwapShift(k), Instruction::SteppingShift(k)] {
        let c = build_experiment(&spec, instr, 2, Basis::Z).unwrap();
        let (_, stats) = discover_detectors(&c, Some(&spec)).unwrap();
        assert_eq!(stats.from_nullspace, 0, "{instr:?}");
        let (_, dem) = compile_noisy(Some(&spec), &c, &NoiseParams::si1000(1e-3)).unwrap();
        assert!(dem.num_mechanisms() > 0);
    }
}

#[test]
fn unlabelled_circuit_falls_back_to_null_space() {
    let (spec, c) = bb72_memory(2, Basis::Z);
    let parsed = parse(&crate::circuit::serialize(&c)).unwrap();
    let (a, sa) = discover_detectors(&c, Some(&spec)).unwrap();
    let (b, sb) = discover_detectors(&parsed, None).unwrap();
    assert_eq!(a.len(), b.len());
    assert_eq!(sa.deterministic_dim, sb.deterministic_dim);
    assert!(sb.from_nullspace > 0);
}

#[test]
fn measurement_flip_hits_two_detectors() {
    let (spec, c) = bb72_memory(3, Basis::Z);
    let a = annotate_detectors(&c, Some(&spec)).unwrap();
    let prog = FrameProgram::new(&a);
    // A Z-check outcome in the middle round sits in exactly two detectors.
    let mid = 72 + 36;
    assert_eq!(prog.measurement_symptom(mid).detectors.len(), 2);
}

#[test]
fn data_flip_before_readout() {
    let (spec, c) = bb72_memory(2, Basis::Z);
    let a = annotate_detectors(&c, Some(&spec)).unwrap();
    let end = a.ops.iter().position(|o| matches!(o, Op::NoisyEnd)).unwrap();
    let s = propagate_fault(&a, &FaultLocation { after: end, paulis: vec![(0, Pauli1::X)] });
    // Qubit 0 lies in three Z checks; the final-round detectors of those flip.
    assert_eq!(s.detectors.len(), 3);
    let obs = a.observables();
    let m0 = a.num_measurements() - spec.num_data();
    let expect: Vec<u32> = (0..obs.len()).filter(|&k| obs[k].contains(&m0)).map(|k| k as u32).collect();
    assert_eq!(s.observables, expect);
}

/// Outcome flips caused by a Pauli inserted after op `after`, by comparing
/// symbolic tableau runs with and without it.
fn tableau_flips(c: &Circuit, after: usize, q: usize, p: Pauli1) -> Vec<bool> {
    let run = |insert: bool| {
        let mut t = StabilizerTableau::new(c.num_qubits);
        let mut pre = c.clone();
        pre.ops.truncate(after + 1);
        let mut post = c.clone();
        post.ops.drain(..=after);
        let mut r = t.run(&pre);
        if insert {
            let (x, z) = match p {
                Pauli1::X => (true, false),
                Pauli1::Y => (true, true),
                Pauli1::Z => (false, true),
            };
            t.apply_pauli(q, x, z);
        }
        r.extend(t.run(&post));
        r
    };
    let a = run(false);
    let b = run(true);
    a.iter()
        .zip(&b)
        .map(|(x, y)| {
            let mut d = x.expr.clone();
            let mut e = y.expr.clone();
            let w = d.len().max(e.len());
            d.resize(w);
            e.resize(w);
            d.xor_assign(&e);
            assert!(d.iter_ones().all(|v| v == 0), "difference must be constant");
            d.get(0)
        })
        .collect()
}

#[test]
fn propagation_matches_tableau_difference() {
    let spec = catalog_lookup("bb-72").unwrap();
    let k = ShiftKind::AType(2, 1);
    let c = build_experiment(&spec, Instruction::ShiftCircuit(k), 2, Basis::Z).unwrap();
    let a = annotate_detectors(&c, Some(&spec)).unwrap();
    let bare = a.without_annotations();
    let prog = FrameProgram::new(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let begin = a.ops.iter().position(|o| matches!(o, Op::NoisyBegin)).unwrap();
    let end = a.ops.iter().position(|o| matches!(o, Op::NoisyEnd)).unwrap();
    for _ in 0..100 {
        let after = rng.random_range(begin..end);
        let q = rng.random_range(0..a.num_qubits);
        let p = Pauli1::ALL[rng.random_range(0..3)];
        let sym = prog.propagate(&FaultLocation { after, paulis: vec![(q, p)] });
        let flips = tableau_flips(&bare, after, q, p);
        let dets: Vec<u32> = prog
            .detectors
            .iter()
            .enumerate()
            .filter(|(_, ms)| ms.iter().fold(false, |acc, &m| acc ^ flips[m]))
            .map(|(d, _)| d as u32)
            .collect();
        let obs: Vec<u32> = prog
            .observables
            .iter()
            .enumerate()
            .filter(|(_, ms)| ms.iter().fold(false, |acc, &m| acc ^ flips[m]))
            .map(|(d, _)| d as u32)
            .collect();
        assert_eq!(sym.detectors, dets, "after {after} q {q} {p:?}");
        assert_eq!(sym.observables, obs);
    }
}

#[test]
fn noiseless_sampling_is_silent() {
    let (spec, c) = bb72_memory(2, Basis::X);
    let a = annotate_detectors(&c, Some(&spec)).unwrap();
    let (d, o) = FrameProgram::new(&a).sample(200, 1);
    assert!(d.iter().all(|r| r.is_zero()) && o.iter().all(|r| r.is_zero()));
}

#[test]
fn dem_density_matches_direct_sampling() {
    let (spec, c) = bb72_memory(2, Basis::Z);
    let (noisy, dem) = compile_noisy(Some(&spec), &c, &NoiseParams::si1000(1e-2)).unwrap();
    let shots = 4000;
    let sampled = detection_density(&noisy, shots, 3);
    // First-order prediction: each detector flips with the odd-parity
    // probability of the mechanisms touching it.
    let mut predicted = 0.0;
    for col in dem.detector_columns() {
        let mut q = 0.0;
        for j in col {
            q = combine_probability(q, dem.mechanisms[j].prob);
        }
        predicted += q;
    }
    predicted /= dem.num_detectors as f64;
    let sigma = (predicted * (1.0 - predicted) / (shots * dem.num_detectors) as f64).sqrt();
    assert!((sampled - predicted).abs() < 3.0 * sigma + 1e-3, "{sampled} vs {predicted}");
}

#[test]
fn dem_text_roundtrip() {
    let (spec, c) = bb72_memory(2, Basis::Z);
    let (_, dem) = compile_noisy(Some(&spec), &c, &NoiseParams::si1000(1e-3)).unwrap();
    let back = DetectorErrorModel::parse(&dem.to_text()).unwrap();
    assert_eq!(back.num_detectors, dem.num_detectors);
    assert_eq!(back.num_observables, dem.num_observables);
    assert_eq!(back.fault_count_n, dem.fault_count_n);
    assert_eq!(back.mechanisms.len(), dem.mechanisms.len());
    for (a, b) in back.mechanisms.iter().zip(&dem.mechanisms) {
        assert_eq!((&a.detectors, &a.observables), (&b.detectors, &b.observables));
        assert!((a.prob - b.prob).abs() <= 1e-15 * b.prob.max(1e-300));
    }
}

#[test]
fn fault_count_conventions() {
    let spec = catalog_lookup("bb-72").unwrap();
    let p = 1e-3;
    let k = ShiftKind::AType(2, 1);
    let count = |instr| {
        let c = build_experiment(&spec, instr, 6, Basis::Z).unwrap();
        count_faults(&apply_noise(&c, &NoiseParams::si1000(p)).unwrap(), p)
    };
    let mem = count(Instruction::Memory);
    let shift = count(Instruction::ShiftCircuit(k));
    assert!((mem.gate_and_measure - 142560.0).abs() < 1e-6 * 142560.0);
    let r = shift.gate_and_measure / mem.gate_and_measure;
    assert!((r - 1.043).abs() < 0.005, "{r}");
}
