use super::*;
use crate::algebra::{catalog_lookup, Poly};
use crate::schedule::{reference_memory_schedule, reference_shift_schedule, Schedule, ShiftKind};

fn gross() -> CodeSpec {
    catalog_lookup("gross").unwrap()
}

fn role(s: &str) -> Role {
    match s {
        "R" => Role::R,
        "L" => Role::L,
        "X" => Role::X,
        "Z" => Role::Z,
        _ => panic!("role {s}"),
    }
}

/// `ROLE` or `ROLE:TERM` with TERM one of A1..B3 or Ab1..Bb3 (conjugate).
fn site(spec: &CodeSpec, s: &str) -> (Role, Monomial) {
    let g = &spec.params;
    match s.split_once(':') {
        None => (role(s), Monomial::IDENTITY),
        Some((r, t)) => {
            let poly = if t.starts_with('A') { Poly::A } else { Poly::B };
            let k: usize = t[t.len() - 1..].parse().unwrap();
            let m = spec.term(poly, k);
            (role(r), if t.contains('b') { g.inv(m) } else { m })
        }
    }
}

/// One string per timestep; entries separated by commas.
fn expected(spec: &CodeSpec, steps: &[&str]) -> Vec<Vec<StepEntry>> {
    steps
        .iter()
        .map(|st| {
            let mut v: Vec<StepEntry> = st
                .split(',')
                .map(str::trim)
                .map(|e| {
                    if let Some((op, r)) = e.split_once(' ') {
                        let b = op.chars().nth(1).unwrap();
                        match &op[..1] {
                            "R" => StepEntry::Reset(b, role(r)),
                            _ => StepEntry::Measure(b, role(r)),
                        }
                    } else {
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

const ROUND_START: &str = "RX X, RZ Z";
const ROUND_END: &str = "MX X, MZ Z";

#[test]
fn memory_cycle_matches_reference_table() {
    let spec = gross();
    let c = build_syndrome_cycle(&spec, &reference_memory_schedule()).unwrap();
    let want = expected(
        &spec,
        &[
            ROUND_START,
            "R:Bb3>Z",
            "R:Bb2>Z, X>L:B1",
            "L:Ab3>Z, X>R:A1",
            "L:Ab1>Z, X>R:A3",
            "L:Ab2>Z, X>R:A2",
            "R:Bb1>Z, X>L:B3",
            "X>L:B2",
            ROUND_END,
        ],
    );
    assert_eq!(describe_steps(&spec, &c), want);
    assert_eq!(c.timesteps(), 9);
    assert_eq!(c.cnot_count(), 12 * spec.cells());
    c.validate().unwrap();
}

fn shift_golden(kind: ShiftKind, steps: &[&str]) {
    let spec = gross();
    let s = reference_shift_schedule(kind).unwrap();
    let c = build_shift_circuit(&spec, kind, &(s.clone(), s)).unwrap();
    c.validate().unwrap();
    assert_eq!(c.timesteps(), 19);
    assert_eq!(describe_steps(&spec, &c), expected(&spec, steps));
}

#[test]
fn a_type_shift_matches_reference_table() {
    shift_golden(
        ShiftKind::AType(2, 1),
        &[
            ROUND_START,
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
            ROUND_END,
        ],
    );
}

#[test]
fn b_type_shift_matches_reference_table() {
    shift_golden(
        ShiftKind::BType(2, 1),
        &[
            ROUND_START,
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
            ROUND_END,
        ],
    );
}

#[test]
fn nonlocal_shift_matches_reference_table() {
    shift_golden(
        ShiftKind::BType(3, 2),
        &[
            ROUND_START,
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
            ROUND_END,
        ],
    );
}

#[test]
fn swap_round_has_fifteen_steps() {
    let spec = gross();
    let c = build_swap_shift_round(&spec, ShiftKind::AType(2, 1), &reference_memory_schedule()).unwrap();
    c.validate().unwrap();
    assert_eq!(c.timesteps(), 15);
    assert_eq!(c.frame, spec.params.x());
}

#[test]
fn text_roundtrip() {
    let spec = catalog_lookup("bb-72").unwrap();
    for instr in [Instruction::Memory, Instruction::ShiftCircuit(ShiftKind::AType(2, 1))] {
        let c = build_experiment(&spec, instr, 2, Basis::Z).unwrap();
        let text = serialize(&c);
        let back = parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize(&back), text);
    }
}

#[test]
fn parse_small_program() {
    let c = parse("RZ 0\nTICK\nMZ 0\n").unwrap();
    assert_eq!(c.num_qubits, 1);
    assert_eq!(c.ops, vec![Op::ResetZ(vec![0]), Op::Tick, Op::MeasureZ(vec![0])]);
    assert_eq!(c.timesteps(), 2);
}

#[test]
fn parse_errors_carry_line_numbers() {
    for (src, line) in [
        ("RZ 0\nFOO 1\n", 2),
        ("CNOT 0\n", 1),
        ("CNOT 1 1\n", 1),
        ("RZ 0\nDETECTOR 0\n", 2),
        ("MZ 0\nFLIP(0.1) 3\n", 2),
        ("DEP1(1.5) 0\n", 1),
        ("DEP1(x) 0\n", 1),
        ("# comment\nTICK 3\n", 2),
    ] {
        match parse(src) {
            Err(CircuitError::Parse { line: l, .. }) => assert_eq!(l, line, "{src:?}"),
            other => panic!("{src:?} gave {other:?}"),
        }
    }
}

#[test]
fn experiment_round_parity() {
    let spec = catalog_lookup("bb-72").unwrap();
    let k = ShiftKind::AType(2, 1);
    assert!(matches!(build_experiment(&spec, Instruction::ShiftCircuit(k), 3, Basis::Z), Err(CircuitError::OddRounds(3))));
    assert!(matches!(build_experiment(&spec, Instruction::Memory, 1, Basis::Z), Err(CircuitError::TooFewRounds { .. })));
}

#[test]
fn mismatched_pair_is_rejected() {
    let spec = gross();
    let s = reference_shift_schedule(ShiftKind::BType(2, 1)).unwrap();
    let r = build_shift_circuit(&spec, ShiftKind::AType(2, 1), &(s.clone(), s));
    assert!(matches!(r, Err(CircuitError::PairMismatch { .. })));
}

#[test]
fn merge_adds_one_layer() {
    let s = Schedule::parse("ZA2 | XA1 ZA3 | XB3 ZB3 | XB2 ZB1 | XB1 ZB2 | XA3 ZA1 | XA2").unwrap();
    let k = ShiftKind::AType(2, 1);
    assert_eq!(merge_layers_former(&s, k).unwrap().len(), 8);
    assert_eq!(merge_layers_latter(&s, k).unwrap().len(), 7);
}
