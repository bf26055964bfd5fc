use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{Basis, Circuit, CircuitError, MeasLabel, Op};
use crate::algebra::{build_check_matrices, logical_basis, CodeSpec, Monomial, Role};
use crate::schedule::{
    commutation_constraints, enumerate_candidate_schedules, find_shift_compatible_pair, reference_memory_schedule,
    CheckType, EdgeClass, Schedule, ShiftKind,
};

/// One class-wide CNOT layer entry. Normal orientation is check → data for
/// X classes and data → check for Z classes; `reversed` flips it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedGate {
    pub class: EdgeClass,
    pub reversed: bool,
}

impl PlannedGate {
    fn normal(class: EdgeClass) -> Self {
        PlannedGate { class, reversed: false }
    }

    fn reversed(class: EdgeClass) -> Self {
        PlannedGate { class, reversed: true }
    }

    /// (control, target) at check coordinate `delta`.
    pub fn pair(self, spec: &CodeSpec, delta: Monomial) -> (usize, usize) {
        let c = self.class.check_qubit(spec, delta);
        let d = self.class.data_qubit(spec, delta);
        let (a, b) = match self.class.check {
            CheckType::X => (c, d),
            CheckType::Z => (d, c),
        };
        if self.reversed {
            (b, a)
        } else {
            (a, b)
        }
    }
}

pub type LayerPlan = Vec<Vec<PlannedGate>>;

pub fn plan_cycle(s: &Schedule) -> LayerPlan {
    s.slots.iter().map(|sl| sl.iter().map(|&c| PlannedGate::normal(c)).collect()).collect()
}

fn check_plan(plan: &LayerPlan) -> Result<(), String> {
    for (t, layer) in plan.iter().enumerate() {
        let mut used = [false; 4];
        for g in layer {
            for r in [g.class.check_role(), g.class.data_role()] {
                if std::mem::replace(&mut used[r.block()], true) {
                    return Err(format!("layer {t} uses block {r:?} twice"));
                }
            }
        }
    }
    Ok(())
}

fn blocks(c: EdgeClass) -> [Role; 2] {
    [c.check_role(), c.data_role()]
}

/// No gate other than `own` touches the blocks of `own` after layer `t`.
fn quiet_after(plan: &LayerPlan, t: usize, own: EdgeClass) -> bool {
    plan.iter().skip(t + 1).flatten().all(|g| g.class == own || blocks(g.class).iter().all(|r| !blocks(own).contains(r)))
}

/// No gate other than `own` touches the blocks of `own` before layer `t`.
fn quiet_before(plan: &LayerPlan, t: usize, own: EdgeClass) -> bool {
    plan.iter().take(t).flatten().all(|g| g.class == own || blocks(g.class).iter().all(|r| !blocks(own).contains(r)))
}

fn mismatch(kind: ShiftKind, reason: impl Into<String>) -> CircuitError {
    CircuitError::PairMismatch { kind: kind.to_string(), reason: reason.into() }
}

/// CNOT layers of the first round of a shift block: the first SWAP layer is
/// absorbed, turning the last X-P_i and Z-P̄_j gates into reversed/normal
/// pairs and adding one layer.
pub fn merge_layers_former(s: &Schedule, kind: ShiftKind) -> Result<LayerPlan, CircuitError> {
    kind.validate()?;
    let (xc, zc) = kind.former_boundary();
    if s.last(CheckType::X) != xc || s.last(CheckType::Z) != zc {
        return Err(mismatch(kind, format!("former must end with {xc} and {zc}")));
    }
    let mut plan = plan_cycle(s);
    plan.push(Vec::new());
    for c in [xc, zc] {
        let t = s.slot_of(c);
        let base = plan_cycle(s);
        if !quiet_after(&base, t, c) {
            return Err(mismatch(kind, format!("{c} is followed by gates on its blocks")));
        }
        let pos = plan[t].iter().position(|g| g.class == c).expect("class present");
        plan[t][pos] = PlannedGate::reversed(c);
        plan[t + 1].push(PlannedGate::normal(c));
    }
    for l in plan.iter_mut() {
        l.sort_by_key(|g| g.class);
    }
    check_plan(&plan).map_err(|e| mismatch(kind, e))?;
    Ok(plan)
}

/// CNOT layers of the second round: the second SWAP layer reverses the first
/// X-P_j and Z-P̄_i gates.
pub fn merge_layers_latter(s: &Schedule, kind: ShiftKind) -> Result<LayerPlan, CircuitError> {
    kind.validate()?;
    let (xc, zc) = kind.latter_boundary();
    if s.first(CheckType::X) != xc || s.first(CheckType::Z) != zc {
        return Err(mismatch(kind, format!("latter must begin with {xc} and {zc}")));
    }
    let mut plan = plan_cycle(s);
    for c in [xc, zc] {
        let t = s.slot_of(c);
        if !quiet_before(&plan, t, c) {
            return Err(mismatch(kind, format!("{c} is preceded by gates on its blocks")));
        }
        let pos = plan[t].iter().position(|g| g.class == c).expect("class present");
        plan[t][pos] = PlannedGate::reversed(c);
    }
    Ok(plan)
}

/// The three CNOTs of a SWAP.
pub fn decompose_swap(a: usize, b: usize) -> [(usize, usize); 3] {
    assert_ne!(a, b, "SWAP needs two distinct qubits");
    [(a, b), (b, a), (a, b)]
}

struct Emitter<'a> {
    spec: &'a CodeSpec,
    c: Circuit,
}

impl<'a> Emitter<'a> {
    fn new(spec: &'a CodeSpec) -> Self {
        Emitter { spec, c: Circuit::new(spec.num_qubits()) }
    }

    fn block(&self, r: Role) -> Vec<usize> {
        let n = self.spec.cells();
        (r.block() * n..(r.block() + 1) * n).collect()
    }

    fn layer(&mut self, ops: Vec<Op>) {
        let ops: Vec<Op> = ops.into_iter().filter(|op| !op.qubits().is_empty()).collect();
        if ops.is_empty() {
            return;
        }
        if self.c.ops.iter().any(Op::is_gate) {
            self.c.ops.push(Op::Tick);
        }
        self.c.ops.extend(ops);
    }

    fn marker(&mut self, op: Op) {
        self.c.ops.push(op);
    }

    fn reset(&mut self, z: &[Role], x: &[Role]) {
        let zq = z.iter().flat_map(|&r| self.block(r)).collect();
        let xq = x.iter().flat_map(|&r| self.block(r)).collect();
        self.layer(vec![Op::ResetZ(zq), Op::ResetX(xq)]);
    }

    /// Measures whole blocks; `label` maps a physical coordinate to its label.
    fn measure(&mut self, z: &[Role], x: &[Role], label: impl Fn(Role, Monomial) -> MeasLabel) {
        let mut ops = Vec::new();
        for (roles, is_z) in [(z, true), (x, false)] {
            let q: Vec<usize> = roles.iter().flat_map(|&r| self.block(r)).collect();
            for &qq in &q {
                let (r, v) = self.spec.role_of(qq);
                self.c.labels.push(label(r, v));
            }
            ops.push(if is_z { Op::MeasureZ(q) } else { Op::MeasureX(q) });
        }
        self.layer(ops);
    }

    fn gates(&mut self, layer: &[PlannedGate]) {
        let mut pairs = Vec::with_capacity(layer.len() * self.spec.cells());
        for g in layer {
            for d in self.spec.params.elements() {
                pairs.push(g.pair(self.spec, d));
            }
        }
        self.layer(vec![Op::Cnot(pairs)]);
    }

    fn raw_cnots(&mut self, pairs: Vec<(usize, usize)>) {
        self.layer(vec![Op::Cnot(pairs)]);
    }

    fn check_labels(&self) -> impl Fn(Role, Monomial) -> MeasLabel {
        let g = self.spec.params;
        let f = self.c.frame;
        move |r, v| MeasLabel::Check {
            check: if r == Role::X { CheckType::X } else { CheckType::Z },
            at: g.mul(f, v),
        }
    }

    fn cycle(&mut self, s: &Schedule, reset: bool) {
        if reset {
            self.reset(&[Role::Z], &[Role::X]);
        }
        for layer in plan_cycle(s) {
            self.gates(&layer);
        }
        let lab = self.check_labels();
        self.measure(&[Role::Z], &[Role::X], lab);
    }

    fn data_blocks(kind: ShiftKind) -> (Role, Role) {
        let (xc, zc) = kind.former_boundary();
        (xc.data_role(), zc.data_role())
    }

    fn shift_block(&mut self, kind: ShiftKind, former: &LayerPlan, latter: &LayerPlan) {
        let g = self.spec.params;
        let (dx, dz) = Self::data_blocks(kind);
        let (i, j) = kind.indices();
        let p = kind.poly();
        let (pi, pj) = (self.spec.term(p, i), self.spec.term(p, j));
        let f = self.c.frame;
        self.reset(&[Role::Z], &[Role::X]);
        for layer in former {
            self.gates(layer);
        }
        // dX(u) now holds the X-check at P̄_i u, dZ(u) the Z-check at P_j u.
        self.measure(&[dz], &[dx], move |r, u| {
            if r == dx {
                MeasLabel::Check { check: CheckType::X, at: g.mul(f, g.mul(g.inv(pi), u)) }
            } else {
                MeasLabel::Check { check: CheckType::Z, at: g.mul(f, g.mul(pj, u)) }
            }
        });
        self.c.frame = g.mul(f, kind.shift(self.spec));
        self.reset(&[dz], &[dx]);
        for layer in latter {
            self.gates(layer);
        }
        let lab = self.check_labels();
        self.measure(&[Role::Z], &[Role::X], lab);
    }

    /// SWAP through the check blocks with a fresh-ancilla measurement
    /// between the two SWAP layers, then one cycle without its reset.
    fn swap_block(&mut self, kind: ShiftKind, cycle: &Schedule) {
        let g = self.spec.params;
        let (dx, dz) = Self::data_blocks(kind);
        let (xi, zj) = kind.former_boundary();
        let (xj, zi) = kind.latter_boundary();
        self.reset(&[Role::X, Role::Z], &[]);
        // X(γ)↔dX(P_iγ) and Z(γ)↔dZ(P̄_jγ) with the checks in |0⟩.
        let first = [PlannedGate::reversed(xi), PlannedGate::normal(zj)];
        let second = [PlannedGate::normal(xi), PlannedGate::reversed(zj)];
        self.gates(&first);
        self.gates(&second);
        self.measure(&[dx, dz], &[], |_, _| MeasLabel::Aux);
        self.reset(&[dz], &[dx]);
        // X(γ)↔dX(P_jγ) and Z(γ)↔dZ(P̄_iγ) with the data blocks fresh.
        let third = [PlannedGate::reversed(xj), PlannedGate::reversed(zi)];
        let fourth = [PlannedGate::normal(xj), PlannedGate::normal(zi)];
        self.gates(&third);
        self.gates(&fourth);
        self.c.frame = g.mul(self.c.frame, kind.shift(self.spec));
        self.cycle(cycle, false);
    }
}

/// Plain 9-timestep syndrome cycle.
pub fn build_syndrome_cycle(spec: &CodeSpec, schedule: &Schedule) -> Result<Circuit, CircuitError> {
    check_schedule(spec, schedule)?;
    let mut em = Emitter::new(spec);
    em.cycle(schedule, true);
    Ok(em.c)
}

/// Cycle for any slot assignment, without the parity pre-check.
pub fn build_cycle_unchecked(spec: &CodeSpec, schedule: &Schedule) -> Circuit {
    let mut em = Emitter::new(spec);
    em.cycle(schedule, true);
    em.c
}

/// Verifies slot invariants and the commutation-parity condition.
pub fn check_schedule(spec: &CodeSpec, schedule: &Schedule) -> Result<(), CircuitError> {
    schedule.validate().map_err(|e| CircuitError::ScheduleMismatch(e.to_string()))?;
    if !schedule_measures_checks(spec, schedule) {
        return Err(CircuitError::ScheduleMismatch(format!(
            "{} violates the commutation parity for {}",
            schedule.describe(),
            spec.name
        )));
    }
    Ok(())
}

pub fn schedule_measures_checks(spec: &CodeSpec, schedule: &Schedule) -> bool {
    let slot = schedule.slot_indices();
    commutation_constraints(spec)
        .iter()
        .all(|grp| grp.iter().filter(|&&(x, z)| slot[x] < slot[z]).count() % 2 == 0)
}

/// 15-timestep SWAP-based shift: two reduced SWAP layers and one cycle.
pub fn build_swap_shift_round(spec: &CodeSpec, kind: ShiftKind, schedule: &Schedule) -> Result<Circuit, CircuitError> {
    kind.validate()?;
    check_schedule(spec, schedule)?;
    let mut em = Emitter::new(spec);
    em.swap_block(kind, schedule);
    Ok(em.c)
}

/// 19-timestep shift circuit: merged former (10 steps) and latter (9 steps) rounds.
pub fn build_shift_circuit(
    spec: &CodeSpec,
    kind: ShiftKind,
    pair: &(Schedule, Schedule),
) -> Result<Circuit, CircuitError> {
    check_schedule(spec, &pair.0)?;
    check_schedule(spec, &pair.1)?;
    let former = merge_layers_former(&pair.0, kind)?;
    let latter = merge_layers_latter(&pair.1, kind)?;
    let mut em = Emitter::new(spec);
    em.shift_block(kind, &former, &latter);
    Ok(em.c)
}

/// Former cycle, two full SWAP layers (three CNOT layers each), latter cycle.
/// Reference for the merged shift circuit.
pub fn build_unmerged_shift(
    spec: &CodeSpec,
    kind: ShiftKind,
    pair: &(Schedule, Schedule),
) -> Result<Circuit, CircuitError> {
    kind.validate()?;
    let g = spec.params;
    let mut em = Emitter::new(spec);
    em.cycle(&pair.0, true);
    let (xi, zj) = kind.former_boundary();
    let (xj, zi) = kind.latter_boundary();
    for (xc, zc) in [(xi, zj), (xj, zi)] {
        for step in 0..3 {
            let mut pairs = Vec::new();
            for d in g.elements() {
                for c in [xc, zc] {
                    let sw = decompose_swap(c.check_qubit(spec, d), c.data_qubit(spec, d));
                    pairs.push(sw[step]);
                }
            }
            em.raw_cnots(pairs);
        }
    }
    em.c.frame = g.mul(em.c.frame, kind.shift(spec));
    em.cycle(&pair.1, true);
    Ok(em.c)
}

/// Logical instruction repeated by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instruction {
    Memory,
    SwapShift(ShiftKind),
    ShiftCircuit(ShiftKind),
    /// Shift circuits alternating between a kind and its inverse, so the
    /// patch steps back and forth and returns every second block.
    SteppingShift(ShiftKind),
}

impl Instruction {
    pub fn name(&self) -> &'static str {
        match self {
            Instruction::Memory => "memory",
            Instruction::SwapShift(_) => "swap-shift",
            Instruction::ShiftCircuit(_) => "shift-circuit",
            Instruction::SteppingShift(_) => "stepping-shift",
        }
    }
}

fn inverse_kind(kind: ShiftKind) -> ShiftKind {
    match kind {
        ShiftKind::AType(i, j) => ShiftKind::AType(j, i),
        ShiftKind::BType(i, j) => ShiftKind::BType(j, i),
    }
}

type Library = Mutex<HashMap<String, Arc<Vec<Schedule>>>>;

/// Depth-7 schedules passing the parity pre-check, cached per code.
pub fn schedule_library(spec: &CodeSpec) -> Arc<Vec<Schedule>> {
    static LIB: OnceLock<Library> = OnceLock::new();
    let lib = LIB.get_or_init(Default::default);
    let key = serde_json::to_string(spec).expect("serializable");
    if let Some(v) = lib.lock().expect("poisoned").get(&key) {
        return v.clone();
    }
    let v = Arc::new(enumerate_candidate_schedules(spec, 7));
    lib.lock().expect("poisoned").insert(key, v.clone());
    v
}

/// The cycle used for memory rounds: the reference ordering when it is
/// valid for the code, else the first valid staggered schedule.
pub fn default_memory_schedule(spec: &CodeSpec) -> Schedule {
    let r = reference_memory_schedule();
    if schedule_measures_checks(spec, &r) {
        return r;
    }
    let lib = schedule_library(spec);
    lib.iter().find(|s| s.is_staggered()).or(lib.first()).cloned().expect("a valid depth-7 schedule exists")
}

/// Former/latter schedules for `kind` on this code.
pub fn default_shift_pair(spec: &CodeSpec, kind: ShiftKind) -> Result<(Schedule, Schedule), CircuitError> {
    kind.validate()?;
    if let Some(r) = crate::schedule::reference_shift_schedule(kind) {
        if schedule_measures_checks(spec, &r)
            && merge_layers_former(&r, kind).is_ok()
            && merge_layers_latter(&r, kind).is_ok()
        {
            return Ok((r.clone(), r));
        }
    }
    Ok(find_shift_compatible_pair(kind, &schedule_library(spec))?)
}

/// Experiment: ideal preparation, `rounds` noisy syndrome rounds of the
/// instruction between NOISY markers, ideal data measurement, observables.
pub fn build_experiment(
    spec: &CodeSpec,
    instruction: Instruction,
    rounds: usize,
    basis: Basis,
) -> Result<Circuit, CircuitError> {
    let memory = default_memory_schedule(spec);
    let pairs = match instruction {
        Instruction::Memory => Vec::new(),
        Instruction::SwapShift(k) => {
            k.validate()?;
            Vec::new()
        }
        Instruction::ShiftCircuit(k) => vec![(k, default_shift_pair(spec, k)?)],
        Instruction::SteppingShift(k) => {
            let inv = inverse_kind(k);
            vec![(k, default_shift_pair(spec, k)?), (inv, default_shift_pair(spec, inv)?)]
        }
    };
    build_experiment_with(spec, instruction, rounds, basis, &memory, &pairs)
}

/// As `build_experiment` with explicit schedules. `pairs` lists the
/// (kind, pair) blocks cycled through by shift-circuit instructions.
pub fn build_experiment_with(
    spec: &CodeSpec,
    instruction: Instruction,
    rounds: usize,
    basis: Basis,
    memory: &Schedule,
    pairs: &[(ShiftKind, (Schedule, Schedule))],
) -> Result<Circuit, CircuitError> {
    if rounds < 2 {
        return Err(CircuitError::TooFewRounds { min: 2, got: rounds });
    }
    check_schedule(spec, memory)?;
    let mut plans = Vec::new();
    if matches!(instruction, Instruction::ShiftCircuit(_) | Instruction::SteppingShift(_)) {
        if rounds % 2 != 0 {
            return Err(CircuitError::OddRounds(rounds));
        }
        for (k, (f, l)) in pairs {
            check_schedule(spec, f)?;
            check_schedule(spec, l)?;
            plans.push((*k, merge_layers_former(f, *k)?, merge_layers_latter(l, *k)?));
        }
        if plans.is_empty() {
            return Err(CircuitError::ScheduleMismatch("no shift schedule pair given".into()));
        }
    }
    let cm = build_check_matrices(spec).map_err(|e| CircuitError::ScheduleMismatch(e.to_string()))?;
    let mut em = Emitter::new(spec);
    let data = [Role::R, Role::L];
    match basis {
        Basis::Z => em.reset(&data, &[]),
        Basis::X => em.reset(&[], &data),
    }
    em.marker(Op::NoisyBegin);
    match instruction {
        Instruction::Memory => {
            for _ in 0..rounds {
                em.cycle(memory, true);
            }
        }
        Instruction::SwapShift(k) => {
            for _ in 0..rounds {
                em.swap_block(k, memory);
            }
        }
        Instruction::ShiftCircuit(_) | Instruction::SteppingShift(_) => {
            for b in 0..rounds / 2 {
                let (k, f, l) = &plans[b % plans.len()];
                em.shift_block(*k, f, l);
            }
        }
    }
    em.marker(Op::NoisyEnd);
    let g = spec.params;
    let frame = em.c.frame;
    let base = em.c.num_measurements();
    let lab = move |r: Role, v: Monomial| MeasLabel::Data { role: r, at: g.mul(frame, v) };
    match basis {
        Basis::Z => em.measure(&data, &[], lab),
        Basis::X => em.measure(&[], &data, lab),
    }
    // Code qubit (role, w) sits on physical (role, frame⁻¹ w).
    let inv = g.inv(frame);
    let phys = |q: usize| {
        let (r, w) = spec.role_of(q);
        spec.qubit(r, g.mul(inv, w))
    };
    let lb = logical_basis(&cm);
    let logicals = match basis {
        Basis::Z => &lb.z,
        Basis::X => &lb.x,
    };
    for (k, l) in logicals.iter().enumerate() {
        let mut m: Vec<usize> = l.iter_ones().map(|q| base + phys(q)).collect();
        m.sort_unstable();
        em.c.ops.push(Op::Observable(k, m));
    }
    Ok(em.c)
}

/// Per-timestep canonical description of CNOT layers relative to the check
/// coordinate: (control role, control offset, target role, target offset).
/// Resets and measurements are listed as (basis letter, role).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StepEntry {
    Reset(char, Role),
    Measure(char, Role),
    Cnot { control: (Role, Monomial), target: (Role, Monomial) },
}

/// Summarizes a translation-invariant circuit timestep by timestep. Each
/// CNOT is expressed relative to the coordinate of its check-block qubit.
pub fn describe_steps(spec: &CodeSpec, c: &Circuit) -> Vec<Vec<StepEntry>> {
    let g = spec.params;
    let mut out = Vec::new();
    for layer in c.layers() {
        let mut step: Vec<StepEntry> = Vec::new();
        for &i in &layer {
            let role_set = |q: &[usize]| {
                let mut r: Vec<Role> = q.iter().map(|&q| spec.role_of(q).0).collect();
                r.dedup();
                r
            };
            match &c.ops[i] {
                Op::ResetZ(q) => step.extend(role_set(q).into_iter().map(|r| StepEntry::Reset('Z', r))),
                Op::ResetX(q) => step.extend(role_set(q).into_iter().map(|r| StepEntry::Reset('X', r))),
                Op::MeasureZ(q) => step.extend(role_set(q).into_iter().map(|r| StepEntry::Measure('Z', r))),
                Op::MeasureX(q) => step.extend(role_set(q).into_iter().map(|r| StepEntry::Measure('X', r))),
                Op::Cnot(p) => {
                    for &(a, b) in p {
                        let (ra, va) = spec.role_of(a);
                        let (rb, vb) = spec.role_of(b);
                        let anchor = if ra.is_data() { vb } else { va };
                        let rel = |v: Monomial| g.mul(v, g.inv(anchor));
                        step.push(StepEntry::Cnot { control: (ra, rel(va)), target: (rb, rel(vb)) });
                    }
                }
                _ => {}
            }
        }
        step.sort();
        step.dedup();
        if !step.is_empty() {
            out.push(step);
        }
    }
    out
}
