//! Bit-packed Pauli-frame propagation: 64 independent frames per word.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Channel, Circuit, Op};
use crate::gf2::Bits;

/// Single-qubit Pauli component of a fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const ALL: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn name(self) -> char {
        match self {
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

/// Detectors and observables flipped by a fault, both sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symptom {
    pub detectors: Vec<u32>,
    pub observables: Vec<u32>,
}

fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Symptom {
    pub fn xor(&self, o: &Symptom) -> Symptom {
        Symptom { detectors: sym_diff(&self.detectors, &o.detectors), observables: sym_diff(&self.observables, &o.observables) }
    }

    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty() && self.observables.is_empty()
    }
}

/// A Pauli fault inserted right after op `after` of the circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultLocation {
    pub after: usize,
    pub paulis: Vec<(usize, Pauli1)>,
}

/// Circuit compiled for frame simulation, with detector and observable
/// supports resolved to measurement indices.
#[derive(Debug, Clone)]
pub struct FrameProgram {
    pub num_qubits: usize,
    pub num_measurements: usize,
    ops: Vec<Op>,
    /// Index of the first measurement produced by each op.
    meas_base: Vec<usize>,
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<Vec<usize>>,
    meas_dets: Vec<Vec<u32>>,
    meas_obs: Vec<Vec<u32>>,
}

impl FrameProgram {
    pub fn new(c: &Circuit) -> Self {
        let mut meas_base = Vec::with_capacity(c.ops.len());
        let mut m = 0;
        for op in &c.ops {
            meas_base.push(m);
            if let Op::MeasureZ(q) | Op::MeasureX(q) = op {
                m += q.len();
            }
        }
        let detectors = c.detectors();
        let observables = c.observables();
        let mut meas_dets = vec![Vec::new(); m];
        let mut meas_obs = vec![Vec::new(); m];
        for (d, ms) in detectors.iter().enumerate() {
            for &k in ms {
                toggle(&mut meas_dets[k], d as u32);
            }
        }
        for (o, ms) in observables.iter().enumerate() {
            for &k in ms {
                toggle(&mut meas_obs[k], o as u32);
            }
        }
        for v in meas_dets.iter_mut().chain(meas_obs.iter_mut()) {
            v.sort_unstable();
        }
        FrameProgram {
            num_qubits: c.num_qubits,
            num_measurements: m,
            ops: c.ops.clone(),
            meas_base,
            detectors,
            observables,
            meas_dets,
            meas_obs,
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Symptom of flipping one measurement outcome.
    pub fn measurement_symptom(&self, m: usize) -> Symptom {
        Symptom { detectors: self.meas_dets[m].clone(), observables: self.meas_obs[m].clone() }
    }

    /// Applies ops `[from, to)` to the frame; `inject(i, frame)` runs before op i.
    fn sweep(&self, frame: &mut Frame, from: usize, mut inject: impl FnMut(usize, &mut Frame)) {
        for i in from..self.ops.len() {
            inject(i, frame);
            frame.apply(&self.ops[i], self.meas_base[i]);
        }
    }

    fn symptoms_from_records(&self, rec: &[u64], lanes: usize) -> Vec<Symptom> {
        let mut out = vec![Symptom::default(); lanes];
        for (d, ms) in self.detectors.iter().enumerate() {
            let mut w = 0u64;
            for &m in ms {
                w ^= rec[m];
            }
            push_lanes(w, lanes, |l| out[l].detectors.push(d as u32));
        }
        for (o, ms) in self.observables.iter().enumerate() {
            let mut w = 0u64;
            for &m in ms {
                w ^= rec[m];
            }
            push_lanes(w, lanes, |l| out[l].observables.push(o as u32));
        }
        out
    }

    /// Symptoms of up to 64 faults, propagated in parallel lanes.
    pub fn propagate_batch(&self, faults: &[FaultLocation]) -> Vec<Symptom> {
        assert!(faults.len() <= 64);
        if faults.is_empty() {
            return Vec::new();
        }
        let mut frame = Frame::new(self.num_qubits, self.num_measurements);
        let start = faults.iter().map(|f| f.after + 1).min().expect("nonempty");
        let mut order: Vec<usize> = (0..faults.len()).collect();
        order.sort_by_key(|&l| faults[l].after);
        let mut next = 0;
        self.sweep(&mut frame, start, |i, fr| {
            while next < order.len() && faults[order[next]].after + 1 == i {
                let l = order[next];
                for &(q, p) in &faults[l].paulis {
                    let (x, z) = p.bits();
                    if x {
                        fr.x[q] ^= 1 << l;
                    }
                    if z {
                        fr.z[q] ^= 1 << l;
                    }
                }
                next += 1;
            }
        });
        // Faults after the last op.
        for &l in &order[next..] {
            debug_assert!(faults[l].after + 1 >= self.ops.len());
        }
        self.symptoms_from_records(&frame.rec, faults.len())
    }

    pub fn propagate(&self, fault: &FaultLocation) -> Symptom {
        self.propagate_batch(std::slice::from_ref(fault)).pop().expect("one lane")
    }

    /// Samples the noise channels of the circuit directly. Returns one row
    /// of detection events and one row of observable flips per shot.
    pub fn sample(&self, shots: usize, seed: u64) -> (Vec<Bits>, Vec<Bits>) {
        let batches = shots.div_ceil(64);
        let res: Vec<(Vec<Bits>, Vec<Bits>)> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let lanes = (shots - b * 64).min(64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let mut frame = Frame::new(self.num_qubits, self.num_measurements);
                for (i, op) in self.ops.iter().enumerate() {
                    frame.apply(op, self.meas_base[i]);
                    if let Op::Noise { channel, p, targets } = op {
                        frame.sample_noise(*channel, *p, targets, lanes, &mut rng);
                    }
                }
                let mut dets = vec![Bits::zeros(self.num_detectors()); lanes];
                let mut obs = vec![Bits::zeros(self.num_observables()); lanes];
                for (d, ms) in self.detectors.iter().enumerate() {
                    let w = ms.iter().fold(0u64, |w, &m| w ^ frame.rec[m]);
                    push_lanes(w, lanes, |l| dets[l].set(d, true));
                }
                for (o, ms) in self.observables.iter().enumerate() {
                    let w = ms.iter().fold(0u64, |w, &m| w ^ frame.rec[m]);
                    push_lanes(w, lanes, |l| obs[l].set(o, true));
                }
                (dets, obs)
            })
            .collect();
        let mut d = Vec::with_capacity(shots);
        let mut o = Vec::with_capacity(shots);
        for (a, b) in res {
            d.extend(a);
            o.extend(b);
        }
        (d, o)
    }
}

fn toggle(v: &mut Vec<u32>, x: u32) {
    if let Some(p) = v.iter().position(|&y| y == x) {
        v.swap_remove(p);
    } else {
        v.push(x);
    }
}

fn push_lanes(mut w: u64, lanes: usize, mut f: impl FnMut(usize)) {
    if lanes < 64 {
        w &= (1u64 << lanes) - 1;
    }
    while w != 0 {
        let l = w.trailing_zeros() as usize;
        f(l);
        w &= w - 1;
    }
}

struct Frame {
    x: Vec<u64>,
    z: Vec<u64>,
    rec: Vec<u64>,
}

impl Frame {
    fn new(n: usize, m: usize) -> Self {
        Frame { x: vec![0; n], z: vec![0; n], rec: vec![0; m] }
    }

    fn apply(&mut self, op: &Op, base: usize) {
        match op {
            Op::Cnot(p) => {
                for &(c, t) in p {
                    self.x[t] ^= self.x[c];
                    self.z[c] ^= self.z[t];
                }
            }
            Op::ResetZ(q) | Op::ResetX(q) => {
                for &q in q {
                    self.x[q] = 0;
                    self.z[q] = 0;
                }
            }
            Op::MeasureZ(q) => {
                for (k, &q) in q.iter().enumerate() {
                    self.rec[base + k] = self.x[q];
                    self.z[q] = 0;
                }
            }
            Op::MeasureX(q) => {
                for (k, &q) in q.iter().enumerate() {
                    self.rec[base + k] = self.z[q];
                    self.x[q] = 0;
                }
            }
            _ => {}
        }
    }

    fn sample_noise(&mut self, ch: Channel, p: f64, targets: &[usize], lanes: usize, rng: &mut ChaCha8Rng) {
        if p <= 0.0 {
            return;
        }
        let groups = match ch {
            Channel::Dep2 => targets.len() / 2,
            _ => targets.len(),
        };
        // Geometric skipping over (group, lane) slots.
        let total = groups * lanes;
        let ln1p = (1.0 - p).ln();
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.random::<f64>();
            let skip = if p >= 1.0 { 0.0 } else { ((1.0 - u).ln() / ln1p).floor() };
            if !skip.is_finite() || pos as f64 + skip >= total as f64 {
                break;
            }
            pos += skip as usize;
            let (g, l) = (pos / lanes, pos % lanes);
            let bit = 1u64 << l;
            match ch {
                Channel::Dep1 => {
                    let (x, z) = Pauli1::ALL[rng.random_range(0..3)].bits();
                    let q = targets[g];
                    if x {
                        self.x[q] ^= bit;
                    }
                    if z {
                        self.z[q] ^= bit;
                    }
                }
                Channel::Dep2 => {
                    let k = rng.random_range(1..16usize);
                    for (q, c) in [(targets[2 * g], k >> 2), (targets[2 * g + 1], k & 3)] {
                        if c & 1 != 0 {
                            self.x[q] ^= bit;
                        }
                        if c & 2 != 0 {
                            self.z[q] ^= bit;
                        }
                    }
                }
                Channel::XErr => self.x[targets[g]] ^= bit,
                Channel::ZErr => self.z[targets[g]] ^= bit,
                Channel::Flip => self.rec[targets[g]] ^= bit,
            }
            pos += 1;
        }
    }
}

/// Symptom of one fault in a circuit with detector annotations.
pub fn propagate_fault(c: &Circuit, fault: &FaultLocation) -> Symptom {
    FrameProgram::new(c).propagate(fault)
}

/// Detection-event density per (shot, detector) from direct sampling.
pub fn detection_density(c: &Circuit, shots: usize, seed: u64) -> f64 {
    let prog = FrameProgram::new(c);
    if prog.num_detectors() == 0 {
        return 0.0;
    }
    let (d, _) = prog.sample(shots, seed);
    let flips: usize = d.iter().map(|r| r.count_ones()).sum();
    flips as f64 / (shots * prog.num_detectors()) as f64
}
