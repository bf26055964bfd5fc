//! Circuit IR, text format and builders for cycles, shift blocks and experiments.

mod build;
mod text;

pub use build::*;
pub use text::{parse, serialize};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{CodeSpec, Monomial, Role};
use crate::schedule::{CheckType, ScheduleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("schedule does not fit the code: {0}")]
    ScheduleMismatch(String),
    #[error("schedule pair does not align with {kind}: {reason}")]
    PairMismatch { kind: String, reason: String },
    #[error("shift-circuit experiments need an even number of rounds, got {0}")]
    OddRounds(usize),
    #[error("need at least {min} rounds, got {got}")]
    TooFewRounds { min: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn parse(s: &str) -> Option<Basis> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Some(Basis::Z),
            "x" => Some(Basis::X),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Single-qubit depolarizing; targets are qubits.
    Dep1,
    /// Two-qubit depolarizing; targets are qubit pairs, flattened.
    Dep2,
    XErr,
    ZErr,
    /// Classical flip; targets are measurement indices.
    Flip,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Dep1 => "DEP1",
            Channel::Dep2 => "DEP2",
            Channel::XErr => "XERR",
            Channel::ZErr => "ZERR",
            Channel::Flip => "FLIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    ResetZ(Vec<usize>),
    ResetX(Vec<usize>),
    MeasureZ(Vec<usize>),
    MeasureX(Vec<usize>),
    Cnot(Vec<(usize, usize)>),
    Tick,
    Detector(Vec<usize>),
    Observable(usize, Vec<usize>),
    Noise { channel: Channel, p: f64, targets: Vec<usize> },
    NoisyBegin,
    NoisyEnd,
}

impl Op {
    pub fn is_gate(&self) -> bool {
        matches!(self, Op::ResetZ(_) | Op::ResetX(_) | Op::MeasureZ(_) | Op::MeasureX(_) | Op::Cnot(_))
    }

    /// Qubits acted on by a gate op.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Op::ResetZ(q) | Op::ResetX(q) | Op::MeasureZ(q) | Op::MeasureX(q) => q.clone(),
            Op::Cnot(p) => p.iter().flat_map(|&(c, t)| [c, t]).collect(),
            _ => Vec::new(),
        }
    }
}

/// What a measurement reports, in code coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasLabel {
    Check { check: CheckType, at: Monomial },
    Data { role: Role, at: Monomial },
    /// Freshly swapped-out qubit whose outcome is fixed noiselessly.
    Aux,
    Unlabeled,
}

#[derive(Debug, Clone, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<Op>,
    /// One label per measurement, in program order.
    pub labels: Vec<MeasLabel>,
    /// Accumulated shift: physical (role, v) holds code (role, frame·v).
    pub frame: Monomial,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits && self.ops == other.ops
    }
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ops: Vec::new(), labels: Vec::new(), frame: Monomial::IDENTITY }
    }

    pub fn num_measurements(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                Op::MeasureZ(q) | Op::MeasureX(q) => q.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn num_detectors(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Detector(_))).count()
    }

    pub fn num_observables(&self) -> usize {
        self.ops
            .iter()
            .filter_map(|op| match op {
                Op::Observable(k, _) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn detectors(&self) -> Vec<Vec<usize>> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                Op::Detector(m) => Some(m.clone()),
                _ => None,
            })
            .collect()
    }

    /// Observable supports over measurement indices; repeated declarations accumulate.
    pub fn observables(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_observables()];
        for op in &self.ops {
            if let Op::Observable(k, m) = op {
                out[*k].extend_from_slice(m);
            }
        }
        out
    }

    /// Number of Tick-separated layers holding at least one gate.
    pub fn timesteps(&self) -> usize {
        self.layers().iter().filter(|l| l.iter().any(|&i| self.ops[i].is_gate())).count()
    }

    /// Op indices grouped by timestep.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for (i, op) in self.ops.iter().enumerate() {
            if matches!(op, Op::Tick) {
                out.push(Vec::new());
            } else {
                out.last_mut().expect("nonempty").push(i);
            }
        }
        out
    }

    /// (timestep, qubit) of every measurement in program order.
    pub fn measurement_log(&self) -> Vec<(usize, usize)> {
        let mut t = 0;
        let mut out = Vec::new();
        for op in &self.ops {
            match op {
                Op::Tick => t += 1,
                Op::MeasureZ(q) | Op::MeasureX(q) => out.extend(q.iter().map(|&q| (t, q))),
                _ => {}
            }
        }
        out
    }

    pub fn cnot_count(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                Op::Cnot(p) => p.len(),
                _ => 0,
            })
            .sum()
    }

    /// Checks that every qubit appears at most once per timestep and that
    /// CNOT controls differ from targets.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = vec![usize::MAX; self.num_qubits];
        for (t, layer) in self.layers().iter().enumerate() {
            for &i in layer {
                if let Op::Cnot(p) = &self.ops[i] {
                    if let Some(&(c, _)) = p.iter().find(|(c, t)| c == t) {
                        return Err(format!("timestep {t}: CNOT on {c} with itself"));
                    }
                }
                for q in self.ops[i].qubits() {
                    if q >= self.num_qubits {
                        return Err(format!("timestep {t}: qubit {q} out of range"));
                    }
                    if seen[q] == t {
                        return Err(format!("timestep {t}: qubit {q} used twice"));
                    }
                    seen[q] = t;
                }
            }
        }
        Ok(())
    }

    /// Concatenates `other` after `self`, shifting measurement indices.
    pub fn append(&mut self, other: &Circuit) {
        let offset = self.num_measurements();
        if self.ops.iter().any(Op::is_gate) && other.ops.iter().any(Op::is_gate) {
            self.ops.push(Op::Tick);
        }
        for op in &other.ops {
            self.ops.push(match op {
                Op::Detector(m) => Op::Detector(m.iter().map(|x| x + offset).collect()),
                Op::Observable(k, m) => Op::Observable(*k, m.iter().map(|x| x + offset).collect()),
                Op::Noise { channel: Channel::Flip, p, targets } => {
                    Op::Noise { channel: Channel::Flip, p: *p, targets: targets.iter().map(|x| x + offset).collect() }
                }
                op => op.clone(),
            });
        }
        self.labels.extend_from_slice(&other.labels);
        self.num_qubits = self.num_qubits.max(other.num_qubits);
    }

    /// Circuit with all noise, detector and observable annotations removed.
    pub fn without_annotations(&self) -> Circuit {
        let mut c = self.clone();
        c.ops.retain(|op| !matches!(op, Op::Noise { .. } | Op::Detector(_) | Op::Observable(..)));
        c
    }

    /// Code-coordinate role of every physical qubit under the current frame.
    pub fn role_map(&self, spec: &CodeSpec) -> Vec<(Role, Monomial)> {
        role_map(spec, self.frame)
    }
}

/// Physical qubit → (role, code coordinate) under a frame.
pub fn role_map(spec: &CodeSpec, frame: Monomial) -> Vec<(Role, Monomial)> {
    (0..spec.num_qubits())
        .map(|q| {
            let (r, v) = spec.role_of(q);
            (r, spec.params.mul(frame, v))
        })
        .collect()
}


#[cfg(test)]
mod tests;
