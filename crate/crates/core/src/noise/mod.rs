//! Circuit-level noise, Pauli-frame propagation, detector discovery and
//! detector error models.

mod dem;
mod detectors;
mod frame;

pub use dem::*;
pub use detectors::*;
pub use frame::*;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Channel, Circuit, Op};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("measurement parities are not deterministic: {0}")]
    NondeterministicCircuit(String),
    #[error("a single fault flips observable(s) {observables:?} without any detector ({provenance})")]
    UndetectableLogicalFault { observables: Vec<u32>, provenance: String },
    #[error("invalid noise parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Channel strengths as multiples of the physical rate `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
    /// Two-qubit depolarizing after each CNOT.
    pub cnot: f64,
    /// Single-qubit depolarizing on qubits idle during a CNOT layer.
    pub idle_cnot: f64,
    /// Bit-flip (phase-flip for X resets) after each reset.
    pub reset: f64,
    /// Classical flip of each measurement outcome.
    pub measure: f64,
    /// Single-qubit depolarizing on qubits idle during reset/measure layers.
    pub idle_reset_measure: f64,
}

impl NoiseParams {
    pub fn si1000(p: f64) -> Self {
        NoiseParams { p, cnot: 1.0, idle_cnot: 0.1, reset: 2.0, measure: 5.0, idle_reset_measure: 2.0 }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..0.1).contains(&self.p) {
            return Err(NoiseError::InvalidParams(format!("p = {} outside [0, 0.1)", self.p)));
        }
        for (name, m) in [
            ("cnot", self.cnot),
            ("idle_cnot", self.idle_cnot),
            ("reset", self.reset),
            ("measure", self.measure),
            ("idle_reset_measure", self.idle_reset_measure),
        ] {
            let q = m * self.p;
            if !(0.0..=0.75).contains(&q) {
                return Err(NoiseError::InvalidParams(format!("{name} channel probability {q} outside [0, 0.75]")));
            }
        }
        Ok(())
    }
}

/// Inserts the channel table between the noisy markers. `p = 0` returns
/// the circuit unchanged.
pub fn apply_noise(c: &Circuit, params: &NoiseParams) -> Result<Circuit, NoiseError> {
    params.validate()?;
    if params.p == 0.0 {
        return Ok(c.clone());
    }
    let p = params.p;
    let mut out = c.clone();
    out.ops.clear();
    let mut noisy = false;
    let mut meas = 0usize;
    let mut touched = vec![false; c.num_qubits];
    let layers = c.layers();
    for (li, layer) in layers.iter().enumerate() {
        if li > 0 {
            out.ops.push(Op::Tick);
        }
        let last_gate = layer.iter().rposition(|&i| c.ops[i].is_gate());
        let has_cnot = layer.iter().any(|&i| matches!(c.ops[i], Op::Cnot(_)));
        touched.iter_mut().for_each(|t| *t = false);
        for (pos, &i) in layer.iter().enumerate() {
            let op = &c.ops[i];
            match op {
                Op::NoisyBegin => noisy = true,
                Op::NoisyEnd => noisy = false,
                _ => {}
            }
            out.ops.push(op.clone());
            for q in op.qubits() {
                touched[q] = true;
            }
            let n_meas = match op {
                Op::MeasureZ(q) | Op::MeasureX(q) => q.len(),
                _ => 0,
            };
            if noisy {
                let noise = |channel, m: f64, targets: Vec<usize>| Op::Noise { channel, p: m * p, targets };
                match op {
                    Op::Cnot(pairs) if params.cnot > 0.0 => {
                        out.ops.push(noise(Channel::Dep2, params.cnot, pairs.iter().flat_map(|&(a, b)| [a, b]).collect()))
                    }
                    Op::ResetZ(q) if params.reset > 0.0 => out.ops.push(noise(Channel::XErr, params.reset, q.clone())),
                    Op::ResetX(q) if params.reset > 0.0 => out.ops.push(noise(Channel::ZErr, params.reset, q.clone())),
                    Op::MeasureZ(_) | Op::MeasureX(_) if params.measure > 0.0 => {
                        out.ops.push(noise(Channel::Flip, params.measure, (meas..meas + n_meas).collect()))
                    }
                    _ => {}
                }
            }
            meas += n_meas;
            if noisy && Some(pos) == last_gate {
                let m = if has_cnot { params.idle_cnot } else { params.idle_reset_measure };
                let idle: Vec<usize> = (0..c.num_qubits).filter(|&q| !touched[q]).collect();
                if m > 0.0 && !idle.is_empty() {
                    out.ops.push(Op::Noise { channel: Channel::Dep1, p: m * p, targets: idle });
                }
            }
        }
    }
    Ok(out)
}

/// Number of independent Pauli components a channel contributes per target
/// group (qubit, qubit pair or measurement).
pub fn components(ch: Channel) -> usize {
    match ch {
        Channel::Dep1 => 3,
        Channel::Dep2 => 15,
        Channel::XErr | Channel::ZErr | Channel::Flip => 1,
    }
}

fn groups(ch: Channel, targets: &[usize]) -> usize {
    match ch {
        Channel::Dep2 => targets.len() / 2,
        _ => targets.len(),
    }
}

/// Elementary-fault totals of a noisy circuit under three conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultCounts {
    /// One per Pauli component of every channel (15 per two-qubit
    /// depolarizing, 3 per single-qubit depolarizing, 1 per flip).
    pub components: u64,
    /// Σ pᵢ / q over all components with q = p/30: each channel counted in
    /// units of the uniform fault rate q.
    pub weighted: f64,
    /// Σ pᵢ / q restricted to two-qubit gate and measurement channels.
    pub gate_and_measure: f64,
}

pub fn count_faults(c: &Circuit, p: f64) -> FaultCounts {
    let q = p / 30.0;
    let mut out = FaultCounts { components: 0, weighted: 0.0, gate_and_measure: 0.0 };
    for op in &c.ops {
        if let Op::Noise { channel, p: pc, targets } = op {
            let g = groups(*channel, targets);
            out.components += (g * components(*channel)) as u64;
            if q > 0.0 {
                let w = g as f64 * pc / q;
                out.weighted += w;
                if matches!(channel, Channel::Dep2 | Channel::Flip) {
                    out.gate_and_measure += w;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
