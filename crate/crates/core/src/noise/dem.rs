use std::collections::HashMap;
use std::fmt::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_noise, annotate_detectors, check_annotations, FaultLocation, FrameProgram, NoiseError, NoiseParams, Pauli1, Symptom};
use crate::algebra::CodeSpec;
use crate::circuit::{Channel, Circuit, Op};

/// Where an elementary fault came from: noise op index, target group
/// within the op, and Pauli component (0 for single-outcome channels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub op: u32,
    pub group: u32,
    pub component: u8,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op {} target {} component {}", self.op, self.group, self.component)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultMechanism {
    pub prob: f64,
    pub detectors: Vec<u32>,
    pub observables: Vec<u32>,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorErrorModel {
    pub mechanisms: Vec<FaultMechanism>,
    pub num_detectors: usize,
    pub num_observables: usize,
    /// Elementary Pauli components before merging, undetectable ones included.
    pub fault_count_n: u64,
    /// Physical rate the probabilities were evaluated at; 0 when unknown.
    #[serde(default)]
    pub reference_p: f64,
    /// Σ pᵢ/q over every component, silent ones included, with q = p/30.
    #[serde(default)]
    pub fault_units: f64,
}

/// Probability that exactly one of two independent events fires.
pub fn combine_probability(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p2) + p2 * (1.0 - p1)
}

fn dep2_component(k: usize) -> [(usize, Option<Pauli1>); 2] {
    let p = |c: usize| match c {
        1 => Some(Pauli1::X),
        2 => Some(Pauli1::Z),
        3 => Some(Pauli1::Y),
        _ => None,
    };
    [(0, p(k >> 2)), (1, p(k & 3))]
}

impl DetectorErrorModel {
    pub fn empty() -> Self {
        DetectorErrorModel {
            mechanisms: Vec::new(),
            num_detectors: 0,
            num_observables: 0,
            fault_count_n: 0,
            reference_p: 0.0,
            fault_units: 0.0,
        }
    }

    pub fn num_mechanisms(&self) -> usize {
        self.mechanisms.len()
    }

    /// Mechanism indices touching each detector.
    pub fn detector_columns(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_detectors];
        for (j, m) in self.mechanisms.iter().enumerate() {
            for &d in &m.detectors {
                out[d as usize].push(j);
            }
        }
        out
    }

    /// Same mechanisms with probabilities recomputed at a new rate, assuming
    /// every channel scales linearly with p.
    pub fn rescaled(&self, factor: f64) -> Self {
        let mut d = self.clone();
        for m in d.mechanisms.iter_mut() {
            m.prob = (m.prob * factor).min(0.5);
        }
        d.reference_p *= factor;
        d
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fault_count_n {}", self.fault_count_n);
        if self.reference_p > 0.0 {
            let _ = writeln!(s, "# reference_p {}", self.reference_p);
            let _ = writeln!(s, "# fault_units {}", self.fault_units);
        }
        for d in 0..self.num_detectors {
            let _ = writeln!(s, "detector D{d}");
        }
        for l in 0..self.num_observables {
            let _ = writeln!(s, "logical L{l}");
        }
        for m in &self.mechanisms {
            let _ = write!(s, "error({})", m.prob);
            for d in &m.detectors {
                let _ = write!(s, " D{d}");
            }
            for l in &m.observables {
                let _ = write!(s, " L{l}");
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, NoiseError> {
        let mut dem = DetectorErrorModel::empty();
        for (ln, raw) in text.lines().enumerate() {
            let err = |msg: String| NoiseError::Parse { line: ln + 1, msg };
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("# fault_count_n") {
                dem.fault_count_n = rest.trim().parse().map_err(|_| err("bad fault count".into()))?;
                continue;
            }
            if let Some(rest) = line.strip_prefix("# reference_p") {
                dem.reference_p = rest.trim().parse().map_err(|_| err("bad reference rate".into()))?;
                continue;
            }
            if let Some(rest) = line.strip_prefix("# fault_units") {
                dem.fault_units = rest.trim().parse().map_err(|_| err("bad fault units".into()))?;
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("nonempty");
            let idx = |t: &str, pre: char| -> Result<u32, NoiseError> {
                t.strip_prefix(pre).and_then(|v| v.parse().ok()).ok_or_else(|| err(format!("bad target {t:?}")))
            };
            if head == "detector" {
                let d = idx(parts.next().unwrap_or(""), 'D')?;
                dem.num_detectors = dem.num_detectors.max(d as usize + 1);
            } else if head == "logical" {
                let l = idx(parts.next().unwrap_or(""), 'L')?;
                dem.num_observables = dem.num_observables.max(l as usize + 1);
            } else if let Some(p) = head.strip_prefix("error(").and_then(|r| r.strip_suffix(')')) {
                let prob: f64 = p.parse().map_err(|_| err(format!("bad probability {p:?}")))?;
                if !(0.0..=1.0).contains(&prob) {
                    return Err(err(format!("probability {prob} out of range")));
                }
                let mut m = FaultMechanism { prob, detectors: Vec::new(), observables: Vec::new(), provenance: Vec::new() };
                for t in parts {
                    if t.starts_with('D') {
                        let d = idx(t, 'D')?;
                        dem.num_detectors = dem.num_detectors.max(d as usize + 1);
                        m.detectors.push(d);
                    } else {
                        let l = idx(t, 'L')?;
                        dem.num_observables = dem.num_observables.max(l as usize + 1);
                        m.observables.push(l);
                    }
                }
                m.detectors.sort_unstable();
                m.observables.sort_unstable();
                dem.mechanisms.push(m);
            } else {
                return Err(err(format!("unknown line {head:?}")));
            }
        }
        Ok(dem)
    }
}

/// Enumerates every elementary fault of the annotated noisy circuit,
/// merging equal symptoms.
pub fn build_dem(c: &Circuit) -> Result<DetectorErrorModel, NoiseError> {
    let prog = FrameProgram::new(c);
    // Basic X and Z faults after each qubit-noise op.
    let mut sites: Vec<(usize, usize)> = Vec::new();
    for (i, op) in c.ops.iter().enumerate() {
        if let Op::Noise { channel, targets, .. } = op {
            if *channel != Channel::Flip {
                sites.extend(targets.iter().map(|&q| (i, q)));
            }
        }
    }
    sites.sort_unstable();
    sites.dedup();
    let faults: Vec<FaultLocation> = sites
        .iter()
        .flat_map(|&(i, q)| [Pauli1::X, Pauli1::Z].map(|p| FaultLocation { after: i, paulis: vec![(q, p)] }))
        .collect();
    let symptoms: Vec<Symptom> = faults.par_chunks(64).flat_map_iter(|ch| prog.propagate_batch(ch)).collect();
    let basic: HashMap<(usize, usize), (&Symptom, &Symptom)> =
        sites.iter().enumerate().map(|(k, &s)| (s, (&symptoms[2 * k], &symptoms[2 * k + 1]))).collect();
    let pauli_symptom = |i: usize, q: usize, p: Pauli1| -> Symptom {
        let (sx, sz) = basic[&(i, q)];
        match p {
            Pauli1::X => sx.clone(),
            Pauli1::Z => sz.clone(),
            Pauli1::Y => sx.xor(sz),
        }
    };

    let mut dem = DetectorErrorModel {
        mechanisms: Vec::new(),
        num_detectors: prog.num_detectors(),
        num_observables: prog.num_observables(),
        fault_count_n: 0,
        reference_p: 0.0,
        fault_units: 0.0,
    };
    let mut index: HashMap<Symptom, usize> = HashMap::new();
    let mut add = |sym: Symptom, prob: f64, prov: Provenance, dem: &mut DetectorErrorModel| {
        dem.fault_count_n += 1;
        if sym.is_empty() || prob <= 0.0 {
            return;
        }
        match index.get(&sym) {
            Some(&j) => {
                let m = &mut dem.mechanisms[j];
                m.prob = combine_probability(m.prob, prob);
                m.provenance.push(prov);
            }
            None => {
                index.insert(sym.clone(), dem.mechanisms.len());
                dem.mechanisms.push(FaultMechanism {
                    prob,
                    detectors: sym.detectors,
                    observables: sym.observables,
                    provenance: vec![prov],
                });
            }
        }
    };
    for (i, op) in c.ops.iter().enumerate() {
        let Op::Noise { channel, p, targets } = op else { continue };
        let prov = |g: usize, k: usize| Provenance { op: i as u32, group: g as u32, component: k as u8 };
        match channel {
            Channel::Dep1 => {
                for (g, &q) in targets.iter().enumerate() {
                    for (k, pa) in Pauli1::ALL.into_iter().enumerate() {
                        add(pauli_symptom(i, q, pa), p / 3.0, prov(g, k), &mut dem);
                    }
                }
            }
            Channel::Dep2 => {
                for (g, pair) in targets.chunks(2).enumerate() {
                    for k in 1..16 {
                        let mut s = Symptom::default();
                        for (w, pa) in dep2_component(k) {
                            if let Some(pa) = pa {
                                s = s.xor(&pauli_symptom(i, pair[w], pa));
                            }
                        }
                        add(s, p / 15.0, prov(g, k), &mut dem);
                    }
                }
            }
            Channel::XErr | Channel::ZErr => {
                let pa = if *channel == Channel::XErr { Pauli1::X } else { Pauli1::Z };
                for (g, &q) in targets.iter().enumerate() {
                    add(pauli_symptom(i, q, pa), *p, prov(g, 0), &mut dem);
                }
            }
            Channel::Flip => {
                for (g, &m) in targets.iter().enumerate() {
                    add(prog.measurement_symptom(m), *p, prov(g, 0), &mut dem);
                }
            }
        }
    }
    if let Some(m) = dem.mechanisms.iter().find(|m| m.detectors.is_empty()) {
        return Err(NoiseError::UndetectableLogicalFault {
            observables: m.observables.clone(),
            provenance: m.provenance[0].to_string(),
        });
    }
    Ok(dem)
}

/// Noisy, detector-annotated circuit and its error model. Existing
/// detector annotations are kept after a determinism check; otherwise
/// detectors are discovered.
pub fn compile_noisy(spec: Option<&CodeSpec>, c: &Circuit, params: &NoiseParams) -> Result<(Circuit, DetectorErrorModel), NoiseError> {
    let annotated = if c.num_detectors() > 0 {
        check_annotations(c)?;
        c.clone()
    } else {
        annotate_detectors(c, spec)?
    };
    let noisy = apply_noise(&annotated, params)?;
    let mut dem = build_dem(&noisy)?;
    dem.reference_p = params.p;
    dem.fault_units = super::count_faults(&noisy, params.p).weighted;
    Ok((noisy, dem))
}
