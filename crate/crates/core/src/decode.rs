//! Belief propagation with ordered-statistics post-processing over detector
//! error models, and circuit-distance upper bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::Bits;
use crate::noise::{DetectorErrorModel, FaultMechanism};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("syndrome lies outside the column space of the error model")]
    SingularSystem,
    #[error("syndrome has {got} bits, expected {expected}")]
    SyndromeLength { expected: usize, got: usize },
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),
    #[error("error model has no observables")]
    NoObservables,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpVariant {
    ProductSum,
    MinSum { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpSchedule {
    Parallel,
    Serial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub osd_order: usize,
    pub bp_variant: BpVariant,
    pub schedule: BpSchedule,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { max_iterations: 10_000, osd_order: 20, bp_variant: BpVariant::ProductSum, schedule: BpSchedule::Parallel }
    }
}

impl DecoderConfig {
    /// Scaled min-sum with serial updates and a short iteration cap, for
    /// high-volume sampling.
    pub fn sampling() -> Self {
        DecoderConfig { max_iterations: 30, osd_order: 20, bp_variant: BpVariant::MinSum { scale: 0.75 }, schedule: BpSchedule::Serial }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.max_iterations == 0 {
            return Err(DecodeError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if let BpVariant::MinSum { scale } = self.bp_variant {
            if !(scale > 0.0 && scale <= 1.0) {
                return Err(DecodeError::InvalidConfig(format!("min-sum scale {scale} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutput {
    /// Posterior log-likelihood ratios ln(P(0)/P(1)) per mechanism.
    pub posterior: Vec<f64>,
    pub hard: Vec<bool>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub correction: Vec<usize>,
    pub observable_flips: Bits,
    pub converged: bool,
    pub iterations_used: usize,
}

const LLR_CLIP: f64 = 50.0;

/// Decoder bound to one error model; reusable across syndromes.
#[derive(Debug, Clone)]
pub struct Decoder {
    cfg: DecoderConfig,
    num_detectors: usize,
    num_observables: usize,
    /// Edges grouped by detector: edge e joins detector `check_of` range to `edge_var[e]`.
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    /// Edge ids grouped by mechanism.
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
    priors: Vec<f64>,
    columns: Vec<Bits>,
    observables: Vec<Vec<u32>>,
    rank: usize,
}

fn llr(p: f64) -> f64 {
    let p = p.clamp(1e-300, 1.0 - 1e-16);
    ((1.0 - p) / p).ln().clamp(-LLR_CLIP, LLR_CLIP)
}

impl Decoder {
    pub fn new(dem: &DetectorErrorModel, cfg: DecoderConfig) -> Result<Self, DecodeError> {
        let probs: Vec<f64> = dem.mechanisms.iter().map(|m| m.prob).collect();
        Self::with_priors(dem, &probs, cfg)
    }

    /// Same graph with explicit per-mechanism probabilities.
    pub fn with_priors(dem: &DetectorErrorModel, probs: &[f64], cfg: DecoderConfig) -> Result<Self, DecodeError> {
        cfg.validate()?;
        let nd = dem.num_detectors;
        let nm = dem.mechanisms.len();
        let mut deg = vec![0usize; nd];
        for m in &dem.mechanisms {
            for &d in &m.detectors {
                deg[d as usize] += 1;
            }
        }
        let mut check_ptr = vec![0usize; nd + 1];
        for d in 0..nd {
            check_ptr[d + 1] = check_ptr[d] + deg[d];
        }
        let mut fill = check_ptr.clone();
        let mut edge_var = vec![0u32; check_ptr[nd]];
        let mut var_ptr = vec![0usize; nm + 1];
        let mut var_edges = Vec::with_capacity(edge_var.len());
        for (j, m) in dem.mechanisms.iter().enumerate() {
            for &d in &m.detectors {
                let e = fill[d as usize];
                fill[d as usize] += 1;
                edge_var[e] = j as u32;
                var_edges.push(e as u32);
            }
            var_ptr[j + 1] = var_edges.len();
        }
        let columns: Vec<Bits> =
            dem.mechanisms.iter().map(|m| Bits::from_indices(nd, m.detectors.iter().map(|&d| d as usize))).collect();
        let rank = {
            let mut el = Elimination::new(nd);
            for c in &columns {
                el.insert(c);
                if el.rank() == nd {
                    break;
                }
            }
            el.rank()
        };
        Ok(Decoder {
            cfg,
            num_detectors: nd,
            num_observables: dem.num_observables,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
            priors: probs.iter().map(|&p| llr(p)).collect(),
            columns,
            observables: dem.mechanisms.iter().map(|m| m.observables.clone()).collect(),
            rank,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn num_mechanisms(&self) -> usize {
        self.priors.len()
    }

    /// Detectors flipped by a set of mechanisms.
    pub fn syndrome_of(&self, mechanisms: &[usize]) -> Bits {
        let mut s = Bits::zeros(self.num_detectors);
        for &j in mechanisms {
            s.xor_assign(&self.columns[j]);
        }
        s
    }

    pub fn observables_of(&self, mechanisms: &[usize]) -> Bits {
        let mut o = Bits::zeros(self.num_observables);
        for &j in mechanisms {
            for &k in &self.observables[j] {
                o.flip(k as usize);
            }
        }
        o
    }

    fn check_len(&self, s: &Bits) -> Result<(), DecodeError> {
        if s.len() != self.num_detectors {
            return Err(DecodeError::SyndromeLength { expected: self.num_detectors, got: s.len() });
        }
        Ok(())
    }

    fn satisfies(&self, hard: &[bool], s: &Bits) -> bool {
        (0..self.num_detectors).all(|d| {
            let par = self.edge_var[self.check_ptr[d]..self.check_ptr[d + 1]].iter().fold(false, |a, &v| a ^ hard[v as usize]);
            par == s.get(d)
        })
    }

    /// New messages for the edges of detector `d` from incoming `q`.
    fn check_update(&self, d: usize, flip: bool, q: &[f64], r: &mut [f64], scratch: &mut Vec<f64>) {
        let (a, b) = (self.check_ptr[d], self.check_ptr[d + 1]);
        let n = b - a;
        if n == 0 {
            return;
        }
        match self.cfg.bp_variant {
            BpVariant::ProductSum => {
                scratch.clear();
                scratch.extend(q[a..b].iter().map(|&x| (0.5 * x).tanh()));
                // Prefix/suffix products exclude each edge without division.
                let mut prefix = 1.0;
                for k in 0..n {
                    r[a + k] = prefix;
                    prefix *= scratch[k];
                }
                let mut suffix = 1.0;
                for k in (0..n).rev() {
                    let mut t = r[a + k] * suffix;
                    suffix *= scratch[k];
                    if flip {
                        t = -t;
                    }
                    let t = t.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                    r[a + k] = (2.0 * t.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                }
            }
            BpVariant::MinSum { scale } => {
                let mut sign = flip;
                let (mut m1, mut m2, mut arg) = (f64::INFINITY, f64::INFINITY, 0);
                for k in 0..n {
                    let x = q[a + k];
                    sign ^= x < 0.0;
                    let ax = x.abs();
                    if ax < m1 {
                        m2 = m1;
                        m1 = ax;
                        arg = k;
                    } else if ax < m2 {
                        m2 = ax;
                    }
                }
                for k in 0..n {
                    let mag = if k == arg { m2 } else { m1 };
                    let s = sign ^ (q[a + k] < 0.0);
                    let v = scale * mag.min(LLR_CLIP);
                    r[a + k] = if s { -v } else { v };
                }
            }
        }
    }

    /// Belief propagation on the mechanism–detector graph.
    pub fn bp(&self, syndrome: &Bits) -> Result<BpOutput, DecodeError> {
        self.run_bp(syndrome, true)
    }

    /// Runs all `max_iterations` regardless of convergence.
    pub fn bp_fixed(&self, syndrome: &Bits) -> Result<BpOutput, DecodeError> {
        self.run_bp(syndrome, false)
    }

    fn run_bp(&self, syndrome: &Bits, stop_early: bool) -> Result<BpOutput, DecodeError> {
        self.check_len(syndrome)?;
        let nm = self.priors.len();
        let ne = self.edge_var.len();
        let mut hard = vec![false; nm];
        if syndrome.is_zero() && stop_early {
            return Ok(BpOutput { posterior: self.priors.clone(), hard, converged: true, iterations: 0 });
        }
        let mut q: Vec<f64> = self.edge_var.iter().map(|&v| self.priors[v as usize]).collect();
        let mut r = vec![0.0; ne];
        let mut post = self.priors.clone();
        let mut scratch = Vec::new();
        for it in 1..=self.cfg.max_iterations {
            match self.cfg.schedule {
                BpSchedule::Parallel => {
                    for d in 0..self.num_detectors {
                        self.check_update(d, syndrome.get(d), &q, &mut r, &mut scratch);
                    }
                    for j in 0..nm {
                        let es = &self.var_edges[self.var_ptr[j]..self.var_ptr[j + 1]];
                        let total = self.priors[j] + es.iter().map(|&e| r[e as usize]).sum::<f64>();
                        post[j] = total;
                        for &e in es {
                            q[e as usize] = total - r[e as usize];
                        }
                    }
                }
                BpSchedule::Serial => {
                    for d in 0..self.num_detectors {
                        let (a, b) = (self.check_ptr[d], self.check_ptr[d + 1]);
                        for e in a..b {
                            q[e] = post[self.edge_var[e] as usize] - r[e];
                        }
                        self.check_update(d, syndrome.get(d), &q, &mut r, &mut scratch);
                        for e in a..b {
                            post[self.edge_var[e] as usize] = q[e] + r[e];
                        }
                    }
                }
            }
            for j in 0..nm {
                hard[j] = post[j] < 0.0;
            }
            if stop_early && self.satisfies(&hard, syndrome) {
                return Ok(BpOutput { posterior: post, hard, converged: true, iterations: it });
            }
        }
        let iterations = self.cfg.max_iterations;
        let converged = self.satisfies(&hard, syndrome);
        Ok(BpOutput { posterior: post, hard, converged, iterations })
    }

    /// Ordered-statistics decoding with a combination sweep over the
    /// `osd_order` least reliable non-pivot positions.
    pub fn osd(&self, syndrome: &Bits, posterior: &[f64]) -> Result<Vec<usize>, DecodeError> {
        self.check_len(syndrome)?;
        if syndrome.is_zero() {
            return Ok(Vec::new());
        }
        let nm = self.priors.len();
        let mut order: Vec<usize> = (0..nm).collect();
        order.sort_by(|&a, &b| posterior[a].total_cmp(&posterior[b]).then(a.cmp(&b)));
        let mut el = Elimination::new(self.num_detectors);
        let mut pivots = Vec::new();
        let mut rest = Vec::new();
        let mut scanned = 0;
        for &j in &order {
            if el.rank() == self.rank {
                break;
            }
            scanned += 1;
            if el.insert(&self.columns[j]) {
                pivots.push(j);
            } else {
                rest.push(j);
            }
        }
        rest.extend_from_slice(&order[scanned..]);
        let base = el.solve(syndrome).ok_or(DecodeError::SingularSystem)?;
        let weight = |x: &Bits, extra: &[usize]| -> f64 {
            x.iter_ones().map(|k| self.priors[pivots[k]]).sum::<f64>() + extra.iter().map(|&j| self.priors[j]).sum::<f64>()
        };
        let mut best = (weight(&base, &[]), base.clone(), Vec::new());
        let k = self.cfg.osd_order.min(rest.len());
        if k > 0 {
            let combos: Vec<Bits> = rest[..k].iter().map(|&j| el.solve(&self.columns[j]).expect("in span")).collect();
            for a in 0..k {
                let mut xa = base.clone();
                xa.xor_assign(&combos[a]);
                let w = weight(&xa, &[rest[a]]);
                if w < best.0 {
                    best = (w, xa.clone(), vec![rest[a]]);
                }
                for b in a + 1..k {
                    let mut xb = xa.clone();
                    xb.xor_assign(&combos[b]);
                    let w = weight(&xb, &[rest[a], rest[b]]);
                    if w < best.0 {
                        best = (w, xb, vec![rest[a], rest[b]]);
                    }
                }
            }
        }
        let mut corr: Vec<usize> = best.1.iter_ones().map(|k| pivots[k]).collect();
        corr.extend(best.2);
        corr.sort_unstable();
        Ok(corr)
    }

    /// BP, falling back to OSD when BP does not reproduce the syndrome.
    pub fn decode(&self, syndrome: &Bits) -> Result<DecodeResult, DecodeError> {
        let bp = self.bp(syndrome)?;
        let correction = if bp.converged {
            bp.hard.iter().enumerate().filter(|(_, &h)| h).map(|(j, _)| j).collect()
        } else {
            self.osd(syndrome, &bp.posterior)?
        };
        Ok(DecodeResult {
            observable_flips: self.observables_of(&correction),
            correction,
            converged: bp.converged,
            iterations_used: bp.iterations,
        })
    }
}

/// Column-by-column GF(2) elimination keeping fully reduced pivot rows and,
/// for each, the combination of accepted columns producing it.
#[derive(Debug, Clone)]
struct Elimination {
    len: usize,
    rows: Vec<(usize, Bits, Bits)>,
    /// Row index holding each pivot position, if any.
    pivot_row: Vec<Option<usize>>,
}

impl Elimination {
    fn new(len: usize) -> Self {
        Elimination { len, rows: Vec::new(), pivot_row: vec![None; len] }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &Bits, track: usize) -> (Bits, Bits) {
        let mut v = v.clone();
        let mut combo = Bits::zeros(track);
        for (p, row, c) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
        (v, combo)
    }

    /// Adds a column; false when it is already in the span.
    fn insert(&mut self, col: &Bits) -> bool {
        let (r, mut combo) = self.reduce(col, self.len);
        let Some(p) = r.first_one() else { return false };
        combo.flip(self.rows.len());
        for (_, row, c) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&r);
                c.xor_assign(&combo);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push((p, r, combo));
        true
    }

    /// Accepted-column combination summing to `s`.
    fn solve(&self, s: &Bits) -> Option<Bits> {
        let (r, combo) = self.reduce(s, self.len);
        r.is_zero().then_some(combo)
    }
}

/// Posterior LLRs and hard decision by belief propagation.
pub fn bp_decode(dem: &DetectorErrorModel, syndrome: &Bits, cfg: &DecoderConfig) -> Result<BpOutput, DecodeError> {
    Decoder::new(dem, *cfg)?.bp(syndrome)
}

/// OSD post-processing given BP posteriors.
pub fn osd_decode(dem: &DetectorErrorModel, syndrome: &Bits, llrs: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult, DecodeError> {
    let d = Decoder::new(dem, *cfg)?;
    let correction = d.osd(syndrome, llrs)?;
    Ok(DecodeResult { observable_flips: d.observables_of(&correction), correction, converged: false, iterations_used: 0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub upper_bound: usize,
    /// Mechanism indices of the lightest undetected logical fault set found.
    pub witness: Vec<usize>,
    pub observable: usize,
}

/// Upper bound on the number of faults producing an undetected logical
/// flip: each observable is appended as an extra check with syndrome 1 and
/// decoded under uniform priors, randomly perturbed across trials.
pub fn estimate_circuit_distance(
    dem: &DetectorErrorModel,
    cfg: &DecoderConfig,
    trials: usize,
    seed: u64,
) -> Result<DistanceEstimate, DecodeError> {
    if dem.num_observables == 0 {
        return Err(DecodeError::NoObservables);
    }
    if let Some((j, m)) = dem.mechanisms.iter().enumerate().find(|(_, m)| m.detectors.is_empty() && !m.observables.is_empty()) {
        return Ok(DistanceEstimate { upper_bound: 1, witness: vec![j], observable: m.observables[0] as usize });
    }
    let nd = dem.num_detectors;
    let mut best: Option<DistanceEstimate> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = DecoderConfig { max_iterations: cfg.max_iterations.min(200), ..*cfg };
    for obs in 0..dem.num_observables {
        let mut aug = dem.clone();
        aug.num_detectors = nd + 1;
        for m in aug.mechanisms.iter_mut() {
            if m.observables.contains(&(obs as u32)) {
                m.detectors.push(nd as u32);
            }
        }
        let mut s = Bits::zeros(nd + 1);
        s.set(nd, true);
        for t in 0..trials.max(1) {
            let probs: Vec<f64> = (0..aug.mechanisms.len())
                .map(|_| if t == 0 { 0.01 } else { 0.01 * (rng.random::<f64>() * 2.0 - 1.0).exp() })
                .collect();
            let dec = Decoder::with_priors(&aug, &probs, cfg)?;
            let res = dec.decode(&s)?;
            let w = res.correction.len();
            if w > 0 && best.as_ref().is_none_or(|b| w < b.upper_bound) {
                best = Some(DistanceEstimate { upper_bound: w, witness: res.correction, observable: obs });
            }
        }
    }
    best.ok_or(DecodeError::SingularSystem)
}

/// Toy error model from explicit (probability, detectors, observables) triples.
pub fn dem_from_parts(num_detectors: usize, num_observables: usize, parts: &[(f64, Vec<u32>, Vec<u32>)]) -> DetectorErrorModel {
    DetectorErrorModel {
        mechanisms: parts
            .iter()
            .map(|(p, d, o)| FaultMechanism { prob: *p, detectors: d.clone(), observables: o.clone(), provenance: Vec::new() })
            .collect(),
        num_detectors,
        num_observables,
        fault_count_n: parts.len() as u64,
        reference_p: 0.0,
        fault_units: 0.0,
    }
}
