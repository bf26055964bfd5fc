use std::collections::HashMap;

use super::NoiseError;
use crate::algebra::CodeSpec;
use crate::circuit::{Circuit, MeasLabel, Op};
use crate::gf2::{BitMatrix, Bits, IncrementalBasis};
use crate::schedule::CheckType;
use crate::tableau::run_deterministic;

/// How the detector set was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiscoveryStats {
    pub from_labels: usize,
    pub from_nullspace: usize,
    /// Dimension of the space of noiselessly deterministic parities,
    /// observables included.
    pub deterministic_dim: usize,
}

/// Deterministic measurement parities: label-matched candidates (repeated
/// checks, first-round checks, auxiliary outcomes, final checks against
/// data readout), each verified by symbolic simulation, then completed
/// from the null space of the outcome map if anything is missing.
pub fn discover_detectors(c: &Circuit, spec: Option<&CodeSpec>) -> Result<(Vec<Vec<usize>>, DiscoveryStats), NoiseError> {
    let bare = c.without_annotations();
    let recs = run_deterministic(&bare);
    let m = recs.len();
    let lin: Vec<Bits> = recs
        .iter()
        .map(|r| {
            let mut e = r.expr.clone();
            e.set(0, false);
            e
        })
        .collect();
    let parity = |ms: &[usize]| {
        let mut acc = Bits::zeros(lin.first().map_or(1, |e| e.len()));
        for &k in ms {
            acc.xor_assign(&lin[k]);
        }
        acc
    };

    let width = lin.first().map_or(1, |e| e.len());
    let mut outcome_rank = IncrementalBasis::new(width, 0);
    for e in &lin {
        let _ = outcome_rank.insert(e);
    }
    let target = m - outcome_rank.rank();

    let mut span = IncrementalBasis::new(m.max(1), 0);
    for (k, obs) in c.observables().iter().enumerate() {
        if !parity(obs).is_zero() {
            return Err(NoiseError::NondeterministicCircuit(format!("observable {k} is random")));
        }
        let _ = span.insert(&Bits::from_indices(m.max(1), obs.iter().copied()));
    }

    let mut out: Vec<Vec<usize>> = Vec::new();
    let accept = |ms: Vec<usize>, span: &mut IncrementalBasis, out: &mut Vec<Vec<usize>>| {
        if ms.is_empty() || !parity(&ms).is_zero() {
            return;
        }
        if span.insert(&Bits::from_indices(m, ms.iter().copied())).is_ok() {
            out.push(ms);
        }
    };

    let mut by_check: HashMap<(CheckType, crate::algebra::Monomial), Vec<usize>> = HashMap::new();
    let mut data: HashMap<(crate::algebra::Role, crate::algebra::Monomial), usize> = HashMap::new();
    let mut check_order = Vec::new();
    for (k, lab) in c.labels.iter().enumerate().take(m) {
        match *lab {
            MeasLabel::Check { check, at } => {
                let v = by_check.entry((check, at)).or_default();
                if v.is_empty() {
                    check_order.push((check, at));
                }
                v.push(k);
            }
            MeasLabel::Data { role, at } => {
                data.insert((role, at), k);
            }
            MeasLabel::Aux => accept(vec![k], &mut span, &mut out),
            MeasLabel::Unlabeled => {}
        }
    }
    for key in &check_order {
        let ms = &by_check[key];
        accept(vec![ms[0]], &mut span, &mut out);
        for w in ms.windows(2) {
            accept(vec![w[0], w[1]], &mut span, &mut out);
        }
    }
    if let Some(spec) = spec {
        if !data.is_empty() {
            for key in &check_order {
                let (check, at) = *key;
                let sup = match check {
                    CheckType::X => spec.x_check_support(at),
                    CheckType::Z => spec.z_check_support(at),
                };
                let mut ms = vec![*by_check[key].last().expect("nonempty")];
                let mut complete = true;
                for q in sup {
                    match data.get(&spec.role_of(q)) {
                        Some(&k) => ms.push(k),
                        None => complete = false,
                    }
                }
                if complete {
                    ms.sort_unstable();
                    accept(ms, &mut span, &mut out);
                }
            }
        }
    }
    // Relations among first-round outcomes of redundant checks.
    if span.rank() < target {
        let firsts: Vec<usize> = check_order.iter().map(|k| by_check[k][0]).collect();
        for ms in left_null_space(&lin, &firsts, width) {
            accept(ms, &mut span, &mut out);
        }
    }
    let from_labels = out.len();

    if span.rank() < target {
        let all: Vec<usize> = (0..m).collect();
        for ms in left_null_space(&lin, &all, width) {
            if span.insert(&Bits::from_indices(m, ms.iter().copied())).is_ok() {
                out.push(ms);
            }
        }
    }
    if span.rank() != target {
        return Err(NoiseError::NondeterministicCircuit(format!(
            "found {} independent parities, expected {target}",
            span.rank()
        )));
    }
    let stats = DiscoveryStats { from_labels, from_nullspace: out.len() - from_labels, deterministic_dim: target };
    for d in out.iter_mut() {
        d.sort_unstable();
    }
    out.sort_by_key(|d| (*d.last().expect("nonempty"), d.first().copied()));
    Ok((out, stats))
}

/// Subsets of `cols` whose outcome expressions sum to a constant.
fn left_null_space(lin: &[Bits], cols: &[usize], width: usize) -> Vec<Vec<usize>> {
    let mut et = BitMatrix::zeros(width, cols.len());
    for (j, &k) in cols.iter().enumerate() {
        for v in lin[k].iter_ones() {
            et.set(v, j, true);
        }
    }
    et.nullspace().rows().iter().map(|v| v.iter_ones().map(|j| cols[j]).collect()).collect()
}

/// Errors unless every annotated detector and observable is a noiselessly
/// deterministic parity.
pub fn check_annotations(c: &Circuit) -> Result<(), NoiseError> {
    let recs = run_deterministic(&c.without_annotations());
    let width = recs.first().map_or(1, |r| r.expr.len());
    let zero = |ms: &[usize]| {
        let mut acc = Bits::zeros(width);
        for &m in ms {
            acc.xor_assign(&recs[m].expr);
        }
        acc.set(0, false);
        acc.is_zero()
    };
    for (k, d) in c.detectors().iter().enumerate() {
        if d.iter().any(|&m| m >= recs.len()) || !zero(d) {
            return Err(NoiseError::NondeterministicCircuit(format!("detector {k} is random")));
        }
    }
    for (k, o) in c.observables().iter().enumerate() {
        if o.iter().any(|&m| m >= recs.len()) || !zero(o) {
            return Err(NoiseError::NondeterministicCircuit(format!("observable {k} is random")));
        }
    }
    Ok(())
}

/// Replaces any detector annotations with discovered ones, appended at the end.
pub fn annotate_detectors(c: &Circuit, spec: Option<&CodeSpec>) -> Result<Circuit, NoiseError> {
    let (dets, _) = discover_detectors(c, spec)?;
    let mut out = c.clone();
    out.ops.retain(|op| !matches!(op, Op::Detector(_)));
    out.ops.extend(dets.into_iter().map(Op::Detector));
    Ok(out)
}
