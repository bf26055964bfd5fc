use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, CheckMatrices};
use crate::gf2::{BitMatrix, Bits, IncrementalBasis};

#[derive(Debug, Clone, Copy)]
pub struct DistanceEffort {
    /// Exhaustive enumeration up to this weight (only used when n ≤ 100).
    pub exhaustive_weight: usize,
    pub isd_iterations: usize,
    pub seed: u64,
}

impl Default for DistanceEffort {
    fn default() -> Self {
        DistanceEffort { exhaustive_weight: 5, isd_iterations: 2000, seed: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceEstimate {
    pub d_upper: usize,
    /// True when no logical of weight < d_upper exists (exhaustively checked).
    pub exact: bool,
    /// A logical operator of weight d_upper.
    pub witness: Bits,
    /// True when the witness is Z-type.
    pub witness_is_z: bool,
}

/// Upper bound on the code distance, exact for small codes.
pub fn estimate_code_distance(cm: &CheckMatrices, effort: DistanceEffort) -> Result<DistanceEstimate, AlgebraError> {
    if super::logical_dimension(cm) == 0 {
        return Err(AlgebraError::ZeroLogicals);
    }
    let n = cm.num_data();
    let sides = [(&cm.hx, &cm.hz, true), (&cm.hz, &cm.hx, false)];
    let mut best: Option<(Bits, bool)> = None;
    for (k, &(h, s, is_z)) in sides.iter().enumerate() {
        let w = isd_min_weight(h, s, effort.isd_iterations, effort.seed.wrapping_add(k as u64));
        if let Some(v) = w {
            if best.as_ref().is_none_or(|(b, _)| v.count_ones() < b.count_ones()) {
                best = Some((v, is_z));
            }
        }
    }
    let (mut witness, mut witness_is_z) = best.expect("k ≥ 1 implies a logical exists");
    let mut exact = false;
    if n <= 100 && cm.hx.nrows() <= 128 {
        let limit = effort.exhaustive_weight.min(witness.count_ones() - 1);
        let mut found = None;
        'outer: for w in 1..=limit {
            for &(h, s, is_z) in &sides {
                if let Some(v) = exhaustive_search(h, s, w) {
                    found = Some((v, is_z));
                    break 'outer;
                }
            }
        }
        match found {
            Some((v, z)) => {
                witness = v;
                witness_is_z = z;
                exact = true;
            }
            None => exact = limit + 1 >= witness.count_ones(),
        }
    }
    Ok(DistanceEstimate { d_upper: witness.count_ones(), exact, witness, witness_is_z })
}

fn stabilizer_basis(s: &BitMatrix) -> IncrementalBasis {
    let mut ib = IncrementalBasis::new(s.ncols(), 0);
    for r in s.rows() {
        let _ = ib.insert(r);
    }
    ib
}

fn is_logical(stab: &IncrementalBasis, v: &Bits) -> bool {
    !v.is_zero() && !stab.reduce(v).0.is_zero()
}

/// Weight-`w` vector in ker(h) outside rowspace(s), using translation symmetry:
/// any such vector can be moved to contain R(0), or L(0) with only L support.
fn exhaustive_search(h: &BitMatrix, s: &BitMatrix, w: usize) -> Option<Bits> {
    let n = h.ncols();
    let cells = n / 2;
    let cols: Vec<u128> = (0..n)
        .map(|c| (0..h.nrows()).filter(|&r| h.get(r, c)).fold(0u128, |a, r| a | (1u128 << r)))
        .collect();
    let stab = stabilizer_basis(s);
    let cases: [(usize, Vec<usize>); 2] = [(0, (1..n).collect()), (cells, (cells + 1..n).collect())];
    for (q0, pool) in cases {
        let mut chosen = vec![q0];
        if let Some(v) = dfs(&cols, &pool, 0, w - 1, cols[q0], &mut chosen, &stab, n) {
            return Some(v);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    cols: &[u128],
    pool: &[usize],
    start: usize,
    left: usize,
    syn: u128,
    chosen: &mut Vec<usize>,
    stab: &IncrementalBasis,
    n: usize,
) -> Option<Bits> {
    if left == 0 {
        if syn == 0 {
            let v = Bits::from_indices(n, chosen.iter().copied());
            if is_logical(stab, &v) {
                return Some(v);
            }
        }
        return None;
    }
    for k in start..=pool.len() - left {
        let q = pool[k];
        chosen.push(q);
        let r = dfs(cols, pool, k + 1, left - 1, syn ^ cols[q], chosen, stab, n);
        chosen.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Lee–Brickell information-set search over ker(h), excluding rowspace(s).
fn isd_min_weight(h: &BitMatrix, s: &BitMatrix, iterations: usize, seed: u64) -> Option<Bits> {
    let n = h.ncols();
    let gen = h.nullspace();
    let stab = stabilizer_basis(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Bits> = None;
    let consider = |v: Bits, best: &mut Option<Bits>| {
        let w = v.count_ones();
        if w > 0 && best.as_ref().is_none_or(|b| w < b.count_ones()) && is_logical(&stab, &v) {
            *best = Some(v);
        }
    };
    for _ in 0..iterations.max(1) {
        perm.shuffle(&mut rng);
        let permuted = BitMatrix::from_rows(
            gen.rows().iter().map(|r| Bits::from_indices(n, r.iter_ones().map(|c| perm[c]))).collect(),
            n,
        );
        let e = permuted.rref();
        let rows: Vec<Bits> = e.matrix.rows()[..e.pivots.len()].to_vec();
        let mut inv_perm = vec![0; n];
        for (c, &p) in perm.iter().enumerate() {
            inv_perm[p] = c;
        }
        let unperm = |v: &Bits| Bits::from_indices(n, v.iter_ones().map(|c| inv_perm[c]));
        let bound = best.as_ref().map_or(usize::MAX, |b| b.count_ones());
        for (a, ra) in rows.iter().enumerate() {
            if ra.count_ones() < bound {
                consider(unperm(ra), &mut best);
            }
            for rb in &rows[a + 1..] {
                let mut v = ra.clone();
                v.xor_assign(rb);
                if v.count_ones() < best.as_ref().map_or(usize::MAX, |b| b.count_ones()) {
                    consider(unperm(&v), &mut best);
                }
            }
        }
    }
    best
}
