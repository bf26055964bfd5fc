//! Stabilizer tableau with symbolic measurement signs.
//!
//! Each random measurement introduces a fresh variable; every sign is an
//! affine function of the variables, stored as a bit vector whose bit 0 is
//! the constant term and bit `v + 1` is variable `v`.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{build_check_matrices, logical_basis, CodeSpec, LogicalBasis, Monomial, Role};
use crate::circuit::{Circuit, MeasLabel, Op};
use crate::gf2::{BitMatrix, Bits};
use crate::schedule::CheckType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("block does not preserve the codespace: {0}")]
    NotCodespacePreserving(String),
    #[error("logical action is singular")]
    Singular,
}

/// Affine expression over measurement variables.
pub type Expr = Bits;

/// Pauli operator as X and Z bit vectors; both bits set means Y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pauli {
    pub x: Bits,
    pub z: Bits,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        Pauli { x: Bits::zeros(n), z: Bits::zeros(n) }
    }

    pub fn z_on(n: usize, qs: impl IntoIterator<Item = usize>) -> Self {
        Pauli { x: Bits::zeros(n), z: Bits::from_indices(n, qs) }
    }

    pub fn x_on(n: usize, qs: impl IntoIterator<Item = usize>) -> Self {
        Pauli { x: Bits::from_indices(n, qs), z: Bits::zeros(n) }
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerTableau {
    n: usize,
    /// Rows 0..n are destabilizers, n..2n stabilizers.
    xs: Vec<Bits>,
    zs: Vec<Bits>,
    /// Signs of the stabilizer rows.
    signs: Vec<Expr>,
    nvars: usize,
    width: usize,
}

/// Sum over qubits of the CHP phase function when row (x1, z1) is
/// multiplied into (x2, z2), modulo 4.
fn phase_exponent(x1: &Bits, z1: &Bits, x2: &Bits, z2: &Bits) -> u32 {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for k in 0..x1.words().len() {
        let (a, b, c, d) = (x1.words()[k], z1.words()[k], x2.words()[k], z2.words()[k]);
        let y1 = a & b;
        let xo = a & !b;
        let zo = !a & b;
        let p = (y1 & d & !c) | (xo & d & c) | (zo & c & !d);
        let m = (y1 & c & !d) | (xo & d & !c) | (zo & c & d);
        pos += p.count_ones();
        neg += m.count_ones();
    }
    (pos + 4 * x1.words().len() as u32 * 64 - neg) % 4
}

impl StabilizerTableau {
    /// All qubits in |0⟩.
    pub fn new(n: usize) -> Self {
        let width = 65;
        let mut xs = Vec::with_capacity(2 * n);
        let mut zs = Vec::with_capacity(2 * n);
        for i in 0..n {
            xs.push(Bits::from_indices(n, [i]));
            zs.push(Bits::zeros(n));
        }
        for i in 0..n {
            xs.push(Bits::zeros(n));
            zs.push(Bits::from_indices(n, [i]));
        }
        StabilizerTableau { n, xs, zs, signs: vec![Bits::zeros(width); n], nvars: 0, width }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    /// Width of expressions; grows as variables are added.
    pub fn expr_width(&self) -> usize {
        self.width
    }

    fn new_var(&mut self) -> Expr {
        if self.nvars + 1 >= self.width {
            self.width *= 2;
            for s in self.signs.iter_mut() {
                s.resize(self.width);
            }
        }
        let v = self.nvars;
        self.nvars += 1;
        Bits::from_indices(self.width, [v + 1])
    }

    /// Stabilizer generators with their signs.
    pub fn stabilizers(&self) -> Vec<(Pauli, Expr)> {
        (0..self.n).map(|i| (Pauli { x: self.xs[self.n + i].clone(), z: self.zs[self.n + i].clone() }, self.signs[i].clone())).collect()
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for r in 0..2 * self.n {
            let xc = self.xs[r].get(c);
            let zt = self.zs[r].get(t);
            if r >= self.n && xc && zt && (self.xs[r].get(t) == self.zs[r].get(c)) {
                self.signs[r - self.n].flip(0);
            }
            if xc {
                self.xs[r].flip(t);
            }
            if zt {
                self.zs[r].flip(c);
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        for r in 0..2 * self.n {
            let x = self.xs[r].get(q);
            let z = self.zs[r].get(q);
            if r >= self.n && x && z {
                self.signs[r - self.n].flip(0);
            }
            self.xs[r].set(q, z);
            self.zs[r].set(q, x);
        }
    }

    /// Multiply row `i` into row `h` (stabilizer rows carry signs).
    fn rowsum(&mut self, h: usize, i: usize) {
        let e = phase_exponent(&self.xs[i], &self.zs[i], &self.xs[h], &self.zs[h]);
        debug_assert!(e % 2 == 0, "rows must commute");
        let (xi, zi) = (self.xs[i].clone(), self.zs[i].clone());
        self.xs[h].xor_assign(&xi);
        self.zs[h].xor_assign(&zi);
        if h >= self.n {
            if i >= self.n {
                let si = self.signs[i - self.n].clone();
                self.signs[h - self.n].xor_assign(&si);
            }
            if e == 2 {
                self.signs[h - self.n].flip(0);
            }
        }
    }

    fn anticommutes(&self, r: usize, p: &Pauli) -> bool {
        self.xs[r].and_parity(&p.z) ^ self.zs[r].and_parity(&p.x)
    }

    /// Sign of `p` if it lies in the stabilizer group, without collapsing.
    pub fn peek(&self, p: &Pauli) -> Option<Expr> {
        let n = self.n;
        if (n..2 * n).any(|r| self.anticommutes(r, p)) {
            return None;
        }
        let mut x = Bits::zeros(n);
        let mut z = Bits::zeros(n);
        let mut sign = Bits::zeros(self.width);
        for i in 0..n {
            if self.anticommutes(i, p) {
                let r = n + i;
                let e = phase_exponent(&self.xs[r], &self.zs[r], &x, &z);
                x.xor_assign(&self.xs[r]);
                z.xor_assign(&self.zs[r]);
                sign.xor_assign(&self.signs[i]);
                if e == 2 {
                    sign.flip(0);
                }
            }
        }
        debug_assert!(x == p.x && z == p.z);
        Some(sign)
    }

    /// Measures `p`; returns (outcome expression, deterministic).
    pub fn measure(&mut self, p: &Pauli) -> (Expr, bool) {
        let n = self.n;
        match (n..2 * n).find(|&r| self.anticommutes(r, p)) {
            None => (self.peek(p).expect("commutes with every stabilizer"), true),
            Some(pr) => {
                for r in 0..2 * n {
                    if r != pr && self.anticommutes(r, p) {
                        self.rowsum(r, pr);
                    }
                }
                self.xs[pr - n] = self.xs[pr].clone();
                self.zs[pr - n] = self.zs[pr].clone();
                self.xs[pr] = p.x.clone();
                self.zs[pr] = p.z.clone();
                let v = self.new_var();
                self.signs[pr - n] = v.clone();
                (v, false)
            }
        }
    }

    pub fn measure_z(&mut self, q: usize) -> (Expr, bool) {
        self.measure(&Pauli::z_on(self.n, [q]))
    }

    pub fn measure_x(&mut self, q: usize) -> (Expr, bool) {
        self.measure(&Pauli::x_on(self.n, [q]))
    }

    /// Applies a Pauli with `x`/`z` components on qubit `q`.
    pub fn apply_pauli(&mut self, q: usize, x: bool, z: bool) {
        for i in 0..self.n {
            let r = self.n + i;
            if (x && self.zs[r].get(q)) ^ (z && self.xs[r].get(q)) {
                self.signs[i].flip(0);
            }
        }
    }

    /// Apply the Pauli `X^[e]` (if `x`) or `Z^[e]` conditioned on an expression.
    fn conditional_flip(&mut self, q: usize, x: bool, e: &Expr) {
        for i in 0..self.n {
            let r = self.n + i;
            let anti = if x { self.zs[r].get(q) } else { self.xs[r].get(q) };
            if anti {
                let mut e = e.clone();
                e.resize(self.width);
                self.signs[i].xor_assign(&e);
            }
        }
    }

    pub fn reset_z(&mut self, q: usize) {
        let (e, _) = self.measure_z(q);
        self.conditional_flip(q, true, &e);
    }

    pub fn reset_x(&mut self, q: usize) {
        let (e, _) = self.measure_x(q);
        self.conditional_flip(q, false, &e);
    }

    /// Runs gate ops, ignoring noise and annotations.
    pub fn run(&mut self, c: &Circuit) -> Vec<MeasRecord> {
        let mut out = Vec::with_capacity(c.num_measurements());
        for op in &c.ops {
            match op {
                Op::ResetZ(q) => q.iter().for_each(|&q| self.reset_z(q)),
                Op::ResetX(q) => q.iter().for_each(|&q| self.reset_x(q)),
                Op::MeasureZ(q) => {
                    for &q in q {
                        let (expr, deterministic) = self.measure_z(q);
                        out.push(MeasRecord { deterministic, expr });
                    }
                }
                Op::MeasureX(q) => {
                    for &q in q {
                        let (expr, deterministic) = self.measure_x(q);
                        out.push(MeasRecord { deterministic, expr });
                    }
                }
                Op::Cnot(p) => p.iter().for_each(|&(a, b)| self.cnot(a, b)),
                _ => {}
            }
        }
        let w = self.width;
        for r in out.iter_mut() {
            r.expr.resize(w);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasRecord {
    /// The measured Pauli was in the stabilizer group.
    pub deterministic: bool,
    pub expr: Expr,
}

impl MeasRecord {
    /// Outcome when it does not depend on any random branch.
    pub fn value(&self) -> Option<bool> {
        if self.expr.iter_ones().any(|b| b > 0) {
            None
        } else {
            Some(self.expr.get(0))
        }
    }
}

/// Simulates from all-|0⟩ and reports every measurement.
pub fn run_deterministic(c: &Circuit) -> Vec<MeasRecord> {
    let mut t = StabilizerTableau::new(c.num_qubits);
    t.run(c)
}

/// Physical support of a code check under `frame`.
fn check_pauli(spec: &CodeSpec, check: CheckType, at: Monomial, frame: Monomial) -> Pauli {
    let g = &spec.params;
    let inv = g.inv(frame);
    let sup = match check {
        CheckType::X => spec.x_check_support(at),
        CheckType::Z => spec.z_check_support(at),
    };
    let qs = sup.iter().map(|&q| {
        let (r, w) = spec.role_of(q);
        spec.qubit(r, g.mul(inv, w))
    });
    match check {
        CheckType::X => Pauli::x_on(spec.num_qubits(), qs),
        CheckType::Z => Pauli::z_on(spec.num_qubits(), qs),
    }
}

/// Ideal code state: data in `|0⟩` (or `|+⟩`), then every check of the
/// other type and every logical of `basis_logicals` measured.
/// Returns the tableau and the expression of each code check.
fn ideal_code_state(
    spec: &CodeSpec,
    z_data: bool,
    logicals: &[Bits],
) -> (StabilizerTableau, HashMap<(CheckType, Monomial), Expr>) {
    let n = spec.num_qubits();
    let mut t = StabilizerTableau::new(n);
    if !z_data {
        for q in 0..spec.num_data() {
            t.reset_x(q);
        }
    }
    let mut cur = HashMap::new();
    for d in spec.params.elements() {
        for ct in [CheckType::X, CheckType::Z] {
            let (e, _) = t.measure(&check_pauli(spec, ct, d, Monomial::IDENTITY));
            cur.insert((ct, d), e);
        }
    }
    for l in logicals {
        let qs: Vec<usize> = l.iter_ones().collect();
        let p = if z_data { Pauli::x_on(n, qs) } else { Pauli::z_on(n, qs) };
        t.measure(&p);
    }
    (t, cur)
}

/// True when the circuit maps the codespace to itself (under its frame),
/// every labelled check measurement reproduces the current check value and
/// no logical operator is disturbed into a random state.
pub fn check_codespace_preservation(spec: &CodeSpec, c: &Circuit) -> bool {
    codespace_report(spec, c).is_ok()
}

pub fn codespace_report(spec: &CodeSpec, c: &Circuit) -> Result<(), TableauError> {
    let cm = build_check_matrices(spec).map_err(|e| TableauError::NotCodespacePreserving(e.to_string()))?;
    let lb = logical_basis(&cm);
    let n = spec.num_qubits();
    let bad = |m: String| Err(TableauError::NotCodespacePreserving(m));
    for z_data in [true, false] {
        let (mut t, mut cur) = ideal_code_state(spec, z_data, &[]);
        let recs = t.run(c);
        for (k, r) in recs.iter().enumerate() {
            match c.labels.get(k) {
                Some(MeasLabel::Check { check, at }) => {
                    let prev = cur.get_mut(&(*check, *at)).expect("known check");
                    let mut p = prev.clone();
                    p.resize(r.expr.len());
                    if p != r.expr {
                        return bad(format!("measurement {k} ({check:?} check at {at:?}) disagrees with the check value"));
                    }
                }
                Some(MeasLabel::Aux) if r.value().is_none() => {
                    return bad(format!("auxiliary measurement {k} is random"));
                }
                _ => {}
            }
        }
        for ((ct, at), e) in cur.iter_mut() {
            let Some(now) = t.peek(&check_pauli(spec, *ct, *at, c.frame)) else {
                return bad(format!("{ct:?} check at {at:?} no longer stabilizes the state"));
            };
            let mut e = e.clone();
            e.resize(now.len());
            if e != now {
                return bad(format!("{ct:?} check at {at:?} changed sign"));
            }
        }
        let logicals = if z_data { &lb.z } else { &lb.x };
        let g = &spec.params;
        let inv = g.inv(c.frame);
        for (k, l) in logicals.iter().enumerate() {
            let qs: Vec<usize> = l
                .iter_ones()
                .map(|q| {
                    let (r, w) = spec.role_of(q);
                    spec.qubit(r, g.mul(inv, w))
                })
                .collect();
            let p = if z_data { Pauli::z_on(n, qs) } else { Pauli::x_on(n, qs) };
            if t.peek(&p).is_none() {
                return bad(format!("logical {k} was disturbed"));
            }
        }
    }
    Ok(())
}

fn restrict(e: &Expr, width: usize, prep_vars: usize) -> Option<Expr> {
    // Valid only if no variable beyond the preparation ones appears.
    if e.iter_ones().any(|b| b > prep_vars) {
        return None;
    }
    let mut e = e.clone();
    e.resize(width);
    Some(e)
}

/// Whether `a` and `b` (with b's qubit q relabelled to `relabel[q]`) act
/// identically on code states: same labelled measurement outcomes, same
/// final state, both as functions of the preparation randomness only.
pub fn assert_equivalence(spec: &CodeSpec, a: &Circuit, b: &Circuit, relabel: &[usize]) -> bool {
    equivalence_report(spec, a, b, relabel).is_ok()
}

pub fn equivalence_report(spec: &CodeSpec, a: &Circuit, b: &Circuit, relabel: &[usize]) -> Result<(), String> {
    let n = spec.num_qubits();
    if a.num_qubits != b.num_qubits || relabel.len() != n {
        return Err("qubit counts differ".into());
    }
    let cm = build_check_matrices(spec).map_err(|e| e.to_string())?;
    let lb = logical_basis(&cm);
    for z_data in [true, false] {
        let logicals = if z_data { &lb.x } else { &lb.z };
        let (ta0, _) = ideal_code_state(spec, z_data, logicals);
        let prep_vars = ta0.num_vars();
        let w = prep_vars + 1;
        let mut ta = ta0.clone();
        let mut tb = ta0;
        let ra = ta.run(a);
        let rb = tb.run(b);
        let keyed = |c: &Circuit, recs: &[MeasRecord]| -> Result<HashMap<(String, usize), Expr>, String> {
            let mut seen: HashMap<String, usize> = HashMap::new();
            let mut out = HashMap::new();
            for (k, r) in recs.iter().enumerate() {
                let lab = format!("{:?}", c.labels.get(k).copied().unwrap_or(MeasLabel::Unlabeled));
                let idx = seen.entry(lab.clone()).or_default();
                let e = restrict(&r.expr, w, prep_vars).ok_or(format!("measurement {k} ({lab}) is random"))?;
                out.insert((lab, *idx), e);
                *idx += 1;
            }
            Ok(out)
        };
        let ka = keyed(a, &ra)?;
        let kb = keyed(b, &rb)?;
        if ka != kb {
            let diff = ka.iter().find(|(k, v)| kb.get(*k) != Some(v)).map(|(k, _)| k.clone());
            return Err(format!("labelled outcomes differ (first: {diff:?})"));
        }
        for (p, sa) in ta.stabilizers() {
            let mapped = Pauli {
                x: Bits::from_indices(n, p.x.iter_ones().map(|q| relabel[q])),
                z: Bits::from_indices(n, p.z.iter_ones().map(|q| relabel[q])),
            };
            let sa = restrict(&sa, w, prep_vars);
            let sb = tb.peek(&mapped).and_then(|e| restrict(&e, w, prep_vars));
            match (sa, sb) {
                (Some(x), Some(y)) if x == y => {}
                (None, _) => {
                    // A generator carrying post-preparation randomness; compare
                    // only membership.
                    if tb.peek(&mapped).is_none() {
                        return Err("final stabilizer groups differ".into());
                    }
                }
                _ => return Err("final states differ".into()),
            }
        }
    }
    Ok(())
}

/// Binary matrices of a logical Clifford permutation: `a_z[r][c]` is set when
/// the image of logical Z_c contains logical Z_r modulo stabilizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalAction {
    pub a_z: BitMatrix,
    pub a_x: BitMatrix,
}

impl LogicalAction {
    /// a_xᵀ · a_z = I.
    pub fn is_symplectic(&self) -> bool {
        self.a_x.transpose().mul(&self.a_z).is_identity()
    }
}

/// Logical action of the qubit relabelling that carries the content of
/// data qubit (role, u) to (role, s·u).
pub fn logical_action_of_shift(spec: &CodeSpec, basis: &LogicalBasis, s: Monomial) -> LogicalAction {
    let g = &spec.params;
    let k = basis.z.len();
    let n = spec.num_data();
    let push = |v: &Bits| {
        Bits::from_indices(
            n,
            v.iter_ones().map(|q| {
                let (r, u) = spec.role_of(q);
                spec.qubit(r, g.mul(s, u))
            }),
        )
    };
    let mut a_z = BitMatrix::zeros(k, k);
    let mut a_x = BitMatrix::zeros(k, k);
    for c in 0..k {
        let zc = push(&basis.z[c]);
        let xc = push(&basis.x[c]);
        for r in 0..k {
            a_z.set(r, c, zc.and_parity(&basis.x[r]));
            a_x.set(r, c, xc.and_parity(&basis.z[r]));
        }
    }
    LogicalAction { a_z, a_x }
}

/// Logical action of a circuit block, by tableau simulation: logical
/// operators are read at fixed physical positions before and after.
pub fn extract_logical_action(
    spec: &CodeSpec,
    block: &Circuit,
    basis: &LogicalBasis,
) -> Result<LogicalAction, TableauError> {
    codespace_report(spec, block)?;
    let n = spec.num_qubits();
    let k = basis.z.len();
    let mut mats = Vec::new();
    for z_side in [true, false] {
        let (own, dual) = if z_side { (&basis.z, &basis.x) } else { (&basis.x, &basis.z) };
        // Data in the dual basis; measuring `own` logicals makes their
        // values fresh variables l_c.
        let (mut t, _) = ideal_code_state(spec, !z_side, &[]);
        let op = |v: &Bits| {
            let qs: Vec<usize> = v.iter_ones().collect();
            if z_side {
                Pauli::z_on(n, qs)
            } else {
                Pauli::x_on(n, qs)
            }
        };
        let mut var_of = Vec::new();
        for l in own {
            let before = t.num_vars();
            let (_, det) = t.measure(&op(l));
            if det {
                return Err(TableauError::NotCodespacePreserving("logical preparation failed".into()));
            }
            var_of.push(before + 1);
        }
        t.run(block);
        // m[r][c]: value of logical r afterwards depends on l_c.
        let mut m = BitMatrix::zeros(k, k);
        for (r, l) in own.iter().enumerate() {
            let e = t.peek(&op(l)).ok_or_else(|| TableauError::NotCodespacePreserving(format!("logical {r} random")))?;
            for (c, &v) in var_of.iter().enumerate() {
                m.set(r, c, e.get(v));
            }
        }
        let _ = dual;
        mats.push(m.transpose().inverse().ok_or(TableauError::Singular)?);
    }
    let a_x = mats.pop().expect("two sides");
    let a_z = mats.pop().expect("two sides");
    Ok(LogicalAction { a_z, a_x })
}

/// An invertible T with T·a·T⁻¹ = b, if one exists (searched over the
/// intertwiner space).
pub fn find_similarity(a: &BitMatrix, b: &BitMatrix, attempts: usize, seed: u64) -> Option<BitMatrix> {
    use rand::{Rng, SeedableRng};
    let k = a.nrows();
    // Unknowns T[i][j] at index i*k + j; equations (T a + b T)[i][j] = 0.
    let mut sys = BitMatrix::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            let row = i * k + j;
            for l in 0..k {
                if a.get(l, j) {
                    let c = i * k + l;
                    sys.set(row, c, !sys.get(row, c));
                }
                if b.get(i, l) {
                    let c = l * k + j;
                    sys.set(row, c, !sys.get(row, c));
                }
            }
        }
    }
    let ns = sys.nullspace();
    if ns.nrows() == 0 {
        return None;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let mut v = Bits::zeros(k * k);
        for r in ns.rows() {
            if rng.random::<bool>() {
                v.xor_assign(r);
            }
        }
        let t = BitMatrix::from_rows((0..k).map(|i| Bits::from_indices(k, (0..k).filter(|&j| v.get(i * k + j)))).collect(), k);
        if t.inverse().is_some() {
            return Some(t);
        }
    }
    None
}

/// Data-block role of a qubit, for callers mapping supports.
pub fn data_role(spec: &CodeSpec, q: usize) -> Role {
    spec.role_of(q).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;

    #[test]
    fn reset_measure_basics() {
        let c = parse("RZ 0\nTICK\nMZ 0\n").unwrap();
        let r = run_deterministic(&c);
        assert!(r[0].deterministic);
        assert_eq!(r[0].value(), Some(false));
        let c = parse("RX 0\nTICK\nMZ 0\n").unwrap();
        let r = run_deterministic(&c);
        assert!(!r[0].deterministic);
        assert_eq!(r[0].value(), None);
    }

    #[test]
    fn bell_pair_correlations() {
        let c = parse("RX 0\nRZ 1\nTICK\nCNOT 0 1\nTICK\nMZ 0 1\nTICK\nMX 0\n").unwrap();
        let r = run_deterministic(&c);
        assert!(!r[0].deterministic);
        assert!(r[1].deterministic);
        assert_eq!(r[0].expr, r[1].expr);
        assert!(!r[2].deterministic);
    }

    #[test]
    fn y_phases() {
        // |+i⟩ is not reachable, but XZ products exercise the Y phase rules:
        // prepare Bell state, check X⊗X = +1, Z⊗Z = +1 and Y⊗Y = −1.
        let mut t = StabilizerTableau::new(2);
        t.h(0);
        t.cnot(0, 1);
        let xx = Pauli::x_on(2, [0, 1]);
        let zz = Pauli::z_on(2, [0, 1]);
        let yy = Pauli { x: Bits::from_indices(2, [0, 1]), z: Bits::from_indices(2, [0, 1]) };
        assert_eq!(t.peek(&xx).unwrap().count_ones(), 0);
        assert_eq!(t.peek(&zz).unwrap().count_ones(), 0);
        let s = t.peek(&yy).unwrap();
        assert!(s.get(0) && s.count_ones() == 1);
    }

    #[test]
    fn double_swap_is_identity() {
        use crate::circuit::decompose_swap;
        let mut t = StabilizerTableau::new(2);
        t.h(0);
        let before = t.stabilizers();
        for _ in 0..2 {
            for (a, b) in decompose_swap(0, 1) {
                t.cnot(a, b);
            }
        }
        let xs = Pauli::x_on(2, [0]);
        assert_eq!(t.peek(&xs), Some(before[0].1.clone()));
        assert!(t.peek(&Pauli::z_on(2, [1])).is_some());
    }

    mod code {
        use super::super::*;
        use crate::algebra::catalog_lookup;
        use crate::circuit::*;
        use crate::schedule::{reference_memory_schedule, reference_shift_schedule, ShiftKind};

        #[test]
        fn memory_cycle_preserves_codespace() {
            let spec = catalog_lookup("gross").unwrap();
            let c = build_syndrome_cycle(&spec, &reference_memory_schedule()).unwrap();
            codespace_report(&spec, &c).unwrap();
        }

        #[test]
        fn parity_violation_breaks_codespace() {
            let spec = catalog_lookup("bb-72").unwrap();
            let base = reference_memory_schedule();
            let mut found = 0;
            for a in 0..7 {
                for b in a + 1..7 {
                    let mut s = base.clone();
                    s.slots.swap(a, b);
                    if s.validate().is_err() {
                        continue;
                    }
                    let c = build_cycle_unchecked(&spec, &s);
                    assert_eq!(schedule_measures_checks(&spec, &s), check_codespace_preservation(&spec, &c), "{}", s.describe());
                    found += !schedule_measures_checks(&spec, &s) as usize;
                }
            }
            assert!(found > 0);
        }

        #[test]
        fn shift_blocks_preserve_codespace_and_match_unmerged() {
            let spec = catalog_lookup("gross").unwrap();
            let g = spec.params;
            for kind in [ShiftKind::AType(2, 1), ShiftKind::BType(2, 1), ShiftKind::BType(3, 2)] {
                let s = reference_shift_schedule(kind).unwrap();
                let pair = (s.clone(), s);
                let merged = build_shift_circuit(&spec, kind, &pair).unwrap();
                assert_eq!(merged.frame, kind.shift(&spec));
                codespace_report(&spec, &merged).unwrap();
                let plain = build_unmerged_shift(&spec, kind, &pair).unwrap();
                codespace_report(&spec, &plain).unwrap();
                let id: Vec<usize> = (0..spec.num_qubits()).collect();
                equivalence_report(&spec, &merged, &plain, &id).unwrap();
                let swap = build_swap_shift_round(&spec, kind, &reference_memory_schedule()).unwrap();
                codespace_report(&spec, &swap).unwrap();
                let _ = g;
            }
        }

        #[test]
        fn circuit_action_equals_permutation_action() {
            let spec = catalog_lookup("gross").unwrap();
            let cm = build_check_matrices(&spec).unwrap();
            let lb = logical_basis(&cm);
            let kind = ShiftKind::AType(2, 1);
            let s = reference_shift_schedule(kind).unwrap();
            let c = build_shift_circuit(&spec, kind, &(s.clone(), s)).unwrap();
            let from_circuit = extract_logical_action(&spec, &c, &lb).unwrap();
            let from_perm = logical_action_of_shift(&spec, &lb, spec.params.inv(c.frame));
            let from_perm_fwd = logical_action_of_shift(&spec, &lb, c.frame);
            assert!(from_circuit.is_symplectic());
            assert!(from_circuit == from_perm || from_circuit == from_perm_fwd, "{from_circuit:?}");
        }
    }
}
