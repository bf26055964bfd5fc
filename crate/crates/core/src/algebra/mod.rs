//! Monomial group arithmetic, check polynomials and parity-check matrices.

mod catalog;
mod distance;

pub use catalog::{catalog, catalog_entry, catalog_lookup, CatalogEntry};
pub use distance::{estimate_code_distance, DistanceEffort, DistanceEstimate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, Bits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid group parameters: ell={ell}, m={m}")]
    InvalidParams { ell: usize, m: usize },
    #[error("degenerate spec: check row {row} has weight {weight} < 6")]
    DegenerateSpec { row: usize, weight: usize },
    #[error("polynomial terms are not pairwise distinct")]
    RepeatedTerm,
    #[error("code has no logical qubits")]
    ZeroLogicals,
    #[error("unknown code {0:?}")]
    UnknownCode(String),
}

/// Lattice parameters: relations y^m = 1 and x^ell y^alpha = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub ell: usize,
    pub m: usize,
    pub alpha: i64,
}

/// Canonical group element x^i y^j with i in [0, ell), j in [0, m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub i: usize,
    pub j: usize,
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial { i: 0, j: 0 };
}

impl GroupParams {
    pub fn new(ell: usize, m: usize, alpha: i64) -> Result<Self, AlgebraError> {
        if ell == 0 || m == 0 {
            return Err(AlgebraError::InvalidParams { ell, m });
        }
        Ok(GroupParams { ell, m, alpha })
    }

    pub fn order(&self) -> usize {
        self.ell * self.m
    }

    /// Reduce x^i y^j: each wrap of x^ell becomes y^(-alpha), then j mod m.
    pub fn canonicalize(&self, i: i64, j: i64) -> Monomial {
        let ell = self.ell as i64;
        let m = self.m as i64;
        let q = i.div_euclid(ell);
        let r = i.rem_euclid(ell);
        let j = (j - self.alpha * q).rem_euclid(m);
        Monomial { i: r as usize, j: j as usize }
    }

    pub fn mul(&self, u: Monomial, v: Monomial) -> Monomial {
        self.canonicalize((u.i + v.i) as i64, (u.j + v.j) as i64)
    }

    pub fn inv(&self, u: Monomial) -> Monomial {
        self.canonicalize(-(u.i as i64), -(u.j as i64))
    }

    pub fn pow(&self, u: Monomial, e: i64) -> Monomial {
        self.canonicalize(u.i as i64 * e, u.j as i64 * e)
    }

    /// Smallest e ≥ 1 with u^e = 1.
    pub fn element_order(&self, u: Monomial) -> usize {
        let mut acc = u;
        let mut e = 1;
        while acc != Monomial::IDENTITY {
            acc = self.mul(acc, u);
            e += 1;
        }
        e
    }

    #[inline]
    pub fn index(&self, u: Monomial) -> usize {
        u.i * self.m + u.j
    }

    #[inline]
    pub fn element(&self, idx: usize) -> Monomial {
        Monomial { i: idx / self.m, j: idx % self.m }
    }

    pub fn elements(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.order()).map(|k| self.element(k))
    }

    pub fn x(&self) -> Monomial {
        self.canonicalize(1, 0)
    }

    pub fn y(&self) -> Monomial {
        self.canonicalize(0, 1)
    }

    pub fn format(&self, u: Monomial) -> String {
        match (u.i, u.j) {
            (0, 0) => "1".into(),
            (i, 0) => format!("x^{i}"),
            (0, j) => format!("y^{j}"),
            (i, j) => format!("x^{i}y^{j}"),
        }
    }

    /// Parse products such as `x`, `y^-1`, `x^3y^-2`, `x^3*y^-2` or `1`.
    pub fn parse_monomial(&self, s: &str) -> Option<Monomial> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if s == "1" {
            return Some(Monomial::IDENTITY);
        }
        let (mut ei, mut ej) = (0i64, 0i64);
        let b = s.as_bytes();
        let mut k = 0;
        if b.is_empty() {
            return None;
        }
        while k < b.len() {
            let var = b[k];
            k += 1;
            let mut e = 1i64;
            if k < b.len() && b[k] == b'^' {
                k += 1;
                let start = k;
                if k < b.len() && (b[k] == b'-' || b[k] == b'+') {
                    k += 1;
                }
                while k < b.len() && b[k].is_ascii_digit() {
                    k += 1;
                }
                e = s[start..k].parse().ok()?;
            }
            match var {
                b'x' => ei += e,
                b'y' => ej += e,
                _ => return None,
            }
        }
        Some(self.canonicalize(ei, ej))
    }
}

/// Three-term check polynomial; terms are indexed 1, 2, 3 in the API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CheckPolynomial {
    pub terms: [Monomial; 3],
}

impl CheckPolynomial {
    pub fn new(terms: [Monomial; 3]) -> Result<Self, AlgebraError> {
        if terms[0] == terms[1] || terms[0] == terms[2] || terms[1] == terms[2] {
            return Err(AlgebraError::RepeatedTerm);
        }
        Ok(CheckPolynomial { terms })
    }

    pub fn from_exponents(params: &GroupParams, e: [(i64, i64); 3]) -> Result<Self, AlgebraError> {
        CheckPolynomial::new(e.map(|(i, j)| params.canonicalize(i, j)))
    }

    pub fn conjugate(&self, params: &GroupParams) -> CheckPolynomial {
        CheckPolynomial { terms: self.terms.map(|t| params.inv(t)) }
    }

    pub fn format(&self, params: &GroupParams) -> String {
        self.terms.iter().map(|&t| params.format(t)).collect::<Vec<_>>().join(" + ")
    }
}

pub fn canonicalize(params: &GroupParams, i: i64, j: i64) -> Monomial {
    params.canonicalize(i, j)
}

pub fn mono_mul(params: &GroupParams, u: Monomial, v: Monomial) -> Monomial {
    params.mul(u, v)
}

pub fn mono_inv(params: &GroupParams, u: Monomial) -> Monomial {
    params.inv(u)
}

pub fn poly_conjugate(params: &GroupParams, p: &CheckPolynomial) -> CheckPolynomial {
    p.conjugate(params)
}

/// Qubit roles, in global layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    R,
    L,
    X,
    Z,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::R, Role::L, Role::X, Role::Z];

    pub fn block(self) -> usize {
        self as usize
    }

    pub fn is_data(self) -> bool {
        matches!(self, Role::R | Role::L)
    }
}

/// Which polynomial a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Poly {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeSpecJson", into = "CodeSpecJson")]
pub struct CodeSpec {
    pub name: String,
    pub params: GroupParams,
    pub a_poly: CheckPolynomial,
    pub b_poly: CheckPolynomial,
}

#[derive(Serialize, Deserialize)]
struct CodeSpecJson {
    name: String,
    ell: usize,
    m: usize,
    alpha: i64,
    a_terms: [[i64; 2]; 3],
    b_terms: [[i64; 2]; 3],
}

impl TryFrom<CodeSpecJson> for CodeSpec {
    type Error = AlgebraError;

    fn try_from(j: CodeSpecJson) -> Result<Self, Self::Error> {
        let params = GroupParams::new(j.ell, j.m, j.alpha)?;
        let a = CheckPolynomial::from_exponents(&params, j.a_terms.map(|[i, k]| (i, k)))?;
        let b = CheckPolynomial::from_exponents(&params, j.b_terms.map(|[i, k]| (i, k)))?;
        Ok(CodeSpec { name: j.name, params, a_poly: a, b_poly: b })
    }
}

impl From<CodeSpec> for CodeSpecJson {
    fn from(c: CodeSpec) -> Self {
        let t = |p: &CheckPolynomial| p.terms.map(|m| [m.i as i64, m.j as i64]);
        CodeSpecJson {
            name: c.name.clone(),
            ell: c.params.ell,
            m: c.params.m,
            alpha: c.params.alpha,
            a_terms: t(&c.a_poly),
            b_terms: t(&c.b_poly),
        }
    }
}

impl CodeSpec {
    pub fn new(
        name: impl Into<String>,
        params: GroupParams,
        a: [(i64, i64); 3],
        b: [(i64, i64); 3],
    ) -> Result<Self, AlgebraError> {
        Ok(CodeSpec {
            name: name.into(),
            params,
            a_poly: CheckPolynomial::from_exponents(&params, a)?,
            b_poly: CheckPolynomial::from_exponents(&params, b)?,
        })
    }

    /// Cells per role block (ell·m).
    pub fn cells(&self) -> usize {
        self.params.order()
    }

    pub fn num_data(&self) -> usize {
        2 * self.cells()
    }

    pub fn num_qubits(&self) -> usize {
        4 * self.cells()
    }

    #[inline]
    pub fn qubit(&self, role: Role, u: Monomial) -> usize {
        role.block() * self.cells() + self.params.index(u)
    }

    pub fn role_of(&self, q: usize) -> (Role, Monomial) {
        let c = self.cells();
        (Role::ALL[q / c], self.params.element(q % c))
    }

    pub fn poly(&self, p: Poly) -> &CheckPolynomial {
        match p {
            Poly::A => &self.a_poly,
            Poly::B => &self.b_poly,
        }
    }

    /// Term `k` (1-based) of polynomial `p`.
    pub fn term(&self, p: Poly, k: usize) -> Monomial {
        self.poly(p).terms[k - 1]
    }

    /// Data qubits of the X-check at `d`, ordered R(A1..A3 d), L(B1..B3 d).
    pub fn x_check_support(&self, d: Monomial) -> [usize; 6] {
        let g = &self.params;
        let a = self.a_poly.terms;
        let b = self.b_poly.terms;
        [
            self.qubit(Role::R, g.mul(a[0], d)),
            self.qubit(Role::R, g.mul(a[1], d)),
            self.qubit(Role::R, g.mul(a[2], d)),
            self.qubit(Role::L, g.mul(b[0], d)),
            self.qubit(Role::L, g.mul(b[1], d)),
            self.qubit(Role::L, g.mul(b[2], d)),
        ]
    }

    /// Data qubits of the Z-check at `d`, ordered R(B̄1..B̄3 d), L(Ā1..Ā3 d).
    pub fn z_check_support(&self, d: Monomial) -> [usize; 6] {
        let g = &self.params;
        let a = self.a_poly.conjugate(g).terms;
        let b = self.b_poly.conjugate(g).terms;
        [
            self.qubit(Role::R, g.mul(b[0], d)),
            self.qubit(Role::R, g.mul(b[1], d)),
            self.qubit(Role::R, g.mul(b[2], d)),
            self.qubit(Role::L, g.mul(a[0], d)),
            self.qubit(Role::L, g.mul(a[1], d)),
            self.qubit(Role::L, g.mul(a[2], d)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckMatrices {
    pub hx: BitMatrix,
    pub hz: BitMatrix,
}

pub fn build_check_matrices(spec: &CodeSpec) -> Result<CheckMatrices, AlgebraError> {
    let n = spec.num_data();
    let cells = spec.cells();
    let mut hx = BitMatrix::zeros(cells, n);
    let mut hz = BitMatrix::zeros(cells, n);
    for (r, d) in spec.params.elements().enumerate() {
        for q in spec.x_check_support(d) {
            hx.row_mut(r).flip(q);
        }
        for q in spec.z_check_support(d) {
            hz.row_mut(r).flip(q);
        }
    }
    for (r, row) in hx.rows().iter().chain(hz.rows()).enumerate() {
        let w = row.count_ones();
        if w < 6 {
            return Err(AlgebraError::DegenerateSpec { row: r % cells, weight: w });
        }
    }
    Ok(CheckMatrices { hx, hz })
}

impl CheckMatrices {
    pub fn num_data(&self) -> usize {
        self.hx.ncols()
    }

    pub fn commutation(&self) -> BitMatrix {
        self.hx.mul(&self.hz.transpose())
    }
}

pub fn logical_dimension(cm: &CheckMatrices) -> usize {
    cm.num_data() - cm.hx.rank() - cm.hz.rank()
}

/// k·d_circ²/n.
pub fn bpt_ratio(spec: &CodeSpec, k: usize, d_circ: usize) -> f64 {
    (k * d_circ * d_circ) as f64 / spec.num_data() as f64
}

/// Logical operator bases as data-qubit bit vectors.
///
/// `z[i]` and `x[i]` anticommute exactly when indices match.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    pub z: Vec<Bits>,
    pub x: Vec<Bits>,
}

/// Deterministic symplectic basis from ker/im computations, with pivots
/// taken lowest-index first.
pub fn logical_basis(cm: &CheckMatrices) -> LogicalBasis {
    let n = cm.num_data();
    // Z-type logicals: ker(hx) modulo rowspace(hz).
    let cand_z = quotient_basis(&cm.hx.nullspace(), &cm.hz);
    let cand_x = quotient_basis(&cm.hz.nullspace(), &cm.hx);
    assert_eq!(cand_z.len(), cand_x.len());
    let mut zs = cand_z;
    let mut xs = cand_x;
    let k = zs.len();
    // Symplectic Gram-Schmidt over the pairing <z, x> = |z ∧ x| mod 2.
    let mut out_z = Vec::with_capacity(k);
    let mut out_x = Vec::with_capacity(k);
    while let Some(z) = zs.first().cloned() {
        zs.remove(0);
        let pos = xs.iter().position(|x| z.and_parity(x)).expect("nondegenerate pairing");
        let x = xs.remove(pos);
        for zz in zs.iter_mut() {
            if zz.and_parity(&x) {
                zz.xor_assign(&z);
            }
        }
        for xx in xs.iter_mut() {
            if z.and_parity(xx) {
                xx.xor_assign(&x);
            }
        }
        out_z.push(z);
        out_x.push(x);
    }
    debug_assert!(out_z.iter().all(|v| v.len() == n));
    LogicalBasis { z: out_z, x: out_x }
}

/// Vectors of `space` (rows) extending the row space of `sub` to a basis.
fn quotient_basis(space: &BitMatrix, sub: &BitMatrix) -> Vec<Bits> {
    let mut ib = crate::gf2::IncrementalBasis::new(space.ncols(), 0);
    for r in sub.rows() {
        let _ = ib.insert(r);
    }
    let mut out = Vec::new();
    for r in space.rows() {
        if ib.insert(r).is_ok() {
            out.push(r.clone());
        }
    }
    out
}
