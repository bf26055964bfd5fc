//! Tanner graph, edge classes and depth-constrained CNOT schedules.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{CodeSpec, Monomial, Poly, Role};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("invalid schedule: {0}")]
    Invalid(String),
    #[error("unknown edge class {0:?}")]
    UnknownClass(String),
    #[error("no compatible schedule pair for {0}")]
    NoCompatiblePair(String),
    #[error("invalid shift kind: {0}")]
    InvalidKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckType {
    X,
    Z,
}

/// One of the twelve CNOT classes: X-A_k, X-B_k, Z-Ā_k, Z-B̄_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeClass {
    pub check: CheckType,
    pub poly: Poly,
    /// 1, 2 or 3.
    pub term: usize,
}

impl EdgeClass {
    pub fn new(check: CheckType, poly: Poly, term: usize) -> Self {
        assert!((1..=3).contains(&term));
        EdgeClass { check, poly, term }
    }

    pub fn all() -> [EdgeClass; 12] {
        let mut out = [EdgeClass::new(CheckType::X, Poly::A, 1); 12];
        for (k, c) in out.iter_mut().enumerate() {
            *c = EdgeClass::from_index(k);
        }
        out
    }

    pub fn from_index(k: usize) -> Self {
        let check = if k < 6 { CheckType::X } else { CheckType::Z };
        let poly = if k % 6 < 3 { Poly::A } else { Poly::B };
        EdgeClass { check, poly, term: k % 3 + 1 }
    }

    pub fn index(self) -> usize {
        let c = if self.check == CheckType::X { 0 } else { 6 };
        let p = if self.poly == Poly::A { 0 } else { 3 };
        c + p + self.term - 1
    }

    pub fn check_role(self) -> Role {
        match self.check {
            CheckType::X => Role::X,
            CheckType::Z => Role::Z,
        }
    }

    /// Data block touched: X-A and Z-B̄ act on R, X-B and Z-Ā act on L.
    pub fn data_role(self) -> Role {
        match (self.check, self.poly) {
            (CheckType::X, Poly::A) | (CheckType::Z, Poly::B) => Role::R,
            _ => Role::L,
        }
    }

    /// Monomial offset from check to data qubit (A_k, B_k, Ā_k or B̄_k).
    pub fn offset(self, spec: &CodeSpec) -> Monomial {
        let t = spec.term(self.poly, self.term);
        match self.check {
            CheckType::X => t,
            CheckType::Z => spec.params.inv(t),
        }
    }

    pub fn data_qubit(self, spec: &CodeSpec, delta: Monomial) -> usize {
        spec.qubit(self.data_role(), spec.params.mul(self.offset(spec), delta))
    }

    pub fn check_qubit(self, spec: &CodeSpec, delta: Monomial) -> usize {
        spec.qubit(self.check_role(), delta)
    }

    /// Two classes may share a slot when they are of opposite check type
    /// and act on opposite data blocks.
    pub fn compatible(self, other: EdgeClass) -> bool {
        self.check != other.check && self.data_role() != other.data_role()
    }

    pub fn id(self) -> String {
        format!("{:?}{:?}{}", self.check, self.poly, self.term)
    }

    pub fn parse(s: &str) -> Result<Self, ScheduleError> {
        let b = s.trim().as_bytes();
        let err = || ScheduleError::UnknownClass(s.to_string());
        if b.len() != 3 {
            return Err(err());
        }
        let check = match b[0] {
            b'X' | b'x' => CheckType::X,
            b'Z' | b'z' => CheckType::Z,
            _ => return Err(err()),
        };
        let poly = match b[1] {
            b'A' | b'a' => Poly::A,
            b'B' | b'b' => Poly::B,
            _ => return Err(err()),
        };
        let term = (b[2] as char).to_digit(10).filter(|t| (1..=3).contains(t)).ok_or_else(err)? as usize;
        Ok(EdgeClass { check, poly, term })
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "e")]
    E,
    #[serde(rename = "n")]
    N,
    #[serde(rename = "w")]
    W,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "nl_a")]
    NlA,
    #[serde(rename = "nl_b")]
    NlB,
}

impl Direction {
    pub const LOCAL: [Direction; 4] = [Direction::E, Direction::N, Direction::W, Direction::S];

    pub fn parse(s: &str) -> Option<Direction> {
        Some(match s {
            "e" => Direction::E,
            "n" => Direction::N,
            "w" => Direction::W,
            "s" => Direction::S,
            "nl_a" => Direction::NlA,
            "nl_b" => Direction::NlB,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::E => "e",
            Direction::N => "n",
            Direction::W => "w",
            Direction::S => "s",
            Direction::NlA => "nl_a",
            Direction::NlB => "nl_b",
        }
    }
}

/// Naming of the local directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectionConvention {
    /// X: A-term 1 → w, x → e, B-term 1 → s, y → n; Z mirrored.
    #[default]
    Standard,
    /// Standard with the labels w and s interchanged.
    SwappedWS,
}

/// Direction of every edge class under a convention.
pub fn classify_directions(spec: &CodeSpec, convention: DirectionConvention) -> HashMap<EdgeClass, Direction> {
    let g = &spec.params;
    let one = Monomial::IDENTITY;
    let mut out = HashMap::new();
    for c in EdgeClass::all() {
        let t = spec.term(c.poly, c.term);
        let d = match (c.check, c.poly) {
            (CheckType::X, Poly::A) if t == one => Direction::W,
            (CheckType::X, Poly::A) if t == g.x() => Direction::E,
            (CheckType::X, Poly::B) if t == one => Direction::S,
            (CheckType::X, Poly::B) if t == g.y() => Direction::N,
            (CheckType::Z, Poly::A) if t == one => Direction::E,
            (CheckType::Z, Poly::A) if t == g.x() => Direction::W,
            (CheckType::Z, Poly::B) if t == one => Direction::N,
            (CheckType::Z, Poly::B) if t == g.y() => Direction::S,
            (_, Poly::A) => Direction::NlA,
            (_, Poly::B) => Direction::NlB,
        };
        let d = match (convention, d) {
            (DirectionConvention::SwappedWS, Direction::W) => Direction::S,
            (DirectionConvention::SwappedWS, Direction::S) => Direction::W,
            (_, d) => d,
        };
        out.insert(c, d);
    }
    out
}

/// Tripartite Tanner graph; edges are (check qubit, data qubit, class).
#[derive(Debug, Clone)]
pub struct TannerGraph {
    pub num_data: usize,
    pub num_checks: usize,
    pub edges: Vec<(usize, usize, EdgeClass)>,
}

pub fn build_tanner(spec: &CodeSpec) -> TannerGraph {
    let mut edges = Vec::with_capacity(12 * spec.cells());
    for d in spec.params.elements() {
        for c in EdgeClass::all() {
            edges.push((c.check_qubit(spec, d), c.data_qubit(spec, d), c));
        }
    }
    TannerGraph { num_data: spec.num_data(), num_checks: spec.num_data(), edges }
}

/// Assignment of the twelve classes to CNOT slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    pub slots: Vec<Vec<EdgeClass>>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    slots: Vec<Vec<String>>,
}

impl Serialize for Schedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScheduleJson { slots: self.slots.iter().map(|sl| sl.iter().map(|c| c.id()).collect()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ScheduleJson::deserialize(d)?;
        let slots = j
            .slots
            .iter()
            .map(|sl| sl.iter().map(|c| EdgeClass::parse(c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        let s = Schedule { slots };
        s.validate().map_err(serde::de::Error::custom)?;
        Ok(s)
    }
}

impl Schedule {
    /// Build from per-class slot indices (indexed by `EdgeClass::index`).
    pub fn from_slot_indices(slot_of: &[usize; 12], depth: usize) -> Self {
        let mut slots = vec![Vec::new(); depth];
        for c in EdgeClass::all() {
            slots[slot_of[c.index()]].push(c);
        }
        for s in slots.iter_mut() {
            s.sort();
        }
        Schedule { slots }
    }

    /// Parse from a compact description: slots separated by `|`, classes by spaces.
    pub fn parse(s: &str) -> Result<Self, ScheduleError> {
        let slots = s
            .split('|')
            .map(|sl| sl.split_whitespace().map(EdgeClass::parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut sch = Schedule { slots };
        for s in sch.slots.iter_mut() {
            s.sort();
        }
        sch.validate()?;
        Ok(sch)
    }

    pub fn depth(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_indices(&self) -> [usize; 12] {
        let mut out = [usize::MAX; 12];
        for (t, sl) in self.slots.iter().enumerate() {
            for c in sl {
                out[c.index()] = t;
            }
        }
        out
    }

    pub fn slot_of(&self, c: EdgeClass) -> usize {
        self.slot_indices()[c.index()]
    }

    /// Classes of one check type in time order.
    pub fn order(&self, check: CheckType) -> Vec<EdgeClass> {
        self.slots.iter().flat_map(|sl| sl.iter().copied().filter(|c| c.check == check)).collect()
    }

    pub fn first(&self, check: CheckType) -> EdgeClass {
        self.order(check)[0]
    }

    pub fn last(&self, check: CheckType) -> EdgeClass {
        *self.order(check).last().expect("nonempty")
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        let mut seen = [0usize; 12];
        for (t, sl) in self.slots.iter().enumerate() {
            if sl.is_empty() || sl.len() > 2 {
                return Err(ScheduleError::Invalid(format!("slot {t} has {} classes", sl.len())));
            }
            if sl.len() == 2 && !sl[0].compatible(sl[1]) {
                return Err(ScheduleError::Invalid(format!("slot {t}: {} and {} collide", sl[0], sl[1])));
            }
            for c in sl {
                seen[c.index()] += 1;
            }
        }
        if let Some(k) = seen.iter().position(|&n| n != 1) {
            return Err(ScheduleError::Invalid(format!("class {} used {} times", EdgeClass::from_index(k), seen[k])));
        }
        Ok(())
    }

    /// Z classes fill slots 0..=5 and X classes slots 1..=6.
    pub fn is_staggered(&self) -> bool {
        self.depth() == 7
            && self.slots.iter().enumerate().all(|(t, sl)| {
                let has_x = sl.iter().any(|c| c.check == CheckType::X);
                let has_z = sl.iter().any(|c| c.check == CheckType::Z);
                has_x == (t >= 1) && has_z == (t <= 5)
            })
    }

    /// X classes fill slots 0..=5 and Z classes slots 1..=6.
    pub fn is_mirror_staggered(&self) -> bool {
        self.depth() == 7
            && self.slots.iter().enumerate().all(|(t, sl)| {
                let has_x = sl.iter().any(|c| c.check == CheckType::X);
                let has_z = sl.iter().any(|c| c.check == CheckType::Z);
                has_z == (t >= 1) && has_x == (t <= 5)
            })
    }

    pub fn describe(&self) -> String {
        self.slots
            .iter()
            .map(|sl| sl.iter().map(|c| c.id()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Parity constraints for a valid cycle: for every X-check/Z-check pair,
/// the number of shared data qubits whose X gate precedes the Z gate is even.
/// Each constraint is a list of (X class, Z class) index pairs.
pub fn commutation_constraints(spec: &CodeSpec) -> Vec<Vec<(usize, usize)>> {
    let g = &spec.params;
    let mut groups: HashMap<Monomial, Vec<(usize, usize)>> = HashMap::new();
    for i in 1..=3 {
        for k in 1..=3 {
            // Shared R qubit between X-A_i at δ and Z-B̄_k at A_i B_k δ.
            let prod = g.mul(spec.term(Poly::A, i), spec.term(Poly::B, k));
            let x = EdgeClass::new(CheckType::X, Poly::A, i).index();
            let z = EdgeClass::new(CheckType::Z, Poly::B, k).index();
            groups.entry(prod).or_default().push((x, z));
            // Shared L qubit between X-B_k at δ and Z-Ā_i at A_i B_k δ.
            let x = EdgeClass::new(CheckType::X, Poly::B, k).index();
            let z = EdgeClass::new(CheckType::Z, Poly::A, i).index();
            groups.entry(prod).or_default().push((x, z));
        }
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

fn satisfies(constraints: &[Vec<(usize, usize)>], slot: &[usize; 12]) -> bool {
    constraints
        .iter()
        .all(|grp| grp.iter().filter(|&&(x, z)| slot[x] < slot[z]).count() % 2 == 0)
}

fn injections(depth: usize) -> Vec<[usize; 6]> {
    let mut out = Vec::new();
    let mut cur = [0usize; 6];
    fn rec(k: usize, depth: usize, used: &mut Vec<bool>, cur: &mut [usize; 6], out: &mut Vec<[usize; 6]>) {
        if k == 6 {
            out.push(*cur);
            return;
        }
        for t in 0..depth {
            if !used[t] {
                used[t] = true;
                cur[k] = t;
                rec(k + 1, depth, used, cur, out);
                used[t] = false;
            }
        }
    }
    if depth >= 6 {
        rec(0, depth, &mut vec![false; depth], &mut cur, &mut out);
    }
    out
}

/// Every schedule of the given depth passing the slot invariants and the
/// commutation-parity pre-check, sorted canonically. Full tableau
/// verification is layered on top by `enumerate_schedules`.
pub fn enumerate_candidate_schedules(spec: &CodeSpec, depth: usize) -> Vec<Schedule> {
    // Each slot holds at most one X and one Z class, so both check types
    // are injections of their six classes into the slots.
    let constraints = commutation_constraints(spec);
    let inj = injections(depth);
    let classes = EdgeClass::all();
    let mut out: Vec<Schedule> = inj
        .par_iter()
        .flat_map_iter(|xs| {
            let mut local = Vec::new();
            let mut x_at = vec![None; depth];
            for (k, &t) in xs.iter().enumerate() {
                x_at[t] = Some(classes[k]);
            }
            for zs in &inj {
                let mut ok = true;
                let mut covered = vec![false; depth];
                for t in 0..depth {
                    covered[t] = x_at[t].is_some();
                }
                for (k, &t) in zs.iter().enumerate() {
                    covered[t] = true;
                    if let Some(xc) = x_at[t] {
                        if !xc.compatible(classes[6 + k]) {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok || covered.iter().any(|&c| !c) {
                    continue;
                }
                let mut slot = [0usize; 12];
                slot[..6].copy_from_slice(xs);
                slot[6..].copy_from_slice(zs);
                if satisfies(&constraints, &slot) {
                    local.push(Schedule::from_slot_indices(&slot, depth));
                }
            }
            local
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Boundary of a schedule examined by `count_boundary_variants`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Start,
    Finish,
}

/// Schedules whose first (or last) X class has direction `x_dir` and whose
/// first (or last) Z class has direction `z_dir`.
pub fn count_boundary_variants(
    spec: &CodeSpec,
    schedules: &[Schedule],
    x_dir: Direction,
    z_dir: Direction,
    end: Boundary,
    convention: DirectionConvention,
) -> usize {
    let dirs = classify_directions(spec, convention);
    schedules
        .iter()
        .filter(|s| {
            let (x, z) = match end {
                Boundary::Start => (s.first(CheckType::X), s.first(CheckType::Z)),
                Boundary::Finish => (s.last(CheckType::X), s.last(CheckType::Z)),
            };
            dirs[&x] == x_dir && dirs[&z] == z_dir
        })
        .count()
}

/// Rows: X direction, columns: Z direction, both in order e, n, w, s.
pub fn boundary_count_matrix(
    spec: &CodeSpec,
    schedules: &[Schedule],
    end: Boundary,
    convention: DirectionConvention,
) -> [[usize; 4]; 4] {
    let mut m = [[0; 4]; 4];
    for (a, &xd) in Direction::LOCAL.iter().enumerate() {
        for (b, &zd) in Direction::LOCAL.iter().enumerate() {
            m[a][b] = count_boundary_variants(spec, schedules, xd, zd, end, convention);
        }
    }
    m
}

/// Shift automorphism realized by swapping data through the check qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftKind {
    /// s = A_i Ā_j.
    AType(usize, usize),
    /// s = B_i B̄_j.
    BType(usize, usize),
}

impl ShiftKind {
    pub fn poly(self) -> Poly {
        match self {
            ShiftKind::AType(..) => Poly::A,
            ShiftKind::BType(..) => Poly::B,
        }
    }

    pub fn indices(self) -> (usize, usize) {
        match self {
            ShiftKind::AType(i, j) | ShiftKind::BType(i, j) => (i, j),
        }
    }

    pub fn validate(self) -> Result<(), ScheduleError> {
        let (i, j) = self.indices();
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
            return Err(ScheduleError::InvalidKind(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn shift(self, spec: &CodeSpec) -> Monomial {
        let g = &spec.params;
        let (i, j) = self.indices();
        let p = self.poly();
        g.mul(spec.term(p, i), g.inv(spec.term(p, j)))
    }

    /// The X class and Z class that pair with the SWAPs of each layer.
    /// Returns (X class for index, Z class for index).
    fn classes(self, k: usize) -> (EdgeClass, EdgeClass) {
        let p = self.poly();
        (EdgeClass::new(CheckType::X, p, k), EdgeClass::new(CheckType::Z, p, k))
    }

    /// Classes that must close the former cycle: X-P_i and Z-P̄_j.
    pub fn former_boundary(self) -> (EdgeClass, EdgeClass) {
        let (i, j) = self.indices();
        (self.classes(i).0, self.classes(j).1)
    }

    /// Classes that must open the latter cycle: X-P_j and Z-P̄_i.
    pub fn latter_boundary(self) -> (EdgeClass, EdgeClass) {
        let (i, j) = self.indices();
        (self.classes(j).0, self.classes(i).1)
    }

    /// All kinds realizing `s`, A-type first.
    pub fn realizing(spec: &CodeSpec, s: Monomial) -> Vec<ShiftKind> {
        let mut out = Vec::new();
        for i in 1..=3 {
            for j in 1..=3 {
                if i == j {
                    continue;
                }
                for k in [ShiftKind::AType(i, j), ShiftKind::BType(i, j)] {
                    if k.shift(spec) == s {
                        out.push(k);
                    }
                }
            }
        }
        out.sort_by_key(|k| (matches!(k, ShiftKind::BType(..)), k.indices()));
        out
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftKind::AType(i, j) => write!(f, "A-type({i},{j})"),
            ShiftKind::BType(i, j) => write!(f, "B-type({i},{j})"),
        }
    }
}

/// Whether `s` can close a former cycle for `kind`: the last X class is
/// X-P_i, the last Z class is Z-P̄_j, and the reversed-then-forward gate
/// pair fits without collisions.
pub fn is_former(kind: ShiftKind, s: &Schedule) -> bool {
    let (xc, zc) = kind.former_boundary();
    if s.last(CheckType::X) != xc || s.last(CheckType::Z) != zc {
        return false;
    }
    crate::circuit::merge_layers_former(s, kind).is_ok()
}

/// Whether `s` can open a latter cycle for `kind`.
pub fn is_latter(kind: ShiftKind, s: &Schedule) -> bool {
    let (xc, zc) = kind.latter_boundary();
    if s.first(CheckType::X) != xc || s.first(CheckType::Z) != zc {
        return false;
    }
    crate::circuit::merge_layers_latter(s, kind).is_ok()
}

/// Reference shift-cycle schedules, used as the tie-break among equally
/// valid candidates. Each serves as both the former and the latter cycle.
pub fn reference_shift_schedule(kind: ShiftKind) -> Option<Schedule> {
    let s = match kind {
        ShiftKind::AType(2, 1) => "ZA2 | XA1 ZA3 | XB3 ZB3 | XB2 ZB1 | XB1 ZB2 | XA3 ZA1 | XA2",
        ShiftKind::BType(2, 1) => "ZB2 | XB1 ZB3 | XA1 ZA2 | XA2 ZA1 | XA3 ZA3 | XB3 ZB1 | XB2",
        ShiftKind::BType(3, 2) => "ZB3 | XB2 ZB1 | XA3 ZA3 | XA1 ZA2 | XA2 ZA1 | XB1 ZB2 | XB3",
        _ => return None,
    };
    Some(Schedule::parse(s).expect("reference schedule is well formed"))
}

/// The syndrome cycle schedule used for plain memory rounds.
pub fn reference_memory_schedule() -> Schedule {
    Schedule::parse("ZB3 | XB1 ZB2 | XA1 ZA3 | XA3 ZA1 | XA2 ZA2 | XB3 ZB1 | XB2").expect("well formed")
}

/// Former and latter schedules for `kind`, chosen among `schedules`.
///
/// Preference: a schedule valid as both former and latter (the reference
/// one when present), then the first former/latter in canonical order.
pub fn find_shift_compatible_pair(
    kind: ShiftKind,
    schedules: &[Schedule],
) -> Result<(Schedule, Schedule), ScheduleError> {
    kind.validate()?;
    let formers: Vec<&Schedule> = schedules.iter().filter(|s| is_former(kind, s)).collect();
    let latters: Vec<&Schedule> = schedules.iter().filter(|s| is_latter(kind, s)).collect();
    if formers.is_empty() || latters.is_empty() {
        return Err(ScheduleError::NoCompatiblePair(kind.to_string()));
    }
    if let Some(r) = reference_shift_schedule(kind) {
        if formers.contains(&&r) && latters.contains(&&r) {
            return Ok((r.clone(), r));
        }
    }
    if let Some(b) = formers.iter().find(|s| latters.contains(s)) {
        return Ok(((*b).clone(), (*b).clone()));
    }
    Ok((formers[0].clone(), latters[0].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_check_matrices, catalog_lookup};

    #[test]
    fn class_index_roundtrip() {
        for (k, c) in EdgeClass::all().iter().enumerate() {
            assert_eq!(c.index(), k);
            assert_eq!(EdgeClass::parse(&c.id()).unwrap(), *c);
        }
        assert!(EdgeClass::parse("XC1").is_err());
    }

    #[test]
    fn tanner_matches_matrices() {
        for name in ["bb-72", "gross"] {
            let spec = catalog_lookup(name).unwrap();
            let t = build_tanner(&spec);
            assert_eq!(t.edges.len(), 6 * spec.num_data());
            let cm = build_check_matrices(&spec).unwrap();
            let cells = spec.cells();
            for &(chk, dq, c) in &t.edges {
                let h = if c.check == CheckType::X { &cm.hx } else { &cm.hz };
                assert!(h.get(chk % cells, dq));
            }
        }
    }

    #[test]
    fn directions_for_gross() {
        let spec = catalog_lookup("gross").unwrap();
        let d = classify_directions(&spec, DirectionConvention::Standard);
        assert_eq!(d[&EdgeClass::parse("XA2").unwrap()], Direction::E);
        assert_eq!(d[&EdgeClass::parse("ZA2").unwrap()], Direction::W);
        assert_eq!(d[&EdgeClass::parse("XA3").unwrap()], Direction::NlA);
        assert_eq!(d[&EdgeClass::parse("ZB3").unwrap()], Direction::NlB);
    }

    #[test]
    fn schedule_validation() {
        assert!(reference_memory_schedule().validate().is_ok());
        assert!(Schedule::parse("XA1 XA2 | ZA1").is_err());
        assert!(Schedule::parse("XA1 ZB1 | XA2").is_err());
    }

    #[test]
    fn shift_monomials() {
        let spec = catalog_lookup("gross").unwrap();
        let g = &spec.params;
        assert_eq!(ShiftKind::AType(2, 1).shift(&spec), g.x());
        assert_eq!(ShiftKind::BType(2, 1).shift(&spec), g.y());
        assert_eq!(ShiftKind::BType(3, 2).shift(&spec), g.canonicalize(3, -2));
        assert!(ShiftKind::AType(2, 2).validate().is_err());
    }
}
