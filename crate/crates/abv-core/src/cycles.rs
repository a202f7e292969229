//! Lagrangian cycles on `X`, characteristic-cycle tables and the pushforwards
//! along bundles, closed immersions and Levi induction.
//!
//! Coefficients are integers plus formal named unknowns. Unknowns only arise
//! on boundary orbits of an induction, where the closed formula gives no value;
//! they are resolved when an oracle table covers the ambient block.
//!
//! The oracle handles blocks that are products of rank-one pieces. For an
//! irreducible `P(xi)` it evaluates the stalk Euler characteristics `c_S` of
//! the intersection complex and reads multiplicities through
//! `m_S = (-1)^{dim S} sum_J (-1)^{|J|} c_{S+J}`, `J` running over the factors
//! where `S` sits on a closed point orbit of a `P^1` with an open `C^x` orbit,
//! and `S+J` moving those factors to the open orbit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Mat2;
use crate::flag_orbits::{InducedBundle, Layout, LeviEmbedding, OrbitPoset, Piece};
use crate::geom_params::{complete_parameters, component_group, CompleteGeometricParameter, GeometricParameterSpace};
use crate::model::Elem;
use crate::{bail, Error, Result};

/// `constant + sum n_u u` over named unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Coeff {
    pub constant: i64,
    pub unknowns: BTreeMap<String, i64>,
}

impl Coeff {
    pub fn int(n: i64) -> Self {
        Coeff { constant: n, unknowns: BTreeMap::new() }
    }

    pub fn unknown(name: &str) -> Self {
        let mut u = BTreeMap::new();
        u.insert(name.to_string(), 1);
        Coeff { constant: 0, unknowns: u }
    }

    pub fn is_resolved(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.unknowns.is_empty()
    }

    pub fn value(&self) -> Option<i64> {
        self.is_resolved().then_some(self.constant)
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        let mut out = self.clone();
        out.constant += o.constant;
        for (k, v) in &o.unknowns {
            *out.unknowns.entry(k.clone()).or_insert(0) += v;
        }
        out.unknowns.retain(|_, v| *v != 0);
        out
    }

    pub fn scale(&self, n: i64) -> Coeff {
        let mut out = Coeff::int(self.constant * n);
        if n != 0 {
            out.unknowns = self.unknowns.iter().map(|(k, v)| (k.clone(), v * n)).collect();
        }
        out
    }

    /// Substitute values for unknowns.
    pub fn substitute(&self, values: &BTreeMap<String, i64>) -> Coeff {
        let mut out = Coeff::int(self.constant);
        for (k, v) in &self.unknowns {
            match values.get(k) {
                Some(x) => out.constant += v * x,
                None => {
                    out.unknowns.insert(k.clone(), *v);
                }
            }
        }
        out
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.constant != 0 || self.unknowns.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (k, v) in &self.unknowns {
            parts.push(if *v == 1 { k.clone() } else { format!("{v}{k}") });
        }
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

/// `sum_S m_S [T*_S X]` on one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LagrangianCycle {
    pub block: String,
    #[serde(skip)]
    pub poset: OrbitPoset,
    /// Nonzero coefficients only.
    pub coeffs: BTreeMap<String, Coeff>,
}

impl LagrangianCycle {
    pub fn zero(block: &str, poset: &OrbitPoset) -> Self {
        LagrangianCycle { block: block.to_string(), poset: poset.clone(), coeffs: BTreeMap::new() }
    }

    pub fn coefficient(&self, orbit: &str) -> Coeff {
        self.coeffs.get(orbit).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, orbit: &str, c: &Coeff) -> Result<()> {
        self.poset.get(orbit)?;
        let n = self.coefficient(orbit).add(c);
        if n.is_zero() {
            self.coeffs.remove(orbit);
        } else {
            self.coeffs.insert(orbit.to_string(), n);
        }
        Ok(())
    }

    pub fn add(&self, o: &LagrangianCycle) -> Result<LagrangianCycle> {
        if self.block != o.block {
            bail!(Invalid, "cycles on different blocks {} and {}", self.block, o.block);
        }
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            out.add_term(k, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, n: i64) -> LagrangianCycle {
        let mut out = LagrangianCycle::zero(&self.block, &self.poset);
        if n != 0 {
            out.coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), c.scale(n))).collect();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_resolved(&self) -> bool {
        self.coeffs.values().all(Coeff::is_resolved)
    }

    pub fn support(&self) -> Vec<String> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn unknowns(&self) -> Vec<String> {
        let mut u: Vec<String> = self.coeffs.values().flat_map(|c| c.unknowns.keys().cloned()).collect();
        u.sort();
        u.dedup();
        u
    }

    /// Integer coefficients, or `None` while unknowns remain.
    pub fn values(&self) -> Option<BTreeMap<String, i64>> {
        self.coeffs.iter().map(|(k, c)| c.value().map(|v| (k.clone(), v))).collect()
    }

    fn term_name(&self, orbit: &str) -> String {
        let Ok(i) = self.poset.get(orbit) else { return format!("[T*_{{{orbit}}}]") };
        let opens = self.poset.open_orbits();
        if opens == [i] {
            "[zero-section]".into()
        } else if self.poset.closure(i).len() == 1 {
            format!("[T*_{{{orbit}}}]")
        } else {
            format!("[T*bar_{{{orbit}}}]")
        }
    }
}

impl fmt::Display for LagrangianCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        // Orbit order of the poset, so output is stable.
        let mut terms = Vec::new();
        for o in self.poset.orbits() {
            if let Some(c) = self.coeffs.get(&o.id) {
                terms.push(format!("{c}\u{b7}{}", self.term_name(&o.id)));
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Microlocal multiplicities `chi^mic_S(xi)` of one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CCTable {
    pub block: String,
    pub rows: Vec<String>,
    /// Orbit of each row parameter.
    pub row_orbits: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<i64>>,
    pub provenance: String,
    pub content_hash: String,
}

impl CCTable {
    pub fn row(&self, id: &str) -> Option<&[i64]> {
        self.rows.iter().position(|r| r == id).map(|i| self.entries[i].as_slice())
    }

    pub fn col(&self, id: &str) -> Option<usize> {
        self.cols.iter().position(|c| c == id)
    }

    pub fn entry(&self, row: &str, col: &str) -> Option<i64> {
        Some(self.row(row)?[self.col(col)?])
    }

    /// FNV-1a over rows, columns and entries.
    pub fn compute_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |s: &str| {
            for b in s.bytes().chain(core::iter::once(0xff)) {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(&self.block);
        for (r, o) in self.rows.iter().zip(&self.row_orbits) {
            eat(r);
            eat(o);
        }
        for c in &self.cols {
            eat(c);
        }
        for row in &self.entries {
            for e in row {
                eat(&e.to_string());
            }
        }
        format!("{h:016x}")
    }

    pub fn hash_matches(&self) -> bool {
        self.content_hash == self.compute_hash()
    }

    /// Own-orbit multiplicity is positive and support lies in the closure of the own orbit.
    pub fn check_invariants(&self, poset: &OrbitPoset) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            let own = poset.get(&self.row_orbits[i])?;
            let oc = self.col(&self.row_orbits[i]).ok_or_else(|| Error::Invalid(format!("table {} lacks column {}", self.block, self.row_orbits[i])))?;
            if self.entries[i][oc] < 1 {
                bail!(Invalid, "{r}: own-orbit multiplicity {} < 1", self.entries[i][oc]);
            }
            for (j, c) in self.cols.iter().enumerate() {
                let e = self.entries[i][j];
                if e < 0 {
                    bail!(Invalid, "{r}: negative multiplicity at {c}");
                }
                if e != 0 && !poset.le(poset.get(c)?, own) {
                    bail!(Invalid, "{r}: multiplicity at {c}, outside the closure of {}", self.row_orbits[i]);
                }
            }
        }
        Ok(())
    }
}

/// Integer combination of parameters in the irreducible or standard basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    Irreducible,
    Standard,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroupElement {
    pub basis: Basis,
    pub coeffs: BTreeMap<String, i64>,
}

impl KGroupElement {
    pub fn zero(basis: Basis) -> Self {
        KGroupElement { basis, coeffs: BTreeMap::new() }
    }

    pub fn add_term(&mut self, id: &str, n: i64) {
        let e = self.coeffs.entry(id.to_string()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.coeffs.remove(id);
        }
    }
}

pub fn cc(xi: &CompleteGeometricParameter, table: &CCTable, poset: &OrbitPoset) -> Result<LagrangianCycle> {
    let row = table
        .row(&xi.id)
        .ok_or_else(|| Error::NoOracle(format!("no table row for {} in block {}", xi.id, table.block)))?;
    let mut out = LagrangianCycle::zero(&table.block, poset);
    for (c, &m) in table.cols.iter().zip(row) {
        if m != 0 {
            out.add_term(c, &Coeff::int(m))?;
        }
    }
    Ok(out)
}

pub fn cc_linear(v: &KGroupElement, table: &CCTable, poset: &OrbitPoset) -> Result<LagrangianCycle> {
    if v.basis != Basis::Irreducible {
        bail!(Unsupported, "characteristic cycles of standard modules need the decomposition matrix");
    }
    let mut out = LagrangianCycle::zero(&table.block, poset);
    for (id, &n) in &v.coeffs {
        let row = table.row(id).ok_or_else(|| Error::NoOracle(format!("no table row for {id} in block {}", table.block)))?;
        for (c, &m) in table.cols.iter().zip(row) {
            if m != 0 {
                out.add_term(c, &Coeff::int(m * n))?;
            }
        }
    }
    Ok(out)
}

fn relabel(c: &LagrangianCycle, target_block: &str, target: &OrbitPoset, map: impl Fn(&str) -> Result<String>) -> Result<LagrangianCycle> {
    let mut out = LagrangianCycle::zero(target_block, target);
    for (k, v) in &c.coeffs {
        out.add_term(&map(k)?, v)?;
    }
    Ok(out)
}

/// `S_L -> iota(S_L)`, multiplicities unchanged.
pub fn pushforward_closed_immersion(c: &LagrangianCycle, emb: &LeviEmbedding, target_block: &str) -> Result<LagrangianCycle> {
    relabel(c, target_block, &emb.ambient_poset, |k| Ok(emb.image(k)?.to_string()))
}

/// `G x_H S` for every orbit, multiplicities unchanged.
pub fn bundle_transfer(c: &LagrangianCycle, bundle: &InducedBundle) -> Result<LagrangianCycle> {
    if c.poset != bundle.base_poset {
        bail!(Invalid, "cycle does not live on the base of the bundle");
    }
    relabel(c, &c.block, &bundle.result_poset, |k| {
        bundle.image(k).map(str::to_string).ok_or_else(|| Error::Invalid(format!("orbit {k} is not in the bundle")))
    })
}

pub fn unknown_name(orbit: &str) -> String {
    format!("m[{orbit}]")
}

/// Saturated relabeling plus one unknown per boundary orbit.
pub fn induction_pushforward(c: &LagrangianCycle, emb: &LeviEmbedding, target_block: &str) -> Result<LagrangianCycle> {
    if !emb.boundary_guard() {
        bail!(Incomplete, "boundary orbits are not all smaller than the saturation");
    }
    let mut out = relabel(c, target_block, &emb.ambient_poset, |k| Ok(emb.image(k)?.to_string()))?;
    if c.is_zero() {
        return Ok(out);
    }
    for b in &emb.boundary {
        out.add_term(b, &Coeff::unknown(&unknown_name(b)))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub cycle: LagrangianCycle,
    pub values: BTreeMap<String, i64>,
    /// The saturated (primary) coefficients agree with the reference cycle.
    pub primary_matches: bool,
    /// The reference cycle has no terms off the saturation and its boundary.
    pub support_within: bool,
}

/// Resolve the boundary unknowns of a pushforward against a directly computed cycle.
pub fn resolve_pushforward(pushed: &LagrangianCycle, reference: &LagrangianCycle, emb: &LeviEmbedding) -> Result<Resolution> {
    if pushed.block != reference.block {
        bail!(Invalid, "reference cycle is on {} not {}", reference.block, pushed.block);
    }
    let images: Vec<&str> = emb.saturation.iter().map(|(_, b)| b.as_str()).collect();
    let mut values = BTreeMap::new();
    let mut primary_matches = true;
    for (k, c) in &pushed.coeffs {
        let r = reference.coefficient(k).value().ok_or_else(|| Error::Invalid("reference cycle has unknowns".into()))?;
        if c.is_resolved() {
            if images.contains(&k.as_str()) && c.constant != r {
                primary_matches = false;
            }
        } else if c.unknowns.len() == 1 && c.constant == 0 && c.unknowns.values().all(|v| *v == 1) {
            let name = c.unknowns.keys().next().expect("one unknown").clone();
            values.insert(name, r);
        } else {
            bail!(Invalid, "coefficient {c} at {k} is not a single unknown");
        }
    }
    for k in images.iter() {
        if !pushed.coeffs.contains_key(*k) && !reference.coefficient(k).is_zero() {
            primary_matches = false;
        }
    }
    let support_within = reference
        .coeffs
        .keys()
        .all(|k| images.contains(&k.as_str()) || emb.boundary.contains(k));
    let mut cycle = LagrangianCycle::zero(&pushed.block, &pushed.poset);
    for (k, c) in &pushed.coeffs {
        cycle.add_term(k, &c.substitute(&values))?;
    }
    Ok(Resolution { cycle, values, primary_matches, support_within })
}

/// `G . Ch(F) subset Ch(Gamma F)`: saturated support appears, and nothing
/// outside its closure does.
pub fn support_check_contention(c_in: &LagrangianCycle, c_out: &LagrangianCycle, emb: &LeviEmbedding) -> Result<bool> {
    if !c_in.is_resolved() || !c_out.is_resolved() {
        bail!(Incomplete, "support check is indeterminate while unknowns remain");
    }
    let amb = &emb.ambient_poset;
    let mut sat = Vec::new();
    for s in c_in.coeffs.keys() {
        let img = emb.image(s)?;
        if !c_out.coeffs.contains_key(img) {
            return Ok(false);
        }
        sat.push(amb.get(img)?);
    }
    for s in c_out.coeffs.keys() {
        let i = amb.get(s)?;
        if !sat.iter().any(|&j| amb.le(i, j)) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Oracle

/// Local data of one active factor: its piece, orbit of `xi`, and monodromy `tau(-I)`.
#[derive(Clone, Copy, Debug)]
struct LocalRow<'a> {
    piece: Piece,
    orbit: &'a str,
    monodromy_trivial: bool,
}

fn local_dim(piece: Piece, id: &str) -> usize {
    piece.orbits().iter().find(|(o, _)| *o == id).map(|(_, d)| *d).unwrap_or(0)
}

fn has_open_cx(piece: Piece) -> bool {
    matches!(piece, Piece::Torus | Piece::NormTorus)
}

/// Stalk Euler characteristic of the factor intersection complex at `s`.
fn stalk(r: &LocalRow, s: &str) -> i64 {
    if !has_open_cx(r.piece) {
        // Single orbit: the constant sheaf shifted to be perverse.
        return if local_dim(r.piece, s) % 2 == 0 { 1 } else { -1 };
    }
    if r.orbit != "open" {
        return i64::from(s == r.orbit);
    }
    // Off the open orbit the local system extends only with trivial monodromy.
    if s == "open" || r.monodromy_trivial {
        -1
    } else {
        0
    }
}

fn sign(d: usize) -> i64 {
    if d % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Single-factor multiplicity at local orbit `s`.
fn local_mult(r: &LocalRow, s: &str) -> i64 {
    let d = local_dim(r.piece, s);
    let mut m = stalk(r, s);
    if has_open_cx(r.piece) && s != "open" {
        m -= stalk(r, "open");
    }
    sign(d) * m
}

/// The same number from the product stratification directly: sum over `J`.
fn product_mult(rows: &[LocalRow], cols: &[&str]) -> i64 {
    let closed: Vec<usize> = (0..rows.len()).filter(|&f| has_open_cx(rows[f].piece) && cols[f] != "open").collect();
    let dim: usize = rows.iter().zip(cols).map(|(r, s)| local_dim(r.piece, s)).sum();
    let mut total = 0i64;
    for mask in 0u32..(1 << closed.len()) {
        let mut prod = 1i64;
        let mut size = 0;
        for (f, (r, s)) in rows.iter().zip(cols).enumerate() {
            let moved = closed.iter().position(|&c| c == f).map(|k| mask & (1 << k) != 0).unwrap_or(false);
            if moved {
                size += 1;
            }
            prod *= stalk(r, if moved { "open" } else { s });
        }
        total += sign(size) * prod;
    }
    sign(dim) * total
}

fn monodromy_trivial(x: &GeometricParameterSpace, p: &CompleteGeometricParameter, factor: usize) -> Result<bool> {
    let cg = component_group(x, &p.block, &p.orbit)?;
    let Some((j, c)) = cg.factor(factor) else { return Ok(true) };
    let minus = Elem::M(Mat2::identity().neg());
    let Some(e) = c.exponent_of(&minus) else { return Ok(true) };
    // tau(-I) = exp(2 pi i k e / N) = +-1.
    let num = 2 * p.tau[j] as u64 * e as u64;
    if num % c.order as u64 != 0 {
        bail!(Invalid, "tau(-I) is not a sign for {}", p.id);
    }
    Ok((num / c.order as u64) % 2 == 0)
}

fn active_slots(layout: &Layout) -> Vec<(Piece, usize)> {
    layout.slots.iter().filter(|s| s.piece != Piece::Point).map(|s| (s.piece, s.factors[0])).collect()
}

/// Table of one block by the stalk computation, cross-checked against the
/// tensor product of the single-factor tables.
pub fn a1_block_oracle(x: &GeometricParameterSpace, block: &str) -> Result<CCTable> {
    let b = x.block(block)?;
    if b.layout.slots.iter().any(|s| s.piece == Piece::Pair) {
        bail!(NoOracle, "block {block} has a diagonal P^1 x P^1 piece");
    }
    let params: Vec<CompleteGeometricParameter> = complete_parameters(x)?.into_iter().filter(|p| p.block == block).collect();
    let slots = active_slots(&b.layout);
    let cols: Vec<String> = b.poset.orbits().iter().map(|o| o.id.clone()).collect();
    let mut entries = Vec::new();
    for p in &params {
        let own = b.layout.split_id(&p.orbit)?;
        let mut rows = Vec::new();
        for (k, (piece, f)) in slots.iter().enumerate() {
            rows.push(LocalRow { piece: *piece, orbit: own[k], monodromy_trivial: monodromy_trivial(x, p, *f)? });
        }
        let mut line = Vec::new();
        for c in &cols {
            let parts = b.layout.split_id(c)?;
            let direct = product_mult(&rows, &parts);
            let tensor: i64 = rows.iter().zip(&parts).map(|(r, s)| local_mult(r, s)).product();
            if direct != tensor {
                bail!(Invalid, "oracle routes disagree at ({}, {c}): {direct} vs {tensor}", p.id);
            }
            line.push(direct);
        }
        entries.push(line);
    }
    let mut t = CCTable {
        block: block.to_string(),
        rows: params.iter().map(|p| p.id.clone()).collect(),
        row_orbits: params.iter().map(|p| p.orbit.clone()).collect(),
        cols,
        entries,
        provenance: String::new(),
        content_hash: String::new(),
    };
    t.content_hash = t.compute_hash();
    t.provenance = format!("a1-oracle:{}", t.content_hash);
    Ok(t)
}

pub fn oracle_tables(x: &GeometricParameterSpace) -> Result<Vec<CCTable>> {
    x.blocks.iter().map(|b| a1_block_oracle(x, &b.id)).collect()
}

pub fn find_table<'a>(tables: &'a [CCTable], block: &str) -> Result<&'a CCTable> {
    tables
        .iter()
        .find(|t| t.block == block)
        .ok_or_else(|| Error::NoOracle(format!("no table for block {block}")))
}

/// The table for `block` checked against a fresh oracle run: same content and hash.
pub fn verify_table(x: &GeometricParameterSpace, t: &CCTable) -> Result<bool> {
    Ok(t.hash_matches() && a1_block_oracle(x, &t.block)? == *t)
}

#[doc(hidden)]
pub fn local_table(piece: Piece, monodromy_trivial: bool) -> Vec<(String, Vec<i64>)> {
    let mut out = Vec::new();
    for (o, _) in piece.orbits() {
        for (mt, tag) in [(true, "triv"), (false, "sgn")] {
            if !mt && (*o != "open" || !has_open_cx(piece)) {
                continue;
            }
            if mt != monodromy_trivial && *o == "open" && has_open_cx(piece) {
                continue;
            }
            let r = LocalRow { piece, orbit: o, monodromy_trivial: mt };
            out.push((format!("{o}:{tag}"), piece.orbits().iter().map(|(s, _)| local_mult(&r, s)).collect()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr, Q};
    use alloc::vec;
    use crate::geom_params::{build_parameter_space, weight};
    use crate::inner_class::{EGroupInvariants, InnerClass};
    use crate::lie_core::build_catalog_group;
    use num_traits::Zero;

    fn space(g: &str, lam: &[Q]) -> GeometricParameterSpace {
        let d = build_catalog_group(g).unwrap();
        let ic = InnerClass::named(&d, "equal-rank").unwrap();
        let e = EGroupInvariants::new(&ic, vec![]).unwrap();
        build_parameter_space(&ic, &e, &weight(lam)).unwrap()
    }

    fn rows_of(t: &CCTable) -> BTreeMap<String, Vec<i64>> {
        t.rows.iter().cloned().zip(t.entries.iter().cloned()).collect()
    }

    #[test]
    fn torus_piece_table() {
        let x = space("PGL2", &[qr(1, 2)]);
        let t = a1_block_oracle(&x, &x.blocks[0].id).unwrap();
        assert_eq!(t.cols, vec!["0", "inf", "open"]);
        let r = rows_of(&t);
        let b = &x.blocks[0].id;
        assert_eq!(r[&format!("{b}:0:tau[]")], vec![1, 0, 0]);
        assert_eq!(r[&format!("{b}:inf:tau[]")], vec![0, 1, 0]);
        assert_eq!(r[&format!("{b}:open:tau[0]")], vec![0, 0, 1]);
        assert_eq!(r[&format!("{b}:open:tau[1]")], vec![1, 1, 1]);
        t.check_invariants(&x.blocks[0].poset).unwrap();
        assert!(verify_table(&x, &t).unwrap());
    }

    #[test]
    fn norm_torus_column() {
        let x = space("SL2", &[q(1)]);
        let b = &x.blocks[1];
        let t = a1_block_oracle(&x, &b.id).unwrap();
        let col = t.col("pts").unwrap();
        let hits: Vec<&str> = t.rows.iter().zip(&t.entries).filter(|(_, e)| e[col] != 0).map(|(r, _)| r.as_str()).collect();
        assert_eq!(hits, vec![format!("{}:pts:tau[]", b.id), format!("{}:open:tau[1]", b.id), format!("{}:open:tau[3]", b.id)]);
        let p = a1_block_oracle(&x, &x.blocks[0].id).unwrap();
        assert_eq!(p.entries, vec![vec![1]]);
    }

    #[test]
    fn product_block_is_tensor_product() {
        let x = space("SL2xPGL2", &[q(1), qr(1, 2)]);
        for b in &x.blocks {
            let t = a1_block_oracle(&x, &b.id).unwrap();
            t.check_invariants(&b.poset).unwrap();
        }
        // Explicit rows against hand-multiplied factor rows.
        let b = x.blocks.iter().find(|b| b.poset.len() == 6).unwrap();
        let t = a1_block_oracle(&x, &b.id).unwrap();
        let norm_odd = |_: &str| 1i64;
        let norm_even = |l: &str| if l == "pts" { 0i64 } else { 1 };
        let torus_sgn = |_: &str| 1i64;
        for (tau, left) in [("tau[1,1]", &norm_odd as &dyn Fn(&str) -> i64), ("tau[0,1]", &norm_even)] {
            let row = t.row(&format!("{}:open,open:{tau}", b.id)).unwrap();
            for (k, c) in t.cols.iter().enumerate() {
                let (l, r) = c.split_once(',').unwrap();
                assert_eq!(row[k], left(l) * torus_sgn(r), "{tau} at {c}");
            }
        }
    }

    #[test]
    fn singular_point_block() {
        let x = space("SL2", &[Q::zero()]);
        for b in &x.blocks {
            let t = a1_block_oracle(&x, &b.id).unwrap();
            assert!(t.entries.iter().all(|r| r == &vec![1]));
        }
    }

    #[test]
    fn cycle_printing_and_linearity() {
        let x = space("PGL2", &[qr(1, 2)]);
        let b = &x.blocks[0];
        let t = a1_block_oracle(&x, &b.id).unwrap();
        let ps = complete_parameters(&x).unwrap();
        let p0 = ps.iter().find(|p| p.orbit == "0").unwrap();
        let po = ps.iter().find(|p| p.orbit == "open" && p.tau == vec![0]).unwrap();
        assert_eq!(cc(p0, &t, &b.poset).unwrap().to_string(), "1\u{b7}[T*_{0}]");
        assert_eq!(cc(po, &t, &b.poset).unwrap().to_string(), "1\u{b7}[zero-section]");
        let mut v = KGroupElement::zero(Basis::Irreducible);
        v.add_term(&p0.id, 2);
        let c2 = cc_linear(&v, &t, &b.poset).unwrap();
        assert_eq!(c2, cc(p0, &t, &b.poset).unwrap().scale(2));
        v.add_term(&p0.id, -2);
        assert!(cc_linear(&v, &t, &b.poset).unwrap().is_zero());
        let mut d = KGroupElement::zero(Basis::Irreducible);
        d.add_term(&p0.id, 1);
        d.add_term(&po.id, -1);
        let c = cc_linear(&d, &t, &b.poset).unwrap();
        assert_eq!(c.coefficient("open").value(), Some(-1));
        let missing = CompleteGeometricParameter { id: "nope".into(), ..p0.clone() };
        assert!(matches!(cc(&missing, &t, &b.poset), Err(Error::NoOracle(_))));
    }

    #[test]
    fn bundle_transfer_keeps_coefficients() {
        let x = space("PGL2", &[qr(1, 2)]);
        let b = &x.blocks[0];
        let t = a1_block_oracle(&x, &b.id).unwrap();
        let p = complete_parameters(&x).unwrap().into_iter().find(|p| p.tau == vec![1]).unwrap();
        let c = cc(&p, &t, &b.poset).unwrap();
        let moved = bundle_transfer(&c, &b.bundle).unwrap();
        let mut a: Vec<i64> = c.values().unwrap().into_values().collect();
        let mut m: Vec<i64> = moved.values().unwrap().into_values().collect();
        a.sort();
        m.sort();
        assert_eq!(a, m);
        assert_eq!(moved.poset.dim("open").unwrap(), 3);
    }

    #[test]
    fn pushforward_and_contention() {
        let x = space("PGL2", &[qr(1, 2)]);
        let b = &x.blocks[0];
        let fiber = OrbitPoset::new(
            vec![crate::flag_orbits::OrbitRecord { id: "pt".into(), dim: 0, attrs: BTreeMap::new() }],
            &[],
        )
        .unwrap();
        let emb = LeviEmbedding::from_parts(vec![], fiber.clone(), b.poset.clone(), vec![("pt".into(), "open".into())]).unwrap();
        let mut src = LagrangianCycle::zero("L", &fiber);
        src.add_term("pt", &Coeff::int(1)).unwrap();
        let pushed = induction_pushforward(&src, &emb, &b.id).unwrap();
        assert_eq!(pushed.unknowns(), vec!["m[0]", "m[inf]"]);
        assert!(induction_pushforward(&LagrangianCycle::zero("L", &fiber), &emb, &b.id).unwrap().is_zero());
        let t = a1_block_oracle(&x, &b.id).unwrap();
        let p = complete_parameters(&x).unwrap().into_iter().find(|p| p.tau == vec![1]).unwrap();
        let r = resolve_pushforward(&pushed, &cc(&p, &t, &b.poset).unwrap(), &emb).unwrap();
        assert!(r.primary_matches && r.support_within);
        assert_eq!(r.values["m[0]"], 1);
        assert!(support_check_contention(&src, &r.cycle, &emb).unwrap());
        assert!(support_check_contention(&LagrangianCycle::zero("L", &fiber), &LagrangianCycle::zero(&b.id, &b.poset), &emb).unwrap());
        let mut bad = r.cycle.clone();
        bad.coeffs.remove("open");
        assert!(!support_check_contention(&src, &bad, &emb).unwrap());
        assert!(matches!(support_check_contention(&src, &pushed, &emb), Err(Error::Incomplete(_))));
        let imm = pushforward_closed_immersion(&src, &emb, &b.id).unwrap();
        assert_eq!(imm.to_string(), "1\u{b7}[zero-section]");
    }

    #[test]
    fn local_tables_match_hand_rows() {
        let t = local_table(Piece::Torus, false);
        assert!(t.contains(&("open:sgn".into(), vec![1, 1, 1])));
        assert!(t.contains(&("0:triv".into(), vec![1, 0, 0])));
        let w = local_table(Piece::Whole, true);
        assert_eq!(w, vec![("P1:triv".into(), vec![1])]);
    }
}
