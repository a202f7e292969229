//! Micro-packets and the packet theorems: tempered, (essentially) unipotent,
//! Adams-Johnson, plus stable virtual characters.
//!
//! Every packet that has a closed-form description is built from that
//! description and then compared with the micro-packet read off an oracle
//! table; the two routes never share code beyond parameter construction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{qr, Q};
use crate::cycles::{
    cc, find_table, induction_pushforward, oracle_tables, resolve_pushforward, support_check_contention, CCTable,
};
use crate::flag_orbits::{Layout, LeviEmbedding, Piece};
use crate::geom_params::{
    aj_degree, aj_factor, aj_induce, arthur_to_langlands, build_levi_space, build_parameter_space, check_aj,
    complete_parameters, component_group, langlands_to_geometric, levi_forms, levi_form_label, parameter,
    principal_unipotent, twist_map, AjInduced, AjReport, ArthurParameterData, CentralTwist,
    CompleteGeometricParameter, GeometricParameterSpace, GeometricPoint, LanglandsParameterData,
};
use crate::groups::CElem;
use crate::inner_class::{factor_form_label, quotient_1_plus_theta, InnerClass, Theta};
use crate::lie_core::Weight;
use crate::model::{dual_torus, Elem, Kind};
use crate::{bail, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PacketKind {
    Micro,
    L,
    Abv,
    Aj,
    Unipotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Packet {
    pub kind: PacketKind,
    pub block: String,
    /// Orbit `S` the packet is attached to.
    pub anchor: String,
    /// Sorted by id.
    pub members: Vec<CompleteGeometricParameter>,
    /// Optional display labels by member id.
    pub labels: BTreeMap<String, String>,
}

impl Packet {
    fn new(kind: PacketKind, block: &str, anchor: &str, mut members: Vec<CompleteGeometricParameter>) -> Self {
        members.sort();
        members.dedup();
        Packet { kind, block: block.to_string(), anchor: anchor.to_string(), members, labels: BTreeMap::new() }
    }

    pub fn ids(&self) -> Vec<String> {
        self.members.iter().map(|m| m.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn same_members(&self, o: &Packet) -> bool {
        self.block == o.block && self.ids() == o.ids()
    }

    /// Members of micro-type packets have the anchor in their orbit closure,
    /// members of `L`-packets sit on the anchor.
    pub fn check_invariants(&self, x: &GeometricParameterSpace) -> Result<()> {
        let b = x.block(&self.block)?;
        let s = b.poset.get(&self.anchor)?;
        for m in &self.members {
            let o = b.poset.get(&m.orbit)?;
            let ok = match self.kind {
                PacketKind::L => o == s,
                _ => b.poset.le(s, o),
            };
            if !ok {
                bail!(Invalid, "{} violates the {:?}-packet invariant at {}", m.id, self.kind, self.anchor);
            }
        }
        Ok(())
    }
}

/// `xi -> integer` with support the anchoring packet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableCharacter {
    pub block: String,
    pub anchor: String,
    pub coeffs: BTreeMap<String, i64>,
}

fn block_params(x: &GeometricParameterSpace, block: &str) -> Result<Vec<CompleteGeometricParameter>> {
    Ok(complete_parameters(x)?.into_iter().filter(|p| p.block == block).collect())
}

/// Rows with a nonzero entry in column `S`.
pub fn micro_packet(s: &GeometricPoint, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<Packet> {
    let b = x.block(&s.block)?;
    b.poset.get(&s.orbit)?;
    let t = find_table(tables, &s.block)?;
    let params = block_params(x, &s.block)?;
    let missing: Vec<&str> = params.iter().filter(|p| t.row(&p.id).is_none()).map(|p| p.id.as_str()).collect();
    if !missing.is_empty() {
        bail!(NoOracle, "table for {} does not cover {}", s.block, missing.join(", "));
    }
    let col = t.col(&s.orbit).ok_or_else(|| Error::NoOracle(format!("table for {} has no column {}", s.block, s.orbit)))?;
    let members: Vec<CompleteGeometricParameter> =
        params.into_iter().filter(|p| t.row(&p.id).map(|r| r[col] != 0).unwrap_or(false)).collect();
    Ok(Packet::new(PacketKind::Micro, &s.block, &s.orbit, members))
}

/// Everything on the orbit of `phi`: all `tau`, all strong real forms.
pub fn l_packet(phi: &LanglandsParameterData, x: &GeometricParameterSpace) -> Result<Packet> {
    let s = langlands_to_geometric(phi, x)?;
    let members = block_params(x, &s.block)?.into_iter().filter(|p| p.orbit == s.orbit).collect();
    Ok(Packet::new(PacketKind::L, &s.block, &s.orbit, members))
}

pub fn psi_orbit(psi: &ArthurParameterData, x: &GeometricParameterSpace) -> Result<GeometricPoint> {
    langlands_to_geometric(&arthur_to_langlands(psi, x)?, x)
}

/// The micro-packet at `S_{phi_psi}`.
pub fn abv_packet(psi: &ArthurParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<Packet> {
    psi.validate(&x.ic.group)?;
    let s = psi_orbit(psi, x)?;
    let mut p = micro_packet(&s, x, tables)?;
    p.kind = PacketKind::Abv;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TemperedReport {
    pub orbit: GeometricPoint,
    pub open: bool,
    pub micro: Vec<String>,
    pub l: Vec<String>,
    pub passes: bool,
}

pub fn tempered_verify(phi: &LanglandsParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<TemperedReport> {
    if !phi.is_tempered() {
        bail!(Precondition, "phi is not tempered: lambda + lambda' = {}", phi.lambda.add(&phi.lambda_prime)?.fmt_coords());
    }
    let s = langlands_to_geometric(phi, x)?;
    let b = x.block(&s.block)?;
    let open = b.poset.is_open(b.poset.get(&s.orbit)?);
    let micro = micro_packet(&s, x, tables)?.ids();
    let l = l_packet(phi, x)?.ids();
    let passes = open && micro == l;
    Ok(TemperedReport { orbit: s, open, micro, l, passes })
}

/// `e(xi) (-1)^{d(S_xi) - d(S_psi)} chi^mic_{S_psi}(xi)` over the ABV packet.
pub fn stable_character(psi: &ArthurParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<StableCharacter> {
    let s = psi_orbit(psi, x)?;
    let packet = abv_packet(psi, x, tables)?;
    let b = x.block(&s.block)?;
    let t = find_table(tables, &s.block)?;
    let ds = b.orbit_dim(&s.orbit)? as i64;
    let mut coeffs = BTreeMap::new();
    for m in &packet.members {
        let chi = t.entry(&m.id, &s.orbit).ok_or_else(|| Error::NoOracle(format!("no entry for {}", m.id)))?;
        let d = b.orbit_dim(&m.orbit)? as i64 - ds;
        let sign = if d.rem_euclid(2) == 0 { 1 } else { -1 };
        coeffs.insert(m.id.clone(), m.kottwitz_sign as i64 * sign * chi);
    }
    Ok(StableCharacter { block: s.block, anchor: s.orbit, coeffs })
}

// ---------------------------------------------------------------------------
// Unipotent packets

fn is_compact_factor(kind: Kind, x: &Elem) -> bool {
    kind.is_a1() && x.is_central_in(kind)
}

/// The member with real form `x` on the orbit singled out per factor:
/// compact rank-one factors go to the open orbit, the others stay at `S`.
/// Among the characters there, pick the one whose form matches `x`
/// with trivial `tau` on noncompact rank-one factors.
fn member_for_form(x: &GeometricParameterSpace, s: &GeometricPoint, form_x: &[Elem], match_label: &str) -> Result<CompleteGeometricParameter> {
    let b = x.block(&s.block)?;
    let here = b.layout.split_id(&s.orbit)?;
    let mut parts: Vec<&str> = Vec::new();
    let mut k = 0;
    for slot in &b.layout.slots {
        if slot.piece == Piece::Point {
            continue;
        }
        let f = slot.factors[0];
        let kind = x.factors[f].g_kind;
        let part = if is_compact_factor(kind, &form_x[f]) {
            match slot.piece {
                Piece::Torus | Piece::NormTorus => "open",
                _ => here[k],
            }
        } else {
            here[k]
        };
        parts.push(part);
        k += 1;
    }
    let orbit = Layout::join_ids(&parts);
    let cg = component_group(x, &s.block, &orbit)?;
    let mut found: Vec<CompleteGeometricParameter> = Vec::new();
    for tau in cg.characters() {
        let trivial_off = cg.factors.iter().zip(&tau).all(|(c, k)| {
            let f = &x.factors[c.factor];
            !(f.kind.is_a1() && !is_compact_factor(f.g_kind, &form_x[c.factor])) || *k == 0
        });
        if !trivial_off {
            continue;
        }
        let p = parameter(x, &s.block, &orbit, &tau)?;
        let same = x.factors.iter().enumerate().all(|(i, f)| {
            if f.levi_torus || f.kind == Kind::Torus {
                p.x[i].eq_in(&form_x[i], f.g_kind)
            } else {
                factor_form_label(f.g_kind, Theta::Id, &p.x[i]) == factor_form_label(f.g_kind, Theta::Id, &form_x[i])
            }
        });
        if same {
            found.push(p);
        }
    }
    match found.len() {
        1 => Ok(found.remove(0)),
        0 => bail!(Incomplete, "no parameter at {}:{orbit} carries the form {match_label}", s.block),
        _ => bail!(Incomplete, "several parameters at {}:{orbit} carry the form {match_label}", s.block),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnipotentPacket {
    pub packet: Packet,
    /// Real form label per member id.
    pub forms: BTreeMap<String, String>,
    /// Agreement with the micro-packet at `S_psi`, when a table was supplied.
    pub matches_micro: Option<bool>,
}

fn gate(x: &GeometricParameterSpace) -> Result<()> {
    let q = quotient_1_plus_theta(&x.ic.dual_center())?;
    if !q.contains(&x.e_group.z)? {
        bail!(Existence, "z = {} is not in (1 + theta) Z(G^vee)", x.type_z.z);
    }
    Ok(())
}

/// One member per strong real form.
pub fn unipotent_packet(psi_u: &ArthurParameterData, x: &GeometricParameterSpace, tables: Option<&[CCTable]>) -> Result<UnipotentPacket> {
    let g = &x.ic.group;
    psi_u.validate(g)?;
    if psi_u.levi.len() != g.simple.len() || !psi_u.restriction.lambda.is_zero() {
        bail!(Precondition, "psi is not principal unipotent");
    }
    if !psi_u.restriction.y.iter().zip(&x.factors).all(|(y, f)| y.is_one_in(f.kind)) {
        bail!(Precondition, "psi is not principal unipotent: y is not delta_0");
    }
    gate(x)?;
    let s = psi_orbit(psi_u, x)?;
    let mut members = Vec::new();
    let mut forms = BTreeMap::new();
    for form in &x.forms {
        let p = member_for_form(x, &s, &form.x, &form.label)?;
        if p.realform != form.label {
            bail!(Incomplete, "member for {} lands on {}", form.label, p.realform);
        }
        forms.insert(p.id.clone(), form.label.clone());
        members.push(p);
    }
    let packet = Packet::new(PacketKind::Unipotent, &s.block, &s.orbit, members);
    let matches_micro = match tables {
        Some(t) => Some(micro_packet(&s, x, t)?.ids() == packet.ids()),
        None => None,
    };
    Ok(UnipotentPacket { packet, forms, matches_micro })
}

/// Logarithmic coordinates of a central element of `G^vee` given per factor.
pub fn central_log(ic: &InnerClass, elems: &[Elem]) -> Result<CElem> {
    let zc = ic.dual_center();
    let mut combos: Vec<CElem> = vec![vec![]];
    for &n in &zc.orders {
        let den = if n == 0 { 8 } else { n as i64 };
        let mut next = Vec::new();
        for c in &combos {
            for k in 0..den {
                let mut v = c.clone();
                v.push(qr(k, den));
                next.push(v);
            }
        }
        combos = next;
    }
    for c in combos {
        let e = ic.dual_central_elems(&c)?;
        if e.iter().zip(elems).zip(&ic.factors).all(|((a, b), f)| a.eq_in(b, f.kind.dual())) {
            return Ok(c);
        }
    }
    bail!(Unsupported, "central element outside the eighth roots of unity")
}

fn theta_weight(x: &GeometricParameterSpace, w: &Weight) -> Weight {
    let mut out = w.clone();
    for (f, gf) in x.factors.iter().zip(&x.ic.factors) {
        if f.kind == Kind::Torus && f.theta == Theta::Inverse {
            out.coords[gf.coord] = -w.coords[gf.coord].clone();
        }
    }
    out
}

fn half_exp_elem(x: &GeometricParameterSpace, i: usize, v: &Q) -> Result<Elem> {
    let f = &x.factors[i];
    if f.kind.is_a1() {
        dual_torus(f.g_kind, &(v * qr(1, 2)))
    } else {
        let c = crate::arith::Cyc8::exp_2pi_i(&(v * qr(1, 2))).ok_or_else(|| Error::Unsupported("exponent outside the eighth roots".into()))?;
        Ok(Elem::S(c))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EssentiallyUnipotent {
    pub twist: CentralTwist,
    pub unipotent: UnipotentPacket,
    pub packet: Packet,
    /// `chi(a, delta) . pi(psi_u, delta)` per member id.
    pub labels: BTreeMap<String, String>,
    /// Oracle tables agree entrywise across the twist.
    pub tables_match: bool,
    pub matches_abv: bool,
}

/// Factor `psi = a psi_u`, build the unipotent packet and carry it across the twist by `a`.
pub fn essentially_unipotent_packet(psi: &ArthurParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<EssentiallyUnipotent> {
    let g = &x.ic.group;
    psi.validate(g)?;
    if psi.levi.len() != g.simple.len() {
        bail!(Precondition, "psi is not principal on the SL2");
    }
    let r = &psi.restriction;
    let lambda_a = r.lambda.clone();
    if lambda_a.pairings(g).iter().any(|p| !p.is_zero()) {
        bail!(Precondition, "psi is not essentially unipotent: lambda_r = {} is not central", lambda_a.fmt_coords());
    }
    let mut s_elems = Vec::new();
    for (i, gf) in x.ic.factors.iter().enumerate() {
        let e = half_exp_elem(x, i, &(-lambda_a.coords[gf.coord].clone()))?.mul(&r.y[i]);
        if !e.is_central_in(x.factors[i].kind) {
            bail!(Precondition, "psi is not essentially unipotent: y_r is not central on factor {i}");
        }
        s_elems.push(e);
    }
    let s = central_log(&x.ic, &s_elems)?;
    // z exp(pi i (lambda_a - theta lambda_a)) in (1 + theta) Z(G^vee).
    let diff = lambda_a.add(&theta_weight(x, &lambda_a).neg())?;
    let shift: Vec<Elem> = x.ic.factors.iter().enumerate().map(|(i, gf)| half_exp_elem(x, i, &diff.coords[gf.coord])).collect::<Result<_>>()?;
    let zc = x.ic.dual_center();
    let total = zc.add(&x.e_group.z, &central_log(&x.ic, &shift)?);
    if !quotient_1_plus_theta(&zc)?.contains(&total)? {
        bail!(Existence, "z exp(pi i (lambda - theta lambda)) is not in (1 + theta) Z(G^vee)");
    }
    let xu = build_parameter_space(&x.ic, &x.e_group, &psi.h_weight)?;
    let psi_u = principal_unipotent(&xu)?;
    let tables_u = oracle_tables(&xu)?;
    let unipotent = unipotent_packet(&psi_u, &xu, Some(&tables_u))?;
    let twist = CentralTwist { lambda_a, s };
    let tm = twist_map(&xu, &twist)?;
    if tm.target.blocks.iter().map(|b| &b.id).ne(x.blocks.iter().map(|b| &b.id)) || tm.target.lambda != x.lambda {
        bail!(Invalid, "the twist of the unipotent space is not the space of psi");
    }
    let all = complete_parameters(x)?;
    let mut members = Vec::new();
    let mut labels = BTreeMap::new();
    for m in &unipotent.packet.members {
        let tid = tm.image(&m.id).ok_or_else(|| Error::Invalid(format!("{} has no twist", m.id)))?;
        let p = all.iter().find(|p| p.id == tid).ok_or_else(|| Error::Invalid(format!("{tid} is not a parameter")))?;
        labels.insert(p.id.clone(), format!("chi(a,{0})\u{b7}pi(psi_u,{0})", m.realform));
        members.push(p.clone());
    }
    let s_psi = psi_orbit(psi, x)?;
    let mut packet = Packet::new(PacketKind::Abv, &s_psi.block, &s_psi.orbit, members);
    packet.labels = labels.clone();
    let tables_match = twisted_tables_agree(&xu, &tables_u, &tm, tables)?;
    let matches_abv = abv_packet(psi, x, tables)?.ids() == packet.ids();
    Ok(EssentiallyUnipotent { twist, unipotent, packet, labels, tables_match, matches_abv })
}

/// `table(xi, S) = table'(a xi, a S)` for every entry.
pub fn twisted_tables_agree(
    xu: &GeometricParameterSpace,
    tables_u: &[CCTable],
    tm: &crate::geom_params::TwistMap,
    tables: &[CCTable],
) -> Result<bool> {
    let omap = crate::geom_params::orbit_map_of(tm);
    for b in &xu.blocks {
        let t = find_table(tables_u, &b.id)?;
        for (ri, row) in t.rows.iter().enumerate() {
            let trow = tm.image(row).ok_or_else(|| Error::Invalid(format!("{row} has no twist")))?;
            for (ci, col) in t.cols.iter().enumerate() {
                let (tb, to) = &omap[&(b.id.clone(), col.clone())];
                let tt = find_table(tables, tb)?;
                let v = tt.entry(trow, to).ok_or_else(|| Error::NoOracle(format!("no entry ({trow}, {to})")))?;
                if v != t.entries[ri][ci] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Adams-Johnson packets

#[derive(Clone, Debug, Serialize)]
pub struct AjPacket {
    pub report: AjReport,
    pub levi: Vec<usize>,
    pub z_product: Vec<Elem>,
    pub z_matrix: Vec<Elem>,
    pub z_consistent: bool,
    pub type_z_l: String,
    /// `psi_L`-packet members on the Levi space.
    pub l_members: Vec<CompleteGeometricParameter>,
    pub induced: Vec<AjInduced>,
    /// `i = (1/2) dim(k / l cap k)` per induced member.
    pub degrees: BTreeMap<String, usize>,
    pub packet: Packet,
    #[serde(skip)]
    pub l_space: GeometricParameterSpace,
}

pub fn aj_packet(psi: &ArthurParameterData, x: &GeometricParameterSpace) -> Result<AjPacket> {
    let aj = aj_factor(psi, x)?;
    let xl = build_levi_space(&aj, x)?;
    let s_l = psi_orbit(&aj.psi_l, &xl)?;
    let mut l_members = Vec::new();
    for form_x in levi_forms(&xl) {
        let label = levi_form_label(&xl, &form_x);
        l_members.push(member_for_form(&xl, &s_l, &form_x, &label)?);
    }
    l_members.sort();
    let mut induced = Vec::new();
    let mut degrees = BTreeMap::new();
    for p in &l_members {
        let ind = aj_induce(&aj, &xl, x, p)?;
        if !ind.form_match {
            bail!(Invalid, "{} induces to {} on a different real form", p.id, ind.target.id);
        }
        degrees.insert(ind.target.id.clone(), aj_degree(&xl, &ind.target.x));
        induced.push(ind);
    }
    let s = psi_orbit(psi, x)?;
    let packet = Packet::new(PacketKind::Aj, &s.block, &s.orbit, induced.iter().map(|i| i.target.clone()).collect());
    Ok(AjPacket {
        report: aj.report.clone(),
        levi: aj.levi.clone(),
        z_product: aj.z_product.clone(),
        z_matrix: aj.z_matrix.clone(),
        z_consistent: aj.z_consistent,
        type_z_l: aj.e_l.tag().z,
        l_members,
        induced,
        degrees,
        packet,
        l_space: xl,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AbvAjComparison {
    pub aj: AjPacket,
    pub abv: Packet,
    /// Distinct induced members equal the number of `psi_L`-members.
    pub induction_injective: bool,
    pub equal: bool,
}

pub fn verify_abv_equals_aj(psi: &ArthurParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<AbvAjComparison> {
    let report = check_aj(psi, x)?;
    if let Some(f) = report.first_failure() {
        bail!(Precondition, "{f}");
    }
    let aj = aj_packet(psi, x)?;
    let abv = abv_packet(psi, x, tables)?;
    let induction_injective = aj.packet.len() == aj.l_members.len();
    let equal = aj.packet.ids() == abv.ids() && induction_injective;
    Ok(AbvAjComparison { aj, abv, induction_injective, equal })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionCheck {
    pub source: String,
    pub target: String,
    pub source_cycle: String,
    pub pushed: String,
    pub resolved: String,
    pub direct: String,
    pub unknowns: Vec<String>,
    pub primary_matches: bool,
    pub support_within: bool,
    pub equal: bool,
    pub contention: bool,
    pub guard: bool,
}

impl InductionCheck {
    pub fn passes(&self) -> bool {
        self.primary_matches && self.support_within && self.equal && self.contention && self.guard
    }
}

/// Levi embedding of one block of the Levi space, by inducing one parameter per orbit.
pub fn aj_embedding(
    aj: &crate::geom_params::AjFactor,
    xl: &GeometricParameterSpace,
    x: &GeometricParameterSpace,
    block: &str,
) -> Result<(String, LeviEmbedding)> {
    let bl = xl.block(block)?;
    let params = block_params(xl, block)?;
    let mut sat = Vec::new();
    let mut target: Option<String> = None;
    for o in bl.poset.orbits() {
        let p = params.iter().find(|p| p.orbit == o.id).ok_or_else(|| Error::Incomplete(format!("no parameter on {}", o.id)))?;
        let ind = aj_induce(aj, xl, x, p)?;
        match &target {
            None => target = Some(ind.target.block.clone()),
            Some(t) if *t != ind.target.block => bail!(Incomplete, "orbits of {block} saturate into different blocks"),
            _ => {}
        }
        sat.push((o.id.clone(), ind.target.orbit.clone()));
    }
    let tb = target.ok_or_else(|| Error::Incomplete(format!("block {block} is empty")))?;
    let amb = x.block(&tb)?.poset.clone();
    Ok((tb, LeviEmbedding::from_parts(aj.levi.clone(), bl.poset.clone(), amb, sat)?))
}

/// Pushforward of `cc(xi_L)` against `cc` of the induced parameter, for every parameter of every Levi block.
pub fn induction_checks(psi: &ArthurParameterData, x: &GeometricParameterSpace, tables: &[CCTable]) -> Result<Vec<InductionCheck>> {
    let aj = aj_factor(psi, x)?;
    let xl = build_levi_space(&aj, x)?;
    let tables_l = oracle_tables(&xl)?;
    let mut out = Vec::new();
    for bl in &xl.blocks {
        let (tb, emb) = aj_embedding(&aj, &xl, x, &bl.id)?;
        let tl = find_table(&tables_l, &bl.id)?;
        let tg = find_table(tables, &tb)?;
        let gposet = &x.block(&tb)?.poset;
        for p in block_params(&xl, &bl.id)? {
            let ind = aj_induce(&aj, &xl, x, &p)?;
            let src = cc(&p, tl, &bl.poset)?;
            let pushed = induction_pushforward(&src, &emb, &tb)?;
            let direct = cc(&ind.target, tg, gposet)?;
            let res = resolve_pushforward(&pushed, &direct, &emb)?;
            let contention = support_check_contention(&src, &res.cycle, &emb)?;
            out.push(InductionCheck {
                source: p.id.clone(),
                target: ind.target.id.clone(),
                source_cycle: src.to_string(),
                pushed: pushed.to_string(),
                resolved: res.cycle.to_string(),
                direct: direct.to_string(),
                unknowns: pushed.unknowns(),
                primary_matches: res.primary_matches,
                support_within: res.support_within,
                equal: res.cycle.coeffs == direct.coeffs,
                contention,
                guard: emb.boundary_guard(),
            });
        }
    }
    Ok(out)
}
