//! Extended groups, E-groups, strong real forms and central cohomology.
//!
//! The extended group is modelled holomorphically: `G^Gamma = G . <xi_0>` with
//! `xi_0` acting by an involution `theta_0` preserving the diagonal torus and
//! `xi_0^2 = z_bar`. A strong real form is `delta = x xi_0` with
//! `delta^2 = x theta_0(x) z_bar` central; two are equivalent when
//! `x' = g x theta_0(g)^-1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{q, qr, qser, Cyc8, Q};
use crate::groups::{fmt_celem, CElem, CentralGroup};
use crate::lie_core::{dual_datum, identity, DatumAutomorphism, RootDatum};
use crate::model::{candidates, factorize, fmt_elems, g_torus, Elem, Factor, Kind};
use crate::{bail, Error, Result};

/// How `theta_0` acts on one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Theta {
    Id,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slot {
    One { factor: usize, theta: Theta },
    Swap { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedGroupInvariants {
    pub a: DatumAutomorphism,
    /// Representative of `z_bar` in `Z(G)^sigma / (1 + sigma) Z(G)`, logarithmic coordinates.
    #[serde(serialize_with = "qser::vec")]
    pub z_bar: CElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EGroupInvariants {
    /// Automorphism of the dual based root datum.
    pub a: DatumAutomorphism,
    /// Element of `Z(G^vee)^theta_Z`, logarithmic coordinates.
    #[serde(serialize_with = "qser::vec")]
    pub z: CElem,
    pub is_l_group: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TypeZTag {
    pub z: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongRealForm {
    pub label: String,
    /// `delta^2` as a central element, displayed per factor.
    pub square: String,
    #[serde(skip)]
    pub square_elem: Vec<Elem>,
    pub cartan_class: String,
    pub kottwitz_sign: i8,
    pub quasi_split: bool,
    /// Representative `x` with `delta = x xi_0`.
    pub x: Vec<Elem>,
    pub dim_k: usize,
    pub rank_k: usize,
}

/// Group, factorization and the action of `xi_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InnerClass {
    pub name: String,
    pub group: RootDatum,
    pub factors: Vec<Factor>,
    pub slots: Vec<Slot>,
    pub inv: ExtendedGroupInvariants,
}

pub const INNER_CLASS_NAMES: [&str; 4] = ["equal-rank", "compact", "split", "complex"];

impl InnerClass {
    /// Named inner classes: `equal-rank` (alias `compact`) makes every torus
    /// coordinate compact, `split` makes them split, `complex` swaps the
    /// first two rank-one factors.
    pub fn named(g: &RootDatum, selector: &str) -> Result<Self> {
        let factors = factorize(g)?;
        let n = g.rank;
        let mut m = identity(n);
        let mut perm: Vec<usize> = (0..g.simple.len()).collect();
        match selector {
            "equal-rank" | "compact" | "split" => {
                let torus_sign = if selector == "split" { 1 } else { -1 };
                for f in &factors {
                    if f.kind == Kind::Torus {
                        m[f.coord][f.coord] = torus_sign;
                    }
                }
            }
            "complex" => {
                let a1: Vec<&Factor> = factors.iter().filter(|f| f.kind.is_a1()).collect();
                if a1.len() < 2 || a1[0].kind != a1[1].kind {
                    bail!(Domain, "{}: the complex inner class needs two isomorphic rank-one factors", g.name);
                }
                let (i, j) = (a1[0].coord, a1[1].coord);
                m[i][i] = 0;
                m[j][j] = 0;
                m[i][j] = 1;
                m[j][i] = 1;
                let (si, sj) = (a1[0].simple.unwrap_or(0), a1[1].simple.unwrap_or(0));
                perm.swap(si, sj);
                for f in &factors {
                    if f.kind == Kind::Torus {
                        m[f.coord][f.coord] = -1;
                    }
                }
            }
            other => bail!(Catalog, "unknown inner class `{other}` (expected one of {:?})", INNER_CLASS_NAMES),
        }
        let a = DatumAutomorphism { perm, matrix: m, involutive: true };
        let inv = ExtendedGroupInvariants { a, z_bar: vec![] };
        let mut ic = Self::from_invariants(g, inv)?;
        ic.name = selector.to_string();
        Ok(ic)
    }

    /// Read `theta_0 = -w_0 a` off the invariants.
    pub fn from_invariants(g: &RootDatum, mut inv: ExtendedGroupInvariants) -> Result<Self> {
        let factors = factorize(g)?;
        if inv.a.matrix.is_empty() && g.rank > 0 {
            bail!(Precondition, "{}: empty inner-class data", g.name);
        }
        inv.a.validate(g)?;
        let m = &inv.a.matrix;
        let mut slots = Vec::new();
        let mut used = vec![false; factors.len()];
        for (i, f) in factors.iter().enumerate() {
            if used[i] {
                continue;
            }
            let col: Vec<i64> = m.iter().map(|r| r[f.coord]).collect();
            let image: Vec<usize> = (0..g.rank).filter(|&r| col[r] != 0).collect();
            if image.len() != 1 {
                bail!(Unsupported, "{}: automorphism mixes coordinates", g.name);
            }
            let j = image[0];
            if j == f.coord {
                let theta = match (f.kind, col[j]) {
                    (Kind::Torus, -1) => Theta::Id,
                    (Kind::Torus, 1) => Theta::Inverse,
                    (_, 1) => Theta::Id,
                    _ => bail!(Invalid, "{}: automorphism does not fix the rank-one factor on coordinate {j}", g.name),
                };
                slots.push(Slot::One { factor: i, theta });
                used[i] = true;
            } else {
                let k = factors.iter().position(|h| h.coord == j).expect("coordinate exists");
                if factors[k].kind != f.kind || f.kind == Kind::Torus {
                    bail!(Unsupported, "{}: only swaps of isomorphic rank-one factors are modelled", g.name);
                }
                slots.push(Slot::Swap { a: i, b: k });
                used[i] = true;
                used[k] = true;
            }
        }
        let ic = InnerClass { name: "custom".into(), group: g.clone(), factors, slots, inv: inv.clone() };
        let zg = ic.center();
        if inv.z_bar.is_empty() {
            inv.z_bar = zg.identity();
        }
        if !zg.contains(&inv.z_bar) || zg.apply_theta(&inv.z_bar) != zg.normalize(&inv.z_bar) {
            bail!(Invalid, "z_bar {} is not a sigma-fixed central element", fmt_celem(&inv.z_bar));
        }
        Ok(InnerClass { inv, ..ic })
    }

    pub fn kind(&self, f: usize) -> Kind {
        self.factors[f].kind
    }

    /// `Z(G)` with `theta_Z`; one coordinate per `SL2` or torus factor.
    pub fn center(&self) -> CentralGroup {
        let (coords, theta) = center_layout(&self.factors, &self.slots, false);
        CentralGroup {
            orders: coords.iter().map(|&(_, n)| n).collect(),
            labels: coords.iter().map(|&(f, _)| format!("f{f}")).collect(),
            theta,
        }
    }

    /// `Z(G^vee)` with the dual involution.
    pub fn dual_center(&self) -> CentralGroup {
        let (coords, theta) = center_layout(&self.factors, &self.slots, true);
        CentralGroup {
            orders: coords.iter().map(|&(_, n)| n).collect(),
            labels: coords.iter().map(|&(f, _)| format!("f{f}")).collect(),
            theta,
        }
    }

    /// Factor elements of a central element of `G` given in logarithmic coordinates.
    pub fn central_elems(&self, z: &[Q]) -> Result<Vec<Elem>> {
        let (coords, _) = center_layout(&self.factors, &self.slots, false);
        let mut out: Vec<Elem> = self.factors.iter().map(|f| Elem::one(f.kind)).collect();
        for ((f, _), u) in coords.iter().zip(z) {
            out[*f] = g_torus(self.factors[*f].kind, u)?;
        }
        Ok(out)
    }

    /// Factor elements of a central element of `G^vee`; elements live in the dual kinds.
    pub fn dual_central_elems(&self, z: &[Q]) -> Result<Vec<Elem>> {
        let (coords, _) = center_layout(&self.factors, &self.slots, true);
        let mut out: Vec<Elem> = self.factors.iter().map(|f| Elem::one(f.kind.dual())).collect();
        for ((f, _), u) in coords.iter().zip(z) {
            out[*f] = g_torus(self.factors[*f].kind.dual(), u)?;
        }
        Ok(out)
    }

    /// The dual involution per factor: `a^vee` on the dual torus.
    pub fn dual_theta(&self, f: usize) -> Result<Theta> {
        for s in &self.slots {
            match *s {
                Slot::One { factor, theta } if factor == f => {
                    return Ok(match (self.factors[f].kind, theta) {
                        (Kind::Torus, Theta::Id) => Theta::Inverse,
                        (Kind::Torus, Theta::Inverse) => Theta::Id,
                        _ => Theta::Id,
                    })
                }
                Slot::Swap { a, b } if a == f || b == f => {
                    bail!(Unsupported, "dual side of the complex inner class is not modelled")
                }
                _ => {}
            }
        }
        bail!(Invalid, "factor {f} has no slot")
    }

    /// Quasi-split representative `x = exp(pi i rho^vee)`.
    pub fn x_qs(&self) -> Vec<Elem> {
        self.factors
            .iter()
            .map(|f| match f.kind {
                Kind::Sl2 => g_torus(Kind::Sl2, &qr(1, 4)).expect("eighth roots"),
                Kind::Pgl2 => g_torus(Kind::Pgl2, &qr(1, 2)).expect("eighth roots"),
                Kind::Torus => Elem::one(Kind::Torus),
            })
            .collect()
    }

    fn z_elems(&self) -> Result<Vec<Elem>> {
        self.central_elems(&self.inv.z_bar)
    }

    fn apply_theta0(&self, x: &[Elem]) -> Vec<Elem> {
        let mut out = x.to_vec();
        for s in &self.slots {
            match *s {
                Slot::One { factor, theta: Theta::Inverse } => out[factor] = x[factor].inv(),
                Slot::One { .. } => {}
                Slot::Swap { a, b } => {
                    out[a] = x[b].clone();
                    out[b] = x[a].clone();
                }
            }
        }
        out
    }

    /// `delta^2 = x theta_0(x) z_bar`.
    pub fn square(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        let t = self.apply_theta0(x);
        let z = self.z_elems()?;
        Ok(x.iter().zip(&t).zip(&z).map(|((a, b), c)| a.mul(b).mul(c)).collect())
    }

    /// Is `g` in `Z_fin`: the finite center, or the 2-torsion of torus factors.
    fn in_z_fin(&self, f: usize, g: &Elem) -> bool {
        let k = self.kind(f);
        if !g.is_central_in(k) {
            return false;
        }
        match k {
            Kind::Torus => g.pow(2).is_one_in(k),
            _ => true,
        }
    }

    /// Slot key for the equivalence `x ~ g x theta_0(g)^-1`; `None` when
    /// `delta^2` is not in `Z_fin`.
    fn slot_key(&self, slot: &Slot, x: &[Elem], sq: &[Elem]) -> Option<String> {
        match *slot {
            Slot::One { factor, theta } => {
                if !self.in_z_fin(factor, &sq[factor]) {
                    return None;
                }
                let k = self.kind(factor);
                Some(match (k, theta) {
                    (Kind::Sl2, _) => format!("tr={}", x[factor].mat().trace()),
                    (Kind::Pgl2, _) => {
                        let t = x[factor].mat().trace();
                        format!("tr^2={}", t.clone() * t)
                    }
                    (Kind::Torus, Theta::Id) => format!("x={}", x[factor]),
                    (Kind::Torus, Theta::Inverse) => "x=*".into(),
                })
            }
            Slot::Swap { a, b } => {
                if !self.in_z_fin(a, &sq[a]) || !self.in_z_fin(b, &sq[b]) {
                    return None;
                }
                let k = self.kind(a);
                let gh = x[a].mul(&x[b]).canonical(k);
                Some(format!("gh={gh}"))
            }
        }
    }

    fn slot_label(&self, slot: &Slot, x: &[Elem]) -> String {
        match *slot {
            Slot::One { factor, theta } => factor_form_label(self.kind(factor), theta, &x[factor]),
            Slot::Swap { a, b } => {
                let k = self.kind(a);
                let gh = x[a].mul(&x[b]).canonical(k);
                let base = if k == Kind::Sl2 { "SL(2,C)" } else { "PGL(2,C)" };
                if gh.is_one_in(k) {
                    format!("{base}+")
                } else {
                    format!("{base}[{gh}]")
                }
            }
        }
    }

    /// `(cartan class, dim K, rank K, dim G)` for one slot.
    fn slot_shape(&self, slot: &Slot, x: &[Elem]) -> (&'static str, usize, usize, usize) {
        match *slot {
            Slot::One { factor, theta } => match (self.kind(factor), theta) {
                (Kind::Torus, Theta::Id) => ("compact", 1, 1, 1),
                (Kind::Torus, Theta::Inverse) => ("split", 0, 0, 1),
                (k, _) => {
                    if x[factor].is_central_in(k) {
                        ("compact", 3, 1, 3)
                    } else {
                        ("split", 1, 1, 3)
                    }
                }
            },
            Slot::Swap { .. } => ("complex", 3, 1, 6),
        }
    }

    fn slot_candidates(&self, slot: &Slot) -> Vec<Vec<(usize, Elem)>> {
        match *slot {
            Slot::One { factor, .. } => candidates(self.kind(factor)).into_iter().map(|e| vec![(factor, e)]).collect(),
            Slot::Swap { a, b } => {
                let c = candidates(self.kind(a));
                let mut out = Vec::new();
                for g in &c {
                    for h in &c {
                        out.push(vec![(a, g.clone()), (b, h.clone())]);
                    }
                }
                out
            }
        }
    }

    /// Classes of one slot: key -> representative assignment.
    fn slot_classes(&self, slot: &Slot) -> Result<Vec<(String, Vec<(usize, Elem)>)>> {
        let mut found: Vec<(String, Vec<(usize, Elem)>)> = Vec::new();
        for assignment in self.slot_candidates(slot) {
            let mut x: Vec<Elem> = self.factors.iter().map(|f| Elem::one(f.kind)).collect();
            for (f, e) in &assignment {
                x[*f] = e.clone();
            }
            let sq = self.square(&x)?;
            if let Some(key) = self.slot_key(slot, &x, &sq) {
                if !found.iter().any(|(k, _)| *k == key) {
                    found.push((key, assignment));
                }
            }
        }
        Ok(found)
    }

    /// Full key of `x`, used to classify arbitrary representatives.
    pub fn class_key(&self, x: &[Elem]) -> Result<Option<String>> {
        let sq = self.square(x)?;
        let mut parts = Vec::new();
        for s in &self.slots {
            match self.slot_key(s, x, &sq) {
                Some(k) => parts.push(k),
                None => return Ok(None),
            }
        }
        Ok(Some(parts.join("|")))
    }
}

/// Label of the real form of one rank-one factor with representative `g`.
pub fn factor_form_label(kind: Kind, theta: Theta, g: &Elem) -> String {
    match (kind, theta) {
        (Kind::Sl2, _) => {
            if g.is_one_in(Kind::Sl2) {
                "SU(2)+".into()
            } else if g.neg().is_one_in(Kind::Sl2) {
                "SU(2)-".into()
            } else {
                "SL(2,R)".into()
            }
        }
        (Kind::Pgl2, _) => {
            if g.is_one_in(Kind::Pgl2) {
                "SO(3)".into()
            } else {
                "PGL(2,R)".into()
            }
        }
        (Kind::Torus, Theta::Id) => format!("U(1)[{g}]"),
        (Kind::Torus, Theta::Inverse) => "GL(1,R)".into(),
    }
}

/// Coordinates of the center: `(factor, order)` plus the involution matrix.
fn center_layout(factors: &[Factor], slots: &[Slot], dual: bool) -> (Vec<(usize, u32)>, Vec<Vec<i64>>) {
    let mut coords: Vec<(usize, u32)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let k = if dual { f.kind.dual() } else { f.kind };
        match k {
            Kind::Sl2 => coords.push((i, 2)),
            Kind::Torus => coords.push((i, 0)),
            Kind::Pgl2 => {}
        }
    }
    let n = coords.len();
    let pos = |f: usize| coords.iter().position(|&(g, _)| g == f);
    let mut theta = vec![vec![0i64; n]; n];
    for s in slots {
        match *s {
            Slot::One { factor, theta: t } => {
                if let Some(p) = pos(factor) {
                    let inverse = match (factors[factor].kind, t, dual) {
                        (Kind::Torus, Theta::Inverse, false) => true,
                        (Kind::Torus, Theta::Id, true) => true,
                        _ => false,
                    };
                    theta[p][p] = if inverse { -1 } else { 1 };
                }
            }
            Slot::Swap { a, b } => {
                if let (Some(p), Some(r)) = (pos(a), pos(b)) {
                    theta[p][r] = 1;
                    theta[r][p] = 1;
                }
            }
        }
    }
    (coords, theta)
}

pub fn enumerate_strong_real_forms(g: &RootDatum, inv: &ExtendedGroupInvariants) -> Result<Vec<StrongRealForm>> {
    let ic = InnerClass::from_invariants(g, inv.clone())?;
    strong_real_forms(&ic)
}

/// Brute force over torus-normalizing candidates, one entry per class.
pub fn strong_real_forms(ic: &InnerClass) -> Result<Vec<StrongRealForm>> {
    let per_slot: Vec<Vec<(String, Vec<(usize, Elem)>)>> =
        ic.slots.iter().map(|s| ic.slot_classes(s)).collect::<Result<_>>()?;
    let x_qs = ic.x_qs();
    let qs_key = ic
        .class_key(&x_qs)?
        .ok_or_else(|| Error::Invalid(format!("{}: exp(pi i rho^vee) is not a strong real form for this z_bar", ic.group.name)))?;
    let two_q = |x: &[Elem]| -> i64 {
        ic.slots.iter().map(|s| {
            let (_, dk, _, dg) = ic.slot_shape(s, x);
            (dg - dk) as i64
        }).sum()
    };
    let q_qs = two_q(&x_qs);
    // Cartesian product in slot order.
    let mut combos: Vec<Vec<(usize, Elem)>> = vec![vec![]];
    for classes in &per_slot {
        let mut next = Vec::new();
        for c in &combos {
            for (_, asg) in classes {
                let mut n = c.clone();
                n.extend(asg.iter().cloned());
                next.push(n);
            }
        }
        combos = next;
    }
    let mut out = Vec::new();
    for asg in combos {
        let mut x: Vec<Elem> = ic.factors.iter().map(|f| Elem::one(f.kind)).collect();
        for (f, e) in asg {
            x[f] = e;
        }
        let sq = ic.square(&x)?;
        let key = ic.class_key(&x)?.expect("combination of valid slot classes");
        let mut labels = Vec::new();
        let mut classes = Vec::new();
        let (mut dim_k, mut rank_k) = (0, 0);
        for s in &ic.slots {
            labels.push(ic.slot_label(s, &x));
            let (c, dk, rk, _) = ic.slot_shape(s, &x);
            classes.push(c);
            dim_k += dk;
            rank_k += rk;
        }
        let diff = two_q(&x) - q_qs;
        if diff % 2 != 0 {
            bail!(Invalid, "odd half-dimension difference between real forms");
        }
        let sign = if (diff / 2) % 2 == 0 { 1 } else { -1 };
        let label = if labels.is_empty() { "trivial".to_string() } else { labels.join(" x ") };
        out.push(StrongRealForm {
            label,
            square: fmt_elems(&sq),
            square_elem: sq,
            cartan_class: classes.join("/"),
            kottwitz_sign: sign,
            quasi_split: key == qs_key,
            x,
            dim_k,
            rank_k,
        });
    }
    Ok(out)
}

/// Index of the form containing `x`.
pub fn classify_form(ic: &InnerClass, forms: &[StrongRealForm], x: &[Elem]) -> Result<Option<usize>> {
    let Some(key) = ic.class_key(x)? else { return Ok(None) };
    for (i, f) in forms.iter().enumerate() {
        if ic.class_key(&f.x)?.as_deref() == Some(key.as_str()) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1 {
    #[serde(serialize_with = "qser::vecvec")]
    pub numerator: Vec<CElem>,
    #[serde(serialize_with = "qser::vecvec")]
    pub denominator: Vec<CElem>,
    /// One representative per class.
    #[serde(serialize_with = "qser::vecvec")]
    pub classes: Vec<CElem>,
}

impl H1 {
    pub fn order(&self) -> usize {
        self.classes.len()
    }
}

/// `{z : z theta(z) = 1}` modulo the part of `{w theta(w)}` lying in it.
pub fn galois_h1(z: &CentralGroup) -> Result<H1> {
    let elems = z.elements()?;
    let numerator: Vec<CElem> = elems.iter().filter(|e| z.is_identity(&z.one_plus_theta(e))).cloned().collect();
    let mut denominator: Vec<CElem> = elems
        .iter()
        .map(|w| z.one_plus_theta(w))
        .filter(|d| numerator.contains(d))
        .collect();
    denominator.sort();
    denominator.dedup();
    let sub = z.subgroup_generated(&denominator);
    let mut classes: Vec<CElem> = Vec::new();
    let mut covered: Vec<CElem> = Vec::new();
    for n in &numerator {
        if covered.contains(n) {
            continue;
        }
        classes.push(n.clone());
        for d in &sub {
            covered.push(z.add(n, d));
        }
    }
    Ok(H1 { numerator, denominator: sub.into_iter().collect(), classes })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePlusTheta {
    pub group: CentralGroup,
    /// Elements of `(1 + theta) Z` when `Z` is finite.
    pub elements: Option<Vec<CElem>>,
}

impl OnePlusTheta {
    pub fn contains(&self, a: &[Q]) -> Result<bool> {
        self.group.in_one_plus_theta(a)
    }
}

pub fn quotient_1_plus_theta(z: &CentralGroup) -> Result<OnePlusTheta> {
    let elements = if z.has_torus() {
        None
    } else {
        let mut v: Vec<CElem> = z.elements()?.iter().map(|w| z.one_plus_theta(w)).collect();
        v.sort();
        v.dedup();
        Some(v)
    };
    Ok(OnePlusTheta { group: z.clone(), elements })
}

impl EGroupInvariants {
    /// E-group attached to an inner class, with second invariant `z`.
    pub fn new(ic: &InnerClass, z: CElem) -> Result<Self> {
        let a = ic.inv.a.dual()?;
        a.validate(&dual_datum(&ic.group))?;
        let zc = ic.dual_center();
        let z = if z.is_empty() { zc.identity() } else { z };
        if !zc.contains(&z) {
            bail!(Invalid, "z is not an element of Z(G^vee)");
        }
        let z = zc.normalize(&z);
        if zc.apply_theta(&z) != z {
            bail!(Invalid, "z = {} is not theta_Z-fixed", fmt_celem(&z));
        }
        if zc.element_order(&z) > 8 {
            bail!(Unsupported, "z of order above 8");
        }
        let is_l_group = zc.is_identity(&z);
        Ok(EGroupInvariants { a, z, is_l_group })
    }

    pub fn tag(&self) -> TypeZTag {
        TypeZTag { z: fmt_celem(&self.z) }
    }
}

/// Parse `1` or `-1` style selectors for `z` on every `SL2` coordinate of `Z(G^vee)`.
pub fn parse_z(ic: &InnerClass, text: &str) -> Result<CElem> {
    let zc = ic.dual_center();
    let t = text.trim();
    if t.is_empty() || t == "1" {
        return Ok(zc.identity());
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    if parts.len() != zc.rank() {
        bail!(Catalog, "z selector `{t}` needs {} comma-separated entries", zc.rank());
    }
    parts
        .iter()
        .map(|p| match *p {
            "1" => Ok(Q::zero()),
            "-1" => Ok(qr(1, 2)),
            "i" => Ok(qr(1, 4)),
            "-i" => Ok(qr(3, 4)),
            other => Err(Error::Catalog(format!("cannot read z entry `{other}`"))),
        })
        .collect()
}

/// Number of elements of a finite group fixed by theta with `z theta(z) = 1`,
/// used as a cross-check of `galois_h1` when theta is trivial.
pub fn two_torsion_mod_squares(z: &CentralGroup) -> Result<usize> {
    let elems = z.elements()?;
    let two: Vec<&CElem> = elems.iter().filter(|e| z.is_identity(&z.add(e, e))).collect();
    let mut squares: Vec<CElem> = elems.iter().map(|e| z.add(e, e)).collect();
    squares.sort();
    squares.dedup();
    let sq_two = squares.iter().filter(|s| two.contains(s)).count();
    Ok(two.len() / sq_two.max(1))
}

#[doc(hidden)]
pub fn scalar_root(k: i64) -> Elem {
    Elem::S(Cyc8::zeta_pow(k))
}

#[doc(hidden)]
pub fn half() -> Q {
    q(1) / q(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::build_catalog_group;

    fn forms(name: &str, ic: &str) -> Vec<StrongRealForm> {
        let g = build_catalog_group(name).unwrap();
        strong_real_forms(&InnerClass::named(&g, ic).unwrap()).unwrap()
    }

    #[test]
    fn sl2_has_three_strong_real_forms() {
        let f = forms("SL2", "equal-rank");
        let labels: Vec<&str> = f.iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels, vec!["SU(2)+", "SL(2,R)", "SU(2)-"]);
        let qs: Vec<&StrongRealForm> = f.iter().filter(|x| x.quasi_split).collect();
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].label, "SL(2,R)");
        assert_eq!(qs[0].kottwitz_sign, 1);
        assert_eq!(qs[0].square, "-1I");
        for x in &f {
            if x.label.starts_with("SU") {
                assert_eq!(x.kottwitz_sign, -1);
                assert_eq!(x.square, "1I");
            }
        }
    }

    #[test]
    fn pgl2_and_products() {
        let f = forms("PGL2", "equal-rank");
        assert_eq!(f.len(), 2);
        assert_eq!(forms("SL2xSL2", "equal-rank").len(), 9);
        assert_eq!(forms("SL2xSL2", "complex").len(), 2);
    }

    #[test]
    fn tori() {
        assert_eq!(forms("torus(1)", "compact").len(), 4);
        let split = forms("torus(1)", "split");
        assert_eq!(split.len(), 1);
        // union over z_bar in {+1, -1} is indexed by the square
        let g = build_catalog_group("torus(1)").unwrap();
        let base = InnerClass::named(&g, "split").unwrap();
        let mut squares = Vec::new();
        for zb in [Q::zero(), half()] {
            let inv = ExtendedGroupInvariants { a: base.inv.a.clone(), z_bar: vec![zb] };
            for f in enumerate_strong_real_forms(&g, &inv).unwrap() {
                squares.push(f.square);
            }
        }
        assert_eq!(squares, vec!["1", "-1"]);
    }

    #[test]
    fn empty_inner_class_data_is_rejected() {
        let g = build_catalog_group("SL2").unwrap();
        let inv = ExtendedGroupInvariants { a: DatumAutomorphism { perm: vec![], matrix: vec![], involutive: true }, z_bar: vec![] };
        assert!(enumerate_strong_real_forms(&g, &inv).is_err());
    }

    #[test]
    fn h1_examples() {
        assert_eq!(galois_h1(&CentralGroup::trivial()).unwrap().order(), 1);
        let z2 = CentralGroup::new(vec![2], vec![vec![1]]).unwrap();
        assert_eq!(galois_h1(&z2).unwrap().order(), 2);
        let z4 = CentralGroup::new(vec![4], vec![vec![-1]]).unwrap();
        let h = galois_h1(&z4).unwrap();
        assert_eq!(h.numerator.len(), 4);
        assert_eq!(h.order(), 4);
        let z4id = CentralGroup::new(vec![4], vec![vec![1]]).unwrap();
        assert_eq!(galois_h1(&z4id).unwrap().order(), two_torsion_mod_squares(&z4id).unwrap());
    }

    #[test]
    fn one_plus_theta_examples() {
        let q0 = quotient_1_plus_theta(&CentralGroup::trivial()).unwrap();
        assert!(q0.contains(&[]).unwrap());
        let z2 = CentralGroup::new(vec![2], vec![vec![1]]).unwrap();
        let q2 = quotient_1_plus_theta(&z2).unwrap();
        assert_eq!(q2.elements.as_ref().unwrap().len(), 1);
        assert!(!q2.contains(&[half()]).unwrap());
        let swap = CentralGroup::new(vec![2, 2], vec![vec![0, 1], vec![1, 0]]).unwrap();
        let qs = quotient_1_plus_theta(&swap).unwrap();
        assert_eq!(qs.elements.unwrap(), vec![vec![Q::zero(), Q::zero()], vec![half(), half()]]);
    }

    #[test]
    fn e_group_invariants() {
        let g = build_catalog_group("PGL2").unwrap();
        let ic = InnerClass::named(&g, "equal-rank").unwrap();
        let e = EGroupInvariants::new(&ic, vec![]).unwrap();
        assert!(e.is_l_group);
        let e = EGroupInvariants::new(&ic, parse_z(&ic, "-1").unwrap()).unwrap();
        assert!(!e.is_l_group);
    }
}
