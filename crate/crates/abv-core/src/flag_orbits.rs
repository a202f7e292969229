//! K-orbit posets on flag varieties of products of rank-one groups.
//!
//! The flag variety of a rank-one factor is `P^1`. `K` is read off a
//! diagonal representative, so on each factor it is the whole group, the
//! diagonal torus, or its normalizer; a swap slot gives the diagonal copy of
//! the factor on `P^1 x P^1`. Each case has a fixed small orbit list
//! ([`Piece`]); products are taken factorwise. An independent union-find
//! census over sample points checks the pieces.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{nullspace, Cyc8, Line, Mat2};
use crate::inner_class::{InnerClass, Slot, StrongRealForm};
use crate::model::{candidates, centralizer_algebra, sl2_basis, Elem, Kind};
use crate::{bail, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub id: String,
    pub dim: usize,
    pub attrs: BTreeMap<String, String>,
}

/// Orbits with the closure order `i <= j` iff orbit `i` lies in the closure of `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPoset {
    orbits: Vec<OrbitRecord>,
    le: Vec<Vec<bool>>,
}

impl OrbitPoset {
    /// Build from strict relations `(lower, upper)`; the transitive closure is taken.
    pub fn new(orbits: Vec<OrbitRecord>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = orbits.len();
        if n == 0 {
            bail!(Invalid, "empty orbit poset");
        }
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                bail!(Invalid, "relation ({a}, {b}) out of range");
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        let p = OrbitPoset { orbits, le };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut ids: Vec<&str> = self.orbits.iter().map(|o| o.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != n {
            bail!(Invalid, "duplicate orbit ids");
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.le[i][j] {
                    if self.le[j][i] {
                        bail!(Invalid, "closure relation is not antisymmetric at {} / {}", self.orbits[i].id, self.orbits[j].id);
                    }
                    if self.orbits[i].dim >= self.orbits[j].dim {
                        bail!(Invalid, "{} lies in the closure of {} without smaller dimension", self.orbits[i].id, self.orbits[j].id);
                    }
                }
            }
        }
        for comp in self.components() {
            let top = comp.iter().map(|&i| self.orbits[i].dim).max().unwrap_or(0);
            if comp.iter().filter(|&&i| self.orbits[i].dim == top).count() != 1 {
                bail!(Invalid, "a connected component has several orbits of top dimension");
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[OrbitRecord] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &OrbitRecord {
        &self.orbits[i]
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.id == id)
    }

    pub fn get(&self, id: &str) -> Result<usize> {
        self.index(id).ok_or_else(|| crate::Error::Invalid(format!("unknown orbit `{id}`")))
    }

    pub fn dim(&self, id: &str) -> Result<usize> {
        Ok(self.orbits[self.get(id)?].dim)
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    /// `a` lies in the closure of `b`.
    pub fn le_id(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.le[self.get(a)?][self.get(b)?])
    }

    /// Indices of orbits in the closure of `i`, including `i`.
    pub fn closure(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.le[j][i]).collect()
    }

    /// Hasse edges `(lower, upper)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.le[i][j] && !(0..n).any(|k| k != i && k != j && self.le[i][k] && self.le[k][j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Connected components of the comparability graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in 0..n {
                if self.le[i][j] {
                    uf.union(i, j);
                }
            }
        }
        uf.classes()
    }

    /// The orbit of top dimension in each component.
    pub fn open_orbits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .components()
            .into_iter()
            .map(|c| *c.iter().max_by_key(|&&i| self.orbits[i].dim).expect("non-empty component"))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_open(&self, i: usize) -> bool {
        self.open_orbits().contains(&i)
    }

    /// Every Hasse edge raises the dimension by exactly one.
    pub fn is_graded(&self) -> bool {
        self.covers().iter().all(|&(a, b)| self.orbits[b].dim == self.orbits[a].dim + 1)
    }

    /// `map[i]` is the image of orbit `i` of `self` in `other`; checks bijectivity and
    /// that the order is preserved and reflected.
    pub fn is_isomorphism(&self, other: &OrbitPoset, map: &[usize]) -> bool {
        let n = self.len();
        if other.len() != n || map.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &m in map {
            if m >= n || seen[m] {
                return false;
            }
            seen[m] = true;
        }
        (0..n).all(|i| (0..n).all(|j| self.le[i][j] == other.le[map[i]][map[j]]))
    }

    pub fn shifted(&self, shift: usize) -> OrbitPoset {
        let orbits = self.orbits.iter().map(|o| OrbitRecord { dim: o.dim + shift, ..o.clone() }).collect();
        OrbitPoset { orbits, le: self.le.clone() }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        for o in &self.orbits {
            s.push_str(&format!("  \"{}\" [label=\"{} (dim {})\"];\n", o.id, o.id, o.dim));
        }
        for (a, b) in self.covers() {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", self.orbits[a].id, self.orbits[b].id));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let covers = self.covers();
        for (i, o) in self.orbits.iter().enumerate() {
            let below: Vec<&str> = covers.iter().filter(|c| c.1 == i).map(|c| self.orbits[c.0].id.as_str()).collect();
            s.push_str(&format!("{:<16} dim {}  covers [{}]\n", o.id, o.dim, below.join(", ")));
        }
        s
    }
}

#[derive(Serialize)]
struct OrbitRow<'a> {
    id: &'a str,
    dim: usize,
    attrs: &'a BTreeMap<String, String>,
    covers: Vec<&'a str>,
}

impl Serialize for OrbitPoset {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let covers = self.covers();
        let rows: Vec<OrbitRow> = self
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| OrbitRow {
                id: &o.id,
                dim: o.dim,
                attrs: &o.attrs,
                covers: covers.iter().filter(|c| c.1 == i).map(|c| self.orbits[c.0].id.as_str()).collect(),
            })
            .collect();
        let open: Vec<&str> = self.open_orbits().into_iter().map(|i| self.orbits[i].id.as_str()).collect();
        let mut st = s.serialize_struct("OrbitPoset", 2)?;
        st.serialize_field("orbits", &rows)?;
        st.serialize_field("open_orbits", &open)?;
        st.end()
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }

    /// Classes ordered by their smallest member.
    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

/// Orbit structure of one factor (or one swapped pair of factors).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Piece {
    /// The flag variety is a point.
    Point,
    /// `K` is the whole factor: `P^1` is one closed orbit.
    Whole,
    /// `K` is the diagonal torus: `0`, `inf` and the open orbit.
    Torus,
    /// `K` is the normalizer of the torus: the pair `{0, inf}` and the open orbit.
    NormTorus,
    /// Diagonal factor acting on `P^1 x P^1`.
    Pair,
}

impl Piece {
    pub fn orbits(self) -> &'static [(&'static str, usize)] {
        match self {
            Piece::Point => &[("pt", 0)],
            Piece::Whole => &[("P1", 1)],
            Piece::Torus => &[("0", 0), ("inf", 0), ("open", 1)],
            Piece::NormTorus => &[("pts", 0), ("open", 1)],
            Piece::Pair => &[("diag", 1), ("open", 2)],
        }
    }

    /// Closure order on the local ids.
    pub fn le(self, a: &str, b: &str) -> bool {
        a == b || b == "open"
    }

    pub fn k_dim(self) -> usize {
        match self {
            Piece::Point => 0,
            Piece::Whole | Piece::Pair => 3,
            Piece::Torus | Piece::NormTorus => 1,
        }
    }

    pub fn n_factors(self) -> usize {
        match self {
            Piece::Point => 0,
            Piece::Pair => 2,
            _ => 1,
        }
    }

    /// Local orbit of a point (one line, or two for `Pair`).
    pub fn locate(self, pts: &[Line]) -> Result<&'static str> {
        if pts.len() != self.n_factors() {
            bail!(Invalid, "{self:?} expects {} points", self.n_factors());
        }
        Ok(match self {
            Piece::Point => "pt",
            Piece::Whole => "P1",
            Piece::Torus => {
                if pts[0] == Line::zero_pt() {
                    "0"
                } else if pts[0] == Line::infinity_pt() {
                    "inf"
                } else {
                    "open"
                }
            }
            Piece::NormTorus => {
                if pts[0] == Line::zero_pt() || pts[0] == Line::infinity_pt() {
                    "pts"
                } else {
                    "open"
                }
            }
            Piece::Pair => {
                if pts[0] == pts[1] {
                    "diag"
                } else {
                    "open"
                }
            }
        })
    }

    /// Representative point: `0 = [1:0]`, `inf = [0:1]`, `open = [1:1]`.
    pub fn rep(self, id: &str) -> Result<Vec<Line>> {
        Ok(match (self, id) {
            (Piece::Point, "pt") => vec![],
            (Piece::Whole, "P1") | (Piece::Torus, "0") | (Piece::NormTorus, "pts") => vec![Line::zero_pt()],
            (Piece::Torus, "inf") => vec![Line::infinity_pt()],
            (Piece::Torus, "open") | (Piece::NormTorus, "open") => vec![Line::from_i64(1, 1)],
            (Piece::Pair, "diag") => vec![Line::zero_pt(), Line::zero_pt()],
            (Piece::Pair, "open") => vec![Line::zero_pt(), Line::infinity_pt()],
            _ => bail!(Invalid, "no orbit `{id}` in {self:?}"),
        })
    }
}

/// Piece attached to a rank-one factor whose `K` is the centralizer of the diagonal element `x`.
pub fn a1_piece(kind: Kind, x: &Elem) -> Result<Piece> {
    if !x.is_diagonal() {
        bail!(Unsupported, "K is read off diagonal representatives only; got {x}");
    }
    let alg = centralizer_algebra(x.mat());
    Ok(match alg.len() {
        3 => Piece::Whole,
        1 => {
            let n = candidates(kind).into_iter().find(|c| c.is_antidiagonal()).expect("n_w candidate");
            let conj = n.mul(x).mul(&n.inv());
            if conj.eq_in(x, kind) {
                Piece::NormTorus
            } else {
                Piece::Torus
            }
        }
        d => bail!(Unsupported, "centralizer of dimension {d} in a rank-one factor"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceSlot {
    pub piece: Piece,
    /// Factor indices carrying the flag coordinates of this slot.
    pub factors: Vec<usize>,
}

/// A product of pieces. Orbit ids join the local ids of the non-point slots with `,`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub slots: Vec<PieceSlot>,
}

/// A point of the product flag variety: one line per factor with a `P^1`.
pub type FlagPoint = BTreeMap<usize, Line>;

impl Layout {
    fn active(&self) -> Vec<&PieceSlot> {
        self.slots.iter().filter(|s| s.piece != Piece::Point).collect()
    }

    pub fn dim_k(&self) -> usize {
        self.slots.iter().map(|s| s.piece.k_dim()).sum()
    }

    pub fn split_id<'a>(&self, id: &'a str) -> Result<Vec<&'a str>> {
        let act = self.active();
        if act.is_empty() {
            if id != "pt" {
                bail!(Invalid, "unknown orbit `{id}`");
            }
            return Ok(vec![]);
        }
        let parts: Vec<&str> = id.split(',').collect();
        if parts.len() != act.len() {
            bail!(Invalid, "unknown orbit `{id}`");
        }
        Ok(parts)
    }

    pub fn join_ids(parts: &[&str]) -> String {
        if parts.is_empty() {
            "pt".to_string()
        } else {
            parts.join(",")
        }
    }

    pub fn poset(&self) -> OrbitPoset {
        let act = self.active();
        let mut combos: Vec<(Vec<&'static str>, usize)> = vec![(vec![], 0)];
        for s in &act {
            let mut next = Vec::new();
            for (ids, d) in &combos {
                for &(id, dd) in s.piece.orbits() {
                    let mut v = ids.clone();
                    v.push(id);
                    next.push((v, d + dd));
                }
            }
            combos = next;
        }
        combos.sort_by(|a, b| (a.1, Self::join_ids(&a.0)).cmp(&(b.1, Self::join_ids(&b.0))));
        let top = combos.iter().map(|c| c.1).max().unwrap_or(0);
        let bottom = combos.iter().map(|c| c.1).min().unwrap_or(0);
        let orbits: Vec<OrbitRecord> = combos
            .iter()
            .map(|(ids, d)| {
                let mut attrs = BTreeMap::new();
                let role = if *d == top {
                    "open"
                } else if *d == bottom {
                    "closed"
                } else {
                    "intermediate"
                };
                attrs.insert("role".to_string(), role.to_string());
                let pieces: Vec<String> = act.iter().map(|s| format!("{:?}", s.piece)).collect();
                attrs.insert("pieces".to_string(), pieces.join(","));
                OrbitRecord { id: Self::join_ids(ids), dim: *d, attrs }
            })
            .collect();
        let mut rel = Vec::new();
        for (i, (a, _)) in combos.iter().enumerate() {
            for (j, (b, _)) in combos.iter().enumerate() {
                if i != j && act.iter().enumerate().all(|(k, s)| s.piece.le(a[k], b[k])) {
                    rel.push((i, j));
                }
            }
        }
        OrbitPoset::new(orbits, &rel).expect("product of valid pieces")
    }

    pub fn locate(&self, p: &FlagPoint) -> Result<String> {
        let mut parts = Vec::new();
        for s in self.active() {
            let pts: Vec<Line> = s
                .factors
                .iter()
                .map(|f| p.get(f).cloned().ok_or_else(|| crate::Error::Invalid(format!("point misses factor {f}"))))
                .collect::<Result<_>>()?;
            parts.push(s.piece.locate(&pts)?);
        }
        Ok(Self::join_ids(&parts))
    }

    pub fn rep_point(&self, id: &str) -> Result<FlagPoint> {
        let parts = self.split_id(id)?;
        let mut out = FlagPoint::new();
        for (s, part) in self.active().into_iter().zip(parts) {
            for (f, l) in s.factors.iter().zip(s.piece.rep(part)?) {
                out.insert(*f, l);
            }
        }
        Ok(out)
    }

    /// Flag coordinates used by this layout.
    pub fn flag_factors(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.active().iter().flat_map(|s| s.factors.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}

/// Layout of `K_delta` orbits on the flag variety of `G`.
pub fn g_layout(ic: &InnerClass, form: &StrongRealForm) -> Result<Layout> {
    let mut slots = Vec::new();
    for s in &ic.slots {
        match *s {
            Slot::One { factor, .. } => {
                let k = ic.kind(factor);
                if k == Kind::Torus {
                    slots.push(PieceSlot { piece: Piece::Point, factors: vec![] });
                } else {
                    slots.push(PieceSlot { piece: a1_piece(k, &form.x[factor])?, factors: vec![factor] });
                }
            }
            Slot::Swap { a, b } => {
                let k = ic.kind(a);
                if !form.x[a].is_one_in(k) || !form.x[b].is_central_in(k) {
                    bail!(Unsupported, "swap slot with a non-standard representative {}", form.label);
                }
                slots.push(PieceSlot { piece: Piece::Pair, factors: vec![a, b] });
            }
        }
    }
    Ok(Layout { slots })
}

/// K-orbits on the flag variety with their closure order.
pub fn k_orbits(ic: &InnerClass, form: &StrongRealForm) -> Result<OrbitPoset> {
    Ok(g_layout(ic, form)?.poset())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedBundle {
    pub base_poset: OrbitPoset,
    pub ambient_dim_shift: usize,
    pub result_poset: OrbitPoset,
    /// `(source id, image id)`.
    pub bijection: Vec<(String, String)>,
}

impl InducedBundle {
    pub fn image(&self, id: &str) -> Option<&str> {
        self.bijection.iter().find(|(a, _)| a == id).map(|(_, b)| b.as_str())
    }
}

/// `G x_H X`: orbits correspond, dimensions grow by `dim G/H`.
pub fn induce_bundle(base: &OrbitPoset, dim_shift: usize) -> InducedBundle {
    let result = base.shifted(dim_shift);
    let bijection = base.orbits().iter().map(|o| (o.id.clone(), o.id.clone())).collect();
    InducedBundle { base_poset: base.clone(), ambient_dim_shift: dim_shift, result_poset: result, bijection }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviEmbedding {
    pub levi: Vec<usize>,
    pub fiber_poset: OrbitPoset,
    pub ambient_poset: OrbitPoset,
    /// `(fiber orbit, saturated ambient orbit)`.
    pub saturation: Vec<(String, String)>,
    /// Orbits in the closure of the saturation that are not saturated orbits.
    pub boundary: Vec<String>,
    /// The saturation is open in its closure.
    pub open_in_closure: bool,
}

impl LeviEmbedding {
    pub fn from_parts(levi: Vec<usize>, fiber: OrbitPoset, ambient: OrbitPoset, saturation: Vec<(String, String)>) -> Result<Self> {
        for o in fiber.orbits() {
            if !saturation.iter().any(|(a, _)| *a == o.id) {
                bail!(Incomplete, "fiber orbit {} has no saturation", o.id);
            }
        }
        let mut images: Vec<usize> = saturation.iter().map(|(_, b)| ambient.get(b)).collect::<Result<_>>()?;
        images.sort_unstable();
        images.dedup();
        let mut closure: Vec<usize> = images.iter().flat_map(|&i| ambient.closure(i)).collect();
        closure.sort_unstable();
        closure.dedup();
        let boundary: Vec<String> = closure
            .iter()
            .filter(|i| !images.contains(i))
            .map(|&i| ambient.orbit(i).id.clone())
            .collect();
        // Open in closure: no boundary orbit lies above an image orbit.
        let open_in_closure = boundary.iter().all(|b| {
            let bi = ambient.get(b).expect("boundary id");
            images.iter().all(|&i| !ambient.le(i, bi))
        });
        Ok(LeviEmbedding { levi, fiber_poset: fiber, ambient_poset: ambient, saturation, boundary, open_in_closure })
    }

    pub fn image(&self, id: &str) -> Result<&str> {
        self.saturation
            .iter()
            .find(|(a, _)| a == id)
            .map(|(_, b)| b.as_str())
            .ok_or_else(|| crate::Error::Incomplete(format!("no saturation for `{id}`")))
    }

    pub fn max_image_dim(&self) -> usize {
        self.saturation.iter().filter_map(|(_, b)| self.ambient_poset.dim(b).ok()).max().unwrap_or(0)
    }

    /// Every boundary orbit is smaller than the largest saturated orbit.
    pub fn boundary_guard(&self) -> bool {
        let top = self.max_image_dim();
        self.boundary.iter().all(|b| self.ambient_poset.dim(b).map(|d| d < top).unwrap_or(false))
    }
}

/// Base point of the fiber on factors outside the Levi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasePoint {
    /// The standard Borel `[1:0]`.
    Standard,
    /// The generic point `[1:1]`.
    Generic,
}

impl BasePoint {
    pub fn line(self) -> Line {
        match self {
            BasePoint::Standard => Line::zero_pt(),
            BasePoint::Generic => Line::from_i64(1, 1),
        }
    }
}

/// `X_L -> X_G` through a fixed point on the factors outside the Levi, and the
/// K-saturation of each `K_L`-orbit.
pub fn levi_saturation(levi: &[usize], ic: &InnerClass, form: &StrongRealForm, base: BasePoint) -> Result<LeviEmbedding> {
    ic.group.check_levi(levi)?;
    let ambient_layout = g_layout(ic, form)?;
    let in_levi = |f: usize| ic.factors[f].simple.map(|s| levi.contains(&s)).unwrap_or(false);
    let mut fiber_slots = Vec::new();
    for s in &ambient_layout.slots {
        let inside: Vec<bool> = s.factors.iter().map(|&f| in_levi(f)).collect();
        if inside.iter().all(|&b| b) {
            fiber_slots.push(s.clone());
        } else if inside.iter().all(|&b| !b) {
            fiber_slots.push(PieceSlot { piece: Piece::Point, factors: vec![] });
        } else {
            bail!(Unsupported, "Levi {levi:?} is not stable under the Cartan involution");
        }
    }
    let fiber_layout = Layout { slots: fiber_slots };
    let fiber = fiber_layout.poset();
    let ambient = ambient_layout.poset();
    let mut saturation = Vec::new();
    for o in fiber.orbits() {
        let mut p = fiber_layout.rep_point(&o.id)?;
        for f in ambient_layout.flag_factors() {
            p.entry(f).or_insert_with(|| base.line());
        }
        saturation.push((o.id.clone(), ambient_layout.locate(&p)?));
    }
    LeviEmbedding::from_parts(levi.to_vec(), fiber, ambient, saturation)
}

/// Brute-force orbit census of one slot, independent of [`Piece`]: sample
/// points are joined when short words in explicit elements of `K` carry them
/// to a common point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotCensus {
    pub factors: Vec<usize>,
    pub points: Vec<Vec<Line>>,
    /// Classes of sample indices with the orbit dimension.
    pub classes: Vec<(Vec<usize>, usize)>,
}

/// Word length explored from each sample.
const CENSUS_DEPTH: usize = 1;

/// `K` on one slot: Lie algebra plus group elements, as matrices per factor.
struct SlotGroup {
    factors: Vec<usize>,
    alg: Vec<Vec<Mat2>>,
    moves: Vec<Vec<Mat2>>,
}

/// Fixed generators: normalizer candidates, a non-torsion torus element,
/// unipotents and the Cayley element `[[1,1],[-1,1]]/sqrt2`. Callers keep those in `K`.
fn generators(kind: Kind) -> Vec<Mat2> {
    let r2 = Cyc8::sqrt2();
    let r2inv = r2.inv().expect("non-zero");
    let mut g: Vec<Mat2> = candidates(kind).into_iter().map(|c| c.mat().clone()).collect();
    g.push(Mat2::torus(&r2));
    g.push(Mat2::torus(&r2inv));
    g.push(Mat2::from_i64(1, 1, 0, 1));
    g.push(Mat2::from_i64(1, -1, 0, 1));
    g.push(Mat2::from_i64(1, 0, 1, 1));
    g.push(Mat2::from_i64(1, 0, -1, 1));
    let c = Mat2::from_i64(1, 1, -1, 1).scale(&r2inv);
    g.push(c.inv().expect("invertible"));
    g.push(c);
    g
}

fn slot_groups(ic: &InnerClass, form: &StrongRealForm) -> Result<Vec<SlotGroup>> {
    let mut out = Vec::new();
    for s in &ic.slots {
        match *s {
            Slot::One { factor, .. } => {
                let k = ic.kind(factor);
                if k == Kind::Torus {
                    continue;
                }
                let x = &form.x[factor];
                let alg = centralizer_algebra(x.mat());
                let moves: Vec<Mat2> = generators(k)
                    .into_iter()
                    .filter(|g| {
                        let e = Elem::M(g.clone());
                        e.mul(x).mul(&e.inv()).eq_in(x, k)
                    })
                    .collect();
                out.push(SlotGroup {
                    factors: vec![factor],
                    alg: alg.into_iter().map(|m| vec![m]).collect(),
                    moves: moves.into_iter().map(|m| vec![m]).collect(),
                });
            }
            Slot::Swap { a, b } => {
                let k = ic.kind(a);
                // K = {(g x_b', g)}: with x_a = 1 and x_b central this is the diagonal.
                if !form.x[a].is_one_in(k) || !form.x[b].is_central_in(k) {
                    bail!(Unsupported, "swap slot with a non-standard representative");
                }
                let alg: Vec<Mat2> = sl2_basis().to_vec();
                let moves = generators(k);
                out.push(SlotGroup {
                    factors: vec![a, b],
                    alg: alg.into_iter().map(|m| vec![m.clone(), m]).collect(),
                    moves: moves.into_iter().map(|m| vec![m.clone(), m]).collect(),
                });
            }
        }
    }
    Ok(out)
}

/// Sample points of `P^1`: the harmonic quadruple `0, inf, 1, -1`.
pub fn p1_samples() -> Vec<Line> {
    vec![Line::zero_pt(), Line::infinity_pt(), Line::from_i64(1, 1), Line::from_i64(1, -1)]
}

fn stab_dim(alg: &[Vec<Mat2>], pts: &[Line]) -> usize {
    if alg.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Cyc8>> = pts
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let [x, y] = p.0.clone();
            alg.iter()
                .map(|b| {
                    let [u, v] = b[k].apply(&[x.clone(), y.clone()]);
                    u * y.clone() - v * x.clone()
                })
                .collect()
        })
        .collect();
    nullspace(&rows, alg.len()).len()
}

pub fn census(ic: &InnerClass, form: &StrongRealForm) -> Result<Vec<SlotCensus>> {
    let samples = p1_samples();
    let mut out = Vec::new();
    for g in slot_groups(ic, form)? {
        let mut points: Vec<Vec<Line>> = vec![vec![]];
        for _ in &g.factors {
            let mut next = Vec::new();
            for p in &points {
                for s in &samples {
                    let mut q = p.clone();
                    q.push(s.clone());
                    next.push(q);
                }
            }
            points = next;
        }
        let mut uf = UnionFind::new(points.len());
        let mut seen: BTreeMap<Vec<Line>, usize> = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            let mut frontier = vec![p.clone()];
            let mut ball = vec![p.clone()];
            for _ in 0..CENSUS_DEPTH {
                let mut next = Vec::new();
                for q in &frontier {
                    for mv in &g.moves {
                        let r: Vec<Line> = q.iter().zip(mv).map(|(l, m)| l.moved_by(m)).collect();
                        next.push(r);
                    }
                }
                ball.extend(next.iter().cloned());
                frontier = next;
            }
            for q in ball {
                match seen.get(&q) {
                    Some(&j) => uf.union(i, j),
                    None => {
                        seen.insert(q, i);
                    }
                }
            }
        }
        let dim_k = g.alg.len();
        let classes = uf.classes().into_iter().map(|c| {
            let stab = stab_dim(&g.alg, &points[c[0]]);
            (c, dim_k - stab)
        }).collect();
        out.push(SlotCensus { factors: g.factors, points, classes });
    }
    Ok(out)
}

/// Compare the census with the piece layout slot by slot: each census class must
/// land in one local orbit, distinct classes in distinct orbits, every orbit
/// hit, dimensions equal. Orbits of the product group are products of these.
pub fn census_matches(ic: &InnerClass, form: &StrongRealForm) -> Result<bool> {
    let layout = g_layout(ic, form)?;
    let active: Vec<&PieceSlot> = layout.slots.iter().filter(|s| s.piece != Piece::Point).collect();
    let slots = census(ic, form)?;
    if slots.len() != active.len() {
        return Ok(false);
    }
    for (c, s) in slots.iter().zip(active) {
        if c.factors != s.factors {
            return Ok(false);
        }
        let mut hit: Vec<&str> = Vec::new();
        for (members, dim) in &c.classes {
            let ids: Vec<&str> = members.iter().map(|&i| s.piece.locate(&c.points[i])).collect::<Result<_>>()?;
            let local_dim = s.piece.orbits().iter().find(|o| o.0 == ids[0]).map(|o| o.1);
            if ids.iter().any(|x| *x != ids[0]) || hit.contains(&ids[0]) || local_dim != Some(*dim) {
                return Ok(false);
            }
            hit.push(ids[0]);
        }
        if hit.len() != s.piece.orbits().len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orbit count and dimension multiset of the product, from the census alone.
pub fn census_dims(ic: &InnerClass, form: &StrongRealForm) -> Result<Vec<usize>> {
    let mut dims = vec![0usize];
    for c in census(ic, form)? {
        let mut next = Vec::new();
        for d in &dims {
            for (_, e) in &c.classes {
                next.push(d + e);
            }
        }
        dims = next;
    }
    dims.sort_unstable();
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_class::strong_real_forms;
    use crate::lie_core::build_catalog_group;

    fn setup(g: &str, ic: &str, label: &str) -> (InnerClass, StrongRealForm) {
        let d = build_catalog_group(g).unwrap();
        let ic = InnerClass::named(&d, ic).unwrap();
        let f = strong_real_forms(&ic).unwrap().into_iter().find(|f| f.label == label).unwrap();
        (ic, f)
    }

    fn dims(p: &OrbitPoset) -> Vec<usize> {
        p.orbits().iter().map(|o| o.dim).collect()
    }

    #[test]
    fn sl2_split_has_three_orbits() {
        let (ic, f) = setup("SL2", "equal-rank", "SL(2,R)");
        let p = k_orbits(&ic, &f).unwrap();
        assert_eq!(dims(&p), vec![0, 0, 1]);
        assert_eq!(p.covers().len(), 2);
        assert!(p.is_graded());
        assert!(census_matches(&ic, &f).unwrap());
    }

    #[test]
    fn complex_group_has_two_orbits() {
        let (ic, f) = setup("SL2xSL2", "complex", "SL(2,C)+");
        let p = k_orbits(&ic, &f).unwrap();
        assert_eq!(dims(&p), vec![1, 2]);
        assert_eq!(census_dims(&ic, &f).unwrap(), vec![1, 2]);
        assert!(census_matches(&ic, &f).unwrap());
    }

    #[test]
    fn torus_and_compact() {
        let (ic, f) = setup("torus(1)", "compact", "U(1)[1]");
        assert_eq!(dims(&k_orbits(&ic, &f).unwrap()), vec![0]);
        let (ic, f) = setup("SL2", "equal-rank", "SU(2)+");
        assert_eq!(dims(&k_orbits(&ic, &f).unwrap()), vec![1]);
        let (ic, f) = setup("PGL2", "equal-rank", "PGL(2,R)");
        assert_eq!(dims(&k_orbits(&ic, &f).unwrap()), vec![0, 1]);
        assert!(census_matches(&ic, &f).unwrap());
    }

    #[test]
    fn zero_dim_orbits_match_fixed_points_modulo_k() {
        // T-fixed points fixed by the Lie algebra of K, counted modulo K.
        for (g, label) in [("SL2", "SL(2,R)"), ("PGL2", "PGL(2,R)"), ("SL2", "SU(2)-"), ("SL2xPGL2", "SL(2,R) x PGL(2,R)")] {
            let (ic, f) = setup(g, "equal-rank", label);
            let mut fixed = 1;
            for c in census(&ic, &f).unwrap() {
                fixed *= c
                    .classes
                    .iter()
                    .filter(|(m, d)| *d == 0 && m.iter().any(|&i| c.points[i].iter().all(|l| *l == Line::zero_pt() || *l == Line::infinity_pt())))
                    .count();
            }
            let p = k_orbits(&ic, &f).unwrap();
            assert_eq!(fixed, p.orbits().iter().filter(|o| o.dim == 0).count(), "{g} {label}");
        }
    }

    #[test]
    fn bundle_shift_keeps_hasse_diagram() {
        let (ic, f) = setup("SL2", "equal-rank", "SL(2,R)");
        let p = k_orbits(&ic, &f).unwrap();
        let b = induce_bundle(&p, 2);
        assert_eq!(dims(&b.result_poset), vec![2, 2, 3]);
        let map: Vec<usize> = (0..p.len()).collect();
        assert!(p.is_isomorphism(&b.result_poset, &map));
    }

    #[test]
    fn saturation_examples() {
        let (ic, f) = setup("SL2", "equal-rank", "SL(2,R)");
        let e = levi_saturation(&[0], &ic, &f, BasePoint::Standard).unwrap();
        assert!(e.boundary.is_empty());
        assert_eq!(e.saturation.len(), 3);
        let e = levi_saturation(&[], &ic, &f, BasePoint::Standard).unwrap();
        assert_eq!(e.saturation, vec![("pt".to_string(), "0".to_string())]);
        assert!(e.boundary.is_empty());
        let e = levi_saturation(&[], &ic, &f, BasePoint::Generic).unwrap();
        assert_eq!(e.image("pt").unwrap(), "open");
        assert_eq!(e.boundary, vec!["0".to_string(), "inf".to_string()]);
        assert!(e.boundary_guard());
        let (ic, f) = setup("SL2xSL2", "equal-rank", "SL(2,R) x SL(2,R)");
        let e = levi_saturation(&[0], &ic, &f, BasePoint::Generic).unwrap();
        assert_eq!(e.image("open").unwrap(), "open,open");
        assert_eq!(e.boundary.len(), 6);
    }

    #[test]
    fn dot_output() {
        let (ic, f) = setup("SL2", "equal-rank", "SL(2,R)");
        let dot = k_orbits(&ic, &f).unwrap().to_dot("SL2");
        assert!(dot.contains("\"0\" -> \"open\""));
    }
}
