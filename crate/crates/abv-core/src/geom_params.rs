//! Geometric parameters for small dual groups.
//!
//! A space `X(O, G^vee Gamma)` is stored block by block: a block is one
//! `G^vee`-conjugacy class of `y = g . delta_0^vee` with
//! `y^2 = g theta^vee(g) z = exp(2 pi i lambda)`, and its orbits are the
//! `K_y`-orbits on the flag variety of `G^vee(Lambda)`, carried to `X` by the
//! bundle `G^vee x_{K_y} (.)`.
//!
//! Weights: `lambda` lives in `X^*(T) (x) Q` of `G` (equivalently the Lie
//! algebra of the dual torus), in the coordinates of the catalog datum. On
//! an `SL2` factor the coordinate is the fundamental weight (so `rho = 1`),
//! on a `PGL2` factor it is the root (so `rho = 1/2`).
//!
//! Component groups are computed in a cover: `PGL2` factors of `G^vee` are
//! lifted to `SL2`, tori dual to compact tori carry `mu_{2d}`. A character
//! `tau` of a cyclic factor of order `N` is the exponent `k` with
//! `tau(gen) = exp(2 pi i k / N)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{q, q_fmt, q_frac, qr, qser, Cyc8, Line, Mat2, Q};
use crate::flag_orbits::{a1_piece, induce_bundle, FlagPoint, InducedBundle, Layout, OrbitPoset, Piece, PieceSlot};
use crate::groups::CElem;
use crate::inner_class::{
    classify_form, factor_form_label, strong_real_forms, EGroupInvariants, ExtendedGroupInvariants, InnerClass, Slot,
    StrongRealForm, Theta, TypeZTag,
};
use crate::lie_core::{dual_datum, half_sum_positive_coroots, identity, CatalogEntry, DatumAutomorphism, IVec, RootDatum, Side, Weight};
use crate::model::{candidates, centralizer_algebra, dual_torus, fmt_elems, g_torus, line_stabilizer_dim, n_w, solve_conjugator, Elem, Kind};
use crate::{bail, Error, Result};

/// `Lambda = lambda + n(lambda)`, recorded through the roots of `n(lambda)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalFlat {
    pub lambda: Weight,
    /// Roots of the dual group (coroots of `d` for a character-side weight)
    /// with positive integral eigenvalue.
    pub nilradical: Vec<IVec>,
    #[serde(serialize_with = "qser::vec")]
    pub eigenvalues: Vec<Q>,
}

impl CanonicalFlat {
    /// `exp(2 pi i lambda)` acts trivially on `n(lambda)`, so it is constant on the flat.
    pub fn exponential_is_constant(&self) -> bool {
        self.eigenvalues.iter().all(|e| Cyc8::exp_2pi_i(e).map(|c| c.is_one()).unwrap_or(false))
    }
}

/// Roots `alpha` of the dual group with `<lambda, alpha>` a positive integer.
pub fn canonical_flat(lambda: &Weight, d: &RootDatum) -> Result<CanonicalFlat> {
    if lambda.coords.len() != d.rank {
        bail!(Domain, "weight of rank {} for {} of rank {}", lambda.coords.len(), d.name, d.rank);
    }
    let against = match lambda.side {
        Side::Character => &d.coroots,
        Side::Cocharacter => &d.roots,
    };
    let mut nilradical = Vec::new();
    let mut eigenvalues = Vec::new();
    for v in against {
        let p = lambda.pair_int(v);
        if p.is_integer() && p.is_positive() {
            nilradical.push(v.clone());
            eigenvalues.push(p);
        }
    }
    Ok(CanonicalFlat { lambda: lambda.clone(), nilradical, eigenvalues })
}

/// One rank-one factor of `G^vee` (or of a Levi `L^vee`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualFactor {
    /// Kind of the matching factor of `G`.
    pub g_kind: Kind,
    /// Kind on the dual side.
    pub kind: Kind,
    pub theta: Theta,
    /// A rank-one factor of `G` that is a torus factor of the Levi.
    pub levi_torus: bool,
    /// Degree of the cover in which component groups are computed.
    pub cover_degree: u32,
    /// `<lambda, alpha^vee> != 0` on this factor.
    pub regular: bool,
}

impl DualFactor {
    fn is_matrix(&self) -> bool {
        self.kind.is_a1()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub id: String,
    pub key: String,
    /// Canonical `g` with `y = g . delta_0^vee`.
    pub y: Vec<Elem>,
    pub layout: Layout,
    /// `K_y`-orbits on the flag variety of `G^vee(Lambda)`.
    pub poset: OrbitPoset,
    pub dim_k: usize,
    /// `G^vee x_{K_y}`: the same orbits with the dimensions they have in `X`.
    pub bundle: InducedBundle,
}

impl Block {
    /// Dimension of the `G^vee`-orbit in `X`.
    pub fn orbit_dim(&self, orbit: &str) -> Result<usize> {
        self.bundle.result_poset.dim(orbit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometricParameterSpace {
    pub group: String,
    pub dual_group: String,
    pub inner_class: String,
    /// Dominant representative of the infinitesimal character.
    pub lambda: Weight,
    pub flat: CanonicalFlat,
    pub type_z: TypeZTag,
    pub factors: Vec<DualFactor>,
    pub z: Vec<Elem>,
    pub e_lambda: Vec<Elem>,
    pub dim_dual: usize,
    pub blocks: Vec<Block>,
    #[serde(skip)]
    pub ic: InnerClass,
    #[serde(skip)]
    pub forms: Vec<StrongRealForm>,
    #[serde(skip)]
    pub e_group: EGroupInvariants,
}

impl GeometricParameterSpace {
    pub fn block(&self, id: &str) -> Result<&Block> {
        self.blocks
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| Error::Invalid(format!("no block `{id}` in the parameter space")))
    }

    pub fn n_orbits(&self) -> usize {
        self.blocks.iter().map(|b| b.poset.len()).sum()
    }

    pub fn is_levi_space(&self) -> bool {
        self.factors.iter().any(|f| f.levi_torus)
    }
}

fn slot_theta(ic: &InnerClass, f: usize) -> Theta {
    for s in &ic.slots {
        if let Slot::One { factor, theta } = *s {
            if factor == f {
                return theta;
            }
        }
    }
    Theta::Id
}

fn exp_scalar(u: &Q) -> Result<Cyc8> {
    Cyc8::exp_2pi_i(u).ok_or_else(|| Error::Unsupported(format!("exp(2 pi i {}) is outside the eighth roots of unity", q_fmt(u))))
}

/// `exp(2 pi i lambda)` on one factor.
fn e_of(f: &DualFactor, v: &Q) -> Result<Elem> {
    if f.is_matrix() {
        let e = dual_torus(f.g_kind, v)?;
        if !e.is_central_in(f.kind) {
            bail!(Domain, "lambda coordinate {} is not integral on a rank-one factor", q_fmt(v));
        }
        Ok(e)
    } else {
        Ok(Elem::S(exp_scalar(v)?))
    }
}

/// `exp(pi i v)` on one factor.
fn half_exp(f: &DualFactor, v: &Q) -> Result<Elem> {
    if f.is_matrix() {
        dual_torus(f.g_kind, &(v * qr(1, 2)))
    } else {
        Ok(Elem::S(exp_scalar(&(v * qr(1, 2)))?))
    }
}

fn theta_of(f: &DualFactor, g: &Elem) -> Elem {
    match f.theta {
        Theta::Id => g.clone(),
        Theta::Inverse => g.inv(),
    }
}

fn square_holds(f: &DualFactor, g: &Elem, z: &Elem, e: &Elem) -> bool {
    g.mul(&theta_of(f, g)).mul(z).eq_in(e, f.kind)
}

fn factor_key(f: &DualFactor, g: &Elem) -> String {
    match (f.kind, f.theta) {
        (Kind::Sl2, _) => format!("tr={}", g.mat().trace()),
        (Kind::Pgl2, _) => {
            let t = g.mat().trace();
            format!("tr2={}", t.clone() * t)
        }
        (Kind::Torus, Theta::Inverse) => "*".into(),
        (Kind::Torus, Theta::Id) => format!("{g}"),
    }
}

/// The dual factors of `G^vee` for an inner class and a dominant `lambda`.
fn dual_factors(ic: &InnerClass, lambda: &Weight) -> Result<Vec<DualFactor>> {
    ic.factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let theta = ic.dual_theta(i)?;
            Ok(DualFactor {
                g_kind: f.kind,
                kind: f.kind.dual(),
                theta,
                levi_torus: false,
                cover_degree: if f.kind == Kind::Sl2 || f.kind == Kind::Torus { 2 } else { 1 },
                regular: f.kind.is_a1() && !lambda.coords[f.coord].is_zero(),
            })
        })
        .collect()
}

/// Dominant representative: the simple reflection of an `A1` factor flips the sign of its coordinate.
fn dominant(ic: &InnerClass, factors: &[DualFactor], lambda: &Weight) -> Weight {
    let mut out = lambda.clone();
    for (f, df) in ic.factors.iter().zip(factors) {
        if df.is_matrix() && out.coords[f.coord].is_negative() {
            out.coords[f.coord] = -out.coords[f.coord].clone();
        }
    }
    out
}

/// Build the space of geometric parameters with infinitesimal character `lambda`
/// for the E-group `e` of the inner class `ic`.
pub fn build_parameter_space(ic: &InnerClass, e: &EGroupInvariants, lambda: &Weight) -> Result<GeometricParameterSpace> {
    if lambda.side != Side::Character || lambda.coords.len() != ic.group.rank {
        bail!(Domain, "lambda must be a character-side weight of rank {}", ic.group.rank);
    }
    let factors0 = dual_factors(ic, lambda)?;
    let lam = dominant(ic, &factors0, lambda);
    let factors = dual_factors(ic, &lam)?;
    let z = ic.dual_central_elems(&e.z)?;
    let forms = strong_real_forms(ic)?;
    build_space(ic, forms, e.clone(), e.tag(), factors, lam, z)
}

fn build_space(
    ic: &InnerClass,
    forms: Vec<StrongRealForm>,
    e_group: EGroupInvariants,
    type_z: TypeZTag,
    factors: Vec<DualFactor>,
    lambda: Weight,
    z: Vec<Elem>,
) -> Result<GeometricParameterSpace> {
    let coords: Vec<usize> = ic.factors.iter().map(|f| f.coord).collect();
    let e_lambda: Vec<Elem> = factors.iter().zip(&coords).map(|(f, &c)| e_of(f, &lambda.coords[c])).collect::<Result<_>>()?;
    // Classes per factor, diagonal representatives first.
    let mut per_factor: Vec<Vec<(String, Elem)>> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let mut classes: Vec<(String, Elem)> = Vec::new();
        for g in candidates(f.kind) {
            if square_holds(f, &g, &z[i], &e_lambda[i]) {
                let key = factor_key(f, &g);
                if !classes.iter().any(|(k, _)| *k == key) {
                    classes.push((key, g));
                }
            }
        }
        per_factor.push(classes);
    }
    let mut combos: Vec<Vec<(String, Elem)>> = vec![vec![]];
    for classes in &per_factor {
        let mut next = Vec::new();
        for c in &combos {
            for k in classes {
                let mut n = c.clone();
                n.push(k.clone());
                next.push(n);
            }
        }
        combos = next;
    }
    let dim_dual: usize = factors.iter().map(|f| f.kind.dim()).sum();
    let mut blocks = Vec::new();
    for combo in combos {
        let y: Vec<Elem> = combo.iter().map(|(_, g)| g.clone()).collect();
        let keys: Vec<&str> = combo.iter().map(|(k, _)| k.as_str()).collect();
        let mut slots = Vec::new();
        let mut dim_k = 0;
        for (i, f) in factors.iter().enumerate() {
            if f.is_matrix() {
                let piece = a1_piece(f.kind, &y[i])?;
                dim_k += piece.k_dim();
                if f.regular {
                    slots.push(PieceSlot { piece, factors: vec![i] });
                } else {
                    slots.push(PieceSlot { piece: Piece::Point, factors: vec![] });
                }
            } else {
                dim_k += if f.theta == Theta::Id { 1 } else { 0 };
                slots.push(PieceSlot { piece: Piece::Point, factors: vec![] });
            }
        }
        let layout = Layout { slots };
        let poset = layout.poset();
        let bundle = induce_bundle(&poset, dim_dual - dim_k);
        blocks.push(Block { id: format!("y[{}]", fmt_elems(&y)), key: keys.join("|"), y, layout, poset, dim_k, bundle });
    }
    let flat = canonical_flat(&lambda, &ic.group)?;
    Ok(GeometricParameterSpace {
        group: ic.group.name.clone(),
        dual_group: dual_datum(&ic.group).name,
        inner_class: ic.name.clone(),
        lambda,
        flat,
        type_z,
        factors,
        z,
        e_lambda,
        dim_dual,
        blocks,
        ic: ic.clone(),
        forms,
        e_group,
    })
}

// ---------------------------------------------------------------------------
// Component groups

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicFactor {
    pub factor: usize,
    pub order: u32,
    /// Generator, as an element of the cover.
    pub generator: Elem,
    /// Eigenvalue of the generator on the flag point, when the stabilizer is finite.
    pub eps: Option<Elem>,
    /// `m` with `gen^m` the nontrivial kernel element of the cover, when that
    /// element is not in the identity component.
    pub kernel_power: Option<u32>,
    #[serde(skip)]
    stab0: Stab0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
enum Stab0 {
    #[default]
    Trivial,
    Diagonal,
    Everything,
}

impl Stab0 {
    fn contains(self, h: &Elem) -> bool {
        match self {
            Stab0::Trivial => match h {
                Elem::M(m) => *m == Mat2::identity(),
                Elem::S(s) => s.is_one(),
            },
            Stab0::Diagonal => h.is_diagonal(),
            Stab0::Everything => true,
        }
    }
}

impl CyclicFactor {
    /// `j` with `h = gen^j` modulo the identity component.
    pub fn exponent_of(&self, h: &Elem) -> Option<u32> {
        let inv = h.inv();
        let mut acc = Elem::one_like(h);
        for j in 0..self.order {
            if self.stab0.contains(&acc.mul(&inv)) {
                return Some(j);
            }
            acc = acc.mul(&self.generator);
        }
        None
    }
}

/// `A_x`, a product of cyclic groups indexed by factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentGroup {
    pub factors: Vec<CyclicFactor>,
}

impl ComponentGroup {
    pub fn order(&self) -> u64 {
        self.factors.iter().map(|f| f.order as u64).product()
    }

    pub fn is_elementary_2(&self) -> bool {
        self.factors.iter().all(|f| f.order <= 2)
    }

    /// All characters, lexicographic in the exponents.
    pub fn characters(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = vec![vec![]];
        for f in &self.factors {
            let mut next = Vec::new();
            for c in &out {
                for k in 0..f.order {
                    let mut n = c.clone();
                    n.push(k);
                    next.push(n);
                }
            }
            out = next;
        }
        out
    }

    pub fn factor(&self, f: usize) -> Option<(usize, &CyclicFactor)> {
        self.factors.iter().enumerate().find(|(_, c)| c.factor == f)
    }
}

trait OneLike {
    fn one_like(h: &Elem) -> Elem;
}

impl OneLike for Elem {
    fn one_like(h: &Elem) -> Elem {
        match h {
            Elem::M(_) => Elem::M(Mat2::identity()),
            Elem::S(_) => Elem::S(Cyc8::one()),
        }
    }
}

fn a1_component(kind: Kind, y: &Mat2, p: Option<&Line>, factor: usize) -> Result<Option<CyclicFactor>> {
    let ye = Elem::M(y.clone());
    let samples: Vec<Elem> = candidates(Kind::Sl2)
        .into_iter()
        .filter(|h| h.mul(&ye).mul(&h.inv()).eq_in(&ye, kind))
        .filter(|h| p.map(|p| p.moved_by(h.mat()) == *p).unwrap_or(true))
        .collect();
    let alg = centralizer_algebra(y);
    let d = match p {
        Some(p) => line_stabilizer_dim(&alg, p),
        None => alg.len(),
    };
    let stab0 = match d {
        0 => Stab0::Trivial,
        3 => Stab0::Everything,
        _ => Stab0::Diagonal,
    };
    let mut reps: Vec<Elem> = Vec::new();
    for h in &samples {
        if !reps.iter().any(|r| stab0.contains(&r.inv().mul(h))) {
            reps.push(h.clone());
        }
    }
    let n = reps.len() as u32;
    if n <= 1 {
        return Ok(None);
    }
    let order = |h: &Elem| -> u32 {
        let mut acc = h.clone();
        for m in 1..=16 {
            if stab0.contains(&acc) {
                return m;
            }
            acc = acc.mul(h);
        }
        0
    };
    let finite = stab0 == Stab0::Trivial && p.is_some();
    let (generator, eps) = if finite {
        let p = p.expect("finite case has a point");
        let target = Cyc8::root_of_unity(1, n as i64).ok_or_else(|| Error::Unsupported(format!("component group of order {n}")))?;
        let g = samples
            .iter()
            .find(|h| order(h) == n && p.eigenvalue(h.mat()).as_ref() == Some(&target))
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("component group of order {n} is not cyclic")))?;
        (g, Some(Elem::S(target)))
    } else {
        let g = samples
            .iter()
            .find(|h| order(h) == n)
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("component group of order {n} is not cyclic")))?;
        (g, None)
    };
    let mut cf = CyclicFactor { factor, order: n, generator, eps, kernel_power: None, stab0 };
    if kind == Kind::Pgl2 {
        let minus = Elem::M(Mat2::identity().neg());
        if !stab0.contains(&minus) {
            cf.kernel_power = cf.exponent_of(&minus);
        }
    }
    Ok(Some(cf))
}

fn locate_block_orbit<'a>(x: &'a GeometricParameterSpace, block: &str, orbit: &str) -> Result<(&'a Block, FlagPoint)> {
    let b = x.block(block)?;
    b.poset.get(orbit)?;
    let p = b.layout.rep_point(orbit)?;
    Ok((b, p))
}

/// Component group of the stabilizer of the representative point of `orbit`.
pub fn component_group(x: &GeometricParameterSpace, block: &str, orbit: &str) -> Result<ComponentGroup> {
    let (b, p) = locate_block_orbit(x, block, orbit)?;
    component_group_at(x, b, &p)
}

fn component_group_at(x: &GeometricParameterSpace, b: &Block, p: &FlagPoint) -> Result<ComponentGroup> {
    let mut factors = Vec::new();
    for (i, f) in x.factors.iter().enumerate() {
        if f.is_matrix() {
            let pt = if f.regular { p.get(&i) } else { None };
            if let Some(c) = a1_component(f.kind, b.y[i].mat(), pt, i)? {
                factors.push(c);
            }
        } else if f.theta == Theta::Inverse {
            let n = 2 * f.cover_degree;
            let g = Elem::S(Cyc8::root_of_unity(1, n as i64).ok_or_else(|| Error::Unsupported(format!("cover of degree {}", f.cover_degree)))?);
            let kernel_power = if f.cover_degree == 2 { Some(2) } else { None };
            factors.push(CyclicFactor { factor: i, order: n, generator: g.clone(), eps: Some(g), kernel_power, stab0: Stab0::Trivial });
        }
    }
    Ok(ComponentGroup { factors })
}

// ---------------------------------------------------------------------------
// Complete parameters

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CompleteGeometricParameter {
    pub id: String,
    pub block: String,
    pub orbit: String,
    pub tau: Vec<u32>,
    /// Label of the strong real form carrying `pi(xi)`.
    pub realform: String,
    /// Representative `x` of that strong real form.
    pub x: Vec<Elem>,
    pub kottwitz_sign: i8,
    pub quasi_split: bool,
    pub type_z: TypeZTag,
}

pub fn param_id(block: &str, orbit: &str, tau: &[u32]) -> String {
    let t: Vec<String> = tau.iter().map(|k| k.to_string()).collect();
    format!("{block}:{orbit}:tau[{}]", t.join(","))
}

/// Strong real form attached to `(orbit, tau)` factor by factor.
///
/// Finite stabilizer with an eigenvalue: `x = g(k/N) x_qs`, with `g` the
/// coordinate cocharacter of the factor. Positive-dimensional stabilizer:
/// the split form `n_w`. Tori: `x = exp(2 pi i k/N)` when dual to a compact
/// torus, `1` otherwise.
fn realform_x(x: &GeometricParameterSpace, cg: &ComponentGroup, tau: &[u32]) -> Result<Vec<Elem>> {
    let x_qs = x.ic.x_qs();
    let mut out = Vec::new();
    for (i, f) in x.factors.iter().enumerate() {
        let c = cg.factor(i);
        let d1 = |c: &CyclicFactor, k: u32| -> Result<Elem> { Ok(g_torus(f.g_kind, &qr(k as i64, c.order as i64))?.mul(&x_qs[i])) };
        let e = if f.is_matrix() {
            match c {
                Some((j, c)) if c.eps.is_some() => d1(c, tau[j])?,
                _ => n_w(),
            }
        } else if f.theta == Theta::Inverse {
            let (j, c) = c.ok_or_else(|| Error::Invalid(format!("factor {i} has no component group")))?;
            d1(c, tau[j])?
        } else {
            Elem::one(f.g_kind)
        };
        out.push(e);
    }
    Ok(out)
}

fn levi_label(x: &GeometricParameterSpace, xs: &[Elem]) -> String {
    let parts: Vec<String> = x
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if f.levi_torus {
                format!("T[{}]", xs[i])
            } else {
                factor_form_label(f.g_kind, slot_theta(&x.ic, i), &xs[i])
            }
        })
        .collect();
    if parts.is_empty() {
        "trivial".into()
    } else {
        parts.join(" x ")
    }
}

fn make_param(x: &GeometricParameterSpace, b: &Block, orbit: &str, cg: &ComponentGroup, tau: Vec<u32>) -> Result<CompleteGeometricParameter> {
    let xs = realform_x(x, cg, &tau)?;
    let idx = classify_form(&x.ic, &x.forms, &xs)?;
    let (label, sign, qs) = match idx {
        Some(i) => {
            let f = &x.forms[i];
            let label = if x.is_levi_space() { levi_label(x, &xs) } else { f.label.clone() };
            (label, f.kottwitz_sign, f.quasi_split)
        }
        None => bail!(Invalid, "x = {} is not a strong real form of {}", fmt_elems(&xs), x.group),
    };
    Ok(CompleteGeometricParameter {
        id: param_id(&b.id, orbit, &tau),
        block: b.id.clone(),
        orbit: orbit.to_string(),
        tau,
        realform: label,
        x: xs,
        kottwitz_sign: sign,
        quasi_split: qs,
        type_z: x.type_z.clone(),
    })
}

/// All complete geometric parameters, block by block, orbits in poset order.
pub fn complete_parameters(x: &GeometricParameterSpace) -> Result<Vec<CompleteGeometricParameter>> {
    let mut out = Vec::new();
    for b in &x.blocks {
        for o in b.poset.orbits() {
            let cg = component_group(x, &b.id, &o.id)?;
            for tau in cg.characters() {
                out.push(make_param(x, b, &o.id, &cg, tau)?);
            }
        }
    }
    Ok(out)
}

pub fn parameter(x: &GeometricParameterSpace, block: &str, orbit: &str, tau: &[u32]) -> Result<CompleteGeometricParameter> {
    let b = x.block(block)?;
    let cg = component_group(x, block, orbit)?;
    if tau.len() != cg.factors.len() || tau.iter().zip(&cg.factors).any(|(k, c)| *k >= c.order) {
        bail!(Invalid, "tau {tau:?} is not a character of A at {block}:{orbit}");
    }
    make_param(x, b, orbit, &cg, tau.to_vec())
}

/// `delta^2 = delta_qs^2 . tau(kernel)` on the factors where the cover is nontrivial.
pub fn square_rule_holds(x: &GeometricParameterSpace, p: &CompleteGeometricParameter) -> Result<bool> {
    let cg = component_group(x, &p.block, &p.orbit)?;
    let sq = x.ic.square(&p.x)?;
    let sq_qs = x.ic.square(&x.ic.x_qs())?;
    for (i, f) in x.factors.iter().enumerate() {
        let mut sign = 1i64;
        if let Some((j, c)) = cg.factor(i) {
            if let Some(m) = c.kernel_power {
                // tau(gen^m) = exp(2 pi i k m / N) must be a sign.
                let e = (p.tau[j] as i64 * m as i64 * 2) % (c.order as i64 * 2);
                if (e * 2) % (c.order as i64 * 2) != 0 && (e % c.order as i64) != 0 {
                    return Ok(false);
                }
                if e % (2 * c.order as i64) != 0 {
                    sign = -1;
                }
            }
        }
        let g_kind = f.g_kind;
        if g_kind == Kind::Pgl2 {
            continue;
        }
        let s = if sign == 1 { sq_qs[i].clone() } else { sq_qs[i].neg() };
        if !sq[i].eq_in(&s, g_kind) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Langlands parameters

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanglandsParameterData {
    /// Block id; empty when not yet resolved.
    pub y_class: String,
    pub lambda: Weight,
    pub lambda_prime: Weight,
    /// The `g`-part of `y = g . delta_0^vee`, per factor.
    pub y: Vec<Elem>,
}

impl LanglandsParameterData {
    /// Bounded on the real span: `lambda + lambda' = 0`.
    pub fn is_tempered(&self) -> bool {
        self.lambda.coords.iter().zip(&self.lambda_prime.coords).all(|(a, b)| (a + b).is_zero())
    }
}

/// `Ad(y) lambda`, requiring `[lambda, Ad(y) lambda] = 0`.
pub fn ad_y_lambda(x: &GeometricParameterSpace, y: &[Elem], lambda: &Weight) -> Result<Weight> {
    let mut out = lambda.clone();
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        let c = lambda.coords[gf.coord].clone();
        let v = if f.is_matrix() {
            let h = Mat2::from_i64(1, 0, 0, -1);
            let a = h.conj_by(y[i].mat()).ok_or_else(|| Error::Invalid("y is not invertible".into()))?;
            if a == h {
                c
            } else if a == h.neg() {
                -c
            } else if c.is_zero() {
                c
            } else {
                bail!(Invalid, "[lambda, Ad(y) lambda] != 0 on factor {i}");
            }
        } else {
            match f.theta {
                Theta::Id => c,
                Theta::Inverse => -c,
            }
        };
        out.coords[gf.coord] = v;
    }
    Ok(out)
}

struct Located {
    block: usize,
    orbit: String,
    /// Total conjugator per matrix factor.
    h: Vec<Option<Mat2>>,
}

/// Move `(y, Lambda, p)` to the canonical representative of its block.
fn locate(x: &GeometricParameterSpace, y: &[Elem], lambda: &Weight, start: &FlagPoint) -> Result<Located> {
    if y.len() != x.factors.len() || lambda.coords.len() != x.lambda.coords.len() {
        bail!(Invalid, "parameter has the wrong number of factors");
    }
    let mut y = y.to_vec();
    let mut pt = start.clone();
    let mut h: Vec<Option<Mat2>> = vec![None; y.len()];
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        let a = &lambda.coords[gf.coord];
        let b = &x.lambda.coords[gf.coord];
        if a == b {
            continue;
        }
        if f.is_matrix() && *a == -b.clone() {
            let w = Mat2::n_w();
            y[i] = Elem::M(w.clone()).mul(&y[i]).mul(&Elem::M(w.clone()).inv());
            if let Some(l) = pt.get_mut(&i) {
                *l = l.moved_by(&w);
            }
            h[i] = Some(w);
        } else {
            bail!(Domain, "infinitesimal character {} is not in the orbit of {}", lambda.fmt_coords(), x.lambda.fmt_coords());
        }
    }
    for (i, f) in x.factors.iter().enumerate() {
        if !square_holds(f, &y[i], &x.z[i], &x.e_lambda[i]) {
            bail!(Invalid, "y^2 != exp(2 pi i lambda) on factor {i}");
        }
    }
    let key: Vec<String> = x.factors.iter().zip(&y).map(|(f, g)| factor_key(f, g)).collect();
    let key = key.join("|");
    let bi = x
        .blocks
        .iter()
        .position(|b| b.key == key)
        .ok_or_else(|| Error::Invalid(format!("no block with key {key}")))?;
    let b = &x.blocks[bi];
    for (i, f) in x.factors.iter().enumerate() {
        if !f.is_matrix() || y[i] == b.y[i] {
            continue;
        }
        let c = solve_conjugator(y[i].mat(), b.y[i].mat(), f.kind == Kind::Pgl2)
            .ok_or_else(|| Error::Invalid(format!("y is not conjugate to the block representative on factor {i}")))?;
        if let Some(l) = pt.get_mut(&i) {
            *l = l.moved_by(&c);
        }
        h[i] = Some(match h[i].take() {
            Some(w) => c * w,
            None => c,
        });
    }
    let orbit = b.layout.locate(&pt)?;
    Ok(Located { block: bi, orbit, h })
}

fn standard_point(x: &GeometricParameterSpace) -> FlagPoint {
    let mut p = FlagPoint::new();
    for (i, f) in x.factors.iter().enumerate() {
        if f.is_matrix() {
            p.insert(i, Line::zero_pt());
        }
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GeometricPoint {
    pub block: String,
    pub orbit: String,
}

/// `phi -> (y(phi), Lambda(phi))`, reported as the orbit of the pair.
pub fn langlands_to_geometric(phi: &LanglandsParameterData, x: &GeometricParameterSpace) -> Result<GeometricPoint> {
    let lp = ad_y_lambda(x, &phi.y, &phi.lambda)?;
    if lp != phi.lambda_prime {
        bail!(Invalid, "lambda' = {} differs from Ad(y) lambda = {}", phi.lambda_prime.fmt_coords(), lp.fmt_coords());
    }
    let loc = locate(x, &phi.y, &phi.lambda, &standard_point(x))?;
    let b = &x.blocks[loc.block];
    if !phi.y_class.is_empty() && phi.y_class != b.id {
        bail!(Invalid, "y lies in block {} but the parameter names {}", b.id, phi.y_class);
    }
    Ok(GeometricPoint { block: b.id.clone(), orbit: loc.orbit })
}

/// One Langlands parameter per class, found by brute force over torus-normalizing `y`.
pub fn phi_classes(x: &GeometricParameterSpace) -> Result<Vec<LanglandsParameterData>> {
    let mut per_factor: Vec<Vec<Elem>> = Vec::new();
    for (i, f) in x.factors.iter().enumerate() {
        let sols: Vec<Elem> = candidates(f.kind)
            .into_iter()
            .filter(|g| square_holds(f, g, &x.z[i], &x.e_lambda[i]))
            .collect();
        let mut opts: Vec<Elem> = Vec::new();
        if f.is_matrix() && f.regular {
            // The centralizer of lambda is the torus: diagonal y are separate
            // classes, antidiagonal ones form a single class.
            for g in sols.iter().filter(|g| g.is_diagonal()) {
                if !opts.iter().any(|o| o.eq_in(g, f.kind)) {
                    opts.push(g.clone());
                }
            }
            if let Some(g) = sols.iter().find(|g| g.is_antidiagonal()) {
                opts.push(g.clone());
            }
        } else {
            let mut keys: Vec<String> = Vec::new();
            for g in sols {
                let k = factor_key(f, &g);
                if !keys.contains(&k) {
                    keys.push(k);
                    opts.push(g);
                }
            }
        }
        per_factor.push(opts);
    }
    let mut combos: Vec<Vec<Elem>> = vec![vec![]];
    for opts in &per_factor {
        let mut next = Vec::new();
        for c in &combos {
            for g in opts {
                let mut n = c.clone();
                n.push(g.clone());
                next.push(n);
            }
        }
        combos = next;
    }
    let mut out = Vec::new();
    for y in combos {
        let lambda_prime = ad_y_lambda(x, &y, &x.lambda)?;
        let key: Vec<String> = x.factors.iter().zip(&y).map(|(f, g)| factor_key(f, g)).collect();
        let key = key.join("|");
        let y_class = x.blocks.iter().find(|b| b.key == key).map(|b| b.id.clone()).unwrap_or_default();
        out.push(LanglandsParameterData { y_class, lambda: x.lambda.clone(), lambda_prime, y });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Arthur parameters

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArthurParameterData {
    pub restriction: LanglandsParameterData,
    /// Simple indices of the Levi in which the `SL2` is principal.
    pub levi: Vec<usize>,
    /// Half sum of the positive roots of the Levi of `G` (coroots of `L^vee`).
    pub h_weight: Weight,
}

/// Half sum of the positive roots of the Levi `levi`, as a character-side weight.
pub fn levi_rho(g: &RootDatum, levi: &[usize]) -> Result<Weight> {
    let h = half_sum_positive_coroots(&dual_datum(g), levi)?;
    Ok(Weight { side: Side::Character, coords: h.coords })
}

impl ArthurParameterData {
    pub fn new(g: &RootDatum, restriction: LanglandsParameterData, levi: Vec<usize>) -> Result<Self> {
        let h_weight = levi_rho(g, &levi)?;
        let psi = ArthurParameterData { restriction, levi, h_weight };
        psi.validate(g)?;
        Ok(psi)
    }

    pub fn validate(&self, g: &RootDatum) -> Result<()> {
        if self.h_weight != levi_rho(g, &self.levi)? {
            bail!(Invalid, "h must be the half sum of the positive roots of the Levi {:?}", self.levi);
        }
        if !self.restriction.is_tempered() {
            bail!(Precondition, "the restriction of psi to W_R is not tempered");
        }
        Ok(())
    }
}

/// Principal unipotent `psi`: trivial on `W_R`, principal `SL2`.
pub fn principal_unipotent(x: &GeometricParameterSpace) -> Result<ArthurParameterData> {
    let g = &x.ic.group;
    let zero = Weight::zero(Side::Character, g.rank);
    let y: Vec<Elem> = x.factors.iter().map(|f| Elem::one(f.kind)).collect();
    let restriction = LanglandsParameterData { y_class: String::new(), lambda: zero.clone(), lambda_prime: zero, y };
    ArthurParameterData::new(g, restriction, (0..g.simple.len()).collect())
}

/// `phi_psi`: `lambda = lambda_r + h`, `lambda' = lambda'_r + h`, `y = exp(pi i h) y_r`.
pub fn arthur_to_langlands(psi: &ArthurParameterData, x: &GeometricParameterSpace) -> Result<LanglandsParameterData> {
    let r = &psi.restriction;
    if r.y.len() != x.factors.len() {
        bail!(Invalid, "psi has {} factors, the space {}", r.y.len(), x.factors.len());
    }
    let lambda = r.lambda.add(&psi.h_weight)?;
    let lambda_prime = r.lambda_prime.add(&psi.h_weight)?;
    let mut y = Vec::new();
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        let t = half_exp(f, &psi.h_weight.coords[gf.coord])?;
        y.push(t.mul(&r.y[i]));
    }
    Ok(LanglandsParameterData { y_class: String::new(), lambda, lambda_prime, y })
}

// ---------------------------------------------------------------------------
// Twisting by central cocycles

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralTwist {
    pub lambda_a: Weight,
    /// Element of `Z(G^vee)`, logarithmic coordinates.
    #[serde(serialize_with = "qser::vec")]
    pub s: CElem,
}

impl CentralTwist {
    pub fn trivial(x: &GeometricParameterSpace) -> Self {
        CentralTwist { lambda_a: Weight::zero(Side::Character, x.lambda.coords.len()), s: x.ic.dual_center().identity() }
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda_a.is_zero() && self.s.iter().all(|u| q_frac(u).is_zero())
    }
}

fn twist_factors(x: &GeometricParameterSpace, a: &CentralTwist) -> Result<Vec<Elem>> {
    if a.lambda_a.side != Side::Character || a.lambda_a.coords.len() != x.lambda.coords.len() {
        bail!(Domain, "lambda_a must be a character-side weight of rank {}", x.lambda.coords.len());
    }
    if a.lambda_a.pairings(&x.ic.group).iter().any(|p| !p.is_zero()) {
        bail!(Domain, "lambda_a = {} is not central", a.lambda_a.fmt_coords());
    }
    let zc = x.ic.dual_center();
    if !zc.contains(&a.s) {
        bail!(Domain, "s is not an element of Z(G^vee)");
    }
    let s = x.ic.dual_central_elems(&a.s)?;
    x.factors
        .iter()
        .zip(&x.ic.factors)
        .enumerate()
        .map(|(i, (f, gf))| Ok(half_exp(f, &a.lambda_a.coords[gf.coord])?.mul(&s[i])))
        .collect()
}

/// `(a(w), 1) phi(w)`: `y -> exp(pi i lambda_a) s y`, `lambda -> lambda + lambda_a`.
pub fn twist(phi: &LanglandsParameterData, a: &CentralTwist, x: &GeometricParameterSpace) -> Result<LanglandsParameterData> {
    let c = twist_factors(x, a)?;
    let y: Vec<Elem> = c.iter().zip(&phi.y).map(|(c, g)| c.mul(g)).collect();
    let lambda = phi.lambda.add(&a.lambda_a)?;
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        let e = e_of(f, &lambda.coords[gf.coord])?;
        if !square_holds(f, &y[i], &x.z[i], &e) {
            bail!(Domain, "twisting datum is not a cocycle: y^2 != exp(2 pi i lambda) on factor {i}");
        }
    }
    let lambda_prime = ad_y_lambda(x, &y, &lambda)?;
    Ok(LanglandsParameterData { y_class: String::new(), lambda, lambda_prime, y })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitImage {
    pub block: String,
    pub orbit: String,
    pub target_block: String,
    pub target_orbit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamImage {
    pub source: String,
    pub target: String,
    pub realform_preserved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistMap {
    pub twist: CentralTwist,
    pub target: GeometricParameterSpace,
    pub orbits: Vec<OrbitImage>,
    pub params: Vec<ParamImage>,
    /// Every block maps onto one target block by a poset isomorphism.
    pub blocks_isomorphic: bool,
}

impl TwistMap {
    pub fn image(&self, source: &str) -> Option<&str> {
        self.params.iter().find(|p| p.source == source).map(|p| p.target.as_str())
    }
}

/// `tau` on the target of a conjugation `h`, or `None` when the groups do not match.
fn transfer_tau(
    src: &ComponentGroup,
    tgt: &ComponentGroup,
    tau: &[u32],
    image: impl Fn(&CyclicFactor) -> Option<Elem>,
) -> Option<Vec<u32>> {
    let mut out: Vec<Option<u32>> = vec![None; tgt.factors.len()];
    for (j, c) in src.factors.iter().enumerate() {
        let (tj, tc) = tgt.factor(c.factor)?;
        let img = image(c)?;
        let e = tc.exponent_of(&img)?;
        // tau_t(gen_t)^e = tau_s(gen_s): k_t e / N_t = k_s / N_s mod 1.
        let mut found = None;
        for k in 0..tc.order {
            if q_frac(&(qr(k as i64 * e as i64, tc.order as i64) - qr(tau[j] as i64, c.order as i64))).is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some(k);
            }
        }
        out[tj] = Some(found?);
    }
    out.into_iter().collect()
}

fn conj_elem(h: &Option<Mat2>, g: &Elem) -> Elem {
    match (h, g) {
        (Some(h), Elem::M(m)) => Elem::M(m.conj_by(h).expect("invertible conjugator")),
        _ => g.clone(),
    }
}

/// Rebuild the space at `lambda + lambda_a` and carry every orbit and parameter across.
pub fn twist_map(x: &GeometricParameterSpace, a: &CentralTwist) -> Result<TwistMap> {
    let c = twist_factors(x, a)?;
    let lambda_t = x.lambda.add(&a.lambda_a)?;
    let target = build_parameter_space(&x.ic, &x.e_group, &lambda_t)?;
    let mut orbits = Vec::new();
    let mut params = Vec::new();
    let target_params = complete_parameters(&target)?;
    let mut blocks_isomorphic = true;
    for b in &x.blocks {
        let mut map: Vec<usize> = Vec::new();
        let mut tblock: Option<usize> = None;
        for o in b.poset.orbits() {
            let p = b.layout.rep_point(&o.id)?;
            let mut start = standard_point(x);
            for (k, v) in &p {
                start.insert(*k, v.clone());
            }
            let y: Vec<Elem> = c.iter().zip(&b.y).map(|(c, g)| c.mul(g)).collect();
            let loc = locate(&target, &y, &lambda_t, &start)?;
            let tb = &target.blocks[loc.block];
            match tblock {
                None => tblock = Some(loc.block),
                Some(t) if t != loc.block => blocks_isomorphic = false,
                _ => {}
            }
            map.push(tb.poset.get(&loc.orbit)?);
            orbits.push(OrbitImage { block: b.id.clone(), orbit: o.id.clone(), target_block: tb.id.clone(), target_orbit: loc.orbit.clone() });
            let src_cg = component_group(x, &b.id, &o.id)?;
            let mut tp = tb.layout.rep_point(&loc.orbit)?;
            for (k, v) in standard_point(&target) {
                tp.entry(k).or_insert(v);
            }
            let tgt_cg = component_group_at(&target, tb, &tp)?;
            // The located point may differ from the target representative by K_y.
            let mut moved = start.clone();
            for (k, l) in moved.iter_mut() {
                if let Some(h) = &loc.h[*k] {
                    *l = l.moved_by(h);
                }
            }
            let fix = representative_shift(&target, tb, &moved, &tp)?;
            for tau in src_cg.characters() {
                let ttau = transfer_tau(&src_cg, &tgt_cg, &tau, |cf| {
                    let g = conj_elem(&loc.h[cf.factor], &cf.generator);
                    Some(conj_elem(&fix[cf.factor], &g))
                });
                let src_param = make_param(x, b, &o.id, &src_cg, tau.clone())?;
                let Some(ttau) = ttau else {
                    bail!(Unsupported, "component groups at {} and its twist do not match", src_param.id);
                };
                let tid = param_id(&tb.id, &loc.orbit, &ttau);
                let tparam = target_params
                    .iter()
                    .find(|p| p.id == tid)
                    .ok_or_else(|| Error::Invalid(format!("twisted parameter {tid} is missing")))?;
                params.push(ParamImage { source: src_param.id, target: tid, realform_preserved: tparam.realform == src_param.realform });
            }
        }
        if let Some(t) = tblock {
            if !b.poset.is_isomorphism(&target.blocks[t].poset, &map) {
                blocks_isomorphic = false;
            }
        }
    }
    let mut seen: Vec<&str> = params.iter().map(|p| p.target.as_str()).collect();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != params.len() || params.len() != target_params.len() {
        blocks_isomorphic = false;
    }
    Ok(TwistMap { twist: a.clone(), target, orbits, params, blocks_isomorphic })
}

/// Element of `K_y` (per matrix factor) carrying `from` to the representative `to`.
fn representative_shift(x: &GeometricParameterSpace, b: &Block, from: &FlagPoint, to: &FlagPoint) -> Result<Vec<Option<Mat2>>> {
    let mut out: Vec<Option<Mat2>> = vec![None; x.factors.len()];
    for (i, f) in x.factors.iter().enumerate() {
        if !f.is_matrix() || !f.regular {
            continue;
        }
        let (Some(a), Some(t)) = (from.get(&i), to.get(&i)) else { continue };
        if a == t {
            continue;
        }
        let ye = &b.y[i];
        let k = k_elements(f.kind, ye)
            .into_iter()
            .find(|h| a.moved_by(h) == *t)
            .ok_or_else(|| Error::Incomplete(format!("no element of K_y found moving {a} to {t}")))?;
        out[i] = Some(k);
    }
    Ok(out)
}

/// Explicit elements of `K_y` used to move points: normalizer candidates,
/// a few torus elements and, when `K_y` is everything, unipotents.
fn k_elements(kind: Kind, y: &Elem) -> Vec<Mat2> {
    let mut gens: Vec<Mat2> = candidates(Kind::Sl2).into_iter().map(|e| e.mat().clone()).collect();
    for s in [Cyc8::sqrt2(), Cyc8::from_i64(2)] {
        gens.push(Mat2::diag(s.clone(), Cyc8::one()));
        gens.push(Mat2::diag(Cyc8::one(), s));
    }
    gens.push(Mat2::from_i64(1, 1, 0, 1));
    gens.push(Mat2::from_i64(1, 0, 1, 1));
    gens.push(Mat2::from_i64(1, -1, 0, 1));
    gens.push(Mat2::from_i64(1, 0, -1, 1));
    let mut out: Vec<Mat2> = Vec::new();
    for a in &gens {
        for b in &gens {
            out.push(a.clone() * b.clone());
        }
    }
    out.into_iter()
        .filter(|h| {
            let he = Elem::M(h.clone());
            he.mul(y).mul(&he.inv()).eq_in(y, kind)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Adams-Johnson parameters

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AjReport {
    pub aj1: bool,
    pub aj1_witness: String,
    pub aj2: bool,
    pub aj2_witness: String,
    pub aj3: bool,
    /// A coroot of `G` with `<mu, alpha^vee> = 0`.
    pub aj3_witness: Option<IVec>,
    pub mu: Weight,
    pub two_mu_integral: bool,
}

impl AjReport {
    pub fn passes(&self) -> bool {
        self.aj1 && self.aj2 && self.aj3
    }

    pub fn first_failure(&self) -> Option<String> {
        if !self.aj1 {
            Some(format!("AJ1 fails: {}", self.aj1_witness))
        } else if !self.aj2 {
            Some(format!("AJ2 fails: {}", self.aj2_witness))
        } else if !self.aj3 {
            Some(format!("AJ3 fails: <mu, alpha^vee> = 0 for alpha^vee = {:?}", self.aj3_witness.clone().unwrap_or_default()))
        } else {
            None
        }
    }
}

/// Build an Adams-Johnson type `psi` from its Levi and `mu = lambda + h`:
/// `y_r = exp(pi i mu) n_w` off the Levi and `1` on it.
pub fn aj_parameter(x: &GeometricParameterSpace, levi: Vec<usize>, mu: &Weight) -> Result<ArthurParameterData> {
    let g = &x.ic.group;
    let h = levi_rho(g, &levi)?;
    let lambda = mu.add(&h.neg())?;
    let mut y = Vec::new();
    for (f, gf) in x.factors.iter().zip(&x.ic.factors) {
        let in_levi = gf.simple.map(|s| levi.contains(&s)).unwrap_or(false);
        if f.is_matrix() && !in_levi {
            y.push(half_exp(f, &mu.coords[gf.coord])?.mul(&n_w()));
        } else {
            y.push(Elem::one(f.kind));
        }
    }
    let mut restriction = LanglandsParameterData { y_class: String::new(), lambda: lambda.clone(), lambda_prime: lambda.clone(), y };
    restriction.lambda_prime = ad_y_lambda(x, &restriction.y, &lambda)?;
    ArthurParameterData::new(g, restriction, levi)
}

pub fn check_aj(psi: &ArthurParameterData, x: &GeometricParameterSpace) -> Result<AjReport> {
    let g = &x.ic.group;
    let r = &psi.restriction;
    // AJ1: the Ad(y)-fixed part of z(L^vee) lies in z(G^vee). Off the Levi each
    // rank-one factor contributes its torus, fixed unless y acts by -1.
    let mut bad = Vec::new();
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        let in_levi = gf.simple.map(|s| psi.levi.contains(&s)).unwrap_or(false);
        if f.is_matrix() && !in_levi && !r.y[i].is_antidiagonal() {
            bad.push(i);
        }
    }
    let aj1 = bad.is_empty();
    let aj1_witness = if aj1 {
        "fixed part of z(L^vee) is central in G^vee".to_string()
    } else {
        format!("y fixes the torus of factors {bad:?}")
    };
    // AJ2: h is rho of the Levi and pairs to 1 with its simple coroots.
    let h = levi_rho(g, &psi.levi)?;
    let mut aj2 = h == psi.h_weight;
    let mut aj2_witness = String::from("h = rho^vee of the Levi");
    for &i in &psi.levi {
        let p = psi.h_weight.pair_int(g.simple_coroot(i));
        if p != q(1) {
            aj2 = false;
            aj2_witness = format!("<h, alpha_{i}^vee> = {}", q_fmt(&p));
        }
    }
    if h != psi.h_weight {
        aj2_witness = format!("h = {} but rho^vee of the Levi is {}", psi.h_weight.fmt_coords(), h.fmt_coords());
    }
    // AJ3: mu = lambda + h is regular.
    let mu = r.lambda.add(&psi.h_weight)?;
    let aj3_witness = g.positive_coroots().iter().find(|c| mu.pair_int(c).is_zero()).cloned();
    let two_mu_integral = mu.coords.iter().all(|c| (c * q(2)).is_integer());
    Ok(AjReport { aj1, aj1_witness, aj2, aj2_witness, aj3: aj3_witness.is_none(), aj3_witness, mu, two_mu_integral })
}

#[derive(Clone, Debug, Serialize)]
pub struct AjFactor {
    pub levi: Vec<usize>,
    pub levi_datum: RootDatum,
    pub l_invariants: ExtendedGroupInvariants,
    pub e_l: EGroupInvariants,
    pub psi_l: ArthurParameterData,
    pub mu: Weight,
    /// `z` from `prod alpha^vee(-1)` over the roots of `U`, per factor of `G^vee`.
    pub z_product: Vec<Elem>,
    /// `(n_1 delta^vee)^2` computed from matrices.
    pub z_matrix: Vec<Elem>,
    pub z_consistent: bool,
    pub report: AjReport,
    #[serde(skip)]
    pub ic_l: InnerClass,
}

/// Levi sub-datum, its extended group and E-group, and `psi_L`.
pub fn aj_factor(psi: &ArthurParameterData, x: &GeometricParameterSpace) -> Result<AjFactor> {
    let report = check_aj(psi, x)?;
    if let Some(f) = report.first_failure() {
        bail!(Precondition, "{f}");
    }
    let g = &x.ic.group;
    let levi = psi.levi.clone();
    let entry = CatalogEntry {
        name: format!("{}[L={:?}]", g.name, levi),
        cartan_type: if levi.is_empty() { "T".into() } else { vec!["A1"; levi.len()].join("x") },
        rank: g.rank,
        simple_roots: levi.iter().map(|&i| g.simple_root(i).clone()).collect(),
        simple_coroots: levi.iter().map(|&i| g.simple_coroot(i).clone()).collect(),
        dual: None,
    };
    let l = RootDatum::from_entry(&entry)?;
    let in_levi = |gf: &crate::model::Factor| gf.simple.map(|s| levi.contains(&s)).unwrap_or(false);
    let mut m = identity(g.rank);
    for gf in &x.ic.factors {
        m[gf.coord][gf.coord] = if gf.kind == Kind::Torus {
            x.ic.inv.a.matrix[gf.coord][gf.coord]
        } else if in_levi(gf) {
            1
        } else {
            -1
        };
    }
    let l_inv = ExtendedGroupInvariants {
        a: DatumAutomorphism { perm: (0..levi.len()).collect(), matrix: m, involutive: true },
        z_bar: vec![],
    };
    let ic_l = InnerClass::from_invariants(&l, l_inv)?;
    // Half sum of the roots of U, per coordinate.
    let levi_pos = g.levi_positive_roots(&levi);
    let mut u = vec![Q::zero(); g.rank];
    for k in 0..g.n_positive() {
        if levi_pos.contains(&k) {
            continue;
        }
        for (c, a) in u.iter_mut().zip(&g.roots[k]) {
            *c += qr(*a, 2);
        }
    }
    let mut z_l = Vec::new();
    for f in &ic_l.factors {
        match f.kind.dual() {
            Kind::Sl2 | Kind::Torus => z_l.push(q_frac(&u[f.coord])),
            Kind::Pgl2 => {}
        }
    }
    let e_l = EGroupInvariants::new(&ic_l, z_l)?;
    let mut z_product = Vec::new();
    let mut z_matrix = Vec::new();
    for (f, gf) in x.factors.iter().zip(&x.ic.factors) {
        if f.is_matrix() && !in_levi(gf) {
            z_product.push(dual_torus(f.g_kind, &u[gf.coord])?);
            z_matrix.push(n_w().mul(&n_w()));
        } else {
            z_product.push(Elem::one(f.kind));
            z_matrix.push(Elem::one(f.kind));
        }
    }
    let z_consistent = x.factors.iter().enumerate().all(|(i, f)| z_product[i].eq_in(&z_matrix[i], f.kind));
    // psi_L: the torus part t of y_r = t n_w, read in the torus coordinate of L^vee.
    let r = &psi.restriction;
    let mut y_l = Vec::new();
    for (i, (f, gf)) in x.factors.iter().zip(&x.ic.factors).enumerate() {
        if f.is_matrix() && !in_levi(gf) {
            let t = r.y[i].mul(&n_w().inv());
            if !t.is_diagonal() {
                bail!(Precondition, "AJ1 fails: y is not in the normalizer of the torus on factor {i}");
            }
            y_l.push(Elem::S(t.mat().0[0].pow(f.cover_degree)));
        } else {
            y_l.push(r.y[i].clone());
        }
    }
    let h_l = levi_rho(&l, &(0..levi.len()).collect::<Vec<_>>())?;
    let restriction_l = LanglandsParameterData { y_class: String::new(), lambda: r.lambda.clone(), lambda_prime: r.lambda_prime.clone(), y: y_l };
    let psi_l = ArthurParameterData { restriction: restriction_l, levi: (0..levi.len()).collect(), h_weight: h_l };
    Ok(AjFactor {
        levi,
        levi_datum: l,
        l_invariants: ic_l.inv.clone(),
        e_l,
        psi_l,
        mu: report.mu.clone(),
        z_product,
        z_matrix,
        z_consistent,
        report,
        ic_l,
    })
}

/// The space `X(O, L^vee Gamma)` at `mu`, with the factors of `G^vee` off the Levi replaced by their tori.
pub fn build_levi_space(aj: &AjFactor, x: &GeometricParameterSpace) -> Result<GeometricParameterSpace> {
    let mut factors = Vec::new();
    for (f, gf) in x.factors.iter().zip(&x.ic.factors) {
        let in_levi = gf.simple.map(|s| aj.levi.contains(&s)).unwrap_or(false);
        if f.is_matrix() && !in_levi {
            factors.push(DualFactor {
                g_kind: f.g_kind,
                kind: Kind::Torus,
                theta: Theta::Inverse,
                levi_torus: true,
                cover_degree: if f.g_kind == Kind::Sl2 { 2 } else { 1 },
                regular: true,
            });
        } else {
            let mut nf = *f;
            nf.regular = f.is_matrix() && !aj.mu.coords[gf.coord].is_zero();
            factors.push(nf);
        }
    }
    let mut lam = aj.mu.clone();
    for (f, gf) in factors.iter().zip(&x.ic.factors) {
        if f.is_matrix() && lam.coords[gf.coord].is_negative() {
            lam.coords[gf.coord] = -lam.coords[gf.coord].clone();
        }
    }
    let z = aj.ic_l.dual_central_elems(&aj.e_l.z)?;
    // Dual central elements of L^vee come in the kinds of L; matrix factors keep the G^vee kind.
    let z: Vec<Elem> = z
        .into_iter()
        .zip(&factors)
        .map(|(e, f)| if f.is_matrix() && matches!(e, Elem::S(_)) { Elem::one(f.kind) } else { e })
        .collect();
    let mut sp = build_space(&x.ic, x.forms.clone(), aj.e_l.clone(), aj.e_l.tag(), factors, lam, z)?;
    sp.group = aj.levi_datum.name.clone();
    sp.dual_group = format!("dual({})", aj.levi_datum.name);
    Ok(sp)
}

/// Induced parameter on `X(O, G^vee Gamma)` of a parameter on the Levi space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AjInduced {
    pub source: CompleteGeometricParameter,
    pub target: CompleteGeometricParameter,
    /// The strong real form of `G` containing the `L`-form agrees with the target's.
    pub form_match: bool,
}

pub fn aj_induce(aj: &AjFactor, xl: &GeometricParameterSpace, xg: &GeometricParameterSpace, p: &CompleteGeometricParameter) -> Result<AjInduced> {
    let bl = xl.block(&p.block)?;
    let pl = bl.layout.rep_point(&p.orbit)?;
    let mut y = Vec::new();
    let mut start = standard_point(xg);
    for (i, (f, gf)) in xl.factors.iter().zip(&xl.ic.factors).enumerate() {
        if f.levi_torus {
            y.push(half_exp(&xg.factors[i], &aj.mu.coords[gf.coord])?.mul(&n_w()));
        } else {
            y.push(bl.y[i].clone());
            if let Some(l) = pl.get(&i) {
                start.insert(i, l.clone());
            }
        }
    }
    let loc = locate(xg, &y, &aj.mu, &start)?;
    let bg = &xg.blocks[loc.block];
    let mut moved = start.clone();
    for (k, l) in moved.iter_mut() {
        if let Some(h) = &loc.h[*k] {
            *l = l.moved_by(h);
        }
    }
    let mut tp = bg.layout.rep_point(&loc.orbit)?;
    for (k, v) in standard_point(xg) {
        tp.entry(k).or_insert(v);
    }
    let fix = representative_shift(xg, bg, &moved, &tp)?;
    let cg_l = component_group(xl, &p.block, &p.orbit)?;
    let cg_g = component_group_at(xg, bg, &tp)?;
    let tau = transfer_tau(&cg_l, &cg_g, &p.tau, |cf| {
        let f = &xl.factors[cf.factor];
        let img = if f.levi_torus {
            let w = cf.generator.scalar().clone();
            Elem::M(Mat2::torus(&w))
        } else {
            cf.generator.clone()
        };
        let g = conj_elem(&loc.h[cf.factor], &img);
        Some(conj_elem(&fix[cf.factor], &g))
    })
    .ok_or_else(|| Error::Incomplete(format!("cannot transfer tau of {} to G", p.id)))?;
    if tau.len() != cg_g.factors.len() {
        bail!(Incomplete, "component group at the induced orbit is larger than the image of the Levi's");
    }
    let target = make_param(xg, bg, &loc.orbit, &cg_g, tau)?;
    let a = classify_form(&xg.ic, &xg.forms, &p.x)?;
    let b = classify_form(&xg.ic, &xg.forms, &target.x)?;
    Ok(AjInduced { source: p.clone(), target, form_match: a.is_some() && a == b })
}

/// Strong real forms of the Levi with `delta^2` central in `G`, as representatives
/// `x` in the factors of `G`: diagonal elements off the Levi, `G`-classes on it.
pub fn levi_forms(xl: &GeometricParameterSpace) -> Vec<Vec<Elem>> {
    let mut per_factor: Vec<Vec<Elem>> = Vec::new();
    let g_forms = &xl.forms;
    for (i, f) in xl.factors.iter().enumerate() {
        let opts: Vec<Elem> = if f.levi_torus {
            candidates(f.g_kind)
                .into_iter()
                .filter(|c| c.is_diagonal() && c.pow(2).is_central_in(f.g_kind))
                .collect()
        } else {
            let mut v: Vec<Elem> = Vec::new();
            let mut labels: Vec<String> = Vec::new();
            for form in g_forms {
                let l = factor_form_label(f.g_kind, slot_theta(&xl.ic, i), &form.x[i]);
                if !labels.contains(&l) {
                    labels.push(l);
                    v.push(form.x[i].clone());
                }
            }
            v
        };
        per_factor.push(opts);
    }
    let mut combos: Vec<Vec<Elem>> = vec![vec![]];
    for opts in &per_factor {
        let mut next = Vec::new();
        for c in &combos {
            for g in opts {
                let mut n = c.clone();
                n.push(g.clone());
                next.push(n);
            }
        }
        combos = next;
    }
    combos
}

/// `{x, n_w x n_w^-1}` on the factors off the Levi.
pub fn normalizer_orbit(xl: &GeometricParameterSpace, xs: &[Elem]) -> Vec<Vec<Elem>> {
    let mut out = vec![xs.to_vec()];
    let mut w = xs.to_vec();
    for (i, f) in xl.factors.iter().enumerate() {
        if f.levi_torus {
            w[i] = n_w().mul(&xs[i]).mul(&n_w().inv());
        }
    }
    if !w.iter().zip(xs).zip(&xl.factors).all(|((a, b), f)| a.eq_in(b, f.g_kind)) {
        out.push(w);
    }
    out
}

/// Label of a Levi form given by representatives.
pub fn levi_form_label(xl: &GeometricParameterSpace, xs: &[Elem]) -> String {
    levi_label(xl, xs)
}

/// `i = (1/2) dim(k / (l cap k))` for a strong real form of `G`.
pub fn aj_degree(xl: &GeometricParameterSpace, form_x: &[Elem]) -> usize {
    xl.factors
        .iter()
        .enumerate()
        .filter(|(_, f)| f.levi_torus)
        .map(|(i, f)| if form_x[i].is_central_in(f.g_kind) { 1 } else { 0 })
        .sum()
}

#[doc(hidden)]
pub fn weight(coords: &[Q]) -> Weight {
    Weight { side: Side::Character, coords: coords.to_vec() }
}

#[doc(hidden)]
pub fn orbit_map_of(t: &TwistMap) -> BTreeMap<(String, String), (String, String)> {
    t.orbits
        .iter()
        .map(|o| ((o.block.clone(), o.orbit.clone()), (o.target_block.clone(), o.target_orbit.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::build_catalog_group;

    fn space(g: &str, lam: &[Q]) -> GeometricParameterSpace {
        let d = build_catalog_group(g).unwrap();
        let ic = InnerClass::named(&d, "equal-rank").unwrap();
        let e = EGroupInvariants::new(&ic, vec![]).unwrap();
        build_parameter_space(&ic, &e, &weight(lam)).unwrap()
    }

    fn orbit_ids(b: &Block) -> Vec<&str> {
        b.poset.orbits().iter().map(|o| o.id.as_str()).collect()
    }

    #[test]
    fn canonical_flats() {
        let sl2 = build_catalog_group("SL2").unwrap();
        assert!(canonical_flat(&weight(&[Q::zero()]), &sl2).unwrap().nilradical.is_empty());
        let pgl2 = build_catalog_group("PGL2").unwrap();
        let f = canonical_flat(&weight(&[qr(1, 2)]), &pgl2).unwrap();
        assert_eq!(f.nilradical, vec![vec![2]]);
        assert!(f.exponential_is_constant());
        let sl3 = build_catalog_group("SL3").unwrap();
        let f = canonical_flat(&weight(&[q(1), q(1)]), &sl3).unwrap();
        let mut e: Vec<Q> = f.eigenvalues.clone();
        e.sort();
        assert_eq!(e, vec![q(1), q(1), q(2)]);
    }

    #[test]
    fn pgl2_dual_blocks_at_rho() {
        let x = space("SL2", &[q(1)]);
        assert_eq!(x.blocks.len(), 2);
        assert_eq!(orbit_ids(&x.blocks[0]), vec!["P1"]);
        assert_eq!(orbit_ids(&x.blocks[1]), vec!["pts", "open"]);
        assert_eq!(x.blocks[1].id, "y[diag(i,-i)]");
        // X = G^vee x_K P^1: dims shift by dim G^vee - dim K.
        assert_eq!(x.blocks[1].orbit_dim("pts").unwrap(), 2);
        assert_eq!(x.blocks[0].orbit_dim("P1").unwrap(), 1);
    }

    #[test]
    fn sl2_dual_block_at_rho() {
        let x = space("PGL2", &[qr(1, 2)]);
        assert_eq!(x.blocks.len(), 1);
        assert_eq!(orbit_ids(&x.blocks[0]), vec!["0", "inf", "open"]);
    }

    #[test]
    fn torus_space_has_one_orbit() {
        assert_eq!(space("torus(1)", &[Q::zero()]).n_orbits(), 1);
        // Compact torus: only integral characters.
        assert_eq!(space("torus(1)", &[qr(1, 4)]).n_orbits(), 0);
        let d = build_catalog_group("torus(1)").unwrap();
        let split = InnerClass::named(&d, "split").unwrap();
        let e = EGroupInvariants::new(&split, vec![]).unwrap();
        let x = build_parameter_space(&split, &e, &weight(&[qr(1, 4)])).unwrap();
        assert_eq!(x.blocks.len(), 2);
        assert!(x.blocks.iter().all(|b| b.poset.len() == 1));
        let ic = InnerClass::named(&d, "equal-rank").unwrap();
        let e = EGroupInvariants::new(&ic, vec![]).unwrap();
        assert!(matches!(build_parameter_space(&ic, &e, &weight(&[qr(1, 3)])), Err(Error::Unsupported(_))));
    }

    #[test]
    fn component_groups() {
        let x = space("SL2", &[q(1)]);
        let b = x.blocks[1].id.clone();
        let open = component_group(&x, &b, "open").unwrap();
        assert_eq!(open.order(), 4);
        assert_eq!(open.factors[0].generator.to_string(), "adiag(i,i)");
        assert_eq!(component_group(&x, &b, "pts").unwrap().order(), 1);
        let y = space("PGL2", &[qr(1, 2)]);
        let b = y.blocks[0].id.clone();
        assert_eq!(component_group(&y, &b, "open").unwrap().order(), 2);
        assert_eq!(component_group(&y, &b, "0").unwrap().order(), 1);
        let s = space("SL2", &[Q::zero()]);
        let nt = s.blocks.iter().find(|b| b.id == "y[diag(i,-i)]").unwrap();
        let cg = component_group(&s, &nt.id, "pt").unwrap();
        assert_eq!(cg.order(), 2);
        assert!(cg.factors[0].eps.is_none());
    }

    #[test]
    fn real_forms_of_parameters() {
        let x = space("SL2", &[q(1)]);
        let ps = complete_parameters(&x).unwrap();
        assert_eq!(ps.len(), 6);
        let open: Vec<&str> = ps.iter().filter(|p| p.orbit == "open").map(|p| p.realform.as_str()).collect();
        assert_eq!(open, vec!["SL(2,R)", "SU(2)-", "SL(2,R)", "SU(2)+"]);
        for p in &ps {
            assert!(square_rule_holds(&x, p).unwrap(), "{}", p.id);
        }
        let y = space("PGL2", &[qr(1, 2)]);
        let ps = complete_parameters(&y).unwrap();
        let open: Vec<&str> = ps.iter().filter(|p| p.orbit == "open").map(|p| p.realform.as_str()).collect();
        assert_eq!(open, vec!["PGL(2,R)", "SO(3)"]);
    }

    #[test]
    fn langlands_classes_biject_onto_orbits() {
        for (g, lam) in [("SL2", vec![q(1)]), ("PGL2", vec![qr(1, 2)]), ("SL2", vec![Q::zero()]), ("SL2xPGL2", vec![q(1), qr(1, 2)])] {
            let x = space(g, &lam);
            let phis = phi_classes(&x).unwrap();
            let mut hit: Vec<GeometricPoint> = phis.iter().map(|p| langlands_to_geometric(p, &x).unwrap()).collect();
            hit.sort();
            let n = hit.len();
            hit.dedup();
            assert_eq!(hit.len(), n, "{g}: not injective");
            assert_eq!(n, x.n_orbits(), "{g}: not onto");
        }
    }

    #[test]
    fn principal_unipotent_lands_on_closed_orbit() {
        let x = space("SL2", &[q(1)]);
        let psi = principal_unipotent(&x).unwrap();
        let phi = arthur_to_langlands(&psi, &x).unwrap();
        assert!(!phi.is_tempered());
        let pt = langlands_to_geometric(&phi, &x).unwrap();
        assert_eq!((pt.block.as_str(), pt.orbit.as_str()), ("y[diag(i,-i)]", "pts"));
    }

    #[test]
    fn mismatched_infinitesimal_character() {
        let x = space("SL2", &[q(1)]);
        let mut phi = phi_classes(&x).unwrap().remove(0);
        phi.lambda = weight(&[q(3)]);
        phi.lambda_prime = weight(&[q(3)]);
        assert!(matches!(langlands_to_geometric(&phi, &x), Err(Error::Domain(_))));
    }

    #[test]
    fn twist_by_center_swaps_points() {
        let x = space("PGL2", &[qr(1, 2)]);
        let a = CentralTwist { lambda_a: weight(&[Q::zero()]), s: vec![qr(1, 2)] };
        let t = twist_map(&x, &a).unwrap();
        assert!(t.blocks_isomorphic);
        let m = orbit_map_of(&t);
        let b = x.blocks[0].id.clone();
        assert_eq!(m[&(b.clone(), "0".into())].1, "inf");
        assert_eq!(m[&(b.clone(), "open".into())].1, "open");
        assert!(t.params.iter().all(|p| p.realform_preserved));
        let bad = CentralTwist { lambda_a: weight(&[q(1)]), s: vec![Q::zero()] };
        assert!(matches!(twist_map(&x, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn aj_checks() {
        let x = space("SL2", &[q(1)]);
        let psi = principal_unipotent(&x).unwrap();
        let r = check_aj(&psi, &x).unwrap();
        assert!(r.passes());
        assert_eq!(r.mu, weight(&[q(1)]));
        // mu singular: AJ3 fails with the coroot as witness.
        let x0 = space("SL2", &[Q::zero()]);
        let psi = aj_parameter(&x0, vec![], &weight(&[Q::zero()])).unwrap();
        let r = check_aj(&psi, &x0).unwrap();
        assert!(!r.aj3);
        assert_eq!(r.aj3_witness, Some(vec![1]));
        // Diagonal y off the Levi: AJ1 fails.
        let mut psi = aj_parameter(&x, vec![], &weight(&[q(1)])).unwrap();
        psi.restriction.y = vec![Elem::one(Kind::Pgl2)];
        assert!(!check_aj(&psi, &x).unwrap().aj1);
    }

    #[test]
    fn aj_factor_z_invariant() {
        let x = space("SL2", &[q(1)]);
        let psi = aj_parameter(&x, vec![], &weight(&[q(1)])).unwrap();
        let f = aj_factor(&psi, &x).unwrap();
        assert!(f.z_consistent);
        assert!(f.e_l.is_l_group);
        let y = space("PGL2", &[qr(1, 2)]);
        let psi = aj_parameter(&y, vec![], &weight(&[qr(1, 2)])).unwrap();
        let f = aj_factor(&psi, &y).unwrap();
        assert!(f.z_consistent);
        assert!(!f.e_l.is_l_group);
        let l = build_levi_space(&f, &y).unwrap();
        assert_eq!(l.blocks.len(), 1);
        assert_eq!(complete_parameters(&l).unwrap().len(), 2);
        let full = aj_factor(&principal_unipotent(&y).unwrap(), &y).unwrap();
        assert!(full.e_l.is_l_group);
    }
}
