//! Root data, Weyl groups and weights.
//!
//! Lattices carry a fixed basis; the pairing between `X^*` and `X_*` is the
//! standard dot product in that basis. Catalog groups are described by simple
//! roots and simple coroots; the full root system is generated by reflection
//! closure and then validated.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{q, q_fmt, solve_q, Q};
use crate::{bail, Error, Result};

pub type IVec = Vec<i64>;
pub type IMat = Vec<Vec<i64>>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(m: &IMat, v: &[i64]) -> IVec {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(m: &IMat) -> IMat {
    let n = m.first().map_or(0, Vec::len);
    (0..n).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// One entry of the group catalog, as stored in catalog files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub cartan_type: String,
    pub rank: usize,
    #[serde(default)]
    pub simple_roots: Vec<IVec>,
    #[serde(default)]
    pub simple_coroots: Vec<IVec>,
    #[serde(default)]
    pub dual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub groups: Vec<CatalogEntry>,
}

fn entry(name: &str, ty: &str, rank: usize, sr: &[&[i64]], sc: &[&[i64]], dual: &str) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        cartan_type: ty.into(),
        rank,
        simple_roots: sr.iter().map(|r| r.to_vec()).collect(),
        simple_coroots: sc.iter().map(|r| r.to_vec()).collect(),
        dual: Some(dual.into()),
    }
}

impl Catalog {
    /// The catalog compiled into the library; catalog files must agree with it
    /// on every entry they share.
    pub fn builtin() -> Self {
        Catalog {
            groups: vec![
                entry("SL2", "A1", 1, &[&[2]], &[&[1]], "PGL2"),
                entry("PGL2", "A1", 1, &[&[1]], &[&[2]], "SL2"),
                entry("SL2xSL2", "A1xA1", 2, &[&[2, 0], &[0, 2]], &[&[1, 0], &[0, 1]], "PGL2xPGL2"),
                entry("PGL2xPGL2", "A1xA1", 2, &[&[1, 0], &[0, 1]], &[&[2, 0], &[0, 2]], "SL2xSL2"),
                entry("SL2xPGL2", "A1xA1", 2, &[&[2, 0], &[0, 1]], &[&[1, 0], &[0, 2]], "PGL2xSL2"),
                entry("PGL2xSL2", "A1xA1", 2, &[&[1, 0], &[0, 2]], &[&[2, 0], &[0, 1]], "SL2xPGL2"),
                entry("SL2xGL1", "A1", 2, &[&[2, 0]], &[&[1, 0]], "PGL2xGL1"),
                entry("PGL2xGL1", "A1", 2, &[&[1, 0]], &[&[2, 0]], "SL2xGL1"),
                // SL3 in the basis of fundamental weights.
                entry("SL3", "A2", 2, &[&[2, -1], &[-1, 2]], &[&[1, 0], &[0, 1]], "PGL3"),
                entry("PGL3", "A2", 2, &[&[1, 0], &[0, 1]], &[&[2, -1], &[-1, 2]], "SL3"),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.groups.iter().find(|e| e.name == name)
    }

    pub fn build(&self, name: &str) -> Result<RootDatum> {
        if let Some(n) = parse_torus(name) {
            return RootDatum::torus(n);
        }
        let e = self
            .get(name)
            .ok_or_else(|| Error::Catalog(format!("unknown group `{name}`")))?;
        RootDatum::from_entry(e)
    }
}

fn parse_torus(name: &str) -> Option<usize> {
    let inner = name.strip_prefix("torus(")?.strip_suffix(')')?;
    inner.trim().parse().ok()
}

/// Look up `name` in the builtin catalog (`torus(n)` is parametric).
pub fn build_catalog_group(name: &str) -> Result<RootDatum> {
    Catalog::builtin().build(name)
}

/// Based root datum with both root systems listed in full.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub name: String,
    pub cartan_type: String,
    pub rank: usize,
    /// Positive roots first (simple roots leading), then their negatives.
    pub roots: Vec<IVec>,
    pub coroots: Vec<IVec>,
    pub simple: Vec<usize>,
    #[serde(default)]
    pub dual_name: Option<String>,
}

impl RootDatum {
    pub fn torus(n: usize) -> Result<Self> {
        let d = RootDatum {
            name: format!("torus({n})"),
            cartan_type: "T".into(),
            rank: n,
            roots: vec![],
            coroots: vec![],
            simple: vec![],
            dual_name: Some(format!("torus({n})")),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn from_entry(e: &CatalogEntry) -> Result<Self> {
        if e.simple_roots.len() != e.simple_coroots.len() {
            bail!(Catalog, "{}: {} simple roots but {} simple coroots", e.name, e.simple_roots.len(), e.simple_coroots.len());
        }
        for v in e.simple_roots.iter().chain(&e.simple_coroots) {
            if v.len() != e.rank {
                bail!(Catalog, "{}: vector {:?} does not have length {}", e.name, v, e.rank);
            }
        }
        let d = Self::generate(&e.name, &e.cartan_type, e.rank, &e.simple_roots, &e.simple_coroots, e.dual.clone())?;
        d.validate()?;
        Ok(d)
    }

    fn generate(
        name: &str,
        ty: &str,
        rank: usize,
        sr: &[IVec],
        sc: &[IVec],
        dual_name: Option<String>,
    ) -> Result<Self> {
        // Reflection closure on (root, coroot) pairs.
        let reflect = |v: &[i64], w: &[i64], i: usize| -> (IVec, IVec) {
            let c = dot(v, &sc[i]);
            let r: IVec = v.iter().zip(&sr[i]).map(|(a, b)| a - c * b).collect();
            let cc = dot(&sr[i], w);
            let cr: IVec = w.iter().zip(&sc[i]).map(|(a, b)| a - cc * b).collect();
            (r, cr)
        };
        let mut seen: BTreeMap<IVec, IVec> = BTreeMap::new();
        let mut queue: VecDeque<(IVec, IVec)> = sr.iter().cloned().zip(sc.iter().cloned()).collect();
        while let Some((r, c)) = queue.pop_front() {
            if seen.contains_key(&r) {
                continue;
            }
            if seen.len() > 512 {
                bail!(Catalog, "{name}: root system does not close (not finite type)");
            }
            for i in 0..sr.len() {
                let (r2, c2) = reflect(&r, &c, i);
                if !seen.contains_key(&r2) {
                    queue.push_back((r2, c2));
                }
            }
            seen.insert(r, c);
        }
        let mut pos = Vec::new();
        for (r, c) in &seen {
            let coeffs = simple_coefficients(sr, r).ok_or_else(|| {
                Error::Catalog(format!("{name}: root {r:?} outside the span of the simple roots"))
            })?;
            if coeffs.iter().all(|x| !x.is_negative()) {
                pos.push((coeffs, r.clone(), c.clone()));
            }
        }
        // Simple roots first, then by height, then lexicographically.
        pos.sort_by(|a, b| {
            let ha: Q = a.0.iter().sum();
            let hb: Q = b.0.iter().sum();
            ha.cmp(&hb).then_with(|| {
                let ia = sr.iter().position(|s| *s == a.1).unwrap_or(usize::MAX);
                let ib = sr.iter().position(|s| *s == b.1).unwrap_or(usize::MAX);
                ia.cmp(&ib)
            }).then_with(|| a.1.cmp(&b.1))
        });
        let mut roots: Vec<IVec> = pos.iter().map(|p| p.1.clone()).collect();
        let mut coroots: Vec<IVec> = pos.iter().map(|p| p.2.clone()).collect();
        let n = roots.len();
        for i in 0..n {
            roots.push(roots[i].iter().map(|x| -x).collect());
            coroots.push(coroots[i].iter().map(|x| -x).collect());
        }
        if roots.len() != seen.len() {
            bail!(Catalog, "{name}: roots are not split into positive and negative");
        }
        Ok(RootDatum {
            name: name.to_string(),
            cartan_type: ty.to_string(),
            rank,
            roots,
            coroots,
            simple: (0..sr.len()).collect(),
            dual_name,
        })
    }

    pub fn semisimple_rank(&self) -> usize {
        self.simple.len()
    }

    pub fn n_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn positive_roots(&self) -> &[IVec] {
        &self.roots[..self.n_positive()]
    }

    pub fn positive_coroots(&self) -> &[IVec] {
        &self.coroots[..self.n_positive()]
    }

    pub fn simple_root(&self, i: usize) -> &IVec {
        &self.roots[self.simple[i]]
    }

    pub fn simple_coroot(&self, i: usize) -> &IVec {
        &self.coroots[self.simple[i]]
    }

    pub fn cartan_matrix(&self) -> IMat {
        let l = self.simple.len();
        (0..l)
            .map(|i| (0..l).map(|j| dot(self.simple_root(i), self.simple_coroot(j))).collect())
            .collect()
    }

    /// Matrix of the simple reflection `s_i` on `X^*`.
    pub fn reflection_matrix(&self, i: usize) -> IMat {
        let a = self.simple_root(i);
        let c = self.simple_coroot(i);
        (0..self.rank)
            .map(|r| (0..self.rank).map(|k| i64::from(r == k) - a[r] * c[k]).collect())
            .collect()
    }

    /// Coefficients of `v` in the simple roots, if `v` lies in their span.
    pub fn simple_coeffs(&self, v: &[i64]) -> Option<Vec<Q>> {
        let sr: Vec<IVec> = (0..self.simple.len()).map(|i| self.simple_root(i).clone()).collect();
        simple_coefficients(&sr, v)
    }

    pub fn is_positive_root(&self, v: &[i64]) -> bool {
        self.positive_roots().iter().any(|r| r.as_slice() == v)
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == v)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.name.as_str();
        if self.roots.len() != self.coroots.len() {
            bail!(Invalid, "{n}: roots and coroots differ in number");
        }
        for (r, c) in self.roots.iter().zip(&self.coroots) {
            if r.len() != self.rank || c.len() != self.rank {
                bail!(Invalid, "{n}: vector of wrong length");
            }
            if dot(r, c) != 2 {
                bail!(Invalid, "{n}: <{r:?}, {c:?}> != 2");
            }
        }
        let roots: BTreeSet<&IVec> = self.roots.iter().collect();
        if roots.len() != self.roots.len() {
            bail!(Invalid, "{n}: repeated root");
        }
        for i in 0..self.simple.len() {
            let s = self.reflection_matrix(i);
            let a = self.simple_root(i);
            let ac = self.simple_coroot(i);
            for (r, c) in self.roots.iter().zip(&self.coroots) {
                let sr = mat_vec(&s, r);
                let Some(j) = self.root_index(&sr) else {
                    bail!(Invalid, "{n}: s_{i}({r:?}) = {sr:?} is not a root");
                };
                // s_a(beta)^vee = s_{a^vee}(beta^vee)
                let k = dot(a, c);
                let sc: IVec = c.iter().zip(ac).map(|(x, y)| x - k * y).collect();
                if self.coroots[j] != sc {
                    bail!(Invalid, "{n}: root/coroot bijection does not respect s_{i}");
                }
            }
        }
        let expected = expected_cartan(&self.cartan_type)
            .ok_or_else(|| Error::Invalid(format!("{n}: unknown Cartan type `{}`", self.cartan_type)))?;
        if expected != self.cartan_matrix() {
            bail!(Invalid, "{n}: Cartan matrix {:?} does not match type {}", self.cartan_matrix(), self.cartan_type);
        }
        if let Some(want) = expected_root_count(&self.cartan_type) {
            if want != self.roots.len() {
                bail!(Invalid, "{n}: {} roots, type {} has {want}", self.roots.len(), self.cartan_type);
            }
        }
        Ok(())
    }

    /// Enumerate the Weyl group (or the subgroup generated by `levi`).
    pub fn weyl_group(&self, levi: &[usize]) -> Vec<WeylElement> {
        let id = identity(self.rank);
        let mut seen: BTreeMap<IMat, Vec<usize>> = BTreeMap::new();
        seen.insert(id.clone(), vec![]);
        let mut queue = VecDeque::from([id]);
        while let Some(m) = queue.pop_front() {
            let word = seen[&m].clone();
            for &i in levi {
                let nm = mat_mul(&self.reflection_matrix(i), &m);
                if !seen.contains_key(&nm) {
                    let mut w = vec![i];
                    w.extend(&word);
                    seen.insert(nm.clone(), w);
                    queue.push_back(nm);
                }
            }
        }
        let mut out: Vec<WeylElement> = seen
            .into_iter()
            .map(|(matrix, reduced_word)| WeylElement { reduced_word, matrix })
            .collect();
        out.sort_by(|a, b| a.reduced_word.len().cmp(&b.reduced_word.len()).then(a.reduced_word.cmp(&b.reduced_word)));
        out
    }

    /// Number of positive roots sent negative.
    pub fn length(&self, w: &WeylElement) -> usize {
        self.positive_roots()
            .iter()
            .filter(|r| !self.is_positive_root(&mat_vec(&w.matrix, r)))
            .count()
    }

    /// Positive roots whose support lies in `levi`.
    pub fn levi_positive_roots(&self, levi: &[usize]) -> Vec<usize> {
        (0..self.n_positive())
            .filter(|&k| {
                let c = self.simple_coeffs(&self.roots[k]).expect("roots lie in the span");
                c.iter().enumerate().all(|(i, x)| x.is_zero() || levi.contains(&i))
            })
            .collect()
    }

    pub fn check_levi(&self, levi: &[usize]) -> Result<()> {
        for &i in levi {
            if i >= self.simple.len() {
                bail!(Domain, "{}: levi index {i} is not a simple index", self.name);
            }
        }
        Ok(())
    }
}

fn simple_coefficients(sr: &[IVec], v: &[i64]) -> Option<Vec<Q>> {
    if sr.is_empty() {
        return if v.iter().all(|x| *x == 0) { Some(vec![]) } else { None };
    }
    let rank = v.len();
    let a: Vec<Vec<Q>> = (0..rank).map(|r| sr.iter().map(|s| q(s[r])).collect()).collect();
    let b: Vec<Q> = v.iter().map(|x| q(*x)).collect();
    solve_q(&a, &b)
}

fn type_a_cartan(n: usize) -> IMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// Block diagonal Cartan matrix for types like `A1`, `A1xA2`, `T`.
pub fn expected_cartan(ty: &str) -> Option<IMat> {
    if ty == "T" || ty.is_empty() {
        return Some(vec![]);
    }
    let mut blocks = Vec::new();
    for part in ty.split('x') {
        let n: usize = part.strip_prefix('A')?.parse().ok()?;
        if n == 0 {
            return None;
        }
        blocks.push(type_a_cartan(n));
    }
    let total: usize = blocks.iter().map(Vec::len).sum();
    let mut m = vec![vec![0; total]; total];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m[off + i][off + j] = *x;
            }
        }
        off += b.len();
    }
    Some(m)
}

/// Table values: `A_n` has `n(n+1)` roots.
pub fn expected_root_count(ty: &str) -> Option<usize> {
    if ty == "T" || ty.is_empty() {
        return Some(0);
    }
    let mut total = 0;
    for part in ty.split('x') {
        let n: usize = part.strip_prefix('A')?.parse().ok()?;
        total += n * (n + 1);
    }
    Some(total)
}

pub fn dual_datum(d: &RootDatum) -> RootDatum {
    let name = d.dual_name.clone().unwrap_or_else(|| match d.name.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("dual({})", d.name),
    });
    RootDatum {
        name,
        cartan_type: d.cartan_type.clone(),
        rank: d.rank,
        roots: d.coroots.clone(),
        coroots: d.roots.clone(),
        simple: d.simple.clone(),
        dual_name: Some(d.name.clone()),
    }
}

/// Which lattice a weight lives in, relative to a fixed datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `X^* (x) Q`
    Character,
    /// `X_* (x) Q`
    Cocharacter,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight {
    pub side: Side,
    pub coords: Vec<Q>,
}

impl Weight {
    pub fn zero(side: Side, rank: usize) -> Self {
        Weight { side, coords: vec![Q::zero(); rank] }
    }

    pub fn from_ints(side: Side, v: &[i64]) -> Self {
        Weight { side, coords: v.iter().map(|x| q(*x)).collect() }
    }

    pub fn add(&self, o: &Weight) -> Result<Weight> {
        if self.side != o.side || self.coords.len() != o.coords.len() {
            bail!(Domain, "cannot add weights from different lattices");
        }
        Ok(Weight { side: self.side, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn neg(&self) -> Weight {
        Weight { side: self.side, coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: &Q) -> Weight {
        Weight { side: self.side, coords: self.coords.iter().map(|a| a * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Pairing is only defined between opposite lattices.
    pub fn pair(&self, o: &Weight) -> Result<Q> {
        if self.side == o.side {
            bail!(Domain, "pairing two weights from the same lattice");
        }
        if self.coords.len() != o.coords.len() {
            bail!(Domain, "pairing weights of different rank");
        }
        Ok(self.coords.iter().zip(&o.coords).map(|(a, b)| a * b).sum())
    }

    pub fn pair_int(&self, v: &[i64]) -> Q {
        self.coords.iter().zip(v).map(|(a, b)| a * q(*b)).sum()
    }

    /// Pairings with the coroots (character side) or roots (cocharacter side) of `d`.
    pub fn pairings(&self, d: &RootDatum) -> Vec<Q> {
        let against = match self.side {
            Side::Character => &d.coroots,
            Side::Cocharacter => &d.roots,
        };
        against.iter().map(|v| self.pair_int(v)).collect()
    }

    pub fn is_integral(&self, d: &RootDatum) -> bool {
        self.pairings(d).iter().all(|x| x.is_integer())
    }

    pub fn is_regular(&self, d: &RootDatum) -> bool {
        self.pairings(d).iter().all(|x| !x.is_zero())
    }

    pub fn is_dominant(&self, d: &RootDatum) -> bool {
        self.pairings(d)[..d.n_positive()].iter().all(|x| !x.is_negative())
    }

    pub fn fmt_coords(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(q_fmt).collect();
        format!("({})", parts.join(","))
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coords: Vec<String> = self.coords.iter().map(q_fmt).collect();
        let mut st = s.serialize_struct("Weight", 2)?;
        st.serialize_field("side", &self.side)?;
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElement {
    pub reduced_word: Vec<usize>,
    pub matrix: IMat,
}

impl WeylElement {
    pub fn len(&self) -> usize {
        self.reduced_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reduced_word.is_empty()
    }

    pub fn compose(&self, o: &WeylElement) -> IMat {
        mat_mul(&self.matrix, &o.matrix)
    }
}

/// Half the sum of the positive coroots of the Levi subsystem spanned by `levi`.
pub fn half_sum_positive_coroots(d: &RootDatum, levi: &[usize]) -> Result<Weight> {
    d.check_levi(levi)?;
    let mut w = Weight::zero(Side::Cocharacter, d.rank);
    for k in d.levi_positive_roots(levi) {
        for (c, x) in w.coords.iter_mut().zip(&d.coroots[k]) {
            *c += q(*x);
        }
    }
    Ok(w.scale(&crate::arith::qr(1, 2)))
}

pub fn longest_element(d: &RootDatum, levi: &[usize]) -> Result<WeylElement> {
    d.check_levi(levi)?;
    let w = d.weyl_group(levi);
    let w0 = w.into_iter().max_by_key(|e| e.len()).expect("group contains identity");
    Ok(w0)
}

/// Diagram automorphism together with the lattice map realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumAutomorphism {
    pub perm: Vec<usize>,
    pub matrix: IMat,
    pub involutive: bool,
}

impl DatumAutomorphism {
    pub fn identity(d: &RootDatum) -> Self {
        DatumAutomorphism { perm: (0..d.simple.len()).collect(), matrix: identity(d.rank), involutive: true }
    }

    pub fn validate(&self, d: &RootDatum) -> Result<()> {
        let l = d.simple.len();
        if self.perm.len() != l || self.matrix.len() != d.rank {
            bail!(Invalid, "automorphism has the wrong shape for {}", d.name);
        }
        let mut sorted = self.perm.clone();
        sorted.sort_unstable();
        if sorted != (0..l).collect::<Vec<_>>() {
            bail!(Invalid, "automorphism permutation is not a permutation");
        }
        let dual = self.dual_matrix()?;
        for i in 0..l {
            if mat_vec(&self.matrix, d.simple_root(i)) != *d.simple_root(self.perm[i]) {
                bail!(Invalid, "automorphism does not send simple root {i} to simple root {}", self.perm[i]);
            }
            if mat_vec(&dual, d.simple_coroot(i)) != *d.simple_coroot(self.perm[i]) {
                bail!(Invalid, "automorphism does not send simple coroot {i} to simple coroot {}", self.perm[i]);
            }
        }
        let c = d.cartan_matrix();
        for i in 0..l {
            for j in 0..l {
                if c[self.perm[i]][self.perm[j]] != c[i][j] {
                    bail!(Invalid, "automorphism does not commute with the Cartan matrix");
                }
            }
        }
        if self.involutive && mat_mul(&self.matrix, &self.matrix) != identity(d.rank) {
            bail!(Invalid, "automorphism flagged involutive but a^2 != 1");
        }
        Ok(())
    }

    /// Inverse transpose, acting on `X_*`. Only unimodular matrices are accepted.
    pub fn dual_matrix(&self) -> Result<IMat> {
        let n = self.matrix.len();
        // For an involution the inverse is the matrix itself; otherwise search powers.
        let id = identity(n);
        let mut p = self.matrix.clone();
        let mut prev = id.clone();
        for _ in 0..24 {
            if p == id {
                return Ok(transpose(&prev));
            }
            prev = p.clone();
            p = mat_mul(&p, &self.matrix);
        }
        bail!(Unsupported, "automorphism of infinite or large order")
    }

    /// The automorphism of the dual datum.
    pub fn dual(&self) -> Result<DatumAutomorphism> {
        Ok(DatumAutomorphism { perm: self.perm.clone(), matrix: self.dual_matrix()?, involutive: self.involutive })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn catalog_root_counts() {
        for (name, n) in [("torus(1)", 0), ("SL2", 2), ("PGL2", 2), ("SL2xSL2", 4), ("SL3", 6), ("PGL3", 6)] {
            let d = build_catalog_group(name).unwrap();
            assert_eq!(d.roots.len(), n, "{name}");
        }
    }

    #[test]
    fn sl2_root_is_twice_fundamental_weight() {
        let d = build_catalog_group("SL2").unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(d.positive_roots(), &[vec![2]]);
        let d = build_catalog_group("SL2xSL2").unwrap();
        assert_eq!(d.cartan_matrix(), vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn unknown_name_is_a_catalog_error() {
        assert!(matches!(build_catalog_group("E8"), Err(Error::Catalog(_))));
        assert!(matches!(build_catalog_group("torus(x)"), Err(Error::Catalog(_))));
    }

    #[test]
    fn duals() {
        let sl2 = build_catalog_group("SL2").unwrap();
        let d = dual_datum(&sl2);
        assert_eq!(d.name, "PGL2");
        assert_eq!(d.roots, build_catalog_group("PGL2").unwrap().roots);
        let sl3 = build_catalog_group("SL3").unwrap();
        assert_eq!(dual_datum(&dual_datum(&sl3)), sl3);
        let t = build_catalog_group("torus(3)").unwrap();
        assert_eq!(dual_datum(&t).name, "torus(3)");
    }

    #[test]
    fn rho_vee() {
        let sl2 = build_catalog_group("SL2").unwrap();
        let r = half_sum_positive_coroots(&sl2, &[0]).unwrap();
        assert_eq!(r.coords, vec![qr(1, 2)]);
        assert!(half_sum_positive_coroots(&sl2, &[]).unwrap().is_zero());
        let sl3 = build_catalog_group("SL3").unwrap();
        let r = half_sum_positive_coroots(&sl3, &[0, 1]).unwrap();
        // alpha_1^vee + alpha_2^vee in the dual basis
        assert_eq!(r.coords, vec![q(1), q(1)]);
    }

    #[test]
    fn longest_elements() {
        let sl2 = build_catalog_group("SL2").unwrap();
        let w0 = longest_element(&sl2, &[0]).unwrap();
        assert_eq!(w0.reduced_word, vec![0]);
        assert!(longest_element(&sl2, &[]).unwrap().is_empty());
        let p = build_catalog_group("SL2xSL2").unwrap();
        let w0 = longest_element(&p, &[0, 1]).unwrap();
        assert_eq!(w0.len(), 2);
        assert_eq!(p.weyl_group(&[0, 1]).len(), 4);
        assert_eq!(p.length(&w0), 2);
        let sl3 = build_catalog_group("SL3").unwrap();
        let w0 = longest_element(&sl3, &[0, 1]).unwrap();
        assert_eq!(w0.len(), 3);
        // w0(Delta) = -Delta up to the diagram flip
        let images: BTreeSet<IVec> = (0..2).map(|i| mat_vec(&w0.matrix, sl3.simple_root(i)).iter().map(|x| -x).collect()).collect();
        let simples: BTreeSet<IVec> = (0..2).map(|i| sl3.simple_root(i).clone()).collect();
        assert_eq!(images, simples);
    }

    #[test]
    fn weights_and_sides() {
        let sl2 = build_catalog_group("SL2").unwrap();
        let lam = Weight::from_ints(Side::Character, &[1]);
        assert!(lam.is_integral(&sl2) && lam.is_regular(&sl2));
        let half = lam.scale(&qr(1, 2));
        assert!(!half.is_integral(&sl2));
        assert!(lam.pair(&lam).is_err());
        assert!(lam.add(&Weight::zero(Side::Cocharacter, 1)).is_err());
    }

    #[test]
    fn automorphisms() {
        let p = build_catalog_group("SL2xSL2").unwrap();
        let swap = DatumAutomorphism { perm: vec![1, 0], matrix: vec![vec![0, 1], vec![1, 0]], involutive: true };
        swap.validate(&p).unwrap();
        let bad = DatumAutomorphism { perm: vec![1, 0], matrix: identity(2), involutive: true };
        assert!(bad.validate(&p).is_err());
        let t = build_catalog_group("torus(1)").unwrap();
        let inv = DatumAutomorphism { perm: vec![], matrix: vec![vec![-1]], involutive: true };
        inv.validate(&t).unwrap();
        assert_eq!(inv.dual().unwrap().matrix, vec![vec![-1]]);
    }
}
