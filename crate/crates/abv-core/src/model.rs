//! Matrix models for groups that split into rank-one factors.
//!
//! A root datum is read in its fixed basis: a root `2e_j` with coroot `e_j`
//! is an `SL2` factor, a root `e_j` with coroot `2e_j` a `PGL2` factor, and a
//! coordinate carrying no root is a `GL1` factor. `PGL2` elements are stored
//! as `SL2` lifts and compared up to sign.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{nullspace, qr, Cyc8, Line, Mat2, Q};
use crate::lie_core::RootDatum;
use crate::{bail, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Kind {
    Sl2,
    Pgl2,
    Torus,
}

impl Kind {
    pub fn dual(self) -> Kind {
        match self {
            Kind::Sl2 => Kind::Pgl2,
            Kind::Pgl2 => Kind::Sl2,
            Kind::Torus => Kind::Torus,
        }
    }

    pub fn is_a1(self) -> bool {
        self != Kind::Torus
    }

    pub fn dim(self) -> usize {
        if self.is_a1() {
            3
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Sl2 => "SL2",
            Kind::Pgl2 => "PGL2",
            Kind::Torus => "GL1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Factor {
    pub kind: Kind,
    pub coord: usize,
    /// Index into the simple roots, for `SL2`/`PGL2` factors.
    pub simple: Option<usize>,
}

/// Split `d` into rank-one factors, ordered by coordinate.
pub fn factorize(d: &RootDatum) -> Result<Vec<Factor>> {
    let mut out: Vec<Option<Factor>> = vec![None; d.rank];
    for i in 0..d.simple.len() {
        let r = d.simple_root(i);
        let c = d.simple_coroot(i);
        let support: Vec<usize> = (0..d.rank).filter(|&j| r[j] != 0 || c[j] != 0).collect();
        if support.len() != 1 {
            bail!(
                Unsupported,
                "geometry backend handles products of rank-one factors only; {} has simple root {:?} spread over several coordinates",
                d.name,
                r
            );
        }
        let j = support[0];
        let kind = match (r[j], c[j]) {
            (2, 1) => Kind::Sl2,
            (1, 2) => Kind::Pgl2,
            _ => bail!(Unsupported, "{}: simple root {:?} is not in standard rank-one form", d.name, r),
        };
        if out[j].is_some() {
            bail!(Unsupported, "{}: two roots on coordinate {j}", d.name);
        }
        out[j] = Some(Factor { kind, coord: j, simple: Some(i) });
    }
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(j, f)| f.unwrap_or(Factor { kind: Kind::Torus, coord: j, simple: None }))
        .collect())
}

/// An element of one factor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Elem {
    M(Mat2),
    S(Cyc8),
}

impl Elem {
    pub fn one(kind: Kind) -> Elem {
        match kind {
            Kind::Torus => Elem::S(Cyc8::one()),
            _ => Elem::M(Mat2::identity()),
        }
    }

    pub fn mat(&self) -> &Mat2 {
        match self {
            Elem::M(m) => m,
            Elem::S(_) => panic!("scalar used as a matrix"),
        }
    }

    pub fn scalar(&self) -> &Cyc8 {
        match self {
            Elem::S(s) => s,
            Elem::M(_) => panic!("matrix used as a scalar"),
        }
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        match (self, o) {
            (Elem::M(a), Elem::M(b)) => Elem::M(a.clone() * b.clone()),
            (Elem::S(a), Elem::S(b)) => Elem::S(a.clone() * b.clone()),
            _ => panic!("mixed factor elements"),
        }
    }

    pub fn inv(&self) -> Elem {
        match self {
            Elem::M(a) => Elem::M(a.inv().expect("group elements are invertible")),
            Elem::S(a) => Elem::S(a.inv().expect("group elements are invertible")),
        }
    }

    pub fn neg(&self) -> Elem {
        match self {
            Elem::M(a) => Elem::M(a.neg()),
            Elem::S(a) => Elem::S(-a.clone()),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match self {
            Elem::M(m) => m.is_diagonal(),
            Elem::S(_) => true,
        }
    }

    pub fn is_antidiagonal(&self) -> bool {
        match self {
            Elem::M(m) => m.0[0].is_zero() && m.0[3].is_zero(),
            Elem::S(_) => false,
        }
    }

    /// Equality in the group of type `kind` (`PGL2` lifts agree up to sign).
    pub fn eq_in(&self, o: &Elem, kind: Kind) -> bool {
        if self == o {
            return true;
        }
        kind == Kind::Pgl2 && *self == o.neg()
    }

    pub fn is_one_in(&self, kind: Kind) -> bool {
        self.eq_in(&Elem::one(kind), kind)
    }

    pub fn is_central_in(&self, kind: Kind) -> bool {
        match self {
            Elem::M(m) => m.is_scalar(),
            Elem::S(_) => {
                let _ = kind;
                true
            }
        }
    }

    /// Canonical representative: `PGL2` lifts are normalized to the larger of `+-g`.
    pub fn canonical(&self, kind: Kind) -> Elem {
        if kind == Kind::Pgl2 {
            let n = self.neg();
            if n > *self {
                return n;
            }
        }
        self.clone()
    }

    pub fn pow(&self, e: u32) -> Elem {
        let mut acc = match self {
            Elem::M(_) => Elem::M(Mat2::identity()),
            Elem::S(_) => Elem::S(Cyc8::one()),
        };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Smallest `n <= 16` with `g^n = 1` in `kind`.
    pub fn order_in(&self, kind: Kind) -> Option<u32> {
        let mut acc = self.clone();
        for n in 1..=16 {
            if acc.is_one_in(kind) {
                return Some(n);
            }
            acc = acc.mul(self);
        }
        None
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::S(s) => write!(f, "{s}"),
            Elem::M(m) => {
                let [a, b, c, d] = &m.0;
                if m.is_scalar() {
                    write!(f, "{a}I")
                } else if m.is_diagonal() {
                    write!(f, "diag({a},{d})")
                } else if a.is_zero() && d.is_zero() {
                    write!(f, "adiag({b},{c})")
                } else {
                    write!(f, "[[{a},{b}],[{c},{d}]]")
                }
            }
        }
    }
}

impl Serialize for Elem {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{self}"))
    }
}

pub fn fmt_elems(v: &[Elem]) -> String {
    let parts: Vec<String> = v.iter().map(|e| format!("{e}")).collect();
    parts.join(";")
}

/// `exp(2 pi i u x)` for `x` the coordinate cocharacter of the factor, on the group side.
///
/// `SL2`: `x = alpha^vee`, `PGL2`: `x = varpi^vee`, `GL1`: the identity cocharacter.
pub fn g_torus(kind: Kind, u: &Q) -> Result<Elem> {
    let e = |x: &Q| Cyc8::exp_2pi_i(x).ok_or_else(|| crate::Error::Unsupported(format!("exp(2 pi i {x}) is outside the eighth roots of unity")));
    Ok(match kind {
        Kind::Sl2 => Elem::M(Mat2::torus(&e(u)?)),
        Kind::Pgl2 => Elem::M(Mat2::torus(&e(&(u * qr(1, 2)))?)),
        Kind::Torus => Elem::S(e(u)?),
    })
}

/// `exp(2 pi i v x)` in the dual factor, where `x` is the coordinate character of the
/// group-side factor of kind `g_kind` read as a cocharacter of the dual torus.
pub fn dual_torus(g_kind: Kind, v: &Q) -> Result<Elem> {
    // The dual of SL2 is PGL2 with coordinate varpi; the dual of PGL2 is SL2 with coordinate alpha.
    match g_kind {
        Kind::Sl2 => g_torus(Kind::Pgl2, v),
        Kind::Pgl2 => g_torus(Kind::Sl2, v),
        Kind::Torus => g_torus(Kind::Torus, v),
    }
}

pub fn n_w() -> Elem {
    Elem::M(Mat2::n_w())
}

/// Elements of the normalizer of the diagonal torus whose torus part has order
/// dividing 8, diagonal ones first.
pub fn candidates(kind: Kind) -> Vec<Elem> {
    let mut out: Vec<Elem> = Vec::new();
    match kind {
        Kind::Torus => {
            for k in 0..8 {
                out.push(Elem::S(Cyc8::zeta_pow(k)));
            }
        }
        _ => {
            for k in 0..8 {
                out.push(Elem::M(Mat2::torus(&Cyc8::zeta_pow(k))));
            }
            for k in 0..8 {
                out.push(Elem::M(Mat2::n_w() * Mat2::torus(&Cyc8::zeta_pow(k))));
            }
        }
    }
    let mut dedup: Vec<Elem> = Vec::new();
    for e in out {
        if !dedup.iter().any(|d| d.eq_in(&e, kind)) {
            dedup.push(e);
        }
    }
    dedup
}

/// Basis `H, E, F` of `sl2`.
pub fn sl2_basis() -> [Mat2; 3] {
    [Mat2::from_i64(1, 0, 0, -1), Mat2::from_i64(0, 1, 0, 0), Mat2::from_i64(0, 0, 1, 0)]
}

fn coords_in_sl2(m: &Mat2) -> [Cyc8; 3] {
    [m.0[0].clone(), m.0[1].clone(), m.0[2].clone()]
}

/// Basis of `{X in sl2 : Ad(g) X = X}`.
pub fn centralizer_algebra(g: &Mat2) -> Vec<Mat2> {
    let basis = sl2_basis();
    let images: Vec<[Cyc8; 3]> = basis
        .iter()
        .map(|b| coords_in_sl2(&(b.conj_by(g).expect("invertible") - b.clone())))
        .collect();
    // rows: coordinate r of sum_i c_i (Ad(g)B_i - B_i)
    let rows: Vec<Vec<Cyc8>> = (0..3).map(|r| (0..3).map(|i| images[i][r].clone()).collect()).collect();
    nullspace(&rows, 3)
        .into_iter()
        .map(|v| {
            let mut m = Mat2::from_i64(0, 0, 0, 0);
            for (c, b) in v.iter().zip(basis.iter()) {
                m = m + b.scale(c);
            }
            m
        })
        .collect()
}

/// Dimension of `{X in span(alg) : X p in C p}`.
pub fn line_stabilizer_dim(alg: &[Mat2], p: &Line) -> usize {
    if alg.is_empty() {
        return 0;
    }
    let [x, y] = p.0.clone();
    let row: Vec<Cyc8> = alg
        .iter()
        .map(|b| {
            let [u, v] = b.apply(&[x.clone(), y.clone()]);
            u * y.clone() - v * x.clone()
        })
        .collect();
    nullspace(&[row], alg.len()).len()
}

/// An invertible `h` with `h a h^-1 = c b` for `c = 1`, or `c = +-1` when `projective`.
pub fn solve_conjugator(a: &Mat2, b: &Mat2, projective: bool) -> Option<Mat2> {
    let signs: &[i64] = if projective { &[1, -1] } else { &[1] };
    for &c in signs {
        let cb = b.scale(&Cyc8::from_i64(c));
        // Unknown h = [h0 h1; h2 h3]; equation h a - cb h = 0 is linear in h.
        let mut cols: Vec<[Cyc8; 4]> = Vec::new();
        for k in 0..4 {
            let mut e = Mat2::from_i64(0, 0, 0, 0);
            e.0[k] = Cyc8::one();
            let r = e.clone() * a.clone() - cb.clone() * e;
            cols.push(r.0.clone());
        }
        let rows: Vec<Vec<Cyc8>> = (0..4).map(|r| (0..4).map(|k| cols[k][r].clone()).collect()).collect();
        let basis = nullspace(&rows, 4);
        let to_mat = |v: &[Cyc8]| Mat2([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]);
        let mut tries: Vec<Mat2> = basis.iter().map(|v| to_mat(v)).collect();
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                for t in 1..4 {
                    let v: Vec<Cyc8> = basis[i]
                        .iter()
                        .zip(&basis[j])
                        .map(|(x, y)| x.clone() + y.clone() * Cyc8::from_i64(t))
                        .collect();
                    tries.push(to_mat(&v));
                }
            }
        }
        if let Some(h) = tries.into_iter().find(|h| !h.det().is_zero()) {
            return Some(h);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::lie_core::build_catalog_group;

    #[test]
    fn factorization() {
        let f = factorize(&build_catalog_group("SL2xPGL2").unwrap()).unwrap();
        assert_eq!(f.iter().map(|x| x.kind).collect::<Vec<_>>(), vec![Kind::Sl2, Kind::Pgl2]);
        let f = factorize(&build_catalog_group("SL2xGL1").unwrap()).unwrap();
        assert_eq!(f[1].kind, Kind::Torus);
        assert!(matches!(factorize(&build_catalog_group("SL3").unwrap()), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn torus_elements() {
        // exp(pi i rho^vee) for SL2 and PGL2 both lift to diag(i, -i).
        let e = g_torus(Kind::Sl2, &qr(1, 4)).unwrap();
        assert_eq!(e, Elem::M(Mat2::torus(&Cyc8::i())));
        let e = g_torus(Kind::Pgl2, &qr(1, 2)).unwrap();
        assert_eq!(e, Elem::M(Mat2::torus(&Cyc8::i())));
        // e(rho) in the dual of PGL2 is -I; in the dual of SL2 it is trivial.
        let e = dual_torus(Kind::Pgl2, &qr(1, 2)).unwrap();
        assert!(e.eq_in(&Elem::M(Mat2::identity().neg()), Kind::Sl2));
        let e = dual_torus(Kind::Sl2, &q(1)).unwrap();
        assert!(e.is_one_in(Kind::Pgl2));
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(candidates(Kind::Sl2).len(), 16);
        assert_eq!(candidates(Kind::Pgl2).len(), 8);
        assert_eq!(candidates(Kind::Torus).len(), 8);
    }

    #[test]
    fn centralizers_and_stabilizers() {
        let x = Mat2::torus(&Cyc8::i());
        let c = centralizer_algebra(&x);
        assert_eq!(c.len(), 1);
        assert_eq!(centralizer_algebra(&Mat2::identity()).len(), 3);
        assert_eq!(line_stabilizer_dim(&c, &Line::zero_pt()), 1);
        assert_eq!(line_stabilizer_dim(&c, &Line::from_i64(1, 1)), 0);
        assert_eq!(line_stabilizer_dim(&sl2_basis(), &Line::from_i64(1, 1)), 2);
    }

    #[test]
    fn conjugators() {
        let y = Mat2::torus(&Cyc8::i());
        let a = Mat2::n_w();
        let h = solve_conjugator(&a, &y, false).unwrap();
        assert_eq!(a.conj_by(&h).unwrap(), y);
        let h = solve_conjugator(&y.neg(), &y, true).unwrap();
        let c = y.neg().conj_by(&h).unwrap();
        assert!(c == y || c == y.neg());
    }
}
