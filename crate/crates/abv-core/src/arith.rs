//! Exact scalars: rationals and the cyclotomic field of eighth roots of unity.
//!
//! Matrix models only ever need roots of unity of order dividing 8 together
//! with `1/sqrt(2)`, so `Q(zeta_8)` is closed under every operation used.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Fractional part in `[0, 1)`.
pub fn q_frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn q_to_i64(x: &Q) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    i64::try_from(x.to_integer()).ok()
}

/// Plain-text rendering used in canonical ids (`3`, `-1/2`).
pub fn q_fmt(x: &Q) -> String {
    if x.is_integer() {
        alloc::format!("{}", x.numer())
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde helpers writing rationals as `"p/q"` strings.
pub mod qser {
    use super::{q_fmt, Q};
    use alloc::vec::Vec;
    use serde::ser::{SerializeSeq, Serializer};

    pub fn one<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q_fmt(x))
    }

    pub fn vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&q_fmt(x))?;
        }
        seq.end()
    }

    pub fn vecvec<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let r: Vec<_> = row.iter().map(q_fmt).collect();
            seq.serialize_element(&r)?;
        }
        seq.end()
    }
}

/// Element `c0 + c1 z + c2 z^2 + c3 z^3` of `Q(z)`, `z = exp(2 pi i / 8)`, `z^4 = -1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyc8(pub [Q; 4]);

impl Cyc8 {
    pub fn zero() -> Self {
        Cyc8([Q::zero(), Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(x: Q) -> Self {
        Cyc8([x, Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_q(q(n))
    }

    /// `z^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c = [Q::zero(), Q::zero(), Q::zero(), Q::zero()];
        if k < 4 {
            c[k] = Q::one();
        } else {
            c[k - 4] = -Q::one();
        }
        Cyc8(c)
    }

    /// `exp(2 pi i k / n)`; requires `n | 8`.
    pub fn root_of_unity(k: i64, n: i64) -> Option<Self> {
        if n <= 0 || 8 % n != 0 {
            return None;
        }
        Some(Self::zeta_pow(k * (8 / n)))
    }

    /// `exp(2 pi i x)` for rational `x` with denominator dividing 8.
    pub fn exp_2pi_i(x: &Q) -> Option<Self> {
        let e = x * q(8);
        q_to_i64(&e).map(Self::zeta_pow)
    }

    pub fn i() -> Self {
        Self::zeta_pow(2)
    }

    pub fn sqrt2() -> Self {
        Self::zeta_pow(1) - Self::zeta_pow(3)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn scale(&self, s: &Q) -> Self {
        Cyc8([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s, &self.0[3] * s])
    }

    /// Galois automorphism `z -> z^k` (k odd).
    pub fn galois(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (j, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                out = out + Self::zeta_pow(k * j as i64).scale(c);
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.galois(7)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let others = self.galois(3) * self.galois(5) * self.galois(7);
        let norm = self.clone() * others.clone();
        let n = norm.0[0].clone();
        debug_assert!(norm.0[1].is_zero() && norm.0[2].is_zero() && norm.0[3].is_zero());
        Some(others.scale(&(Q::one() / n)))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|v| self.clone() * v)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// `Some(k)` with `self = z^k`, `0 <= k < 8`.
    pub fn root_exponent(&self) -> Option<i64> {
        (0..8).find(|&k| *self == Self::zeta_pow(k))
    }
}

impl Add for Cyc8 {
    type Output = Cyc8;
    fn add(self, o: Cyc8) -> Cyc8 {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Cyc8([a0 + b0, a1 + b1, a2 + b2, a3 + b3])
    }
}

impl Sub for Cyc8 {
    type Output = Cyc8;
    fn sub(self, o: Cyc8) -> Cyc8 {
        self + (-o)
    }
}

impl Neg for Cyc8 {
    type Output = Cyc8;
    fn neg(self) -> Cyc8 {
        let [a0, a1, a2, a3] = self.0;
        Cyc8([-a0, -a1, -a2, -a3])
    }
}

impl Mul for Cyc8 {
    type Output = Cyc8;
    fn mul(self, o: Cyc8) -> Cyc8 {
        let mut c: [Q; 4] = [Q::zero(), Q::zero(), Q::zero(), Q::zero()];
        for i in 0..4 {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if o.0[j].is_zero() {
                    continue;
                }
                let p = &self.0[i] * &o.0[j];
                let k = i + j;
                if k < 4 {
                    c[k] += p;
                } else {
                    c[k - 4] -= p;
                }
            }
        }
        Cyc8(c)
    }
}

impl fmt::Debug for Cyc8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyc8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.root_exponent() {
            return match k {
                0 => write!(f, "1"),
                4 => write!(f, "-1"),
                2 => write!(f, "i"),
                6 => write!(f, "-i"),
                _ => write!(f, "z^{}", k),
            };
        }
        let mut first = true;
        for (j, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "{}", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match j {
                0 => write!(f, "{}", q_fmt(&a))?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{}*", q_fmt(&a))?;
                    }
                    write!(f, "z^{}", j)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// 2x2 matrix `[[a, b], [c, d]]` over `Q(z)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mat2(pub [Cyc8; 4]);

impl Mat2 {
    pub fn new(a: Cyc8, b: Cyc8, c: Cyc8, d: Cyc8) -> Self {
        Mat2([a, b, c, d])
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2([Cyc8::from_i64(a), Cyc8::from_i64(b), Cyc8::from_i64(c), Cyc8::from_i64(d)])
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn diag(a: Cyc8, d: Cyc8) -> Self {
        Mat2([a, Cyc8::zero(), Cyc8::zero(), d])
    }

    /// `diag(s, 1/s)`.
    pub fn torus(s: &Cyc8) -> Self {
        Self::diag(s.clone(), s.inv().expect("torus coordinate must be nonzero"))
    }

    /// The Tits representative `[[0, 1], [-1, 0]]` of the simple reflection.
    pub fn n_w() -> Self {
        Self::from_i64(0, 1, -1, 0)
    }

    pub fn det(&self) -> Cyc8 {
        let [a, b, c, d] = self.0.clone();
        a * d - b * c
    }

    pub fn trace(&self) -> Cyc8 {
        self.0[0].clone() + self.0[3].clone()
    }

    pub fn inv(&self) -> Option<Self> {
        let det = self.det().inv()?;
        let [a, b, c, d] = self.0.clone();
        Some(Mat2([d * det.clone(), -b * det.clone(), -c * det.clone(), a * det]))
    }

    pub fn scale(&self, s: &Cyc8) -> Self {
        let [a, b, c, d] = self.0.clone();
        Mat2([a * s.clone(), b * s.clone(), c * s.clone(), d * s.clone()])
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Cyc8::one())
    }

    pub fn is_scalar(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero() && self.0[0] == self.0[3]
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero()
    }

    pub fn apply(&self, v: &[Cyc8; 2]) -> [Cyc8; 2] {
        let [a, b, c, d] = self.0.clone();
        [a * v[0].clone() + b * v[1].clone(), c * v[0].clone() + d * v[1].clone()]
    }

    pub fn conj_by(&self, g: &Mat2) -> Option<Mat2> {
        Some(g.clone() * self.clone() * g.inv()?)
    }

    pub fn bracket(&self, o: &Mat2) -> Mat2 {
        let ab = self.clone() * o.clone();
        let ba = o.clone() * self.clone();
        ab - ba
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([
            a.clone() * e.clone() + b.clone() * g.clone(),
            a * f.clone() + b * h.clone(),
            c.clone() * e + d.clone() * g,
            c * f + d * h,
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([a - e, b - f, c - g, d - h])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([a + e, b + f, c + g, d + h])
    }
}

/// Projective point `[x : y]` on P^1, normalized so the first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Line(pub [Cyc8; 2]);

impl Line {
    pub fn new(x: Cyc8, y: Cyc8) -> Option<Self> {
        if !x.is_zero() {
            let yi = y.div(&x)?;
            Some(Line([Cyc8::one(), yi]))
        } else if !y.is_zero() {
            Some(Line([Cyc8::zero(), Cyc8::one()]))
        } else {
            None
        }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Self::new(Cyc8::from_i64(x), Cyc8::from_i64(y)).expect("nonzero line")
    }

    pub fn zero_pt() -> Self {
        Self::from_i64(1, 0)
    }

    pub fn infinity_pt() -> Self {
        Self::from_i64(0, 1)
    }

    pub fn moved_by(&self, g: &Mat2) -> Self {
        let [x, y] = g.apply(&self.0);
        Line::new(x, y).expect("invertible matrix maps lines to lines")
    }

    /// Scalar `e` with `g v = e v`, if `v` spans an eigenline of `g`.
    pub fn eigenvalue(&self, g: &Mat2) -> Option<Cyc8> {
        let [x, y] = g.apply(&self.0);
        let [vx, vy] = self.0.clone();
        let cross = x.clone() * vy.clone() - y.clone() * vx.clone();
        if !cross.is_zero() {
            return None;
        }
        if !vx.is_zero() {
            x.div(&vx)
        } else {
            y.div(&vy)
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.0[0], self.0[1])
    }
}

/// Null space of a matrix over `Q(z)` given by rows; returns a basis.
pub fn nullspace(rows: &[Vec<Cyc8>], ncols: usize) -> Vec<Vec<Cyc8>> {
    let mut m: Vec<Vec<Cyc8>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for j in 0..ncols {
            m[r][j] = m[r][j].clone() * inv.clone();
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = alloc::vec![Cyc8::zero(); ncols];
        v[free] = Cyc8::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Rank of a rational matrix.
pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &piv;
                for j in 0..ncols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Rational solution `x` of `A x = b` (rows of `A`), if one exists.
pub fn solve_q(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for j in 0..=n {
            m[r][j] = &m[r][j] / &piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = alloc::vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_relations() {
        let z = Cyc8::zeta_pow(1);
        assert_eq!(z.pow(8), Cyc8::one());
        assert_eq!(z.pow(4), -Cyc8::one());
        assert_eq!(Cyc8::i() * Cyc8::i(), -Cyc8::one());
        assert_eq!(Cyc8::sqrt2() * Cyc8::sqrt2(), Cyc8::from_i64(2));
    }

    #[test]
    fn inverse_round_trip() {
        let x = Cyc8([qr(1, 2), q(3), q(-1), qr(2, 5)]);
        let y = x.inv().unwrap();
        assert_eq!(x * y, Cyc8::one());
        assert!(Cyc8::zero().inv().is_none());
    }

    #[test]
    fn exp_of_rationals() {
        assert_eq!(Cyc8::exp_2pi_i(&qr(1, 4)).unwrap(), Cyc8::i());
        assert_eq!(Cyc8::exp_2pi_i(&qr(1, 2)).unwrap(), -Cyc8::one());
        assert!(Cyc8::exp_2pi_i(&qr(1, 3)).is_none());
    }

    #[test]
    fn matrices() {
        let n = Mat2::n_w();
        assert_eq!(n.clone() * n.clone(), Mat2::identity().neg());
        assert_eq!(n.det(), Cyc8::one());
        let t = Mat2::torus(&Cyc8::i());
        let conj = t.conj_by(&n).unwrap();
        assert_eq!(conj, Mat2::torus(&-Cyc8::i()));
    }

    #[test]
    fn lines_and_eigenvalues() {
        let t = Mat2::torus(&Cyc8::i());
        assert_eq!(Line::zero_pt().eigenvalue(&t), Some(Cyc8::i()));
        assert_eq!(Line::infinity_pt().eigenvalue(&t), Some(-Cyc8::i()));
        assert_eq!(Line::from_i64(1, 1).eigenvalue(&t), None);
        let p = Line::from_i64(2, 4);
        assert_eq!(p, Line::from_i64(1, 2));
    }

    #[test]
    fn nullspace_of_commutant() {
        // Commutant of diag(i, -i) inside 2x2 matrices is the diagonal.
        let x = Mat2::torus(&Cyc8::i());
        let mut rows = Vec::new();
        for k in 0..4 {
            let mut e = Mat2::from_i64(0, 0, 0, 0);
            e.0[k] = Cyc8::one();
            rows.push(e.bracket(&x).0.to_vec());
        }
        // transpose: unknowns are the 4 entries
        let cols: Vec<Vec<Cyc8>> = (0..4).map(|r| (0..4).map(|k| rows[k][r].clone()).collect()).collect();
        assert_eq!(nullspace(&cols, 4).len(), 2);
    }

    #[test]
    fn rational_solve() {
        let a = alloc::vec![alloc::vec![q(2), q(0)], alloc::vec![q(0), q(1)]];
        assert_eq!(solve_q(&a, &[q(1), q(3)]).unwrap(), alloc::vec![qr(1, 2), q(3)]);
        let a = alloc::vec![alloc::vec![q(0)]];
        assert!(solve_q(&a, &[q(1)]).is_none());
        assert_eq!(rank_q(&[alloc::vec![q(1), q(2)], alloc::vec![q(2), q(4)]]), 1);
    }
}
