//! Central subgroups in logarithmic coordinates.
//!
//! An element of `Z/n_1 x ... x Z/n_k x (C^x)^m` is stored as a vector of
//! rationals modulo 1: the coordinate `u` of a cyclic factor of order `n`
//! is a multiple of `1/n`; a `C^x` factor holds `exp(2 pi i u)` and only its
//! finite-order points are representable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{q, q_fmt, q_frac, qr, Q};
use crate::lie_core::IMat;
use crate::{bail, Result};

pub type CElem = Vec<Q>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralGroup {
    /// Cyclic orders; `0` marks a `C^x` factor.
    pub orders: Vec<u32>,
    /// Integer matrix of the involution on logarithmic coordinates.
    pub theta: IMat,
    /// Human names of the coordinates.
    pub labels: Vec<String>,
}

pub fn fmt_celem(e: &CElem) -> String {
    if e.iter().all(Zero::is_zero) {
        return "1".into();
    }
    let parts: Vec<String> = e.iter().map(q_fmt).collect();
    format!("exp(2pi i({}))", parts.join(","))
}

impl CentralGroup {
    pub fn trivial() -> Self {
        CentralGroup { orders: vec![], theta: vec![], labels: vec![] }
    }

    pub fn new(orders: Vec<u32>, theta: IMat) -> Result<Self> {
        let n = orders.len();
        let labels = (0..n).map(|i| format!("z{i}")).collect();
        let g = CentralGroup { orders, theta, labels };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.orders.len();
        if self.theta.len() != n || self.theta.iter().any(|r| r.len() != n) {
            bail!(Invalid, "theta has the wrong shape");
        }
        // theta must map each factor's subgroup into the group: test on generators.
        for i in 0..n {
            let mut g = vec![Q::zero(); n];
            if self.orders[i] == 0 {
                continue;
            }
            g[i] = qr(1, self.orders[i] as i64);
            let t = self.apply_theta(&g);
            if !self.contains(&t) {
                bail!(Invalid, "theta does not preserve the group");
            }
            if self.apply_theta(&t) != g {
                bail!(Invalid, "theta is not an involution");
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn has_torus(&self) -> bool {
        self.orders.contains(&0)
    }

    pub fn identity(&self) -> CElem {
        vec![Q::zero(); self.rank()]
    }

    pub fn normalize(&self, e: &[Q]) -> CElem {
        e.iter().map(q_frac).collect()
    }

    pub fn contains(&self, e: &[Q]) -> bool {
        e.len() == self.rank()
            && e.iter().zip(&self.orders).all(|(x, &n)| n == 0 || (x * q(n as i64)).is_integer())
    }

    pub fn add(&self, a: &[Q], b: &[Q]) -> CElem {
        self.normalize(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: &[Q]) -> CElem {
        self.normalize(&a.iter().map(|x| -x).collect::<Vec<_>>())
    }

    pub fn apply_theta(&self, a: &[Q]) -> CElem {
        let v: Vec<Q> = self
            .theta
            .iter()
            .map(|row| row.iter().zip(a).map(|(t, x)| q(*t) * x).sum())
            .collect();
        self.normalize(&v)
    }

    pub fn is_identity(&self, a: &[Q]) -> bool {
        a.iter().all(|x| q_frac(x).is_zero())
    }

    /// All elements; only for finite groups.
    pub fn elements(&self) -> Result<Vec<CElem>> {
        if self.has_torus() {
            bail!(Unsupported, "cannot enumerate a group with a torus factor");
        }
        let mut out = vec![self.identity()];
        for (i, &n) in self.orders.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                for k in 0..n {
                    let mut f = e.clone();
                    f[i] = qr(k as i64, n as i64);
                    next.push(f);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    pub fn order(&self) -> Result<u64> {
        if self.has_torus() {
            bail!(Unsupported, "infinite group");
        }
        Ok(self.orders.iter().map(|&n| n as u64).product())
    }

    /// Order of an element (finite-order points only).
    pub fn element_order(&self, a: &[Q]) -> u64 {
        let mut l: u64 = 1;
        for x in a {
            let d = q_frac(x).denom().clone();
            let d: u64 = u64::try_from(d).unwrap_or(u64::MAX);
            l = num_integer::lcm(l, d);
        }
        l
    }

    /// The `(1 + theta)` image evaluated on one element.
    pub fn one_plus_theta(&self, a: &[Q]) -> CElem {
        self.add(a, &self.apply_theta(a))
    }

    /// Membership in `(1 + theta) Z`. Torus coordinates must be theta-stable lines;
    /// there `(1+theta)` is either surjective (`theta = 1`) or zero (`theta = -1`).
    pub fn in_one_plus_theta(&self, a: &[Q]) -> Result<bool> {
        if !self.has_torus() {
            let a = self.normalize(a);
            return Ok(self.elements()?.iter().any(|w| self.one_plus_theta(w) == a));
        }
        let n = self.rank();
        let mut finite = Vec::new();
        for i in 0..n {
            if self.orders[i] == 0 {
                let row = &self.theta[i];
                let diag_only = row.iter().enumerate().all(|(j, &t)| j == i || t == 0)
                    && (0..n).all(|j| j == i || self.theta[j][i] == 0);
                if !diag_only {
                    bail!(Unsupported, "theta mixes a torus coordinate with others");
                }
                match row[i] {
                    1 => {}
                    -1 => {
                        if !q_frac(&a[i]).is_zero() {
                            return Ok(false);
                        }
                    }
                    _ => bail!(Invalid, "theta is not an involution on a torus coordinate"),
                }
            } else {
                finite.push(i);
            }
        }
        let sub = CentralGroup {
            orders: finite.iter().map(|&i| self.orders[i]).collect(),
            theta: finite.iter().map(|&i| finite.iter().map(|&j| self.theta[i][j]).collect()).collect(),
            labels: finite.iter().map(|&i| self.labels[i].clone()).collect(),
        };
        let proj: Vec<Q> = finite.iter().map(|&i| a[i].clone()).collect();
        sub.in_one_plus_theta(&proj)
    }

    pub fn fixed_points(&self) -> Result<Vec<CElem>> {
        Ok(self.elements()?.into_iter().filter(|e| self.apply_theta(e) == *e).collect())
    }

    pub fn subgroup_generated(&self, gens: &[CElem]) -> BTreeSet<CElem> {
        let mut set: BTreeSet<CElem> = BTreeSet::new();
        set.insert(self.identity());
        loop {
            let mut grew = false;
            let cur: Vec<CElem> = set.iter().cloned().collect();
            for a in &cur {
                for g in gens {
                    let s = self.add(a, g);
                    if set.insert(s) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }
}

/// Exponent `1` as a one-coordinate element; used in tests and labels.
pub fn unit(n: usize, i: usize, den: u32) -> CElem {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one() / q(den as i64);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_group_basics() {
        let z4 = CentralGroup::new(vec![4], vec![vec![-1]]).unwrap();
        assert_eq!(z4.elements().unwrap().len(), 4);
        let g = unit(1, 0, 4);
        assert_eq!(z4.apply_theta(&g), vec![qr(3, 4)]);
        assert_eq!(z4.element_order(&g), 4);
        assert!(CentralGroup::new(vec![4], vec![vec![2]]).is_err());
    }

    #[test]
    fn one_plus_theta_membership() {
        let z2 = CentralGroup::new(vec![2], vec![vec![1]]).unwrap();
        assert!(z2.in_one_plus_theta(&[Q::zero()]).unwrap());
        assert!(!z2.in_one_plus_theta(&[qr(1, 2)]).unwrap());
        let t = CentralGroup::new(vec![0], vec![vec![1]]).unwrap();
        assert!(t.in_one_plus_theta(&[qr(1, 3)]).unwrap());
        let t = CentralGroup::new(vec![0], vec![vec![-1]]).unwrap();
        assert!(!t.in_one_plus_theta(&[qr(1, 2)]).unwrap());
    }
}
