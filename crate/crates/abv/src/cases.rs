//! Building parameter spaces from command-line style selectors, and the
//! list of catalog cases the shipped oracle tables cover.

use std::str::FromStr;

use abv_core::arith::Q;
use abv_core::geom_params::{build_parameter_space, levi_rho, weight, GeometricParameterSpace};
use abv_core::inner_class::{parse_z, EGroupInvariants, InnerClass};
use abv_core::lie_core::{Catalog, RootDatum, Weight};

use crate::{AppError, AppResult};

/// Group, inner class, `z` selector and infinitesimal character, all as text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Case {
    pub group: &'static str,
    pub inner_class: &'static str,
    pub z: &'static str,
    pub lambda: &'static str,
}

const fn case(group: &'static str, inner_class: &'static str, z: &'static str, lambda: &'static str) -> Case {
    Case { group, inner_class, z, lambda }
}

pub const CASES: &[Case] = &[
    case("SL2", "equal-rank", "1", "1"),
    case("SL2", "equal-rank", "1", "0"),
    case("PGL2", "equal-rank", "1", "1/2"),
    case("PGL2", "equal-rank", "-1", "1/2"),
    case("SL2xSL2", "equal-rank", "1", "1,1"),
    case("SL2xPGL2", "equal-rank", "1", "1,1/2"),
    case("SL2xGL1", "equal-rank", "1", "1,0"),
    case("SL2xGL1", "split", "1", "1,0"),
    case("torus(1)", "split", "1", "0"),
];

impl Case {
    pub fn space(&self) -> AppResult<GeometricParameterSpace> {
        build_space(&Catalog::builtin(), self.group, self.inner_class, self.z, Some(self.lambda))
    }
}

/// Comma separated rationals. An empty string is the zero weight.
pub fn parse_weight(text: &str, rank: usize) -> AppResult<Weight> {
    let t = text.trim();
    let coords: Vec<Q> = if t.is_empty() {
        vec![Q::from_integer(0.into()); rank]
    } else {
        t.split(',')
            .map(|c| Q::from_str(c.trim()).map_err(|_| AppError::Config(format!("bad rational `{}`", c.trim()))))
            .collect::<AppResult<_>>()?
    };
    if coords.len() != rank {
        return Err(AppError::Config(format!("weight `{t}` has {} coordinates, the group has rank {rank}", coords.len())));
    }
    Ok(weight(&coords))
}

/// Simple-root indices; `all` is every simple root, the empty string none.
pub fn parse_levi(text: &str, g: &RootDatum) -> AppResult<Vec<usize>> {
    let t = text.trim();
    if t == "all" || t == "G" {
        return Ok((0..g.simple.len()).collect());
    }
    if t.is_empty() || t == "T" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for p in t.split(',') {
        let i: usize = p.trim().parse().map_err(|_| AppError::Config(format!("bad simple root index `{p}`")))?;
        if i >= g.simple.len() {
            return Err(AppError::Config(format!("simple root index {i} out of range")));
        }
        out.push(i);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn rho(g: &RootDatum) -> AppResult<Weight> {
    Ok(levi_rho(g, &(0..g.simple.len()).collect::<Vec<_>>())?)
}

pub fn inner_class(catalog: &Catalog, group: &str, ic: &str) -> AppResult<InnerClass> {
    let d = catalog.build(group)?;
    Ok(InnerClass::named(&d, ic)?)
}

/// `lambda = None` means `rho`.
pub fn build_space(catalog: &Catalog, group: &str, ic: &str, z: &str, lambda: Option<&str>) -> AppResult<GeometricParameterSpace> {
    let ic = inner_class(catalog, group, ic)?;
    let zc = parse_z(&ic, z)?;
    let e = EGroupInvariants::new(&ic, zc)?;
    let lam = match lambda {
        Some(t) => parse_weight(t, ic.group.rank)?,
        None => rho(&ic.group)?,
    };
    Ok(build_parameter_space(&ic, &e, &lam)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_builds() {
        for c in CASES {
            let x = c.space().unwrap_or_else(|e| panic!("{c:?}: {e}"));
            assert!(x.n_orbits() > 0, "{c:?}");
        }
    }

    #[test]
    fn weights_and_levis() {
        assert_eq!(parse_weight("1/2, 1", 2).unwrap().coords[0], Q::new(1.into(), 2.into()));
        assert!(parse_weight("1", 2).is_err());
        assert!(parse_weight("x", 1).is_err());
        let g = Catalog::builtin().build("SL2xSL2").unwrap();
        assert_eq!(parse_levi("all", &g).unwrap(), vec![0, 1]);
        assert_eq!(parse_levi("1,0,1", &g).unwrap(), vec![0, 1]);
        assert!(parse_levi("", &g).unwrap().is_empty());
        assert_eq!(parse_levi("2", &g).unwrap_err().exit_code(), 2);
    }
}
