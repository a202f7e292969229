//! Exact combinatorial engine for K-orbits on flag varieties, geometric
//! parameter spaces of small dual groups, characteristic-cycle bookkeeping
//! and micro-packets.
//!
//! Everything is exact: rationals for weights and `Q(zeta_8)` for the matrix
//! models. The geometry backend handles groups whose root datum splits into
//! rank-one factors (tori, `SL2`, `PGL2` and products of these).

#![no_std]

extern crate alloc;

pub mod arith;
pub mod cycles;
pub mod flag_orbits;
pub mod geom_params;
pub mod groups;
pub mod inner_class;
pub mod lie_core;
pub mod model;
pub mod packets;

use alloc::string::String;

/// Every fallible operation reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no oracle: {0}")]
    NoOracle(String),
    #[error("incomplete geometry: {0}")]
    Incomplete(String),
    #[error("existence error: {0}")]
    Existence(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
