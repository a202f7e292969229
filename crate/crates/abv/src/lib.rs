//! File formats, cached oracle tables and the `abv` command line on top of
//! [`abv_core`].

pub mod cases;
pub mod catalog;
pub mod cli;
pub mod tables;

pub use abv_core;

/// Errors of the std layer. Exit codes follow [`AppError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] abv_core::Error),
    #[error("config error: {0}")]
    Config(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    /// 2 config, 3 missing oracle, 4 precondition, 5 incomplete geometry.
    pub fn exit_code(&self) -> i32 {
        use abv_core::Error as E;
        match self {
            AppError::Config(_) => 2,
            AppError::Core(e) => match e {
                E::Catalog(_) | E::Invalid(_) => 2,
                E::NoOracle(_) => 3,
                E::Precondition(_) | E::Existence(_) | E::Domain(_) => 4,
                E::Unsupported(_) | E::Incomplete(_) => 5,
            },
        }
    }
}

/// Pretty JSON with a trailing newline. Field order is declaration order and
/// maps are `BTreeMap`s, so equal values give equal bytes.
pub fn to_json<T: serde::Serialize>(v: &T) -> AppResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| AppError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
