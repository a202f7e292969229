//! TOML catalog files.

use std::path::Path;

use abv_core::lie_core::Catalog;

use crate::{AppError, AppResult};

/// Read a catalog file. Entries shared with [`Catalog::builtin`] must agree with it.
pub fn load_catalog(path: &Path) -> AppResult<Catalog> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    parse_catalog(&text)
}

pub fn parse_catalog(text: &str) -> AppResult<Catalog> {
    let cat: Catalog = toml::from_str(text).map_err(|e| AppError::Config(format!("catalog: {e}")))?;
    let builtin = Catalog::builtin();
    for e in &cat.groups {
        if let Some(b) = builtin.get(&e.name) {
            if b != e {
                return Err(abv_core::Error::Catalog(format!("entry `{}` disagrees with the builtin catalog", e.name)).into());
            }
        }
    }
    Ok(cat)
}

pub fn catalog_toml(cat: &Catalog) -> AppResult<String> {
    toml::to_string(cat).map_err(|e| AppError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalog_is_builtin() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/catalog.toml");
        assert_eq!(load_catalog(&path).unwrap(), Catalog::builtin());
    }

    #[test]
    fn toml_round_trip() {
        let b = Catalog::builtin();
        assert_eq!(parse_catalog(&catalog_toml(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn conflicting_entry_is_rejected() {
        let text = "[[groups]]\nname = \"SL2\"\ncartan_type = \"A1\"\nrank = 1\nsimple_roots = [[1]]\nsimple_coroots = [[2]]\n";
        let err = parse_catalog(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
