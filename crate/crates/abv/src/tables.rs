//! Oracle table files: one JSON document per parameter space, schema
//! `abv-cctables/1`. `regen` writes them from the A1 oracle, `check`
//! re-derives and diffs.

use std::path::{Path, PathBuf};

use abv_core::arith::q_fmt;
use abv_core::cycles::{a1_block_oracle, CCTable};
use abv_core::geom_params::GeometricParameterSpace;
use serde::{Deserialize, Serialize};

use crate::cases::CASES;
use crate::{to_json, AppError, AppResult};

pub const SCHEMA: &str = "abv-cctables/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFile {
    pub schema: String,
    pub group: String,
    pub inner_class: String,
    /// `z` as displayed by the E-group tag.
    pub z: String,
    /// Dominant infinitesimal character.
    pub lambda: Vec<String>,
    pub tables: Vec<CCTable>,
}

fn key(x: &GeometricParameterSpace) -> (String, String, String, Vec<String>) {
    (x.group.clone(), x.inner_class.clone(), x.type_z.z.clone(), x.lambda.coords.iter().map(q_fmt).collect())
}

/// Oracle tables for every block the oracle covers. Blocks without an
/// oracle are left out; lookups then fail with `NoOracle`.
pub fn available_tables(x: &GeometricParameterSpace) -> Vec<CCTable> {
    x.blocks.iter().filter_map(|b| a1_block_oracle(x, &b.id).ok()).collect()
}

impl TableFile {
    pub fn from_space(x: &GeometricParameterSpace) -> Self {
        let (group, inner_class, z, lambda) = key(x);
        TableFile { schema: SCHEMA.into(), group, inner_class, z, lambda, tables: available_tables(x) }
    }

    pub fn matches(&self, x: &GeometricParameterSpace) -> bool {
        (self.group.clone(), self.inner_class.clone(), self.z.clone(), self.lambda.clone()) == key(x)
    }

    pub fn file_name(&self) -> String {
        let raw = format!("{}_{}_z{}_l{}", self.group, self.inner_class, self.z, self.lambda.join(","));
        let clean: String = raw
            .chars()
            .map(|c| match c {
                'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' | ',' => c,
                '/' => 'o',
                _ => '_',
            })
            .collect();
        format!("{clean}.json")
    }

    pub fn validate(&self) -> AppResult<()> {
        if self.schema != SCHEMA {
            return Err(AppError::Config(format!("schema `{}`, expected `{SCHEMA}`", self.schema)));
        }
        for t in &self.tables {
            if !t.hash_matches() {
                return Err(AppError::Config(format!("table {} fails its content hash", t.block)));
            }
        }
        Ok(())
    }
}

pub fn load(path: &Path) -> AppResult<TableFile> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    let f: TableFile = serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    f.validate()?;
    Ok(f)
}

/// Tables of the files that describe `x`.
pub fn tables_for(files: &[TableFile], x: &GeometricParameterSpace) -> Vec<CCTable> {
    files.iter().filter(|f| f.matches(x)).flat_map(|f| f.tables.iter().cloned()).collect()
}

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/tables")
}

pub fn regen(dir: &Path) -> AppResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::Config(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for c in CASES {
        let f = TableFile::from_space(&c.space()?);
        let p = dir.join(f.file_name());
        std::fs::write(&p, to_json(&f)?).map_err(|e| AppError::Config(format!("{}: {e}", p.display())))?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub file: String,
    pub ok: bool,
    pub detail: String,
}

/// Re-derive every case and compare with the file on disk, byte for byte.
pub fn check(dir: &Path) -> AppResult<Vec<CheckLine>> {
    let mut out = Vec::new();
    for c in CASES {
        let f = TableFile::from_space(&c.space()?);
        let name = f.file_name();
        let p = dir.join(&name);
        let line = match std::fs::read_to_string(&p) {
            Err(e) => CheckLine { file: name, ok: false, detail: format!("missing: {e}") },
            Ok(text) => {
                let fresh = to_json(&f)?;
                if text == fresh {
                    CheckLine { file: name, ok: true, detail: "identical".into() }
                } else {
                    let detail = match serde_json::from_str::<TableFile>(&text) {
                        Ok(old) => diff(&old, &f),
                        Err(e) => format!("unparsable: {e}"),
                    };
                    CheckLine { file: name, ok: false, detail }
                }
            }
        };
        out.push(line);
    }
    Ok(out)
}

fn diff(old: &TableFile, new: &TableFile) -> String {
    for t in &new.tables {
        match old.tables.iter().find(|o| o.block == t.block) {
            None => return format!("block {} missing", t.block),
            Some(o) if o != t => {
                for r in &t.rows {
                    for c in &t.cols {
                        if o.entry(r, c) != t.entry(r, c) {
                            return format!("block {} entry ({r}, {c}): {:?} vs {:?}", t.block, o.entry(r, c), t.entry(r, c));
                        }
                    }
                }
                return format!("block {} differs outside the entries", t.block);
            }
            _ => {}
        }
    }
    "formatting differs".into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_are_current() {
        for l in check(&default_dir()).unwrap() {
            assert!(l.ok, "{}: {}", l.file, l.detail);
        }
    }

    #[test]
    fn loaded_files_validate_and_match() {
        for c in CASES {
            let x = c.space().unwrap();
            let f = load(&default_dir().join(TableFile::from_space(&x).file_name())).unwrap();
            assert!(f.matches(&x));
            assert_eq!(tables_for(&[f], &x), available_tables(&x));
        }
    }

    #[test]
    fn tampered_table_is_rejected() {
        let x = CASES[0].space().unwrap();
        let mut f = TableFile::from_space(&x);
        f.tables[0].entries[0][0] += 1;
        assert!(f.validate().is_err());
    }
}
