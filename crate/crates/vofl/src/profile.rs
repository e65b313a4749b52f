//! Order profiles named on the command line or in a config file.
//!
//! String forms:
//!
//! ```text
//! example1 | example2
//! constant:S[:N]
//! moebius:NUM0,NUM1,DEN[:N]
//! tabulated:S_INF:PATH        (CSV with columns r, s; n = 3)
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vofl_core::{make_example1, make_example2, ExponentProfile};

use crate::error::{CliError, CliResult};
use crate::files::read_columns;

const DEFAULT_N: u32 = 3;

fn default_n() -> u32 {
    DEFAULT_N
}

/// Table form of a profile in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileTable {
    Example1,
    Example2,
    Constant {
        s: f64,
        #[serde(default = "default_n")]
        n: u32,
    },
    Moebius {
        num0: f64,
        num1: f64,
        den: f64,
        #[serde(default = "default_n")]
        n: u32,
    },
    Tabulated {
        path: PathBuf,
        s_at_infinity: f64,
        #[serde(default = "default_n")]
        n: u32,
    },
}

/// A profile before any file it names has been read.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub table: ProfileTable,
    /// The text the profile was given as, kept for provenance.
    pub source: String,
}

impl ProfileSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        let table = match (head.to_ascii_lowercase().as_str(), rest) {
            ("example1", None) => ProfileTable::Example1,
            ("example2", None) => ProfileTable::Example2,
            ("constant", Some(rest)) => {
                let (s, n) = split_dimension(rest)?;
                ProfileTable::Constant { s: number(s, "s")?, n }
            }
            ("moebius", Some(rest)) => {
                let (coeffs, n) = split_dimension(rest)?;
                let c: Vec<&str> = coeffs.split(',').collect();
                if c.len() != 3 {
                    return Err(format!("moebius needs three coefficients NUM0,NUM1,DEN, got `{coeffs}`"));
                }
                ProfileTable::Moebius {
                    num0: number(c[0], "num0")?,
                    num1: number(c[1], "num1")?,
                    den: number(c[2], "den")?,
                    n,
                }
            }
            ("tabulated", Some(rest)) => {
                let (s_inf, path) = rest
                    .split_once(':')
                    .ok_or_else(|| "tabulated profiles are written tabulated:S_INF:PATH".to_string())?;
                if path.is_empty() {
                    return Err("tabulated profile has an empty path".into());
                }
                ProfileTable::Tabulated {
                    path: PathBuf::from(path),
                    s_at_infinity: number(s_inf, "s_at_infinity")?,
                    n: DEFAULT_N,
                }
            }
            _ => {
                return Err(format!(
                    "unknown profile `{text}`; expected example1, example2, constant:S[:N], \
                     moebius:NUM0,NUM1,DEN[:N] or tabulated:S_INF:PATH"
                ))
            }
        };
        Ok(Self {
            table,
            source: text.to_string(),
        })
    }

    pub fn from_table(table: ProfileTable) -> Self {
        let source = match &table {
            ProfileTable::Example1 => "example1".to_string(),
            ProfileTable::Example2 => "example2".to_string(),
            ProfileTable::Constant { s, n } => format!("constant:{s}:{n}"),
            ProfileTable::Moebius { num0, num1, den, n } => format!("moebius:{num0},{num1},{den}:{n}"),
            ProfileTable::Tabulated { path, s_at_infinity, .. } => {
                format!("tabulated:{s_at_infinity}:{}", path.display())
            }
        };
        Self { table, source }
    }

    /// Resolves relative table paths against `base`.
    pub fn relative_to(mut self, base: &Path) -> Self {
        if let ProfileTable::Tabulated { path, .. } = &mut self.table {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        self
    }

    /// Builds the profile and checks that it is admissible.
    pub fn build(&self) -> CliResult<ExponentProfile> {
        let profile = match &self.table {
            ProfileTable::Example1 => make_example1(),
            ProfileTable::Example2 => make_example2(),
            ProfileTable::Constant { s, n } => ExponentProfile::constant(*s, *n),
            ProfileTable::Moebius { num0, num1, den, n } => ExponentProfile::moebius(*num0, *num1, *den, *n),
            ProfileTable::Tabulated { path, s_at_infinity, n } => {
                let cols = read_columns(path, &["r", "s"])?;
                let [r, s]: [Vec<f64>; 2] = cols.try_into().expect("two columns requested");
                ExponentProfile::tabulated(r, s, *s_at_infinity, *n)
                    .map_err(|e| CliError::config(format!("profile table {}: {e}", path.display())))?
            }
        };
        profile
            .validate()
            .map_err(|v| CliError::config(format!("profile `{}` is not admissible: {v}", self.source)))?;
        Ok(profile)
    }
}

fn split_dimension(text: &str) -> Result<(&str, u32), String> {
    match text.split_once(':') {
        Some((body, n)) => {
            let n = n
                .trim()
                .parse()
                .map_err(|_| format!("dimension `{n}` is not a positive integer"))?;
            Ok((body, n))
        }
        None => Ok((text, DEFAULT_N)),
    }
}

fn number(text: &str, what: &str) -> Result<f64, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("{what} = `{}` is not a number", text.trim()))
}
