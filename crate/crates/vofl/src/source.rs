//! Poisson sources: `gaussian(SIGMA[, MASS])`, `plummer(A[, MASS])` or
//! `table:PATH`, a CSV with columns `r, value`.

use std::path::{Path, PathBuf};

use vofl_core::spectral::{GaussianSource, PlummerSource};
use vofl_core::RadialField;

use crate::error::{CliError, CliResult};
use crate::files::read_columns;
use crate::schema::FIELD;

#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Gaussian { sigma: f64, mass: f64 },
    Plummer { a: f64, mass: f64 },
    Table(PathBuf),
}

impl SourceSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix("table:") {
            if path.is_empty() {
                return Err("table source has an empty path".into());
            }
            return Ok(SourceSpec::Table(PathBuf::from(path)));
        }
        let (name, args) = text
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(|| format!("unknown source `{text}`; expected gaussian(SIGMA, MASS), plummer(A, MASS) or table:PATH"))?;
        let args: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| format!("source argument `{}` is not a number", a.trim())))
            .collect::<Result<_, _>>()?;
        let (scale, mass) = match args[..] {
            [x] => (x, 1.0),
            [x, m] => (x, m),
            _ => return Err(format!("{name} takes one or two arguments, got {}", args.len())),
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(SourceSpec::Gaussian { sigma: scale, mass }),
            "plummer" => Ok(SourceSpec::Plummer { a: scale, mass }),
            other => Err(format!("unknown source family `{other}`")),
        }
    }

    pub fn relative_to(self, base: &Path) -> Self {
        match self {
            SourceSpec::Table(p) if p.is_relative() => SourceSpec::Table(base.join(p)),
            other => other,
        }
    }

    /// The source as a field. Named families are sampled on `grid`; a table
    /// brings its own grid.
    pub fn field(&self, grid: &[f64]) -> CliResult<RadialField> {
        let bad = |e| CliError::core("source", e);
        match *self {
            SourceSpec::Gaussian { sigma, mass } => {
                RadialField::sample(&GaussianSource::new(sigma, mass).map_err(bad)?, grid).map_err(bad)
            }
            SourceSpec::Plummer { a, mass } => Ok(RadialField::sample(&PlummerSource::new(a, mass).map_err(bad)?, grid)
                .map_err(bad)?
                .with_tail(Some(-5.0))),
            SourceSpec::Table(ref path) => {
                let cols = read_columns(path, FIELD.columns)?;
                let [r, v]: [Vec<f64>; 2] = cols.try_into().expect("two columns requested");
                RadialField::new(r, v).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
            }
        }
    }
}

impl std::fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceSpec::Gaussian { sigma, mass } => write!(f, "gaussian({sigma}, {mass})"),
            SourceSpec::Plummer { a, mass } => write!(f, "plummer({a}, {mass})"),
            SourceSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        assert_eq!(
            SourceSpec::parse("gaussian(1, 2)").unwrap(),
            SourceSpec::Gaussian { sigma: 1.0, mass: 2.0 }
        );
        assert_eq!(SourceSpec::parse("Plummer(0.5)").unwrap(), SourceSpec::Plummer { a: 0.5, mass: 1.0 });
        assert_eq!(SourceSpec::parse("table:g.csv").unwrap(), SourceSpec::Table("g.csv".into()));
        for bad in ["gaussian", "gaussian()", "gaussian(1,2,3)", "cauchy(1)", "table:", "gaussian(x)"] {
            assert!(SourceSpec::parse(bad).is_err(), "{bad}");
        }
        let s = SourceSpec::parse("gaussian(0.5, 3)").unwrap();
        assert_eq!(SourceSpec::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn bad_parameters_are_config_errors() {
        let err = SourceSpec::Gaussian { sigma: -1.0, mass: 1.0 }.field(&[1.0]).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::CONFIG);
    }

    #[test]
    fn missing_table_is_an_io_error() {
        let err = SourceSpec::Table("/nonexistent/g.csv".into()).field(&[]).unwrap_err();
        assert!(matches!(err, CliError::Io { .. }));
    }
}
