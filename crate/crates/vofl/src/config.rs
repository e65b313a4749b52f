//! Run configuration: built-in defaults, then a TOML file, then flags.
//!
//! ```toml
//! profile = "example2"      # or { form = "moebius", num0 = 11, num1 = 13, den = 10 }
//! out = "out"
//! format = "csv"
//!
//! [k_grid]
//! min = 0.05
//! max = 20.0
//! count = 100
//! spacing = "log"
//!
//! [regularization]
//! lambda_sequence = [0.2, 0.1, 0.05, 0.025]
//! fixed = [0.2, 0.1, 0.05]  # report these curves instead of extrapolating
//!
//! [trace]
//! k = 5.0
//! periods = 200
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;
use vofl_core::sinexform::{Extrapolation, LambdaScaling};
use vofl_core::RegularizationPolicy;

use crate::error::{CliError, CliResult};
use crate::files::Format;
use crate::profile::{ProfileSpec, ProfileTable};
use crate::source::SourceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub const fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("count must be at least 1".into());
        }
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite()) {
            return Err(format!("bounds must be positive and finite, got [{}, {}]", self.min, self.max));
        }
        if self.min >= self.max {
            return Err(format!("min must be below max, got [{}, {}]", self.min, self.max));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => vofl_core::log_grid(self.min, self.max, self.count),
            Spacing::Linear => vofl_core::linear_grid(self.min, self.max, self.count),
        }
    }
}

/// A value together with where it came from, for error messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Located<T> {
    pub value: T,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Flag(&'static str),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Default => write!(f, "built-in default"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag(flag) => write!(f, "{flag}"),
        }
    }
}

impl<T> Located<T> {
    fn default(value: T) -> Self {
        Self {
            value,
            origin: Origin::Default,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegularizationFile {
    lambda_sequence: Option<Vec<f64>>,
    extrapolation: Option<Extrapolation>,
    lambda_scaling: Option<LambdaScaling>,
    period_budget: Option<usize>,
    tail_tolerance: Option<f64>,
    fixed: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    k: Option<f64>,
    periods: Option<usize>,
    truncation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveFile {
    source: Option<Spanned<String>>,
    table: Option<PathBuf>,
    table_per_decade: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateFile {
    quick: Option<bool>,
    example2: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    profile: Option<Spanned<toml::Value>>,
    out: Option<PathBuf>,
    format: Option<Format>,
    k_grid: Option<Spanned<GridSpec>>,
    r_grid: Option<Spanned<GridSpec>>,
    regularization: Option<Spanned<RegularizationFile>>,
    trace: Option<Spanned<TraceFile>>,
    solve: Option<SolveFile>,
    validate: Option<ValidateFile>,
}

/// Values given on the command line; each replaces the file setting.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Overrides {
    pub profile: Option<String>,
    pub kmin: Option<f64>,
    pub kmax: Option<f64>,
    pub knum: Option<usize>,
    pub rmin: Option<f64>,
    pub rmax: Option<f64>,
    pub rnum: Option<usize>,
    pub lambda: Option<Vec<f64>>,
    pub trace_k: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub source: Option<String>,
    pub table: Option<PathBuf>,
    pub quick: bool,
    pub example2: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub profile: Located<ProfileSpec>,
    /// Unset grids take a per-command default.
    pub k_grid: Option<Located<GridSpec>>,
    pub r_grid: Option<Located<GridSpec>>,
    pub policy: Located<RegularizationPolicy>,
    /// Fixed damping values reported without extrapolation.
    pub fixed_lambdas: Option<Located<Vec<f64>>>,
    pub trace_k: Option<f64>,
    pub trace_periods: usize,
    pub truncation_periods: Vec<usize>,
    pub source: Option<Located<String>>,
    pub table: Option<PathBuf>,
    pub table_per_decade: usize,
    k_flags: GridFlags,
    r_flags: GridFlags,
    pub out: PathBuf,
    pub format: Format,
    pub quick: bool,
    pub example2: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: Located::default(ProfileSpec::from_table(ProfileTable::Example1)),
            k_grid: None,
            r_grid: None,
            policy: Located::default(RegularizationPolicy::default()),
            fixed_lambdas: None,
            trace_k: None,
            trace_periods: 200,
            truncation_periods: (1..=20).map(|i| 10 * i).collect(),
            source: None,
            table: None,
            table_per_decade: 20,
            k_flags: GridFlags::default(),
            r_flags: GridFlags::default(),
            out: PathBuf::from("out"),
            format: Format::Csv,
            quick: false,
            example2: false,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl RunConfig {
    /// Defaults, then `file` when given, then `overrides`.
    pub fn load(file: Option<&Path>, overrides: &Overrides) -> CliResult<Self> {
        let mut config = RunConfig::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            config.merge_file(path, &text)?;
        }
        config.apply(overrides)?;
        config.check()?;
        Ok(config)
    }

    pub fn from_toml(path: &Path, text: &str) -> CliResult<Self> {
        let mut config = RunConfig::default();
        config.merge_file(path, text)?;
        config.check()?;
        Ok(config)
    }

    fn merge_file(&mut self, path: &Path, text: &str) -> CliResult<()> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| line_of(text, s.start));
            CliError::config(format!("{}:{line}: {}", path.display(), e.message().trim()))
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let at = |span: std::ops::Range<usize>| Origin::File {
            path: path.to_path_buf(),
            line: line_of(text, span.start),
        };
        if let Some(p) = file.profile {
            let origin = at(p.span());
            let spec = match p.into_inner() {
                toml::Value::String(s) => ProfileSpec::parse(&s),
                value @ toml::Value::Table(_) => value
                    .try_into::<ProfileTable>()
                    .map(ProfileSpec::from_table)
                    .map_err(|e| e.message().trim().to_string()),
                other => Err(format!("profile must be a string or a table, got {}", other.type_str())),
            }
            .map_err(|e| CliError::config(format!("{origin}: profile: {e}")))?;
            self.profile = Located {
                value: spec.relative_to(base),
                origin,
            };
        }
        if let Some(out) = file.out {
            self.out = base.join(out);
        }
        if let Some(f) = file.format {
            self.format = f;
        }
        if let Some(g) = file.k_grid {
            self.k_grid = Some(Located {
                origin: at(g.span()),
                value: g.into_inner(),
            });
        }
        if let Some(g) = file.r_grid {
            self.r_grid = Some(Located {
                origin: at(g.span()),
                value: g.into_inner(),
            });
        }
        if let Some(reg) = file.regularization {
            let origin = at(reg.span());
            let reg = reg.into_inner();
            let p = &mut self.policy.value;
            if let Some(l) = reg.lambda_sequence {
                p.lambda_sequence = l;
            }
            if let Some(e) = reg.extrapolation {
                p.extrapolation = e;
            }
            if let Some(s) = reg.lambda_scaling {
                p.lambda_scaling = s;
            }
            if let Some(b) = reg.period_budget {
                p.period_budget = b;
            }
            if let Some(t) = reg.tail_tolerance {
                p.tail_tolerance = t;
            }
            self.policy.origin = origin.clone();
            if let Some(fixed) = reg.fixed {
                self.fixed_lambdas = Some(Located { value: fixed, origin });
            }
        }
        if let Some(trace) = file.trace {
            let origin = at(trace.span());
            let trace = trace.into_inner();
            self.trace_k = trace.k.or(self.trace_k);
            if let Some(n) = trace.periods {
                if n == 0 {
                    return Err(CliError::config(format!("{origin}: trace: periods must be at least 1")));
                }
                self.trace_periods = n;
            }
            if let Some(t) = trace.truncation {
                if t.is_empty() || t.contains(&0) {
                    return Err(CliError::config(format!(
                        "{origin}: trace: truncation needs a nonempty list of positive period counts"
                    )));
                }
                self.truncation_periods = t;
            }
        }
        if let Some(solve) = file.solve {
            if let Some(s) = solve.source {
                self.source = Some(Located {
                    origin: at(s.span()),
                    value: s.into_inner(),
                });
            }
            if let Some(t) = solve.table {
                self.table = Some(base.join(t));
            }
            if let Some(n) = solve.table_per_decade {
                self.table_per_decade = n;
            }
        }
        if let Some(v) = file.validate {
            self.quick = v.quick.unwrap_or(self.quick);
            self.example2 = v.example2.unwrap_or(self.example2);
        }
        Ok(())
    }

    fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        if let Some(p) = &o.profile {
            let spec = ProfileSpec::parse(p).map_err(|e| CliError::config(format!("--profile: {e}")))?;
            self.profile = Located {
                value: spec,
                origin: Origin::Flag("--profile"),
            };
        }
        self.k_flags = GridFlags {
            min: o.kmin,
            max: o.kmax,
            count: o.knum,
        };
        self.r_flags = GridFlags {
            min: o.rmin,
            max: o.rmax,
            count: o.rnum,
        };
        if let Some(l) = &o.lambda {
            self.fixed_lambdas = Some(Located {
                value: l.clone(),
                origin: Origin::Flag("--lambda"),
            });
        }
        self.trace_k = o.trace_k.or(self.trace_k);
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        self.format = o.format.unwrap_or(self.format);
        if let Some(s) = &o.source {
            self.source = Some(Located {
                value: s.clone(),
                origin: Origin::Flag("--source"),
            });
        }
        if let Some(t) = &o.table {
            self.table = Some(t.clone());
        }
        self.quick |= o.quick;
        self.example2 |= o.example2;
        Ok(())
    }

    fn check(&self) -> CliResult<()> {
        // a grid adjusted by flags is checked once resolved
        let grids = [("k_grid", &self.k_grid, &self.k_flags), ("r_grid", &self.r_grid, &self.r_flags)];
        for (name, grid, flags) in grids {
            if let Some(g) = grid.as_ref().filter(|_| *flags == GridFlags::default()) {
                g.value
                    .check()
                    .map_err(|e| CliError::config(format!("{}: {name}: {e}", g.origin)))?;
            }
        }
        self.policy
            .value
            .validate()
            .map_err(|e| CliError::config(format!("{}: regularization: {e}", self.policy.origin)))?;
        if let Some(l) = &self.fixed_lambdas {
            if l.value.is_empty() || l.value.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(CliError::config(format!(
                    "{}: fixed damping values must be a nonempty list of finite numbers >= 0",
                    l.origin
                )));
            }
        }
        if let Some(k) = self.trace_k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(CliError::config(format!("trace: k must be positive, got {k}")));
            }
        }
        if self.table_per_decade < 2 {
            return Err(CliError::config("solve: table_per_decade must be at least 2"));
        }
        Ok(())
    }

    /// The k-grid: `default`, replaced by the file, adjusted by flags.
    pub fn k_grid(&self, default: GridSpec) -> CliResult<GridSpec> {
        resolve_grid(default, self.k_grid.as_ref(), &self.k_flags, "k_grid", "--kmin/--kmax/--knum")
    }

    pub fn r_grid(&self, default: GridSpec) -> CliResult<GridSpec> {
        resolve_grid(default, self.r_grid.as_ref(), &self.r_flags, "r_grid", "--rmin/--rmax/--rnum")
    }

    pub fn source_spec(&self) -> CliResult<Option<SourceSpec>> {
        let Some(s) = &self.source else { return Ok(None) };
        let spec = SourceSpec::parse(&s.value).map_err(|e| CliError::config(format!("{}: source: {e}", s.origin)))?;
        Ok(Some(match &s.origin {
            Origin::File { path, .. } => spec.relative_to(path.parent().unwrap_or(Path::new(""))),
            _ => spec,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct GridFlags {
    min: Option<f64>,
    max: Option<f64>,
    count: Option<usize>,
}

fn resolve_grid(
    default: GridSpec,
    file: Option<&Located<GridSpec>>,
    flags: &GridFlags,
    name: &str,
    flag_names: &'static str,
) -> CliResult<GridSpec> {
    let (mut grid, mut origin) = match file {
        Some(g) => (g.value, g.origin.clone()),
        None => (default, Origin::Default),
    };
    if *flags != GridFlags::default() {
        grid.min = flags.min.unwrap_or(grid.min);
        grid.max = flags.max.unwrap_or(grid.max);
        grid.count = flags.count.unwrap_or(grid.count);
        origin = Origin::Flag(flag_names);
    }
    grid.check().map_err(|e| CliError::config(format!("{origin}: {name}: {e}")))?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<RunConfig> {
        RunConfig::from_toml(Path::new("run.toml"), text)
    }

    #[test]
    fn defaults() {
        let c = parse("").unwrap();
        assert_eq!(c.profile.value.table, ProfileTable::Example1);
        assert_eq!(c.policy.value, RegularizationPolicy::default());
        assert_eq!(c.format, Format::Csv);
        assert!(c.k_grid.is_none());
    }

    #[test]
    fn full_file() {
        let c = parse(
            r#"
profile = { form = "moebius", num0 = 11, num1 = 13, den = 10 }
format = "json"
out = "results"

[k_grid]
min = 0.1
max = 10
count = 5
spacing = "linear"

[regularization]
lambda_sequence = [0.4, 0.2, 0.1]
lambda_scaling = "relative_to_k"
fixed = [0.1]

[trace]
k = 5
periods = 50
truncation = [5, 10]

[solve]
source = "gaussian(1, 1)"
table_per_decade = 8

[validate]
quick = true
"#,
        )
        .unwrap();
        assert_eq!(
            c.profile.value.table,
            ProfileTable::Moebius {
                num0: 11.0,
                num1: 13.0,
                den: 10.0,
                n: 3
            }
        );
        assert_eq!(c.profile.origin, Origin::File { path: "run.toml".into(), line: 2 });
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.out, PathBuf::from("results"));
        assert_eq!(c.k_grid.as_ref().unwrap().value.points(), vec![0.1, 2.575, 5.05, 7.525, 10.0]);
        assert_eq!(c.policy.value.lambda_scaling, LambdaScaling::RelativeToK);
        assert_eq!(c.policy.value.lambda_sequence, vec![0.4, 0.2, 0.1]);
        assert_eq!(c.fixed_lambdas.unwrap().value, vec![0.1]);
        assert_eq!((c.trace_k, c.trace_periods), (Some(5.0), 50));
        assert_eq!(c.truncation_periods, vec![5, 10]);
        assert_eq!(c.table_per_decade, 8);
        assert!(c.quick && !c.example2);
    }

    fn error(text: &str) -> String {
        let e = parse(text).unwrap_err();
        assert_eq!(e.exit_code(), crate::error::exit::CONFIG);
        e.to_string()
    }

    #[test]
    fn errors_carry_lines() {
        let e = error("format = \"csv\"\n\n[k_grid]\nmin = 2\nmax = 1\ncount = 3\n");
        assert!(e.starts_with("run.toml:3: k_grid: min must be below max"), "{e}");
        let e = error("[k_grid]\nmin = 1\nmax = 2\ncount = 3\nspace = 1\n");
        assert!(e.starts_with("run.toml:"), "{e}");
        assert!(e.contains("unknown field `space`"), "{e}");
        let e = error("\nprofile = \"moebius:1,2\"\n");
        assert!(e.starts_with("run.toml:2: profile:"), "{e}");
        let e = error("profile = { form = \"constant\" }\n");
        assert!(e.contains("missing field `s`"), "{e}");
        let e = error("[regularization]\nlambda_sequence = []\n");
        assert!(e.starts_with("run.toml:1: regularization:"), "{e}");
        let e = error("x = [\n");
        assert!(e.starts_with("run.toml:"), "{e}");
    }

    #[test]
    fn flags_override_the_file() {
        let mut c = parse("profile = \"example2\"\n[k_grid]\nmin = 0.1\nmax = 10\ncount = 5\n").unwrap();
        c.apply(&Overrides {
            profile: Some("constant:0.5".into()),
            knum: Some(7),
            format: Some(Format::Json),
            ..Default::default()
        })
        .unwrap();
        c.check().unwrap();
        assert_eq!(c.profile.value.table, ProfileTable::Constant { s: 0.5, n: 3 });
        let g = c.k_grid(GridSpec::log(1.0, 2.0, 3)).unwrap();
        assert_eq!((g.min, g.max, g.count), (0.1, 10.0, 7));
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn grid_flags_adjust_the_command_default() {
        let mut c = RunConfig::load(None, &Overrides {
            kmin: Some(0.5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(c.k_grid(GridSpec::log(0.1, 10.0, 4)).unwrap(), GridSpec::log(0.5, 10.0, 4));
        assert_eq!(c.r_grid(GridSpec::log(0.1, 10.0, 4)).unwrap(), GridSpec::log(0.1, 10.0, 4));
        c.k_flags.min = Some(20.0);
        let e = c.k_grid(GridSpec::log(0.1, 10.0, 4)).unwrap_err().to_string();
        assert!(e.starts_with("--kmin/--kmax/--knum: k_grid: min must be below max"), "{e}");
    }
}
