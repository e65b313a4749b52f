//! Column layouts of every CSV the tool writes, and the figure
//! descriptions handed to the plotting scripts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, PartialEq, Eq)]
pub struct CsvSchema {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const KERNEL: CsvSchema = CsvSchema {
    name: "kernel",
    columns: &["r", "s", "K", "p", "phi"],
};

/// `lambda` is the nominal damping of the curve, 0 for values extrapolated
/// to `λ → 0`; `lambda_used` is the damping rate actually applied.
pub const KHAT: CsvSchema = CsvSchema {
    name: "khat",
    columns: &[
        "lambda",
        "k",
        "khat",
        "lambda_used",
        "truncation_bound",
        "periods_summed",
        "error_estimate",
        "status",
    ],
};

pub const PERIODS: CsvSchema = CsvSchema {
    name: "periods",
    columns: &["lambda", "k", "i", "r_i", "delta_numeric", "delta_estimate"],
};

/// `tail_numeric` is the magnitude of the neglected tail.
pub const TRUNCATION: CsvSchema = CsvSchema {
    name: "truncation",
    columns: &["lambda", "k", "I", "tail_numeric", "tail_estimate"],
};

pub const SOLVE: CsvSchema = CsvSchema {
    name: "solve",
    columns: &["r", "f", "g"],
};

/// A radial field as read by `solve --source table:PATH`.
pub const FIELD: CsvSchema = CsvSchema {
    name: "field",
    columns: &["r", "value"],
};

/// A symbol table as read by `solve --table PATH`.
pub const SYMBOL_TABLE: CsvSchema = CsvSchema {
    name: "symbol_table",
    columns: &["k", "khat"],
};

pub const ALL: &[&CsvSchema] = &[&KERNEL, &KHAT, &PERIODS, &TRUNCATION, &SOLVE, &FIELD, &SYMBOL_TABLE];

/// Figure files written by `khat --figures`, with their layouts.
pub const FIGURE_FILES: &[(&str, &CsvSchema)] = &[
    ("fig1_khat", &KHAT),
    ("fig1_phi", &KERNEL),
    ("fig2_khat_lambda", &KHAT),
    ("fig2_dk_periods", &PERIODS),
    ("fig3_dk_compare", &PERIODS),
    ("fig3_truncation", &TRUNCATION),
    ("fig4_khat_bounds", &KHAT),
    ("fig4_phi", &KERNEL),
];

pub fn figure_schema(stem: &str) -> Option<&'static CsvSchema> {
    FIGURE_FILES.iter().find(|(s, _)| *s == stem).map(|(_, c)| *c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Overlay {
    /// `coefficient · x^exponent`, drawn over the range of the data.
    PowerLaw {
        coefficient: f64,
        exponent: f64,
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub name: String,
    pub title: String,
    /// CSV files, relative to the directory holding `figures.json`.
    pub inputs: Vec<PathBuf>,
    pub x: String,
    pub y: Vec<String>,
    /// One curve per distinct value of this column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_by: Option<String>,
    pub x_scale: Scale,
    pub y_scale: Scale,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    /// Image path, relative to the output directory of the renderer.
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FigureError {
    #[error("{figure}: input {} does not exist", path.display())]
    MissingInput { figure: String, path: PathBuf },
    #[error("{figure}: {} has no column `{column}`", path.display())]
    MissingColumn {
        figure: String,
        path: PathBuf,
        column: String,
    },
    #[error("{figure}: {} has no data rows", path.display())]
    Empty { figure: String, path: PathBuf },
    #[error("{figure}: {} is unreadable: {message}", path.display())]
    Unreadable {
        figure: String,
        path: PathBuf,
        message: String,
    },
    #[error("{figure}: a figure needs at least one input and one y column")]
    Incomplete { figure: String },
}

impl FigureSpec {
    pub fn columns(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.x.as_str())
            .chain(self.y.iter().map(String::as_str))
            .chain(self.group_by.as_deref())
    }

    /// Every input exists, has a data row and holds the named columns.
    pub fn validate(&self, base: &Path) -> Result<(), FigureError> {
        let figure = self.name.clone();
        if self.inputs.is_empty() || self.y.is_empty() {
            return Err(FigureError::Incomplete { figure });
        }
        for input in &self.inputs {
            let path = base.join(input);
            if !path.is_file() {
                return Err(FigureError::MissingInput { figure, path });
            }
            let unreadable = |e: csv::Error| FigureError::Unreadable {
                figure: figure.clone(),
                path: path.clone(),
                message: e.to_string(),
            };
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_path(&path)
                .map_err(unreadable)?;
            let headers = reader.headers().map_err(unreadable)?.clone();
            if let Some(column) = self.columns().find(|c| !headers.iter().any(|h| h == *c)) {
                return Err(FigureError::MissingColumn {
                    figure,
                    path,
                    column: column.to_string(),
                });
            }
            if reader.records().next().is_none() {
                return Err(FigureError::Empty { figure, path });
            }
        }
        Ok(())
    }
}

fn khat_envelope(s: &[f64]) -> Vec<Overlay> {
    s.iter()
        .map(|&s| Overlay::PowerLaw {
            coefficient: 1.0,
            exponent: -2.0 * s,
            label: format!("k^(-2*{s})"),
        })
        .collect()
}

fn phi_envelope(s: &[f64]) -> Vec<Overlay> {
    s.iter()
        .filter_map(|&s| {
            let k = vofl_core::kernel::kernel_constant_order(s, 3, 1.0).ok()?;
            Some(Overlay::PowerLaw {
                coefficient: -k,
                exponent: 2.0 * s - 3.0,
                label: format!("constant order s = {s}"),
            })
        })
        .collect()
}

/// Descriptions of the figures built from the `khat --figures` files.
pub fn figure_specs() -> Vec<FigureSpec> {
    let spec = |name: &str, title: &str, x: &str, y: &[&str], group: Option<&str>, scales: (Scale, Scale)| FigureSpec {
        name: name.to_string(),
        title: title.to_string(),
        inputs: vec![PathBuf::from(format!("{name}.csv"))],
        x: x.to_string(),
        y: y.iter().map(|c| c.to_string()).collect(),
        group_by: group.map(str::to_string),
        x_scale: scales.0,
        y_scale: scales.1,
        overlays: Vec::new(),
        output: PathBuf::from(format!("{name}.png")),
    };
    use Scale::{Linear, Log};
    vec![
        FigureSpec {
            overlays: khat_envelope(&[0.6, 0.9]),
            ..spec("fig1_khat", "Example 1: transformed kernel", "k", &["khat"], None, (Log, Log))
        },
        FigureSpec {
            overlays: phi_envelope(&[0.6, 0.9]),
            ..spec("fig1_phi", "Example 1: Green's function", "r", &["phi"], None, (Log, Linear))
        },
        FigureSpec {
            overlays: khat_envelope(&[1.1, 1.3]),
            ..spec(
                "fig2_khat_lambda",
                "Example 2: regularized transform for several lambda",
                "k",
                &["khat"],
                Some("lambda"),
                (Log, Log),
            )
        },
        spec(
            "fig2_dk_periods",
            "Example 2: per-period contributions at k = 5",
            "i",
            &["delta_numeric"],
            Some("lambda"),
            (Linear, Linear),
        ),
        spec(
            "fig3_dk_compare",
            "Per-period contribution: numeric and estimate",
            "i",
            &["delta_numeric", "delta_estimate"],
            None,
            (Linear, Linear),
        ),
        spec(
            "fig3_truncation",
            "Truncation error: numeric and estimate",
            "I",
            &["tail_numeric", "tail_estimate"],
            None,
            (Log, Log),
        ),
        FigureSpec {
            overlays: khat_envelope(&[1.1, 1.3]),
            ..spec(
                "fig4_khat_bounds",
                "Example 2: transformed kernel and constant-order bounds",
                "k",
                &["khat"],
                None,
                (Log, Log),
            )
        },
        FigureSpec {
            overlays: phi_envelope(&[1.1, 1.3]),
            ..spec("fig4_phi", "Example 2: Green's function", "r", &["phi"], None, (Log, Linear))
        },
    ]
}
