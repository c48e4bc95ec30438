//! CSV and JSON encodings of coefficient vectors, pyramids, refinement
//! matrices and lifting schemes.
//!
//! CSV numbers carry 17 significant digits. JSON numbers use the shortest
//! representation from `serde_json`. Both read back bitwise identical.

use bbw_core::linalg::BandColumns;
use bbw_core::{CoefficientPyramid, LevelPlan, SchemeKind, StepKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text with a header row.
pub fn csv_table<I>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(number).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Single-column coefficient file. Blank lines are skipped and a
/// non-numeric first line is taken as a header.
pub fn read_vector(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => {
                return Err(CliError::Input(format!("line {}: non-finite value", n + 1)));
            }
            Err(_) if n == 0 => {}
            Err(_) => {
                return Err(CliError::Input(format!(
                    "line {}: cannot parse {cell:?} as a number",
                    n + 1
                )));
            }
        }
    }
    Ok(out)
}

pub fn write_vector(name: &str, values: &[f64]) -> String {
    csv_table(&[name.to_string()], values.iter().map(|v| vec![*v]))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PyramidJson {
    coarse: Vec<f64>,
    details: Vec<Vec<f64>>,
}

pub fn pyramid_to_json(p: &CoefficientPyramid) -> String {
    let j = PyramidJson {
        coarse: p.coarse.clone(),
        details: p.details.clone(),
    };
    serde_json::to_string_pretty(&j).expect("plain numbers serialize") + "\n"
}

/// Flat CSV: coarse coefficients carry level `-1`, the details between
/// levels `j` and `j + 1` carry level `j`.
pub fn pyramid_to_csv(p: &CoefficientPyramid) -> String {
    let mut out = String::from("level,index,value\n");
    let rows = std::iter::once((-1i64, &p.coarse))
        .chain(p.details.iter().enumerate().map(|(j, d)| (j as i64, d)));
    for (level, values) in rows {
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("{level},{i},{}\n", number(*v)));
        }
    }
    out
}

pub fn pyramid_from_json(text: &str) -> Result<CoefficientPyramid, CliError> {
    let j: PyramidJson = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("bad pyramid JSON: {e}")))?;
    Ok(CoefficientPyramid {
        coarse: j.coarse,
        details: j.details,
    })
}

pub fn pyramid_from_csv(text: &str) -> Result<CoefficientPyramid, CliError> {
    let mut coarse = Vec::new();
    let mut details: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("level")) {
            continue;
        }
        let bad = || CliError::Input(format!("line {}: expected level,index,value", n + 1));
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(bad());
        }
        let level: i64 = cells[0].parse().map_err(|_| bad())?;
        let index: usize = cells[1].parse().map_err(|_| bad())?;
        let value: f64 = cells[2].parse().map_err(|_| bad())?;
        let target = match level {
            -1 => &mut coarse,
            l if l >= 0 => {
                let l = l as usize;
                if details.len() <= l {
                    details.resize(l + 1, Vec::new());
                }
                &mut details[l]
            }
            _ => return Err(bad()),
        };
        if index != target.len() {
            return Err(CliError::Input(format!(
                "line {}: level {level} index {index} out of sequence",
                n + 1
            )));
        }
        target.push(value);
    }
    Ok(CoefficientPyramid { coarse, details })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ColumnJson {
    pub start: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct BandJson {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<ColumnJson>,
}

impl From<&BandColumns> for BandJson {
    fn from(m: &BandColumns) -> Self {
        BandJson {
            rows: m.rows(),
            cols: m.cols(),
            columns: m
                .columns()
                .iter()
                .map(|c| ColumnJson {
                    start: c.start,
                    values: c.values.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct StepJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub band: Vec<(usize, usize, f64)>,
}

/// Everything `refine` reports about one level.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LevelJson {
    pub level: usize,
    pub refinement: BandJson,
    pub boundary: [usize; 2],
    /// Lifting steps in analysis order, ending with the scale.
    pub lifting: Vec<StepJson>,
    /// Final update columns as `[row, col, value]`.
    pub final_update: Vec<(usize, usize, f64)>,
    pub detail: BandJson,
    pub moment_residual: f64,
}

pub fn level_json(level: usize, plan: &LevelPlan) -> LevelJson {
    let scheme = &plan.scheme;
    let mut lifting = Vec::new();
    for (s, step) in scheme.steps().iter().enumerate() {
        let kind = match step.kind {
            StepKind::Predict if s == 0 && scheme.kind() == SchemeKind::Scheme1 => "P0",
            StepKind::Predict => "P",
            StepKind::Update => "U",
        };
        lifting.push(StepJson {
            kind: kind.into(),
            band: step.entries(),
        });
    }
    lifting.push(StepJson {
        kind: "D".into(),
        band: scheme.scale().iter().enumerate().map(|(i, d)| (i, i, *d)).collect(),
    });
    let mut final_update = Vec::new();
    for (m, [a, b]) in plan.details.final_update.coeffs.iter().enumerate() {
        final_update.push((m, m, *a));
        final_update.push((m + 1, m, *b));
    }
    LevelJson {
        level,
        refinement: plan.refinement.matrix().into(),
        boundary: [plan.split.left, plan.split.right],
        lifting,
        final_update,
        detail: (&plan.details.detail).into(),
        moment_residual: plan.details.moment_residual,
    }
}
