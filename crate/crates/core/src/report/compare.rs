use std::fmt;

use serde::Serialize;

use super::LabeledGrid;
use crate::analysis::{resource_gap_subset, AccuracySurface, GapSummary};
use crate::error::{Error, Result};
use crate::language::LanguageTag;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDiff {
    pub language: String,
    pub column: String,
    pub got: f64,
    pub want: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub cells_compared: usize,
    pub max_abs_diff: f64,
    /// Cells whose difference exceeds the tolerance.
    pub failures: Vec<CellDiff>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} cells compared, max |diff| = {}, tolerance = {}",
            self.cells_compared, self.max_abs_diff, self.tolerance
        )?;
        for c in &self.failures {
            writeln!(
                f,
                "  FAIL {} [{}]: got {} want {} (|diff| {})",
                c.language, c.column, c.got, c.want, c.abs_diff
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Cell-wise absolute differences between two grids of identical shape.
pub fn compare_grids(
    got: &LabeledGrid,
    want: &LabeledGrid,
    tolerance: f64,
) -> Result<ComparisonReport> {
    if got.columns != want.columns {
        return Err(Error::Comparison(format!(
            "column sets differ: {:?} vs {:?}",
            got.columns, want.columns
        )));
    }
    let labels = |g: &LabeledGrid| {
        let mut l: Vec<String> = g.rows.iter().map(|(r, _)| r.clone()).collect();
        l.sort();
        l
    };
    if labels(got) != labels(want) {
        return Err(Error::Comparison(format!(
            "row sets differ: {:?} vs {:?}",
            labels(got),
            labels(want)
        )));
    }
    let mut report = ComparisonReport {
        tolerance,
        cells_compared: 0,
        max_abs_diff: 0.0,
        failures: Vec::new(),
    };
    for (label, want_row) in &want.rows {
        let got_row = got.row(label).expect("row sets checked");
        for ((column, g), w) in want.columns.iter().zip(got_row).zip(want_row) {
            match (g, w) {
                (None, None) => {}
                (Some(g), Some(w)) => {
                    let d = (g - w).abs();
                    report.cells_compared += 1;
                    report.max_abs_diff = report.max_abs_diff.max(d);
                    if d.is_nan() || d > tolerance {
                        report.failures.push(CellDiff {
                            language: label.clone(),
                            column: column.clone(),
                            got: *g,
                            want: *w,
                            abs_diff: d,
                        });
                    }
                }
                _ => {
                    return Err(Error::Comparison(format!(
                        "cell {label} [{column}] is empty in only one table"
                    )))
                }
            }
        }
    }
    Ok(report)
}

/// Resource gap for every column of a grid, over the rows whose language
/// codes are in the built-in table. Columns where either group is empty are
/// skipped.
pub fn grid_gaps(grid: &LabeledGrid) -> Vec<(String, GapSummary)> {
    let mut out = Vec::new();
    for (col, name) in grid.columns.iter().enumerate() {
        let mut surface = AccuracySurface::new("", "");
        let mut codes = Vec::new();
        for (label, values) in &grid.rows {
            if let (Some(tag), Some(v)) = (LanguageTag::known(label), values[col]) {
                if surface.insert(tag, col, v).is_ok() {
                    codes.push(label.as_str());
                }
            }
        }
        if let Ok(gap) = resource_gap_subset(&surface, col, &codes) {
            out.push((name.clone(), gap));
        }
    }
    out
}
