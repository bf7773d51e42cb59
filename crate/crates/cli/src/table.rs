//! Comma-delimited tables with locale-independent, reproducible rendering.

use std::fmt::Write as _;

/// Renders a float with 9 significant digits in scientific notation.
/// Re-parsing the output and rendering again reproduces the same string.
pub fn fmt_num(x: f64) -> String {
    // map -0.0 to 0.0 so equal values render identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Num(f64),
    Int(i64),
}

impl Cell {
    pub fn str(s: impl Into<String>) -> Self {
        Cell::Str(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
        }
    }
}

/// Header plus rows of equal width; LF line endings.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics if the row width does not match the header.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "column count must be constant"
        );
        self.rows.push(row);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{}", cell.render());
                first = false;
            }
            out.push('\n');
        }
        out
    }
}
