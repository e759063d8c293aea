//! Deterministic CSV emission.

use std::fmt::Write as _;

use crate::config::{RunConfig, ECHO_BEGIN, ECHO_END};

/// A column-named numeric table with optional summary comments.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Extra `# ` lines written after the config echo.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// 17 significant digits, exact round trip for `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn render(config: &RunConfig, table: &Table) -> String {
    let mut s = String::new();
    s.push_str(ECHO_BEGIN);
    s.push('\n');
    for line in config.echo().lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str(ECHO_END);
    s.push('\n');
    for note in &table.notes {
        let _ = writeln!(s, "# {note}");
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Parse the numeric body of a rendered table (comment lines skipped).
pub fn parse_body(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines
        .next()
        .map(|h| h.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (columns, rows)
}
