//! Admissible `n` windows for small `(l, |m|)`.

use serde::Serialize;

use super::{n_interval, OpenInterval};

/// Integers print bare, anything else with two decimals rounded half away from zero.
pub fn format_bound(v: f64) -> String {
    if v == v.round() {
        return format!("{}", v as i64);
    }
    let r = (v * 100.0).round() / 100.0;
    format!("{r:.2}")
}

pub fn format_interval(i: &OpenInterval) -> String {
    format!("]{},{}[", format_bound(i.lower), format_bound(i.upper))
}

/// Rows are indexed by `|m|`, columns by `l`; cells with `|m| >= 4l` are empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalTable {
    pub ls: Vec<f64>,
    pub ms: Vec<f64>,
    pub cells: Vec<Vec<Option<OpenInterval>>>,
}

pub fn interval_table(ls: &[f64], ms: &[f64]) -> IntervalTable {
    let cells = ms.iter().map(|&m| ls.iter().map(|&l| n_interval(l, m.abs()).ok()).collect()).collect();
    IntervalTable { ls: ls.to_vec(), ms: ms.iter().map(|m| m.abs()).collect(), cells }
}

impl IntervalTable {
    pub fn cell_text(&self, row: usize, col: usize) -> String {
        self.cells[row][col].as_ref().map(format_interval).unwrap_or_default()
    }

    /// Fixed-width text grid.
    pub fn render_text(&self) -> String {
        let header: Vec<String> =
            std::iter::once("|m| \\ l".to_string()).chain(self.ls.iter().map(|&l| format_bound(l))).collect();
        let mut rows = vec![header];
        for (r, &m) in self.ms.iter().enumerate() {
            let mut row = vec![format_bound(m)];
            row.extend((0..self.ls.len()).map(|c| self.cell_text(r, c)));
            rows.push(row);
        }
        let widths: Vec<usize> =
            (0..rows[0].len()).map(|c| rows.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}
