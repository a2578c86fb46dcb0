//! Plain-text rendering of experiment results.

use super::experiment::{ExperimentKind, ExperimentReport};
use std::fmt::Write;

/// A table of right-aligned, space-separated columns.
#[derive(Debug, Clone, Default)]
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).chain([self.header.len()]).max().unwrap_or(0);
        let mut width = vec![0; cols];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |row: &[String]| {
            let cells: Vec<String> = (0..cols)
                .map(|i| {
                    let cell = row.get(i).map_or("", String::as_str);
                    format!("{cell:>w$}", w = width[i])
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        };
        line(&self.header);
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        line(&rule);
        for row in &self.rows {
            line(row);
        }
        out
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.filter(|x| x.is_finite()).map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

/// Level/power rows in the layout of the projection-count tables.
pub fn level_table(reports: &[ExperimentReport]) -> String {
    let mut t = TextTable::new(["n", "d", "cov", "r", "l", "a", "b", "l_hat", "prop", "reps", "failed"]);
    for r in reports {
        let c = &r.config;
        let mult = match c.kind {
            ExperimentKind::Level { multiplier } => format!("{multiplier}"),
            _ => "-".into(),
        };
        t.push([
            c.n.to_string(),
            c.d.to_string(),
            c.covariance.kind.label().to_string(),
            mult,
            format!("{}", c.constants.h),
            format!("{:.4}", c.constants.a),
            format!("{:.4}", c.constants.b),
            fmt_opt(r.mean_projections, 1),
            fmt_opt(Some(r.rejection_proportion), 4),
            r.completed_reps.to_string(),
            r.failed_reps.to_string(),
        ]);
    }
    t.render()
}

/// Swamping and per-radius detection rows.
pub fn contamination_table(reports: &[ExperimentReport]) -> String {
    let radii: Vec<f64> = reports.first().map_or_else(Vec::new, |r| r.per_radius.iter().map(|b| b.multiplier).collect());
    let mut header = vec!["n".to_string(), "d".into(), "cov".into(), "swamping".into()];
    header.extend(radii.iter().map(|r| format!("r={r}")));
    header.push("reps".into());
    let mut t = TextTable::new(header);
    for r in reports {
        let c = &r.config;
        let mut row = vec![
            c.n.to_string(),
            c.d.to_string(),
            c.covariance.kind.label().to_string(),
            fmt_opt(r.swamping_proportion, 4),
        ];
        row.extend(r.per_radius.iter().map(|b| fmt_opt(Some(b.proportion), 4)));
        row.push(r.completed_reps.to_string());
        t.push(row);
    }
    t.render()
}

/// Any mix of reports, grouped by kind.
pub fn render_reports(reports: &[ExperimentReport]) -> String {
    let (level, scans): (Vec<_>, Vec<_>) =
        reports.iter().cloned().partition(|r| matches!(r.config.kind, ExperimentKind::Level { .. }));
    let mut out = String::new();
    if !level.is_empty() {
        out.push_str(&level_table(&level));
    }
    if !scans.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&contamination_table(&scans));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_align() {
        let mut t = TextTable::new(["x", "long header"]);
        t.push(["12345", "1"]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "    x  long header");
        assert_eq!(lines[2], "12345            1");
    }
}
