use std::fmt::Write as _;

use anyhow::{bail, Result};

/// Numeric table with `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    fn check(&self) -> Result<()> {
        if self.rows.is_empty() {
            bail!("refusing to emit an empty table");
        }
        Ok(())
    }

    /// Values print in shortest round-trip form so parsing gives them back.
    pub fn to_csv(&self) -> Result<String> {
        self.check()?;
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        Ok(out)
    }

    pub fn parse_csv(text: &str) -> Result<Table> {
        let mut comments = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(c) = line.strip_prefix('#') {
                comments.push(c.trim_start().to_string());
            } else if line.trim().is_empty() {
                continue;
            } else if columns.is_none() {
                columns = Some(line.split(',').map(str::to_string).collect());
            } else {
                let row = line
                    .split(',')
                    .map(|c| c.parse::<f64>().map_err(|e| anyhow::anyhow!("bad cell `{c}`: {e}")))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
        let Some(columns) = columns else { bail!("CSV has no header row") };
        Ok(Table { comments, columns, rows })
    }

    pub fn to_json(&self) -> Result<String> {
        self.check()?;
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, &v)| {
                        let val = serde_json::Number::from_f64(v)
                            .map(serde_json::Value::Number)
                            .unwrap_or_else(|| serde_json::Value::String(format!("{v}")));
                        (k.clone(), val)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "comments": self.comments, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Line plot of every column against the first; one marker per point
    /// when a series has a single point.
    pub fn to_svg(&self) -> Result<String> {
        self.check()?;
        if self.columns.len() < 2 {
            bail!("a plot needs at least two columns");
        }
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const M: f64 = 50.0;
        let xs: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = self.rows.iter().flat_map(|r| r[1..].iter().cloned()).filter(|v| v.is_finite()).collect();
        let range = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(lo.is_finite() && hi.is_finite()) {
                (0.0, 1.0)
            } else if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = range(&xs);
        let (y0, y1) = range(&ys);
        let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
        let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(
            out,
            r#"<line x1="{M}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{M}" y1="{M}" x2="{M}" y2="{b}" stroke="black"/>"#,
            b = H - M,
            r = W - M
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12">{}</text>"#, W / 2.0, H - 15.0, self.columns[0]);
        let _ = writeln!(out, r#"<text x="5" y="{}" font-size="10">{y1:.4e}</text>"#, M);
        let _ = writeln!(out, r#"<text x="5" y="{}" font-size="10">{y0:.4e}</text>"#, H - M);
        for (j, name) in self.columns.iter().enumerate().skip(1) {
            let color = colors[(j - 1) % colors.len()];
            let pts: Vec<(f64, f64)> = self
                .rows
                .iter()
                .filter(|r| r[j].is_finite())
                .map(|r| (px(r[0]), py(r[j])))
                .collect();
            if pts.len() == 1 {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"><title>{name}</title></circle>"#, pts[0].0, pts[0].1);
            } else if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" points="{}"><title>{name}</title></polyline>"#, path.join(" "));
            }
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&["x", "y"]);
        t.comment("command: test");
        t.push(vec![0.1, 1.0 / 3.0]);
        t.push(vec![2.0, -1e-300]);
        let back = Table::parse_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn empty_refused_and_single_marker() {
        let mut t = Table::new(&["x", "y"]);
        assert!(t.to_csv().is_err());
        t.push(vec![1.0, 2.0]);
        let svg = t.to_svg().unwrap();
        assert!(svg.contains("<circle") && !svg.contains("<polyline"));
    }
}
