//! Text rendering for metric reports and bundled result tables.

pub mod fixtures;

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::json;

use crate::error::{Error, Result};
use crate::metrics::MetricReport;
pub use fixtures::{fixture, Fixture, FixtureRecord, FixtureRow, MetricColumn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Plain,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" | "table" => Ok(Format::Plain),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::param(format!("unknown format {other:?} (plain, csv, json)"))),
        }
    }
}

/// Display precision per metric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Fractions shown as percentages with two decimals.
    Percent,
    /// Pixel displacements, two decimals.
    Displacement,
    /// Normalized edit distance, three decimals.
    EditDistance,
}

impl Precision {
    pub fn format(self, v: f64) -> String {
        match self {
            Precision::Percent => format!("{:.2}", v * 100.0),
            Precision::Displacement => format!("{v:.2}"),
            Precision::EditDistance => format!("{v:.3}"),
        }
    }
}

fn csv_text(records: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r).map_err(|e| Error::param(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::param(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn aligned(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..ncol).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:<w$}", w = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Render metric reports; the plain form is one `name  value` line per
/// report followed by indented breakdown lines.
pub fn render_metrics(reports: &[MetricReport], precision: Precision, format: Format) -> Result<String> {
    for r in reports {
        if !r.value.is_finite() || r.breakdown.values().any(|v| !v.is_finite()) {
            return Err(Error::invalid("report", format!("{} is not finite", r.name)));
        }
    }
    match format {
        Format::Plain => {
            let mut rows = Vec::new();
            for r in reports {
                rows.push(vec![r.name.clone(), precision.format(r.value)]);
                for (k, v) in &r.breakdown {
                    rows.push(vec![format!("  {k}"), precision.format(*v)]);
                }
            }
            Ok(aligned(&rows))
        }
        Format::Csv => {
            let mut rows = vec![vec!["metric".to_owned(), "value".to_owned(), "count".to_owned()]];
            for r in reports {
                rows.push(vec![r.name.clone(), precision.format(r.value), r.count.to_string()]);
                for (k, v) in &r.breakdown {
                    rows.push(vec![format!("{}/{k}", r.name), precision.format(*v), r.count.to_string()]);
                }
            }
            csv_text(&rows)
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "value": r.value,
                        "display": precision.format(r.value),
                        "count": r.count,
                        "breakdown": r.breakdown,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items)?;
            s.push('\n');
            Ok(s)
        }
    }
}

const MISSING: &str = "-";

/// Render a bundled table; cells are emitted exactly as stored.
pub fn render_fixture(f: &Fixture, format: Format) -> Result<String> {
    match format {
        Format::Plain => {
            let mut splits: Vec<String> = f.key_columns.iter().map(|_| String::new()).collect();
            let mut header: Vec<String> = f.key_columns.iter().map(|s| s.to_string()).collect();
            let mut last = "";
            for c in f.columns {
                splits.push(if c.split != last { c.split.to_owned() } else { String::new() });
                last = c.split;
                header.push(c.metric.to_owned());
            }
            let mut rows = vec![splits, header];
            for r in f.rows {
                let mut row: Vec<String> = r.keys.iter().map(|s| s.to_string()).collect();
                row.extend(r.values.iter().map(|v| v.unwrap_or(MISSING).to_owned()));
                rows.push(row);
            }
            Ok(format!("{}\n{}", f.name, aligned(&rows)))
        }
        Format::Csv => {
            let mut header: Vec<String> = f.key_columns.iter().map(|s| s.to_string()).collect();
            header.extend(f.columns.iter().map(|c| format!("{} {}", c.split, c.metric)));
            let mut rows = vec![header];
            for r in f.rows {
                let mut row: Vec<String> = r.keys.iter().map(|s| s.to_string()).collect();
                row.extend(r.values.iter().map(|v| v.unwrap_or(MISSING).to_owned()));
                rows.push(row);
            }
            csv_text(&rows)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = f
                .rows
                .iter()
                .map(|r| {
                    let keys: serde_json::Map<String, serde_json::Value> =
                        f.key_columns.iter().zip(r.keys).map(|(k, v)| (k.to_string(), json!(v))).collect();
                    let mut values = serde_json::Map::new();
                    for (c, v) in f.columns.iter().zip(r.values) {
                        let split = values
                            .entry(c.split.to_owned())
                            .or_insert_with(|| json!({}))
                            .as_object_mut()
                            .expect("object");
                        split.insert(c.metric.to_owned(), v.map_or(serde_json::Value::Null, |s| json!(s)));
                    }
                    json!({ "method": keys, "values": values })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "table": f.name,
                "caption": f.caption,
                "rows": rows,
            }))?;
            s.push('\n');
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fixtures::*;

    fn cell_in_row(text: &str, row_start: &str, col: usize) -> String {
        let line = text.lines().find(|l| l.starts_with(row_start)).unwrap();
        let rest = &line[row_start.len()..];
        rest.split_whitespace().nth(col).unwrap().to_owned()
    }

    #[test]
    fn longterm_row_renders_verbatim() {
        let t = render_fixture(&LONGTERM_RESULTS, Format::Plain).unwrap();
        let line = t.lines().rfind(|l| l.starts_with("VideoMAE-L")).unwrap();
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(&cells[5..8], &["0.561", "0.594", "0.840"]);
    }

    #[test]
    fn hands_row_renders_verbatim() {
        let t = render_fixture(&HANDS_RESULTS, Format::Plain).unwrap();
        assert_eq!(cell_in_row(&t, "UniFormer-B (320,8,30)", 0), "43.25");
    }

    #[test]
    fn short_term_keeps_single_decimal_cell() {
        let t = render_fixture(&SHORT_TERM, Format::Csv).unwrap();
        assert!(t.contains("D,C+new top3box,18.73,8.5,7.55,3.87"), "{t}");
    }

    #[test]
    fn missing_cells_dash() {
        let t = render_fixture(&NLQ_PERFORMANCE, Format::Csv).unwrap();
        assert!(t.contains("21.89,15.64,12.78,8.08,-,-,-,-"));
    }

    #[test]
    fn metric_precisions() {
        let r = [MetricReport::new("ED", 0.84049, 3)];
        assert_eq!(render_metrics(&r, Precision::EditDistance, Format::Plain).unwrap(), "ED  0.840\n");
        let r = [MetricReport::new("Recall@1", 0.40361, 3)];
        assert_eq!(render_metrics(&r, Precision::Percent, Format::Plain).unwrap(), "Recall@1  40.36\n");
        assert!(render_metrics(&[MetricReport::new("x", f64::NAN, 0)], Precision::Percent, Format::Plain).is_err());
    }
}
