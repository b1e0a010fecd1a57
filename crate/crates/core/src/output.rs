//! Tabular result serialization: CSV and JSON with identical numeric
//! rendering, so the two formats of one run always parse to the same values.

use std::fmt::Write as _;

/// One table cell. Floats render at 6 significant digits in both formats.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for CellValue {
    fn from(v: f64) -> Self {
        CellValue::Float(v)
    }
}

impl From<i64> for CellValue {
    fn from(v: i64) -> Self {
        CellValue::Int(v)
    }
}

impl From<&str> for CellValue {
    fn from(v: &str) -> Self {
        CellValue::Text(v.to_string())
    }
}

impl From<String> for CellValue {
    fn from(v: String) -> Self {
        CellValue::Text(v)
    }
}

impl From<bool> for CellValue {
    fn from(v: bool) -> Self {
        CellValue::Bool(v)
    }
}

/// Column-ordered rows; the writers preserve both orders exactly.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CellValue>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<CellValue>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width {} does not match {} columns",
            row.len(),
            self.columns.len()
        );
        self.rows.push(row);
    }
}

/// Render a finite float at `sig` significant digits. Plain decimal notation
/// within a moderate exponent band, scientific outside it; either form is a
/// valid JSON number and parses back to the same f64 in both formats.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    assert!(x.is_finite(), "refusing to format non-finite value {x}");
    if x == 0.0 {
        return "0".to_string();
    }
    // Take the exponent from the value after rounding to `sig` digits, so
    // inputs like 0.9999996 land in the decade they round into.
    let rounded: f64 = format!("{:.*e}", sig - 1, x)
        .parse()
        .expect("scientific round-trip");
    let exp = (rounded.abs().log10() + 1e-10).floor() as i32;
    if exp >= sig as i32 + 3 || exp < -5 {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

fn render_cell(cell: &CellValue) -> String {
    match cell {
        CellValue::Int(v) => v.to_string(),
        CellValue::Float(v) => format_sig(*v, 6),
        CellValue::Text(v) => v.clone(),
        CellValue::Bool(v) => v.to_string(),
    }
}

/// CSV with a header row; standard quoting.
pub fn write_csv(table: &Table) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.columns)
        .expect("writing to memory cannot fail");
    for row in &table.rows {
        let rendered: Vec<String> = row.iter().map(render_cell).collect();
        writer
            .write_record(&rendered)
            .expect("writing to memory cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory"))
        .expect("csv output is utf-8")
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// JSON array of objects, keys in column order, numbers rendered exactly as
/// in the CSV writer.
pub fn write_json(table: &Table) -> String {
    let mut out = String::from("[\n");
    for (i, row) in table.rows.iter().enumerate() {
        out.push_str("  {");
        for (j, (col, cell)) in table.columns.iter().zip(row).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{}\": ", escape_json(col));
            match cell {
                CellValue::Int(v) => {
                    let _ = write!(out, "{v}");
                }
                CellValue::Float(v) => out.push_str(&format_sig(*v, 6)),
                CellValue::Bool(v) => {
                    let _ = write!(out, "{v}");
                }
                CellValue::Text(v) => {
                    let _ = write!(out, "\"{}\"", escape_json(v));
                }
            }
        }
        out.push('}');
        if i + 1 < table.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}
