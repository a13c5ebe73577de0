//! Minimal numeric CSV reader shared by the curve and weld formats.

use crate::error::{LabError, Result};

pub(crate) struct Table {
    pub columns: usize,
    pub data: Vec<Vec<f64>>,
}

/// Parses a header-led numeric table. Blank lines and `#` comments are skipped.
pub(crate) fn parse(text: &str, origin: &str, headers: &[&[&str]]) -> Result<Table> {
    let err = |line: usize, msg: String| LabError::Parse { path: origin.to_string(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if !headers.iter().any(|h| *h == names.as_slice()) {
        let expected: Vec<String> = headers.iter().map(|h| h.join(",")).collect();
        return Err(err(hline, format!("unexpected header `{header}`, expected one of: {}", expected.join(" | "))));
    }
    let columns = names.len();
    let mut data = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns {
            return Err(err(n, format!("expected {columns} fields, found {}", fields.len())));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(n, format!("`{f}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        data.push(row);
    }
    if data.is_empty() {
        return Err(err(hline, "no data rows".into()));
    }
    Ok(Table { columns, data })
}
