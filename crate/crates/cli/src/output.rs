//! CSV and JSON serialisation of sweep tables.

use std::io::Write;

use serde_json::{json, Value};

use crate::{SweepError, SweepTable};

const SIGNIFICANT: usize = 15;

/// Literal written for singular samples in CSV output.
pub const MISSING: &str = "NA";

/// `%.15g`-style formatting: 15 significant digits, trailing zeros
/// trimmed, exponent form outside `1e-5 ..= 1e15`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return MISSING.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header row plus one row per grid point; no metadata.
pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    let header = std::iter::once(table.abscissa.as_str()).chain(table.series.iter().map(String::as_str));
    w.write_record(header).map_err(csv_err)?;
    for (x, values) in &table.rows {
        let record = std::iter::once(format_number(*x)).chain(
            values
                .iter()
                .map(|v| v.map_or_else(|| MISSING.to_string(), format_number)),
        );
        w.write_record(record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> SweepError {
    SweepError::Io(std::io::Error::other(e))
}

pub fn to_json(table: &SweepTable) -> Value {
    let columns: Vec<&str> = std::iter::once(table.abscissa.as_str())
        .chain(table.series.iter().map(String::as_str))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|(x, values)| {
            let mut row = vec![json!(x)];
            row.extend(values.iter().map(|v| v.map_or(Value::Null, |f| json!(f))));
            Value::Array(row)
        })
        .collect();
    json!({ "spec": table.metadata, "columns": columns, "rows": rows })
}

/// Object with `spec` (request echo and tool version), `columns` and `rows`;
/// singular samples are `null`.
pub fn write_json<W: Write>(table: &SweepTable, mut out: W) -> Result<(), SweepError> {
    serde_json::to_writer_pretty(&mut out, &to_json(table)).map_err(|e| SweepError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}
