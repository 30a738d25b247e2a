//! CSV and JSON rendering of result envelopes.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Number, Value};

use crate::error::CliError;
use crate::runner::{Cell, Metadata, ResultEnvelope, Table};
use crate::scenario::Column;

pub const UNITS_NOTE: &str = "rates, detunings and frequencies in units of Γ; times in 1/Γ; positions in radians of propagation phase";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    /// Guess from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn emit(envelope: &ResultEnvelope, format: Format) -> Result<Vec<u8>, CliError> {
    check_finite(&envelope.table)?;
    match format {
        Format::Csv => emit_csv(envelope),
        Format::Json => emit_json(envelope),
    }
}

pub fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.flush().map_err(io)
}

/// Infinities are allowed as explicit sentinels; NaN never is.
fn check_finite(table: &Table) -> Result<(), CliError> {
    for (row, cells) in table.rows.iter().enumerate() {
        for (col, cell) in cells.iter().enumerate() {
            if let Cell::Float(x) = cell {
                if x.is_nan() {
                    return Err(CliError::NonFinite {
                        column: table.columns[col].name.clone(),
                        row,
                    });
                }
            }
        }
    }
    Ok(())
}

/// 17 significant digits, enough to recover every `f64`.
pub fn format_cell(cell: Cell) -> String {
    match cell {
        Cell::Int(n) => n.to_string(),
        Cell::Float(x) if x == f64::INFINITY => "inf".into(),
        Cell::Float(x) if x == f64::NEG_INFINITY => "-inf".into(),
        Cell::Float(x) => format!("{x:.16e}"),
    }
}

fn emit_csv(envelope: &ResultEnvelope) -> Result<Vec<u8>, CliError> {
    let m = &envelope.metadata;
    let t = &envelope.table;
    let mut out = Vec::new();
    let mut header = format!("# {} {}\n# seed: {}\n", m.tool, m.version, m.seed);
    if let Some(w) = m.wall_time {
        header.push_str(&format!("# wall_time_s: {w}\n"));
    }
    header.push_str(&format!("# units: {UNITS_NOTE}\n"));
    let units: Vec<String> = t.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
    header.push_str(&format!("# columns: {}\n# config:\n", units.join(", ")));
    for line in m.config.lines() {
        header.push_str(&format!("#   {line}\n"));
    }
    out.extend_from_slice(header.as_bytes());

    let csv_err = |e: csv::Error| CliError::Format(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(&mut out);
    w.write_record(t.columns.iter().map(|c| c.name.as_str())).map_err(csv_err)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|&c| format_cell(c))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Format(e.to_string()))?;
    drop(w);
    Ok(out)
}

fn cell_json(cell: Cell) -> Value {
    match cell {
        Cell::Int(n) => Value::from(n),
        Cell::Float(x) => match Number::from_f64(x) {
            Some(n) => Value::Number(n),
            None => Value::String(format_cell(cell)),
        },
    }
}

fn emit_json(envelope: &ResultEnvelope) -> Result<Vec<u8>, CliError> {
    let m = &envelope.metadata;
    let t = &envelope.table;
    let mut meta = Map::new();
    meta.insert("tool".into(), json!(m.tool));
    meta.insert("version".into(), json!(m.version));
    meta.insert("seed".into(), json!(m.seed));
    meta.insert("config".into(), json!(m.config));
    meta.insert("units".into(), json!(UNITS_NOTE));
    if let Some(w) = m.wall_time {
        meta.insert("wall_time_s".into(), json!(w));
    }
    let columns: Vec<Value> = t
        .columns
        .iter()
        .map(|c| json!({ "name": c.name, "unit": c.unit }))
        .collect();
    let values: Vec<Value> = (0..t.columns.len())
        .map(|j| Value::Array(t.rows.iter().map(|r| cell_json(r[j])).collect()))
        .collect();
    let doc = json!({
        "metadata": Value::Object(meta),
        "data": { "columns": columns, "values": values },
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Format(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Inverse of the JSON emitter.
pub fn parse_json(bytes: &[u8]) -> Result<ResultEnvelope, CliError> {
    let bad = |what: &str| CliError::Format(what.to_string());
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| CliError::Format(e.to_string()))?;
    let meta = doc.get("metadata").ok_or_else(|| bad("missing metadata"))?;
    let text = |key: &str| {
        meta.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("missing metadata.{key}")))
    };
    let metadata = Metadata {
        tool: text("tool")?,
        version: text("version")?,
        config: text("config")?,
        seed: meta.get("seed").and_then(Value::as_u64).ok_or_else(|| bad("missing metadata.seed"))?,
        wall_time: meta.get("wall_time_s").and_then(Value::as_f64),
    };
    let data = doc.get("data").ok_or_else(|| bad("missing data"))?;
    let columns = data
        .get("columns")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing data.columns"))?
        .iter()
        .map(|c| {
            let name = c.get("name").and_then(Value::as_str).ok_or_else(|| bad("column without name"))?;
            let unit = c.get("unit").and_then(Value::as_str).ok_or_else(|| bad("column without unit"))?;
            Ok(Column::new(name, unit))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let series = data
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing data.values"))?;
    if series.len() != columns.len() {
        return Err(bad("column count differs from value series count"));
    }
    let series = series
        .iter()
        .map(|s| {
            s.as_array()
                .ok_or_else(|| bad("value series is not an array"))?
                .iter()
                .map(parse_cell)
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let n_rows = series.first().map_or(0, Vec::len);
    if series.iter().any(|s| s.len() != n_rows) {
        return Err(bad("value series have different lengths"));
    }
    let mut table = Table::new(columns);
    for i in 0..n_rows {
        table.push(series.iter().map(|s| s[i]).collect());
    }
    Ok(ResultEnvelope { metadata, table })
}

fn parse_cell(v: &Value) -> Result<Cell, CliError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap())),
        Value::Number(n) => n
            .as_f64()
            .map(Cell::Float)
            .ok_or_else(|| CliError::Format(format!("unrepresentable number {n}"))),
        Value::String(s) if s == "inf" => Ok(Cell::Float(f64::INFINITY)),
        Value::String(s) if s == "-inf" => Ok(Cell::Float(f64::NEG_INFINITY)),
        other => Err(CliError::Format(format!("unexpected cell {other}"))),
    }
}
