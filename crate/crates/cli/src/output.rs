//! Result tables and their CSV / JSON renderings.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    /// Left empty in CSV, `null` in JSON.
    Missing,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            // shortest representation that round-trips
            Value::Num(x) => format!("{x:?}"),
            Value::Int(n) => n.to_string(),
            Value::Flag(b) => b.to_string(),
            Value::Text(s) => csv_escape(s),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(x) => Number::from_f64(*x).map(Json::Number).unwrap_or(Json::Null),
            Value::Int(n) => Json::Number((*n).into()),
            Value::Flag(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<Value>,
    /// `ok`, or the error that stopped this row.
    pub status: String,
}

impl Row {
    pub fn ok(values: Vec<Value>) -> Self {
        Row {
            values,
            status: "ok".into(),
        }
    }

    pub fn failed(mut values: Vec<Value>, width: usize, err: impl std::fmt::Display) -> Self {
        values.resize(width, Value::Missing);
        Row {
            values,
            status: format!("error: {err}"),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Table {
            command: command.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn first_failure(&self) -> Option<(usize, &Row)> {
        self.rows.iter().enumerate().find(|(_, r)| !r.is_ok())
    }
}

pub fn header_line(hash: &str) -> String {
    format!(
        "# escatter-entropy v{}, config-hash={hash}",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn render_csv(table: &Table, hash: &str) -> String {
    let mut out = header_line(hash);
    out.push('\n');
    out.push_str(&table.columns.join(","));
    out.push_str(",status\n");
    for row in &table.rows {
        let mut cells: Vec<String> = row.values.iter().map(Value::csv).collect();
        cells.push(csv_escape(&row.status));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(table: &Table, hash: &str) -> String {
    let rows: Vec<Json> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (c, v) in table.columns.iter().zip(&row.values) {
                obj.insert((*c).to_string(), v.json());
            }
            obj.insert("status".into(), Json::String(row.status.clone()));
            Json::Object(obj)
        })
        .collect();
    let mut top = Map::new();
    top.insert(
        "version".into(),
        Json::String(env!("CARGO_PKG_VERSION").into()),
    );
    top.insert("config_hash".into(), Json::String(hash.into()));
    top.insert("command".into(), Json::String(table.command.clone()));
    top.insert("rows".into(), Json::Array(rows));
    let mut s = serde_json::to_string_pretty(&Json::Object(top)).expect("serializable");
    s.push('\n');
    s
}

/// Writes to a temporary file in the target directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
