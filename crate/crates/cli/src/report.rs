//! Index reports as JSON or CSV. Rows follow the table's report order.

use cube_interact::{InteractionTable, Value};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::spec_file::subset_json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct CsvRow {
    subset: String,
    order: usize,
    value: f64,
    method: String,
    stderr: Option<f64>,
}

pub fn render(table: &InteractionTable, format: Format) -> Result<String, csv::Error> {
    match format {
        Format::Json => Ok(render_json(table)),
        Format::Csv => render_csv(table),
    }
}

fn render_json(table: &InteractionTable) -> String {
    let rows: Vec<Json> = table
        .iter()
        .map(|(s, v)| {
            let mut row = json!({
                "subset": subset_json(s),
                "label": s.to_string(),
                "order": s.len(),
                "value": v.to_f64(),
                "method": v.provenance().to_string(),
                "stderr": v.stderr(),
            });
            if let Value::Exact(r) = v.value() {
                row["exact"] = json!(cube_interact::scalar::format_rational(r));
            }
            row
        })
        .collect();
    let doc = json!({ "n": table.n(), "indexes": rows });
    let mut out = serde_json::to_string_pretty(&doc).expect("in-memory JSON");
    out.push('\n');
    out
}

fn render_csv(table: &InteractionTable) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (s, v) in table.iter() {
        w.serialize(CsvRow {
            subset: s.to_string(),
            order: s.len(),
            value: v.to_f64(),
            method: v.provenance().to_string(),
            stderr: v.stderr(),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
