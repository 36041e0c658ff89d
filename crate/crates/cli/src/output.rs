use serde_json::{json, Map, Value};

use crate::{Cli, Format};

/// A command's result before formatting.
pub struct Report {
    pub result: Value,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub failed: bool,
}

pub struct Rendered {
    pub text: String,
    pub failed: bool,
}

/// Replaces every non-integer JSON number by its `{:e}` string so no bare
/// floats leave the process.
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(format_f64(n.as_f64().unwrap())),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn metadata(cli: &Cli, cache_path: Option<&std::path::Path>) -> Value {
    let mut run = serde_json::to_value(cli).expect("arguments serialize");
    if let Some(o) = run.as_object_mut() {
        let global = o.remove("global").unwrap_or(Value::Null);
        let command = o.remove("command").unwrap_or(Value::Null);
        let mut flat = Map::new();
        if let Value::Object(g) = global {
            flat.extend(g);
        }
        flat.insert("cache_path".into(), json!(cache_path.map(|p| p.display().to_string())));
        flat.insert("jobs".into(), json!(rayon::current_num_threads()));
        if let Value::Object(c) = command {
            flat.extend(c);
        }
        run = Value::Object(flat);
    }
    stringify_floats(json!({
        "tool": "ckzeta",
        "version": env!("CARGO_PKG_VERSION"),
        "run_config": run,
        "lab_config": ckzeta::config::active(),
        "log_base": ckzeta::analysis::LOG_BASE,
    }))
}

pub fn render(format: Format, metadata: Value, report: Report) -> Rendered {
    let result = stringify_floats(report.result);
    let mut text = String::new();
    match format {
        Format::Json => {
            let doc = json!({ "metadata": metadata, "result": result });
            text = serde_json::to_string_pretty(&doc).expect("json");
            text.push('\n');
        }
        Format::Jsonl => {
            text.push_str(&serde_json::to_string(&json!({ "metadata": metadata })).expect("json"));
            text.push('\n');
            let items = match result {
                Value::Array(a) => a,
                other => vec![other],
            };
            for it in items {
                text.push_str(&serde_json::to_string(&it).expect("json"));
                text.push('\n');
            }
        }
        Format::Csv => {
            text.push_str("# metadata ");
            text.push_str(&serde_json::to_string(&metadata).expect("json"));
            text.push('\n');
            text.push_str(&report.header.join(","));
            text.push('\n');
            for row in report.rows {
                let cells: Vec<String> = row.into_iter().map(csv_cell).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
        }
    }
    Rendered {
        text,
        failed: report.failed,
    }
}

fn csv_cell(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}
