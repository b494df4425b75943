//! Projections of a JSON result onto CSV and plain text.

use serde_json::Value;

use crate::Format;

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv(v),
        Format::Text => {
            let mut out = String::new();
            flatten("", v, &mut |k, s| out.push_str(&format!("{k}: {s}\n")));
            out
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Walks `v`, calling `emit` with dotted paths for every scalar. Arrays of
/// scalars or of pairs stay on one line.
fn flatten(prefix: &str, v: &Value, emit: &mut dyn FnMut(&str, String)) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, emit);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => emit(prefix, compact(v)),
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, emit);
            }
        }
        other => emit(prefix, scalar(other)),
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("json value serializes")
}

fn write_record(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) {
    w.write_record(fields).expect("writing to memory");
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// The first array of objects becomes the table (rows, entries,
/// decompositions); anything else is a two-column key/value listing.
fn csv(v: &Value) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Value::Object(map) = v {
        let table = map.iter().find_map(|(_, x)| match x {
            Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object) => Some(items),
            _ => None,
        });
        if let Some(items) = table {
            let mut cols: Vec<String> = Vec::new();
            for item in items {
                for k in item.as_object().unwrap().keys() {
                    if !cols.contains(k) {
                        cols.push(k.clone());
                    }
                }
            }
            write_record(&mut w, &cols);
            for item in items {
                let row: Vec<String> = cols
                    .iter()
                    .map(|c| match item.get(c) {
                        Some(x @ (Value::Array(_) | Value::Object(_))) => compact(x),
                        Some(x) => scalar(x),
                        None => String::new(),
                    })
                    .collect();
                write_record(&mut w, &row);
            }
            return finish(w);
        }
    }
    write_record(&mut w, &["key".into(), "value".into()]);
    flatten("", v, &mut |k, s| write_record(&mut w, &[k.to_string(), s]));
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_uses_the_row_array() {
        let v = json!({"rows": [{"a": 1, "b": "x,y"}, {"a": 2, "c": [1, 2]}]});
        assert_eq!(csv(&v), "a,b,c\n1,\"x,y\",\n2,,\"[1,2]\"\n");
    }

    #[test]
    fn text_flattens_nested_keys() {
        let v = json!({"n": 36, "polygon": {"vertices": [[0, 0], [1, 0]]}, "d": null});
        assert_eq!(
            render(&v, Format::Text),
            "d: \nn: 36\npolygon.vertices: [[0,0],[1,0]]\n"
        );
    }
}
