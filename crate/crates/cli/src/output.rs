use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: String) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn columns(rows: &[Value]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    cols
}

type Split = (Map<String, Value>, Option<(String, Vec<Value>)>);

fn split(report: &Value) -> Split {
    let mut head = Map::new();
    let mut table = None;
    if let Value::Object(m) = report {
        for (k, v) in m {
            match v {
                Value::Array(items)
                    if table.is_none()
                        && !items.is_empty()
                        && items.iter().all(Value::is_object) =>
                {
                    table = Some((k.clone(), items.clone()));
                }
                _ => {
                    head.insert(k.clone(), v.clone());
                }
            }
        }
    }
    (head, table)
}

/// Renders a report. Objects holding an array of objects print that array as
/// the table body; the other fields go in a header block (table) or are
/// dropped in favour of the rows (csv).
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(report).expect("serializable")
        ),
        Format::Csv => {
            let (head, table) = split(report);
            let rows = match table {
                Some((_, rows)) => rows,
                None => vec![Value::Object(head)],
            };
            let cols = columns(&rows);
            let mut out = cols.join(",");
            out.push('\n');
            for r in &rows {
                let line: Vec<String> = cols
                    .iter()
                    .map(|c| csv_field(r.get(c).map(scalar).unwrap_or_default()))
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        Format::Table => {
            let (head, table) = split(report);
            let mut out = String::new();
            let width = head.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in &head {
                out.push_str(&format!("{k:<width$}  {}\n", scalar(v)));
            }
            if let Some((name, rows)) = table {
                let cols = columns(&rows);
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        cols.iter()
                            .map(|c| r.get(c).map(scalar).unwrap_or_default())
                            .collect()
                    })
                    .collect();
                let widths: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        cells
                            .iter()
                            .map(|r| r[i].len())
                            .max()
                            .unwrap_or(0)
                            .max(c.len())
                    })
                    .collect();
                if !head.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{name}]\n"));
                let line = |vals: &[String]| {
                    vals.iter()
                        .zip(&widths)
                        .map(|(v, w)| format!("{v:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                out.push_str(&line(&cols));
                out.push('\n');
                for r in &cells {
                    out.push_str(&line(r));
                    out.push('\n');
                }
            }
            out
        }
    }
}
