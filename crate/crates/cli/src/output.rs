//! Table assembly and emission.
//!
//! Every artifact starts with a metadata header carrying the tool
//! version, the subcommand, the full parameter map, and the seed. Floats
//! are written with 17 significant digits so a rerun is byte-identical
//! and values round-trip exactly. Diagnostics go to stderr; the data
//! payload goes to stdout or the chosen file.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};

/// Invocation metadata recorded in every artifact.
pub struct Meta {
    pub subcommand: String,
    pub params: Vec<(String, String)>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Derived results (e.g. fits) appended after the data as comments.
    pub trailing: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            trailing: Vec::new(),
        }
    }
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn cell_csv(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Int(v) => serde_json::json!(v),
        Cell::Float(v) if v.is_nan() => serde_json::Value::Null,
        Cell::Float(v) => serde_json::json!(v),
        Cell::Text(s) => serde_json::json!(s),
        Cell::Empty => serde_json::Value::Null,
    }
}

pub fn render_csv(meta: &Meta, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# tool: {} {}\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str(&format!("# subcommand: {}\n", meta.subcommand));
    let params = meta
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    out.push_str(&format!("# params: {params}\n"));
    out.push_str(&format!("# seed: {}\n", meta.seed));
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let line = row.iter().map(cell_csv).collect::<Vec<_>>().join(",");
        out.push_str(&line);
        out.push('\n');
    }
    for (k, v) in &table.trailing {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out
}

pub fn render_json(meta: &Meta, table: &Table) -> String {
    let params: serde_json::Map<String, serde_json::Value> = meta
        .params
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::json!(v)))
        .collect();
    let rows: Vec<Vec<serde_json::Value>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(cell_json).collect())
        .collect();
    let derived: serde_json::Map<String, serde_json::Value> = table
        .trailing
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::json!(v)))
        .collect();
    let doc = serde_json::json!({
        "meta": {
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": meta.subcommand,
            "params": params,
            "seed": meta.seed,
        },
        "columns": table.columns,
        "rows": rows,
        "derived": derived,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Resolve the output target: an explicit --out path, else
/// $QKDLAB_OUT/<subcommand>.<ext>, else stdout.
pub fn write_artifact(
    out: &Option<PathBuf>,
    subcommand: &str,
    extension: &str,
    content: &str,
) -> Result<()> {
    let target: Option<PathBuf> = match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os("QKDLAB_OUT")
            .map(|dir| PathBuf::from(dir).join(format!("{subcommand}.{extension}"))),
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("writing stdout")?;
            Ok(())
        }
    }
}

/// Deterministic parallel map: results come back in input order no
/// matter how many workers run.
pub fn parallel_map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let n = items.len();
    if workers <= 1 || n <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<R>>> =
        (0..n).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i, &items[i]);
                *results[i].lock().expect("poisoned") = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().expect("poisoned").expect("computed"))
        .collect()
}
