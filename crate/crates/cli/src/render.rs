use std::fmt::Write;

use exshap::{Rational, ValueKind};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

/// One computed value.
pub struct Entry {
    pub kind: ValueKind,
    pub player: usize,
    pub value: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub fn fraction(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn decimal(x: &Rational) -> String {
    x.to_f64().map_or_else(|| "nan".into(), |f| format!("{f:.12}"))
}

pub fn render(entries: &[Entry], n: usize, method: &str, format: Format, decimals: bool) -> String {
    match format {
        Format::Json => {
            let values: Vec<Value> = entries
                .iter()
                .map(|e| {
                    let mut v = json!({
                        "kind": e.kind.name(),
                        "player": e.player,
                        "value": fraction(&e.value),
                    });
                    if decimals {
                        v["decimal"] = json!(decimal(&e.value));
                    }
                    v
                })
                .collect();
            let doc = json!({ "method": method, "players": n, "values": values });
            serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
        }
        Format::Csv => {
            let mut out = String::from(if decimals {
                "kind,player,value,decimal\n"
            } else {
                "kind,player,value\n"
            });
            for e in entries {
                let _ = write!(out, "{},{},{}", e.kind, e.player, fraction(&e.value));
                if decimals {
                    let _ = write!(out, ",{}", decimal(&e.value));
                }
                out.push('\n');
            }
            out
        }
        Format::Table => {
            let rows: Vec<[String; 4]> = entries
                .iter()
                .map(|e| {
                    [
                        e.kind.to_string(),
                        e.player.to_string(),
                        fraction(&e.value),
                        if decimals { decimal(&e.value) } else { String::new() },
                    ]
                })
                .collect();
            let header = ["kind", "player", "value", if decimals { "decimal" } else { "" }];
            let cols = if decimals { 4 } else { 3 };
            let width: Vec<usize> = (0..cols)
                .map(|c| {
                    rows.iter()
                        .map(|r| r[c].len())
                        .chain([header[c].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[&str]| -> String {
                let padded: Vec<String> = (0..cols).map(|c| format!("{:<w$}", cells[c], w = width[c])).collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(&header);
            for r in &rows {
                out += &line(&[&r[0], &r[1], &r[2], &r[3]]);
            }
            out
        }
    }
}
