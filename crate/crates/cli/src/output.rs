//! Deterministic CSV/JSON emission.
//!
//! CSV files carry the manifest as `#`-prefixed comment lines followed by
//! a stable header and data rows — everything after the comments is the
//! determinism-checked data section. JSON files carry
//! `{"manifest": ..., "data": ...}`; the `data` value is the
//! determinism-checked part. Cells hold `num/den` strings for exact
//! rationals and shortest round-trip decimals for doubles.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use flan_core::rational::{format_rational, rational_to_f64, Rational};

use crate::manifest::RunManifest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn rational_cell(value: &Rational, as_float: bool) -> String {
    if as_float {
        f64_cell(rational_to_f64(value))
    } else {
        format_rational(value)
    }
}

pub fn f64_cell(value: f64) -> String {
    format!("{value}")
}

pub fn optional_f64_cell(value: Option<f64>) -> String {
    value.map(f64_cell).unwrap_or_default()
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

/// Tabular output: CSV rows, or JSON with one object per row.
pub fn write_table(
    path: Option<&Path>,
    format: Format,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    debug_assert!(rows.iter().all(|r| r.len() == header.len()));
    let text = match format {
        Format::Csv => {
            let mut out = manifest.csv_comment_lines();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                debug_assert!(
                    row.iter().all(|cell| !cell.contains(',') && !cell.contains('\n')),
                    "cells must not need CSV quoting"
                );
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let data: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (key, value) in header.iter().zip(row) {
                        obj.insert(key.to_string(), serde_json::Value::String(value.clone()));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            document_json(manifest, serde_json::Value::Array(data))
        }
    };
    emit(path, &text)
}

/// Structured (non-tabular) JSON output.
pub fn write_json_data(
    path: Option<&Path>,
    manifest: &RunManifest,
    data: serde_json::Value,
) -> io::Result<()> {
    emit(path, &document_json(manifest, data))
}

fn document_json(manifest: &RunManifest, data: serde_json::Value) -> String {
    let doc = serde_json::json!({
        "manifest": manifest.to_json(),
        "data": data,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("valid JSON tree");
    text.push('\n');
    text
}
