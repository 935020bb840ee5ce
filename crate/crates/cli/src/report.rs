//! Table, JSON-lines and CSV rendering.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use meanforge_core::engine::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Flat CSV row for a [`Record`].
#[derive(Serialize)]
struct CsvRecord<'a> {
    suite: &'a str,
    relation: &'a str,
    holds: bool,
    worst_violation: f64,
    witness_a: Option<f64>,
    witness_b: Option<f64>,
    tight_at: Option<f64>,
}

pub fn write_records(out: &mut dyn Write, format: Format, records: &[Record]) -> Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(CsvRecord {
                    suite: &r.suite,
                    relation: &r.relation,
                    holds: r.holds,
                    worst_violation: r.worst_violation,
                    witness_a: r.witness.map(|p| p.a()),
                    witness_b: r.witness.map(|p| p.b()),
                    tight_at: r.tight_at,
                })?;
            }
            w.flush()?;
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.suite.clone(),
                        if r.holds { "pass".into() } else { "FAIL".into() },
                        format!("{:.3e}", r.worst_violation),
                        r.witness.map_or("-".into(), |p| format!("({:.6e}, {:.6e})", p.a(), p.b())),
                        r.tight_at.map_or("-".into(), |x| format!("{x:.6}")),
                        r.relation.clone(),
                    ]
                })
                .collect();
            write_table(out, &["suite", "result", "worst", "witness", "tight_at", "relation"], &rows)?;
        }
    }
    Ok(())
}

/// Rows of any serializable type: JSON lines, CSV with a header, or an
/// aligned table of the given pre-rendered cells.
pub fn write_rows<T: Serialize>(
    out: &mut dyn Write,
    format: Format,
    rows: &[T],
    header: &[&str],
    cells: impl Fn(&T) -> Vec<String>,
) -> Result<()> {
    match format {
        Format::Json => {
            for r in rows {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let rendered: Vec<Vec<String>> = rows.iter().map(cells).collect();
            write_table(out, header, &rendered)?;
        }
    }
    Ok(())
}

fn write_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let last = cells.len() - 1;
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == last { c.to_string() } else { format!("{c:<w$}", w = widths[i]) })
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
