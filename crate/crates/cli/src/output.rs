//! Rendering: aligned text tables, CSV and JSON.
//!
//! Data goes to stdout, diagnostics to stderr. JSON is emitted through
//! stable serde structs so repeated runs are byte-identical.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

/// Column alignment for table rendering.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Align {
    Left,
    Right,
}

/// Prints an aligned table with a header row and a dashed rule.
pub fn print_table(
    out: &mut impl Write,
    headers: &[&str],
    aligns: &[Align],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render = |cells: &[String], out: &mut dyn Write| -> Result<()> {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            match aligns[i] {
                Align::Left => line.push_str(&format!("{cell:<width$}", width = widths[i])),
                Align::Right => line.push_str(&format!("{cell:>width$}", width = widths[i])),
            }
        }
        writeln!(out, "{}", line.trim_end())?;
        Ok(())
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    render(&header_cells, out)?;
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    render(&rule, out)?;
    for row in rows {
        render(row, out)?;
    }
    Ok(())
}

/// Writes rows as CSV with the given header.
pub fn print_csv(out: &mut impl Write, headers: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(headers)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty-prints a serializable report followed by a newline.
pub fn print_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Percentage with one decimal, the form used in report tables.
pub fn percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

/// Human formatting for VESTS-scale values: plain integers when small,
/// scientific notation once they stop being readable.
pub fn vests(value: f64) -> String {
    if value == 0.0 {
        "0".to_string()
    } else if value.abs() >= 1e7 {
        format!("{value:.4e}")
    } else if value.fract() == 0.0 {
        format!("{value:.0}")
    } else {
        format!("{value:.2}")
    }
}

/// Block counts: integers print plainly, fractional shares keep two
/// decimals.
pub fn blocks(value: f64) -> String {
    if value.fract() == 0.0 {
        format!("{value:.0}")
    } else {
        format!("{value:.2}")
    }
}
