//! Text, JSON and CSV emitters.

use std::io::Write;

use clap::ValueEnum;
use glnlab_core::geometry::DeficiencyReport;
use glnlab_core::DecompositionReport;
use serde::Serialize;

use crate::{tag_counts, ClassificationRow, CliError, Table1Row, Table2Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn out_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

fn json<T: Serialize + ?Sized>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(out_err)?;
    writeln!(out)?;
    Ok(())
}

fn csv_rows<T: Serialize>(rows: &[T], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(&mut *out);
    for r in rows {
        w.serialize(r).map_err(out_err)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON array or CSV table of flat records.
pub fn records<T: Serialize>(rows: &[T], fmt: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match fmt {
        Format::Json => json(rows, out),
        _ => csv_rows(rows, out),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref()
        .map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub fn classification(
    rows: &[ClassificationRow],
    fmt: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if fmt != Format::Text {
        return records(rows, fmt, out);
    }
    let width = rows.iter().map(|r| r.sigma.len()).max().unwrap_or(5).max(5);
    writeln!(
        out,
        "{:<width$}  {:<width$}  smooth  {:>2}  {:>4}  {:>4}  tag",
        "sigma", "class", "d", "l", "t"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<width$}  {:<width$}  {:<6}  {:>2}  {:>4}  {:>4}  {}",
            r.sigma,
            r.class_representative,
            if r.smooth { "yes" } else { "no" },
            r.d,
            opt(&r.l),
            opt(&r.t),
            r.tag
        )?;
    }
    let counts: Vec<String> = tag_counts(rows)
        .into_iter()
        .map(|(t, n)| format!("{t}: {n}"))
        .collect();
    writeln!(out, "{} rows; {}", rows.len(), counts.join(", "))?;
    Ok(())
}

#[derive(Serialize)]
struct ConstituentRow {
    multisegment: String,
    multiplicity: u64,
}

pub fn report(r: &DecompositionReport, fmt: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match fmt {
        Format::Json => json(r, out),
        Format::Csv => csv_rows(
            &r.constituents
                .iter()
                .map(|(m, k)| ConstituentRow {
                    multisegment: m.to_string(),
                    multiplicity: *k,
                })
                .collect::<Vec<_>>(),
            out,
        ),
        Format::Text => {
            writeln!(out, "Z({}) x Z({})", r.m1, r.m2)?;
            write!(out, "length {}, distinct {}", r.length, r.distinct)?;
            if let Some(tag) = r.tag {
                write!(out, ", {tag}")?;
            }
            writeln!(out)?;
            for (m, k) in &r.constituents {
                writeln!(out, "  {k:>3}  {m}")?;
            }
            let profile: Vec<String> = r.profile.iter().map(|(k, n)| format!("{n} x{k}")).collect();
            writeln!(out, "profile: {}", profile.join(", "))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DeficiencyRow {
    multisegment: String,
    d: usize,
    trials: usize,
    seed: u64,
    stable: bool,
    codims: String,
}

pub fn deficiency(r: &DeficiencyReport, fmt: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let codims: Vec<String> = r.sample_codims.iter().map(|c| c.to_string()).collect();
    match fmt {
        Format::Json => json(r, out),
        Format::Csv => csv_rows(
            &[DeficiencyRow {
                multisegment: r.m.to_string(),
                d: r.d,
                trials: r.trials,
                seed: r.seed,
                stable: r.stable,
                codims: codims.join(";"),
            }],
            out,
        ),
        Format::Text => {
            writeln!(out, "{}", r.m)?;
            writeln!(
                out,
                "d = {}  (trials {}, seed {}, height {}, {})",
                r.d,
                r.trials,
                r.seed,
                r.entry_height,
                if r.stable { "stable" } else { "not stable" }
            )?;
            writeln!(out, "codimensions: {}", codims.join(" "))?;
            Ok(())
        }
    }
}

pub fn table1(rows: &[Table1Row], fmt: Format, out: &mut dyn Write) -> Result<(), CliError> {
    if fmt != Format::Text {
        return records(rows, fmt, out);
    }
    let width = rows.iter().map(|r| r.sigma.len()).max().unwrap_or(5).max(5);
    writeln!(out, "{:<width$}  w", "sigma")?;
    for r in rows {
        writeln!(out, "{:<width$}  {}", r.sigma, r.w)?;
    }
    Ok(())
}

pub fn table2(rows: &[Table2Row], fmt: Format, out: &mut dyn Write) -> Result<(), CliError> {
    if fmt != Format::Text {
        return records(rows, fmt, out);
    }
    let width = rows.iter().map(|r| r.sigma.len()).max().unwrap_or(5).max(5);
    writeln!(
        out,
        "{:<width$}  {:>4}  {:>4}  {:>2}",
        "sigma", "l", "t", "d"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<width$}  {:>4}  {:>4}  {:>2}",
            r.sigma,
            opt(&r.l),
            opt(&r.t),
            r.d
        )?;
    }
    Ok(())
}
