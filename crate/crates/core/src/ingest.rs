//! Comma-separated inputs: raw income samples, CCDF tables and country panels.
//!
//! Numbers use a decimal point and optional exponent only. Thousands
//! separators, `inf`, `nan` and locale-specific forms are rejected. Errors
//! carry the line and column of the offending field.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::empirical::{CcdfCurve, MoneySample};
use crate::error::{Error, Location, Result};
use crate::inequality::CountryRecord;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Samples,
    Ccdf,
    CountryPanel,
}

/// Description of one parsed dataset. Units are declared by the caller, never inferred.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub kind: DatasetKind,
    pub year: Option<i32>,
    pub source: String,
    pub unit: String,
    pub rows: usize,
}

fn parse_error(line: usize, column: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse { location: Location { file: None, line, column }, message: message.into() }
}

/// Attaches a file name to parse errors.
pub fn with_file<T>(res: Result<T>, file: &str) -> Result<T> {
    res.map_err(|e| match e {
        Error::Parse { mut location, message } => {
            location.file = Some(file.to_string());
            Error::Parse { location, message }
        }
        other => other,
    })
}

fn looks_numeric(field: &str) -> bool {
    !field.is_empty()
        && field.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
        && field.bytes().any(|b| b.is_ascii_digit())
}

fn number<S: Scalar>(field: &str, line: usize, column: usize) -> Result<S> {
    let parsed = if looks_numeric(field) { field.parse::<S>().ok() } else { None };
    match parsed {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(line, Some(column), format!("{field:?} is not a finite decimal number"))),
    }
}

struct Row {
    line: usize,
    fields: Vec<String>,
}

fn rows(text: &str) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, None, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(Row { line, fields: rec.iter().map(str::to_string).collect() });
    }
    Ok(out)
}

fn expect_columns(row: &Row, n: usize) -> Result<()> {
    if row.fields.len() != n {
        return Err(parse_error(row.line, None, format!("expected {n} column(s), found {}", row.fields.len())));
    }
    Ok(())
}

/// Rows after an optional header, recognised by a non-numeric first field.
fn data_rows(text: &str) -> Result<Vec<Row>> {
    let mut all = rows(text)?;
    if all.first().is_some_and(|r| !looks_numeric(&r.fields[0])) {
        all.remove(0);
    }
    Ok(all)
}

/// One non-negative amount per line, optional header.
pub fn parse_samples<S: Scalar>(text: &str, unit: &str) -> Result<MoneySample<S>> {
    let mut values = Vec::new();
    for row in data_rows(text)? {
        expect_columns(&row, 1)?;
        let v: S = number(&row.fields[0], row.line, 1)?;
        if v < S::zero() {
            return Err(parse_error(row.line, Some(1), format!("negative amount {v}")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::NoData);
    }
    MoneySample::new(values, unit)
}

/// Two columns `r,c` with `c` the fraction of the population at or above `r`; optional header.
pub fn parse_ccdf<S: Scalar>(text: &str) -> Result<CcdfCurve<S>> {
    let mut points: Vec<(S, S)> = Vec::new();
    for row in data_rows(text)? {
        expect_columns(&row, 2)?;
        let r: S = number(&row.fields[0], row.line, 1)?;
        let c: S = number(&row.fields[1], row.line, 2)?;
        if r < S::zero() {
            return Err(parse_error(row.line, Some(1), format!("negative income {r}")));
        }
        if c < S::zero() || c > S::one() {
            return Err(parse_error(row.line, Some(2), format!("fraction {c} outside [0, 1]")));
        }
        if let Some(&(pr, pc)) = points.last() {
            if r <= pr {
                return Err(parse_error(row.line, Some(1), format!("income {r} does not increase (previous {pr})")));
            }
            if c > pc {
                return Err(parse_error(row.line, Some(2), format!("fraction {c} increases (previous {pc})")));
            }
        } else if r == S::zero() && c != S::one() {
            return Err(parse_error(row.line, Some(2), "a curve starting at r = 0 must start at c = 1"));
        }
        points.push((r, c));
    }
    CcdfCurve::new(points)
}

/// Country records of one year, plus codes dropped for zero population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelYear<S> {
    pub year: i32,
    pub records: Vec<CountryRecord<S>>,
    pub rejected: Vec<String>,
}

struct PanelColumns {
    code: usize,
    population: usize,
    quantity: usize,
    year: Option<usize>,
}

fn panel_columns(header: &Row) -> Result<PanelColumns> {
    let find = |name: &str| header.fields.iter().position(|f| f.eq_ignore_ascii_case(name));
    let need = |name: &str| {
        find(name).ok_or_else(|| parse_error(header.line, None, format!("header lacks a {name:?} column")))
    };
    Ok(PanelColumns { code: need("code")?, population: need("population")?, quantity: need("quantity")?, year: find("year") })
}

fn parse_panel<S: Scalar>(text: &str, fixed_year: Option<i32>) -> Result<BTreeMap<i32, PanelYear<S>>> {
    let all = rows(text)?;
    let (header, body) = all.split_first().ok_or(Error::NoData)?;
    let cols = panel_columns(header)?;
    let width = header.fields.len();
    let mut years: BTreeMap<i32, PanelYear<S>> = BTreeMap::new();
    let mut seen: HashSet<(i32, String)> = HashSet::new();
    for row in body {
        expect_columns(row, width)?;
        let year = match (cols.year, fixed_year) {
            (Some(c), want) => {
                let y: i32 = row.fields[c]
                    .parse()
                    .map_err(|_| parse_error(row.line, Some(c + 1), format!("{:?} is not a year", row.fields[c])))?;
                if want.is_some_and(|w| w != y) {
                    continue;
                }
                y
            }
            (None, Some(y)) => y,
            (None, None) => return Err(parse_error(header.line, None, "panel has no year column")),
        };
        let code = row.fields[cols.code].clone();
        if code.is_empty() {
            return Err(parse_error(row.line, Some(cols.code + 1), "empty country code"));
        }
        let population: S = number(&row.fields[cols.population], row.line, cols.population + 1)?;
        let quantity: S = number(&row.fields[cols.quantity], row.line, cols.quantity + 1)?;
        if population < S::zero() {
            return Err(parse_error(row.line, Some(cols.population + 1), format!("negative population {population}")));
        }
        if quantity < S::zero() {
            return Err(parse_error(row.line, Some(cols.quantity + 1), format!("negative quantity {quantity}")));
        }
        if !seen.insert((year, code.clone())) {
            return Err(Error::DuplicateCode { code, year: Some(year) });
        }
        let entry = years.entry(year).or_insert_with(|| PanelYear { year, records: Vec::new(), rejected: Vec::new() });
        if population == S::zero() {
            log::warn!("line {}: {code} has zero population in {year}; dropped", row.line);
            entry.rejected.push(code);
            continue;
        }
        entry.records.push(CountryRecord::new(code, population, quantity)?);
    }
    Ok(years)
}

/// Country records for one year. The header must name `code`, `population` and
/// `quantity`; when it also has `year`, only rows of `year` are kept.
pub fn parse_country_panel<S: Scalar>(text: &str, year: i32) -> Result<PanelYear<S>> {
    let mut years = parse_panel(text, Some(year))?;
    years.remove(&year).ok_or(Error::NoData)
}

/// Splits a panel with a `year` column into one record set per year, sorted by year.
pub fn parse_country_panel_years<S: Scalar>(text: &str) -> Result<Vec<PanelYear<S>>> {
    let years = parse_panel(text, None)?;
    if years.is_empty() {
        return Err(Error::NoData);
    }
    Ok(years.into_values().collect())
}

pub fn write_samples<S: Scalar>(samples: &MoneySample<S>) -> String {
    let mut out = String::from("income\n");
    for v in samples.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_ccdf<S: Scalar>(curve: &CcdfCurve<S>) -> String {
    write_pairs("r", "c", curve.points().iter().copied())
}

pub fn write_country_panel<S: Scalar>(years: &[PanelYear<S>]) -> String {
    let mut out = String::from("year,code,population,quantity\n");
    for y in years {
        for r in &y.records {
            let _ = writeln!(out, "{},{},{},{}", y.year, r.code, r.population, r.quantity);
        }
    }
    out
}

/// Two-column delimited text with a header row.
pub fn write_pairs<A: std::fmt::Display, B: std::fmt::Display>(
    x_name: &str,
    y_name: &str,
    rows: impl IntoIterator<Item = (A, B)>,
) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for (a, b) in rows {
        let _ = writeln!(out, "{a},{b}");
    }
    out
}

/// Loads every `<SOURCE>_<YEAR>.csv` sample file in `dir`, sorted by file name.
///
/// One file per country-year, as in multi-country survey collections. Files
/// that do not match the naming pattern are skipped.
pub fn load_sample_batch<S: Scalar>(dir: &Path, unit: &str) -> Result<Vec<(DatasetManifest, MoneySample<S>)>> {
    let io_err = |e: std::io::Error| Error::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    let mut out = Vec::new();
    for name in names {
        let stem = &name[..name.len() - 4];
        let Some((source, year)) = stem.rsplit_once('_') else { continue };
        let Ok(year) = year.parse::<i32>() else { continue };
        let path = dir.join(&name);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        let sample = with_file(parse_samples::<S>(&text, unit), &name)?;
        let manifest = DatasetManifest {
            kind: DatasetKind::Samples,
            year: Some(year),
            source: source.to_string(),
            unit: unit.to_string(),
            rows: sample.len(),
        };
        out.push((manifest, sample));
    }
    Ok(out)
}
