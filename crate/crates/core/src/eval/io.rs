//! CSV ingestion and output for datasets and label files.
//!
//! Row and column numbers in parse errors are 1-based file positions.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::generate::LabeledDataset;
use crate::metric::Dataset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// A bare integer is an index, anything else a header name.
    pub fn parse(s: &str) -> Self {
        s.parse()
            .map_or_else(|_| LabelColumn::Name(s.to_string()), LabelColumn::Index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub header: bool,
    pub label_column: Option<LabelColumn>,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            header: true,
            label_column: None,
            delimiter: b',',
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<LabeledDataset> {
    read_csv(File::open(path)?, opts)
}

/// Read a numeric table. Label cells are kept as text; if every label is a
/// non-negative integer those integers become the label ids, otherwise ids
/// are assigned in order of first appearance.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .delimiter(opts.delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let label_idx = match &opts.label_column {
        None => None,
        Some(LabelColumn::Index(i)) => Some(*i),
        Some(LabelColumn::Name(name)) => {
            if !opts.header {
                return Err(Error::param(format!(
                    "label column `{name}` named but the file has no header"
                )));
            }
            let pos = rdr.headers()?.iter().position(|h| h == name);
            Some(pos.ok_or_else(|| {
                Error::param(format!("label column `{name}` not found in header"))
            })?)
        }
    };
    let width = if opts.header {
        Some(rdr.headers()?.len())
    } else {
        None
    };

    let mut points = Vec::new();
    let mut raw_labels = Vec::new();
    let mut expected = width;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let w = *expected.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Parse {
                row: line,
                column: rec.len().min(w) + 1,
                message: format!("expected {w} fields, found {}", rec.len()),
            });
        }
        if let Some(li) = label_idx {
            if li >= w {
                return Err(Error::param(format!(
                    "label column {li} out of range for {w} columns"
                )));
            }
        }
        let mut p = Vec::with_capacity(w);
        for (j, cell) in rec.iter().enumerate() {
            if Some(j) == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                column: j + 1,
                message: format!("`{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: j + 1,
                    message: format!("`{cell}` is not finite"),
                });
            }
            p.push(v);
        }
        points.push(p);
    }
    let dataset = Dataset::new(points)?;
    let (labels, label_names) = if label_idx.is_some() {
        let (ids, names) = encode_labels(&raw_labels);
        (Some(ids), names)
    } else {
        (None, None)
    };
    Ok(LabeledDataset {
        dataset,
        labels,
        label_names,
    })
}

fn encode_labels(raw: &[String]) -> (Vec<usize>, Option<Vec<String>>) {
    if let Ok(ids) = raw
        .iter()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
    {
        return (ids, None);
    }
    let mut map: HashMap<&str, usize> = HashMap::new();
    let mut names = Vec::new();
    let ids = raw
        .iter()
        .map(|s| {
            *map.entry(s).or_insert_with(|| {
                names.push(s.clone());
                names.len() - 1
            })
        })
        .collect();
    (ids, Some(names))
}

/// Write `x0,…,x{d−1}[,label]` with a header. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_csv(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let d = data.dataset.dim();
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    if data.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, p) in data.dataset.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        if let Some(l) = &data.labels {
            row.push(match &data.label_names {
                Some(names) => names[l[i]].clone(),
                None => l[i].to_string(),
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels<W: Write>(writer: W, labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "label"])?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([i.to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    write_labels(File::create(path)?, labels)
}

/// Read a `row,label` file. Every row id in `0..n` must appear exactly once;
/// `n` defaults to the number of records.
pub fn read_labels<R: Read>(reader: R, n: Option<usize>) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() != 2 || &header[0] != "row" || &header[1] != "label" {
        return Err(Error::param("labels file must have header `row,label`"));
    }
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let cell = |j: usize| -> Result<usize> {
            let s = rec.get(j).unwrap_or("");
            s.parse().map_err(|_| Error::Parse {
                row: line,
                column: j + 1,
                message: format!("`{s}` is not a non-negative integer"),
            })
        };
        pairs.push((cell(0)?, cell(1)?));
    }
    let n = n.unwrap_or(pairs.len());
    let mut out = vec![None; n];
    for (row, label) in pairs {
        match out.get_mut(row) {
            None => {
                return Err(Error::param(format!(
                    "row {row} out of range for {n} points"
                )))
            }
            Some(Some(_)) => return Err(Error::param(format!("row {row} labelled twice"))),
            Some(slot) => *slot = Some(label),
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::param(format!("row {i} has no label"))))
        .collect()
}

pub fn load_labels(path: impl AsRef<Path>, n: Option<usize>) -> Result<Vec<usize>> {
    read_labels(File::open(path)?, n)
}
