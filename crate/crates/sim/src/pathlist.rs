//! Path-list CSV: one row per propagation path, grouped into drops.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use isi_core::channel::{Path, PathSet};
use isi_core::C64;

pub const PATHLIST_HEADER: [&str; 6] = ["drop_id", "path_id", "gain_re", "gain_im", "delay_ns", "aoa_deg"];

#[derive(Debug, thiserror::Error)]
pub enum PathListError {
    #[error("path list is empty")]
    Empty,
    #[error("header must be `{}`", PATHLIST_HEADER.join(","))]
    Header,
    #[error("row {row}: {reason}")]
    Row { row: u64, reason: String },
    #[error("row {row}: duplicate (drop_id, path_id) = ({drop}, {path})")]
    Duplicate { row: u64, drop: u64, path: u64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn row_error(row: u64, reason: impl Into<String>) -> PathListError {
    PathListError::Row {
        row,
        reason: reason.into(),
    }
}

/// Reads a path list into drops keyed by `drop_id`. Rows may come in any
/// order; paths within a drop are ordered by `path_id`.
///
/// Row numbers in errors count data rows from 1, excluding the header.
pub fn read_pathlist<R: Read>(reader: R) -> Result<BTreeMap<u64, PathSet>, PathListError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(PathListError::Empty),
        Some(h) => h?,
    };
    if header.iter().ne(PATHLIST_HEADER) {
        return Err(PathListError::Header);
    }

    let mut drops: BTreeMap<u64, BTreeMap<u64, Path>> = BTreeMap::new();
    for (i, record) in records.enumerate() {
        let row = i as u64 + 1;
        let record = record?;
        if record.len() != PATHLIST_HEADER.len() {
            return Err(row_error(row, format!("expected 6 columns, found {}", record.len())));
        }
        let int = |k: usize| {
            record[k].trim().parse::<u64>().map_err(|_| {
                row_error(
                    row,
                    format!("{} `{}` is not a non-negative integer", PATHLIST_HEADER[k], &record[k]),
                )
            })
        };
        let real = |k: usize| {
            record[k]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    row_error(
                        row,
                        format!("{} `{}` is not a finite number", PATHLIST_HEADER[k], &record[k]),
                    )
                })
        };
        let (drop, path) = (int(0)?, int(1)?);
        let gain = C64::new(real(2)?, real(3)?);
        let delay_ns = real(4)?;
        let aoa_deg = real(5)?;
        if delay_ns < 0.0 {
            return Err(row_error(row, "delay_ns must be non-negative"));
        }
        if !(0.0..=180.0).contains(&aoa_deg) {
            return Err(row_error(row, "aoa_deg must lie in [0, 180]"));
        }
        let p = Path::new(gain, delay_ns * 1e-9, aoa_deg.to_radians().min(PI))
            .map_err(|e| row_error(row, e.to_string()))?;
        if drops.entry(drop).or_default().insert(path, p).is_some() {
            return Err(PathListError::Duplicate { row, drop, path });
        }
    }
    if drops.is_empty() {
        return Err(PathListError::Empty);
    }
    Ok(drops
        .into_iter()
        .map(|(id, paths)| {
            (
                id,
                PathSet::new(paths.into_values().collect()).expect("every drop has a row"),
            )
        })
        .collect())
}

/// Writes drops with `path_id` numbered from 0 in each drop. Reals use the
/// shortest representation that parses back to the same value.
pub fn write_pathlist<W: Write>(writer: W, drops: &BTreeMap<u64, PathSet>) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(PATHLIST_HEADER)?;
    for (drop, set) in drops {
        for (i, p) in set.paths().iter().enumerate() {
            w.write_record([
                drop.to_string(),
                i.to_string(),
                p.gain().re.to_string(),
                p.gain().im.to_string(),
                (p.delay() * 1e9).to_string(),
                p.aoa().to_degrees().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
