//! Exchange formats: sparse vectors as `index,value` CSV, point lists as CSV rows,
//! space specifications as JSON.

use std::io::{Read, Write};
use std::path::Path;

use crate::constructions::SpaceSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::CoordVector;

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Reads `index,value` lines (an optional `index,value` header and `#` comments are skipped).
pub fn read_vector_csv<S: Scalar, R: Read>(r: R, dim: usize) -> Result<CoordVector<S>> {
    let mut entries = Vec::new();
    for (line, rec) in reader(r).records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.iter().all(str::is_empty) || (line == 0 && rec.get(0) == Some("index")) {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected `index,value`", line + 1)));
        }
        let index: usize = rec[0].parse().map_err(|_| Error::Parse(format!("line {}: bad index {:?}", line + 1, &rec[0])))?;
        if index == 0 {
            return Err(Error::Parse(format!("line {}: indices start at 1", line + 1)));
        }
        entries.push((index, S::parse_value(&rec[1])?));
    }
    CoordVector::from_entries(dim, entries)
}

pub fn read_vector_file<S: Scalar>(path: &Path, dim: usize) -> Result<CoordVector<S>> {
    read_vector_csv(std::fs::File::open(path)?, dim)
}

pub fn write_vector_csv<S: Scalar, W: Write>(w: W, v: &CoordVector<S>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "value"]).map_err(csv_err)?;
    for (i, x) in v.entries() {
        out.write_record([i.to_string(), x.to_report_string()]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// One point per CSV row, all rows of equal length.
pub fn read_points_csv<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader(r).records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let p = rec.iter().map(f64::parse_value).collect::<Result<Vec<f64>>>()?;
        if let Some(first) = out.first() {
            if first.len() != p.len() {
                return Err(Error::Parse(format!("line {}: {} values, expected {}", line + 1, p.len(), first.len())));
            }
        }
        out.push(p);
    }
    Ok(out)
}

pub fn read_points_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_points_csv(std::fs::File::open(path)?)
}

/// Inline JSON when `arg` starts with `{`, otherwise a path to a JSON file.
pub fn read_space_spec(arg: &str) -> Result<SpaceSpec> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { std::fs::read_to_string(arg)? };
    SpaceSpec::parse_json(&text)
}

pub fn write_table<W: Write>(w: W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for r in rows {
        out.write_record(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn vector_round_trip() {
        let v: CoordVector<Rational> =
            read_vector_csv("index,value\n# spike\n4, 2\n9,-1/3\n".as_bytes(), 16).unwrap();
        assert_eq!(v.get(9), Rational::from_ratio(-1, 3));
        let mut buf = Vec::new();
        write_vector_csv(&mut buf, &v).unwrap();
        let back: CoordVector<Rational> = read_vector_csv(buf.as_slice(), 16).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(read_vector_csv::<f64, _>("0,1\n".as_bytes(), 4).is_err());
        assert!(read_vector_csv::<f64, _>("5,1\n".as_bytes(), 4).is_err());
        assert!(read_vector_csv::<f64, _>("1,x\n".as_bytes(), 4).is_err());
        assert!(read_points_csv("1,2\n3\n".as_bytes()).is_err());
    }

    #[test]
    fn inline_spec() {
        assert!(read_space_spec(r#"{"kind":"xn","k":2,"N":2,"m":16}"#).is_ok());
    }
}
