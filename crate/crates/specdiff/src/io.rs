//! CSV ingestion and serialization: one numeric column per series, an
//! optional single header row, blank lines tolerated.

use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use crate::cluster::DistanceMatrix;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn csv_error(path: &Path, row: u64, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        row: row as usize,
        message: message.into(),
    }
}

/// Load one series from a CSV file.
///
/// `column` selects by 0-based index (if it parses as an integer) or by
/// header name; default is the first column. The series label is the
/// header cell when a header row is present, otherwise the file stem.
/// Errors name the offending row (1-based line number).
pub fn load_csv(path: impl AsRef<Path>, column: Option<&str>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => csv_error(path, 0, e.to_string()),
        })?;

    let mut rows: Vec<(u64, StringRecord)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(path, row, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(csv_error(path, 0, "file contains no data"));
    }

    let (first_line, first) = &rows[0];
    let col: usize = match column {
        None => 0,
        Some(sel) => match sel.parse::<usize>() {
            Ok(idx) => idx,
            Err(_) => first
                .iter()
                .position(|c| c == sel)
                .ok_or_else(|| {
                    csv_error(
                        path,
                        *first_line,
                        format!("column {sel:?} not found in header"),
                    )
                })?,
        },
    };

    let cell = |rec: &StringRecord, line: u64| -> Result<String> {
        rec.get(col)
            .map(str::to_string)
            .ok_or_else(|| csv_error(path, line, format!("row has no column {col}")))
    };

    // header detection: a non-numeric first cell in the selected column
    let first_cell = cell(first, *first_line)?;
    let (label, data_rows) = if first_cell.parse::<f64>().is_ok() {
        (file_stem(path), &rows[..])
    } else {
        (first_cell, &rows[1..])
    };

    let mut values = Vec::with_capacity(data_rows.len());
    for (line, rec) in data_rows {
        let c = cell(rec, *line)?;
        let v: f64 = c
            .parse()
            .map_err(|_| csv_error(path, *line, format!("cannot parse {c:?} as a number")))?;
        values.push(v);
    }
    TimeSeries::new(label, values)
}

/// Serialize a series in the format [`load_csv`] reads: the label as the
/// header row, then one value per line at full round-trip precision.
pub fn series_to_csv(series: &TimeSeries) -> String {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    w.write_record([series.label()]).expect("in-memory write");
    for v in series.values() {
        w.write_record([format!("{v}")]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn save_series_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), series_to_csv(series)).map_err(|e| Error::Io {
        path: path.as_ref().to_path_buf(),
        source: e,
    })
}

/// Distance matrix as CSV: header `label,<label1>,<label2>,...`, one row
/// per series.
pub fn matrix_to_csv(m: &DistanceMatrix) -> String {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend(m.labels().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, label) in m.labels().iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend((0..m.len()).map(|j| format!("{}", m.value(i, j))));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Make labels unique, keeping the first occurrence as-is and renaming
/// later duplicates to `name_2`, `name_3`, ... (skipping names already
/// taken).
pub fn dedupe_labels(labels: &[String]) -> Vec<String> {
    let mut taken: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(labels.len());
    for label in labels {
        if taken.insert(label.clone()) {
            out.push(label.clone());
            continue;
        }
        let mut k = 2;
        loop {
            let candidate = format!("{label}_{k}");
            if taken.insert(candidate.clone()) {
                out.push(candidate);
                break;
            }
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new()
            .suffix(".csv")
            .tempfile()
            .unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn plain_numeric_column() {
        let f = write_tmp("1.0\n-1.0\n1.0\n-1.0\n1.0\n-1.0\n1.0\n-1.0\n");
        let s = load_csv(f.path(), None).unwrap();
        assert_eq!(s.n(), 8);
        assert_eq!(s.values()[1], -1.0);
        let stem = f.path().file_stem().unwrap().to_string_lossy().into_owned();
        assert_eq!(s.label(), stem);
    }

    #[test]
    fn header_row_becomes_label() {
        let f = write_tmp("ret\n1\n2\n3\n4\n5\n6\n7\n8\n");
        let s = load_csv(f.path(), None).unwrap();
        assert_eq!(s.label(), "ret");
        assert_eq!(s.n(), 8);
        assert_eq!(s.values()[7], 8.0);
    }

    #[test]
    fn blank_lines_tolerated() {
        let f = write_tmp("ret\n1\n\n2\n3\n4\n\n5\n6\n7\n8\n");
        let s = load_csv(f.path(), None).unwrap();
        assert_eq!(s.n(), 8);
    }

    #[test]
    fn non_numeric_cell_names_row() {
        let f = write_tmp("1.0\n2.0\nabc\n4.0\n5.0\n6.0\n7.0\n8.0\n");
        let err = load_csv(f.path(), None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3"), "{msg}");
        assert!(msg.contains("abc"), "{msg}");
    }

    #[test]
    fn column_by_name_and_index() {
        let content = "a,b\n1,10\n2,20\n3,30\n4,40\n5,50\n6,60\n7,70\n8,81\n";
        let f = write_tmp(content);
        let by_name = load_csv(f.path(), Some("b")).unwrap();
        assert_eq!(by_name.label(), "b");
        assert_eq!(by_name.values()[0], 10.0);
        let by_index = load_csv(f.path(), Some("1")).unwrap();
        assert_eq!(by_index.values(), by_name.values());
        assert!(load_csv(f.path(), Some("missing")).is_err());
    }

    #[test]
    fn too_short_and_constant_rejected() {
        let f = write_tmp("1\n2\n3\n");
        assert!(matches!(
            load_csv(f.path(), None),
            Err(Error::TooShort { .. })
        ));
        let g = write_tmp("5\n5\n5\n5\n5\n5\n5\n5\n");
        assert!(matches!(
            load_csv(g.path(), None),
            Err(Error::Constant { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/nonexistent/nope.csv", None),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn round_trip_full_precision() {
        let values = vec![
            0.1,
            -3.5e-17,
            1.0 / 3.0,
            std::f64::consts::PI,
            2.0_f64.powi(-40),
            9007199254740993.0,
            -0.0,
            42.0,
        ];
        let s = TimeSeries::new("roundtrip", values.clone()).unwrap();
        let f = write_tmp(&series_to_csv(&s));
        let back = load_csv(f.path(), None).unwrap();
        assert_eq!(back.label(), "roundtrip");
        for (a, b) in back.values().iter().zip(&values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn matrix_csv_shape() {
        let m = DistanceMatrix::new(
            vec!["A".into(), "B".into()],
            vec![vec![0.0, 0.25], vec![0.25, 0.0]],
        )
        .unwrap();
        let csv = matrix_to_csv(&m);
        assert_eq!(csv, "label,A,B\nA,0,0.25\nB,0.25,0\n");
    }

    #[test]
    fn dedupe_is_deterministic() {
        let labels: Vec<String> = ["x", "y", "x", "x", "x_2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(dedupe_labels(&labels), vec!["x", "y", "x_2", "x_3", "x_2_2"]);
    }
}
