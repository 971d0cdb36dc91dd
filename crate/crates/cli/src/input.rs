//! Sample files: one point per row, comma-separated coordinates.
//!
//! Blank lines and lines starting with `#` are skipped. A first row that is
//! not numeric is taken as a header.

use std::path::Path;

use aswd::SampleSet;

use crate::error::{CliError, CliResult};

pub fn parse_samples(text: &str, source: &str) -> CliResult<SampleSet> {
    let err = |line: Option<usize>, message: String| CliError::Input {
        source: source.to_string(),
        line,
        message,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header_allowed = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if header_allowed => {
                header_allowed = false;
                continue;
            }
            Err(_) => {
                let bad = fields.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or(&"");
                return Err(err(Some(line_no), format!("not a number: {bad:?}")));
            }
        };
        header_allowed = false;
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(err(Some(line_no), format!("non-finite coordinate {v}")));
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(err(
                    Some(line_no),
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(None, "no sample rows".into()));
    }
    SampleSet::from_rows(&rows).map_err(|e| err(None, e.to_string()))
}

pub fn read_samples(path: &Path) -> CliResult<SampleSet> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        source: source.clone(),
        line: None,
        message: e.to_string(),
    })?;
    parse_samples(&text, &source)
}

/// Writes samples in the format [`parse_samples`] reads.
pub fn samples_csv(samples: &SampleSet) -> String {
    let mut out = String::new();
    for i in 0..samples.len() {
        let row: Vec<String> = samples.point(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_comments_and_blank_lines() {
        let s = parse_samples("# points\nx,y\n\n1,2\n3.5, -4\n", "t").unwrap();
        assert_eq!((s.len(), s.dim()), (2, 2));
        assert_eq!(s.point(1), &[3.5, -4.0]);
    }

    #[test]
    fn ragged_row_reports_row_number() {
        let e = parse_samples("1,2\n3,4\n5\n", "t").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(matches!(e, CliError::Input { line: Some(3), .. }), "{e}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_samples("", "t").is_err());
        assert!(parse_samples("a,b\nc,d\n", "t").is_err());
        assert!(parse_samples("1,nan\n", "t").is_err());
        assert!(parse_samples("1,2\n1,x\n", "t").is_err());
    }

    #[test]
    fn round_trip() {
        let s = SampleSet::from_rows(&[vec![0.1, -3e-300], vec![1.0 / 3.0, 7.0]]).unwrap();
        assert_eq!(parse_samples(&samples_csv(&s), "t").unwrap(), s);
    }
}
