//! Plain-text record of trained network parameters.
//!
//! ```text
//! aswd-network v1
//! mode injective-concat
//! lambda 0.1
//! weights 2 2
//! 0.5 -0.25
//! 0.125 1
//! biases 2
//! 0 0
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! record reloads to a bit-identical network.

use super::network::{AugmentationMode, AugmentationNetwork};
use crate::autodiff::Tensor;
use crate::error::{Error, Result};

const MAGIC: &str = "aswd-network v1";

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

impl AugmentationNetwork {
    pub fn to_record(&self) -> String {
        let d = self.input_dim();
        let mut out = format!(
            "{MAGIC}\nmode {}\nlambda {:?}\nweights {d} {d}\n",
            self.mode().as_str(),
            self.lambda()
        );
        for i in 0..d {
            out.push_str(&join(self.weights().row(i)));
            out.push('\n');
        }
        out.push_str(&format!("biases {d}\n{}\n", join(self.biases().data())));
        out
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (n, first) = lines.next_line()?;
        if first != MAGIC {
            return Err(Error::parse(n, format!("expected header {MAGIC:?}")));
        }
        let (n, mode) = lines.keyed("mode")?;
        let mode = AugmentationMode::parse(mode)
            .ok_or_else(|| Error::parse(n, format!("unknown mode {mode:?}")))?;
        let (n, lambda) = lines.keyed("lambda")?;
        let lambda = parse_float(n, lambda)?;
        let (n, dims) = lines.keyed("weights")?;
        let dims = parse_counts(n, dims, 2)?;
        let (rows, cols) = (dims[0], dims[1]);
        if rows != cols || rows == 0 {
            return Err(Error::parse(n, format!("weights must be square and nonempty, got {rows}x{cols}")));
        }
        let mut w = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (n, row) = lines.next_line()?;
            w.extend(parse_row(n, row, cols)?);
        }
        let (n, dims) = lines.keyed("biases")?;
        let len = parse_counts(n, dims, 1)?[0];
        if len != cols {
            return Err(Error::parse(n, format!("biases length {len} for {cols} columns")));
        }
        let (n, row) = lines.next_line()?;
        let b = parse_row(n, row, len)?;
        if let Some((n, extra)) = lines.next_nonempty() {
            return Err(Error::parse(n, format!("unexpected trailing content {extra:?}")));
        }
        Self::new(
            Tensor::matrix(rows, cols, w).map_err(|e| Error::parse(n, e.to_string()))?,
            Tensor::vector(b).map_err(|e| Error::parse(n, e.to_string()))?,
            mode,
            lambda,
        )
        .map_err(|e| Error::parse(n, e.to_string()))
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_nonempty(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.next_nonempty()
            .ok_or_else(|| Error::parse(self.last + 1, "unexpected end of record"))
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok((n, rest.trim())),
            _ => Err(Error::parse(n, format!("expected `{key} ...`"))),
        }
    }
}

fn parse_float(line: usize, s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("invalid number {s:?}"))),
    }
}

fn parse_counts(line: usize, s: &str, expected: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::parse(line, format!("invalid extent {t:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != expected {
        return Err(Error::parse(line, format!("expected {expected} extents, got {}", v.len())));
    }
    if v.iter().any(|&e| e > 4096) {
        return Err(Error::parse(line, "extent too large"));
    }
    Ok(v)
}

fn parse_row(line: usize, s: &str, expected: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| parse_float(line, t))
        .collect::<Result<_>>()?;
    if v.len() != expected {
        return Err(Error::parse(line, format!("expected {expected} values, got {}", v.len())));
    }
    Ok(v)
}
