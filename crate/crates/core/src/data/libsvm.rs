//! `label idx:val idx:val ...` lines.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::sparse::{Label, LabeledExample, SparseVector};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses one line. `line_no` is only used in error positions; columns are
/// 1-based byte offsets of the offending token. Text after `#` is ignored.
pub fn parse_libsvm_line(line: &str, line_no: usize) -> Result<LabeledExample> {
    let body = line.split('#').next().unwrap_or("");
    let mut toks: Vec<(usize, &str)> = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push((s, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push((s, &body[s..]));
    }
    let Some(&(col, label_tok)) = toks.first() else {
        return Err(parse_err(line_no, 1, "empty line"));
    };
    let label = match label_tok {
        "+1" | "1" => Label::Positive,
        "-1" | "0" => Label::Negative,
        other => return Err(parse_err(line_no, col + 1, format!("bad label {other:?}"))),
    };
    let mut pairs = Vec::with_capacity(toks.len() - 1);
    for &(col, tok) in &toks[1..] {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, col + 1, format!("expected idx:val, got {tok:?}")))?;
        let id: u32 = idx.parse().map_err(|e: std::num::ParseIntError| {
            parse_err(line_no, col + 1, format!("bad feature index {idx:?}: {e}"))
        })?;
        let v: f64 = val
            .parse()
            .map_err(|_| parse_err(line_no, col + idx.len() + 2, format!("bad value {val:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(line_no, col + idx.len() + 2, format!("non-finite value {val:?}")));
        }
        pairs.push((id, v));
    }
    let features = SparseVector::from_pairs(pairs).map_err(|e| parse_err(line_no, col + 1, e.to_string()))?;
    Ok(LabeledExample { label, features })
}

/// The inverse of [`parse_libsvm_line`], with `+1` / `-1` labels.
pub fn format_libsvm_line(ex: &LabeledExample) -> String {
    let mut s = String::from(match ex.label {
        Label::Positive => "+1",
        Label::Negative => "-1",
    });
    for (f, v) in ex.features.iter() {
        s.push_str(&format!(" {f}:{v}"));
    }
    s
}

/// Streams examples from a reader, skipping blank and comment-only lines.
pub struct LibsvmReader<R> {
    inner: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> LibsvmReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            line_no: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for LibsvmReader<R> {
    type Item = Result<LabeledExample>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line_no += 1;
            let content = self.buf.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            return Some(parse_libsvm_line(&self.buf, self.line_no));
        }
    }
}
