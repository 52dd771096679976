use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pfsp::{Instance, Time};

/// Instance file layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Header lines, a line starting with `n m`, then `m` rows of `n` times.
    Taillard,
    /// `n m`, then one line per job of `m` (machine, time) pairs.
    Vrf,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "taillard" | "ta" => Ok(Self::Taillard),
            "vrf" => Ok(Self::Vrf),
            _ => Err(format!("unknown instance format '{s}'")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Taillard => "taillard",
            Self::Vrf => "vrf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    DimensionMismatch { expected: usize, found: usize },
    NonInteger(String),
    Truncated,
    InvalidValue(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            Self::NonInteger(tok) => write!(f, "'{tok}' is not a non-negative integer"),
            Self::Truncated => f.write_str("unexpected end of file"),
            Self::InvalidValue(msg) => f.write_str(msg),
        }
    }
}

/// Parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end_col: usize,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().map(|(i, raw)| {
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, c) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token { text: &raw[s..pos], col: s + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        Line { number: i + 1, tokens, end_col: raw.len() + 1 }
    })
}

fn int(line: &Line<'_>, tok: &Token<'_>) -> Result<u64, ParseError> {
    tok.text.parse().map_err(|_| ParseError {
        line: line.number,
        col: tok.col,
        kind: ParseErrorKind::NonInteger(tok.text.to_string()),
    })
}

fn is_header(line: &Line<'_>) -> bool {
    line.tokens.first().is_some_and(|t| t.text.starts_with(|c: char| c.is_ascii_alphabetic()))
}

fn expect_count(line: &Line<'_>, expected: usize) -> Result<(), ParseError> {
    let found = line.tokens.len();
    if found == expected {
        return Ok(());
    }
    let col = line.tokens.get(expected).map_or(line.end_col, |t| t.col);
    Err(ParseError { line: line.number, col, kind: ParseErrorKind::DimensionMismatch { expected, found } })
}

fn dims(line: &Line<'_>, min_tokens: usize) -> Result<(usize, usize), ParseError> {
    if line.tokens.len() < min_tokens {
        return Err(ParseError {
            line: line.number,
            col: line.end_col,
            kind: ParseErrorKind::DimensionMismatch { expected: min_tokens, found: line.tokens.len() },
        });
    }
    let n = int(line, &line.tokens[0])?;
    let m = int(line, &line.tokens[1])?;
    for (v, tok) in [(n, &line.tokens[0]), (m, &line.tokens[1])] {
        if v == 0 {
            return Err(ParseError {
                line: line.number,
                col: tok.col,
                kind: ParseErrorKind::InvalidValue("dimensions must be positive".into()),
            });
        }
    }
    Ok((n as usize, m as usize))
}

fn truncated(text: &str) -> ParseError {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, str::len) + 1;
    ParseError { line, col, kind: ParseErrorKind::Truncated }
}

fn reject_trailing<'a>(rest: impl Iterator<Item = Line<'a>>) -> Result<(), ParseError> {
    for line in rest {
        if let Some(tok) = line.tokens.first() {
            return Err(ParseError {
                line: line.number,
                col: tok.col,
                kind: ParseErrorKind::InvalidValue("unexpected data after the last row".into()),
            });
        }
    }
    Ok(())
}

/// Parses an instance file. Counts are validated exactly.
pub fn parse_instance(bytes: &[u8], format: Format) -> Result<Instance, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        ParseError { line, col: 1, kind: ParseErrorKind::InvalidValue("file is not UTF-8".into()) }
    })?;
    match format {
        Format::Taillard => parse_taillard(text),
        Format::Vrf => parse_vrf(text),
    }
}

fn parse_taillard(text: &str) -> Result<Instance, ParseError> {
    let mut it = lines(text).filter(|l| !l.tokens.is_empty() && !is_header(l));
    let head = it.next().ok_or_else(|| truncated(text))?;
    let (n, m) = dims(&head, 2)?;
    let mut times = Vec::with_capacity(n * m);
    for _ in 0..m {
        let line = it.next().ok_or_else(|| truncated(text))?;
        expect_count(&line, n)?;
        for tok in &line.tokens {
            times.push(int(&line, tok)?);
        }
    }
    reject_trailing(it)?;
    Ok(Instance::from_flat(n, m, times).expect("dimensions checked"))
}

fn parse_vrf(text: &str) -> Result<Instance, ParseError> {
    let mut it = lines(text).filter(|l| !l.tokens.is_empty());
    let head = it.next().ok_or_else(|| truncated(text))?;
    let (n, m) = dims(&head, 2)?;
    expect_count(&head, 2)?;
    let mut times: Vec<Option<Time>> = vec![None; n * m];
    for job in 0..n {
        let line = it.next().ok_or_else(|| truncated(text))?;
        expect_count(&line, 2 * m)?;
        for pair in line.tokens.chunks(2) {
            let machine = int(&line, &pair[0])? as usize;
            let time = int(&line, &pair[1])?;
            let bad = |msg: String| ParseError {
                line: line.number,
                col: pair[0].col,
                kind: ParseErrorKind::InvalidValue(msg),
            };
            if machine >= m {
                return Err(bad(format!("machine index {machine} out of range 0..{m}")));
            }
            let slot = &mut times[machine * n + job];
            if slot.is_some() {
                return Err(bad(format!("machine {machine} listed twice for job {job}")));
            }
            *slot = Some(time);
        }
    }
    reject_trailing(it)?;
    let times = times.into_iter().map(|t| t.expect("every machine listed once")).collect();
    Ok(Instance::from_flat(n, m, times).expect("dimensions checked"))
}

/// Serializes an instance in the given format; `parse_instance` reads it back.
pub fn write_instance(instance: &Instance, format: Format) -> String {
    let (n, m) = (instance.jobs(), instance.machines());
    let mut out = String::new();
    match format {
        Format::Taillard => {
            out.push_str("number of jobs, number of machines :\n");
            let _ = writeln!(out, "{n:12}{m:12}");
            out.push_str("processing times :\n");
            for row in instance.rows() {
                let cells: Vec<String> = row.iter().map(|t| format!("{t:3}")).collect();
                out.push_str(&cells.concat());
                out.push('\n');
            }
        }
        Format::Vrf => {
            let _ = writeln!(out, "{n} {m}");
            for j in 0..n {
                let pairs: Vec<String> =
                    instance.job_times(j).iter().enumerate().map(|(i, t)| format!("{i} {t}")).collect();
                out.push_str(&pairs.join(" "));
                out.push('\n');
            }
        }
    }
    out
}
