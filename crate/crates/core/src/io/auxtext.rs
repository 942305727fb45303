//! Text format for auxiliary vectors: one `token v1 … vd` line per token.
//!
//! Tokens are escaped so they survive whitespace splitting: `\\` for a
//! backslash, `\s` for a space, and `\t`, `\n`, `\r`, `\f`. Fields are
//! separated by ASCII whitespace only. A leading `count dim` header
//! line, as written by common word-vector tools, is accepted on import, as is
//! a leading `#aux` provenance comment.

use super::provenance::Provenance;
use crate::transfer::{AuxiliaryEmbeddings, TransferError};

pub const AUX_FORMAT_VERSION: u32 = 1;
const COMMENT: &str = "#aux ";

pub fn escape_token(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\x0c' => out.push_str("\\f"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_token(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('s') => out.push(' '),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('f') => out.push('\x0c'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

pub fn format_aux(aux: &AuxiliaryEmbeddings, provenance: Option<&Provenance>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        out.push_str(&format!(
            "{COMMENT}format_version={AUX_FORMAT_VERSION} tool_version={} config_hash={}\n",
            p.tool_version, p.config_hash
        ));
    }
    for (token, v) in aux.iter() {
        out.push_str(&escape_token(token));
        for x in v {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

fn header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    let n = it.next()?.parse().ok()?;
    let d = it.next()?.parse().ok()?;
    it.next().is_none().then_some((n, d))
}

fn aux_err(line: usize, message: impl Into<String>) -> TransferError {
    TransferError::AuxFormat {
        line,
        message: message.into(),
    }
}

/// Parses the text format. Line numbers in errors are one-based.
pub fn parse_aux(text: &str) -> Result<AuxiliaryEmbeddings, TransferError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(i, l)| !l.trim_ascii().is_empty() && !(*i == 1 && l.starts_with(COMMENT)))
        .collect();
    let mut rest = lines.as_slice();
    let mut declared = None;
    if let Some(&(_, first)) = rest.first() {
        if let Some((n, d)) = header(first) {
            // A two-field line is also a valid 1-d entry; with d = 1 it is a
            // header only when the rest of the file agrees with it.
            let next_width = rest.get(1).map(|(_, l)| l.split_ascii_whitespace().count());
            if d != 1 || (next_width == Some(2) && n == rest.len() - 1) {
                declared = Some((n, d));
                rest = &rest[1..];
            }
        }
    }

    let mut aux: Option<AuxiliaryEmbeddings> = declared.map(|(_, d)| AuxiliaryEmbeddings::new(d));
    for &(no, line) in rest {
        let mut fields = line.split_ascii_whitespace();
        let raw = fields.next().expect("line is not blank");
        let token = unescape_token(raw).map_err(|m| aux_err(no, m))?;
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| aux_err(no, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(aux_err(no, "token has no vector"));
        }
        let table = aux.get_or_insert_with(|| AuxiliaryEmbeddings::new(values.len()));
        if values.len() != table.dim() {
            return Err(aux_err(
                no,
                format!("expected {} values, found {}", table.dim(), values.len()),
            ));
        }
        table.insert(token, values).map_err(|e| aux_err(no, e.to_string()))?;
    }
    let aux = aux.ok_or_else(|| aux_err(0, "no vectors"))?;
    if let Some((n, _)) = declared {
        if n != aux.len() {
            return Err(aux_err(
                1,
                format!("header declares {n} vectors, file has {}", aux.len()),
            ));
        }
    }
    Ok(aux)
}
