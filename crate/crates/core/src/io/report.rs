//! Metrics reports as JSON and as an aligned-column CSV.

use serde::{Deserialize, Serialize};

use super::provenance::Provenance;
use crate::metrics::{round_half_even, ComparisonTable, CountingConvention};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub tokenizer: String,
    pub vocab_size: u64,
    pub tokens: u64,
    pub cpt: f64,
    pub tpw: f64,
    pub chars: u64,
    pub words: u64,
    pub text_sha256: String,
    pub convention: CountingConvention,
}

/// Counts recovered from each row's rounded ratios, for checking a table
/// against itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub tokenizer: String,
    pub implied_chars: f64,
    pub implied_words: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadFailure {
    pub tokenizer: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub rows: Vec<ReportRow>,
    pub consistency: Vec<ConsistencyRow>,
    pub failures: Vec<LoadFailure>,
}

impl Report {
    pub fn new(table: Option<&ComparisonTable>, failures: Vec<LoadFailure>, provenance: &Provenance) -> Self {
        let rows = table.map(|t| t.rows.as_slice()).unwrap_or_default();
        Self {
            format_version: REPORT_FORMAT_VERSION,
            tool_version: provenance.tool_version.clone(),
            config_hash: provenance.config_hash.clone(),
            rows: rows
                .iter()
                .map(|r| {
                    let m = &r.report;
                    ReportRow {
                        tokenizer: m.tokenizer.clone(),
                        vocab_size: m.vocab_size,
                        tokens: m.tokens,
                        cpt: m.cpt_f64(),
                        tpw: m.tpw_f64(),
                        chars: m.chars,
                        words: m.words,
                        text_sha256: m.text_sha256.clone(),
                        convention: m.convention,
                    }
                })
                .collect(),
            consistency: rows
                .iter()
                .map(|r| ConsistencyRow {
                    tokenizer: r.report.tokenizer.clone(),
                    implied_chars: r.implied_chars,
                    implied_words: r.implied_words,
                })
                .collect(),
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.starts_with(' ') || s.ends_with(' ') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// CSV with columns padded to equal width. Ratios are rounded to two places,
/// ties to even, from the exact counts. `#` lines carry provenance.
pub fn format_csv(table: &ComparisonTable, provenance: &Provenance) -> String {
    let header = [
        "tokenizer",
        "vocab_size",
        "tokens",
        "cpt",
        "tpw",
        "chars",
        "words",
        "text_sha256",
        "convention",
    ];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &table.rows {
        let m = &r.report;
        cells.push(vec![
            csv_field(&m.tokenizer),
            m.vocab_size.to_string(),
            m.tokens.to_string(),
            round_half_even(m.cpt(), 2),
            round_half_even(m.tpw(), 2),
            m.chars.to_string(),
            m.words.to_string(),
            m.text_sha256.clone(),
            m.convention.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!(
        "# tool_version={} config_hash={}\n",
        provenance.tool_version, provenance.config_hash
    );
    for row in &cells {
        let last = row.len() - 1;
        for (c, cell) in row.iter().enumerate() {
            out.push_str(cell);
            if c < last {
                out.push(',');
                let pad = widths[c] - cell.chars().count();
                out.extend(std::iter::repeat_n(' ', pad + 1));
            }
        }
        out.push('\n');
    }
    out
}
