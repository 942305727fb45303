//! Transfer plans as JSON lines: a header record, then one record per target id.

use serde::{Deserialize, Serialize};

use super::provenance::Provenance;
use super::FormatError;
use crate::transfer::{PlanEntry, TransferPlan};

pub const PLAN_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanHeader {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub method: String,
    pub src_vocab_hash: String,
    pub tgt_vocab_hash: String,
    pub seed: u64,
    pub flags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: PlanHeader,
}

pub fn format_plan(plan: &TransferPlan, method: &str, provenance: &Provenance) -> String {
    let header = HeaderLine {
        header: PlanHeader {
            format_version: PLAN_FORMAT_VERSION,
            tool_version: provenance.tool_version.clone(),
            config_hash: provenance.config_hash.clone(),
            method: method.to_owned(),
            src_vocab_hash: hex::encode(plan.src_vocab_hash),
            tgt_vocab_hash: hex::encode(plan.tgt_vocab_hash),
            seed: plan.seed,
            flags: plan.flags.clone(),
        },
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for e in &plan.entries {
        out.push_str(&serde_json::to_string(e).expect("entry serializes"));
        out.push('\n');
    }
    out
}

fn parse_hash(s: &str) -> Result<[u8; 32], FormatError> {
    hex::decode(s)
        .ok()
        .and_then(|v| <[u8; 32]>::try_from(v).ok())
        .ok_or_else(|| FormatError::Malformed(format!("bad vocabulary hash {s:?}")))
}

pub fn parse_plan(text: &str) -> Result<(PlanHeader, TransferPlan), FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| FormatError::Malformed("empty plan".into()))?;
    let header = serde_json::from_str::<HeaderLine>(first)
        .map_err(|e| FormatError::Malformed(format!("line 1: plan header: {e}")))?
        .header;
    if header.format_version != PLAN_FORMAT_VERSION {
        return Err(FormatError::Malformed(format!(
            "unsupported plan format version {}",
            header.format_version
        )));
    }
    let entries = lines
        .map(|(i, l)| {
            serde_json::from_str::<PlanEntry>(l).map_err(|e| FormatError::Malformed(format!("line {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let plan = TransferPlan {
        src_vocab_hash: parse_hash(&header.src_vocab_hash)?,
        tgt_vocab_hash: parse_hash(&header.tgt_vocab_hash)?,
        seed: header.seed,
        flags: header.flags.clone(),
        entries,
    };
    plan.check_complete(plan.entries.len())?;
    Ok((header, plan))
}
