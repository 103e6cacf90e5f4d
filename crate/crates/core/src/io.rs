//! Serialization.
//!
//! Families are JSON lines, one member per line:
//!
//! * sequences: `{"entries":[1,0,2]}`
//! * labeled sets: `{"pairs":[[1,1],[3,2]]}`
//! * subsets: `{"set":[1,3]}`
//!
//! Blank lines are skipped. Readers validate every member against the
//! declared universe.
//!
//! A weighted family is one JSON document:
//! `{"universe":2,"members":[{"set":[],"weight":["1","1"]},..]}`. Numerator
//! and denominator are decimal strings (numbers are accepted on input), and
//! weights are written in lowest terms, so a write/read round trip is exact.

use crate::bitset::BitSet;
use crate::compression::{LabeledFamily, Subset, SubsetFamily};
use crate::error::{Error, Result};
use crate::model::{IpSequence, LabeledSet, PartialSequence, Space};
use crate::search::ClassificationSummary;
use crate::weighted::{Weight, WeightedFamily};
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

#[derive(Serialize, Deserialize)]
struct SequenceLine {
    entries: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct LabeledLine {
    pairs: Vec<(usize, u32)>,
}

#[derive(Serialize, Deserialize)]
struct SubsetLine {
    set: Vec<usize>,
}

fn parse_lines<R, T, F>(reader: R, mut each: F) -> Result<()>
where
    R: BufRead,
    T: for<'de> Deserialize<'de>,
    F: FnMut(usize, T) -> Result<()>,
{
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let item: T = serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        each(i + 1, item).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
    }
    Ok(())
}

fn write_line<W: Write, T: Serialize>(out: &mut W, item: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, item)?;
    out.write_all(b"\n")
}

/// Reads members of `S_c^(r)`.
pub fn read_sequences<R: BufRead>(reader: R, caps: &IpSequence, rank: usize) -> Result<Vec<PartialSequence>> {
    let mut out = Vec::new();
    parse_lines(reader, |_, l: SequenceLine| {
        out.push(PartialSequence::in_space(caps, rank, l.entries)?);
        Ok(())
    })?;
    Ok(out)
}

pub fn write_sequences<'a, W, I>(out: &mut W, seqs: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PartialSequence>,
{
    for s in seqs {
        write_line(
            out,
            &SequenceLine {
                entries: s.entries().to_vec(),
            },
        )?;
    }
    Ok(())
}

pub fn read_labeled<R: BufRead>(reader: R, caps: &IpSequence) -> Result<LabeledFamily> {
    let mut members = Vec::new();
    parse_lines(reader, |_, l: LabeledLine| {
        members.push(LabeledSet::new(l.pairs)?);
        Ok(())
    })?;
    LabeledFamily::new(caps.clone(), members)
}

pub fn write_labeled<W: Write>(out: &mut W, family: &LabeledFamily) -> std::io::Result<()> {
    for l in family.iter() {
        write_line(out, &LabeledLine { pairs: l.pairs().to_vec() })?;
    }
    Ok(())
}

/// Reads a family of subsets of `[n]`.
pub fn read_subsets<R: BufRead>(reader: R, n: usize) -> Result<SubsetFamily> {
    let mut members = Vec::new();
    parse_lines(reader, |_, l: SubsetLine| {
        if let Some(&e) = l.set.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::ElementOutOfRange { element: e, universe: n });
        }
        members.push(Subset::from_elements(l.set));
        Ok(())
    })?;
    SubsetFamily::new(n, members)
}

pub fn write_subsets<W: Write>(out: &mut W, family: &SubsetFamily) -> std::io::Result<()> {
    for s in family.iter() {
        write_line(out, &SubsetLine { set: s.elements().collect() })?;
    }
    Ok(())
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            n.to_string().parse().map_err(|_| Error::Parse(format!("not an integer: {n}")))
        }
        other => Err(Error::Parse(format!("not an integer: {other}"))),
    }
}

fn parse_weight(v: &Value) -> Result<Weight> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("weight must be [numerator, denominator], got {v}")))?;
    let num = parse_int(&pair[0])?;
    let den = parse_int(&pair[1])?;
    if den == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Weight::new(num, den))
}

pub fn read_weighted(text: &str) -> Result<WeightedFamily> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = doc
        .get("universe")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"universe\"".into()))? as usize;
    let members = doc
        .get("members")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"members\"".into()))?;
    let mut weights = BTreeMap::new();
    for m in members {
        let set: Vec<usize> = serde_json::from_value(m.get("set").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("bad \"set\": {e}")))?;
        if let Some(&e) = set.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::ElementOutOfRange { element: e, universe: n });
        }
        let w = parse_weight(m.get("weight").unwrap_or(&Value::Null))?;
        let s = Subset::from_elements(set);
        if weights.insert(s, w).is_some() {
            return Err(Error::Parse(format!("duplicate member {s}")));
        }
    }
    let family = SubsetFamily::new(n, weights.keys().copied())?;
    WeightedFamily::new(family, weights)
}

pub fn weighted_to_json(wf: &WeightedFamily) -> Value {
    let members: Vec<Value> = wf
        .weights()
        .iter()
        .map(|(s, w)| {
            serde_json::json!({
                "set": s.elements().collect::<Vec<_>>(),
                "weight": [w.numer().to_string(), w.denom().to_string()],
            })
        })
        .collect();
    serde_json::json!({ "universe": wf.universe(), "members": members })
}

pub fn write_weighted(wf: &WeightedFamily) -> String {
    weighted_to_json(wf).to_string()
}

/// Integers as JSON numbers when they fit in 64 bits, decimal strings
/// otherwise.
pub fn big_to_json(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

/// The instance a search ran on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub caps: Vec<u32>,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caps2: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rank2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
}

impl Instance {
    pub fn label(&self) -> String {
        let join = |c: &[u32]| c.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let mut s = format!("c=({}) r={}", join(&self.caps), self.rank);
        if let Some(d) = &self.caps2 {
            s.push_str(&format!(" d=({}) s={}", join(d), self.rank2.unwrap_or(self.rank)));
        }
        if let Some(k) = self.k {
            s.push_str(&format!(" k={k}"));
        }
        s
    }
}

/// One search result. Maximizers list each side's members as entry vectors.
#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub instance: Instance,
    pub bound: Value,
    pub max: Value,
    pub maximizer_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximizers: Option<Vec<Vec<Vec<Vec<u32>>>>>,
    pub classification_summary: Option<ClassificationSummary>,
}

impl SearchReport {
    pub const CSV_HEADER: [&'static str; 6] = ["instance", "bound", "max", "maximizer_count", "stars", "non_stars"];

    pub fn csv_row(&self) -> [String; 6] {
        let plain = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let (stars, non) = match &self.classification_summary {
            Some(s) => (s.stars.to_string(), s.non_stars.to_string()),
            None => (String::new(), String::new()),
        };
        [
            self.instance.label(),
            plain(&self.bound),
            plain(&self.max),
            self.maximizer_count.to_string(),
            stars,
            non,
        ]
    }
}

/// Members of `space` selected by `set`, as entry vectors.
pub fn side_entries(space: &Space, set: &BitSet) -> Vec<Vec<u32>> {
    set.iter().map(|i| space.get(i).entries().to_vec()).collect()
}
