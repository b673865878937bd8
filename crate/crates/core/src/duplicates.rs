//! Duplicate detection: integers with at least two representations,
//! either two length-distinct chains for one exponent or chains for two
//! different exponents.
//!
//! Detection is sort-and-group over the enumeration output of one
//! interval. Every representation of an integer lands in that integer's
//! own interval, so duplicates can never straddle interval boundaries
//! and per-interval detection is complete on its own.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::enumeration::{enumerate_interval, Interval, Representation};
use crate::error::{Error, Result};
use crate::primes::PrefixPowerSums;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicateKind {
    SameK,
    CrossK,
}

/// An integer with two or more representations, kept in full so the
/// record certifies itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateRecord {
    pub n: u128,
    pub kind: DuplicateKind,
    pub reps: Vec<Representation>,
}

impl DuplicateRecord {
    pub fn k_values(&self) -> BTreeSet<u32> {
        self.reps.iter().map(|r| r.k).collect()
    }

    pub fn to_line(&self) -> DuplicateLine {
        DuplicateLine {
            n: self.n,
            kind: self.kind,
            reps: self
                .reps
                .iter()
                .map(|r| DupRepEntry {
                    k: r.k,
                    m: r.m,
                    p_start: r.p_start,
                })
                .collect(),
        }
    }
}

/// One representation inside a serialized duplicate record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DupRepEntry {
    pub k: u32,
    pub m: usize,
    pub p_start: u64,
}

/// The wire form of a duplicate record: one JSON object per line, field
/// order fixed for diffable reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateLine {
    pub n: u128,
    pub kind: DuplicateKind,
    pub reps: Vec<DupRepEntry>,
}

impl DuplicateLine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("duplicate records always serialize")
    }

    pub fn from_json(line: &str) -> Result<Self> {
        serde_json::from_str(line)
            .map_err(|e| Error::parse(format!("bad duplicate record {line:?}: {e}")))
    }
}

fn sort_reps(reps: &mut [Representation]) {
    reps.sort_unstable_by_key(|r| (r.n, r.k, r.m));
}

/// Group a sorted slice by n and keep the groups that qualify.
fn group_by_n(
    reps: Vec<Representation>,
    qualifies: impl Fn(&[Representation]) -> Option<DuplicateKind>,
) -> Vec<DuplicateRecord> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < reps.len() {
        let n = reps[start].n;
        let mut end = start + 1;
        while end < reps.len() && reps[end].n == n {
            end += 1;
        }
        if let Some(kind) = qualifies(&reps[start..end]) {
            out.push(DuplicateRecord {
                n,
                kind,
                reps: reps[start..end].to_vec(),
            });
        }
        start = end;
    }
    out
}

/// Collect the interval's representations once, already grouped into
/// same-exponent duplicates. Two chains for one exponent always have
/// different lengths, which the debug build asserts.
pub fn find_same_k_duplicates(
    iv: Interval,
    prefix: &PrefixPowerSums,
) -> Result<Vec<DuplicateRecord>> {
    let reps: Vec<Representation> = enumerate_interval(iv, prefix)?.collect();
    Ok(group_same_k(reps))
}

/// Sort-and-group step for one exponent, shared with the sweep driver.
pub fn group_same_k(mut reps: Vec<Representation>) -> Vec<DuplicateRecord> {
    sort_reps(&mut reps);
    group_by_n(reps, |group| {
        if group.len() < 2 {
            return None;
        }
        debug_assert!(
            group.windows(2).all(|w| w[0].m != w[1].m),
            "same-exponent duplicates must differ in length"
        );
        Some(DuplicateKind::SameK)
    })
}

/// Run the enumeration once per exponent over the same interval and keep
/// the integers hit by both.
pub fn find_cross_k_duplicates(
    iv: Interval,
    prefix_a: &PrefixPowerSums,
    prefix_b: &PrefixPowerSums,
) -> Result<Vec<DuplicateRecord>> {
    if prefix_a.k() == prefix_b.k() {
        return Err(Error::domain(format!(
            "cross-exponent search needs two distinct exponents, got k = {} twice",
            prefix_a.k()
        )));
    }
    let mut reps: Vec<Representation> = enumerate_interval(iv, prefix_a)?.collect();
    reps.extend(enumerate_interval(iv, prefix_b)?);
    Ok(group_cross_k(reps))
}

/// Sort-and-group step across exponents, shared with the sweep driver.
pub fn group_cross_k(mut reps: Vec<Representation>) -> Vec<DuplicateRecord> {
    sort_reps(&mut reps);
    group_by_n(reps, |group| {
        let distinct: BTreeSet<u32> = group.iter().map(|r| r.k).collect();
        (distinct.len() >= 2).then_some(DuplicateKind::CrossK)
    })
}

/// Merged per-interval reports with per-kind tallies.
#[derive(Clone, Debug, Default)]
pub struct MergedDuplicates {
    pub records: Vec<DuplicateRecord>,
    pub same_k: usize,
    pub cross_k: usize,
}

/// Concatenate per-interval reports in value order. The intervals must
/// be pairwise disjoint or the result would double-count.
pub fn merge_reports(
    mut reports: Vec<(Interval, Vec<DuplicateRecord>)>,
) -> Result<MergedDuplicates> {
    reports.sort_by_key(|(iv, _)| iv.x1());
    for pair in reports.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        if a.x2() > b.x1() {
            return Err(Error::domain(format!(
                "overlapping intervals {a} and {b} would double-count duplicates"
            )));
        }
    }
    let mut merged = MergedDuplicates::default();
    for (_, records) in reports {
        for record in records {
            match record.kind {
                DuplicateKind::SameK => merged.same_k += 1,
                DuplicateKind::CrossK => merged.cross_k += 1,
            }
            merged.records.push(record);
        }
    }
    Ok(merged)
}

/// Write records as JSON lines.
pub fn write_jsonl<'a, W: Write>(
    lines: impl IntoIterator<Item = &'a DuplicateLine>,
    mut w: W,
) -> Result<()> {
    for line in lines {
        writeln!(w, "{}", line.to_json())?;
    }
    Ok(())
}

/// Read back a JSONL report.
pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<DuplicateLine>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(DuplicateLine::from_json(&line)?);
    }
    Ok(out)
}
