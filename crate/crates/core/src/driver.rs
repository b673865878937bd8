//! Parallel interval sweep: split [1, x_max) into fixed-width intervals,
//! farm them out to worker threads, and merge results back in interval
//! order so the output stream is identical for any worker count.
//!
//! Long sweeps can write a checkpoint file after each finished interval
//! and resume from it, redoing only the intervals that are missing.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::duplicates::{group_cross_k, group_same_k, DuplicateKind, DuplicateLine};
use crate::enumeration::{enumerate_interval, Interval, Representation};
use crate::error::{Error, Result};
use crate::heuristics::d_of_x;
use crate::primes::PrefixPowerSums;

const CHECKPOINT_MAGIC: &str = "gleeful-sweep";
const CHECKPOINT_VERSION: u32 = 1;
/// Hard cap on the interval count so a tiny delta cannot exhaust memory
/// planning the sweep.
const MAX_INTERVALS: u128 = 10_000_000;

/// What each interval job computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Stream every representation.
    Enumerate,
    /// Count representations without keeping them.
    Count,
    /// Report integers with two chains for the one exponent.
    DupsSameK,
    /// Report integers hit by both of two exponents.
    DupsCrossK,
}

/// Full description of a sweep run.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// One exponent, or exactly two in ascending order for `DupsCrossK`.
    pub k_set: Vec<u32>,
    /// Exclusive upper end of the swept range [1, x_max).
    pub x_max: u128,
    /// Interval width.
    pub delta: u128,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
}

impl SweepConfig {
    /// Interval width used when the caller does not pick one.
    pub fn default_delta(x_max: u128) -> u128 {
        1_000_000u128.max(x_max / 10_000)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::domain("worker count must be at least 1"));
        }
        if self.delta == 0 {
            return Err(Error::domain("interval width must be at least 1"));
        }
        if self.x_max < 2 {
            return Err(Error::domain("sweep bound must be at least 2"));
        }
        match self.mode {
            SweepMode::DupsCrossK => {
                if self.k_set.len() != 2 || self.k_set[0] >= self.k_set[1] {
                    return Err(Error::domain(format!(
                        "cross-exponent sweep needs exactly two ascending exponents, got {:?}",
                        self.k_set
                    )));
                }
            }
            _ => {
                if self.k_set.len() != 1 {
                    return Err(Error::domain(format!(
                        "{:?} sweep needs exactly one exponent, got {:?}",
                        self.mode, self.k_set
                    )));
                }
            }
        }
        if let Some(&k) = self.k_set.iter().find(|&&k| k < 2) {
            return Err(Error::domain(format!(
                "exponent must be at least 2, got {k}"
            )));
        }
        if self.checkpoint_path.is_some() && self.mode == SweepMode::Enumerate {
            return Err(Error::domain(
                "checkpointing is not supported for enumeration sweeps: \
                 checkpoints record counts and duplicates, not full representation streams",
            ));
        }
        Ok(())
    }
}

/// Split [1, x_max) into width-delta intervals, the last one truncated.
pub fn plan_intervals(x_max: u128, delta: u128) -> Result<Vec<Interval>> {
    if x_max < 2 {
        return Err(Error::domain("sweep bound must be at least 2"));
    }
    if delta == 0 {
        return Err(Error::domain("interval width must be at least 1"));
    }
    let span = x_max - 1;
    let count = span.div_ceil(delta);
    if count > MAX_INTERVALS {
        return Err(Error::domain(format!(
            "width {delta} splits [1, {x_max}) into {count} intervals; raise the width"
        )));
    }
    let mut intervals = Vec::with_capacity(count as usize);
    let mut x1 = 1u128;
    while x1 < x_max {
        let x2 = x_max.min(x1.saturating_add(delta));
        intervals.push(Interval::new(x1, x2)?);
        x1 = x2;
    }
    Ok(intervals)
}

/// The outcome of one interval job, handed to the caller's `on_result`
/// callback in interval order.
#[derive(Clone, Debug)]
pub struct JobResult {
    pub index: usize,
    pub interval: Interval,
    pub rep_count: u64,
    /// Filled in `Enumerate` mode only.
    pub reps: Vec<Representation>,
    pub duplicates: Vec<DuplicateLine>,
    /// Zero for intervals replayed from a checkpoint.
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckpointHeader {
    magic: String,
    version: u32,
    mode: SweepMode,
    k_set: Vec<u32>,
    x_max: u128,
    delta: u128,
    intervals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckpointLine {
    index: usize,
    rep_count: u64,
    duplicates: Vec<DuplicateLine>,
}

/// Totals for a finished sweep.
#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub mode: SweepMode,
    pub k_set: Vec<u32>,
    pub x_max: u128,
    pub delta: u128,
    pub intervals: usize,
    pub total_representations: u128,
    /// All duplicates found, in increasing n order.
    pub duplicates: Vec<DuplicateLine>,
    pub same_k: usize,
    pub cross_k: usize,
    pub resumed_intervals: usize,
    pub wall_ms: u64,
}

/// In-order merge state: results arrive in any order, the callback sees
/// them in interval order.
#[derive(Default)]
struct MergeState {
    next: usize,
    buffer: BTreeMap<usize, JobResult>,
    completed: BTreeMap<usize, CheckpointLine>,
    total: u128,
    duplicates: Vec<DuplicateLine>,
    same_k: usize,
    cross_k: usize,
    resumed: usize,
}

impl MergeState {
    fn advance<F>(&mut self, intervals: &[Interval], on_result: &mut F) -> Result<()>
    where
        F: FnMut(&JobResult) -> Result<()>,
    {
        loop {
            let job = if let Some(job) = self.buffer.remove(&self.next) {
                job
            } else if let Some(line) = self.completed.remove(&self.next) {
                self.resumed += 1;
                JobResult {
                    index: line.index,
                    interval: intervals[line.index],
                    rep_count: line.rep_count,
                    reps: Vec::new(),
                    duplicates: line.duplicates,
                    wall_ms: 0,
                }
            } else {
                return Ok(());
            };
            on_result(&job)?;
            self.total += u128::from(job.rep_count);
            for dup in &job.duplicates {
                match dup.kind {
                    DuplicateKind::SameK => self.same_k += 1,
                    DuplicateKind::CrossK => self.cross_k += 1,
                }
            }
            self.duplicates.extend(job.duplicates);
            self.next += 1;
        }
    }
}

fn run_job(
    mode: SweepMode,
    index: usize,
    interval: Interval,
    prefixes: &[PrefixPowerSums],
) -> Result<JobResult> {
    let start = Instant::now();
    let (rep_count, reps, duplicates) = match mode {
        SweepMode::Enumerate => {
            let reps: Vec<Representation> = enumerate_interval(interval, &prefixes[0])?.collect();
            (reps.len() as u64, reps, Vec::new())
        }
        SweepMode::Count => {
            let count = enumerate_interval(interval, &prefixes[0])?.count() as u64;
            (count, Vec::new(), Vec::new())
        }
        SweepMode::DupsSameK => {
            let reps: Vec<Representation> = enumerate_interval(interval, &prefixes[0])?.collect();
            let count = reps.len() as u64;
            let dups = group_same_k(reps).iter().map(|d| d.to_line()).collect();
            (count, Vec::new(), dups)
        }
        SweepMode::DupsCrossK => {
            let mut reps: Vec<Representation> =
                enumerate_interval(interval, &prefixes[0])?.collect();
            reps.extend(enumerate_interval(interval, &prefixes[1])?);
            let count = reps.len() as u64;
            let dups = group_cross_k(reps).iter().map(|d| d.to_line()).collect();
            (count, Vec::new(), dups)
        }
    };
    Ok(JobResult {
        index,
        interval,
        rep_count,
        reps,
        duplicates,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

fn load_checkpoint(
    path: &Path,
    expected: &CheckpointHeader,
) -> Result<BTreeMap<usize, CheckpointLine>> {
    let reader = BufReader::new(File::open(path)?);
    let lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
    let mut completed = BTreeMap::new();
    if lines.is_empty() {
        return Ok(completed);
    }
    let header: CheckpointHeader = serde_json::from_str(&lines[0])
        .map_err(|e| Error::parse(format!("bad checkpoint header in {}: {e}", path.display())))?;
    if header != *expected {
        return Err(Error::domain(format!(
            "checkpoint {} was written by a different run: found {header:?}, this run is {expected:?}",
            path.display()
        )));
    }
    for (pos, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointLine>(line) {
            Ok(entry) => {
                if entry.index >= expected.intervals {
                    return Err(Error::parse(format!(
                        "checkpoint {} references interval {} but the plan has {}",
                        path.display(),
                        entry.index,
                        expected.intervals
                    )));
                }
                completed.insert(entry.index, entry);
            }
            // A crash mid-write can truncate the final line; anything
            // else is corruption.
            Err(_) if pos == lines.len() - 1 => break,
            Err(e) => {
                return Err(Error::parse(format!(
                    "bad checkpoint line {} in {}: {e}",
                    pos + 1,
                    path.display()
                )));
            }
        }
    }
    Ok(completed)
}

/// Run a sweep. `prefixes` must hold one table per entry of
/// `config.k_set`, in the same order, each covering sums below `x_max`.
/// `on_result` sees every interval exactly once, in interval order,
/// whatever the worker count; replayed checkpoint intervals carry their
/// stored counts and duplicates but no representations.
pub fn run_sweep<F>(
    config: &SweepConfig,
    prefixes: &[PrefixPowerSums],
    mut on_result: F,
) -> Result<SweepSummary>
where
    F: FnMut(&JobResult) -> Result<()>,
{
    let start = Instant::now();
    config.validate()?;
    if prefixes.len() != config.k_set.len() {
        return Err(Error::domain(format!(
            "sweep over exponents {:?} was given {} prefix tables",
            config.k_set,
            prefixes.len()
        )));
    }
    for (prefix, &k) in prefixes.iter().zip(&config.k_set) {
        if prefix.k() != k {
            return Err(Error::domain(format!(
                "prefix table for k = {} given where k = {} was expected",
                prefix.k(),
                k
            )));
        }
        prefix.ensure_covers_below(config.x_max)?;
    }
    let intervals = plan_intervals(config.x_max, config.delta)?;

    let mut state = MergeState::default();
    let mut checkpoint_writer = None;
    if let Some(path) = &config.checkpoint_path {
        let header = CheckpointHeader {
            magic: CHECKPOINT_MAGIC.to_string(),
            version: CHECKPOINT_VERSION,
            mode: config.mode,
            k_set: config.k_set.clone(),
            x_max: config.x_max,
            delta: config.delta,
            intervals: intervals.len(),
        };
        if path.exists() {
            state.completed = load_checkpoint(path, &header)?;
        }
        // Rewrite the file so a previously truncated tail never has new
        // lines appended after it.
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(
            writer,
            "{}",
            serde_json::to_string(&header).expect("checkpoint headers always serialize")
        )?;
        for line in state.completed.values() {
            writeln!(
                writer,
                "{}",
                serde_json::to_string(line).expect("checkpoint lines always serialize")
            )?;
        }
        writer.flush()?;
        checkpoint_writer = Some(writer);
    }

    let pending: Vec<usize> = (0..intervals.len())
        .filter(|index| !state.completed.contains_key(index))
        .collect();
    let stop = AtomicBool::new(false);
    let claim = AtomicUsize::new(0);
    let (tx, rx) = mpsc::sync_channel::<(usize, Result<JobResult>)>(config.workers * 2);
    let mode = config.mode;

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..config.workers {
            let tx = tx.clone();
            let (stop, claim) = (&stop, &claim);
            let (pending, intervals) = (&pending, &intervals);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let slot = claim.fetch_add(1, Ordering::Relaxed);
                let Some(&index) = pending.get(slot) else {
                    break;
                };
                let result = run_job(mode, index, intervals[index], prefixes);
                if tx.send((index, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let outcome = (|| -> Result<()> {
            state.advance(&intervals, &mut on_result)?;
            while let Ok((index, result)) = rx.recv() {
                let job = result.map_err(|e| {
                    e.in_context(&format!("interval {} {}", index, intervals[index]))
                })?;
                if let Some(writer) = checkpoint_writer.as_mut() {
                    let line = CheckpointLine {
                        index: job.index,
                        rep_count: job.rep_count,
                        duplicates: job.duplicates.clone(),
                    };
                    writeln!(
                        writer,
                        "{}",
                        serde_json::to_string(&line).expect("checkpoint lines always serialize")
                    )?;
                    writer.flush()?;
                }
                state.buffer.insert(index, job);
                state.advance(&intervals, &mut on_result)?;
            }
            Ok(())
        })();
        if outcome.is_err() {
            // Unblock senders so the scope can join every worker, then
            // let them notice the stop flag.
            stop.store(true, Ordering::Relaxed);
            while rx.recv().is_ok() {}
        }
        outcome
    })?;

    debug_assert_eq!(state.next, intervals.len());
    debug_assert!(state.buffer.is_empty());
    Ok(SweepSummary {
        mode: config.mode,
        k_set: config.k_set.clone(),
        x_max: config.x_max,
        delta: config.delta,
        intervals: intervals.len(),
        total_representations: state.total,
        duplicates: state.duplicates,
        same_k: state.same_k,
        cross_k: state.cross_k,
        resumed_intervals: state.resumed,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One row of an observed-versus-heuristic comparison.
#[derive(Clone, Debug, Serialize)]
pub struct DecadeRow {
    pub x: u128,
    pub observed: u64,
    pub d_of_x: f64,
    pub expected: f64,
}

/// Tabulate cumulative duplicate counts at each power of ten up to
/// `x_max`, plus a final row at `x_max` itself. `duplicates` must be
/// sorted by n; `expected` supplies the model column.
pub fn decade_comparison(
    duplicates: &[DuplicateLine],
    x_max: u128,
    expected: impl Fn(f64) -> f64,
) -> Result<Vec<DecadeRow>> {
    if x_max < 2 {
        return Err(Error::domain("comparison bound must be at least 2"));
    }
    debug_assert!(duplicates.windows(2).all(|w| w[0].n <= w[1].n));
    let mut marks = Vec::new();
    let mut decade = 1_000u128;
    while decade < x_max {
        marks.push(decade);
        decade = match decade.checked_mul(10) {
            Some(next) => next,
            None => break,
        };
    }
    marks.push(x_max);
    let rows = marks
        .into_iter()
        .map(|x| {
            let observed = duplicates.partition_point(|d| d.n <= x) as u64;
            let xf = x as f64;
            Ok(DecadeRow {
                x,
                observed,
                d_of_x: d_of_x(xf)?,
                expected: expected(xf),
            })
        })
        .collect::<Result<Vec<DecadeRow>>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::count_exact;
    use crate::primes::PrimeTable;
    use std::fs;
    use std::sync::Arc;

    fn prefix(k: u32, limit: u64) -> PrefixPowerSums {
        PrefixPowerSums::build(k, Arc::new(PrimeTable::sieve(limit).unwrap())).unwrap()
    }

    fn count_config(x_max: u128, delta: u128, workers: usize) -> SweepConfig {
        SweepConfig {
            mode: SweepMode::Count,
            k_set: vec![2],
            x_max,
            delta,
            workers,
            checkpoint_path: None,
        }
    }

    #[test]
    fn plan_truncates_last_interval() {
        let plan = plan_intervals(10, 4).unwrap();
        let ends: Vec<(u128, u128)> = plan.iter().map(|iv| (iv.x1(), iv.x2())).collect();
        assert_eq!(ends, vec![(1, 5), (5, 9), (9, 10)]);
        assert_eq!(plan_intervals(10, 100).unwrap().len(), 1);
        assert_eq!(plan_intervals(2, 1).unwrap().len(), 1);
    }

    #[test]
    fn plan_partitions_the_range() {
        for (x_max, delta) in [(100u128, 7u128), (1000, 1), (12345, 1000), (2, 5)] {
            let plan = plan_intervals(x_max, delta).unwrap();
            assert_eq!(plan[0].x1(), 1);
            assert_eq!(plan.last().unwrap().x2(), x_max);
            assert!(plan.windows(2).all(|w| w[0].x2() == w[1].x1()));
        }
    }

    #[test]
    fn plan_rejects_degenerate_input() {
        assert!(plan_intervals(1, 10).is_err());
        assert!(plan_intervals(100, 0).is_err());
        assert!(plan_intervals(u128::MAX, 1).is_err());
    }

    #[test]
    fn default_delta_floors_at_a_million() {
        assert_eq!(SweepConfig::default_delta(100), 1_000_000);
        assert_eq!(SweepConfig::default_delta(100_000_000), 1_000_000);
        assert_eq!(SweepConfig::default_delta(1_000_000_000_000), 100_000_000);
    }

    #[test]
    fn config_validation() {
        let base = count_config(1_000, 100, 2);
        assert!(base.validate().is_ok());
        assert!(SweepConfig {
            workers: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            delta: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            x_max: 1,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            k_set: vec![1],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            k_set: vec![2, 3],
            ..base.clone()
        }
        .validate()
        .is_err());
        let cross = SweepConfig {
            mode: SweepMode::DupsCrossK,
            k_set: vec![2, 3],
            ..base.clone()
        };
        assert!(cross.validate().is_ok());
        assert!(SweepConfig {
            k_set: vec![3, 2],
            ..cross.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            k_set: vec![2, 2],
            ..cross.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            k_set: vec![2],
            ..cross
        }
        .validate()
        .is_err());
        let ckpt = SweepConfig {
            mode: SweepMode::Enumerate,
            checkpoint_path: Some(PathBuf::from("x.ckpt")),
            ..base
        };
        assert!(ckpt.validate().is_err());
    }

    #[test]
    fn sweep_mismatched_prefixes_rejected() {
        let config = count_config(1_000, 100, 1);
        let p3 = prefix(3, 100);
        assert!(run_sweep(&config, &[p3], |_| Ok(())).is_err());
        assert!(run_sweep(&config, &[], |_| Ok(())).is_err());
        // Covers only sums below 101^2.
        let p2 = prefix(2, 100);
        assert!(run_sweep(&count_config(100_000, 1_000, 1), &[p2], |_| Ok(())).is_err());
    }

    #[test]
    fn count_sweep_matches_exact_count() {
        let p2 = prefix(2, 1001);
        let mut seen = Vec::new();
        let summary = run_sweep(&count_config(1_000_001, 100_000, 3), &[p2.clone()], |job| {
            seen.push(job.index);
            Ok(())
        })
        .unwrap();
        assert_eq!(summary.intervals, 10);
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
        assert_eq!(summary.total_representations, 1_998);
        assert_eq!(
            summary.total_representations,
            count_exact(1_000_000, &p2).unwrap()
        );
        assert!(summary.duplicates.is_empty());
        assert_eq!(summary.resumed_intervals, 0);
    }

    #[test]
    fn enumerate_sweep_streams_every_representation() {
        let p2 = prefix(2, 320);
        let config = SweepConfig {
            mode: SweepMode::Enumerate,
            k_set: vec![2],
            x_max: 100_000,
            delta: 10_000,
            workers: 4,
            checkpoint_path: None,
        };
        let mut streamed = Vec::new();
        let summary = run_sweep(&config, &[p2.clone()], |job| {
            assert_eq!(job.rep_count as usize, job.reps.len());
            streamed.extend(job.reps.iter().cloned());
            Ok(())
        })
        .unwrap();
        assert_eq!(summary.total_representations, streamed.len() as u128);

        let mut whole: Vec<Representation> =
            enumerate_interval(Interval::new(1, 100_000).unwrap(), &p2)
                .unwrap()
                .collect();
        whole.sort_unstable_by_key(|r| (r.n, r.m));
        streamed.sort_unstable_by_key(|r| (r.n, r.m));
        assert_eq!(streamed, whole);
    }

    fn job_fingerprint(job: &JobResult) -> String {
        let dups: Vec<String> = job.duplicates.iter().map(|d| d.to_json()).collect();
        format!("{}|{}|{}", job.index, job.rep_count, dups.join(";"))
    }

    #[test]
    fn sweep_output_is_independent_of_worker_count() {
        let p2 = prefix(2, 320);
        let p3 = prefix(3, 50);
        let mut streams: Vec<Vec<String>> = Vec::new();
        for workers in [1, 3] {
            let config = SweepConfig {
                mode: SweepMode::DupsCrossK,
                k_set: vec![2, 3],
                x_max: 100_000,
                delta: 10_000,
                workers,
                checkpoint_path: None,
            };
            let mut lines = Vec::new();
            let summary = run_sweep(&config, &[p2.clone(), p3.clone()], |job| {
                lines.push(job_fingerprint(job));
                Ok(())
            })
            .unwrap();
            assert_eq!(summary.cross_k, 1);
            assert_eq!(summary.same_k, 0);
            assert_eq!(summary.duplicates[0].n, 23_939);
            streams.push(lines);
        }
        assert_eq!(streams[0], streams[1]);
    }

    #[test]
    fn same_k_sweep_finds_the_first_square_duplicate() {
        let p2 = prefix(2, 4_000);
        let config = SweepConfig {
            mode: SweepMode::DupsSameK,
            k_set: vec![2],
            x_max: 15_000_000,
            delta: 1_000_000,
            workers: 2,
            checkpoint_path: None,
        };
        let summary = run_sweep(&config, &[p2], |_| Ok(())).unwrap();
        assert_eq!(summary.same_k, 1);
        let dup = &summary.duplicates[0];
        assert_eq!(dup.n, 14_720_439);
        let reps: Vec<(u32, usize, u64)> = dup.reps.iter().map(|r| (r.k, r.m, r.p_start)).collect();
        assert_eq!(reps, vec![(2, 15, 941), (2, 87, 131)]);
    }

    #[test]
    fn callback_errors_stop_the_sweep() {
        let p2 = prefix(2, 1001);
        let mut emitted = 0;
        let err = run_sweep(&count_config(1_000_001, 50_000, 4), &[p2], |_| {
            emitted += 1;
            if emitted == 3 {
                Err(Error::domain("synthetic failure"))
            } else {
                Ok(())
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert_eq!(emitted, 3);
    }

    #[test]
    fn checkpoint_resume_recomputes_only_missing_intervals() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.ckpt");
        let p2 = prefix(2, 1001);
        let config = SweepConfig {
            checkpoint_path: Some(path.clone()),
            ..count_config(1_000_001, 100_000, 2)
        };

        let mut first = Vec::new();
        let s1 = run_sweep(&config, &[p2.clone()], |job| {
            first.push((job.index, job.rep_count));
            Ok(())
        })
        .unwrap();
        assert_eq!(s1.total_representations, 1_998);
        assert_eq!(s1.resumed_intervals, 0);

        // Drop three completion lines and leave a truncated tail, as if
        // the run died mid-write.
        let text = fs::read_to_string(&path).unwrap();
        let mut kept: Vec<&str> = Vec::new();
        for (pos, line) in text.lines().enumerate() {
            if pos == 0 {
                kept.push(line);
                continue;
            }
            let entry: CheckpointLine = serde_json::from_str(line).unwrap();
            if ![2, 5, 9].contains(&entry.index) {
                kept.push(line);
            }
        }
        let mut rewritten = kept.join("\n");
        rewritten.push_str("\n{\"index\":9,\"rep_co");
        fs::write(&path, rewritten).unwrap();

        let mut second = Vec::new();
        let s2 = run_sweep(&config, &[p2], |job| {
            second.push((job.index, job.rep_count));
            Ok(())
        })
        .unwrap();
        assert_eq!(s2.total_representations, 1_998);
        assert_eq!(s2.resumed_intervals, 7);
        assert_eq!(first, second);

        // The rewritten file now holds the full set again.
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn checkpoint_header_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.ckpt");
        let p2 = prefix(2, 1001);
        let config = SweepConfig {
            checkpoint_path: Some(path.clone()),
            ..count_config(1_000_001, 100_000, 1)
        };
        run_sweep(&config, &[p2.clone()], |_| Ok(())).unwrap();

        let other_delta = SweepConfig {
            delta: 50_000,
            ..config.clone()
        };
        let err = run_sweep(&other_delta, &[p2.clone()], |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));

        let other_mode = SweepConfig {
            mode: SweepMode::DupsSameK,
            ..config
        };
        let err = run_sweep(&other_mode, &[p2], |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn corrupt_checkpoint_interior_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.ckpt");
        let p2 = prefix(2, 1001);
        let config = SweepConfig {
            checkpoint_path: Some(path.clone()),
            ..count_config(1_000_001, 100_000, 1)
        };
        run_sweep(&config, &[p2.clone()], |_| Ok(())).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[3] = "not json";
        fs::write(&path, lines.join("\n")).unwrap();
        let err = run_sweep(&config, &[p2], |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn decade_rows_accumulate() {
        let line = |n: u128| DuplicateLine {
            n,
            kind: DuplicateKind::SameK,
            reps: Vec::new(),
        };
        let dups = vec![line(800), line(23_939), line(14_720_439)];
        let rows = decade_comparison(&dups, 20_000_000, |x| x.cbrt()).unwrap();
        let observed: Vec<(u128, u64)> = rows.iter().map(|r| (r.x, r.observed)).collect();
        assert_eq!(
            observed,
            vec![
                (1_000, 1),
                (10_000, 1),
                (100_000, 2),
                (1_000_000, 2),
                (10_000_000, 2),
                (20_000_000, 3)
            ]
        );
        for row in &rows {
            assert!((row.expected - (row.x as f64).cbrt()).abs() < 1e-9);
            assert!(row.d_of_x > 0.0);
        }
        assert!((rows[0].d_of_x - d_of_x(1_000.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decade_rows_skip_past_the_bound() {
        let rows = decade_comparison(&[], 500, |_| 0.0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].x, 500);
        assert_eq!(rows[0].observed, 0);
    }
}
