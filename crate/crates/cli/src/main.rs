//! Command-line driver for the gleeful toolkit.
//!
//! Subcommands map onto the library modules: `enumerate`, `count`, and
//! `maxlen` wrap the interval enumerator, `bounds-table` wraps the
//! explicit bound constants, `dups` and `heuristic` run the parallel
//! sweep driver, and `verify` recomputes representation records from an
//! earlier run. Exit codes: 0 on success, 2 for domain or parse errors,
//! 3 for coverage or overflow errors, 4 for I/O errors.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use gleeful_core::bounds::{bounds_table, write_bounds_csv};
use gleeful_core::driver::decade_comparison;
use gleeful_core::enumeration::{count_exact, enumerate_interval, max_chain_length};
use gleeful_core::heuristics::{cross_k_estimate, same_k_duplicate_density};
use gleeful_core::primes::integer_kth_root;
use gleeful_core::{
    run_sweep, DuplicateKind, DuplicateLine, Error, Interval, PrefixPowerSums, PrimeTable,
    RepRecord, Result, SweepConfig, SweepMode,
};

/// Largest sieve limit the CLI will size automatically. A table this
/// large holds about fifty million primes; anything bigger should be a
/// deliberate choice, not a side effect of a mistyped bound.
const MAX_AUTO_LIMIT: u64 = 1_000_000_000;

#[derive(Parser)]
#[command(
    name = "gleeful",
    version,
    about = "Enumerate, count, and analyze sums of k-th powers of consecutive primes"
)]
struct Cli {
    /// Write output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format where the subcommand supports both.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List every representation with from <= n < to, one per line.
    Enumerate {
        /// Power applied to each prime in the chain.
        #[arg(long)]
        k: u32,
        /// Lower bound of the target interval (inclusive).
        #[arg(long, value_parser = parse_magnitude)]
        from: u128,
        /// Upper bound of the target interval (exclusive).
        #[arg(long, value_parser = parse_magnitude)]
        to: u128,
    },
    /// Count representations with n <= x.
    Count {
        #[arg(long)]
        k: u32,
        /// Inclusive upper bound, decimal or scientific (for example 1e9).
        #[arg(long, value_parser = parse_magnitude)]
        x: u128,
    },
    /// Report the maximum chain length M(x, k).
    Maxlen {
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_magnitude)]
        x: u128,
    },
    /// Tabulate the explicit lower and upper bound constants.
    BoundsTable {
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,10,20")]
        k_list: Vec<u32>,
        /// Comma-separated chain-length thresholds.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "6,100,10000,1000000",
            value_parser = parse_magnitude_u64
        )]
        m0_list: Vec<u64>,
    },
    /// Sweep [1, x) for integers with two representations.
    Dups {
        #[arg(long)]
        k: u32,
        /// Second exponent; selects a cross-exponent sweep.
        #[arg(long)]
        k2: Option<u32>,
        /// Exclusive upper bound of the sweep.
        #[arg(long, value_parser = parse_magnitude)]
        x: u128,
        /// Interval width; defaults to max(1e6, x / 10000).
        #[arg(long, value_parser = parse_magnitude)]
        delta: Option<u128>,
        /// Worker thread count; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Checkpoint file for interruptible sweeps.
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
    },
    /// Sweep [1, x) and compare duplicate counts against the heuristic.
    Heuristic {
        #[arg(long)]
        k: u32,
        /// Second exponent; compares against the cross-exponent estimate.
        #[arg(long)]
        k2: Option<u32>,
        #[arg(long, value_parser = parse_magnitude)]
        x: u128,
    },
    /// Recompute every representation in a report and check the sums.
    Verify {
        /// Representation stream (CSV or JSONL) or duplicate report (JSONL).
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parse a positive integer given either as plain decimal digits or in
/// scientific notation with a non-negative integer value, such as
/// `1e9` or `4.3e14`. Scientific input is scaled exactly; a mantissa
/// with more fractional digits than the exponent absorbs is an error.
fn parse_magnitude(s: &str) -> Result<u128> {
    let s = s.trim();
    let bad = || Error::parse(format!("expected a positive integer, got {s:?}"));
    if let Some((mantissa, exponent)) = s.split_once(['e', 'E']) {
        let exponent: u32 = exponent.parse().map_err(|_| bad())?;
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let frac_digits = u32::try_from(frac_part.len()).map_err(|_| bad())?;
        if frac_digits > exponent {
            return Err(Error::parse(format!("{s:?} is not an integer")));
        }
        let digits: String = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let value: u128 = digits.parse().map_err(|_| bad())?;
        let scale = 10u128
            .checked_pow(exponent - frac_digits)
            .ok_or_else(|| Error::overflow(format!("{s:?} exceeds the u128 range")))?;
        value
            .checked_mul(scale)
            .ok_or_else(|| Error::overflow(format!("{s:?} exceeds the u128 range")))
    } else {
        s.parse().map_err(|_| bad())
    }
}

fn parse_magnitude_u64(s: &str) -> Result<u64> {
    let v = parse_magnitude(s)?;
    u64::try_from(v).map_err(|_| Error::parse(format!("{s:?} exceeds the u64 range")))
}

/// Build a prefix-sum table whose chains cover every n < x2, sizing the
/// sieve from the integer k-th root of x2 - 1.
fn sized_prefix(k: u32, x2: u128) -> Result<PrefixPowerSums> {
    if k < 2 {
        return Err(Error::domain(format!(
            "exponent k = {k} must be at least 2"
        )));
    }
    if x2 < 2 {
        return Err(Error::domain(format!("bound {x2} must be at least 2")));
    }
    let root = integer_kth_root(x2 - 1, k).max(2);
    if root > MAX_AUTO_LIMIT {
        return Err(Error::coverage(format!(
            "covering n < {x2} for k = {k} needs primes up to {root}, \
             past the supported sieve limit of {MAX_AUTO_LIMIT}"
        )));
    }
    PrefixPowerSums::build(k, Arc::new(PrimeTable::sieve(root)?))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn kind_label(kind: DuplicateKind) -> &'static str {
    match kind {
        DuplicateKind::SameK => "same_k",
        DuplicateKind::CrossK => "cross_k",
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Resolve the exponent pair for `dups` and `heuristic`: one exponent
/// selects a same-k sweep, two distinct exponents a cross-k sweep.
fn sweep_exponents(k: u32, k2: Option<u32>) -> Result<(SweepMode, Vec<u32>)> {
    match k2 {
        None => Ok((SweepMode::DupsSameK, vec![k])),
        Some(k2) if k2 == k => Err(Error::domain(format!(
            "cross-exponent sweep needs two distinct exponents, got k = k2 = {k}"
        ))),
        Some(k2) => Ok((SweepMode::DupsCrossK, vec![k.min(k2), k.max(k2)])),
    }
}

fn write_duplicates(w: &mut dyn Write, duplicates: &[DuplicateLine], format: Format) -> Result<()> {
    match format {
        Format::Jsonl => {
            for dup in duplicates {
                writeln!(w, "{}", dup.to_json())?;
            }
        }
        Format::Csv => {
            writeln!(w, "n,kind,k,m,p_start")?;
            for dup in duplicates {
                for rep in &dup.reps {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        dup.n,
                        kind_label(dup.kind),
                        rep.k,
                        rep.m,
                        rep.p_start
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn run_enumerate(w: &mut dyn Write, format: Format, k: u32, from: u128, to: u128) -> Result<()> {
    let iv = Interval::new(from, to)?;
    let prefix = sized_prefix(k, to)?;
    for rep in enumerate_interval(iv, &prefix)? {
        let record = rep.record();
        match format {
            Format::Csv => writeln!(w, "{}", record.to_csv_line())?,
            Format::Jsonl => {
                let line = serde_json::to_string(&record)
                    .map_err(|e| Error::parse(format!("serializing {record:?}: {e}")))?;
                writeln!(w, "{line}")?;
            }
        }
    }
    Ok(())
}

fn run_count(w: &mut dyn Write, format: Option<Format>, k: u32, x: u128) -> Result<()> {
    let prefix = sized_prefix(k, x.saturating_add(1))?;
    let count = count_exact(x, &prefix)?;
    match format {
        None => writeln!(w, "{count}")?,
        Some(Format::Csv) => {
            writeln!(w, "k,x,count")?;
            writeln!(w, "{k},{x},{count}")?;
        }
        Some(Format::Jsonl) => writeln!(w, "{{\"k\":{k},\"x\":{x},\"count\":{count}}}")?,
    }
    Ok(())
}

fn run_maxlen(w: &mut dyn Write, format: Option<Format>, k: u32, x: u128) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!(
            "exponent k = {k} must be at least 2"
        )));
    }
    let mut limit = 64u64;
    let maxlen = loop {
        let prefix = PrefixPowerSums::build(k, Arc::new(PrimeTable::sieve(limit)?))?;
        match max_chain_length(x, &prefix) {
            Ok(m) => break m,
            Err(Error::Coverage(_)) if limit < MAX_AUTO_LIMIT => {
                limit = limit.saturating_mul(2).min(MAX_AUTO_LIMIT);
            }
            Err(e) => return Err(e),
        }
    };
    match format {
        None => writeln!(w, "{maxlen}")?,
        Some(Format::Csv) => {
            writeln!(w, "k,x,maxlen")?;
            writeln!(w, "{k},{x},{maxlen}")?;
        }
        Some(Format::Jsonl) => writeln!(w, "{{\"k\":{k},\"x\":{x},\"maxlen\":{maxlen}}}")?,
    }
    Ok(())
}

fn run_bounds_table(
    w: &mut dyn Write,
    format: Format,
    k_list: &[u32],
    m0_list: &[u64],
) -> Result<()> {
    let reports = bounds_table(k_list, m0_list)?;
    match format {
        Format::Csv => write_bounds_csv(&reports, w)?,
        Format::Jsonl => {
            for report in &reports {
                let line = serde_json::to_string(report)
                    .map_err(|e| Error::parse(format!("serializing bound report: {e}")))?;
                writeln!(w, "{line}")?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_dups(
    w: &mut dyn Write,
    format: Format,
    k: u32,
    k2: Option<u32>,
    x: u128,
    delta: Option<u128>,
    workers: Option<usize>,
    checkpoint: Option<PathBuf>,
) -> Result<()> {
    let (mode, k_set) = sweep_exponents(k, k2)?;
    let config = SweepConfig {
        mode,
        k_set: k_set.clone(),
        x_max: x,
        delta: delta.unwrap_or_else(|| SweepConfig::default_delta(x)),
        workers: workers.unwrap_or_else(default_workers),
        checkpoint_path: checkpoint,
    };
    let prefixes = k_set
        .iter()
        .map(|&k| sized_prefix(k, x))
        .collect::<Result<Vec<_>>>()?;
    let summary = run_sweep(&config, &prefixes, |_| Ok(()))?;
    write_duplicates(w, &summary.duplicates, format)?;
    eprintln!(
        "swept [1, {}) for k = {:?}: {} representations, {} duplicates \
         ({} same-k, {} cross-k), {} of {} intervals resumed, {} ms",
        x,
        summary.k_set,
        summary.total_representations,
        summary.duplicates.len(),
        summary.same_k,
        summary.cross_k,
        summary.resumed_intervals,
        summary.intervals,
        summary.wall_ms
    );
    Ok(())
}

fn run_heuristic(
    w: &mut dyn Write,
    format: Format,
    k: u32,
    k2: Option<u32>,
    x: u128,
) -> Result<()> {
    let (mode, k_set) = sweep_exponents(k, k2)?;
    let config = SweepConfig {
        mode,
        k_set: k_set.clone(),
        x_max: x,
        delta: SweepConfig::default_delta(x),
        workers: default_workers(),
        checkpoint_path: None,
    };
    let prefixes = k_set
        .iter()
        .map(|&k| sized_prefix(k, x))
        .collect::<Result<Vec<_>>>()?;
    let summary = run_sweep(&config, &prefixes, |_| Ok(()))?;
    let expected: Box<dyn Fn(f64) -> f64> = match k2 {
        Some(k2) => {
            let (lo, hi) = (k.min(k2), k.max(k2));
            Box::new(move |xf| {
                cross_k_estimate(xf, lo, hi)
                    .map(|est| est.expected_count_to_x)
                    .unwrap_or(f64::NAN)
            })
        }
        None => Box::new(move |xf| {
            same_k_duplicate_density(xf, k)
                .map(|est| est.expected_count_to_x)
                .unwrap_or(f64::NAN)
        }),
    };
    let rows = decade_comparison(&summary.duplicates, x, expected)?;
    match format {
        Format::Csv => {
            writeln!(w, "x,observed_count,d_of_x,expected_count")?;
            for row in &rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    row.x, row.observed, row.d_of_x, row.expected
                )?;
            }
        }
        Format::Jsonl => {
            for row in &rows {
                let line = serde_json::to_string(row)
                    .map_err(|e| Error::parse(format!("serializing comparison row: {e}")))?;
                writeln!(w, "{line}")?;
            }
        }
    }
    Ok(())
}

/// Read a representation stream or duplicate report and re-derive every
/// claimed sum from the primes themselves.
fn run_verify(w: &mut dyn Write, input: &PathBuf) -> Result<()> {
    let reader = BufReader::new(
        File::open(input)
            .map_err(|e| Error::from(e).in_context(&format!("opening {}", input.display())))?,
    );
    let mut records: Vec<(usize, RepRecord)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let text = line.trim();
        if text.is_empty() || text == RepRecord::CSV_HEADER {
            continue;
        }
        if text.starts_with('{') {
            if let Ok(dup) = DuplicateLine::from_json(text) {
                for rep in &dup.reps {
                    records.push((
                        line_no,
                        RepRecord {
                            n: dup.n,
                            k: rep.k,
                            m: rep.m,
                            p_start: rep.p_start,
                        },
                    ));
                }
            } else {
                let record: RepRecord = serde_json::from_str(text).map_err(|e| {
                    Error::parse(format!("line {line_no}: unrecognized record: {e}"))
                })?;
                records.push((line_no, record));
            }
        } else {
            let record = RepRecord::from_csv_line(text)
                .map_err(|e| e.in_context(&format!("line {line_no}")))?;
            records.push((line_no, record));
        }
    }

    let mut by_k: BTreeMap<u32, Vec<(usize, RepRecord)>> = BTreeMap::new();
    for (line_no, record) in records {
        by_k.entry(record.k).or_default().push((line_no, record));
    }

    let total: usize = by_k.values().map(Vec::len).sum();
    let mut failures: Vec<(usize, Error)> = Vec::new();
    for (&k, group) in &by_k {
        if k < 2 {
            for &(line_no, _) in group {
                failures.push((
                    line_no,
                    Error::domain(format!("exponent k = {k} is below 2")),
                ));
            }
            continue;
        }
        let max_n = group.iter().map(|(_, r)| r.n).max().unwrap_or(1);
        let root = integer_kth_root(max_n, k).max(2);
        if root > MAX_AUTO_LIMIT {
            return Err(Error::coverage(format!(
                "verifying n = {max_n} for k = {k} needs primes up to {root}, \
                 past the supported sieve limit of {MAX_AUTO_LIMIT}"
            )));
        }
        let table = PrimeTable::sieve(root)?;
        for &(line_no, record) in group {
            let outcome = if record.m == 0 {
                Err(Error::domain("empty chain".to_string()))
            } else {
                record.resolve(&table).and_then(|rep| {
                    let sum = rep.recompute(&table)?;
                    if sum == record.n {
                        Ok(())
                    } else {
                        Err(Error::domain(format!(
                            "chain sums to {sum}, record claims {}",
                            record.n
                        )))
                    }
                })
            };
            if let Err(e) = outcome {
                failures.push((line_no, e));
            }
        }
    }

    if failures.is_empty() {
        writeln!(w, "verified {total} representations")?;
        Ok(())
    } else {
        failures.sort_by_key(|&(line_no, _)| line_no);
        for (line_no, e) in &failures {
            eprintln!("line {line_no}: {e}");
        }
        Err(Error::domain(format!(
            "{} of {total} representations failed verification",
            failures.len()
        )))
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut w = open_out(&cli.out)?;
    let format = cli.format;
    match cli.command {
        Command::Enumerate { k, from, to } => {
            run_enumerate(&mut w, format.unwrap_or(Format::Csv), k, from, to)?;
        }
        Command::Count { k, x } => run_count(&mut w, format, k, x)?,
        Command::Maxlen { k, x } => run_maxlen(&mut w, format, k, x)?,
        Command::BoundsTable { k_list, m0_list } => {
            run_bounds_table(&mut w, format.unwrap_or(Format::Csv), &k_list, &m0_list)?;
        }
        Command::Dups {
            k,
            k2,
            x,
            delta,
            workers,
            checkpoint,
        } => run_dups(
            &mut w,
            format.unwrap_or(Format::Jsonl),
            k,
            k2,
            x,
            delta,
            workers,
            checkpoint,
        )?,
        Command::Heuristic { k, k2, x } => {
            run_heuristic(&mut w, format.unwrap_or(Format::Csv), k, k2, x)?;
        }
        Command::Verify { input } => run_verify(&mut w, &input)?,
    }
    w.flush()?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("gleeful: {e}");
        std::process::exit(e.exit_code());
    }
}
