//! Prime tables and prefix arrays of k-th prime powers.
//!
//! Everything downstream reads two immutable structures built here:
//!
//! * [`PrimeTable`]: all primes up to an inclusive bound, in order.
//! * [`PrefixPowerSums`]: the array `r` with `r[0] = 0` and
//!   `r[j] = r[j-1] + p_j^k`, so any sum of k-th powers of consecutive
//!   primes is a difference `r[t] - r[b]`.
//!
//! Sums are `u128` throughout; construction fails loudly on overflow
//! rather than wrapping.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

const CACHE_MAGIC: &[u8; 8] = b"GLFULPSR";
const CACHE_VERSION: u32 = 1;

/// Ordered primes `2, 3, 5, ...` up to an inclusive sieving bound.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve all primes `<= limit`.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit {limit} is below 2")));
        }
        Ok(PrimeTable {
            limit,
            primes: segmented_sieve(limit),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// pi(limit): how many primes the table holds.
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// pi(t) for a real cutoff `t`, by binary search.
    ///
    /// Refuses cutoffs beyond the sieved limit instead of silently
    /// truncating.
    pub fn prime_count_at(&self, t: f64) -> Result<usize> {
        if t.is_nan() {
            return Err(Error::domain("prime count cutoff is NaN"));
        }
        if t > self.limit as f64 {
            return Err(Error::coverage(format!(
                "prime count cutoff {t} exceeds sieved limit {}",
                self.limit
            )));
        }
        Ok(self.primes.partition_point(|&p| p as f64 <= t))
    }

    /// pi(v) for an integer cutoff `v <= limit`.
    pub fn prime_count_at_int(&self, v: u64) -> Result<usize> {
        if v > self.limit {
            return Err(Error::coverage(format!(
                "prime count cutoff {v} exceeds sieved limit {}",
                self.limit
            )));
        }
        Ok(self.primes.partition_point(|&p| p <= v))
    }

    /// Zero-based index of `p` in the table, if `p` is a listed prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }
}

/// Simple sieve of Eratosthenes, used for base primes and small limits.
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Segmented sieve over odd numbers; segments keep the working set small
/// even for limits in the hundreds of millions.
fn segmented_sieve(limit: u64) -> Vec<u64> {
    const SEGMENT_SPAN: u64 = 1 << 20;

    if limit < SEGMENT_SPAN {
        return simple_sieve(limit);
    }

    let base = simple_sieve(limit.isqrt());
    let mut primes = Vec::with_capacity(estimate_prime_count(limit));
    primes.push(2);

    // Each segment covers odds in [lo, hi): flags[i] <-> lo + 2i.
    let mut flags = vec![false; (SEGMENT_SPAN / 2) as usize];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_SPAN).min(limit + 1);
        let len = ((hi - lo) / 2 + (hi - lo) % 2) as usize;
        flags[..len].fill(false);

        for &p in base.iter().skip(1) {
            if p * p >= hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
                if start % 2 == 0 {
                    start += p;
                }
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < len {
                flags[idx] = true;
                idx += p as usize;
            }
        }

        for (i, &is_composite) in flags[..len].iter().enumerate() {
            if !is_composite {
                primes.push(lo + 2 * i as u64);
            }
        }
        lo = if hi % 2 == 0 { hi + 1 } else { hi };
    }
    primes
}

fn estimate_prime_count(limit: u64) -> usize {
    let x = limit as f64;
    (x / x.ln() * 1.2) as usize + 16
}

/// Largest `v` with `v^k <= x` (and `v = 0` when there is none).
pub fn integer_kth_root(x: u128, k: u32) -> u64 {
    assert!(k >= 1, "k must be positive");
    if x == 0 {
        return 0;
    }
    if k == 1 {
        return u64::try_from(x).unwrap_or(u64::MAX);
    }
    let fits = |v: u64| match (v as u128).checked_pow(k) {
        Some(p) => p <= x,
        None => false,
    };
    let mut v = ((x as f64).powf(1.0 / k as f64) as u64).saturating_sub(2);
    while v < u64::MAX && fits(v + 1) {
        v += 1;
    }
    while v > 0 && !fits(v) {
        v -= 1;
    }
    v
}

/// Prefix sums of k-th prime powers over a shared prime table. Cloning
/// is cheap on the table side: the underlying primes are shared.
#[derive(Clone, Debug)]
pub struct PrefixPowerSums {
    k: u32,
    r: Vec<u128>,
    table: Arc<PrimeTable>,
}

impl PrefixPowerSums {
    /// Build `r[0..=ell]` for the whole table, with overflow checks on
    /// every power and every partial sum.
    pub fn build(k: u32, table: Arc<PrimeTable>) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("exponent k = {k} is below 2")));
        }
        let mut r = Vec::with_capacity(table.count() + 1);
        r.push(0u128);
        let mut acc = 0u128;
        for (i, &p) in table.primes().iter().enumerate() {
            let j = i + 1;
            let pk = (p as u128).checked_pow(k).ok_or_else(|| {
                Error::overflow(format!("p_{j}^{k} does not fit in 128 bits (p_{j} = {p})"))
            })?;
            acc = acc.checked_add(pk).ok_or_else(|| {
                Error::overflow(format!("prefix sum r[{j}] does not fit in 128 bits"))
            })?;
            r.push(acc);
        }
        Ok(PrefixPowerSums { k, r, table })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of primes covered; `r` has length `ell + 1`.
    pub fn ell(&self) -> usize {
        self.r.len() - 1
    }

    pub fn r(&self) -> &[u128] {
        &self.r
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn table_arc(&self) -> Arc<PrimeTable> {
        Arc::clone(&self.table)
    }

    /// `r[t] - r[b]`: the sum `p_{b+1}^k + ... + p_t^k`.
    pub fn chain_sum(&self, b: usize, t: usize) -> u128 {
        self.r[t] - self.r[b]
    }

    /// First prime of a chain that skips `b` primes.
    pub fn p_start(&self, b: usize) -> u64 {
        self.table.primes()[b]
    }

    /// True when every prime whose k-th power is below `x2` is in the
    /// table, which is exactly `(limit + 1)^k >= x2`.
    pub fn covers_below(&self, x2: u128) -> bool {
        match (self.table.limit() as u128 + 1).checked_pow(self.k) {
            Some(v) => v >= x2,
            None => true,
        }
    }

    pub fn ensure_covers_below(&self, x2: u128) -> Result<()> {
        if self.covers_below(x2) {
            Ok(())
        } else {
            Err(Error::coverage(format!(
                "prime table up to {} does not cover chain elements below {x2} for k = {}",
                self.table.limit(),
                self.k
            )))
        }
    }

    /// Coverage for sums `n <= x` (inclusive cutoff).
    pub fn ensure_covers_through(&self, x: u128) -> Result<()> {
        match x.checked_add(1) {
            Some(x2) => self.ensure_covers_below(x2),
            None => self.ensure_covers_below(x),
        }
    }

    /// Write the array to a binary cache file keyed by (k, limit, count).
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.k.to_le_bytes())?;
        w.write_all(&self.table.limit().to_le_bytes())?;
        w.write_all(&(self.ell() as u64).to_le_bytes())?;
        for v in &self.r {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a cached array for `k` over `table`, validating the header,
    /// the endpoints, and three random recurrence entries.
    pub fn load_cache(path: &Path, k: u32, table: Arc<PrimeTable>) -> Result<Self> {
        let mut rd = BufReader::new(File::open(path)?);

        let mut magic = [0u8; 8];
        rd.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::parse(format!("{}: bad cache magic", path.display())));
        }
        let version = read_u32(&mut rd)?;
        if version != CACHE_VERSION {
            return Err(Error::parse(format!(
                "{}: unsupported cache version {version}",
                path.display()
            )));
        }
        let file_k = read_u32(&mut rd)?;
        let file_limit = read_u64(&mut rd)?;
        let file_count = read_u64(&mut rd)?;
        if file_k != k || file_limit != table.limit() || file_count != table.count() as u64 {
            return Err(Error::domain(format!(
                "{}: cache header (k = {file_k}, limit = {file_limit}, count = {file_count}) \
                 does not match requested k = {k}, limit = {}, count = {}",
                path.display(),
                table.limit(),
                table.count()
            )));
        }

        let ell = file_count as usize;
        let mut r = Vec::with_capacity(ell + 1);
        for _ in 0..=ell {
            r.push(read_u128(&mut rd)?);
        }

        let prefix = PrefixPowerSums { k, r, table };
        prefix.spot_check(path)?;
        Ok(prefix)
    }

    fn spot_check(&self, path: &Path) -> Result<()> {
        let ell = self.ell();
        let mut suspects: Vec<usize> = vec![1, ell];
        let mut rng = rand::rng();
        for _ in 0..3 {
            suspects.push(rng.random_range(1..=ell));
        }
        if self.r[0] != 0 {
            return Err(Error::parse(format!(
                "{}: cache corrupt, r[0] = {} instead of 0",
                path.display(),
                self.r[0]
            )));
        }
        for j in suspects {
            let p = self.table.primes()[j - 1] as u128;
            let expect = p.checked_pow(self.k).ok_or_else(|| {
                Error::overflow(format!("p_{j}^{} does not fit in 128 bits", self.k))
            })?;
            if self.r[j].wrapping_sub(self.r[j - 1]) != expect {
                return Err(Error::parse(format!(
                    "{}: cache corrupt, r[{j}] - r[{}] != p_{j}^{}",
                    path.display(),
                    j - 1,
                    self.k
                )));
            }
        }
        Ok(())
    }
}

fn read_u32(rd: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    rd.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(rd: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    rd.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_u128(rd: &mut impl Read) -> Result<u128> {
    let mut buf = [0u8; 16];
    rd.read_exact(&mut buf)?;
    Ok(u128::from_le_bytes(buf))
}
