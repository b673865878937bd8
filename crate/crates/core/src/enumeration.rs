//! Interval enumeration of representations and the exact counting
//! operations built on the prefix array.
//!
//! A representation of `n` is a run of consecutive primes whose k-th
//! powers sum to `n`; in prefix terms `n = r[t] - r[b]` for the chain
//! `p_{b+1}^k + ... + p_t^k` of length `m = t - b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{integer_kth_root, PrefixPowerSums, PrimeTable};

/// Half-open interval `[x1, x2)` of candidate values `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    x1: u128,
    x2: u128,
}

impl Interval {
    pub fn new(x1: u128, x2: u128) -> Result<Self> {
        if x1 < 1 || x1 >= x2 {
            return Err(Error::domain(format!(
                "invalid interval [{x1}, {x2}): need 1 <= x1 < x2"
            )));
        }
        Ok(Interval { x1, x2 })
    }

    pub fn x1(&self) -> u128 {
        self.x1
    }

    pub fn x2(&self) -> u128 {
        self.x2
    }

    pub fn contains(&self, n: u128) -> bool {
        self.x1 <= n && n < self.x2
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {})", self.x1, self.x2)
    }
}

/// One representation, with enough indices to re-derive everything.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Representation {
    pub n: u128,
    pub k: u32,
    /// Number of primes skipped: the chain starts at the (b+1)-th prime.
    pub b: usize,
    /// Chain length.
    pub m: usize,
    /// The (b+1)-th prime, first element of the chain.
    pub p_start: u64,
}

impl Representation {
    /// Re-sum the chain directly from the prime table, without the
    /// prefix array.
    pub fn recompute(&self, table: &PrimeTable) -> Result<u128> {
        if self.m < 1 || self.b + self.m > table.count() {
            return Err(Error::domain(format!(
                "chain indices b = {}, m = {} exceed table of {} primes",
                self.b,
                self.m,
                table.count()
            )));
        }
        let mut acc = 0u128;
        for &p in &table.primes()[self.b..self.b + self.m] {
            let pk = (p as u128)
                .checked_pow(self.k)
                .ok_or_else(|| Error::overflow(format!("{p}^{} exceeds 128 bits", self.k)))?;
            acc = acc
                .checked_add(pk)
                .ok_or_else(|| Error::overflow("chain sum exceeds 128 bits".to_string()))?;
        }
        Ok(acc)
    }

    pub fn record(&self) -> RepRecord {
        RepRecord {
            n: self.n,
            k: self.k,
            m: self.m,
            p_start: self.p_start,
        }
    }
}

/// The serialized form of a representation: `b` is omitted because it is
/// recoverable from `p_start` and the prime table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: u128,
    pub k: u32,
    pub m: usize,
    pub p_start: u64,
}

impl RepRecord {
    pub const CSV_HEADER: &'static str = "n,k,m,p_start";

    pub fn to_csv_line(&self) -> String {
        format!("{},{},{},{}", self.n, self.k, self.m, self.p_start)
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let mut fields = line.trim().split(',');
        let mut next = |name: &str| {
            fields
                .next()
                .ok_or_else(|| Error::parse(format!("missing field {name} in {line:?}")))
        };
        let n = next("n")?;
        let k = next("k")?;
        let m = next("m")?;
        let p_start = next("p_start")?;
        let parse_err = |f: &str| Error::parse(format!("bad integer {f:?} in {line:?}"));
        let rec = RepRecord {
            n: n.parse().map_err(|_| parse_err(n))?,
            k: k.parse().map_err(|_| parse_err(k))?,
            m: m.parse().map_err(|_| parse_err(m))?,
            p_start: p_start.parse().map_err(|_| parse_err(p_start))?,
        };
        if fields.next().is_some() {
            return Err(Error::parse(format!("trailing fields in {line:?}")));
        }
        Ok(rec)
    }

    /// Recover the full representation by locating `p_start` in the table.
    pub fn resolve(&self, table: &PrimeTable) -> Result<Representation> {
        let b = table.index_of(self.p_start).ok_or_else(|| {
            Error::domain(format!(
                "p_start = {} is not a prime in the table",
                self.p_start
            ))
        })?;
        Ok(Representation {
            n: self.n,
            k: self.k,
            b,
            m: self.m,
            p_start: self.p_start,
        })
    }
}

/// Streaming enumerator over all representations with `x1 <= n < x2`.
///
/// Outer loop over the skip count `b`, inner loop over chain ends `t`;
/// the start pointer `t_s` only ever moves forward, first past `b`,
/// then past chain sums below `x1`. Output order is `b` ascending, `t`
/// ascending within each `b`.
pub struct IntervalReps<'a> {
    prefix: &'a PrefixPowerSums,
    iv: Interval,
    /// Number of primes whose k-th power lies below `x2`.
    ell: usize,
    b: usize,
    t: usize,
    t_s: usize,
    done: bool,
}

impl<'a> IntervalReps<'a> {
    fn new(iv: Interval, prefix: &'a PrefixPowerSums) -> Result<Self> {
        prefix.ensure_covers_below(iv.x2())?;
        let root = integer_kth_root(iv.x2() - 1, prefix.k());
        let ell = prefix.table().primes().partition_point(|&p| p <= root);
        let mut it = IntervalReps {
            prefix,
            iv,
            ell,
            b: 0,
            t: 1,
            t_s: 1,
            done: ell == 0,
        };
        if !it.done {
            it.position_for_current_b();
        }
        Ok(it)
    }

    /// Run the two forward scans for the current `b` and park the inner
    /// cursor at `t_s`. Marks the iterator done when `t_s` passes `ell`,
    /// which can only happen because even the longest tail sum is below
    /// `x1`; later `b` values give smaller sums still.
    fn position_for_current_b(&mut self) {
        let r = self.prefix.r();
        if self.t_s <= self.b {
            self.t_s = self.b + 1;
        }
        while self.t_s <= self.ell && r[self.t_s] - r[self.b] < self.iv.x1() {
            self.t_s += 1;
        }
        if self.t_s > self.ell {
            self.done = true;
        } else {
            self.t = self.t_s;
        }
    }
}

impl Iterator for IntervalReps<'_> {
    type Item = Representation;

    fn next(&mut self) -> Option<Representation> {
        if self.done {
            return None;
        }
        let r = self.prefix.r();
        loop {
            while self.t <= self.ell {
                let n = r[self.t] - r[self.b];
                if n >= self.iv.x2() {
                    break;
                }
                debug_assert!(n >= self.iv.x1());
                let rep = Representation {
                    n,
                    k: self.prefix.k(),
                    b: self.b,
                    m: self.t - self.b,
                    p_start: self.prefix.p_start(self.b),
                };
                self.t += 1;
                return Some(rep);
            }
            self.b += 1;
            if self.b >= self.ell {
                self.done = true;
                return None;
            }
            self.position_for_current_b();
            if self.done {
                return None;
            }
        }
    }
}

/// Enumerate every representation with `x1 <= n < x2`, in a fixed order.
pub fn enumerate_interval(iv: Interval, prefix: &PrefixPowerSums) -> Result<IntervalReps<'_>> {
    IntervalReps::new(iv, prefix)
}

/// M(x, k): the longest chain anchored at the first prime whose sum
/// stays within `x`. Requires the prefix array to extend past `x` so
/// the answer is witnessed.
pub fn max_chain_length(x: u128, prefix: &PrefixPowerSums) -> Result<usize> {
    let r = prefix.r();
    let last = *r.last().expect("prefix always has r[0]");
    if last <= x {
        return Err(Error::coverage(format!(
            "prefix sums reach only {last}, cannot witness the maximum chain length for x = {x}"
        )));
    }
    Ok(r.partition_point(|&v| v <= x) - 1)
}

/// s_{k,m}(x): representations of length exactly `m` with sum `<= x`.
///
/// Fixed-length chain sums grow strictly with the start index, so the
/// count is found by binary search over starts.
pub fn count_by_length(m: usize, x: u128, prefix: &PrefixPowerSums) -> Result<u128> {
    if m < 1 {
        return Err(Error::domain(
            "chain length m must be at least 1".to_string(),
        ));
    }
    prefix.ensure_covers_through(x)?;
    let r = prefix.r();
    let ell = prefix.ell();
    if m > ell {
        return Ok(0);
    }
    let mut lo = 0usize;
    let mut hi = ell - m + 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if r[mid + m] - r[mid] <= x {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo as u128)
}

/// s_k(x): all representations with sum `<= x`, summed over start
/// indices with one binary search each.
pub fn count_exact(x: u128, prefix: &PrefixPowerSums) -> Result<u128> {
    prefix.ensure_covers_through(x)?;
    let r = prefix.r();
    let ell = prefix.ell();
    let mut total = 0u128;
    for b in 0..ell {
        if r[b + 1] - r[b] > x {
            break;
        }
        let bound = r[b].saturating_add(x);
        let t2 = r.partition_point(|&v| v <= bound) - 1;
        total += (t2 - b) as u128;
    }
    Ok(total)
}

/// Check a representation against the prefix array.
pub fn verify_representation(rep: &Representation, prefix: &PrefixPowerSums) -> Result<bool> {
    if rep.k != prefix.k() {
        return Err(Error::domain(format!(
            "representation has k = {} but the prefix array was built for k = {}",
            rep.k,
            prefix.k()
        )));
    }
    if rep.m < 1 || rep.b + rep.m > prefix.ell() {
        return Err(Error::domain(format!(
            "chain indices b = {}, m = {} exceed prefix array of length {}",
            rep.b,
            rep.m,
            prefix.ell()
        )));
    }
    Ok(prefix.chain_sum(rep.b, rep.b + rep.m) == rep.n && prefix.p_start(rep.b) == rep.p_start)
}
