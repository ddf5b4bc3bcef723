//! Prime sieves and factorization support.
//!
//! Two structures cover every need in this crate: a smallest-prime-factor
//! table ([`PrimeTable`]) for factoring individual integers, and a
//! segmented prime iterator ([`primes_up_to`]) for walking all primes up
//! to a bound without holding a sieve of that size in memory.

use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("{n} is outside the factor table (limit {limit})")]
    OutOfRange { n: u64, limit: u64 },
    #[error("{0} has no prime factorization")]
    NoFactors(u64),
}

/// Smallest-prime-factor table over `2..=limit`.
///
/// Factoring an `n` in range walks `n / spf(n)` down to 1, so it costs one
/// array lookup per prime power rather than a trial division loop.
pub struct PrimeTable {
    spf: Vec<u32>,
}

impl PrimeTable {
    pub const DEFAULT_LIMIT: u64 = 10_000_000;

    /// Sieves smallest prime factors up to `limit`.
    ///
    /// # Panics
    ///
    /// If `limit < 2` or `limit` does not fit the `u32` entries.
    pub fn new(limit: u64) -> PrimeTable {
        assert!(limit >= 2, "factor table needs limit >= 2");
        assert!(limit <= u64::from(u32::MAX), "factor table entries are u32");
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        PrimeTable { spf }
    }

    pub fn with_default_limit() -> PrimeTable {
        PrimeTable::new(PrimeTable::DEFAULT_LIMIT)
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64, PrimeError> {
        if n < 2 {
            return Err(PrimeError::NoFactors(n));
        }
        if n > self.limit() {
            return Err(PrimeError::OutOfRange { n, limit: self.limit() });
        }
        Ok(u64::from(self.spf[n as usize]))
    }

    /// # Panics
    ///
    /// If `n` exceeds the table limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit(), "{n} is outside the factor table");
        n >= 2 && u64::from(self.spf[n as usize]) == n
    }

    /// Factorization of `n` as `(prime, exponent)` pairs with primes
    /// increasing. `n = 1` factors into the empty product.
    pub fn factor_exponents(&self, n: u64) -> Result<Vec<(u64, u32)>, PrimeError> {
        if n == 0 {
            return Err(PrimeError::NoFactors(0));
        }
        if n > self.limit() {
            return Err(PrimeError::OutOfRange { n, limit: self.limit() });
        }
        let mut out = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }
}

/// Iterator over all primes `<= limit`, smallest first.
///
/// Base primes up to `sqrt(limit)` come from a plain sieve; the rest are
/// produced segment by segment, so memory stays at the segment size no
/// matter how large the limit is.
pub fn primes_up_to(limit: u64) -> Primes {
    Primes::new(limit)
}

const SEGMENT_LEN: u64 = 1 << 20;

pub struct Primes {
    buffer: std::vec::IntoIter<u64>,
    base: Vec<u64>,
    next_lo: u64,
    limit: u64,
}

impl Primes {
    fn new(limit: u64) -> Primes {
        if limit < 2 {
            return Primes { buffer: Vec::new().into_iter(), base: Vec::new(), next_lo: limit + 1, limit };
        }
        // The base sieve never goes below 2, so segments must start after
        // its limit, not after the (possibly smaller) square root.
        let base_limit = limit.isqrt().max(2);
        let base = plain_sieve(base_limit);
        Primes {
            buffer: base.clone().into_iter(),
            base,
            next_lo: base_limit + 1,
            limit,
        }
    }

    fn refill(&mut self) {
        while self.buffer.len() == 0 && self.next_lo <= self.limit {
            let lo = self.next_lo;
            let hi = (lo + SEGMENT_LEN - 1).min(self.limit);
            self.next_lo = hi + 1;
            let mut composite = vec![false; (hi - lo + 1) as usize];
            for &p in &self.base {
                // First multiple of p in [lo, hi]; p^2 > hi never marks.
                let start = lo.div_ceil(p) * p;
                let mut m = start.max(p * p);
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            let primes: Vec<u64> = composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64)
                .collect();
            self.buffer = primes.into_iter();
        }
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.buffer.len() == 0 {
            self.refill();
        }
        self.buffer.next()
    }
}

fn plain_sieve(limit: u64) -> Vec<u64> {
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

/// Process-wide prime list for the density evaluations, which reuse the
/// same ascending prime walk thousands of times. Grows on demand and is
/// only ever replaced by a strictly longer list.
pub(crate) fn cached_primes(limit: u64) -> Arc<Vec<u64>> {
    static CACHE: OnceLock<Mutex<(u64, Arc<Vec<u64>>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((0, Arc::new(Vec::new()))));
    let mut guard = cache.lock().expect("prime cache poisoned");
    if guard.0 < limit {
        *guard = (limit, Arc::new(primes_up_to(limit).collect()));
    }
    Arc::clone(&guard.1)
}
