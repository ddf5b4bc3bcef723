//! Counting and listing E(S)-numbers by exclusion sieve.
//!
//! A number fails to be an E(S)-number exactly when some prime divides it
//! with an exponent outside `S`. Since offending exponents are at least 2,
//! only multiples of squares `p^2 <= x` need to be touched: the sieve
//! starts from an all-member bit array and clears, which costs about
//! `0.45 x` operations total regardless of the sequence.
//!
//! Counts come with the density-based prediction `h * x`, the observed
//! deviation, and the theoretical deviation envelope
//! `sqrt(x) * ln(x) * exp(c * sqrt(ln x) / ln ln x)`, against which the
//! deviation's growth can be judged.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::density::{density_to_width, DensityBracket, DensityError};
use crate::primes::{primes_up_to, PrimeTable};
use crate::sequences::SSequence;

/// Sieve budget: counts use bit-packed segments, so the bound is set by
/// time, not memory.
pub const MAX_SIEVE_X: u64 = 1 << 31;
/// Enumeration materializes the members; capped far lower than the
/// counting budget.
pub const MAX_ENUMERATE_X: u64 = 10_000_000;

/// Growth constant `c = 4 * sqrt(2.4 / ln 2)` in the deviation envelope.
pub const ENVELOPE_GROWTH: f64 = 7.4430833375783315;

const SEGMENT_LEN: u64 = 1 << 22;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EnumerationError {
    #[error("x must be at least 1")]
    XTooSmall,
    #[error("x = {x} exceeds the budget {max} for this operation")]
    BudgetExceeded { x: u64, max: u64 },
    #[error("the deviation envelope needs x >= 16 (got {x})")]
    EnvelopeDomain { x: u64 },
    #[error("membership test needs a factor table covering {n} (table limit {limit})")]
    TableTooSmall { n: u64, limit: u64 },
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// A sieve count next to its density prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub x: u64,
    pub count: u64,
    /// `h(E(S)) * x` at the density's point estimate.
    pub predicted: f64,
    /// `|count - predicted|`.
    pub deviation: f64,
    /// Half the density bracket's width scaled by `x`: how much of the
    /// deviation could be blamed on density uncertainty alone.
    pub uncertainty: f64,
    /// `None` below the envelope's domain `x >= 16`.
    pub envelope: Option<f64>,
    /// `deviation / envelope`.
    pub ratio: Option<f64>,
    pub density: DensityBracket,
}

/// Does every prime exponent of `n` lie in `S`? Factors through the
/// table, so `n` must be within its limit. `1` is always a member; `0`
/// never is.
pub fn is_member(n: u64, s: &SSequence, table: &PrimeTable) -> Result<bool, EnumerationError> {
    if n == 0 {
        return Ok(false);
    }
    if n > table.limit() {
        return Err(EnumerationError::TableTooSmall { n, limit: table.limit() });
    }
    let factors = table.factor_exponents(n).expect("n >= 1 and within limit");
    Ok(factors.iter().all(|&(_, e)| s.contains(u64::from(e))))
}

/// Exponent membership packed into a word; sieve bounds keep every
/// reachable exponent below 64.
#[derive(Clone, Copy)]
struct ExponentMask(u64);

impl ExponentMask {
    fn build(s: &SSequence) -> ExponentMask {
        let mut mask = 0u64;
        for e in 1..64u64 {
            if s.contains(e) {
                mask |= 1 << e;
            }
        }
        ExponentMask(mask)
    }

    fn allows(self, e: u32) -> bool {
        debug_assert!(e < 64);
        self.0 >> e & 1 == 1
    }
}

/// Sieves one segment `[lo, hi]` and returns packed member bits.
fn sieve_segment(mask: ExponentMask, base_primes: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut bits = vec![u64::MAX; len.div_ceil(64)];
    // Clear the slack beyond hi so popcounts are exact.
    if len % 64 != 0 {
        *bits.last_mut().expect("segment is nonempty") = (1u64 << (len % 64)) - 1;
    }
    for &p in base_primes {
        let q = p * p;
        if q > hi {
            break;
        }
        let mut m = lo.div_ceil(q) * q;
        while m <= hi {
            let mut v = m / q;
            let mut e = 2u32;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            if !mask.allows(e) {
                let i = (m - lo) as usize;
                bits[i / 64] &= !(1 << (i % 64));
            }
            m += q;
        }
    }
    bits
}

fn segments(x: u64) -> Vec<(u64, u64)> {
    (0..x.div_ceil(SEGMENT_LEN))
        .map(|k| {
            let lo = k * SEGMENT_LEN + 1;
            (lo, (lo + SEGMENT_LEN - 1).min(x))
        })
        .collect()
}

fn check_x(x: u64, max: u64) -> Result<(), EnumerationError> {
    if x == 0 {
        return Err(EnumerationError::XTooSmall);
    }
    if x > max {
        return Err(EnumerationError::BudgetExceeded { x, max });
    }
    Ok(())
}

/// Counts E(S)-numbers up to `x` and wraps the count in a report with
/// the density prediction and deviation envelope.
///
/// Segments are sieved in parallel; the per-segment counts are exact
/// integers, so the combination order cannot affect the result.
pub fn sieve_count(s: &SSequence, x: u64) -> Result<CountReport, EnumerationError> {
    check_x(x, MAX_SIEVE_X)?;
    let mask = ExponentMask::build(s);
    let base_primes: Vec<u64> = primes_up_to(x.isqrt()).collect();
    let count: u64 = segments(x)
        .par_iter()
        .map(|&(lo, hi)| {
            sieve_segment(mask, &base_primes, lo, hi)
                .iter()
                .map(|w| u64::from(w.count_ones()))
                .sum::<u64>()
        })
        .sum();

    let width = density_to_width(s, 1e-9)?;
    let density = width.bracket;
    let xf = x as f64;
    let predicted = density.point * xf;
    let deviation = (count as f64 - predicted).abs();
    let envelope = envelope(x).ok();
    Ok(CountReport {
        x,
        count,
        predicted,
        deviation,
        uncertainty: 0.5 * density.width() * xf,
        envelope,
        ratio: envelope.map(|env| deviation / env),
        density,
    })
}

/// All E(S)-numbers up to `x`, ascending.
pub fn enumerate(s: &SSequence, x: u64) -> Result<Vec<u64>, EnumerationError> {
    check_x(x, MAX_ENUMERATE_X)?;
    let mask = ExponentMask::build(s);
    let base_primes: Vec<u64> = primes_up_to(x.isqrt()).collect();
    let per_segment: Vec<Vec<u64>> = segments(x)
        .par_iter()
        .map(|&(lo, hi)| {
            let bits = sieve_segment(mask, &base_primes, lo, hi);
            let mut members = Vec::new();
            for (w, &word) in bits.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as u64;
                    members.push(lo + w as u64 * 64 + b);
                    word &= word - 1;
                }
            }
            members
        })
        .collect();
    Ok(per_segment.concat())
}

/// Theoretical deviation envelope
/// `sqrt(x) * ln(x) * exp(c * sqrt(ln x) / ln ln x)`, defined for
/// `x >= 16` (below that `ln ln x` is too close to zero to mean much).
pub fn envelope(x: u64) -> Result<f64, EnumerationError> {
    if x < 16 {
        return Err(EnumerationError::EnvelopeDomain { x });
    }
    let lx = (x as f64).ln();
    Ok((x as f64).sqrt() * lx * (ENVELOPE_GROWTH * lx.sqrt() / lx.ln()).exp())
}
