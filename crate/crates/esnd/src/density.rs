//! Natural densities of E(S)-number sets, with certified error brackets.
//!
//! The density is an Euler product: writing `u` for the characteristic
//! function of `S` and `y = 1/p`,
//!
//! ```text
//! h(E(S)) = prod_p f_p,    f_p = 1 + sum_{i>=2} (u(i) - u(i-1)) y^i.
//! ```
//!
//! Each factor also has a closed form `f_p = (1-y) * sum_{s in S∪{0}} y^s`,
//! which for explicit descriptors collapses to a small polynomial in `y`:
//! no exponent truncation at all. Named families are evaluated through the
//! truncated series instead.
//!
//! [`density`] evaluates `log f_p` over all primes `p <= P` in one fixed
//! ascending pass with compensated summation, then closes the product over
//! `p > P` analytically: the dominant part of the tail is
//! `c_2 * sum_{p>P} 1/p^2` with `c_2 = u(2) - 1`, known to high precision
//! from the prime zeta constant, and everything else is enclosed by an
//! elementary remainder bound of order `1/P^2`. The result is a bracket
//! `[lo, hi]` guaranteed to contain the true density, with width around
//! `1e-12` already at the default `P = 10^6`.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::primes::cached_primes;
use crate::sequences::{Family, SSequence};

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;
pub const DEFAULT_EXPONENT_BOUND: u32 = 64;
/// Default bracket-width target for callers that only care about digits.
pub const DEFAULT_WIDTH: f64 = 1e-8;

/// Hard ceiling for prime bounds; one evaluation at this size takes a few
/// seconds and reaches widths near 1e-14, the floor set by rounding.
pub const MAX_PRIME_BOUND: u64 = 100_000_000;
const MAX_EXPONENT_BOUND: u32 = 512;

/// Sum of 1/p^2 over all primes (the prime zeta function at 2), rounded
/// to nearest. Anchors the prime tail:
/// `sum_{p>P} 1/p^2 = PRIME_ZETA_2 - sum_{p<=P} 1/p^2`.
const PRIME_ZETA_2: f64 = 0.452247420041065498506543364832247934173;

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DensityError {
    #[error("prime bound must be at least 2 (got {0})")]
    PrimeBoundTooSmall(u64),
    #[error("prime bound {0} exceeds the supported maximum {MAX_PRIME_BOUND}")]
    PrimeBoundTooLarge(u64),
    #[error("exponent bound must be between 2 and {MAX_EXPONENT_BOUND} (got {0})")]
    ExponentBoundOutOfRange(u32),
    #[error("target width must be positive and finite (got {0})")]
    BadWidth(f64),
    #[error("named sequences have no closed-form local factor")]
    NoClosedForm,
    #[error("exact local factor overflows i128 at p={p} with exponent {exponent}")]
    ExactOverflow { p: u64, exponent: u64 },
}

/// A local Euler factor with its truncation-and-rounding enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub point: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The three error contributions behind a bracket's width, all additive
/// on the log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTerms {
    /// Product over primes beyond the prime bound, after anchoring its
    /// `1/p^2` part to the prime zeta constant.
    pub prime_tail_bound: f64,
    /// Series truncation at the exponent bound; zero on the closed-form
    /// path, where the factor is evaluated without truncation.
    pub exponent_tail_bound: f64,
    /// Accumulated floating-point rounding across the whole evaluation.
    pub rounding_bound: f64,
}

/// A certified density bracket: `lo <= h(E(S)) <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBracket {
    pub lo: f64,
    pub hi: f64,
    /// Best single estimate; always inside `[lo, hi]`.
    pub point: f64,
    pub prime_bound: u64,
    pub exponent_bound: u32,
    pub tail_terms: TailTerms,
}

impl DensityBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    fn exactly_one(prime_bound: u64, exponent_bound: u32) -> DensityBracket {
        DensityBracket {
            lo: 1.0,
            hi: 1.0,
            point: 1.0,
            prime_bound,
            exponent_bound,
            tail_terms: TailTerms {
                prime_tail_bound: 0.0,
                exponent_tail_bound: 0.0,
                rounding_bound: 0.0,
            },
        }
    }
}

/// Outcome of a width-driven evaluation; `met` is false when even the
/// maximum prime bound could not reach the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthResult {
    pub bracket: DensityBracket,
    pub target: f64,
    pub met: bool,
}

/// Neumaier's compensated summation. With the compensation folded back
/// in, the result differs from the exact sum of the inputs by at most
/// `2 * EPS * sum |x_i|`.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// `y^t` for unsigned `t`. Exponents past 4096 underflow to zero for
/// every `y <= 1/2`, so the clamp never changes the rounded value.
fn pow_y(y: f64, t: u64) -> f64 {
    y.powi(t.min(4096) as i32)
}

/// `f_p - 1` from the closed form; `None` for named families.
///
/// Computing the factor as a deviation from 1 sidesteps the cancellation
/// in `1 + delta` and keeps absolute rounding at the `EPS * y^2` scale.
/// For every sequence, `-y^2 <= delta <= 0` and so `f_p in [1 - y^2, 1]`.
fn delta_closed(s: &SSequence, p: u64) -> Option<f64> {
    let y = 1.0 / p as f64;
    match s {
        SSequence::ExplicitFinite(terms) => {
            // Canonical form puts 1 first; the remaining terms are >= 2.
            let powers: f64 = terms[1..].iter().map(|&t| pow_y(y, t)).sum();
            Some(-y * y + (1.0 - y) * powers)
        }
        SSequence::CofiniteTail { finite_part, tail_start } => {
            if *tail_start == 1 {
                return Some(0.0);
            }
            let powers: f64 = finite_part[1..].iter().map(|&t| pow_y(y, t)).sum();
            Some(-y * y + (1.0 - y) * powers + pow_y(y, *tail_start))
        }
        SSequence::Named(Family::All) => Some(0.0),
        SSequence::Named(_) => None,
    }
}

/// Series coefficients `u(i) - u(i-1)` for `i = 2..=exponent_bound`.
fn series_coefficients(s: &SSequence, exponent_bound: u32) -> Vec<f64> {
    let mut prev = true; // u(1) = 1
    (2..=u64::from(exponent_bound))
        .map(|i| {
            let cur = s.contains(i);
            let c = f64::from(i8::from(cur) - i8::from(prev));
            prev = cur;
            c
        })
        .collect()
}

/// Horner evaluation of `sum_k coeffs[k] * y^(k+2)`.
///
/// Every intermediate value is bounded by `1/(1-y) <= 2`, so the
/// accumulated absolute error stays below `16 * EPS * y^2` regardless of
/// how many coefficients there are.
fn horner_delta(coeffs: &[f64], y: f64) -> f64 {
    let mut acc = 0.0f64;
    for &c in coeffs.iter().rev() {
        acc = acc * y + c;
    }
    acc * y * y
}

fn validate(prime_bound: u64, exponent_bound: u32) -> Result<(), DensityError> {
    if prime_bound < 2 {
        return Err(DensityError::PrimeBoundTooSmall(prime_bound));
    }
    if prime_bound > MAX_PRIME_BOUND {
        return Err(DensityError::PrimeBoundTooLarge(prime_bound));
    }
    if !(2..=MAX_EXPONENT_BOUND).contains(&exponent_bound) {
        return Err(DensityError::ExponentBoundOutOfRange(exponent_bound));
    }
    Ok(())
}

/// One local factor `f_p` with a certified enclosure, evaluated through
/// the truncated series. `p` must be prime (not checked).
pub fn local_factor(
    s: &SSequence,
    p: u64,
    exponent_bound: u32,
) -> Result<Enclosure, DensityError> {
    validate(2, exponent_bound)?;
    let y = 1.0 / p as f64;
    let coeffs = series_coefficients(s, exponent_bound);
    let delta = horner_delta(&coeffs, y);
    // Dropped terms: |sum_{i>I} c_i y^i| <= y^(I+1)/(1-y) = 1/(p^I (p-1)).
    let truncation = pow_y(y, u64::from(exponent_bound)) * y / (1.0 - y);
    let rounding = EPS * (1.0 + 20.0 * y * y);
    let f = 1.0 + delta;
    let hi = (f + truncation + rounding).min(1.0);
    let lo = f - truncation - rounding;
    Ok(Enclosure { lo, point: f.min(hi).max(lo), hi })
}

/// The exact limit of the local factor as a floating-point number, from
/// the closed form; only rounding error remains, no truncation. Named
/// families are rejected.
pub fn local_factor_closed(s: &SSequence, p: u64) -> Result<f64, DensityError> {
    match delta_closed(s, p) {
        Some(delta) => Ok(1.0 + delta),
        None => Err(DensityError::NoClosedForm),
    }
}

fn ipow_checked(base: i128, exp: u64) -> Option<i128> {
    if exp >= 127 {
        return None;
    }
    let mut r = 1i128;
    for _ in 0..exp {
        r = r.checked_mul(base)?;
    }
    Some(r)
}

/// The local factor as an exact rational number.
///
/// For a finite descriptor with largest term `T`, the factor is
/// `(p-1) * (p^T + sum_t p^(T-t)) / p^(T+1)`; a cofinite tail starting at
/// `m` contributes an extra `+1` to the numerator over denominator `p^m`.
/// Errors out when the powers leave `i128` rather than silently wrapping.
pub fn local_factor_rational(s: &SSequence, p: u64) -> Result<Ratio<i128>, DensityError> {
    let p128 = i128::from(p);
    let overflow = |exponent: u64| DensityError::ExactOverflow { p, exponent };
    match s {
        SSequence::ExplicitFinite(terms) => {
            let t_max = *terms.last().expect("canonical sequences are nonempty");
            let lead = ipow_checked(p128, t_max).ok_or_else(|| overflow(t_max))?;
            let mut num = lead; // the s = 0 term of sum_{s in S∪{0}} p^(T-s)
            for &t in terms {
                num = num
                    .checked_add(ipow_checked(p128, t_max - t).expect("smaller power fits"))
                    .ok_or_else(|| overflow(t_max))?;
            }
            let num = num.checked_mul(p128 - 1).ok_or_else(|| overflow(t_max))?;
            let den = lead.checked_mul(p128).ok_or_else(|| overflow(t_max + 1))?;
            Ok(Ratio::new(num, den))
        }
        SSequence::CofiniteTail { finite_part, tail_start } => {
            if *tail_start == 1 {
                return Ok(Ratio::from_integer(1));
            }
            // Finite terms sit strictly below m = tail_start, so p^m is a
            // common denominator: f = [(p-1) * sum_{s in fin∪{0}} p^(m-1-s) + 1] / p^m.
            let m = *tail_start;
            let den = ipow_checked(p128, m).ok_or_else(|| overflow(m))?;
            let mut num = ipow_checked(p128, m - 1).expect("smaller power fits");
            for &t in finite_part {
                num = num
                    .checked_add(ipow_checked(p128, m - 1 - t).expect("smaller power fits"))
                    .ok_or_else(|| overflow(m))?;
            }
            let num = num.checked_mul(p128 - 1).ok_or_else(|| overflow(m))?;
            let num = num.checked_add(1).ok_or_else(|| overflow(m))?;
            Ok(Ratio::new(num, den))
        }
        SSequence::Named(_) => Err(DensityError::NoClosedForm),
    }
}

/// A-priori tail bounds, uniform over all sequences. These are the crude
/// envelopes; [`density`] certifies its bracket with far sharper terms,
/// and a test pins sharp <= crude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    /// `|sum_{p>P} log f_p| <= sum 2/(p(p-1)) <= 2/P`, using
    /// `|log(1+x)| <= 2|x|` for `|x| <= 1/2` and the telescoping sum
    /// `sum_{n>P} 1/(n(n-1)) = 1/P`.
    pub prime_tail_bound: f64,
    /// Per-factor series truncation `1/(p^I(p-1))` summed over all
    /// primes: at most `2^-I + 2 * 3^-I`.
    pub exponent_tail_bound: f64,
}

pub fn tail_bounds(prime_bound: u64, exponent_bound: u32) -> Result<TailBounds, DensityError> {
    validate(prime_bound, exponent_bound)?;
    let i = exponent_bound as i32;
    Ok(TailBounds {
        prime_tail_bound: 2.0 / prime_bound as f64,
        exponent_tail_bound: 2f64.powi(-i) + 2.0 * 3f64.powi(-i),
    })
}

/// Remainder of the prime tail after its `c_2 / p^2` part is anchored to
/// the prime zeta constant.
///
/// For p > P, with y = 1/p <= 1/(P+1) and q = (P+1)/P:
/// `log f_p - c_2 y^2 = [delta - c_2 y^2] + [log(1+delta) - delta]`,
/// where `|delta - c_2 y^2| <= y^3/(1-y) <= q y^3` and
/// `|log(1+delta) - delta| <= delta^2 / (2(1-|delta|)) <= half * q^2 y^4`
/// with `half = 0.5/(1 - 1/(P(P+1)))`. Summing `y^3 <= n^-3` over
/// `n > P` gives the integral bound `1/(2 P^2)`, hence
/// `|sum_{p>P} (log f_p - c_2 y^2)| <= (q + half * q^2 / P) / (2 P^2)`.
fn prime_tail_remainder(prime_bound: u64) -> f64 {
    let pb = prime_bound as f64;
    let q = (pb + 1.0) / pb;
    let half = 0.5 / (1.0 - 1.0 / (pb * (pb + 1.0)));
    (q + half * q * q / pb) / (2.0 * pb * pb)
}

/// Certified density bracket from an explicit prime bound and exponent
/// bound. The all-sequence short-circuits to the exact bracket [1, 1].
///
/// Evaluation is a single ascending pass over the primes in a fixed
/// order with compensated sums, so results are bit-identical across
/// runs, machines with the same float semantics, and thread settings.
pub fn density(
    s: &SSequence,
    prime_bound: u64,
    exponent_bound: u32,
) -> Result<DensityBracket, DensityError> {
    validate(prime_bound, exponent_bound)?;
    if s.is_all() {
        return Ok(DensityBracket::exactly_one(prime_bound, exponent_bound));
    }

    let closed = !matches!(s, SSequence::Named(_));
    let series = if closed {
        Vec::new()
    } else {
        series_coefficients(s, exponent_bound)
    };
    // Finite-term count feeds the per-factor rounding coefficient below.
    let n_terms = match s {
        SSequence::ExplicitFinite(terms) => terms.len(),
        SSequence::CofiniteTail { finite_part, .. } => finite_part.len(),
        SSequence::Named(_) => 0,
    };
    let c2 = if s.contains(2) { 0.0 } else { -1.0 };

    let primes = cached_primes(prime_bound);
    let mut log_sum = Compensated::default();
    let mut inv_square_sum = Compensated::default();
    let mut abs_log = 0.0f64;
    for &p in primes.iter().take_while(|&&p| p <= prime_bound) {
        let y = 1.0 / p as f64;
        let delta = if closed {
            delta_closed(s, p).expect("explicit descriptors have closed deltas")
        } else {
            horner_delta(&series, y)
        };
        let lf = delta.ln_1p();
        log_sum.add(lf);
        abs_log += lf.abs();
        inv_square_sum.add(y * y);
    }
    let partial_inv_square = inv_square_sum.value();
    let anchored_tail = c2 * (PRIME_ZETA_2 - partial_inv_square);

    // Error budget, all on the log scale.
    //
    // Prime tail: the remainder bound plus the numeric uncertainty of the
    // anchor difference (constant error, sum error, one subtraction).
    let anchor_rounding = if c2 == 0.0 { 0.0 } else { 4.0 * EPS };
    let prime_tail = prime_tail_remainder(prime_bound) + anchor_rounding;
    // Exponent truncation, series path only. Factor truncation
    // sums to at most 2^-I + 2*3^-I; dividing by f >= 1 - y^2 - trunc
    // >= 1/2 moves it onto the log scale with a factor of 2.
    let exponent_tail = if closed {
        0.0
    } else {
        let i = exponent_bound as i32;
        2.0 * (2f64.powi(-i) + 2.0 * 3f64.powi(-i))
    };
    // Rounding: each term contributes at most (4*k + 50) * EPS * y^2
    // (power evaluations, the small sums, and ln_1p, with every power
    // bounded by y^2 and every Horner intermediate by 2), and the two
    // compensated sums contribute 2 * EPS * sum|log f_p| and a constant.
    let per_term = (4 * n_terms + 50) as f64;
    let rounding = EPS * (per_term * partial_inv_square + 2.0 * abs_log + 8.0);

    let band = (prime_tail + exponent_tail + rounding) * (1.0 + 4.0 * EPS);
    let log_point = log_sum.value() + anchored_tail;

    // exp() is correct to under an ulp; 4*EPS also covers the final
    // additions. log_point <= band holds because densities are <= 1, so
    // lo never lands above 1 while hi is clamped there.
    let hi = ((log_point + band).exp() * (1.0 + 4.0 * EPS)).min(1.0);
    let lo = (log_point - band).exp() * (1.0 - 4.0 * EPS);
    let point = log_point.exp().clamp(lo, hi);

    Ok(DensityBracket {
        lo,
        hi,
        point,
        prime_bound,
        exponent_bound,
        tail_terms: TailTerms {
            prime_tail_bound: prime_tail,
            exponent_tail_bound: exponent_tail,
            rounding_bound: rounding,
        },
    })
}

/// [`density`] at the default bounds (P = 10^6, I = 64); width lands
/// near 1.5e-12 for every descriptor.
pub fn density_default(s: &SSequence) -> DensityBracket {
    density(s, DEFAULT_PRIME_BOUND, DEFAULT_EXPONENT_BOUND).expect("default bounds are valid")
}

/// Evaluates at growing prime bounds until the bracket width reaches
/// `target`, starting from 10^7 for sub-nanodigit requests. Gives up at
/// [`MAX_PRIME_BOUND`] with `met = false` rather than erroring, so
/// callers can still use the best bracket obtained.
pub fn density_to_width(s: &SSequence, target: f64) -> Result<WidthResult, DensityError> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(DensityError::BadWidth(target));
    }
    let mut prime_bound = if target < 1e-9 {
        10_000_000
    } else {
        DEFAULT_PRIME_BOUND
    };
    loop {
        let bracket = density(s, prime_bound, DEFAULT_EXPONENT_BOUND)?;
        let met = bracket.width() <= target;
        if met || prime_bound >= MAX_PRIME_BOUND {
            return Ok(WidthResult { bracket, target, met });
        }
        prime_bound = (prime_bound * 10).min(MAX_PRIME_BOUND);
    }
}
