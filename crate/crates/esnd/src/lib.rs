//! Exponentially S-numbers: densities, counts, and the gap structure of
//! the density set.
//!
//! Fix an increasing sequence of positive integers `S` that starts with 1.
//! A positive integer is an *exponentially S-number* (an E(S)-number) when
//! every exponent in its prime factorization lies in `S`. With `S = {1}`
//! these are the squarefree numbers; with `S = {1, 2}` the cubefree
//! numbers; with `S` = all positive integers, every integer qualifies.
//!
//! Every such set E(S) has a natural density `h(E(S))`, an Euler product
//! over primes, and all densities land in the interval `[6/pi^2, 1]`.
//! This crate computes those densities with certified error brackets,
//! counts E(S)-numbers by sieve, and maps out the intervals ("gaps") that
//! densities provably never enter.
//!
//! ```
//! use esnd::{parse_descriptor, density_default};
//!
//! let squarefree = parse_descriptor("finite:1")?;
//! let d = density_default(&squarefree);
//! // 6/pi^2 = 0.6079271018540267, the density of the squarefree numbers.
//! assert!(d.lo <= 0.6079271018540267 && 0.6079271018540267 <= d.hi);
//! assert!(d.width() < 1e-10);
//! # Ok::<(), esnd::SequenceError>(())
//! ```

pub mod density;
pub mod enumeration;
pub mod gaps;
pub mod primes;
pub mod sequences;
pub mod verify;

pub use density::{
    density, density_default, density_to_width, local_factor, local_factor_closed,
    local_factor_rational, tail_bounds, DensityBracket, DensityError, Enclosure, TailBounds,
    TailTerms, WidthResult,
};
pub use enumeration::{
    enumerate, envelope, is_member, sieve_count, CountReport, EnumerationError,
};
pub use gaps::{
    berend_gap, compare, gap_catalog, gap_for, gap_measure, verify_disjoint, DensityOrder,
    Disjointness, GapCatalog, GapError, GapInterval, GapMeasure,
};
pub use primes::{primes_up_to, PrimeError, PrimeTable};
pub use sequences::{
    first_divergence, first_divergence_capped, parse_descriptor, Divergence, Family, SSequence,
    SequenceError, Side,
};
