//! The gap structure of the set of densities.
//!
//! Densities of E(S)-number sets do not fill `[6/pi^2, 1]` evenly: around
//! certain points there are whole intervals that no density can enter.
//! Each explicit finite sequence `S1 = {s(1), ..., s(k)}` with `k >= 2`
//! produces one such gap. Dropping its last term and replacing it with
//! the cofinite tail `{s(k)+1, s(k)+2, ...}` gives a second sequence
//! `S2`, and the open interval `(h(E(S2)), h(E(S1)))` contains no density
//! at all: any sequence agreeing with `S1` through `s(k)` has density at
//! least `h(E(S1))`, and any sequence that first deviates earlier falls
//! at or below `h(E(S2))`.
//!
//! [`gap_catalog`] enumerates every gap whose defining terms stay below a
//! bound and certifies their pairwise disjointness from the endpoint
//! brackets alone.

use std::io;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{
    density_to_width, local_factor_rational, DensityBracket, DensityError,
};
use crate::sequences::{first_divergence, SSequence, SequenceError, Side};

pub const DEFAULT_GAP_WIDTH: f64 = 1e-9;
pub const MAX_CATALOG_BOUND: u64 = 12;

/// `1 - 6/pi^2`: no catalog's total gap length may exceed this, since
/// all densities live in `[6/pi^2, 1]`.
pub const GAP_MEASURE_CEILING: f64 = 0.392072898145973371336723220741634166574;

#[derive(Debug, Error)]
pub enum GapError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("gap construction needs an explicit finite sequence with at least two terms")]
    NeedsFiniteWithTwoTerms,
    #[error("catalog bound must lie in 2..={MAX_CATALOG_BOUND} (got {0})")]
    BadCatalogBound(u64),
    #[error(
        "gap endpoints failed to separate at width {width}: left hi {left_hi} vs right lo {right_lo}"
    )]
    EndpointsNotSeparated { width: f64, left_hi: f64, right_lo: f64 },
    #[error("closed-form factor identity failed at p = {p}")]
    FactorIdentity { p: u64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Verdict of [`compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityOrder {
    AGreater,
    BGreater,
}

/// Orders two densities without evaluating either one.
///
/// The sequences agree below their first divergence point `s*`; the one
/// containing `s*` keeps strictly more numbers in its E-set, hence has
/// the strictly greater density. Set-equal inputs are an error.
pub fn compare(a: &SSequence, b: &SSequence) -> Result<DensityOrder, GapError> {
    let d = first_divergence(a, b)?;
    Ok(match d.owner {
        Side::A => DensityOrder::AGreater,
        Side::B => DensityOrder::BGreater,
    })
}

/// One certified density gap `(h(E(s2)), h(E(s1)))`.
#[derive(Debug, Clone)]
pub struct GapInterval {
    /// The finite sequence defining the gap; its density is the right
    /// endpoint.
    pub s1: SSequence,
    /// `s1` with the last term replaced by the tail above it; its density
    /// is the left endpoint.
    pub s2: SSequence,
    pub left: DensityBracket,
    pub right: DensityBracket,
    /// `right.point - left.point`.
    pub length: f64,
    /// Half the two bracket widths combined; the length is known to
    /// within this.
    pub uncertainty: f64,
}

/// The gap defined by a finite sequence of at least two terms, with both
/// endpoint densities certified to `width`.
pub fn gap_for(s1: &SSequence, width: f64) -> Result<GapInterval, GapError> {
    let terms = match s1 {
        SSequence::ExplicitFinite(v) if v.len() >= 2 => v.clone(),
        _ => return Err(GapError::NeedsFiniteWithTwoTerms),
    };
    let last = *terms.last().expect("len >= 2");
    let s2 = SSequence::cofinite(terms[..terms.len() - 1].iter().copied(), last + 1)
        .expect("prefix of a canonical sequence stays canonical");
    let left = density_to_width(&s2, width)?.bracket;
    let right = density_to_width(s1, width)?.bracket;
    if left.hi >= right.lo {
        return Err(GapError::EndpointsNotSeparated {
            width,
            left_hi: left.hi,
            right_lo: right.lo,
        });
    }
    Ok(GapInterval {
        s1: s1.clone(),
        s2,
        length: right.point - left.point,
        uncertainty: 0.5 * (left.width() + right.width()),
        left,
        right,
    })
}

/// The gap below the cubefree density, with every local factor checked
/// against its closed form in exact arithmetic.
///
/// For `S1 = {1, 2}` the factors are `1 - 1/p^3`; for the flanking
/// `S2 = {1} ∪ {3, 4, ...}` they are `1 - (p-1)/p^3`. Both identities
/// are verified as rationals for all p <= 100 before the floating-point
/// gap is returned.
pub fn berend_gap() -> Result<GapInterval, GapError> {
    let s1 = SSequence::finite([1u64, 2]).expect("starts at 1");
    let gap = gap_for(&s1, DEFAULT_GAP_WIDTH)?;
    for p in crate::primes::primes_up_to(100) {
        let p3 = i128::from(p).pow(3);
        let right = local_factor_rational(&gap.s1, p)?;
        if right != Ratio::new(p3 - 1, p3) {
            return Err(GapError::FactorIdentity { p });
        }
        let left = local_factor_rational(&gap.s2, p)?;
        if left != Ratio::new(p3 - i128::from(p) + 1, p3) {
            return Err(GapError::FactorIdentity { p });
        }
    }
    Ok(gap)
}

/// Pairwise relation of a catalog's gaps, certified from brackets alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Disjointness {
    Disjoint,
    /// Two gaps certifiably intersect (indices into the sorted catalog).
    Overlap { first: usize, second: usize },
    /// Brackets too wide to separate this adjacent pair either way.
    Inconclusive { first: usize, second: usize },
}

/// Checks that gaps, sorted by left endpoint, are pairwise disjoint.
///
/// Only adjacent pairs need checking: if each gap ends at or before the
/// next begins, disjointness chains across the whole list.
pub fn verify_disjoint(gaps: &[GapInterval]) -> Disjointness {
    for (i, pair) in gaps.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.right.hi <= b.left.lo {
            continue;
        }
        if a.right.lo > b.left.hi {
            return Disjointness::Overlap { first: i, second: i + 1 };
        }
        return Disjointness::Inconclusive { first: i, second: i + 1 };
    }
    Disjointness::Disjoint
}

#[derive(Debug, Clone)]
pub struct GapCatalog {
    pub max_term: u64,
    pub width: f64,
    /// Sorted by left endpoint, ascending.
    pub gaps: Vec<GapInterval>,
    pub total_length: f64,
    pub disjointness: Disjointness,
}

/// Every gap from finite sequences `{1} ∪ T` with `T` a nonempty subset
/// of `{2, ..., max_term}`: `2^(max_term - 1) - 1` gaps in all.
pub fn gap_catalog(max_term: u64, width: f64) -> Result<GapCatalog, GapError> {
    if !(2..=MAX_CATALOG_BOUND).contains(&max_term) {
        return Err(GapError::BadCatalogBound(max_term));
    }
    let n_subsets = 1u32 << (max_term - 1);
    let mut gaps: Vec<GapInterval> = (1..n_subsets)
        .into_par_iter()
        .map(|mask| {
            let terms = std::iter::once(1u64)
                .chain((2..=max_term).filter(|t| mask >> (t - 2) & 1 == 1));
            let s1 = SSequence::finite(terms).expect("starts at 1");
            gap_for(&s1, width)
        })
        .collect::<Result<_, _>>()?;
    gaps.sort_by(|a, b| {
        a.left.point.partial_cmp(&b.left.point).expect("densities are finite")
    });
    let total_length = gaps.iter().map(|g| g.length).sum();
    let disjointness = verify_disjoint(&gaps);
    Ok(GapCatalog { max_term, width, gaps, total_length, disjointness })
}

/// Total gap length of a catalog, with a certified interval around it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapMeasure {
    pub max_term: u64,
    pub gap_count: usize,
    pub total_length: f64,
    /// Sum of certified per-gap minimum lengths.
    pub total_lo: f64,
    /// Sum of certified per-gap maximum lengths.
    pub total_hi: f64,
    /// `1 - 6/pi^2`, the hard ceiling for any total.
    pub ceiling: f64,
}

/// Whether the totals approach the ceiling as `max_term` grows is an
/// open question; callers presenting these numbers should label the
/// convergence as conjectural.
pub fn gap_measure(max_term: u64, width: f64) -> Result<GapMeasure, GapError> {
    let catalog = gap_catalog(max_term, width)?;
    let total_lo = catalog.gaps.iter().map(|g| g.right.lo - g.left.hi).sum();
    let total_hi = catalog.gaps.iter().map(|g| g.right.hi - g.left.lo).sum();
    Ok(GapMeasure {
        max_term,
        gap_count: catalog.gaps.len(),
        total_length: catalog.total_length,
        total_lo,
        total_hi,
        ceiling: GAP_MEASURE_CEILING,
    })
}

/// Flat row for CSV and JSON export; sequences appear as their canonical
/// descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub s1: String,
    pub s2: String,
    pub left_lo: f64,
    pub left_hi: f64,
    pub right_lo: f64,
    pub right_hi: f64,
    pub length: f64,
}

impl From<&GapInterval> for GapRow {
    fn from(g: &GapInterval) -> GapRow {
        GapRow {
            s1: g.s1.to_string(),
            s2: g.s2.to_string(),
            left_lo: g.left.lo,
            left_hi: g.left.hi,
            right_lo: g.right.lo,
            right_hi: g.right.hi,
            length: g.length,
        }
    }
}

pub fn catalog_rows(catalog: &GapCatalog) -> Vec<GapRow> {
    catalog.gaps.iter().map(GapRow::from).collect()
}

/// Writes `s1,s2,left_lo,left_hi,right_lo,right_hi,length` with a header
/// row.
pub fn write_catalog_csv<W: io::Write>(catalog: &GapCatalog, writer: W) -> Result<(), GapError> {
    let mut w = csv::Writer::from_writer(writer);
    for row in catalog_rows(catalog) {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_catalog_csv<R: io::Read>(reader: R) -> Result<Vec<GapRow>, GapError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// JSON mirror of the CSV rows: an array of row objects.
pub fn write_catalog_json<W: io::Write>(catalog: &GapCatalog, writer: W) -> Result<(), GapError> {
    Ok(serde_json::to_writer_pretty(writer, &catalog_rows(catalog))?)
}

pub fn read_catalog_json<R: io::Read>(reader: R) -> Result<Vec<GapRow>, GapError> {
    Ok(serde_json::from_reader(reader)?)
}
