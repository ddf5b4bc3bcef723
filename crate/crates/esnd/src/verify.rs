//! Built-in verification suites, exposed on the command line as
//! `esnd verify <suite>`.
//!
//! Each suite cross-checks one pillar of the crate against an
//! independent route: the divergence comparator against certified
//! bracket order, catalog disjointness, partial-sequence convergence
//! against the full density, and sieve enumerations against fixture
//! files of published integer sequences.

use serde::Serialize;

use crate::density::{density_to_width, DensityBracket};
use crate::enumeration::enumerate;
use crate::gaps::{compare, gap_catalog, DensityOrder, Disjointness};
use crate::sequences::{parse_descriptor, SSequence};

/// Suite identifiers accepted by [`run_suite`], in execution order.
pub const SUITE_NAMES: [&str; 4] = ["lemma4", "disjoint", "convergence", "oeis"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    /// Empty on success; otherwise one message per failed check, the
    /// first being the smallest counterexample found.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_suite(name: &str) -> Option<SuiteOutcome> {
    match name {
        "lemma4" => Some(comparator_suite()),
        "disjoint" => Some(disjoint_suite()),
        "convergence" => Some(convergence_suite()),
        "oeis" => Some(oeis_suite()),
        _ => None,
    }
}

pub fn all_suites() -> Vec<SuiteOutcome> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n).expect("known name"))
        .collect()
}

fn certified(s: &SSequence, width: f64) -> DensityBracket {
    density_to_width(s, width)
        .expect("width and bounds are valid")
        .bracket
}

/// All 32 finite sequences with terms up to 6, all 496 pairs: the
/// divergence comparator must agree with certified bracket order at
/// width 1e-10, with strict separation.
pub fn comparator_suite() -> SuiteOutcome {
    let sequences: Vec<SSequence> = (0u32..32)
        .map(|mask| {
            let terms =
                std::iter::once(1u64).chain((2..=6u64).filter(|t| mask >> (t - 2) & 1 == 1));
            SSequence::finite(terms).expect("starts at 1")
        })
        .collect();
    let brackets: Vec<DensityBracket> =
        sequences.iter().map(|s| certified(s, 1e-10)).collect();

    let mut checks = 0;
    let mut failures = Vec::new();
    for i in 0..sequences.len() {
        for j in (i + 1)..sequences.len() {
            checks += 1;
            let separated = match compare(&sequences[i], &sequences[j]) {
                Ok(DensityOrder::AGreater) => brackets[i].lo > brackets[j].hi,
                Ok(DensityOrder::BGreater) => brackets[j].lo > brackets[i].hi,
                Err(e) => {
                    failures.push(format!(
                        "{} vs {}: comparator error: {e}",
                        sequences[i], sequences[j]
                    ));
                    continue;
                }
            };
            if !separated {
                failures.push(format!(
                    "{} vs {}: comparator order not confirmed by brackets [{}, {}] / [{}, {}]",
                    sequences[i],
                    sequences[j],
                    brackets[i].lo,
                    brackets[i].hi,
                    brackets[j].lo,
                    brackets[j].hi,
                ));
            }
        }
    }
    SuiteOutcome { name: "lemma4", checks, failures }
}

/// The 31 gaps with terms up to 6 must be pairwise disjoint at
/// endpoint width 1e-9, with no inconclusive pair.
pub fn disjoint_suite() -> SuiteOutcome {
    let mut failures = Vec::new();
    match gap_catalog(6, 1e-9) {
        Ok(catalog) => {
            if catalog.gaps.len() != 31 {
                failures.push(format!("expected 31 gaps, found {}", catalog.gaps.len()));
            }
            match catalog.disjointness {
                Disjointness::Disjoint => {}
                Disjointness::Overlap { first, second } => failures.push(format!(
                    "gaps {} and {} overlap",
                    catalog.gaps[first].s1, catalog.gaps[second].s1
                )),
                Disjointness::Inconclusive { first, second } => failures.push(format!(
                    "gaps {} and {} not separated at this width",
                    catalog.gaps[first].s1, catalog.gaps[second].s1
                )),
            }
        }
        Err(e) => failures.push(format!("catalog construction failed: {e}")),
    }
    SuiteOutcome { name: "disjoint", checks: 31, failures }
}

/// Densities of the odd sequence's prefixes must approach the full
/// density monotonically (strictly, for prefixes of 2 to 12 terms) and
/// land within 1e-6 at 12 terms; prefix and cofinite-cover densities
/// must bracket the full one.
pub fn convergence_suite() -> SuiteOutcome {
    let odd = parse_descriptor("named:odd").expect("valid");
    let full = certified(&odd, 1e-10);
    let mut checks = 0;
    let mut failures = Vec::new();

    let mut previous = f64::INFINITY;
    let mut last_diff = f64::NAN;
    for n in 2..=12u64 {
        let prefix = odd.partial(n).expect("odd is infinite");
        let diff = (certified(&prefix, 1e-10).point - full.point).abs();
        checks += 1;
        if diff >= previous {
            failures.push(format!(
                "prefix of {n} terms: difference {diff} did not drop below {previous}"
            ));
        }
        previous = diff;
        last_diff = diff;
    }
    checks += 1;
    if !(last_diff < 1e-6) {
        failures.push(format!("12-term prefix still {last_diff} away"));
    }

    for n in [3u64, 5, 7] {
        // Prefix {1,3,...,2n-1} from below, its cofinite completion
        // (tail from 2n) from above.
        let prefix = odd.partial(n).expect("odd is infinite");
        let cover = SSequence::cofinite(prefix.terms(), 2 * n).expect("terms sit below the tail");
        let lo = certified(&prefix, 1e-10);
        let hi = certified(&cover, 1e-10);
        checks += 2;
        if !(lo.hi < full.lo) {
            failures.push(format!("{n}-term prefix does not sit below the full density"));
        }
        if !(full.hi < hi.lo) {
            failures.push(format!("{n}-term cover does not sit above the full density"));
        }
    }
    SuiteOutcome { name: "convergence", checks, failures }
}

/// Fixture files carry the first 50 terms of four published sequences;
/// the sieve must reproduce each prefix exactly.
pub fn oeis_suite() -> SuiteOutcome {
    let fixtures: [(&str, &str, &str); 4] = [
        ("A005117", "finite:1", include_str!("../fixtures/A005117.txt")),
        ("A004709", "finite:1,2", include_str!("../fixtures/A004709.txt")),
        ("A268335", "named:odd", include_str!("../fixtures/A268335.txt")),
        ("A138302", "named:pow2", include_str!("../fixtures/A138302.txt")),
    ];
    let mut checks = 0;
    let mut failures = Vec::new();
    for (id, descriptor, text) in fixtures {
        checks += 1;
        let expected: Vec<u64> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse().unwrap_or_else(|_| panic!("{id}: bad fixture line {l:?}")))
            .collect();
        let s = parse_descriptor(descriptor).expect("valid");
        let last = *expected.last().expect("fixtures are nonempty");
        match enumerate(&s, last) {
            Ok(members) if members == expected => {}
            Ok(members) => {
                let i = members
                    .iter()
                    .zip(&expected)
                    .position(|(a, b)| a != b)
                    .unwrap_or_else(|| members.len().min(expected.len()));
                failures.push(format!(
                    "{id} ({descriptor}): first mismatch at index {i}: sieve {:?} vs fixture {:?}",
                    members.get(i),
                    expected.get(i),
                ));
            }
            Err(e) => failures.push(format!("{id}: enumeration failed: {e}")),
        }
    }
    SuiteOutcome { name: "oeis", checks, failures }
}
