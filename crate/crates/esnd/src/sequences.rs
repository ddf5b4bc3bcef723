//! Exponent sequences: the `S` in "exponentially S-number".
//!
//! An [`SSequence`] is an increasing sequence of positive integers that
//! starts with 1, described in one of three ways: an explicit finite list,
//! a finite list plus a cofinite tail `{m, m+1, m+2, ...}`, or a named
//! built-in family. Descriptors have a canonical text form (see
//! [`parse_descriptor`]) and constructors normalize so that descriptor
//! equality is plain `==`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Membership scans in [`first_divergence`] stop here; sequences that are
/// intended to differ do so far earlier.
pub const DIVERGENCE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error(
        "unrecognized descriptor {0:?}; expected \"finite:<terms>\", \
         \"cofinite:<terms>;tail=<m>\", or a named family \
         (all, odd, pow2, squares, fibonacci, squarefree)"
    )]
    Syntax(String),
    #[error("invalid integer {0:?} in descriptor")]
    BadInteger(String),
    #[error("sequence must start at 1")]
    MustStartAtOne,
    #[error("terms must be strictly increasing: {next} follows {prev}")]
    NonIncreasing { prev: u64, next: u64 },
    #[error("tail start must be at least 1")]
    TailTooSmall,
    #[error("finite term {term} does not lie below the tail start {tail_start}")]
    TermOverlapsTail { term: u64, tail_start: u64 },
    #[error("sequences describe the same set; no divergence exists")]
    Identical,
    #[error("sequences agree on every integer up to {cap}")]
    NoDivergence { cap: u64 },
    #[error("partial prefix length must be at least 1")]
    EmptyPartial,
    #[error("cannot take {requested} terms from a sequence with only {available}")]
    PartialOutOfRange { requested: u64, available: u64 },
}

/// Built-in families, each an infinite exponent sequence containing 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Every positive integer; E(S) is all of N.
    All,
    /// Odd numbers; E(S) are the exponentially odd numbers.
    Odd,
    /// Powers of two: 1, 2, 4, 8, ...
    Pow2,
    /// Perfect squares: 1, 4, 9, 16, ...
    Squares,
    /// Fibonacci numbers with the 1,2,3,5,... indexing (no repeated 1).
    Fibonacci,
    /// Squarefree integers: 1, 2, 3, 5, 6, 7, 10, ...
    Squarefree,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::All,
        Family::Odd,
        Family::Pow2,
        Family::Squares,
        Family::Fibonacci,
        Family::Squarefree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::All => "all",
            Family::Odd => "odd",
            Family::Pow2 => "pow2",
            Family::Squares => "squares",
            Family::Fibonacci => "fibonacci",
            Family::Squarefree => "squarefree",
        }
    }

    fn from_name(name: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Set membership. `n = 0` is never a member.
    pub fn contains(self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            Family::All => true,
            Family::Odd => n % 2 == 1,
            Family::Pow2 => n.is_power_of_two(),
            Family::Squares => {
                let r = n.isqrt();
                r * r == n
            }
            Family::Fibonacci => {
                let (mut a, mut b) = (1u64, 2u64);
                while a < n {
                    let next = match a.checked_add(b) {
                        Some(next) => next,
                        None => return false,
                    };
                    a = b;
                    b = next;
                }
                a == n
            }
            Family::Squarefree => {
                let mut m = n;
                let mut d = 2u64;
                while d * d <= m {
                    if m % d == 0 {
                        m /= d;
                        if m % d == 0 {
                            return false;
                        }
                    }
                    d += 1;
                }
                true
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An exponent sequence in canonical form.
///
/// Canonical means: term lists are strictly increasing and start at 1, and
/// a cofinite descriptor absorbs finite terms adjacent to its tail
/// (`cofinite:1,2,3;tail=4` normalizes to `cofinite:;tail=1`, the set of
/// all positive integers). Construct through [`SSequence::finite`],
/// [`SSequence::cofinite`], or [`parse_descriptor`]; the enum fields are
/// exposed read-only via accessors so canonical form cannot be broken.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SSequence {
    ExplicitFinite(Vec<u64>),
    CofiniteTail { finite_part: Vec<u64>, tail_start: u64 },
    Named(Family),
}

impl SSequence {
    /// Finite sequence from arbitrary terms; sorts and deduplicates, then
    /// requires the least term to be 1.
    pub fn finite(terms: impl IntoIterator<Item = u64>) -> Result<SSequence, SequenceError> {
        let mut v: Vec<u64> = terms.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.first() != Some(&1) {
            return Err(SequenceError::MustStartAtOne);
        }
        Ok(SSequence::ExplicitFinite(v))
    }

    /// Finite part plus the tail `{tail_start, tail_start+1, ...}`.
    ///
    /// The finite part is sorted and deduplicated and must sit strictly
    /// below the tail. The result is canonicalized, so the returned
    /// descriptor may have a shorter finite part and a smaller tail start
    /// than requested. The set must contain 1: either `1` is among the
    /// terms or `tail_start == 1` with no terms.
    pub fn cofinite(
        finite_part: impl IntoIterator<Item = u64>,
        tail_start: u64,
    ) -> Result<SSequence, SequenceError> {
        if tail_start == 0 {
            return Err(SequenceError::TailTooSmall);
        }
        let mut v: Vec<u64> = finite_part.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if let Some(&term) = v.iter().find(|&&t| t >= tail_start) {
            return Err(SequenceError::TermOverlapsTail { term, tail_start });
        }
        let starts_at_one = v.first() == Some(&1) || (v.is_empty() && tail_start == 1);
        if !starts_at_one {
            return Err(SequenceError::MustStartAtOne);
        }
        let (finite_part, tail_start) = canonicalize_cofinite(v, tail_start);
        Ok(SSequence::CofiniteTail { finite_part, tail_start })
    }

    pub fn named(family: Family) -> SSequence {
        SSequence::Named(family)
    }

    /// Characteristic function `u(n)`: is `n` a term of the sequence?
    pub fn contains(&self, n: u64) -> bool {
        match self {
            SSequence::ExplicitFinite(v) => v.binary_search(&n).is_ok(),
            SSequence::CofiniteTail { finite_part, tail_start } => {
                n >= *tail_start || finite_part.binary_search(&n).is_ok()
            }
            SSequence::Named(f) => f.contains(n),
        }
    }

    /// `u(i) - u(i-1)`, the coefficient of `p^-i` in the density's local
    /// factors. Defined for `i >= 2` (panics below that).
    pub fn delta(&self, i: u64) -> i8 {
        assert!(i >= 2, "delta is defined for i >= 2");
        i8::from(self.contains(i)) - i8::from(self.contains(i - 1))
    }

    /// True when the descriptor denotes the set of all positive integers,
    /// in either spelling (`named:all` or `cofinite:;tail=1`).
    pub fn is_all(&self) -> bool {
        match self {
            SSequence::Named(Family::All) => true,
            SSequence::CofiniteTail { finite_part, tail_start } => {
                finite_part.is_empty() && *tail_start == 1
            }
            _ => false,
        }
    }

    /// Set-level equality. Distinct canonical descriptors denote distinct
    /// sets, except that `named:all` and `cofinite:;tail=1` coincide.
    pub fn denotes_same_set(&self, other: &SSequence) -> bool {
        self == other || (self.is_all() && other.is_all())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SSequence::ExplicitFinite(_))
    }

    /// Number of terms, when finite.
    pub fn len(&self) -> Option<u64> {
        match self {
            SSequence::ExplicitFinite(v) => Some(v.len() as u64),
            _ => None,
        }
    }

    /// Terms in increasing order; infinite descriptors yield an unbounded
    /// iterator.
    pub fn terms(&self) -> Terms<'_> {
        let inner = match self {
            SSequence::ExplicitFinite(v) => TermsInner::Finite(v.iter()),
            SSequence::CofiniteTail { finite_part, tail_start } => TermsInner::Cofinite {
                head: finite_part.iter(),
                next: *tail_start,
            },
            SSequence::Named(f) => TermsInner::Scan { family: *f, next: 1 },
        };
        Terms { inner }
    }

    /// The first `n` terms as an explicit finite sequence.
    pub fn partial(&self, n: u64) -> Result<SSequence, SequenceError> {
        if n == 0 {
            return Err(SequenceError::EmptyPartial);
        }
        if let Some(available) = self.len() {
            if n > available {
                return Err(SequenceError::PartialOutOfRange { requested: n, available });
            }
        }
        let v: Vec<u64> = self.terms().take(n as usize).collect();
        // Prefixes inherit "increasing, starts at 1" from the parent.
        Ok(SSequence::ExplicitFinite(v))
    }
}

fn canonicalize_cofinite(mut finite_part: Vec<u64>, mut tail_start: u64) -> (Vec<u64>, u64) {
    while let Some(&last) = finite_part.last() {
        if last + 1 == tail_start {
            finite_part.pop();
            tail_start = last;
        } else {
            break;
        }
    }
    (finite_part, tail_start)
}

pub struct Terms<'a> {
    inner: TermsInner<'a>,
}

enum TermsInner<'a> {
    Finite(std::slice::Iter<'a, u64>),
    Cofinite { head: std::slice::Iter<'a, u64>, next: u64 },
    Scan { family: Family, next: u64 },
}

impl Iterator for Terms<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match &mut self.inner {
            TermsInner::Finite(it) => it.next().copied(),
            TermsInner::Cofinite { head, next } => {
                if let Some(&t) = head.next() {
                    return Some(t);
                }
                let t = *next;
                *next += 1;
                Some(t)
            }
            TermsInner::Scan { family, next } => loop {
                let n = *next;
                *next += 1;
                if family.contains(n) {
                    return Some(n);
                }
            },
        }
    }
}

/// Which of the two compared sequences owns the divergence point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Smallest integer on which two sequences disagree, and who contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    pub value: u64,
    pub owner: Side,
}

/// [`first_divergence_capped`] with the default cap of 10^6.
pub fn first_divergence(a: &SSequence, b: &SSequence) -> Result<Divergence, SequenceError> {
    first_divergence_capped(a, b, DIVERGENCE_CAP)
}

/// Scans `2, 3, ...` for the least integer in exactly one of the two
/// sequences. Both contain 1, so the scan starts at 2. Set-equal inputs
/// are rejected up front; two distinct descriptors that happen to agree
/// everywhere up to `cap` report [`SequenceError::NoDivergence`].
pub fn first_divergence_capped(
    a: &SSequence,
    b: &SSequence,
    cap: u64,
) -> Result<Divergence, SequenceError> {
    if a.denotes_same_set(b) {
        return Err(SequenceError::Identical);
    }
    for value in 2..=cap {
        let in_a = a.contains(value);
        if in_a != b.contains(value) {
            let owner = if in_a { Side::A } else { Side::B };
            return Ok(Divergence { value, owner });
        }
    }
    Err(SequenceError::NoDivergence { cap })
}

/// Parses the descriptor grammar:
///
/// * `finite:1,2,5` — explicit finite list;
/// * `cofinite:1,4;tail=6` — finite part plus all integers from 6 up;
/// * `cofinite:;tail=1` — empty finite part, tail from 1: all integers;
/// * `named:odd`, or the bare family name `odd`.
///
/// Whitespace around tokens is tolerated. Term lists must be strictly
/// increasing and start at 1; a cofinite finite part must sit strictly
/// below its tail. Output of `Display` parses back to the same value.
pub fn parse_descriptor(text: &str) -> Result<SSequence, SequenceError> {
    let s = text.trim();
    if let Some(rest) = s.strip_prefix("finite:") {
        let terms = parse_term_list(rest)?;
        if terms.is_empty() {
            return Err(SequenceError::MustStartAtOne);
        }
        check_increasing_from_one(&terms)?;
        Ok(SSequence::ExplicitFinite(terms))
    } else if let Some(rest) = s.strip_prefix("cofinite:") {
        let (terms_text, tail_text) = rest
            .split_once(';')
            .ok_or_else(|| SequenceError::Syntax(text.to_owned()))?;
        let tail_text = tail_text.trim();
        let tail_value = tail_text
            .strip_prefix("tail=")
            .ok_or_else(|| SequenceError::Syntax(text.to_owned()))?;
        let tail_start = parse_term(tail_value)?;
        if tail_start == 0 {
            return Err(SequenceError::TailTooSmall);
        }
        let terms = parse_term_list(terms_text)?;
        if !terms.is_empty() {
            check_increasing_from_one(&terms)?;
        } else if tail_start != 1 {
            return Err(SequenceError::MustStartAtOne);
        }
        if let Some(&term) = terms.iter().find(|&&t| t >= tail_start) {
            return Err(SequenceError::TermOverlapsTail { term, tail_start });
        }
        let (finite_part, tail_start) = canonicalize_cofinite(terms, tail_start);
        Ok(SSequence::CofiniteTail { finite_part, tail_start })
    } else if let Some(rest) = s.strip_prefix("named:") {
        let name = rest.trim();
        Family::from_name(name)
            .map(SSequence::Named)
            .ok_or_else(|| SequenceError::Syntax(text.to_owned()))
    } else {
        Family::from_name(s)
            .map(SSequence::Named)
            .ok_or_else(|| SequenceError::Syntax(text.to_owned()))
    }
}

fn parse_term(token: &str) -> Result<u64, SequenceError> {
    let t = token.trim();
    t.parse::<u64>()
        .map_err(|_| SequenceError::BadInteger(t.to_owned()))
}

fn parse_term_list(text: &str) -> Result<Vec<u64>, SequenceError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_term).collect()
}

fn check_increasing_from_one(terms: &[u64]) -> Result<(), SequenceError> {
    if terms[0] != 1 {
        return Err(SequenceError::MustStartAtOne);
    }
    for w in terms.windows(2) {
        if w[1] <= w[0] {
            return Err(SequenceError::NonIncreasing { prev: w[0], next: w[1] });
        }
    }
    Ok(())
}

impl FromStr for SSequence {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_descriptor(s)
    }
}

impl fmt::Display for SSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SSequence::ExplicitFinite(v) => {
                f.write_str("finite:")?;
                write_terms(f, v)
            }
            SSequence::CofiniteTail { finite_part, tail_start } => {
                f.write_str("cofinite:")?;
                write_terms(f, finite_part)?;
                write!(f, ";tail={tail_start}")
            }
            SSequence::Named(family) => write!(f, "named:{family}"),
        }
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[u64]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(text: &str) -> SSequence {
        parse_descriptor(text).unwrap()
    }

    #[test]
    fn parses_the_three_forms() {
        assert_eq!(seq("finite:1,2,5"), SSequence::ExplicitFinite(vec![1, 2, 5]));
        assert_eq!(
            seq("cofinite:1,4;tail=6"),
            SSequence::CofiniteTail { finite_part: vec![1, 4], tail_start: 6 }
        );
        assert_eq!(seq("named:odd"), SSequence::Named(Family::Odd));
        assert_eq!(seq("odd"), SSequence::Named(Family::Odd));
        assert_eq!(seq(" finite: 1 , 2 , 5 "), seq("finite:1,2,5"));
    }

    #[test]
    fn all_has_two_spellings() {
        let cof = seq("cofinite:;tail=1");
        assert!(cof.is_all());
        assert!(seq("named:all").is_all());
        assert!(cof.denotes_same_set(&seq("all")));
        // Same set, distinct descriptors.
        assert_ne!(cof, seq("named:all"));
    }

    #[test]
    fn cofinite_absorbs_terms_adjacent_to_the_tail() {
        assert_eq!(seq("cofinite:1,2,3;tail=4"), seq("cofinite:;tail=1"));
        assert_eq!(seq("cofinite:1,3;tail=4").to_string(), "cofinite:1;tail=3");
        assert_eq!(seq("cofinite:1,4;tail=6").to_string(), "cofinite:1,4;tail=6");
    }

    #[test]
    fn rejects_malformed_descriptors() {
        use SequenceError::*;
        assert_eq!(parse_descriptor("finite:2,3"), Err(MustStartAtOne));
        assert_eq!(parse_descriptor("finite:"), Err(MustStartAtOne));
        assert_eq!(
            parse_descriptor("finite:1,5,3"),
            Err(NonIncreasing { prev: 5, next: 3 })
        );
        assert_eq!(
            parse_descriptor("finite:1,2,2"),
            Err(NonIncreasing { prev: 2, next: 2 })
        );
        assert_eq!(parse_descriptor("cofinite:1;tail=0"), Err(TailTooSmall));
        assert_eq!(
            parse_descriptor("cofinite:1,7;tail=5"),
            Err(TermOverlapsTail { term: 7, tail_start: 5 })
        );
        assert_eq!(parse_descriptor("cofinite:;tail=3"), Err(MustStartAtOne));
        assert_eq!(parse_descriptor("finite:1,x"), Err(BadInteger("x".into())));
        assert!(matches!(parse_descriptor("named:evens"), Err(Syntax(_))));
        assert!(matches!(parse_descriptor("cofinite:1,2"), Err(Syntax(_))));
        assert!(matches!(parse_descriptor(""), Err(Syntax(_))));
    }

    #[test]
    fn membership_of_named_families() {
        let odd = Family::Odd;
        assert!(odd.contains(1) && odd.contains(97) && !odd.contains(4));
        let p2 = Family::Pow2;
        assert!(p2.contains(1) && p2.contains(64) && !p2.contains(6));
        let sq = Family::Squares;
        assert!(sq.contains(1) && sq.contains(49) && !sq.contains(50));
        let fib = Family::Fibonacci;
        for n in [1, 2, 3, 5, 8, 13, 21, 34] {
            assert!(fib.contains(n), "{n} is a fibonacci term");
        }
        for n in [4, 6, 7, 9, 20, 33] {
            assert!(!fib.contains(n), "{n} is not a fibonacci term");
        }
        let sf = Family::Squarefree;
        assert!(sf.contains(1) && sf.contains(6) && sf.contains(1013));
        assert!(!sf.contains(4) && !sf.contains(12) && !sf.contains(2025));
        for f in Family::ALL {
            assert!(!f.contains(0));
            assert!(f.contains(1), "every family contains 1");
        }
    }

    #[test]
    fn delta_matches_membership_differences() {
        let s = seq("finite:1,2");
        assert_eq!(s.delta(2), 0);
        assert_eq!(s.delta(3), -1);
        assert_eq!(s.delta(4), 0);
        let squares = seq("squares");
        assert_eq!(squares.delta(2), -1);
        assert_eq!(squares.delta(4), 1);
        assert_eq!(squares.delta(5), -1);
    }

    #[test]
    fn delta_telescopes_back_to_membership() {
        let samples = [
            seq("finite:1,3,8"),
            seq("cofinite:1,2,6;tail=9"),
            seq("named:odd"),
            seq("named:pow2"),
            seq("named:squares"),
            seq("named:fibonacci"),
            seq("named:squarefree"),
        ];
        for s in &samples {
            let mut u = 1i32; // u(1) = 1 for every sequence
            for i in 2..=10_000u64 {
                u += i32::from(s.delta(i));
                assert_eq!(u, i32::from(s.contains(i)), "{s} at {i}");
            }
        }
    }

    #[test]
    fn divergence_finds_the_smallest_witness() {
        let d = first_divergence(&seq("finite:1"), &seq("finite:1,2")).unwrap();
        assert_eq!(d, Divergence { value: 2, owner: Side::B });

        // Squarefree contains 2; the odd numbers do not.
        let d = first_divergence(&seq("odd"), &seq("squarefree")).unwrap();
        assert_eq!(d, Divergence { value: 2, owner: Side::B });

        let d = first_divergence(&seq("cofinite:1;tail=4"), &seq("finite:1,4")).unwrap();
        assert_eq!(d, Divergence { value: 5, owner: Side::A });
    }

    #[test]
    fn divergence_rejects_equal_sets_and_respects_the_cap() {
        let e = first_divergence(&seq("named:all"), &seq("cofinite:;tail=1"));
        assert_eq!(e, Err(SequenceError::Identical));
        let e = first_divergence(&seq("odd"), &seq("odd"));
        assert_eq!(e, Err(SequenceError::Identical));

        let full: Vec<u64> = (1..=100).collect();
        let a = SSequence::finite(full).unwrap();
        let e = first_divergence_capped(&a, &seq("named:all"), 100);
        assert_eq!(e, Err(SequenceError::NoDivergence { cap: 100 }));
    }

    #[test]
    fn partial_takes_prefixes() {
        assert_eq!(seq("odd").partial(3).unwrap(), seq("finite:1,3,5"));
        assert_eq!(
            seq("cofinite:1;tail=4").partial(4).unwrap(),
            seq("finite:1,4,5,6")
        );
        assert_eq!(
            seq("fibonacci").partial(6).unwrap(),
            seq("finite:1,2,3,5,8,13")
        );
        assert_eq!(
            seq("finite:1,2").partial(5),
            Err(SequenceError::PartialOutOfRange { requested: 5, available: 2 })
        );
        assert_eq!(seq("odd").partial(0), Err(SequenceError::EmptyPartial));
    }

    #[test]
    fn terms_iterator_matches_membership() {
        let first: Vec<u64> = seq("squarefree").terms().take(7).collect();
        assert_eq!(first, [1, 2, 3, 5, 6, 7, 10]);
        let finite: Vec<u64> = seq("finite:1,4,9").terms().collect();
        assert_eq!(finite, [1, 4, 9]);
    }

    fn arb_sequence() -> impl Strategy<Value = SSequence> {
        let finite = proptest::collection::btree_set(2u64..=40, 0..8)
            .prop_map(|extra| SSequence::finite(extra.into_iter().chain([1])).unwrap());
        let cofinite = (proptest::collection::btree_set(2u64..=40, 0..6), 2u64..=50).prop_map(
            |(extra, tail)| {
                let below: Vec<u64> =
                    [1].into_iter().chain(extra.into_iter().filter(|&t| t < tail)).collect();
                SSequence::cofinite(below, tail).unwrap()
            },
        );
        let named = proptest::sample::select(&Family::ALL[..]).prop_map(SSequence::Named);
        prop_oneof![finite, cofinite, named]
    }

    proptest! {
        #[test]
        fn display_then_parse_is_identity(s in arb_sequence()) {
            prop_assert_eq!(parse_descriptor(&s.to_string()).unwrap(), s);
        }

        #[test]
        fn divergence_is_symmetric_in_value(a in arb_sequence(), b in arb_sequence()) {
            let ab = first_divergence_capped(&a, &b, 10_000);
            let ba = first_divergence_capped(&b, &a, 10_000);
            match (ab, ba) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(x.value, y.value);
                    prop_assert_ne!(x.owner, y.owner);
                }
                (Err(e), Err(f)) => prop_assert_eq!(e, f),
                other => prop_assert!(false, "asymmetric outcome {:?}", other),
            }
        }
    }
}
