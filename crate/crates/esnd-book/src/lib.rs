//! Keeps the book honest: every code block in `book/src` compiles and
//! runs here as a doctest, against the same `esnd` the reader installs.
//!
//! Nothing is exported; the modules exist only to host the included
//! markdown.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/sequences.md")]
pub mod sequences {}

#[doc = include_str!("../../../book/src/density.md")]
pub mod density {}

#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}

#[doc = include_str!("../../../book/src/gaps.md")]
pub mod gaps {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
