//! Annotation projection over word alignments.
//!
//! Source-side role annotations are carried onto a translation by computing
//! an optimal alignment between the constituents (or words) of the two
//! sentences and transferring each role onto the target units aligned with
//! its source units. Constituent similarity is the mean of the two directed
//! Jaccard overlaps induced by the word alignment; alignments are
//! minimum-weight perfect matchings, edge covers, or total functions under
//! the weight `-ln sim`.
//!
//! This crate is `no_std` (it needs `alloc`). File IO and the command line
//! live in the `semproj` crate.
#![no_std]
extern crate alloc;

pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod matcher;
pub mod model;
pub mod projection;
pub mod similarity;
pub mod text;

pub use error::{Error, Result};
