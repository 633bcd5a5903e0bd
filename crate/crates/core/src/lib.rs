//! Exact weighted genome-rearrangement distances through confluent string
//! rewriting over permutation group presentations.
//!
//! A model's generators are inversions of a genome's regions. Completing the
//! model's presentation under a weighted lexicographic order gives a
//! rewriting system whose normal forms are minimal-weight words, so reducing
//! any word for `π′π⁻¹` yields the weighted distance between `π` and `π′`.

pub mod distance;
pub mod files;
pub mod oracle;
pub mod order;
pub mod perm;
pub mod phylo;
pub mod presentation;
pub mod rational;
pub mod rewrite;

/// A generator index into a [`presentation::GeneratorSystem`].
pub type Letter = u16;

/// Exact weights and distances.
pub type Rational = num::rational::Ratio<i64>;

pub use order::{ReductionOrder, Word};
pub use perm::Permutation;
pub use presentation::{GeneratorSystem, Precedence, Presentation};
pub use rewrite::{knuth_bendix, Limits, RewritingSystem, Rule, Status};
