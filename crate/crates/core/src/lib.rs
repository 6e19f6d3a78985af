//! Extended (Balk) metrics on finite universes.
//!
//! An extended metric assigns a real value to every nonempty finite subset
//! of a set, vanishing exactly on singletons and obeying the set-union
//! triangle inequality. This crate makes the calculus around them
//! executable at desk scale:
//!
//! * [`axioms`] — exhaustive axiom verification with counterexample
//!   witnesses, for extended metrics, ordinary metrics, G-metrics and the
//!   ultrametric-style strong triangle;
//! * [`construct`] — the constructive maps: diameter generation, binary
//!   and ternary projections, generalized diameters, the k-increasing
//!   level-table family, and the symmetric-G extension pipeline;
//! * [`theorems`] — executable oracles for the equivalence theorems and
//!   inequality lemmas, evaluating each clause independently;
//! * [`pretangent`] — numerical pretangent spaces: mutual stability of
//!   point sequences under a normalizing sequence, quotient spaces, and
//!   the lifted extended metric with convergence diagnostics.
//!
//! Universes are capped at 24 elements (tables are total over all `2^n - 1`
//! nonempty subsets). All types are immutable after construction.

pub mod axioms;
pub mod construct;
pub mod error;
pub mod g_table;
pub mod metric;
pub mod pretangent;
pub mod report;
pub mod set_function;
pub mod space;
pub mod theorems;
pub mod tolerance;

pub use error::{Error, Result};
pub use g_table::GMetricTable;
pub use metric::FiniteMetric;
pub use report::{CheckReport, Verdict, Witness};
pub use set_function::SetFunction;
pub use space::{canonical_subset_key, image_set, parse_subset_key, Subset, Universe};
pub use tolerance::{TolMode, Tolerance};

/// Canonical textual form of any serializable object: pretty JSON plus a
/// trailing newline. Re-serializing a parsed document reproduces it byte
/// for byte.
pub fn canonical_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    text.push('\n');
    text
}
