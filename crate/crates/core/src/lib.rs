//! Exact induced-subtournament censuses and inducibility tooling.
//!
//! The crate is organised around a bit-packed [`Tournament`]:
//!
//! - [`canon`]: canonical labeling and isomorphism for `n <= 16`
//! - [`census`]: exact counts of every 3- and 4-vertex induced type
//! - [`constructions`]: transitive tournaments, carousels, random and
//!   iterated blow-up tournaments
//! - [`search`]: orderly enumeration, exhaustive and local maximisation
//! - [`diagnostics`]: degree bands, cut structure, quasi-randomness audits
//! - [`analysis`]: closed forms and the blow-up density optimisation
//! - [`cli`]: the `tourney` command-line front end

pub mod analysis;
pub mod canon;
pub mod census;
pub mod cli;
pub mod constructions;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod pattern;
pub mod rational;
pub mod search;
pub mod tournament;

pub use canon::{canonical_form, is_isomorphic, CanonicalForm};
pub use census::{Census, DensityReport, VertexLoad};
pub use error::{Error, Result};
pub use pattern::PatternId;
pub use tournament::Tournament;
