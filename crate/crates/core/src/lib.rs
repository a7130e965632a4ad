//! Engines for reasoning that can retract its conclusions.
//!
//! The crate has five cooperating parts:
//!
//! - [`logic`] — propositional formulas, clausal conversion, a complete
//!   DPLL satisfiability check, classical entailment, and schema grounding
//!   over finite domains.
//! - [`defaults`] — Reiter-style default theories: extension enumeration by
//!   process-tree search with fixpoint validation, plus credulous and
//!   skeptical entailment over the extensions.
//! - [`prob`] — exact probability over finite weighted world models, with
//!   relevance classification and the closed-form lottery-collapse values
//!   checked against direct enumeration.
//! - [`defeat`] — probabilistic acceptance (strength above a threshold),
//!   undercutting and rebutting defeaters, minimal inconsistent sets, and
//!   collective defeat, combined into a warrant report with provenance.
//! - [`scenario`] — ready-made theories and models: the Nixon diamond,
//!   exceptional-kinds Tweety, fair and unfair lotteries, the preface
//!   (common-cause) model, the competing-partitions model, and the
//!   lottery-collapse construction.
//!
//! All probabilities and weights are exact rationals ([`ratio::Rational`]);
//! no tolerance is applied anywhere unless a caller asks for one.

pub mod defaults;
pub mod defeat;
pub mod error;
pub mod logic;
pub mod prob;
pub mod ratio;
pub mod scenario;

pub use error::{Error, Result};
pub use ratio::Rational;
