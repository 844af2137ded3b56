//! Exact experiments on finite termination of alternating scaling.

pub mod classify;
pub mod falsify;
pub mod generate;
pub mod lemma;
mod residue;
pub mod sampling;

pub use classify::{classify, terminates_at, TerminationClass, Verdict, WitnessOrder};
pub use falsify::{falsify_search, FalsifierReport, FalsifyConfig};
pub use generate::{gen_exact_one_step, gen_exact_two_step, Generated};
pub use lemma::{lemma_harness, lemma_sums, LemmaConfig, LemmaReport, LemmaSums};
