//! Learning CTL formulas from Kripke structures with a SAT solver.
//!
//! * [`kripke`]: structures and their text format
//! * [`ctl`]: formulas, parsing, normal forms and syntax DAGs
//! * [`checker`]: explicit-state model checking
//! * [`encoder`]: the propositional encoding of bounded formula search
//! * [`learner`]: minimal formulas for positive/negative samples
//! * [`synth`]: bounded model synthesis and implication checks
//! * [`ceg`]: counterexample-guided inference from a single structure

pub mod ceg;
pub mod checker;
pub mod cli;
pub mod ctl;
pub mod encoder;
pub mod kripke;
pub mod learner;
pub mod synth;

pub use ctl::{parse_ctl, CtlFormula};
pub use kripke::{parse_kripke, print_kripke, KripkeStructure, Proposition};
