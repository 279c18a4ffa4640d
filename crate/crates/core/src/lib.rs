//! Passive learning of separating formulas by semantic enumeration.

pub mod automata;
pub mod dag;
pub mod engine;
pub mod io;
pub mod kripke;
pub mod ml;
pub mod oracle;
pub mod random;
pub mod samples;
pub mod signature;
pub mod syntax;
pub mod ctl;
pub mod ltl;
pub mod ltlp;
