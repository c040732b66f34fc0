//! nrsynth — proof checking and program synthesis for nested relational
//! transformations.
//!
//! The crate implements three interlocking tool chains over finite nested
//! relations (values built from Ur-elements with tupling and set nesting):
//!
//! * a checker for a restricted intuitionistic sequent calculus proving
//!   entailments between Δ0 formulas ([`calculus`]), with Craig interpolation
//!   ([`interpolate`]) and extraction of executable NRC[Get] programs from
//!   functionality proofs ([`synth`]);
//! * an evaluator and compiler for NRC[Get], the nested relational calculus
//!   with singleton extraction ([`nrc`]), including the `Verify` compiler
//!   turning Δ0 formulas into Boolean NRC expressions;
//! * Δ0 interpretations as an alternative executable format ([`interp`]),
//!   with translations in both directions and the Kuratowski-based monadic
//!   reduction ([`monadic`]).
//!
//! Everything is grounded in the brute-force semantics of [`values`], which
//! acts as the oracle for the crate's test suite.

pub mod calculus;
pub mod cli;
pub mod interp;
pub mod interpolate;
pub mod kernel;
pub mod monadic;
pub mod nrc;
pub mod sexpr;
pub mod synth;
pub mod values;
