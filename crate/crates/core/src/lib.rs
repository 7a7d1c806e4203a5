//! Unification nets for first-order multiplicative linear logic.
//!
//! A net is a linking of the atoms of a sequent; it is correct when the
//! equations along its links have a most general unifier and every switching
//! of its graph, with the precedences of that unifier drawn as extra edges, is
//! a tree. [`nets::check_correct`] decides this in quadratic time without
//! expanding the unifier. Around the checker sit a sequent calculus
//! ([`calculus`]), translation and sequentialization, cut elimination on nets
//! ([`cutelim`]), Girard nets with explicit witnesses, and the `unet` CLI.
//!
//! ```
//! use unets::nets::{check_correct, Linking};
//!
//! let l = Linking::parse("(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)").unwrap();
//! assert!(check_correct(&l).unwrap().verdict.is_correct());
//! ```

pub mod calculus;
pub mod cli;
pub mod cutelim;
pub mod families;
pub mod nets;
pub mod sample;
pub mod syntax;
pub mod unify;
