//! Finite-instance model checking for classical and star selection principles.
//!
//! Families of subsets live on a finite ground set `{0, .., n-1}` with
//! `n <= 16`. Principles are evaluated exhaustively over every length-`H`
//! sequence of families drawn from an explicit collection `A`, against a
//! target collection `B` that may be explicit, a predicate, a refinement
//! hull, or a complement view.

pub mod cli;
pub mod collection;
pub mod error;
pub mod instance;
pub mod predicate;
pub mod principles;
pub mod report;
pub mod search;
pub mod set;
pub mod star;
pub mod theorems;

pub use collection::{collection_contains, Collection};
pub use error::{Error, Result};
pub use instance::{load_instance, Budgets, EvalOptions, Instance, Kappa};
pub use predicate::{parse_predicate, DeclaredNames, Predicate};
pub use principles::{evaluate, EvalResult, PrincipleId, Selection, Verdict, Witness};
pub use set::{GroundSet, SetFamily, Subset};
