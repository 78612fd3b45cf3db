pub mod census;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod field;
pub mod group;
pub mod perm;
pub mod polytope;
pub mod presentation;
pub mod search;
pub mod todd_coxeter;

pub use error::{Error, Result};
