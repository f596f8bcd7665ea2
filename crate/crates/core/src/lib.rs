//! Installability analysis for package repositories.
//!
//! Packages stanzas are parsed ([`metadata`]), normalized into a repository
//! of exact-version dependencies and conflicts ([`expander`]), and checked
//! for installability by a SAT search ([`solver`]).

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod conflict_scan;
pub mod expander;
pub mod metadata;
pub mod model;
pub mod solver;
