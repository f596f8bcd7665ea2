//! Exhaustive installability check, kept apart from the clause encoding
//! and the search engine so it can serve as an independent oracle.

use alloc::vec::Vec;

use super::SolverError;
use crate::expander::{PackageId, Repository};

/// Largest repository [`brute_force_check`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Is there a healthy installation containing all of `pkgs`? Decided by
/// trying every superset of `pkgs` against abundance and peace.
pub fn brute_force_check(repo: &Repository, pkgs: &[PackageId]) -> Result<bool, SolverError> {
    let n = repo.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooLarge {
            packages: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut required = 0u32;
    for id in pkgs {
        let idx = repo
            .index_of(id)
            .ok_or_else(|| SolverError::UnknownPackage(id.clone()))?;
        required |= 1 << idx.0;
    }
    let bit = |i: usize| 1u32 << i;
    // needs[p]: one mask per dependency of p; clashes[p]: mask of conflicts.
    let needs: Vec<Vec<u32>> = repo
        .indices()
        .map(|p| {
            repo.dependencies(p)
                .iter()
                .map(|d| d.targets.iter().fold(0, |m, t| m | bit(t.get())))
                .collect()
        })
        .collect();
    let clashes: Vec<u32> = repo
        .indices()
        .map(|p| repo.conflicts_of(p).iter().fold(0, |m, t| m | bit(t.get())))
        .collect();
    let healthy = |inst: u32| {
        (0..n).filter(|&p| inst & bit(p) != 0).all(|p| {
            needs[p].iter().all(|&d| inst & d != 0) && inst & clashes[p] == 0
        })
    };

    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let free = all & !required;
    // Enumerate every subset of `free`, added to the required packages.
    let mut extra = free;
    loop {
        if healthy(required | extra) {
            return Ok(true);
        }
        if extra == 0 {
            return Ok(false);
        }
        extra = (extra - 1) & free;
    }
}
