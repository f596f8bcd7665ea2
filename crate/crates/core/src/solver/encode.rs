use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::Not;

use crate::expander::{PackageIndex, Repository};

/// A literal over package variables. Variable `i` stands for
/// `PackageIndex(i)` being installed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn installed(p: PackageIndex) -> Self {
        Lit(p.0 << 1)
    }

    pub fn not_installed(p: PackageIndex) -> Self {
        Lit((p.0 << 1) | 1)
    }

    pub fn package(self) -> PackageIndex {
        PackageIndex(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub(crate) fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Which repository edge a clause encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClauseOrigin {
    /// `¬from ∨ t1 ∨ … ∨ tk` for the `dependency`-th element of `D(from)`.
    DependencyEdge { from: PackageIndex, dependency: usize },
    /// `¬a ∨ ¬b`, with `a < b`.
    ConflictEdge(PackageIndex, PackageIndex),
    /// The unit clause `p` asserted by a query.
    QueryAssumption(PackageIndex),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub origin: ClauseOrigin,
}

/// CNF encoding of a repository. The variable-to-package map is the
/// identity on indices; [`ClauseSet::package`] names them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseSet {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl ClauseSet {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn origin(&self, clause: usize) -> ClauseOrigin {
        self.clauses[clause].origin
    }

    /// DIMACS CNF, with `c` lines mapping each variable to `name version`.
    pub fn to_dimacs(&self, repo: &Repository) -> String {
        let mut out = String::new();
        for idx in repo.indices() {
            let p = repo.package(idx);
            let _ = writeln!(out, "c {} {} {}", idx.0 + 1, p.name, p.version);
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in &c.lits {
                let v = i64::from(l.package().0) + 1;
                let _ = write!(out, "{} ", if l.is_positive() { v } else { -v });
            }
            out.push_str("0\n");
        }
        out
    }
}

/// One clause per dependency (`π → ⋁ d`) and one per conflict pair
/// (`¬(π1 ∧ π2)`). Queries are not part of the encoding.
pub fn encode(repo: &Repository) -> ClauseSet {
    let mut clauses = Vec::with_capacity(repo.len() * 4);
    for p in repo.indices() {
        for (k, dep) in repo.dependencies(p).iter().enumerate() {
            let mut lits = Vec::with_capacity(dep.targets.len() + 1);
            lits.push(Lit::not_installed(p));
            lits.extend(dep.targets.iter().map(|&t| Lit::installed(t)));
            clauses.push(Clause {
                lits,
                origin: ClauseOrigin::DependencyEdge {
                    from: p,
                    dependency: k,
                },
            });
        }
    }
    for (a, b) in repo.conflict_pairs() {
        clauses.push(Clause {
            lits: alloc::vec![Lit::not_installed(a), Lit::not_installed(b)],
            origin: ClauseOrigin::ConflictEdge(a, b),
        });
    }
    ClauseSet {
        num_vars: repo.len(),
        clauses,
    }
}
