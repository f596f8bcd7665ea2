//! Installability checking.
//!
//! A repository is encoded once into clauses; each query asks for a model
//! with the queried packages installed. Satisfiable queries come back with
//! a healthy installation as witness, the rest with an [`Explanation`].

mod brute;
mod encode;
mod engine;
mod explain;

use alloc::vec::Vec;

pub use brute::{brute_force_check, BRUTE_FORCE_LIMIT};
pub use encode::{encode, Clause, ClauseOrigin, ClauseSet, Lit};
pub use explain::{Chain, ChainEnd, Explanation, Step};

use crate::expander::{PackageId, PackageIndex, Repository};
use crate::model::Installation;
use engine::{Engine, Outcome};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("package {0} is not in the repository")]
    UnknownPackage(PackageId),
    #[error("empty query")]
    EmptyQuery,
    #[error("{packages} packages exceed the limit of {limit}")]
    TooLarge { packages: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Installable { witness: Installation },
    NotInstallable { explanation: Explanation },
}

impl CheckResult {
    pub fn is_installable(&self) -> bool {
        matches!(self, CheckResult::Installable { .. })
    }

    pub fn witness(&self) -> Option<&Installation> {
        match self {
            CheckResult::Installable { witness } => Some(witness),
            CheckResult::NotInstallable { .. } => None,
        }
    }

    pub fn explanation(&self) -> Option<&Explanation> {
        match self {
            CheckResult::Installable { .. } => None,
            CheckResult::NotInstallable { explanation } => Some(explanation),
        }
    }
}

/// Answers many queries against one repository, reusing learned clauses.
pub struct Checker<'r> {
    repo: &'r Repository,
    clauses: ClauseSet,
    engine: Engine,
}

impl<'r> Checker<'r> {
    pub fn new(repo: &'r Repository) -> Self {
        Self::with_preference(repo, false)
    }

    /// With `prefer_installed`, witnesses install as much as they can,
    /// which lets one model cover many packages.
    pub fn with_preference(repo: &'r Repository, prefer_installed: bool) -> Self {
        let clauses = encode(repo);
        let engine = Engine::new(&clauses, prefer_installed);
        Checker {
            repo,
            clauses,
            engine,
        }
    }

    pub fn repository(&self) -> &'r Repository {
        self.repo
    }

    pub fn clauses(&self) -> &ClauseSet {
        &self.clauses
    }

    /// Can `query` be installed together? An empty query always can.
    pub fn check(&mut self, query: &[PackageIndex]) -> CheckResult {
        let mut query = query.to_vec();
        query.sort_unstable();
        query.dedup();
        let lits: Vec<Lit> = query.iter().map(|&p| Lit::installed(p)).collect();
        match self.engine.solve(&lits) {
            Outcome::Sat(model) => {
                let witness = Installation::new(model);
                debug_assert!(crate::model::check_health(&witness, self.repo)
                    .map(|r| r.healthy())
                    .unwrap_or(false));
                CheckResult::Installable { witness }
            }
            Outcome::Unsat(core) => {
                let origins: Vec<ClauseOrigin> =
                    core.into_iter().map(|c| self.clauses.origin(c)).collect();
                CheckResult::NotInstallable {
                    explanation: explain::explain(self.repo, &query, &origins),
                }
            }
        }
    }

    /// Like [`Checker::check`] without building a witness or explanation.
    pub fn satisfiable(&mut self, query: &[PackageIndex]) -> bool {
        let lits: Vec<Lit> = query.iter().map(|&p| Lit::installed(p)).collect();
        matches!(self.engine.solve(&lits), Outcome::Sat(_))
    }

    pub fn check_ids(&mut self, ids: &[PackageId]) -> Result<CheckResult, SolverError> {
        let query = resolve(self.repo, ids)?;
        Ok(self.check(&query))
    }
}

fn resolve(repo: &Repository, ids: &[PackageId]) -> Result<Vec<PackageIndex>, SolverError> {
    ids.iter()
        .map(|id| {
            repo.index_of(id)
                .ok_or_else(|| SolverError::UnknownPackage(id.clone()))
        })
        .collect()
}

pub fn check_installable(repo: &Repository, pkg: &PackageId) -> Result<CheckResult, SolverError> {
    Checker::new(repo).check_ids(core::slice::from_ref(pkg))
}

pub fn check_coinstallable(repo: &Repository, pkgs: &[PackageId]) -> Result<CheckResult, SolverError> {
    if pkgs.is_empty() {
        return Err(SolverError::EmptyQuery);
    }
    Checker::new(repo).check_ids(pkgs)
}

/// Per-package results of [`check_all`], indexed by [`PackageIndex`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckAll {
    results: Vec<CheckResult>,
}

impl CheckAll {
    pub fn get(&self, idx: PackageIndex) -> &CheckResult {
        &self.results[idx.get()]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (PackageIndex, &CheckResult)> + '_ {
        self.results
            .iter()
            .enumerate()
            .map(|(i, r)| (PackageIndex(i as u32), r))
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn broken_count(&self) -> usize {
        self.results.iter().filter(|r| !r.is_installable()).count()
    }
}

/// Check every package. A model found for one package is the witness for
/// every package it installs, so most packages need no search of their own.
pub fn check_all(repo: &Repository) -> CheckAll {
    let mut checker = Checker::with_preference(repo, true);
    let mut results: Vec<Option<CheckResult>> = alloc::vec![None; repo.len()];
    for p in repo.indices() {
        if results[p.get()].is_some() {
            continue;
        }
        let result = checker.check(&[p]);
        if let CheckResult::Installable { witness } = &result {
            for &q in witness.members() {
                if results[q.get()].is_none() {
                    results[q.get()] = Some(CheckResult::Installable {
                        witness: witness.clone(),
                    });
                }
            }
        } else {
            results[p.get()] = Some(result);
        }
    }
    CheckAll {
        results: results.into_iter().map(|r| r.expect("every package checked")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::RepositoryBuilder;
    use crate::model::{check_health, generate_rn};
    use alloc::string::ToString;
    use alloc::vec;

    fn id(n: &str) -> PackageId {
        PackageId::new(n, "1")
    }

    #[test]
    fn missing_dependency() {
        let mut b = RepositoryBuilder::new();
        b.add_package(id("a")).add_package(id("b"));
        b.add_dependency(id("a"), Some("c".into()), []);
        b.add_dependency(id("b"), None, [id("a")]);
        let repo = b.build().unwrap();
        let r = check_installable(&repo, &id("b")).unwrap();
        let lines = r.explanation().unwrap().render(&repo);
        assert_eq!(
            lines,
            vec![vec![
                "b (= 1) depends on a (= 1) {a (= 1)}".to_string(),
                "a (= 1) depends on c {NOT AVAILABLE}".to_string(),
            ]]
        );
    }

    #[test]
    fn coinstallability_of_conflicting_pair() {
        let mut b = RepositoryBuilder::new();
        b.add_package(id("a")).add_package(id("b"));
        b.add_conflict(id("a"), id("b"));
        let repo = b.build().unwrap();
        assert!(check_installable(&repo, &id("a")).unwrap().is_installable());
        let r = check_coinstallable(&repo, &[id("a"), id("b")]).unwrap();
        let e = r.explanation().unwrap();
        assert_eq!(e.chains.len(), 1);
        assert_eq!(e.render(&repo), vec![vec!["a (= 1) conflicts with b (= 1)".to_string()]]);
        assert_eq!(check_coinstallable(&repo, &[]), Err(SolverError::EmptyQuery));
        assert_eq!(
            check_installable(&repo, &id("z")),
            Err(SolverError::UnknownPackage(id("z")))
        );
    }

    #[test]
    fn rn_pairs_fine_full_set_not() {
        let repo = generate_rn(4).unwrap();
        let a: Vec<PackageId> = (1..=4).map(|i| PackageId::new(alloc::format!("a{i}"), "1")).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                let r = check_coinstallable(&repo, &[a[i].clone(), a[j].clone()]).unwrap();
                assert!(r.is_installable());
            }
        }
        assert!(!check_coinstallable(&repo, &a).unwrap().is_installable());
        assert!(!brute_force_check(&repo, &a).unwrap());
    }

    #[test]
    fn check_all_witnesses_are_healthy() {
        let repo = generate_rn(5).unwrap();
        let all = check_all(&repo);
        assert_eq!(all.broken_count(), 0);
        for (p, r) in all.iter() {
            let w = r.witness().unwrap();
            assert!(w.contains(p));
            assert!(check_health(w, &repo).unwrap().healthy());
        }
    }

    #[test]
    fn brute_force_rejects_large_input() {
        let repo = generate_rn(13).unwrap();
        assert_eq!(
            brute_force_check(&repo, &[]),
            Err(SolverError::TooLarge {
                packages: 26,
                limit: BRUTE_FORCE_LIMIT
            })
        );
    }
}
