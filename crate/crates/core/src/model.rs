//! Installations, health, trimmed repositories, and the `R_n` family.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::expander::{PackageId, PackageIndex, Repository, RepositoryBuilder};
use crate::solver;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("package {0} is not in the repository")]
    UnknownPackage(PackageId),
    #[error("package index {0} is out of range")]
    IndexOutOfRange(u32),
    #[error("R_n needs n >= 1")]
    ZeroSize,
}

/// A set of installed packages. Cloning is cheap; witnesses are shared.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Installation {
    members: Arc<[PackageIndex]>,
}

impl Installation {
    pub fn new(members: impl IntoIterator<Item = PackageIndex>) -> Self {
        let mut members: Vec<PackageIndex> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Installation {
            members: members.into(),
        }
    }

    pub fn from_ids<'a>(
        repo: &Repository,
        ids: impl IntoIterator<Item = &'a PackageId>,
    ) -> Result<Self, ModelError> {
        let members = ids
            .into_iter()
            .map(|id| repo.index_of(id).ok_or_else(|| ModelError::UnknownPackage(id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(members))
    }

    /// Sorted member indices.
    pub fn members(&self) -> &[PackageIndex] {
        &self.members
    }

    pub fn contains(&self, idx: PackageIndex) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids<'a>(&'a self, repo: &'a Repository) -> impl Iterator<Item = &'a PackageId> + 'a {
        self.members.iter().map(move |&i| repo.package(i))
    }
}

/// Outcome of checking an installation against abundance and peace.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HealthReport {
    /// `(π, k)`: the `k`-th dependency of installed `π` has no installed member.
    pub abundance_violations: Vec<(PackageIndex, usize)>,
    /// Installed conflicting pairs, smaller index first.
    pub peace_violations: Vec<(PackageIndex, PackageIndex)>,
}

impl HealthReport {
    pub fn healthy(&self) -> bool {
        self.abundance_violations.is_empty() && self.peace_violations.is_empty()
    }
}

/// Report every way in which `inst` fails to be healthy in `repo`.
pub fn check_health(inst: &Installation, repo: &Repository) -> Result<HealthReport, ModelError> {
    if let Some(bad) = inst.members().iter().find(|i| i.get() >= repo.len()) {
        return Err(ModelError::IndexOutOfRange(bad.0));
    }
    let mut report = HealthReport::default();
    for &p in inst.members() {
        for (k, dep) in repo.dependencies(p).iter().enumerate() {
            if !dep.targets.iter().any(|&t| inst.contains(t)) {
                report.abundance_violations.push((p, k));
            }
        }
        for &q in repo.conflicts_of(p) {
            if p < q && inst.contains(q) {
                report.peace_violations.push((p, q));
            }
        }
    }
    Ok(report)
}

/// Whether synthesized virtual packages take part in the trimmed check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrimScope {
    #[default]
    RealPackages,
    AllPackages,
}

/// `(trimmed, non-installable packages)`, virtual packages excluded.
pub fn is_trimmed(repo: &Repository) -> (bool, Vec<PackageId>) {
    is_trimmed_with(repo, TrimScope::RealPackages)
}

pub fn is_trimmed_with(repo: &Repository, scope: TrimScope) -> (bool, Vec<PackageId>) {
    let results = solver::check_all(repo);
    let broken: Vec<PackageId> = results
        .iter()
        .filter(|(idx, r)| {
            !r.is_installable() && (scope == TrimScope::AllPackages || !repo.is_synthetic(*idx))
        })
        .map(|(idx, _)| repo.package(idx).clone())
        .collect();
    (broken.is_empty(), broken)
}

/// `R_n`: `a_i` depends on any `b_j` with `j != i`; all `b`s conflict
/// pairwise. Every version is `1`.
///
/// `R_1` keeps the literal construction: `a_1` gets one empty dependency
/// and is therefore not installable.
pub fn generate_rn(n: usize) -> Result<Repository, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroSize);
    }
    let a = |i: usize| PackageId::new(format!("a{i}"), "1");
    let b = |i: usize| PackageId::new(format!("b{i}"), "1");
    let mut builder = RepositoryBuilder::new();
    for i in 1..=n {
        builder.add_package(a(i)).add_package(b(i));
        builder.add_dependency(a(i), None, (1..=n).filter(|&j| j != i).map(b));
        for j in i + 1..=n {
            builder.add_conflict(b(i), b(j));
        }
    }
    Ok(builder.build().expect("generated names are distinct"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn worked() -> Repository {
        let mut b = RepositoryBuilder::new();
        let id = PackageId::new;
        for (n, v) in [("a", "1"), ("b", "2"), ("b", "3"), ("c", "3"), ("d", "1"), ("d", "2"), ("d", "3")] {
            b.add_package(id(n, v));
        }
        b.add_dependency(id("a", "1"), None, [id("b", "2"), id("b", "3")]);
        b.add_dependency(id("a", "1"), None, [id("c", "3"), id("d", "2"), id("d", "3")]);
        b.add_conflict(id("c", "3"), id("b", "2"));
        b.add_conflict(id("c", "3"), id("b", "3"));
        b.build().unwrap()
    }

    fn inst(repo: &Repository, ids: &[(&str, &str)]) -> Installation {
        let ids: Vec<PackageId> = ids.iter().map(|(n, v)| PackageId::new(*n, *v)).collect();
        Installation::from_ids(repo, &ids).unwrap()
    }

    #[test]
    fn empty_installation_is_healthy() {
        assert!(check_health(&Installation::default(), &worked()).unwrap().healthy());
    }

    #[test]
    fn worked_healthy_installation() {
        let repo = worked();
        let i = inst(&repo, &[("a", "1"), ("b", "2"), ("d", "2")]);
        assert!(check_health(&i, &repo).unwrap().healthy());
    }

    #[test]
    fn worked_peace_violation() {
        let repo = worked();
        let i = inst(&repo, &[("b", "2"), ("c", "3")]);
        let report = check_health(&i, &repo).unwrap();
        assert!(report.abundance_violations.is_empty());
        let b2 = repo.index_of(&PackageId::new("b", "2")).unwrap();
        let c3 = repo.index_of(&PackageId::new("c", "3")).unwrap();
        assert_eq!(report.peace_violations, vec![(b2.min(c3), b2.max(c3))]);
    }

    #[test]
    fn abundance_violation_lists_each_dependency() {
        let repo = worked();
        let i = inst(&repo, &[("a", "1")]);
        let report = check_health(&i, &repo).unwrap();
        let a = repo.index_of(&PackageId::new("a", "1")).unwrap();
        assert_eq!(report.abundance_violations, vec![(a, 0), (a, 1)]);
    }

    #[test]
    fn unknown_member_is_an_error() {
        let repo = worked();
        assert_eq!(
            Installation::from_ids(&repo, &[PackageId::new("zz", "1")]),
            Err(ModelError::UnknownPackage(PackageId::new("zz", "1")))
        );
        let bogus = Installation::new([PackageIndex(99)]);
        assert_eq!(check_health(&bogus, &repo), Err(ModelError::IndexOutOfRange(99)));
    }

    #[test]
    fn rn_shape() {
        assert_eq!(generate_rn(0).unwrap_err(), ModelError::ZeroSize);
        let r1 = generate_rn(1).unwrap();
        assert_eq!(r1.len(), 2);
        let a1 = r1.index_of(&PackageId::new("a1", "1")).unwrap();
        assert_eq!(r1.dependencies(a1).len(), 1);
        assert!(r1.dependencies(a1)[0].targets.is_empty());

        let r3 = generate_rn(3).unwrap();
        assert_eq!(r3.len(), 6);
        assert_eq!(r3.conflict_pair_count(), 3);
        let a2 = r3.index_of(&PackageId::new("a2", "1")).unwrap();
        let targets: Vec<&str> = r3.dependencies(a2)[0]
            .targets
            .iter()
            .map(|&t| r3.package(t).name.as_str())
            .collect();
        assert_eq!(targets, ["b1", "b3"]);
    }

    #[test]
    fn trimmed() {
        assert_eq!(is_trimmed(&worked()), (true, vec![]));
        assert_eq!(is_trimmed(&generate_rn(3).unwrap()), (true, vec![]));

        let mut b = RepositoryBuilder::new();
        b.add_package(PackageId::new("p", "1"));
        b.add_dependency(PackageId::new("p", "1"), None, []);
        let repo = b.build().unwrap();
        assert_eq!(is_trimmed(&repo), (false, vec![PackageId::new("p", "1")]));
    }

    #[test]
    fn trim_scope_includes_virtuals_on_request() {
        let mut b = RepositoryBuilder::new();
        b.add_synthetic(PackageId::new("v", "virtual"));
        b.add_dependency(PackageId::new("v", "virtual"), None, []);
        let repo = b.build().unwrap();
        assert_eq!(is_trimmed(&repo), (true, vec![]));
        assert!(!is_trimmed_with(&repo, TrimScope::AllPackages).0);
    }
}
