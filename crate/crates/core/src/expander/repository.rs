use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::metadata::compare_versions;

/// A package: a name and a version, compared as plain strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackageId {
    pub name: String,
    pub version: String,
}

impl PackageId {
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Self {
        PackageId {
            name: name.into(),
            version: version.into(),
        }
    }
}

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (= {})", self.name, self.version)
    }
}

/// Position of a package in [`Repository::packages`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackageIndex(pub u32);

impl PackageIndex {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// One element of `D(π)`: the packages any of which satisfies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependency {
    /// How the dependency was written before expansion, if known.
    pub label: Option<String>,
    /// Sorted, duplicate-free. Empty means the dependency cannot be met.
    pub targets: Vec<PackageIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RepositoryError {
    #[error("package {0} occurs twice")]
    DuplicatePackage(PackageId),
}

/// Package order everywhere: name ascending, then newest version first.
pub fn package_order(a: &PackageId, b: &PackageId) -> Ordering {
    a.name
        .cmp(&b.name)
        .then_with(|| compare_versions(&b.version, &a.version))
        .then_with(|| b.version.cmp(&a.version))
}

/// The triple `(P, D, C)`.
///
/// Packages are stored in [`package_order`]. `C` is kept as symmetric
/// adjacency lists; it contains every declared conflict and every pair of
/// distinct versions of one name, and never a package paired with itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repository {
    packages: Vec<PackageId>,
    deps: Vec<Vec<Dependency>>,
    conflicts: Vec<Vec<PackageIndex>>,
    synthetic: Vec<bool>,
    index: BTreeMap<PackageId, PackageIndex>,
}

impl Repository {
    pub fn len(&self) -> usize {
        self.packages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packages.is_empty()
    }

    pub fn packages(&self) -> &[PackageId] {
        &self.packages
    }

    pub fn indices(&self) -> impl ExactSizeIterator<Item = PackageIndex> {
        (0..self.packages.len() as u32).map(PackageIndex)
    }

    pub fn package(&self, idx: PackageIndex) -> &PackageId {
        &self.packages[idx.get()]
    }

    pub fn index_of(&self, id: &PackageId) -> Option<PackageIndex> {
        self.index.get(id).copied()
    }

    /// Every version of `name`, newest first.
    pub fn versions_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = PackageIndex> + 'a {
        let start = self.packages.partition_point(|p| p.name.as_str() < name);
        self.packages[start..]
            .iter()
            .take_while(move |p| p.name == name)
            .enumerate()
            .map(move |(i, _)| PackageIndex((start + i) as u32))
    }

    /// `D(π)`.
    pub fn dependencies(&self, idx: PackageIndex) -> &[Dependency] {
        &self.deps[idx.get()]
    }

    /// Packages in conflict with `idx`, sorted.
    pub fn conflicts_of(&self, idx: PackageIndex) -> &[PackageIndex] {
        &self.conflicts[idx.get()]
    }

    pub fn in_conflict(&self, a: PackageIndex, b: PackageIndex) -> bool {
        self.conflicts[a.get()].binary_search(&b).is_ok()
    }

    /// Each unordered conflict pair once, smaller index first.
    pub fn conflict_pairs(&self) -> impl Iterator<Item = (PackageIndex, PackageIndex)> + '_ {
        self.indices().flat_map(move |a| {
            self.conflicts[a.get()]
                .iter()
                .filter(move |&&b| a < b)
                .map(move |&b| (a, b))
        })
    }

    pub fn conflict_pair_count(&self) -> usize {
        self.conflicts.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Whether the package was synthesized for a virtual name.
    pub fn is_synthetic(&self, idx: PackageIndex) -> bool {
        self.synthetic[idx.get()]
    }

    pub fn synthetic_packages(&self) -> impl Iterator<Item = PackageIndex> + '_ {
        self.indices().filter(move |&i| self.synthetic[i.get()])
    }

    /// The sub-repository on `keep`: `P' = keep`, each dependency cut down
    /// to its members inside `keep`, and `C` restricted to `keep`.
    pub fn induced(&self, keep: &BTreeSet<PackageIndex>) -> Repository {
        let mut remap = alloc::vec![None; self.len()];
        for (new, old) in keep.iter().enumerate() {
            remap[old.get()] = Some(PackageIndex(new as u32));
        }
        let translate = |list: &[PackageIndex]| -> Vec<PackageIndex> {
            list.iter().filter_map(|i| remap[i.get()]).collect()
        };
        let mut repo = Repository {
            packages: Vec::with_capacity(keep.len()),
            deps: Vec::with_capacity(keep.len()),
            conflicts: Vec::with_capacity(keep.len()),
            synthetic: Vec::with_capacity(keep.len()),
            index: BTreeMap::new(),
        };
        for &old in keep {
            let id = self.packages[old.get()].clone();
            repo.index.insert(id.clone(), PackageIndex(repo.packages.len() as u32));
            repo.packages.push(id);
            repo.deps.push(
                self.deps[old.get()]
                    .iter()
                    .map(|d| Dependency {
                        label: d.label.clone(),
                        targets: translate(&d.targets),
                    })
                    .collect(),
            );
            repo.conflicts.push(translate(&self.conflicts[old.get()]));
            repo.synthetic.push(self.synthetic[old.get()]);
        }
        repo
    }
}

/// Incremental construction of a [`Repository`] from package ids.
///
/// References to packages that are never added are dropped: from
/// dependency alternatives (possibly leaving them empty) and from
/// conflicts.
#[derive(Debug, Default)]
pub struct RepositoryBuilder {
    packages: Vec<(PackageId, bool)>,
    deps: Vec<(PackageId, Option<String>, Vec<PackageId>)>,
    conflicts: Vec<(PackageId, PackageId)>,
}

impl RepositoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_package(&mut self, id: PackageId) -> &mut Self {
        self.packages.push((id, false));
        self
    }

    pub fn add_synthetic(&mut self, id: PackageId) -> &mut Self {
        self.packages.push((id, true));
        self
    }

    pub fn add_dependency(
        &mut self,
        from: PackageId,
        label: Option<String>,
        targets: impl IntoIterator<Item = PackageId>,
    ) -> &mut Self {
        self.deps.push((from, label, targets.into_iter().collect()));
        self
    }

    pub fn add_conflict(&mut self, a: PackageId, b: PackageId) -> &mut Self {
        self.conflicts.push((a, b));
        self
    }

    pub fn build(self) -> Result<Repository, RepositoryError> {
        let mut packages = self.packages;
        packages.sort_by(|a, b| package_order(&a.0, &b.0));
        let mut index = BTreeMap::new();
        for (i, (id, _)) in packages.iter().enumerate() {
            if index.insert(id.clone(), PackageIndex(i as u32)).is_some() {
                return Err(RepositoryError::DuplicatePackage(id.clone()));
            }
        }
        let n = packages.len();
        let mut deps: Vec<Vec<Dependency>> = alloc::vec![Vec::new(); n];
        for (from, label, targets) in self.deps {
            let Some(&from) = index.get(&from) else {
                continue;
            };
            let mut targets: Vec<PackageIndex> =
                targets.iter().filter_map(|t| index.get(t).copied()).collect();
            targets.sort_unstable();
            targets.dedup();
            let list = &mut deps[from.get()];
            if !list.iter().any(|d| d.targets == targets) {
                list.push(Dependency { label, targets });
            }
        }

        let mut conflicts: Vec<Vec<PackageIndex>> = alloc::vec![Vec::new(); n];
        let mut link = |a: PackageIndex, b: PackageIndex| {
            if a != b {
                conflicts[a.get()].push(b);
                conflicts[b.get()].push(a);
            }
        };
        for (a, b) in &self.conflicts {
            if let (Some(&a), Some(&b)) = (index.get(a), index.get(b)) {
                link(a, b);
            }
        }
        // Distinct versions of one name are adjacent in package order.
        let mut start = 0;
        while start < n {
            let end = start
                + packages[start..]
                    .iter()
                    .take_while(|p| p.0.name == packages[start].0.name)
                    .count();
            for i in start..end {
                for j in i + 1..end {
                    link(PackageIndex(i as u32), PackageIndex(j as u32));
                }
            }
            start = end;
        }
        for list in &mut conflicts {
            list.sort_unstable();
            list.dedup();
        }

        let synthetic = packages.iter().map(|p| p.1).collect();
        Ok(Repository {
            packages: packages.into_iter().map(|p| p.0).collect(),
            deps,
            conflicts,
            synthetic,
            index,
        })
    }
}
