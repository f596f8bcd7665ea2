//! Static search for packages that may overwrite each other's files.
//!
//! A Contents index maps paths to owning packages. Any two packages owning
//! the same path are a potential problem unless they cannot be installed
//! together anyway, or one declares that it replaces the other.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::expander::{PackageId, Repository};
use crate::metadata::PackageStanza;
use crate::solver::Checker;

/// Path (without leading `/`) → owning package names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContentsIndex {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl ContentsIndex {
    pub fn entries(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.entries
    }

    pub fn owners(&self, path: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(path)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Record that `owner` ships `path`.
    pub fn insert(&mut self, path: &str, owner: &str) {
        let path = path.trim_start_matches('/');
        let owner = owner.rsplit('/').next().unwrap_or(owner);
        self.entries
            .entry(path.to_string())
            .or_default()
            .insert(owner.to_string());
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentsWarning {
    pub line: usize,
    pub text: String,
}

impl fmt::Display for ContentsWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: no package list in {:?}", self.line, self.text)
    }
}

/// Parse a Contents file. Text up to a `FILE … LOCATION` header line is
/// skipped when such a line exists.
pub fn parse_contents(input: &str) -> (ContentsIndex, Vec<ContentsWarning>) {
    let lines: Vec<&str> = input.lines().collect();
    let start = lines
        .iter()
        .position(|l| {
            let mut words = l.split_whitespace();
            words.next() == Some("FILE") && words.last() == Some("LOCATION")
        })
        .map_or(0, |i| i + 1);
    let mut index = ContentsIndex::default();
    let mut warnings = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(start) {
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        let Some((path, owners)) = line.rsplit_once(|c: char| c.is_whitespace()) else {
            warnings.push(ContentsWarning {
                line: i + 1,
                text: line.to_string(),
            });
            continue;
        };
        let path = path.trim_end();
        if path.trim().is_empty() {
            warnings.push(ContentsWarning {
                line: i + 1,
                text: line.to_string(),
            });
            continue;
        }
        for owner in owners.split(',').filter(|o| !o.is_empty()) {
            index.insert(path, owner);
        }
    }
    (index, warnings)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateStatus {
    NotCoinstallable,
    ExcusedByReplaces,
    Candidate,
}

impl CandidateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateStatus::NotCoinstallable => "not_coinstallable",
            CandidateStatus::ExcusedByReplaces => "excused_by_replaces",
            CandidateStatus::Candidate => "candidate",
        }
    }
}

/// Two packages owning at least one common path. `pair.0 < pair.1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConflictCandidate {
    pub pair: (String, String),
    pub shared_paths: Vec<String>,
    pub status: Option<CandidateStatus>,
}

/// Every unordered pair of names that co-occur on some path, sorted.
pub fn shared_file_pairs(index: &ContentsIndex) -> Vec<ConflictCandidate> {
    let mut pairs: BTreeMap<(&str, &str), Vec<String>> = BTreeMap::new();
    for (path, owners) in &index.entries {
        let owners: Vec<&str> = owners.iter().map(String::as_str).collect();
        for (i, &a) in owners.iter().enumerate() {
            for &b in &owners[i + 1..] {
                pairs.entry((a, b)).or_default().push(path.clone());
            }
        }
    }
    pairs
        .into_iter()
        .map(|((a, b), shared_paths)| ConflictCandidate {
            pair: (a.to_string(), b.to_string()),
            shared_paths,
            status: None,
        })
        .collect()
}

/// A pair that could not be classified because a name is not in the repository.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnresolvedPair {
    pub candidate: ConflictCandidate,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub classified: Vec<ConflictCandidate>,
    pub unresolved: Vec<UnresolvedPair>,
}

impl Classification {
    pub fn with_status(&self, status: CandidateStatus) -> impl Iterator<Item = &ConflictCandidate> + '_ {
        self.classified
            .iter()
            .filter(move |c| c.status == Some(status))
    }
}

/// Settle each pair using the newest real version of each name.
pub fn classify_pairs(
    cands: &[ConflictCandidate],
    repo: &Repository,
    stanzas: &[PackageStanza],
) -> Classification {
    let newest = |name: &str| {
        repo.versions_of(name)
            .find(|&i| !repo.is_synthetic(i))
    };
    let replaces: BTreeMap<(&str, &str), &[String]> = stanzas
        .iter()
        .map(|s| ((s.name.as_str(), s.version.as_str()), s.replaces.as_slice()))
        .collect();
    let names = |id: &PackageId| -> &[String] {
        replaces
            .get(&(id.name.as_str(), id.version.as_str()))
            .copied()
            .unwrap_or_default()
    };

    let mut checker = Checker::new(repo);
    let mut out = Classification::default();
    for cand in cands {
        let (a, b) = (&cand.pair.0, &cand.pair.1);
        let (ia, ib) = match (newest(a), newest(b)) {
            (Some(ia), Some(ib)) => (ia, ib),
            (ia, ib) => {
                let mut missing = Vec::new();
                if ia.is_none() {
                    missing.push(a.clone());
                }
                if ib.is_none() {
                    missing.push(b.clone());
                }
                out.unresolved.push(UnresolvedPair {
                    candidate: ConflictCandidate {
                        status: None,
                        ..cand.clone()
                    },
                    missing,
                });
                continue;
            }
        };
        let status = if !checker.satisfiable(&[ia, ib]) {
            CandidateStatus::NotCoinstallable
        } else if names(repo.package(ia)).contains(b) || names(repo.package(ib)).contains(a) {
            CandidateStatus::ExcusedByReplaces
        } else {
            CandidateStatus::Candidate
        };
        out.classified.push(ConflictCandidate {
            status: Some(status),
            ..cand.clone()
        });
    }
    out.classified.sort();
    out.unresolved.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::expand_and_build;
    use crate::metadata::parse_packages;
    use alloc::vec;

    #[test]
    fn contents_lines() {
        let (index, warnings) = parse_contents(
            "Some header text\n\nFILE                 LOCATION\n\
             bin/fgconsole  utils/console-tools,utils/kbd\n\
             /etc/default/nvidia-kernel  contrib/x11/nvidia-kernel-common\n\
             garbage\n\
             bin/fgconsole  utils/kbd\n",
        );
        assert_eq!(warnings, vec![ContentsWarning { line: 6, text: "garbage".into() }]);
        let owners: Vec<&str> = index.owners("bin/fgconsole").unwrap().iter().map(String::as_str).collect();
        assert_eq!(owners, ["console-tools", "kbd"]);
        let owners: Vec<&str> = index
            .owners("etc/default/nvidia-kernel")
            .unwrap()
            .iter()
            .map(String::as_str)
            .collect();
        assert_eq!(owners, ["nvidia-kernel-common"]);
        assert!(parse_contents("").0.is_empty());
    }

    #[test]
    fn paths_with_spaces() {
        let (index, w) = parse_contents("usr/share/a b.txt  misc/x,misc/y\n");
        assert!(w.is_empty());
        assert!(index.owners("usr/share/a b.txt").is_some());
    }

    #[test]
    fn pairs_from_shared_paths() {
        let (index, _) = parse_contents("p1 x,y,z\np2 x,y\np3 solo\n");
        let pairs: Vec<((String, String), usize)> = shared_file_pairs(&index)
            .into_iter()
            .map(|c| (c.pair, c.shared_paths.len()))
            .collect();
        let p = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(pairs, vec![(p("x", "y"), 2), (p("x", "z"), 1), (p("y", "z"), 1)]);
    }

    #[test]
    fn classification() {
        let text = "Package: a\nVersion: 1\nConflicts: b\n\n\
                    Package: a\nVersion: 2\n\n\
                    Package: b\nVersion: 1\nConflicts: a\n\n\
                    Package: c\nVersion: 1\nReplaces: d\n\n\
                    Package: d\nVersion: 1\n\n\
                    Package: e\nVersion: 1\n";
        let parsed = parse_packages(text);
        let (stanzas, repo) = expand_and_build(&parsed.stanzas).unwrap();
        let (index, _) = parse_contents("f1 a,b\nf2 c,d\nf3 d,e\nf4 e,ghost\n");
        let result = classify_pairs(&shared_file_pairs(&index), &repo, &stanzas);
        let statuses: Vec<(&str, &str, CandidateStatus)> = result
            .classified
            .iter()
            .map(|c| (c.pair.0.as_str(), c.pair.1.as_str(), c.status.unwrap()))
            .collect();
        assert_eq!(
            statuses,
            vec![
                ("a", "b", CandidateStatus::NotCoinstallable),
                ("c", "d", CandidateStatus::ExcusedByReplaces),
                ("d", "e", CandidateStatus::Candidate),
            ]
        );
        assert_eq!(result.unresolved.len(), 1);
        assert_eq!(result.unresolved[0].missing, vec!["ghost".to_string()]);
    }
}
