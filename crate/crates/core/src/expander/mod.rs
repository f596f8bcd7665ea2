//! Expansion of version constraints and virtual packages, and construction
//! of the formal repository `(P, D, C)`.
//!
//! Expansion is always relative to the complete set of stanzas: adding a
//! version of some package can change the expansion of every stanza that
//! mentions it, so the pipeline is rerun from scratch rather than patched.

mod repository;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::metadata::{compare_versions, Alternative, ConstrainedRef, PackageStanza};

pub use repository::{
    package_order, Dependency, PackageId, PackageIndex, Repository, RepositoryBuilder,
    RepositoryError,
};

/// Version given to packages synthesized for virtual names.
pub const VIRTUAL_VERSION: &str = "virtual";

/// Name → versions present, newest first.
fn version_table(stanzas: &[PackageStanza]) -> BTreeMap<&str, Vec<&str>> {
    let mut table: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in stanzas {
        table.entry(&s.name).or_default().push(&s.version);
    }
    for versions in table.values_mut() {
        versions.sort_by(|a, b| compare_versions(b, a).then_with(|| b.cmp(a)));
        versions.dedup();
    }
    table
}

fn provided_names(stanzas: &[PackageStanza]) -> BTreeSet<&str> {
    stanzas
        .iter()
        .flat_map(|s| s.provides.iter().map(String::as_str))
        .collect()
}

fn push_unique(out: &mut Vec<ConstrainedRef>, r: ConstrainedRef) {
    if !out.contains(&r) {
        out.push(r);
    }
}

/// Rewrite every reference as the exact versions that satisfy it.
///
/// A reference to a name that only exists through `Provides` is left
/// unversioned for [`expand_virtual_packages`]; a versioned reference to
/// such a name matches nothing. Dependencies whose references all match
/// nothing become empty alternatives. Conflicts on absent names disappear.
pub fn expand_version_constraints(stanzas: &[PackageStanza]) -> Vec<PackageStanza> {
    let versions = version_table(stanzas);
    let provided = provided_names(stanzas);

    let expand_ref = |r: &ConstrainedRef, out: &mut Vec<ConstrainedRef>| {
        if let Some(vs) = versions.get(r.name.as_str()) {
            for v in vs.iter().filter(|v| r.matches(v)) {
                push_unique(out, ConstrainedRef::exact(r.name.as_str(), *v));
            }
        }
        if r.constraint.is_none() && provided.contains(r.name.as_str()) {
            push_unique(out, ConstrainedRef::any(r.name.as_str()));
        }
    };

    stanzas
        .iter()
        .map(|s| {
            let mut expanded = s.clone();
            expanded.depends.conjuncts = s
                .depends
                .conjuncts
                .iter()
                .map(|alt| {
                    let mut refs = Vec::new();
                    for r in &alt.refs {
                        expand_ref(r, &mut refs);
                    }
                    Alternative {
                        refs,
                        label: Some(alt.describe()),
                    }
                })
                .collect();
            let mut conflicts = Vec::new();
            for r in &s.conflicts {
                expand_ref(r, &mut conflicts);
            }
            expanded.conflicts = conflicts;
            expanded
        })
        .collect()
}

/// Replace virtual names by synthesized packages.
///
/// For every name `v` that is provided but has no stanza of its own, a
/// stanza `v` is appended whose single dependency lists all providers.
/// A conflict on a provided name becomes a conflict with each provider
/// except the conflicting package itself. When a real package is also
/// called `v`, no stanza is synthesized (it would conflict with the real
/// one); unversioned dependencies on `v` then list the real versions and
/// the providers directly. `Provides` fields are cleared.
pub fn expand_virtual_packages(stanzas: &[PackageStanza]) -> Vec<PackageStanza> {
    let mut providers: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for s in stanzas {
        for v in &s.provides {
            providers.entry(v).or_default().push((&s.name, &s.version));
        }
    }
    if providers.is_empty() {
        return stanzas.to_vec();
    }
    for list in providers.values_mut() {
        list.sort_by(|a, b| {
            a.0.cmp(b.0)
                .then_with(|| compare_versions(b.1, a.1))
                .then_with(|| b.1.cmp(a.1))
        });
        list.dedup();
    }
    let real: BTreeSet<&str> = stanzas.iter().map(|s| s.name.as_str()).collect();
    let provider_refs = |v: &str| -> Vec<ConstrainedRef> {
        providers[v]
            .iter()
            .map(|(n, ver)| ConstrainedRef::exact(*n, *ver))
            .collect()
    };

    let mut out: Vec<PackageStanza> = stanzas
        .iter()
        .map(|s| {
            let mut e = s.clone();
            e.provides.clear();
            for alt in &mut e.depends.conjuncts {
                let mut refs = Vec::with_capacity(alt.refs.len());
                for r in alt.refs.drain(..) {
                    match (r.constraint.is_none(), providers.contains_key(r.name.as_str())) {
                        (true, true) if real.contains(r.name.as_str()) => {
                            for p in provider_refs(&r.name) {
                                push_unique(&mut refs, p);
                            }
                        }
                        (true, true) => {
                            push_unique(&mut refs, ConstrainedRef::exact(r.name, VIRTUAL_VERSION))
                        }
                        _ => push_unique(&mut refs, r),
                    }
                }
                alt.refs = refs;
            }
            let mut conflicts = Vec::with_capacity(e.conflicts.len());
            for r in e.conflicts.drain(..) {
                if r.constraint.is_none() && providers.contains_key(r.name.as_str()) {
                    for p in provider_refs(&r.name) {
                        if p.name != s.name {
                            push_unique(&mut conflicts, p);
                        }
                    }
                } else {
                    push_unique(&mut conflicts, r);
                }
            }
            e.conflicts = conflicts;
            e
        })
        .collect();

    for (&v, _) in providers.iter().filter(|(v, _)| !real.contains(*v)) {
        let mut stanza = PackageStanza::new(v, VIRTUAL_VERSION);
        stanza.synthetic = true;
        let mut alt = Alternative::new(provider_refs(v));
        alt.label = Some(alt.to_string());
        stanza.depends.conjuncts.push(alt);
        out.push(stanza);
    }
    out
}

/// Build `(P, D, C)` from fully expanded stanzas.
///
/// Exact references resolve to every present version equal to the
/// requested one. Unversioned references (only present if the input was
/// not expanded) resolve to all versions of the name.
pub fn build_repository(stanzas: &[PackageStanza]) -> Result<Repository, RepositoryError> {
    let mut by_name: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in stanzas {
        by_name.entry(&s.name).or_default().push(&s.version);
    }
    let resolve = |r: &ConstrainedRef| -> Vec<PackageId> {
        by_name
            .get(r.name.as_str())
            .into_iter()
            .flatten()
            .filter(|v| r.matches(v))
            .map(|v| PackageId::new(r.name.as_str(), *v))
            .collect()
    };

    let mut builder = RepositoryBuilder::new();
    for s in stanzas {
        let id = PackageId::new(s.name.as_str(), s.version.as_str());
        for alt in &s.depends.conjuncts {
            let targets: Vec<PackageId> = alt.refs.iter().flat_map(&resolve).collect();
            let label = alt
                .label
                .clone()
                .unwrap_or_else(|| alt.to_string());
            builder.add_dependency(id.clone(), Some(label), targets);
        }
        for r in &s.conflicts {
            for other in resolve(r) {
                builder.add_conflict(id.clone(), other);
            }
        }
        if s.synthetic {
            builder.add_synthetic(id);
        } else {
            builder.add_package(id);
        }
    }
    builder.build()
}

/// The whole pipeline: constraints, then virtual names, then `(P, D, C)`.
pub fn expand_and_build(stanzas: &[PackageStanza]) -> Result<(Vec<PackageStanza>, Repository), RepositoryError> {
    let expanded = expand_virtual_packages(&expand_version_constraints(stanzas));
    let repo = build_repository(&expanded)?;
    Ok((expanded, repo))
}
