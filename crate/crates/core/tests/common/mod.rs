#![allow(dead_code)]

use std::collections::BTreeSet;

use debcheck_core::expander::{PackageId, PackageIndex, Repository, RepositoryBuilder};
use debcheck_core::metadata::{
    Alternative, ConstrainedRef, DependencyExpression, PackageStanza, Relation,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];
pub const VIRTUALS: [&str; 2] = ["v", "w"];
pub const VERSIONS: [&str; 3] = ["1", "1.5", "2"];
pub const RELATIONS: [Relation; 5] = [
    Relation::StrictlyLess,
    Relation::LessOrEqual,
    Relation::Equal,
    Relation::GreaterOrEqual,
    Relation::StrictlyGreater,
];

fn random_ref<R: Rng>(rng: &mut R) -> ConstrainedRef {
    let pool: Vec<&str> = NAMES.iter().chain(VIRTUALS.iter()).copied().collect();
    let name = *pool.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        ConstrainedRef::any(name)
    } else {
        ConstrainedRef::with(name, *RELATIONS.choose(rng).unwrap(), *VERSIONS.choose(rng).unwrap())
    }
}

/// Small unexpanded inputs: at most 10 stanzas, 3 versions per name,
/// random Provides (including names that also exist as real packages).
pub fn random_stanzas<R: Rng>(rng: &mut R) -> Vec<PackageStanza> {
    let mut out = Vec::new();
    for name in NAMES {
        let count = rng.gen_range(0..=2usize);
        let mut versions: Vec<&str> = VERSIONS.to_vec();
        versions.shuffle(rng);
        for &version in versions.iter().take(count) {
            if out.len() == 10 {
                break;
            }
            let mut s = PackageStanza::new(name, version);
            for _ in 0..rng.gen_range(0..=2) {
                let refs = (0..rng.gen_range(1..=2)).map(|_| random_ref(rng)).collect();
                s.depends.conjuncts.push(Alternative::new(refs));
            }
            if rng.gen_bool(0.4) {
                s.conflicts.push(random_ref(rng));
            }
            if rng.gen_bool(0.3) {
                let pool: Vec<&str> = VIRTUALS.iter().chain(NAMES.iter()).copied().collect();
                let p = *pool.choose(rng).unwrap();
                if p != name {
                    s.provides.push(p.to_string());
                }
            }
            out.push(s);
        }
    }
    out
}

/// A repository of at most `max` packages with up to 3 dependencies of
/// up to 3 alternatives each, and random conflicts.
pub fn random_repo<R: Rng>(rng: &mut R, max: usize) -> Repository {
    let n = rng.gen_range(1..=max);
    let ids: Vec<PackageId> = (0..n)
        .map(|i| {
            // A few shared names exercise the implicit conflicts.
            let name = format!("p{}", i / 2 + i % 2 * rng.gen_range(0..=1));
            PackageId::new(name, format!("{i}"))
        })
        .collect();
    let mut b = RepositoryBuilder::new();
    for id in &ids {
        b.add_package(id.clone());
    }
    let density: f64 = rng.gen_range(0.0..0.3);
    for id in &ids {
        for _ in 0..rng.gen_range(0..=3) {
            let k = rng.gen_range(0..=3);
            let targets: Vec<PackageId> = (0..k).map(|_| ids.choose(rng).unwrap().clone()).collect();
            b.add_dependency(id.clone(), None, targets);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                b.add_conflict(ids[i].clone(), ids[j].clone());
            }
        }
    }
    b.build().unwrap()
}

/// Abundance and peace straight from their definitions.
pub fn literally_healthy(repo: &Repository, inst: &BTreeSet<PackageIndex>) -> bool {
    let abundance = inst
        .iter()
        .all(|&p| repo.dependencies(p).iter().all(|d| d.targets.iter().any(|t| inst.contains(t))));
    let peace = inst
        .iter()
        .all(|&p| inst.iter().all(|&q| !repo.in_conflict(p, q)));
    abundance && peace
}

pub fn subsets(n: usize) -> impl Iterator<Item = BTreeSet<PackageIndex>> {
    (0u32..1 << n).map(move |mask| {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| PackageIndex(i as u32))
            .collect()
    })
}

pub fn deps(text: &str) -> DependencyExpression {
    debcheck_core::metadata::parse_dependency_field(text).unwrap()
}
