#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::PathBuf;

use debcheck_core::expander::{PackageId, Repository, RepositoryBuilder};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// A repository of at most `max` packages, up to 3 dependencies of up to
/// 3 alternatives each, and random conflicts. Some names repeat.
pub fn random_repo<R: Rng>(rng: &mut R, max: usize) -> Repository {
    let n = rng.gen_range(1..=max);
    let ids: Vec<PackageId> = (0..n)
        .map(|i| PackageId::new(format!("p{}", i / 2 + i % 2 * rng.gen_range(0..=1)), i.to_string()))
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

/// Shape of a synthetic distribution.
pub struct Synthetic {
    pub packages: usize,
    pub mean_dependencies: f64,
    pub conflicts_per_package: f64,
    pub disjunctive_share: f64,
    pub seed: u64,
}

impl Default for Synthetic {
    fn default() -> Self {
        Synthetic {
            packages: 20_000,
            mean_dependencies: 4.0,
            conflicts_per_package: 0.5,
            disjunctive_share: 0.1,
            seed: 0x5eed,
        }
    }
}

/// A Packages file resembling a distribution: dependencies point mostly
/// at lower-numbered packages, so low numbers act as base libraries.
/// Conflicts join packages with nearby numbers. A few packages in the
/// upper half depend on names that do not exist, and the breakage spreads
/// to whatever depends on them.
pub fn synthetic_packages(cfg: &Synthetic) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.packages;
    let name = |i: usize| format!("pkg{i:05}");
    let mut conflicts: Vec<Vec<usize>> = vec![Vec::new(); n];
    let pairs = (cfg.conflicts_per_package * n as f64 / 2.0).round() as usize;
    for _ in 0..pairs {
        let a = rng.gen_range(n / 10..n);
        let b = (a + rng.gen_range(1..=20)).min(n - 1);
        if a != b {
            conflicts[a].push(b);
        }
    }
    let lower = |rng: &mut ChaCha8Rng, i: usize| -> usize {
        let u: f64 = rng.gen();
        (u * u * i as f64) as usize
    };
    let mut out = String::with_capacity(n * 120);
    for (i, conflicts) in conflicts.iter().enumerate() {
        writeln!(out, "Package: {}", name(i)).unwrap();
        writeln!(out, "Version: 1.{}-{}", i % 7, 1 + i % 3).unwrap();
        writeln!(out, "Architecture: {}", if i % 4 == 0 { "all" } else { "amd64" }).unwrap();
        if i > 0 {
            // Mean of the count below is `mean_dependencies`.
            let max = (2.0 * cfg.mean_dependencies) as usize;
            let k = rng.gen_range(0..=max).min(i);
            let mut deps = Vec::with_capacity(k);
            for _ in 0..k {
                let t = lower(&mut rng, i);
                let mut text = if rng.gen_bool(0.3) {
                    format!("{} (>= 1.0)", name(t))
                } else {
                    name(t)
                };
                if rng.gen_bool(cfg.disjunctive_share) {
                    let u = lower(&mut rng, i);
                    write!(text, " | {}", name(u)).unwrap();
                    if rng.gen_bool(0.3) {
                        write!(text, " | missing{}", rng.gen_range(0..1000)).unwrap();
                    }
                } else if i > n / 2 && rng.gen_bool(0.001) {
                    text = format!("missing{}", rng.gen_range(0..1000));
                }
                deps.push(text);
            }
            if !deps.is_empty() {
                writeln!(out, "Depends: {}", deps.join(", ")).unwrap();
            }
        }
        if !conflicts.is_empty() {
            let list: Vec<String> = conflicts.iter().map(|&c| name(c)).collect();
            writeln!(out, "Conflicts: {}", list.join(", ")).unwrap();
        }
        if i % 50 == 7 {
            writeln!(out, "Provides: service{}", i % 13).unwrap();
        }
        out.push('\n');
    }
    out
}
