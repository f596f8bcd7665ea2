//! Per-architecture reports combined into one row.
//!
//! For each report: the number of broken packages, and in parentheses how
//! many of them are architecture-specific (`Architecture` other than
//! `all`). `some` counts package names broken in at least one report,
//! `every` those broken in all of them; their parenthesized counts are the
//! names that are architecture-specific in at least one report.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::args::Format;
use crate::report::JsonReport;
use crate::run::EXIT_OK;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ArchitectureCount {
    pub label: String,
    pub broken: usize,
    pub specific: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Aggregate {
    pub architectures: Vec<ArchitectureCount>,
    pub some: ArchitectureCount,
    pub every: ArchitectureCount,
}

fn is_specific(arch: Option<&str>) -> bool {
    arch.is_some_and(|a| a != "all")
}

/// Combine `(label, report)` pairs.
pub fn aggregate_reports(reports: &[(String, JsonReport)]) -> Aggregate {
    let mut out = Aggregate::default();
    let mut broken_in: BTreeMap<&str, usize> = BTreeMap::new();
    let mut specific: BTreeSet<&str> = BTreeSet::new();
    for (label, report) in reports {
        let broken: BTreeMap<&str, bool> = report
            .results
            .iter()
            .filter(|r| !r.installable)
            .map(|r| (r.package.as_str(), is_specific(r.architecture.as_deref())))
            .collect();
        for (&name, &arch_specific) in &broken {
            *broken_in.entry(name).or_default() += 1;
            if arch_specific {
                specific.insert(name);
            }
        }
        out.architectures.push(ArchitectureCount {
            label: label.clone(),
            broken: broken.len(),
            specific: broken.values().filter(|&&s| s).count(),
        });
    }
    let row = |label: &str, names: Vec<&str>| ArchitectureCount {
        label: label.to_string(),
        broken: names.len(),
        specific: names.iter().filter(|n| specific.contains(*n)).count(),
    };
    out.some = row("some", broken_in.keys().copied().collect());
    out.every = row(
        "every",
        broken_in
            .iter()
            .filter(|(_, &k)| k == reports.len())
            .map(|(&n, _)| n)
            .collect(),
    );
    out
}

fn load(path: &Path) -> anyhow::Result<(String, JsonReport)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let report: JsonReport =
        serde_json::from_str(&text).with_context(|| format!("{} is not a JSON report", path.display()))?;
    let label = report.architecture.clone().unwrap_or_else(|| {
        path.file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
    });
    Ok((label, report))
}

pub(crate) fn run_aggregate(paths: &[PathBuf], format: Format, out: &mut dyn Write) -> anyhow::Result<u8> {
    let reports = paths.iter().map(|p| load(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let agg = aggregate_reports(&reports);
    match format {
        Format::Text => {
            for row in agg.architectures.iter().chain([&agg.some, &agg.every]) {
                writeln!(out, "{}: {} ({})", row.label, row.broken, row.specific)?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &agg)?;
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}
