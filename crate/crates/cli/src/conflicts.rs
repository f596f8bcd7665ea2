use std::io::{self, Write};
use std::path::Path;

use anyhow::Context;
use debcheck_core::conflict_scan::{
    classify_pairs, parse_contents, shared_file_pairs, CandidateStatus, Classification,
};
use debcheck_core::expander::expand_and_build;
use serde::Serialize;

use crate::args::Format;
use crate::run::{load_stanzas, read_input, EXIT_BROKEN, EXIT_OK};

/// Paths listed per pair in the text report.
const SHOWN_PATHS: usize = 5;

#[derive(Serialize)]
struct JsonPair<'a> {
    packages: [&'a str; 2],
    status: Option<&'static str>,
    shared_paths: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    missing: Option<&'a [String]>,
}

#[derive(Serialize)]
struct JsonConflicts<'a> {
    shared_pairs: usize,
    not_coinstallable: usize,
    excused_by_replaces: usize,
    candidates: usize,
    pairs: Vec<JsonPair<'a>>,
    unresolved: Vec<JsonPair<'a>>,
}

pub(crate) fn run_conflicts(
    contents: &Path,
    packages: &Path,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<u8> {
    let mut no_stdin = io::empty();
    let contents_text = read_input(Some(contents), &mut no_stdin)?;
    let packages_text = read_input(Some(packages), &mut no_stdin)?;
    let (index, warnings) = parse_contents(&contents_text);
    for w in &warnings {
        writeln!(err, "{}: warning: {w}", contents.display())?;
    }
    let stanzas = load_stanzas(&packages_text, &packages.display().to_string(), err);
    let (_, repo) = expand_and_build(&stanzas).context("cannot build repository")?;
    let shared = shared_file_pairs(&index);
    let result = classify_pairs(&shared, &repo, &stanzas);
    for u in &result.unresolved {
        writeln!(
            err,
            "warning: {} / {}: not in the Packages file: {}",
            u.candidate.pair.0,
            u.candidate.pair.1,
            u.missing.join(", ")
        )?;
    }
    match format {
        Format::Text => write_text(&result, shared.len(), out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &to_json(&result, shared.len()))?;
            writeln!(out)?;
        }
    }
    let candidates = result.with_status(CandidateStatus::Candidate).count();
    Ok(if candidates == 0 { EXIT_OK } else { EXIT_BROKEN })
}

fn write_text(result: &Classification, shared: usize, out: &mut dyn Write) -> io::Result<()> {
    let count = |s| result.with_status(s).count();
    writeln!(out, "{shared} pairs share files")?;
    writeln!(out, "{} not co-installable", count(CandidateStatus::NotCoinstallable))?;
    writeln!(out, "{} excused by Replaces", count(CandidateStatus::ExcusedByReplaces))?;
    writeln!(out, "{} candidates", count(CandidateStatus::Candidate))?;
    for c in result.with_status(CandidateStatus::Candidate) {
        writeln!(out, "{} {}", c.pair.0, c.pair.1)?;
        for path in c.shared_paths.iter().take(SHOWN_PATHS) {
            writeln!(out, "  /{path}")?;
        }
        if c.shared_paths.len() > SHOWN_PATHS {
            writeln!(out, "  ... {} more", c.shared_paths.len() - SHOWN_PATHS)?;
        }
    }
    Ok(())
}

fn to_json(result: &Classification, shared: usize) -> JsonConflicts<'_> {
    let count = |s| result.with_status(s).count();
    JsonConflicts {
        shared_pairs: shared,
        not_coinstallable: count(CandidateStatus::NotCoinstallable),
        excused_by_replaces: count(CandidateStatus::ExcusedByReplaces),
        candidates: count(CandidateStatus::Candidate),
        pairs: result
            .classified
            .iter()
            .map(|c| JsonPair {
                packages: [&c.pair.0, &c.pair.1],
                status: c.status.map(CandidateStatus::as_str),
                shared_paths: &c.shared_paths,
                missing: None,
            })
            .collect(),
        unresolved: result
            .unresolved
            .iter()
            .map(|u| JsonPair {
                packages: [&u.candidate.pair.0, &u.candidate.pair.1],
                status: None,
                shared_paths: &u.candidate.shared_paths,
                missing: Some(&u.missing),
            })
            .collect(),
    }
}
