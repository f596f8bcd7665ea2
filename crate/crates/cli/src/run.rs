use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use debcheck_core::expander::{expand_and_build, PackageId, PackageIndex, Repository};
use debcheck_core::metadata::{parse_packages, render_packages, versions_equal, PackageStanza};
use debcheck_core::solver::{check_all, encode, Checker};

use crate::args::{CheckArgs, Cli, Command, Format};
use crate::report::{Filter, RunReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_BROKEN: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// `name` or `name=version`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub name: String,
    pub version: Option<String>,
}

impl Selector {
    pub fn parse(text: &str) -> Self {
        match text.split_once('=') {
            Some((name, version)) => Selector {
                name: name.trim().to_string(),
                version: Some(version.trim().to_string()),
            },
            None => Selector {
                name: text.trim().to_string(),
                version: None,
            },
        }
    }

    fn resolve(&self, repo: &Repository) -> Vec<PackageIndex> {
        repo.versions_of(&self.name)
            .filter(|&i| !repo.is_synthetic(i))
            .filter(|&i| match &self.version {
                None => true,
                Some(v) => versions_equal(&repo.package(i).version, v),
            })
            .collect()
    }
}

impl std::fmt::Display for Selector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.version {
            Some(v) => write!(f, "{}={}", self.name, v),
            None => f.write_str(&self.name),
        }
    }
}

/// Read a file, or standard input for `None`, as lossy UTF-8.
pub fn read_input(path: Option<&Path>, stdin: &mut dyn Read) -> anyhow::Result<String> {
    let bytes = match path {
        Some(p) => fs::read(p).with_context(|| format!("cannot read {}", p.display()))?,
        None => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf).context("cannot read standard input")?;
            buf
        }
    };
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Parse and report diagnostics; stanza errors do not stop the run.
pub(crate) fn load_stanzas(text: &str, source: &str, err: &mut dyn Write) -> Vec<PackageStanza> {
    let parsed = parse_packages(text);
    for e in &parsed.errors {
        let _ = writeln!(err, "{source}: warning: {e}");
    }
    for w in &parsed.warnings {
        let _ = writeln!(err, "{source}: warning: {w}");
    }
    parsed.stanzas
}

/// Entry point shared by the binary and the tests. Returns the exit status.
pub fn run(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Some(Command::Conflicts {
            contents,
            packages,
            format,
        }) => crate::conflicts::run_conflicts(&contents, &packages, format, out, err),
        Some(Command::Aggregate { format, reports }) => {
            crate::aggregate::run_aggregate(&reports, format, out)
        }
        None => run_debcheck(&cli.check, stdin, out, err),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "debcheck: {e:#}");
            EXIT_INPUT
        }
    }
}

/// Parse, expand, build and check; then print the report.
pub fn run_debcheck(
    opts: &CheckArgs,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<u8> {
    let source = opts
        .file
        .as_deref()
        .map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string());
    let started = Instant::now();
    let text = read_input(opts.file.as_deref(), stdin)?;
    let stanzas = load_stanzas(&text, &source, err);
    let parse = started.elapsed().as_secs_f64();
    let real = stanzas.len();
    let _ = writeln!(err, "Parsing package file... {parse:.2} seconds {real} packages");

    let started = Instant::now();
    let (expanded, repo) = expand_and_build(&stanzas).context("cannot build repository")?;
    let encode_time = started.elapsed().as_secs_f64();
    let _ = writeln!(err, "Generating constraints... {encode_time:.2} seconds");

    if opts.dump_expanded {
        out.write_all(render_packages(&expanded).as_bytes())?;
        return Ok(EXIT_OK);
    }
    if opts.dump_dimacs {
        out.write_all(encode(&repo).to_dimacs(&repo).as_bytes())?;
        return Ok(EXIT_OK);
    }

    let started = Instant::now();
    let mut status = EXIT_OK;
    let results = if opts.checks.is_empty() {
        let all = check_all(&repo);
        all.iter()
            .filter(|(p, _)| !repo.is_synthetic(*p))
            .map(|(p, r)| (repo.package(p).clone(), r.clone()))
            .collect()
    } else {
        let mut selected = Vec::new();
        for s in opts.checks.iter().map(|s| Selector::parse(s)) {
            let found = s.resolve(&repo);
            if found.is_empty() {
                let _ = writeln!(err, "debcheck: unknown package {s}");
                status = EXIT_INPUT;
            }
            selected.extend(found);
        }
        selected.sort_unstable();
        selected.dedup();
        let mut checker = Checker::new(&repo);
        selected
            .into_iter()
            .map(|p| (repo.package(p).clone(), checker.check(&[p])))
            .collect()
    };
    let solve = started.elapsed().as_secs_f64();
    let _ = writeln!(err, "Checking packages... {solve:.2} seconds");

    let architectures: BTreeMap<PackageId, String> = stanzas
        .iter()
        .filter_map(|s| {
            let arch = s.architecture.clone()?;
            Some((PackageId::new(s.name.as_str(), s.version.as_str()), arch))
        })
        .collect();
    let mut report = RunReport::new(results, architectures);
    report.timings = crate::report::Timings {
        parse,
        encode: encode_time,
        solve,
    };

    let filter = if opts.failures_only {
        Filter::Failures
    } else if opts.successes_only {
        Filter::Successes
    } else if opts.format == Format::Json {
        Filter::All
    } else {
        Filter::Failures
    };
    match opts.format {
        Format::Text => report.write_text(&repo, filter, opts.explain, out)?,
        Format::Json => {
            let json = report.to_json(&repo, filter, opts.timings);
            serde_json::to_writer_pretty(&mut *out, &json)?;
            writeln!(out)?;
        }
    }
    if status == EXIT_OK && report.non_installable > 0 {
        status = EXIT_BROKEN;
    }
    Ok(status)
}

