//! `Packages` index parsing.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::relation::{
    parse_dependency_field, parse_ref_list, ConstrainedRef, DependencyExpression, RelationError,
};

/// One binary package as written in the index, before expansion.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PackageStanza {
    pub name: String,
    pub version: String,
    /// `Depends` followed by `Pre-Depends`.
    pub depends: DependencyExpression,
    pub conflicts: Vec<ConstrainedRef>,
    pub provides: Vec<String>,
    pub replaces: Vec<String>,
    pub architecture: Option<String>,
    /// 1-based line of the `Package` field's stanza; 0 for synthesized stanzas.
    pub line: usize,
    /// Set on stanzas the expander invents for virtual names.
    pub synthetic: bool,
}

impl PackageStanza {
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Self {
        PackageStanza {
            name: name.into(),
            version: version.into(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StanzaErrorKind {
    #[error("missing {0} field")]
    MissingField(&'static str),
    #[error("invalid package name `{0}`")]
    InvalidName(String),
    #[error("empty version")]
    EmptyVersion,
    #[error("cannot parse {field}: {source}")]
    Relation {
        field: &'static str,
        source: RelationError,
    },
}

/// A stanza that had to be dropped.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct StanzaError {
    pub line: usize,
    pub kind: StanzaErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WarningKind {
    /// A later stanza with the same name and version replaced this one.
    DuplicateStanza { name: String, version: String },
    /// Indented line with no field to continue.
    OrphanContinuation,
    /// Line that is neither `Field: value` nor a continuation.
    MalformedLine,
    /// `Provides: x (= v)`; the version is dropped.
    VersionedProvides(String),
    /// `Replaces: x (<< v)`; treated as an unconditional replace.
    VersionedReplaces(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub kind: WarningKind,
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            WarningKind::DuplicateStanza { name, version } => {
                write!(f, "duplicate stanza for {name} {version}, keeping the last one")
            }
            WarningKind::OrphanContinuation => f.write_str("continuation line outside a field"),
            WarningKind::MalformedLine => f.write_str("line is not a `Field: value` pair"),
            WarningKind::VersionedProvides(n) => {
                write!(f, "version on provided name {n} ignored")
            }
            WarningKind::VersionedReplaces(n) => {
                write!(f, "version on Replaces entry {n} ignored")
            }
        }
    }
}

/// Everything recovered from one `Packages` text.
#[derive(Clone, Debug, Default)]
pub struct ParsedPackages {
    pub stanzas: Vec<PackageStanza>,
    pub errors: Vec<StanzaError>,
    pub warnings: Vec<Warning>,
}

struct Field {
    name: String,
    value: String,
    line: usize,
}

struct RawStanza {
    line: usize,
    fields: Vec<Field>,
}

fn split_stanzas(input: &str, warnings: &mut Vec<Warning>) -> Vec<RawStanza> {
    let mut out = Vec::new();
    let mut current: Option<RawStanza> = None;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            out.extend(current.take());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with([' ', '\t']) {
            match current.as_mut().and_then(|s| s.fields.last_mut()) {
                Some(field) => {
                    field.value.push('\n');
                    field.value.push_str(line.trim());
                }
                None => warnings.push(Warning {
                    line: lineno,
                    kind: WarningKind::OrphanContinuation,
                }),
            }
            continue;
        }
        let Some((name, value)) = line.split_once(':') else {
            warnings.push(Warning {
                line: lineno,
                kind: WarningKind::MalformedLine,
            });
            continue;
        };
        current
            .get_or_insert_with(|| RawStanza {
                line: lineno,
                fields: Vec::new(),
            })
            .fields
            .push(Field {
                name: name.trim().to_ascii_lowercase(),
                value: value.trim().to_string(),
                line: lineno,
            });
    }
    out.extend(current);
    out
}

fn field<'a>(raw: &'a RawStanza, name: &str) -> Option<&'a Field> {
    raw.fields.iter().rev().find(|f| f.name == name)
}

fn relation_error(field: &'static str, line: usize, source: RelationError) -> StanzaError {
    StanzaError {
        line,
        kind: StanzaErrorKind::Relation { field, source },
    }
}

fn build_stanza(raw: &RawStanza, warnings: &mut Vec<Warning>) -> Result<PackageStanza, StanzaError> {
    let missing = |f| StanzaError {
        line: raw.line,
        kind: StanzaErrorKind::MissingField(f),
    };
    let name_field = field(raw, "package").ok_or_else(|| missing("Package"))?;
    let version_field = field(raw, "version").ok_or_else(|| missing("Version"))?;
    let name = name_field.value.as_str();
    if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == ',') {
        return Err(StanzaError {
            line: name_field.line,
            kind: StanzaErrorKind::InvalidName(name.to_string()),
        });
    }
    if version_field.value.is_empty() {
        return Err(StanzaError {
            line: version_field.line,
            kind: StanzaErrorKind::EmptyVersion,
        });
    }

    let mut stanza = PackageStanza::new(name, version_field.value.as_str());
    stanza.line = raw.line;
    stanza.architecture = field(raw, "architecture").map(|f| f.value.clone());

    for (key, label) in [("depends", "Depends"), ("pre-depends", "Pre-Depends")] {
        if let Some(f) = field(raw, key) {
            let expr = parse_dependency_field(&f.value).map_err(|e| relation_error(label, f.line, e))?;
            stanza.depends.conjuncts.extend(expr.conjuncts);
        }
    }
    if let Some(f) = field(raw, "conflicts") {
        stanza.conflicts =
            parse_ref_list(&f.value).map_err(|e| relation_error("Conflicts", f.line, e))?;
    }
    if let Some(f) = field(raw, "provides") {
        let refs = parse_ref_list(&f.value).map_err(|e| relation_error("Provides", f.line, e))?;
        stanza.provides = names_only(refs, f.line, warnings, WarningKind::VersionedProvides);
    }
    if let Some(f) = field(raw, "replaces") {
        let refs = parse_ref_list(&f.value).map_err(|e| relation_error("Replaces", f.line, e))?;
        stanza.replaces = names_only(refs, f.line, warnings, WarningKind::VersionedReplaces);
    }
    Ok(stanza)
}

fn names_only(
    refs: Vec<ConstrainedRef>,
    line: usize,
    warnings: &mut Vec<Warning>,
    kind: fn(String) -> WarningKind,
) -> Vec<String> {
    refs.into_iter()
        .map(|r| {
            if r.constraint.is_some() {
                warnings.push(Warning {
                    line,
                    kind: kind(r.name.clone()),
                });
            }
            r.name
        })
        .collect()
}

/// Parse a `Packages` index.
///
/// `Suggests`, `Enhances`, `Recommends`, `Breaks` and unknown fields are
/// ignored. A bad stanza is reported in `errors` and skipped; parsing goes
/// on with the next one. When a `(name, version)` pair occurs twice the
/// last stanza wins.
pub fn parse_packages(input: &str) -> ParsedPackages {
    let mut warnings = Vec::new();
    let raws = split_stanzas(input, &mut warnings);
    let mut errors = Vec::new();
    let mut stanzas: Vec<PackageStanza> = Vec::with_capacity(raws.len());
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut dropped = Vec::new();
    for raw in &raws {
        match build_stanza(raw, &mut warnings) {
            Ok(stanza) => {
                let key = (stanza.name.clone(), stanza.version.clone());
                if let Some(prev) = seen.insert(key, stanzas.len()) {
                    warnings.push(Warning {
                        line: stanzas[prev].line,
                        kind: WarningKind::DuplicateStanza {
                            name: stanza.name.clone(),
                            version: stanza.version.clone(),
                        },
                    });
                    dropped.push(prev);
                }
                stanzas.push(stanza);
            }
            Err(e) => errors.push(e),
        }
    }
    if !dropped.is_empty() {
        dropped.sort_unstable();
        let mut idx = 0;
        stanzas.retain(|_| {
            let keep = dropped.binary_search(&idx).is_err();
            idx += 1;
            keep
        });
    }
    ParsedPackages {
        stanzas,
        errors,
        warnings,
    }
}

/// Render stanzas back to `Packages` syntax. Empty alternatives are written
/// as their original text so that re-expansion reproduces them.
pub fn render_packages(stanzas: &[PackageStanza]) -> String {
    let mut out = String::new();
    for (i, s) in stanzas.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "Package: {}", s.name);
        let _ = writeln!(out, "Version: {}", s.version);
        if let Some(arch) = &s.architecture {
            let _ = writeln!(out, "Architecture: {arch}");
        }
        if !s.depends.is_empty() {
            let parts: Vec<String> = s
                .depends
                .conjuncts
                .iter()
                .map(|alt| {
                    if alt.refs.is_empty() {
                        alt.describe()
                    } else {
                        alt.to_string()
                    }
                })
                .collect();
            let _ = writeln!(out, "Depends: {}", parts.join(", "));
        }
        write_list(&mut out, "Conflicts", s.conflicts.iter());
        write_list(&mut out, "Provides", s.provides.iter());
        write_list(&mut out, "Replaces", s.replaces.iter());
    }
    out
}

fn write_list<T: core::fmt::Display>(out: &mut String, field: &str, items: impl Iterator<Item = T>) {
    let items: Vec<String> = items.map(|i| i.to_string()).collect();
    if !items.is_empty() {
        let _ = writeln!(out, "{field}: {}", items.join(", "));
    }
}
