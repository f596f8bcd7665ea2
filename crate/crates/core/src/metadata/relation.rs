//! Relation fields: `Depends`, `Conflicts` and friends.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::version::compare_versions;

/// Version relation inside a `(rel version)` constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `<<`
    StrictlyLess,
    /// `<=`, or the legacy `<`
    LessOrEqual,
    /// `=`
    Equal,
    /// `>=`, or the legacy `>`
    GreaterOrEqual,
    /// `>>`
    StrictlyGreater,
}

impl Relation {
    pub fn token(self) -> &'static str {
        match self {
            Relation::StrictlyLess => "<<",
            Relation::LessOrEqual => "<=",
            Relation::Equal => "=",
            Relation::GreaterOrEqual => ">=",
            Relation::StrictlyGreater => ">>",
        }
    }

    fn from_token(token: &str) -> Option<Self> {
        Some(match token {
            "<<" => Relation::StrictlyLess,
            "<=" | "<" => Relation::LessOrEqual,
            "=" => Relation::Equal,
            ">=" | ">" => Relation::GreaterOrEqual,
            ">>" => Relation::StrictlyGreater,
            _ => return None,
        })
    }

    /// Whether `candidate <rel> bound` holds, given `candidate.cmp(bound)`.
    pub fn admits(self, ord: Ordering) -> bool {
        match self {
            Relation::StrictlyLess => ord == Ordering::Less,
            Relation::LessOrEqual => ord != Ordering::Greater,
            Relation::Equal => ord == Ordering::Equal,
            Relation::GreaterOrEqual => ord != Ordering::Less,
            Relation::StrictlyGreater => ord == Ordering::Greater,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VersionConstraint {
    pub relation: Relation,
    pub version: String,
}

impl VersionConstraint {
    pub fn matches(&self, candidate: &str) -> bool {
        self.relation
            .admits(compare_versions(candidate, &self.version))
    }
}

/// A package name, optionally restricted by a version constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstrainedRef {
    pub name: String,
    pub constraint: Option<VersionConstraint>,
}

impl ConstrainedRef {
    pub fn any(name: impl Into<String>) -> Self {
        ConstrainedRef {
            name: name.into(),
            constraint: None,
        }
    }

    /// `name (= version)`
    pub fn exact(name: impl Into<String>, version: impl Into<String>) -> Self {
        Self::with(name, Relation::Equal, version)
    }

    pub fn with(name: impl Into<String>, relation: Relation, version: impl Into<String>) -> Self {
        ConstrainedRef {
            name: name.into(),
            constraint: Some(VersionConstraint {
                relation,
                version: version.into(),
            }),
        }
    }

    /// Does the package `(self.name, version)` satisfy this reference?
    pub fn matches(&self, version: &str) -> bool {
        self.constraint.as_ref().is_none_or(|c| c.matches(version))
    }
}

impl fmt::Display for ConstrainedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(c) = &self.constraint {
            write!(f, " ({} {})", c.relation.token(), c.version)?;
        }
        Ok(())
    }
}

/// One conjunct of a dependency field: any of `refs` will do.
///
/// A freshly parsed alternative is never empty. After version expansion it
/// may be, when nothing in the repository matches; `label` then still holds
/// the text the alternative was written as.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Alternative {
    pub refs: Vec<ConstrainedRef>,
    pub label: Option<String>,
}

impl Alternative {
    pub fn new(refs: Vec<ConstrainedRef>) -> Self {
        Alternative { refs, label: None }
    }

    /// The original text if known, otherwise the rendered refs.
    pub fn describe(&self) -> String {
        match &self.label {
            Some(label) => label.clone(),
            None => self.to_string(),
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.refs.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Conjunction of alternatives. Empty means "no dependencies".
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DependencyExpression {
    pub conjuncts: Vec<Alternative>,
}

impl DependencyExpression {
    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }
}

impl fmt::Display for DependencyExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, alt) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{alt}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RelationErrorKind {
    #[error("expected a package name")]
    ExpectedName,
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("missing version in constraint")]
    MissingVersion,
    #[error("unexpected character `{0}`")]
    Unexpected(char),
    #[error("alternatives are not allowed in this field")]
    AlternativeNotAllowed,
}

/// Parse failure, located by byte offset into the field value.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct RelationError {
    pub offset: usize,
    pub kind: RelationErrorKind,
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn error(&self, offset: usize, kind: RelationErrorKind) -> RelationError {
        RelationError { offset, kind }
    }

    fn unexpected(&self) -> RelationError {
        let c = self.text[self.pos..].chars().next().unwrap_or('\0');
        self.error(self.pos, RelationErrorKind::Unexpected(c))
    }

    fn parse_ref(&mut self) -> Result<ConstrainedRef, RelationError> {
        self.skip_ws();
        let start = self.pos;
        let raw = self.take_while(|c| {
            !c.is_ascii_whitespace() && !matches!(c, b'(' | b')' | b',' | b'|' | b'[' | b'<')
        });
        if raw.is_empty() {
            return Err(match self.peek() {
                Some(b')') => self.error(self.pos, RelationErrorKind::UnbalancedParenthesis),
                _ => self.error(start, RelationErrorKind::ExpectedName),
            });
        }
        // Multiarch qualifiers (`foo:any`) do not change which package is meant.
        let name = raw.split(':').next().unwrap_or(raw);
        if name.is_empty() {
            return Err(self.error(start, RelationErrorKind::ExpectedName));
        }
        self.skip_ws();
        let constraint = if self.peek() == Some(b'(') {
            Some(self.parse_constraint()?)
        } else {
            None
        };
        self.skip_restrictions()?;
        Ok(ConstrainedRef {
            name: name.to_string(),
            constraint,
        })
    }

    fn parse_constraint(&mut self) -> Result<VersionConstraint, RelationError> {
        let open = self.pos;
        self.pos += 1;
        self.skip_ws();
        let token_at = self.pos;
        let token = self.take_while(|c| matches!(c, b'<' | b'=' | b'>' | b'!'));
        let relation = Relation::from_token(token).ok_or_else(|| {
            if self.peek().is_none() {
                self.error(open, RelationErrorKind::UnbalancedParenthesis)
            } else {
                self.error(token_at, RelationErrorKind::UnknownRelation(token.to_string()))
            }
        })?;
        self.skip_ws();
        let version = self.take_while(|c| !c.is_ascii_whitespace() && !matches!(c, b'(' | b')'));
        self.skip_ws();
        match self.peek() {
            Some(b')') if version.is_empty() => {
                Err(self.error(self.pos, RelationErrorKind::MissingVersion))
            }
            Some(b')') => {
                self.pos += 1;
                Ok(VersionConstraint {
                    relation,
                    version: version.to_string(),
                })
            }
            None => Err(self.error(open, RelationErrorKind::UnbalancedParenthesis)),
            Some(_) => Err(self.unexpected()),
        }
    }

    // Architecture lists `[i386]` and build profiles `<!nocheck>` are not
    // interpreted; one file describes one architecture.
    fn skip_restrictions(&mut self) -> Result<(), RelationError> {
        loop {
            self.skip_ws();
            let close = match self.peek() {
                Some(b'[') => b']',
                Some(b'<') => b'>',
                _ => return Ok(()),
            };
            let open = self.pos;
            match self.text[open..].bytes().position(|c| c == close) {
                Some(len) => self.pos = open + len + 1,
                None => return Err(self.error(open, RelationErrorKind::UnbalancedParenthesis)),
            }
        }
    }
}

/// Parse a `Depends`-style field: comma-separated conjuncts of
/// pipe-separated alternatives.
pub fn parse_dependency_field(text: &str) -> Result<DependencyExpression, RelationError> {
    let mut s = Scanner { text, pos: 0 };
    let mut conjuncts = Vec::new();
    s.skip_ws();
    if s.peek().is_none() {
        return Ok(DependencyExpression { conjuncts });
    }
    loop {
        let mut refs = Vec::new();
        loop {
            refs.push(s.parse_ref()?);
            s.skip_ws();
            if s.peek() == Some(b'|') {
                s.pos += 1;
            } else {
                break;
            }
        }
        conjuncts.push(Alternative::new(refs));
        match s.peek() {
            None => break,
            Some(b',') => s.pos += 1,
            Some(b')') => {
                return Err(s.error(s.pos, RelationErrorKind::UnbalancedParenthesis));
            }
            Some(_) => return Err(s.unexpected()),
        }
    }
    Ok(DependencyExpression { conjuncts })
}

/// Parse a field that is a flat comma-separated list (`Conflicts`,
/// `Provides`, `Replaces`).
pub fn parse_ref_list(text: &str) -> Result<Vec<ConstrainedRef>, RelationError> {
    let expr = parse_dependency_field(text)?;
    let mut out = Vec::with_capacity(expr.conjuncts.len());
    let mut offset = 0;
    for alt in expr.conjuncts {
        if alt.refs.len() > 1 {
            let at = text[offset..].find('|').map_or(0, |p| p + offset);
            return Err(RelationError {
                offset: at,
                kind: RelationErrorKind::AlternativeNotAllowed,
            });
        }
        offset = text[offset..].find(',').map_or(offset, |p| p + offset + 1);
        out.extend(alt.refs);
    }
    Ok(out)
}
