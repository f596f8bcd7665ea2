//! Package metadata: the `Packages` index format, relation fields and
//! version ordering.

mod packages;
mod relation;
mod version;

pub use packages::{
    parse_packages, render_packages, PackageStanza, ParsedPackages, StanzaError, StanzaErrorKind,
    Warning, WarningKind,
};
pub use relation::{
    parse_dependency_field, parse_ref_list, Alternative, ConstrainedRef, DependencyExpression,
    Relation, RelationError, RelationErrorKind, VersionConstraint,
};
pub use version::{compare_versions, versions_equal};
