use std::collections::BTreeMap;
use std::io::{self, Write};

use debcheck_core::expander::{PackageId, Repository};
use debcheck_core::solver::CheckResult;
use serde::{Deserialize, Serialize};

use crate::weather::{Summary, WeatherCategory};

/// Seconds spent in each stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub parse: f64,
    pub encode: f64,
    pub solve: f64,
}

/// Which results a report shows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Filter {
    All,
    Failures,
    Successes,
}

impl Filter {
    fn shows(self, r: &CheckResult) -> bool {
        match self {
            Filter::All => true,
            Filter::Failures => !r.is_installable(),
            Filter::Successes => r.is_installable(),
        }
    }
}

/// Results for every selected package, in repository order.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub total_packages: usize,
    pub non_installable: usize,
    pub results: Vec<(PackageId, CheckResult)>,
    pub timings: Timings,
    /// `Architecture` of each package, when given.
    pub architectures: BTreeMap<PackageId, String>,
}

impl RunReport {
    pub fn new(results: Vec<(PackageId, CheckResult)>, architectures: BTreeMap<PackageId, String>) -> Self {
        let non_installable = results.iter().filter(|(_, r)| !r.is_installable()).count();
        RunReport {
            total_packages: results.len(),
            non_installable,
            results,
            timings: Timings::default(),
            architectures,
        }
    }

    pub fn summary(&self) -> Summary {
        Summary::from_counts(self.total_packages, self.non_installable)
    }

    /// The one architecture other than `all` the packages name, if unique.
    pub fn architecture(&self) -> Option<String> {
        let mut archs = self.architectures.values().filter(|a| a.as_str() != "all");
        let first = archs.next()?;
        archs.all(|a| a == first).then(|| first.clone())
    }

    pub(crate) fn write_text(
        &self,
        repo: &Repository,
        filter: Filter,
        explain: bool,
        out: &mut dyn Write,
    ) -> io::Result<()> {
        for (id, result) in self.results.iter().filter(|(_, r)| filter.shows(r)) {
            match result {
                CheckResult::Installable { .. } => writeln!(out, "{id}: OK")?,
                CheckResult::NotInstallable { explanation } => {
                    writeln!(out, "{id}: FAILED")?;
                    if explain {
                        for (k, chain) in explanation.render(repo).iter().enumerate() {
                            if k > 0 {
                                writeln!(out, "  --")?;
                            }
                            for line in chain {
                                writeln!(out, "  {line}")?;
                            }
                        }
                    }
                }
            }
        }
        let s = self.summary();
        writeln!(
            out,
            "{} packages, {} non-installable ({:.2}%), weather: {}",
            s.total,
            s.broken,
            s.fraction * 100.0,
            s.category
        )
    }

    pub(crate) fn to_json(&self, repo: &Repository, filter: Filter, timings: bool) -> JsonReport {
        let s = self.summary();
        JsonReport {
            architecture: self.architecture(),
            total_packages: self.total_packages,
            non_installable: self.non_installable,
            fraction: s.fraction,
            weather: s.category,
            results: self
                .results
                .iter()
                .filter(|(_, r)| filter.shows(r))
                .map(|(id, r)| JsonResult {
                    package: id.name.clone(),
                    version: id.version.clone(),
                    architecture: self.architectures.get(id).cloned(),
                    installable: r.is_installable(),
                    explanation: r.explanation().map(|e| e.render(repo)),
                })
                .collect(),
            timings: timings.then_some(self.timings),
        }
    }
}

/// The `--format=json` report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub architecture: Option<String>,
    pub total_packages: usize,
    pub non_installable: usize,
    pub fraction: f64,
    pub weather: WeatherCategory,
    pub results: Vec<JsonResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonResult {
    pub package: String,
    pub version: String,
    #[serde(default)]
    pub architecture: Option<String>,
    pub installable: bool,
    /// One list of lines per chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Vec<Vec<String>>>,
}
