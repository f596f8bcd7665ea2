//! Explanations for failed queries.
//!
//! The solver hands over a refutation core: dependency and conflict edges
//! that together rule out the query. The core is pruned to edges that lie
//! on some path from a queried package to a dead end (an unsatisfiable
//! dependency or a conflict), then covered by chains of the form
//! `π depends on d {available versions} …` ending in one of those dead ends.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::encode::{encode, ClauseOrigin, Lit};
use super::engine::{Engine, Outcome};
use crate::expander::{PackageIndex, Repository};

/// Chains beyond this count skip the greedy pruning pass.
const PRUNE_CHAIN_LIMIT: usize = 64;
/// Explanations mentioning more packages than this skip pruning too.
const PRUNE_PACKAGE_LIMIT: usize = 5_000;

/// `package` needs its `dependency`-th dependency; the chain goes on with
/// one of that dependency's targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub package: PackageIndex,
    pub dependency: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainEnd {
    /// The last step's dependency has no available target.
    NotAvailable,
    /// `package` (reached by the last step, or a queried package when
    /// there are no steps) conflicts with `with`.
    Conflict {
        package: PackageIndex,
        with: PackageIndex,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain {
    pub steps: Vec<Step>,
    pub end: ChainEnd,
}

/// Why a set of packages cannot be installed together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub query: Vec<PackageIndex>,
    pub chains: Vec<Chain>,
}

impl Explanation {
    /// Every package the explanation names: chain packages, all targets of
    /// every step's dependency, conflict partners and the query itself.
    pub fn mentioned_packages(&self, repo: &Repository) -> BTreeSet<PackageIndex> {
        mentioned(repo, &self.query, &self.chains)
    }

    /// One block of lines per chain, in the style
    /// `a (= 1) depends on b (>= 2) {b (= 2), b (= 3)}`.
    pub fn render(&self, repo: &Repository) -> Vec<Vec<String>> {
        self.chains
            .iter()
            .map(|chain| {
                let mut lines = Vec::with_capacity(chain.steps.len() + 1);
                for step in &chain.steps {
                    let dep = &repo.dependencies(step.package)[step.dependency];
                    let available = if dep.targets.is_empty() {
                        String::from("NOT AVAILABLE")
                    } else {
                        dep.targets
                            .iter()
                            .map(|&t| format!("{}", repo.package(t)))
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    let label = dep.label.clone().unwrap_or_else(|| {
                        dep.targets
                            .iter()
                            .map(|&t| format!("{}", repo.package(t)))
                            .collect::<Vec<_>>()
                            .join(" | ")
                    });
                    lines.push(format!(
                        "{} depends on {} {{{}}}",
                        repo.package(step.package),
                        label,
                        available
                    ));
                }
                if let ChainEnd::Conflict { package, with } = chain.end {
                    lines.push(format!(
                        "{} conflicts with {}",
                        repo.package(package),
                        repo.package(with)
                    ));
                }
                lines
            })
            .collect()
    }
}

fn mentioned(repo: &Repository, query: &[PackageIndex], chains: &[Chain]) -> BTreeSet<PackageIndex> {
    let mut out: BTreeSet<PackageIndex> = query.iter().copied().collect();
    for chain in chains {
        for step in &chain.steps {
            out.insert(step.package);
            out.extend(repo.dependencies(step.package)[step.dependency].targets.iter().copied());
        }
        if let ChainEnd::Conflict { package, with } = chain.end {
            out.insert(package);
            out.insert(with);
        }
    }
    out
}

/// Is the query satisfiable in `repo`? No explanation is built.
pub(crate) fn query_satisfiable(repo: &Repository, query: &[PackageIndex]) -> bool {
    let mut engine = Engine::new(&encode(repo), false);
    let lits: Vec<Lit> = query.iter().map(|&p| Lit::installed(p)).collect();
    matches!(engine.solve(&lits), Outcome::Sat(_))
}

/// Does the sub-repository induced by `keep` still refute the query?
fn still_refutes(repo: &Repository, query: &[PackageIndex], keep: &BTreeSet<PackageIndex>) -> bool {
    let sub = repo.induced(keep);
    let sub_query: Vec<PackageIndex> = query
        .iter()
        .map(|&p| sub.index_of(repo.package(p)).expect("query is kept"))
        .collect();
    !query_satisfiable(&sub, &sub_query)
}

struct CoreGraph<'r> {
    repo: &'r Repository,
    edges: BTreeMap<PackageIndex, BTreeSet<usize>>,
    conflicts: BTreeSet<(PackageIndex, PackageIndex)>,
}

impl<'r> CoreGraph<'r> {
    fn targets(&self, step: Step) -> &'r [PackageIndex] {
        &self.repo.dependencies(step.package)[step.dependency].targets
    }

    fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        self.edges.iter().flat_map(|(&package, deps)| {
            deps.iter().map(move |&dependency| Step {
                package,
                dependency,
            })
        })
    }

    fn partners(&self, p: PackageIndex) -> impl Iterator<Item = PackageIndex> + '_ {
        self.conflicts.iter().filter_map(move |&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
    }

    fn empty_dependency(&self, p: PackageIndex) -> Option<Step> {
        self.edges.get(&p)?.iter().map(|&dependency| Step {
            package: p,
            dependency,
        }).find(|&s| self.targets(s).is_empty())
    }

    fn is_dead_end(&self, p: PackageIndex) -> bool {
        self.empty_dependency(p).is_some() || self.partners(p).next().is_some()
    }

    /// Breadth-first tree from the query: node → step that first reached it.
    fn forward(&self, roots: &[PackageIndex]) -> BTreeMap<PackageIndex, Option<Step>> {
        let mut parent = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &r in roots {
            if parent.insert(r, None).is_none() {
                queue.push_back(r);
            }
        }
        while let Some(x) = queue.pop_front() {
            let Some(deps) = self.edges.get(&x) else {
                continue;
            };
            for &dependency in deps {
                let step = Step {
                    package: x,
                    dependency,
                };
                for &t in self.targets(step) {
                    if let alloc::collections::btree_map::Entry::Vacant(e) = parent.entry(t) {
                        e.insert(Some(step));
                        queue.push_back(t);
                    }
                }
            }
        }
        parent
    }

    /// Shortest way from each node to a dead end: node → (step, next node),
    /// or `None` for dead ends themselves.
    fn backward(&self) -> BTreeMap<PackageIndex, Option<(Step, PackageIndex)>> {
        let mut reverse: BTreeMap<PackageIndex, Vec<Step>> = BTreeMap::new();
        for step in self.steps() {
            for &t in self.targets(step) {
                reverse.entry(t).or_default().push(step);
            }
        }
        let mut next = BTreeMap::new();
        let mut queue = VecDeque::new();
        let mut nodes: BTreeSet<PackageIndex> = self.edges.keys().copied().collect();
        for &(a, b) in &self.conflicts {
            nodes.insert(a);
            nodes.insert(b);
        }
        for &n in &nodes {
            if self.is_dead_end(n) {
                next.insert(n, None);
                queue.push_back(n);
            }
        }
        while let Some(y) = queue.pop_front() {
            for &step in reverse.get(&y).map(Vec::as_slice).unwrap_or_default() {
                if let alloc::collections::btree_map::Entry::Vacant(e) = next.entry(step.package) {
                    e.insert(Some((step, y)));
                    queue.push_back(step.package);
                }
            }
        }
        next
    }

    /// Drop edges off every query-to-dead-end path until nothing changes.
    fn prune(&mut self, roots: &[PackageIndex]) {
        loop {
            let before = (self.steps().count(), self.conflicts.len());
            let reach = self.forward(roots);
            self.edges.retain(|p, _| reach.contains_key(p));
            self.conflicts
                .retain(|(a, b)| reach.contains_key(a) && reach.contains_key(b));
            let useful = self.backward();
            let repo = self.repo;
            for (&p, deps) in self.edges.iter_mut() {
                deps.retain(|&d| {
                    let targets = &repo.dependencies(p)[d].targets;
                    targets.is_empty() || targets.iter().any(|t| useful.contains_key(t))
                });
            }
            self.edges.retain(|_, deps| !deps.is_empty());
            if before == (self.steps().count(), self.conflicts.len()) {
                break;
            }
        }
    }
}

/// Turn a refutation core into chains.
pub(crate) fn explain(repo: &Repository, query: &[PackageIndex], core: &[ClauseOrigin]) -> Explanation {
    let mut graph = CoreGraph {
        repo,
        edges: BTreeMap::new(),
        conflicts: BTreeSet::new(),
    };
    for origin in core {
        match *origin {
            ClauseOrigin::DependencyEdge { from, dependency } => {
                graph.edges.entry(from).or_default().insert(dependency);
            }
            ClauseOrigin::ConflictEdge(a, b) => {
                graph.conflicts.insert((a.min(b), a.max(b)));
            }
            ClauseOrigin::QueryAssumption(_) => {}
        }
    }
    graph.prune(query);

    let parent = graph.forward(query);
    let next = graph.backward();
    let path_to = |x: PackageIndex| -> Vec<Step> {
        let mut steps = Vec::new();
        let mut cur = x;
        while let Some(Some(step)) = parent.get(&cur) {
            steps.push(*step);
            cur = step.package;
        }
        steps.reverse();
        steps
    };
    // Follow shortest steps to a dead end and close the chain there.
    let finish = |mut steps: Vec<Step>, from: PackageIndex| -> Chain {
        let mut cur = from;
        while let Some(Some((step, y))) = next.get(&cur) {
            steps.push(*step);
            cur = *y;
        }
        if let Some(step) = graph.empty_dependency(cur) {
            steps.push(step);
            return Chain {
                steps,
                end: ChainEnd::NotAvailable,
            };
        }
        let with = graph
            .partners(cur)
            .next()
            .expect("dead end has an empty dependency or a conflict");
        Chain {
            steps,
            end: ChainEnd::Conflict { package: cur, with },
        }
    };

    fn push(chains: &mut Vec<Chain>, chain: Chain) {
        if !chains.contains(&chain) {
            chains.push(chain);
        }
    }
    let mut chains: Vec<Chain> = Vec::new();
    let mut order: Vec<PackageIndex> = parent.keys().copied().collect();
    order.sort_by_key(|p| path_to(*p).len());
    for &p in &order {
        if let Some(step) = graph.empty_dependency(p) {
            let mut steps = path_to(p);
            steps.push(step);
            push(
                &mut chains,
                Chain {
                    steps,
                    end: ChainEnd::NotAvailable,
                },
            );
        }
        for with in graph.partners(p) {
            push(
                &mut chains,
                Chain {
                    steps: path_to(p),
                    end: ChainEnd::Conflict { package: p, with },
                },
            );
        }
    }
    let all_steps: Vec<Step> = graph.steps().collect();
    for step in all_steps {
        if chains.iter().any(|c| c.steps.contains(&step)) {
            continue;
        }
        let targets = graph.targets(step);
        let Some(&via) = targets.iter().find(|t| next.contains_key(t)) else {
            continue;
        };
        let mut steps = path_to(step.package);
        steps.push(step);
        push(&mut chains, finish(steps, via));
    }

    let mut explanation = Explanation {
        query: query.to_vec(),
        chains,
    };
    greedy_prune(repo, &mut explanation);
    explanation
}

/// Drop chains, last first, while the remaining ones still refute the query.
fn greedy_prune(repo: &Repository, explanation: &mut Explanation) {
    if explanation.chains.len() > PRUNE_CHAIN_LIMIT
        || explanation.mentioned_packages(repo).len() > PRUNE_PACKAGE_LIMIT
    {
        return;
    }
    let mut i = explanation.chains.len();
    while i > 0 && explanation.chains.len() > 1 {
        i -= 1;
        let mut candidate = explanation.chains.clone();
        candidate.remove(i);
        let keep = mentioned(repo, &explanation.query, &candidate);
        if still_refutes(repo, &explanation.query, &keep) {
            explanation.chains = candidate;
        }
    }
}
