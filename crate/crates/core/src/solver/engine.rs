//! CDCL search with two watched literals, first-UIP learning, VSIDS-style
//! activities, phase saving and Luby restarts.
//!
//! Queries are passed as assumptions, decided before anything else, so
//! every learned clause follows from the base clauses alone and stays
//! valid for later queries.
//!
//! Only variables that can matter are decided: those reachable from the
//! query, from a true variable, or from an all-positive clause, by going
//! from a clause's negative literals to its positive ones. Everything else
//! is false in the model, which satisfies every clause that has a
//! negative literal outside that set. Each learned clause records the clauses it was
//! resolved from; an unsatisfiable query can therefore be traced back to a
//! set of base clauses that refutes it.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::mem;

use super::encode::{ClauseSet, Lit};
use crate::expander::PackageIndex;

const NO_REASON: u32 = u32::MAX;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const RESTART_BASE: u64 = 100;
const ACTIVITY_DECAY: f64 = 0.95;

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

/// How a learned clause was obtained: the clauses resolved on, plus the
/// root-level facts whose literals were dropped from it.
#[derive(Debug, Default)]
struct Derivation {
    clauses: Vec<u32>,
    root_vars: Vec<u32>,
}

struct StoredClause {
    lits: Vec<Lit>,
    derivation: Option<Derivation>,
}

pub(crate) enum Outcome {
    /// Installed packages of a full model.
    Sat(Vec<PackageIndex>),
    /// Base clause indices that, with the assumptions, are unsatisfiable.
    Unsat(Vec<usize>),
}

pub(crate) struct Engine {
    clauses: Vec<StoredClause>,
    num_original: usize,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    root_conflict: Option<Vec<usize>>,
    restarts: u32,
    /// Positive variables of the clauses in which `v` occurs negatively,
    /// as ranges into `successor_list`.
    successor_start: Vec<u32>,
    successor_list: Vec<u32>,
    /// Variables of all-positive clauses.
    always: Vec<u32>,
    relevant: Vec<bool>,
    relevant_list: Vec<u32>,
}

#[inline]
fn value(assigns: &[i8], l: Lit) -> i8 {
    let v = assigns[l.var()];
    if l.is_positive() {
        v
    } else {
        -v
    }
}

impl Engine {
    /// `prefer_installed` sets the initial phase of every variable.
    pub(crate) fn new(set: &ClauseSet, prefer_installed: bool) -> Self {
        let n = set.num_vars();
        let mut engine = Engine {
            clauses: Vec::with_capacity(set.clauses().len()),
            num_original: set.clauses().len(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![prefer_installed; n],
            seen: vec![false; n],
            root_conflict: None,
            restarts: 0,
            successor_start: Vec::new(),
            successor_list: Vec::new(),
            always: Vec::new(),
            relevant: vec![false; n],
            relevant_list: Vec::new(),
        };
        engine.index_successors(set);
        for (i, c) in set.clauses().iter().enumerate() {
            engine.clauses.push(StoredClause {
                lits: c.lits.clone(),
                derivation: None,
            });
            match c.lits.len() {
                0 => {
                    if engine.root_conflict.is_none() {
                        engine.root_conflict = Some(vec![i]);
                    }
                }
                1 => {
                    let l = c.lits[0];
                    match value(&engine.assigns, l) {
                        UNDEF => engine.enqueue(l, i as u32),
                        FALSE if engine.root_conflict.is_none() => {
                            let core = engine.root_core(i as u32);
                            engine.root_conflict = Some(core);
                        }
                        _ => {}
                    }
                }
                _ => engine.attach(i as u32),
            }
        }
        engine
    }

    fn index_successors(&mut self, set: &ClauseSet) {
        let n = set.num_vars();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for c in set.clauses() {
            let negatives = c.lits.iter().filter(|l| !l.is_positive());
            let mut any_negative = false;
            for neg in negatives {
                any_negative = true;
                for pos in c.lits.iter().filter(|l| l.is_positive()) {
                    pairs.push((neg.var() as u32, pos.var() as u32));
                }
            }
            if !any_negative {
                self.always.extend(c.lits.iter().map(|l| l.var() as u32));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        self.successor_start = vec![0; n + 1];
        for &(from, _) in &pairs {
            self.successor_start[from as usize + 1] += 1;
        }
        for v in 0..n {
            self.successor_start[v + 1] += self.successor_start[v];
        }
        self.successor_list = pairs.into_iter().map(|(_, to)| to).collect();
    }

    /// Make `v` and everything reachable from it decidable.
    fn make_relevant(&mut self, v: usize) {
        if self.relevant[v] {
            return;
        }
        self.relevant[v] = true;
        let mut stack = vec![v as u32];
        while let Some(x) = stack.pop() {
            let x = x as usize;
            self.relevant_list.push(x as u32);
            if self.assigns[x] == UNDEF {
                self.heap.insert(x as u32, &self.activity);
            }
            let (lo, hi) = (self.successor_start[x] as usize, self.successor_start[x + 1] as usize);
            for k in lo..hi {
                let y = self.successor_list[k] as usize;
                if !self.relevant[y] {
                    self.relevant[y] = true;
                    stack.push(y as u32);
                }
            }
        }
    }

    /// Start a query: forget the previous relevant set and seed a new one.
    fn reset_relevant(&mut self, assumptions: &[Lit]) {
        for &v in &self.relevant_list {
            self.relevant[v as usize] = false;
        }
        self.relevant_list.clear();
        self.heap.clear();
        for k in 0..self.always.len() {
            self.make_relevant(self.always[k] as usize);
        }
        for a in assumptions {
            self.make_relevant(a.var());
        }
        for k in 0..self.trail.len() {
            let l = self.trail[k];
            if l.is_positive() {
                self.make_relevant(l.var());
            }
        }
    }

    fn attach(&mut self, cref: u32) {
        let lits = &self.clauses[cref as usize].lits;
        let (a, b) = (lits[0], lits[1]);
        self.watches[(!a).code()].push(Watcher {
            clause: cref,
            blocker: b,
        });
        self.watches[(!b).code()].push(Watcher {
            clause: cref,
            blocker: a,
        });
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
        if l.is_positive() && !self.relevant[v] {
            self.make_relevant(v);
        }
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let stop = self.trail_lim[level];
        for i in (stop..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = l.is_positive();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            if self.relevant[v] {
                self.heap.insert(v as u32, &self.activity);
            }
        }
        self.trail.truncate(stop);
        self.trail_lim.truncate(level);
        self.qhead = stop;
    }

    /// Unit propagation. Returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if value(&self.assigns, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.clause;
                let lits = &mut self.clauses[cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && value(&self.assigns, first) == TRUE {
                    ws[j] = Watcher {
                        clause: cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if value(&self.assigns, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let watch_on = !lits[1];
                        self.watches[watch_on.code()].push(Watcher {
                            clause: cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    clause: cref,
                    blocker: first,
                };
                j += 1;
                if value(&self.assigns, first) == FALSE {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learned clause (asserting
    /// literal first, highest remaining level second), the backjump level
    /// and the derivation.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize, Derivation) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit::installed(PackageIndex(0))];
        let mut derivation = Derivation::default();
        let mut root_marked = Vec::new();
        let mut path = 0usize;
        let mut index = self.trail.len();
        let mut skip_first = false;
        let uip = loop {
            derivation.clauses.push(confl);
            let len = self.clauses[confl as usize].lits.len();
            for k in usize::from(skip_first)..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if self.seen[v] {
                    continue;
                }
                self.seen[v] = true;
                if self.level[v] == 0 {
                    derivation.root_vars.push(v as u32);
                    root_marked.push(v);
                    continue;
                }
                self.bump(v);
                if self.level[v] == current {
                    path += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var()] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            confl = self.reason[p.var()];
            skip_first = true;
        };
        learnt[0] = !uip;
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        for v in root_marked {
            self.seen[v] = false;
        }
        let mut backjump = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[best].var()] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            backjump = self.level[learnt[1].var()] as usize;
        }
        (learnt, backjump, derivation)
    }

    /// Why assumption `p` cannot hold: the reasons of everything that
    /// forced `¬p`, traced back to base clauses.
    fn analyze_final(&mut self, p: Lit) -> Vec<usize> {
        let mut derivation = Derivation::default();
        let v = p.var();
        if self.level[v] == 0 {
            derivation.root_vars.push(v as u32);
            return self.extract_core(derivation);
        }
        self.seen[v] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i].var();
            if !self.seen[x] {
                continue;
            }
            let r = self.reason[x];
            if r != NO_REASON {
                derivation.clauses.push(r);
                let len = self.clauses[r as usize].lits.len();
                for k in 1..len {
                    let y = self.clauses[r as usize].lits[k].var();
                    if self.level[y] > 0 {
                        self.seen[y] = true;
                    } else {
                        derivation.root_vars.push(y as u32);
                    }
                }
            }
            self.seen[x] = false;
        }
        self.extract_core(derivation)
    }

    fn root_core(&mut self, confl: u32) -> Vec<usize> {
        let derivation = Derivation {
            clauses: vec![confl],
            root_vars: self.clauses[confl as usize]
                .lits
                .iter()
                .map(|l| l.var() as u32)
                .collect(),
        };
        self.extract_core(derivation)
    }

    /// Expand a derivation into base clauses. Learned clauses are replaced
    /// by their derivations; root-level facts by the clauses that implied
    /// them, recursively.
    fn extract_core(&self, start: Derivation) -> Vec<usize> {
        enum Item {
            Clause(u32),
            Root(u32),
        }
        let mut stack: Vec<Item> = start
            .clauses
            .into_iter()
            .map(Item::Clause)
            .chain(start.root_vars.into_iter().map(Item::Root))
            .collect();
        let mut clauses_done = BTreeSet::new();
        let mut vars_done = BTreeSet::new();
        let mut core = Vec::new();
        while let Some(item) = stack.pop() {
            match item {
                Item::Clause(c) => {
                    if !clauses_done.insert(c) {
                        continue;
                    }
                    let stored = &self.clauses[c as usize];
                    match &stored.derivation {
                        None => core.push(c as usize),
                        Some(d) => {
                            stack.extend(d.clauses.iter().map(|&x| Item::Clause(x)));
                            stack.extend(d.root_vars.iter().map(|&x| Item::Root(x)));
                        }
                    }
                }
                Item::Root(v) => {
                    if !vars_done.insert(v) {
                        continue;
                    }
                    let r = self.reason[v as usize];
                    debug_assert_ne!(r, NO_REASON, "root-level facts are implied");
                    if r == NO_REASON {
                        continue;
                    }
                    stack.push(Item::Clause(r));
                    for l in &self.clauses[r as usize].lits[1..] {
                        stack.push(Item::Root(l.var() as u32));
                    }
                }
            }
        }
        core.sort_unstable();
        debug_assert!(core.iter().all(|&c| c < self.num_original));
        core
    }

    fn learn(&mut self, lits: Vec<Lit>, derivation: Derivation) {
        let cref = self.clauses.len() as u32;
        let asserting = lits[0];
        let long = lits.len() > 1;
        self.clauses.push(StoredClause {
            lits,
            derivation: Some(derivation),
        });
        if long {
            self.attach(cref);
        }
        self.enqueue(asserting, cref);
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            let v = v as usize;
            if self.assigns[v] == UNDEF {
                let p = PackageIndex(v as u32);
                return Some(if self.phase[v] {
                    Lit::installed(p)
                } else {
                    Lit::not_installed(p)
                });
            }
        }
        None
    }

    /// Search for a model in which every assumption holds.
    pub(crate) fn solve(&mut self, assumptions: &[Lit]) -> Outcome {
        self.cancel_until(0);
        if let Some(core) = &self.root_conflict {
            return Outcome::Unsat(core.clone());
        }
        self.reset_relevant(assumptions);
        let mut conflicts = 0u64;
        let mut limit = luby(self.restarts) * RESTART_BASE;
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    let core = self.root_core(confl);
                    self.root_conflict = Some(core.clone());
                    return Outcome::Unsat(core);
                }
                conflicts += 1;
                let (learnt, backjump, derivation) = self.analyze(confl);
                self.cancel_until(backjump);
                self.learn(learnt, derivation);
                self.var_inc /= ACTIVITY_DECAY;
                continue;
            }
            if conflicts >= limit {
                self.restarts += 1;
                conflicts = 0;
                limit = luby(self.restarts) * RESTART_BASE;
                self.cancel_until(0);
                continue;
            }
            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let a = assumptions[self.decision_level()];
                match value(&self.assigns, a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => return Outcome::Unsat(self.analyze_final(a)),
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next.or_else(|| self.pick_branch()) {
                Some(l) => l,
                None => {
                    let mut model: Vec<PackageIndex> = self
                        .relevant_list
                        .iter()
                        .filter(|&&v| self.assigns[v as usize] == TRUE)
                        .map(|&v| PackageIndex(v))
                        .collect();
                    model.sort_unstable();
                    return Outcome::Sat(model);
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }
}

fn luby(index: u32) -> u64 {
    let x = u64::from(index);
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = x;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Max-heap of variables by activity; ties go to the smaller index so that
/// decisions follow package order.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![NOT_IN_HEAP; n],
        }
    }

    fn before(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn clear(&mut self) {
        for &v in &self.heap {
            self.pos[v as usize] = NOT_IN_HEAP;
        }
        self.heap.clear();
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos[v as usize] != NOT_IN_HEAP {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        let p = self.pos[v as usize];
        if p != NOT_IN_HEAP {
            self.up(p, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && Self::before(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !Self::before(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn heap_orders_by_activity_then_index() {
        let act = vec![0.0, 2.0, 2.0, 1.0];
        let mut h = VarHeap::new(4);
        for v in [3, 0, 2, 1] {
            h.insert(v, &act);
        }
        let order: Vec<u32> = core::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, [1, 2, 3, 0]);
    }
}
