use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{
    BuildOptions, Configuration, Group, GroupKind, NodeKind, Phase, Stats, Tableau, TableauNode,
};
use crate::models::{ExtensionPolicy, PartialModel};
use crate::syntax::{extended_closure, full_expansions, ClosureSet, Formula, Label, LogicId};

/// Phase 1: seed prestates from `m`, expand them and saturate under the
/// successor rules of `logic`.
///
/// `phi` must be in negation normal form. Atoms of `phi` missing from the
/// model's vocabulary are read as false at every original state.
pub fn build_pretableau(
    phi: &Formula,
    m: &PartialModel,
    logic: LogicId,
    options: BuildOptions,
) -> Tableau {
    let closure = extended_closure(phi);
    let mut t = Tableau {
        logic,
        model: m.clone(),
        stats: Stats {
            closure_size: closure.len(),
            eventualities: closure.eventualities().len(),
            ..Stats::default()
        },
        closure,
        options,
        nodes: Vec::new(),
        configs: Vec::new(),
        phase: Phase::Pretableau,
        closed: false,
        trace: Vec::new(),
    };
    Builder::new(&mut t, logic).run();
    t.stats.pretableau_prestates = t
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Prestate)
        .count();
    t.stats.pretableau_states = t.nodes.len() - t.stats.pretableau_prestates;
    t
}

/// Literal completion of an original state's valuation within the closure.
pub(crate) fn literals(closure: &ClosureSet, m: &PartialModel, s: usize) -> Label {
    let label = &m.state(s).label;
    closure
        .atoms()
        .iter()
        .filter_map(|a| closure.literal(a, label.contains(a)))
        .collect()
}

struct Builder<'a> {
    t: &'a mut Tableau,
    logic: LogicId,
    succ: Vec<Vec<usize>>,
    origin_prestates: BTreeMap<(usize, Label), usize>,
    origin_states: BTreeMap<(usize, Label), usize>,
    engine_prestates: BTreeMap<Label, usize>,
    engine_states: BTreeMap<Label, usize>,
    pending: VecDeque<usize>,
}

impl<'a> Builder<'a> {
    fn new(t: &'a mut Tableau, logic: LogicId) -> Self {
        let succ = t.model.successor_lists();
        Builder {
            t,
            logic,
            succ,
            origin_prestates: BTreeMap::new(),
            origin_states: BTreeMap::new(),
            engine_prestates: BTreeMap::new(),
            engine_states: BTreeMap::new(),
            pending: VecDeque::new(),
        }
    }

    fn add(&mut self, kind: NodeKind, label: Label, origin: Option<usize>) -> usize {
        let id = self.t.nodes.len();
        self.t.nodes.push(TableauNode {
            id,
            kind,
            label,
            origin,
            alive: true,
            offspring: Vec::new(),
            groups: Vec::new(),
        });
        id
    }

    fn run(&mut self) {
        let m = self.t.model.clone();
        let root_formula = self.t.closure.root();
        let mut seeds = Vec::with_capacity(m.len());
        for s in 0..m.len() {
            let mut label = if self.t.options.free_root && s == m.root() {
                self.t.closure.label()
            } else {
                literals(&self.t.closure, &m, s)
            };
            if s == m.root() {
                label.insert(root_formula);
            }
            let id = self.add(NodeKind::Prestate, label.clone(), Some(s));
            self.origin_prestates.insert((s, label), id);
            trace_line!(self.t, "SEED {}", self.t.show(id));
            seeds.push(id);
        }

        let complete = self.t.options.policy == ExtensionPolicy::Complete;
        let seed_labels: Vec<Label> = seeds
            .iter()
            .map(|&p| self.t.nodes[p].label.clone())
            .collect();
        let configs = configurations(&self.t.closure, &self.succ, seed_labels, complete);
        self.t.stats.configurations = configs.len();

        let mut new_origin_states = Vec::new();
        for config in configs {
            let mut nodes = Vec::with_capacity(config.len());
            for (s, label) in config.into_iter().enumerate() {
                let key = (s, label);
                let id = match self.origin_states.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = self.add(NodeKind::State, key.1.clone(), Some(s));
                        self.origin_states.insert(key, id);
                        self.t.nodes[seeds[s]].offspring.push(id);
                        trace_line!(self.t, "SR n{} -> {}", seeds[s], self.t.show(id));
                        new_origin_states.push(id);
                        id
                    }
                };
                nodes.push(id);
            }
            self.t.configs.push(Configuration { nodes, alive: true });
        }

        for id in new_origin_states {
            self.successor_groups(id);
        }
        // Offspring of transition prestates are the representatives of the
        // target whose label includes the prestate's.
        let transition_prestates: Vec<((usize, Label), usize)> = self
            .origin_prestates
            .iter()
            .filter(|(_, &p)| !seeds.contains(&p))
            .map(|(k, &p)| (k.clone(), p))
            .collect();
        for ((s, label), p) in transition_prestates {
            let offspring: Vec<usize> = self
                .origin_states
                .iter()
                .filter(|((o, l), _)| *o == s && label.is_subset(l))
                .map(|(_, &id)| id)
                .collect();
            for &id in &offspring {
                trace_line!(self.t, "SR n{p} -> n{id}");
            }
            self.t.nodes[p].offspring = offspring;
        }

        while let Some(p) = self.pending.pop_front() {
            let label = self.t.nodes[p].label.clone();
            for expansion in full_expansions(&label, &self.t.closure) {
                let id = match self.engine_states.get(&expansion) {
                    Some(&id) => {
                        trace_line!(self.t, "SR n{p} -> n{id}");
                        id
                    }
                    None => {
                        let id = self.add(NodeKind::State, expansion.clone(), None);
                        self.engine_states.insert(expansion, id);
                        trace_line!(self.t, "SR n{p} -> {}", self.t.show(id));
                        self.successor_groups(id);
                        id
                    }
                };
                self.t.nodes[p].offspring.push(id);
            }
        }
    }

    /// Successor prestates of a state: transitions of the partial model for
    /// origin states, plus the engine successors the logic asks for.
    fn successor_groups(&mut self, id: usize) {
        let label = self.t.nodes[id].label.clone();
        let origin = self.t.nodes[id].origin;
        let obligations = self.t.closure.universal_obligations(&label);
        let mut groups: Vec<(GroupKind, Label, Option<usize>)> = Vec::new();

        let has_model_successor = match origin {
            Some(s) => {
                for &s2 in &self.succ[s] {
                    let mut l = literals(&self.t.closure, &self.t.model, s2);
                    l.union_with(&obligations);
                    groups.push((GroupKind::Transition(s2), l, Some(s2)));
                }
                !self.succ[s].is_empty()
            }
            None => false,
        };
        let engine = origin.is_none() || self.t.options.policy != ExtensionPolicy::Complete;
        if engine {
            let demands = self.t.closure.existential_demands(&label);
            match self.logic {
                LogicId::K | LogicId::Ctl => {
                    for &f in &demands {
                        let mut l = obligations.clone();
                        l.insert(f);
                        groups.push((GroupKind::Demand(f), l, None));
                    }
                    if self.logic == LogicId::Ctl && demands.is_empty() && !has_model_successor {
                        groups.push((GroupKind::Default, obligations.clone(), None));
                    }
                }
                LogicId::Ltl => {
                    if !has_model_successor {
                        groups.push((GroupKind::Default, obligations.clone(), None));
                    }
                }
            }
        }

        for (kind, l, target) in groups {
            let p = match target {
                Some(s2) => match self.origin_prestates.get(&(s2, l.clone())) {
                    Some(&p) => p,
                    None => {
                        let p = self.add(NodeKind::Prestate, l.clone(), Some(s2));
                        self.origin_prestates.insert((s2, l), p);
                        p
                    }
                },
                None => match self.engine_prestates.get(&l) {
                    Some(&p) => p,
                    None => {
                        let p = self.add(NodeKind::Prestate, l.clone(), None);
                        self.engine_prestates.insert(l, p);
                        self.pending.push_back(p);
                        p
                    }
                },
            };
            trace_line!(self.t, "NEXT n{id} -> {}", self.t.show(p));
            self.t.nodes[id].groups.push(Group {
                kind,
                prestate: p,
                members: Vec::new(),
            });
        }
    }
}

/// Every coherent joint expansion of the seed labels.
///
/// A configuration gives each original state a clash-free, fully expanded
/// label containing its seed, such that the universal obligations of every
/// label hold at the model successors. With `complete`, each `<>`/`EX`
/// demand must additionally be witnessed by some model successor.
pub(crate) fn configurations(
    closure: &ClosureSet,
    succ: &[Vec<usize>],
    seeds: Vec<Label>,
    complete: bool,
) -> Vec<Vec<Label>> {
    let mut found: BTreeSet<Vec<Label>> = BTreeSet::new();
    let mut seen: HashSet<Vec<Label>> = HashSet::new();
    let mut stack = vec![seeds];
    while let Some(mut labels) = stack.pop() {
        // Propagate universal obligations along model transitions.
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..labels.len() {
                let obligations = closure.universal_obligations(&labels[s]);
                for &s2 in &succ[s] {
                    changed |= labels[s2].union_with(&obligations);
                }
            }
        }
        if labels.iter().any(|l| closure.has_clash(l)) || !seen.insert(labels.clone()) {
            continue;
        }
        let open = labels
            .iter()
            .enumerate()
            .find_map(|(s, l)| closure.first_unsatisfied(l).map(|i| (s, i)));
        if let Some((s, i)) = open {
            match closure.rule(i) {
                crate::syntax::Rule::Alpha(parts) => {
                    for &p in parts {
                        labels[s].insert(p);
                    }
                    stack.push(labels);
                }
                crate::syntax::Rule::Beta(branches) => {
                    for b in branches.iter().rev() {
                        let mut next = labels.clone();
                        for &p in b {
                            next[s].insert(p);
                        }
                        stack.push(next);
                    }
                }
                _ => unreachable!("only alpha/beta rules can be unsatisfied"),
            }
            continue;
        }
        if complete {
            let unwitnessed = labels.iter().enumerate().find_map(|(s, l)| {
                closure
                    .existential_demands(l)
                    .into_iter()
                    .find(|&f| !succ[s].iter().any(|&s2| labels[s2].contains(f)))
                    .map(|f| (s, f))
            });
            if let Some((s, f)) = unwitnessed {
                for &s2 in succ[s].iter().rev() {
                    let mut next = labels.clone();
                    next[s2].insert(f);
                    stack.push(next);
                }
                continue;
            }
            // Witnessing through another successor may be what realizes an
            // eventuality, so those choices stay open as well.
            for (s, l) in labels.iter().enumerate() {
                for f in closure.existential_demands(l) {
                    for &s2 in &succ[s] {
                        if !labels[s2].contains(f) {
                            let mut next = labels.clone();
                            next[s2].insert(f);
                            stack.push(next);
                        }
                    }
                }
            }
        }
        // A label forced onto an original state may postpone an eventuality
        // only because the postponing branch was already present; fulfilling
        // it on the spot is then a separate alternative.
        for (s, l) in labels.iter().enumerate() {
            for e in closure.eventualities() {
                if l.contains(e.formula) && !l.contains(e.goal) {
                    let mut next = labels.clone();
                    next[s].insert(e.goal);
                    stack.push(next);
                }
            }
        }
        found.insert(labels);
    }
    found.into_iter().collect()
}
