use std::collections::{BTreeMap, HashMap, VecDeque};

use super::eliminate::realization;
use super::{GroupKind, Phase, Tableau};
use crate::error::{Error, Result};
use crate::models::{PartialModel, State, SynthesizedModel, FRESH_PREFIX};
use crate::syntax::{EventualityKind, LogicId};

/// Builds a complete extension of the partial model from an open tableau.
///
/// Original states keep their identifiers; every other state is a copy of a
/// surviving tableau state, named `_g0`, `_g1`, ... in creation order.
pub fn extract_model(t: &Tableau) -> Result<SynthesizedModel> {
    if t.phase != Phase::Final {
        return Err(Error::Phase(format!(
            "extraction needs a final tableau, found {:?}",
            t.phase
        )));
    }
    let config = t
        .configs
        .iter()
        .find(|c| c.alive)
        .filter(|_| !t.closed)
        .ok_or_else(|| Error::Internal("extraction from a closed tableau".into()))?;
    let m = &t.model;
    let mut out = Output {
        t,
        states: Vec::new(),
        transitions: Vec::new(),
        next_fresh: 0,
    };
    for (s, st) in m.states().iter().enumerate() {
        let label = if t.options.free_root && s == m.root() {
            t.closure.positive_atoms(&t.nodes[config.nodes[s]].label)
        } else {
            st.label.clone()
        };
        out.states.push(State {
            id: st.id.clone(),
            label,
        });
    }
    for &(a, b) in m.transitions() {
        out.transitions
            .push((m.state(a).id.clone(), m.state(b).id.clone()));
    }
    match t.logic {
        LogicId::K | LogicId::Ctl => out.branching(&config.nodes),
        LogicId::Ltl => out.linear(&config.nodes)?,
    }
    let model = PartialModel::from_parts(
        t.logic,
        m.atoms().to_vec(),
        out.states,
        out.transitions,
        m.root_id(),
    )?;
    Ok(SynthesizedModel {
        model,
        embedding: m
            .states()
            .iter()
            .map(|s| (s.id.clone(), s.id.clone()))
            .collect(),
    })
}

struct Output<'a> {
    t: &'a Tableau,
    states: Vec<State>,
    transitions: Vec<(String, String)>,
    next_fresh: usize,
}

impl Output<'_> {
    fn fresh(&mut self, node: usize) -> String {
        loop {
            let id = format!("{FRESH_PREFIX}{}", self.next_fresh);
            self.next_fresh += 1;
            if self.t.model.index_of(&id).is_none() {
                let label = self.t.closure.positive_atoms(&self.t.nodes[node].label);
                self.states.push(State {
                    id: id.clone(),
                    label,
                });
                return id;
            }
        }
    }

    fn intern(
        &mut self,
        ids: &mut BTreeMap<(usize, usize), String>,
        queue: &mut VecDeque<((usize, usize), String)>,
        key: (usize, usize),
    ) -> String {
        if let Some(id) = ids.get(&key) {
            return id.clone();
        }
        let id = self.fresh(key.0);
        ids.insert(key, id.clone());
        queue.push_back((key, id.clone()));
        id
    }

    fn members(&self, node: usize) -> Vec<Vec<usize>> {
        self.t.nodes[node]
            .groups
            .iter()
            .filter(|g| !matches!(g.kind, GroupKind::Transition(_)))
            .map(|g| self.t.alive_members(g).collect::<Vec<_>>())
            .filter(|ms| !ms.is_empty())
            .collect()
    }

    /// Unwinds the tableau into copies `(state, focus)`. The focus names the
    /// eventuality currently being driven to its goal; it stays while that
    /// eventuality is pending and moves on round-robin otherwise.
    fn branching(&mut self, config: &[usize]) {
        let t = self.t;
        let evs = t.closure.eventualities();
        let ranks = realization(t);
        let rounds = evs.len().max(1);
        let mut ids: BTreeMap<(usize, usize), String> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for (s, &node) in config.iter().enumerate() {
            for group in self.members(node) {
                let target = self.intern(&mut ids, &mut queue, (group[0], 0));
                self.transitions.push((t.model.state(s).id.clone(), target));
            }
        }
        while let Some(((u, k), source)) = queue.pop_front() {
            let groups = self.members(u);
            let advance = (k + 1) % rounds;
            let mut picks: Vec<(usize, usize)> = groups.iter().map(|g| (g[0], advance)).collect();
            if let Some(e) = evs.get(k) {
                let label = &t.nodes[u].label;
                let rank = |v: usize| {
                    if t.nodes[v].label.contains(e.formula) {
                        ranks[k][v]
                    } else {
                        None
                    }
                };
                let best = |g: &[usize]| g.iter().filter_map(|&v| rank(v).map(|r| (r, v))).min();
                if label.contains(e.formula) && !label.contains(e.goal) {
                    match e.kind {
                        EventualityKind::Universal => {
                            for (i, g) in groups.iter().enumerate() {
                                if let Some((_, v)) = best(g) {
                                    picks[i] = (v, k);
                                }
                            }
                        }
                        _ => {
                            let designated = groups
                                .iter()
                                .enumerate()
                                .filter_map(|(i, g)| best(g).map(|(r, v)| (r, i, v)))
                                .min();
                            if let Some((_, i, v)) = designated {
                                picks[i] = (v, k);
                            }
                        }
                    }
                }
            }
            for key in picks {
                let target = self.intern(&mut ids, &mut queue, key);
                self.transitions.push((source.clone(), target));
            }
        }
    }

    /// Continues the chain from its last state with a path into a bottom
    /// strongly connected component, then cycles through all of it.
    fn linear(&mut self, config: &[usize]) -> Result<()> {
        let t = self.t;
        let m = &t.model;
        let order = m.chain_order()?;
        let last = *order.last().expect("models are non-empty");
        if m.successors(last).next().is_some() {
            return Ok(());
        }
        let start = self
            .members(config[last])
            .first()
            .map(|g| g[0])
            .ok_or_else(|| Error::Internal("open LTL tableau without a continuation".into()))?;
        let succ = |v: usize| -> Vec<usize> { self.members(v).into_iter().flatten().collect() };
        let mut reach_cache: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut reach = |v: usize| -> Vec<usize> {
            reach_cache
                .entry(v)
                .or_insert_with(|| {
                    let mut seen = vec![v];
                    let mut i = 0;
                    while i < seen.len() {
                        for w in succ(seen[i]) {
                            if !seen.contains(&w) {
                                seen.push(w);
                            }
                        }
                        i += 1;
                    }
                    seen
                })
                .clone()
        };
        let candidates = reach(start);
        let mut bottom = None;
        for &w in &candidates {
            let rw = reach(w);
            if rw.iter().all(|&x| reach(x).contains(&w)) {
                bottom = Some((w, rw));
                break;
            }
        }
        let (w, mut cycle_nodes) =
            bottom.ok_or_else(|| Error::Internal("no bottom component in LTL tableau".into()))?;
        cycle_nodes.sort_unstable();

        // Shortest walk of at least one step from `from` to `to`.
        let path = |from: usize, to: usize, within: &dyn Fn(usize) -> bool| -> Vec<usize> {
            let mut parent: HashMap<usize, usize> = HashMap::new();
            let mut queue = VecDeque::from([from]);
            while !parent.contains_key(&to) {
                let x = queue.pop_front().expect("target is reachable");
                for y in succ(x) {
                    if within(y) && !parent.contains_key(&y) {
                        parent.insert(y, x);
                        queue.push_back(y);
                    }
                }
            }
            let mut p = vec![to];
            let mut cur = to;
            loop {
                cur = parent[&cur];
                p.push(cur);
                if cur == from {
                    break;
                }
            }
            p.reverse();
            p
        };

        let mut positions: Vec<usize> = Vec::new();
        if start != w {
            let p = path(start, w, &|_| true);
            positions.extend(&p[..p.len() - 1]);
        }
        let loop_start = positions.len();
        let in_cycle = |x: usize| cycle_nodes.binary_search(&x).is_ok();
        let mut walk = vec![w];
        let mut cur = w;
        for &target in &cycle_nodes {
            if walk.contains(&target) {
                continue;
            }
            let p = path(cur, target, &in_cycle);
            walk.extend(&p[1..]);
            cur = target;
        }
        let back = path(cur, w, &in_cycle);
        walk.extend(&back[1..back.len() - 1]);
        positions.extend(walk);

        let names: Vec<String> = positions.iter().map(|&v| self.fresh(v)).collect();
        self.transitions
            .push((m.state(last).id.clone(), names[0].clone()));
        for pair in names.windows(2) {
            self.transitions.push((pair[0].clone(), pair[1].clone()));
        }
        self.transitions.push((
            names.last().expect("non-empty").clone(),
            names[loop_start].clone(),
        ));
        Ok(())
    }
}
