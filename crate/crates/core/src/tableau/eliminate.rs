use super::{GroupKind, NodeKind, Phase, Status, Tableau};
use crate::error::{Error, Result};
use crate::syntax::EventualityKind;

/// Phase 2: replace every state-to-prestate edge by edges to the prestate's
/// offspring and drop the prestates.
pub fn eliminate_prestates(mut t: Tableau) -> Result<Tableau> {
    if t.phase != Phase::Pretableau {
        return Err(Error::Phase(format!(
            "prestate elimination needs a pretableau, found {:?}",
            t.phase
        )));
    }
    for id in 0..t.nodes.len() {
        for g in 0..t.nodes[id].groups.len() {
            let p = t.nodes[id].groups[g].prestate;
            t.nodes[id].groups[g].members = t.nodes[p].offspring.clone();
        }
    }
    for id in 0..t.nodes.len() {
        if t.nodes[id].kind == NodeKind::Prestate {
            t.nodes[id].alive = false;
            let offspring: Vec<String> = t.nodes[id]
                .offspring
                .iter()
                .map(|o| format!("n{o}"))
                .collect();
            trace_line!(t, "PRUNE-PRESTATE n{id} -> [{}]", offspring.join(", "));
        }
    }
    t.phase = Phase::Initial;
    t.stats.initial_states = t.nodes.iter().filter(|n| n.alive).count();
    Ok(t)
}

/// Per eventuality, the stage at which each node was found to realize it
/// (`None`: not realized). Stage 0 means the goal is in the label.
pub(crate) fn realization(t: &Tableau) -> Vec<Vec<Option<usize>>> {
    let closure = &t.closure;
    closure
        .eventualities()
        .iter()
        .map(|e| {
            let mut rank: Vec<Option<usize>> = t
                .nodes
                .iter()
                .map(|n| {
                    (n.alive && n.label.contains(e.formula) && n.label.contains(e.goal))
                        .then_some(0)
                })
                .collect();
            let mut stage = 0;
            loop {
                stage += 1;
                let mut next = rank.clone();
                for n in t
                    .nodes
                    .iter()
                    .filter(|n| n.alive && n.label.contains(e.formula))
                {
                    if rank[n.id].is_some() {
                        continue;
                    }
                    let good = |v: usize| t.nodes[v].label.contains(e.formula) && rank[v].is_some();
                    let live: Vec<_> = n
                        .groups
                        .iter()
                        .filter(|g| t.alive_members(g).next().is_some())
                        .collect();
                    let ok = match e.kind {
                        EventualityKind::Existential | EventualityKind::Linear => {
                            live.iter().any(|g| t.alive_members(g).any(good))
                        }
                        EventualityKind::Universal => {
                            !live.is_empty() && live.iter().all(|g| t.alive_members(g).any(good))
                        }
                    };
                    if ok {
                        next[n.id] = Some(stage);
                    }
                }
                if next == rank {
                    return rank;
                }
                rank = next;
            }
        })
        .collect()
}

impl Tableau {
    /// First successor requirement of `id` that no surviving node meets.
    fn missing_successor(&self, id: usize) -> Option<String> {
        let n = &self.nodes[id];
        for g in &n.groups {
            if self.alive_members(g).next().is_some() {
                continue;
            }
            match g.kind {
                GroupKind::Transition(s) => {
                    return Some(format!(
                        "no representative of {} left",
                        self.model.state(s).id
                    ))
                }
                GroupKind::Default => return Some("no successor left".into()),
                GroupKind::Demand(f) if n.origin.is_none() => {
                    return Some(format!("no successor for {}", self.closure.formula(f)))
                }
                GroupKind::Demand(_) => {}
            }
        }
        if n.origin.is_some() {
            // A demand of an original state may also be met by a model successor.
            for f in self.closure.existential_demands(&n.label) {
                let engine = n.groups.iter().any(|g| {
                    g.kind == GroupKind::Demand(f) && self.alive_members(g).next().is_some()
                });
                let model = n.groups.iter().any(|g| {
                    matches!(g.kind, GroupKind::Transition(_))
                        && self
                            .alive_members(g)
                            .any(|v| self.nodes[v].label.contains(f))
                });
                if !engine && !model {
                    return Some(format!("no successor for {}", self.closure.formula(f)));
                }
            }
        }
        None
    }

    fn kill(&mut self, id: usize, rule: &str, reason: String) {
        self.nodes[id].alive = false;
        match rule {
            "E1" => self.stats.e1_eliminations += 1,
            _ => self.stats.e2_eliminations += 1,
        }
        trace_line!(self, "{rule} {} ({reason})", self.show(id));
    }

    /// Exact check of one configuration against the surviving tableau.
    fn configuration_holds(&self, c: usize, realized: &[Vec<Option<usize>>]) -> bool {
        let nodes = &self.configs[c].nodes;
        if nodes.iter().any(|&id| !self.nodes[id].alive) {
            return false;
        }
        let label = |s: usize| &self.nodes[nodes[s]].label;
        let m = &self.model;
        for (s, &id) in nodes.iter().enumerate() {
            for f in self.closure.existential_demands(label(s)) {
                let engine = self.nodes[id].groups.iter().any(|g| {
                    g.kind == GroupKind::Demand(f) && self.alive_members(g).next().is_some()
                });
                if !engine && !m.successors(s).any(|s2| label(s2).contains(f)) {
                    return false;
                }
            }
        }
        for (k, e) in self.closure.eventualities().iter().enumerate() {
            let mut done: Vec<bool> = (0..nodes.len())
                .map(|s| label(s).contains(e.formula) && label(s).contains(e.goal))
                .collect();
            loop {
                let mut changed = false;
                for s in 0..nodes.len() {
                    if done[s] || !label(s).contains(e.formula) {
                        continue;
                    }
                    let good_model = |s2: usize| label(s2).contains(e.formula) && done[s2];
                    let engine_groups = self.nodes[nodes[s]].groups.iter().filter(|g| {
                        !matches!(g.kind, GroupKind::Transition(_))
                            && self.alive_members(g).next().is_some()
                    });
                    let good_engine = |v: usize| {
                        self.nodes[v].label.contains(e.formula) && realized[k][v].is_some()
                    };
                    let ok = match e.kind {
                        EventualityKind::Existential | EventualityKind::Linear => {
                            m.successors(s).any(good_model)
                                || engine_groups
                                    .clone()
                                    .any(|g| self.alive_members(g).any(good_engine))
                        }
                        EventualityKind::Universal => {
                            let has_successor = m.successors(s).next().is_some()
                                || engine_groups.clone().next().is_some();
                            has_successor
                                && m.successors(s).all(good_model)
                                && engine_groups
                                    .clone()
                                    .all(|g| self.alive_members(g).any(good_engine))
                        }
                    };
                    if ok {
                        done[s] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            if (0..nodes.len()).any(|s| label(s).contains(e.formula) && !done[s]) {
                return false;
            }
        }
        true
    }
}

/// Phase 3: remove states until nothing changes, or an original state loses
/// its last representative.
pub fn eliminate_states(mut t: Tableau) -> Result<Tableau> {
    if t.phase != Phase::Initial {
        return Err(Error::Phase(format!(
            "state elimination needs an initial tableau, found {:?}",
            t.phase
        )));
    }
    loop {
        t.stats.rounds += 1;
        let mut changed = false;
        for id in 0..t.nodes.len() {
            if t.nodes[id].alive {
                if let Some(reason) = t.missing_successor(id) {
                    t.kill(id, "E1", reason);
                    changed = true;
                }
            }
        }
        let realized = realization(&t);
        let unrealized: Vec<(usize, String)> = t
            .nodes
            .iter()
            .filter(|n| n.alive)
            .filter_map(|n| {
                let (_, e) = t
                    .closure
                    .eventualities()
                    .iter()
                    .enumerate()
                    .find(|(k, e)| n.label.contains(e.formula) && realized[*k][n.id].is_none())?;
                Some((n.id, format!("{} unrealized", t.closure.formula(e.formula))))
            })
            .collect();
        for (id, reason) in unrealized {
            t.kill(id, "E2", reason);
            changed = true;
        }
        let realized = realization(&t);
        for c in 0..t.configs.len() {
            if t.configs[c].alive && !t.configuration_holds(c, &realized) {
                t.configs[c].alive = false;
                changed = true;
            }
        }
        let mut supported = vec![false; t.nodes.len()];
        for c in t.configs.iter().filter(|c| c.alive) {
            for &id in &c.nodes {
                supported[id] = true;
            }
        }
        for (id, supported) in supported.into_iter().enumerate() {
            if t.nodes[id].alive && t.nodes[id].origin.is_some() && !supported {
                t.kill(id, "E1", "no coherent configuration".into());
                changed = true;
            }
        }
        let index = t.origin_index();
        if let Some((s, _)) = index.iter().find(|(_, ids)| ids.is_empty()) {
            let s = s.clone();
            t.closed = true;
            trace_line!(t, "CLOSED-ORIGIN {s}");
            break;
        }
        if !changed {
            break;
        }
    }
    t.phase = Phase::Final;
    t.stats.final_states = t.nodes.iter().filter(|n| n.alive).count();
    t.stats.live_configurations = t.configs.iter().filter(|c| c.alive).count();
    Ok(t)
}

/// Open iff no original state lost all representatives and a surviving
/// configuration puts the formula at the root.
pub fn decide(t: &Tableau) -> Result<Status> {
    if t.phase != Phase::Final {
        return Err(Error::Phase(format!(
            "decide needs a final tableau, found {:?}",
            t.phase
        )));
    }
    let open = !t.closed && !t.root_candidates().is_empty() && t.configs.iter().any(|c| c.alive);
    Ok(if open { Status::Open } else { Status::Closed })
}
