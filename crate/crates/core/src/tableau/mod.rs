//! The three-phase tableau seeded from a partial model.
//!
//! Phase 1 builds the pretableau: one seed prestate per original state,
//! expanded into origin states, and engine prestates for the successors the
//! formula demands. Phase 2 removes prestates, phase 3 removes states whose
//! successor groups or eventualities fail while keeping at least one
//! representative of every original state.
//!
//! Origin states are expanded jointly: a *configuration* picks one fully
//! expanded label per original state such that every universal obligation
//! of a state holds at its successors in the partial model. An original
//! state has a single truth set in any extension, so the configuration is the
//! unit that survives or dies.

macro_rules! trace_line {
    ($t:expr, $($arg:tt)*) => {
        if $t.options.trace {
            let line = format!($($arg)*);
            $t.trace.push(line);
        }
    };
}

mod build;
mod eliminate;
mod extract;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::models::{ExtensionPolicy, PartialModel};
use crate::syntax::{ClosureSet, Label, LogicId};

pub use build::build_pretableau;
pub use eliminate::{decide, eliminate_prestates, eliminate_states};
pub use extract::extract_model;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Prestate,
    State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Pretableau,
    Initial,
    Final,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Open,
    Closed,
}

/// Why a state has a successor group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKind {
    /// A witness for `<>f` / `EX f` (closure index of `f`).
    Demand(usize),
    /// The single LTL successor, or the CTL successor of a state with no `EX`.
    Default,
    /// The partial model's transition to this original state.
    Transition(usize),
}

#[derive(Clone, Debug)]
pub struct Group {
    pub kind: GroupKind,
    pub prestate: usize,
    /// Offspring of the prestate; filled in when prestates are removed.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TableauNode {
    pub id: usize,
    pub kind: NodeKind,
    pub label: Label,
    /// Index of the original state this node represents.
    pub origin: Option<usize>,
    pub alive: bool,
    pub offspring: Vec<usize>,
    pub groups: Vec<Group>,
}

/// One label per original state, as node ids indexed by original state.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub nodes: Vec<usize>,
    pub alive: bool,
}

/// Options that shape the construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub policy: ExtensionPolicy,
    /// The root's valuation is not pinned (satisfiability mode).
    pub free_root: bool,
    pub trace: bool,
}

/// Node and rule counters, reported with every verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub closure_size: usize,
    pub eventualities: usize,
    pub configurations: usize,
    pub pretableau_prestates: usize,
    pub pretableau_states: usize,
    pub initial_states: usize,
    pub final_states: usize,
    pub live_configurations: usize,
    pub e1_eliminations: usize,
    pub e2_eliminations: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct Tableau {
    pub(crate) logic: LogicId,
    pub(crate) model: PartialModel,
    pub(crate) closure: ClosureSet,
    pub(crate) options: BuildOptions,
    pub(crate) nodes: Vec<TableauNode>,
    pub(crate) configs: Vec<Configuration>,
    pub(crate) phase: Phase,
    pub(crate) closed: bool,
    pub(crate) trace: Vec<String>,
    pub(crate) stats: Stats,
}

impl Tableau {
    pub fn logic(&self) -> LogicId {
        self.logic
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn closure(&self) -> &ClosureSet {
        &self.closure
    }

    pub fn nodes(&self) -> &[TableauNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TableauNode {
        &self.nodes[id]
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn model(&self) -> &PartialModel {
        &self.model
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    /// Surviving nodes per original state identifier.
    pub fn origin_index(&self) -> BTreeMap<String, Vec<usize>> {
        let mut out: BTreeMap<String, Vec<usize>> = self
            .model
            .states()
            .iter()
            .map(|s| (s.id.clone(), Vec::new()))
            .collect();
        for n in self.nodes.iter().filter(|n| n.alive) {
            if let Some(t) = n.origin {
                out.get_mut(&self.model.state(t).id)
                    .expect("origins index the model")
                    .push(n.id);
            }
        }
        out
    }

    /// Surviving states representing the root with the formula in the label.
    pub fn root_candidates(&self) -> Vec<usize> {
        let root = self.model.root();
        let phi = self.closure.root();
        self.nodes
            .iter()
            .filter(|n| {
                n.alive
                    && n.kind == NodeKind::State
                    && n.origin == Some(root)
                    && n.label.contains(phi)
            })
            .map(|n| n.id)
            .collect()
    }

    pub(crate) fn show(&self, id: usize) -> String {
        let n = &self.nodes[id];
        let origin = match n.origin {
            Some(t) => format!(" origin={}", self.model.state(t).id),
            None => String::new(),
        };
        format!("n{id}{origin} {}", self.closure.display_label(&n.label))
    }

    pub(crate) fn alive_members<'a>(&'a self, g: &'a Group) -> impl Iterator<Item = usize> + 'a {
        g.members.iter().copied().filter(|&v| self.nodes[v].alive)
    }
}
