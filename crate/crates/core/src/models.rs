//! Finite partial models, admissible extensions and the JSON model format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::LogicId;

/// Prefix of state identifiers invented by the engine and the oracle.
pub const FRESH_PREFIX: &str = "_g";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub id: String,
    pub label: BTreeSet<String>,
}

/// A finite labeled transition graph with a designated root.
///
/// States are kept sorted by identifier and transitions refer to them by
/// index, so two models with the same content compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialModel {
    logic: LogicId,
    atoms: Vec<String>,
    states: Vec<State>,
    transitions: BTreeSet<(usize, usize)>,
    root: usize,
}

pub struct ModelBuilder {
    logic: LogicId,
    atoms: Vec<String>,
    states: Vec<(String, Vec<String>)>,
    transitions: Vec<(String, String)>,
    root: Option<String>,
}

impl ModelBuilder {
    pub fn state<I, S>(mut self, id: impl Into<String>, label: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states
            .push((id.into(), label.into_iter().map(Into::into).collect()));
        self
    }

    pub fn transition(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.transitions.push((from.into(), to.into()));
        self
    }

    pub fn root(mut self, id: impl Into<String>) -> Self {
        self.root = Some(id.into());
        self
    }

    pub fn build(self) -> Result<PartialModel> {
        for a in &self.atoms {
            if !is_atom_name(a) {
                return Err(Error::InvalidModel(format!("bad atom name `{a}`")));
            }
        }
        let atoms: BTreeSet<String> = self.atoms.into_iter().collect();
        let mut states = Vec::with_capacity(self.states.len());
        let mut ids = BTreeSet::new();
        for (id, label) in self.states {
            if id.is_empty() {
                return Err(Error::InvalidModel("empty state identifier".into()));
            }
            if !ids.insert(id.clone()) {
                return Err(Error::DuplicateState(id));
            }
            let label: BTreeSet<String> = label.into_iter().collect();
            if let Some(a) = label.iter().find(|a| !atoms.contains(*a)) {
                return Err(Error::InvalidModel(format!(
                    "state `{id}` is labeled with undeclared atom `{a}`"
                )));
            }
            states.push(State { id, label });
        }
        if states.is_empty() {
            return Err(Error::InvalidModel(
                "a model needs at least one state".into(),
            ));
        }
        states.sort();
        let index = |id: &str| {
            states
                .binary_search_by(|s| s.id.as_str().cmp(id))
                .map_err(|_| Error::UnknownState(id.to_string()))
        };
        let mut transitions = BTreeSet::new();
        for (a, b) in &self.transitions {
            transitions.insert((index(a)?, index(b)?));
        }
        let root = match &self.root {
            Some(r) => index(r)?,
            None => return Err(Error::InvalidModel("no root state".into())),
        };
        let m = PartialModel {
            logic: self.logic,
            atoms: atoms.into_iter().collect(),
            states,
            transitions,
            root,
        };
        if m.logic == LogicId::Ltl {
            m.chain_order()?;
        }
        Ok(m)
    }
}

fn is_atom_name(a: &str) -> bool {
    let mut chars = a.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && a != "true"
        && a != "false"
}

impl PartialModel {
    pub fn builder<I, S>(logic: LogicId, atoms: I) -> ModelBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ModelBuilder {
            logic,
            atoms: atoms.into_iter().map(Into::into).collect(),
            states: Vec::new(),
            transitions: Vec::new(),
            root: None,
        }
    }

    pub fn logic(&self) -> LogicId {
        self.logic
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.id.as_str().cmp(id)).ok()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_id(&self) -> &str {
        &self.states[self.root].id
    }

    pub fn transitions(&self) -> &BTreeSet<(usize, usize)> {
        &self.transitions
    }

    pub fn has_transition(&self, a: usize, b: usize) -> bool {
        self.transitions.contains(&(a, b))
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions.range((i, 0)..(i + 1, 0)).map(|&(_, b)| b)
    }

    pub fn successor_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for &(a, b) in &self.transitions {
            out[a].push(b);
        }
        out
    }

    /// First state without a successor, in identifier order.
    pub fn first_dead_end(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.successors(i).next().is_none())
    }

    /// Complete models of CTL and LTL are serial; every K model is complete.
    pub fn is_complete(&self) -> bool {
        !self.logic.requires_seriality() || self.first_dead_end().is_none()
    }

    pub fn check_complete(&self) -> Result<()> {
        if self.logic.requires_seriality() {
            if let Some(i) = self.first_dead_end() {
                return Err(Error::NonSerial(self.states[i].id.clone()));
            }
        }
        Ok(())
    }

    /// States of an LTL chain in path order, starting at the root.
    ///
    /// The graph must be `s0 -> s1 -> ... -> sk` with at most one back edge
    /// from `sk`.
    pub fn chain_order(&self) -> Result<Vec<usize>> {
        let succ = self.successor_lists();
        if let Some(i) = succ.iter().position(|s| s.len() > 1) {
            return Err(Error::ChainShape(format!(
                "state `{}` has {} successors",
                self.states[i].id,
                succ[i].len()
            )));
        }
        let mut order = vec![self.root];
        let mut seen = vec![false; self.len()];
        seen[self.root] = true;
        let mut cur = self.root;
        while let Some(&next) = succ[cur].first() {
            if seen[next] {
                break;
            }
            seen[next] = true;
            order.push(next);
            cur = next;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::ChainShape(format!(
                "state `{}` is not on the path from the root",
                self.states[i].id
            )));
        }
        Ok(order)
    }

    /// The same model over a larger vocabulary; existing labels are unchanged.
    pub fn with_atoms<I, S>(&self, extra: I) -> PartialModel
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut atoms: BTreeSet<String> = self.atoms.iter().cloned().collect();
        atoms.extend(extra.into_iter().map(Into::into));
        PartialModel {
            atoms: atoms.into_iter().collect(),
            ..self.clone()
        }
    }

    /// Same graph, read as a model of another logic.
    pub fn with_logic(&self, logic: LogicId) -> Result<PartialModel> {
        let m = PartialModel {
            logic,
            ..self.clone()
        };
        if logic == LogicId::Ltl {
            m.chain_order()?;
        }
        Ok(m)
    }

    /// A model from already-validated parts; used by the engine and oracle.
    pub(crate) fn from_parts(
        logic: LogicId,
        atoms: Vec<String>,
        states: Vec<State>,
        transitions: Vec<(String, String)>,
        root: &str,
    ) -> Result<PartialModel> {
        let mut b = PartialModel::builder(logic, atoms).root(root);
        for s in states {
            b = b.state(s.id, s.label);
        }
        for (x, y) in transitions {
            b = b.transition(x, y);
        }
        b.build()
    }
}

/// How far an extension may depart from the partial model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtensionPolicy {
    /// New states and transitions, but no relabeling and no new transitions
    /// between two original states.
    #[default]
    #[serde(rename = "grow")]
    Grow,
    /// Original states only; transitions may be added anywhere.
    #[serde(rename = "fixed-states")]
    FixedStates,
    /// Nothing may change.
    #[serde(rename = "complete")]
    Complete,
}

impl ExtensionPolicy {
    pub fn name(self) -> &'static str {
        match self {
            ExtensionPolicy::Grow => "grow",
            ExtensionPolicy::FixedStates => "fixed-states",
            ExtensionPolicy::Complete => "complete",
        }
    }
}

impl fmt::Display for ExtensionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtensionPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "grow" => Ok(ExtensionPolicy::Grow),
            "fixed-states" | "fixed_states" => Ok(ExtensionPolicy::FixedStates),
            "complete" => Ok(ExtensionPolicy::Complete),
            other => Err(format!(
                "unknown policy `{other}` (expected grow, fixed-states or complete)"
            )),
        }
    }
}

/// A complete model together with the image of every original state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SynthesizedModel {
    pub model: PartialModel,
    pub embedding: BTreeMap<String, String>,
}

impl SynthesizedModel {
    /// `m` embedded into itself.
    pub fn identity(m: &PartialModel) -> SynthesizedModel {
        SynthesizedModel {
            model: m.clone(),
            embedding: m
                .states
                .iter()
                .map(|s| (s.id.clone(), s.id.clone()))
                .collect(),
        }
    }

    /// Index in `model` of the image of the original state `id`.
    pub fn image(&self, id: &str) -> Option<usize> {
        self.embedding.get(id).and_then(|t| self.model.index_of(t))
    }
}

/// Whether `candidate` is an admissible, complete extension of `m`.
pub fn is_admissible_extension(
    m: &PartialModel,
    candidate: &SynthesizedModel,
    policy: ExtensionPolicy,
) -> Result<bool> {
    let c = &candidate.model;
    if m.atoms != c.atoms {
        return Err(Error::VocabularyMismatch {
            left: m.atoms.clone(),
            right: c.atoms.clone(),
        });
    }
    if m.logic != c.logic {
        return Ok(false);
    }
    // Embedding: total on m, into c, injective.
    if candidate.embedding.len() != m.len()
        || m.states
            .iter()
            .any(|s| !candidate.embedding.contains_key(&s.id))
    {
        return Ok(false);
    }
    let mut image = Vec::with_capacity(m.len());
    for s in &m.states {
        match candidate.image(&s.id) {
            Some(i) => image.push(i),
            None => return Ok(false),
        }
    }
    let distinct: BTreeSet<usize> = image.iter().copied().collect();
    if distinct.len() != image.len() {
        return Ok(false);
    }
    if image[m.root] != c.root {
        return Ok(false);
    }
    for (i, s) in m.states.iter().enumerate() {
        if c.states[image[i]].label != s.label {
            return Ok(false);
        }
    }
    if m.transitions
        .iter()
        .any(|&(a, b)| !c.has_transition(image[a], image[b]))
    {
        return Ok(false);
    }
    let mut preimage = vec![None; c.len()];
    for (i, &j) in image.iter().enumerate() {
        preimage[j] = Some(i);
    }
    let ok = match policy {
        ExtensionPolicy::Grow => {
            c.transitions
                .iter()
                .all(|&(x, y)| match (preimage[x], preimage[y]) {
                    (Some(a), Some(b)) => m.has_transition(a, b),
                    _ => true,
                })
        }
        ExtensionPolicy::FixedStates => c.len() == m.len(),
        ExtensionPolicy::Complete => {
            c.len() == m.len() && c.transitions.len() == m.transitions.len()
        }
    };
    if !ok {
        return Ok(false);
    }
    Ok(match c.logic {
        LogicId::K => true,
        LogicId::Ctl => c.first_dead_end().is_none(),
        LogicId::Ltl => (0..c.len()).all(|i| c.successors(i).count() == 1),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    id: String,
    label: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    logic: LogicId,
    atoms: Vec<String>,
    states: Vec<StateDoc>,
    transitions: Vec<(String, String)>,
    root: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<BTreeMap<String, String>>,
}

fn parse_doc(document: &[u8]) -> Result<(PartialModel, Option<BTreeMap<String, String>>)> {
    let doc: ModelDoc =
        serde_json::from_slice(document).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut seen_atoms = BTreeSet::new();
    if let Some(a) = doc.atoms.iter().find(|a| !seen_atoms.insert(*a)) {
        return Err(Error::InvalidModel(format!("atom `{a}` declared twice")));
    }
    if doc.embedding.is_none() {
        if let Some(s) = doc.states.iter().find(|s| s.id.starts_with(FRESH_PREFIX)) {
            return Err(Error::InvalidModel(format!(
                "state identifier `{}` uses the reserved prefix `{FRESH_PREFIX}`",
                s.id
            )));
        }
    }
    let mut b = PartialModel::builder(doc.logic, doc.atoms).root(doc.root);
    for s in doc.states {
        b = b.state(s.id, s.label);
    }
    for (x, y) in doc.transitions {
        b = b.transition(x, y);
    }
    Ok((b.build()?, doc.embedding))
}

/// Reads a model document. An `embedding` section, if present, is ignored.
pub fn load_model(document: &[u8]) -> Result<PartialModel> {
    parse_doc(document).map(|(m, _)| m)
}

/// Reads a model document; without an `embedding` section the identity
/// embedding is assumed.
pub fn load_synthesized(document: &[u8]) -> Result<SynthesizedModel> {
    let (model, embedding) = parse_doc(document)?;
    let embedding = match embedding {
        Some(e) => {
            for (from, to) in &e {
                if model.index_of(to).is_none() {
                    return Err(Error::UnknownState(format!("{to} (image of {from})")));
                }
            }
            e
        }
        None => SynthesizedModel::identity(&model).embedding,
    };
    Ok(SynthesizedModel { model, embedding })
}

fn to_doc(m: &PartialModel, embedding: Option<&BTreeMap<String, String>>) -> ModelDoc {
    let mut transitions: Vec<(String, String)> = m
        .transitions
        .iter()
        .map(|&(a, b)| (m.states[a].id.clone(), m.states[b].id.clone()))
        .collect();
    transitions.sort();
    ModelDoc {
        logic: m.logic,
        atoms: m.atoms.clone(),
        states: m
            .states
            .iter()
            .map(|s| StateDoc {
                id: s.id.clone(),
                label: s.label.iter().cloned().collect(),
            })
            .collect(),
        transitions,
        root: m.root_id().to_string(),
        embedding: embedding.cloned(),
    }
}

fn render(doc: &ModelDoc) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("model documents always serialize");
    out.push(b'\n');
    out
}

/// Writes a synthesized model, embedding included. Output is deterministic.
pub fn save_model(m: &SynthesizedModel) -> Vec<u8> {
    render(&to_doc(&m.model, Some(&m.embedding)))
}

/// Writes a model without an embedding section.
pub fn save_partial(m: &PartialModel) -> Vec<u8> {
    render(&to_doc(m, None))
}
