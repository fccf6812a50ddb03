//! Bounded brute force over admissible extensions, used as ground truth.
//!
//! [`enumerate_extensions`] streams every extension with at most
//! `max_new_states` fresh states, one per isomorphism class of the fresh
//! part. [`oracle_epm`] answers the same question as scanning that stream,
//! but for K and CTL it searches edge sets with three-valued pruning: a
//! partial edge assignment is abandoned as soon as the formula is false at
//! the root in every completion of it.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::checker::holds_at_root;
use crate::error::{Error, Result};
use crate::models::{
    is_admissible_extension, ExtensionPolicy, PartialModel, State, SynthesizedModel, FRESH_PREFIX,
};
use crate::syntax::{negation_nnf, to_nnf, Formula, LogicId};

pub const MAX_NEW_STATES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_new_states: usize,
}

impl EnumerationBudget {
    pub fn new(max_new_states: usize) -> Result<EnumerationBudget> {
        if max_new_states > MAX_NEW_STATES {
            return Err(Error::Budget(max_new_states));
        }
        Ok(EnumerationBudget { max_new_states })
    }

    pub fn max_new_states(self) -> usize {
        self.max_new_states
    }
}

/// An oracle answer. `bounded` marks answers that only hold up to the budget
/// (EPM "no" and MCPM "yes").
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub value: bool,
    pub bounded: bool,
    #[serde(skip)]
    pub witness: Option<SynthesizedModel>,
}

/// `k` identifiers `_g0, _g1, ...` that do not clash with `m`.
pub fn fresh_ids(m: &PartialModel, k: usize) -> Vec<String> {
    (0..)
        .map(|n| format!("{FRESH_PREFIX}{n}"))
        .filter(|id| m.index_of(id).is_none())
        .take(k)
        .collect()
}

fn check_policy(policy: ExtensionPolicy) -> Result<()> {
    if policy == ExtensionPolicy::Complete {
        return Err(Error::Policy {
            policy,
            operation: "the oracle",
        });
    }
    Ok(())
}

/// Shape of the fresh part shared by the stream and the pruned search.
struct Frame {
    m: PartialModel,
    ids: Vec<String>,
    /// Original states first (model order), then fresh states.
    labels: Vec<BTreeSet<String>>,
    fixed: Vec<(usize, usize)>,
    candidates: Vec<(usize, usize)>,
}

impl Frame {
    fn new(m: &PartialModel, policy: ExtensionPolicy, valuations: &[BTreeSet<String>]) -> Frame {
        let n = m.len();
        let k = valuations.len();
        let mut ids: Vec<String> = m.states().iter().map(|s| s.id.clone()).collect();
        ids.extend(fresh_ids(m, k));
        let mut labels: Vec<BTreeSet<String>> =
            m.states().iter().map(|s| s.label.clone()).collect();
        labels.extend(valuations.iter().cloned());
        let fixed: Vec<(usize, usize)> = m.transitions().iter().copied().collect();
        let mut candidates = Vec::new();
        for a in 0..n + k {
            for b in 0..n + k {
                let permitted = match policy {
                    ExtensionPolicy::Grow => a >= n || b >= n,
                    ExtensionPolicy::FixedStates => a < n && b < n && !m.has_transition(a, b),
                    ExtensionPolicy::Complete => false,
                };
                if permitted {
                    candidates.push((a, b));
                }
            }
        }
        Frame {
            m: m.clone(),
            ids,
            labels,
            fixed,
            candidates,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn model(&self, chosen: impl Iterator<Item = (usize, usize)>) -> SynthesizedModel {
        let states = self
            .ids
            .iter()
            .zip(&self.labels)
            .map(|(id, label)| State {
                id: id.clone(),
                label: label.clone(),
            })
            .collect();
        let transitions = self
            .fixed
            .iter()
            .copied()
            .chain(chosen)
            .map(|(a, b)| (self.ids[a].clone(), self.ids[b].clone()))
            .collect();
        let model = PartialModel::from_parts(
            self.m.logic(),
            self.m.atoms().to_vec(),
            states,
            transitions,
            self.m.root_id(),
        )
        .expect("enumerated extensions are well formed");
        SynthesizedModel {
            model,
            embedding: self
                .m
                .states()
                .iter()
                .map(|s| (s.id.clone(), s.id.clone()))
                .collect(),
        }
    }
}

/// Every subset of the vocabulary, in a fixed order.
fn valuations(atoms: &[String]) -> Vec<BTreeSet<String>> {
    (0..1usize << atoms.len())
        .map(|bits| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

/// Non-decreasing sequences of length `k` over `0..v`.
fn multisets(v: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(v, k - 1) {
        let lo = rest.last().copied().unwrap_or(0);
        for x in lo..v {
            let mut seq = rest.clone();
            seq.push(x);
            out.push(seq);
        }
    }
    out
}

/// All sequences of length `k` over `0..v`.
fn sequences(v: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|s| {
                (0..v).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

/// Permutations of fresh positions that keep the valuation sequence.
fn symmetries(vals: &[usize]) -> Vec<Vec<usize>> {
    let k = vals.len();
    let mut all: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &all {
            for x in 0..k {
                if !p.contains(&x) && vals[x] == vals[p.len()] {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
        }
        all = next;
    }
    all
}

/// Pull-based stream of extensions; see [`enumerate_extensions`].
pub struct Extensions {
    blocks: Vec<(Frame, Vec<Vec<usize>>)>,
    block: usize,
    mask: u64,
    ltl: Vec<SynthesizedModel>,
    serial: bool,
}

impl Iterator for Extensions {
    type Item = SynthesizedModel;

    fn next(&mut self) -> Option<SynthesizedModel> {
        if !self.ltl.is_empty() {
            return Some(self.ltl.remove(0));
        }
        while self.block < self.blocks.len() {
            let (frame, perms) = &self.blocks[self.block];
            let c = frame.candidates.len();
            if self.mask >= 1u64 << c {
                self.block += 1;
                self.mask = 0;
                continue;
            }
            let mask = self.mask;
            self.mask += 1;
            if self.serial {
                let mut out = vec![false; frame.len()];
                for &(a, _) in &frame.fixed {
                    out[a] = true;
                }
                for (i, &(a, _)) in frame.candidates.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        out[a] = true;
                    }
                }
                if out.contains(&false) {
                    continue;
                }
            }
            if !is_canonical(frame, perms, mask) {
                continue;
            }
            let chosen = frame
                .candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e);
            return Some(frame.model(chosen));
        }
        None
    }
}

/// A mask is kept iff no symmetry of the fresh states maps it to a smaller one.
fn is_canonical(frame: &Frame, perms: &[Vec<usize>], mask: u64) -> bool {
    let n = frame.m.len();
    let index: std::collections::HashMap<(usize, usize), usize> = frame
        .candidates
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let map = |p: &[usize], x: usize| if x < n { x } else { n + p[x - n] };
    perms.iter().all(|p| {
        let mut image = 0u64;
        for (i, &(a, b)) in frame.candidates.iter().enumerate() {
            if mask & (1 << i) != 0 {
                image |= 1 << index[&(map(p, a), map(p, b))];
            }
        }
        image >= mask
    })
}

/// Every complete extension of `m` under `policy` with at most
/// `budget.max_new_states()` fresh states, one per isomorphism class of the
/// fresh states, in a fixed order. LTL extensions are lassos that continue
/// the chain of `m`.
pub fn enumerate_extensions(
    m: &PartialModel,
    policy: ExtensionPolicy,
    budget: EnumerationBudget,
    logic: LogicId,
) -> Result<Extensions> {
    check_policy(policy)?;
    let m = m.with_logic(logic)?;
    let vals = valuations(m.atoms());
    if logic == LogicId::Ltl {
        return Ok(Extensions {
            blocks: Vec::new(),
            block: 0,
            mask: 0,
            ltl: lassos(&m, policy, budget, &vals),
            serial: true,
        });
    }
    let max_new = if policy == ExtensionPolicy::FixedStates {
        0
    } else {
        budget.max_new_states
    };
    let mut blocks = Vec::new();
    for k in 0..=max_new {
        for seq in multisets(vals.len(), k) {
            let chosen: Vec<BTreeSet<String>> = seq.iter().map(|&i| vals[i].clone()).collect();
            let frame = Frame::new(&m, policy, &chosen);
            assert!(
                frame.candidates.len() < 64,
                "edge set too large to enumerate"
            );
            blocks.push((frame, symmetries(&seq)));
        }
    }
    Ok(Extensions {
        blocks,
        block: 0,
        mask: 0,
        ltl: Vec::new(),
        serial: logic.requires_seriality(),
    })
}

fn lassos(
    m: &PartialModel,
    policy: ExtensionPolicy,
    budget: EnumerationBudget,
    vals: &[BTreeSet<String>],
) -> Vec<SynthesizedModel> {
    let order = m.chain_order().expect("LTL models are chains");
    let last = *order.last().expect("models are non-empty");
    if m.successors(last).next().is_some() {
        return vec![SynthesizedModel::identity(m)];
    }
    let max_new = if policy == ExtensionPolicy::FixedStates {
        0
    } else {
        budget.max_new_states
    };
    let mut out = Vec::new();
    for j in 0..=max_new {
        if j == 0 && policy == ExtensionPolicy::Grow {
            continue;
        }
        let ids = fresh_ids(m, j);
        for seq in sequences(vals.len(), j) {
            let mut path: Vec<String> = order.iter().map(|&i| m.state(i).id.clone()).collect();
            path.extend(ids.iter().cloned());
            for back in 0..path.len() {
                let mut states: Vec<State> = m.states().to_vec();
                for (id, &v) in ids.iter().zip(&seq) {
                    states.push(State {
                        id: id.clone(),
                        label: vals[v].clone(),
                    });
                }
                let mut transitions: Vec<(String, String)> = path
                    .windows(2)
                    .map(|w| (w[0].clone(), w[1].clone()))
                    .collect();
                transitions.push((path.last().expect("non-empty").clone(), path[back].clone()));
                let model = PartialModel::from_parts(
                    m.logic(),
                    m.atoms().to_vec(),
                    states,
                    transitions,
                    m.root_id(),
                )
                .expect("lassos are chains");
                out.push(SynthesizedModel {
                    model,
                    embedding: SynthesizedModel::identity(m).embedding,
                });
            }
        }
    }
    out
}

/// Three-valued evaluation over a partial edge assignment. `yes[i]` are the
/// edges present in every completion, `may[i]` those present in some.
struct ThreeValued<'a> {
    labels: &'a [BTreeSet<String>],
    yes: Vec<u32>,
    may: Vec<u32>,
    serial: bool,
}

impl ThreeValued<'_> {
    fn all(&self) -> u32 {
        (1u32 << self.labels.len()) - 1
    }

    fn some(&self, edges: &[u32], z: u32) -> u32 {
        edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| e & z != 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    fn every(&self, edges: &[u32], z: u32) -> u32 {
        edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| e & !z == 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Every completion is serial, so a successor exists among the `may`
    /// edges: if all of them lead into `z`, some successor is in `z`.
    fn forced(&self, z: u32) -> u32 {
        if self.serial {
            self.every(&self.may, z) & self.some(&self.may, self.all())
        } else {
            0
        }
    }

    /// Dually, under seriality a universal step cannot hold vacuously.
    fn possible(&self, z: u32) -> u32 {
        if self.serial {
            self.some(&self.may, z)
        } else {
            self.all()
        }
    }

    /// States where `f` holds in every completion (`upper = false`) or in
    /// some completion (`upper = true`). `f` is in NNF.
    fn eval(&self, f: &Formula, upper: bool) -> u32 {
        use Formula::*;
        let (ex_edges, ax_edges) = if upper {
            (&self.may, &self.yes)
        } else {
            (&self.yes, &self.may)
        };
        let ex = |z: u32| {
            let e = self.some(ex_edges, z);
            if upper {
                e
            } else {
                e | self.forced(z)
            }
        };
        let ax = |z: u32| {
            let a = self.every(ax_edges, z);
            if upper {
                a & self.possible(z)
            } else {
                a
            }
        };
        let lfp = |step: &dyn Fn(u32) -> u32| {
            let mut z = 0;
            loop {
                let next = step(z);
                if next == z {
                    return z;
                }
                z = next;
            }
        };
        let gfp = |step: &dyn Fn(u32) -> u32| {
            let mut z = self.all();
            loop {
                let next = step(z);
                if next == z {
                    return z;
                }
                z = next;
            }
        };
        match f {
            True => self.all(),
            False => 0,
            Atom(a) => self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| l.contains(a))
                .fold(0, |acc, (i, _)| acc | 1 << i),
            Not(g) => self.all() & !self.eval(g, !upper),
            And(a, b) => self.eval(a, upper) & self.eval(b, upper),
            Or(a, b) => self.eval(a, upper) | self.eval(b, upper),
            Imp(a, b) => (self.all() & !self.eval(a, !upper)) | self.eval(b, upper),
            Possibly(g) | Ex(g) => ex(self.eval(g, upper)),
            Necessarily(g) | Ax(g) => ax(self.eval(g, upper)),
            Eu(a, b) => {
                let (fa, fb) = (self.eval(a, upper), self.eval(b, upper));
                lfp(&|z| fb | (fa & ex(z)))
            }
            Au(a, b) => {
                let (fa, fb) = (self.eval(a, upper), self.eval(b, upper));
                lfp(&|z| fb | (fa & ax(z)))
            }
            Ef(g) => {
                let fg = self.eval(g, upper);
                lfp(&|z| fg | ex(z))
            }
            Af(g) => {
                let fg = self.eval(g, upper);
                lfp(&|z| fg | ax(z))
            }
            Eg(g) => {
                let fg = self.eval(g, upper);
                gfp(&|z| fg & ex(z))
            }
            Ag(g) => {
                let fg = self.eval(g, upper);
                gfp(&|z| fg & ax(z))
            }
            Er(a, b) => {
                let (fa, fb) = (self.eval(a, upper), self.eval(b, upper));
                gfp(&|z| fb & (fa | ex(z)))
            }
            Ar(a, b) => {
                let (fa, fb) = (self.eval(a, upper), self.eval(b, upper));
                gfp(&|z| fb & (fa | ax(z)))
            }
            Next(_) | Until(..) | Release(..) | Eventually(_) | Always(_) => {
                unreachable!("linear-time formulas are decided by lasso enumeration")
            }
        }
    }
}

struct Search<'a> {
    frame: &'a Frame,
    phi: &'a Formula,
    serial: bool,
    yes: Vec<u32>,
    may: Vec<u32>,
    /// Candidate indices grouped by source state.
    rows: Vec<Vec<usize>>,
    decided: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(frame: &'a Frame, phi: &'a Formula, serial: bool) -> Self {
        let n = frame.len();
        let mut yes = vec![0u32; n];
        for &(a, b) in &frame.fixed {
            yes[a] |= 1 << b;
        }
        let mut may = yes.clone();
        let mut rows = vec![Vec::new(); n];
        for (i, &(a, b)) in frame.candidates.iter().enumerate() {
            may[a] |= 1 << b;
            rows[a].push(i);
        }
        Search {
            frame,
            phi,
            serial,
            yes,
            may,
            rows,
            decided: vec![false; frame.candidates.len()],
        }
    }

    /// Next undecided edge, taken from the state nearest the root. Rows of
    /// states the root cannot reach never influence the outcome.
    fn pick(&self) -> Option<usize> {
        let root = self.frame.m.root();
        let mut seen = 1u32 << root;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            if let Some(&i) = self.rows[a].iter().find(|&&i| !self.decided[i]) {
                return Some(i);
            }
            for b in 0..self.frame.len() {
                if self.may[a] & (1 << b) != 0 && seen & (1 << b) == 0 {
                    seen |= 1 << b;
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// Some completion of the current assignment satisfying `phi` at the
    /// root, as successor masks.
    fn run(&mut self) -> Option<Vec<u32>> {
        let root = self.frame.m.root();
        if self.serial && self.may.contains(&0) {
            return None;
        }
        let tv = ThreeValued {
            labels: &self.frame.labels,
            yes: self.yes.clone(),
            may: self.may.clone(),
            serial: self.serial,
        };
        if tv.eval(self.phi, true) & (1 << root) == 0 {
            return None;
        }
        if tv.eval(self.phi, false) & (1 << root) != 0 {
            return Some(self.may.clone());
        }
        // With every reachable row decided the bounds agree at the root.
        let i = self.pick()?;
        let (a, b) = self.frame.candidates[i];
        self.decided[i] = true;
        self.yes[a] |= 1 << b;
        let mut found = self.run();
        if found.is_none() {
            self.yes[a] &= !(1 << b);
            self.may[a] &= !(1 << b);
            found = self.run();
            self.may[a] |= 1 << b;
        }
        self.decided[i] = false;
        found
    }
}

fn witness_check(
    m: &PartialModel,
    s: &SynthesizedModel,
    phi: &Formula,
    policy: ExtensionPolicy,
) -> Result<()> {
    if !is_admissible_extension(m, s, policy)? || !holds_at_root(&s.model, phi)? {
        return Err(Error::Internal("oracle witness fails verification".into()));
    }
    Ok(())
}

/// First extension within the budget that satisfies `phi` at the root.
pub fn find_extension(
    phi: &Formula,
    m: &PartialModel,
    policy: ExtensionPolicy,
    budget: EnumerationBudget,
    logic: LogicId,
) -> Result<Option<SynthesizedModel>> {
    check_policy(policy)?;
    let nnf = to_nnf(phi);
    let m = m.with_logic(logic)?.with_atoms(nnf.atoms());
    if logic == LogicId::Ltl {
        for s in enumerate_extensions(&m, policy, budget, logic)? {
            if holds_at_root(&s.model, &nnf)? {
                witness_check(&m, &s, &nnf, policy)?;
                return Ok(Some(s));
            }
        }
        return Ok(None);
    }
    let vals = valuations(m.atoms());
    let max_new = if policy == ExtensionPolicy::FixedStates {
        0
    } else {
        budget.max_new_states
    };
    for k in 0..=max_new {
        for seq in multisets(vals.len(), k) {
            let chosen: Vec<BTreeSet<String>> = seq.iter().map(|&i| vals[i].clone()).collect();
            let frame = Frame::new(&m, policy, &chosen);
            let mut search = Search::new(&frame, &nnf, logic.requires_seriality());
            if let Some(edges) = search.run() {
                let chosen = frame
                    .candidates
                    .iter()
                    .copied()
                    .filter(|&(a, b)| edges[a] & (1 << b) != 0);
                let s = frame.model(chosen);
                witness_check(&m, &s, &nnf, policy)?;
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Some extension within the budget satisfies `phi` at the root.
pub fn oracle_epm(
    phi: &Formula,
    m: &PartialModel,
    policy: ExtensionPolicy,
    budget: EnumerationBudget,
    logic: LogicId,
) -> Result<OracleResult> {
    let witness = find_extension(phi, m, policy, budget, logic)?;
    Ok(OracleResult {
        value: witness.is_some(),
        bounded: witness.is_none(),
        witness,
    })
}

/// Every extension within the budget satisfies `phi` at the root; a failing
/// extension is returned as the witness.
pub fn oracle_mcpm(
    phi: &Formula,
    m: &PartialModel,
    policy: ExtensionPolicy,
    budget: EnumerationBudget,
    logic: LogicId,
) -> Result<OracleResult> {
    let counterexample = find_extension(&negation_nnf(phi), m, policy, budget, logic)?;
    Ok(OracleResult {
        value: counterexample.is_none(),
        bounded: counterexample.is_none(),
        witness: counterexample,
    })
}
