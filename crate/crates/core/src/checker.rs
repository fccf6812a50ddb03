//! Explicit-state evaluation of formulas on complete models.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::models::PartialModel;
use crate::syntax::{Formula, LogicId};

/// A finite transition graph prepared for global evaluation.
///
/// Every operator is evaluated to the set of states where it holds. `X`, `U`,
/// `R`, `F` and `G` are read along successors, which is the path semantics
/// whenever each state has exactly one successor (lassos).
pub struct Evaluator {
    labels: Vec<BTreeSet<String>>,
    succ: Vec<Vec<usize>>,
    /// Successor bitmasks, when every state fits in one word.
    masks: Option<Vec<u64>>,
    atoms: BTreeMap<String, u64>,
}

impl Evaluator {
    pub fn new(labels: Vec<BTreeSet<String>>, succ: Vec<Vec<usize>>) -> Evaluator {
        assert_eq!(labels.len(), succ.len());
        let masks = (labels.len() <= 64).then(|| {
            succ.iter()
                .map(|s| s.iter().fold(0u64, |m, &j| m | 1 << j))
                .collect()
        });
        let mut atoms: BTreeMap<String, u64> = BTreeMap::new();
        if masks.is_some() {
            for (i, l) in labels.iter().enumerate() {
                for a in l {
                    *atoms.entry(a.clone()).or_default() |= 1 << i;
                }
            }
        }
        Evaluator {
            labels,
            succ,
            masks,
            atoms,
        }
    }

    pub fn of_model(m: &PartialModel) -> Evaluator {
        Evaluator::new(
            m.states().iter().map(|s| s.label.clone()).collect(),
            m.successor_lists(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Truth value of `f` at every state.
    pub fn eval(&self, f: &Formula) -> Vec<bool> {
        match &self.masks {
            Some(succ) => {
                let z = eval_in(&Words { ev: self, succ }, f);
                (0..self.len()).map(|i| z >> i & 1 == 1).collect()
            }
            None => eval_in(&Flags(self), f),
        }
    }

    /// The states satisfying `f` as a bitmask (bit `i` is state `i`), for
    /// graphs of at most 64 states.
    pub fn eval_bits(&self, f: &Formula) -> Option<u64> {
        let succ = self.masks.as_ref()?;
        Some(eval_in(&Words { ev: self, succ }, f))
    }
}

/// Boolean and one-step operations over sets of states.
trait Sets {
    type S: Clone + PartialEq;
    fn none(&self) -> Self::S;
    fn all(&self) -> Self::S;
    fn atom(&self, a: &str) -> Self::S;
    fn not(&self, x: Self::S) -> Self::S;
    fn and(&self, x: Self::S, y: &Self::S) -> Self::S;
    fn or(&self, x: Self::S, y: &Self::S) -> Self::S;
    /// States with some successor in `z`.
    fn ex(&self, z: &Self::S) -> Self::S;
    /// States all of whose successors are in `z`.
    fn ax(&self, z: &Self::S) -> Self::S;
}

struct Words<'a> {
    ev: &'a Evaluator,
    succ: &'a [u64],
}

impl Sets for Words<'_> {
    type S = u64;
    fn none(&self) -> u64 {
        0
    }
    fn all(&self) -> u64 {
        match self.succ.len() {
            64 => u64::MAX,
            n => (1 << n) - 1,
        }
    }
    fn atom(&self, a: &str) -> u64 {
        self.ev.atoms.get(a).copied().unwrap_or(0)
    }
    fn not(&self, x: u64) -> u64 {
        !x & self.all()
    }
    fn and(&self, x: u64, y: &u64) -> u64 {
        x & y
    }
    fn or(&self, x: u64, y: &u64) -> u64 {
        x | y
    }
    fn ex(&self, z: &u64) -> u64 {
        self.succ
            .iter()
            .enumerate()
            .filter(|(_, &s)| s & z != 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }
    fn ax(&self, z: &u64) -> u64 {
        self.succ
            .iter()
            .enumerate()
            .filter(|(_, &s)| s & !z == 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

struct Flags<'a>(&'a Evaluator);

impl Sets for Flags<'_> {
    type S = Vec<bool>;
    fn none(&self) -> Vec<bool> {
        vec![false; self.0.len()]
    }
    fn all(&self) -> Vec<bool> {
        vec![true; self.0.len()]
    }
    fn atom(&self, a: &str) -> Vec<bool> {
        self.0.labels.iter().map(|l| l.contains(a)).collect()
    }
    fn not(&self, x: Vec<bool>) -> Vec<bool> {
        x.into_iter().map(|v| !v).collect()
    }
    fn and(&self, x: Vec<bool>, y: &Vec<bool>) -> Vec<bool> {
        x.into_iter().zip(y).map(|(a, &b)| a && b).collect()
    }
    fn or(&self, x: Vec<bool>, y: &Vec<bool>) -> Vec<bool> {
        x.into_iter().zip(y).map(|(a, &b)| a || b).collect()
    }
    fn ex(&self, z: &Vec<bool>) -> Vec<bool> {
        self.0
            .succ
            .iter()
            .map(|s| s.iter().any(|&j| z[j]))
            .collect()
    }
    fn ax(&self, z: &Vec<bool>) -> Vec<bool> {
        self.0
            .succ
            .iter()
            .map(|s| s.iter().all(|&j| z[j]))
            .collect()
    }
}

/// Iterates `step` from `start` until it stabilises.
fn fixpoint<U: Sets>(start: U::S, step: impl Fn(&U::S) -> U::S) -> U::S {
    let mut z = start;
    loop {
        let next = step(&z);
        if next == z {
            return z;
        }
        z = next;
    }
}

fn eval_in<U: Sets>(u: &U, f: &Formula) -> U::S {
    use Formula::*;
    match f {
        True => u.all(),
        False => u.none(),
        Atom(a) => u.atom(a),
        Not(g) => u.not(eval_in(u, g)),
        And(a, b) => u.and(eval_in(u, a), &eval_in(u, b)),
        Or(a, b) => u.or(eval_in(u, a), &eval_in(u, b)),
        Imp(a, b) => u.or(u.not(eval_in(u, a)), &eval_in(u, b)),
        Possibly(g) | Ex(g) | Next(g) => u.ex(&eval_in(u, g)),
        Necessarily(g) | Ax(g) => u.ax(&eval_in(u, g)),
        // b | (a & step z), least
        Eu(a, b) | Until(a, b) => {
            let (fa, fb) = (eval_in(u, a), eval_in(u, b));
            fixpoint::<U>(u.none(), |z| u.or(u.and(u.ex(z), &fa), &fb))
        }
        Au(a, b) => {
            let (fa, fb) = (eval_in(u, a), eval_in(u, b));
            fixpoint::<U>(u.none(), |z| u.or(u.and(u.ax(z), &fa), &fb))
        }
        Ef(g) | Eventually(g) => {
            let fg = eval_in(u, g);
            fixpoint::<U>(u.none(), |z| u.or(u.ex(z), &fg))
        }
        Af(g) => {
            let fg = eval_in(u, g);
            fixpoint::<U>(u.none(), |z| u.or(u.ax(z), &fg))
        }
        // b & (a | step z), greatest
        Eg(g) | Always(g) => {
            let fg = eval_in(u, g);
            fixpoint::<U>(u.all(), |z| u.and(u.ex(z), &fg))
        }
        Ag(g) => {
            let fg = eval_in(u, g);
            fixpoint::<U>(u.all(), |z| u.and(u.ax(z), &fg))
        }
        Er(a, b) | Release(a, b) => {
            let (fa, fb) = (eval_in(u, a), eval_in(u, b));
            fixpoint::<U>(u.all(), |z| u.and(u.or(u.ex(z), &fa), &fb))
        }
        Ar(a, b) => {
            let (fa, fb) = (eval_in(u, a), eval_in(u, b));
            fixpoint::<U>(u.all(), |z| u.and(u.or(u.ax(z), &fa), &fb))
        }
    }
}

/// Kripke semantics at one state; dead ends are allowed.
pub fn mc_k(model: &PartialModel, state: &str, f: &Formula) -> Result<bool> {
    let i = model
        .index_of(state)
        .ok_or_else(|| Error::UnknownState(state.to_string()))?;
    Ok(Evaluator::of_model(model).eval(f)[i])
}

/// Global CTL labeling of a serial model.
pub fn mc_ctl(model: &PartialModel, f: &Formula) -> Result<BTreeMap<String, bool>> {
    if let Some(i) = model.first_dead_end() {
        return Err(Error::NonSerial(model.state(i).id.clone()));
    }
    let sat = Evaluator::of_model(model).eval(f);
    Ok(model
        .states()
        .iter()
        .zip(sat)
        .map(|(s, v)| (s.id.clone(), v))
        .collect())
}

/// An ultimately periodic word: `prefix` once, then `cycle` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl Lasso {
    /// The word of a chain-shaped model whose last state loops back.
    pub fn of_model(m: &PartialModel) -> Result<Lasso> {
        let order = m.chain_order()?;
        let last = *order.last().expect("models are non-empty");
        let back = m
            .successors(last)
            .next()
            .ok_or_else(|| Error::NonSerial(m.state(last).id.clone()))?;
        let k = order
            .iter()
            .position(|&i| i == back)
            .expect("chain covers all states");
        let labels: Vec<BTreeSet<String>> =
            order.iter().map(|&i| m.state(i).label.clone()).collect();
        Ok(Lasso {
            prefix: labels[..k].to_vec(),
            cycle: labels[k..].to_vec(),
        })
    }
}

/// LTL truth of `f` at position 0 of the lasso.
pub fn mc_ltl_lasso(lasso: &Lasso, f: &Formula) -> Result<bool> {
    if lasso.cycle.is_empty() {
        return Err(Error::InvalidModel("lasso loop is empty".into()));
    }
    let p = lasso.prefix.len();
    let n = p + lasso.cycle.len();
    let labels: Vec<BTreeSet<String>> = lasso.prefix.iter().chain(&lasso.cycle).cloned().collect();
    let succ = (0..n)
        .map(|i| vec![if i + 1 < n { i + 1 } else { p }])
        .collect();
    Ok(Evaluator::new(labels, succ).eval(f)[0])
}

/// Whether `f` holds at the root of a complete model, per the model's logic.
pub fn holds_at_root(model: &PartialModel, f: &Formula) -> Result<bool> {
    match model.logic() {
        LogicId::K => mc_k(model, model.root_id(), f),
        LogicId::Ctl => Ok(mc_ctl(model, f)?[model.root_id()]),
        LogicId::Ltl => mc_ltl_lasso(&Lasso::of_model(model)?, f),
    }
}
