use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use super::{negation_nnf, to_nnf, Formula};

/// A set of closure members, stored as a bitset over closure indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    words: Vec<u64>,
}

impl Label {
    pub fn empty(capacity: usize) -> Label {
        Label {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, other: &Label) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Adds every member of `other`; returns whether anything was new.
    pub fn union_with(&mut self, other: &Label) -> bool {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        let mut changed = false;
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            let next = *w | o;
            changed |= next != *w;
            *w = next;
        }
        changed
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

impl FromIterator<usize> for Label {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut l = Label::default();
        for i in iter {
            l.insert(i);
        }
        l
    }
}

/// Next-time operators; their arguments are obligations on successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModalKind {
    Necessarily,
    Possibly,
    Next,
    Ex,
    Ax,
}

impl ModalKind {
    /// Whether the argument must hold at every successor.
    pub fn is_universal(self) -> bool {
        matches!(
            self,
            ModalKind::Necessarily | ModalKind::Next | ModalKind::Ax
        )
    }
}

/// How a closure member decomposes inside a fully expanded label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Verum,
    Falsum,
    Literal {
        atom: String,
        positive: bool,
    },
    /// All components must be present.
    Alpha(Vec<usize>),
    /// At least one branch must be present in full.
    Beta(Vec<Vec<usize>>),
    Modal(ModalKind, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventualityKind {
    /// `E[f U g]`, `EF g`: some path reaches the goal.
    Existential,
    /// `A[f U g]`, `AF g`: every path reaches the goal.
    Universal,
    /// `f U g`, `F g` on a linear model.
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eventuality {
    pub formula: usize,
    pub goal: usize,
    pub kind: EventualityKind,
}

/// The extended closure of a formula in negation normal form.
#[derive(Clone, Debug)]
pub struct ClosureSet {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    rules: Vec<Rule>,
    negation: Vec<usize>,
    eventualities: Vec<Eventuality>,
    eventuality_of: Vec<Option<usize>>,
    root: usize,
}

/// One-step unfolding of a fixpoint operator.
fn unfold(f: &Formula) -> Option<Formula> {
    use Formula::*;
    Some(match f {
        Until(a, b) => Formula::or(
            (**b).clone(),
            Formula::and((**a).clone(), Formula::next(f.clone())),
        ),
        Release(a, b) => Formula::and(
            (**b).clone(),
            Formula::or((**a).clone(), Formula::next(f.clone())),
        ),
        Eventually(a) => Formula::or((**a).clone(), Formula::next(f.clone())),
        Always(a) => Formula::and((**a).clone(), Formula::next(f.clone())),
        Eu(a, b) => Formula::or(
            (**b).clone(),
            Formula::and((**a).clone(), Formula::ex(f.clone())),
        ),
        Au(a, b) => Formula::or(
            (**b).clone(),
            Formula::and((**a).clone(), Formula::ax(f.clone())),
        ),
        Ef(a) => Formula::or((**a).clone(), Formula::ex(f.clone())),
        Af(a) => Formula::or((**a).clone(), Formula::ax(f.clone())),
        Eg(a) => Formula::and((**a).clone(), Formula::ex(f.clone())),
        Ag(a) => Formula::and((**a).clone(), Formula::ax(f.clone())),
        Er(a, b) => Formula::and(
            (**b).clone(),
            Formula::or((**a).clone(), Formula::ex(f.clone())),
        ),
        Ar(a, b) => Formula::and(
            (**b).clone(),
            Formula::or((**a).clone(), Formula::ax(f.clone())),
        ),
        _ => return None,
    })
}

/// Smallest set containing `f` that is closed under subformulas, negation (in
/// NNF) and one-step unfolding of fixpoint operators.
///
/// Members are ordered by size, then structurally, so indices are stable.
/// A formula not in NNF is normalised first.
pub fn extended_closure(f: &Formula) -> ClosureSet {
    let root_formula = if f.is_nnf() { f.clone() } else { to_nnf(f) };
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut queue = VecDeque::from([root_formula.clone()]);
    while let Some(g) = queue.pop_front() {
        if !seen.insert(g.clone()) {
            continue;
        }
        for c in g.children() {
            queue.push_back(c.clone());
        }
        queue.push_back(negation_nnf(&g));
        if let Some(u) = unfold(&g) {
            queue.push_back(u);
        }
    }
    let mut formulas: Vec<Formula> = seen.into_iter().collect();
    formulas.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    let index: HashMap<Formula, usize> = formulas
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), i))
        .collect();
    let at = |g: &Formula| index[g];

    let mut rules = Vec::with_capacity(formulas.len());
    let mut eventualities = Vec::new();
    let mut eventuality_of = vec![None; formulas.len()];
    for (i, g) in formulas.iter().enumerate() {
        use Formula::*;
        let rule = match g {
            True => Rule::Verum,
            False => Rule::Falsum,
            Atom(a) => Rule::Literal {
                atom: a.clone(),
                positive: true,
            },
            Not(inner) => match &**inner {
                Atom(a) => Rule::Literal {
                    atom: a.clone(),
                    positive: false,
                },
                _ => unreachable!("closure members are in negation normal form"),
            },
            And(a, b) => Rule::Alpha(vec![at(a), at(b)]),
            Or(a, b) => Rule::Beta(vec![vec![at(a)], vec![at(b)]]),
            Imp(..) => unreachable!("closure members are in negation normal form"),
            Necessarily(a) => Rule::Modal(ModalKind::Necessarily, at(a)),
            Possibly(a) => Rule::Modal(ModalKind::Possibly, at(a)),
            Next(a) => Rule::Modal(ModalKind::Next, at(a)),
            Ex(a) => Rule::Modal(ModalKind::Ex, at(a)),
            Ax(a) => Rule::Modal(ModalKind::Ax, at(a)),
            _ => Rule::Alpha(vec![at(&unfold(g).expect("fixpoint operator"))]),
        };
        let eventuality = match g {
            Until(_, b) => Some((at(b), EventualityKind::Linear)),
            Eventually(a) => Some((at(a), EventualityKind::Linear)),
            Eu(_, b) => Some((at(b), EventualityKind::Existential)),
            Ef(a) => Some((at(a), EventualityKind::Existential)),
            Au(_, b) => Some((at(b), EventualityKind::Universal)),
            Af(a) => Some((at(a), EventualityKind::Universal)),
            _ => None,
        };
        if let Some((goal, kind)) = eventuality {
            eventuality_of[i] = Some(eventualities.len());
            eventualities.push(Eventuality {
                formula: i,
                goal,
                kind,
            });
        }
        rules.push(rule);
    }
    let negation = formulas.iter().map(|g| at(&negation_nnf(g))).collect();
    let root = at(&root_formula);
    ClosureSet {
        formulas,
        index,
        rules,
        negation,
        eventualities,
        eventuality_of,
        root,
    }
}

impl ClosureSet {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Index of the formula the closure was built from.
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn rule(&self, i: usize) -> &Rule {
        &self.rules[i]
    }

    pub fn negation(&self, i: usize) -> usize {
        self.negation[i]
    }

    pub fn eventualities(&self) -> &[Eventuality] {
        &self.eventualities
    }

    pub fn eventuality(&self, i: usize) -> Option<&Eventuality> {
        self.eventuality_of[i].map(|e| &self.eventualities[e])
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains_key(f)
    }

    /// Index of the literal for `atom`, if the atom occurs in the closure.
    pub fn literal(&self, atom: &str, positive: bool) -> Option<usize> {
        let a = Formula::atom(atom);
        if positive {
            self.index_of(&a)
        } else {
            self.index_of(&Formula::not(a))
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.formulas
            .iter()
            .filter_map(|f| match f {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn label(&self) -> Label {
        Label::empty(self.len())
    }

    /// `falsum` or a complementary pair of literals.
    pub fn has_clash(&self, label: &Label) -> bool {
        label.iter().any(|i| match &self.rules[i] {
            Rule::Falsum => true,
            Rule::Literal { positive: true, .. } => label.contains(self.negation[i]),
            _ => false,
        })
    }

    /// Whether the decomposition rule of `i` is already honoured by `label`.
    pub fn is_satisfied(&self, i: usize, label: &Label) -> bool {
        match &self.rules[i] {
            Rule::Alpha(parts) => parts.iter().all(|p| label.contains(*p)),
            Rule::Beta(branches) => branches
                .iter()
                .any(|b| b.iter().all(|p| label.contains(*p))),
            _ => true,
        }
    }

    /// First member of `label` whose decomposition is still pending.
    pub fn first_unsatisfied(&self, label: &Label) -> Option<usize> {
        label.iter().find(|&i| !self.is_satisfied(i, label))
    }

    /// Arguments of the next-time operators of `kind` in `label`, in index order.
    pub fn modal_arguments(&self, label: &Label, kind: ModalKind) -> Vec<usize> {
        label
            .iter()
            .filter_map(|i| match self.rules[i] {
                Rule::Modal(k, arg) if k == kind => Some(arg),
                _ => None,
            })
            .collect()
    }

    /// Formulas every successor must satisfy: arguments of `[]`, `X` and `AX`.
    pub fn universal_obligations(&self, label: &Label) -> Label {
        label
            .iter()
            .filter_map(|i| match self.rules[i] {
                Rule::Modal(k, arg) if k.is_universal() => Some(arg),
                _ => None,
            })
            .collect()
    }

    /// Arguments of `<>` and `EX`, each needing its own witness successor.
    pub fn existential_demands(&self, label: &Label) -> Vec<usize> {
        label
            .iter()
            .filter_map(|i| match self.rules[i] {
                Rule::Modal(k, arg) if !k.is_universal() => Some(arg),
                _ => None,
            })
            .collect()
    }

    /// Atoms asserted positively by `label`.
    pub fn positive_atoms(&self, label: &Label) -> BTreeSet<String> {
        label
            .iter()
            .filter_map(|i| match &self.rules[i] {
                Rule::Literal {
                    atom,
                    positive: true,
                } => Some(atom.clone()),
                _ => None,
            })
            .collect()
    }

    /// Eventualities of `label` whose goal is not yet in `label`.
    pub fn pending_eventualities<'a>(
        &'a self,
        label: &'a Label,
    ) -> impl Iterator<Item = usize> + 'a {
        self.eventualities
            .iter()
            .enumerate()
            .filter(move |(_, e)| label.contains(e.formula) && !label.contains(e.goal))
            .map(|(k, _)| k)
    }

    pub fn display_label(&self, label: &Label) -> String {
        let mut out = String::from("{");
        for (n, i) in label.iter().enumerate() {
            if n > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}", self.formulas[i]);
        }
        out.push('}');
        out
    }
}

/// All minimal fully expanded supersets of `label` within the closure.
///
/// A fully expanded set contains both conjuncts of every conjunction, one
/// disjunct of every disjunction and the unfolding of every fixpoint formula,
/// and has no clash. An empty result means `label` is locally inconsistent.
///
/// Fulfilling a pending eventuality on the spot is always its own choice,
/// even when the postponing branch is already forced by something else, so
/// the minimal expansions of `label` plus each pending goal are included too.
pub fn full_expansions(label: &Label, closure: &ClosureSet) -> Vec<Label> {
    let mut out: BTreeSet<Label> = BTreeSet::new();
    let mut seen: BTreeSet<Label> = BTreeSet::new();
    let mut work = vec![label.clone()];
    while let Some(start) = work.pop() {
        if !seen.insert(start.clone()) {
            continue;
        }
        for e in minimal_expansions(&start, closure) {
            for ev in closure.eventualities() {
                if e.contains(ev.formula) && !e.contains(ev.goal) {
                    let mut next = e.clone();
                    next.insert(ev.goal);
                    work.push(next);
                }
            }
            out.insert(e);
        }
    }
    out.into_iter().collect()
}

fn minimal_expansions(label: &Label, closure: &ClosureSet) -> Vec<Label> {
    let mut found: BTreeSet<Label> = BTreeSet::new();
    let mut stack = vec![label.clone()];
    while let Some(current) = stack.pop() {
        if closure.has_clash(&current) {
            continue;
        }
        let Some(i) = closure.first_unsatisfied(&current) else {
            found.insert(current);
            continue;
        };
        match closure.rule(i) {
            Rule::Alpha(parts) => {
                let mut next = current;
                for p in parts {
                    next.insert(*p);
                }
                stack.push(next);
            }
            Rule::Beta(branches) => {
                for b in branches.iter().rev() {
                    let mut next = current.clone();
                    for p in b {
                        next.insert(*p);
                    }
                    stack.push(next);
                }
            }
            _ => unreachable!("only alpha/beta rules can be unsatisfied"),
        }
    }
    let all: Vec<Label> = found.into_iter().collect();
    all.iter()
        .filter(|l| !all.iter().any(|o| o != *l && o.is_subset(l)))
        .cloned()
        .collect()
}

/// Independent check of the fully-expanded conditions, phrased over the
/// formulas themselves rather than the closure's decomposition rules.
pub fn is_fully_expanded(label: &Label, closure: &ClosureSet) -> bool {
    let has = |f: &Formula| closure.index_of(f).is_some_and(|i| label.contains(i));
    label.iter().all(|i| {
        let f = closure.formula(i);
        use Formula::*;
        match f {
            False => false,
            Not(a) => !has(a),
            And(a, b) => has(a) && has(b),
            Or(a, b) => has(a) || has(b),
            Until(..) | Release(..) | Eventually(_) | Always(_) | Eu(..) | Au(..) | Ef(_)
            | Af(_) | Eg(_) | Ag(_) | Er(..) | Ar(..) => unfold(f).is_some_and(|u| has(&u)),
            _ => true,
        }
    })
}
