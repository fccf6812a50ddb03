//! Formulas of K, LTL and CTL: parsing, negation normal form and the
//! extended closure used to label tableau nodes.

mod closure;
mod nnf;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use closure::{
    extended_closure, full_expansions, is_fully_expanded, ClosureSet, Eventuality, EventualityKind,
    Label, ModalKind, Rule,
};
pub use nnf::{negation_nnf, to_nnf};
pub use parser::{parse, ParseError, ParseErrorKind};

/// The logic a formula (and a model) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicId {
    #[serde(rename = "K")]
    K,
    #[serde(rename = "LTL")]
    Ltl,
    #[serde(rename = "CTL")]
    Ctl,
}

impl LogicId {
    pub const ALL: [LogicId; 3] = [LogicId::K, LogicId::Ltl, LogicId::Ctl];

    pub fn name(self) -> &'static str {
        match self {
            LogicId::K => "K",
            LogicId::Ltl => "LTL",
            LogicId::Ctl => "CTL",
        }
    }

    /// Complete models of this logic must give every state a successor.
    pub fn requires_seriality(self) -> bool {
        !matches!(self, LogicId::K)
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(LogicId::K),
            "ltl" => Ok(LogicId::Ltl),
            "ctl" => Ok(LogicId::Ctl),
            other => Err(format!("unknown logic `{other}` (expected k, ltl or ctl)")),
        }
    }
}

/// Syntax tree of a specification formula.
///
/// The derived ordering is structural (variant first, then children, atoms by
/// name); closures and labels iterate in this order so that every run is
/// reproducible.
///
/// `Er`/`Ar` (existential/universal release) are not part of the surface
/// grammar of CTL; they only appear as negation-normal-form duals of `Au`/`Eu`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    // K
    Necessarily(Box<Formula>),
    Possibly(Box<Formula>),
    // LTL
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    // CTL
    Ex(Box<Formula>),
    Ax(Box<Formula>),
    Eu(Box<Formula>, Box<Formula>),
    Au(Box<Formula>, Box<Formula>),
    Ef(Box<Formula>),
    Af(Box<Formula>),
    Eg(Box<Formula>),
    Ag(Box<Formula>),
    Er(Box<Formula>, Box<Formula>),
    Ar(Box<Formula>, Box<Formula>),
}

macro_rules! unary_ctor {
    ($($name:ident => $variant:ident),* $(,)?) => {
        $(#[allow(clippy::should_implement_trait)]
        pub fn $name(f: Formula) -> Formula { Formula::$variant(Box::new(f)) })*
    };
}

macro_rules! binary_ctor {
    ($($name:ident => $variant:ident),* $(,)?) => {
        $(pub fn $name(f: Formula, g: Formula) -> Formula {
            Formula::$variant(Box::new(f), Box::new(g))
        })*
    };
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    unary_ctor! {
        not => Not, boxed => Necessarily, diamond => Possibly, next => Next,
        eventually => Eventually, always => Always, ex => Ex, ax => Ax, ef => Ef,
        af => Af, eg => Eg, ag => Ag,
    }

    binary_ctor! {
        and => And, or => Or, imp => Imp, until => Until, release => Release,
        eu => Eu, au => Au, er => Er, ar => Ar,
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(f) | Necessarily(f) | Possibly(f) | Next(f) | Eventually(f) | Always(f) | Ex(f)
            | Ax(f) | Ef(f) | Af(f) | Eg(f) | Ag(f) => vec![f],
            And(f, g)
            | Or(f, g)
            | Imp(f, g)
            | Until(f, g)
            | Release(f, g)
            | Eu(f, g)
            | Au(f, g)
            | Er(f, g)
            | Ar(f, g) => vec![f, g],
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Height of the syntax tree; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Surface name of this node's operator when it belongs to a single logic.
    fn operator(&self) -> Option<(&'static str, LogicId)> {
        use Formula::*;
        Some(match self {
            Necessarily(_) => ("[]", LogicId::K),
            Possibly(_) => ("<>", LogicId::K),
            Next(_) => ("X", LogicId::Ltl),
            Until(..) => ("U", LogicId::Ltl),
            Release(..) => ("R", LogicId::Ltl),
            Eventually(_) => ("F", LogicId::Ltl),
            Always(_) => ("G", LogicId::Ltl),
            Ex(_) => ("EX", LogicId::Ctl),
            Ax(_) => ("AX", LogicId::Ctl),
            Eu(..) => ("E[U]", LogicId::Ctl),
            Au(..) => ("A[U]", LogicId::Ctl),
            Ef(_) => ("EF", LogicId::Ctl),
            Af(_) => ("AF", LogicId::Ctl),
            Eg(_) => ("EG", LogicId::Ctl),
            Ag(_) => ("AG", LogicId::Ctl),
            Er(..) => ("E[R]", LogicId::Ctl),
            Ar(..) => ("A[R]", LogicId::Ctl),
            _ => return None,
        })
    }

    /// First operator (in pre-order) that does not belong to `logic`.
    pub fn foreign_operator(&self, logic: LogicId) -> Option<&'static str> {
        if let Some((name, owner)) = self.operator() {
            if owner != logic {
                return Some(name);
            }
        }
        self.children()
            .into_iter()
            .find_map(|c| c.foreign_operator(logic))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) => matches!(**f, Formula::Atom(_)),
            _ => false,
        }
    }

    /// Negations only on atoms and no implications.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(f) => matches!(**f, Formula::Atom(_)),
            Formula::Imp(..) => false,
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => f.write_str(a),
            Not(g) => write!(f, "~{g}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Imp(a, b) => write!(f, "({a} -> {b})"),
            Necessarily(g) => write!(f, "[]{g}"),
            Possibly(g) => write!(f, "<>{g}"),
            Next(g) => write!(f, "X {g}"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
            Eventually(g) => write!(f, "F {g}"),
            Always(g) => write!(f, "G {g}"),
            Ex(g) => write!(f, "EX {g}"),
            Ax(g) => write!(f, "AX {g}"),
            Eu(a, b) => write!(f, "E[{a} U {b}]"),
            Au(a, b) => write!(f, "A[{a} U {b}]"),
            Ef(g) => write!(f, "EF {g}"),
            Af(g) => write!(f, "AF {g}"),
            Eg(g) => write!(f, "EG {g}"),
            Ag(g) => write!(f, "AG {g}"),
            Er(a, b) => write!(f, "E[{a} R {b}]"),
            Ar(a, b) => write!(f, "A[{a} R {b}]"),
        }
    }
}
