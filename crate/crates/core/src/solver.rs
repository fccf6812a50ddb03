//! The full pipeline: parse, normalise, build and prune the tableau, decide,
//! extract and re-verify.

use serde::Serialize;

use crate::checker::holds_at_root;
use crate::error::{Error, Result};
use crate::models::{is_admissible_extension, ExtensionPolicy, PartialModel, SynthesizedModel};
use crate::syntax::{negation_nnf, parse, to_nnf, Formula, LogicId, ParseError, ParseErrorKind};
use crate::tableau::{
    build_pretableau, decide, eliminate_prestates, eliminate_states, extract_model, BuildOptions,
    Stats, Status, Tableau,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip)]
    pub model: Option<SynthesizedModel>,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_open(&self) -> bool {
        self.status == Status::Open
    }
}

/// A verdict together with the final tableau it was read from.
#[derive(Clone, Debug)]
pub struct Run {
    pub verdict: Verdict,
    pub tableau: Tableau,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub policy: ExtensionPolicy,
    pub trace: bool,
}

fn check_logic(phi: &Formula, logic: LogicId) -> Result<()> {
    match phi.foreign_operator(logic) {
        Some(operator) => Err(Error::Parse(ParseError {
            position: 0,
            kind: ParseErrorKind::WrongLogic { operator, logic },
        })),
        None => Ok(()),
    }
}

/// Runs the tableau on `phi` over `m`; the model of an open verdict has been
/// re-checked for admissibility and for `phi` at the root.
pub fn solve_formula(
    phi: &Formula,
    m: &PartialModel,
    logic: LogicId,
    options: SolveOptions,
) -> Result<Run> {
    run(phi, m, logic, options, false)
}

fn run(
    phi: &Formula,
    m: &PartialModel,
    logic: LogicId,
    options: SolveOptions,
    free_root: bool,
) -> Result<Run> {
    if options.policy == ExtensionPolicy::FixedStates {
        return Err(Error::Policy {
            policy: options.policy,
            operation: "the tableau",
        });
    }
    if m.logic() != logic {
        return Err(Error::LogicMismatch {
            model: m.logic(),
            requested: logic,
        });
    }
    check_logic(phi, logic)?;
    if options.policy == ExtensionPolicy::Complete {
        m.check_complete()?;
    }
    let nnf = to_nnf(phi);
    let m = m.with_atoms(nnf.atoms());
    let build = BuildOptions {
        policy: options.policy,
        free_root,
        trace: options.trace,
    };
    let t = build_pretableau(&nnf, &m, logic, build);
    let t = eliminate_prestates(t)?;
    let t = eliminate_states(t)?;
    let status = decide(&t)?;
    let model = match status {
        Status::Open => {
            let synthesized = extract_model(&t)?;
            verify(&m, &synthesized, &nnf, options.policy, free_root)?;
            Some(synthesized)
        }
        Status::Closed => None,
    };
    Ok(Run {
        verdict: Verdict {
            status,
            model,
            stats: t.stats().clone(),
        },
        tableau: t,
    })
}

fn verify(
    m: &PartialModel,
    s: &SynthesizedModel,
    phi: &Formula,
    policy: ExtensionPolicy,
    free_root: bool,
) -> Result<()> {
    let reference = if free_root {
        // The root's valuation was chosen by the tableau.
        let root = s.model.state(s.model.root());
        let mut b = PartialModel::builder(m.logic(), m.atoms().to_vec()).root(m.root_id());
        for st in m.states() {
            let label = if st.id == root.id {
                root.label.clone()
            } else {
                st.label.clone()
            };
            b = b.state(st.id.clone(), label);
        }
        for &(a, c) in m.transitions() {
            b = b.transition(m.state(a).id.clone(), m.state(c).id.clone());
        }
        b.build()?
    } else {
        m.clone()
    };
    if !is_admissible_extension(&reference, s, policy)? {
        return Err(Error::Internal(
            "extracted model is not an admissible extension".into(),
        ));
    }
    if !holds_at_root(&s.model, phi)? {
        return Err(Error::Internal(format!(
            "extracted model does not satisfy {phi} at the root"
        )));
    }
    Ok(())
}

/// Parses `phi_text` in `logic` and solves it over `m`.
pub fn solve(
    phi_text: &str,
    m: &PartialModel,
    policy: ExtensionPolicy,
    logic: LogicId,
) -> Result<Verdict> {
    let phi = parse(phi_text, logic)?;
    Ok(solve_formula(
        &phi,
        m,
        logic,
        SolveOptions {
            policy,
            trace: false,
        },
    )?
    .verdict)
}

/// The partial model used for plain satisfiability: one root, `s0`, whose
/// valuation is left to the tableau.
pub fn sat_model(phi: &Formula, logic: LogicId) -> PartialModel {
    PartialModel::builder(logic, phi.atoms())
        .state("s0", Vec::<String>::new())
        .root("s0")
        .build()
        .expect("a single unlabeled root is a valid model")
}

/// Satisfiability (with model building) as extension of a fresh root.
pub fn solve_sat(phi: &Formula, logic: LogicId, trace: bool) -> Result<Run> {
    let options = SolveOptions {
        policy: ExtensionPolicy::Grow,
        trace,
    };
    run(phi, &sat_model(phi, logic), logic, options, true)
}

/// Does some admissible extension satisfy `phi` at the root?
pub fn decide_epm(
    phi: &Formula,
    m: &PartialModel,
    policy: ExtensionPolicy,
    logic: LogicId,
) -> Result<bool> {
    let options = SolveOptions {
        policy,
        trace: false,
    };
    Ok(solve_formula(phi, m, logic, options)?.verdict.is_open())
}

/// Does every admissible extension satisfy `phi` at the root?
pub fn decide_mcpm(
    phi: &Formula,
    m: &PartialModel,
    policy: ExtensionPolicy,
    logic: LogicId,
) -> Result<bool> {
    check_logic(phi, logic)?;
    Ok(!decide_epm(&negation_nnf(phi), m, policy, logic)?)
}
