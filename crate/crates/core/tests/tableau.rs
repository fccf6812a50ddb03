use tabsynth_core::models::{ExtensionPolicy, PartialModel, SynthesizedModel};
use tabsynth_core::solver::{solve_formula, solve_sat, SolveOptions};
use tabsynth_core::syntax::{parse, to_nnf, LogicId};
use tabsynth_core::tableau::{
    build_pretableau, decide, eliminate_prestates, eliminate_states, extract_model, BuildOptions,
    GroupKind, NodeKind, Phase, Status,
};
use tabsynth_core::{checker, models};

fn single(logic: LogicId, atoms: &[&str], label: &[&str]) -> PartialModel {
    PartialModel::builder(logic, atoms.iter().copied())
        .state("s", label.iter().copied())
        .root("s")
        .build()
        .unwrap()
}

fn options() -> BuildOptions {
    BuildOptions {
        trace: true,
        ..BuildOptions::default()
    }
}

fn labels(t: &tabsynth_core::tableau::Tableau, id: usize) -> String {
    t.closure().display_label(&t.node(id).label)
}

#[test]
fn seed_prestate_and_its_successor() {
    let phi = parse("<>p", LogicId::K).unwrap();
    let t = build_pretableau(
        &phi,
        &single(LogicId::K, &["p"], &[]),
        LogicId::K,
        options(),
    );
    let seed = &t.nodes()[0];
    assert_eq!(seed.kind, NodeKind::Prestate);
    assert_eq!(labels(&t, 0), "{~p, <>p}");
    assert_eq!(seed.offspring.len(), 1);
    let state = t.node(seed.offspring[0]);
    assert_eq!(state.groups.len(), 1);
    assert_eq!(labels(&t, state.groups[0].prestate), "{p}");
    assert!(t.trace()[0].starts_with("SEED n0"));
}

#[test]
fn clashing_seed_closes() {
    let phi = parse("p", LogicId::K).unwrap();
    let t = build_pretableau(
        &phi,
        &single(LogicId::K, &["p"], &[]),
        LogicId::K,
        options(),
    );
    assert!(t.nodes()[0].offspring.is_empty());
    let t = eliminate_states(eliminate_prestates(t).unwrap()).unwrap();
    assert!(t.is_closed());
    assert_eq!(decide(&t).unwrap(), Status::Closed);
    assert!(t.trace().iter().any(|l| l == "CLOSED-ORIGIN s"));
}

#[test]
fn transition_prestate_carries_target_literals() {
    let m = PartialModel::builder(LogicId::Ctl, ["p", "q"])
        .state("s", ["p"])
        .state("t", ["q"])
        .transition("s", "t")
        .root("s")
        .build()
        .unwrap();
    let phi = parse("EX q", LogicId::Ctl).unwrap();
    let t = build_pretableau(&phi, &m, LogicId::Ctl, options());
    let s_state = t.node(t.nodes()[0].offspring[0]);
    let to_t = s_state
        .groups
        .iter()
        .find(|g| g.kind == GroupKind::Transition(1))
        .expect("successor prestate for the model transition");
    assert_eq!(labels(&t, to_t.prestate), "{q}");
    assert_eq!(t.node(to_t.prestate).origin, Some(1));
    assert!(t.trace().iter().any(|l| l.starts_with(&format!(
        "NEXT n{} -> n{} origin=t",
        s_state.id, to_t.prestate
    ))));
}

#[test]
fn prestate_elimination_rewires_and_is_not_idempotent() {
    let phi = parse("<>(p | q)", LogicId::K).unwrap();
    let t = build_pretableau(
        &phi,
        &single(LogicId::K, &["p", "q"], &[]),
        LogicId::K,
        options(),
    );
    let root_state = t.nodes()[0].offspring[0];
    let p = t.node(root_state).groups[0].prestate;
    let offspring = t.node(p).offspring.clone();
    assert_eq!(offspring.len(), 2);
    let t = eliminate_prestates(t).unwrap();
    assert_eq!(t.phase(), Phase::Initial);
    assert_eq!(t.node(root_state).groups[0].members, offspring);
    assert!(t
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Prestate)
        .all(|n| !n.alive));
    assert!(eliminate_prestates(t).is_err());
}

#[test]
fn unsatisfiable_successor_removed_by_e1() {
    let run = solve_sat(&parse("<>p & []~p", LogicId::K).unwrap(), LogicId::K, true).unwrap();
    assert_eq!(run.verdict.status, Status::Closed);
    assert!(run.tableau.trace().iter().any(|l| l.starts_with("E1 ")));
}

#[test]
fn ltl_unfulfilled_eventuality_removed_by_e2() {
    let run = solve_sat(
        &parse("G p & F ~p", LogicId::Ltl).unwrap(),
        LogicId::Ltl,
        true,
    )
    .unwrap();
    assert_eq!(run.verdict.status, Status::Closed);
    assert!(run.tableau.trace().iter().any(|l| l.starts_with("E2 ")));
    assert!(run.verdict.stats.e2_eliminations > 0);
}

#[test]
fn ctl_until_realized_by_new_successor() {
    let m = single(LogicId::Ctl, &["p", "q"], &["p"]);
    let phi = parse("E[p U q]", LogicId::Ctl).unwrap();
    let run = solve_formula(&phi, &m, LogicId::Ctl, SolveOptions::default()).unwrap();
    assert_eq!(run.verdict.status, Status::Open);
    let model = run.verdict.model.unwrap();
    assert!(model.model.len() >= 2);
    assert!(checker::holds_at_root(&model.model, &phi).unwrap());
}

#[test]
fn decide_requires_final_phase() {
    let phi = parse("p", LogicId::K).unwrap();
    let t = build_pretableau(
        &phi,
        &single(LogicId::K, &["p"], &["p"]),
        LogicId::K,
        options(),
    );
    assert!(decide(&t).is_err());
    let t = eliminate_states(eliminate_prestates(t).unwrap()).unwrap();
    assert_eq!(decide(&t).unwrap(), Status::Open);
    assert_eq!(t.root_candidates().len(), 1);
    assert_eq!(t.origin_index()["s"].len(), 1);
}

#[test]
fn k_extraction_adds_one_witness() {
    let m = single(LogicId::K, &["p", "q"], &["q"]);
    let phi = parse("<>p & []q", LogicId::K).unwrap();
    let t = build_pretableau(&to_nnf(&phi), &m, LogicId::K, BuildOptions::default());
    let t = eliminate_states(eliminate_prestates(t).unwrap()).unwrap();
    let s = extract_model(&t).unwrap();
    assert_eq!(s.model.len(), 2);
    let u = s.model.index_of("_g0").unwrap();
    assert_eq!(
        s.model.state(u).label,
        ["p", "q"].iter().map(|a| a.to_string()).collect()
    );
    assert!(s.model.has_transition(s.model.index_of("s").unwrap(), u));
    assert!(models::is_admissible_extension(&m, &s, ExtensionPolicy::Grow).unwrap());
}

#[test]
fn complete_policy_returns_the_model() {
    let m = PartialModel::builder(LogicId::Ctl, ["p"])
        .state("s", ["p"])
        .state("t", ["p"])
        .transition("s", "t")
        .transition("t", "s")
        .root("s")
        .build()
        .unwrap();
    let phi = parse("AG p & EX p", LogicId::Ctl).unwrap();
    let options = SolveOptions {
        policy: ExtensionPolicy::Complete,
        trace: false,
    };
    let v = solve_formula(&phi, &m, LogicId::Ctl, options)
        .unwrap()
        .verdict;
    assert_eq!(v.model.unwrap(), SynthesizedModel::identity(&m));
}

#[test]
fn ltl_always_extends_chain_to_lasso() {
    let m = PartialModel::builder(LogicId::Ltl, ["p"])
        .state("s0", ["p"])
        .root("s0")
        .build()
        .unwrap();
    let phi = parse("G p", LogicId::Ltl).unwrap();
    let v = solve_formula(&phi, &m, LogicId::Ltl, SolveOptions::default())
        .unwrap()
        .verdict;
    let s = v.model.unwrap();
    assert!(checker::holds_at_root(&s.model, &phi).unwrap());
    assert!(s.model.len() <= 2);
    for st in s.model.states() {
        assert!(st.label.contains("p"));
    }
}
