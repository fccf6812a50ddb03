use tabsynth_core::models::{ExtensionPolicy, PartialModel};
use tabsynth_core::solver::{decide_epm, decide_mcpm, solve, solve_sat};
use tabsynth_core::syntax::{parse, LogicId};
use tabsynth_core::{Error, Status};

fn single(logic: LogicId, atoms: &[&str], label: &[&str]) -> PartialModel {
    PartialModel::builder(logic, atoms.iter().copied())
        .state("s", label.iter().copied())
        .root("s")
        .build()
        .unwrap()
}

#[test]
fn contradiction_is_closed_everywhere() {
    for logic in LogicId::ALL {
        let m = single(logic, &["p"], &[]);
        let v = solve("p & ~p", &m, ExtensionPolicy::Grow, logic).unwrap();
        assert_eq!(v.status, Status::Closed);
        assert!(v.model.is_none());
    }
}

#[test]
fn sat_mode_recovers_satisfiability() {
    let run = solve_sat(&parse("<>p", LogicId::K).unwrap(), LogicId::K, false).unwrap();
    assert_eq!(run.verdict.status, Status::Open);
    let run = solve_sat(&parse("<>p & []q", LogicId::K).unwrap(), LogicId::K, false).unwrap();
    assert_eq!(run.verdict.model.unwrap().model.len(), 2);
}

#[test]
fn complete_policy_is_model_checking() {
    let m = PartialModel::builder(LogicId::Ctl, ["p"])
        .state("s", ["p"])
        .state("t", Vec::<String>::new())
        .transition("s", "t")
        .transition("t", "t")
        .root("s")
        .build()
        .unwrap();
    let v = solve("AG p", &m, ExtensionPolicy::Complete, LogicId::Ctl).unwrap();
    assert_eq!(v.status, Status::Closed);
    let v = solve("EX ~p", &m, ExtensionPolicy::Complete, LogicId::Ctl).unwrap();
    assert_eq!(v.status, Status::Open);
}

#[test]
fn complete_policy_rejects_dead_ends() {
    let m = single(LogicId::Ctl, &["p"], &["p"]);
    assert!(matches!(
        solve("p", &m, ExtensionPolicy::Complete, LogicId::Ctl),
        Err(Error::NonSerial(_))
    ));
    assert!(matches!(
        solve("p", &m, ExtensionPolicy::FixedStates, LogicId::Ctl),
        Err(Error::Policy { .. })
    ));
}

#[test]
fn mcpm_examples() {
    let m = single(LogicId::K, &["q"], &["q"]);
    let f = |t: &str| parse(t, LogicId::K).unwrap();
    assert!(decide_mcpm(&f("p | ~p"), &m, ExtensionPolicy::Grow, LogicId::K).unwrap());
    assert!(decide_mcpm(&f("q"), &m, ExtensionPolicy::Grow, LogicId::K).unwrap());
    assert!(!decide_mcpm(&f("[]q"), &m, ExtensionPolicy::Grow, LogicId::K).unwrap());
    assert!(decide_epm(&f("[]q"), &m, ExtensionPolicy::Grow, LogicId::K).unwrap());
}

#[test]
fn wrong_logic_and_mismatched_model() {
    let m = single(LogicId::Ltl, &["p"], &[]);
    assert!(matches!(
        solve("EX p", &m, ExtensionPolicy::Grow, LogicId::Ltl),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        solve("EX p", &m, ExtensionPolicy::Grow, LogicId::Ctl),
        Err(Error::LogicMismatch { .. })
    ));
}

#[test]
fn fresh_atoms_are_false_on_original_states() {
    let m = single(LogicId::K, &["p"], &["p"]);
    let v = solve("p & ~r & <>r", &m, ExtensionPolicy::Grow, LogicId::K).unwrap();
    assert_eq!(v.status, Status::Open);
    assert!(v.model.unwrap().model.atoms().contains(&"r".to_string()));
    assert_eq!(
        solve("r", &m, ExtensionPolicy::Grow, LogicId::K)
            .unwrap()
            .status,
        Status::Closed
    );
}
