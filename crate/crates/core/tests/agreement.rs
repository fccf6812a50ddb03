//! Random sweep: the tableau against bounded enumeration.

use tabsynth_core::gen;
use tabsynth_core::models::ExtensionPolicy;
use tabsynth_core::oracle::{oracle_epm, EnumerationBudget};
use tabsynth_core::solver::{solve_formula, SolveOptions};
use tabsynth_core::syntax::LogicId;

fn sweep(logic: LogicId, seed: u64, cases: usize, budget: usize) {
    let mut rng = gen::rng(seed);
    let atoms = ["p", "q"];
    let budget = EnumerationBudget::new(budget).unwrap();
    for case in 0..cases {
        let phi = gen::formula(&mut rng, logic, &atoms, 3);
        let m = gen::partial_model(&mut rng, logic, &atoms, 1 + case % 2, 0.4);
        let run = solve_formula(&phi, &m, logic, SolveOptions::default())
            .unwrap_or_else(|e| panic!("{logic} {phi}: {e}"));
        let oracle = oracle_epm(&phi, &m, ExtensionPolicy::Grow, budget, logic).unwrap();
        if oracle.value {
            assert!(
                run.verdict.is_open(),
                "{logic} case {case}: {phi} over {m:?} has a witness {:?}",
                oracle.witness
            );
        }
    }
}

#[test]
fn k_agrees_with_enumeration() {
    sweep(LogicId::K, 1, 150, 2);
}

#[test]
fn ctl_agrees_with_enumeration() {
    sweep(LogicId::Ctl, 2, 150, 2);
}

#[test]
fn ltl_agrees_with_enumeration() {
    sweep(LogicId::Ltl, 3, 150, 2);
}
