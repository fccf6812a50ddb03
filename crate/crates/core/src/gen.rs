//! Seeded random formulas and models for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::models::PartialModel;
use crate::syntax::{Formula, LogicId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn leaf(rng: &mut impl Rng, atoms: &[&str]) -> Formula {
    let a = Formula::atom(*atoms.choose(rng).expect("at least one atom"));
    match rng.gen_range(0..10) {
        0..=5 => a,
        6..=8 => Formula::not(a),
        _ => {
            if rng.gen_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            }
        }
    }
}

/// A formula of `logic` over `atoms` with syntax-tree depth at most `depth`.
pub fn formula(rng: &mut impl Rng, logic: LogicId, atoms: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, atoms);
    }
    let d = depth - 1;
    let sub = |rng: &mut _| formula(rng, logic, atoms, d);
    match rng.gen_range(0..4) {
        0 => {
            let (a, b) = (sub(rng), sub(rng));
            match rng.gen_range(0..5) {
                0 | 1 => Formula::and(a, b),
                2 | 3 => Formula::or(a, b),
                _ => Formula::imp(a, b),
            }
        }
        1 if rng.gen_bool(0.3) => Formula::not(sub(rng)),
        _ => match logic {
            LogicId::K => {
                if rng.gen_bool(0.5) {
                    Formula::boxed(sub(rng))
                } else {
                    Formula::diamond(sub(rng))
                }
            }
            LogicId::Ltl => match rng.gen_range(0..5) {
                0 => Formula::next(sub(rng)),
                1 => Formula::eventually(sub(rng)),
                2 => Formula::always(sub(rng)),
                3 => Formula::until(sub(rng), sub(rng)),
                _ => Formula::release(sub(rng), sub(rng)),
            },
            LogicId::Ctl => match rng.gen_range(0..8) {
                0 => Formula::ex(sub(rng)),
                1 => Formula::ax(sub(rng)),
                2 => Formula::ef(sub(rng)),
                3 => Formula::af(sub(rng)),
                4 => Formula::eg(sub(rng)),
                5 => Formula::ag(sub(rng)),
                6 => Formula::eu(sub(rng), sub(rng)),
                _ => Formula::au(sub(rng), sub(rng)),
            },
        },
    }
}

fn label(rng: &mut impl Rng, atoms: &[&str]) -> Vec<String> {
    atoms
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|a| a.to_string())
        .collect()
}

/// A partial model with `states` states `s0, s1, ...` rooted at `s0`.
///
/// K and CTL graphs are arbitrary with edge probability `density`; LTL
/// models are chains that loop back with probability `density`.
pub fn partial_model(
    rng: &mut impl Rng,
    logic: LogicId,
    atoms: &[&str],
    states: usize,
    density: f64,
) -> PartialModel {
    let mut b = PartialModel::builder(logic, atoms.iter().copied()).root("s0");
    for i in 0..states {
        b = b.state(format!("s{i}"), label(rng, atoms));
    }
    match logic {
        LogicId::Ltl => {
            for i in 1..states {
                b = b.transition(format!("s{}", i - 1), format!("s{i}"));
            }
            if rng.gen_bool(density) {
                let back = rng.gen_range(0..states);
                b = b.transition(format!("s{}", states - 1), format!("s{back}"));
            }
        }
        _ => {
            for i in 0..states {
                for j in 0..states {
                    if rng.gen_bool(density) {
                        b = b.transition(format!("s{i}"), format!("s{j}"));
                    }
                }
            }
        }
    }
    b.build().expect("generated models are valid")
}

/// A complete model: serial for CTL, a lasso for LTL, arbitrary for K.
pub fn complete_model(
    rng: &mut impl Rng,
    logic: LogicId,
    atoms: &[&str],
    states: usize,
) -> PartialModel {
    let mut b = PartialModel::builder(logic, atoms.iter().copied()).root("s0");
    for i in 0..states {
        b = b.state(format!("s{i}"), label(rng, atoms));
    }
    match logic {
        LogicId::Ltl => {
            for i in 1..states {
                b = b.transition(format!("s{}", i - 1), format!("s{i}"));
            }
            let back = rng.gen_range(0..states);
            b = b.transition(format!("s{}", states - 1), format!("s{back}"));
        }
        _ => {
            for i in 0..states {
                let mut any = false;
                for j in 0..states {
                    if rng.gen_bool(0.4) {
                        b = b.transition(format!("s{i}"), format!("s{j}"));
                        any = true;
                    }
                }
                if !any && logic == LogicId::Ctl {
                    let j = rng.gen_range(0..states);
                    b = b.transition(format!("s{i}"), format!("s{j}"));
                }
            }
        }
    }
    b.build().expect("generated models are valid")
}
