use super::Formula;

/// Pushes negations down to atoms and eliminates implications.
///
/// Dualities: `[]`/`<>`, `X`/`X`, `U`/`R`, `F`/`G`, `EX`/`AX`, `EF`/`AG`,
/// `AF`/`EG`, `E[U]`/`A[R]` and `A[U]`/`E[R]`. Negation of a formula already
/// in NNF is therefore an involution, which keeps closures finite.
pub fn to_nnf(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) => f.clone(),
        Not(g) => negation_nnf(g),
        And(a, b) => Formula::and(to_nnf(a), to_nnf(b)),
        Or(a, b) => Formula::or(to_nnf(a), to_nnf(b)),
        Imp(a, b) => Formula::or(negation_nnf(a), to_nnf(b)),
        Necessarily(g) => Formula::boxed(to_nnf(g)),
        Possibly(g) => Formula::diamond(to_nnf(g)),
        Next(g) => Formula::next(to_nnf(g)),
        Until(a, b) => Formula::until(to_nnf(a), to_nnf(b)),
        Release(a, b) => Formula::release(to_nnf(a), to_nnf(b)),
        Eventually(g) => Formula::eventually(to_nnf(g)),
        Always(g) => Formula::always(to_nnf(g)),
        Ex(g) => Formula::ex(to_nnf(g)),
        Ax(g) => Formula::ax(to_nnf(g)),
        Eu(a, b) => Formula::eu(to_nnf(a), to_nnf(b)),
        Au(a, b) => Formula::au(to_nnf(a), to_nnf(b)),
        Ef(g) => Formula::ef(to_nnf(g)),
        Af(g) => Formula::af(to_nnf(g)),
        Eg(g) => Formula::eg(to_nnf(g)),
        Ag(g) => Formula::ag(to_nnf(g)),
        Er(a, b) => Formula::er(to_nnf(a), to_nnf(b)),
        Ar(a, b) => Formula::ar(to_nnf(a), to_nnf(b)),
    }
}

/// Negation normal form of `¬f`.
pub fn negation_nnf(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => False,
        False => True,
        Atom(_) => Formula::not(f.clone()),
        Not(g) => to_nnf(g),
        And(a, b) => Formula::or(negation_nnf(a), negation_nnf(b)),
        Or(a, b) => Formula::and(negation_nnf(a), negation_nnf(b)),
        Imp(a, b) => Formula::and(to_nnf(a), negation_nnf(b)),
        Necessarily(g) => Formula::diamond(negation_nnf(g)),
        Possibly(g) => Formula::boxed(negation_nnf(g)),
        Next(g) => Formula::next(negation_nnf(g)),
        Until(a, b) => Formula::release(negation_nnf(a), negation_nnf(b)),
        Release(a, b) => Formula::until(negation_nnf(a), negation_nnf(b)),
        Eventually(g) => Formula::always(negation_nnf(g)),
        Always(g) => Formula::eventually(negation_nnf(g)),
        Ex(g) => Formula::ax(negation_nnf(g)),
        Ax(g) => Formula::ex(negation_nnf(g)),
        Eu(a, b) => Formula::ar(negation_nnf(a), negation_nnf(b)),
        Au(a, b) => Formula::er(negation_nnf(a), negation_nnf(b)),
        Ef(g) => Formula::ag(negation_nnf(g)),
        Af(g) => Formula::eg(negation_nnf(g)),
        Eg(g) => Formula::af(negation_nnf(g)),
        Ag(g) => Formula::ef(negation_nnf(g)),
        Er(a, b) => Formula::au(negation_nnf(a), negation_nnf(b)),
        Ar(a, b) => Formula::eu(negation_nnf(a), negation_nnf(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, LogicId};

    fn a(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn de_morgan() {
        let f = Formula::not(Formula::and(a("p"), a("q")));
        assert_eq!(
            to_nnf(&f),
            Formula::or(Formula::not(a("p")), Formula::not(a("q")))
        );
    }

    #[test]
    fn ltl_until_dual() {
        let f = Formula::not(Formula::until(a("p"), a("q")));
        assert_eq!(
            to_nnf(&f),
            Formula::release(Formula::not(a("p")), Formula::not(a("q")))
        );
    }

    #[test]
    fn ctl_eg_dual() {
        let f = Formula::not(Formula::eg(a("p")));
        assert_eq!(to_nnf(&f), Formula::af(Formula::not(a("p"))));
    }

    #[test]
    fn implication_eliminated() {
        let f = parse("~(p -> []q)", LogicId::K).unwrap();
        assert_eq!(
            to_nnf(&f),
            Formula::and(a("p"), Formula::diamond(Formula::not(a("q"))))
        );
        assert!(to_nnf(&f).is_nnf());
    }

    #[test]
    fn negation_is_involutive_on_nnf() {
        let f = to_nnf(&parse("A[p U ~E[q U (p & AX q)]] | EG ~p", LogicId::Ctl).unwrap());
        assert_eq!(negation_nnf(&negation_nnf(&f)), f);
    }
}
