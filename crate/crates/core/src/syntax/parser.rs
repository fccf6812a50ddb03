use thiserror::Error;

use super::{Formula, LogicId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("operator `{operator}` is not part of {logic}")]
    WrongLogic {
        operator: &'static str,
        logic: LogicId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    X,
    F,
    G,
    U,
    R,
    E,
    A,
    Ex,
    Ax,
    Ef,
    Af,
    Eg,
    Ag,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::X => "X",
            Op::F => "F",
            Op::G => "G",
            Op::U => "U",
            Op::R => "R",
            Op::E => "E",
            Op::A => "A",
            Op::Ex => "EX",
            Op::Ax => "AX",
            Op::Ef => "EF",
            Op::Af => "AF",
            Op::Eg => "EG",
            Op::Ag => "AG",
        }
    }

    /// `U`/`R` are also used inside CTL's `E[..]`/`A[..]`; that is decided by
    /// the parser, not here.
    fn logic(self) -> LogicId {
        match self {
            Op::X | Op::F | Op::G | Op::U | Op::R => LogicId::Ltl,
            _ => LogicId::Ctl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    True,
    False,
    Not,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Box,
    Dia,
    Op(Op),
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Atom(a) => format!("atom `{a}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Imp => "`->`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Box => "`[]`".into(),
        Tok::Dia => "`<>`".into(),
        Tok::Op(op) => format!("`{}`", op.name()),
    }
}

fn syntax(position: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        position,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'~' | b'!' => {
                out.push((i, Tok::Not));
                i += 1;
            }
            b'&' => {
                out.push((i, Tok::And));
                i += 1;
            }
            b'|' => {
                out.push((i, Tok::Or));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Tok::Imp));
                i += 2;
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                out.push((i, Tok::Box));
                i += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Tok::Dia));
                i += 2;
            }
            b'[' => {
                out.push((i, Tok::LBrack));
                i += 1;
            }
            b']' => {
                out.push((i, Tok::RBrack));
                i += 1;
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    start,
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Atom(word.to_string()),
                    },
                ));
            }
            b'A'..=b'Z' => {
                // A run of capitals is split greedily into operators so that
                // `AGEF` and `XX` read as `AG EF` and `X X`.
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_uppercase() {
                    i += 1;
                }
                let run = &text[start..i];
                let mut j = 0;
                while j < run.len() {
                    let pair = run.get(j..j + 2);
                    let two = match pair {
                        Some("EX") => Some(Op::Ex),
                        Some("AX") => Some(Op::Ax),
                        Some("EF") => Some(Op::Ef),
                        Some("AF") => Some(Op::Af),
                        Some("EG") => Some(Op::Eg),
                        Some("AG") => Some(Op::Ag),
                        _ => None,
                    };
                    if let Some(op) = two {
                        out.push((start + j, Tok::Op(op)));
                        j += 2;
                        continue;
                    }
                    let op = match &run[j..j + 1] {
                        "X" => Op::X,
                        "F" => Op::F,
                        "G" => Op::G,
                        "U" => Op::U,
                        "R" => Op::R,
                        "E" => Op::E,
                        "A" => Op::A,
                        other => {
                            return Err(syntax(start + j, format!("unknown operator `{other}`")))
                        }
                    };
                    out.push((start + j, Tok::Op(op)));
                    j += 1;
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    logic: LogicId,
    /// Set while parsing the left operand of CTL `E[..]`/`A[..]`, where a
    /// bare `U`/`R` ends the operand instead of being an LTL operator.
    path_operand: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(
                at,
                format!("expected {}, found {}", describe(&want), describe(&t)),
            )),
            None => Err(syntax(
                at,
                format!("expected {}, found end of input", describe(&want)),
            )),
        }
    }

    fn check_logic(&self, name: &'static str, owner: LogicId, at: usize) -> Result<(), ParseError> {
        if owner != self.logic {
            return Err(ParseError {
                position: at,
                kind: ParseErrorKind::WrongLogic {
                    operator: name,
                    logic: self.logic,
                },
            });
        }
        Ok(())
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Imp) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let g = self.conjunction()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.temporal_binary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let g = self.temporal_binary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    /// LTL `U`/`R`: tighter than `&`, right associative.
    fn temporal_binary(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if let Some(Tok::Op(op @ (Op::U | Op::R))) = self.peek().cloned() {
            if self.path_operand && self.logic == LogicId::Ctl {
                return Ok(lhs);
            }
            let at = self.offset();
            self.check_logic(op.name(), LogicId::Ltl, at)?;
            self.bump();
            let rhs = self.temporal_binary()?;
            return Ok(match op {
                Op::U => Formula::until(lhs, rhs),
                _ => Formula::release(lhs, rhs),
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(syntax(at, "unexpected end of input"));
        };
        match tok {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Box | Tok::Dia => {
                let name = if tok == Tok::Box { "[]" } else { "<>" };
                self.check_logic(name, LogicId::K, at)?;
                self.bump();
                let f = self.unary()?;
                Ok(if tok == Tok::Box {
                    Formula::boxed(f)
                } else {
                    Formula::diamond(f)
                })
            }
            Tok::Op(op @ (Op::E | Op::A)) => {
                self.check_logic(
                    if op == Op::E { "E[..]" } else { "A[..]" },
                    LogicId::Ctl,
                    at,
                )?;
                self.bump();
                self.expect(Tok::LBrack)?;
                let outer = std::mem::replace(&mut self.path_operand, true);
                let lhs = self.implication();
                self.path_operand = false;
                let lhs = lhs?;
                let kind_at = self.offset();
                let kind = match self.bump() {
                    Some(Tok::Op(k @ (Op::U | Op::R))) => k,
                    Some(t) => {
                        return Err(syntax(
                            kind_at,
                            format!("expected `U` or `R`, found {}", describe(&t)),
                        ))
                    }
                    None => return Err(syntax(kind_at, "expected `U` or `R`, found end of input")),
                };
                let rhs = self.implication();
                self.path_operand = outer;
                let rhs = rhs?;
                self.expect(Tok::RBrack)?;
                Ok(match (op, kind) {
                    (Op::E, Op::U) => Formula::eu(lhs, rhs),
                    (Op::A, Op::U) => Formula::au(lhs, rhs),
                    (Op::E, _) => Formula::er(lhs, rhs),
                    _ => Formula::ar(lhs, rhs),
                })
            }
            Tok::Op(op @ (Op::U | Op::R)) => Err(match self.logic {
                LogicId::Ltl => syntax(at, format!("`{}` needs a left operand", op.name())),
                logic => ParseError {
                    position: at,
                    kind: ParseErrorKind::WrongLogic {
                        operator: op.name(),
                        logic,
                    },
                },
            }),
            Tok::Op(op) => {
                self.check_logic(op.name(), op.logic(), at)?;
                self.bump();
                let f = self.unary()?;
                Ok(match op {
                    Op::X => Formula::next(f),
                    Op::F => Formula::eventually(f),
                    Op::G => Formula::always(f),
                    Op::Ex => Formula::ex(f),
                    Op::Ax => Formula::ax(f),
                    Op::Ef => Formula::ef(f),
                    Op::Af => Formula::af(f),
                    Op::Eg => Formula::eg(f),
                    Op::Ag => Formula::ag(f),
                    _ => unreachable!("handled above"),
                })
            }
            Tok::Atom(a) => {
                self.bump();
                Ok(Formula::Atom(a))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let outer = std::mem::replace(&mut self.path_operand, false);
                let f = self.implication();
                self.path_operand = outer;
                let f = f?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => Err(syntax(at, format!("unexpected {}", describe(&other)))),
        }
    }
}

/// Parses `text` as a formula of `logic`.
///
/// Precedence, loosest first: `->` (right associative), `|`, `&`, LTL `U`/`R`
/// (right associative), then the prefix operators.
pub fn parse(text: &str, logic: LogicId) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        logic,
        path_operand: false,
    };
    let f = p.implication()?;
    if let Some(t) = p.peek().cloned() {
        return Err(syntax(
            p.offset(),
            format!("unexpected {} after formula", describe(&t)),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn ctl_example() {
        let f = parse("AG(p -> EX q)", LogicId::Ctl).unwrap();
        assert_eq!(f, Formula::ag(Formula::imp(p("p"), Formula::ex(p("q")))));
    }

    #[test]
    fn k_example() {
        let f = parse("<>p & []~p", LogicId::K).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::diamond(p("p")),
                Formula::boxed(Formula::not(p("p")))
            )
        );
    }

    #[test]
    fn wrong_logic_is_named() {
        let err = parse("EX p", LogicId::Ltl).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::WrongLogic {
                operator: "EX",
                logic: LogicId::Ltl
            }
        );
        assert_eq!(err.position, 0);
        let err = parse("p & <>q", LogicId::Ctl).unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::WrongLogic { operator: "<>", .. }
        ));
        assert_eq!(err.position, 4);
        let err = parse("p U q", LogicId::Ctl).unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::WrongLogic { operator: "U", .. }
        ));
    }

    #[test]
    fn precedence() {
        // ~ binds tighter than the temporal prefixes, which bind tighter than U,
        // which binds tighter than &.
        let f = parse("~p U q & r", LogicId::Ltl).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::until(Formula::not(p("p")), p("q")), p("r"))
        );
        let f = parse("p -> q -> r", LogicId::K).unwrap();
        assert_eq!(f, Formula::imp(p("p"), Formula::imp(p("q"), p("r"))));
        let f = parse("p | q & r", LogicId::K).unwrap();
        assert_eq!(f, Formula::or(p("p"), Formula::and(p("q"), p("r"))));
        let f = parse("p U q U r", LogicId::Ltl).unwrap();
        assert_eq!(f, Formula::until(p("p"), Formula::until(p("q"), p("r"))));
        let f = parse("X p U q", LogicId::Ltl).unwrap();
        assert_eq!(f, Formula::until(Formula::next(p("p")), p("q")));
    }

    #[test]
    fn capital_runs_split() {
        assert_eq!(
            parse("AGEF p", LogicId::Ctl).unwrap(),
            Formula::ag(Formula::ef(p("p")))
        );
        assert_eq!(
            parse("XX p", LogicId::Ltl).unwrap(),
            Formula::next(Formula::next(p("p")))
        );
    }

    #[test]
    fn ctl_until_forms() {
        assert_eq!(
            parse("E[p U q] & A[p | q U ~q]", LogicId::Ctl).unwrap(),
            Formula::and(
                Formula::eu(p("p"), p("q")),
                Formula::au(Formula::or(p("p"), p("q")), Formula::not(p("q")))
            )
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("p & (q | ", LogicId::K).unwrap_err();
        assert_eq!(err.position, 9);
        let err = parse("p $ q", LogicId::K).unwrap_err();
        assert_eq!(err.position, 2);
        let err = parse("p q", LogicId::K).unwrap_err();
        assert_eq!(err.position, 2);
        let err = parse("E[p q]", LogicId::Ctl).unwrap_err();
        assert_eq!(err.position, 4);
    }
}
