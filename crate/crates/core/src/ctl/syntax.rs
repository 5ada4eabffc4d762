//! Concrete syntax for CTL.
//!
//! Precedence, tightest first: prefix operators (`!`, `EX`, `EG`, `EF`,
//! `AX`, `AG`, `AF`), then `&`, `|`, `->`. `&` and `|` associate to the left,
//! `->` to the right. Until is written `E[f U g]` / `A[f U g]`.

use thiserror::Error;

use super::CtlFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: expected {expected}")]
pub struct ParseError {
    pub column: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    E,
    A,
    U,
    Ex,
    Eg,
    Ef,
    Ax,
    Ag,
    Af,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let column = i + 1;
        let c = chars[i];
        let single = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, column));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, column));
            i += 2;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "E" => Tok::E,
                "A" => Tok::A,
                "U" => Tok::U,
                "EX" => Tok::Ex,
                "EG" => Tok::Eg,
                "EF" => Tok::Ef,
                "AX" => Tok::Ax,
                "AG" => Tok::Ag,
                "AF" => Tok::Af,
                _ => Tok::Ident(word),
            };
            out.push((tok, column));
        } else {
            return Err(ParseError {
                column,
                expected: "a formula token".into(),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            expected: expected.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn implication(&mut self) -> Result<CtlFormula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(CtlFormula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<CtlFormula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = CtlFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<CtlFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = CtlFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CtlFormula, ParseError> {
        let ctor: fn(CtlFormula) -> CtlFormula = match self.peek() {
            Some(Tok::Not) => CtlFormula::not,
            Some(Tok::Ex) => CtlFormula::ex,
            Some(Tok::Eg) => CtlFormula::eg,
            Some(Tok::Ef) => CtlFormula::ef,
            Some(Tok::Ax) => CtlFormula::ax,
            Some(Tok::Ag) => CtlFormula::ag,
            Some(Tok::Af) => CtlFormula::af,
            _ => return self.atom(),
        };
        self.pos += 1;
        Ok(ctor(self.unary()?))
    }

    fn atom(&mut self) -> Result<CtlFormula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("a formula");
        };
        self.pos += 1;
        match tok {
            Tok::True => Ok(CtlFormula::True),
            Tok::False => Ok(CtlFormula::False),
            Tok::Ident(name) => Ok(CtlFormula::Prop(name)),
            Tok::LParen => {
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::E | Tok::A => {
                self.expect(Tok::LBracket, "`[`")?;
                let lhs = self.implication()?;
                self.expect(Tok::U, "`U`")?;
                let rhs = self.implication()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(if tok == Tok::E {
                    CtlFormula::eu(lhs, rhs)
                } else {
                    CtlFormula::au(lhs, rhs)
                })
            }
            _ => {
                self.pos -= 1;
                self.fail("a formula")
            }
        }
    }
}

pub fn parse_ctl(text: &str) -> Result<CtlFormula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.chars().count() + 1,
    };
    let f = parser.implication()?;
    if parser.pos != parser.toks.len() {
        return parser.fail("end of formula");
    }
    Ok(f)
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const PREFIX: u8 = 4;
const ATOM: u8 = 5;

/// Prints with the fewest parentheses that still parse back to `f`.
pub fn print_ctl(f: &CtlFormula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

fn write(f: &CtlFormula, context: u8, out: &mut String) {
    use CtlFormula::*;
    let prec = match f {
        Implies(..) => IMPLIES,
        Or(..) => OR,
        And(..) => AND,
        Not(_) | ExistsNext(_) | ExistsGlobally(_) | ExistsFinally(_) | ForallNext(_)
        | ForallGlobally(_) | ForallFinally(_) => PREFIX,
        _ => ATOM,
    };
    let wrap = prec < context;
    if wrap {
        out.push('(');
    }
    let infix = |out: &mut String, a: &CtlFormula, op: &str, b: &CtlFormula, l: u8, r: u8| {
        write(a, l, out);
        out.push_str(op);
        write(b, r, out);
    };
    let prefix = |out: &mut String, op: &str, a: &CtlFormula| {
        out.push_str(op);
        write(a, PREFIX, out);
    };
    let until = |out: &mut String, q: &str, a: &CtlFormula, b: &CtlFormula| {
        out.push_str(q);
        out.push('[');
        write(a, 0, out);
        out.push_str(" U ");
        write(b, 0, out);
        out.push(']');
    };
    match f {
        True => out.push_str("true"),
        False => out.push_str("false"),
        Prop(p) => out.push_str(p),
        Implies(a, b) => infix(out, a, " -> ", b, OR, IMPLIES),
        Or(a, b) => infix(out, a, " | ", b, OR, AND),
        And(a, b) => infix(out, a, " & ", b, AND, PREFIX),
        Not(a) => prefix(out, "!", a),
        ExistsNext(a) => prefix(out, "EX ", a),
        ExistsGlobally(a) => prefix(out, "EG ", a),
        ExistsFinally(a) => prefix(out, "EF ", a),
        ForallNext(a) => prefix(out, "AX ", a),
        ForallGlobally(a) => prefix(out, "AG ", a),
        ForallFinally(a) => prefix(out, "AF ", a),
        ExistsUntil(a, b) => until(out, "E", a, b),
        ForallUntil(a, b) => until(out, "A", a, b),
    }
    if wrap {
        out.push(')');
    }
}
