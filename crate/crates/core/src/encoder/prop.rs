//! Propositional constraint formulas and their CNF lowering.

use std::fmt;
use std::ops::Not;

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

/// A literal in DIMACS convention: `+v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit(v.0 as i32)
    }

    pub fn neg(v: Var) -> Lit {
        Lit(-(v.0 as i32))
    }

    pub fn new(v: Var, positive: bool) -> Lit {
        if positive {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Clause = Vec<Lit>;

/// Propositional formula over pool variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Lit(Lit),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl From<Lit> for Prop {
    fn from(l: Lit) -> Self {
        Prop::Lit(l)
    }
}

impl Prop {
    pub fn var(v: Var) -> Prop {
        Prop::Lit(Lit::pos(v))
    }

    pub fn and(parts: impl IntoIterator<Item = Prop>) -> Prop {
        Prop::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Prop>) -> Prop {
        Prop::Or(parts.into_iter().collect())
    }

    pub fn negate(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Prop, b: Prop) -> Prop {
        Prop::Iff(Box::new(a), Box::new(b))
    }

    /// Direct evaluation under `value`, no CNF involved.
    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Lit(l) => value(l.var()) == l.is_positive(),
            Prop::Not(a) => !a.eval(value),
            Prop::And(ps) => ps.iter().all(|p| p.eval(value)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(value)),
            Prop::Implies(a, b) => !a.eval(value) || b.eval(value),
            Prop::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }
}

#[derive(Debug, Clone)]
enum Nnf {
    Const(bool),
    Lit(Lit),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn nnf(p: &Prop, positive: bool) -> Nnf {
    match p {
        Prop::Const(b) => Nnf::Const(*b == positive),
        Prop::Lit(l) => Nnf::Lit(if positive { *l } else { !*l }),
        Prop::Not(a) => nnf(a, !positive),
        Prop::And(ps) | Prop::Or(ps) => {
            let parts = ps.iter().map(|q| nnf(q, positive)).collect();
            if matches!(p, Prop::And(_)) == positive {
                Nnf::And(parts)
            } else {
                Nnf::Or(parts)
            }
        }
        Prop::Implies(a, b) => {
            if positive {
                Nnf::Or(vec![nnf(a, false), nnf(b, true)])
            } else {
                Nnf::And(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Prop::Iff(a, b) => {
            if positive {
                Nnf::And(vec![
                    Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
                    Nnf::Or(vec![nnf(a, true), nnf(b, false)]),
                ])
            } else {
                Nnf::And(vec![
                    Nnf::Or(vec![nnf(a, true), nnf(b, true)]),
                    Nnf::Or(vec![nnf(a, false), nnf(b, false)]),
                ])
            }
        }
    }
}

/// Structure-preserving CNF lowering with polarity optimization: an
/// auxiliary only implies the subformula it names. The result is
/// equisatisfiable with the input, and every model of the clauses restricted
/// to the original variables satisfies the input.
pub struct Lowering<'a> {
    fresh: &'a mut dyn FnMut() -> Var,
    pub clauses: Vec<Clause>,
}

impl<'a> Lowering<'a> {
    pub fn new(fresh: &'a mut dyn FnMut() -> Var) -> Self {
        Lowering {
            fresh,
            clauses: Vec::new(),
        }
    }

    pub fn add(&mut self, p: &Prop) {
        let n = nnf(p, true);
        self.emit(&mut Vec::new(), &n);
    }

    fn push_clause(&mut self, lits: &[Lit]) {
        let mut clause: Clause = lits.to_vec();
        clause.sort_unstable_by_key(|l| (l.var(), l.is_positive()));
        clause.dedup();
        if clause.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        self.clauses.push(clause);
    }

    // adds clauses for `guard ∨ node`
    fn emit(&mut self, guard: &mut Vec<Lit>, node: &Nnf) {
        match node {
            Nnf::Const(true) => {}
            Nnf::Const(false) => {
                let g = guard.clone();
                self.push_clause(&g);
            }
            Nnf::Lit(l) => {
                guard.push(*l);
                let g = guard.clone();
                self.push_clause(&g);
                guard.pop();
            }
            Nnf::And(parts) => {
                for part in parts {
                    self.emit(guard, part);
                }
            }
            Nnf::Or(_) => {
                let mut lits = Vec::new();
                let mut complex = Vec::new();
                if flatten_or(node, &mut lits, &mut complex) {
                    return;
                }
                let base = guard.len();
                guard.extend(lits);
                if let Some((last, rest)) = complex.split_last() {
                    for part in rest {
                        let aux = Lit::pos((self.fresh)());
                        self.emit(&mut vec![!aux], part);
                        guard.push(aux);
                    }
                    self.emit(guard, last);
                } else {
                    let g = guard.clone();
                    self.push_clause(&g);
                }
                guard.truncate(base);
            }
        }
    }
}

/// Collects the literal and conjunctive disjuncts of a disjunction.
/// Returns true when the disjunction is trivially true.
fn flatten_or<'n>(node: &'n Nnf, lits: &mut Vec<Lit>, complex: &mut Vec<&'n Nnf>) -> bool {
    match node {
        Nnf::Const(b) => *b,
        Nnf::Lit(l) => {
            lits.push(*l);
            false
        }
        Nnf::Or(parts) => parts.iter().any(|p| flatten_or(p, lits, complex)),
        Nnf::And(parts) if parts.len() == 1 => flatten_or(&parts[0], lits, complex),
        Nnf::And(parts) if parts.is_empty() => true,
        and @ Nnf::And(_) => {
            complex.push(and);
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Prop {
        Prop::var(Var(i))
    }

    fn eval_clauses(clauses: &[Clause], value: &dyn Fn(Var) -> bool) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|l| value(l.var()) == l.is_positive()))
    }

    // equisatisfiable lowering: for every assignment of the original
    // variables, the formula is true iff some extension satisfies the clauses
    fn check_lowering(p: &Prop, orig: u32) {
        let mut next = orig;
        let mut fresh = || {
            next += 1;
            Var(next)
        };
        let mut low = Lowering::new(&mut fresh);
        low.add(p);
        let clauses = low.clauses;
        let total = next;
        let aux = total - orig;
        for bits in 0u32..(1 << orig) {
            let expected = p.eval(&|x: Var| bits >> (x.0 - 1) & 1 == 1);
            let extended = (0u32..(1 << aux)).any(|ab| {
                let value = |x: Var| {
                    if x.0 <= orig {
                        bits >> (x.0 - 1) & 1 == 1
                    } else {
                        ab >> (x.0 - orig - 1) & 1 == 1
                    }
                };
                eval_clauses(&clauses, &value)
            });
            assert_eq!(expected, extended, "{p:?} at {bits:b}");
        }
    }

    #[test]
    fn lowering_is_equisatisfiable() {
        let cases = vec![
            Prop::iff(v(1), Prop::and([v(2), v(3)])),
            Prop::iff(
                v(1),
                Prop::or([Prop::and([v(2), v(3)]), Prop::and([v(3), v(4)])]),
            ),
            Prop::implies(
                Prop::and([v(1), v(2)]),
                Prop::iff(
                    v(3),
                    Prop::or([v(4), Prop::and([v(1), Prop::negate(v(4))])]),
                ),
            ),
            Prop::negate(Prop::iff(v(1), Prop::negate(v(2)))),
            Prop::or([Prop::Const(false), Prop::and([]), v(1)]),
            Prop::and([Prop::Const(false)]),
            Prop::or([]),
        ];
        for p in &cases {
            check_lowering(p, 4);
        }
    }

    #[test]
    fn tautologies_are_dropped() {
        let mut next = 2;
        let mut fresh = || {
            next += 1;
            Var(next)
        };
        let mut low = Lowering::new(&mut fresh);
        low.add(&Prop::or([v(1), Prop::negate(v(1))]));
        assert!(low.clauses.is_empty());
    }
}
