//! Bounded model synthesis: search for a Kripke structure with at most `m`
//! states satisfying a CTL formula, and the bounded implication and
//! equivalence checks built on it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::checker;
use crate::ctl::{enf, print_ctl, CtlFormula};
use crate::encoder::{
    BackendFailure, Lowering, Prop, Session, SolveOutcome, SolverConfig, VarPool,
};
use crate::kripke::{KripkeStructure, Proposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Backend(#[from] BackendFailure),
    #[error("internal error: synthesized structure does not satisfy `{formula}`")]
    Inconsistent { formula: String },
    #[error("proposition `{0}` is not in the alphabet")]
    UnknownProposition(String),
    #[error("the state budget must be at least 1")]
    ZeroStates,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthQuery {
    pub formula: CtlFormula,
    pub max_states: usize,
    pub alphabet: Vec<Proposition>,
}

impl SynthQuery {
    pub fn new(formula: CtlFormula, max_states: usize, alphabet: &[Proposition]) -> Self {
        SynthQuery {
            formula,
            max_states,
            alphabet: alphabet.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthOutcome {
    Model(KripkeStructure),
    NoModelUpTo(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    True,
    False,
    Prop(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Ex(usize),
    Eu(usize, usize),
    Eg(usize),
}

fn flatten(
    f: &CtlFormula,
    alphabet: &[Proposition],
    nodes: &mut Vec<Node>,
    memo: &mut HashMap<CtlFormula, usize>,
) -> Result<usize, SynthError> {
    if let Some(&i) = memo.get(f) {
        return Ok(i);
    }
    let mut go = |g: &CtlFormula| flatten(g, alphabet, nodes, memo);
    let node = match f {
        CtlFormula::True => Node::True,
        CtlFormula::False => Node::False,
        CtlFormula::Prop(p) => Node::Prop(
            alphabet
                .iter()
                .position(|a| a.as_str() == p)
                .ok_or_else(|| SynthError::UnknownProposition(p.clone()))?,
        ),
        CtlFormula::Not(a) => Node::Not(go(a)?),
        CtlFormula::And(a, b) => Node::And(go(a)?, go(b)?),
        CtlFormula::Or(a, b) => Node::Or(go(a)?, go(b)?),
        CtlFormula::ExistsNext(a) => Node::Ex(go(a)?),
        CtlFormula::ExistsUntil(a, b) => Node::Eu(go(a)?, go(b)?),
        CtlFormula::ExistsGlobally(a) => Node::Eg(go(a)?),
        other => unreachable!("`{}` survived normalization", print_ctl(other)),
    };
    nodes.push(node);
    memo.insert(f.clone(), nodes.len() - 1);
    Ok(nodes.len() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SynthVar {
    Trans(usize, usize),
    Label(usize, usize),
    Holds(usize, usize),
    Step(usize, usize, usize),
}

fn encode(nodes: &[Node], num_props: usize, n: usize) -> (VarPool<SynthVar>, Vec<Prop>) {
    let mut pool = VarPool::new();
    for s in 0..n {
        for t in 0..n {
            pool.declare(SynthVar::Trans(s, t));
        }
        for p in 0..num_props {
            pool.declare(SynthVar::Label(s, p));
        }
    }
    let last = n + 1;
    for (i, node) in nodes.iter().enumerate() {
        for s in 0..n {
            pool.declare(SynthVar::Holds(i, s));
            if matches!(node, Node::Eu(..) | Node::Eg(_)) {
                for k in 1..=last {
                    pool.declare(SynthVar::Step(i, s, k));
                }
            }
        }
    }

    let v = |key| Prop::Lit(pool.lit(&key));
    let y = |i, s| v(SynthVar::Holds(i, s));
    let step = |i, s, k| v(SynthVar::Step(i, s, k));
    // ⋁_t T(s,t) ∧ f(t)
    let succ = |s, f: &dyn Fn(usize) -> Prop| {
        Prop::or((0..n).map(|t| Prop::and([v(SynthVar::Trans(s, t)), f(t)])))
    };

    let mut out = Vec::new();
    for s in 0..n {
        out.push(Prop::or((0..n).map(|t| v(SynthVar::Trans(s, t)))));
    }
    for (i, &node) in nodes.iter().enumerate() {
        for s in 0..n {
            let c = match node {
                Node::True => y(i, s),
                Node::False => Prop::negate(y(i, s)),
                Node::Prop(p) => Prop::iff(y(i, s), v(SynthVar::Label(s, p))),
                Node::Not(a) => Prop::iff(y(i, s), Prop::negate(y(a, s))),
                Node::And(a, b) => Prop::iff(y(i, s), Prop::and([y(a, s), y(b, s)])),
                Node::Or(a, b) => Prop::iff(y(i, s), Prop::or([y(a, s), y(b, s)])),
                Node::Ex(a) => Prop::iff(y(i, s), succ(s, &|t| y(a, t))),
                Node::Eu(a, b) => {
                    let mut parts = vec![Prop::iff(step(i, s, 1), y(b, s))];
                    for k in 1..last {
                        parts.push(Prop::iff(
                            step(i, s, k + 1),
                            Prop::or([
                                step(i, s, k),
                                Prop::and([y(a, s), succ(s, &|t| step(i, t, k))]),
                            ]),
                        ));
                    }
                    parts.push(Prop::iff(y(i, s), step(i, s, last)));
                    Prop::and(parts)
                }
                Node::Eg(a) => {
                    let mut parts = vec![Prop::iff(step(i, s, 1), y(a, s))];
                    for k in 1..last {
                        parts.push(Prop::iff(
                            step(i, s, k + 1),
                            Prop::and([y(a, s), succ(s, &|t| step(i, t, k))]),
                        ));
                    }
                    parts.push(Prop::iff(y(i, s), step(i, s, last)));
                    Prop::and(parts)
                }
            };
            out.push(c);
        }
    }
    out.push(y(nodes.len() - 1, 0));
    (pool, out)
}

/// Searches budgets `1..=max_states` for a structure with a single initial
/// state `s0` satisfying the formula. Every returned model is re-checked.
pub fn synthesize(q: &SynthQuery, config: &SolverConfig) -> Result<SynthOutcome, SynthError> {
    if q.max_states == 0 {
        return Err(SynthError::ZeroStates);
    }
    let formula = enf(&q.formula);
    let mut nodes = Vec::new();
    flatten(&formula, &q.alphabet, &mut nodes, &mut HashMap::new())?;
    let names: Vec<&str> = q.alphabet.iter().map(Proposition::as_str).collect();
    for n in 1..=q.max_states {
        let (mut pool, constraints) = encode(&nodes, names.len(), n);
        let mut fresh = || pool.fresh();
        let mut lowering = Lowering::new(&mut fresh);
        for c in &constraints {
            lowering.add(c);
        }
        let clauses = lowering.clauses;
        let mut session = Session::new(config, pool.num_vars(), &clauses);
        let SolveOutcome::Sat(a) = session.solve(&[])? else {
            continue;
        };
        let on = |key| a.lit(pool.lit(&key));
        let post: Vec<Vec<usize>> = (0..n)
            .map(|s| (0..n).filter(|&t| on(SynthVar::Trans(s, t))).collect())
            .collect();
        let labels: Vec<Vec<&str>> = (0..n)
            .map(|s| {
                (0..names.len())
                    .filter(|&p| on(SynthVar::Label(s, p)))
                    .map(|p| names[p])
                    .collect()
            })
            .collect();
        let model = KripkeStructure::from_indices(&names, &[0], &post, &labels)
            .expect("totality constraints give a valid structure");
        let verified = checker::holds(&model, &q.formula).unwrap_or(false);
        if !verified {
            return Err(SynthError::Inconsistent {
                formula: print_ctl(&q.formula),
            });
        }
        return Ok(SynthOutcome::Model(model));
    }
    Ok(SynthOutcome::NoModelUpTo(q.max_states))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Implication {
    /// No countermodel within the state budget.
    Holds,
    /// A model of `f & !g`.
    CounterModel(KripkeStructure),
}

/// Bounded check of `f -> g` by synthesizing a model of `f & !g`.
pub fn implies(
    f: &CtlFormula,
    g: &CtlFormula,
    max_states: usize,
    alphabet: &[Proposition],
    config: &SolverConfig,
) -> Result<Implication, SynthError> {
    if *g == CtlFormula::True || *f == CtlFormula::False {
        return Ok(Implication::Holds);
    }
    let q = SynthQuery::new(
        CtlFormula::and(f.clone(), CtlFormula::not(g.clone())),
        max_states,
        alphabet,
    );
    Ok(match synthesize(&q, config)? {
        SynthOutcome::Model(m) => Implication::CounterModel(m),
        SynthOutcome::NoModelUpTo(_) => Implication::Holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The model satisfies `f & !g`.
    Forward,
    /// The model satisfies `g & !f`.
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    CounterModel(Direction, KripkeStructure),
}

pub fn equivalent(
    f: &CtlFormula,
    g: &CtlFormula,
    max_states: usize,
    alphabet: &[Proposition],
    config: &SolverConfig,
) -> Result<Equivalence, SynthError> {
    if let Implication::CounterModel(m) = implies(f, g, max_states, alphabet, config)? {
        return Ok(Equivalence::CounterModel(Direction::Forward, m));
    }
    if let Implication::CounterModel(m) = implies(g, f, max_states, alphabet, config)? {
        return Ok(Equivalence::CounterModel(Direction::Backward, m));
    }
    Ok(Equivalence::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_ctl;
    use crate::kripke::print_kripke;

    fn f(s: &str) -> CtlFormula {
        parse_ctl(s).unwrap()
    }

    fn props(names: &[&str]) -> Vec<Proposition> {
        names
            .iter()
            .map(|n| Proposition::new(*n).unwrap())
            .collect()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn eg_p_in_one_state() {
        let q = SynthQuery::new(f("EG p"), 1, &props(&["p"]));
        match synthesize(&q, &cfg()).unwrap() {
            SynthOutcome::Model(m) => assert_eq!(
                print_kripke(&m),
                "kripke\nprops: p\nstates: s0\ninit: s0\nlabels: s0: p\ntrans: s0 -> s0\n"
            ),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradiction_has_no_model() {
        let q = SynthQuery::new(f("p & !p"), 3, &props(&["p"]));
        assert_eq!(
            synthesize(&q, &cfg()).unwrap(),
            SynthOutcome::NoModelUpTo(3)
        );
    }

    #[test]
    fn branching_needs_two_states() {
        let alphabet = props(&["p"]);
        let one = SynthQuery::new(f("EX p & EX !p"), 1, &alphabet);
        assert_eq!(
            synthesize(&one, &cfg()).unwrap(),
            SynthOutcome::NoModelUpTo(1)
        );
        let two = SynthQuery::new(f("EX p & EX !p"), 2, &alphabet);
        match synthesize(&two, &cfg()).unwrap() {
            SynthOutcome::Model(m) => assert_eq!(m.num_states(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_and_sugar() {
        let alphabet = props(&["p"]);
        let q = SynthQuery::new(f("AG p & AF !p"), 3, &alphabet);
        assert_eq!(
            synthesize(&q, &cfg()).unwrap(),
            SynthOutcome::NoModelUpTo(3)
        );
        let q = SynthQuery::new(f("false"), 2, &alphabet);
        assert_eq!(
            synthesize(&q, &cfg()).unwrap(),
            SynthOutcome::NoModelUpTo(2)
        );
        let q = SynthQuery::new(f("true"), 1, &alphabet);
        assert!(matches!(
            synthesize(&q, &cfg()).unwrap(),
            SynthOutcome::Model(_)
        ));
    }

    #[test]
    fn unknown_proposition() {
        let q = SynthQuery::new(f("r"), 1, &props(&["p"]));
        assert_eq!(
            synthesize(&q, &cfg()),
            Err(SynthError::UnknownProposition("r".into()))
        );
    }

    #[test]
    fn implication_examples() {
        let pq = props(&["p", "q"]);
        assert_eq!(
            implies(&f("p"), &f("p | q"), 3, &pq, &cfg()).unwrap(),
            Implication::Holds
        );
        match implies(&f("p"), &f("EG p"), 2, &pq, &cfg()).unwrap() {
            Implication::CounterModel(m) => {
                assert!(checker::holds(&m, &f("p & !EG p")).unwrap())
            }
            Implication::Holds => panic!(),
        }
        assert_eq!(
            implies(&f("EG p"), &f("EX p"), 4, &pq, &cfg()).unwrap(),
            Implication::Holds
        );
        assert_eq!(
            implies(&f("EG p"), &CtlFormula::True, 1, &pq, &cfg()).unwrap(),
            Implication::Holds
        );
    }

    #[test]
    fn equivalence_examples() {
        let p = props(&["p"]);
        assert_eq!(
            equivalent(&f("p & p"), &f("p"), 3, &p, &cfg()).unwrap(),
            Equivalence::Equivalent
        );
        assert!(matches!(
            equivalent(&f("EX p"), &f("EG p"), 2, &p, &cfg()).unwrap(),
            Equivalence::CounterModel(Direction::Forward, _)
        ));
        let g = f("E[p U EX !p]");
        assert_eq!(
            equivalent(&g, &g, 3, &p, &cfg()).unwrap(),
            Equivalence::Equivalent
        );
    }
}
