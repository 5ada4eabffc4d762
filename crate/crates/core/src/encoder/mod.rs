//! SAT encoding of "a CTL formula of size `n` consistent with a sample".
//!
//! The instance is the conjunction of four constraint groups:
//!
//! * structural: every node carries exactly one label, every node above
//!   node 1 exactly one left and one right child with a smaller identifier,
//!   and node 1 is a proposition;
//! * semantic: `y(M,i,s)` is true iff the subformula rooted at node `i`
//!   holds in state `s` of structure `M`, with the `EU`/`EG` fixed points
//!   unrolled through `|S|+1` step variables;
//! * consistency: the root holds in every initial state of each positive
//!   structure and fails in some initial state of each negative one;
//! * blocking: the solution is not one of the discarded syntax DAGs.
//!
//! Constraint groups are kept as [`Prop`] formulas and lowered to CNF once.

mod dimacs;
mod pool;
mod prop;
mod solver;

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::ctl::{CtlFormula, DagNode, NodeLabel, SyntaxDag};
use crate::kripke::Proposition;
use crate::learner::Sample;

pub use dimacs::write_dimacs;
pub use pool::VarPool;
pub use prop::{Clause, Lit, Lowering, Prop, Var};
pub use solver::{
    Assignment, BackendFailure, BatsatBackend, SatBackend, Session, SolveOutcome, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("structure {structure} does not declare proposition `{prop}` of the sample alphabet")]
    AlphabetMismatch { structure: usize, prop: String },
    #[error("the sample alphabet is empty")]
    EmptyAlphabet,
    #[error("the node budget must be at least 1")]
    ZeroBudget,
}

/// A node label: a proposition (index into the sample alphabet) or one of
/// the six operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Prop(usize),
    Not,
    And,
    Or,
    ExistsNext,
    ExistsUntil,
    ExistsGlobally,
}

pub const OPERATORS: [Label; 6] = [
    Label::Not,
    Label::And,
    Label::Or,
    Label::ExistsNext,
    Label::ExistsUntil,
    Label::ExistsGlobally,
];

/// Propositions first, then the operators.
pub fn labels(num_props: usize) -> Vec<Label> {
    (0..num_props).map(Label::Prop).chain(OPERATORS).collect()
}

impl Label {
    fn symbol(self, alphabet: &[Proposition]) -> String {
        match self {
            Label::Prop(p) => alphabet[p].to_string(),
            Label::Not => "!".into(),
            Label::And => "&".into(),
            Label::Or => "|".into(),
            Label::ExistsNext => "EX".into(),
            Label::ExistsUntil => "EU".into(),
            Label::ExistsGlobally => "EG".into(),
        }
    }

    fn from_node(label: &NodeLabel, alphabet: &[Proposition]) -> Option<Label> {
        Some(match label {
            NodeLabel::Prop(p) => Label::Prop(alphabet.iter().position(|a| a.as_str() == p)?),
            NodeLabel::Not => Label::Not,
            NodeLabel::And => Label::And,
            NodeLabel::Or => Label::Or,
            NodeLabel::ExistsNext => Label::ExistsNext,
            NodeLabel::ExistsUntil => Label::ExistsUntil,
            NodeLabel::ExistsGlobally => Label::ExistsGlobally,
        })
    }

    fn to_node(self, alphabet: &[Proposition]) -> NodeLabel {
        match self {
            Label::Prop(p) => NodeLabel::Prop(alphabet[p].to_string()),
            Label::Not => NodeLabel::Not,
            Label::And => NodeLabel::And,
            Label::Or => NodeLabel::Or,
            Label::ExistsNext => NodeLabel::ExistsNext,
            Label::ExistsUntil => NodeLabel::ExistsUntil,
            Label::ExistsGlobally => NodeLabel::ExistsGlobally,
        }
    }
}

/// Semantic variables of the encoding. `model` indexes the sample's
/// structures, positives first; nodes and steps are 1-based, states 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemVar {
    /// `x(i, λ)`: node `i` carries label `λ`.
    Label { node: usize, label: Label },
    /// `l(i, j)`: the left child of node `i` is node `j`.
    Left { node: usize, child: usize },
    /// `r(i, j)`
    Right { node: usize, child: usize },
    /// `y(M, i, s)`
    Holds {
        model: usize,
        node: usize,
        state: usize,
    },
    /// `y(M, i, s, k)`: state `s` is in the `k`-th fixed-point estimate.
    Step {
        model: usize,
        node: usize,
        state: usize,
        k: usize,
    },
}

/// Declares every semantic variable of `Ω^S_n` in a fixed order.
pub fn declare_variables(n: usize, sample: &Sample) -> VarPool<SemVar> {
    let mut pool = VarPool::new();
    let all_labels = labels(sample.alphabet().len());
    for node in 1..=n {
        for &label in &all_labels {
            pool.declare(SemVar::Label { node, label });
        }
    }
    for node in 2..=n {
        for child in 1..node {
            pool.declare(SemVar::Left { node, child });
        }
        for child in 1..node {
            pool.declare(SemVar::Right { node, child });
        }
    }
    for (model, m) in sample.structures().enumerate() {
        for node in 1..=n {
            for state in m.states() {
                pool.declare(SemVar::Holds { model, node, state });
            }
        }
    }
    for (model, m) in sample.structures().enumerate() {
        for node in 1..=n {
            for state in m.states() {
                for k in 1..=m.num_states() + 1 {
                    pool.declare(SemVar::Step {
                        model,
                        node,
                        state,
                        k,
                    });
                }
            }
        }
    }
    pool
}

fn exactly_one(lits: &[Lit], out: &mut Vec<Prop>) {
    out.push(Prop::or(lits.iter().map(|&l| Prop::Lit(l))));
    for (a, &la) in lits.iter().enumerate() {
        for &lb in &lits[a + 1..] {
            out.push(Prop::or([Prop::Lit(!la), Prop::Lit(!lb)]));
        }
    }
}

/// Label uniqueness, child uniqueness and the node-1 proposition constraint.
pub fn build_structural(n: usize, num_props: usize, pool: &VarPool<SemVar>) -> Vec<Prop> {
    let mut out = Vec::new();
    let all_labels = labels(num_props);
    for node in 1..=n {
        let xs: Vec<Lit> = all_labels
            .iter()
            .map(|&label| pool.lit(&SemVar::Label { node, label }))
            .collect();
        exactly_one(&xs, &mut out);
    }
    for node in 2..=n {
        let ls: Vec<Lit> = (1..node)
            .map(|child| pool.lit(&SemVar::Left { node, child }))
            .collect();
        exactly_one(&ls, &mut out);
        let rs: Vec<Lit> = (1..node)
            .map(|child| pool.lit(&SemVar::Right { node, child }))
            .collect();
        exactly_one(&rs, &mut out);
    }
    out.push(Prop::or((0..num_props).map(|p| {
        Prop::Lit(pool.lit(&SemVar::Label {
            node: 1,
            label: Label::Prop(p),
        }))
    })));
    out
}

/// Guarded equivalences tying `y`/step variables to the SAT-set
/// computation of whichever operator each node carries.
pub fn build_semantic(
    n: usize,
    sample: &Sample,
    pool: &VarPool<SemVar>,
) -> Result<Vec<Prop>, EncodeError> {
    let mut out = Vec::new();
    let alphabet = sample.alphabet();
    for (model, m) in sample.structures().enumerate() {
        let props = alphabet
            .iter()
            .map(|p| {
                m.prop_index(p.as_str())
                    .ok_or_else(|| EncodeError::AlphabetMismatch {
                        structure: model,
                        prop: p.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let y = |node, state| Prop::Lit(pool.lit(&SemVar::Holds { model, node, state }));
        let step = |node, state, k| {
            Prop::Lit(pool.lit(&SemVar::Step {
                model,
                node,
                state,
                k,
            }))
        };
        let x = |node, label| Prop::Lit(pool.lit(&SemVar::Label { node, label }));
        let left = |node, child| Prop::Lit(pool.lit(&SemVar::Left { node, child }));
        let right = |node, child| Prop::Lit(pool.lit(&SemVar::Right { node, child }));
        let last = m.num_states() + 1;

        for i in 1..=n {
            for (a, &local) in props.iter().enumerate() {
                for s in m.states() {
                    let value = if m.has_label(s, local) {
                        y(i, s)
                    } else {
                        Prop::negate(y(i, s))
                    };
                    out.push(Prop::implies(x(i, Label::Prop(a)), value));
                }
            }
            for j in 1..i {
                let guard = |op| Prop::and([x(i, op), left(i, j)]);
                out.push(Prop::implies(
                    guard(Label::Not),
                    Prop::and(
                        m.states()
                            .map(|s| Prop::iff(y(i, s), Prop::negate(y(j, s)))),
                    ),
                ));
                out.push(Prop::implies(
                    guard(Label::ExistsNext),
                    Prop::and(
                        m.states().map(|s| {
                            Prop::iff(y(i, s), Prop::or(m.post(s).iter().map(|&t| y(j, t))))
                        }),
                    ),
                ));
                out.push(Prop::implies(
                    guard(Label::ExistsGlobally),
                    Prop::and(m.states().map(|s| {
                        let mut parts = vec![Prop::iff(step(i, s, 1), y(j, s))];
                        for k in 1..last {
                            parts.push(Prop::iff(
                                step(i, s, k + 1),
                                Prop::and([
                                    y(j, s),
                                    Prop::or(m.post(s).iter().map(|&t| step(i, t, k))),
                                ]),
                            ));
                        }
                        parts.push(Prop::iff(y(i, s), step(i, s, last)));
                        Prop::and(parts)
                    })),
                ));
                for j2 in 1..i {
                    let guard = |op| Prop::and([x(i, op), left(i, j), right(i, j2)]);
                    out.push(Prop::implies(
                        guard(Label::And),
                        Prop::and(
                            m.states()
                                .map(|s| Prop::iff(y(i, s), Prop::and([y(j, s), y(j2, s)]))),
                        ),
                    ));
                    out.push(Prop::implies(
                        guard(Label::Or),
                        Prop::and(
                            m.states()
                                .map(|s| Prop::iff(y(i, s), Prop::or([y(j, s), y(j2, s)]))),
                        ),
                    ));
                    out.push(Prop::implies(
                        guard(Label::ExistsUntil),
                        Prop::and(m.states().map(|s| {
                            let mut parts = vec![Prop::iff(step(i, s, 1), y(j2, s))];
                            for k in 1..last {
                                parts.push(Prop::iff(
                                    step(i, s, k + 1),
                                    Prop::or([
                                        step(i, s, k),
                                        Prop::and([
                                            y(j, s),
                                            Prop::or(m.post(s).iter().map(|&t| step(i, t, k))),
                                        ]),
                                    ]),
                                ));
                            }
                            parts.push(Prop::iff(y(i, s), step(i, s, last)));
                            Prop::and(parts)
                        })),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// The root holds in all initial states of positives and fails in some
/// initial state of each negative.
pub fn build_consistency(n: usize, sample: &Sample, pool: &VarPool<SemVar>) -> Vec<Prop> {
    let mut out = Vec::new();
    let root = |model, state| {
        pool.lit(&SemVar::Holds {
            model,
            node: n,
            state,
        })
    };
    let split = sample.positives().len();
    for (model, m) in sample.structures().enumerate() {
        if model < split {
            for &s in m.initial() {
                out.push(Prop::Lit(root(model, s)));
            }
        } else {
            out.push(Prop::or(
                m.initial().iter().map(|&s| Prop::Lit(!root(model, s))),
            ));
        }
    }
    out
}

/// The x/l/r literals that spell out `dag` as an `n`-node labeling, or
/// `None` when `dag` has a different node count or uses a proposition
/// outside the alphabet. Unused child slots are left open.
pub fn labeling_literals(
    n: usize,
    dag: &SyntaxDag,
    alphabet: &[Proposition],
    pool: &VarPool<SemVar>,
) -> Option<Vec<Lit>> {
    if dag.len() != n {
        return None;
    }
    let mut lits = Vec::new();
    for (node, dn) in dag.iter() {
        let label = Label::from_node(&dn.label, alphabet)?;
        lits.push(pool.lit(&SemVar::Label { node, label }));
        if let Some(child) = dn.left {
            lits.push(pool.lit(&SemVar::Left { node, child }));
        }
        if let Some(child) = dn.right {
            lits.push(pool.lit(&SemVar::Right { node, child }));
        }
    }
    Some(lits)
}

/// One blocking clause per discarded DAG with exactly `n` nodes.
pub fn build_block(
    n: usize,
    blocked: &[SyntaxDag],
    alphabet: &[Proposition],
    pool: &VarPool<SemVar>,
) -> Vec<Prop> {
    blocked
        .iter()
        .filter_map(|dag| labeling_literals(n, dag, alphabet, pool))
        .map(|lits| Prop::or(lits.into_iter().map(|l| Prop::Lit(!l))))
        .collect()
}

/// The constraint groups of one instance, before CNF lowering.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub structural: Vec<Prop>,
    pub semantic: Vec<Prop>,
    pub consistency: Vec<Prop>,
    pub blocking: Vec<Prop>,
}

impl Constraints {
    pub fn iter(&self) -> impl Iterator<Item = &Prop> {
        self.structural
            .iter()
            .chain(&self.semantic)
            .chain(&self.consistency)
            .chain(&self.blocking)
    }

    /// Evaluates the un-lowered conjunction directly.
    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        self.iter().all(|p| p.eval(value))
    }
}

/// `Ω^S_n ∧ Ω^D` for one node budget, lowered to CNF.
#[derive(Debug, Clone)]
pub struct EncodingInstance<'s> {
    n: usize,
    sample: &'s Sample,
    pool: VarPool<SemVar>,
    constraints: Constraints,
    clauses: Vec<Clause>,
    blocked: Vec<SyntaxDag>,
}

impl<'s> EncodingInstance<'s> {
    pub fn new(n: usize, sample: &'s Sample, blocked: &[SyntaxDag]) -> Result<Self, EncodeError> {
        if n == 0 {
            return Err(EncodeError::ZeroBudget);
        }
        if sample.alphabet().is_empty() {
            return Err(EncodeError::EmptyAlphabet);
        }
        let mut pool = declare_variables(n, sample);
        let constraints = Constraints {
            structural: build_structural(n, sample.alphabet().len(), &pool),
            semantic: build_semantic(n, sample, &pool)?,
            consistency: build_consistency(n, sample, &pool),
            blocking: build_block(n, blocked, sample.alphabet(), &pool),
        };
        let mut fresh = || pool.fresh();
        let mut lowering = Lowering::new(&mut fresh);
        for p in constraints.iter() {
            lowering.add(p);
        }
        let clauses = lowering.clauses;
        Ok(EncodingInstance {
            n,
            sample,
            pool,
            constraints,
            clauses,
            blocked: blocked.to_vec(),
        })
    }

    pub fn budget(&self) -> usize {
        self.n
    }

    pub fn sample(&self) -> &Sample {
        self.sample
    }

    pub fn pool(&self) -> &VarPool<SemVar> {
        &self.pool
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn blocked(&self) -> &[SyntaxDag] {
        &self.blocked
    }

    pub fn num_vars(&self) -> usize {
        self.pool.num_vars()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn lit(&self, v: SemVar) -> Lit {
        self.pool.lit(&v)
    }

    /// Assumptions that pin the x/l/r variables to `dag`.
    pub fn fix_formula(&self, dag: &SyntaxDag) -> Option<Vec<Lit>> {
        labeling_literals(self.n, dag, self.sample.alphabet(), &self.pool)
    }

    pub fn session(&self, config: &SolverConfig) -> Session {
        Session::new(config, self.num_vars(), &self.clauses)
    }

    pub fn solve(&self, config: &SolverConfig) -> Result<SolveOutcome, BackendFailure> {
        self.session(config).solve(&[])
    }

    /// The full `n`-node labeling chosen by `assignment`, unreachable nodes
    /// included.
    pub fn decode_dag(&self, assignment: &Assignment) -> SyntaxDag {
        let alphabet = self.sample.alphabet();
        let all_labels = labels(alphabet.len());
        let nodes = (1..=self.n)
            .map(|node| {
                let label = all_labels
                    .iter()
                    .copied()
                    .find(|&label| assignment.lit(self.lit(SemVar::Label { node, label })))
                    .expect("structural constraints give every node a label");
                let child = |make: fn(usize, usize) -> SemVar| {
                    (1..node).find(|&c| assignment.lit(self.lit(make(node, c))))
                };
                let left = child(|node, child| SemVar::Left { node, child });
                let right = child(|node, child| SemVar::Right { node, child });
                let label = label.to_node(alphabet);
                let (left, right) = match label.arity() {
                    0 => (None, None),
                    1 => (left, None),
                    _ => (left, right),
                };
                DagNode { label, left, right }
            })
            .collect();
        SyntaxDag::from_nodes(nodes).expect("structural constraints give a well-formed DAG")
    }

    /// `Φ^v`: the formula rooted at node `n`.
    pub fn decode(&self, assignment: &Assignment) -> CtlFormula {
        self.decode_dag(assignment).to_formula()
    }

    fn model_tag(&self, model: usize) -> String {
        let split = self.sample.positives().len();
        if model < split {
            format!("P{model}")
        } else {
            format!("N{}", model - split)
        }
    }

    pub fn describe(&self, v: Var) -> Option<String> {
        let alphabet = self.sample.alphabet();
        Some(match *self.pool.key(v)? {
            SemVar::Label { node, label } => format!("x {node} {}", label.symbol(alphabet)),
            SemVar::Left { node, child } => format!("l {node} {child}"),
            SemVar::Right { node, child } => format!("r {node} {child}"),
            SemVar::Holds { model, node, state } => {
                format!("y {} {node} {state}", self.model_tag(model))
            }
            SemVar::Step {
                model,
                node,
                state,
                k,
            } => format!("ystep {} {node} {state} {k}", self.model_tag(model)),
        })
    }

    /// DIMACS export with one comment per semantic variable
    /// (`c x <i> <label> <var>`, ...) and the auxiliary range.
    pub fn write_dimacs<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let mut comments = vec![format!(
            "ctl-infer instance: budget {}, {} positive, {} negative structures",
            self.n,
            self.sample.positives().len(),
            self.sample.negatives().len()
        )];
        for (v, _) in self.pool.iter() {
            comments.push(format!("{} {}", self.describe(v).unwrap(), v.0));
        }
        let first_aux = self.pool.semantic_vars() + 1;
        if self.pool.num_vars() >= first_aux {
            comments.push(format!("aux {}-{}", first_aux, self.pool.num_vars()));
        }
        write_dimacs(out, self.num_vars(), &self.clauses, &comments)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Prop(p) => write!(f, "prop#{p}"),
            other => f.write_str(&other.symbol(&[])),
        }
    }
}
