//! CTL state formulas.
//!
//! Path formulas only occur fused with a path quantifier, so the AST has one
//! constructor per quantifier/operator pair. `E` operators plus the Boolean
//! core form the existence normal form (ENF) used by the checker and the
//! learner; the `A` operators, `EF`, implication and the constants are sugar
//! removed by [`enf`].

mod dag;
mod enumerate;
mod syntax;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

pub use dag::{syntactically_equal, to_dag, DagError, DagNode, NodeLabel, SyntaxDag};
pub use enumerate::enf_formulas_up_to;
pub use syntax::{parse_ctl, print_ctl, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CtlFormula {
    True,
    False,
    Prop(String),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    ExistsNext(Box<CtlFormula>),
    ExistsUntil(Box<CtlFormula>, Box<CtlFormula>),
    ExistsGlobally(Box<CtlFormula>),
    ExistsFinally(Box<CtlFormula>),
    ForallNext(Box<CtlFormula>),
    ForallUntil(Box<CtlFormula>, Box<CtlFormula>),
    ForallFinally(Box<CtlFormula>),
    ForallGlobally(Box<CtlFormula>),
}

use CtlFormula::*;

impl CtlFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: CtlFormula) -> Self {
        Not(Box::new(f))
    }

    pub fn and(a: CtlFormula, b: CtlFormula) -> Self {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: CtlFormula, b: CtlFormula) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: CtlFormula, b: CtlFormula) -> Self {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn ex(f: CtlFormula) -> Self {
        ExistsNext(Box::new(f))
    }

    pub fn eu(a: CtlFormula, b: CtlFormula) -> Self {
        ExistsUntil(Box::new(a), Box::new(b))
    }

    pub fn eg(f: CtlFormula) -> Self {
        ExistsGlobally(Box::new(f))
    }

    pub fn ef(f: CtlFormula) -> Self {
        ExistsFinally(Box::new(f))
    }

    pub fn ax(f: CtlFormula) -> Self {
        ForallNext(Box::new(f))
    }

    pub fn au(a: CtlFormula, b: CtlFormula) -> Self {
        ForallUntil(Box::new(a), Box::new(b))
    }

    pub fn af(f: CtlFormula) -> Self {
        ForallFinally(Box::new(f))
    }

    pub fn ag(f: CtlFormula) -> Self {
        ForallGlobally(Box::new(f))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&CtlFormula> {
        match self {
            True | False | Prop(_) => vec![],
            Not(a) | ExistsNext(a) | ExistsGlobally(a) | ExistsFinally(a) | ForallNext(a)
            | ForallFinally(a) | ForallGlobally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | ExistsUntil(a, b) | ForallUntil(a, b) => {
                vec![a, b]
            }
        }
    }

    /// The set `sub(f)` of distinct subformulas, including `f`.
    pub fn subformulas(&self) -> HashSet<&CtlFormula> {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f) {
                stack.extend(f.children());
            }
        }
        seen
    }

    /// `|f| = |sub(f)|`, the node count of the syntax DAG.
    pub fn size(&self) -> usize {
        self.subformulas().len()
    }

    /// Proposition names occurring in the formula, sorted.
    pub fn propositions(&self) -> BTreeSet<&str> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Prop(p) => Some(p.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Only `Prop`, `Not`, `And`, `Or`, `EX`, `EU`, `EG` (no constants).
    pub fn is_enf(&self) -> bool {
        match self {
            Prop(_) => true,
            Not(a) | ExistsNext(a) | ExistsGlobally(a) => a.is_enf(),
            And(a, b) | Or(a, b) | ExistsUntil(a, b) => a.is_enf() && b.is_enf(),
            _ => false,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, True | False)
    }
}

/// Rewrites sugar into ENF. `true`/`false` survive as constants.
pub fn enf(f: &CtlFormula) -> CtlFormula {
    rewrite(f, None)
}

/// Like [`enf`], but also eliminates constants: `true` becomes
/// `p | !p` over the given proposition and `false` its negation.
pub fn enf_over(f: &CtlFormula, first_prop: &str) -> CtlFormula {
    rewrite(f, Some(first_prop))
}

fn rewrite(f: &CtlFormula, first_prop: Option<&str>) -> CtlFormula {
    let go = |g: &CtlFormula| rewrite(g, first_prop);
    let neg = |g: &CtlFormula| CtlFormula::not(rewrite(g, first_prop));
    let top = || match first_prop {
        Some(p) => CtlFormula::or(CtlFormula::prop(p), CtlFormula::not(CtlFormula::prop(p))),
        None => True,
    };
    match f {
        True => top(),
        False => match first_prop {
            Some(_) => CtlFormula::not(top()),
            None => False,
        },
        Prop(p) => Prop(p.clone()),
        Not(a) => CtlFormula::not(go(a)),
        And(a, b) => CtlFormula::and(go(a), go(b)),
        Or(a, b) => CtlFormula::or(go(a), go(b)),
        Implies(a, b) => CtlFormula::or(neg(a), go(b)),
        ExistsNext(a) => CtlFormula::ex(go(a)),
        ExistsUntil(a, b) => CtlFormula::eu(go(a), go(b)),
        ExistsGlobally(a) => CtlFormula::eg(go(a)),
        ExistsFinally(a) => CtlFormula::eu(top(), go(a)),
        ForallNext(a) => CtlFormula::not(CtlFormula::ex(neg(a))),
        // A[f U g] == !E[!g U (!f & !g)] & !EG !g
        ForallUntil(a, b) => CtlFormula::and(
            CtlFormula::not(CtlFormula::eu(neg(b), CtlFormula::and(neg(a), neg(b)))),
            CtlFormula::not(CtlFormula::eg(neg(b))),
        ),
        ForallFinally(a) => CtlFormula::not(CtlFormula::eg(neg(a))),
        ForallGlobally(a) => CtlFormula::not(CtlFormula::eu(top(), neg(a))),
    }
}

impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_ctl(self))
    }
}

impl std::str::FromStr for CtlFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ctl(s)
    }
}
