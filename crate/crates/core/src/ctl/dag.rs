use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::CtlFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("`{0}` is not in existence normal form")]
    NotInEnf(String),
}

/// Node labels of a syntax DAG: a proposition or one of the six operators
/// `!`, `&`, `|`, `EX`, `EU`, `EG`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeLabel {
    Prop(String),
    Not,
    And,
    Or,
    ExistsNext,
    ExistsUntil,
    ExistsGlobally,
}

impl NodeLabel {
    pub fn arity(&self) -> usize {
        match self {
            NodeLabel::Prop(_) => 0,
            NodeLabel::Not | NodeLabel::ExistsNext | NodeLabel::ExistsGlobally => 1,
            NodeLabel::And | NodeLabel::Or | NodeLabel::ExistsUntil => 2,
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Prop(p) => f.write_str(p),
            NodeLabel::Not => f.write_str("!"),
            NodeLabel::And => f.write_str("&"),
            NodeLabel::Or => f.write_str("|"),
            NodeLabel::ExistsNext => f.write_str("EX"),
            NodeLabel::ExistsUntil => f.write_str("EU"),
            NodeLabel::ExistsGlobally => f.write_str("EG"),
        }
    }
}

/// One DAG node. Child identifiers are 1-based and smaller than the node's
/// own identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DagNode {
    pub label: NodeLabel,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Syntax DAG with identical subterms merged. Nodes are numbered `1..=n`
/// and the root is node `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyntaxDag {
    nodes: Vec<DagNode>,
}

impl SyntaxDag {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `i`, 1-based.
    pub fn node(&self, i: usize) -> &DagNode {
        &self.nodes[i - 1]
    }

    pub fn root(&self) -> usize {
        self.nodes.len()
    }

    /// `(identifier, node)` pairs in increasing identifier order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &DagNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (i + 1, n))
    }

    /// The subformula rooted at node `i`.
    pub fn subformula(&self, i: usize) -> CtlFormula {
        let node = self.node(i);
        let child = |c: Option<usize>| Box::new(self.subformula(c.expect("arity checked")));
        match node.label {
            NodeLabel::Prop(ref p) => CtlFormula::Prop(p.clone()),
            NodeLabel::Not => CtlFormula::Not(child(node.left)),
            NodeLabel::And => CtlFormula::And(child(node.left), child(node.right)),
            NodeLabel::Or => CtlFormula::Or(child(node.left), child(node.right)),
            NodeLabel::ExistsNext => CtlFormula::ExistsNext(child(node.left)),
            NodeLabel::ExistsUntil => CtlFormula::ExistsUntil(child(node.left), child(node.right)),
            NodeLabel::ExistsGlobally => CtlFormula::ExistsGlobally(child(node.left)),
        }
    }

    pub fn to_formula(&self) -> CtlFormula {
        self.subformula(self.root())
    }

    /// Builds a DAG from an explicit node list, checking arities and the
    /// child-before-parent numbering. Used when decoding solver models.
    pub fn from_nodes(nodes: Vec<DagNode>) -> Option<Self> {
        let ok = !nodes.is_empty()
            && nodes.iter().enumerate().all(|(i, n)| {
                let id = i + 1;
                let below = |c: Option<usize>| c.is_some_and(|c| c >= 1 && c < id);
                match n.label.arity() {
                    0 => n.left.is_none() && n.right.is_none(),
                    1 => below(n.left) && n.right.is_none(),
                    _ => below(n.left) && below(n.right),
                }
            });
        ok.then_some(SyntaxDag { nodes })
    }
}

/// Canonical DAG of an ENF formula.
///
/// Identifiers follow a post-order traversal that visits the right operand
/// before the left one, with shared subterms numbered at first visit. For
/// `EX p | E[p U EG q]` this yields `q=1, EG=2, p=3, EU=4, EX=5, |=6`.
pub fn to_dag(f: &CtlFormula) -> Result<SyntaxDag, DagError> {
    fn visit<'f>(
        f: &'f CtlFormula,
        ids: &mut HashMap<&'f CtlFormula, usize>,
        nodes: &mut Vec<DagNode>,
    ) -> Result<usize, DagError> {
        if let Some(&id) = ids.get(f) {
            return Ok(id);
        }
        let (label, left, right) = match f {
            CtlFormula::Prop(p) => (NodeLabel::Prop(p.clone()), None, None),
            CtlFormula::Not(a) => (NodeLabel::Not, Some(visit(a, ids, nodes)?), None),
            CtlFormula::ExistsNext(a) => (NodeLabel::ExistsNext, Some(visit(a, ids, nodes)?), None),
            CtlFormula::ExistsGlobally(a) => {
                (NodeLabel::ExistsGlobally, Some(visit(a, ids, nodes)?), None)
            }
            CtlFormula::And(a, b) | CtlFormula::Or(a, b) | CtlFormula::ExistsUntil(a, b) => {
                let r = visit(b, ids, nodes)?;
                let l = visit(a, ids, nodes)?;
                let label = match f {
                    CtlFormula::And(..) => NodeLabel::And,
                    CtlFormula::Or(..) => NodeLabel::Or,
                    _ => NodeLabel::ExistsUntil,
                };
                (label, Some(l), Some(r))
            }
            other => return Err(DagError::NotInEnf(other.to_string())),
        };
        nodes.push(DagNode { label, left, right });
        ids.insert(f, nodes.len());
        Ok(nodes.len())
    }
    let mut nodes = Vec::new();
    visit(f, &mut HashMap::new(), &mut nodes)?;
    Ok(SyntaxDag { nodes })
}

/// Syntactic equality of ENF formulas: identical canonical DAGs.
///
/// Formulas outside ENF fall back to tree equality.
pub fn syntactically_equal(f: &CtlFormula, g: &CtlFormula) -> bool {
    match (to_dag(f), to_dag(g)) {
        (Ok(a), Ok(b)) => a == b,
        _ => f == g,
    }
}
