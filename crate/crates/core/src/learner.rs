//! Passive learning of minimal CTL formulas and the candidate oracle used
//! by the counterexample-guided loop.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::checker;
use crate::ctl::{syntactically_equal, to_dag, CtlFormula, DagError};
use crate::encoder::{
    BackendFailure, EncodeError, EncodingInstance, Lit, SolveOutcome, SolverConfig,
};
use crate::kripke::{KripkeStructure, Proposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("structure {structure} has propositions {{{found}}}, expected {{{expected}}}")]
    AlphabetMismatch {
        structure: usize,
        expected: String,
        found: String,
    },
    #[error("a sample needs at least one structure or an explicit alphabet")]
    NoAlphabet,
}

/// Positive and negative structures over one shared alphabet.
///
/// Structures are compared by proposition name, so their declaration order
/// may differ. Structures indexed together are positives first.
#[derive(Debug, Clone)]
pub struct Sample {
    positives: Vec<KripkeStructure>,
    negatives: Vec<KripkeStructure>,
    alphabet: Vec<Proposition>,
}

fn names(ps: &[Proposition]) -> BTreeSet<&str> {
    ps.iter().map(Proposition::as_str).collect()
}

fn join(set: &BTreeSet<&str>) -> String {
    set.iter().copied().collect::<Vec<_>>().join(", ")
}

impl Sample {
    /// The alphabet is taken from the first structure.
    pub fn new(
        positives: Vec<KripkeStructure>,
        negatives: Vec<KripkeStructure>,
    ) -> Result<Self, SampleError> {
        let alphabet = positives
            .iter()
            .chain(&negatives)
            .next()
            .ok_or(SampleError::NoAlphabet)?
            .alphabet()
            .to_vec();
        Self::with_alphabet(positives, negatives, alphabet)
    }

    pub fn with_alphabet(
        positives: Vec<KripkeStructure>,
        negatives: Vec<KripkeStructure>,
        alphabet: Vec<Proposition>,
    ) -> Result<Self, SampleError> {
        let expected = names(&alphabet);
        for (i, m) in positives.iter().chain(&negatives).enumerate() {
            let found = names(m.alphabet());
            if found != expected {
                return Err(SampleError::AlphabetMismatch {
                    structure: i,
                    expected: join(&expected),
                    found: join(&found),
                });
            }
        }
        Ok(Sample {
            positives,
            negatives,
            alphabet,
        })
    }

    pub fn positives(&self) -> &[KripkeStructure] {
        &self.positives
    }

    pub fn negatives(&self) -> &[KripkeStructure] {
        &self.negatives
    }

    pub fn alphabet(&self) -> &[Proposition] {
        &self.alphabet
    }

    pub fn structures(&self) -> impl Iterator<Item = &KripkeStructure> {
        self.positives.iter().chain(&self.negatives)
    }

    /// First pair `(positive, negative)` of isomorphic structures. Such a
    /// sample has no consistent formula.
    pub fn find_overlap(&self) -> Option<(usize, usize)> {
        self.positives.iter().enumerate().find_map(|(i, p)| {
            self.negatives
                .iter()
                .position(|n| p.is_isomorphic(n))
                .map(|j| (i, j))
        })
    }

    /// Whether `f` holds on every positive and fails on every negative.
    pub fn is_consistent(&self, f: &CtlFormula) -> Result<bool, checker::CheckError> {
        for m in &self.positives {
            if !checker::holds(m, f)? {
                return Ok(false);
            }
        }
        for m in &self.negatives {
            if checker::holds(m, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Backend(#[from] BackendFailure),
    #[error("discarded formula is not usable: {0}")]
    Discarded(#[from] DagError),
    #[error("the size bound must be at least 1")]
    ZeroBound,
}

/// Solver statistics for one node budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetStat {
    pub n: usize,
    pub sat: bool,
    pub vars: usize,
    pub clauses: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnResult {
    pub formula: CtlFormula,
    pub budget: usize,
    pub stats: Vec<BudgetStat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LearnOutcome {
    Found(LearnResult),
    NoConsistentFormula { stats: Vec<BudgetStat> },
}

impl LearnOutcome {
    pub fn formula(&self) -> Option<&CtlFormula> {
        match self {
            LearnOutcome::Found(r) => Some(&r.formula),
            LearnOutcome::NoConsistentFormula { .. } => None,
        }
    }

    pub fn stats(&self) -> &[BudgetStat] {
        match self {
            LearnOutcome::Found(r) => &r.stats,
            LearnOutcome::NoConsistentFormula { stats } => stats,
        }
    }
}

pub fn learn_minimal(
    sample: &Sample,
    max_size: usize,
    config: &SolverConfig,
) -> Result<LearnOutcome, LearnError> {
    learn_minimal_with(sample, max_size, config, &mut |_, _| {})
}

/// [`learn_minimal`] with a callback invoked after each budget is solved.
pub fn learn_minimal_with(
    sample: &Sample,
    max_size: usize,
    config: &SolverConfig,
    observe: &mut dyn FnMut(&EncodingInstance<'_>, &BudgetStat),
) -> Result<LearnOutcome, LearnError> {
    if max_size == 0 {
        return Err(LearnError::ZeroBound);
    }
    let mut stats = Vec::new();
    for n in 1..=max_size {
        let start = Instant::now();
        let inst = EncodingInstance::new(n, sample, &[])?;
        let outcome = inst.solve(config)?;
        let stat = BudgetStat {
            n,
            sat: outcome.is_sat(),
            vars: inst.num_vars(),
            clauses: inst.num_clauses(),
            elapsed: start.elapsed(),
        };
        observe(&inst, &stat);
        stats.push(stat);
        if let SolveOutcome::Sat(a) = outcome {
            return Ok(LearnOutcome::Found(LearnResult {
                formula: inst.decode(&a),
                budget: n,
                stats,
            }));
        }
    }
    Ok(LearnOutcome::NoConsistentFormula { stats })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InferOutcome {
    Found(CtlFormula),
    NoSolution,
}

/// A formula of size at most `max_size` that holds on `m`, fails on every
/// negative and is syntactically distinct from every discarded formula,
/// searched at increasing node budgets.
pub fn infer_candidate(
    m: &KripkeStructure,
    max_size: usize,
    negatives: &[KripkeStructure],
    discarded: &[CtlFormula],
    config: &SolverConfig,
) -> Result<InferOutcome, LearnError> {
    if max_size == 0 {
        return Err(LearnError::ZeroBound);
    }
    let sample = Sample::with_alphabet(vec![m.clone()], negatives.to_vec(), m.alphabet().to_vec())?;
    let blocked = discarded
        .iter()
        .map(to_dag)
        .collect::<Result<Vec<_>, _>>()?;
    for n in 1..=max_size {
        let inst = EncodingInstance::new(n, &sample, &blocked)?;
        let mut session = inst.session(config);
        while let SolveOutcome::Sat(a) = session.solve(&[])? {
            let dag = inst.decode_dag(&a);
            let f = dag.to_formula();
            if !discarded.iter().any(|d| syntactically_equal(d, &f)) {
                return Ok(InferOutcome::Found(f));
            }
            // a non-canonical labeling of a discarded formula
            let lits = inst
                .fix_formula(&dag)
                .expect("decoded DAGs have exactly n nodes over the sample alphabet");
            let block: Vec<Lit> = lits.into_iter().map(|l| !l).collect();
            session.add_clause(&block);
        }
    }
    Ok(InferOutcome::NoSolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::parse_ctl;

    fn selfloop(labels: &[&str]) -> KripkeStructure {
        KripkeStructure::from_indices(&["p"], &[0], &[vec![0]], &[labels.to_vec()]).unwrap()
    }

    fn f(s: &str) -> CtlFormula {
        parse_ctl(s).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn learns_single_proposition() {
        let sample = Sample::new(vec![selfloop(&["p"])], vec![selfloop(&[])]).unwrap();
        match learn_minimal(&sample, 3, &cfg()).unwrap() {
            LearnOutcome::Found(r) => {
                assert_eq!(r.formula, f("p"));
                assert_eq!(r.budget, 1);
                assert_eq!(r.stats.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identical_models_have_no_formula() {
        let m = selfloop(&["p"]);
        let sample = Sample::new(vec![m.clone()], vec![m]).unwrap();
        assert_eq!(sample.find_overlap(), Some((0, 0)));
        for b in 1..=3 {
            let out = learn_minimal(&sample, b, &cfg()).unwrap();
            assert!(
                matches!(out, LearnOutcome::NoConsistentFormula { ref stats } if stats.len() == b)
            );
        }
    }

    #[test]
    fn two_state_chain_needs_size_two() {
        let pos = KripkeStructure::from_indices(
            &["p", "q"],
            &[0],
            &[vec![1], vec![1]],
            &[vec!["p"], vec!["q"]],
        )
        .unwrap();
        let neg =
            KripkeStructure::from_indices(&["p", "q"], &[0], &[vec![0]], &[vec!["p"]]).unwrap();
        let sample = Sample::new(vec![pos], vec![neg]).unwrap();
        assert!(sample.is_consistent(&f("EX q")).unwrap());
        let out = learn_minimal(&sample, 3, &cfg()).unwrap();
        let r = match out {
            LearnOutcome::Found(r) => r,
            other => panic!("{other:?}"),
        };
        assert_eq!(r.formula.size(), 2);
        assert!(sample.is_consistent(&r.formula).unwrap());
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let a = selfloop(&["p"]);
        let b = KripkeStructure::from_indices(&["q"], &[0], &[vec![0]], &[vec!["q"]]).unwrap();
        assert!(matches!(
            Sample::new(vec![a], vec![b]),
            Err(SampleError::AlphabetMismatch { structure: 1, .. })
        ));
    }

    #[test]
    fn infer_candidate_examples() {
        let m = selfloop(&["p"]);
        assert_eq!(
            infer_candidate(&m, 1, &[], &[], &cfg()).unwrap(),
            InferOutcome::Found(f("p"))
        );
        assert_eq!(
            infer_candidate(&m, 1, &[], &[f("p")], &cfg()).unwrap(),
            InferOutcome::NoSolution
        );
        match infer_candidate(&m, 2, &[], &[f("p")], &cfg()).unwrap() {
            InferOutcome::Found(g) => {
                assert_eq!(g.size(), 2);
                assert!(checker::holds(&m, &g).unwrap());
            }
            InferOutcome::NoSolution => panic!(),
        }
    }

    #[test]
    fn infer_candidate_exhausts_size_two() {
        let m = selfloop(&["p"]);
        let mut discarded = Vec::new();
        while let InferOutcome::Found(g) = infer_candidate(&m, 2, &[], &discarded, &cfg()).unwrap()
        {
            assert!(!discarded.contains(&g), "{g} returned twice");
            discarded.push(g);
        }
        let mut got: Vec<String> = discarded.iter().map(|g| g.to_string()).collect();
        got.sort();
        assert_eq!(got, ["EG p", "EX p", "E[p U p]", "p", "p & p", "p | p"]);
    }
}
