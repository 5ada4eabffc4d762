//! Counterexample-guided inference of a language-minimal CTL formula for a
//! single Kripke structure.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::checker::{self, CheckError};
use crate::ctl::{enf_formulas_up_to, CtlFormula};
use crate::encoder::SolverConfig;
use crate::kripke::{print_kripke, KripkeStructure};
use crate::learner::{infer_candidate, InferOutcome, LearnError};
use crate::synth::{implies, Implication, SynthError};

/// Largest size bound for which [`verify_solution`] runs the enumeration
/// audit.
pub const AUDIT_MAX_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CegError {
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("internal error: countermodel does not fail `{0}`")]
    SynthesisInconsistency(String),
    #[error("internal error: candidate `{0}` was returned twice")]
    RepeatedCandidate(String),
    #[error("internal error: iteration cap of {0} exceeded")]
    IterationCap(u128),
    #[error("certification failed for `{formula}`: {reason}")]
    CertificationFailure { formula: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Candidate equivalent to the hypothesis: discarded.
    Equivalent = 1,
    /// Candidate strictly stronger: becomes the hypothesis.
    Strengthen = 2,
    /// Candidate not implying the hypothesis: eliminated by a model of
    /// `candidate & !hypothesis`.
    Eliminate = 3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterRecord {
    pub candidate: CtlFormula,
    pub case: Case,
    pub countermodel: Option<KripkeStructure>,
}

impl IterRecord {
    pub fn countermodel_inline(&self) -> String {
        match &self.countermodel {
            Some(m) => print_kripke(m).lines().collect::<Vec<_>>().join(" / "),
            None => "-".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    /// No implication verdict relied on the bounded model search.
    Unconditional,
    /// Some "no countermodel" verdicts are only known up to `synth_states`.
    Bounded {
        synth_states: usize,
        verdicts: usize,
    },
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::Unconditional => f.write_str("candidate space exhausted"),
            Certification::Bounded {
                synth_states,
                verdicts,
            } => write!(
                f,
                "candidate space exhausted; {verdicts} implication verdicts bounded by {synth_states} states"
            ),
        }
    }
}

/// Loop state: hypothesis, negatives and discarded candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CegState {
    pub hypothesis: CtlFormula,
    pub negatives: Vec<KripkeStructure>,
    pub discarded: Vec<CtlFormula>,
    pub trace: Vec<IterRecord>,
}

impl Default for CegState {
    fn default() -> Self {
        CegState {
            hypothesis: CtlFormula::True,
            negatives: Vec::new(),
            discarded: Vec::new(),
            trace: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CegReport {
    pub formula: CtlFormula,
    pub iterations: usize,
    pub trace: Vec<IterRecord>,
    pub negatives: Vec<KripkeStructure>,
    pub synth_states: usize,
    pub certification: Certification,
}

impl CegReport {
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace
            .iter()
            .enumerate()
            .map(|(k, r)| {
                format!(
                    "iter {}: candidate {} | case {} | countermodel {}",
                    k + 1,
                    r.candidate,
                    r.case as u8,
                    r.countermodel_inline()
                )
            })
            .collect()
    }
}

/// Upper bound on the number of `n`-node labelings summed over `n <= bound`.
pub fn iteration_cap(num_props: usize, bound: usize) -> u128 {
    let p = num_props as u128;
    let mut total: u128 = 0;
    let mut product: u128 = 1;
    for i in 1..=bound as u128 {
        let below = i - 1;
        product = product.saturating_mul(p + 3 * below + 3 * below * below);
        total = total.saturating_add(product);
    }
    total
}

pub fn infer(
    m: &KripkeStructure,
    bound: usize,
    synth_states: usize,
    config: &SolverConfig,
) -> Result<CegReport, CegError> {
    let alphabet = m.alphabet();
    let cap = iteration_cap(alphabet.len(), bound);
    let mut st = CegState::default();
    let mut seen = HashSet::new();
    let mut bounded_verdicts = 0;
    while let InferOutcome::Found(candidate) =
        infer_candidate(m, bound, &st.negatives, &st.discarded, config)?
    {
        if st.trace.len() as u128 >= cap {
            return Err(CegError::IterationCap(cap));
        }
        if !seen.insert(candidate.clone()) {
            return Err(CegError::RepeatedCandidate(candidate.to_string()));
        }
        let hyp_is_true = st.hypothesis == CtlFormula::True;
        let record = match implies(&candidate, &st.hypothesis, synth_states, alphabet, config)? {
            Implication::CounterModel(cm) => {
                st.negatives.push(cm.clone());
                IterRecord {
                    candidate,
                    case: Case::Eliminate,
                    countermodel: Some(cm),
                }
            }
            Implication::Holds => {
                if !hyp_is_true {
                    bounded_verdicts += 1;
                }
                match implies(&st.hypothesis, &candidate, synth_states, alphabet, config)? {
                    Implication::Holds => {
                        bounded_verdicts += 1;
                        st.discarded.push(candidate.clone());
                        IterRecord {
                            candidate,
                            case: Case::Equivalent,
                            countermodel: None,
                        }
                    }
                    Implication::CounterModel(cm) => {
                        st.negatives.push(cm.clone());
                        st.discarded.push(candidate.clone());
                        st.hypothesis = candidate.clone();
                        IterRecord {
                            candidate,
                            case: Case::Strengthen,
                            countermodel: Some(cm),
                        }
                    }
                }
            }
        };
        st.trace.push(record);
        for n in &st.negatives {
            if checker::holds(n, &st.hypothesis)? {
                return Err(CegError::SynthesisInconsistency(st.hypothesis.to_string()));
            }
        }
    }
    let certification = if bounded_verdicts == 0 {
        Certification::Unconditional
    } else {
        Certification::Bounded {
            synth_states,
            verdicts: bounded_verdicts,
        }
    };
    Ok(CegReport {
        formula: st.hypothesis,
        iterations: st.trace.len(),
        trace: st.trace,
        negatives: st.negatives,
        synth_states,
        certification,
    })
}

/// Outcome of a successful [`verify_solution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationRecord {
    pub formula: CtlFormula,
    /// Formulas holding on the model that were compared against the result;
    /// `None` when the bound is too large for the audit.
    pub audited: Option<usize>,
    pub synth_states: usize,
}

fn fail(formula: &CtlFormula, reason: String) -> CegError {
    CegError::CertificationFailure {
        formula: formula.to_string(),
        reason,
    }
}

/// Re-checks a result of [`infer`]. For bounds up to [`AUDIT_MAX_SIZE`],
/// every ENF formula of size at most `bound` holding on `m` is tested for
/// strictly implying the result within `synth_states`.
pub fn verify_solution(
    m: &KripkeStructure,
    bound: usize,
    report: &CegReport,
    synth_states: usize,
    config: &SolverConfig,
) -> Result<CertificationRecord, CegError> {
    let phi = &report.formula;
    if !checker::holds(m, phi)? {
        return Err(fail(phi, "does not hold on the model".into()));
    }
    if phi.size() > bound {
        return Err(fail(
            phi,
            format!("size {} exceeds bound {bound}", phi.size()),
        ));
    }
    for (i, n) in report.negatives.iter().enumerate() {
        if checker::holds(n, phi)? {
            return Err(fail(phi, format!("holds on negative {i}")));
        }
    }
    let mut audited = None;
    if bound <= AUDIT_MAX_SIZE {
        let alphabet = m.alphabet();
        let mut count = 0;
        for g in enf_formulas_up_to(alphabet, bound) {
            if !checker::holds(m, &g)? {
                continue;
            }
            count += 1;
            if implies(&g, phi, synth_states, alphabet, config)? == Implication::Holds
                && implies(phi, &g, synth_states, alphabet, config)? != Implication::Holds
            {
                return Err(fail(
                    phi,
                    format!("`{g}` holds on the model and strictly implies it"),
                ));
            }
        }
        audited = Some(count);
    }
    Ok(CertificationRecord {
        formula: phi.clone(),
        audited,
        synth_states,
    })
}
