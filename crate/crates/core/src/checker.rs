//! Explicit-state CTL model checking by SAT-set computation.
//!
//! `SAT(EU)` is a least fixed point and `SAT(EG)` a greatest one; both are
//! computed by the same iterations the encoder unrolls, so the iterate
//! sequences are exposed for cross-validation.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::ctl::{enf, CtlFormula};
use crate::kripke::KripkeStructure;

/// A set of states of one structure.
pub type StateSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("`{0}` is not in existence normal form")]
    NotInEnf(String),
}

/// `SAT_M(f)`: the states of one structure where `f` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatSet {
    pub formula: CtlFormula,
    pub states: StateSet,
}

impl SatSet {
    pub fn contains(&self, s: usize) -> bool {
        self.states.contains(s)
    }

    pub fn display(&self, m: &KripkeStructure) -> String {
        format_states(m, &self.states)
    }
}

/// `{s0, s2}` style rendering using the structure's state names.
pub fn format_states(m: &KripkeStructure, set: &StateSet) -> String {
    let names: Vec<&str> = set.ones().map(|s| m.state_name(s)).collect();
    format!("{{{}}}", names.join(", "))
}

/// States of `phi_set` with at least one successor in `target`.
fn pre_exists(m: &KripkeStructure, within: &StateSet, target: &StateSet) -> StateSet {
    let mut out = StateSet::with_capacity(m.num_states());
    for s in within.ones() {
        if m.post(s).iter().any(|&t| target.contains(t)) {
            out.insert(s);
        }
    }
    out
}

fn full(m: &KripkeStructure) -> StateSet {
    let mut s = StateSet::with_capacity(m.num_states());
    s.insert_range(..);
    s
}

/// `T_1 = psi`, `T_{k+1} = T_k ∪ {s ∈ phi : post(s) ∩ T_k ≠ ∅}`.
///
/// Always returns `|S| + 1` entries; once the sequence is stable the tail
/// repeats the fixed point.
pub fn eu_iterates(m: &KripkeStructure, phi: &StateSet, psi: &StateSet) -> Vec<StateSet> {
    let steps = m.num_states() + 1;
    let mut out = vec![psi.clone()];
    while out.len() < steps {
        let last = out.last().unwrap();
        let mut next = pre_exists(m, phi, last);
        next.union_with(last);
        if &next == last {
            break;
        }
        out.push(next);
    }
    pad(out, steps)
}

/// `T_1 = phi`, `T_{k+1} = {s ∈ phi : post(s) ∩ T_k ≠ ∅}`, padded to
/// `|S| + 1` entries like [`eu_iterates`].
pub fn eg_iterates(m: &KripkeStructure, phi: &StateSet) -> Vec<StateSet> {
    let steps = m.num_states() + 1;
    let mut out = vec![phi.clone()];
    while out.len() < steps {
        let last = out.last().unwrap();
        let next = pre_exists(m, phi, last);
        if &next == last {
            break;
        }
        out.push(next);
    }
    pad(out, steps)
}

fn pad(mut seq: Vec<StateSet>, len: usize) -> Vec<StateSet> {
    let last = seq.last().unwrap().clone();
    seq.resize(len, last);
    seq
}

fn eu_fixpoint(m: &KripkeStructure, phi: &StateSet, psi: &StateSet) -> StateSet {
    let mut current = psi.clone();
    loop {
        let mut next = pre_exists(m, phi, &current);
        next.union_with(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn eg_fixpoint(m: &KripkeStructure, phi: &StateSet) -> StateSet {
    let mut current = phi.clone();
    loop {
        let next = pre_exists(m, phi, &current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Memoizing evaluator over one structure. Visits subformulas children
/// first and records the order for reporting.
struct Evaluator<'m> {
    m: &'m KripkeStructure,
    cache: HashMap<CtlFormula, StateSet>,
    order: Vec<CtlFormula>,
}

impl<'m> Evaluator<'m> {
    fn new(m: &'m KripkeStructure) -> Self {
        Evaluator {
            m,
            cache: HashMap::new(),
            order: Vec::new(),
        }
    }

    fn eval(&mut self, f: &CtlFormula) -> Result<StateSet, CheckError> {
        if let Some(set) = self.cache.get(f) {
            return Ok(set.clone());
        }
        let m = self.m;
        let set = match f {
            CtlFormula::True => full(m),
            CtlFormula::False => StateSet::with_capacity(m.num_states()),
            CtlFormula::Prop(p) => {
                let idx = m
                    .prop_index(p)
                    .ok_or_else(|| CheckError::UnknownProposition(p.clone()))?;
                let mut set = StateSet::with_capacity(m.num_states());
                for s in m.states() {
                    set.set(s, m.has_label(s, idx));
                }
                set
            }
            CtlFormula::Not(a) => {
                let mut set = self.eval(a)?;
                set.toggle_range(..);
                set
            }
            CtlFormula::And(a, b) => {
                let mut set = self.eval(a)?;
                set.intersect_with(&self.eval(b)?);
                set
            }
            CtlFormula::Or(a, b) => {
                let mut set = self.eval(a)?;
                set.union_with(&self.eval(b)?);
                set
            }
            CtlFormula::ExistsNext(a) => {
                let target = self.eval(a)?;
                pre_exists(m, &full(m), &target)
            }
            CtlFormula::ExistsUntil(a, b) => {
                let phi = self.eval(a)?;
                let psi = self.eval(b)?;
                eu_fixpoint(m, &phi, &psi)
            }
            CtlFormula::ExistsGlobally(a) => {
                let phi = self.eval(a)?;
                eg_fixpoint(m, &phi)
            }
            other => return Err(CheckError::NotInEnf(other.to_string())),
        };
        self.cache.insert(f.clone(), set.clone());
        self.order.push(f.clone());
        Ok(set)
    }
}

/// `SAT_M(f)` for `f` in ENF (constants allowed).
pub fn sat_set(m: &KripkeStructure, f: &CtlFormula) -> Result<SatSet, CheckError> {
    let states = Evaluator::new(m).eval(f)?;
    Ok(SatSet {
        formula: f.clone(),
        states,
    })
}

/// SAT sets of every subformula of `enf(f)`, children before parents.
pub fn all_sat_sets(m: &KripkeStructure, f: &CtlFormula) -> Result<Vec<SatSet>, CheckError> {
    let mut ev = Evaluator::new(m);
    ev.eval(&enf(f))?;
    let Evaluator { cache, order, .. } = ev;
    Ok(order
        .into_iter()
        .map(|formula| {
            let states = cache[&formula].clone();
            SatSet { formula, states }
        })
        .collect())
}

/// `M ⊨ f`: `f` holds in every initial state. Sugar is rewritten first.
pub fn holds(m: &KripkeStructure, f: &CtlFormula) -> Result<bool, CheckError> {
    let sat = sat_set(m, &enf(f))?;
    Ok(m.initial().iter().all(|&s| sat.contains(s)))
}
