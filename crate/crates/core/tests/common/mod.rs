//! Independent reference implementations used to cross-check the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use ctl_infer::ctl::CtlFormula;
use ctl_infer::encoder::{
    build_semantic, build_structural, declare_variables, Lowering, SemVar, Session, SolverConfig,
    VarPool,
};
use ctl_infer::learner::Sample;
use ctl_infer::KripkeStructure;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn parse(s: &str) -> CtlFormula {
    s.parse().unwrap()
}

/// SAT set by textbook fixed-point iteration over ordered sets.
pub fn naive_sat(m: &KripkeStructure, f: &CtlFormula) -> BTreeSet<usize> {
    use CtlFormula::*;
    let all: BTreeSet<usize> = m.states().collect();
    let pre = |target: &BTreeSet<usize>, within: &BTreeSet<usize>| -> BTreeSet<usize> {
        within
            .iter()
            .copied()
            .filter(|&s| m.post(s).iter().any(|t| target.contains(t)))
            .collect()
    };
    match f {
        True => all,
        False => BTreeSet::new(),
        Prop(p) => all.into_iter().filter(|&s| m.labeled(s, p)).collect(),
        Not(a) => all.difference(&naive_sat(m, a)).copied().collect(),
        And(a, b) => naive_sat(m, a)
            .intersection(&naive_sat(m, b))
            .copied()
            .collect(),
        Or(a, b) => naive_sat(m, a).union(&naive_sat(m, b)).copied().collect(),
        ExistsNext(a) => pre(&naive_sat(m, a), &all),
        ExistsUntil(a, b) => {
            let (sa, sb) = (naive_sat(m, a), naive_sat(m, b));
            let mut z = BTreeSet::new();
            loop {
                let next: BTreeSet<usize> = sb.union(&pre(&z, &sa)).copied().collect();
                if next == z {
                    return z;
                }
                z = next;
            }
        }
        ExistsGlobally(a) => {
            let sa = naive_sat(m, a);
            let mut z = all;
            loop {
                let next = pre(&z, &sa);
                if next == z {
                    return z;
                }
                z = next;
            }
        }
        other => panic!("oracle only handles ENF: {other}"),
    }
}

pub fn naive_holds(m: &KripkeStructure, f: &CtlFormula) -> bool {
    let sat = naive_sat(m, f);
    m.initial().iter().all(|s| sat.contains(s))
}

pub fn dag_size(f: &CtlFormula) -> usize {
    fn collect<'a>(f: &'a CtlFormula, seen: &mut HashSet<&'a CtlFormula>) {
        if seen.insert(f) {
            for c in f.children() {
                collect(c, seen);
            }
        }
    }
    let mut seen = HashSet::new();
    collect(f, &mut seen);
    seen.len()
}

/// All ENF formulas of DAG size at most `max`, by closing the proposition
/// set under the operators until nothing new appears.
pub fn oracle_formulas(props: &[&str], max: usize) -> Vec<CtlFormula> {
    let mut all: Vec<CtlFormula> = Vec::new();
    let mut subs: Vec<Vec<u32>> = Vec::new();
    let mut known: HashMap<CtlFormula, u32> = HashMap::new();
    let mut add =
        |f: CtlFormula, mut sub: Vec<u32>, all: &mut Vec<CtlFormula>, subs: &mut Vec<Vec<u32>>| {
            if sub.len() + 1 > max || known.contains_key(&f) {
                return;
            }
            let id = all.len() as u32;
            known.insert(f.clone(), id);
            sub.push(id);
            all.push(f);
            subs.push(sub);
        };
    for p in props {
        add(CtlFormula::prop(*p), Vec::new(), &mut all, &mut subs);
    }
    let mut frontier_start = 0;
    loop {
        let frontier_end = all.len();
        for i in 0..frontier_end {
            if i >= frontier_start {
                for ctor in [CtlFormula::not, CtlFormula::ex, CtlFormula::eg] {
                    add(ctor(all[i].clone()), subs[i].clone(), &mut all, &mut subs);
                }
            }
            for j in 0..frontier_end {
                if i < frontier_start && j < frontier_start {
                    continue;
                }
                let mut union = subs[i].clone();
                union.extend_from_slice(&subs[j]);
                union.sort_unstable();
                union.dedup();
                if union.len() + 1 > max {
                    continue;
                }
                for ctor in [CtlFormula::and, CtlFormula::or, CtlFormula::eu] {
                    add(
                        ctor(all[i].clone(), all[j].clone()),
                        union.clone(),
                        &mut all,
                        &mut subs,
                    );
                }
            }
        }
        if all.len() == frontier_end {
            return all;
        }
        frontier_start = frontier_end;
    }
}

fn nonempty_subset(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let bits = rng.gen_range(1u32..(1 << n));
    (0..n).filter(|i| bits >> i & 1 == 1).collect()
}

pub fn random_structure(rng: &mut impl Rng, props: &[&str], max_states: usize) -> KripkeStructure {
    let n = rng.gen_range(1..=max_states);
    let post: Vec<Vec<usize>> = (0..n).map(|_| nonempty_subset(rng, n)).collect();
    let labels: Vec<Vec<&str>> = (0..n)
        .map(|_| {
            props
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .collect()
        })
        .collect();
    let init = nonempty_subset(rng, n);
    KripkeStructure::from_indices(props, &init, &post, &labels).unwrap()
}

/// Every structure with exactly `n` states, any non-empty initial set.
pub fn all_structures(props: &[&str], n: usize) -> Vec<KripkeStructure> {
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (1u32..(1 << k))
            .map(|bits| (0..k).filter(|i| bits >> i & 1 == 1).collect())
            .collect()
    };
    let succ = subsets(n);
    let label_choices = 1usize << props.len();
    let mut out = Vec::new();
    let trans_total = succ.len().pow(n as u32);
    let label_total = label_choices.pow(n as u32);
    for t in 0..trans_total {
        let post: Vec<Vec<usize>> = (0..n)
            .map(|s| succ[t / succ.len().pow(s as u32) % succ.len()].clone())
            .collect();
        for l in 0..label_total {
            let labels: Vec<Vec<&str>> = (0..n)
                .map(|s| {
                    let bits = l / label_choices.pow(s as u32) % label_choices;
                    props
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits >> i & 1 == 1)
                        .map(|(_, p)| *p)
                        .collect()
                })
                .collect();
            for init in subsets(n) {
                out.push(KripkeStructure::from_indices(props, &init, &post, &labels).unwrap());
            }
        }
    }
    out
}

/// Structural and semantic constraints only, so the formula variables can
/// be pinned without the consistency requirement forcing the root.
pub fn semantic_session(
    n: usize,
    sample: &Sample,
    config: &SolverConfig,
) -> (VarPool<SemVar>, Session) {
    let mut pool = declare_variables(n, sample);
    let mut constraints = build_structural(n, sample.alphabet().len(), &pool);
    constraints.extend(build_semantic(n, sample, &pool).unwrap());
    let mut fresh = || pool.fresh();
    let mut lowering = Lowering::new(&mut fresh);
    for c in &constraints {
        lowering.add(c);
    }
    let clauses = lowering.clauses;
    let session = Session::new(config, pool.num_vars(), &clauses);
    (pool, session)
}

/// Some path `s = u0 .. ut` with `t < k`, `ut` in `psi` and the earlier
/// states in `phi`.
pub fn until_prefix(
    m: &KripkeStructure,
    phi: &BTreeSet<usize>,
    psi: &BTreeSet<usize>,
    s: usize,
    k: usize,
) -> bool {
    if psi.contains(&s) {
        return true;
    }
    k > 1
        && phi.contains(&s)
        && m.post(s)
            .iter()
            .any(|&t| until_prefix(m, phi, psi, t, k - 1))
}

/// Some path of `k` states starting at `s`, all in `phi`.
pub fn globally_prefix(m: &KripkeStructure, phi: &BTreeSet<usize>, s: usize, k: usize) -> bool {
    phi.contains(&s) && (k <= 1 || m.post(s).iter().any(|&t| globally_prefix(m, phi, t, k - 1)))
}

/// Minimal size of a formula consistent with the sample, searching `formulas`.
pub fn brute_force_minimum(sample: &Sample, formulas: &[CtlFormula]) -> Option<usize> {
    formulas
        .iter()
        .filter(|f| {
            sample.positives().iter().all(|m| naive_holds(m, f))
                && sample.negatives().iter().all(|m| !naive_holds(m, f))
        })
        .map(dag_size)
        .min()
}
