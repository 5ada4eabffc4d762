mod common;

use std::collections::BTreeSet;

use common::*;
use ctl_infer::checker::{eg_iterates, eu_iterates, holds, StateSet};
use ctl_infer::ctl::{enf, enf_formulas_up_to, to_dag, CtlFormula};
use ctl_infer::encoder::{
    labeling_literals, EncodingInstance, SemVar, SolveOutcome, SolverConfig, Var,
};
use ctl_infer::learner::Sample;
use ctl_infer::synth::{synthesize, SynthOutcome, SynthQuery};
use ctl_infer::{parse_kripke, print_kripke, KripkeStructure, Proposition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn to_set(n: usize, states: &BTreeSet<usize>) -> StateSet {
    let mut s = StateSet::with_capacity(n);
    for &x in states {
        s.insert(x);
    }
    s
}

fn random_set(rng: &mut impl Rng, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Direct semantics of the derived operators, one fixed point each.
fn full_sat(m: &KripkeStructure, f: &CtlFormula) -> BTreeSet<usize> {
    use CtlFormula::*;
    let all: BTreeSet<usize> = m.states().collect();
    let all_succ = |target: &BTreeSet<usize>| -> BTreeSet<usize> {
        all.iter()
            .copied()
            .filter(|&s| m.post(s).iter().all(|t| target.contains(t)))
            .collect()
    };
    let lfp = |step: &dyn Fn(&BTreeSet<usize>) -> BTreeSet<usize>| {
        let mut z = BTreeSet::new();
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let gfp = |step: &dyn Fn(&BTreeSet<usize>) -> BTreeSet<usize>| {
        let mut z = all.clone();
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let union = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| a.union(b).copied().collect();
    let inter = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| -> BTreeSet<usize> {
        a.intersection(b).copied().collect()
    };
    match f {
        True | False | Prop(_) => naive_sat(m, f),
        Not(a) => all.difference(&full_sat(m, a)).copied().collect(),
        And(a, b) => inter(&full_sat(m, a), &full_sat(m, b)),
        Or(a, b) => union(&full_sat(m, a), &full_sat(m, b)),
        Implies(a, b) => union(
            &all.difference(&full_sat(m, a)).copied().collect(),
            &full_sat(m, b),
        ),
        ExistsNext(a) => {
            let sa = full_sat(m, a);
            all.iter()
                .copied()
                .filter(|&s| m.post(s).iter().any(|t| sa.contains(t)))
                .collect()
        }
        ExistsUntil(a, b) => {
            let (sa, sb) = (full_sat(m, a), full_sat(m, b));
            lfp(&|z| {
                let pre = all
                    .iter()
                    .copied()
                    .filter(|&s| sa.contains(&s) && m.post(s).iter().any(|t| z.contains(t)))
                    .collect();
                union(&sb, &pre)
            })
        }
        ExistsGlobally(a) => {
            let sa = full_sat(m, a);
            gfp(&|z| {
                all.iter()
                    .copied()
                    .filter(|&s| sa.contains(&s) && m.post(s).iter().any(|t| z.contains(t)))
                    .collect()
            })
        }
        ExistsFinally(a) => full_sat(m, &CtlFormula::eu(True, (**a).clone())),
        ForallNext(a) => all_succ(&full_sat(m, a)),
        ForallFinally(a) => {
            let sa = full_sat(m, a);
            lfp(&|z| union(&sa, &all_succ(z)))
        }
        ForallGlobally(a) => {
            let sa = full_sat(m, a);
            gfp(&|z| inter(&sa, &all_succ(z)))
        }
        ForallUntil(a, b) => {
            let (sa, sb) = (full_sat(m, a), full_sat(m, b));
            lfp(&|z| union(&sb, &inter(&sa, &all_succ(z))))
        }
    }
}

fn arb_ctl() -> impl Strategy<Value = CtlFormula> {
    let leaf = prop_oneof![
        Just(CtlFormula::prop("p")),
        Just(CtlFormula::prop("q")),
        Just(CtlFormula::True),
        Just(CtlFormula::False),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(CtlFormula::not),
            inner.clone().prop_map(CtlFormula::ex),
            inner.clone().prop_map(CtlFormula::eg),
            inner.clone().prop_map(CtlFormula::ef),
            inner.clone().prop_map(CtlFormula::ax),
            inner.clone().prop_map(CtlFormula::af),
            inner.clone().prop_map(CtlFormula::ag),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CtlFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CtlFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CtlFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CtlFormula::eu(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| CtlFormula::au(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn until_iterates_are_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, &["p"], 5);
        let n = m.num_states();
        let (phi, psi) = (random_set(&mut rng, n), random_set(&mut rng, n));
        let its = eu_iterates(&m, &to_set(n, &phi), &to_set(n, &psi));
        prop_assert_eq!(its.len(), n + 1);
        prop_assert_eq!(&its[0], &to_set(n, &psi));
        for w in its.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
        for (k, it) in its.iter().enumerate() {
            for s in 0..n {
                prop_assert_eq!(it.contains(s), until_prefix(&m, &phi, &psi, s, k + 1));
            }
        }
    }

    #[test]
    fn globally_iterates_are_antitone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, &["p"], 5);
        let n = m.num_states();
        let phi = random_set(&mut rng, n);
        let its = eg_iterates(&m, &to_set(n, &phi));
        prop_assert_eq!(its.len(), n + 1);
        for w in its.windows(2) {
            prop_assert!(w[1].is_subset(&w[0]));
        }
        for (k, it) in its.iter().enumerate() {
            for s in 0..n {
                prop_assert_eq!(it.contains(s), globally_prefix(&m, &phi, s, k + 1));
            }
        }
    }

    #[test]
    fn derived_operators_match_direct_semantics(seed in any::<u64>(), f in arb_ctl()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, &["p", "q"], 4);
        let want = m.initial().iter().all(|s| full_sat(&m, &f).contains(s));
        prop_assert_eq!(holds(&m, &f).unwrap(), want);
        prop_assert_eq!(holds(&m, &enf(&f)).unwrap(), want);
        prop_assert!(enf(&f).is_enf() || enf(&f).subformulas().iter().any(|g| g.is_constant()));
    }

    #[test]
    fn kripke_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, &["p", "q", "r"], 6);
        let text = print_kripke(&m);
        let back = parse_kripke(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(print_kripke(&back), text);
    }

    #[test]
    fn synthesis_budget_is_monotone(idx in 0usize..164) {
        let formulas = enf_formulas_up_to(&["p", "q"], 3);
        let f = &formulas[idx];
        let alphabet: Vec<Proposition> =
            ["p", "q"].iter().map(|n| Proposition::new(*n).unwrap()).collect();
        let mut found = false;
        for m in 1..=3 {
            let out = synthesize(&SynthQuery::new(f.clone(), m, &alphabet), &cfg()).unwrap();
            let sat = matches!(out, SynthOutcome::Model(ref model) if naive_holds(model, f));
            prop_assert!(!found || sat, "{} lost its model at budget {}", f, m);
            found = sat;
        }
    }
}

#[test]
fn pinned_formula_forces_root_variables() {
    let formulas = enf_formulas_up_to(&["p", "q"], 4);
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let m = random_structure(&mut rng, &["p", "q"], 4);
        let sample = Sample::new(vec![m.clone()], vec![]).unwrap();
        let mut sessions: Vec<_> = (1..=4)
            .map(|n| semantic_session(n, &sample, &cfg()))
            .collect();
        for f in &formulas {
            let dag = to_dag(f).unwrap();
            let n = dag.len();
            let (pool, session) = &mut sessions[n - 1];
            let fix = labeling_literals(n, &dag, sample.alphabet(), pool).unwrap();
            let sat = naive_sat(&m, f);
            for s in m.states() {
                let y = pool.lit(&SemVar::Holds {
                    model: 0,
                    node: n,
                    state: s,
                });
                let mut wrong = fix.clone();
                wrong.push(if sat.contains(&s) { !y } else { y });
                assert_eq!(
                    session.solve(&wrong).unwrap(),
                    SolveOutcome::Unsat,
                    "{f} at s{s}"
                );
            }
            assert!(session.solve(&fix).unwrap().is_sat());
        }
    }
}

#[test]
fn blocked_labelings_are_never_decoded() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let m = random_structure(&mut rng, &["p", "q"], 3);
        let sample = Sample::new(vec![m.clone()], vec![]).unwrap();
        let n = rng.gen_range(1..=3);
        let mut blocked = Vec::new();
        loop {
            let inst = EncodingInstance::new(n, &sample, &blocked).unwrap();
            match inst.solve(&cfg()).unwrap() {
                SolveOutcome::Sat(a) => {
                    let dag = inst.decode_dag(&a);
                    assert!(!blocked.contains(&dag));
                    let f = dag.to_formula();
                    assert!(naive_holds(&m, &f));
                    if to_dag(&f).unwrap() != dag || blocked.len() > 40 {
                        break;
                    }
                    blocked.push(dag);
                }
                SolveOutcome::Unsat => break,
            }
        }
    }
}

#[test]
fn lowering_preserves_satisfiability_on_small_instances() {
    let labels = |l: &[&'static str]| l.to_vec();
    let shapes: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (labels(&["p"]), labels(&[])),
        (labels(&[]), labels(&["p"])),
        (labels(&["p"]), labels(&["p"])),
        (labels(&[]), labels(&[])),
    ];
    for (pos, neg) in shapes {
        let mk = |l: &Vec<&str>| {
            KripkeStructure::from_indices(&["p"], &[0], &[vec![0]], std::slice::from_ref(l))
                .unwrap()
        };
        let sample = Sample::new(vec![mk(&pos)], vec![mk(&neg)]).unwrap();
        let inst = EncodingInstance::new(1, &sample, &[]).unwrap();
        let semantic = inst.pool().semantic_vars();
        assert!(semantic <= 16);
        let direct = (0u32..1 << semantic).any(|bits| {
            inst.constraints()
                .eval(&|v: Var| bits >> v.index() & 1 == 1)
        });
        let outcome = inst.solve(&cfg()).unwrap();
        assert_eq!(direct, outcome.is_sat(), "{pos:?} / {neg:?}");
        if let SolveOutcome::Sat(a) = outcome {
            assert!(inst.constraints().eval(&|v| a.value(v)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let m = random_structure(&mut rng, &["p", "q"], 3);
        let sample = Sample::new(vec![m], vec![]).unwrap();
        let inst = EncodingInstance::new(3, &sample, &[]).unwrap();
        if let SolveOutcome::Sat(a) = inst.solve(&cfg()).unwrap() {
            assert!(inst.constraints().eval(&|v| a.value(v)));
        }
    }
}

#[test]
fn enumeration_matches_closure_oracle() {
    for props in [&["p"][..], &["p", "q"][..]] {
        for k in 1..=4 {
            let lib = enf_formulas_up_to(props, k);
            let mut a: Vec<String> = lib.iter().map(|f| f.to_string()).collect();
            let mut b: Vec<String> = oracle_formulas(props, k)
                .iter()
                .map(|f| f.to_string())
                .collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "{props:?} size {k}");
            assert!(lib.windows(2).all(|w| dag_size(&w[0]) <= dag_size(&w[1])));
        }
    }
}
