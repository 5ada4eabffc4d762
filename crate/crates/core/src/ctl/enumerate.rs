use super::CtlFormula;

/// Every ENF formula over `alphabet` with `1 <= size <= max_size`, ordered by
/// size. Each formula appears once.
///
/// The count grows quickly; intended for sizes up to about 4.
pub fn enf_formulas_up_to<P: AsRef<str>>(alphabet: &[P], max_size: usize) -> Vec<CtlFormula> {
    // each entry keeps its subformula set as sorted indices into `all`
    let mut all: Vec<(CtlFormula, Vec<usize>)> = Vec::new();
    if max_size == 0 {
        return Vec::new();
    }
    for p in alphabet {
        let id = all.len();
        all.push((CtlFormula::prop(p.as_ref()), vec![id]));
    }
    for size in 2..=max_size {
        let smaller = all.len();
        let mut fresh = Vec::new();
        for (f, sub) in all.iter().filter(|(_, sub)| sub.len() == size - 1) {
            for ctor in [CtlFormula::not, CtlFormula::ex, CtlFormula::eg] {
                fresh.push((ctor(f.clone()), sub.clone()));
            }
        }
        for a in 0..smaller {
            for b in 0..smaller {
                let union = merge(&all[a].1, &all[b].1);
                if union.len() != size - 1 {
                    continue;
                }
                let (fa, fb) = (&all[a].0, &all[b].0);
                fresh.push((CtlFormula::and(fa.clone(), fb.clone()), union.clone()));
                fresh.push((CtlFormula::or(fa.clone(), fb.clone()), union.clone()));
                fresh.push((CtlFormula::eu(fa.clone(), fb.clone()), union));
            }
        }
        for (f, mut sub) in fresh {
            let id = all.len();
            sub.push(id);
            all.push((f, sub));
        }
    }
    all.into_iter().map(|(f, _)| f).collect()
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                out.push(*x);
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_counts() {
        let size2 = enf_formulas_up_to(&["p"], 2);
        let names: Vec<String> = size2.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            names,
            ["p", "!p", "EX p", "EG p", "p & p", "p | p", "E[p U p]"]
        );
        let up_to_4 = enf_formulas_up_to(&["p", "q"], 4);
        let distinct: HashSet<_> = up_to_4.iter().collect();
        assert_eq!(distinct.len(), up_to_4.len());
        assert!(up_to_4.iter().all(|f| f.is_enf() && f.size() <= 4));
        assert!(up_to_4.windows(2).all(|w| w[0].size() <= w[1].size()));
    }
}
