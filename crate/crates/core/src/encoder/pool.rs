use std::collections::HashMap;
use std::hash::Hash;

use super::prop::{Lit, Var};

/// Bijection between semantic variable keys and solver variables.
///
/// Semantic variables are declared first; auxiliaries handed out by
/// [`VarPool::fresh`] are numbered above all of them.
#[derive(Debug, Clone)]
pub struct VarPool<K> {
    index: HashMap<K, Var>,
    keys: Vec<K>,
    aux: u32,
}

impl<K: Hash + Eq + Clone> Default for VarPool<K> {
    fn default() -> Self {
        VarPool {
            index: HashMap::new(),
            keys: Vec::new(),
            aux: 0,
        }
    }
}

impl<K: Hash + Eq + Clone> VarPool<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a semantic variable, returning the existing one if present.
    pub fn declare(&mut self, key: K) -> Var {
        if let Some(&v) = self.index.get(&key) {
            return v;
        }
        assert_eq!(self.aux, 0, "semantic variable declared after auxiliaries");
        let v = Var(self.keys.len() as u32 + 1);
        self.keys.push(key.clone());
        self.index.insert(key, v);
        v
    }

    pub fn get(&self, key: &K) -> Option<Var> {
        self.index.get(key).copied()
    }

    /// The variable of a declared key.
    ///
    /// Panics when the key was never declared.
    pub fn var(&self, key: &K) -> Var {
        self.index[key]
    }

    pub fn lit(&self, key: &K) -> Lit {
        Lit::pos(self.var(key))
    }

    pub fn fresh(&mut self) -> Var {
        self.aux += 1;
        Var(self.keys.len() as u32 + self.aux)
    }

    /// The key of a semantic variable; `None` for auxiliaries.
    pub fn key(&self, v: Var) -> Option<&K> {
        self.keys.get(v.index())
    }

    pub fn semantic_vars(&self) -> usize {
        self.keys.len()
    }

    pub fn num_vars(&self) -> usize {
        self.keys.len() + self.aux as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &K)> {
        self.keys
            .iter()
            .enumerate()
            .map(|(i, k)| (Var(i as u32 + 1), k))
    }
}
