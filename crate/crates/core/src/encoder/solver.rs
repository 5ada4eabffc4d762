//! Propositional satisfiability backends.

use std::cell::Cell;
use std::rc::Rc;
use std::time::{Duration, Instant};

use batsat::{lbool, BasicSolver, SolverInterface, SolverOpts};
use thiserror::Error;

use super::prop::{Lit, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendFailure {
    #[error("solver gave up: {0}")]
    ResourceLimit(String),
}

/// Backend settings. The seed fixes the decision heuristic; seed 0 keeps
/// the backend defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub seed: u64,
    pub time_limit: Option<Duration>,
}

/// Incremental solver interface: add clauses, solve under assumptions,
/// read back the model of the last satisfiable call.
pub trait SatBackend {
    fn add_clause(&mut self, clause: &[Lit]);

    /// `Ok(true)` for SAT, `Ok(false)` for UNSAT under the assumptions.
    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool, BackendFailure>;

    /// Value of `v` in the last model. Variables the solver never saw are false.
    fn value(&self, v: Var) -> bool;
}

/// [`SatBackend`] over the in-process `batsat` CDCL solver.
pub struct BatsatBackend {
    solver: BasicSolver,
    vars: Vec<batsat::Var>,
    deadline: Rc<Cell<Option<Instant>>>,
    time_limit: Option<Duration>,
}

impl BatsatBackend {
    pub fn new(config: &SolverConfig) -> Self {
        let mut opts = SolverOpts::default();
        if config.seed != 0 {
            opts.random_seed = config.seed as f64;
            opts.rnd_init_act = true;
        }
        let deadline: Rc<Cell<Option<Instant>>> = Rc::new(Cell::new(None));
        let mut callbacks = batsat::BasicCallbacks::new();
        let watch = Rc::clone(&deadline);
        callbacks.set_stop(move || watch.get().is_some_and(|d| Instant::now() >= d));
        BatsatBackend {
            solver: BasicSolver::new(opts, callbacks),
            vars: Vec::new(),
            deadline,
            time_limit: config.time_limit,
        }
    }

    fn lit(&mut self, l: Lit) -> batsat::Lit {
        let idx = l.var().index();
        while self.vars.len() <= idx {
            let v = self.solver.new_var_default();
            self.vars.push(v);
        }
        batsat::Lit::new(self.vars[idx], l.is_positive())
    }
}

impl SatBackend for BatsatBackend {
    fn add_clause(&mut self, clause: &[Lit]) {
        let mut lits: Vec<batsat::Lit> = clause.iter().map(|&l| self.lit(l)).collect();
        self.solver.add_clause_reuse(&mut lits);
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool, BackendFailure> {
        let assumps: Vec<batsat::Lit> = assumptions.iter().map(|&l| self.lit(l)).collect();
        self.deadline
            .set(self.time_limit.map(|limit| Instant::now() + limit));
        let result = self.solver.solve_limited(&assumps);
        self.deadline.set(None);
        if result == lbool::TRUE {
            Ok(true)
        } else if result == lbool::FALSE {
            Ok(false)
        } else {
            Err(BackendFailure::ResourceLimit(match self.time_limit {
                Some(t) => format!("time limit of {} ms reached", t.as_millis()),
                None => "interrupted".into(),
            }))
        }
    }

    fn value(&self, v: Var) -> bool {
        self.vars
            .get(v.index())
            .is_some_and(|&bv| self.solver.value_var(bv) == lbool::TRUE)
    }
}

/// Total assignment over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn from_backend(backend: &dyn SatBackend, num_vars: usize) -> Self {
        Assignment {
            values: (1..=num_vars as u32)
                .map(|v| backend.value(Var(v)))
                .collect(),
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Assignment),
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

/// A backend loaded with one clause set.
pub struct Session {
    backend: Box<dyn SatBackend>,
    num_vars: usize,
}

impl Session {
    pub fn new(config: &SolverConfig, num_vars: usize, clauses: &[Vec<Lit>]) -> Self {
        Self::with_backend(Box::new(BatsatBackend::new(config)), num_vars, clauses)
    }

    pub fn with_backend(
        mut backend: Box<dyn SatBackend>,
        num_vars: usize,
        clauses: &[Vec<Lit>],
    ) -> Self {
        for c in clauses {
            backend.add_clause(c);
        }
        Session { backend, num_vars }
    }

    pub fn add_clause(&mut self, clause: &[Lit]) {
        for l in clause {
            self.num_vars = self.num_vars.max(l.var().0 as usize);
        }
        self.backend.add_clause(clause);
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveOutcome, BackendFailure> {
        if self.backend.solve(assumptions)? {
            Ok(SolveOutcome::Sat(Assignment::from_backend(
                self.backend.as_ref(),
                self.num_vars,
            )))
        } else {
            Ok(SolveOutcome::Unsat)
        }
    }
}
