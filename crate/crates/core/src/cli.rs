//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage or input error,
//! 3 solver or internal failure. The last line on standard output starts
//! with `result: `.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::ceg::{self, CegError};
use crate::checker;
use crate::ctl::{parse_ctl, CtlFormula};
use crate::encoder::{EncodingInstance, SolverConfig};
use crate::kripke::{parse_kripke, print_kripke, KripkeStructure, Proposition};
use crate::learner::{self, LearnError, LearnOutcome, Sample};
use crate::synth::{self, SynthError, SynthOutcome, SynthQuery};

#[derive(Debug, Parser)]
#[command(
    name = "ctl-infer",
    version,
    about = "Learn and check CTL formulas over Kripke structures"
)]
pub struct Cli {
    /// Seed for the solver's decision heuristic; 0 keeps the default order.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Per-call solver time limit in milliseconds.
    #[arg(long, global = true)]
    pub time_limit_ms: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model-check a formula against a Kripke structure.
    Check {
        model: PathBuf,
        formula: String,
        /// Print the SAT set of every subformula.
        #[arg(long)]
        sets: bool,
    },
    /// Learn a minimal formula consistent with positive and negative structures.
    Learn {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_size: u64,
        /// Write each budget's CNF into this directory.
        #[arg(long)]
        dump_cnf: Option<PathBuf>,
        /// Include solve times in the budget lines.
        #[arg(long)]
        timing: bool,
    },
    /// Search for a Kripke structure satisfying a formula.
    Synth {
        formula: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_states: u64,
        /// Alphabet of the synthesized structure; defaults to the formula's propositions.
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
    },
    /// Infer a language-minimal formula for one structure.
    Infer {
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        synth_states: u64,
        /// Write the iteration log to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write the learning instance for one node budget as DIMACS CNF.
    CnfDump {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, num_args = 1..)]
    pub pos: Vec<PathBuf>,
    #[arg(long, num_args = 1..)]
    pub neg: Vec<PathBuf>,
}

enum Failure {
    Input(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Backend(_) => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::UnknownProposition(_) | SynthError::ZeroStates => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<CegError> for Failure {
    fn from(e: CegError) -> Self {
        match e {
            CegError::Learn(l) => l.into(),
            CegError::Synth(s) => s.into(),
            CegError::Check(c) => Failure::Input(c.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{text}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        2
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let config = SolverConfig {
        seed: cli.seed,
        time_limit: cli.time_limit_ms.map(Duration::from_millis),
    };
    let result = match &cli.command {
        Command::Check {
            model,
            formula,
            sets,
        } => check(model, formula, *sets, out),
        Command::Learn {
            sample,
            max_size,
            dump_cnf,
            timing,
        } => learn(
            sample,
            *max_size as usize,
            dump_cnf.as_deref(),
            *timing,
            &config,
            out,
            err,
        ),
        Command::Synth {
            formula,
            max_states,
            props,
        } => synth(
            formula,
            *max_states as usize,
            props.as_deref(),
            &config,
            out,
        ),
        Command::Infer {
            model,
            bound,
            synth_states,
            trace,
        } => infer(
            model,
            *bound as usize,
            *synth_states as usize,
            trace.as_deref(),
            &config,
            out,
        ),
        Command::CnfDump {
            sample,
            size,
            output,
        } => cnf_dump(sample, *size as usize, output, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn read_model(path: &Path) -> Result<KripkeStructure, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_kripke(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_formula(text: &str) -> Result<CtlFormula, Failure> {
    parse_ctl(text).map_err(|e| Failure::Input(format!("formula `{text}`: {e}")))
}

fn read_sample(args: &SampleArgs, err: &mut dyn Write) -> Result<Sample, Failure> {
    let pos = args
        .pos
        .iter()
        .map(|p| read_model(p))
        .collect::<Result<_, _>>()?;
    let neg = args
        .neg
        .iter()
        .map(|p| read_model(p))
        .collect::<Result<_, _>>()?;
    let sample = Sample::new(pos, neg).map_err(|e| Failure::Input(e.to_string()))?;
    if let Some((i, j)) = sample.find_overlap() {
        writeln!(
            err,
            "warning: {} and {} are isomorphic; no formula can separate them",
            args.pos[i].display(),
            args.neg[j].display()
        )?;
    }
    Ok(sample)
}

fn check(model: &Path, formula: &str, sets: bool, out: &mut dyn Write) -> Outcome {
    let m = read_model(model)?;
    let f = read_formula(formula)?;
    let input = |e: checker::CheckError| Failure::Input(e.to_string());
    if sets {
        for s in checker::all_sat_sets(&m, &f).map_err(input)? {
            writeln!(out, "SAT({}) = {}", s.formula, s.display(&m))?;
        }
    }
    if checker::holds(&m, &f).map_err(input)? {
        writeln!(out, "result: holds")?;
        Ok(0)
    } else {
        writeln!(out, "result: fails")?;
        Ok(1)
    }
}

fn learn(
    args: &SampleArgs,
    max_size: usize,
    dump: Option<&Path>,
    timing: bool,
    config: &SolverConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let sample = read_sample(args, err)?;
    if let Some(dir) = dump {
        fs::create_dir_all(dir)?;
    }
    let mut dump_error = None;
    let outcome = learner::learn_minimal_with(&sample, max_size, config, &mut |inst, _| {
        if let Some(dir) = dump {
            if let Err(e) = write_instance(inst, &dir.join(format!("budget-{}.cnf", inst.budget())))
            {
                dump_error.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = dump_error {
        return Err(e.into());
    }
    for s in outcome.stats() {
        let verdict = if s.sat { "SAT" } else { "UNSAT" };
        write!(
            out,
            "budget {}: {verdict} (vars={}, clauses={}",
            s.n, s.vars, s.clauses
        )?;
        if timing {
            write!(out, ", ms={}", s.elapsed.as_millis())?;
        }
        writeln!(out, ")")?;
    }
    match outcome {
        LearnOutcome::Found(r) => {
            writeln!(out, "size: {}", r.formula.size())?;
            writeln!(out, "result: {}", r.formula)?;
            Ok(0)
        }
        LearnOutcome::NoConsistentFormula { .. } => {
            writeln!(out, "result: no consistent formula up to size {max_size}")?;
            Ok(1)
        }
    }
}

fn write_instance(inst: &EncodingInstance<'_>, path: &Path) -> io::Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    inst.write_dimacs(&mut file)?;
    file.flush()
}

fn synth(
    formula: &str,
    max_states: usize,
    props: Option<&[String]>,
    config: &SolverConfig,
    out: &mut dyn Write,
) -> Outcome {
    let f = read_formula(formula)?;
    let names: Vec<String> = match props {
        Some(ps) => ps.to_vec(),
        None => f.propositions().into_iter().map(String::from).collect(),
    };
    let alphabet = names
        .iter()
        .map(|p| Proposition::new(p.trim()).map_err(|e| Failure::Input(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    match synth::synthesize(&SynthQuery::new(f, max_states, &alphabet), config)? {
        SynthOutcome::Model(m) => {
            write!(out, "{}", print_kripke(&m))?;
            writeln!(out, "result: model with {} states", m.num_states())?;
            Ok(0)
        }
        SynthOutcome::NoModelUpTo(n) => {
            writeln!(out, "result: no model up to {n} states")?;
            Ok(1)
        }
    }
}

fn infer(
    model: &Path,
    bound: usize,
    synth_states: usize,
    trace: Option<&Path>,
    config: &SolverConfig,
    out: &mut dyn Write,
) -> Outcome {
    let m = read_model(model)?;
    let report = ceg::infer(&m, bound, synth_states, config)?;
    if let Some(path) = trace {
        let mut text = report.trace_lines().join("\n");
        text.push('\n');
        fs::write(path, text)?;
    }
    writeln!(out, "iterations: {}", report.iterations)?;
    writeln!(out, "negatives: {}", report.negatives.len())?;
    writeln!(out, "certification: {}", report.certification)?;
    writeln!(out, "result: {}", report.formula)?;
    Ok(0)
}

fn cnf_dump(
    args: &SampleArgs,
    size: usize,
    output: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let sample = read_sample(args, err)?;
    let inst = EncodingInstance::new(size, &sample, &[]).map_err(LearnError::from)?;
    write_instance(&inst, output)?;
    writeln!(
        out,
        "result: wrote {} (vars={}, clauses={})",
        output.display(),
        inst.num_vars(),
        inst.num_clauses()
    )?;
    Ok(0)
}
