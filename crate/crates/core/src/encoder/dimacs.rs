use std::io::{self, Write};

use super::prop::Clause;

/// Writes a DIMACS CNF document. Each comment becomes one `c` line ahead of
/// the problem line.
pub fn write_dimacs<W: Write>(
    out: &mut W,
    num_vars: usize,
    clauses: &[Clause],
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(out, "c {c}")?;
    }
    writeln!(out, "p cnf {} {}", num_vars, clauses.len())?;
    for clause in clauses {
        for lit in clause {
            write!(out, "{} ", lit.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}
