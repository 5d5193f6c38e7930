//! Plain-text LP dump in the CPLEX LP layout, for cross-checking with
//! external solvers.

use std::io::{self, Write};

use super::{LinearProgram, RowKind};

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.17e}")
    }
}

fn write_terms<W: Write>(out: &mut W, terms: &[(usize, f64)]) -> io::Result<()> {
    if terms.is_empty() {
        return write!(out, " 0 y0");
    }
    for &(j, a) in terms {
        let sign = if a < 0.0 { '-' } else { '+' };
        write!(out, " {sign} {} y{j}", fmt_num(a.abs()))?;
    }
    Ok(())
}

pub fn write_lp_text<W: Write>(lp: &LinearProgram, out: &mut W) -> io::Result<()> {
    writeln!(out, "Minimize")?;
    write!(out, " obj:")?;
    let obj: Vec<(usize, f64)> = lp
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, *c))
        .collect();
    write_terms(out, &obj)?;
    writeln!(out)?;
    writeln!(out, "Subject To")?;
    for (i, row) in lp.rows.iter().enumerate() {
        write!(out, " r{i}:")?;
        write_terms(out, &row.coeffs)?;
        let op = match row.kind {
            RowKind::Ge => ">=",
            RowKind::Le => "<=",
            RowKind::Eq => "=",
        };
        writeln!(out, " {op} {}", fmt_num(row.rhs))?;
    }
    writeln!(out, "Bounds")?;
    for j in 0..lp.num_vars() {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            writeln!(out, " y{j} free")?;
        } else {
            writeln!(out, " {} <= y{j} <= {}", fmt_num(l), fmt_num(u))?;
        }
    }
    writeln!(out, "End")
}
