use std::fmt::Write;

use num_traits::Zero;

use crate::blockmat::IPInstance;
use crate::error::{Error, Result};

/// Fixed-format MPS with the default problem name.
pub fn emit_mps(inst: &IPInstance) -> Result<String> {
    emit_mps_named(inst, "BLOCKSTRUCT")
}

/// Fixed-format MPS: equality rows `R1..`, integer columns `C1..` between
/// `INTORG`/`INTEND` markers, explicit `LI`/`UI` bounds on every column
/// (integer columns otherwise default to binary in some readers). Every
/// column gets a record even when it is empty, using a zero objective
/// coefficient. Numbers wider than the 12-character field overflow it
/// rather than being rounded.
pub fn emit_mps_named(inst: &IPInstance, name: &str) -> Result<String> {
    let mut bounds = Vec::with_capacity(inst.cols());
    for (j, (l, u)) in inst.lower().iter().zip(inst.upper()).enumerate() {
        match (l, u) {
            (Some(l), Some(u)) => bounds.push((l, u)),
            _ => {
                return Err(Error::Format(format!(
                    "column {} is unbounded; MPS export needs finite bounds",
                    j + 1
                )))
            }
        }
    }

    let mut out = String::new();
    let mut line = |fields: &[&str]| {
        out.push_str(&record(fields));
        out.push('\n');
    };
    line(&[&format!("NAME          {name}")]);
    line(&["ROWS"]);
    line(&[" N  OBJ"]);
    for i in 0..inst.rows() {
        line(&[&format!(" E  R{}", i + 1)]);
    }
    line(&["COLUMNS"]);
    line(&["", "MARKER", "'MARKER'", "", "'INTORG'"]);
    let by_column = inst.matrix().transpose().row_entries();
    for (j, entries) in by_column.iter().enumerate() {
        let col = format!("C{}", j + 1);
        let obj = &inst.objective()[j];
        if !obj.is_zero() || entries.is_empty() {
            line(&["", &col, "OBJ", &obj.to_string()]);
        }
        for (i, v) in entries {
            line(&["", &col, &format!("R{}", i + 1), &v.to_string()]);
        }
    }
    line(&["", "MARKER", "'MARKER'", "", "'INTEND'"]);
    line(&["RHS"]);
    for (i, v) in inst.rhs().iter().enumerate() {
        if !v.is_zero() {
            line(&["", "RHS", &format!("R{}", i + 1), &v.to_string()]);
        }
    }
    line(&["BOUNDS"]);
    for (j, (l, u)) in bounds.iter().enumerate() {
        let col = format!("C{}", j + 1);
        line(&[" LI", "BND", &col, &l.to_string()]);
        line(&[" UI", "BND", &col, &u.to_string()]);
    }
    line(&["ENDATA"]);
    Ok(out)
}

/// Lays out up to five fields at the fixed MPS columns 2, 5, 15, 25 and
/// 40. A single field is a section header or a pre-formatted line.
fn record(fields: &[&str]) -> String {
    if fields.len() == 1 {
        return fields[0].to_string();
    }
    const START: [usize; 5] = [1, 4, 14, 24, 39];
    let mut s = String::new();
    for (k, f) in fields.iter().enumerate() {
        let f = f.trim_start();
        if f.is_empty() {
            continue;
        }
        let pad = START[k].saturating_sub(s.len()).max(if s.is_empty() { 0 } else { 1 });
        let _ = write!(s, "{:pad$}{f}", "");
    }
    s
}
