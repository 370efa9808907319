//! Line-oriented text dump of programs and solutions with exact `p/q` values.
//!
//! ```text
//! lp <vars> <rows>
//! objective <c_0> ... <c_{n-1}>
//! lower <l_0|free> ...
//! row <=|=|>= <rhs> <a_0> ... <a_{n-1}>
//! ```

use std::io::{self, Write};

use super::simplex::{LpProblem, LpSolution, Relation};
use crate::exact::{format_rational, parse_rational, Rational};

fn join(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

pub fn write_problem<W: Write>(p: &LpProblem, mut w: W) -> io::Result<()> {
    writeln!(w, "lp {} {}", p.num_vars(), p.num_rows())?;
    writeln!(w, "objective {}", join(p.objective()))?;
    let lower: Vec<String> =
        p.lower().iter().map(|l| l.as_ref().map_or_else(|| "free".to_string(), format_rational)).collect();
    writeln!(w, "lower {}", lower.join(" "))?;
    for ((a, rel), b) in p.rows().iter().zip(p.relations()).zip(p.rhs()) {
        writeln!(w, "row {} {} {}", rel.symbol(), format_rational(b), join(a))?;
    }
    Ok(())
}

pub fn write_solution<W: Write>(s: &LpSolution, mut w: W) -> io::Result<()> {
    writeln!(w, "status {}", s.status)?;
    writeln!(w, "objective {}", format_rational(&s.objective))?;
    writeln!(w, "point {}", join(&s.point))?;
    let basis: Vec<String> = s.basis.iter().map(|b| b.to_string()).collect();
    writeln!(w, "basis {}", basis.join(" "))?;
    writeln!(w, "duals {}", join(&s.duals))?;
    writeln!(w, "pivots {}", s.pivots)?;
    Ok(())
}

pub fn parse_problem(text: &str) -> Result<LpProblem, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or("empty input")?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "lp" {
        return Err(format!("bad header {header:?}"));
    }
    let n: usize = h[1].parse().map_err(|_| "bad variable count")?;
    let m: usize = h[2].parse().map_err(|_| "bad row count")?;

    let values = |line: Option<&str>, tag: &str| -> Result<Vec<String>, String> {
        let line = line.ok_or(format!("missing {tag} line"))?;
        let mut it = line.split_whitespace();
        if it.next() != Some(tag) {
            return Err(format!("expected {tag} line, got {line:?}"));
        }
        Ok(it.map(String::from).collect())
    };
    let parse_all = |v: &[String]| -> Result<Vec<Rational>, String> {
        v.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect()
    };

    let objective = parse_all(&values(lines.next(), "objective")?)?;
    if objective.len() != n {
        return Err("objective length mismatch".into());
    }
    let mut p = LpProblem::new(objective);
    let lower = values(lines.next(), "lower")?;
    if lower.len() != n {
        return Err("lower-bound length mismatch".into());
    }
    for (i, l) in lower.iter().enumerate() {
        let bound = if l == "free" { None } else { Some(parse_rational(l).map_err(|e| e.to_string())?) };
        p.set_lower(i, bound);
    }
    for _ in 0..m {
        let v = values(lines.next(), "row")?;
        if v.len() != n + 2 {
            return Err("row length mismatch".into());
        }
        let rel = match v[0].as_str() {
            "<=" => Relation::Le,
            "=" => Relation::Eq,
            ">=" => Relation::Ge,
            other => return Err(format!("unknown relation {other:?}")),
        };
        let rhs = parse_rational(&v[1]).map_err(|e| e.to_string())?;
        p.add_row(parse_all(&v[2..])?, rel, rhs);
    }
    if lines.next().is_some() {
        return Err("trailing lines".into());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::SpinJ;
    use crate::lp::{reformulate_abs, simplex_solve};

    #[test]
    fn protocol_program_round_trips() {
        let p = reformulate_abs(SpinJ::integer(2).unwrap());
        let mut out = Vec::new();
        write_problem(&p, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("lp 10 12\n"));
        assert_eq!(parse_problem(&text).unwrap(), p);
    }

    #[test]
    fn solution_dump() {
        let p = reformulate_abs(SpinJ::integer(1).unwrap());
        let s = simplex_solve(&p);
        let mut out = Vec::new();
        write_solution(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("status optimal\nobjective 1/3\n"));
    }

    #[test]
    fn malformed_input() {
        assert!(parse_problem("").is_err());
        assert!(parse_problem("lp 1 1\nobjective 1\nlower 0\nrow ~ 1 1\n").is_err());
        assert!(parse_problem("lp 1 0\nobjective 1/0\nlower 0\n").is_err());
        assert!(parse_problem("lp 1 0\nobjective 1\nlower free\n").is_ok());
    }
}
