//! Plain-text LP format.
//!
//! ```text
//! MINIMIZE
//!  obj: 1 x
//! SUBJECT TO
//!  c1: 1 x >= 1
//! BOUNDS
//!  x >= 0
//! END
//! ```
//!
//! Coefficients use 17 significant digits so that `f64` values survive a
//! round trip exactly. Every variable appears in `BOUNDS`, in declaration
//! order, which also fixes the variable order on re-parse.

use std::collections::HashMap;
use std::fmt::Write;

use super::{LpError, LpModel, Relation, VarId};
use crate::scalar::Field;

/// `printf("%.17g")`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{v:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_expr<T: Field>(out: &mut String, model: &LpModel<T>, terms: &[(VarId, T)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (i, (v, c)) in terms.iter().enumerate() {
        let c = c.to_f64();
        let name = &model.vars()[v.0].name;
        match (i, c < 0.0) {
            (0, false) => write!(out, " {} {name}", fmt_g17(c)),
            (0, true) => write!(out, " -{} {name}", fmt_g17(-c)),
            (_, false) => write!(out, " + {} {name}", fmt_g17(c)),
            (_, true) => write!(out, " - {} {name}", fmt_g17(-c)),
        }
        .unwrap();
    }
}

pub fn export_lp<T: Field>(model: &LpModel<T>) -> String {
    let mut out = String::from("MINIMIZE\n obj:");
    write_expr(&mut out, model, model.objective());
    out.push_str("\nSUBJECT TO\n");
    for c in model.constraints() {
        write!(out, " {}:", c.name).unwrap();
        write_expr(&mut out, model, &c.coeffs);
        writeln!(out, " {} {}", c.rel, fmt_g17(c.rhs.to_f64())).unwrap();
    }
    out.push_str("BOUNDS\n");
    for v in model.vars() {
        match &v.upper {
            None => writeln!(out, " {} >= 0", v.name),
            Some(u) => writeln!(out, " 0 <= {} <= {}", v.name, fmt_g17(u.to_f64())),
        }
        .unwrap();
    }
    out.push_str("END\n");
    out
}

fn perr(line: usize, msg: impl Into<String>) -> LpError {
    LpError::Parse { line, msg: msg.into() }
}

fn number(tok: &str, line: usize) -> Result<f64, LpError> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("expected a number, found `{tok}`")))
}

type RawTerms = Vec<(String, f64)>;

/// Parses `c v + c v - c v` (or `0`).
fn parse_expr(toks: &[&str], line: usize) -> Result<RawTerms, LpError> {
    if toks == ["0"] {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut i = 0;
    let mut sign = 1.0;
    while i < toks.len() {
        if i > 0 {
            sign = match toks[i] {
                "+" => 1.0,
                "-" => -1.0,
                t => return Err(perr(line, format!("expected `+` or `-`, found `{t}`"))),
            };
            i += 1;
        }
        let (c, v) = match (toks.get(i), toks.get(i + 1)) {
            (Some(c), Some(v)) => (*c, *v),
            _ => return Err(perr(line, "incomplete term")),
        };
        terms.push((v.to_string(), sign * number(c, line)?));
        i += 2;
    }
    Ok(terms)
}

/// Inverse of [`export_lp`].
pub fn parse_lp(text: &str) -> Result<LpModel<f64>, LpError> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Objective,
        Rows,
        Bounds,
        End,
    }
    let mut section = Section::Start;
    let mut objective: Option<(usize, RawTerms)> = None;
    let mut rows: Vec<(usize, String, RawTerms, Relation, f64)> = Vec::new();
    let mut model = LpModel::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        match l {
            "MINIMIZE" if section == Section::Start => {
                section = Section::Objective;
                continue;
            }
            "SUBJECT TO" if section == Section::Objective => {
                section = Section::Rows;
                continue;
            }
            "BOUNDS" if section == Section::Rows => {
                section = Section::Bounds;
                continue;
            }
            "END" if section == Section::Bounds => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match section {
            Section::Start => return Err(perr(line, "expected `MINIMIZE`")),
            Section::End => return Err(perr(line, "content after `END`")),
            Section::Objective => {
                let rest = l.strip_prefix("obj:").ok_or_else(|| perr(line, "expected `obj:`"))?;
                if objective.is_some() {
                    return Err(perr(line, "second objective"));
                }
                let toks: Vec<&str> = rest.split_whitespace().collect();
                objective = Some((line, parse_expr(&toks, line)?));
            }
            Section::Rows => {
                let (name, rest) = l.split_once(':').ok_or_else(|| perr(line, "expected `name:`"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let n = toks.len();
                if n < 3 {
                    return Err(perr(line, "incomplete constraint"));
                }
                let rel = match toks[n - 2] {
                    "<=" => Relation::Le,
                    ">=" => Relation::Ge,
                    "=" => Relation::Eq,
                    t => return Err(perr(line, format!("expected a relation, found `{t}`"))),
                };
                let rhs = number(toks[n - 1], line)?;
                rows.push((line, name.trim().to_string(), parse_expr(&toks[..n - 2], line)?, rel, rhs));
            }
            Section::Bounds => match toks.as_slice() {
                [v, ">=", "0"] => {
                    model.add_var(*v, None);
                }
                ["0", "<=", v, "<=", u] => {
                    let u = number(u, line)?;
                    model.add_var(*v, Some(u));
                }
                _ => return Err(perr(line, "expected `x >= 0` or `0 <= x <= u`")),
            },
        }
    }
    if section != Section::End {
        return Err(perr(text.lines().count(), "missing `END`"));
    }

    let ids: HashMap<String, VarId> =
        model.vars().iter().enumerate().map(|(i, v)| (v.name.clone(), VarId(i))).collect();
    let resolve = |terms: RawTerms, line: usize| -> Result<Vec<(VarId, f64)>, LpError> {
        terms
            .into_iter()
            .map(|(v, c)| ids.get(&v).map(|id| (*id, c)).ok_or_else(|| perr(line, format!("undeclared variable `{v}`"))))
            .collect()
    };
    if let Some((line, terms)) = objective {
        for (v, c) in resolve(terms, line)? {
            model.add_objective(v, c);
        }
    }
    for (line, name, terms, rel, rhs) in rows {
        let coeffs = resolve(terms, line)?;
        model.add_constraint(name, coeffs, rel, rhs);
    }
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(-2.25), "-2.25");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(1e16), "10000000000000000");
        assert_eq!(fmt_g17(1e17), "1e+17");
    }

    #[test]
    fn golden_min_x() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("x", None);
        m.add_objective(x, 1.0);
        m.add_constraint("c1", vec![(x, 1.0)], Relation::Ge, 1.0);
        let text = export_lp(&m);
        assert_eq!(text, "MINIMIZE\n obj: 1 x\nSUBJECT TO\n c1: 1 x >= 1\nBOUNDS\n x >= 0\nEND\n");
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn empty_model() {
        let m = LpModel::<f64>::new();
        let text = export_lp(&m);
        assert_eq!(text, "MINIMIZE\n obj: 0\nSUBJECT TO\nBOUNDS\nEND\n");
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn signs_bounds_and_round_trip() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("phi_V[0,1]", Some(0.0));
        let y = m.add_var("y", Some(2.5));
        m.add_objective(y, 0.1);
        m.add_constraint("r", vec![(x, -1.0), (y, 1.0 / 3.0)], Relation::Le, -0.25);
        m.add_constraint("e", vec![], Relation::Eq, 0.0);
        let text = export_lp(&m);
        assert!(text.contains(" r: -1 phi_V[0,1] + 0.33333333333333331 y <= -0.25\n"), "{text}");
        assert!(text.contains(" e: 0 = 0\n"));
        assert!(text.contains(" 0 <= phi_V[0,1] <= 0\n"));
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_lp("MINIMIZE\n obj: 1 x\nSUBJECT TO\nBOUNDS\nEND\n").unwrap_err();
        assert_eq!(err, LpError::Parse { line: 2, msg: "undeclared variable `x`".into() });
        assert!(matches!(parse_lp("MINIMIZE\n"), Err(LpError::Parse { .. })));
    }
}
