//! Reading and writing the common `.lp` text format
//! (`Minimize` / `Subject To` / `Bounds` / `End`).

use std::fmt::Write as _;

use crate::{LinearProgram, LpError, Sense, VarId};

const TERMS_PER_LINE: usize = 8;

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // Shortest representation that parses back to the same f64.
        format!("{x:?}")
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    for (i, (a, name)) in terms.enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        if a < 0.0 || (a == 0.0 && a.is_sign_negative()) {
            let _ = write!(out, " - {} {}", fmt_num(-a), name);
        } else {
            let _ = write!(out, " + {} {}", fmt_num(a), name);
        }
    }
}

/// Renders the model. Every variable is listed in the objective, with a zero
/// coefficient if need be, so that reading the text back keeps variable order.
pub fn export_lp_text(lp: &LinearProgram) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    write_terms(
        &mut out,
        lp.variables().iter().map(|v| (v.cost, v.name.clone())),
    );
    out.push_str("\nSubject To\n");
    for c in lp.constraints() {
        let _ = write!(out, " {}:", c.name);
        if c.terms.is_empty() {
            // An empty row still needs a left-hand side.
            if let Some(v) = lp.variables().first() {
                let _ = write!(out, " 0 {}", v.name);
            }
        }
        write_terms(
            &mut out,
            c.terms
                .iter()
                .map(|(v, a)| (*a, lp.variables()[v.0].name.clone())),
        );
        let _ = writeln!(out, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in lp.variables() {
        let (lo, up) = (v.lower, v.upper);
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if lo == up {
            let _ = writeln!(out, " {} = {}", v.name, fmt_num(lo));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_num(lo), v.name, fmt_num(up));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Word(String),
    Sign(f64),
    Rel(Sense),
    Colon,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>, LpError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '\\' {
            break;
        } else if c == ':' {
            toks.push(Tok::Colon);
            i += 1;
        } else if c == '+' || c == '-' {
            // "+inf" / "-infinity" are numbers, a lone sign is an operator.
            let rest: String = chars[i + 1..].iter().collect::<String>().to_ascii_lowercase();
            if rest.starts_with("inf") {
                let len = if rest.starts_with("infinity") { 8 } else { 3 };
                toks.push(Tok::Num(if c == '-' { f64::NEG_INFINITY } else { f64::INFINITY }));
                i += 1 + len;
            } else {
                toks.push(Tok::Sign(if c == '-' { -1.0 } else { 1.0 }));
                i += 1;
            }
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let sense = match op.as_str() {
                "<" | "<=" | "=<" => Sense::Le,
                ">" | ">=" | "=>" => Sense::Ge,
                "=" => Sense::Eq,
                _ => return Err(LpError::Parse { line: lineno, msg: format!("bad operator `{op}`") }),
            };
            toks.push(Tok::Rel(sense));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_ascii_digit()
                    || chars[j] == '.'
                    || ((chars[j] == 'e' || chars[j] == 'E') && j + 1 < chars.len())
                    || ((chars[j] == '+' || chars[j] == '-') && matches!(chars[j - 1], 'e' | 'E')))
            {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let v = s.parse::<f64>().map_err(|_| LpError::Parse {
                line: lineno,
                msg: format!("bad number `{s}`"),
            })?;
            toks.push(Tok::Num(v));
            i = j;
        } else {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !matches!(chars[j], ':' | '<' | '>' | '=' | '+' | '-' | '\\') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let lower = s.to_ascii_lowercase();
            if lower == "inf" || lower == "infinity" {
                toks.push(Tok::Num(f64::INFINITY));
            } else {
                toks.push(Tok::Word(s));
            }
            i = j;
        }
    }
    Ok(toks)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    match l.as_str() {
        "minimize" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "end" => Some(Section::End),
        _ => None,
    }
}

struct Pending {
    toks: Vec<Tok>,
    line: usize,
}

/// Parses `.lp` text into a model. Supports minimization with continuous
/// variables; variables without bounds default to `[0, +inf)`.
pub fn parse_lp_text(text: &str) -> Result<LinearProgram, LpError> {
    let mut section = Section::None;
    let mut objective = Vec::new();
    let mut rows: Vec<Pending> = Vec::new();
    let mut bounds: Vec<Pending> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('\\') {
            continue;
        }
        let lower = raw.trim().to_ascii_lowercase();
        if lower.starts_with("max") {
            return Err(LpError::Parse { line: lineno, msg: "only minimization is supported".into() });
        }
        if ["general", "generals", "gen", "binary", "binaries", "bin", "semi-continuous"].contains(&lower.as_str()) {
            return Err(LpError::Parse { line: lineno, msg: "integer variables are not supported".into() });
        }
        if let Some(s) = section_of(raw) {
            section = s;
            continue;
        }
        let toks = tokenize(raw, lineno)?;
        match section {
            Section::None => return Err(LpError::Parse { line: lineno, msg: "text before `Minimize`".into() }),
            Section::Objective => objective.extend(toks),
            Section::Constraints => {
                // A line starts a new row when it carries a label or the previous row is complete.
                let starts_new = rows.last().map_or(true, |p| p.toks.iter().any(|t| matches!(t, Tok::Rel(_))) && ends_with_number(&p.toks))
                    || matches!(toks.get(1), Some(Tok::Colon));
                if starts_new {
                    rows.push(Pending { toks, line: lineno });
                } else {
                    rows.last_mut().unwrap().toks.extend(toks);
                }
            }
            Section::Bounds => bounds.push(Pending { toks, line: lineno }),
            Section::End => return Err(LpError::Parse { line: lineno, msg: "text after `End`".into() }),
        }
    }

    let mut lp = LinearProgram::new();
    let mut get = |lp: &mut LinearProgram, name: &str| -> Result<VarId, LpError> {
        match lp.var(name) {
            Some(v) => Ok(v),
            None => lp.add_var(name, 0.0, f64::INFINITY, 0.0),
        }
    };

    let obj = strip_label(&objective);
    for (a, name) in linear_terms(obj, 0)? {
        let v = get(&mut lp, &name)?;
        let c = lp.variables()[v.0].cost;
        lp.set_cost(v, c + a);
    }
    for (i, row) in rows.iter().enumerate() {
        let (label, body) = match (row.toks.first(), row.toks.get(1)) {
            (Some(Tok::Word(w)), Some(Tok::Colon)) => (w.clone(), &row.toks[2..]),
            _ => (format!("R{}", i + 1), &row.toks[..]),
        };
        let rel = body
            .iter()
            .position(|t| matches!(t, Tok::Rel(_)))
            .ok_or_else(|| LpError::Parse { line: row.line, msg: "row without relation".into() })?;
        let sense = match body[rel] {
            Tok::Rel(s) => s,
            _ => unreachable!(),
        };
        let rhs = signed_number(&body[rel + 1..])
            .ok_or_else(|| LpError::Parse { line: row.line, msg: "row needs a numeric right-hand side".into() })?;
        let mut terms = Vec::new();
        for (a, name) in linear_terms(&body[..rel], row.line)? {
            terms.push((get(&mut lp, &name)?, a));
        }
        lp.add_constraint(label, terms, sense, rhs)?;
    }
    for b in &bounds {
        apply_bound(&mut lp, &b.toks, b.line, &mut get)?;
    }
    Ok(lp)
}

fn ends_with_number(toks: &[Tok]) -> bool {
    matches!(toks.last(), Some(Tok::Num(_)))
}

fn strip_label(toks: &[Tok]) -> &[Tok] {
    match (toks.first(), toks.get(1)) {
        (Some(Tok::Word(_)), Some(Tok::Colon)) => &toks[2..],
        _ => toks,
    }
}

fn signed_number(toks: &[Tok]) -> Option<f64> {
    match toks {
        [Tok::Num(x)] => Some(*x),
        [Tok::Sign(s), Tok::Num(x)] => Some(s * x),
        _ => None,
    }
}

fn linear_terms(toks: &[Tok], line: usize) -> Result<Vec<(f64, String)>, LpError> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for t in toks {
        match t {
            Tok::Sign(s) => sign *= s,
            Tok::Num(x) => {
                coef = Some(coef.unwrap_or(1.0) * x);
            }
            Tok::Word(w) => {
                out.push((sign * coef.unwrap_or(1.0), w.clone()));
                sign = 1.0;
                coef = None;
            }
            _ => return Err(LpError::Parse { line, msg: "unexpected token in expression".into() }),
        }
    }
    if coef.is_some() {
        return Err(LpError::Parse { line, msg: "constant terms are not supported".into() });
    }
    Ok(out)
}

type Getter<'a> = dyn FnMut(&mut LinearProgram, &str) -> Result<VarId, LpError> + 'a;

fn apply_bound(
    lp: &mut LinearProgram,
    toks: &[Tok],
    line: usize,
    get: &mut Getter<'_>,
) -> Result<(), LpError> {
    let err = |msg: &str| LpError::Parse { line, msg: msg.into() };
    // Normalize "- 5" into a single number.
    let mut t: Vec<Tok> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        match (&toks[i], toks.get(i + 1)) {
            (Tok::Sign(s), Some(Tok::Num(x))) => {
                t.push(Tok::Num(s * x));
                i += 2;
            }
            (tok, _) => {
                t.push(tok.clone());
                i += 1;
            }
        }
    }
    let set = |lp: &mut LinearProgram, v: VarId, lo: Option<f64>, up: Option<f64>| -> Result<(), LpError> {
        let var = &lp.variables()[v.0];
        let (lo, up) = (lo.unwrap_or(var.lower), up.unwrap_or(var.upper));
        lp.set_bounds(v, lo, up)
    };
    match t.as_slice() {
        [Tok::Word(name), Tok::Word(kw)] if kw.eq_ignore_ascii_case("free") => {
            let v = get(lp, name)?;
            set(lp, v, Some(f64::NEG_INFINITY), Some(f64::INFINITY))
        }
        [Tok::Num(lo), Tok::Rel(Sense::Le), Tok::Word(name), Tok::Rel(Sense::Le), Tok::Num(up)] => {
            let v = get(lp, name)?;
            set(lp, v, Some(*lo), Some(*up))
        }
        [Tok::Word(name), Tok::Rel(s), Tok::Num(x)] => {
            let v = get(lp, name)?;
            match s {
                Sense::Le => set(lp, v, None, Some(*x)),
                Sense::Ge => set(lp, v, Some(*x), None),
                Sense::Eq => set(lp, v, Some(*x), Some(*x)),
            }
        }
        [Tok::Num(x), Tok::Rel(s), Tok::Word(name)] => {
            let v = get(lp, name)?;
            match s {
                Sense::Le => set(lp, v, Some(*x), None),
                Sense::Ge => set(lp, v, None, Some(*x)),
                Sense::Eq => set(lp, v, Some(*x), Some(*x)),
            }
        }
        _ => Err(err("unrecognized bound")),
    }
}
