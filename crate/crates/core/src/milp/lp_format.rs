//! CPLEX-style LP text format.
//!
//! The writer lists every variable in the `Bounds` section in model order,
//! so parsing the output rebuilds variables with identical indices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{MipModel, Relation, Sense, VarId};
use crate::error::{Error, Result};

const KEYWORDS: &[&str] = &[
    "inf", "infinity", "free", "end", "bounds", "bound", "binary", "binaries", "bin", "st", "subject", "such",
    "maximize", "maximise", "maximum", "max", "minimize", "minimise", "minimum", "min", "general", "generals",
    "gen", "integer", "integers",
];

/// Maps a name to `[A-Za-z0-9_]`, never starting with a digit and never
/// clashing with a section keyword.
pub fn sanitize_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) || KEYWORDS.contains(&s.to_ascii_lowercase().as_str()) {
        s.insert(0, '_');
    }
    s
}

fn unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut used: HashMap<String, usize> = HashMap::new();
    names
        .map(|n| {
            let base = sanitize_name(n);
            let mut name = base.clone();
            let mut k = 1;
            while used.contains_key(&name) {
                k += 1;
                name = format!("{base}_{k}");
            }
            used.insert(name.clone(), 1);
            name
        })
        .collect()
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn write_expr(out: &mut String, terms: &[(VarId, f64)], names: &[String]) {
    let mut first = true;
    for &(v, a) in terms {
        if a == 0.0 {
            continue;
        }
        let name = &names[v.0];
        let mag = a.abs();
        let sign = if a < 0.0 { "-" } else { "+" };
        if first {
            if a < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == 1.0 {
            out.push_str(name);
        } else {
            let _ = write!(out, "{mag} {name}");
        }
        first = false;
    }
    if first {
        out.push('0');
    }
}

/// Renders `model` in LP format.
pub fn to_lp_string(model: &MipModel) -> String {
    let vnames = unique_names(model.variables().iter().map(|v| v.name.as_str()));
    let cnames = unique_names(model.constraints().iter().map(|c| c.name.as_str()));
    let mut out = String::new();
    out.push_str(match model.sense() {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj: ");
    write_expr(&mut out, model.objective(), &vnames);
    out.push_str("\nSubject To\n");
    for (c, name) in model.constraints().iter().zip(&cnames) {
        let _ = write!(out, " {name}: ");
        write_expr(&mut out, &c.terms, &vnames);
        let _ = writeln!(out, " {} {}", c.relation.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in model.variables().iter().zip(&vnames) {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", fmt_bound(v.lower), fmt_bound(v.upper));
        }
    }
    let bins: Vec<&str> = model
        .variables()
        .iter()
        .zip(&vnames)
        .filter(|(v, _)| v.binary)
        .map(|(_, n)| n.as_str())
        .collect();
    if !bins.is_empty() {
        out.push_str("Binary\n");
        for chunk in bins.chunks(10) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// Writes `model` in LP format to `path`.
pub fn export_lp_file(model: &MipModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_lp_string(model)).map_err(|e| Error::io(path, e))
}

pub fn read_lp_file(path: impl AsRef<Path>) -> Result<MipModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lp(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Sign(f64),
    Num(f64),
    Name(String),
    Rel(Relation),
    Colon,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<Token>> {
    let err = |msg: String| Error::parse(format!("LP line {line}"), msg);
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' || c == '-' {
            out.push(Token::Sign(if c == '+' { 1.0 } else { -1.0 }));
            i += 1;
        } else if c == ':' {
            out.push(Token::Colon);
            i += 1;
        } else if matches!(c, '<' | '>' | '=') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let rel = match op.as_str() {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                _ => return Err(err(format!("unknown relation {op:?}"))),
            };
            out.push(Token::Rel(rel));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && matches!(chars[j], 'e' | 'E') {
                let mut k = j + 1;
                if k < chars.len() && matches!(chars[k], '+' | '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    j = k;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let text: String = chars[i..j].iter().collect();
            let v = text.parse::<f64>().map_err(|_| err(format!("bad number {text:?}")))?;
            out.push(Token::Num(v));
            i = j;
        } else {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !matches!(chars[j], '+' | '-' | ':' | '<' | '>' | '=') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            match word.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => out.push(Token::Num(f64::INFINITY)),
                _ => out.push(Token::Name(word)),
            }
            i = j;
        }
    }
    Ok(out)
}

/// Linear expression as (name, coefficient) terms plus a constant.
fn parse_expr(tokens: &[Token], line: usize) -> Result<(Vec<(String, f64)>, f64)> {
    let err = |msg: &str| Error::parse(format!("LP line {line}"), msg.to_string());
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = 1.0;
        let mut saw_sign = false;
        while let Some(Token::Sign(s)) = tokens.get(i) {
            sign *= s;
            saw_sign = true;
            i += 1;
        }
        let mut coef = None;
        if let Some(Token::Num(v)) = tokens.get(i) {
            coef = Some(*v);
            i += 1;
        }
        match tokens.get(i) {
            Some(Token::Name(n)) => {
                terms.push((n.clone(), sign * coef.unwrap_or(1.0)));
                i += 1;
            }
            _ => match coef {
                Some(v) => constant += sign * v,
                None if saw_sign => return Err(err("dangling sign")),
                None => return Err(err("unexpected token in expression")),
            },
        }
    }
    Ok((terms, constant))
}

struct Builder {
    model: MipModel,
    index: HashMap<String, VarId>,
}

impl Builder {
    fn var(&mut self, name: &str) -> VarId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.model.add_continuous(name, 0.0, f64::INFINITY);
        self.index.insert(name.to_string(), v);
        v
    }

    fn terms(&mut self, named: Vec<(String, f64)>) -> Vec<(VarId, f64)> {
        named.into_iter().map(|(n, a)| (self.var(&n), a)).collect()
    }
}

fn section_of(line: &str) -> Option<(Option<Section>, Option<Sense>)> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.as_str();
    Some(match l {
        "maximize" | "maximise" | "maximum" | "max" => (Some(Section::Objective), Some(Sense::Maximize)),
        "minimize" | "minimise" | "minimum" | "min" => (Some(Section::Objective), Some(Sense::Minimize)),
        "subject to" | "such that" | "st" | "s.t." | "st." => (Some(Section::Constraints), None),
        "bounds" | "bound" => (Some(Section::Bounds), None),
        "binary" | "binaries" | "bin" => (Some(Section::Binary), None),
        "end" => (None, None),
        _ => return None,
    })
}

/// Parses LP text produced by [`to_lp_string`] (and common hand-written
/// variants of the same sections).
pub fn parse_lp(text: &str) -> Result<MipModel> {
    let mut sense = None;
    let mut current: Option<Section> = None;
    let mut lines: Vec<(Section, usize, String)> = Vec::new();
    let mut ended = false;
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(Error::parse(format!("LP line {lineno}"), "content after End"));
        }
        if let Some((sec, s)) = section_of(line) {
            if let Some(s) = s {
                if sense.is_some() {
                    return Err(Error::parse(format!("LP line {lineno}"), "second objective section"));
                }
                sense = Some(s);
            }
            match sec {
                Some(sec) => current = Some(sec),
                None => ended = true,
            }
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if matches!(lower.as_str(), "general" | "generals" | "gen" | "integer" | "integers")
            || lower.starts_with("semi")
            || lower.starts_with("sos")
        {
            return Err(Error::parse(format!("LP line {lineno}"), format!("unsupported section {line:?}")));
        }
        match current {
            Some(sec) => lines.push((sec, lineno, line.to_string())),
            None => return Err(Error::parse(format!("LP line {lineno}"), "text before the objective section")),
        }
    }
    let sense = sense.ok_or_else(|| Error::parse("LP file", "missing Maximize/Minimize section"))?;
    let mut b = Builder {
        model: MipModel::new(sense),
        index: HashMap::new(),
    };

    for (_, lineno, line) in lines.iter().filter(|t| t.0 == Section::Bounds) {
        parse_bound(&mut b, line, *lineno)?;
    }
    for (_, _, line) in lines.iter().filter(|t| t.0 == Section::Binary) {
        for name in line.split_whitespace() {
            let explicit = b.index.contains_key(name);
            let v = b.var(name);
            let var = &mut b.model.variables[v.0];
            var.binary = true;
            if !explicit {
                var.upper = 1.0;
            }
        }
    }

    let objective_text: Vec<&(Section, usize, String)> = lines.iter().filter(|t| t.0 == Section::Objective).collect();
    if let Some(&(_, first_line, _)) = objective_text.first() {
        let joined: String = objective_text.iter().map(|t| t.2.as_str()).collect::<Vec<_>>().join(" ");
        let mut tokens = tokenize(&joined, *first_line)?;
        if let [Token::Name(_), Token::Colon, ..] = tokens.as_slice() {
            tokens.drain(..2);
        }
        let (terms, constant) = parse_expr(&tokens, *first_line)?;
        if constant != 0.0 {
            return Err(Error::parse(format!("LP line {first_line}"), "objective constants are not supported"));
        }
        let terms = b.terms(terms);
        b.model.set_objective(terms);
    }

    // Group constraint lines into statements: a line with a label starts a
    // new statement, as does any line following a complete one.
    let mut statements: Vec<(usize, String)> = Vec::new();
    for (_, lineno, line) in lines.iter().filter(|t| t.0 == Section::Constraints) {
        let complete = statements.last().is_some_and(|(_, s)| s.contains(['<', '>', '=']) && !s.trim_end().ends_with(['<', '>', '=']));
        if line.contains(':') || complete || statements.is_empty() {
            statements.push((*lineno, line.clone()));
        } else if let Some(last) = statements.last_mut() {
            last.1.push(' ');
            last.1.push_str(line);
        }
    }
    for (k, (lineno, stmt)) in statements.iter().enumerate() {
        let mut tokens = tokenize(stmt, *lineno)?;
        let name = match tokens.as_slice() {
            [Token::Name(n), Token::Colon, ..] => {
                let n = n.clone();
                tokens.drain(..2);
                n
            }
            _ => format!("c{}", k + 1),
        };
        let rel_pos = tokens
            .iter()
            .position(|t| matches!(t, Token::Rel(_)))
            .ok_or_else(|| Error::parse(format!("LP line {lineno}"), "constraint without relation"))?;
        let Token::Rel(relation) = tokens[rel_pos] else { unreachable!() };
        let (lhs, lc) = parse_expr(&tokens[..rel_pos], *lineno)?;
        let (rhs, rc) = parse_expr(&tokens[rel_pos + 1..], *lineno)?;
        let mut terms = b.terms(lhs);
        terms.extend(b.terms(rhs).into_iter().map(|(v, a)| (v, -a)));
        b.model.add_constraint(name, terms, relation, rc - lc);
    }
    Ok(b.model)
}

fn parse_bound(b: &mut Builder, line: &str, lineno: usize) -> Result<()> {
    let err = |msg: &str| Error::parse(format!("LP line {lineno}"), format!("{msg}: {line:?}"));
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.len() == 2 && words[1].eq_ignore_ascii_case("free") {
        let v = b.var(words[0]);
        b.model.set_bounds(v, f64::NEG_INFINITY, f64::INFINITY);
        return Ok(());
    }
    let tokens = tokenize(line, lineno)?;
    // collapse signed numbers
    let mut items: Vec<Token> = Vec::new();
    let mut pending = 1.0;
    for t in tokens {
        match t {
            Token::Sign(s) => pending *= s,
            Token::Num(v) => {
                items.push(Token::Num(pending * v));
                pending = 1.0;
            }
            other => {
                if pending != 1.0 {
                    return Err(err("sign before a name"));
                }
                items.push(other);
            }
        }
    }
    let var_of = |b: &mut Builder, t: &Token| match t {
        Token::Name(n) => Ok(b.var(n)),
        _ => Err(err("expected a variable")),
    };
    let num = |t: &Token| match t {
        Token::Num(v) => Ok(*v),
        _ => Err(err("expected a number")),
    };
    match items.as_slice() {
        [lo, Token::Rel(Relation::Le), x, Token::Rel(Relation::Le), hi] => {
            let v = var_of(b, x)?;
            b.model.set_bounds(v, num(lo)?, num(hi)?);
        }
        [Token::Name(_), Token::Rel(rel), val] => {
            let v = var_of(b, &items[0])?;
            let val = num(val)?;
            let (lo, hi) = (b.model.var(v).lower, b.model.var(v).upper);
            match rel {
                Relation::Le => b.model.set_bounds(v, lo, val),
                Relation::Ge => b.model.set_bounds(v, val, hi),
                Relation::Eq => b.model.set_bounds(v, val, val),
            }
        }
        [val, Token::Rel(rel), Token::Name(_)] => {
            let v = var_of(b, &items[2])?;
            let val = num(val)?;
            let (lo, hi) = (b.model.var(v).lower, b.model.var(v).upper);
            match rel {
                Relation::Le => b.model.set_bounds(v, val, hi),
                Relation::Ge => b.model.set_bounds(v, lo, val),
                Relation::Eq => b.model.set_bounds(v, val, val),
            }
        }
        _ => return Err(err("unrecognized bound")),
    }
    Ok(())
}
