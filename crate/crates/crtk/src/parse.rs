//! File formats: program files, call expressions, interpretation files,
//! precedence files and set-interpretation files, plus the canonical program
//! printer.
//!
//! Program files are line oriented:
//!
//! ```text
//! mode nondeterministic            # or: mode confluent
//! constructors tt/0 ff/0 eps/0 c0/1 c1/1 cons/2 nil/0
//! functions eq/2 or/2 main f/1
//! rule eq(eps,eps) -> tt
//! ```
//!
//! Symbols are declared as `name/arity`; `main` marks the entry function;
//! `#` starts a comment. Identifiers that are not declared symbols parse as
//! variables inside rules. Constructor declaration order doubles as the
//! symbol order underlying the term order.

use std::collections::BTreeMap;
use std::fmt;

use crtk_core::consfree::{SetAtom, SetFnSpec, SetInterpretation};
use crtk_core::maxpoly::{Interpretation, MaxPolyExpr, Rat};
use crtk_core::ppo::Precedence;
use crtk_core::program::{Mode, Program, Rule, Signature, SignatureBuilder, SymbolId, SymbolKind};
use crtk_core::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Character cursor over one line with 1-based column reporting.
struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
}

impl Cursor {
    fn new(text: &str, line: u32) -> Cursor {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn col(&self) -> u32 {
        self.pos as u32 + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if is_ident_start(c) => {
                let mut s = String::new();
                while matches!(self.peek(), Some(c) if is_ident_char(c)) {
                    s.push(self.bump().unwrap());
                }
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    n = n * 10 + u64::from(self.bump().unwrap() as u8 - b'0');
                }
                Ok(n)
            }
            _ => Err(self.error("expected a number")),
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses a term; identifiers missing from the signature become variables
/// when `allow_vars` is set and errors otherwise.
fn parse_term_at(cur: &mut Cursor, sig: &Signature, allow_vars: bool) -> Result<Term, ParseError> {
    let start_col = {
        cur.skip_ws();
        cur.col()
    };
    let name = cur.ident()?;
    let mut args = Vec::new();
    let has_parens = cur.eat('(');
    if has_parens && !cur.eat(')') {
        loop {
            args.push(parse_term_at(cur, sig, allow_vars)?);
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
    }
    match sig.lookup(&name) {
        Some(id) => {
            let expected = sig.sym(id).arity as usize;
            if expected != args.len() {
                return Err(ParseError::new(
                    cur.line,
                    start_col,
                    format!(
                        "symbol `{name}` has arity {expected} but {} arguments were given",
                        args.len()
                    ),
                ));
            }
            Ok(Term::app(id, args))
        }
        None if args.is_empty() && !has_parens => {
            if allow_vars {
                Ok(Term::var(name))
            } else {
                Err(ParseError::new(
                    cur.line,
                    start_col,
                    format!("unknown symbol `{name}`"),
                ))
            }
        }
        None => Err(ParseError::new(
            cur.line,
            start_col,
            format!("undeclared symbol `{name}`"),
        )),
    }
}

/// Parses a full program file.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut builder = SignatureBuilder::new();
    let mut mode = Mode::Confluent;
    let mut main: Option<(SymbolId, u32)> = None;
    let mut rule_lines: Vec<(u32, String)> = Vec::new();

    // first pass: declarations
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let keyword = cur.ident()?;
        match keyword.as_str() {
            "mode" => {
                let m = cur.ident()?;
                mode = match m.as_str() {
                    "confluent" => Mode::Confluent,
                    "nondeterministic" => Mode::Nondeterministic,
                    _ => {
                        return Err(cur.error(format!(
                            "unknown mode `{m}` (expected confluent or nondeterministic)"
                        )))
                    }
                };
            }
            "constructors" | "functions" => {
                let kind = if keyword == "constructors" {
                    SymbolKind::Constructor
                } else {
                    SymbolKind::Function
                };
                let mut next_is_main = false;
                while !cur.at_end() {
                    let name = cur.ident()?;
                    if name == "main" && kind == SymbolKind::Function {
                        next_is_main = true;
                        continue;
                    }
                    cur.expect('/')?;
                    let arity = cur.number()?;
                    let id = builder
                        .add(name.as_str(), kind, arity as u32)
                        .map_err(|e| cur.error(e.to_string()))?;
                    if next_is_main {
                        if main.is_some() {
                            return Err(cur.error("main function declared twice"));
                        }
                        main = Some((id, line_no));
                        next_is_main = false;
                    }
                }
                if next_is_main {
                    return Err(cur.error("`main` must be followed by a function declaration"));
                }
            }
            "rule" => {
                rule_lines.push((line_no, line.to_string()));
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    1,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    let sig = builder.finish();
    let Some((main, _)) = main else {
        return Err(ParseError::new(
            1,
            1,
            "no main function declared (mark one with `main` in the functions line)",
        ));
    };

    // second pass: rules, with the complete signature
    let mut rules = Vec::new();
    for (line_no, line) in rule_lines {
        let mut cur = Cursor::new(&line, line_no);
        let _ = cur.ident()?; // the `rule` keyword
        let lhs = parse_term_at(&mut cur, &sig, true)?;
        cur.skip_ws();
        if !(cur.eat('-') && cur.eat('>')) {
            return Err(cur.error("expected `->`"));
        }
        let rhs = parse_term_at(&mut cur, &sig, true)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after rule"));
        }
        let lhs_vars = lhs.vars();
        for v in rhs.vars() {
            if !lhs_vars.contains(&v) {
                return Err(ParseError::new(
                    line_no,
                    1,
                    format!("variable {v} not in lhs"),
                ));
            }
        }
        rules.push(Rule { lhs, rhs });
    }

    Ok(Program::new(sig, rules, main, mode))
}

/// Canonical printer; `parse_program(print_program(p))` reproduces `p`.
pub fn print_program(p: &Program) -> String {
    let sig = &p.signature;
    let mut out = String::new();
    out.push_str(match p.mode {
        Mode::Confluent => "mode confluent\n",
        Mode::Nondeterministic => "mode nondeterministic\n",
    });
    out.push_str("constructors");
    for c in sig.constructors() {
        out.push_str(&format!(" {}/{}", sig.name(c), sig.sym(c).arity));
    }
    out.push('\n');
    out.push_str("functions");
    for f in sig.functions() {
        if f == p.main {
            out.push_str(" main");
        }
        out.push_str(&format!(" {}/{}", sig.name(f), sig.sym(f).arity));
    }
    out.push('\n');
    for rule in &p.rules {
        out.push_str(&format!(
            "rule {} -> {}\n",
            rule.lhs.display(sig),
            rule.rhs.display(sig)
        ));
    }
    out
}

/// Parses a ground call expression `f(t1,..,tn)`.
pub fn parse_call(sig: &Signature, src: &str) -> Result<(SymbolId, Vec<Term>), ParseError> {
    let mut cur = Cursor::new(src.trim(), 1);
    let t = parse_term_at(&mut cur, sig, false)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after call expression"));
    }
    match t.as_app() {
        Some((f, args)) if sig.sym(f).kind == SymbolKind::Function => Ok((f, args.to_vec())),
        Some(_) => Err(ParseError::new(1, 1, "call must be rooted by a function")),
        None => Err(ParseError::new(1, 1, "call must be an application")),
    }
}

/// Parses a ground constructor term.
pub fn parse_ground_term(sig: &Signature, src: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(src.trim(), 1);
    let t = parse_term_at(&mut cur, sig, false)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after term"));
    }
    Ok(t)
}

// ---- interpretation files ----------------------------------------------

fn parse_rational(cur: &mut Cursor) -> Result<Rat, ParseError> {
    let num = cur.number()?;
    let den = if cur.eat('/') { cur.number()? } else { 1 };
    if den == 0 {
        return Err(cur.error("zero denominator"));
    }
    Ok(Rat::new(num.into(), den.into()))
}

fn parse_mp_expr(
    cur: &mut Cursor,
    params: &BTreeMap<String, usize>,
) -> Result<MaxPolyExpr, ParseError> {
    let mut terms = vec![parse_mp_product(cur, params)?];
    while cur.eat('+') {
        terms.push(parse_mp_product(cur, params)?);
    }
    Ok(if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        MaxPolyExpr::add(terms)
    })
}

fn parse_mp_product(
    cur: &mut Cursor,
    params: &BTreeMap<String, usize>,
) -> Result<MaxPolyExpr, ParseError> {
    let mut factors = vec![parse_mp_atom(cur, params)?];
    while cur.eat('*') {
        factors.push(parse_mp_atom(cur, params)?);
    }
    Ok(if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        MaxPolyExpr::mul(factors)
    })
}

fn parse_mp_atom(
    cur: &mut Cursor,
    params: &BTreeMap<String, usize>,
) -> Result<MaxPolyExpr, ParseError> {
    cur.skip_ws();
    match cur.peek() {
        Some('(') => {
            cur.expect('(')?;
            let e = parse_mp_expr(cur, params)?;
            cur.expect(')')?;
            Ok(e)
        }
        Some(c) if c.is_ascii_digit() => Ok(MaxPolyExpr::constant(parse_rational(cur)?)),
        Some(c) if is_ident_start(c) => {
            let col = cur.col();
            let name = cur.ident()?;
            if name == "max" {
                cur.expect('(')?;
                let mut parts = vec![parse_mp_expr(cur, params)?];
                while cur.eat(',') {
                    parts.push(parse_mp_expr(cur, params)?);
                }
                cur.expect(')')?;
                Ok(MaxPolyExpr::max(parts))
            } else {
                match params.get(&name) {
                    Some(i) => Ok(MaxPolyExpr::var(*i)),
                    None => Err(ParseError::new(
                        cur.line,
                        col,
                        format!("unknown parameter `{name}`"),
                    )),
                }
            }
        }
        _ => Err(cur.error("expected a constant, parameter, max(..) or (..)")),
    }
}

/// Parses an interpretation file: one `symbol(x,y) = expr` line per symbol,
/// with operators `+`, `*`, `max(..)` and rational constants `p/q`.
pub fn parse_interpretation(
    sig: &Signature,
    src: &str,
    floor: Rat,
) -> Result<Interpretation, ParseError> {
    let mut interp = Interpretation::new(floor);
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let name = cur.ident()?;
        let Some(id) = sig.lookup(&name) else {
            return Err(cur.error(format!("unknown symbol `{name}`")));
        };
        let mut params: BTreeMap<String, usize> = BTreeMap::new();
        if cur.eat('(') && !cur.eat(')') {
            loop {
                let p = cur.ident()?;
                let next = params.len();
                if params.insert(p.clone(), next).is_some() {
                    return Err(cur.error(format!("duplicate parameter `{p}`")));
                }
                if cur.eat(')') {
                    break;
                }
                cur.expect(',')?;
            }
        }
        let arity = sig.sym(id).arity as usize;
        if params.len() != arity {
            return Err(cur.error(format!(
                "symbol `{name}` has arity {arity} but {} parameters were given",
                params.len()
            )));
        }
        cur.expect('=')?;
        let expr = parse_mp_expr(&mut cur, &params)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after expression"));
        }
        if interp.get(id).is_some() {
            return Err(cur.error(format!("symbol `{name}` assigned twice")));
        }
        interp.assign(id, expr);
    }
    Ok(interp)
}

/// Renders an interpretation assignment back to the file syntax.
pub fn print_expr(e: &MaxPolyExpr, params: &[String]) -> String {
    fn go(e: &MaxPolyExpr, params: &[String], parent_mul: bool) -> String {
        match e {
            MaxPolyExpr::Const(c) => {
                if c.is_integer() {
                    format!("{}", c.numer())
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                }
            }
            MaxPolyExpr::Var(i) => params[*i].clone(),
            MaxPolyExpr::Add(parts) => {
                let inner = parts
                    .iter()
                    .map(|p| go(p, params, false))
                    .collect::<Vec<_>>()
                    .join(" + ");
                if parent_mul {
                    format!("({inner})")
                } else {
                    inner
                }
            }
            MaxPolyExpr::Mul(parts) => parts
                .iter()
                .map(|p| go(p, params, true))
                .collect::<Vec<_>>()
                .join(" * "),
            MaxPolyExpr::Max(parts) => {
                let inner = parts
                    .iter()
                    .map(|p| go(p, params, false))
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("max({inner})")
            }
        }
    }
    go(e, params, false)
}

// ---- precedence files ----------------------------------------------------

/// Parses a precedence file: lines `a > b` and `a = b`, chains allowed
/// (`a > b > c`). The relation is closed transitively.
pub fn parse_precedence(sig: &Signature, src: &str) -> Result<Precedence, ParseError> {
    let mut strict: Vec<(SymbolId, SymbolId)> = Vec::new();
    let mut equiv: Vec<(SymbolId, SymbolId)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let first = cur.ident()?;
        let mut prev = sig
            .lookup(&first)
            .ok_or_else(|| cur.error(format!("unknown symbol `{first}`")))?;
        loop {
            cur.skip_ws();
            match cur.peek() {
                None => break,
                Some('>') => {
                    cur.bump();
                    let name = cur.ident()?;
                    let id = sig
                        .lookup(&name)
                        .ok_or_else(|| cur.error(format!("unknown symbol `{name}`")))?;
                    strict.push((prev, id));
                    prev = id;
                }
                Some('=') => {
                    cur.bump();
                    let name = cur.ident()?;
                    let id = sig
                        .lookup(&name)
                        .ok_or_else(|| cur.error(format!("unknown symbol `{name}`")))?;
                    equiv.push((prev, id));
                    prev = id;
                }
                Some(c) => return Err(cur.error(format!("expected `>` or `=`, found `{c}`"))),
            }
        }
    }
    Precedence::from_constraints(sig, &strict, &equiv)
        .map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Emits the precedence as its transitively closed pair list.
pub fn print_precedence(sig: &Signature, prec: &Precedence) -> String {
    let mut out = String::new();
    for (above, below) in prec.strict_pairs(sig) {
        out.push_str(&format!("{} > {}\n", sig.name(above), sig.name(below)));
    }
    for (a, b) in prec.equiv_pairs(sig) {
        out.push_str(&format!("{} = {}\n", sig.name(a), sig.name(b)));
    }
    out
}

// ---- set-interpretation files ---------------------------------------------

/// Builds a named built-in generator. The names cover the shipped fixtures:
///
/// * `bool-range`: the constant set {tt, ff};
/// * `arg2-or-bools`: second argument joined with {tt, ff};
/// * `branch-union`: union of the second and third arguments;
/// * `descending-segments`: consecutive descending numeral segments below
///   the argument (requires symbols zero/1? no: zero, s, nil, cons).
fn builtin_generator(sig: &Signature, name: &str) -> Result<SetFnSpec, String> {
    let consts = |names: &[&str]| -> Result<Vec<Term>, String> {
        names
            .iter()
            .map(|n| {
                sig.lookup(n)
                    .map(Term::constant)
                    .ok_or_else(|| format!("generator needs constructor `{n}`"))
            })
            .collect()
    };
    match name {
        "bool-range" => Ok(SetFnSpec::Union(vec![SetAtom::Consts(consts(&[
            "tt", "ff",
        ])?)])),
        "arg2-or-bools" => Ok(SetFnSpec::Union(vec![
            SetAtom::Arg(1),
            SetAtom::Consts(consts(&["tt", "ff"])?),
        ])),
        "branch-union" => Ok(SetFnSpec::Union(vec![SetAtom::Arg(1), SetAtom::Arg(2)])),
        "descending-segments" => {
            let need = |n: &str| {
                sig.lookup(n)
                    .ok_or_else(|| format!("generator needs constructor `{n}`"))
            };
            Ok(SetFnSpec::DescendingSegments {
                zero: need("zero")?,
                succ: need("s")?,
                nil: need("nil")?,
                cons: need("cons")?,
            })
        }
        _ => Err(format!("unknown custom generator `{name}`")),
    }
}

/// Parses a set-interpretation file: `f := subterm-closure` or
/// `f := custom NAME` per function symbol.
pub fn parse_set_interpretation(
    sig: &Signature,
    src: &str,
) -> Result<SetInterpretation, ParseError> {
    let mut si = SetInterpretation::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let name = cur.ident()?;
        let Some(id) = sig.lookup(&name) else {
            return Err(cur.error(format!("unknown symbol `{name}`")));
        };
        if sig.sym(id).kind != SymbolKind::Function {
            return Err(cur.error(format!(
                "`{name}` is a constructor; only functions get generators"
            )));
        }
        cur.expect(':')?;
        cur.expect('=')?;
        cur.skip_ws();
        let rest: String = line.chars().skip(cur.col() as usize - 1).collect();
        let rest = rest.trim();
        let spec = if rest == "subterm-closure" {
            SetFnSpec::SubtermClosure
        } else if let Some(gen_name) = rest.strip_prefix("custom ") {
            builtin_generator(sig, gen_name.trim()).map_err(|m| cur.error(m))?
        } else {
            return Err(cur.error("expected `subterm-closure` or `custom NAME`"));
        };
        si.assign(id, spec);
    }
    Ok(si)
}

/// Builds the variable-name list `x0..xn` used when printing expressions of
/// symbols whose parameter names are not recorded.
pub fn default_params(arity: usize) -> Vec<String> {
    (0..arity).map(|i| format!("x{i}")).collect()
}

/// Convenience: substitution display for diagnostics.
pub fn display_substitution(sig: &Signature, sub: &crtk_core::Substitution) -> String {
    let parts: Vec<String> = sub
        .iter()
        .map(|(v, t)| format!("{v} := {}", t.display(sig)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// Shared helper for assembling signature-qualified names.
pub fn symbol_list(sig: &Signature, ids: &[SymbolId]) -> String {
    ids.iter()
        .map(|id| sig.name(*id).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
