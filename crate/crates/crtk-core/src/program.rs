//! Programs: a two-sorted signature, an ordered rule list and a main symbol.
//!
//! Besides the representation this module carries the static checks that do
//! not need an interpretation: rule well-formedness, the cons-free syntactic
//! discipline, root-overlap detection (a sufficient orthogonality check
//! standing in for confluence), and composition of programs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::term::{is_subterm, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Constructor,
    Function,
}

/// Index of a symbol in its signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: Arc<str>,
    pub kind: SymbolKind,
    pub arity: u32,
    /// Position in the declaration order of this symbol's kind. For
    /// constructors this doubles as the symbol order underlying the term
    /// order.
    pub decl_index: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: BTreeMap<Arc<str>, SymbolId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignatureError {
    Duplicate(String),
}

impl fmt::Display for SignatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureError::Duplicate(n) => write!(f, "symbol `{n}` declared twice"),
        }
    }
}

impl core::error::Error for SignatureError {}

impl Signature {
    pub fn sym(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn constructors(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.ids()
            .filter(|id| self.sym(*id).kind == SymbolKind::Constructor)
    }

    pub fn functions(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.ids()
            .filter(|id| self.sym(*id).kind == SymbolKind::Function)
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.sym(id).name
    }
}

/// Assigns symbol ids and per-kind declaration indices.
#[derive(Default)]
pub struct SignatureBuilder {
    sig: Signature,
    next_decl: BTreeMap<SymbolKind, u32>,
}

impl SignatureBuilder {
    pub fn new() -> SignatureBuilder {
        SignatureBuilder::default()
    }

    pub fn add(
        &mut self,
        name: impl Into<Arc<str>>,
        kind: SymbolKind,
        arity: u32,
    ) -> Result<SymbolId, SignatureError> {
        let name = name.into();
        if self.sig.by_name.contains_key(&name) {
            return Err(SignatureError::Duplicate(String::from(&*name)));
        }
        let decl = self.next_decl.entry(kind).or_insert(0);
        let id = SymbolId(self.sig.symbols.len() as u32);
        self.sig.symbols.push(Symbol {
            name: name.clone(),
            kind,
            arity,
            decl_index: *decl,
        });
        *decl += 1;
        self.sig.by_name.insert(name, id);
        Ok(id)
    }

    pub fn constructor(
        &mut self,
        name: impl Into<Arc<str>>,
        arity: u32,
    ) -> Result<SymbolId, SignatureError> {
        self.add(name, SymbolKind::Constructor, arity)
    }

    pub fn function(
        &mut self,
        name: impl Into<Arc<str>>,
        arity: u32,
    ) -> Result<SymbolId, SignatureError> {
        self.add(name, SymbolKind::Function, arity)
    }

    pub fn finish(self) -> Signature {
        self.sig
    }
}

/// Whether the program claims confluence or opts into the
/// max-of-normal-forms semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Confluent,
    Nondeterministic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub signature: Signature,
    pub rules: Vec<Rule>,
    pub main: SymbolId,
    pub mode: Mode,
    /// Strict precedence pairs `(above, below)` accumulated by program
    /// composition, consumed as seed constraints by precedence synthesis.
    pub precedence_hints: Vec<(SymbolId, SymbolId)>,
}

impl Program {
    pub fn new(signature: Signature, rules: Vec<Rule>, main: SymbolId, mode: Mode) -> Program {
        Program {
            signature,
            rules,
            main,
            mode,
            precedence_hints: Vec::new(),
        }
    }

    /// Rules whose left-hand side is rooted by `f`, in file order.
    pub fn rules_of(&self, f: SymbolId) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.lhs.root() == Some(f))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule_index {
            Some(i) => write!(f, "rule {}: {}", i, self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn term_arities_ok(sig: &Signature, t: &Term, diags: &mut Vec<Diagnostic>, rule: usize) {
    if let Some((s, args)) = t.as_app() {
        let sym = sig.sym(s);
        if sym.arity as usize != args.len() {
            diags.push(Diagnostic {
                rule_index: Some(rule),
                message: format!(
                    "symbol `{}` has arity {} but is applied to {} arguments",
                    sym.name,
                    sym.arity,
                    args.len()
                ),
            });
        }
        for a in args {
            term_arities_ok(sig, a, diags, rule);
        }
    }
}

/// Checks every rule invariant: function-rooted lhs of shape `f(p1..pn)` with
/// constructor patterns below the root, rhs variables bound by the lhs, and
/// arity agreement everywhere. An empty result means the program is
/// well-formed.
pub fn check_wellformed(p: &Program) -> Vec<Diagnostic> {
    let sig = &p.signature;
    let mut diags = Vec::new();
    if sig.sym(p.main).kind != SymbolKind::Function {
        diags.push(Diagnostic {
            rule_index: None,
            message: format!("main symbol `{}` is not a function", sig.name(p.main)),
        });
    }
    for (i, rule) in p.rules.iter().enumerate() {
        match rule.lhs.as_app() {
            None => diags.push(Diagnostic {
                rule_index: Some(i),
                message: String::from("left-hand side is a bare variable"),
            }),
            Some((f, patterns)) => {
                if sig.sym(f).kind != SymbolKind::Function {
                    diags.push(Diagnostic {
                        rule_index: Some(i),
                        message: format!("left-hand side rooted by constructor `{}`", sig.name(f)),
                    });
                }
                for pat in patterns {
                    if !pat.is_constructor_term(sig) {
                        diags.push(Diagnostic {
                            rule_index: Some(i),
                            message: format!(
                                "left-hand side argument `{}` contains a function symbol",
                                pat.display(sig)
                            ),
                        });
                    }
                }
            }
        }
        let lhs_vars = rule.lhs.vars();
        for v in rule.rhs.vars() {
            if !lhs_vars.contains(&v) {
                diags.push(Diagnostic {
                    rule_index: Some(i),
                    message: format!("variable `{v}` of the right-hand side not bound on the left"),
                });
            }
        }
        term_arities_ok(sig, &rule.lhs, &mut diags, i);
        term_arities_ok(sig, &rule.rhs, &mut diags, i);
    }
    diags
}

/// A subterm occurrence breaking the cons-free discipline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsFreeViolation {
    pub rule_index: usize,
    /// Position path of the offending subterm inside the rhs.
    pub position: Vec<u32>,
    pub subterm: Term,
    pub constructor_rooted: bool,
}

/// The cons-free discipline: every rhs subterm that is a constructor term
/// must occur in the lhs, and every other rhs subterm must not be rooted by
/// a constructor.
pub fn is_cons_free(p: &Program) -> (bool, Vec<ConsFreeViolation>) {
    let sig = &p.signature;
    let mut violations = Vec::new();
    for (i, rule) in p.rules.iter().enumerate() {
        for (pos, sub) in rule.rhs.subterms_with_positions() {
            if sub.is_constructor_term(sig) {
                if !is_subterm(sub, &rule.lhs) {
                    violations.push(ConsFreeViolation {
                        rule_index: i,
                        position: pos,
                        subterm: sub.clone(),
                        constructor_rooted: false,
                    });
                }
            } else if sub
                .root()
                .is_some_and(|r| sig.sym(r).kind == SymbolKind::Constructor)
            {
                violations.push(ConsFreeViolation {
                    rule_index: i,
                    position: pos,
                    subterm: sub.clone(),
                    constructor_rooted: true,
                });
            }
        }
    }
    (violations.is_empty(), violations)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub rule_i: usize,
    pub rule_j: usize,
    /// Overlap position; always the root given the lhs shape.
    pub position: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct OverlapReport {
    pub pairs: Vec<Overlap>,
    /// Rules whose lhs binds some variable more than once.
    pub nonlinear_rules: Vec<usize>,
}

impl OverlapReport {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Orthogonality: no overlaps and every lhs left-linear.
    pub fn orthogonal(&self) -> bool {
        self.pairs.is_empty() && self.nonlinear_rules.is_empty()
    }
}

fn rename_vars(t: &Term, suffix: &str) -> Term {
    match t.as_var() {
        Some(v) => Term::var(format!("{v}{suffix}")),
        None => {
            let (s, args) = t.as_app().unwrap();
            Term::app(s, args.iter().map(|a| rename_vars(a, suffix)).collect())
        }
    }
}

fn walk(bindings: &BTreeMap<Arc<str>, Term>, t: &Term) -> Term {
    match t.as_var() {
        Some(v) => match bindings.get(v) {
            Some(u) => walk(bindings, u),
            None => t.clone(),
        },
        None => t.clone(),
    }
}

fn occurs(bindings: &BTreeMap<Arc<str>, Term>, v: &str, t: &Term) -> bool {
    let t = walk(bindings, t);
    match t.as_var() {
        Some(w) => &**w == v,
        None => t.args().iter().any(|a| occurs(bindings, v, a)),
    }
}

fn unify(bindings: &mut BTreeMap<Arc<str>, Term>, a: &Term, b: &Term) -> bool {
    let a = walk(bindings, a);
    let b = walk(bindings, b);
    match (a.as_var(), b.as_var()) {
        (Some(x), Some(y)) if x == y => true,
        (Some(x), _) => {
            if occurs(bindings, x, &b) {
                false
            } else {
                bindings.insert(x.clone(), b);
                true
            }
        }
        (None, Some(y)) => {
            if occurs(bindings, y, &a) {
                false
            } else {
                bindings.insert(y.clone(), a);
                true
            }
        }
        (None, None) => {
            let (f, xs) = a.as_app().unwrap();
            let (g, ys) = b.as_app().unwrap();
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(bindings, x, y))
        }
    }
}

/// Lists every pair of rules whose left-hand sides unify after variable
/// renaming. Given the lhs shape only root overlaps can occur. An empty
/// report together with left-linearity implies orthogonality, a sufficient
/// condition for confluence.
pub fn detect_overlaps(p: &Program) -> OverlapReport {
    let mut report = OverlapReport::default();
    for (i, rule) in p.rules.iter().enumerate() {
        let mut seen: Vec<Arc<str>> = Vec::new();
        let mut linear = true;
        fn scan(t: &Term, seen: &mut Vec<Arc<str>>, linear: &mut bool) {
            match t.as_var() {
                Some(v) => {
                    if seen.iter().any(|w| w == v) {
                        *linear = false;
                    } else {
                        seen.push(v.clone());
                    }
                }
                None => {
                    for a in t.args() {
                        scan(a, seen, linear);
                    }
                }
            }
        }
        scan(&rule.lhs, &mut seen, &mut linear);
        if !linear {
            report.nonlinear_rules.push(i);
        }
    }
    for i in 0..p.rules.len() {
        for j in i + 1..p.rules.len() {
            let left = rename_vars(&p.rules[i].lhs, "#l");
            let right = rename_vars(&p.rules[j].lhs, "#r");
            let mut bindings = BTreeMap::new();
            if unify(&mut bindings, &left, &right) {
                report.pairs.push(Overlap {
                    rule_i: i,
                    rule_j: j,
                    position: Vec::new(),
                });
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComposeError {
    ConstructorClash {
        name: String,
    },
    /// The inner programs must share one argument arity.
    ArityMismatch {
        expected: u32,
        found: u32,
        program: usize,
    },
    /// The outer main must take exactly one argument per inner program.
    OuterArity {
        expected: usize,
        found: u32,
    },
}

impl fmt::Display for ComposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeError::ConstructorClash { name } => {
                write!(f, "constructor `{name}` declared with differing arities")
            }
            ComposeError::ArityMismatch {
                expected,
                found,
                program,
            } => write!(
                f,
                "inner program {program} has main arity {found}, expected {expected}"
            ),
            ComposeError::OuterArity { expected, found } => write!(
                f,
                "outer main has arity {found}, expected {expected} (one per inner program)"
            ),
        }
    }
}

impl core::error::Error for ComposeError {}

/// Union of the component programs plus the rule
/// `h(x1..xn) -> f(g1(x1..xn), .., gk(x1..xn))` with a fresh main `h`.
/// Function namespaces are made disjoint by renaming clashes; constructors
/// are shared and must agree on arity. The strict pairs `h > f` and
/// `h > gi` are recorded as precedence hints.
pub fn compose_programs(outer: &Program, inners: &[&Program]) -> Result<Program, ComposeError> {
    let arg_arity = match inners.first() {
        Some(g) => g.signature.sym(g.main).arity,
        None => 0,
    };
    for (k, g) in inners.iter().enumerate() {
        let a = g.signature.sym(g.main).arity;
        if a != arg_arity {
            return Err(ComposeError::ArityMismatch {
                expected: arg_arity,
                found: a,
                program: k,
            });
        }
    }
    let outer_arity = outer.signature.sym(outer.main).arity;
    if outer_arity as usize != inners.len() {
        return Err(ComposeError::OuterArity {
            expected: inners.len(),
            found: outer_arity,
        });
    }

    let mut builder = SignatureBuilder::new();
    // Maps (component index, old id) -> new id; component 0 is the outer.
    let mut remap: Vec<BTreeMap<SymbolId, SymbolId>> = Vec::new();
    let components: Vec<&Program> = core::iter::once(outer)
        .chain(inners.iter().copied())
        .collect();
    for comp in &components {
        let mut m = BTreeMap::new();
        for id in comp.signature.ids() {
            let sym = comp.signature.sym(id);
            let new_id = match sym.kind {
                SymbolKind::Constructor => match builder.sig.by_name.get(&sym.name) {
                    Some(existing) => {
                        let ex = builder.sig.sym(*existing);
                        if ex.kind != SymbolKind::Constructor || ex.arity != sym.arity {
                            return Err(ComposeError::ConstructorClash {
                                name: String::from(&*sym.name),
                            });
                        }
                        *existing
                    }
                    None => builder.constructor(sym.name.clone(), sym.arity).unwrap(),
                },
                SymbolKind::Function => {
                    let mut name: Arc<str> = sym.name.clone();
                    let mut n = 2;
                    while builder.sig.by_name.contains_key(&name) {
                        name = Arc::from(format!("{}__{n}", sym.name));
                        n += 1;
                    }
                    builder.function(name, sym.arity).unwrap()
                }
            };
            m.insert(id, new_id);
        }
        remap.push(m);
    }

    let mut h_name: Arc<str> = Arc::from("h");
    let mut n = 2;
    while builder.sig.by_name.contains_key(&h_name) {
        h_name = Arc::from(format!("h__{n}"));
        n += 1;
    }
    let h = builder.function(h_name, arg_arity).unwrap();
    let signature = builder.finish();

    fn remap_term(t: &Term, m: &BTreeMap<SymbolId, SymbolId>) -> Term {
        match t.as_app() {
            None => t.clone(),
            Some((s, args)) => Term::app(m[&s], args.iter().map(|a| remap_term(a, m)).collect()),
        }
    }

    let mut rules = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        for rule in &comp.rules {
            rules.push(Rule {
                lhs: remap_term(&rule.lhs, &remap[ci]),
                rhs: remap_term(&rule.rhs, &remap[ci]),
            });
        }
    }
    let xs: Vec<Term> = (0..arg_arity).map(|i| Term::var(format!("x{i}"))).collect();
    let inner_calls: Vec<Term> = inners
        .iter()
        .enumerate()
        .map(|(k, g)| Term::app(remap[k + 1][&g.main], xs.clone()))
        .collect();
    let outer_main = remap[0][&outer.main];
    rules.push(Rule {
        lhs: Term::app(h, xs),
        rhs: Term::app(outer_main, inner_calls),
    });

    let mode = if components.iter().any(|c| c.mode == Mode::Nondeterministic) {
        Mode::Nondeterministic
    } else {
        Mode::Confluent
    };

    let mut hints: Vec<(SymbolId, SymbolId)> = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        for (a, b) in &comp.precedence_hints {
            hints.push((remap[ci][a], remap[ci][b]));
        }
    }
    hints.push((h, outer_main));
    for (k, g) in inners.iter().enumerate() {
        hints.push((h, remap[k + 1][&g.main]));
    }

    Ok(Program {
        signature,
        rules,
        main: h,
        mode,
        precedence_hints: hints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t(sig: &Signature, name: &str, args: Vec<Term>) -> Term {
        Term::app(sig.lookup(name).unwrap(), args)
    }

    /// Two-rule identity-flavoured program: id(x) -> x.
    fn id_program() -> Program {
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 0).unwrap();
        let id = b.function("id", 1).unwrap();
        let sig = b.finish();
        let rule = Rule {
            lhs: Term::app(id, vec![Term::var("x")]),
            rhs: Term::var("x"),
        };
        Program::new(sig, vec![rule], id, Mode::Confluent)
    }

    #[test]
    fn wellformed_accepts_id() {
        let p = id_program();
        assert!(check_wellformed(&p).is_empty());
    }

    #[test]
    fn wellformed_rejects_constructor_rooted_lhs() {
        let mut b = SignatureBuilder::new();
        let eps = b.constructor("eps", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let sig = b.finish();
        let bad = Rule {
            lhs: Term::app(eps, vec![]),
            rhs: Term::var("x"),
        };
        let p = Program::new(sig, vec![bad], f, Mode::Confluent);
        let diags = check_wellformed(&p);
        assert!(diags.iter().any(|d| d.message.contains("constructor")));
        // the rhs variable is also unbound
        assert!(diags.iter().any(|d| d.message.contains("not bound")));
    }

    #[test]
    fn wellformed_rejects_function_below_lhs_root() {
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let bad = Rule {
            lhs: Term::app(f, vec![Term::app(g, vec![Term::var("x")])]),
            rhs: Term::var("x"),
        };
        let p = Program::new(sig, vec![bad], f, Mode::Confluent);
        assert!(check_wellformed(&p)
            .iter()
            .any(|d| d.message.contains("function symbol")));
    }

    #[test]
    fn cons_free_accepts_id_rejects_fresh_constructors() {
        let p = id_program();
        assert!(is_cons_free(&p).0);

        // f(s(n)) -> cons(n, f(n)) is rejected at the cons-rooted subterm.
        let mut b = SignatureBuilder::new();
        let zero = b.constructor("zero", 0).unwrap();
        let s = b.constructor("s", 1).unwrap();
        let nil = b.constructor("nil", 0).unwrap();
        let cons = b.constructor("cons", 2).unwrap();
        let f = b.function("f", 1).unwrap();
        let sig = b.finish();
        let _ = zero;
        let rules = vec![
            Rule {
                lhs: Term::app(f, vec![Term::app(zero, vec![])]),
                rhs: Term::app(nil, vec![]),
            },
            Rule {
                lhs: Term::app(f, vec![Term::app(s, vec![Term::var("n")])]),
                rhs: Term::app(
                    cons,
                    vec![Term::var("n"), Term::app(f, vec![Term::var("n")])],
                ),
            },
        ];
        let p = Program::new(sig, rules, f, Mode::Confluent);
        let (ok, violations) = is_cons_free(&p);
        assert!(!ok);
        assert!(violations.iter().any(|v| v.constructor_rooted));
        // The fresh `nil` in the first rule is also a violation.
        assert!(violations.iter().any(|v| v.rule_index == 0));
    }

    #[test]
    fn overlaps_detects_unifiable_lhs() {
        let mut b = SignatureBuilder::new();
        b.constructor("tt", 0).unwrap();
        b.constructor("ff", 0).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let r1 = Rule {
            lhs: Term::app(g, vec![Term::var("x")]),
            rhs: t(&sig, "tt", vec![]),
        };
        let r2 = Rule {
            lhs: Term::app(g, vec![Term::var("y")]),
            rhs: t(&sig, "ff", vec![]),
        };
        let p = Program::new(sig, vec![r1, r2], g, Mode::Nondeterministic);
        let report = detect_overlaps(&p);
        assert_eq!(report.pairs.len(), 1);
        assert!(!report.orthogonal());
    }

    #[test]
    fn overlaps_empty_for_disjoint_patterns() {
        let p = id_program();
        assert!(detect_overlaps(&p).is_empty());
    }

    #[test]
    fn nonlinear_lhs_reported() {
        let mut b = SignatureBuilder::new();
        let c = b.constructor("c", 2).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let r = Rule {
            lhs: Term::app(g, vec![Term::app(c, vec![Term::var("x"), Term::var("x")])]),
            rhs: Term::var("x"),
        };
        let p = Program::new(sig, vec![r], g, Mode::Confluent);
        let report = detect_overlaps(&p);
        assert!(report.pairs.is_empty());
        assert_eq!(report.nonlinear_rules, vec![0]);
        assert!(!report.orthogonal());
    }

    #[test]
    fn compose_identity_with_identity() {
        let p = id_program();
        let composed = compose_programs(&p, &[&p]).unwrap();
        assert_eq!(composed.rules.len(), 3);
        let h = composed.main;
        assert_eq!(composed.signature.name(h), "h");
        // hint: h above both renamed mains
        assert_eq!(composed.precedence_hints.len(), 2);
        assert!(check_wellformed(&composed).is_empty());
    }

    #[test]
    fn compose_rejects_constructor_arity_clash() {
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 0).unwrap();
        let id = b.function("id", 1).unwrap();
        let sig = b.finish();
        let p1 = Program::new(
            sig,
            vec![Rule {
                lhs: Term::app(id, vec![Term::var("x")]),
                rhs: Term::var("x"),
            }],
            id,
            Mode::Confluent,
        );
        // same constructor name with a different arity
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 1).unwrap();
        let id2 = b.function("id2", 1).unwrap();
        let sig = b.finish();
        let p2 = Program::new(
            sig,
            vec![Rule {
                lhs: Term::app(id2, vec![Term::var("x")]),
                rhs: Term::var("x"),
            }],
            id2,
            Mode::Confluent,
        );
        assert!(matches!(
            compose_programs(&p1, &[&p2]),
            Err(ComposeError::ConstructorClash { .. })
        ));
    }

    #[test]
    fn compose_arity_mismatch_is_an_error() {
        let p = id_program();
        // outer arity 1 but two inner programs
        assert!(matches!(
            compose_programs(&p, &[&p, &p]),
            Err(ComposeError::OuterArity { .. })
        ));
        // inner programs must share one argument arity
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 0).unwrap();
        let f2 = b.function("f2", 2).unwrap();
        let sig = b.finish();
        let two = Program::new(
            sig,
            vec![Rule {
                lhs: Term::app(f2, vec![Term::var("x"), Term::var("y")]),
                rhs: Term::var("x"),
            }],
            f2,
            Mode::Confluent,
        );
        assert!(matches!(
            compose_programs(&two, &[&p, &two]),
            Err(ComposeError::ArityMismatch { .. })
        ));
    }
}
