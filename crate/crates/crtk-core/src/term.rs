//! Terms over a two-sorted signature (constructors / functions) plus
//! variables, with matching, substitution and the total order on ground
//! constructor terms used by the max-of-normal-forms semantics.
//!
//! Terms are immutable and structurally shared (`Arc`); size and a structural
//! hash are cached on every node, so `size` is O(1) and hash-map lookups do
//! not re-traverse terms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::fxhash;
use crate::program::{Signature, SymbolId, SymbolKind};

#[derive(Clone, Debug)]
enum TermKind {
    Var(Arc<str>),
    App(SymbolId, Vec<Term>),
}

#[derive(Debug)]
struct TermInner {
    kind: TermKind,
    hash: u64,
    size: u64,
}

/// An immutable first-order term: a variable or a symbol application.
#[derive(Clone, Debug)]
pub struct Term(Arc<TermInner>);

impl Term {
    pub fn var(name: impl Into<Arc<str>>) -> Term {
        let name = name.into();
        let mut h = fxhash::mix(0x9e3779b97f4a7c15, 1);
        for b in name.as_bytes() {
            h = fxhash::mix(h, *b as u64);
        }
        Term(Arc::new(TermInner {
            kind: TermKind::Var(name),
            hash: h,
            size: 1,
        }))
    }

    /// Builds an application node. Arity agreement with the signature is the
    /// caller's responsibility (the parser and the evaluator both guarantee
    /// it); `Program::check_wellformed` re-validates terms that arrive from
    /// outside.
    pub fn app(sym: SymbolId, args: Vec<Term>) -> Term {
        let mut h = fxhash::mix(0x2545f4914f6cdd1d, 2);
        h = fxhash::mix(h, sym.index() as u64);
        let mut size = 1u64;
        for a in &args {
            h = fxhash::mix(h, a.hash());
            size += a.size();
        }
        Term(Arc::new(TermInner {
            kind: TermKind::App(sym, args),
            hash: h,
            size,
        }))
    }

    pub fn constant(sym: SymbolId) -> Term {
        Term::app(sym, Vec::new())
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub(crate) fn hash(&self) -> u64 {
        self.0.hash
    }

    pub fn as_var(&self) -> Option<&Arc<str>> {
        match &self.0.kind {
            TermKind::Var(v) => Some(v),
            TermKind::App(..) => None,
        }
    }

    pub fn as_app(&self) -> Option<(SymbolId, &[Term])> {
        match &self.0.kind {
            TermKind::Var(_) => None,
            TermKind::App(s, args) => Some((*s, args)),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.kind, TermKind::Var(_))
    }

    pub fn root(&self) -> Option<SymbolId> {
        self.as_app().map(|(s, _)| s)
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.kind {
            TermKind::Var(_) => &[],
            TermKind::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match &self.0.kind {
            TermKind::Var(_) => false,
            TermKind::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// True iff the term is built from constructors and variables only.
    pub fn is_constructor_term(&self, sig: &Signature) -> bool {
        match &self.0.kind {
            TermKind::Var(_) => true,
            TermKind::App(s, args) => {
                sig.sym(*s).kind == SymbolKind::Constructor
                    && args.iter().all(|a| a.is_constructor_term(sig))
            }
        }
    }

    /// True iff the term is a ground constructor term (a data value).
    pub fn is_ground_constructor(&self, sig: &Signature) -> bool {
        match &self.0.kind {
            TermKind::Var(_) => false,
            TermKind::App(s, args) => {
                sig.sym(*s).kind == SymbolKind::Constructor
                    && args.iter().all(|a| a.is_ground_constructor(sig))
            }
        }
    }

    /// Variables of the term, in first-occurrence order, without duplicates.
    pub fn vars(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Arc<str>>) {
        match &self.0.kind {
            TermKind::Var(v) => {
                if !out.iter().any(|w| w == v) {
                    out.push(v.clone());
                }
            }
            TermKind::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// All subterm occurrences paired with their position path (root = []).
    pub fn subterms_with_positions(&self) -> Vec<(Vec<u32>, &Term)> {
        let mut out = Vec::new();
        fn walk<'t>(t: &'t Term, path: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, &'t Term)>) {
            out.push((path.clone(), t));
            for (i, a) in t.args().iter().enumerate() {
                path.push(i as u32);
                walk(a, path, out);
                path.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.size != other.0.size {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Var(a), TermKind::Var(b)) => a == b,
            (TermKind::App(f, xs), TermKind::App(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    /// A fast arbitrary total order used by ordered collections: the cached
    /// hash decides first, with a structural comparison breaking collisions.
    /// Deterministic across runs. The semantic comparison on ground
    /// constructor terms is [`TermOrder`].
    fn cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .hash
            .cmp(&other.0.hash)
            .then_with(|| self.structural_cmp(other))
    }
}

impl Term {
    fn structural_cmp(&self, other: &Term) -> Ordering {
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Var(a), TermKind::Var(b)) => a.cmp(b),
            (TermKind::Var(_), TermKind::App(..)) => Ordering::Less,
            (TermKind::App(..), TermKind::Var(_)) => Ordering::Greater,
            (TermKind::App(f, xs), TermKind::App(g, ys)) => f
                .cmp(g)
                .then_with(|| xs.len().cmp(&ys.len()))
                .then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = x.cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                }),
        }
    }
}

impl core::hash::Hash for Term {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.term.0.kind {
            TermKind::Var(v) => f.write_str(v),
            TermKind::App(s, args) => {
                f.write_str(&self.sig.sym(*s).name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a.display(self.sig))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A finite map from variable names to terms. In the call-by-value
/// discipline all range terms are ground constructor terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Arc<str>, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(&mut self, var: Arc<str>, t: Term) {
        self.bindings.insert(var, t);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<str>, &Term)> {
        self.bindings.iter()
    }
}

impl FromIterator<(Arc<str>, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Arc<str>, Term)>>(iter: I) -> Substitution {
        Substitution {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Reflexive subterm relation: `u` occurs as a subtree of `t`.
pub fn is_subterm(u: &Term, t: &Term) -> bool {
    if u.size() > t.size() {
        return false;
    }
    if u == t {
        return true;
    }
    t.args().iter().any(|a| is_subterm(u, a))
}

/// First-order matching: returns `sigma` with `sigma(pattern) = subject` when
/// one exists. Non-linear patterns require equal bindings. The subject is
/// expected to be ground; a variable subject never matches an application
/// pattern.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut bindings: Vec<(Arc<str>, Term)> = Vec::new();
    if match_into(pattern, subject, &mut bindings) {
        Some(bindings.into_iter().collect())
    } else {
        None
    }
}

pub(crate) fn match_into(
    pattern: &Term,
    subject: &Term,
    bindings: &mut Vec<(Arc<str>, Term)>,
) -> bool {
    match &pattern.0.kind {
        TermKind::Var(v) => {
            if let Some((_, bound)) = bindings.iter().find(|(w, _)| w == v) {
                bound == subject
            } else {
                bindings.push((v.clone(), subject.clone()));
                true
            }
        }
        TermKind::App(f, ps) => match &subject.0.kind {
            TermKind::App(g, ss) if f == g && ps.len() == ss.len() => {
                ps.iter().zip(ss).all(|(p, s)| match_into(p, s, bindings))
            }
            _ => false,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundVariable {
    pub name: String,
}

impl fmt::Display for UnboundVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbound variable `{}` in substitution", self.name)
    }
}

impl core::error::Error for UnboundVariable {}

/// Homomorphic replacement of every variable of `t` by its binding.
pub fn substitute(t: &Term, sub: &Substitution) -> Result<Term, UnboundVariable> {
    match &t.0.kind {
        TermKind::Var(v) => sub.get(v).cloned().ok_or_else(|| UnboundVariable {
            name: String::from(&**v),
        }),
        TermKind::App(s, args) => {
            if t.is_ground() {
                return Ok(t.clone());
            }
            let new_args = args
                .iter()
                .map(|a| substitute(a, sub))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::app(*s, new_args))
        }
    }
}

/// The total order on ground constructor terms induced by the declaration
/// order of constructor symbols: roots are compared first, equal roots
/// compare their arguments left-to-right. Equal roots have equal arity, so
/// no length tie-break is needed.
#[derive(Clone, Copy)]
pub struct TermOrder<'a> {
    sig: &'a Signature,
}

impl<'a> TermOrder<'a> {
    pub fn new(sig: &'a Signature) -> TermOrder<'a> {
        TermOrder { sig }
    }

    /// Strict comparison; both terms must be ground constructor terms.
    pub fn lt(&self, a: &Term, b: &Term) -> bool {
        self.cmp(a, b) == Ordering::Less
    }

    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        match (&a.0.kind, &b.0.kind) {
            (TermKind::App(f, xs), TermKind::App(g, ys)) => {
                let df = self.sig.sym(*f).decl_index;
                let dg = self.sig.sym(*g).decl_index;
                df.cmp(&dg).then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = self.cmp(x, y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    xs.len().cmp(&ys.len())
                })
            }
            // Variables do not occur in ground terms; fall back to the
            // structural order so the comparison stays total.
            _ => a.cmp(b),
        }
    }

    pub fn max<I: IntoIterator<Item = Term>>(&self, items: I) -> Option<Term> {
        items
            .into_iter()
            .reduce(|acc, t| if self.lt(&acc, &t) { t } else { acc })
    }
}

/// `term_lt(a, b)` under the declaration order; see [`TermOrder`].
pub fn term_lt(sig: &Signature, a: &Term, b: &Term) -> bool {
    TermOrder::new(sig).lt(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::SignatureBuilder;
    use alloc::vec;

    fn sig() -> Signature {
        let mut b = SignatureBuilder::new();
        b.constructor("eps", 0).unwrap();
        b.constructor("c0", 1).unwrap();
        b.constructor("c1", 1).unwrap();
        b.constructor("ff", 0).unwrap();
        b.constructor("tt", 0).unwrap();
        b.constructor("nil", 0).unwrap();
        b.constructor("cons", 2).unwrap();
        b.function("f", 2).unwrap();
        b.finish()
    }

    fn c(s: &Signature, name: &str, args: Vec<Term>) -> Term {
        Term::app(s.lookup(name).unwrap(), args)
    }

    #[test]
    fn size_counts_every_symbol_and_variable() {
        let s = sig();
        // f(a, x) with a nullary has size 3
        let t = c(&s, "f", vec![c(&s, "eps", vec![]), Term::var("x")]);
        assert_eq!(t.size(), 3);
        assert_eq!(c(&s, "tt", vec![]).size(), 1);
        let l = c(
            &s,
            "cons",
            vec![
                c(&s, "c0", vec![c(&s, "eps", vec![])]),
                c(&s, "nil", vec![]),
            ],
        );
        assert_eq!(l.size(), 4);
    }

    #[test]
    fn subterm_is_reflexive_and_finds_occurrences() {
        let s = sig();
        let zero = c(&s, "c0", vec![c(&s, "eps", vec![])]);
        let l = c(&s, "cons", vec![zero.clone(), c(&s, "nil", vec![])]);
        assert!(is_subterm(&l, &l));
        assert!(is_subterm(&zero, &l));
        assert!(!is_subterm(&c(&s, "tt", vec![]), &c(&s, "ff", vec![])));
    }

    #[test]
    fn matching_binds_variables() {
        let s = sig();
        // c0(x) against c0(c1(eps))
        let pat = c(&s, "c0", vec![Term::var("x")]);
        let one_eps = c(&s, "c1", vec![c(&s, "eps", vec![])]);
        let subj = c(&s, "c0", vec![one_eps.clone()]);
        let sub = match_term(&pat, &subj).unwrap();
        assert_eq!(sub.get("x"), Some(&one_eps));

        let eps = c(&s, "eps", vec![]);
        assert_eq!(match_term(&eps, &eps), Some(Substitution::new()));
    }

    #[test]
    fn nonlinear_pattern_requires_equal_bindings() {
        let s = sig();
        let pat = c(&s, "cons", vec![Term::var("x"), Term::var("x")]);
        let subj = c(&s, "cons", vec![c(&s, "tt", vec![]), c(&s, "ff", vec![])]);
        assert_eq!(match_term(&pat, &subj), None);
        let same = c(&s, "cons", vec![c(&s, "tt", vec![]), c(&s, "tt", vec![])]);
        assert!(match_term(&pat, &same).is_some());
    }

    #[test]
    fn substitution_is_homomorphic() {
        let s = sig();
        let tt = c(&s, "tt", vec![]);
        let sub: Substitution = [(Arc::from("x"), tt.clone())].into_iter().collect();
        assert_eq!(substitute(&Term::var("x"), &sub).unwrap(), tt);

        let zero = c(&s, "c0", vec![c(&s, "eps", vec![])]);
        let sub2: Substitution = [(Arc::from("x"), zero.clone())].into_iter().collect();
        let pat = c(&s, "cons", vec![Term::var("x"), c(&s, "nil", vec![])]);
        let expected = c(&s, "cons", vec![zero, c(&s, "nil", vec![])]);
        assert_eq!(substitute(&pat, &sub2).unwrap(), expected);

        let eps = c(&s, "eps", vec![]);
        assert_eq!(substitute(&eps, &Substitution::new()).unwrap(), eps);

        assert!(substitute(&Term::var("y"), &Substitution::new()).is_err());
    }

    #[test]
    fn match_substitute_round_trip() {
        let s = sig();
        let pat = c(
            &s,
            "cons",
            vec![c(&s, "c0", vec![Term::var("x")]), Term::var("l")],
        );
        let subj = c(
            &s,
            "cons",
            vec![
                c(&s, "c0", vec![c(&s, "eps", vec![])]),
                c(&s, "cons", vec![c(&s, "tt", vec![]), c(&s, "nil", vec![])]),
            ],
        );
        let sub = match_term(&pat, &subj).unwrap();
        assert_eq!(substitute(&pat, &sub).unwrap(), subj);
    }

    #[test]
    fn term_order_follows_declaration_order() {
        let s = sig();
        let ord = TermOrder::new(&s);
        let tt = c(&s, "tt", vec![]);
        let ff = c(&s, "ff", vec![]);
        assert!(!ord.lt(&tt, &tt));
        assert!(ord.lt(&ff, &tt)); // ff declared before tt
        let a = c(&s, "cons", vec![ff.clone(), c(&s, "nil", vec![])]);
        let b = c(&s, "cons", vec![tt.clone(), c(&s, "nil", vec![])]);
        assert!(ord.lt(&a, &b));
        assert_eq!(ord.max(vec![tt.clone(), ff.clone()]), Some(tt));
    }
}
