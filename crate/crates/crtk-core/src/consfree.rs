//! Interpretations over finite sets of ground constructor terms.
//!
//! The domain is S(C): finite non-empty sets of data values ordered by
//! inclusion, with the lifted subterm relation `sts_leq` (every element of
//! the left set is a subterm of some element of the right set). Constructors
//! act pointwise; function symbols are given either canonically (downward
//! subterm closure of the argument union, valid for any cons-free program)
//! or by a named built-in generator.
//!
//! The memoized evaluators wrap the engine and assert, per run, that every
//! cache-key argument and every cached normal form is a subterm of the
//! witness set (the interpretation of the top call plus the inputs), and
//! that returned normal forms are members of the call's interpretation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::RngCore;

use crate::engine::{EvalBudget, EvalStats, EvalStatus, Session, SessionError};
use crate::program::{Program, Signature, SymbolId, SymbolKind};
use crate::term::{is_subterm, substitute, Substitution, Term};

/// A finite set of ground constructor terms. The interpretation domain
/// consists of non-empty sets; every operation here preserves non-emptiness
/// on non-empty inputs, and emptiness is surfaced rather than hidden when a
/// generator produces nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermSet {
    elements: BTreeSet<Term>,
}

impl TermSet {
    pub fn new() -> TermSet {
        TermSet::default()
    }

    pub fn singleton(t: Term) -> TermSet {
        let mut s = TermSet::new();
        s.insert(t);
        s
    }

    pub fn insert(&mut self, t: Term) -> bool {
        self.elements.insert(t)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.elements.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn union_with(&mut self, other: &TermSet) {
        for t in other.iter() {
            self.elements.insert(t.clone());
        }
    }

    pub fn is_subset(&self, other: &TermSet) -> bool {
        self.elements.is_subset(&other.elements)
    }
}

impl FromIterator<Term> for TermSet {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> TermSet {
        TermSet {
            elements: iter.into_iter().collect(),
        }
    }
}

/// Size of a set: the sum of its elements' sizes.
pub fn set_size(m: &TermSet) -> u64 {
    m.iter().map(Term::size).sum()
}

/// The lifted subterm relation: `m` below `m2` iff every element of `m` is a
/// subterm of some element of `m2`.
pub fn sts_leq(m: &TermSet, m2: &TermSet) -> bool {
    m.iter().all(|t| m2.iter().any(|u| is_subterm(t, u)))
}

/// Pointwise constructor action: `{ c(t_1..t_k) | t_i in m_i }`.
pub fn constructor_image(c: SymbolId, ms: &[TermSet]) -> TermSet {
    let mut out = TermSet::new();
    let mut combo: Vec<Term> = Vec::with_capacity(ms.len());
    fn rec(c: SymbolId, ms: &[TermSet], combo: &mut Vec<Term>, out: &mut TermSet) {
        if combo.len() == ms.len() {
            out.insert(Term::app(c, combo.clone()));
            return;
        }
        let idx = combo.len();
        for t in ms[idx].iter() {
            combo.push(t.clone());
            rec(c, ms, combo, out);
            combo.pop();
        }
    }
    rec(c, ms, &mut combo, &mut out);
    out
}

/// One source feeding a union-shaped generator.
#[derive(Clone, Debug)]
pub enum SetAtom {
    /// The i-th argument set, passed through.
    Arg(usize),
    /// A fixed set of ground constructor terms.
    Consts(Vec<Term>),
}

/// How a function symbol acts on argument sets. Every variant is weakly
/// monotone with respect to inclusion by construction.
#[derive(Clone, Debug)]
pub enum SetFnSpec {
    /// `{ u | exists i, t in m_i : u subterm of t }`, the canonical choice
    /// for cons-free programs.
    SubtermClosure,
    /// Union of argument sets and constant sets.
    Union(Vec<SetAtom>),
    /// Consecutive descending numeral segments reachable below the argument
    /// elements, plus the empty list. Built for unary list-builder functions
    /// over tally numbers.
    DescendingSegments {
        zero: SymbolId,
        succ: SymbolId,
        nil: SymbolId,
        cons: SymbolId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetEvalError {
    UnassignedSymbol(String),
    VariableInGroundTerm(String),
    /// The computed set exceeded the size ceiling.
    SetTooLarge {
        limit: u64,
    },
    NotConsFree,
}

impl fmt::Display for SetEvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetEvalError::UnassignedSymbol(n) => {
                write!(f, "no set interpretation for function `{n}`")
            }
            SetEvalError::VariableInGroundTerm(v) => {
                write!(f, "variable `{v}` in a term expected to be ground")
            }
            SetEvalError::SetTooLarge { limit } => {
                write!(f, "set interpretation exceeded the size ceiling {limit}")
            }
            SetEvalError::NotConsFree => {
                write!(f, "canonical interpretation requires a cons-free program")
            }
        }
    }
}

impl core::error::Error for SetEvalError {}

/// Per-function assignment of set generators; constructors always act
/// pointwise.
#[derive(Clone, Debug)]
pub struct SetInterpretation {
    pub per_function: BTreeMap<SymbolId, SetFnSpec>,
    /// Ceiling on the size of any computed set, recorded in verdicts.
    pub size_ceiling: u64,
}

pub const DEFAULT_SET_CEILING: u64 = 2_000_000;

impl SetInterpretation {
    pub fn new() -> SetInterpretation {
        SetInterpretation {
            per_function: BTreeMap::new(),
            size_ceiling: DEFAULT_SET_CEILING,
        }
    }

    /// The canonical constructor-preserving interpretation of a cons-free
    /// program: every function maps to the subterm closure of its argument
    /// union.
    pub fn canonical(p: &Program) -> Result<SetInterpretation, SetEvalError> {
        let (ok, _) = crate::program::is_cons_free(p);
        if !ok {
            return Err(SetEvalError::NotConsFree);
        }
        let mut si = SetInterpretation::new();
        for f in p.signature.functions() {
            si.per_function.insert(f, SetFnSpec::SubtermClosure);
        }
        Ok(si)
    }

    pub fn assign(&mut self, f: SymbolId, spec: SetFnSpec) {
        self.per_function.insert(f, spec);
    }

    /// Functions of the signature missing a generator.
    pub fn missing(&self, sig: &Signature) -> Vec<SymbolId> {
        sig.functions()
            .filter(|f| !self.per_function.contains_key(f))
            .collect()
    }

    /// Applies the generator for `f` to argument sets.
    pub fn apply(
        &self,
        sig: &Signature,
        f: SymbolId,
        args: &[TermSet],
    ) -> Result<TermSet, SetEvalError> {
        let spec = self
            .per_function
            .get(&f)
            .ok_or_else(|| SetEvalError::UnassignedSymbol(String::from(sig.name(f))))?;
        let out = match spec {
            SetFnSpec::SubtermClosure => {
                let mut out = TermSet::new();
                for m in args {
                    for t in m.iter() {
                        for (_, sub) in t.subterms_with_positions() {
                            out.insert(sub.clone());
                        }
                    }
                }
                out
            }
            SetFnSpec::Union(atoms) => {
                let mut out = TermSet::new();
                for atom in atoms {
                    match atom {
                        SetAtom::Arg(i) => out.union_with(&args[*i]),
                        SetAtom::Consts(ts) => {
                            for t in ts {
                                out.insert(t.clone());
                            }
                        }
                    }
                }
                out
            }
            SetFnSpec::DescendingSegments {
                zero,
                succ,
                nil,
                cons,
            } => descending_segments(*zero, *succ, *nil, *cons, args),
        };
        if set_size(&out) > self.size_ceiling {
            return Err(SetEvalError::SetTooLarge {
                limit: self.size_ceiling,
            });
        }
        Ok(out)
    }

    /// Interprets a ground term through the algebra: constructors pointwise,
    /// functions via their generators. Ground constructor terms always map
    /// to their own singleton.
    pub fn eval_term(&self, sig: &Signature, t: &Term) -> Result<TermSet, SetEvalError> {
        match t.as_var() {
            Some(v) => Err(SetEvalError::VariableInGroundTerm(String::from(&**v))),
            None => {
                let (s, targs) = t.as_app().unwrap();
                let arg_sets = targs
                    .iter()
                    .map(|a| self.eval_term(sig, a))
                    .collect::<Result<Vec<_>, _>>()?;
                match sig.sym(s).kind {
                    SymbolKind::Constructor => {
                        let out = constructor_image(s, &arg_sets);
                        if set_size(&out) > self.size_ceiling {
                            return Err(SetEvalError::SetTooLarge {
                                limit: self.size_ceiling,
                            });
                        }
                        Ok(out)
                    }
                    SymbolKind::Function => self.apply(sig, s, &arg_sets),
                }
            }
        }
    }
}

impl Default for SetInterpretation {
    fn default() -> SetInterpretation {
        SetInterpretation::new()
    }
}

/// Is `t` a numeral `succ^k(zero)`? Returns the chain of its numeral
/// subterms from `t` down to `zero` when so.
fn numeral_chain(t: &Term, zero: SymbolId, succ: SymbolId) -> Option<Vec<Term>> {
    let mut chain = Vec::new();
    let mut cur = t.clone();
    loop {
        let (s, args) = cur.as_app()?;
        if s == zero && args.is_empty() {
            chain.push(cur.clone());
            return Some(chain);
        }
        if s == succ && args.len() == 1 {
            chain.push(cur.clone());
            let next = args[0].clone();
            cur = next;
        } else {
            return None;
        }
    }
}

fn descending_segments(
    zero: SymbolId,
    succ: SymbolId,
    nil: SymbolId,
    cons: SymbolId,
    args: &[TermSet],
) -> TermSet {
    let mut out = TermSet::new();
    out.insert(Term::constant(nil));
    for m in args {
        for t in m.iter() {
            for (_, sub) in t.subterms_with_positions() {
                // a start a is any numeral with succ(a) occurring below t
                let Some((s, sargs)) = sub.as_app() else {
                    continue;
                };
                if s != succ || sargs.len() != 1 {
                    continue;
                }
                let Some(chain) = numeral_chain(&sargs[0], zero, succ) else {
                    continue;
                };
                // chain = [a, a-1, .., zero]; emit every prefix as a list
                for end in 0..chain.len() {
                    let mut list = Term::constant(nil);
                    for item in chain[..=end].iter().rev() {
                        list = Term::app(cons, alloc::vec![item.clone(), list]);
                    }
                    out.insert(list);
                }
            }
        }
    }
    out
}

/// Uniformly random ground constructor term of size at most `max_size`.
/// Returns `None` when the signature has no nullary constructor.
pub fn random_ground_constructor_term(
    sig: &Signature,
    rng: &mut dyn RngCore,
    max_size: u64,
) -> Option<Term> {
    let nullary: Vec<SymbolId> = sig
        .constructors()
        .filter(|c| sig.sym(*c).arity == 0)
        .collect();
    if nullary.is_empty() {
        return None;
    }
    let all: Vec<SymbolId> = sig.constructors().collect();
    fn gen(
        sig: &Signature,
        rng: &mut dyn RngCore,
        budget: u64,
        all: &[SymbolId],
        nullary: &[SymbolId],
    ) -> Term {
        let eligible: Vec<SymbolId> = all
            .iter()
            .copied()
            .filter(|c| u64::from(sig.sym(*c).arity) < budget.max(1))
            .collect();
        let pool = if eligible.is_empty() {
            nullary
        } else {
            &eligible
        };
        let c = pool[(rng.next_u64() % pool.len() as u64) as usize];
        let arity = sig.sym(c).arity as usize;
        if arity == 0 {
            return Term::constant(c);
        }
        let child_budget = ((budget - 1) / arity as u64).max(1);
        let args = (0..arity)
            .map(|_| gen(sig, rng, child_budget, all, nullary))
            .collect();
        Term::app(c, args)
    }
    Some(gen(sig, rng, max_size.max(1), &all, &nullary))
}

#[derive(Clone, Debug)]
pub struct CpCounterexample {
    pub rule_index: usize,
    pub substitution: Substitution,
    /// The rhs subterm whose interpretation escapes the bound.
    pub rhs_subterm: Term,
    /// An element of its interpretation with no covering element.
    pub offending: Term,
}

#[derive(Clone, Debug)]
pub enum CpVerdict {
    Verified {
        samples: u32,
    },
    Falsified(CpCounterexample),
    /// The size ceiling interrupted the check.
    Overflow {
        at_sample: u32,
    },
}

impl CpVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, CpVerdict::Verified { .. })
    }
}

#[derive(Clone, Debug)]
pub struct CpReport {
    pub per_rule: Vec<(usize, CpVerdict)>,
    pub samples_per_rule: u32,
    pub max_subst_size: u64,
}

impl CpReport {
    pub fn all_verified(&self) -> bool {
        self.per_rule.iter().all(|(_, v)| v.is_verified())
    }
}

/// Samples random ground constructor substitutions per rule and checks, for
/// every rhs subterm `u`, that the interpretation of `sigma(u)` lies below
/// the interpretation of the instantiated lhs joined with the instantiated
/// patterns (in the lifted subterm order). Statistical evidence, not proof.
pub fn check_constructor_preserving(
    p: &Program,
    si: &SetInterpretation,
    samples: u32,
    max_subst_size: u64,
    rng: &mut dyn RngCore,
) -> Result<CpReport, SetEvalError> {
    let sig = &p.signature;
    if let Some(first) = si.missing(sig).first() {
        return Err(SetEvalError::UnassignedSymbol(String::from(
            sig.name(*first),
        )));
    }
    let mut per_rule = Vec::with_capacity(p.rules.len());
    'rules: for (ri, rule) in p.rules.iter().enumerate() {
        let vars = rule.lhs.vars();
        let (_, patterns) = rule.lhs.as_app().expect("well-formed rule");
        // distinct rhs subterms; occurrences of the same subterm check alike
        let mut rhs_subterms: Vec<Term> = Vec::new();
        for (_, sub) in rule.rhs.subterms_with_positions() {
            if !rhs_subterms.contains(sub) {
                rhs_subterms.push(sub.clone());
            }
        }
        for sample in 0..samples {
            let sub: Substitution = vars
                .iter()
                .map(|v| {
                    let t = random_ground_constructor_term(sig, rng, max_subst_size)
                        .expect("signature has a nullary constructor");
                    (v.clone(), t)
                })
                .collect();
            let lhs_inst = substitute(&rule.lhs, &sub).expect("lhs variables bound");
            let mut target = match si.eval_term(sig, &lhs_inst) {
                Ok(s) => s,
                Err(SetEvalError::SetTooLarge { .. }) => {
                    per_rule.push((ri, CpVerdict::Overflow { at_sample: sample }));
                    continue 'rules;
                }
                Err(e) => return Err(e),
            };
            for pat in patterns {
                let pat_inst = substitute(pat, &sub).expect("pattern variables bound");
                match si.eval_term(sig, &pat_inst) {
                    Ok(s) => target.union_with(&s),
                    Err(SetEvalError::SetTooLarge { .. }) => {
                        per_rule.push((ri, CpVerdict::Overflow { at_sample: sample }));
                        continue 'rules;
                    }
                    Err(e) => return Err(e),
                }
            }
            for u in &rhs_subterms {
                let u_inst = substitute(u, &sub).expect("rhs variables bound");
                let u_set = match si.eval_term(sig, &u_inst) {
                    Ok(s) => s,
                    Err(SetEvalError::SetTooLarge { .. }) => {
                        per_rule.push((ri, CpVerdict::Overflow { at_sample: sample }));
                        continue 'rules;
                    }
                    Err(e) => return Err(e),
                };
                let offending: Option<Term> = u_set
                    .iter()
                    .find(|t| !target.iter().any(|w| is_subterm(t, w)))
                    .cloned();
                if let Some(offending) = offending {
                    per_rule.push((
                        ri,
                        CpVerdict::Falsified(CpCounterexample {
                            rule_index: ri,
                            substitution: sub.clone(),
                            rhs_subterm: u.clone(),
                            offending,
                        }),
                    ));
                    continue 'rules;
                }
            }
        }
        per_rule.push((ri, CpVerdict::Verified { samples }));
    }
    Ok(CpReport {
        per_rule,
        samples_per_rule: samples,
        max_subst_size,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MemoViolationKind {
    CacheKeyArgument,
    CachedValue,
}

#[derive(Clone, Debug)]
pub struct MemoViolation {
    pub call: Term,
    pub offending: Term,
    pub kind: MemoViolationKind,
}

/// Runtime evidence from one memoized run: cache-shape assertions against
/// the witness set, plus normal-form membership in the call's
/// interpretation.
#[derive(Clone, Debug)]
pub struct AssertionReport {
    /// Elements of the interpretation of the top call plus the inputs.
    pub witness_base_len: usize,
    /// Cardinality of the witness set (distinct subterms of the base).
    pub witness_subterm_count: u64,
    pub checked_key_args: u64,
    pub checked_values: u64,
    pub violations: Vec<MemoViolation>,
    /// Whether every returned normal form belongs to the interpretation of
    /// the call; `None` when the run produced no value.
    pub nf_member: Option<bool>,
}

impl AssertionReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.nf_member != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct MemoOutcome {
    pub value: Option<Term>,
    pub status: EvalStatus,
    pub stats: EvalStats,
    pub assertions: AssertionReport,
}

#[derive(Clone, Debug)]
pub struct MemoNdOutcome {
    pub values: BTreeSet<Term>,
    pub complete: bool,
    pub status: EvalStatus,
    pub stats: EvalStats,
    pub assertions: AssertionReport,
}

#[derive(Clone, Debug)]
pub enum MemoError {
    Session(SessionError),
    SetEval(SetEvalError),
}

impl fmt::Display for MemoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoError::Session(e) => write!(f, "{e}"),
            MemoError::SetEval(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MemoError {}

impl From<SessionError> for MemoError {
    fn from(e: SessionError) -> MemoError {
        MemoError::Session(e)
    }
}

impl From<SetEvalError> for MemoError {
    fn from(e: SetEvalError) -> MemoError {
        MemoError::SetEval(e)
    }
}

fn witness_base(
    si: &SetInterpretation,
    sig: &Signature,
    f: SymbolId,
    args: &[Term],
) -> Result<(TermSet, Vec<Term>), SetEvalError> {
    let call = Term::app(f, args.to_vec());
    let top = si.eval_term(sig, &call)?;
    let mut base: Vec<Term> = top.iter().cloned().collect();
    for a in args {
        if !base.contains(a) {
            base.push(a.clone());
        }
    }
    Ok((top, base))
}

fn subterm_count(base: &[Term]) -> u64 {
    let mut subs: BTreeSet<Term> = BTreeSet::new();
    for t in base {
        for (_, sub) in t.subterms_with_positions() {
            subs.insert(sub.clone());
        }
    }
    subs.len() as u64
}

fn covered(base: &[Term], t: &Term) -> bool {
    base.iter().any(|w| is_subterm(t, w))
}

/// Deterministic memoized evaluation with cache-shape assertions: every
/// cache-key argument and every cached normal form must be a subterm of the
/// witness set, and the result must be a member of the interpretation of
/// the call.
pub fn eval_memo(
    p: &Program,
    si: &SetInterpretation,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<MemoOutcome, MemoError> {
    let sig = &p.signature;
    let (top, base) = witness_base(si, sig, f, &args)?;
    let mut session = Session::new(p)?;
    let out = session.eval_cbv(f, args, budget)?;
    let mut violations = Vec::new();
    let mut checked_key_args = 0u64;
    let mut checked_values = 0u64;
    let mut entries: Vec<(&crate::engine::CallKey, &Term)> = session.det_cache_entries().collect();
    entries.sort_by(|a, b| (a.0.symbol, &a.0.args).cmp(&(b.0.symbol, &b.0.args)));
    for (key, value) in entries {
        for a in key.args.iter() {
            checked_key_args += 1;
            if !covered(&base, a) {
                violations.push(MemoViolation {
                    call: key.to_term(),
                    offending: a.clone(),
                    kind: MemoViolationKind::CacheKeyArgument,
                });
            }
        }
        checked_values += 1;
        if !covered(&base, value) {
            violations.push(MemoViolation {
                call: key.to_term(),
                offending: value.clone(),
                kind: MemoViolationKind::CachedValue,
            });
        }
    }
    let nf_member = out.value.as_ref().map(|v| top.contains(v));
    Ok(MemoOutcome {
        value: out.value,
        status: out.status,
        stats: out.stats,
        assertions: AssertionReport {
            witness_base_len: base.len(),
            witness_subterm_count: subterm_count(&base),
            checked_key_args,
            checked_values,
            violations,
            nf_member,
        },
    })
}

/// Non-deterministic memoized evaluation with the same assertions applied to
/// every element of every cached set.
pub fn eval_memo_nd(
    p: &Program,
    si: &SetInterpretation,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<MemoNdOutcome, MemoError> {
    let sig = &p.signature;
    let (top, base) = witness_base(si, sig, f, &args)?;
    let mut session = Session::new(p)?;
    let out = session.eval_nd(f, args, budget)?;
    let mut violations = Vec::new();
    let mut checked_key_args = 0u64;
    let mut checked_values = 0u64;
    let mut entries: Vec<(&crate::engine::CallKey, &BTreeSet<Term>)> =
        session.nd_cache_entries().collect();
    entries.sort_by(|a, b| (a.0.symbol, &a.0.args).cmp(&(b.0.symbol, &b.0.args)));
    for (key, values) in entries {
        for a in key.args.iter() {
            checked_key_args += 1;
            if !covered(&base, a) {
                violations.push(MemoViolation {
                    call: key.to_term(),
                    offending: a.clone(),
                    kind: MemoViolationKind::CacheKeyArgument,
                });
            }
        }
        for value in values {
            checked_values += 1;
            if !covered(&base, value) {
                violations.push(MemoViolation {
                    call: key.to_term(),
                    offending: value.clone(),
                    kind: MemoViolationKind::CachedValue,
                });
            }
        }
    }
    let nf_member = if out.values.is_empty() {
        None
    } else {
        Some(out.values.iter().all(|v| top.contains(v)))
    };
    Ok(MemoNdOutcome {
        values: out.values,
        complete: out.complete,
        status: out.status,
        stats: out.stats,
        assertions: AssertionReport {
            witness_base_len: base.len(),
            witness_subterm_count: subterm_count(&base),
            checked_key_args,
            checked_values,
            violations,
            nf_member,
        },
    })
}

#[derive(Clone, Debug)]
pub struct ProbePoint {
    pub input_size: u64,
    pub output_size: u64,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub points: Vec<ProbePoint>,
    /// Least-squares slope of log output size against log input size.
    pub degree_estimate: f64,
}

/// Measures the growth of a generator on random argument sets of prescribed
/// sizes and fits a log-log slope. Evidence of polynomial boundedness, not
/// proof.
pub fn probe_poly_bound(
    sig: &Signature,
    si: &SetInterpretation,
    f: SymbolId,
    sizes: &[u64],
    trials_per_size: u32,
    rng: &mut dyn RngCore,
) -> Result<ProbeReport, SetEvalError> {
    let arity = sig.sym(f).arity as usize;
    let mut points = Vec::new();
    for &target in sizes {
        for _ in 0..trials_per_size {
            let per_arg = (target / arity.max(1) as u64).max(1);
            let args: Vec<TermSet> = (0..arity.max(1))
                .map(|_| {
                    let mut s = TermSet::new();
                    while set_size(&s) < per_arg {
                        if let Some(t) =
                            random_ground_constructor_term(sig, rng, per_arg.clamp(1, 12))
                        {
                            s.insert(t);
                        } else {
                            break;
                        }
                    }
                    s
                })
                .collect();
            let args = &args[..arity];
            let input_size: u64 = args.iter().map(set_size).sum();
            let out = si.apply(sig, f, args)?;
            points.push(ProbePoint {
                input_size: input_size.max(1),
                output_size: set_size(&out).max(1),
            });
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    for p in &points {
        sx += libm::log(p.input_size as f64);
        sy += libm::log(p.output_size as f64);
    }
    let (mx, my) = (sx / n, sy / n);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for p in &points {
        let dx = libm::log(p.input_size as f64) - mx;
        let dy = libm::log(p.output_size as f64) - my;
        num += dx * dy;
        den += dx * dx;
    }
    let degree_estimate = if den == 0.0 { 0.0 } else { num / den };
    Ok(ProbeReport {
        points,
        degree_estimate,
    })
}
