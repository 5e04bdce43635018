//! Call-by-value evaluation over the constructor algebra.
//!
//! Two evaluators share one rule-compilation step:
//!
//! * deterministic: innermost, first matching rule in file order, results
//!   memoized in a call cache;
//! * non-deterministic: every applicable rule fires and every combination of
//!   argument outcomes is explored, collecting the set of constructor normal
//!   forms in a set-valued cache shared across branches.
//!
//! A branch whose argument has no constructor normal form contributes
//! nothing. Re-entering a call key that is currently being expanded yields
//! the previous round's set for that key, and rounds are iterated to a
//! fixpoint, so recursive revisits cannot loop.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::fxhash::{FxHashMap, FxHashSet};
use crate::program::{Program, Signature, SymbolId, SymbolKind};
use crate::term::{Substitution, Term, TermOrder};

/// Guards against non-terminating or explosive inputs. A zero
/// `max_cache_entries` disables memoization entirely (the fallback path used
/// to cross-check cache soundness).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_steps: u64,
    pub max_term_size: u64,
    pub max_cache_entries: u64,
}

impl Default for EvalBudget {
    fn default() -> EvalBudget {
        EvalBudget {
            max_steps: 10_000_000,
            max_term_size: 100_000,
            max_cache_entries: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalStatus {
    Ok,
    /// A redex with no applicable rule; the call is undefined.
    Stuck,
    OutOfSteps,
    TermTooLarge,
    CacheFull,
    /// A call re-entered itself with identical arguments (deterministic
    /// mode only; certain divergence).
    Cycle,
}

impl EvalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalStatus::Ok => "ok",
            EvalStatus::Stuck => "stuck",
            EvalStatus::OutOfSteps => "budget-steps",
            EvalStatus::TermTooLarge => "budget-term-size",
            EvalStatus::CacheFull => "budget-cache",
            EvalStatus::Cycle => "cycle",
        }
    }

    pub fn is_budget(self) -> bool {
        matches!(
            self,
            EvalStatus::OutOfSteps | EvalStatus::TermTooLarge | EvalStatus::CacheFull
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub steps: u64,
    pub cache_entries: u64,
    /// Sum over cache entries of argument and value sizes.
    pub cache_total_size: u64,
    pub max_term_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CallKey {
    pub symbol: SymbolId,
    pub args: Box<[Term]>,
}

impl CallKey {
    pub fn to_term(&self) -> Term {
        Term::app(self.symbol, self.args.to_vec())
    }
}

#[derive(Clone, Debug)]
pub struct DetOutcome {
    pub value: Option<Term>,
    pub status: EvalStatus,
    pub stats: EvalStats,
    /// Executed rewrite steps as (lhs instance, rhs instance) pairs; only
    /// collected when requested.
    pub steps_log: Option<Vec<(Term, Term)>>,
}

#[derive(Clone, Debug)]
pub struct NdOutcome {
    /// Constructor normal forms. Complete unless the budget interrupted the
    /// exploration.
    pub values: BTreeSet<Term>,
    pub complete: bool,
    pub status: EvalStatus,
    pub stats: EvalStats,
}

#[derive(Clone, Debug)]
pub struct NdValueOutcome {
    /// The maximum of the normal-form set under the term order; `None` when
    /// the set is empty (the call is undefined).
    pub value: Option<Term>,
    pub complete: bool,
    pub status: EvalStatus,
    pub stats: EvalStats,
}

#[derive(Clone, Debug)]
pub struct CallTree {
    pub symbol: SymbolId,
    pub args: Vec<Term>,
    pub value: Option<Term>,
    pub children: Vec<CallTree>,
}

impl CallTree {
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(CallTree::node_count)
            .sum::<usize>()
    }
}

#[derive(Clone, Debug)]
pub struct TraceOutcome {
    pub tree: CallTree,
    pub value: Option<Term>,
    pub status: EvalStatus,
    pub stats: EvalStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionError {
    IllFormed(Vec<crate::program::Diagnostic>),
    NotAFunction(SymbolId),
    ArityMismatch { expected: u32, found: usize },
    NonConstructorArgument(Term),
}

impl core::fmt::Display for SessionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SessionError::IllFormed(d) => {
                write!(f, "program is not well-formed ({} diagnostics)", d.len())
            }
            SessionError::ArityMismatch { expected, found } => {
                write!(f, "call has {found} arguments, symbol expects {expected}")
            }
            SessionError::NotAFunction(_) => write!(f, "called symbol is not a function"),
            SessionError::NonConstructorArgument(_) => {
                write!(f, "call arguments must be ground constructor terms")
            }
        }
    }
}

impl core::error::Error for SessionError {}

enum Pat {
    /// First occurrence of a variable: bind the next slot.
    Bind,
    /// Repeated occurrence: compare against the slot bound earlier.
    Check(usize),
    App(SymbolId, Vec<Pat>),
}

enum Rhs {
    Var(usize),
    Ctor(SymbolId, Vec<Rhs>),
    Call(SymbolId, Vec<Rhs>),
}

struct CompiledRule {
    lhs_pats: Vec<Pat>,
    rhs: Rhs,
    /// Variable names in binding order, for reconstructing substitutions.
    var_names: Vec<Arc<str>>,
}

struct Compiled {
    rules: Vec<CompiledRule>,
    by_symbol: Vec<Vec<usize>>,
}

fn compile_pat(t: &Term, vars: &mut Vec<Arc<str>>) -> Pat {
    match t.as_var() {
        Some(v) => {
            if let Some(pos) = vars.iter().position(|w| w == v) {
                Pat::Check(pos)
            } else {
                vars.push(v.clone());
                Pat::Bind
            }
        }
        None => {
            let (s, args) = t.as_app().unwrap();
            Pat::App(s, args.iter().map(|a| compile_pat(a, vars)).collect())
        }
    }
}

fn compile_rhs(t: &Term, vars: &[Arc<str>], sig: &Signature) -> Rhs {
    match t.as_var() {
        Some(v) => Rhs::Var(
            vars.iter()
                .position(|w| w == v)
                .expect("rhs variable bound by lhs"),
        ),
        None => {
            let (s, args) = t.as_app().unwrap();
            let compiled = args.iter().map(|a| compile_rhs(a, vars, sig)).collect();
            match sig.sym(s).kind {
                SymbolKind::Constructor => Rhs::Ctor(s, compiled),
                SymbolKind::Function => Rhs::Call(s, compiled),
            }
        }
    }
}

fn compile(p: &Program) -> Compiled {
    let mut rules = Vec::with_capacity(p.rules.len());
    let mut by_symbol = vec![Vec::new(); p.signature.len()];
    for (i, rule) in p.rules.iter().enumerate() {
        let (f, lhs_args) = rule.lhs.as_app().expect("well-formed rule lhs");
        let mut vars = Vec::new();
        let lhs_pats = lhs_args.iter().map(|a| compile_pat(a, &mut vars)).collect();
        let rhs = compile_rhs(&rule.rhs, &vars, &p.signature);
        by_symbol[f.index()].push(i);
        rules.push(CompiledRule {
            lhs_pats,
            rhs,
            var_names: vars,
        });
    }
    Compiled { rules, by_symbol }
}

fn match_one(p: &Pat, t: &Term, bindings: &mut Vec<Term>) -> bool {
    match p {
        Pat::Bind => {
            bindings.push(t.clone());
            true
        }
        Pat::Check(slot) => &bindings[*slot] == t,
        Pat::App(s, ps) => match t.as_app() {
            Some((g, ts)) if g == *s => ps.iter().zip(ts).all(|(p, t)| match_one(p, t, bindings)),
            _ => false,
        },
    }
}

fn match_pats(pats: &[Pat], args: &[Term], bindings: &mut Vec<Term>) -> bool {
    pats.iter()
        .zip(args)
        .all(|(p, t)| match_one(p, t, bindings))
}

enum Stop {
    Stuck,
    OutOfSteps,
    TermTooLarge,
    CacheFull,
    Cycle,
}

impl Stop {
    fn status(&self) -> EvalStatus {
        match self {
            Stop::Stuck => EvalStatus::Stuck,
            Stop::OutOfSteps => EvalStatus::OutOfSteps,
            Stop::TermTooLarge => EvalStatus::TermTooLarge,
            Stop::CacheFull => EvalStatus::CacheFull,
            Stop::Cycle => EvalStatus::Cycle,
        }
    }
}

type ValueSet = BTreeSet<Term>;

#[derive(Default)]
struct Caches {
    det: FxHashMap<CallKey, Term>,
    nd: FxHashMap<CallKey, Arc<ValueSet>>,
}

struct RunState {
    budget: EvalBudget,
    memo: bool,
    steps: u64,
    max_term_size: u64,
    in_progress: FxHashSet<CallKey>,
    steps_log: Option<Vec<(Term, Term)>>,
    // Non-deterministic fixpoint bookkeeping.
    reentered: bool,
    prev_round: FxHashMap<CallKey, Arc<ValueSet>>,
    round_inserted: Vec<CallKey>,
}

impl RunState {
    fn new(budget: EvalBudget, collect_steps: bool) -> RunState {
        RunState {
            budget,
            memo: budget.max_cache_entries > 0,
            steps: 0,
            max_term_size: 0,
            in_progress: FxHashSet::default(),
            steps_log: if collect_steps {
                Some(Vec::new())
            } else {
                None
            },
            reentered: false,
            prev_round: FxHashMap::default(),
            round_inserted: Vec::new(),
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            Err(Stop::OutOfSteps)
        } else {
            Ok(())
        }
    }

    fn note_size(&mut self, size: u64) -> Result<(), Stop> {
        if size > self.max_term_size {
            self.max_term_size = size;
        }
        if size > self.budget.max_term_size {
            Err(Stop::TermTooLarge)
        } else {
            Ok(())
        }
    }
}

/// An evaluation session over one immutable program. Caches persist across
/// calls, so sweeps over many related inputs share work; distinct sessions
/// are fully independent.
pub struct Session<'p> {
    program: &'p Program,
    compiled: Compiled,
    caches: Caches,
}

impl<'p> Session<'p> {
    /// Compiles the program's rules. The program must be well-formed.
    pub fn new(program: &'p Program) -> Result<Session<'p>, SessionError> {
        let diags = crate::program::check_wellformed(program);
        if !diags.is_empty() {
            return Err(SessionError::IllFormed(diags));
        }
        Ok(Session {
            program,
            compiled: compile(program),
            caches: Caches::default(),
        })
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn clear_caches(&mut self) {
        self.caches.det.clear();
        self.caches.nd.clear();
    }

    pub fn det_cache_entries(&self) -> impl Iterator<Item = (&CallKey, &Term)> {
        self.caches.det.iter()
    }

    pub fn nd_cache_entries(&self) -> impl Iterator<Item = (&CallKey, &BTreeSet<Term>)> {
        self.caches.nd.iter().map(|(k, v)| (k, &**v))
    }

    fn check_call(&self, f: SymbolId, args: &[Term]) -> Result<(), SessionError> {
        let sym = self.program.signature.sym(f);
        if sym.kind != SymbolKind::Function {
            return Err(SessionError::NotAFunction(f));
        }
        if sym.arity as usize != args.len() {
            return Err(SessionError::ArityMismatch {
                expected: sym.arity,
                found: args.len(),
            });
        }
        for a in args {
            if !a.is_ground_constructor(&self.program.signature) {
                return Err(SessionError::NonConstructorArgument(a.clone()));
            }
        }
        Ok(())
    }

    fn det_stats(&self, st: &RunState) -> EvalStats {
        let mut total = 0u64;
        for (k, v) in &self.caches.det {
            total += k.args.iter().map(Term::size).sum::<u64>() + v.size();
        }
        EvalStats {
            steps: st.steps,
            cache_entries: self.caches.det.len() as u64,
            cache_total_size: total,
            max_term_size: st.max_term_size,
        }
    }

    fn nd_stats(&self, st: &RunState) -> EvalStats {
        let mut total = 0u64;
        for (k, v) in &self.caches.nd {
            total += k.args.iter().map(Term::size).sum::<u64>();
            total += v.iter().map(Term::size).sum::<u64>();
        }
        EvalStats {
            steps: st.steps,
            cache_entries: self.caches.nd.len() as u64,
            cache_total_size: total,
            max_term_size: st.max_term_size,
        }
    }

    /// Innermost deterministic evaluation of `f(args)` with memoization.
    pub fn eval_cbv(
        &mut self,
        f: SymbolId,
        args: Vec<Term>,
        budget: &EvalBudget,
    ) -> Result<DetOutcome, SessionError> {
        self.eval_cbv_logged(f, args, budget, false)
    }

    /// As [`Session::eval_cbv`], optionally recording every executed rewrite
    /// step as an (lhs instance, rhs instance) pair.
    pub fn eval_cbv_logged(
        &mut self,
        f: SymbolId,
        args: Vec<Term>,
        budget: &EvalBudget,
        collect_steps: bool,
    ) -> Result<DetOutcome, SessionError> {
        self.check_call(f, &args)?;
        let mut st = RunState::new(*budget, collect_steps);
        for a in &args {
            let _ = st.note_size(a.size());
        }
        let result = det_call(
            &self.compiled,
            self.program,
            &mut self.caches,
            &mut st,
            f,
            args,
        );
        let stats = self.det_stats(&st);
        Ok(match result {
            Ok(v) => DetOutcome {
                value: Some(v),
                status: EvalStatus::Ok,
                stats,
                steps_log: st.steps_log,
            },
            Err(stop) => DetOutcome {
                value: None,
                status: stop.status(),
                stats,
                steps_log: st.steps_log,
            },
        })
    }

    /// Collects the set of constructor normal forms of `f(args)` under the
    /// exhaustive rule-choice semantics.
    pub fn eval_nd(
        &mut self,
        f: SymbolId,
        args: Vec<Term>,
        budget: &EvalBudget,
    ) -> Result<NdOutcome, SessionError> {
        self.check_call(f, &args)?;
        let mut st = RunState::new(*budget, false);
        for a in &args {
            let _ = st.note_size(a.size());
        }
        loop {
            st.reentered = false;
            st.round_inserted.clear();
            let result = nd_call(&self.compiled, &mut self.caches, &mut st, f, args.clone());
            match result {
                Err(stop) => {
                    // Entries computed under in-progress assumptions may be
                    // under-approximations; drop everything from this round.
                    for k in st.round_inserted.drain(..) {
                        self.caches.nd.remove(&k);
                    }
                    st.in_progress.clear();
                    let stats = self.nd_stats(&st);
                    return Ok(NdOutcome {
                        values: BTreeSet::new(),
                        complete: false,
                        status: stop.status(),
                        stats,
                    });
                }
                Ok(set) => {
                    if !st.reentered {
                        let stats = self.nd_stats(&st);
                        return Ok(NdOutcome {
                            values: (*set).clone(),
                            complete: true,
                            status: EvalStatus::Ok,
                            stats,
                        });
                    }
                    // Fixpoint iteration: compare this round's sets against
                    // the previous assumptions; stable means done.
                    let stable = st.round_inserted.iter().all(|k| {
                        matches!(
                            (self.caches.nd.get(k), st.prev_round.get(k)),
                            (Some(now), Some(before)) if now == before
                        )
                    });
                    if stable {
                        let stats = self.nd_stats(&st);
                        return Ok(NdOutcome {
                            values: (*set).clone(),
                            complete: true,
                            status: EvalStatus::Ok,
                            stats,
                        });
                    }
                    st.prev_round.clear();
                    for k in st.round_inserted.drain(..) {
                        if let Some(v) = self.caches.nd.remove(&k) {
                            st.prev_round.insert(k, v);
                        }
                    }
                }
            }
        }
    }

    /// Maximum of the non-deterministic normal-form set under the term
    /// order, i.e. the max-of-normal-forms semantics.
    pub fn nd_value(
        &mut self,
        f: SymbolId,
        args: Vec<Term>,
        budget: &EvalBudget,
    ) -> Result<NdValueOutcome, SessionError> {
        let out = self.eval_nd(f, args, budget)?;
        let ord = TermOrder::new(&self.program.signature);
        let value = if out.complete {
            ord.max(out.values.iter().cloned())
        } else {
            None
        };
        Ok(NdValueOutcome {
            value,
            complete: out.complete,
            status: out.status,
            stats: out.stats,
        })
    }

    /// Deterministic evaluation recording the tree of fully-evaluated calls
    /// related by "the callee's redex occurs in the caller's fired rule
    /// instance". Memoization is disabled so the tree shows the full call
    /// structure.
    pub fn trace_call_tree(
        &mut self,
        f: SymbolId,
        args: Vec<Term>,
        budget: &EvalBudget,
    ) -> Result<TraceOutcome, SessionError> {
        self.check_call(f, &args)?;
        let mut st = RunState::new(*budget, false);
        st.memo = false;
        let mut roots = Vec::new();
        let result = trace_call(&self.compiled, &mut st, f, args, &mut roots);
        let tree = roots.pop().expect("root call node");
        let stats = self.det_stats(&st);
        Ok(match result {
            Ok(v) => TraceOutcome {
                tree,
                value: Some(v),
                status: EvalStatus::Ok,
                stats,
            },
            Err(stop) => TraceOutcome {
                tree,
                value: None,
                status: stop.status(),
                stats,
            },
        })
    }
}

fn det_call(
    compiled: &Compiled,
    program: &Program,
    caches: &mut Caches,
    st: &mut RunState,
    f: SymbolId,
    args: Vec<Term>,
) -> Result<Term, Stop> {
    let key = CallKey {
        symbol: f,
        args: args.into_boxed_slice(),
    };
    if st.memo {
        if let Some(v) = caches.det.get(&key) {
            return Ok(v.clone());
        }
    }
    if !st.in_progress.insert(key.clone()) {
        return Err(Stop::Cycle);
    }
    let mut fired: Option<(usize, Vec<Term>)> = None;
    let mut bindings = Vec::new();
    for &ri in &compiled.by_symbol[key.symbol.index()] {
        bindings.clear();
        if match_pats(&compiled.rules[ri].lhs_pats, &key.args, &mut bindings) {
            fired = Some((ri, core::mem::take(&mut bindings)));
            break;
        }
    }
    let result = match fired {
        None => Err(Stop::Stuck),
        Some((ri, bindings)) => st.tick().and_then(|()| {
            if st.steps_log.is_some() {
                log_step(compiled, program, st, ri, &key, &bindings);
            }
            det_rhs(
                compiled,
                program,
                caches,
                st,
                &compiled.rules[ri].rhs,
                &bindings,
            )
        }),
    };
    st.in_progress.remove(&key);
    let value = result?;
    if st.memo {
        if caches.det.len() as u64 >= st.budget.max_cache_entries {
            return Err(Stop::CacheFull);
        }
        caches.det.insert(key, value.clone());
    }
    Ok(value)
}

fn log_step(
    compiled: &Compiled,
    program: &Program,
    st: &mut RunState,
    ri: usize,
    key: &CallKey,
    bindings: &[Term],
) {
    let sub: Substitution = compiled.rules[ri]
        .var_names
        .iter()
        .cloned()
        .zip(bindings.iter().cloned())
        .collect();
    let rhs_instance =
        crate::term::substitute(&program.rules[ri].rhs, &sub).expect("rule rhs variables bound");
    if let Some(log) = st.steps_log.as_mut() {
        log.push((key.to_term(), rhs_instance));
    }
}

fn det_rhs(
    compiled: &Compiled,
    program: &Program,
    caches: &mut Caches,
    st: &mut RunState,
    rhs: &Rhs,
    bindings: &[Term],
) -> Result<Term, Stop> {
    match rhs {
        Rhs::Var(i) => Ok(bindings[*i].clone()),
        Rhs::Ctor(c, parts) => {
            let mut args = Vec::with_capacity(parts.len());
            for p in parts {
                args.push(det_rhs(compiled, program, caches, st, p, bindings)?);
            }
            let t = Term::app(*c, args);
            st.note_size(t.size())?;
            Ok(t)
        }
        Rhs::Call(g, parts) => {
            let mut args = Vec::with_capacity(parts.len());
            for p in parts {
                args.push(det_rhs(compiled, program, caches, st, p, bindings)?);
            }
            det_call(compiled, program, caches, st, *g, args)
        }
    }
}

fn nd_call(
    compiled: &Compiled,
    caches: &mut Caches,
    st: &mut RunState,
    f: SymbolId,
    args: Vec<Term>,
) -> Result<Arc<ValueSet>, Stop> {
    let key = CallKey {
        symbol: f,
        args: args.into_boxed_slice(),
    };
    if st.memo {
        if let Some(s) = caches.nd.get(&key) {
            return Ok(s.clone());
        }
    }
    if st.in_progress.contains(&key) {
        st.reentered = true;
        return Ok(st
            .prev_round
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Arc::new(ValueSet::new())));
    }
    st.in_progress.insert(key.clone());
    let mut out = ValueSet::new();
    let mut result = Ok(());
    let mut bindings = Vec::new();
    for &ri in &compiled.by_symbol[key.symbol.index()] {
        bindings.clear();
        if match_pats(&compiled.rules[ri].lhs_pats, &key.args, &mut bindings) {
            if let Err(stop) = st.tick() {
                result = Err(stop);
                break;
            }
            let taken = core::mem::take(&mut bindings);
            if let Err(stop) = nd_rhs(
                compiled,
                caches,
                st,
                &compiled.rules[ri].rhs,
                &taken,
                &mut out,
            ) {
                result = Err(stop);
                break;
            }
        }
    }
    st.in_progress.remove(&key);
    result?;
    let set = Arc::new(out);
    if st.memo {
        if caches.nd.len() as u64 >= st.budget.max_cache_entries {
            return Err(Stop::CacheFull);
        }
        caches.nd.insert(key.clone(), set.clone());
        st.round_inserted.push(key);
    }
    Ok(set)
}

fn nd_rhs(
    compiled: &Compiled,
    caches: &mut Caches,
    st: &mut RunState,
    rhs: &Rhs,
    bindings: &[Term],
    out: &mut ValueSet,
) -> Result<(), Stop> {
    match rhs {
        Rhs::Var(i) => {
            out.insert(bindings[*i].clone());
            Ok(())
        }
        Rhs::Ctor(c, parts) => {
            let arg_sets = parts
                .iter()
                .map(|p| {
                    let mut s = ValueSet::new();
                    nd_rhs(compiled, caches, st, p, bindings, &mut s).map(|()| s)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut combo = Vec::with_capacity(arg_sets.len());
            cartesian(compiled, caches, st, *c, &arg_sets, &mut combo, out, true)
        }
        Rhs::Call(g, parts) => {
            let arg_sets = parts
                .iter()
                .map(|p| {
                    let mut s = ValueSet::new();
                    nd_rhs(compiled, caches, st, p, bindings, &mut s).map(|()| s)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut combo = Vec::with_capacity(arg_sets.len());
            cartesian(compiled, caches, st, *g, &arg_sets, &mut combo, out, false)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cartesian(
    compiled: &Compiled,
    caches: &mut Caches,
    st: &mut RunState,
    sym: SymbolId,
    arg_sets: &[ValueSet],
    combo: &mut Vec<Term>,
    out: &mut ValueSet,
    is_ctor: bool,
) -> Result<(), Stop> {
    if combo.len() == arg_sets.len() {
        if is_ctor {
            let t = Term::app(sym, combo.clone());
            st.note_size(t.size())?;
            out.insert(t);
        } else {
            let results = nd_call(compiled, caches, st, sym, combo.clone())?;
            out.extend(results.iter().cloned());
        }
        return Ok(());
    }
    let idx = combo.len();
    for t in &arg_sets[idx] {
        combo.push(t.clone());
        cartesian(compiled, caches, st, sym, arg_sets, combo, out, is_ctor)?;
        combo.pop();
    }
    Ok(())
}

fn trace_call(
    compiled: &Compiled,
    st: &mut RunState,
    f: SymbolId,
    args: Vec<Term>,
    siblings: &mut Vec<CallTree>,
) -> Result<Term, Stop> {
    let key = CallKey {
        symbol: f,
        args: args.clone().into_boxed_slice(),
    };
    let mut node = CallTree {
        symbol: f,
        args,
        value: None,
        children: Vec::new(),
    };
    if !st.in_progress.insert(key.clone()) {
        siblings.push(node);
        return Err(Stop::Cycle);
    }
    let mut fired: Option<(usize, Vec<Term>)> = None;
    let mut bindings = Vec::new();
    for &ri in &compiled.by_symbol[key.symbol.index()] {
        bindings.clear();
        if match_pats(&compiled.rules[ri].lhs_pats, &key.args, &mut bindings) {
            fired = Some((ri, core::mem::take(&mut bindings)));
            break;
        }
    }
    let result = match fired {
        None => Err(Stop::Stuck),
        Some((ri, bindings)) => st.tick().and_then(|()| {
            trace_rhs(
                compiled,
                st,
                &compiled.rules[ri].rhs,
                &bindings,
                &mut node.children,
            )
        }),
    };
    st.in_progress.remove(&key);
    if let Ok(v) = &result {
        node.value = Some(v.clone());
    }
    siblings.push(node);
    result
}

fn trace_rhs(
    compiled: &Compiled,
    st: &mut RunState,
    rhs: &Rhs,
    bindings: &[Term],
    children: &mut Vec<CallTree>,
) -> Result<Term, Stop> {
    match rhs {
        Rhs::Var(i) => Ok(bindings[*i].clone()),
        Rhs::Ctor(c, parts) => {
            let mut args = Vec::with_capacity(parts.len());
            for p in parts {
                args.push(trace_rhs(compiled, st, p, bindings, children)?);
            }
            let t = Term::app(*c, args);
            st.note_size(t.size())?;
            Ok(t)
        }
        Rhs::Call(g, parts) => {
            let mut args = Vec::with_capacity(parts.len());
            for p in parts {
                args.push(trace_rhs(compiled, st, p, bindings, children)?);
            }
            trace_call(compiled, st, *g, args, children)
        }
    }
}

/// One-shot deterministic evaluation with a fresh session.
pub fn eval_cbv(
    p: &Program,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<DetOutcome, SessionError> {
    Session::new(p)?.eval_cbv(f, args, budget)
}

/// One-shot non-deterministic evaluation with a fresh session.
pub fn eval_nd(
    p: &Program,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<NdOutcome, SessionError> {
    Session::new(p)?.eval_nd(f, args, budget)
}

/// One-shot max-of-normal-forms evaluation with a fresh session.
pub fn nd_value(
    p: &Program,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<NdValueOutcome, SessionError> {
    Session::new(p)?.nd_value(f, args, budget)
}

/// One-shot call-tree trace with a fresh session.
pub fn trace_call_tree(
    p: &Program,
    f: SymbolId,
    args: Vec<Term>,
    budget: &EvalBudget,
) -> Result<TraceOutcome, SessionError> {
    Session::new(p)?.trace_call_tree(f, args, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Mode, Rule, SignatureBuilder};

    /// f(zero) -> nil; f(s(n)) -> cons(n, f(n)): the first-n-integers list.
    fn firstn() -> Program {
        let mut b = SignatureBuilder::new();
        let zero = b.constructor("zero", 0).unwrap();
        let s = b.constructor("s", 1).unwrap();
        let nil = b.constructor("nil", 0).unwrap();
        let cons = b.constructor("cons", 2).unwrap();
        let f = b.function("f", 1).unwrap();
        let sig = b.finish();
        let rules = vec![
            Rule {
                lhs: Term::app(f, vec![Term::constant(zero)]),
                rhs: Term::constant(nil),
            },
            Rule {
                lhs: Term::app(f, vec![Term::app(s, vec![Term::var("n")])]),
                rhs: Term::app(
                    cons,
                    vec![Term::var("n"), Term::app(f, vec![Term::var("n")])],
                ),
            },
        ];
        Program::new(sig, rules, f, Mode::Confluent)
    }

    fn num(p: &Program, n: u32) -> Term {
        let zero = p.signature.lookup("zero").unwrap();
        let s = p.signature.lookup("s").unwrap();
        let mut t = Term::constant(zero);
        for _ in 0..n {
            t = Term::app(s, vec![t]);
        }
        t
    }

    #[test]
    fn firstn_builds_the_descending_list() {
        let p = firstn();
        let f = p.main;
        let out = eval_cbv(&p, f, vec![num(&p, 2)], &EvalBudget::default()).unwrap();
        let cons = p.signature.lookup("cons").unwrap();
        let nil = p.signature.lookup("nil").unwrap();
        let expected = Term::app(
            cons,
            vec![
                num(&p, 1),
                Term::app(cons, vec![num(&p, 0), Term::constant(nil)]),
            ],
        );
        assert_eq!(out.value, Some(expected));
        assert_eq!(out.status, EvalStatus::Ok);
    }

    #[test]
    fn memoization_does_not_change_results() {
        let p = firstn();
        let f = p.main;
        let with = eval_cbv(&p, f, vec![num(&p, 6)], &EvalBudget::default()).unwrap();
        let without = eval_cbv(
            &p,
            f,
            vec![num(&p, 6)],
            &EvalBudget {
                max_cache_entries: 0,
                ..EvalBudget::default()
            },
        )
        .unwrap();
        assert_eq!(with.value, without.value);
        assert_eq!(without.stats.cache_entries, 0);
        assert!(with.stats.cache_entries > 0);
    }

    #[test]
    fn zero_step_budget_exhausts() {
        let p = firstn();
        let out = eval_cbv(
            &p,
            p.main,
            vec![num(&p, 2)],
            &EvalBudget {
                max_steps: 0,
                ..EvalBudget::default()
            },
        )
        .unwrap();
        assert_eq!(out.status, EvalStatus::OutOfSteps);
        assert_eq!(out.value, None);
    }

    #[test]
    fn term_size_budget_stops_construction() {
        let p = firstn();
        let out = eval_cbv(
            &p,
            p.main,
            vec![num(&p, 6)],
            &EvalBudget {
                max_term_size: 5,
                ..EvalBudget::default()
            },
        )
        .unwrap();
        assert_eq!(out.status, EvalStatus::TermTooLarge);
    }

    #[test]
    fn cache_budget_stops_memoization() {
        let p = firstn();
        let out = eval_cbv(
            &p,
            p.main,
            vec![num(&p, 6)],
            &EvalBudget {
                max_cache_entries: 2,
                ..EvalBudget::default()
            },
        )
        .unwrap();
        assert_eq!(out.status, EvalStatus::CacheFull);
    }

    #[test]
    fn stuck_call_is_distinguished() {
        // Single rule g(s(n)) -> n leaves g(zero) without a redex.
        let mut b = SignatureBuilder::new();
        let zero = b.constructor("zero", 0).unwrap();
        let s = b.constructor("s", 1).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let rules = vec![Rule {
            lhs: Term::app(g, vec![Term::app(s, vec![Term::var("n")])]),
            rhs: Term::var("n"),
        }];
        let p = Program::new(sig, rules, g, Mode::Confluent);
        let out = eval_cbv(&p, g, vec![Term::constant(zero)], &EvalBudget::default()).unwrap();
        assert_eq!(out.status, EvalStatus::Stuck);
    }

    #[test]
    fn self_loop_is_detected_as_cycle() {
        let mut b = SignatureBuilder::new();
        let c = b.constructor("c", 0).unwrap();
        let looper = b.function("looper", 1).unwrap();
        let sig = b.finish();
        let rules = vec![Rule {
            lhs: Term::app(looper, vec![Term::var("x")]),
            rhs: Term::app(looper, vec![Term::var("x")]),
        }];
        let p = Program::new(sig, rules, looper, Mode::Confluent);
        let out = eval_cbv(&p, looper, vec![Term::constant(c)], &EvalBudget::default()).unwrap();
        assert_eq!(out.status, EvalStatus::Cycle);
    }

    /// choice(x) -> tt | ff, with ff declared before tt.
    fn choice_program() -> Program {
        let mut b = SignatureBuilder::new();
        let _eps = b.constructor("eps", 0).unwrap();
        let ff = b.constructor("ff", 0).unwrap();
        let tt = b.constructor("tt", 0).unwrap();
        let g = b.function("choice", 1).unwrap();
        let sig = b.finish();
        let rules = vec![
            Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: Term::constant(tt),
            },
            Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: Term::constant(ff),
            },
        ];
        Program::new(sig, rules, g, Mode::Nondeterministic)
    }

    #[test]
    fn nd_collects_all_normal_forms_and_takes_the_max() {
        let p = choice_program();
        let eps = p.signature.lookup("eps").unwrap();
        let out = eval_nd(
            &p,
            p.main,
            vec![Term::constant(eps)],
            &EvalBudget::default(),
        )
        .unwrap();
        assert!(out.complete);
        assert_eq!(out.values.len(), 2);
        let max = nd_value(
            &p,
            p.main,
            vec![Term::constant(eps)],
            &EvalBudget::default(),
        )
        .unwrap()
        .value
        .unwrap();
        assert_eq!(max, Term::constant(p.signature.lookup("tt").unwrap()));
    }

    #[test]
    fn nd_on_deterministic_program_is_a_singleton() {
        let p = firstn();
        let out = eval_nd(&p, p.main, vec![num(&p, 3)], &EvalBudget::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.values.len(), 1);
        let det = eval_cbv(&p, p.main, vec![num(&p, 3)], &EvalBudget::default()).unwrap();
        assert_eq!(out.values.iter().next(), det.value.as_ref());
    }

    #[test]
    fn nd_reruns_identically() {
        let p = choice_program();
        let eps = p.signature.lookup("eps").unwrap();
        let a = eval_nd(
            &p,
            p.main,
            vec![Term::constant(eps)],
            &EvalBudget::default(),
        )
        .unwrap();
        let b = eval_nd(
            &p,
            p.main,
            vec![Term::constant(eps)],
            &EvalBudget::default(),
        )
        .unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn nd_recursive_revisit_reaches_the_fixpoint() {
        // g(x) -> g(x) | tt: the looping branch contributes nothing.
        let mut b = SignatureBuilder::new();
        let c = b.constructor("c", 0).unwrap();
        let tt = b.constructor("tt", 0).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let rules = vec![
            Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: Term::app(g, vec![Term::var("x")]),
            },
            Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: Term::constant(tt),
            },
        ];
        let p = Program::new(sig, rules, g, Mode::Nondeterministic);
        let out = eval_nd(&p, g, vec![Term::constant(c)], &EvalBudget::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.values.len(), 1);
        assert!(out.values.contains(&Term::constant(tt)));
    }

    #[test]
    fn nd_mutual_recursion_reaches_the_fixpoint() {
        // g(x) -> h(x); h(x) -> g(x) | tt: the cycle contributes nothing
        // beyond the reachable constant.
        let mut b = SignatureBuilder::new();
        let c = b.constructor("c", 0).unwrap();
        let tt = b.constructor("tt", 0).unwrap();
        let g = b.function("g", 1).unwrap();
        let h = b.function("h", 1).unwrap();
        let sig = b.finish();
        let rules = vec![
            Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: Term::app(h, vec![Term::var("x")]),
            },
            Rule {
                lhs: Term::app(h, vec![Term::var("x")]),
                rhs: Term::app(g, vec![Term::var("x")]),
            },
            Rule {
                lhs: Term::app(h, vec![Term::var("x")]),
                rhs: Term::constant(tt),
            },
        ];
        let p = Program::new(sig, rules, g, Mode::Nondeterministic);
        let out = eval_nd(&p, g, vec![Term::constant(c)], &EvalBudget::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.values.len(), 1);
        assert!(out.values.contains(&Term::constant(tt)));
    }

    #[test]
    fn interrupted_nd_run_does_not_poison_the_session_cache() {
        let p = choice_program();
        let eps = p.signature.lookup("eps").unwrap();
        let mut session = Session::new(&p).unwrap();
        let starved = session
            .eval_nd(
                p.main,
                vec![Term::constant(eps)],
                &EvalBudget {
                    max_steps: 0,
                    ..EvalBudget::default()
                },
            )
            .unwrap();
        assert!(!starved.complete);
        let full = session
            .eval_nd(p.main, vec![Term::constant(eps)], &EvalBudget::default())
            .unwrap();
        assert!(full.complete);
        assert_eq!(full.values.len(), 2);
    }

    #[test]
    fn trace_firstn_is_a_chain() {
        let p = firstn();
        let out = trace_call_tree(&p, p.main, vec![num(&p, 1)], &EvalBudget::default()).unwrap();
        // (f, s(zero)) with single child (f, zero)
        assert_eq!(out.tree.symbol, p.main);
        assert_eq!(out.tree.children.len(), 1);
        assert_eq!(out.tree.children[0].symbol, p.main);
        assert_eq!(out.tree.children[0].args, vec![num(&p, 0)]);
        assert!(out.tree.children[0].children.is_empty());
        assert_eq!(out.tree.node_count(), 2);
    }

    #[test]
    fn steps_log_records_rule_instances() {
        let p = firstn();
        let mut session = Session::new(&p).unwrap();
        let out = session
            .eval_cbv_logged(p.main, vec![num(&p, 1)], &EvalBudget::default(), true)
            .unwrap();
        let log = out.steps_log.unwrap();
        assert_eq!(log.len(), 2);
        // First step: f(s(zero)) -> cons(zero, f(zero))
        let f = p.main;
        assert_eq!(log[0].0, Term::app(f, vec![num(&p, 1)]));
    }

    #[test]
    fn call_arguments_are_validated() {
        let p = firstn();
        let err = eval_cbv(
            &p,
            p.main,
            vec![Term::app(p.main, vec![num(&p, 0)])],
            &EvalBudget::default(),
        );
        assert!(matches!(err, Err(SessionError::NonConstructorArgument(_))));
        let err = eval_cbv(&p, p.main, vec![], &EvalBudget::default());
        assert!(matches!(err, Err(SessionError::ArityMismatch { .. })));
    }
}
