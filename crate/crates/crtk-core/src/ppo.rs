//! Product Path Ordering: comparison, per-rule orientation checking, and
//! precedence synthesis by backtracking search.
//!
//! The ordering is the recursive path ordering whose equal-precedence case
//! compares argument tuples with the product (componentwise) extension. Four
//! inference rules apply:
//!
//! 1. subterm: `s = t_i` or `s < t_i` gives `s < f(.., t_i, ..)`;
//! 2. constructor-left: `c(s..) < f(t..)` for a constructor `c` and function
//!    `f` when every `s_i < f(t..)`;
//! 3. precedence: `g(s..) < f(t..)` when `g` is strictly below `f` and every
//!    `s_i < f(t..)`;
//! 4. equivalent heads: `g(s..) < f(t..)` when `g ~ f`, the argument tuples
//!    compare in the strict product extension, and every `s_i < f(t..)`.
//!
//! Constructors are never ordered by the precedence; rules 1 and 2 cover
//! them. Symbols related by `~` must have equal arity.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::fxhash::FxHashMap;
use crate::program::{Program, Signature, SymbolId, SymbolKind};
use crate::term::Term;

/// A quasi-precedence (preorder) on function symbols: a strict part plus an
/// equivalence, transitively closed and acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precedence {
    state: PrecState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrecedenceError {
    NotAFunction(String),
    /// Equivalent symbols must share one arity.
    ArityMismatch(String, String),
    /// The requested constraints contain a strict cycle.
    Inconsistent(String, String),
}

impl core::fmt::Display for PrecedenceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PrecedenceError::NotAFunction(n) => {
                write!(
                    f,
                    "`{n}` is not a function symbol; only functions are ordered"
                )
            }
            PrecedenceError::ArityMismatch(a, b) => {
                write!(f, "`{a}` and `{b}` cannot be equivalent: arities differ")
            }
            PrecedenceError::Inconsistent(a, b) => {
                write!(
                    f,
                    "constraint on `{a}` and `{b}` contradicts earlier constraints"
                )
            }
        }
    }
}

impl core::error::Error for PrecedenceError {}

impl Precedence {
    /// Empty precedence: no symbol strictly above another, equivalence is
    /// syntactic equality.
    pub fn empty(sig: &Signature) -> Precedence {
        Precedence {
            state: PrecState::new(sig),
        }
    }

    /// Builds from `above > below` strict pairs and `a = b` equivalences,
    /// closing transitively. Fails on cycles, non-function symbols, and
    /// equivalences between distinct arities.
    pub fn from_constraints(
        sig: &Signature,
        strict_above_below: &[(SymbolId, SymbolId)],
        equiv: &[(SymbolId, SymbolId)],
    ) -> Result<Precedence, PrecedenceError> {
        let mut st = PrecState::new(sig);
        let check_fn = |id: SymbolId| -> Result<(), PrecedenceError> {
            if sig.sym(id).kind != SymbolKind::Function {
                Err(PrecedenceError::NotAFunction(String::from(sig.name(id))))
            } else {
                Ok(())
            }
        };
        for (a, b) in equiv {
            check_fn(*a)?;
            check_fn(*b)?;
            if sig.sym(*a).arity != sig.sym(*b).arity {
                return Err(PrecedenceError::ArityMismatch(
                    String::from(sig.name(*a)),
                    String::from(sig.name(*b)),
                ));
            }
            if !st.assert_equiv(a.index(), b.index()) {
                return Err(PrecedenceError::Inconsistent(
                    String::from(sig.name(*a)),
                    String::from(sig.name(*b)),
                ));
            }
        }
        for (above, below) in strict_above_below {
            check_fn(*above)?;
            check_fn(*below)?;
            if !st.assert_lt(below.index(), above.index()) {
                return Err(PrecedenceError::Inconsistent(
                    String::from(sig.name(*above)),
                    String::from(sig.name(*below)),
                ));
            }
        }
        Ok(Precedence { state: st })
    }

    /// `g` strictly below `f`.
    pub fn lt(&self, g: SymbolId, f: SymbolId) -> bool {
        self.state.lt(g.index(), f.index())
    }

    /// `g` equivalent to `f` (reflexive).
    pub fn equiv(&self, g: SymbolId, f: SymbolId) -> bool {
        self.state.equiv(g.index(), f.index())
    }

    /// All strict pairs `(above, below)` between function symbols, in id
    /// order. The listing is transitively closed.
    pub fn strict_pairs(&self, sig: &Signature) -> Vec<(SymbolId, SymbolId)> {
        let mut out = Vec::new();
        for a in sig.functions() {
            for b in sig.functions() {
                if self.lt(b, a) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// All equivalences `(a, b)` with `a` before `b` in id order.
    pub fn equiv_pairs(&self, sig: &Signature) -> Vec<(SymbolId, SymbolId)> {
        let mut out = Vec::new();
        for a in sig.functions() {
            for b in sig.functions() {
                if a < b && self.equiv(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Union-find over symbol indices plus a transitively closed strict matrix
/// between class representatives.
#[derive(Clone, Debug)]
struct PrecState {
    n: usize,
    parent: Vec<usize>,
    strict: Vec<bool>,
    arities: Arc<Vec<u32>>,
}

impl PartialEq for PrecState {
    fn eq(&self, other: &PrecState) -> bool {
        self.canonical_key() == other.canonical_key()
    }
}

impl Eq for PrecState {}

impl PrecState {
    fn new(sig: &Signature) -> PrecState {
        let n = sig.len();
        PrecState {
            n,
            parent: (0..n).collect(),
            strict: vec![false; n * n],
            arities: Arc::new(sig.ids().map(|id| sig.sym(id).arity).collect()),
        }
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn lt(&self, a: usize, b: usize) -> bool {
        self.strict[self.find(a) * self.n + self.find(b)]
    }

    fn equiv(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Adds `a < b`; returns false if this contradicts the current state.
    fn assert_lt(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb || self.strict[rb * self.n + ra] {
            return false;
        }
        if self.strict[ra * self.n + rb] {
            return true;
        }
        // close transitively: everything <= ra goes below everything >= rb
        let below: Vec<usize> = (0..self.n)
            .filter(|&x| x == ra || self.strict[x * self.n + ra])
            .collect();
        let above: Vec<usize> = (0..self.n)
            .filter(|&y| y == rb || self.strict[rb * self.n + y])
            .collect();
        for &x in &below {
            for &y in &above {
                if x == y {
                    return false;
                }
                self.strict[x * self.n + y] = true;
            }
        }
        true
    }

    /// Merges the classes of `a` and `b`; returns false on contradiction
    /// (a strict relation between them, or differing arities).
    fn assert_equiv(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return true;
        }
        if self.arities[ra] != self.arities[rb] {
            return false;
        }
        if self.strict[ra * self.n + rb] || self.strict[rb * self.n + ra] {
            return false;
        }
        self.parent[rb] = ra;
        // merge rb's relations into ra and re-close
        for x in 0..self.n {
            if self.strict[x * self.n + rb] {
                self.strict[x * self.n + ra] = true;
            }
            if self.strict[rb * self.n + x] {
                self.strict[ra * self.n + x] = true;
            }
        }
        for k in 0..self.n {
            for i in 0..self.n {
                if self.strict[i * self.n + k] {
                    for j in 0..self.n {
                        if self.strict[k * self.n + j] {
                            self.strict[i * self.n + j] = true;
                        }
                    }
                }
            }
        }
        // a cycle through the merged class means inconsistency
        for i in 0..self.n {
            if self.strict[i * self.n + i] {
                return false;
            }
        }
        true
    }

    /// Canonical byte key for deduplicating search states.
    fn canonical_key(&self) -> Vec<u8> {
        let mut rep_min = vec![usize::MAX; self.n];
        for i in 0..self.n {
            let r = self.find(i);
            if i < rep_min[r] {
                rep_min[r] = i;
            }
        }
        let mut key = Vec::with_capacity(self.n + self.n * self.n);
        for i in 0..self.n {
            key.push(rep_min[self.find(i)] as u8);
        }
        for a in 0..self.n {
            for b in 0..self.n {
                key.push(u8::from(self.lt(a, b)));
            }
        }
        key
    }
}

/// The product extension: `ss` strictly below `ts` iff every component is
/// below-or-equal and some component is strictly below. Both sequences must
/// have the same length.
pub fn product_lt<F: FnMut(&Term, &Term) -> bool>(
    ss: &[Term],
    ts: &[Term],
    mut strictly_less: F,
) -> bool {
    assert_eq!(ss.len(), ts.len(), "product extension needs equal lengths");
    let mut some_strict = false;
    for (s, t) in ss.iter().zip(ts) {
        if s == t {
            continue;
        }
        if strictly_less(s, t) {
            some_strict = true;
        } else {
            return false;
        }
    }
    some_strict
}

/// How one argument position compared inside an equivalent-heads step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgCmp {
    Equal,
    Strict(Witness),
}

/// A derivation tree recording which inference justified each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `s` equals the `pos`-th argument of the right-hand term.
    SubtermEqual { pos: usize },
    /// `s` is below the `pos`-th argument.
    SubtermBelow { pos: usize, inner: Box<Witness> },
    /// Constructor-rooted left side; one witness per argument of `s`.
    ConstructorLeft { args: Vec<Witness> },
    /// Head strictly below the right head; one witness per argument of `s`.
    HeadBelow { args: Vec<Witness> },
    /// Equivalent heads with a strict product comparison plus the
    /// per-argument subterm premises.
    EquivProduct {
        product: Vec<ArgCmp>,
        args: Vec<Witness>,
    },
}

struct Checker<'a> {
    sig: &'a Signature,
    prec: &'a Precedence,
    memo: FxHashMap<(Term, Term), Option<Witness>>,
}

impl<'a> Checker<'a> {
    fn new(sig: &'a Signature, prec: &'a Precedence) -> Checker<'a> {
        Checker {
            sig,
            prec,
            memo: FxHashMap::default(),
        }
    }

    fn prove(&mut self, s: &Term, t: &Term) -> Option<Witness> {
        let key = (s.clone(), t.clone());
        if let Some(cached) = self.memo.get(&key) {
            return cached.clone();
        }
        let result = self.prove_uncached(s, t);
        self.memo.insert(key, result.clone());
        result
    }

    fn prove_uncached(&mut self, s: &Term, t: &Term) -> Option<Witness> {
        let (f, ts) = t.as_app()?;
        // subterm rule, any right head
        for (pos, ti) in ts.iter().enumerate() {
            if s == ti {
                return Some(Witness::SubtermEqual { pos });
            }
            if let Some(inner) = self.prove(s, ti) {
                return Some(Witness::SubtermBelow {
                    pos,
                    inner: Box::new(inner),
                });
            }
        }
        let (g, ss) = s.as_app()?;
        if self.sig.sym(f).kind != SymbolKind::Function {
            return None;
        }
        match self.sig.sym(g).kind {
            SymbolKind::Constructor => {
                let args = ss
                    .iter()
                    .map(|si| self.prove(si, t))
                    .collect::<Option<Vec<_>>>()?;
                Some(Witness::ConstructorLeft { args })
            }
            SymbolKind::Function => {
                if self.prec.lt(g, f) {
                    if let Some(args) = ss
                        .iter()
                        .map(|si| self.prove(si, t))
                        .collect::<Option<Vec<_>>>()
                    {
                        return Some(Witness::HeadBelow { args });
                    }
                }
                if self.prec.equiv(g, f) && ss.len() == ts.len() {
                    let mut product = Vec::with_capacity(ss.len());
                    let mut some_strict = false;
                    for (si, ti) in ss.iter().zip(ts) {
                        if si == ti {
                            product.push(ArgCmp::Equal);
                        } else {
                            let w = self.prove(si, ti)?;
                            some_strict = true;
                            product.push(ArgCmp::Strict(w));
                        }
                    }
                    if !some_strict {
                        return None;
                    }
                    let args = ss
                        .iter()
                        .map(|si| self.prove(si, t))
                        .collect::<Option<Vec<_>>>()?;
                    return Some(Witness::EquivProduct { product, args });
                }
                None
            }
        }
    }
}

/// Strict product-path-ordering comparison under a fixed precedence,
/// returning the derivation when `s` is strictly below `t`.
pub fn ppo_lt(sig: &Signature, prec: &Precedence, s: &Term, t: &Term) -> Option<Witness> {
    Checker::new(sig, prec).prove(s, t)
}

/// Replays a witness against the inference rules without any search. Used to
/// validate derivations independently of the prover.
pub fn replay_witness(sig: &Signature, prec: &Precedence, s: &Term, t: &Term, w: &Witness) -> bool {
    match w {
        Witness::SubtermEqual { pos } => t.args().get(*pos).is_some_and(|ti| s == ti),
        Witness::SubtermBelow { pos, inner } => t
            .args()
            .get(*pos)
            .is_some_and(|ti| replay_witness(sig, prec, s, ti, inner)),
        Witness::ConstructorLeft { args } => {
            let Some((g, ss)) = s.as_app() else {
                return false;
            };
            let Some((f, _)) = t.as_app() else {
                return false;
            };
            sig.sym(g).kind == SymbolKind::Constructor
                && sig.sym(f).kind == SymbolKind::Function
                && ss.len() == args.len()
                && ss
                    .iter()
                    .zip(args)
                    .all(|(si, wi)| replay_witness(sig, prec, si, t, wi))
        }
        Witness::HeadBelow { args } => {
            let Some((g, ss)) = s.as_app() else {
                return false;
            };
            let Some((f, _)) = t.as_app() else {
                return false;
            };
            sig.sym(g).kind == SymbolKind::Function
                && sig.sym(f).kind == SymbolKind::Function
                && prec.lt(g, f)
                && ss.len() == args.len()
                && ss
                    .iter()
                    .zip(args)
                    .all(|(si, wi)| replay_witness(sig, prec, si, t, wi))
        }
        Witness::EquivProduct { product, args } => {
            let Some((g, ss)) = s.as_app() else {
                return false;
            };
            let Some((f, ts)) = t.as_app() else {
                return false;
            };
            if sig.sym(g).kind != SymbolKind::Function
                || sig.sym(f).kind != SymbolKind::Function
                || !prec.equiv(g, f)
                || ss.len() != ts.len()
                || product.len() != ss.len()
                || args.len() != ss.len()
            {
                return false;
            }
            let mut some_strict = false;
            for ((si, ti), cmp) in ss.iter().zip(ts).zip(product) {
                match cmp {
                    ArgCmp::Equal => {
                        if si != ti {
                            return false;
                        }
                    }
                    ArgCmp::Strict(wi) => {
                        if !replay_witness(sig, prec, si, ti, wi) {
                            return false;
                        }
                        some_strict = true;
                    }
                }
            }
            some_strict
                && ss
                    .iter()
                    .zip(args)
                    .all(|(si, wi)| replay_witness(sig, prec, si, t, wi))
        }
    }
}

#[derive(Clone, Debug)]
pub struct RuleOrientation {
    pub rule_index: usize,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct PpoReport {
    pub per_rule: Vec<RuleOrientation>,
}

impl PpoReport {
    pub fn all_oriented(&self) -> bool {
        self.per_rule.iter().all(|r| r.witness.is_some())
    }

    pub fn failing_rules(&self) -> Vec<usize> {
        self.per_rule
            .iter()
            .filter(|r| r.witness.is_none())
            .map(|r| r.rule_index)
            .collect()
    }
}

/// Checks `rhs < lhs` for every rule under the given precedence.
pub fn check_ppo(p: &Program, prec: &Precedence) -> PpoReport {
    let mut checker = Checker::new(&p.signature, prec);
    let per_rule = p
        .rules
        .iter()
        .enumerate()
        .map(|(i, rule)| RuleOrientation {
            rule_index: i,
            witness: checker.prove(&rule.rhs, &rule.lhs),
        })
        .collect();
    PpoReport { per_rule }
}

/// Result of the precedence search. `Exhausted` is reported only when the
/// node budget interrupted the search, so `ProvenNone` really means no
/// precedence orients the program.
#[derive(Clone, Debug)]
pub enum Synthesis {
    Found(Precedence),
    ProvenNone,
    Exhausted,
}

struct Search {
    nodes: u64,
    limit: u64,
    exhausted: bool,
}

impl Search {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.exhausted = true;
            false
        } else {
            true
        }
    }
}

fn dedup_states(states: Vec<PrecState>) -> Vec<PrecState> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for st in states {
        if seen.insert(st.canonical_key()) {
            out.push(st);
        }
    }
    out
}

fn dedup_flagged(states: Vec<(PrecState, bool)>) -> Vec<(PrecState, bool)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (st, flag) in states {
        let mut key = st.canonical_key();
        key.push(u8::from(flag));
        if seen.insert(key) {
            out.push((st, flag));
        }
    }
    out
}

/// All extensions of `st` under which `s < t` holds.
fn search_lt(
    sig: &Signature,
    search: &mut Search,
    st: &PrecState,
    s: &Term,
    t: &Term,
) -> Vec<PrecState> {
    if !search.tick() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let Some((f, ts)) = t.as_app() else {
        return out;
    };
    for ti in ts {
        if s == ti {
            out.push(st.clone());
        } else {
            out.extend(search_lt(sig, search, st, s, ti));
        }
    }
    if let Some((g, ss)) = s.as_app() {
        if sig.sym(f).kind == SymbolKind::Function {
            match sig.sym(g).kind {
                SymbolKind::Constructor => {
                    out.extend(search_conj(sig, search, st, ss, t));
                }
                SymbolKind::Function => {
                    // strict head
                    let mut st2 = st.clone();
                    if st2.assert_lt(g.index(), f.index()) {
                        out.extend(search_conj(sig, search, &st2, ss, t));
                    }
                    // equivalent heads with product comparison
                    if ss.len() == ts.len() {
                        let mut st3 = st.clone();
                        if st3.assert_equiv(g.index(), f.index()) {
                            let mut acc: Vec<(PrecState, bool)> = vec![(st3, false)];
                            for (si, ti) in ss.iter().zip(ts) {
                                let mut next = Vec::new();
                                for (state, any_strict) in &acc {
                                    if si == ti {
                                        next.push((state.clone(), *any_strict));
                                    }
                                    for ext in search_lt(sig, search, state, si, ti) {
                                        next.push((ext, true));
                                    }
                                }
                                acc = dedup_flagged(next);
                                if acc.is_empty() {
                                    break;
                                }
                            }
                            for (state, any_strict) in acc {
                                if any_strict {
                                    out.extend(search_conj(sig, search, &state, ss, t));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    dedup_states(out)
}

/// All extensions under which every `s_i < t`.
fn search_conj(
    sig: &Signature,
    search: &mut Search,
    st: &PrecState,
    ss: &[Term],
    t: &Term,
) -> Vec<PrecState> {
    let mut acc = vec![st.clone()];
    for si in ss {
        let mut next = Vec::new();
        for state in &acc {
            next.extend(search_lt(sig, search, state, si, t));
        }
        acc = dedup_states(next);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Searches for a precedence making every rule orient, seeding the search
/// with the program's composition hints. Rules are processed by increasing
/// rhs size so small conflicts prune early.
pub fn synthesize_precedence(p: &Program, node_limit: u64) -> Synthesis {
    let sig = &p.signature;
    let mut seed = PrecState::new(sig);
    for (above, below) in &p.precedence_hints {
        if !seed.assert_lt(below.index(), above.index()) {
            return Synthesis::ProvenNone;
        }
    }
    let mut order: Vec<usize> = (0..p.rules.len()).collect();
    order.sort_by_key(|&i| p.rules[i].rhs.size());
    let mut search = Search {
        nodes: 0,
        limit: node_limit,
        exhausted: false,
    };
    let mut states = vec![seed];
    for &ri in &order {
        let rule = &p.rules[ri];
        let mut next = Vec::new();
        for st in &states {
            next.extend(search_lt(sig, &mut search, st, &rule.rhs, &rule.lhs));
        }
        states = dedup_states(next);
        if states.is_empty() {
            return if search.exhausted {
                Synthesis::Exhausted
            } else {
                Synthesis::ProvenNone
            };
        }
    }
    let state = states.swap_remove(0);
    let prec = Precedence { state };
    // closed loop: the synthesized precedence must satisfy the checker
    debug_assert!(check_ppo(p, &prec).all_oriented());
    Synthesis::Found(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Mode, Rule, SignatureBuilder};

    fn half_program() -> Program {
        let mut b = SignatureBuilder::new();
        b.constructor("zero", 0).unwrap();
        let s = b.constructor("s", 1).unwrap();
        let half = b.function("half", 1).unwrap();
        let sig = b.finish();
        let rules = vec![Rule {
            lhs: Term::app(
                half,
                vec![Term::app(s, vec![Term::app(s, vec![Term::var("x")])])],
            ),
            rhs: Term::app(s, vec![Term::app(half, vec![Term::var("x")])]),
        }];
        Program::new(sig, rules, half, Mode::Confluent)
    }

    #[test]
    fn product_extension_follows_the_definition() {
        let mut b = SignatureBuilder::new();
        let a = b.constructor("a", 0).unwrap();
        let c = b.constructor("c", 0).unwrap();
        let _sig = b.finish();
        let ta = Term::constant(a);
        let tc = Term::constant(c);
        // strict base relation: a below c
        let base = |s: &Term, t: &Term| s == &ta && t == &tc;

        // no strict position
        assert!(!product_lt(
            core::slice::from_ref(&ta),
            core::slice::from_ref(&ta),
            base
        ));
        // one strict position, other equal
        assert!(product_lt(
            &[Term::var("x"), ta.clone()],
            &[Term::var("x"), tc.clone()],
            base
        ));
        // position 1 fails the below-or-equal requirement
        assert!(!product_lt(
            &[tc.clone(), ta.clone()],
            &[ta.clone(), tc.clone()],
            base
        ));
    }

    #[test]
    fn subterm_axiom_and_irreflexivity() {
        let mut b = SignatureBuilder::new();
        b.constructor("zero", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let sig = b.finish();
        let prec = Precedence::empty(&sig);
        let x = Term::var("x");
        let fx = Term::app(f, vec![x.clone()]);
        assert!(ppo_lt(&sig, &prec, &x, &fx).is_some());
        assert!(ppo_lt(&sig, &prec, &fx, &fx).is_none());
    }

    #[test]
    fn half_rule_orients_with_the_empty_precedence() {
        let p = half_program();
        let prec = Precedence::empty(&p.signature);
        let report = check_ppo(&p, &prec);
        assert!(report.all_oriented());
        // the witness replays under the pure rule interpreter
        let w = report.per_rule[0].witness.as_ref().unwrap();
        assert!(replay_witness(
            &p.signature,
            &prec,
            &p.rules[0].rhs,
            &p.rules[0].lhs,
            w
        ));
    }

    #[test]
    fn synthesis_finds_a_precedence_for_half() {
        let p = half_program();
        match synthesize_precedence(&p, 100_000) {
            Synthesis::Found(prec) => assert!(check_ppo(&p, &prec).all_oriented()),
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn self_loop_rule_is_proven_unorientable() {
        let mut b = SignatureBuilder::new();
        let s = b.constructor("s", 1).unwrap();
        let looper = b.function("looper", 1).unwrap();
        let sig = b.finish();
        let rules = vec![Rule {
            lhs: Term::app(looper, vec![Term::app(s, vec![Term::var("x")])]),
            rhs: Term::app(looper, vec![Term::app(s, vec![Term::var("x")])]),
        }];
        let p = Program::new(sig, rules, looper, Mode::Confluent);
        assert!(matches!(
            synthesize_precedence(&p, 100_000),
            Synthesis::ProvenNone
        ));
    }

    #[test]
    fn precedence_constraints_reject_cycles_and_arity_clashes() {
        let mut b = SignatureBuilder::new();
        b.constructor("zero", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let g = b.function("g", 1).unwrap();
        let h2 = b.function("h2", 2).unwrap();
        let sig = b.finish();
        assert!(Precedence::from_constraints(&sig, &[(f, g), (g, f)], &[]).is_err());
        assert!(Precedence::from_constraints(&sig, &[], &[(f, h2)]).is_err());
        let prec = Precedence::from_constraints(&sig, &[(f, g)], &[]).unwrap();
        assert!(prec.lt(g, f));
        assert!(!prec.lt(f, g));
        assert!(prec.equiv(f, f));
    }

    #[test]
    fn equivalence_closes_transitively_with_strict_edges() {
        let mut b = SignatureBuilder::new();
        b.constructor("zero", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let g = b.function("g", 1).unwrap();
        let h = b.function("h", 1).unwrap();
        let sig = b.finish();
        // f > g together with g = h implies f > h
        let prec = Precedence::from_constraints(&sig, &[(f, g)], &[(g, h)]).unwrap();
        assert!(prec.lt(h, f));
        assert!(prec.equiv(g, h));
    }

    #[test]
    fn witness_fails_replay_under_a_different_precedence() {
        // g(x) < f(x) via precedence g < f must not replay with empty prec.
        let mut b = SignatureBuilder::new();
        b.constructor("zero", 0).unwrap();
        let f = b.function("f", 1).unwrap();
        let g = b.function("g", 1).unwrap();
        let sig = b.finish();
        let prec = Precedence::from_constraints(&sig, &[(f, g)], &[]).unwrap();
        let s = Term::app(g, vec![Term::var("x")]);
        let t = Term::app(f, vec![Term::var("x")]);
        let w = ppo_lt(&sig, &prec, &s, &t).unwrap();
        assert!(replay_witness(&sig, &prec, &s, &t, &w));
        let empty = Precedence::empty(&sig);
        assert!(!replay_witness(&sig, &empty, &s, &t, &w));
    }
}
