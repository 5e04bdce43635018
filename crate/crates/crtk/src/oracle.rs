//! Brute-force oracles and formula enumerators for the differential tests.
//!
//! The oracles are deliberately independent of the rewriting machinery:
//! satisfiability by exhaustive valuation enumeration, quantified formulas
//! by structural recursion over environments.

use crtk_core::program::{Signature, SymbolId};
use crtk_core::term::Term;

/// A literal: polarity (true = positive) and variable index.
pub type Lit = (bool, u8);
/// Exactly three literals per clause.
pub type Clause = [Lit; 3];
/// A conjunction of clauses.
pub type Cnf = Vec<Clause>;

/// Exhaustive SAT check over `n_vars` variables.
pub fn sat_brute_force(f: &Cnf, n_vars: u8) -> bool {
    for mask in 0u32..(1 << n_vars) {
        let sat = f.iter().all(|clause| {
            clause
                .iter()
                .any(|(pos, v)| (mask >> v) & 1 == u32::from(*pos))
        });
        if sat {
            return true;
        }
    }
    false
}

/// All 3-CNF formulas over at most `n_vars` variables with at most
/// `max_clauses` clauses, one representative per clause-multiset: clauses
/// are non-decreasing literal triples and formulas non-decreasing clause
/// sequences. Includes the empty formula.
pub fn enumerate_cnf(n_vars: u8, max_clauses: usize) -> Vec<Cnf> {
    let mut lits: Vec<Lit> = Vec::new();
    for v in 0..n_vars {
        lits.push((false, v));
        lits.push((true, v));
    }
    let mut clauses: Vec<Clause> = Vec::new();
    for i in 0..lits.len() {
        for j in i..lits.len() {
            for k in j..lits.len() {
                clauses.push([lits[i], lits[j], lits[k]]);
            }
        }
    }
    let mut out: Vec<Cnf> = vec![Vec::new()];
    // non-decreasing sequences of clause indices
    fn extend(
        clauses: &[Clause],
        prefix: &mut Vec<usize>,
        start: usize,
        left: usize,
        out: &mut Vec<Cnf>,
    ) {
        if left == 0 {
            return;
        }
        for i in start..clauses.len() {
            prefix.push(i);
            out.push(prefix.iter().map(|&ci| clauses[ci]).collect());
            extend(clauses, prefix, i, left - 1, out);
            prefix.pop();
        }
    }
    extend(&clauses, &mut Vec::new(), 0, max_clauses, &mut out);
    out
}

/// Symbol handles for building terms of the sat3 fixture.
pub struct SatSymbols {
    pub eps: SymbolId,
    pub c0: SymbolId,
    pub c1: SymbolId,
    pub tt: SymbolId,
    pub ff: SymbolId,
    pub nil: SymbolId,
    pub cons: SymbolId,
    pub neg: SymbolId,
    pub e: SymbolId,
    pub or3: SymbolId,
    pub main: SymbolId,
}

impl SatSymbols {
    pub fn resolve(sig: &Signature) -> Option<SatSymbols> {
        Some(SatSymbols {
            eps: sig.lookup("eps")?,
            c0: sig.lookup("c0")?,
            c1: sig.lookup("c1")?,
            tt: sig.lookup("tt")?,
            ff: sig.lookup("ff")?,
            nil: sig.lookup("nil")?,
            cons: sig.lookup("cons")?,
            neg: sig.lookup("neg")?,
            e: sig.lookup("e")?,
            or3: sig.lookup("or3")?,
            main: sig.lookup("f")?,
        })
    }

    /// Two-bit identifiers padded to equal length: variable k maps to the
    /// binary word for k+1 over {c0, c1}.
    pub fn var_id(&self, v: u8) -> Term {
        let bits = v + 1; // 1, 2, 3 -> 01, 10, 11
        let hi = if bits & 0b10 != 0 { self.c1 } else { self.c0 };
        let lo = if bits & 0b01 != 0 { self.c1 } else { self.c0 };
        Term::app(hi, vec![Term::app(lo, vec![Term::constant(self.eps)])])
    }

    fn lit(&self, (pos, v): Lit) -> Term {
        let deco = if pos { self.e } else { self.neg };
        Term::app(deco, vec![self.var_id(v)])
    }

    pub fn encode(&self, f: &Cnf) -> Term {
        let mut list = Term::constant(self.nil);
        for clause in f.iter().rev() {
            let c = Term::app(
                self.or3,
                vec![
                    self.lit(clause[0]),
                    self.lit(clause[1]),
                    self.lit(clause[2]),
                ],
            );
            list = Term::app(self.cons, vec![c, list]);
        }
        list
    }
}

/// Quantified boolean formulas over {Var, Not, Or, Exists}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Qbf {
    Var(u8),
    Not(Box<Qbf>),
    Or(Box<Qbf>, Box<Qbf>),
    Exists(u8, Box<Qbf>),
}

impl Qbf {
    pub fn connective_count(&self) -> usize {
        match self {
            Qbf::Var(_) => 1,
            Qbf::Not(p) => 1 + p.connective_count(),
            Qbf::Or(a, b) => 1 + a.connective_count() + b.connective_count(),
            Qbf::Exists(_, p) => p.connective_count(),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Qbf::Var(_) => 0,
            Qbf::Not(p) => p.quantifier_count(),
            Qbf::Or(a, b) => a.quantifier_count() + b.quantifier_count(),
            Qbf::Exists(_, p) => 1 + p.quantifier_count(),
        }
    }
}

/// Structural truth evaluation; the environment assigns the bound variables.
pub fn qbf_eval(f: &Qbf, env: &mut [bool; 3]) -> bool {
    match f {
        Qbf::Var(v) => env[*v as usize],
        Qbf::Not(p) => !qbf_eval(p, env),
        Qbf::Or(a, b) => qbf_eval(a, env) || qbf_eval(b, env),
        Qbf::Exists(v, p) => {
            let saved = env[*v as usize];
            env[*v as usize] = true;
            let with_true = qbf_eval(p, env);
            env[*v as usize] = false;
            let with_false = qbf_eval(p, env);
            env[*v as usize] = saved;
            with_true || with_false
        }
    }
}

/// All closed formulas with at most `max_q` quantifiers and at most
/// `max_conn` Var/Not/Or nodes. Binders are canonically named in order of
/// appearance, so no shadowing occurs and every `Var` is bound. Formulas
/// are generated once each: the recursion pins exact quantifier and
/// connective counts on both sides of every `Or`.
pub fn enumerate_qbf(max_q: usize, max_conn: usize) -> Vec<Qbf> {
    type Key = (u8, usize, usize);
    fn gen_exact(
        memo: &mut std::collections::HashMap<Key, Vec<Qbf>>,
        scope: u8,
        q: usize,
        conn: usize,
    ) -> Vec<Qbf> {
        if conn == 0 {
            return Vec::new();
        }
        let key = (scope, q, conn);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if conn == 1 && q == 0 {
            for v in 0..scope {
                out.push(Qbf::Var(v));
            }
        }
        if conn >= 2 {
            for p in gen_exact(memo, scope, q, conn - 1) {
                out.push(Qbf::Not(Box::new(p)));
            }
        }
        if conn >= 3 {
            for left_conn in 1..=(conn - 2) {
                let right_conn = conn - 1 - left_conn;
                for left_q in 0..=q {
                    let lefts = gen_exact(memo, scope, left_q, left_conn);
                    if lefts.is_empty() {
                        continue;
                    }
                    let rights = gen_exact(memo, scope, q - left_q, right_conn);
                    for l in &lefts {
                        for r in &rights {
                            out.push(Qbf::Or(Box::new(l.clone()), Box::new(r.clone())));
                        }
                    }
                }
            }
        }
        if q >= 1 {
            for p in gen_exact(memo, scope + 1, q - 1, conn) {
                out.push(Qbf::Exists(scope, Box::new(p)));
            }
        }
        memo.insert(key, out.clone());
        out
    }
    let mut memo = std::collections::HashMap::new();
    let mut all = Vec::new();
    for q in 0..=max_q {
        for conn in 1..=max_conn {
            all.extend(gen_exact(&mut memo, 0, q, conn));
        }
    }
    all
}

/// The syntactic class of closed formulas the rewriting program evaluates:
/// quantifiers form a prefix chain separated only by negations, and the
/// quantifier-free matrix mentions every bound variable (so every
/// hypothesis-list entry gets chosen before the bottom-up verification
/// walks the list).
pub fn qbf_in_engine_domain(f: &Qbf) -> bool {
    let mut bound: Vec<u8> = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Qbf::Not(p) => cur = p,
            Qbf::Exists(v, p) => {
                bound.push(*v);
                cur = p;
            }
            _ => break,
        }
    }
    if bound.is_empty() {
        return false;
    }
    fn quantifier_free(f: &Qbf) -> bool {
        match f {
            Qbf::Var(_) => true,
            Qbf::Not(p) => quantifier_free(p),
            Qbf::Or(a, b) => quantifier_free(a) && quantifier_free(b),
            Qbf::Exists(..) => false,
        }
    }
    fn collect_vars(f: &Qbf, out: &mut Vec<u8>) {
        match f {
            Qbf::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Qbf::Not(p) => collect_vars(p, out),
            Qbf::Or(a, b) => {
                collect_vars(a, out);
                collect_vars(b, out);
            }
            Qbf::Exists(_, p) => collect_vars(p, out),
        }
    }
    if !quantifier_free(cur) {
        return false;
    }
    let mut used = Vec::new();
    collect_vars(cur, &mut used);
    bound.iter().all(|v| used.contains(v))
}

/// Symbol handles for building terms of the qbf fixture.
pub struct QbfSymbols {
    pub eps: SymbolId,
    pub c0: SymbolId,
    pub c1: SymbolId,
    pub t_sym: SymbolId,
    pub f_sym: SymbolId,
    pub var: SymbolId,
    pub not: SymbolId,
    pub or: SymbolId,
    pub exists: SymbolId,
    pub main: SymbolId,
}

impl QbfSymbols {
    pub fn resolve(sig: &Signature) -> Option<QbfSymbols> {
        Some(QbfSymbols {
            eps: sig.lookup("eps")?,
            c0: sig.lookup("c0")?,
            c1: sig.lookup("c1")?,
            t_sym: sig.lookup("T")?,
            f_sym: sig.lookup("F")?,
            var: sig.lookup("Var")?,
            not: sig.lookup("Not")?,
            or: sig.lookup("Or")?,
            exists: sig.lookup("Exists")?,
            main: sig.lookup("f")?,
        })
    }

    pub fn var_id(&self, v: u8) -> Term {
        let bits = v + 1;
        let hi = if bits & 0b10 != 0 { self.c1 } else { self.c0 };
        let lo = if bits & 0b01 != 0 { self.c1 } else { self.c0 };
        Term::app(hi, vec![Term::app(lo, vec![Term::constant(self.eps)])])
    }

    pub fn encode(&self, f: &Qbf) -> Term {
        match f {
            Qbf::Var(v) => Term::app(self.var, vec![self.var_id(*v)]),
            Qbf::Not(p) => Term::app(self.not, vec![self.encode(p)]),
            Qbf::Or(a, b) => Term::app(self.or, vec![self.encode(a), self.encode(b)]),
            Qbf::Exists(v, p) => Term::app(self.exists, vec![self.var_id(*v), self.encode(p)]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sat_brute_force_agrees_with_hand_cases() {
        // (x0 or x0 or x0)
        let f: Cnf = vec![[(true, 0), (true, 0), (true, 0)]];
        assert!(sat_brute_force(&f, 3));
        // (x0) and (not x0): unsatisfiable
        let f: Cnf = vec![
            [(true, 0), (true, 0), (true, 0)],
            [(false, 0), (false, 0), (false, 0)],
        ];
        assert!(!sat_brute_force(&f, 3));
        // empty formula is satisfiable
        assert!(sat_brute_force(&Vec::new(), 3));
    }

    #[test]
    fn cnf_enumeration_counts_match_the_multiset_formula() {
        let all = enumerate_cnf(3, 3);
        // 56 canonical clauses; multisets of size 0..=3
        let c = 56u64;
        let expected = 1 + c + c * (c + 1) / 2 + c * (c + 1) * (c + 2) / 6;
        assert_eq!(all.len() as u64, expected);
    }

    #[test]
    fn qbf_eval_handles_quantifier_scoping() {
        // exists x0. x0
        let f = Qbf::Exists(0, Box::new(Qbf::Var(0)));
        assert!(qbf_eval(&f, &mut [false; 3]));
        // exists x0. not x0
        let f = Qbf::Exists(0, Box::new(Qbf::Not(Box::new(Qbf::Var(0)))));
        assert!(qbf_eval(&f, &mut [false; 3]));
        // exists x0. (not (x0 or not x0)): always false
        let contradiction = Qbf::Exists(
            0,
            Box::new(Qbf::Not(Box::new(Qbf::Or(
                Box::new(Qbf::Var(0)),
                Box::new(Qbf::Not(Box::new(Qbf::Var(0)))),
            )))),
        );
        assert!(!qbf_eval(&contradiction, &mut [false; 3]));
    }

    #[test]
    fn enumeration_is_closed_and_within_bounds() {
        let all = enumerate_qbf(2, 5);
        assert!(!all.is_empty());
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(
            sorted.len(),
            all.len(),
            "enumeration must not repeat formulas"
        );
        for f in &all {
            assert!(f.quantifier_count() <= 2);
            assert!(f.connective_count() <= 5);
            // closed by construction: evaluation never reads an unbound slot
            // because binders are introduced in index order
            let _ = qbf_eval(f, &mut [false; 3]);
        }
        // both domain classes are exercised
        assert!(all.iter().any(qbf_in_engine_domain));
        assert!(all.iter().any(|f| !qbf_in_engine_domain(f)));
    }

    #[test]
    fn domain_predicate_examples() {
        // exists x0. x0 : in domain
        assert!(qbf_in_engine_domain(&Qbf::Exists(0, Box::new(Qbf::Var(0)))));
        // exists x0. not exists x1. (x0 or x1) : chain with negation, in domain
        let nested = Qbf::Exists(
            0,
            Box::new(Qbf::Not(Box::new(Qbf::Exists(
                1,
                Box::new(Qbf::Or(Box::new(Qbf::Var(0)), Box::new(Qbf::Var(1)))),
            )))),
        );
        assert!(qbf_in_engine_domain(&nested));
        // exists x0. exists x1. x1 : x0 unused in the matrix, off domain
        let unused = Qbf::Exists(0, Box::new(Qbf::Exists(1, Box::new(Qbf::Var(1)))));
        assert!(!qbf_in_engine_domain(&unused));
        // (exists x0. x0) or (exists x1. x1) : parallel quantifiers, off domain
        let parallel = Qbf::Or(
            Box::new(Qbf::Exists(0, Box::new(Qbf::Var(0)))),
            Box::new(Qbf::Exists(1, Box::new(Qbf::Var(1)))),
        );
        assert!(!qbf_in_engine_domain(&parallel));
        // exists x0. (x0 or exists x1. x1) : quantifier below Or, off domain
        let below_or = Qbf::Exists(
            0,
            Box::new(Qbf::Or(
                Box::new(Qbf::Var(0)),
                Box::new(Qbf::Exists(1, Box::new(Qbf::Var(1)))),
            )),
        );
        assert!(!qbf_in_engine_domain(&below_or));
    }
}
