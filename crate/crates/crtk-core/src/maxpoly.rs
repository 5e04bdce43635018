//! Max-Poly interpretations over the nonnegative rationals: expressions
//! built from constants, variables, addition, multiplication and maximum,
//! assigned to program symbols and checked for monotonicity, the weak
//! sub-term property, rule compatibility and additivity.
//!
//! All arithmetic is exact; verdicts never depend on floating point. The
//! comparison procedure is sound but incomplete: max is eliminated by case
//! splitting, each polynomial pair is compared coefficientwise after
//! shifting the domain floor to zero, and failed certificates fall back to a
//! sampling falsifier. A pair that neither certifies nor falsifies is
//! reported `Unknown`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;

use crate::program::{Program, Signature, SymbolId};
use crate::term::Term;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Expression tree over {constants, variables, +, *, max}. Add/Mul/Max carry
/// at least one operand; constants are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxPolyExpr {
    Const(Rat),
    Var(usize),
    Add(Vec<MaxPolyExpr>),
    Mul(Vec<MaxPolyExpr>),
    Max(Vec<MaxPolyExpr>),
}

impl MaxPolyExpr {
    pub fn constant(r: Rat) -> MaxPolyExpr {
        debug_assert!(!r.is_negative(), "Max-Poly constants are nonnegative");
        MaxPolyExpr::Const(r)
    }

    pub fn int(n: i64) -> MaxPolyExpr {
        MaxPolyExpr::constant(rat(n))
    }

    pub fn var(i: usize) -> MaxPolyExpr {
        MaxPolyExpr::Var(i)
    }

    pub fn add(parts: Vec<MaxPolyExpr>) -> MaxPolyExpr {
        debug_assert!(!parts.is_empty());
        MaxPolyExpr::Add(parts)
    }

    pub fn mul(parts: Vec<MaxPolyExpr>) -> MaxPolyExpr {
        debug_assert!(!parts.is_empty());
        MaxPolyExpr::Mul(parts)
    }

    pub fn max(parts: Vec<MaxPolyExpr>) -> MaxPolyExpr {
        debug_assert!(!parts.is_empty());
        MaxPolyExpr::Max(parts)
    }

    /// Largest variable index plus one.
    pub fn min_arity(&self) -> usize {
        match self {
            MaxPolyExpr::Const(_) => 0,
            MaxPolyExpr::Var(i) => i + 1,
            MaxPolyExpr::Add(ps) | MaxPolyExpr::Mul(ps) | MaxPolyExpr::Max(ps) => {
                ps.iter().map(MaxPolyExpr::min_arity).max().unwrap_or(0)
            }
        }
    }

    /// Replaces every variable by the corresponding expression.
    pub fn substitute(&self, args: &[MaxPolyExpr]) -> MaxPolyExpr {
        match self {
            MaxPolyExpr::Const(c) => MaxPolyExpr::Const(c.clone()),
            MaxPolyExpr::Var(i) => args[*i].clone(),
            MaxPolyExpr::Add(ps) => {
                MaxPolyExpr::Add(ps.iter().map(|p| p.substitute(args)).collect())
            }
            MaxPolyExpr::Mul(ps) => {
                MaxPolyExpr::Mul(ps.iter().map(|p| p.substitute(args)).collect())
            }
            MaxPolyExpr::Max(ps) => {
                MaxPolyExpr::Max(ps.iter().map(|p| p.substitute(args)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprError {
    ArityMismatch { expected: usize, found: usize },
    UnassignedSymbol(String),
}

impl core::fmt::Display for ExprError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExprError::ArityMismatch { expected, found } => {
                write!(f, "expression needs {expected} arguments, got {found}")
            }
            ExprError::UnassignedSymbol(name) => {
                write!(f, "no interpretation assigned to symbol `{name}`")
            }
        }
    }
}

impl core::error::Error for ExprError {}

/// Exact evaluation at a point.
pub fn eval_expr(e: &MaxPolyExpr, xs: &[Rat]) -> Result<Rat, ExprError> {
    let needed = e.min_arity();
    if xs.len() < needed {
        return Err(ExprError::ArityMismatch {
            expected: needed,
            found: xs.len(),
        });
    }
    Ok(eval_unchecked(e, xs))
}

fn eval_unchecked(e: &MaxPolyExpr, xs: &[Rat]) -> Rat {
    match e {
        MaxPolyExpr::Const(c) => c.clone(),
        MaxPolyExpr::Var(i) => xs[*i].clone(),
        MaxPolyExpr::Add(ps) => ps.iter().map(|p| eval_unchecked(p, xs)).sum(),
        MaxPolyExpr::Mul(ps) => ps.iter().map(|p| eval_unchecked(p, xs)).product(),
        MaxPolyExpr::Max(ps) => ps
            .iter()
            .map(|p| eval_unchecked(p, xs))
            .max()
            .expect("max over at least one operand"),
    }
}

/// Assignment of a Max-Poly expression to every program symbol, with values
/// ranging over `[floor, inf)`.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub entries: BTreeMap<SymbolId, MaxPolyExpr>,
    pub floor: Rat,
}

impl Interpretation {
    pub fn new(floor: Rat) -> Interpretation {
        Interpretation {
            entries: BTreeMap::new(),
            floor,
        }
    }

    pub fn assign(&mut self, sym: SymbolId, e: MaxPolyExpr) {
        self.entries.insert(sym, e);
    }

    pub fn get(&self, sym: SymbolId) -> Option<&MaxPolyExpr> {
        self.entries.get(&sym)
    }

    /// Symbols of the signature missing an assignment.
    pub fn missing(&self, sig: &Signature) -> Vec<SymbolId> {
        sig.ids()
            .filter(|id| !self.entries.contains_key(id))
            .collect()
    }
}

/// Composes the interpretation over a term. Variables map to expression
/// variables through `var_index`; use [`interp_term`] for the term's own
/// first-occurrence order.
pub fn interp_term_with(
    interp: &Interpretation,
    sig: &Signature,
    t: &Term,
    var_index: &BTreeMap<Arc<str>, usize>,
) -> Result<MaxPolyExpr, ExprError> {
    match t.as_var() {
        Some(v) => Ok(MaxPolyExpr::Var(var_index[v])),
        None => {
            let (s, args) = t.as_app().unwrap();
            let e = interp
                .get(s)
                .ok_or_else(|| ExprError::UnassignedSymbol(String::from(sig.name(s))))?;
            let arg_exprs = args
                .iter()
                .map(|a| interp_term_with(interp, sig, a, var_index))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(e.substitute(&arg_exprs))
        }
    }
}

/// Composes the interpretation over a term, numbering the term's variables
/// in first-occurrence order.
pub fn interp_term(
    interp: &Interpretation,
    sig: &Signature,
    t: &Term,
) -> Result<MaxPolyExpr, ExprError> {
    let index: BTreeMap<Arc<str>, usize> = t
        .vars()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    interp_term_with(interp, sig, t, &index)
}

/// A sparse multivariate polynomial with nonnegative rational coefficients.
/// Monomials are dense exponent vectors over a fixed variable count.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    fn constant(c: Rat, n_vars: usize) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; n_vars], c);
        }
        Poly { n_vars, terms }
    }

    fn var(i: usize, n_vars: usize) -> Poly {
        let mut mono = vec![0; n_vars];
        mono[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(mono, Rat::one());
        Poly { n_vars, terms }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Poly {
            n_vars: self.n_vars,
            terms,
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mono: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(mono).or_insert_with(Rat::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly {
            n_vars: self.n_vars,
            terms,
        }
    }

    /// Substitutes `x_i := y_i + floor`, mapping the domain `[floor, inf)`
    /// to `[0, inf)`.
    fn shift_floor(&self, floor: &Rat) -> Poly {
        if floor.is_zero() {
            return self.clone();
        }
        let mut out = Poly::constant(Rat::zero(), self.n_vars);
        for (mono, coeff) in &self.terms {
            let mut factor = Poly::constant(coeff.clone(), self.n_vars);
            for (i, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    let shifted =
                        Poly::var(i, self.n_vars).add(&Poly::constant(floor.clone(), self.n_vars));
                    factor = factor.mul(&shifted);
                }
            }
            out = out.add(&factor);
        }
        out
    }

    fn constant_term(&self) -> Rat {
        self.terms
            .get(&vec![0; self.n_vars])
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Coefficientwise domination: every coefficient of `other` is at most
    /// the corresponding coefficient here. Sound for pointwise comparison on
    /// `[0, inf)^n` because all coefficients are nonnegative.
    fn dominates(&self, other: &Poly) -> bool {
        other.terms.iter().all(|(m, c)| {
            self.terms
                .get(m)
                .map_or(c.is_zero() || c.is_negative(), |mine| mine >= c)
        })
    }
}

/// Distributes max outward, yielding the max-free polynomial cases of an
/// expression: the expression equals the pointwise maximum of the cases.
fn max_cases(e: &MaxPolyExpr, n_vars: usize) -> Vec<Poly> {
    let cases = match e {
        MaxPolyExpr::Const(c) => vec![Poly::constant(c.clone(), n_vars)],
        MaxPolyExpr::Var(i) => vec![Poly::var(*i, n_vars)],
        MaxPolyExpr::Add(ps) => {
            let mut acc = vec![Poly::constant(Rat::zero(), n_vars)];
            for p in ps {
                let cs = max_cases(p, n_vars);
                let mut next = Vec::with_capacity(acc.len() * cs.len());
                for a in &acc {
                    for c in &cs {
                        next.push(a.add(c));
                    }
                }
                acc = next;
            }
            acc
        }
        MaxPolyExpr::Mul(ps) => {
            let mut acc = vec![Poly::constant(Rat::one(), n_vars)];
            for p in ps {
                let cs = max_cases(p, n_vars);
                let mut next = Vec::with_capacity(acc.len() * cs.len());
                for a in &acc {
                    for c in &cs {
                        next.push(a.mul(c));
                    }
                }
                acc = next;
            }
            acc
        }
        MaxPolyExpr::Max(ps) => ps.iter().flat_map(|p| max_cases(p, n_vars)).collect(),
    };
    let mut out: Vec<Poly> = Vec::with_capacity(cases.len());
    for c in cases {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: Vec<Rat>,
    pub lhs: Rat,
    pub rhs: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Falsified(Counterexample),
    Unknown,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Falsified(_) => "falsified",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Strict,
    Weak,
}

const FALSIFIER_SAMPLES: u32 = 10_000;
const SAMPLE_RANGE: u64 = 1_000;

fn sample_point(rng: &mut dyn RngCore, floor: &Rat, n_vars: usize) -> Vec<Rat> {
    (0..n_vars)
        .map(|_| {
            let num = rng.next_u64() % (SAMPLE_RANGE + 1);
            let den = 1 + rng.next_u64() % 3;
            floor + BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect()
}

/// Sound, incomplete comparison of `p >= q` (weak) or `p > q` (strict) over
/// `[floor, inf)^n`. Certificates first; then up to 10^4 random assignments
/// in `[floor, floor + 10^3]` looking for a falsifying point.
pub fn compare_exprs(
    p: &MaxPolyExpr,
    q: &MaxPolyExpr,
    mode: CompareMode,
    floor: &Rat,
    n_vars: usize,
    rng: &mut dyn RngCore,
) -> Verdict {
    let p_cases = max_cases(p, n_vars);
    let q_cases = max_cases(q, n_vars);
    let certified = q_cases.iter().all(|qc| {
        let qs = qc.shift_floor(floor);
        p_cases.iter().any(|pc| {
            let ps = pc.shift_floor(floor);
            ps.dominates(&qs)
                && match mode {
                    CompareMode::Weak => true,
                    CompareMode::Strict => ps.constant_term() > qs.constant_term(),
                }
        })
    });
    if certified {
        return Verdict::Verified;
    }
    let samples = if n_vars == 0 { 1 } else { FALSIFIER_SAMPLES };
    for _ in 0..samples {
        let xs = sample_point(rng, floor, n_vars);
        let pv = eval_unchecked(p, &xs);
        let qv = eval_unchecked(q, &xs);
        let falsified = match mode {
            CompareMode::Weak => pv < qv,
            CompareMode::Strict => pv <= qv,
        };
        if falsified {
            return Verdict::Falsified(Counterexample {
                assignment: xs,
                lhs: pv,
                rhs: qv,
            });
        }
    }
    Verdict::Unknown
}

/// Monotonicity of an expression in each argument. Weak monotonicity holds
/// structurally for every Max-Poly combinator; strict monotonicity in
/// argument `i` is checked as `e[x_i := x_i + 1] > e`.
pub fn check_monotonic(
    e: &MaxPolyExpr,
    mode: CompareMode,
    floor: &Rat,
    arity: usize,
    rng: &mut dyn RngCore,
) -> Verdict {
    match mode {
        CompareMode::Weak => Verdict::Verified,
        CompareMode::Strict => {
            let mut unknown = false;
            for i in 0..arity {
                let args: Vec<MaxPolyExpr> = (0..arity)
                    .map(|j| {
                        if j == i {
                            MaxPolyExpr::add(vec![MaxPolyExpr::var(j), MaxPolyExpr::int(1)])
                        } else {
                            MaxPolyExpr::var(j)
                        }
                    })
                    .collect();
                let bumped = e.substitute(&args);
                match compare_exprs(&bumped, e, CompareMode::Strict, floor, arity, rng) {
                    Verdict::Verified => {}
                    Verdict::Falsified(cex) => return Verdict::Falsified(cex),
                    Verdict::Unknown => unknown = true,
                }
            }
            if unknown {
                Verdict::Unknown
            } else {
                Verdict::Verified
            }
        }
    }
}

/// Weak sub-term property: `e(x_1..x_n) >= x_i` for every argument.
pub fn check_subterm_property(
    e: &MaxPolyExpr,
    floor: &Rat,
    arity: usize,
    rng: &mut dyn RngCore,
) -> Verdict {
    let mut unknown = false;
    for i in 0..arity {
        match compare_exprs(
            e,
            &MaxPolyExpr::var(i),
            CompareMode::Weak,
            floor,
            arity,
            rng,
        ) {
            Verdict::Verified => {}
            Verdict::Falsified(cex) => return Verdict::Falsified(cex),
            Verdict::Unknown => unknown = true,
        }
    }
    if unknown {
        Verdict::Unknown
    } else {
        Verdict::Verified
    }
}

#[derive(Clone, Debug)]
pub struct RuleVerdict {
    pub rule_index: usize,
    pub verdict: Verdict,
}

/// Per-rule compatibility: `[[lhs]] > [[rhs]]` (strict) or `>=` (weak) with
/// rule variables numbered by first occurrence in the lhs.
pub fn check_compatibility(
    p: &Program,
    interp: &Interpretation,
    mode: CompareMode,
    rng: &mut dyn RngCore,
) -> Result<Vec<RuleVerdict>, ExprError> {
    let sig = &p.signature;
    let mut out = Vec::with_capacity(p.rules.len());
    for (i, rule) in p.rules.iter().enumerate() {
        let vars = rule.lhs.vars();
        let n_vars = vars.len();
        let index: BTreeMap<Arc<str>, usize> =
            vars.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
        let lhs = interp_term_with(interp, sig, &rule.lhs, &index)?;
        let rhs = interp_term_with(interp, sig, &rule.rhs, &index)?;
        let verdict = compare_exprs(&lhs, &rhs, mode, &interp.floor, n_vars, rng);
        out.push(RuleVerdict {
            rule_index: i,
            verdict,
        });
    }
    Ok(out)
}

/// Additive shape: the expression normalizes to a single polynomial
/// `x_1 + .. + x_n + c` with every argument appearing once and `c >= 1`.
pub fn is_additive(e: &MaxPolyExpr, arity: usize) -> bool {
    let cases = max_cases(e, arity);
    if cases.len() != 1 {
        return false;
    }
    let poly = &cases[0];
    if poly.constant_term() < Rat::one() {
        return false;
    }
    let mut seen_vars = vec![false; arity];
    for (mono, coeff) in &poly.terms {
        let degree: u32 = mono.iter().sum();
        if degree == 0 {
            continue;
        }
        if degree > 1 || !coeff.is_one() {
            return false;
        }
        let var = mono.iter().position(|&e| e == 1).unwrap();
        seen_vars[var] = true;
    }
    seen_vars.into_iter().all(|s| s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterpClass {
    /// Strict monotonicity, sub-term property, strict compatibility.
    Strict,
    /// Weak monotonicity, sub-term property, weak compatibility.
    Quasi,
    /// Weak monotonicity, weak compatibility.
    Monotone,
    None,
}

impl InterpClass {
    pub fn as_str(self) -> &'static str {
        match self {
            InterpClass::Strict => "strict-interpretation",
            InterpClass::Quasi => "quasi-interpretation",
            InterpClass::Monotone => "monotone-interpretation",
            InterpClass::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: InterpClass,
    /// Every constructor is interpreted as sum-of-arguments plus a constant.
    pub additive: bool,
    pub strict_mono: Vec<(SymbolId, Verdict)>,
    pub subterm: Vec<(SymbolId, Verdict)>,
    pub strict_compat: Vec<RuleVerdict>,
    pub weak_compat: Vec<RuleVerdict>,
}

/// Strongest class whose defining conditions all verify. Weak monotonicity
/// is structural for Max-Poly expressions, so the monotone class reduces to
/// weak compatibility.
pub fn classify_interp(
    p: &Program,
    interp: &Interpretation,
    rng: &mut dyn RngCore,
) -> Result<Classification, ExprError> {
    let sig = &p.signature;
    let missing = interp.missing(sig);
    if let Some(first) = missing.first() {
        return Err(ExprError::UnassignedSymbol(String::from(sig.name(*first))));
    }
    let mut strict_mono = Vec::new();
    let mut subterm = Vec::new();
    for id in sig.ids() {
        let arity = sig.sym(id).arity as usize;
        let e = interp.get(id).unwrap();
        strict_mono.push((
            id,
            check_monotonic(e, CompareMode::Strict, &interp.floor, arity, rng),
        ));
        subterm.push((id, check_subterm_property(e, &interp.floor, arity, rng)));
    }
    let strict_compat = check_compatibility(p, interp, CompareMode::Strict, rng)?;
    let weak_compat = check_compatibility(p, interp, CompareMode::Weak, rng)?;

    let all_strict_mono = strict_mono.iter().all(|(_, v)| v.is_verified());
    let all_subterm = subterm.iter().all(|(_, v)| v.is_verified());
    let all_strict_compat = strict_compat.iter().all(|r| r.verdict.is_verified());
    let all_weak_compat = weak_compat.iter().all(|r| r.verdict.is_verified());

    let class = if all_strict_mono && all_subterm && all_strict_compat {
        InterpClass::Strict
    } else if all_subterm && all_weak_compat {
        InterpClass::Quasi
    } else if all_weak_compat {
        InterpClass::Monotone
    } else {
        InterpClass::None
    };

    let additive = sig
        .constructors()
        .all(|c| is_additive(interp.get(c).unwrap(), sig.sym(c).arity as usize));

    Ok(Classification {
        class,
        additive,
        strict_mono,
        subterm,
        strict_compat,
        weak_compat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Mode, Rule, SignatureBuilder};
    use rand::SeedableRng;

    fn rng() -> impl RngCore {
        rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE)
    }

    fn e_var(i: usize) -> MaxPolyExpr {
        MaxPolyExpr::var(i)
    }

    /// (x+2)*y
    fn in_interp() -> MaxPolyExpr {
        MaxPolyExpr::mul(vec![
            MaxPolyExpr::add(vec![e_var(0), MaxPolyExpr::int(2)]),
            e_var(1),
        ])
    }

    #[test]
    fn eval_is_exact() {
        assert_eq!(eval_expr(&in_interp(), &[rat(1), rat(1)]).unwrap(), rat(3));
        assert_eq!(eval_expr(&e_var(0), &[rat(7)]).unwrap(), rat(7));
        let m = MaxPolyExpr::max(vec![e_var(0), MaxPolyExpr::int(5)]);
        assert_eq!(eval_expr(&m, &[rat(2)]).unwrap(), rat(5));
        assert!(eval_expr(&e_var(1), &[rat(2)]).is_err());
    }

    #[test]
    fn interp_term_composes() {
        // signature: eps/0, cons/2 constructors; inq/2 function
        let mut b = SignatureBuilder::new();
        let eps = b.constructor("eps", 0).unwrap();
        let cons = b.constructor("cons", 2).unwrap();
        let inq = b.function("inq", 2).unwrap();
        let sig = b.finish();
        let mut interp = Interpretation::new(rat(1));
        interp.assign(eps, MaxPolyExpr::int(1));
        interp.assign(
            cons,
            MaxPolyExpr::add(vec![e_var(0), e_var(1), MaxPolyExpr::int(1)]),
        );
        interp.assign(inq, in_interp());

        // x alone maps to the first expression variable
        let x = Term::var("x");
        assert_eq!(interp_term(&interp, &sig, &x).unwrap(), e_var(0));

        // inq(a, cons(b, l)) = (a+2)*(b+l+1)
        let t = Term::app(
            inq,
            vec![
                Term::var("a"),
                Term::app(cons, vec![Term::var("b"), Term::var("l")]),
            ],
        );
        let composed = interp_term(&interp, &sig, &t).unwrap();
        for (a, bv, l) in [(1i64, 1, 1), (2, 3, 5), (7, 1, 4)] {
            let expect = rat((a + 2) * (bv + l + 1));
            assert_eq!(
                eval_expr(&composed, &[rat(a), rat(bv), rat(l)]).unwrap(),
                expect
            );
        }

        // the ground term eps composes to the constant 1
        let ground = Term::constant(eps);
        let ge = interp_term(&interp, &sig, &ground).unwrap();
        assert_eq!(eval_expr(&ge, &[]).unwrap(), rat(1));
    }

    #[test]
    fn comparison_certifies_and_falsifies() {
        let mut r = rng();
        let one = rat(1);
        // x+y+1 > x+y on [1, inf)
        let p = MaxPolyExpr::add(vec![e_var(0), e_var(1), MaxPolyExpr::int(1)]);
        let q = MaxPolyExpr::add(vec![e_var(0), e_var(1)]);
        assert_eq!(
            compare_exprs(&p, &q, CompareMode::Strict, &one, 2, &mut r),
            Verdict::Verified
        );
        // x+y >= (x+2)*y is falsified, e.g. at (1,1): 2 < 3
        let v = compare_exprs(&q, &in_interp(), CompareMode::Weak, &one, 2, &mut r);
        assert!(matches!(v, Verdict::Falsified(_)));
        // p > p is falsified by any sample (equal values)
        let v = compare_exprs(&p, &p, CompareMode::Strict, &one, 2, &mut r);
        match v {
            Verdict::Falsified(cex) => assert_eq!(cex.lhs, cex.rhs),
            other => panic!("expected falsified, got {other:?}"),
        }
        // and p >= p is verified
        assert_eq!(
            compare_exprs(&p, &p, CompareMode::Weak, &one, 2, &mut r),
            Verdict::Verified
        );
    }

    #[test]
    fn polynomial_growth_needs_the_floor_shift() {
        // x*x >= x holds on [1, inf) but not coefficientwise at floor 0.
        let mut r = rng();
        let sq = MaxPolyExpr::mul(vec![e_var(0), e_var(0)]);
        assert_eq!(
            compare_exprs(&sq, &e_var(0), CompareMode::Weak, &rat(1), 1, &mut r),
            Verdict::Verified
        );
        let v = compare_exprs(&sq, &e_var(0), CompareMode::Weak, &rat(0), 1, &mut r);
        assert!(matches!(v, Verdict::Falsified(_) | Verdict::Unknown));
    }

    #[test]
    fn monotonicity_checks() {
        let mut r = rng();
        let one = rat(1);
        // x+1 is strictly monotonic
        let succ = MaxPolyExpr::add(vec![e_var(0), MaxPolyExpr::int(1)]);
        assert_eq!(
            check_monotonic(&succ, CompareMode::Strict, &one, 1, &mut r),
            Verdict::Verified
        );
        // max(x, y) is weakly but not strictly monotonic
        let m = MaxPolyExpr::max(vec![e_var(0), e_var(1)]);
        assert_eq!(
            check_monotonic(&m, CompareMode::Weak, &one, 2, &mut r),
            Verdict::Verified
        );
        assert!(matches!(
            check_monotonic(&m, CompareMode::Strict, &one, 2, &mut r),
            Verdict::Falsified(_)
        ));
        // a constant is weakly monotonic only
        let c = MaxPolyExpr::int(3);
        assert_eq!(
            check_monotonic(&c, CompareMode::Weak, &one, 1, &mut r),
            Verdict::Verified
        );
        assert!(matches!(
            check_monotonic(&c, CompareMode::Strict, &one, 1, &mut r),
            Verdict::Falsified(_)
        ));
    }

    #[test]
    fn subterm_property_checks() {
        let mut r = rng();
        // (x+2)*y >= x and >= y on [1, inf)
        assert_eq!(
            check_subterm_property(&in_interp(), &rat(1), 2, &mut r),
            Verdict::Verified
        );
        // x*y fails at floor 0 (x=1, y=0 gives 0 < 1)
        let xy = MaxPolyExpr::mul(vec![e_var(0), e_var(1)]);
        assert!(matches!(
            check_subterm_property(&xy, &rat(0), 2, &mut r),
            Verdict::Falsified(_)
        ));
        // the identity trivially satisfies it
        assert_eq!(
            check_subterm_property(&e_var(0), &rat(1), 1, &mut r),
            Verdict::Verified
        );
    }

    #[test]
    fn additive_shapes() {
        assert!(is_additive(
            &MaxPolyExpr::add(vec![e_var(0), e_var(1), MaxPolyExpr::int(1)]),
            2
        ));
        assert!(is_additive(&MaxPolyExpr::int(1), 0));
        // c = 0 is not additive here (the constant must be at least 1)
        assert!(!is_additive(&MaxPolyExpr::add(vec![e_var(0)]), 1));
        // coefficient 2 breaks the shape
        assert!(!is_additive(
            &MaxPolyExpr::add(vec![e_var(0), e_var(0), MaxPolyExpr::int(1)]),
            1
        ));
        // missing argument breaks the shape
        assert!(!is_additive(
            &MaxPolyExpr::add(vec![e_var(0), MaxPolyExpr::int(1)]),
            2
        ));
        // max is not additive
        assert!(!is_additive(&MaxPolyExpr::max(vec![e_var(0), e_var(1)]), 2));
    }

    /// or(tt, y) -> tt; or(ff, y) -> y with the additive interpretation.
    fn bool_or_program() -> (Program, Interpretation) {
        let mut b = SignatureBuilder::new();
        let ff = b.constructor("ff", 0).unwrap();
        let tt = b.constructor("tt", 0).unwrap();
        let or = b.function("or", 2).unwrap();
        let sig = b.finish();
        let rules = vec![
            Rule {
                lhs: Term::app(or, vec![Term::constant(tt), Term::var("y")]),
                rhs: Term::constant(tt),
            },
            Rule {
                lhs: Term::app(or, vec![Term::constant(ff), Term::var("y")]),
                rhs: Term::var("y"),
            },
        ];
        let p = Program::new(sig, rules, or, Mode::Confluent);
        let mut interp = Interpretation::new(rat(1));
        interp.assign(ff, MaxPolyExpr::int(1));
        interp.assign(tt, MaxPolyExpr::int(1));
        interp.assign(or, MaxPolyExpr::add(vec![e_var(0), e_var(1)]));
        (p, interp)
    }

    #[test]
    fn classification_of_a_strict_additive_interpretation() {
        let (p, interp) = bool_or_program();
        let mut r = rng();
        let cls = classify_interp(&p, &interp, &mut r).unwrap();
        assert_eq!(cls.class, InterpClass::Strict);
        assert!(cls.additive);
        // strict implies the quasi and monotone conditions also verify
        assert!(cls.weak_compat.iter().all(|rv| rv.verdict.is_verified()));
        assert!(cls.subterm.iter().all(|(_, v)| v.is_verified()));
    }

    #[test]
    fn all_constant_interpretation_fails_compatibility() {
        let (p, _) = bool_or_program();
        let sig = &p.signature;
        let mut interp = Interpretation::new(rat(1));
        for id in sig.ids() {
            interp.assign(id, MaxPolyExpr::int(1));
        }
        let mut r = rng();
        // or(ff, y) -> y: [[lhs]] = 1 but [[y]] can exceed 1
        let cls = classify_interp(&p, &interp, &mut r).unwrap();
        assert_eq!(cls.class, InterpClass::None);
    }
}
