//! Property tests for the term algebra, the path ordering and the
//! interpretation comparison procedure.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use crtk_core::consfree::{constructor_image, set_size, sts_leq, TermSet};
use crtk_core::maxpoly::{compare_exprs, CompareMode, MaxPolyExpr, Verdict};
use crtk_core::ppo::{ppo_lt, replay_witness, Precedence};
use crtk_core::program::{Signature, SignatureBuilder};
use crtk_core::term::{is_subterm, match_term, substitute, Term, TermOrder};

fn sig() -> Signature {
    let mut b = SignatureBuilder::new();
    b.constructor("eps", 0).unwrap();
    b.constructor("c0", 1).unwrap();
    b.constructor("c1", 1).unwrap();
    b.constructor("ff", 0).unwrap();
    b.constructor("tt", 0).unwrap();
    b.constructor("nil", 0).unwrap();
    b.constructor("cons", 2).unwrap();
    b.function("f", 1).unwrap();
    b.function("g", 2).unwrap();
    b.finish()
}

#[derive(Clone, Debug)]
enum GroundDesc {
    Eps,
    Ff,
    Tt,
    Nil,
    C0(Box<GroundDesc>),
    C1(Box<GroundDesc>),
    Cons(Box<GroundDesc>, Box<GroundDesc>),
}

fn ground_strategy() -> impl Strategy<Value = GroundDesc> {
    let leaf = prop_oneof![
        Just(GroundDesc::Eps),
        Just(GroundDesc::Ff),
        Just(GroundDesc::Tt),
        Just(GroundDesc::Nil),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| GroundDesc::C0(Box::new(t))),
            inner.clone().prop_map(|t| GroundDesc::C1(Box::new(t))),
            (inner.clone(), inner).prop_map(|(a, b)| GroundDesc::Cons(Box::new(a), Box::new(b))),
        ]
    })
}

fn build_ground(s: &Signature, d: &GroundDesc) -> Term {
    let app = |name: &str, args: Vec<Term>| Term::app(s.lookup(name).unwrap(), args);
    match d {
        GroundDesc::Eps => app("eps", vec![]),
        GroundDesc::Ff => app("ff", vec![]),
        GroundDesc::Tt => app("tt", vec![]),
        GroundDesc::Nil => app("nil", vec![]),
        GroundDesc::C0(t) => {
            let t = build_ground(s, t);
            app("c0", vec![t])
        }
        GroundDesc::C1(t) => {
            let t = build_ground(s, t);
            app("c1", vec![t])
        }
        GroundDesc::Cons(a, b) => {
            let (a, b) = (build_ground(s, a), build_ground(s, b));
            app("cons", vec![a, b])
        }
    }
}

/// Patterns: ground shapes with some leaves replaced by variables.
#[derive(Clone, Debug)]
enum PatDesc {
    Var(u8),
    Eps,
    Tt,
    C0(Box<PatDesc>),
    Cons(Box<PatDesc>, Box<PatDesc>),
}

fn pattern_strategy() -> impl Strategy<Value = PatDesc> {
    let leaf = prop_oneof![
        (0u8..4).prop_map(PatDesc::Var),
        Just(PatDesc::Eps),
        Just(PatDesc::Tt),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| PatDesc::C0(Box::new(t))),
            (inner.clone(), inner).prop_map(|(a, b)| PatDesc::Cons(Box::new(a), Box::new(b))),
        ]
    })
}

fn build_pattern(s: &Signature, d: &PatDesc) -> Term {
    let app = |name: &str, args: Vec<Term>| Term::app(s.lookup(name).unwrap(), args);
    match d {
        PatDesc::Var(i) => Term::var(format!("v{i}")),
        PatDesc::Eps => app("eps", vec![]),
        PatDesc::Tt => app("tt", vec![]),
        PatDesc::C0(t) => {
            let t = build_pattern(s, t);
            app("c0", vec![t])
        }
        PatDesc::Cons(a, b) => {
            let (a, b) = (build_pattern(s, a), build_pattern(s, b));
            app("cons", vec![a, b])
        }
    }
}

proptest! {
    #[test]
    fn size_is_positive_and_compositional(d in ground_strategy()) {
        let s = sig();
        let t = build_ground(&s, &d);
        prop_assert!(t.size() >= 1);
        let args_total: u64 = t.args().iter().map(Term::size).sum();
        prop_assert_eq!(t.size(), 1 + args_total);
    }

    #[test]
    fn subterms_are_no_larger(d in ground_strategy()) {
        let s = sig();
        let t = build_ground(&s, &d);
        for (_, sub) in t.subterms_with_positions() {
            prop_assert!(is_subterm(sub, &t));
            prop_assert!(sub.size() <= t.size());
        }
    }

    #[test]
    fn match_then_substitute_reproduces_the_subject(
        p in pattern_strategy(),
        binds in proptest::collection::vec(ground_strategy(), 4),
    ) {
        let s = sig();
        let pattern = build_pattern(&s, &p);
        let sub: crtk_core::Substitution = (0..4u8)
            .map(|i| {
                (
                    Arc::from(format!("v{i}")),
                    build_ground(&s, &binds[i as usize]),
                )
            })
            .collect();
        let subject = substitute(&pattern, &sub).unwrap();
        let recovered = match_term(&pattern, &subject)
            .expect("a substitution instance always matches its pattern");
        prop_assert_eq!(substitute(&pattern, &recovered).unwrap(), subject);
    }

    #[test]
    fn term_order_is_a_strict_total_order(
        a in ground_strategy(),
        b in ground_strategy(),
        c in ground_strategy(),
    ) {
        let s = sig();
        let ord = TermOrder::new(&s);
        let (ta, tb, tc) = (build_ground(&s, &a), build_ground(&s, &b), build_ground(&s, &c));
        // irreflexivity
        prop_assert!(!ord.lt(&ta, &ta));
        // trichotomy
        let lt = ord.lt(&ta, &tb);
        let gt = ord.lt(&tb, &ta);
        let eq = ta == tb;
        prop_assert_eq!([lt, gt, eq].iter().filter(|x| **x).count(), 1);
        // transitivity
        if ord.lt(&ta, &tb) && ord.lt(&tb, &tc) {
            prop_assert!(ord.lt(&ta, &tc));
        }
    }

    /// Ground instantiation preserves the subterm relation, which is what
    /// lifts the singleton interpretations of constructor terms monotonely.
    #[test]
    fn substitution_preserves_subterms(
        v in pattern_strategy(),
        binds in proptest::collection::vec(ground_strategy(), 4),
    ) {
        let s = sig();
        let big = build_pattern(&s, &v);
        let sub: crtk_core::Substitution = (0..4u8)
            .map(|i| {
                (
                    Arc::from(format!("v{i}")),
                    build_ground(&s, &binds[i as usize]),
                )
            })
            .collect();
        let big_inst = substitute(&big, &sub).unwrap();
        for (_, u) in big.subterms_with_positions() {
            let u_inst = substitute(u, &sub).unwrap();
            prop_assert!(is_subterm(&u_inst, &big_inst));
        }
    }

    #[test]
    fn inclusion_implies_the_lifted_subterm_relation(
        xs in proptest::collection::vec(ground_strategy(), 1..5),
        ys in proptest::collection::vec(ground_strategy(), 0..3),
    ) {
        let s = sig();
        let small: TermSet = xs.iter().map(|d| build_ground(&s, d)).collect();
        let mut big = small.clone();
        for d in &ys {
            big.insert(build_ground(&s, d));
        }
        prop_assert!(sts_leq(&small, &big));
    }

    #[test]
    fn constructor_image_size_respects_the_closed_form_bound(
        xs in proptest::collection::vec(ground_strategy(), 1..4),
        ys in proptest::collection::vec(ground_strategy(), 1..4),
    ) {
        let s = sig();
        let cons = s.lookup("cons").unwrap();
        let m1: TermSet = xs.iter().map(|d| build_ground(&s, d)).collect();
        let m2: TermSet = ys.iter().map(|d| build_ground(&s, d)).collect();
        let img = constructor_image(cons, &[m1.clone(), m2.clone()]);
        let m = set_size(&m1) + set_size(&m2);
        // |image| <= M^n * (n*M + 1) with n = 2
        prop_assert!(set_size(&img) <= m.pow(2) * (2 * m + 1));
    }

    #[test]
    fn ppo_is_irreflexive_and_transitive_on_samples(
        a in ground_strategy(),
        b in ground_strategy(),
        c in ground_strategy(),
    ) {
        let s = sig();
        let f = s.lookup("f").unwrap();
        let g = s.lookup("g").unwrap();
        let prec = Precedence::from_constraints(&s, &[(g, f)], &[]).unwrap();
        let eps = Term::app(s.lookup("eps").unwrap(), vec![]);
        // wrap the samples in function applications to exercise every rule
        let ta = Term::app(f, vec![build_ground(&s, &a)]);
        let tb = Term::app(g, vec![build_ground(&s, &b), eps]);
        let tc = Term::app(f, vec![build_ground(&s, &c)]);
        for t in [&ta, &tb, &tc] {
            prop_assert!(ppo_lt(&s, &prec, t, t).is_none());
        }
        let ab = ppo_lt(&s, &prec, &ta, &tb).is_some();
        let bc = ppo_lt(&s, &prec, &tb, &tc).is_some();
        if ab && bc {
            prop_assert!(ppo_lt(&s, &prec, &ta, &tc).is_some());
        }
        // witnesses replay
        if let Some(w) = ppo_lt(&s, &prec, &ta, &tb) {
            prop_assert!(replay_witness(&s, &prec, &ta, &tb, &w));
        }
    }
}

#[derive(Clone, Debug)]
enum ExprDesc {
    Const(u8),
    Var(u8),
    Add(Vec<ExprDesc>),
    Mul(Vec<ExprDesc>),
    Max(Vec<ExprDesc>),
}

fn expr_strategy() -> impl Strategy<Value = ExprDesc> {
    let leaf = prop_oneof![
        (0u8..5).prop_map(ExprDesc::Const),
        (0u8..2).prop_map(ExprDesc::Var),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(ExprDesc::Add),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(ExprDesc::Mul),
            proptest::collection::vec(inner, 1..3).prop_map(ExprDesc::Max),
        ]
    })
}

fn build_expr(d: &ExprDesc) -> MaxPolyExpr {
    match d {
        ExprDesc::Const(c) => MaxPolyExpr::int(i64::from(*c)),
        ExprDesc::Var(i) => MaxPolyExpr::var(*i as usize),
        ExprDesc::Add(ps) => MaxPolyExpr::add(ps.iter().map(build_expr).collect()),
        ExprDesc::Mul(ps) => MaxPolyExpr::mul(ps.iter().map(build_expr).collect()),
        ExprDesc::Max(ps) => MaxPolyExpr::max(ps.iter().map(build_expr).collect()),
    }
}

proptest! {
    /// The comparison never certifies a pair that random evaluation refutes.
    #[test]
    fn compare_exprs_is_sound(pd in expr_strategy(), qd in expr_strategy(), seed in 0u64..1000) {
        use crtk_core::maxpoly::{eval_expr, rat};
        use rand::{RngCore, SeedableRng};
        let p = build_expr(&pd);
        let q = build_expr(&qd);
        let floor = rat(1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let verdict = compare_exprs(&p, &q, CompareMode::Weak, &floor, 2, &mut rng);
        if verdict == Verdict::Verified {
            let mut check_rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            for _ in 0..100 {
                let xs: Vec<_> = (0..2)
                    .map(|_| floor.clone() + rat((check_rng.next_u64() % 50) as i64))
                    .collect();
                let pv = eval_expr(&p, &xs).unwrap();
                let qv = eval_expr(&q, &xs).unwrap();
                prop_assert!(pv >= qv, "verified but {pv} < {qv} at {xs:?}");
            }
        }
    }

    /// Interpretation of a substituted term equals evaluation after
    /// substituting values (composition coherence).
    #[test]
    fn interpretation_commutes_with_substitution(
        d in pattern_strategy(),
        binds in proptest::collection::vec(ground_strategy(), 4),
    ) {
        use crtk_core::maxpoly::{eval_expr, interp_term, rat, Interpretation};
        let s = sig();
        let pattern = build_pattern(&s, &d);
        let mut interp = Interpretation::new(rat(1));
        for id in s.ids() {
            let arity = s.sym(id).arity as usize;
            // additive assignment: sum of arguments plus one
            let mut parts: Vec<MaxPolyExpr> =
                (0..arity).map(MaxPolyExpr::var).collect();
            parts.push(MaxPolyExpr::int(1));
            interp.assign(id, MaxPolyExpr::add(parts));
        }
        let sub: crtk_core::Substitution = (0..4u8)
            .map(|i| {
                (
                    Arc::from(format!("v{i}")),
                    build_ground(&s, &binds[i as usize]),
                )
            })
            .collect();
        let instantiated = substitute(&pattern, &sub).unwrap();
        let direct = eval_expr(&interp_term(&interp, &s, &instantiated).unwrap(), &[]).unwrap();

        // evaluate the pattern's interpretation at the bound values
        let vars = pattern.vars();
        let var_index: BTreeMap<Arc<str>, usize> = vars
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let pattern_expr =
            crtk_core::maxpoly::interp_term_with(&interp, &s, &pattern, &var_index).unwrap();
        let values: Vec<_> = vars
            .iter()
            .map(|v| {
                let bound = sub.get(v).unwrap();
                eval_expr(&interp_term(&interp, &s, bound).unwrap(), &[]).unwrap()
            })
            .collect();
        let composed = eval_expr(&pattern_expr, &values).unwrap();
        prop_assert_eq!(direct, composed);
    }
}
