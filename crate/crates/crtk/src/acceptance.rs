//! The acceptance corpus: nine checks tying the fixtures to independent
//! oracles and to the certificate checkers, with their time budgets pinned.
//! `cargo test` runs them through `tests/acceptance.rs`; the CLI runs them
//! via `crtk corpus`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crtk_core::consfree::{self, SetInterpretation};
use crtk_core::engine::{EvalBudget, EvalStatus, Session};
use crtk_core::maxpoly::{
    self, check_compatibility, classify_interp, eval_expr, interp_term, rat, CompareMode,
    InterpClass, Verdict,
};
use crtk_core::ppo::{check_ppo, replay_witness, Precedence};
use crtk_core::program::{detect_overlaps, Program};
use crtk_core::term::Term;

use crate::fixtures::{self, Fixture};
use crate::oracle::{
    enumerate_cnf, enumerate_qbf, qbf_eval, qbf_in_engine_domain, sat_brute_force, QbfSymbols,
    SatSymbols,
};
use crate::parse;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub tag: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub details: String,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[criterion {}] {} {} ({}) [{} ms]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.details,
            self.millis
        )
    }
}

type CriterionFn = fn(u64) -> Result<String, String>;

pub fn criteria() -> Vec<(u32, &'static str, &'static str, CriterionFn)> {
    vec![
        (
            1,
            "ppo",
            "qbf termination certificate accepted, reversed rejected",
            c1_ppo as CriterionFn,
        ),
        (
            2,
            "interp",
            "interpretation fixtures classify as declared",
            c2_interp,
        ),
        (
            3,
            "sat3",
            "3-SAT sweep agrees with the brute-force oracle",
            c3_sat,
        ),
        (
            4,
            "qbf",
            "QBF sweep agrees with the brute-force evaluator",
            c4_qbf,
        ),
        (
            5,
            "cache",
            "membership cache growth is polynomial with clean assertions",
            c5_cache,
        ),
        (
            6,
            "conspres",
            "canonical interpretation verified on cons-free programs",
            c6_conspres,
        ),
        (
            7,
            "nf",
            "normal forms belong to the interpretation of the call",
            c7_nf,
        ),
        (
            8,
            "confluence",
            "overlap-free fixtures are rule-order invariant",
            c8_confluence,
        ),
        (
            9,
            "monotone",
            "interpretations decrease along executed steps",
            c9_monotone,
        ),
    ]
}

/// Runs every criterion whose tag equals `filter`, in order.
pub fn run(filter: Option<&str>, seed: u64) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    for (id, tag, title, f) in criteria() {
        if let Some(pat) = filter {
            if tag != pat {
                continue;
            }
        }
        let start = Instant::now();
        let result = f(seed);
        let millis = start.elapsed().as_millis();
        let (passed, details) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        out.push(CriterionResult {
            id,
            tag,
            title,
            passed,
            details,
            millis,
        });
    }
    out
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn load(fixture: Fixture) -> Result<Program, String> {
    fixture
        .parse()
        .map_err(|e| format!("{}: parse error {e}", fixture.name))
}

fn budget() -> EvalBudget {
    EvalBudget::default()
}

// criterion 1 -------------------------------------------------------------

fn c1_ppo(_seed: u64) -> Result<String, String> {
    let start = Instant::now();
    let p = load(fixtures::QBF)?;
    let sig = &p.signature;
    let prec = parse::parse_precedence(sig, fixtures::QBF.precedence.unwrap())
        .map_err(|e| format!("precedence parse error: {e}"))?;
    let report = check_ppo(&p, &prec);
    if !report.all_oriented() {
        return Err(format!(
            "rules {:?} fail to orient under the shipped precedence",
            report.failing_rules()
        ));
    }
    for entry in &report.per_rule {
        let rule = &p.rules[entry.rule_index];
        let w = entry.witness.as_ref().unwrap();
        if !replay_witness(sig, &prec, &rule.rhs, &rule.lhs, w) {
            return Err(format!(
                "witness for rule {} does not replay",
                entry.rule_index
            ));
        }
    }

    // the reversed chain must reject, failing at least the main rule
    let chain = [
        "f", "ver", "vhyp", "put", "or", "not", "hypList", "match", "ite", "append", "eq",
    ];
    let ids: Vec<_> = chain
        .iter()
        .map(|n| sig.lookup(n).ok_or_else(|| format!("missing symbol {n}")))
        .collect::<Result<_, _>>()?;
    let reversed: Vec<_> = ids.windows(2).map(|w| (w[1], w[0])).collect();
    let rev_prec = Precedence::from_constraints(sig, &reversed, &[])
        .map_err(|e| format!("reversed precedence build failed: {e}"))?;
    let rev_report = check_ppo(&p, &rev_prec);
    if rev_report.all_oriented() {
        return Err("reversed precedence was wrongly accepted".into());
    }
    if !rev_report.failing_rules().contains(&0) {
        return Err("reversed precedence did not fail on the main rule".into());
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("exceeded the 1 s budget: {elapsed:?}"));
    }
    Ok(format!(
        "{} rules oriented, witnesses replayed, reversed chain rejected in {elapsed:?}",
        p.rules.len()
    ))
}

// criterion 2 -------------------------------------------------------------

fn no_unknowns(rules: &[maxpoly::RuleVerdict]) -> bool {
    rules.iter().all(|r| r.verdict != Verdict::Unknown)
}

fn c2_interp(seed: u64) -> Result<String, String> {
    // booleans: strict + additive, all rules verified
    let start = Instant::now();
    let p = load(fixtures::BOOLEANS)?;
    let interp =
        parse::parse_interpretation(&p.signature, fixtures::BOOLEANS.interp.unwrap(), rat(1))
            .map_err(|e| e.to_string())?;
    let cls = classify_interp(&p, &interp, &mut rng(seed)).map_err(|e| e.to_string())?;
    if cls.class != InterpClass::Strict || !cls.additive {
        return Err(format!(
            "booleans classified as {} (additive: {})",
            cls.class.as_str(),
            cls.additive
        ));
    }
    if !cls.strict_compat.iter().all(|r| r.verdict.is_verified()) {
        return Err("booleans: some rule failed strict compatibility".into());
    }
    if !(no_unknowns(&cls.strict_compat) && no_unknowns(&cls.weak_compat)) {
        return Err("booleans: unknown verdicts on fixture rules".into());
    }
    let booleans_rules = cls.strict_compat.len();
    let t_booleans = start.elapsed();
    if t_booleans.as_secs_f64() >= 1.0 {
        return Err(format!("booleans check exceeded 1 s: {t_booleans:?}"));
    }

    // qbf: quasi + additive constructors
    let start = Instant::now();
    let p = load(fixtures::QBF)?;
    let interp = parse::parse_interpretation(&p.signature, fixtures::QBF.interp.unwrap(), rat(1))
        .map_err(|e| e.to_string())?;
    let cls = classify_interp(&p, &interp, &mut rng(seed)).map_err(|e| e.to_string())?;
    if cls.class != InterpClass::Quasi || !cls.additive {
        return Err(format!(
            "qbf classified as {} (additive: {})",
            cls.class.as_str(),
            cls.additive
        ));
    }
    if !no_unknowns(&cls.weak_compat) {
        return Err("qbf: unknown verdicts on fixture rules".into());
    }
    let t_qbf = start.elapsed();
    if t_qbf.as_secs_f64() >= 1.0 {
        return Err(format!("qbf check exceeded 1 s: {t_qbf:?}"));
    }

    // sat3: strict compatibility on every rule
    let start = Instant::now();
    let p = load(fixtures::SAT3)?;
    let interp = parse::parse_interpretation(&p.signature, fixtures::SAT3.interp.unwrap(), rat(1))
        .map_err(|e| e.to_string())?;
    let compat = check_compatibility(&p, &interp, CompareMode::Strict, &mut rng(seed))
        .map_err(|e| e.to_string())?;
    if !compat.iter().all(|r| r.verdict.is_verified()) {
        let failing: Vec<usize> = compat
            .iter()
            .filter(|r| !r.verdict.is_verified())
            .map(|r| r.rule_index)
            .collect();
        return Err(format!("sat3 rules {failing:?} fail strict compatibility"));
    }
    let cls = classify_interp(&p, &interp, &mut rng(seed)).map_err(|e| e.to_string())?;
    if cls.class != InterpClass::Strict || !cls.additive {
        return Err(format!(
            "sat3 classified as {} (additive: {})",
            cls.class.as_str(),
            cls.additive
        ));
    }
    let t_sat = start.elapsed();
    if t_sat.as_secs_f64() >= 1.0 {
        return Err(format!("sat3 check exceeded 1 s: {t_sat:?}"));
    }

    Ok(format!(
        "booleans strict+additive ({booleans_rules} rules), qbf quasi+additive, sat3 strict on {} rules; {:.0?}/{:.0?}/{:.0?}",
        compat.len(),
        t_booleans,
        t_qbf,
        t_sat
    ))
}

// criterion 3 -------------------------------------------------------------

fn c3_sat(_seed: u64) -> Result<String, String> {
    let start = Instant::now();
    let p = load(fixtures::SAT3)?;
    let syms = SatSymbols::resolve(&p.signature).ok_or("sat3 symbols missing")?;
    let mut session = Session::new(&p).map_err(|e| e.to_string())?;
    let formulas = enumerate_cnf(3, 3);
    let mut sat_count = 0u64;
    for (i, f) in formulas.iter().enumerate() {
        if i % 512 == 0 {
            session.clear_caches();
        }
        let term = syms.encode(f);
        let out = session
            .nd_value(syms.main, vec![term], &budget())
            .map_err(|e| e.to_string())?;
        if !out.complete {
            return Err(format!("budget exhausted on formula {i}"));
        }
        let got = match out.value.as_ref().and_then(|v| v.root()) {
            Some(root) if root == syms.tt => true,
            Some(root) if root == syms.ff => false,
            other => return Err(format!("formula {i}: unexpected verdict {other:?}")),
        };
        let expected = sat_brute_force(f, 3);
        if got != expected {
            return Err(format!(
                "formula {i} disagrees: program {got}, oracle {expected} ({f:?})"
            ));
        }
        if got {
            sat_count += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 300 {
        return Err(format!("exceeded the 5 min budget: {elapsed:?}"));
    }
    Ok(format!(
        "{} formulas ({} satisfiable) agree exactly in {elapsed:.0?}",
        formulas.len(),
        sat_count
    ))
}

// criterion 4 -------------------------------------------------------------

fn c4_qbf(_seed: u64) -> Result<String, String> {
    let start = Instant::now();
    let p = load(fixtures::QBF)?;
    let syms = QbfSymbols::resolve(&p.signature).ok_or("qbf symbols missing")?;
    let mut session = Session::new(&p).map_err(|e| e.to_string())?;
    let formulas = enumerate_qbf(3, 7);
    let mut in_domain = 0u64;
    let mut true_count = 0u64;
    for (i, f) in formulas.iter().enumerate() {
        if i % 512 == 0 {
            session.clear_caches();
        }
        let term = syms.encode(f);
        let out = session
            .nd_value(syms.main, vec![term], &budget())
            .map_err(|e| e.to_string())?;
        if !out.complete {
            return Err(format!("budget exhausted on formula {i}"));
        }
        let verdict = out.value.as_ref().and_then(|v| v.root());
        if qbf_in_engine_domain(f) {
            in_domain += 1;
            let expected = qbf_eval(f, &mut [false; 3]);
            let got = match verdict {
                Some(root) if root == syms.t_sym => true,
                Some(root) if root == syms.f_sym => false,
                other => {
                    return Err(format!(
                        "formula {i}: no boolean verdict ({other:?}, {f:?})"
                    ))
                }
            };
            if got != expected {
                return Err(format!(
                    "formula {i} disagrees: program {got}, oracle {expected} ({f:?})"
                ));
            }
            if got {
                true_count += 1;
            }
        } else if verdict.is_some() {
            return Err(format!(
                "off-domain formula {i} unexpectedly evaluated to {verdict:?} ({f:?})"
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 600 {
        return Err(format!("exceeded the 10 min budget: {elapsed:?}"));
    }
    Ok(format!(
        "{} formulas ({} evaluable, {} true) agree; the rest undefined as predicted; {elapsed:.0?}",
        formulas.len(),
        in_domain,
        true_count
    ))
}

// criterion 5 -------------------------------------------------------------

fn word_id(sig: &crtk_core::Signature, k: u64, bits: u32) -> Term {
    let c0 = sig.lookup("c0").unwrap();
    let c1 = sig.lookup("c1").unwrap();
    let eps = sig.lookup("eps").unwrap();
    let mut t = Term::constant(eps);
    for b in 0..bits {
        let sym = if (k >> b) & 1 == 1 { c1 } else { c0 };
        t = Term::app(sym, vec![t]);
    }
    t
}

fn id_list(sig: &crtk_core::Signature, n: u64, bits: u32) -> Term {
    let cons = sig.lookup("cons").unwrap();
    let nil = sig.lookup("nil").unwrap();
    let mut t = Term::constant(nil);
    for k in (0..n).rev() {
        t = Term::app(cons, vec![word_id(sig, k, bits), t]);
    }
    t
}

fn c5_cache(_seed: u64) -> Result<String, String> {
    let p = load(fixtures::MEMBERSHIP)?;
    let sig = &p.signature;
    let si = parse::parse_set_interpretation(sig, fixtures::MEMBERSHIP.set_interp.unwrap())
        .map_err(|e| e.to_string())?;
    let inq = sig.lookup("in").ok_or("missing `in`")?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut counts = Vec::new();
    for n in [8u64, 16, 32] {
        // the searched identifier is absent, forcing a full scan
        let key = word_id(sig, 63, 6);
        let list = id_list(sig, n, 6);
        let out = consfree::eval_memo(&p, &si, inq, vec![key, list], &budget())
            .map_err(|e| e.to_string())?;
        if out.status != EvalStatus::Ok {
            return Err(format!("evaluation failed at n={n}: {:?}", out.status));
        }
        if !out.assertions.clean() {
            return Err(format!(
                "n={n}: {} cache-shape violations",
                out.assertions.violations.len()
            ));
        }
        counts.push((n, out.stats.cache_entries));
        points.push(((n as f64).ln(), (out.stats.cache_entries as f64).ln()));
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let exponent = num / den;
    if exponent > 2.5 {
        return Err(format!(
            "power-law exponent {exponent:.2} exceeds 2.5 ({counts:?})"
        ));
    }
    Ok(format!(
        "cache entries {counts:?}, exponent {exponent:.2} <= 2.5, zero assertion violations"
    ))
}

// criterion 6 -------------------------------------------------------------

fn c6_conspres(seed: u64) -> Result<String, String> {
    let mut names = Vec::new();
    for fixture in [fixtures::CF_LAST, fixtures::CF_NTH, fixtures::CF_BOOL] {
        let p = load(fixture)?;
        let (cons_free, violations) = crtk_core::program::is_cons_free(&p);
        if !cons_free {
            return Err(format!("{}: not cons-free: {violations:?}", fixture.name));
        }
        let si = SetInterpretation::canonical(&p).map_err(|e| e.to_string())?;
        let report = consfree::check_constructor_preserving(&p, &si, 200, 12, &mut rng(seed))
            .map_err(|e| e.to_string())?;
        if !report.all_verified() {
            return Err(format!(
                "{}: sampling falsified the canonical interpretation: {report:?}",
                fixture.name
            ));
        }
        names.push(fixture.name);
    }
    Ok(format!(
        "{names:?} verified at 200 substitutions per rule, size ceiling 12"
    ))
}

// criterion 7 -------------------------------------------------------------

fn fixture_calls(name: &str) -> Vec<&'static str> {
    match name {
        "booleans" => vec![
            "eq(c0(c1(eps)),c0(c1(eps)))",
            "eq(c1(c0(c1(eps))),c1(c1(c1(eps))))",
            "or(tt,ff)",
            "or(ff,tt)",
            "and(tt,tt)",
            "and(ff,tt)",
            "ite(tt,ff,tt)",
            "ite(ff,ff,tt)",
            "in(c0(c1(eps)),cons(c1(c0(eps)),cons(c0(c1(eps)),nil)))",
            "in(c0(c0(eps)),cons(c1(c0(eps)),nil))",
        ],
        "membership" => vec![
            "in(c0(c1(eps)),cons(c1(c0(eps)),cons(c0(c1(eps)),nil)))",
            "in(c1(c1(eps)),cons(c0(c0(eps)),cons(c0(c1(eps)),nil)))",
        ],
        "first-n" => vec!["f(s(s(s(s(s(s(zero)))))))"],
        "cf-last" => vec!["last(cons(c0(eps),cons(c1(eps),cons(eps,nil))))"],
        "cf-nth" => vec!["nth(s(zero),cons(tt,cons(ff,nil)))"],
        "cf-bool" => vec!["or(tt,ff)", "and(ff,tt)", "ite(tt,ff,tt)"],
        _ => vec![],
    }
}

fn c7_nf(_seed: u64) -> Result<String, String> {
    // fixtures paired with a constructor-preserving set interpretation: the
    // shipped boolean-range interpretations and the canonical subterm
    // closure on the cons-free micro programs
    let mut checked = 0u64;
    for fixture in [
        fixtures::BOOLEANS,
        fixtures::MEMBERSHIP,
        fixtures::CF_LAST,
        fixtures::CF_NTH,
        fixtures::CF_BOOL,
    ] {
        let p = load(fixture)?;
        let si = match fixture.set_interp {
            Some(src) => {
                parse::parse_set_interpretation(&p.signature, src).map_err(|e| e.to_string())?
            }
            None => SetInterpretation::canonical(&p).map_err(|e| e.to_string())?,
        };
        for call_src in fixture_calls(fixture.name) {
            let (f, args) = parse::parse_call(&p.signature, call_src).map_err(|e| e.to_string())?;
            let out =
                consfree::eval_memo(&p, &si, f, args, &budget()).map_err(|e| e.to_string())?;
            if out.status != EvalStatus::Ok {
                return Err(format!(
                    "{}: `{call_src}` -> {:?}",
                    fixture.name, out.status
                ));
            }
            if out.assertions.nf_member != Some(true) {
                return Err(format!(
                    "{}: normal form of `{call_src}` escapes the interpretation",
                    fixture.name
                ));
            }
            if !out.assertions.clean() {
                return Err(format!(
                    "{}: cache-shape violations on `{call_src}`",
                    fixture.name
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} fixture calls, zero violations"))
}

// criterion 8 -------------------------------------------------------------

fn permute_rules(p: &Program, rng: &mut ChaCha8Rng) -> Program {
    use rand::Rng;
    let mut rules = p.rules.clone();
    // Fisher-Yates
    for i in (1..rules.len()).rev() {
        let j = rng.gen_range(0..=i);
        rules.swap(i, j);
    }
    Program::new(p.signature.clone(), rules, p.main, p.mode)
}

fn c8_confluence(seed: u64) -> Result<String, String> {
    let fixtures_checked = [
        fixtures::BOOLEANS,
        fixtures::MEMBERSHIP,
        fixtures::FIRSTN,
        fixtures::CF_LAST,
        fixtures::CF_NTH,
        fixtures::CF_BOOL,
    ];
    let mut runs = 0u64;
    let mut r = rng(seed);
    for fixture in fixtures_checked {
        let p = load(fixture)?;
        let report = detect_overlaps(&p);
        if !report.is_empty() {
            return Err(format!(
                "{}: unexpected overlaps {:?}",
                fixture.name, report.pairs
            ));
        }
        let calls = fixture_calls(fixture.name);
        let mut baseline = Vec::new();
        {
            let mut session = Session::new(&p).map_err(|e| e.to_string())?;
            for call_src in &calls {
                let (f, args) =
                    parse::parse_call(&p.signature, call_src).map_err(|e| e.to_string())?;
                let det = session
                    .eval_cbv(f, args.clone(), &budget())
                    .map_err(|e| e.to_string())?;
                let nd = session
                    .eval_nd(f, args, &budget())
                    .map_err(|e| e.to_string())?;
                if !nd.complete || nd.values.len() != 1 {
                    return Err(format!(
                        "{}: `{call_src}` normal-form set is not a singleton",
                        fixture.name
                    ));
                }
                if nd.values.iter().next() != det.value.as_ref() {
                    return Err(format!(
                        "{}: nd and det disagree on `{call_src}`",
                        fixture.name
                    ));
                }
                baseline.push(det.value);
            }
        }
        for _ in 0..20 {
            let permuted = permute_rules(&p, &mut r);
            let mut session = Session::new(&permuted).map_err(|e| e.to_string())?;
            for (call_src, expected) in calls.iter().zip(&baseline) {
                let (f, args) =
                    parse::parse_call(&permuted.signature, call_src).map_err(|e| e.to_string())?;
                let det = session
                    .eval_cbv(f, args, &budget())
                    .map_err(|e| e.to_string())?;
                if &det.value != expected {
                    return Err(format!(
                        "{}: rule permutation changed the value of `{call_src}`",
                        fixture.name
                    ));
                }
                runs += 1;
            }
        }
    }
    Ok(format!(
        "6 fixtures, 20 permutations each, {runs} evaluations invariant; nd sets singletons"
    ))
}

// criterion 9 -------------------------------------------------------------

fn c9_monotone(_seed: u64) -> Result<String, String> {
    let p = load(fixtures::BOOLEANS)?;
    let sig = &p.signature;
    let interp = parse::parse_interpretation(sig, fixtures::BOOLEANS.interp.unwrap(), rat(1))
        .map_err(|e| e.to_string())?;
    let mut session = Session::new(&p).map_err(|e| e.to_string())?;
    let mut steps_checked = 0u64;
    for call_src in fixture_calls("booleans") {
        let (f, args) = parse::parse_call(sig, call_src).map_err(|e| e.to_string())?;
        let out = session
            .eval_cbv_logged(f, args, &budget(), true)
            .map_err(|e| e.to_string())?;
        if out.status != EvalStatus::Ok {
            return Err(format!("`{call_src}` -> {:?}", out.status));
        }
        for (u, v) in out.steps_log.unwrap() {
            let left = eval_expr(
                &interp_term(&interp, sig, &u).map_err(|e| e.to_string())?,
                &[],
            )
            .map_err(|e| e.to_string())?;
            let right = eval_expr(
                &interp_term(&interp, sig, &v).map_err(|e| e.to_string())?,
                &[],
            )
            .map_err(|e| e.to_string())?;
            if left <= right {
                return Err(format!(
                    "step {} -> {} does not decrease: {left} <= {right}",
                    u.display(sig),
                    v.display(sig)
                ));
            }
            steps_checked += 1;
        }
    }
    Ok(format!(
        "{steps_checked} executed steps strictly decrease under the interpretation"
    ))
}
