//! Shipped example programs with their companion certificate files.
//!
//! The sources are embedded so the corpus command and the test suites work
//! from any directory; the same files live under `fixtures/` for use with
//! the CLI.

use crtk_core::program::Program;

use crate::parse::{self, ParseError};

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub program: &'static str,
    pub interp: Option<&'static str>,
    pub precedence: Option<&'static str>,
    pub set_interp: Option<&'static str>,
}

pub const BOOLEANS: Fixture = Fixture {
    name: "booleans",
    program: include_str!("../fixtures/booleans.trs"),
    interp: Some(include_str!("../fixtures/booleans.interp")),
    precedence: None,
    set_interp: Some(include_str!("../fixtures/booleans.si")),
};

pub const MEMBERSHIP: Fixture = Fixture {
    name: "membership",
    program: include_str!("../fixtures/membership.trs"),
    interp: Some(include_str!("../fixtures/membership.interp")),
    precedence: None,
    set_interp: Some(include_str!("../fixtures/membership.si")),
};

pub const FIRSTN: Fixture = Fixture {
    name: "first-n",
    program: include_str!("../fixtures/firstn.trs"),
    interp: None,
    precedence: None,
    set_interp: Some(include_str!("../fixtures/firstn.si")),
};

pub const SAT3: Fixture = Fixture {
    name: "sat3",
    program: include_str!("../fixtures/sat3.trs"),
    interp: Some(include_str!("../fixtures/sat3.interp")),
    precedence: None,
    set_interp: None,
};

pub const QBF: Fixture = Fixture {
    name: "qbf",
    program: include_str!("../fixtures/qbf.trs"),
    interp: Some(include_str!("../fixtures/qbf.interp")),
    precedence: Some(include_str!("../fixtures/qbf.prec")),
    set_interp: None,
};

pub const CF_LAST: Fixture = Fixture {
    name: "cf-last",
    program: include_str!("../fixtures/cf_last.trs"),
    interp: None,
    precedence: None,
    set_interp: None,
};

pub const CF_NTH: Fixture = Fixture {
    name: "cf-nth",
    program: include_str!("../fixtures/cf_nth.trs"),
    interp: None,
    precedence: None,
    set_interp: None,
};

pub const CF_BOOL: Fixture = Fixture {
    name: "cf-bool",
    program: include_str!("../fixtures/cf_bool.trs"),
    interp: None,
    precedence: None,
    set_interp: None,
};

pub const ALL: [Fixture; 8] = [
    BOOLEANS, MEMBERSHIP, FIRSTN, SAT3, QBF, CF_LAST, CF_NTH, CF_BOOL,
];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().copied().find(|f| f.name == name)
}

impl Fixture {
    pub fn parse(&self) -> Result<Program, ParseError> {
        parse::parse_program(self.program)
    }
}

/// Regenerates the sat3 program source. The shipped file must match; the
/// guess rules enumerate, per clause decoration, every order-preserving
/// sublist of the clause's three identifiers.
pub fn sat3_source() -> String {
    let mut lines: Vec<String> = Vec::new();
    for l in [
        "# 3-SAT: a formula is a list of ternary clauses or3(l1,l2,l3) whose",
        "# literals decorate binary-word identifiers with e (positive) or neg",
        "# (negative). hyp guesses the set of identifiers assumed true, one",
        "# sublist choice per clause; ver evaluates the formula under it.",
        "mode nondeterministic",
        "constructors eps/0 c0/1 c1/1 ff/0 tt/0 nil/0 cons/2 neg/1 e/1 or3/3",
        "functions eq/2 or/2 and/2 ite/3 in/2 evl/2 ver/2 hyp/1 main f/1",
        "rule eq(eps,eps) -> tt",
        "rule eq(c0(x),c0(y)) -> eq(x,y)",
        "rule eq(c1(x),c1(y)) -> eq(x,y)",
        "rule eq(c0(x),c1(y)) -> ff",
        "rule eq(c1(x),c0(y)) -> ff",
        "rule or(tt,y) -> tt",
        "rule or(ff,y) -> y",
        "rule and(tt,y) -> y",
        "rule and(ff,y) -> ff",
        "rule ite(tt,y,z) -> y",
        "rule ite(ff,y,z) -> z",
        "rule in(a,nil) -> ff",
        "rule in(a,cons(b,l)) -> ite(eq(a,b),tt,in(a,l))",
        "rule evl(neg(n),l) -> ite(in(n,l),ff,tt)",
        "rule evl(e(n),l) -> ite(in(n,l),tt,ff)",
        "rule ver(nil,l) -> tt",
        "rule ver(cons(or3(x1,x2,x3),psi),l) -> and(or(or(evl(x1,l),evl(x2,l)),evl(x3,l)),ver(psi,l))",
        "rule hyp(nil) -> nil",
    ] {
        lines.push(String::from(l));
    }
    let subsets: [&[u8]; 8] = [&[], &[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]];
    for a in ["neg", "e"] {
        for b in ["neg", "e"] {
            for c in ["neg", "e"] {
                let lhs = format!("hyp(cons(or3({a}(x1),{b}(x2),{c}(x3)),l))");
                for sub in subsets {
                    let mut rhs = String::from("hyp(l)");
                    for i in sub.iter().rev() {
                        rhs = format!("cons(x{i},{rhs})");
                    }
                    lines.push(format!("rule {lhs} -> {rhs}"));
                }
            }
        }
    }
    lines.push(String::from("rule f(psi) -> ver(psi,hyp(psi))"));
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crtk_core::program::check_wellformed;

    #[test]
    fn every_fixture_parses_and_is_wellformed() {
        for fixture in ALL {
            let p = fixture
                .parse()
                .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
            let diags = check_wellformed(&p);
            assert!(diags.is_empty(), "{}: {diags:?}", fixture.name);
        }
    }

    #[test]
    fn shipped_sat3_matches_the_generator() {
        assert_eq!(SAT3.program, sat3_source());
    }

    #[test]
    fn companion_files_parse_against_their_programs() {
        use crtk_core::maxpoly::rat;
        for fixture in ALL {
            let p = fixture.parse().unwrap();
            if let Some(src) = fixture.interp {
                let interp = crate::parse::parse_interpretation(&p.signature, src, rat(1))
                    .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
                assert!(
                    interp.missing(&p.signature).is_empty(),
                    "{}: interpretation not total",
                    fixture.name
                );
            }
            if let Some(src) = fixture.precedence {
                crate::parse::parse_precedence(&p.signature, src)
                    .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
            }
            if let Some(src) = fixture.set_interp {
                let si = crate::parse::parse_set_interpretation(&p.signature, src)
                    .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
                assert!(
                    si.missing(&p.signature).is_empty(),
                    "{}: set interpretation not total",
                    fixture.name
                );
            }
        }
    }

    #[test]
    fn fixture_rule_counts() {
        assert_eq!(BOOLEANS.parse().unwrap().rules.len(), 13);
        assert_eq!(SAT3.parse().unwrap().rules.len(), 83);
        assert_eq!(QBF.parse().unwrap().rules.len(), 43);
    }

    #[test]
    fn every_fixture_round_trips_through_the_canonical_printer() {
        for fixture in ALL {
            let p = fixture.parse().unwrap();
            let printed = crate::parse::print_program(&p);
            let again = crate::parse::parse_program(&printed)
                .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
            assert_eq!(p, again, "{}", fixture.name);
            assert_eq!(printed, crate::parse::print_program(&again));
        }
    }
}
