//! Command-line interface: certificate checking, evaluation and the
//! acceptance corpus.
//!
//! Exit codes: 0 success or verdict delivered, 1 usage, 2 parse error,
//! 3 contract violation (including corpus failures), 4 budget exhausted,
//! 5 assertion machinery fired.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crtk_core::consfree::{self, CpVerdict, SetInterpretation};
use crtk_core::engine::{CallTree, EvalBudget, EvalStats, EvalStatus, Session};
use crtk_core::maxpoly::{classify_interp, rat, InterpClass, Rat, Verdict};
use crtk_core::ppo::{check_ppo, synthesize_precedence, Synthesis};
use crtk_core::program::{check_wellformed, detect_overlaps, is_cons_free, Mode, Program};
use crtk_core::term::TermOrder;

use crate::acceptance;
use crate::parse;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CONTRACT: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_ASSERT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "crtk",
    about = "Constructor term rewriting toolkit: implicit-complexity certificates and memoized evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Args)]
struct BudgetArgs {
    /// Maximum number of rule applications.
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    /// Maximum size of any constructed term.
    #[arg(long, default_value_t = 100_000)]
    max_term_size: u64,
    /// Maximum number of cache entries; 0 disables memoization.
    #[arg(long = "max-cache", default_value_t = 1_000_000)]
    max_cache: u64,
}

impl BudgetArgs {
    fn budget(&self) -> EvalBudget {
        EvalBudget {
            max_steps: self.max_steps,
            max_term_size: self.max_term_size,
            max_cache_entries: self.max_cache,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check certificates: well-formedness, overlaps, cons-freeness, path
    /// ordering, interpretation classification, constructor preservation.
    Check {
        /// Program file.
        program: PathBuf,
        /// Precedence file to check; synthesized when absent.
        #[arg(long)]
        precedence: Option<PathBuf>,
        /// Max-Poly interpretation file to classify.
        #[arg(long)]
        interp: Option<PathBuf>,
        /// Set-interpretation file to check for constructor preservation.
        #[arg(long = "set-interp")]
        set_interp: Option<PathBuf>,
        /// Domain floor for interpretations, as `p` or `p/q`.
        #[arg(long, default_value = "1")]
        floor: String,
        /// Seed for every sampled verdict.
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
        /// Substitutions sampled per rule in the preservation check.
        #[arg(long, default_value_t = 200)]
        samples: u32,
        /// Node budget for precedence synthesis.
        #[arg(long, default_value_t = 1_000_000)]
        synthesis_budget: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate a call expression under the program.
    Eval {
        /// Program file.
        program: PathBuf,
        /// Call expression, e.g. `f(cons(tt,nil))`.
        call: String,
        /// Collect the full set of constructor normal forms and its maximum.
        #[arg(long)]
        nd: bool,
        /// Run through the memoized evaluator with cache-shape assertions;
        /// requires --set-interp.
        #[arg(long)]
        memo: bool,
        /// Set-interpretation file for --memo.
        #[arg(long = "set-interp")]
        set_interp: Option<PathBuf>,
        /// Print the call tree (deterministic mode, memoization disabled).
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the acceptance corpus.
    Corpus {
        /// Only run criteria whose tag contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Entry point; returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> u8 {
    let all: Vec<String> = std::iter::once(String::from("crtk")).chain(args).collect();
    let cli = match Cli::try_parse_from(all) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through errors with exit code 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    // evaluation can recurse deeply; give the worker a large stack
    let handle = std::thread::Builder::new()
        .name(String::from("crtk-worker"))
        .stack_size(256 << 20)
        .spawn(move || dispatch(cli))
        .expect("spawn worker");
    handle.join().unwrap_or(EXIT_ASSERT)
}

fn dispatch(cli: Cli) -> u8 {
    match cli.command {
        Command::Check {
            program,
            precedence,
            interp,
            set_interp,
            floor,
            seed,
            samples,
            synthesis_budget,
            format,
        } => cmd_check(
            &program,
            precedence.as_deref(),
            interp.as_deref(),
            set_interp.as_deref(),
            &floor,
            seed,
            samples,
            synthesis_budget,
            format,
        ),
        Command::Eval {
            program,
            call,
            nd,
            memo,
            set_interp,
            trace,
            budget,
            seed,
            format,
        } => cmd_eval(
            &program,
            &call,
            nd,
            memo,
            set_interp.as_deref(),
            trace,
            &budget.budget(),
            seed,
            format,
        ),
        Command::Corpus {
            filter,
            seed,
            format,
        } => cmd_corpus(filter.as_deref(), seed, format),
    }
}

fn read(path: &std::path::Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_program(path: &std::path::Path) -> Result<Program, u8> {
    let src = read(path)?;
    parse::parse_program(&src).map_err(|e| {
        eprintln!("error: {}:{e}", path.display());
        EXIT_PARSE
    })
}

fn parse_floor(s: &str) -> Result<Rat, u8> {
    let parts: Vec<&str> = s.split('/').collect();
    // the domain is [floor, inf) over the nonnegative rationals
    let parse_int = |t: &str| -> Result<u64, u8> {
        t.trim().parse::<u64>().map_err(|_| {
            eprintln!("error: invalid floor `{s}` (expected a nonnegative rational)");
            EXIT_USAGE
        })
    };
    match parts.as_slice() {
        [n] => Ok(rat(parse_int(n)? as i64)),
        [n, d] => {
            let d = parse_int(d)?;
            if d == 0 {
                eprintln!("error: zero denominator in floor");
                return Err(EXIT_USAGE);
            }
            Ok(Rat::new(parse_int(n)?.into(), d.into()))
        }
        _ => {
            eprintln!("error: invalid floor `{s}`");
            Err(EXIT_USAGE)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    program: &std::path::Path,
    precedence: Option<&std::path::Path>,
    interp: Option<&std::path::Path>,
    set_interp: Option<&std::path::Path>,
    floor: &str,
    seed: u64,
    samples: u32,
    synthesis_budget: u64,
    format: Format,
) -> u8 {
    let p = match load_program(program) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let floor = match parse_floor(floor) {
        Ok(f) => f,
        Err(c) => return c,
    };
    let sig = &p.signature;
    let text = format == Format::Text;

    let diags = check_wellformed(&p);
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("wellformedness: {d}");
        }
        println!("status=ill-formed diagnostics={}", diags.len());
        return EXIT_CONTRACT;
    }

    let overlaps = detect_overlaps(&p);
    let (cons_free, cf_violations) = is_cons_free(&p);

    if text {
        println!("program: {} rules, mode {:?}", p.rules.len(), p.mode);
        println!(
            "overlaps: {} pairs, {} non-left-linear rules{}",
            overlaps.pairs.len(),
            overlaps.nonlinear_rules.len(),
            if p.mode == Mode::Confluent && !overlaps.is_empty() {
                " (warning: confluence was claimed)"
            } else {
                ""
            }
        );
        println!(
            "cons-free: {}",
            if cons_free {
                String::from("yes")
            } else {
                format!("no ({} violating occurrences)", cf_violations.len())
            }
        );
    }

    // path ordering: check a given precedence or synthesize one
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let ppo_status;
    match precedence {
        Some(path) => {
            let src = match read(path) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let prec = match parse::parse_precedence(sig, &src) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {}:{e}", path.display());
                    return EXIT_PARSE;
                }
            };
            let report = check_ppo(&p, &prec);
            ppo_status = if report.all_oriented() { "yes" } else { "no" };
            if text {
                match report.all_oriented() {
                    true => println!("ppo: every rule orients under the given precedence"),
                    false => println!("ppo: rules {:?} fail to orient", report.failing_rules()),
                }
            }
        }
        None => match synthesize_precedence(&p, synthesis_budget) {
            Synthesis::Found(prec) => {
                ppo_status = "yes";
                if text {
                    println!("ppo: synthesized a precedence:");
                    print!("{}", parse::print_precedence(sig, &prec));
                }
            }
            Synthesis::ProvenNone => {
                ppo_status = "no";
                if text {
                    println!("ppo: no precedence orients the program");
                }
            }
            Synthesis::Exhausted => {
                ppo_status = "unknown";
                if text {
                    println!("ppo: search budget exhausted");
                }
            }
        },
    }

    // interpretation classification
    let mut interp_class = InterpClass::None;
    let mut additive = false;
    let mut interp_given = false;
    if let Some(path) = interp {
        interp_given = true;
        let src = match read(path) {
            Ok(s) => s,
            Err(c) => return c,
        };
        let parsed = match parse::parse_interpretation(sig, &src, floor.clone()) {
            Ok(i) => i,
            Err(e) => {
                eprintln!("error: {}:{e}", path.display());
                return EXIT_PARSE;
            }
        };
        match classify_interp(&p, &parsed, &mut rng) {
            Ok(cls) => {
                interp_class = cls.class;
                additive = cls.additive;
                if text {
                    println!(
                        "interpretation: {} (additive constructors: {})",
                        cls.class.as_str(),
                        if cls.additive { "yes" } else { "no" }
                    );
                    if cls.class != InterpClass::Strict {
                        let failing: Vec<usize> = cls
                            .strict_compat
                            .iter()
                            .filter(|rv| !rv.verdict.is_verified())
                            .map(|rv| rv.rule_index)
                            .collect();
                        if !failing.is_empty() {
                            println!(
                                "  not strict: {} rules fail strict compatibility (first: rule {})",
                                failing.len(),
                                failing[0]
                            );
                        }
                    }
                    // detailed counterexamples only where classification failed
                    if cls.class == InterpClass::None {
                        for rv in &cls.weak_compat {
                            if let Verdict::Falsified(cex) = &rv.verdict {
                                println!(
                                    "  rule {}: weak compatibility falsified at {} ({} vs {})",
                                    rv.rule_index,
                                    format_assignment(&cex.assignment),
                                    cex.lhs,
                                    cex.rhs
                                );
                            }
                        }
                        for (sym, v) in &cls.subterm {
                            if let Verdict::Falsified(cex) = v {
                                println!(
                                    "  symbol {}: sub-term property falsified at {}",
                                    sig.name(*sym),
                                    format_assignment(&cex.assignment)
                                );
                            }
                        }
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONTRACT;
            }
        }
    }

    // set-interpretation preservation check
    let mut cp_status = "none";
    if let Some(path) = set_interp {
        let src = match read(path) {
            Ok(s) => s,
            Err(c) => return c,
        };
        let si = match parse::parse_set_interpretation(sig, &src) {
            Ok(si) => si,
            Err(e) => {
                eprintln!("error: {}:{e}", path.display());
                return EXIT_PARSE;
            }
        };
        match consfree::check_constructor_preserving(&p, &si, samples, 12, &mut rng) {
            Ok(report) => {
                cp_status = if report.all_verified() {
                    "verified"
                } else if report
                    .per_rule
                    .iter()
                    .any(|(_, v)| matches!(v, CpVerdict::Falsified(_)))
                {
                    "falsified"
                } else {
                    "overflow"
                };
                if text {
                    println!(
                        "constructor-preserving: {cp_status} ({} substitutions per rule, seed {seed})",
                        report.samples_per_rule
                    );
                    for (ri, v) in &report.per_rule {
                        if let CpVerdict::Falsified(cex) = v {
                            println!(
                                "  rule {ri}: subterm {} escapes via {} under {}",
                                cex.rhs_subterm.display(sig),
                                cex.offending.display(sig),
                                parse::display_substitution(sig, &cex.substitution)
                            );
                        }
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONTRACT;
            }
        }
    } else if cons_free {
        // a cons-free program always has its canonical interpretation
        cp_status = "verified";
    }

    // implied complexity class per the certificate flags and the mode
    let strict = interp_class == InterpClass::Strict;
    let quasi = matches!(interp_class, InterpClass::Strict | InterpClass::Quasi);
    let ppo_yes = ppo_status == "yes";
    let cp = cp_status == "verified";
    let implied = match p.mode {
        _ if cp => "PTIME",
        Mode::Confluent if strict && additive => "PTIME",
        Mode::Confluent if quasi && additive && ppo_yes => "PTIME",
        Mode::Nondeterministic if strict && additive => "NPTIME",
        Mode::Nondeterministic if quasi && additive && ppo_yes => "PSPACE",
        _ => "none",
    };
    if text {
        println!("implied class evidence: {implied}");
    }

    let falsified = (interp_given && interp_class == InterpClass::None)
        || cp_status == "falsified"
        || ppo_status == "no";
    println!(
        "mode={} rules={} overlap_pairs={} nonlinear_rules={} cons_free={} ppo={} interp_class={} additive={} constructor_preserving={} implied_class={} seed={} status={}",
        match p.mode {
            Mode::Confluent => "confluent",
            Mode::Nondeterministic => "nondeterministic",
        },
        p.rules.len(),
        overlaps.pairs.len(),
        overlaps.nonlinear_rules.len(),
        if cons_free { "yes" } else { "no" },
        ppo_status,
        interp_class.as_str(),
        if additive { "yes" } else { "no" },
        cp_status,
        implied,
        seed,
        if falsified { "falsified" } else { "verified" },
    );
    EXIT_OK
}

fn format_assignment(xs: &[Rat]) -> String {
    let parts: Vec<String> = xs.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn print_stats(stats: &EvalStats, status: EvalStatus) {
    println!(
        "status={} steps={} cache_entries={} cache_total_size={} max_term_size={}",
        status.as_str(),
        stats.steps,
        stats.cache_entries,
        stats.cache_total_size,
        stats.max_term_size
    );
}

fn status_code(status: EvalStatus) -> u8 {
    if status.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_OK
    }
}

fn print_tree(sig: &crtk_core::Signature, node: &CallTree, depth: usize) {
    let indent = "  ".repeat(depth);
    let args: Vec<String> = node
        .args
        .iter()
        .map(|a| a.display(sig).to_string())
        .collect();
    let value = match &node.value {
        Some(v) => format!(" = {}", v.display(sig)),
        None => String::from(" (no value)"),
    };
    println!(
        "{indent}({}, {}){}",
        sig.name(node.symbol),
        args.join(", "),
        value
    );
    for child in &node.children {
        print_tree(sig, child, depth + 1);
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    program: &std::path::Path,
    call: &str,
    nd: bool,
    memo: bool,
    set_interp: Option<&std::path::Path>,
    trace: bool,
    budget: &EvalBudget,
    seed: u64,
    format: Format,
) -> u8 {
    let _ = seed;
    let p = match load_program(program) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let diags = check_wellformed(&p);
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("wellformedness: {d}");
        }
        return EXIT_CONTRACT;
    }
    let sig = &p.signature;
    let (f, args) = match parse::parse_call(sig, call) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: call: {e}");
            return EXIT_PARSE;
        }
    };
    let text = format == Format::Text;

    if memo {
        let Some(si_path) = set_interp else {
            eprintln!("error: --memo needs --set-interp FILE");
            return EXIT_USAGE;
        };
        let src = match read(si_path) {
            Ok(s) => s,
            Err(c) => return c,
        };
        let si: SetInterpretation = match parse::parse_set_interpretation(sig, &src) {
            Ok(si) => si,
            Err(e) => {
                eprintln!("error: {}:{e}", si_path.display());
                return EXIT_PARSE;
            }
        };
        if nd {
            let out = match consfree::eval_memo_nd(&p, &si, f, args, budget) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONTRACT;
                }
            };
            if text {
                print_nd_values(sig, &out.values);
                println!(
                    "assertions: base {} / {} distinct subterms, {} key args and {} values checked, {} violations, nf-member {:?}",
                    out.assertions.witness_base_len,
                    out.assertions.witness_subterm_count,
                    out.assertions.checked_key_args,
                    out.assertions.checked_values,
                    out.assertions.violations.len(),
                    out.assertions.nf_member
                );
            }
            print_stats(&out.stats, out.status);
            println!(
                "complete={} values={} assertion_violations={}",
                out.complete,
                out.values.len(),
                out.assertions.violations.len()
            );
            if !out.assertions.clean() {
                return EXIT_ASSERT;
            }
            return status_code(out.status);
        }
        let out = match consfree::eval_memo(&p, &si, f, args, budget) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONTRACT;
            }
        };
        if text {
            match &out.value {
                Some(v) => println!("value: {}", v.display(sig)),
                None => println!("no value ({})", out.status.as_str()),
            }
            println!(
                "assertions: base {} / {} distinct subterms, {} key args and {} values checked, {} violations, nf-member {:?}",
                out.assertions.witness_base_len,
                out.assertions.witness_subterm_count,
                out.assertions.checked_key_args,
                out.assertions.checked_values,
                out.assertions.violations.len(),
                out.assertions.nf_member
            );
        }
        print_stats(&out.stats, out.status);
        println!(
            "value={} assertion_violations={}",
            out.value
                .as_ref()
                .map_or(String::from("-"), |v| v.display(sig).to_string()),
            out.assertions.violations.len()
        );
        if !out.assertions.clean() {
            return EXIT_ASSERT;
        }
        return status_code(out.status);
    }

    let mut session = match Session::new(&p) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONTRACT;
        }
    };

    if trace {
        let out = match session.trace_call_tree(f, args, budget) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONTRACT;
            }
        };
        if text {
            print_tree(sig, &out.tree, 0);
            match &out.value {
                Some(v) => println!("value: {}", v.display(sig)),
                None => println!("no value ({})", out.status.as_str()),
            }
        }
        print_stats(&out.stats, out.status);
        println!(
            "value={} tree_nodes={}",
            out.value
                .as_ref()
                .map_or(String::from("-"), |v| v.display(sig).to_string()),
            out.tree.node_count()
        );
        return status_code(out.status);
    }

    if nd {
        let out = match session.eval_nd(f, args.clone(), budget) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONTRACT;
            }
        };
        let ord = TermOrder::new(sig);
        let max = ord.max(out.values.iter().cloned());
        if text {
            print_nd_values(sig, &out.values);
            match &max {
                Some(v) => println!("max: {}", v.display(sig)),
                None => println!("max: undefined (empty set)"),
            }
        }
        print_stats(&out.stats, out.status);
        println!(
            "complete={} values={} max={}",
            out.complete,
            out.values.len(),
            max.as_ref()
                .map_or(String::from("-"), |v| v.display(sig).to_string())
        );
        return status_code(out.status);
    }

    let out = match session.eval_cbv(f, args, budget) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONTRACT;
        }
    };
    if text {
        match &out.value {
            Some(v) => println!("value: {}", v.display(sig)),
            None => println!("no value ({})", out.status.as_str()),
        }
    }
    print_stats(&out.stats, out.status);
    println!(
        "value={}",
        out.value
            .as_ref()
            .map_or(String::from("-"), |v| v.display(sig).to_string())
    );
    status_code(out.status)
}

fn print_nd_values(
    sig: &crtk_core::Signature,
    values: &std::collections::BTreeSet<crtk_core::Term>,
) {
    let ord = TermOrder::new(sig);
    let mut sorted: Vec<_> = values.iter().collect();
    sorted.sort_by(|a, b| ord.cmp(a, b));
    println!("normal forms ({}):", sorted.len());
    for v in sorted {
        println!("  {}", v.display(sig));
    }
}

fn cmd_corpus(filter: Option<&str>, seed: u64, format: Format) -> u8 {
    let results = acceptance::run(filter, seed);
    if results.is_empty() {
        eprintln!("error: no criterion matches the filter");
        return EXIT_USAGE;
    }
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    if format == Format::Text {
        println!("---");
        println!("{passed}/{} criteria passed (seed {seed})", results.len());
    }
    println!(
        "criteria={} passed={} failed={} seed={}",
        results.len(),
        passed,
        results.len() - passed,
        seed
    );
    if passed == results.len() {
        EXIT_OK
    } else {
        EXIT_CONTRACT
    }
}
