//! Command line surface over the gapseq library.
//!
//! Every command writes deterministic output: identical invocations produce
//! identical bytes (fixed field orders, no timestamps). Exit codes: 0
//! success, 1 failed verification, 2 usage, 3 domain error, 4 scan budget
//! exhausted.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gapseq::catalog::{self, SequenceName};
use gapseq::transducer::{self, WeightedTransducer};
use gapseq::words;
use gapseq::{gaps, kernel, matching, residue, verify, Error};

const DECORATED_HELP: &str = "\
The decorated seven-letter alphabet is rendered in ASCII, in canonical
order:
  a     the undecorated letter
  bh<   hatted b, connector pointing left
  bh>   hatted b, connector pointing right
  b<    b, connector pointing left
  b>    b, connector pointing right
  c<    c, connector pointing left
  c>    c, connector pointing right";

#[derive(Parser)]
#[command(
    name = "gapseq",
    version,
    about = "Thue-Morse gap sequences, matchings, and discrepancy transducers",
    after_long_help = DECORATED_HELP
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Scan budget (letters) for lazily extended sequences.
    #[arg(long, global = true, env = "GAPSEQ_SCAN_BUDGET")]
    budget: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print a prefix of a named sequence.
    #[command(after_long_help = DECORATED_HELP)]
    Generate {
        /// One of: tm, A, Abar, Aplus, B, Bbar, Bcheck.
        sequence: String,
        /// Number of letters.
        length: usize,
    },
    /// Classify a factor of the Thue-Morse word and print its gap sequence.
    Gaps {
        /// The factor, as a string of 0s and 1s.
        factor: String,
        /// Number of gaps to print.
        count: usize,
        /// morphic classifies and generates; scan only scans.
        #[arg(long, value_enum, default_value_t = GapMethod::Morphic)]
        method: GapMethod,
    },
    /// Print scaled discrepancies 3*D(N) for one N or a range a..b.
    Discrepancy {
        /// A single N or an inclusive range a..b.
        range: String,
        /// Computation route.
        #[arg(long, value_enum, default_value_t = DiscrepancyMethod::T2)]
        method: DiscrepancyMethod,
    },
    /// Work with the matching of the decorated word at a given depth.
    #[command(after_long_help = DECORATED_HELP)]
    Matching {
        /// Substitution depth k; the word has 4^k letters.
        depth: u32,
        #[command(subcommand)]
        action: MatchingAction,
    },
    /// Explore the kernel of a named sequence by fingerprints.
    Kernel {
        /// One of: tm, A, Abar, Aplus, B, Bbar.
        sequence: String,
        /// Kernel base.
        base: usize,
        /// Maximum depth.
        depth: usize,
        /// Fingerprint length.
        fingerprint: usize,
    },
    /// Find a position of the length-16^mu prefix of Bbar in a residue class.
    Residue {
        /// Prefix order.
        mu: u32,
        /// Modulus.
        modulus: u64,
        /// Residue.
        residue: u64,
        /// Digit-search bound.
        #[arg(long, default_value_t = 24)]
        bound: u32,
    },
    /// Evaluate the missing-digit exponential sum |G(ell/d, lambda, nu)|.
    Expsum {
        /// Odd modulus.
        d: u64,
        /// Numerator, 0 < ell < d.
        ell: u64,
        /// Lower level.
        lambda: u32,
        /// Largest level to report.
        nu_max: u32,
    },
    /// Dump, run, or reduce weighted transducers.
    Transducer {
        #[command(subcommand)]
        action: TransducerAction,
    },
    /// Run the cross-check suite; nonzero exit on any failure.
    Verify {
        /// Suite name (default: all).
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GapMethod {
    Morphic,
    Scan,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscrepancyMethod {
    Brute,
    Degree,
    T2,
    T2base2,
}

#[derive(Subcommand)]
enum MatchingAction {
    /// Print the links, one `i j dir` line each (R: left end is c>).
    Links,
    /// Rotate along the links and print the transformed word.
    Rotate,
    /// Print the degree of every position.
    Degrees,
}

#[derive(Subcommand)]
enum TransducerAction {
    /// Write a built-in transducer (t1, t2, t2base2) in text form.
    Dump {
        /// Which machine: t1, t2, or t2base2.
        which: String,
        /// Output file, `-` for standard output.
        file: String,
    },
    /// Load a transducer file and print its output sum at n.
    Run {
        /// Transducer file.
        file: PathBuf,
        /// Input number.
        n: u128,
    },
    /// Reduce a base-4 transducer file to base 2.
    Reduce {
        /// Input file.
        input: PathBuf,
        /// Output file, `-` for standard output.
        output: String,
    },
}

/// Failures carrying their process exit code.
enum Failure {
    Usage(String),
    Domain(String),
    Budget(String),
    ChecksFailed,
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(budget) = cli.budget {
        words::set_default_scan_budget(budget);
    }
    let mut rendered = String::new();
    let result = dispatch(&cli, &mut rendered);
    let write_result = match &cli.out {
        Some(path) => fs::write(path, rendered.as_bytes()).map_err(Failure::Io),
        None => io::stdout().write_all(rendered.as_bytes()).map_err(Failure::Io),
    };
    match result.and(write_result) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<(), Failure> {
    match &cli.command {
        Command::Generate { sequence, length } => cmd_generate(cli, sequence, *length, out),
        Command::Gaps { factor, count, method } => cmd_gaps(cli, factor, *count, *method, out),
        Command::Discrepancy { range, method } => cmd_discrepancy(cli, range, *method, out),
        Command::Matching { depth, action } => cmd_matching(cli, *depth, action, out),
        Command::Kernel { sequence, base, depth, fingerprint } => {
            cmd_kernel(cli, sequence, *base, *depth, *fingerprint, out)
        }
        Command::Residue { mu, modulus, residue, bound } => {
            cmd_residue(cli, *mu, *modulus, *residue, *bound, out)
        }
        Command::Expsum { d, ell, lambda, nu_max } => {
            cmd_expsum(cli, *d, *ell, *lambda, *nu_max, out)
        }
        Command::Transducer { action } => cmd_transducer(cli, action, out),
        Command::Verify { suite } => cmd_verify(cli, suite, out),
    }
}

fn parse_sequence(name: &str) -> Result<SequenceName, Failure> {
    SequenceName::from_cli(name).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown sequence '{name}'; expected one of {}",
            SequenceName::CLI_NAMES.join(", ")
        ))
    })
}

fn cmd_generate(cli: &Cli, sequence: &str, length: usize, out: &mut String) -> Result<(), Failure> {
    let name = parse_sequence(sequence)?;
    let word = catalog::prefix_of(name, length)?;
    match cli.format {
        Format::Text => {
            let _ = writeln!(out, "{word}");
        }
        Format::Csv => {
            let _ = writeln!(out, "i,letter");
            for (i, &s) in word.symbols().iter().enumerate() {
                let _ = writeln!(out, "{i},{}", word.alphabet().name(s));
            }
        }
        Format::Json => {
            let letters: Vec<&str> =
                word.symbols().iter().map(|&s| word.alphabet().name(s)).collect();
            let v = serde_json::json!({
                "sequence": sequence,
                "length": length,
                "letters": letters,
            });
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(())
}

fn cmd_gaps(
    cli: &Cli,
    factor: &str,
    count: usize,
    method: GapMethod,
    out: &mut String,
) -> Result<(), Failure> {
    let w = gaps::parse_factor(factor)?;
    let (class, values) = match method {
        GapMethod::Scan => (None, gaps::gaps_by_scan(&w, count)?),
        GapMethod::Morphic => {
            let class = gaps::classify(&w)?;
            let values = gaps::gap_stream(&class, count)?;
            (Some(class), values)
        }
    };
    let header = class.as_ref().map(|c| {
        let members: Vec<&str> = c.members.iter().map(|m| m.as_str()).collect();
        let mut h = format!("k={} members={} s0={}", c.k, members.join(","), c.sigma0);
        if let Some(s1) = c.sigma1 {
            let _ = write!(h, " s1={s1}");
        }
        h
    });
    match cli.format {
        Format::Text => {
            if let Some(h) = header {
                let _ = writeln!(out, "{h}");
            }
            let strings: Vec<String> = values.iter().map(|g| g.to_string()).collect();
            let _ = writeln!(out, "{}", strings.join(" "));
        }
        Format::Csv => {
            let _ = writeln!(out, "i,gap");
            for (i, g) in values.iter().enumerate() {
                let _ = writeln!(out, "{i},{g}");
            }
        }
        Format::Json => {
            let mut v = serde_json::json!({ "factor": factor, "gaps": values });
            if let Some(c) = class {
                v["k"] = c.k.into();
                v["members"] =
                    c.members.iter().map(|m| m.as_str()).collect::<Vec<_>>().into();
                v["sigma0"] = c.sigma0.into();
                if let Some(s1) = c.sigma1 {
                    v["sigma1"] = s1.into();
                }
            }
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<(u128, u128), Failure> {
    let bad = || Failure::Usage(format!("expected a number or a..b range, got '{text}'"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u128 = a.parse().map_err(|_| bad())?;
        let b: u128 = b.parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a, b))
    } else {
        let n: u128 = text.parse().map_err(|_| bad())?;
        Ok((n, n))
    }
}

fn cmd_discrepancy(
    cli: &Cli,
    range: &str,
    method: DiscrepancyMethod,
    out: &mut String,
) -> Result<(), Failure> {
    let (lo, hi) = parse_range(range)?;
    let values: Vec<(u128, i64)> = match method {
        DiscrepancyMethod::Brute => {
            let hi = usize::try_from(hi)
                .map_err(|_| Failure::Usage("range too large for brute counting".into()))?;
            let all = transducer::discrepancy_brute_upto(hi);
            (lo..=hi as u128).map(|n| (n, all[n as usize].as_thirds())).collect()
        }
        DiscrepancyMethod::Degree => {
            let t1 = transducer::degree_transducer();
            (lo..=hi)
                .map(|n| (n, transducer::discrepancy_by_degree(&t1, n).as_thirds()))
                .collect()
        }
        DiscrepancyMethod::T2 => {
            let t2 = transducer::discrepancy_transducer();
            (lo..=hi).map(|n| (n, t2.run(n).as_thirds())).collect()
        }
        DiscrepancyMethod::T2base2 => {
            let t2 = transducer::base2_reduction(&transducer::discrepancy_transducer())?;
            (lo..=hi).map(|n| (n, t2.run(n).as_thirds())).collect()
        }
    };
    match cli.format {
        Format::Text => {
            for (n, v) in values {
                let _ = writeln!(out, "{n} {v}");
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "N,threeD");
            for (n, v) in values {
                let _ = writeln!(out, "{n},{v}");
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> =
                values.iter().map(|(n, v)| serde_json::json!({"n": n.to_string(), "threeD": v})).collect();
            let _ = writeln!(out, "{}", serde_json::Value::Array(items));
        }
    }
    Ok(())
}

fn cmd_matching(
    cli: &Cli,
    depth: u32,
    action: &MatchingAction,
    out: &mut String,
) -> Result<(), Failure> {
    if depth > 10 {
        return Err(Failure::Usage("depth above 10 would build over a million letters".into()));
    }
    let w = matching::phi_plus_iterate(depth);
    match action {
        MatchingAction::Links => {
            let m = matching::find_matching(&w);
            match cli.format {
                Format::Text => {
                    for line in m.dump_lines(&w) {
                        let _ = writeln!(out, "{line}");
                    }
                }
                Format::Csv => {
                    let _ = writeln!(out, "i,j,dir");
                    for line in m.dump_lines(&w) {
                        let _ = writeln!(out, "{}", line.replace(' ', ","));
                    }
                }
                Format::Json => {
                    let items: Vec<serde_json::Value> = m
                        .links()
                        .iter()
                        .map(|l| {
                            let dir = if w[l.i] == matching::DecoratedSymbol::CRight {
                                "R"
                            } else {
                                "L"
                            };
                            serde_json::json!({"i": l.i, "j": l.j, "dir": dir})
                        })
                        .collect();
                    let _ = writeln!(out, "{}", serde_json::Value::Array(items));
                }
            }
        }
        MatchingAction::Rotate => {
            let m = matching::find_matching(&w);
            let rotated = matching::rotate_along_links(&w, &m)?;
            let word = matching::to_word(&rotated);
            match cli.format {
                Format::Text => {
                    let _ = writeln!(out, "{word}");
                }
                Format::Csv => {
                    let _ = writeln!(out, "i,letter");
                    for (i, s) in rotated.iter().enumerate() {
                        let _ = writeln!(out, "{i},{}", s.ascii());
                    }
                }
                Format::Json => {
                    let letters: Vec<&str> = rotated.iter().map(|s| s.ascii()).collect();
                    let _ =
                        writeln!(out, "{}", serde_json::json!({"depth": depth, "rotated": letters}));
                }
            }
        }
        MatchingAction::Degrees => {
            let degrees = matching::degrees_up_to(w.len());
            match cli.format {
                Format::Text => {
                    for (j, d) in degrees.iter().enumerate() {
                        let _ = writeln!(out, "{j} {d}");
                    }
                }
                Format::Csv => {
                    let _ = writeln!(out, "j,deg");
                    for (j, d) in degrees.iter().enumerate() {
                        let _ = writeln!(out, "{j},{d}");
                    }
                }
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::json!({"degrees": degrees}));
                }
            }
        }
    }
    Ok(())
}

fn cmd_kernel(
    cli: &Cli,
    sequence: &str,
    base: usize,
    depth: usize,
    fingerprint: usize,
    out: &mut String,
) -> Result<(), Failure> {
    if base < 2 || fingerprint == 0 || depth == 0 {
        return Err(Failure::Usage("kernel needs base >= 2, depth >= 1, fingerprint >= 1".into()));
    }
    let name = parse_sequence(sequence)?;
    let stream = catalog::stream_of(name).ok_or_else(|| {
        Failure::Usage(format!("'{sequence}' is not stream-backed; use tm, A, Abar, Aplus, B or Bbar"))
    })?;
    let report = kernel::explore_kernel(&stream, base, depth, fingerprint)?;
    match cli.format {
        Format::Text => {
            let per: Vec<String> = report.new_per_depth.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                out,
                "distinct={} closed={} fingerprint={} new-per-depth={}",
                report.distinct,
                report.closed,
                report.fingerprint_len,
                per.join(",")
            );
        }
        Format::Csv => {
            let _ = writeln!(out, "depth,new");
            for (d, c) in report.new_per_depth.iter().enumerate() {
                let _ = writeln!(out, "{d},{c}");
            }
        }
        Format::Json => {
            let v = serde_json::json!({
                "sequence": sequence,
                "base": report.base,
                "fingerprint": report.fingerprint_len,
                "distinct": report.distinct,
                "closed": report.closed,
                "newPerDepth": report.new_per_depth,
            });
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(())
}

fn cmd_residue(
    cli: &Cli,
    mu: u32,
    modulus: u64,
    residue_class: u64,
    bound: u32,
    out: &mut String,
) -> Result<(), Failure> {
    if modulus == 0 {
        return Err(Failure::Usage("modulus must be positive".into()));
    }
    let hit = residue::hit_residue_class(mu, modulus, residue_class, bound)?;
    let verified = hit.spec.verify()?;
    let digits: Vec<String> = hit.spec.digits.iter().map(|d| d.to_string()).collect();
    match cli.format {
        Format::Text => {
            let _ = writeln!(
                out,
                "digits={} value={} class={} mod {} phase1={} brute={} verified={}",
                digits.join(","),
                hit.spec.value(),
                residue_class % modulus,
                modulus,
                hit.phase1_digits,
                hit.brute,
                verified
            );
        }
        Format::Csv => {
            let _ = writeln!(out, "mu,modulus,residue,value,digits,verified");
            let _ = writeln!(
                out,
                "{mu},{modulus},{},{},{},{verified}",
                residue_class % modulus,
                hit.spec.value(),
                digits.join(" ")
            );
        }
        Format::Json => {
            let v = serde_json::json!({
                "mu": mu,
                "modulus": modulus,
                "residue": residue_class % modulus,
                "digits": hit.spec.digits,
                "value": hit.spec.value().to_string(),
                "phase1Digits": hit.phase1_digits,
                "brute": hit.brute,
                "verified": verified,
            });
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(())
}

fn cmd_expsum(
    cli: &Cli,
    d: u64,
    ell: u64,
    lambda: u32,
    nu_max: u32,
    out: &mut String,
) -> Result<(), Failure> {
    if d % 2 == 0 || d == 0 {
        return Err(Failure::Usage("the modulus d must be odd and positive".into()));
    }
    if ell >= d {
        return Err(Failure::Usage("require 0 <= ell < d".into()));
    }
    let rows: Vec<(u32, f64)> = (lambda..=nu_max.max(lambda))
        .map(|nu| (nu, residue::g_product(ell, d, lambda, nu).norm()))
        .collect();
    match cli.format {
        Format::Text => {
            for (nu, g) in &rows {
                let _ = writeln!(out, "{nu} {g:.12e}");
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "nu,absG");
            for (nu, g) in &rows {
                let _ = writeln!(out, "{nu},{g:.12e}");
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(nu, g)| serde_json::json!({"nu": nu, "absG": format!("{g:.12e}")}))
                .collect();
            let _ = writeln!(out, "{}", serde_json::Value::Array(items));
        }
    }
    Ok(())
}

fn builtin_transducer(which: &str) -> Result<WeightedTransducer, Failure> {
    match which {
        "t1" => Ok(transducer::degree_transducer()),
        "t2" => Ok(transducer::discrepancy_transducer()),
        "t2base2" => Ok(transducer::base2_reduction(&transducer::discrepancy_transducer())?),
        _ => Err(Failure::Usage(format!("unknown transducer '{which}'; use t1, t2 or t2base2"))),
    }
}

fn cmd_transducer(cli: &Cli, action: &TransducerAction, out: &mut String) -> Result<(), Failure> {
    match action {
        TransducerAction::Dump { which, file } => {
            let t = builtin_transducer(which)?;
            if file == "-" {
                out.push_str(&t.dump());
            } else {
                fs::write(file, t.dump())?;
            }
            Ok(())
        }
        TransducerAction::Run { file, n } => {
            let mut text = String::new();
            fs::File::open(file)?.read_to_string(&mut text)?;
            let t = WeightedTransducer::parse(&text)?;
            let value = t.run(*n);
            match cli.format {
                Format::Text => {
                    let _ = writeln!(out, "{value}");
                }
                Format::Csv => {
                    let _ = writeln!(out, "n,num3");
                    let _ = writeln!(out, "{n},{}", value.as_thirds());
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::json!({"n": n.to_string(), "num3": value.as_thirds()})
                    );
                }
            }
            Ok(())
        }
        TransducerAction::Reduce { input, output } => {
            let mut text = String::new();
            fs::File::open(input)?.read_to_string(&mut text)?;
            let t = WeightedTransducer::parse(&text)?;
            let reduced = transducer::base2_reduction(&t)?;
            if output == "-" {
                out.push_str(&reduced.dump());
            } else {
                fs::write(output, reduced.dump())?;
            }
            Ok(())
        }
    }
}

fn cmd_verify(cli: &Cli, suite: &str, out: &mut String) -> Result<(), Failure> {
    let outcomes = verify::run_suite(suite).ok_or_else(|| {
        Failure::Usage(format!("unknown suite '{suite}'; expected one of {}", verify::SUITES.join(", ")))
    })?;
    let all_passed = outcomes.iter().all(|o| o.passed);
    match cli.format {
        Format::Text => {
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{status} {}: {}", o.name, o.detail);
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "name,passed,detail");
            for o in &outcomes {
                let _ = writeln!(out, "{},{},{:?}", o.name, o.passed, o.detail);
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = outcomes
                .iter()
                .map(|o| serde_json::json!({"name": o.name, "passed": o.passed, "detail": o.detail}))
                .collect();
            let _ = writeln!(out, "{}", serde_json::Value::Array(items));
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
