//! The `unet` command line. Exit codes: 0 ok, 2 parse error, 3 ill-formed
//! input, 4 incorrect net, 5 cap exceeded.

use crate::calculus::{check_proof, equivalent, parse_proof, translate, Proof};
use crate::cutelim::{girard_normalize, normalize, normalize_with, NormalizeOptions, Strategy};
use crate::families::{gen_family, girard_chain, Family};
use crate::nets::{
    build_graph, check_correct_with, girard_of, sequentialize_cuts, CheckOptions, Linking, NetError,
    SequentializeError, Verdict,
};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::{Read, Write};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "unet", version, about = "Unification nets for first-order multiplicative linear logic")]
pub struct Cli {
    /// Output style: human-readable text or key=value lines.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Cap on term nodes when expanding witnesses.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    pub max_nodes: usize,
    /// Cap on switchings enumerated for a failure witness.
    #[arg(long, default_value_t = 10_000, global = true)]
    pub max_switchings: u128,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide correctness of a linking.
    Check { net: String },
    /// Translate a proof to its net.
    Translate { proof: String },
    /// Eliminate all cuts of a net.
    Normalize {
        net: String,
        /// Print the net after every reduction step.
        #[arg(long)]
        trace: bool,
        /// Reduce a randomly chosen redex at each step.
        #[arg(long)]
        seed: Option<u64>,
        /// Re-check correctness after every step.
        #[arg(long)]
        verify: bool,
    },
    /// Read a proof back from a net.
    Sequentialize { net: String },
    /// Unfold a net into a Girard net with explicit witnesses.
    Girard { net: String },
    /// Decide equivalence of two proofs.
    Equiv { left: String, right: String },
    /// Benchmark a family over a list of parameters.
    Bench {
        family: String,
        #[arg(required = true)]
        sizes: Vec<usize>,
    },
    /// Print a family instance.
    Gen { family: String, n: usize },
    /// Print the graph of a net in Graphviz format.
    Graph { net: String },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ILL_FORMED: i32 = 3;
pub const EXIT_INCORRECT: i32 = 4;
pub const EXIT_CAP: i32 = 5;

/// A command failure with its exit code and diagnostic category.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub category: &'static str,
    pub message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.category, self.message)
    }
}

fn fail(code: i32, message: impl ToString) -> Failure {
    let category = match code {
        EXIT_PARSE => "parse",
        EXIT_ILL_FORMED => "ill-formed",
        EXIT_INCORRECT => "incorrect",
        EXIT_CAP => "cap",
        _ => "error",
    };
    Failure { code, category, message: message.to_string() }
}

impl From<NetError> for Failure {
    fn from(e: NetError) -> Failure {
        let code = match &e {
            NetError::Parse(_) => EXIT_PARSE,
            NetError::Cap(_) => EXIT_CAP,
            NetError::NotUnifiable(_) | NetError::Incorrect(_) => EXIT_INCORRECT,
            NetError::NotALinking(_) | NetError::Malformed(_) => EXIT_ILL_FORMED,
        };
        fail(code, e)
    }
}

/// Key/value report printed either as aligned text or as `key=value` lines.
struct Report<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Report<'_> {
    fn kv(&mut self, k: &str, v: impl std::fmt::Display) -> std::io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{k:<14} {v}"),
            Format::Machine => writeln!(self.out, "{k}={}", v.to_string().replace('\n', "\\n")),
        }
    }

    fn block(&mut self, k: &str, v: impl std::fmt::Display) -> std::io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{v}"),
            Format::Machine => self.kv(k, v),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| fail(EXIT_ILL_FORMED, e))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| fail(EXIT_ILL_FORMED, format!("{path}: {e}")))?;
    }
    Ok(s)
}

fn read_net(path: &str) -> Result<Linking, Failure> {
    Ok(Linking::parse(&read_input(path)?)?)
}

fn read_proof(path: &str) -> Result<Proof, Failure> {
    let p = parse_proof(&read_input(path)?).map_err(|e| fail(EXIT_PARSE, e))?;
    check_proof(&p).map_err(|e| fail(EXIT_ILL_FORMED, e))?;
    Ok(p)
}

fn micros(d: Duration) -> String {
    format!("{:.1}us", d.as_secs_f64() * 1e6)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(err, "{f}");
            }
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    // A reader that hung up early (`| head`) is not an error.
    let io = |e: std::io::Error| match e.kind() {
        std::io::ErrorKind::BrokenPipe => Failure { code: EXIT_OK, category: "io", message: String::new() },
        _ => fail(1, e),
    };
    let mut r = Report { format: cli.format, out };
    let check_opts = CheckOptions { max_switchings: cli.max_switchings };
    match &cli.command {
        Command::Check { net } => {
            let l = read_net(net)?;
            let rep = check_correct_with(&l, &check_opts)?;
            r.kv("verdict", rep.verdict.label()).map_err(io)?;
            match &rep.verdict {
                Verdict::Correct => {}
                Verdict::NotUnifiable(e) => r.kv("reason", e).map_err(io)?,
                Verdict::SwitchingFailure { witness, reason } => {
                    r.kv("reason", reason).map_err(io)?;
                    if let Some(w) = witness {
                        let kept: Vec<String> = w.choice.iter().map(|(v, e)| format!("{v}:{e}")).collect();
                        r.kv("switching", kept.join(" ")).map_err(io)?;
                    }
                }
            }
            r.kv("time", micros(rep.elapsed)).map_err(io)?;
            r.kv("vertices", rep.vertices).map_err(io)?;
            r.kv("edges", rep.edges).map_err(io)?;
            r.kv("leaps", rep.leaps).map_err(io)?;
            r.kv("store_nodes", rep.store_nodes).map_err(io)?;
            Ok(if rep.verdict.is_correct() { EXIT_OK } else { EXIT_INCORRECT })
        }
        Command::Translate { proof } => {
            let l = translate(&read_proof(proof)?).map_err(|e| fail(EXIT_ILL_FORMED, e))?;
            r.block("net", &l).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Normalize { net, trace, seed, verify } => {
            let l = read_net(net)?;
            let v = check_correct_with(&l, &check_opts)?.verdict;
            if !v.is_correct() {
                return Err(fail(EXIT_INCORRECT, v));
            }
            let (nf, steps, nets) = if *trace || seed.is_some() || *verify {
                let strategy = seed.map_or(Strategy::Leftmost, Strategy::Random);
                let n = normalize_with(&l, &NormalizeOptions { strategy, verify: *verify, trace: *trace })
                    .map_err(|e| fail(EXIT_INCORRECT, e))?;
                (n.net, n.steps, n.trace)
            } else {
                let (nf, steps) = normalize(&l);
                (nf, steps, vec![])
            };
            for (i, t) in nets.iter().enumerate() {
                r.kv(&format!("step{i}"), t).map_err(io)?;
                if cli.format == Format::Text {
                    writeln!(r.out).map_err(io)?;
                }
            }
            r.kv("steps", steps).map_err(io)?;
            r.block("net", &nf).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Sequentialize { net } => {
            let l = read_net(net)?;
            let p = sequentialize_cuts(&l).map_err(|e| match e {
                SequentializeError::Net(n) => Failure::from(n),
                SequentializeError::Cap(c) => fail(EXIT_CAP, c),
                SequentializeError::NotCorrect(m) => fail(EXIT_INCORRECT, m),
                other => fail(EXIT_ILL_FORMED, other),
            })?;
            r.block("proof", &p).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Girard { net } => {
            let l = read_net(net)?;
            let v = check_correct_with(&l, &check_opts)?.verdict;
            if !v.is_correct() {
                return Err(fail(EXIT_INCORRECT, v));
            }
            let g = girard_of(&l, cli.max_nodes)?;
            r.block("girard", &g).map_err(io)?;
            r.kv("term_size", g.term_size()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Equiv { left, right } => {
            let (p, q) = (read_proof(left)?, read_proof(right)?);
            let eq = equivalent(&p, &q).map_err(|e| fail(EXIT_ILL_FORMED, e))?;
            r.kv("equivalent", eq).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Gen { family, n } => {
            let f: Family = family.parse().map_err(|e| fail(EXIT_PARSE, e))?;
            let l = gen_family(f, *n, cli.max_nodes).map_err(|e| fail(EXIT_CAP, e))?;
            r.block("net", &l).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Graph { net } => {
            let l = read_net(net)?;
            let g = build_graph(&l)?;
            write!(r.out, "{}", g.to_dot()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Bench { family, sizes } => {
            let f: Family = family.parse().map_err(|e| fail(EXIT_PARSE, e))?;
            let rows: Result<Vec<BenchRow>, Failure> =
                sizes.iter().map(|&n| bench_row(f, n, cli.max_nodes, &check_opts)).collect();
            let rows = rows?;
            match cli.format {
                Format::Text => {
                    writeln!(r.out, "{:>4} {:>8} {:>12} {:>6} {:>10}", "n", "size", "check", "steps", "girard")
                        .map_err(io)?;
                    for row in &rows {
                        writeln!(
                            r.out,
                            "{:>4} {:>8} {:>12} {:>6} {:>10}",
                            row.n,
                            row.size,
                            micros(row.check_time),
                            row.steps,
                            row.girard.map_or("cap".to_string(), |g| g.to_string())
                        )
                        .map_err(io)?;
                    }
                }
                Format::Machine => {
                    for row in &rows {
                        writeln!(
                            r.out,
                            "family={f} n={} size={} check_ns={} steps={} girard_peak={}",
                            row.n,
                            row.size,
                            row.check_time.as_nanos(),
                            row.steps,
                            row.girard.map_or("cap".to_string(), |g| g.to_string())
                        )
                        .map_err(io)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// One benchmark measurement. `girard` is the family's blow-up measure: the
/// c count of an axiom atom for par-blowup, of both axiom atoms for
/// quantifier-blowup, and the peak variable occurrences of a single term
/// while normalizing G^n for cut-chain; `None` when over the node cap.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub size: usize,
    pub check_time: Duration,
    pub steps: usize,
    pub girard: Option<usize>,
}

pub fn bench_row(f: Family, n: usize, cap: usize, opts: &CheckOptions) -> Result<BenchRow, Failure> {
    let l = gen_family(f, n, cap).map_err(|e| fail(EXIT_CAP, e))?;
    // Warm-up run discarded; then the best of three.
    check_correct_with(&l, opts)?;
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let t = Instant::now();
        let rep = check_correct_with(&l, opts)?;
        best = best.min(t.elapsed());
        if !rep.verdict.is_correct() {
            return Err(fail(EXIT_INCORRECT, rep.verdict));
        }
    }
    let (_, steps) = normalize(&l);
    let girard = match f {
        Family::CutChain => girard_normalize(&girard_chain(n), cap).ok().map(|(_, s)| s.peak_term_vars),
        Family::ParBlowup => girard_of(&l, cap).ok().map(|g| g.leaf_atoms()[0].args[0].count_symbol("c")),
        Family::QuantifierBlowup => girard_of(&l, cap).ok().map(|g| g.axiom_count("c")),
    };
    Ok(BenchRow { n, size: l.size(), check_time: best, steps, girard })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["unet"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bench_cut_chain_reports_sixteen() {
        let (code, out, _) = run_str(&["--format", "machine", "bench", "cut-chain", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("steps=6 girard_peak=16"), "{out}");
    }

    #[test]
    fn gen_and_unknown_family() {
        let (code, out, _) = run_str(&["gen", "par-blowup", "0"]);
        assert_eq!((code, out.as_str()), (0, "~P(c) | P(c)\nlinks: (0 1)\n"));
        let (code, _, err) = run_str(&["gen", "nope", "1"]);
        assert_eq!(code, EXIT_PARSE);
        assert!(err.contains("unknown family"));
    }

    #[test]
    fn missing_file_is_ill_formed() {
        let (code, _, err) = run_str(&["check", "/nonexistent/net.txt"]);
        assert_eq!(code, EXIT_ILL_FORMED);
        assert!(err.starts_with("error[ill-formed]"));
    }
}
