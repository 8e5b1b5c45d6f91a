use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use covergen::calculus::{self, CoverOptions, SaturationConfig};
use covergen::dbcover::{db_cover, unravel};
use covergen::flatten::flatten;
use covergen::oracle::{acyclic_cover, check_extension, check_residue, AcyclicOptions, ExtensionResult};
use covergen::parse::{parse_problem, CoverQuery, Problem, Query};
use covergen::reach::{breach, ReachConfig, Verdict, DEFAULT_MAX_ITER};
use covergen::solver::Theory;
use covergen::undef::{saturate_undef, undef_cover, UndefConfig};
use covergen::{print, Error, Formula};

#[derive(Parser)]
#[command(name = "covergen", version, about = "Covers, saturation traces and safety checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Accepted for reproducible invocations; every procedure is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a final `summary:` line.
    #[arg(long, global = true)]
    summary: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the cover of a `(cover ...)` query.
    Cover {
        file: PathBuf,
        /// Use the unary-signature procedure and print the dag-format cover.
        #[arg(long)]
        dag: bool,
        /// Keep clauses entailed by other clauses.
        #[arg(long)]
        no_subsumption: bool,
        /// Also print the saturation trace.
        #[arg(long)]
        trace: bool,
        /// Check the cover against the residue and extension conditions on
        /// models with at most K elements per sort.
        #[arg(long, value_name = "K")]
        check: Option<usize>,
    },
    /// Print the saturation trace of a `(cover ...)` query.
    Saturate { file: PathBuf },
    /// Run backward reachability on a `(system ...)`.
    Safety {
        file: PathBuf,
        #[arg(long, env = "COVERGEN_BUDGET", default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
}

struct Outcome {
    code: u8,
    text: String,
    summary: String,
}

fn load(path: &PathBuf) -> Result<Problem, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_problem(&text)
}

fn cover_query(p: &Problem) -> Result<&CoverQuery, Error> {
    match &p.query {
        Query::Cover(q) => Ok(q),
        Query::System(_) => Err(Error::Input("expected a (cover ...) query".into())),
    }
}

fn trace_config() -> SaturationConfig {
    SaturationConfig {
        trace: true,
        ..SaturationConfig::default()
    }
}

fn print_trace(out: &mut String, p: &Problem, q: &CoverQuery) -> Result<(), Error> {
    let flat = flatten(&q.body, &q.evars);
    let sat = match &p.theory {
        Theory::Undef(sig) => saturate_undef(&flat.literals, &flat.evars, &p.prec, &trace_config(), &UndefConfig::new(sig))?,
        Theory::Empty => calculus::saturate(&flat.literals, flat.evars.len(), &p.prec, &trace_config())?,
        Theory::Axioms(..) => return Err(Error::Unsupported("saturation modulo axioms".into())),
    };
    for line in &sat.trace {
        let _ = writeln!(out, "{line}");
    }
    Ok(())
}

fn cover(p: &Problem, dag: bool, subsumption: bool, trace: bool, check: Option<usize>) -> Result<Outcome, Error> {
    let q = cover_query(p)?;
    let start = Instant::now();
    let mut out = String::new();
    if trace {
        print_trace(&mut out, p, q)?;
        out.push('\n');
    }
    let (text, formula, count) = if dag {
        if !p.theory.is_empty() {
            return Err(Error::Unsupported("--dag needs the empty theory".into()));
        }
        let d = db_cover(&q.body, &q.evars, &p.prec)?;
        (d.render(&p.prec), unravel(&d)?, d.psi.len())
    } else {
        match &p.theory {
            Theory::Empty => {
                let opts = CoverOptions {
                    subsumption,
                    theory: Theory::Empty,
                };
                let cfg = SaturationConfig {
                    trace: false,
                    ..SaturationConfig::default()
                };
                let c = calculus::cover(&q.body, &q.evars, &p.prec, &cfg, &opts)?;
                (c.to_string(), c.to_formula(), c.clauses.len())
            }
            Theory::Undef(sig) => {
                let cfg = SaturationConfig {
                    trace: false,
                    ..SaturationConfig::default()
                };
                let c = undef_cover(&q.body, &q.evars, &p.prec, &cfg, &UndefConfig::new(sig), subsumption)?;
                (c.to_string(), c.to_formula(), c.clauses.len())
            }
            Theory::Axioms(..) => {
                let c = acyclic_cover(&Formula::conj(&q.body), &p.theory, &AcyclicOptions::default())?;
                if !c.complete {
                    eprintln!("warning: clause enumeration budget exhausted; the cover may be too weak");
                }
                (print::formula(&c.formula, &p.prec), c.formula.clone(), c.clauses.len())
            }
        }
    };
    let _ = writeln!(out, "{text}");
    let mut code = 0;
    if let Some(k) = check {
        let phi = Formula::conj(&q.body);
        let residue = check_residue(&phi, &formula, &p.theory)?;
        let ext = check_extension(&phi, &formula, &p.theory, k);
        let ext_text = match &ext {
            ExtensionResult::Pass => "pass".to_string(),
            ExtensionResult::Fail(w) => format!("fail at {w}"),
            ExtensionResult::Inconclusive => "inconclusive".to_string(),
        };
        let _ = writeln!(out, "check residue: {}", if residue { "pass" } else { "fail" });
        let _ = writeln!(out, "check extension (k = {k}): {ext_text}");
        if !residue || ext.is_fail() {
            code = 1;
        }
    }
    Ok(Outcome {
        code,
        text: out,
        summary: format!("summary: command=cover clauses={count} ms={}", start.elapsed().as_millis()),
    })
}

fn safety(p: &Problem, max_iter: usize) -> Result<Outcome, Error> {
    let Query::System(sys) = &p.query else {
        return Err(Error::Input("expected a (system ...) query".into()));
    };
    let start = Instant::now();
    let mut out = String::new();
    let cfg = ReachConfig {
        max_iter,
        ..ReachConfig::default()
    };
    let r = breach(sys, &cfg)?;
    let code = match &r.verdict {
        Verdict::Safe(b) => {
            let _ = writeln!(out, "safe");
            let _ = writeln!(out, "{}", print::formula(b, &p.prec));
            0
        }
        Verdict::Unsafe(k) => {
            let _ = writeln!(out, "unsafe after {k} steps");
            1
        }
        Verdict::BudgetExceeded => {
            let _ = writeln!(out, "unknown: iteration budget {max_iter} exhausted");
            3
        }
    };
    let sizes: Vec<String> = r.frontier_sizes.iter().map(ToString::to_string).collect();
    Ok(Outcome {
        code,
        text: out,
        summary: format!(
            "summary: command=safety code={code} frontier={} ms={}",
            sizes.join(","),
            start.elapsed().as_millis()
        ),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Cover {
            file,
            dag,
            no_subsumption,
            trace,
            check,
        } => cover(&load(file)?, *dag, !no_subsumption, *trace, *check),
        Command::Saturate { file } => {
            let p = load(file)?;
            let mut out = String::new();
            print_trace(&mut out, &p, cover_query(&p)?)?;
            Ok(Outcome {
                code: 0,
                text: out,
                summary: "summary: command=saturate".into(),
            })
        }
        Command::Safety { file, max_iter } => safety(&load(file)?, *max_iter),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(mut o) => {
            if cli.summary {
                let _ = writeln!(o.text, "{}", o.summary);
            }
            let _ = std::io::stdout().lock().write_all(o.text.as_bytes());
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
