use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use splitlocal::action::{act_hecke, apply_polynomial_at_frobenius, oracle_act_hecke, InvSum};
use splitlocal::dvr::{Mat, Prime};
use splitlocal::fixtures::Fixtures;
use splitlocal::hecke::{hecke_polynomial, Generator, HeckeElement};
use splitlocal::invariants::{canonical_rep, canonicalize, invariants, stabilizer_conductor_oracle, InvTuple, LatticePair};
use splitlocal::verify::{distrel_suite, run_suite, Check};
use splitlocal::Error;

#[derive(Parser)]
#[command(name = "splitlocal", version, about = "Invariants, Hecke action and distribution relations at a split prime")]
struct Cli {
    /// Residue characteristic.
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Directory with the printed-value fixtures (defaults to the embedded copies).
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants and conductor of a lattice pair read as JSON {"v": [[..]], "w": [[..]]}.
    Inv {
        /// Input file; stdin when omitted or `-`.
        input: Option<PathBuf>,
    },
    /// Apply a generator, a monomial such as `t_g1*t_h2^-1`, or `C<i>` to a tuple.
    Act {
        op: String,
        tuple: String,
        /// Also evaluate at q = P and compare with coset enumeration.
        #[arg(long)]
        at_q: Option<u64>,
    },
    /// The canonical representative of a tuple.
    Rep { tuple: String },
    /// Conductor of a tuple; `--oracle` adds the stabilizer computation.
    Conductor {
        tuple: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = ["satake", "cosets", "retraction", "conductor", "distrel", "all"])]
        suite: String,
    },
    /// H_w(Fr) applied to a conductor-0 tuple.
    Distrel {
        #[arg(default_value = "(0,0,0,0,0,0)")]
        tuple: String,
    },
}

enum Failure {
    Verification,
    Input(String),
    Singular(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular => Failure::Singular(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

#[derive(Deserialize)]
struct PairInput {
    p: Option<u64>,
    v: Mat,
    w: Mat,
}

#[derive(Serialize)]
struct PairOutput<'a> {
    p: u64,
    #[serde(flatten)]
    pair: &'a LatticePair,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Singular(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn prime(cli: &Cli) -> Result<Prime, Failure> {
    Ok(Prime::new(cli.p.unwrap_or(2))?)
}

fn oracle_prime(p: u64) -> Result<Prime, Failure> {
    if p != 2 && p != 3 {
        return Err(Failure::Input(format!("oracle computations need p in {{2, 3}}, got {p}")));
    }
    Ok(Prime::new(p)?)
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

/// Parses a tuple, reporting its canonical form when it is not canonical.
fn parse_tuple(s: &str) -> Result<InvTuple, Failure> {
    s.parse::<InvTuple>().map_err(|e| match e {
        Error::NotCanonical { given, canonical } => Failure::Input(format!(
            "tuple {given:?} is not canonical; its canonical form is {canonical:?}"
        )),
        e => e.into(),
    })
}

fn parse_op(s: &str) -> Result<HeckeElement, Failure> {
    let s = s.trim();
    if let Some(i) = s.strip_prefix('C').and_then(|i| i.parse::<usize>().ok()) {
        let poly = hecke_polynomial();
        return poly
            .coeffs
            .get(i)
            .cloned()
            .ok_or_else(|| Failure::Input(format!("the Hecke polynomial has no coefficient C{i}")));
    }
    let mut h = HeckeElement::one();
    for factor in s.split('*') {
        let (name, e) = match factor.split_once('^') {
            Some((n, e)) => (n, e.trim().parse::<i32>().map_err(|_| Failure::Input(format!("bad exponent in `{factor}`")))?),
            None => (factor, 1),
        };
        let g: Generator = name.trim().parse()?;
        h = &h * &HeckeElement::generator_pow(g, e)?;
    }
    Ok(h)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Inv { input } => {
            let text = match input {
                Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path).map_err(Error::from)?,
                _ => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).map_err(Error::from)?;
                    s
                }
            };
            let raw: PairInput = serde_json::from_str(&text).map_err(Error::from)?;
            let p = Prime::new(raw.p.or(cli.p).unwrap_or(2))?;
            let pair = LatticePair::new(raw.v, raw.w)?;
            let t = invariants(&pair, p)?;
            match cli.format {
                Format::Json => println!("{}", json!({"inv": t.to_array(), "conductor": t.conductor()})),
                Format::Pretty => println!("{t}  conductor {}", t.conductor()),
            }
        }
        Cmd::Rep { tuple } => {
            let t = parse_tuple(tuple)?;
            let p = prime(cli)?;
            let pair = canonical_rep(t, p);
            match cli.format {
                Format::Json => print_json(&PairOutput { p: p.get(), pair: &pair }),
                Format::Pretty => println!("V = {:?}\nW = {:?}", pair.v.mat(), pair.w.mat()),
            }
        }
        Cmd::Conductor { tuple, oracle } => {
            let raw = tuple.parse::<InvTuple>().or_else(|e| match e {
                Error::NotCanonical { given, .. } => canonicalize(given),
                e => Err(e),
            })?;
            let c = raw.conductor();
            let stab = if *oracle {
                let p = oracle_prime(cli.p.unwrap_or(2))?;
                Some(stabilizer_conductor_oracle(raw.d as u32, raw.m as u32, raw.n as u32, p)?)
            } else {
                None
            };
            match cli.format {
                Format::Json => println!("{}", json!({"inv": raw.to_array(), "conductor": c, "oracle": stab})),
                Format::Pretty => match stab {
                    Some(o) => println!("{raw}  conductor {c}  oracle {o}"),
                    None => println!("{raw}  conductor {c}"),
                },
            }
            if stab.is_some_and(|o| o != c) {
                return Err(Failure::Verification);
            }
        }
        Cmd::Act { op, tuple, at_q } => {
            let h = parse_op(op)?;
            let t = parse_tuple(tuple)?;
            let x = InvSum::single(t);
            let sym = act_hecke(&h, &x)?;
            let Some(q) = at_q else {
                match cli.format {
                    Format::Json => print_json(&sym),
                    Format::Pretty => println!("{sym}"),
                }
                return Ok(());
            };
            let p = oracle_prime(*q)?;
            let evaluated: Vec<_> =
                sym.eval(*q as i64)?.into_iter().filter(|(_, c)| *c != 0).collect();
            let oracle: Vec<_> = oracle_act_hecke(&h, &x, p)?.into_iter().collect();
            let matches = evaluated == oracle;
            let mass: i64 = evaluated.iter().map(|(_, c)| c).sum();
            match cli.format {
                Format::Json => print_json(&json!({
                    "symbolic": sym,
                    "q": q,
                    "evaluated": evaluated.iter().map(|(t, c)| json!({"inv": t.to_array(), "count": c})).collect::<Vec<_>>(),
                    "oracle": oracle.iter().map(|(t, c)| json!({"inv": t.to_array(), "count": c})).collect::<Vec<_>>(),
                    "mass": mass,
                    "match": matches,
                })),
                Format::Pretty => {
                    println!("{sym}");
                    for (t, c) in &evaluated {
                        println!("  {c:>6}  {t}");
                    }
                    println!("mass {mass} at q={q}, oracle {}", if matches { "MATCH" } else { "MISMATCH" });
                }
            }
            if !matches {
                return Err(Failure::Verification);
            }
        }
        Cmd::Verify { suite } => {
            let fixtures = Fixtures::load_or_embedded(cli.fixtures.as_deref())?;
            let p = match suite.as_str() {
                "satake" | "distrel" => prime(cli)?,
                _ => oracle_prime(cli.p.unwrap_or(2))?,
            };
            let checks = run_suite(suite, p, &fixtures)?;
            let report = if suite == "distrel" { Some(distrel_suite(&fixtures)?.1) } else { None };
            let ok = checks.iter().all(|c| c.passed);
            match cli.format {
                Format::Json => print_json(&json!({"p": p.get(), "checks": checks, "distrel": report, "passed": ok})),
                Format::Pretty => {
                    print_checks(&checks);
                    if let Some(r) = report {
                        println!("\nclass {} | computed | printed", if r.projected { "(k,d,m,n)" } else { "(k,s,r,d,m,n)" });
                        for row in &r.rows {
                            let mark = if row.agrees { "=" } else { "!" };
                            println!("{mark} {:?} | {} | {}", row.class, row.computed, row.printed);
                        }
                        println!("ledger entries applied: {:?}", r.applied_entries);
                        println!("unresolved ledger entries: {:?}", r.unresolved_entries);
                    }
                }
            }
            if !ok {
                return Err(Failure::Verification);
            }
        }
        Cmd::Distrel { tuple } => {
            let t = parse_tuple(tuple)?;
            let rel = apply_polynomial_at_frobenius(&hecke_polynomial(), t)?;
            match cli.format {
                Format::Json => print_json(&rel),
                Format::Pretty => {
                    for (u, c) in rel.terms() {
                        println!("{u}  conductor {}  {c}", u.conductor());
                    }
                }
            }
        }
    }
    Ok(())
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{mark} [{}] {}", c.suite, c.name);
        } else {
            println!("{mark} [{}] {}: {}", c.suite, c.name, c.detail);
        }
    }
}
