//! `qflag`: quantum Schubert calculus from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qflag_core::cache::{load_table, save_table};
use qflag_core::classical::ClassicalOracle;
use qflag_core::graphs::{bruhat_graph, transition_graph};
use qflag_core::perm::Permutation;
use qflag_core::report::VerifyReport;
use qflag_core::ring::{
    full_table, verify_classical_limit, verify_ring_axioms, ProductTable, MAX_RANK,
};
use qflag_core::symmetry::{
    calibrate, reduce_min_length, verify_cyclic, verify_qqq, verify_stability, ConventionProfile,
    ReductionOutcome,
};
use qflag_core::Error;

/// Default rank guard for exhaustive verification sweeps.
const VERIFY_GUARD: usize = 5;

#[derive(Parser)]
#[command(
    name = "qflag",
    version,
    about = "Exact quantum cohomology of complete flag varieties, built from Monk's rule"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for sampled verification sweeps
    #[arg(long, global = true, default_value_t = 12345)]
    seed: u64,

    /// Sample size for sweeps that cannot run exhaustively
    #[arg(long, global = true, default_value_t = 10_000)]
    sample: usize,

    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Raise or lower the rank guard on verification sweeps
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Product table cache file (see also QFLAG_CACHE_DIR)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    /// Ring laws: Monk agreement, commutativity, associativity, symmetry,
    /// nonnegativity, homogeneity, degree cases, classical limit
    Axioms,
    /// Constant terms against the divided-difference oracle
    Classical,
    /// The calibrated single-step cyclic identity
    Cyclic,
    /// The iterated Q-monomial identity
    Qqq,
    /// Stability reductions to rank n-1
    Stability,
    /// Labelled shift-invariance of the transition graph
    Graph,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Bruhat,
    Transition,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quantum product of two Schubert classes
    Product { u: String, v: String },
    /// Print the structure polynomial C_{u,v,w}
    Coeff { u: String, v: String, w: String },
    /// Print one Gromov-Witten invariant: the coefficient of q^d in C_{u,v,w}
    Gw {
        u: String,
        v: String,
        w: String,
        /// Exponents d_1 .. d_{n-1}
        #[arg(allow_hyphen_values = true, num_args = 0.., value_parser = clap::value_parser!(i64))]
        d: Vec<i64>,
    },
    /// Run a verification sweep and report counts
    Verify { kind: VerifyKind, n: usize },
    /// Emit the Bruhat or transition graph
    Graph {
        kind: GraphKind,
        n: usize,
        /// Shorthand for --format dot
        #[arg(long)]
        dot: bool,
    },
    /// Reduce C_{u,v,w} through the minimal-length shift search
    Reduce { u: String, v: String, w: String },
    /// Build the full product table (and save it when a cache is configured)
    Table { n: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_internal() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn parse_perm(s: &str) -> Result<Permutation, Error> {
    s.parse::<Permutation>().map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos,
            msg: format!("in {s:?}: {msg}"),
        },
        other => other,
    })
}

fn same_rank(perms: &[&Permutation]) -> Result<usize, Error> {
    let n = perms[0].n();
    for p in perms {
        if p.n() != n {
            return Err(Error::RankMismatch {
                left: n,
                right: p.n(),
            });
        }
    }
    Ok(n)
}

/// Resolves the cache path: --cache wins, otherwise QFLAG_CACHE_DIR
/// provides a per-rank default file.
fn cache_path(cli: &Cli, n: usize) -> Option<PathBuf> {
    if let Some(path) = &cli.cache {
        return Some(path.clone());
    }
    std::env::var_os("QFLAG_CACHE_DIR")
        .map(|dir| Path::new(&dir).join(format!("qflag-table-{n}.json")))
}

/// A table for queries: loaded from cache when one exists, lazily computed
/// otherwise.
fn table_for_queries(cli: &Cli, n: usize) -> Result<ProductTable, Error> {
    match cache_path(cli, n) {
        Some(path) if path.exists() => load_table(&path),
        _ => ProductTable::new(n),
    }
}

fn filled_table(n: usize) -> Result<ProductTable, Error> {
    full_table(n)
}

fn verify_guard(cli: &Cli, n: usize) -> Result<(), Error> {
    let guard = cli.max_n.unwrap_or(VERIFY_GUARD);
    if cli.max_n.is_some_and(|g| g > VERIFY_GUARD) {
        eprintln!("warning: verification guard raised to {guard}; expect long runtimes");
    }
    if n > guard {
        return Err(Error::SizeGuard(format!(
            "verification at n={n} exceeds the guard ({guard}); pass --max-n {n} to override"
        )));
    }
    Ok(())
}

fn calibrated_profile() -> Result<ConventionProfile, Error> {
    calibrate(&filled_table(3)?)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Product { u, v } => {
            let u = parse_perm(u)?;
            let v = parse_perm(v)?;
            let n = same_rank(&[&u, &v])?;
            let table = table_for_queries(cli, n)?;
            let product = table.product(&u, &v)?;
            match cli.format {
                Format::Text => println!("{product}"),
                Format::Json => println!(
                    "{}",
                    json!({
                        "n": n,
                        "u": u.to_string(),
                        "v": v.to_string(),
                        "terms": product
                            .display_order()
                            .iter()
                            .map(|(w, poly)| json!({
                                "w": w.to_string(),
                                "poly": poly.to_json_terms(),
                            }))
                            .collect::<Vec<_>>(),
                    })
                ),
                Format::Csv => {
                    println!("w,poly");
                    for (w, poly) in product.display_order() {
                        println!("{w},\"{poly}\"");
                    }
                }
                Format::Dot => {
                    return Err(Error::InvalidArgument(
                        "dot format only applies to graphs".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Coeff { u, v, w } => {
            let u = parse_perm(u)?;
            let v = parse_perm(v)?;
            let w = parse_perm(w)?;
            let n = same_rank(&[&u, &v, &w])?;
            let table = table_for_queries(cli, n)?;
            let poly = table.structure_poly(&u, &v, &w)?;
            match cli.format {
                Format::Text => println!("{poly}"),
                Format::Json => println!(
                    "{}",
                    json!({
                        "n": n,
                        "u": u.to_string(),
                        "v": v.to_string(),
                        "w": w.to_string(),
                        "poly": poly.to_json_terms(),
                    })
                ),
                Format::Csv => println!("u,v,w,poly\n{u},{v},{w},\"{poly}\""),
                Format::Dot => {
                    return Err(Error::InvalidArgument(
                        "dot format only applies to graphs".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Gw { u, v, w, d } => {
            let u = parse_perm(u)?;
            let v = parse_perm(v)?;
            let w = parse_perm(w)?;
            let n = same_rank(&[&u, &v, &w])?;
            let exps: Vec<i32> = d
                .iter()
                .map(|&e| {
                    i32::try_from(e).map_err(|_| {
                        Error::InvalidArgument(format!("degree entry {e} out of range"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let table = table_for_queries(cli, n)?;
            let value = table.gw_invariant(&u, &v, &w, &exps)?;
            match cli.format {
                Format::Text => println!("{value}"),
                Format::Json => println!(
                    "{}",
                    json!({
                        "n": n,
                        "u": u.to_string(),
                        "v": v.to_string(),
                        "w": w.to_string(),
                        "d": exps,
                        "value": value.to_string(),
                    })
                ),
                Format::Csv => {
                    let ds: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
                    println!("u,v,w,d,value\n{u},{v},{w},{},{value}", ds.join(" "));
                }
                Format::Dot => {
                    return Err(Error::InvalidArgument(
                        "dot format only applies to graphs".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { kind, n } => {
            let n = *n;
            if n < 2 {
                return Err(Error::InvalidArgument("verification needs n >= 2".into()));
            }
            let reports = run_verify(cli, *kind, n)?;
            let ok = reports.iter().all(VerifyReport::passed);
            match cli.format {
                Format::Text => {
                    for r in &reports {
                        println!("{r}");
                    }
                    println!("{}", if ok { "ok" } else { "FAILED" });
                }
                Format::Json => println!("{}", serde_json::to_string(&reports).unwrap()),
                Format::Csv => {
                    println!("check,n,tested,failed,first_counterexample");
                    for r in &reports {
                        println!(
                            "{},{},{},{},\"{}\"",
                            r.check,
                            r.n,
                            r.tested,
                            r.failed,
                            r.first_counterexample.as_deref().unwrap_or("")
                        );
                    }
                }
                Format::Dot => {
                    return Err(Error::InvalidArgument(
                        "dot format only applies to graphs".into(),
                    ))
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Graph { kind, n, dot } => {
            let graph = match kind {
                GraphKind::Bruhat => bruhat_graph(*n)?,
                GraphKind::Transition => transition_graph(*n)?,
            };
            let name = match kind {
                GraphKind::Bruhat => format!("Br{n}"),
                GraphKind::Transition => format!("Tr{n}"),
            };
            let format = if *dot { Format::Dot } else { cli.format };
            match format {
                Format::Dot => print!("{}", graph.to_dot(&name)),
                Format::Json => println!("{}", graph.to_json()),
                Format::Text => {
                    for (u, w, (a, b)) in graph.edges() {
                        println!("{u} -> {w} [{a}{b}]");
                    }
                }
                Format::Csv => {
                    println!("from,to,a,b");
                    for (u, w, (a, b)) in graph.edges() {
                        println!("{u},{w},{a},{b}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Reduce { u, v, w } => {
            let u = parse_perm(u)?;
            let v = parse_perm(v)?;
            let w = parse_perm(w)?;
            let n = same_rank(&[&u, &v, &w])?;
            let profile = calibrated_profile()?;
            let oracle = ClassicalOracle::new(n);
            let outcome = reduce_min_length(&u, &v, &w, &profile, &oracle);
            match cli.format {
                Format::Json => {
                    let value = match &outcome {
                        ReductionOutcome::Zero { shift, min_length } => json!({
                            "kind": "zero",
                            "shift": [shift.0, shift.1, shift.2],
                            "min_length": min_length,
                        }),
                        ReductionOutcome::Classical {
                            shift,
                            monomial,
                            value,
                        } => json!({
                            "kind": "classical",
                            "shift": [shift.0, shift.1, shift.2],
                            "monomial": monomial.to_string(),
                            "value": value.to_string(),
                        }),
                        ReductionOutcome::Irreducible { shift, min_length } => json!({
                            "kind": "irreducible",
                            "shift": [shift.0, shift.1, shift.2],
                            "min_length": min_length,
                        }),
                    };
                    println!("{value}");
                }
                _ => match &outcome {
                    ReductionOutcome::Zero { shift, min_length } => println!(
                        "Zero: C = 0 (min shifted length {min_length} at (a,b,c)={shift:?})"
                    ),
                    ReductionOutcome::Classical {
                        shift,
                        monomial,
                        value,
                    } => println!("Classical: C = {value} * {monomial} at (a,b,c)={shift:?}"),
                    ReductionOutcome::Irreducible { shift, min_length } => println!(
                        "Irreducible: min shifted length {min_length} at (a,b,c)={shift:?}"
                    ),
                },
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Table { n } => {
            let n = *n;
            if n > MAX_RANK {
                return Err(Error::SizeGuard(format!(
                    "product tables support n <= {MAX_RANK}"
                )));
            }
            // single queries stay lazy up to MAX_RANK; a full build is the
            // expensive path and sits behind the sweep guard
            verify_guard(cli, n)?;
            let path = cache_path(cli, n);
            if let Some(path) = &path {
                if path.exists() {
                    let table = load_table(path)?;
                    println!(
                        "loaded table n={} with {} products from {}",
                        table.n(),
                        table.len(),
                        path.display()
                    );
                    return Ok(ExitCode::SUCCESS);
                }
            }
            let table = filled_table(n)?;
            match &path {
                Some(path) => {
                    save_table(&table, path)?;
                    println!(
                        "built table n={n} with {} products, saved to {}",
                        table.len(),
                        path.display()
                    );
                }
                None => println!("built table n={n} with {} products", table.len()),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify(cli: &Cli, kind: VerifyKind, n: usize) -> Result<Vec<VerifyReport>, Error> {
    match kind {
        VerifyKind::Axioms => {
            verify_guard(cli, n)?;
            let table = filled_table(n)?;
            let oracle = ClassicalOracle::new(n);
            verify_ring_axioms(&table, &oracle, cli.seed, cli.sample)
        }
        VerifyKind::Classical => {
            verify_guard(cli, n)?;
            let table = filled_table(n)?;
            let oracle = ClassicalOracle::new(n);
            Ok(vec![verify_classical_limit(
                &table, &oracle, cli.seed, cli.sample,
            )?])
        }
        VerifyKind::Cyclic => {
            verify_guard(cli, n)?;
            let profile = calibrated_profile()?;
            let table = filled_table(n)?;
            Ok(vec![verify_cyclic(&table, &profile, cli.seed, cli.sample)?])
        }
        VerifyKind::Qqq => {
            verify_guard(cli, n)?;
            let profile = calibrated_profile()?;
            let table = filled_table(n)?;
            Ok(vec![verify_qqq(&table, &profile, cli.seed, cli.sample)?])
        }
        VerifyKind::Stability => {
            verify_guard(cli, n)?;
            let profile = calibrated_profile()?;
            let table = filled_table(n)?;
            let prev = filled_table(n - 1)?;
            Ok(vec![verify_stability(&table, &prev, &profile)?])
        }
        VerifyKind::Graph => {
            let graph = transition_graph(n)?;
            let mut report = VerifyReport::new("graph_invariance", n);
            report.tested = graph.edge_count() as u64;
            if let Some((u, w, (a, b))) = graph.shift_violation() {
                report.failed = 1;
                report.first_counterexample = Some(format!("{u} -> {w} [{a}{b}]"));
            }
            Ok(vec![report])
        }
    }
}
